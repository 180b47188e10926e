//! Profile documents: the JSON input format and its inline `--positions` form.
//!
//! ```json
//! {"n": 3, "positions": ["0", "1/2", "1/2"], "mode": "exact"}
//! ```
//!
//! Positions are JSON integers, fraction strings `"p/q"`, or decimals (JSON
//! numbers or strings). Decimals force floating mode.

use std::fmt;

use hotelling::{LocationProfile, Rational, Scalar};
use serde::Deserialize;
use serde_json::Number;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RawPosition {
    Number(Number),
    Text(String),
}

impl fmt::Display for RawPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RawPosition::Number(n) => write!(f, "{n}"),
            RawPosition::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct ProfileDocument {
    #[serde(default)]
    pub n: Option<usize>,
    pub positions: Vec<RawPosition>,
    #[serde(default)]
    pub mode: Option<Mode>,
}

impl ProfileDocument {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("profile document: {e}")))
    }

    /// `"0, 1/2, 1/2"` style lists.
    pub fn from_list(list: &str) -> Self {
        let positions = list
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| RawPosition::Text(s.to_string()))
            .collect();
        Self {
            n: None,
            positions,
            mode: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Exact(Rational),
    Decimal(f64),
}

impl Token {
    fn to_f64(&self) -> f64 {
        match self {
            Token::Exact(r) => r.to_f64(),
            Token::Decimal(x) => *x,
        }
    }
}

fn parse_integer(s: &str) -> Option<i64> {
    s.trim().parse::<i64>().ok()
}

fn parse_token(raw: &RawPosition) -> Result<Token, CliError> {
    let bad = |why: &str| CliError::Parse(format!("position {raw:?}: {why}"));
    match raw {
        RawPosition::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Token::Exact(Rational::from_ratio(i, 1)))
            } else {
                n.as_f64()
                    .filter(|x| x.is_finite())
                    .map(Token::Decimal)
                    .ok_or_else(|| bad("not a finite number"))
            }
        }
        RawPosition::Text(s) => {
            let s = s.trim();
            if let Some((num, den)) = s.split_once('/') {
                let num = parse_integer(num).ok_or_else(|| bad("bad numerator"))?;
                let den = parse_integer(den).ok_or_else(|| bad("bad denominator"))?;
                if den == 0 {
                    return Err(bad("zero denominator"));
                }
                let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
                Ok(Token::Exact(Rational::from_ratio(num, den)))
            } else if let Some(i) = parse_integer(s) {
                Ok(Token::Exact(Rational::from_ratio(i, 1)))
            } else {
                s.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .map(Token::Decimal)
                    .ok_or_else(|| bad("not a number or fraction"))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedProfile {
    Exact(LocationProfile<Rational>),
    Float(LocationProfile<f64>),
}

impl ParsedProfile {
    pub fn mode(&self) -> Mode {
        match self {
            ParsedProfile::Exact(_) => Mode::Exact,
            ParsedProfile::Float(_) => Mode::Float,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            ParsedProfile::Exact(p) => p.n(),
            ParsedProfile::Float(p) => p.n(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParsedInput {
    pub raw: Vec<String>,
    pub profile: ParsedProfile,
    pub warnings: Vec<String>,
}

/// Resolves the document into a profile. The document's own `mode` wins over
/// `default_mode`; any decimal position forces floating mode.
pub fn parse_document(doc: &ProfileDocument, default_mode: Mode) -> Result<ParsedInput, CliError> {
    if let Some(n) = doc.n {
        if n != doc.positions.len() {
            return Err(CliError::Parse(format!(
                "n = {n} but {} positions given",
                doc.positions.len()
            )));
        }
    }
    let tokens = doc
        .positions
        .iter()
        .map(parse_token)
        .collect::<Result<Vec<_>, _>>()?;
    let mut warnings = Vec::new();
    let mut mode = doc.mode.unwrap_or(default_mode);
    if mode == Mode::Exact && tokens.iter().any(|t| matches!(t, Token::Decimal(_))) {
        warnings.push("decimal positions given; switching to floating mode".to_string());
        mode = Mode::Float;
    }
    let profile = match mode {
        Mode::Exact => ParsedProfile::Exact(LocationProfile::new(
            tokens
                .into_iter()
                .map(|t| match t {
                    Token::Exact(r) => r,
                    Token::Decimal(_) => unreachable!("decimals force floating mode"),
                })
                .collect(),
        )?),
        Mode::Float => ParsedProfile::Float(LocationProfile::new(
            tokens.iter().map(Token::to_f64).collect(),
        )?),
    };
    Ok(ParsedInput {
        raw: doc.positions.iter().map(ToString::to_string).collect(),
        profile,
        warnings,
    })
}
