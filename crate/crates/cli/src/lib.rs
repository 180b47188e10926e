//! `hotelling` command-line tool.
//!
//! Every subcommand writes line-delimited records (JSON lines or CSV) to
//! stdout or `--out`. Vendor indices are 1-based on the command line and in
//! every emitted record.
//!
//! Exit codes: 0 success or equilibrium, 1 not an equilibrium, 2 usage or
//! parse error, 3 the gap condition and the best-response oracle disagree,
//! 4 enumeration over budget.

pub mod document;
mod error;
pub mod render;

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use hotelling::{
    best_response, canonicalize, gap_condition, grid_enumerate_equilibria, is_equilibrium_oracle,
    profit_closed_form, profit_integral_oracle, run_dynamics, sample_equilibrium,
    sample_equilibrium_grid, sample_random, sample_random_grid, LocationProfile, Outcome, Sampled,
    Schedule,
};
use serde_json::{json, Value};

pub use document::{parse_document, Mode, ParsedInput, ParsedProfile, ProfileDocument};
pub use error::CliError;
use render::Render;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_EQUILIBRIUM: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DISAGREEMENT: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

const DEFAULT_GRID: u64 = 360;

#[derive(Debug, Parser)]
#[command(
    name = "hotelling",
    version,
    about = "Vendor location game on a circular city"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::JsonLines)]
    pub format: Format,

    /// Write records here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Arithmetic for inputs that do not say; a document's own "mode" wins.
    #[arg(long, global = true, value_enum, env = "HOTELLING_MODE", default_value_t = Mode::Exact)]
    pub mode: Mode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    JsonLines,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    RoundRobin,
    Random,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    /// JSON profile document; `-` reads stdin.
    #[arg(required_unless_present = "positions", conflicts_with = "positions")]
    pub profile: Option<PathBuf>,

    /// Inline positions, e.g. "0,1/2,1/2".
    #[arg(long, allow_hyphen_values = true)]
    pub positions: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form profits, optionally checked against the integral oracle.
    Profit {
        #[command(flatten)]
        input: ProfileArgs,
        #[arg(long)]
        oracle_resolution: Option<u64>,
    },
    /// Decide equilibrium by the gap condition and by best responses.
    Check {
        #[command(flatten)]
        input: ProfileArgs,
    },
    /// Best relocation for one vendor.
    BestResponse {
        #[command(flatten)]
        input: ProfileArgs,
        /// 1-based vendor index in ascending position order.
        #[arg(long)]
        vendor: usize,
    },
    /// Draw equilibria by rejection sampling (or plain random profiles).
    Sample(SampleArgs),
    /// List every equilibrium on a grid, up to rotation and reflection.
    Enumerate(EnumerateArgs),
    /// Run best-response dynamics.
    Dynamics(DynamicsArgs),
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[arg(long, default_value_t = 1_000_000, conflicts_with = "any")]
    pub max_tries: u64,
    /// Grid denominator for exact sampling (default 360).
    #[arg(long)]
    pub grid: Option<u64>,
    /// Emit unfiltered random profiles.
    #[arg(long)]
    pub any: bool,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub grid: u64,
    #[arg(long, default_value_t = hotelling::DEFAULT_ENUMERATION_BUDGET)]
    pub budget: u128,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("start").required(true).args(["profile", "positions", "n"])))]
pub struct DynamicsArgs {
    /// Start from this JSON profile document; `-` reads stdin.
    pub profile: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub positions: Option<String>,
    /// Start from a random profile of this size.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub grid: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    pub max_steps: usize,
    #[arg(long, value_enum, default_value_t = ScheduleArg::RoundRobin)]
    pub schedule: ScheduleArg,
}

/// Writes records as JSON lines or CSV rows. CSV takes its header from the
/// first record.
pub struct Emitter {
    format: Format,
    json_out: Option<Box<dyn Write>>,
    csv_out: Option<csv::Writer<Box<dyn Write>>>,
    header_written: bool,
}

impl Emitter {
    pub fn new(format: Format, out: Box<dyn Write>) -> Self {
        match format {
            Format::JsonLines => Self {
                format,
                json_out: Some(out),
                csv_out: None,
                header_written: false,
            },
            Format::Csv => Self {
                format,
                json_out: None,
                csv_out: Some(csv::Writer::from_writer(out)),
                header_written: false,
            },
        }
    }

    pub fn emit(&mut self, record: &Value, columns: &[(&str, String)]) -> Result<(), CliError> {
        match self.format {
            Format::JsonLines => {
                let out = self.json_out.as_mut().expect("json writer");
                serde_json::to_writer(&mut *out, record).map_err(io::Error::other)?;
                out.write_all(b"\n")?;
            }
            Format::Csv => {
                let out = self.csv_out.as_mut().expect("csv writer");
                if !self.header_written {
                    out.write_record(columns.iter().map(|(k, _)| *k))?;
                    self.header_written = true;
                }
                out.write_record(columns.iter().map(|(_, v)| v.as_str()))?;
            }
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        if let Some(out) = self.json_out.as_mut() {
            out.flush()?;
        }
        if let Some(out) = self.csv_out.as_mut() {
            out.flush()?;
        }
        Ok(())
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn read_input(
    profile: &Option<PathBuf>,
    positions: &Option<String>,
    mode: Mode,
) -> Result<ParsedInput, CliError> {
    let doc = match (profile, positions) {
        (_, Some(list)) => ProfileDocument::from_list(list),
        (Some(path), None) => {
            let mut text = String::new();
            if path.as_os_str() == "-" {
                io::stdin().read_to_string(&mut text)?;
            } else {
                text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
            }
            ProfileDocument::from_json(&text)?
        }
        (None, None) => return Err(CliError::Usage("no profile given".into())),
    };
    let parsed = parse_document(&doc, mode)?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    Ok(parsed)
}

macro_rules! with_profile {
    ($parsed:expr, |$p:ident| $body:expr) => {
        match $parsed {
            ParsedProfile::Exact($p) => $body,
            ParsedProfile::Float($p) => $body,
        }
    };
}

pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let mut emitter = Emitter::new(cli.format, open_output(&cli.out)?);
    let code = match &cli.command {
        Command::Profit {
            input,
            oracle_resolution,
        } => {
            let parsed = read_input(&input.profile, &input.positions, cli.mode)?;
            let opts = ReportOptions {
                command: "profit",
                oracle_resolution: *oracle_resolution,
                vendor: None,
            };
            let agreement = with_profile!(&parsed.profile, |p| {
                profile_report(&mut emitter, &parsed, p, &opts)?
            })
            .agreement;
            if agreement {
                EXIT_OK
            } else {
                EXIT_DISAGREEMENT
            }
        }
        Command::Check { input } => {
            let parsed = read_input(&input.profile, &input.positions, cli.mode)?;
            let opts = ReportOptions {
                command: "check",
                oracle_resolution: None,
                vendor: None,
            };
            let v = with_profile!(&parsed.profile, |p| {
                profile_report(&mut emitter, &parsed, p, &opts)?
            });
            if !v.agreement {
                EXIT_DISAGREEMENT
            } else if v.oracle {
                EXIT_OK
            } else {
                EXIT_NOT_EQUILIBRIUM
            }
        }
        Command::BestResponse { input, vendor } => {
            let parsed = read_input(&input.profile, &input.positions, cli.mode)?;
            if *vendor == 0 || *vendor > parsed.profile.n() {
                return Err(CliError::Usage(format!(
                    "--vendor must be between 1 and {}",
                    parsed.profile.n()
                )));
            }
            let opts = ReportOptions {
                command: "best-response",
                oracle_resolution: None,
                vendor: Some(vendor - 1),
            };
            let v = with_profile!(&parsed.profile, |p| {
                profile_report(&mut emitter, &parsed, p, &opts)?
            });
            if v.agreement {
                EXIT_OK
            } else {
                EXIT_DISAGREEMENT
            }
        }
        Command::Sample(args) => cmd_sample(&mut emitter, args, cli.mode)?,
        Command::Enumerate(args) => cmd_enumerate(&mut emitter, args, cli.mode)?,
        Command::Dynamics(args) => cmd_dynamics(&mut emitter, args, cli.mode)?,
    };
    emitter.finish()?;
    Ok(code)
}

struct ReportOptions {
    command: &'static str,
    oracle_resolution: Option<u64>,
    vendor: Option<usize>,
}

pub struct Verdicts {
    pub condition: bool,
    pub oracle: bool,
    pub agreement: bool,
}

fn profile_report<S: Render>(
    emitter: &mut Emitter,
    input: &ParsedInput,
    p: &LocationProfile<S>,
    opts: &ReportOptions,
) -> Result<Verdicts, CliError> {
    let gaps = p.gaps();
    let profits = profit_closed_form(p);
    let condition = gap_condition(p);
    let oracle = is_equilibrium_oracle(p);
    let agreement = condition.holds == oracle.is_equilibrium;
    let canonical = canonicalize(p);
    let mode = input.profile.mode();

    let responses: Vec<_> = match opts.vendor {
        Some(k) => vec![best_response(p, k)?],
        None => oracle.responses.clone(),
    };

    let mut record = json!({
        "command": opts.command,
        "input": { "n": p.n(), "positions": input.raw, "mode": mode.as_str() },
        "profile": render::profile_document(p),
        "canonical": render::positions(canonical.profile().positions()),
        "gaps": render::values(gaps.as_slice()),
        "profits": render::values(profits.as_slice()),
        "condition": render::condition(&condition),
        "best_responses": responses.iter().map(render::best_response).collect::<Vec<_>>(),
        "verdicts": {
            "condition": condition.holds,
            "oracle": oracle.is_equilibrium,
            "agreement": agreement,
        },
        "metadata": {
            "seed": Value::Null,
            "mode": mode.as_str(),
            "version": env!("CARGO_PKG_VERSION"),
        },
    });

    let mut columns = vec![
        ("command", opts.command.to_string()),
        ("n", p.n().to_string()),
        ("mode", mode.to_string()),
        ("positions", render::joined_positions(p.positions())),
        (
            "canonical",
            render::joined_positions(canonical.profile().positions()),
        ),
        ("gaps", render::joined(gaps.as_slice())),
        ("profits", render::joined(profits.as_slice())),
        ("max_gap", condition.max_gap.text()),
        ("condition", condition.holds.to_string()),
        ("oracle", oracle.is_equilibrium.to_string()),
        ("agreement", agreement.to_string()),
    ];

    if let Some(m) = opts.oracle_resolution {
        let integral = profit_integral_oracle(p, m)?;
        let deviation = profits.max_abs_diff(&integral);
        record["oracle_profits"] = json!({
            "resolution": m,
            "profits": render::values(integral.as_slice()),
            "max_deviation": deviation,
            "bound": 2.0 * p.n() as f64 / m as f64,
        });
        columns.push(("oracle_resolution", m.to_string()));
        columns.push(("oracle_profits", render::joined(integral.as_slice())));
        columns.push(("oracle_max_deviation", deviation.to_string()));
    }
    if let Some(r) = opts.vendor.map(|_| &responses[0]) {
        columns.push(("vendor", (r.vendor + 1).to_string()));
        columns.push(("current_profit", r.current_profit.text()));
        columns.push(("best_value", r.best_value.text()));
        columns.push(("best_class", render::deviation_text(&r.best).to_string()));
        columns.push((
            "witness",
            r.witness().map(|w| w.value().text()).unwrap_or_default(),
        ));
        columns.push(("improving", r.improving.to_string()));
    }

    emitter.emit(&record, &columns)?;
    if !agreement {
        eprintln!("error: gap condition and best-response oracle disagree");
    }
    Ok(Verdicts {
        condition: condition.holds,
        oracle: oracle.is_equilibrium,
        agreement,
    })
}

fn sample_record<S: Render>(
    kind: &str,
    index: u64,
    seed: u64,
    p: &LocationProfile<S>,
    tries: Option<u64>,
) -> (Value, Vec<(&'static str, String)>) {
    let mut record = render::profile_document(p);
    record["kind"] = json!(kind);
    record["index"] = json!(index);
    record["seed"] = json!(seed);
    if let Some(t) = tries {
        record["tries"] = json!(t);
        record["acceptance_rate"] = json!(1.0 / t as f64);
    }
    let columns = vec![
        ("kind", kind.to_string()),
        ("index", index.to_string()),
        ("seed", seed.to_string()),
        ("n", p.n().to_string()),
        ("mode", if S::EXACT { "exact" } else { "float" }.to_string()),
        ("positions", render::joined_positions(p.positions())),
        ("tries", tries.map(|t| t.to_string()).unwrap_or_default()),
    ];
    (record, columns)
}

fn sampling_grid(grid: Option<u64>, mode: Mode) -> Result<u64, CliError> {
    match (grid, mode) {
        (Some(_), Mode::Float) => Err(CliError::Usage("--grid needs exact mode".into())),
        (Some(m), Mode::Exact) if m < 1 => Err(CliError::Usage("--grid must be positive".into())),
        (g, _) => Ok(g.unwrap_or(DEFAULT_GRID)),
    }
}

#[derive(Default)]
struct SampleTally {
    accepted: u64,
    draws: u64,
}

fn emit_sampled<S: Render>(
    emitter: &mut Emitter,
    tally: &mut SampleTally,
    index: u64,
    seed: u64,
    n: usize,
    sampled: Sampled<S>,
) -> Result<(), CliError> {
    tally.draws += sampled.tries();
    let (record, columns) = match sampled {
        Sampled::Found { profile, tries } => {
            tally.accepted += 1;
            sample_record("sample", index, seed, &profile, Some(tries))
        }
        Sampled::Exhausted { tries } => (
            json!({ "kind": "exhausted", "index": index, "seed": seed, "tries": tries }),
            vec![
                ("kind", "exhausted".to_string()),
                ("index", index.to_string()),
                ("seed", seed.to_string()),
                ("n", n.to_string()),
                ("mode", if S::EXACT { "exact" } else { "float" }.to_string()),
                ("positions", String::new()),
                ("tries", tries.to_string()),
            ],
        ),
    };
    emitter.emit(&record, &columns)
}

fn cmd_sample(emitter: &mut Emitter, args: &SampleArgs, mode: Mode) -> Result<i32, CliError> {
    let grid = sampling_grid(args.grid, mode)?;
    let mut tally = SampleTally::default();
    for i in 0..args.count {
        let seed = args.seed.wrapping_add(i);
        match (args.any, mode) {
            (true, Mode::Exact) => {
                let p = sample_random_grid(args.n, grid, seed)?;
                let (record, columns) = sample_record("random", i, seed, &p, None);
                emitter.emit(&record, &columns)?;
            }
            (true, Mode::Float) => {
                let p = sample_random(args.n, seed)?;
                let (record, columns) = sample_record("random", i, seed, &p, None);
                emitter.emit(&record, &columns)?;
            }
            (false, Mode::Exact) => {
                let s = sample_equilibrium_grid(args.n, grid, seed, args.max_tries)?;
                emit_sampled(emitter, &mut tally, i, seed, args.n, s)?;
            }
            (false, Mode::Float) => {
                let s = sample_equilibrium(args.n, seed, args.max_tries)?;
                emit_sampled(emitter, &mut tally, i, seed, args.n, s)?;
            }
        }
    }
    if !args.any {
        let rate = if tally.draws == 0 {
            0.0
        } else {
            tally.accepted as f64 / tally.draws as f64
        };
        emitter.emit(
            &json!({
                "kind": "summary",
                "samples": args.count,
                "accepted": tally.accepted,
                "draws": tally.draws,
                "acceptance_rate": rate,
                "mode": mode.as_str(),
                "seed": args.seed,
            }),
            &[
                ("kind", "summary".to_string()),
                ("index", String::new()),
                ("seed", args.seed.to_string()),
                ("n", args.n.to_string()),
                ("mode", mode.to_string()),
                ("positions", String::new()),
                ("tries", tally.draws.to_string()),
            ],
        )?;
    }
    Ok(EXIT_OK)
}

fn cmd_enumerate(emitter: &mut Emitter, args: &EnumerateArgs, mode: Mode) -> Result<i32, CliError> {
    if mode == Mode::Float {
        return Err(CliError::Usage(
            "enumeration runs in exact mode only".into(),
        ));
    }
    let found = match grid_enumerate_equilibria(args.n, args.grid, args.budget) {
        Err(hotelling::Error::BudgetExceeded { candidates, budget }) => {
            emitter.emit(
                &json!({ "kind": "refused", "candidates": candidates.to_string(), "budget": budget.to_string() }),
                &[
                    ("kind", "refused".to_string()),
                    ("index", String::new()),
                    ("n", args.n.to_string()),
                    ("positions", String::new()),
                    ("count", candidates.to_string()),
                ],
            )?;
            return Err(CliError::Budget { candidates, budget });
        }
        other => other?,
    };
    for (i, c) in found.iter().enumerate() {
        let p = c.profile();
        let mut record = render::profile_document(p);
        record["kind"] = json!("equilibrium");
        record["index"] = json!(i);
        emitter.emit(
            &record,
            &[
                ("kind", "equilibrium".to_string()),
                ("index", i.to_string()),
                ("n", p.n().to_string()),
                ("positions", render::joined_positions(p.positions())),
                ("count", String::new()),
            ],
        )?;
    }
    emitter.emit(
        &json!({
            "kind": "summary",
            "n": args.n,
            "grid": args.grid,
            "candidates": hotelling::enumeration_size(args.n, args.grid).to_string(),
            "count": found.len(),
        }),
        &[
            ("kind", "summary".to_string()),
            ("index", String::new()),
            ("n", args.n.to_string()),
            ("positions", String::new()),
            ("count", found.len().to_string()),
        ],
    )?;
    Ok(EXIT_OK)
}

fn cmd_dynamics(emitter: &mut Emitter, args: &DynamicsArgs, mode: Mode) -> Result<i32, CliError> {
    if args.max_steps == 0 {
        return Err(CliError::Usage("--max-steps must be at least 1".into()));
    }
    let schedule = match args.schedule {
        ScheduleArg::RoundRobin => Schedule::RoundRobin,
        ScheduleArg::Random => Schedule::Random { seed: args.seed },
    };
    let start = match args.n {
        Some(n) => {
            let grid = sampling_grid(args.grid, mode)?;
            match mode {
                Mode::Exact => ParsedProfile::Exact(sample_random_grid(n, grid, args.seed)?),
                Mode::Float => ParsedProfile::Float(sample_random(n, args.seed)?),
            }
        }
        None => {
            if args.grid.is_some() {
                return Err(CliError::Usage(
                    "--grid only applies to random starts".into(),
                ));
            }
            read_input(&args.profile, &args.positions, mode)?.profile
        }
    };
    with_profile!(&start, |p| emit_trace(emitter, p, schedule, args))
}

fn emit_trace<S: Render>(
    emitter: &mut Emitter,
    start: &LocationProfile<S>,
    schedule: Schedule,
    args: &DynamicsArgs,
) -> Result<i32, CliError> {
    let trace = run_dynamics(start, schedule, args.max_steps);
    let schedule_name = match schedule {
        Schedule::RoundRobin => "round-robin",
        Schedule::Random { .. } => "random",
    };
    let row = |kind: &str, cells: [String; 8]| -> Vec<(&'static str, String)> {
        let names = [
            "turn",
            "vendor",
            "from",
            "to",
            "profit_before",
            "profit_after",
            "outcome",
            "positions",
        ];
        std::iter::once(("kind", kind.to_string()))
            .chain(names.into_iter().zip(cells))
            .collect()
    };
    let blank = String::new;

    let mut record = render::profile_document(start);
    record["kind"] = json!("start");
    record["schedule"] = json!(schedule_name);
    record["seed"] = json!(args.seed);
    record["max_steps"] = json!(args.max_steps);
    emitter.emit(
        &record,
        &row(
            "start",
            [
                blank(),
                blank(),
                blank(),
                blank(),
                blank(),
                blank(),
                blank(),
                render::joined_positions(start.positions()),
            ],
        ),
    )?;

    for mv in &trace.steps {
        emitter.emit(
            &json!({
                "kind": "move",
                "turn": mv.turn,
                "vendor": mv.vendor + 1,
                "from": mv.from.value().render(),
                "to": mv.to.value().render(),
                "profit_before": mv.profit_before.render(),
                "profit_after": mv.profit_after.render(),
            }),
            &row(
                "move",
                [
                    mv.turn.to_string(),
                    (mv.vendor + 1).to_string(),
                    mv.from.value().text(),
                    mv.to.value().text(),
                    mv.profit_before.text(),
                    mv.profit_after.text(),
                    blank(),
                    blank(),
                ],
            ),
        )?;
    }

    let (outcome, extra) = match &trace.outcome {
        Outcome::Converged { moves, .. } => ("converged", json!({ "moves": moves })),
        Outcome::Cycle {
            period,
            first_visit,
        } => (
            "cycle",
            json!({ "period": period, "first_visit": first_visit }),
        ),
        Outcome::BudgetExhausted => ("budget-exhausted", json!({})),
    };
    let mut record = render::profile_document(&trace.end);
    record["kind"] = json!("outcome");
    record["outcome"] = json!(outcome);
    record["turns"] = json!(trace.turns);
    record["moves"] = json!(trace.steps.len());
    record["detail"] = extra;
    record["condition"] = json!(gap_condition(&trace.end).holds);
    record["oracle"] = json!(is_equilibrium_oracle(&trace.end).is_equilibrium);
    emitter.emit(
        &record,
        &row(
            "outcome",
            [
                trace.turns.to_string(),
                blank(),
                blank(),
                blank(),
                blank(),
                blank(),
                outcome.to_string(),
                render::joined_positions(trace.end.positions()),
            ],
        ),
    )?;
    Ok(EXIT_OK)
}
