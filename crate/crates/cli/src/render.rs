//! JSON and text rendering of scalars and library results.

use hotelling::{
    BestResponse, ConditionReport, Deviation, LocationProfile, Position, Rational, Scalar,
};
use serde_json::{json, Value};

/// Exact values render as `"p/q"` strings, floats as JSON numbers.
pub trait Render: Scalar {
    fn render(&self) -> Value;

    fn text(&self) -> String {
        self.to_string()
    }
}

impl Render for Rational {
    fn render(&self) -> Value {
        Value::String(self.to_string())
    }
}

impl Render for f64 {
    fn render(&self) -> Value {
        json!(self)
    }
}

pub fn values<S: Render>(xs: &[S]) -> Value {
    Value::Array(xs.iter().map(Render::render).collect())
}

pub fn positions<S: Render>(ps: &[Position<S>]) -> Value {
    Value::Array(ps.iter().map(|p| p.value().render()).collect())
}

pub fn joined<S: Render>(xs: &[S]) -> String {
    xs.iter().map(Render::text).collect::<Vec<_>>().join(" ")
}

pub fn joined_positions<S: Render>(ps: &[Position<S>]) -> String {
    ps.iter()
        .map(|p| p.value().text())
        .collect::<Vec<_>>()
        .join(" ")
}

/// A profile in re-parseable document form.
pub fn profile_document<S: Render>(p: &LocationProfile<S>) -> Value {
    json!({
        "n": p.n(),
        "positions": positions(p.positions()),
        "mode": if S::EXACT { "exact" } else { "float" },
    })
}

pub fn condition<S: Render>(r: &ConditionReport<S>) -> Value {
    json!({
        "max_gap": r.max_gap.render(),
        "per_k": r.per_k.iter().map(|c| json!({
            "k": c.k + 1,
            "gap": c.gap.render(),
            "next_gap": c.next_gap.render(),
            "sum": c.sum.render(),
            "satisfied": c.satisfied,
        })).collect::<Vec<_>>(),
        "holds": r.holds,
    })
}

pub fn deviation<S: Render>(d: &Deviation<S>) -> Value {
    match d {
        Deviation::Stay => json!({ "kind": "stay" }),
        Deviation::ArcInterior {
            arc,
            length,
            witness,
        } => json!({
            "kind": "arc-interior",
            "arc": arc + 1,
            "length": length.render(),
            "witness": witness.value().render(),
        }),
        Deviation::JoinCluster {
            cluster,
            size,
            position,
        } => json!({
            "kind": "join-stack",
            "cluster": cluster + 1,
            "size": size,
            "witness": position.value().render(),
        }),
    }
}

pub fn deviation_text<S: Render>(d: &Deviation<S>) -> &'static str {
    match d {
        Deviation::Stay => "stay",
        Deviation::ArcInterior { .. } => "arc-interior",
        Deviation::JoinCluster { .. } => "join-stack",
    }
}

pub fn best_response<S: Render>(r: &BestResponse<S>) -> Value {
    json!({
        "vendor": r.vendor + 1,
        "current_profit": r.current_profit.render(),
        "best_value": r.best_value.render(),
        "best_class": deviation(&r.best),
        "improving": r.improving,
        "witness": r.witness().map(|w| w.value().render()),
    })
}
