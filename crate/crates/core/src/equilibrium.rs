//! Two independent equilibrium tests.
//!
//! [`gap_condition`] checks that every pair of consecutive gaps together is
//! at least as long as the largest gap. [`is_equilibrium_oracle`] instead
//! asks every vendor for its best unilateral relocation. Once vendor `k` is
//! removed, the remaining vendors form stacks separated by free arcs, and
//! every relocation falls into one of finitely many payoff-equivalent
//! classes:
//!
//! * strictly inside a free arc of length `g`: worth `g / 2` anywhere in it;
//! * on top of a stack of size `i` with free arcs `L`, `R`: worth
//!   `(L + R) / (2(i + 1))`;
//! * staying put: worth the current profit.
//!
//! Enumerating these classes decides the best response exactly.

use crate::error::Result;
use crate::geometry::{Position, Scalar};
use crate::market::{cluster_decompose, profit_closed_form, ClusterDecomposition, LocationProfile};

/// Outcome of the consecutive-gap test for one index `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapCheck<S> {
    pub k: usize,
    pub gap: S,
    pub next_gap: S,
    pub sum: S,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport<S> {
    pub max_gap: S,
    pub per_k: Vec<GapCheck<S>>,
    pub holds: bool,
}

impl<S: Scalar> ConditionReport<S> {
    pub fn violations(&self) -> impl Iterator<Item = &GapCheck<S>> {
        self.per_k.iter().filter(|c| !c.satisfied)
    }
}

/// Checks `gap_k + gap_{k+1} >= max gap` for every `k`, cyclically.
pub fn gap_condition<S: Scalar>(profile: &LocationProfile<S>) -> ConditionReport<S> {
    let gaps = profile.gaps();
    let max_gap = gaps.max();
    let mode = profile.mode();
    let per_k: Vec<GapCheck<S>> = (0..gaps.len())
        .map(|k| {
            let gap = gaps.get(k).clone();
            let next_gap = gaps.get(k + 1).clone();
            let sum = gap.clone() + next_gap.clone();
            let satisfied = mode.value_ge(&sum, &max_gap);
            GapCheck {
                k,
                gap,
                next_gap,
                sum,
                satisfied,
            }
        })
        .collect();
    let holds = per_k.iter().all(|c| c.satisfied);
    ConditionReport {
        max_gap,
        per_k,
        holds,
    }
}

pub fn condition_holds<S: Scalar>(profile: &LocationProfile<S>) -> bool {
    gap_condition(profile).holds
}

/// A class of relocations with a common payoff.
///
/// Arc and cluster indices refer to the decomposition of the other vendors.
#[derive(Debug, Clone, PartialEq)]
pub enum Deviation<S> {
    Stay,
    /// Strictly inside the free arc `arc`, represented by its midpoint.
    ArcInterior {
        arc: usize,
        length: S,
        witness: Position<S>,
    },
    /// On top of the stack `cluster` of the other vendors.
    JoinCluster {
        cluster: usize,
        size: usize,
        position: Position<S>,
    },
}

impl<S: Scalar> Deviation<S> {
    pub fn target(&self) -> Option<&Position<S>> {
        match self {
            Deviation::Stay => None,
            Deviation::ArcInterior { witness, .. } => Some(witness),
            Deviation::JoinCluster { position, .. } => Some(position),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestResponse<S> {
    pub vendor: usize,
    pub current_profit: S,
    pub best_value: S,
    pub best: Deviation<S>,
    pub improving: bool,
}

impl<S: Scalar> BestResponse<S> {
    /// Where to move for a strict gain, if anywhere.
    pub fn witness(&self) -> Option<&Position<S>> {
        if self.improving {
            self.best.target()
        } else {
            None
        }
    }
}

/// Every relocation class for vendor `k` other than staying, with its value.
/// Arcs come first in order, then clusters.
pub fn deviation_classes<S: Scalar>(
    profile: &LocationProfile<S>,
    k: usize,
) -> Result<Vec<(Deviation<S>, S)>> {
    let others = profile.others(k)?;
    let dec = ClusterDecomposition::of(&others, &profile.mode());
    let mut out = Vec::with_capacity(2 * dec.len());
    for (j, length) in dec.arcs.iter().enumerate() {
        let witness = dec.clusters[j].position.advance(length.half());
        out.push((
            Deviation::ArcInterior {
                arc: j,
                length: length.clone(),
                witness,
            },
            length.half(),
        ));
    }
    for (j, cluster) in dec.clusters.iter().enumerate() {
        let (left, right) = dec.neighbour_arcs(j);
        let value = (left + right) / S::from_usize(2 * (cluster.size() + 1));
        out.push((
            Deviation::JoinCluster {
                cluster: j,
                size: cluster.size(),
                position: cluster.position.clone(),
            },
            value,
        ));
    }
    Ok(out)
}

/// Best unilateral relocation for vendor `k`. Ties prefer staying, then the
/// lowest arc, then the lowest cluster.
pub fn best_response<S: Scalar>(profile: &LocationProfile<S>, k: usize) -> Result<BestResponse<S>> {
    let classes = deviation_classes(profile, k)?;
    let current = profit_closed_form(profile).get(k).clone();
    Ok(pick_best(profile, k, current, classes))
}

fn pick_best<S: Scalar>(
    profile: &LocationProfile<S>,
    k: usize,
    current: S,
    classes: Vec<(Deviation<S>, S)>,
) -> BestResponse<S> {
    let mode = profile.mode();
    let mut best = Deviation::Stay;
    let mut best_value = current.clone();
    for (class, value) in classes {
        if mode.value_gt(&value, &best_value) {
            best = class;
            best_value = value;
        }
    }
    let improving = best != Deviation::Stay;
    BestResponse {
        vendor: k,
        current_profit: current,
        best_value,
        best,
        improving,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleVerdict<S> {
    pub is_equilibrium: bool,
    pub responses: Vec<BestResponse<S>>,
}

impl<S: Scalar> OracleVerdict<S> {
    pub fn improving(&self) -> impl Iterator<Item = &BestResponse<S>> {
        self.responses.iter().filter(|r| r.improving)
    }
}

/// Equilibrium by definition: no vendor has a strictly improving relocation.
pub fn is_equilibrium_oracle<S: Scalar>(profile: &LocationProfile<S>) -> OracleVerdict<S> {
    let profits = profit_closed_form(profile);
    let responses: Vec<_> = (0..profile.n())
        .map(|k| {
            let classes = deviation_classes(profile, k).expect("index in range");
            pick_best(profile, k, profits.get(k).clone(), classes)
        })
        .collect();
    OracleVerdict {
        is_equilibrium: responses.iter().all(|r| !r.improving),
        responses,
    }
}

pub fn max_stack_size<S: Scalar>(profile: &LocationProfile<S>) -> usize {
    cluster_decompose(profile).max_size()
}

/// Best profit vendor `k` reaches over the grid `{i / steps}` plus every
/// occupied point, each evaluated through a full profit recomputation.
///
/// This brute-force scan never exceeds the class enumeration and matches it
/// whenever every free arc contains a grid point.
pub fn scan_best_value<S: Scalar>(profile: &LocationProfile<S>, k: usize, steps: u64) -> Result<S> {
    let others = profile.others(k)?;
    let grid = (0..steps).map(|i| Position::new(S::from_ratio(i as i64, steps as i64)));
    let mut best = profit_closed_form(profile).get(k).clone();
    for target in grid.collect::<Result<Vec<_>>>()?.into_iter().chain(others) {
        let moved = profile.moved(k, target.clone())?;
        let idx = moved
            .positions()
            .iter()
            .position(|p| *p == target)
            .expect("moved vendor present");
        best = best.max_of(profit_closed_form(&moved).get(idx).clone());
    }
    Ok(best)
}
