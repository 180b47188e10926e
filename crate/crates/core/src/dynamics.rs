//! Sequential best-response dynamics.
//!
//! One vendor is offered a move per turn. A vendor moves only when its best
//! response strictly improves its profit, and then always to the
//! deterministic witness of [`best_response`]. Nothing guarantees
//! convergence, so cycles and budget exhaustion are ordinary outcomes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equilibrium::{best_response, is_equilibrium_oracle};
use crate::error::Result;
use crate::generators::canonicalize;
use crate::geometry::{Position, Scalar};
use crate::market::{profit_closed_form, LocationProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// Vendors `0, 1, ..., n-1, 0, ...` in sorted order.
    RoundRobin,
    /// A uniformly random vendor each turn.
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Move<S> {
    pub turn: usize,
    pub vendor: usize,
    pub from: Position<S>,
    pub to: Position<S>,
    pub profit_before: S,
    pub profit_after: S,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome<S> {
    Converged {
        profile: LocationProfile<S>,
        moves: usize,
    },
    /// The state after move `first_visit + period` repeats, up to rotation
    /// and reflection, the state after move `first_visit` (0 is the start).
    Cycle {
        period: usize,
        first_visit: usize,
    },
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsTrace<S> {
    pub schedule: Schedule,
    pub start: LocationProfile<S>,
    pub steps: Vec<Move<S>>,
    pub outcome: Outcome<S>,
    /// State after the last move.
    pub end: LocationProfile<S>,
    /// Turns consumed, moves or not.
    pub turns: usize,
}

/// Vendor `k` relocates to its improving witness, if it has one.
pub fn best_response_step<S: Scalar>(
    profile: &LocationProfile<S>,
    k: usize,
) -> Result<LocationProfile<S>> {
    Ok(step(profile, k)?.map_or_else(|| profile.clone(), |(next, _)| next))
}

fn step<S: Scalar>(
    profile: &LocationProfile<S>,
    k: usize,
) -> Result<Option<(LocationProfile<S>, Move<S>)>> {
    let response = best_response(profile, k)?;
    let Some(to) = response.witness().cloned() else {
        return Ok(None);
    };
    let next = profile.moved(k, to.clone())?;
    let idx = next
        .positions()
        .iter()
        .position(|p| *p == to)
        .expect("moved vendor present");
    let profit_after = profit_closed_form(&next).get(idx).clone();
    let mv = Move {
        turn: 0,
        vendor: k,
        from: profile.positions()[k].clone(),
        to,
        profit_before: response.current_profit,
        profit_after,
    };
    Ok(Some((next, mv)))
}

/// Runs at most `max_steps` turns from `start`.
pub fn run_dynamics<S: Scalar>(
    start: &LocationProfile<S>,
    schedule: Schedule,
    max_steps: usize,
) -> DynamicsTrace<S> {
    let n = start.n();
    let mut rng = match schedule {
        Schedule::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        Schedule::RoundRobin => None,
    };
    let mut profile = start.clone();
    let mut seen = vec![canonicalize(&profile).into_profile()];
    let mut steps = Vec::new();
    let mut idle = 0usize;

    for turn in 0..max_steps {
        let k = match rng.as_mut() {
            Some(r) => r.random_range(0..n),
            None => turn % n,
        };
        match step(&profile, k).expect("vendor index in range") {
            Some((next, mut mv)) => {
                mv.turn = turn;
                steps.push(mv);
                profile = next;
                idle = 0;
                let canon = canonicalize(&profile).into_profile();
                if let Some(first_visit) = seen.iter().position(|s| *s == canon) {
                    return DynamicsTrace {
                        schedule,
                        start: start.clone(),
                        end: profile,
                        outcome: Outcome::Cycle {
                            period: steps.len() - first_visit,
                            first_visit,
                        },
                        steps,
                        turns: turn + 1,
                    };
                }
                seen.push(canon);
            }
            None => {
                idle += 1;
                let settled = match schedule {
                    Schedule::RoundRobin => idle >= n,
                    Schedule::Random { .. } => is_equilibrium_oracle(&profile).is_equilibrium,
                };
                if settled {
                    return DynamicsTrace {
                        schedule,
                        start: start.clone(),
                        end: profile.clone(),
                        outcome: Outcome::Converged {
                            profile,
                            moves: steps.len(),
                        },
                        steps,
                        turns: turn + 1,
                    };
                }
            }
        }
    }
    DynamicsTrace {
        schedule,
        start: start.clone(),
        end: profile,
        steps,
        outcome: Outcome::BudgetExhausted,
        turns: max_steps,
    }
}
