//! Vendors competing for consumers spread uniformly on a circular city of
//! circumference one.
//!
//! The crate computes each vendor's captured consumer mass (its profit) in
//! closed form and by numerical integration of the split density, decides
//! whether a location profile is an equilibrium both through the gap
//! condition on consecutive arcs and through an exact best-response
//! enumeration, and provides profile generators and best-response dynamics.
//!
//! All computations are generic over [`Scalar`]: [`Rational`] gives exact
//! arithmetic with exact tie detection, `f64` gives floating arithmetic with
//! the tolerances carried by [`NumericMode`].
//!
//! Vendor indices are zero-based throughout the library and refer to the
//! ascending order of positions.

pub mod dynamics;
pub mod equilibrium;
mod error;
pub mod generators;
pub mod geometry;
pub mod market;

pub use dynamics::{best_response_step, run_dynamics, DynamicsTrace, Move, Outcome, Schedule};
pub use equilibrium::{
    best_response, condition_holds, gap_condition, is_equilibrium_oracle, max_stack_size,
    scan_best_value, BestResponse, ConditionReport, Deviation, GapCheck, OracleVerdict,
};
pub use error::{Error, Result};
pub use generators::{
    canonicalize, enumeration_size, equal_spacing, grid_enumerate_equilibria, grid_profiles,
    paired_configuration, sample_equilibrium, sample_equilibrium_grid, sample_random,
    sample_random_grid, CanonicalProfile, Sampled, DEFAULT_ENUMERATION_BUDGET,
};
pub use geometry::{
    circ_distance, gap_vector, normalize, GapVector, ModeKind, NumericMode, Position, Rational,
    Scalar,
};
pub use market::{
    cluster_decompose, consumer_set, density, profit_closed_form, profit_integral_oracle, Cluster,
    ClusterDecomposition, LocationProfile, ProfitVector,
};
