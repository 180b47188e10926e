//! Profile families, random sampling, and exhaustive grid enumeration.

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::equilibrium::condition_holds;
use crate::error::{Error, Result};
use crate::geometry::{cmp_positions, NumericMode, Position, Rational, Scalar};
use crate::market::LocationProfile;

pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

/// `n` vendors at `k / n`.
pub fn equal_spacing<S: Scalar>(n: usize) -> Result<LocationProfile<S>> {
    if n < 2 {
        return Err(Error::TooFewVendors(n));
    }
    LocationProfile::new((0..n).map(|k| S::from_ratio(k as i64, n as i64)).collect())
}

/// Two vendors at each of `m` equally spaced points.
pub fn paired_configuration<S: Scalar>(m: usize) -> Result<LocationProfile<S>> {
    if m < 2 {
        return Err(Error::GridTooSmall {
            got: m as u64,
            min: 2,
        });
    }
    LocationProfile::new(
        (0..m)
            .flat_map(|k| [k, k])
            .map(|k| S::from_ratio(k as i64, m as i64))
            .collect(),
    )
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` independent uniform positions.
pub fn sample_random(n: usize, seed: u64) -> Result<LocationProfile<f64>> {
    let mut rng = rng(seed);
    LocationProfile::new((0..n).map(|_| rng.random::<f64>()).collect())
}

/// `n` independent positions drawn uniformly from `{0, 1/m, ..., (m-1)/m}`.
pub fn sample_random_grid(n: usize, m: u64, seed: u64) -> Result<LocationProfile<Rational>> {
    if m < 1 {
        return Err(Error::GridTooSmall { got: m, min: 1 });
    }
    let mut rng = rng(seed);
    LocationProfile::new(
        (0..n)
            .map(|_| Rational::from_ratio(rng.random_range(0..m) as i64, m as i64))
            .collect(),
    )
}

/// Result of rejection sampling.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampled<S> {
    Found {
        profile: LocationProfile<S>,
        tries: u64,
    },
    Exhausted {
        tries: u64,
    },
}

impl<S> Sampled<S> {
    pub fn tries(&self) -> u64 {
        match self {
            Sampled::Found { tries, .. } | Sampled::Exhausted { tries } => *tries,
        }
    }

    pub fn profile(&self) -> Option<&LocationProfile<S>> {
        match self {
            Sampled::Found { profile, .. } => Some(profile),
            Sampled::Exhausted { .. } => None,
        }
    }
}

fn profile_from_gaps<S: Scalar>(gaps: &[S], mode: NumericMode) -> Result<LocationProfile<S>> {
    let positions = std::iter::once(S::zero())
        .chain(gaps[..gaps.len() - 1].iter().scan(S::zero(), |acc, g| {
            *acc = acc.clone() + g.clone();
            Some(acc.clone())
        }))
        .collect();
    LocationProfile::with_mode(positions, mode)
}

fn rejection<S: Scalar>(
    n: usize,
    max_tries: u64,
    mut draw: impl FnMut() -> Vec<S>,
) -> Result<Sampled<S>> {
    if n < 2 {
        return Err(Error::TooFewVendors(n));
    }
    for tries in 1..=max_tries {
        let profile = profile_from_gaps(&draw(), NumericMode::default_for::<S>())?;
        if condition_holds(&profile) {
            return Ok(Sampled::Found { profile, tries });
        }
    }
    Ok(Sampled::Exhausted { tries: max_tries })
}

/// Rejection-samples gap vectors uniformly from the simplex until the gap
/// condition holds; the first vendor sits at 0.
pub fn sample_equilibrium(n: usize, seed: u64, max_tries: u64) -> Result<Sampled<f64>> {
    let mut rng = rng(seed);
    rejection(n, max_tries, || {
        let raw: Vec<f64> = (0..n).map(|_| rng.sample(Exp1)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|g| g / total).collect()
    })
}

/// Exact variant: gaps are a uniformly random weak composition of `m` into
/// `n` parts, scaled by `1/m`.
pub fn sample_equilibrium_grid(
    n: usize,
    m: u64,
    seed: u64,
    max_tries: u64,
) -> Result<Sampled<Rational>> {
    if m < 1 {
        return Err(Error::GridTooSmall { got: m, min: 1 });
    }
    let mut rng = rng(seed);
    let slots = m as usize + n - 1;
    rejection(n, max_tries, || {
        // stars and bars: n - 1 bars among m + n - 1 slots
        let mut bars = index::sample(&mut rng, slots, n - 1).into_vec();
        bars.sort_unstable();
        let mut prev = 0usize;
        let mut gaps = Vec::with_capacity(n);
        for (i, b) in bars.iter().enumerate() {
            gaps.push(Rational::from_ratio((b - i - prev) as i64, m as i64));
            prev = b - i;
        }
        gaps.push(Rational::from_ratio((m as usize - prev) as i64, m as i64));
        gaps
    })
}

/// Representative of a profile's class under rotation and reflection.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalProfile<S>(LocationProfile<S>);

impl<S: Scalar> CanonicalProfile<S> {
    pub fn profile(&self) -> &LocationProfile<S> {
        &self.0
    }

    pub fn into_profile(self) -> LocationProfile<S> {
        self.0
    }
}

/// Lexicographically smallest position list among all rotations putting a
/// vendor at 0, in both orientations. The first entry is always 0.
pub fn canonicalize<S: Scalar>(profile: &LocationProfile<S>) -> CanonicalProfile<S> {
    let mode = profile.mode();
    let mut best: Option<Vec<Position<S>>> = None;
    for oriented in [profile.clone(), profile.reflected()] {
        for anchor in oriented.positions() {
            let mut candidate: Vec<Position<S>> = oriented
                .positions()
                .iter()
                .map(|p| Position::new(anchor.arc_to(p)).expect("finite"))
                .collect();
            candidate.sort_by(cmp_positions);
            let smaller = match &best {
                None => true,
                Some(b) => candidate
                    .iter()
                    .zip(b)
                    .map(|(x, y)| cmp_positions(x, y))
                    .find(|o| o.is_ne())
                    .is_some_and(|o| o.is_lt()),
            };
            if smaller {
                best = Some(candidate);
            }
        }
    }
    CanonicalProfile(
        LocationProfile::from_positions(best.expect("non-empty profile"), mode)
            .expect("same size and mode"),
    )
}

/// Number of multisets of `n` points drawn from an `m`-point grid,
/// `C(n + m - 1, n)`.
pub fn enumeration_size(n: usize, m: u64) -> u128 {
    let (top, k) = (n as u128 + m as u128 - 1, n as u128);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(top - i) / (i + 1))
}

/// All profiles with `x_1 = 0` and the other vendors on the grid `{i/m}`.
pub fn grid_profiles(n: usize, m: u64) -> Result<impl Iterator<Item = LocationProfile<Rational>>> {
    if n < 2 {
        return Err(Error::TooFewVendors(n));
    }
    if m < 2 {
        return Err(Error::GridTooSmall { got: m, min: 2 });
    }
    Ok((0..m)
        .combinations_with_replacement(n - 1)
        .map(move |rest| {
            let xs = std::iter::once(0)
                .chain(rest)
                .map(|i| Rational::from_ratio(i as i64, m as i64))
                .collect();
            LocationProfile::new(xs).expect("valid grid profile")
        }))
}

/// Canonical forms of every grid profile satisfying the gap condition,
/// sorted and deduplicated.
pub fn grid_enumerate_equilibria(
    n: usize,
    m: u64,
    budget: u128,
) -> Result<Vec<CanonicalProfile<Rational>>> {
    let candidates = enumeration_size(n, m);
    if candidates > budget {
        return Err(Error::BudgetExceeded { candidates, budget });
    }
    let found: BTreeSet<Vec<Rational>> = grid_profiles(n, m)?
        .filter(condition_holds)
        .map(|p| canonicalize(&p).into_profile().values())
        .collect();
    Ok(found
        .into_iter()
        .map(|xs| CanonicalProfile(LocationProfile::new(xs).expect("canonical profile")))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{gap_condition, is_equilibrium_oracle};
    use crate::market::profit_closed_form;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn exact(xs: &[(i64, i64)]) -> LocationProfile<Rational> {
        LocationProfile::new(xs.iter().map(|(n, d)| q(*n, *d)).collect()).unwrap()
    }

    #[test]
    fn equal_spacing_examples() {
        assert_eq!(
            equal_spacing::<Rational>(2).unwrap().values(),
            vec![q(0, 1), q(1, 2)]
        );
        let p = equal_spacing::<Rational>(3).unwrap();
        assert_eq!(p.values(), vec![q(0, 1), q(1, 3), q(2, 3)]);
        assert!(condition_holds(&p));
        assert_eq!(
            profit_closed_form(&equal_spacing::<Rational>(5).unwrap()).0,
            vec![q(1, 5); 5]
        );
        assert_eq!(equal_spacing::<f64>(1), Err(Error::TooFewVendors(1)));
        for n in 2..40 {
            assert!(condition_holds(&equal_spacing::<Rational>(n).unwrap()));
        }
    }

    #[test]
    fn paired_examples() {
        let p = paired_configuration::<Rational>(2).unwrap();
        assert_eq!(p.values(), vec![q(0, 1), q(0, 1), q(1, 2), q(1, 2)]);
        assert!(condition_holds(&p));
        assert!(is_equilibrium_oracle(&p).is_equilibrium);
        let p = paired_configuration::<Rational>(3).unwrap();
        assert!(is_equilibrium_oracle(&p).is_equilibrium);
        for m in 2..12 {
            let r = gap_condition(&paired_configuration::<Rational>(m).unwrap());
            assert!(r.holds);
            // every constraint binds
            assert!(r.per_k.iter().all(|c| c.sum == r.max_gap));
        }
        assert!(paired_configuration::<f64>(1).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(sample_random(4, 7).unwrap(), sample_random(4, 7).unwrap());
        assert_ne!(sample_random(4, 7).unwrap(), sample_random(4, 8).unwrap());
        let p = sample_random_grid(6, 360, 3).unwrap();
        assert!(p
            .values()
            .iter()
            .all(|x| (*x * q(360, 1)).is_integer() && *x < q(1, 1)));
        assert_eq!(p, sample_random_grid(6, 360, 3).unwrap());
    }

    #[test]
    fn two_vendor_sampling_accepts_first_draw() {
        for seed in 0..20 {
            assert_eq!(sample_equilibrium(2, seed, 1).unwrap().tries(), 1);
            assert_eq!(sample_equilibrium_grid(2, 360, seed, 1).unwrap().tries(), 1);
        }
    }

    #[test]
    fn sampled_equilibria_pass_oracle() {
        for seed in 0..50 {
            for n in 3..7 {
                let s = sample_equilibrium_grid(n, 360, seed, 100_000).unwrap();
                let p = s.profile().expect("found");
                assert!(is_equilibrium_oracle(p).is_equilibrium);
                assert_eq!(p.n(), n);
                assert_eq!(p.positions()[0].value(), &q(0, 1));
                let s = sample_equilibrium(n, seed, 100_000).unwrap();
                assert!(is_equilibrium_oracle(s.profile().unwrap()).is_equilibrium);
            }
        }
    }

    #[test]
    fn exhaustion_is_reported() {
        // n = 12 equilibria are rare enough that two tries essentially never hit
        let s = sample_equilibrium(12, 5, 2).unwrap();
        assert!(matches!(s, Sampled::Exhausted { tries: 2 }) || s.profile().is_some());
        assert_eq!(sample_equilibrium(1, 0, 5), Err(Error::TooFewVendors(1)));
    }

    #[test]
    fn canonicalize_examples() {
        let c = canonicalize(&LocationProfile::new(vec![0.25, 0.75]).unwrap());
        assert_eq!(c.profile().values(), vec![0.0, 0.5]);
        let c = canonicalize(&exact(&[(0, 1), (1, 10), (1, 5)]));
        assert_eq!(c.profile().values(), vec![q(0, 1), q(1, 10), q(1, 5)]);
        let c = canonicalize(&exact(&[(0, 1), (4, 5), (9, 10)]));
        assert_eq!(c.profile().values(), vec![q(0, 1), q(1, 10), q(1, 5)]);
    }

    #[test]
    fn enumeration_size_matches_binomial() {
        assert_eq!(enumeration_size(3, 2), 4);
        assert_eq!(enumeration_size(5, 12), 4368);
        assert_eq!(enumeration_size(2, 4), 10);
    }

    #[test]
    fn enumerate_small_grids() {
        let found = grid_enumerate_equilibria(3, 2, DEFAULT_ENUMERATION_BUDGET).unwrap();
        let lists: Vec<_> = found.iter().map(|c| c.profile().values()).collect();
        assert!(lists.contains(&vec![q(0, 1), q(0, 1), q(1, 2)]));
        // (0, 1/2, 1/2) canonicalizes to the same class as (0, 0, 1/2)
        assert!(lists.contains(
            &canonicalize(&exact(&[(0, 1), (1, 2), (1, 2)]))
                .profile()
                .values()
        ));

        let all: BTreeSet<_> = grid_profiles(2, 4)
            .unwrap()
            .map(|p| canonicalize(&p).into_profile().values())
            .collect();
        let found: BTreeSet<_> = grid_enumerate_equilibria(2, 4, DEFAULT_ENUMERATION_BUDGET)
            .unwrap()
            .into_iter()
            .map(|c| c.into_profile().values())
            .collect();
        assert_eq!(all, found);

        let found = grid_enumerate_equilibria(3, 6, DEFAULT_ENUMERATION_BUDGET).unwrap();
        let listed: BTreeSet<_> = found.iter().map(|c| c.profile().values()).collect();
        for p in grid_profiles(3, 6).unwrap() {
            let canon = canonicalize(&p).into_profile().values();
            assert_eq!(
                listed.contains(&canon),
                is_equilibrium_oracle(&p).is_equilibrium
            );
        }
        assert!(found
            .iter()
            .all(|c| is_equilibrium_oracle(c.profile()).is_equilibrium));
    }

    #[test]
    fn enumeration_refuses_over_budget() {
        assert_eq!(
            grid_enumerate_equilibria(5, 12, 100).unwrap_err(),
            Error::BudgetExceeded {
                candidates: 4368,
                budget: 100
            }
        );
        assert!(grid_profiles(1, 4).is_err());
        assert!(grid_profiles(3, 1).is_err());
    }

    fn grid_profile() -> impl Strategy<Value = LocationProfile<Rational>> {
        prop::collection::vec(0i64..360, 2..9).prop_map(|ks| {
            LocationProfile::new(ks.into_iter().map(|k| q(k, 360)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn canonicalize_is_idempotent(p in grid_profile()) {
            let once = canonicalize(&p);
            prop_assert_eq!(&canonicalize(once.profile()), &once);
            prop_assert_eq!(once.profile().positions()[0].value(), &q(0, 1));
        }

        #[test]
        fn canonicalize_is_a_class_invariant(p in grid_profile(), t in 0i64..360) {
            let c = canonicalize(&p);
            prop_assert_eq!(&canonicalize(&p.rotated(q(t, 360))), &c);
            prop_assert_eq!(&canonicalize(&p.reflected()), &c);
        }

        #[test]
        fn canonicalize_keeps_gaps_and_verdicts(p in grid_profile()) {
            let c = canonicalize(&p).into_profile();
            let sorted = |mut v: Vec<Rational>| { v.sort(); v };
            prop_assert_eq!(sorted(c.gaps().0), sorted(p.gaps().0));
            prop_assert_eq!(condition_holds(&c), condition_holds(&p));
            prop_assert_eq!(is_equilibrium_oracle(&c).is_equilibrium, is_equilibrium_oracle(&p).is_equilibrium);
        }

        #[test]
        fn float_canonical_form_starts_at_zero(xs in prop::collection::vec(0.0f64..1.0, 2..8)) {
            let c = canonicalize(&LocationProfile::new(xs).unwrap());
            prop_assert_eq!(*c.profile().positions()[0].value(), 0.0);
        }
    }
}
