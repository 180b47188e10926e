//! Vendor profiles, stacks of coincident vendors, and the profit each vendor
//! earns from the consumers nearest to it.

use crate::error::{Error, Result};
use crate::geometry::{
    circ_distance, cmp_positions, lcm_i128, normalize, GapVector, NumericMode, Position, Scalar,
};

/// Sorted positions of `n >= 2` vendors together with the comparison mode.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationProfile<S> {
    positions: Vec<Position<S>>,
    mode: NumericMode,
}

impl<S: Scalar> LocationProfile<S> {
    /// Normalizes and sorts `xs` under the scalar's default mode.
    pub fn new(xs: Vec<S>) -> Result<Self> {
        Self::with_mode(xs, NumericMode::default_for::<S>())
    }

    pub fn with_mode(xs: Vec<S>, mode: NumericMode) -> Result<Self> {
        let positions = xs.into_iter().map(normalize).collect::<Result<Vec<_>>>()?;
        Self::from_positions(positions, mode)
    }

    pub fn from_positions(mut positions: Vec<Position<S>>, mode: NumericMode) -> Result<Self> {
        mode.check::<S>()?;
        if positions.len() < 2 {
            return Err(Error::TooFewVendors(positions.len()));
        }
        positions.sort_by(cmp_positions);
        Ok(Self { positions, mode })
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Position<S>] {
        &self.positions
    }

    pub fn position(&self, k: usize) -> Result<&Position<S>> {
        self.check_index(k)?;
        Ok(&self.positions[k])
    }

    pub fn values(&self) -> Vec<S> {
        self.positions.iter().map(|p| p.value().clone()).collect()
    }

    pub fn mode(&self) -> NumericMode {
        self.mode
    }

    pub fn gaps(&self) -> GapVector<S> {
        GapVector::from_positions(&self.positions).expect("at least two vendors")
    }

    pub(crate) fn check_index(&self, k: usize) -> Result<()> {
        if k < self.n() {
            Ok(())
        } else {
            Err(Error::VendorIndex {
                index: k,
                n: self.n(),
            })
        }
    }

    /// Positions of every vendor except `k`, still sorted.
    pub fn others(&self, k: usize) -> Result<Vec<Position<S>>> {
        self.check_index(k)?;
        let mut rest = self.positions.clone();
        rest.remove(k);
        Ok(rest)
    }

    /// The profile after vendor `k` relocates to `to`, re-sorted.
    pub fn moved(&self, k: usize, to: Position<S>) -> Result<Self> {
        let mut rest = self.others(k)?;
        rest.push(to);
        Self::from_positions(rest, self.mode)
    }

    /// Every vendor shifted counter-clockwise by `theta`.
    pub fn rotated(&self, theta: S) -> Self {
        let moved = self
            .positions
            .iter()
            .map(|p| p.advance(theta.clone()))
            .collect();
        Self::from_positions(moved, self.mode).expect("same size and mode")
    }

    /// Mirror image under `x -> 1 - x`.
    pub fn reflected(&self) -> Self {
        let moved = self.positions.iter().map(Position::reflect).collect();
        Self::from_positions(moved, self.mode).expect("same size and mode")
    }
}

/// A maximal set of coincident vendors.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster<S> {
    pub position: Position<S>,
    pub members: Vec<usize>,
}

impl<S> Cluster<S> {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Stacks ordered counter-clockwise, with `arcs[j]` the free arc from
/// cluster `j` to cluster `j + 1` (cyclically). A single stack owns one arc
/// covering the whole circle.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterDecomposition<S> {
    pub clusters: Vec<Cluster<S>>,
    pub arcs: Vec<S>,
}

impl<S: Scalar> ClusterDecomposition<S> {
    pub(crate) fn of(positions: &[Position<S>], mode: &NumericMode) -> Self {
        let mut clusters: Vec<Cluster<S>> = Vec::new();
        for (i, p) in positions.iter().enumerate() {
            match clusters.last_mut() {
                Some(c) if mode.coincident(&positions[*c.members.last().unwrap()], p) => {
                    c.members.push(i)
                }
                _ => clusters.push(Cluster {
                    position: p.clone(),
                    members: vec![i],
                }),
            }
        }
        // A stack may straddle 0 when floating tolerances are in play.
        if clusters.len() > 1 {
            let first = &positions[clusters[0].members[0]];
            let last = &positions[*clusters.last().unwrap().members.last().unwrap()];
            if mode.coincident(last, first) {
                let tail = clusters.pop().unwrap();
                let head = &mut clusters[0];
                head.position = tail.position;
                let mut members = tail.members;
                members.append(&mut head.members);
                head.members = members;
            }
        }
        let c = clusters.len();
        let arcs = if c == 1 {
            vec![S::one()]
        } else {
            (0..c)
                .map(|j| clusters[j].position.arc_to(&clusters[(j + 1) % c].position))
                .collect()
        };
        Self { clusters, arcs }
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Free arcs on the clockwise and counter-clockwise side of cluster `j`.
    pub fn neighbour_arcs(&self, j: usize) -> (S, S) {
        let c = self.len();
        (self.arcs[(j + c - 1) % c].clone(), self.arcs[j].clone())
    }

    pub fn cluster_of(&self, k: usize) -> Option<usize> {
        self.clusters.iter().position(|c| c.members.contains(&k))
    }

    pub fn max_size(&self) -> usize {
        self.clusters.iter().map(Cluster::size).max().unwrap_or(0)
    }
}

pub fn cluster_decompose<S: Scalar>(profile: &LocationProfile<S>) -> ClusterDecomposition<S> {
    ClusterDecomposition::of(profile.positions(), &profile.mode())
}

/// Indices of the vendors nearest to consumer `y`.
pub fn consumer_set<S: Scalar>(profile: &LocationProfile<S>, y: &Position<S>) -> Vec<usize> {
    nearest(profile.positions(), y, &profile.mode())
}

fn nearest<S: Scalar>(
    positions: &[Position<S>],
    y: &Position<S>,
    mode: &NumericMode,
) -> Vec<usize> {
    let dist: Vec<S> = positions.iter().map(|p| circ_distance(p, y)).collect();
    let min = dist
        .iter()
        .cloned()
        .reduce(|a, b| a.min_of(b))
        .expect("non-empty profile");
    dist.iter()
        .enumerate()
        .filter(|(_, d)| mode.same_distance(*d, &min))
        .map(|(i, _)| i)
        .collect()
}

/// Share of consumer `y`'s purchases going to vendor `k`.
pub fn density<S: Scalar>(profile: &LocationProfile<S>, k: usize, y: &Position<S>) -> Result<S> {
    profile.check_index(k)?;
    let set = consumer_set(profile, y);
    Ok(if set.contains(&k) {
        S::one() / S::from_usize(set.len())
    } else {
        S::zero()
    })
}

/// Profit of each vendor, indexed like the profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfitVector<S>(pub Vec<S>);

impl<S: Scalar> ProfitVector<S> {
    pub fn get(&self, k: usize) -> &S {
        &self.0[k]
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }

    pub fn sum(&self) -> S {
        self.0.iter().cloned().fold(S::zero(), |a, b| a + b)
    }

    pub fn min(&self) -> S {
        self.0.iter().cloned().reduce(|a, b| a.min_of(b)).unwrap()
    }

    /// Largest absolute entry-wise difference, in `f64`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a.clone() - b.clone()).to_f64().abs())
            .fold(0.0, f64::max)
    }
}

/// Exact profits: each member of a stack of size `i` with free arcs `L` and
/// `R` on either side earns `(L + R) / (2i)`.
pub fn profit_closed_form<S: Scalar>(profile: &LocationProfile<S>) -> ProfitVector<S> {
    let dec = cluster_decompose(profile);
    let mut profits = vec![S::zero(); profile.n()];
    for (j, cluster) in dec.clusters.iter().enumerate() {
        let (left, right) = dec.neighbour_arcs(j);
        let share = (left + right) / S::from_usize(2 * cluster.size());
        for &k in &cluster.members {
            profits[k] = share.clone();
        }
    }
    ProfitVector(profits)
}

/// Midpoint-rule integral of the split density over `resolution` consumers at
/// `(j + 1/2) / resolution`.
///
/// Each sample hands out exactly `1/resolution` of mass, so the result sums
/// to one exactly in exact mode. Exact profiles are evaluated on a common
/// integer lattice when the denominators allow it.
pub fn profit_integral_oracle<S: Scalar>(
    profile: &LocationProfile<S>,
    resolution: u64,
) -> Result<ProfitVector<S>> {
    if resolution == 0 {
        return Err(Error::ZeroResolution);
    }
    let tally =
        lattice_tally(profile, resolution).unwrap_or_else(|| generic_tally(profile, resolution));
    Ok(tally_to_profits(&tally, resolution))
}

/// `tally[k][s]` counts samples where vendor `k` ties with `s` vendors in total.
type Tally = Vec<Vec<u64>>;

fn tally_to_profits<S: Scalar>(tally: &Tally, resolution: u64) -> ProfitVector<S> {
    let profits = tally
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| **c > 0)
                .fold(S::zero(), |acc, (s, c)| {
                    acc + S::from_ratio(*c as i64, (s as u64 * resolution) as i64)
                })
        })
        .collect();
    ProfitVector(profits)
}

fn generic_tally<S: Scalar>(profile: &LocationProfile<S>, resolution: u64) -> Tally {
    let n = profile.n();
    let mut tally = vec![vec![0u64; n + 1]; n];
    let den = 2 * resolution as i64;
    for j in 0..resolution as i64 {
        let y = Position::new(S::from_ratio(2 * j + 1, den)).expect("finite sample");
        let set = consumer_set(profile, &y);
        for &k in &set {
            tally[k][set.len()] += 1;
        }
    }
    tally
}

/// Same sampling on integer coordinates scaled by a common denominator.
fn lattice_tally<S: Scalar>(profile: &LocationProfile<S>, resolution: u64) -> Option<Tally> {
    let ratios: Vec<(i128, i128)> = profile
        .positions()
        .iter()
        .map(|p| p.value().as_ratio())
        .collect::<Option<_>>()?;
    let mut scale = 2 * resolution as i128;
    for (_, d) in &ratios {
        scale = lcm_i128(scale, *d)?;
    }
    if scale > (1i128 << 61) {
        return None;
    }
    let scale = scale as i64;
    let coords: Vec<i64> = ratios
        .iter()
        .map(|(num, den)| (*num as i64) * (scale / *den as i64))
        .collect();
    let step = scale / (2 * resolution as i64);
    let n = coords.len();
    let mut tally = vec![vec![0u64; n + 1]; n];
    let mut dist = vec![0i64; n];
    for j in 0..resolution as i64 {
        let y = (2 * j + 1) * step;
        let mut min = i64::MAX;
        for (d, c) in dist.iter_mut().zip(&coords) {
            let raw = (c - y).abs();
            *d = raw.min(scale - raw);
            min = min.min(*d);
        }
        let size = dist.iter().filter(|d| **d == min).count();
        for (k, d) in dist.iter().enumerate() {
            if *d == min {
                tally[k][size] += 1;
            }
        }
    }
    Some(tally)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn exact(xs: &[(i64, i64)]) -> LocationProfile<Rational> {
        LocationProfile::new(xs.iter().map(|(n, d)| q(*n, *d)).collect()).unwrap()
    }

    fn float(xs: &[f64]) -> LocationProfile<f64> {
        LocationProfile::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn profile_needs_two_vendors() {
        assert_eq!(
            LocationProfile::new(vec![0.5]),
            Err(Error::TooFewVendors(1))
        );
        assert!(LocationProfile::with_mode(vec![0.5, 0.1], NumericMode::exact()).is_err());
    }

    #[test]
    fn profile_sorts_and_normalizes() {
        let p = float(&[0.7, -0.2, 1.0]);
        assert_eq!(p.values(), vec![0.0, 0.7, 0.8]);
    }

    #[test]
    fn clusters_examples() {
        let d = cluster_decompose(&exact(&[(0, 1), (1, 2), (1, 2)]));
        assert_eq!(d.len(), 2);
        assert_eq!(d.clusters[0].members, vec![0]);
        assert_eq!(d.clusters[1].members, vec![1, 2]);
        assert_eq!(d.clusters[1].position.value(), &q(1, 2));

        let d = cluster_decompose(&exact(&[(0, 1), (1, 3), (2, 3)]));
        assert_eq!(d.len(), 3);
        assert!(d.clusters.iter().all(|c| c.size() == 1));

        let d = cluster_decompose(&exact(&[(1, 5), (1, 5), (1, 5)]));
        assert_eq!(d.len(), 1);
        assert_eq!(d.clusters[0].members, vec![0, 1, 2]);
        assert_eq!(d.arcs, vec![q(1, 1)]);
    }

    #[test]
    fn clusters_merge_across_zero_in_floating_mode() {
        let d = cluster_decompose(&float(&[0.0, 0.5, 1.0 - 1e-14]));
        assert_eq!(d.len(), 2);
        assert_eq!(d.clusters[0].members, vec![2, 0]);
    }

    #[test]
    fn consumer_set_examples() {
        let p = float(&[0.0, 0.5]);
        assert_eq!(consumer_set(&p, &Position::new(0.1).unwrap()), vec![0]);
        assert_eq!(consumer_set(&p, &Position::new(0.25).unwrap()), vec![0, 1]);
        let p = exact(&[(0, 1), (1, 2), (1, 2)]);
        assert_eq!(
            consumer_set(&p, &Position::new(q(3, 5)).unwrap()),
            vec![1, 2]
        );
    }

    #[test]
    fn density_examples() {
        let p = float(&[0.0, 0.5]);
        assert_eq!(density(&p, 0, &Position::new(0.1).unwrap()).unwrap(), 1.0);
        assert_eq!(density(&p, 1, &Position::new(0.25).unwrap()).unwrap(), 0.5);
        let p = exact(&[(0, 1), (1, 2), (1, 2)]);
        let y = Position::new(q(3, 5)).unwrap();
        assert_eq!(density(&p, 1, &y).unwrap(), q(1, 2));
        assert_eq!(density(&p, 0, &y).unwrap(), q(0, 1));
        // 3/4 is equidistant from 0 and the stack at 1/2: a three-way tie
        let y = Position::new(q(3, 4)).unwrap();
        assert_eq!(density(&p, 1, &y).unwrap(), q(1, 3));
        assert_eq!(density(&p, 0, &y).unwrap(), q(1, 3));
        assert!(matches!(
            density(&p, 3, &y),
            Err(Error::VendorIndex { index: 3, n: 3 })
        ));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(profit_closed_form(&float(&[0.0, 0.7])).0, vec![0.5, 0.5]);
        assert_eq!(
            profit_closed_form(&exact(&[(0, 1), (1, 5), (1, 5), (3, 5)])).0,
            vec![q(3, 10), q(3, 20), q(3, 20), q(2, 5)]
        );
        assert_eq!(
            profit_closed_form(&exact(&[(0, 1), (1, 4), (1, 2), (3, 4)])).0,
            vec![q(1, 4); 4]
        );
        assert_eq!(
            profit_closed_form(&exact(&[(0, 1), (1, 2), (1, 2)])).0,
            vec![q(1, 2), q(1, 4), q(1, 4)]
        );
        assert_eq!(profit_closed_form(&exact(&[(2, 7); 5])).0, vec![q(1, 5); 5]);
    }

    #[test]
    fn oracle_examples() {
        let o = profit_integral_oracle(&float(&[0.0, 0.5]), 1000).unwrap();
        assert!(o.0.iter().all(|x| (x - 0.5).abs() <= 0.004));

        let p = exact(&[(0, 1), (1, 5), (1, 5), (3, 5)]);
        let o = profit_integral_oracle(&p, 100_000).unwrap();
        assert!(o.max_abs_diff(&profit_closed_form(&p)) <= 8e-5);
        assert_eq!(o.sum(), q(1, 1));

        let o = profit_integral_oracle(&float(&[0.3, 0.3]), 10).unwrap();
        assert_eq!(o.0, vec![0.5, 0.5]);

        assert_eq!(
            profit_integral_oracle(&float(&[0.3, 0.3]), 0),
            Err(Error::ZeroResolution)
        );
    }

    #[test]
    fn lattice_and_generic_tallies_agree() {
        let p = exact(&[(0, 1), (1, 7), (1, 7), (1, 2), (5, 6)]);
        for m in [1, 7, 12, 97, 1000] {
            assert_eq!(lattice_tally(&p, m).unwrap(), generic_tally(&p, m));
        }
    }

    fn grid_profile(max_n: usize) -> impl Strategy<Value = LocationProfile<Rational>> {
        prop::collection::vec(0i64..360, 2..=max_n).prop_map(|ks| {
            LocationProfile::new(ks.into_iter().map(|k| q(k, 360)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn closed_form_conserves_mass(p in grid_profile(10)) {
            let f = profit_closed_form(&p);
            prop_assert_eq!(f.sum(), q(1, 1));
            prop_assert!(f.0.iter().all(|x| *x >= q(0, 1) && *x <= q(1, 1)));
        }

        #[test]
        fn oracle_conserves_mass_and_agrees(p in grid_profile(8), m in 1u64..3000) {
            let o = profit_integral_oracle(&p, m).unwrap();
            prop_assert_eq!(o.sum(), q(1, 1));
            let bound = 2.0 * p.n() as f64 / m as f64;
            prop_assert!(o.max_abs_diff(&profit_closed_form(&p)) <= bound);
        }

        #[test]
        fn coincident_vendors_earn_equally(p in grid_profile(9)) {
            let f = profit_closed_form(&p);
            for c in cluster_decompose(&p).clusters {
                prop_assert!(c.members.iter().all(|k| f.0[*k] == f.0[c.members[0]]));
            }
        }

        #[test]
        fn rotation_and_reflection_keep_profit_multiset(p in grid_profile(9), t in 0i64..360) {
            let sorted = |mut v: Vec<Rational>| { v.sort(); v };
            let base = sorted(profit_closed_form(&p).0);
            prop_assert_eq!(&sorted(profit_closed_form(&p.rotated(q(t, 360))).0), &base);
            prop_assert_eq!(&sorted(profit_closed_form(&p.reflected()).0), &base);
        }

        #[test]
        fn two_vendors_always_split_evenly(a in 0i64..360, b in 0i64..360) {
            let p = exact(&[(a, 360), (b, 360)]);
            prop_assert_eq!(profit_closed_form(&p).0, vec![q(1, 2), q(1, 2)]);
        }

        #[test]
        fn densities_sum_to_one(p in grid_profile(8), y in 0i64..1000) {
            let y = Position::new(q(y, 1000)).unwrap();
            let total = (0..p.n()).map(|k| density(&p, k, &y).unwrap()).fold(q(0, 1), |a, b| a + b);
            prop_assert_eq!(total, q(1, 1));
        }
    }
}
