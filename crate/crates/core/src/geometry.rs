//! Arithmetic on the unit circle: scalars, numeric modes, positions, the
//! circular metric and gap extraction.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Sub};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::market::LocationProfile;

/// Exact rational scalar.
pub type Rational = Ratio<i128>;

/// Number type the game is evaluated in.
///
/// Exact scalars compare by equality and ignore tolerances; floating scalars
/// honour the tolerance passed to [`Scalar::within`] and [`Scalar::exceeds`].
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    /// Whether arithmetic and comparisons are exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    /// `num / den`; `den` must be positive.
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_usize(v: usize) -> Self {
        Self::from_ratio(v as i64, 1)
    }
    fn to_f64(&self) -> f64;
    fn floor(&self) -> Self;
    fn abs(&self) -> Self;
    fn is_finite(&self) -> bool;
    /// Numerator and positive denominator, for exact scalars.
    fn as_ratio(&self) -> Option<(i128, i128)>;

    /// `|self - other| <= tol` (exact equality for exact scalars).
    fn within(&self, other: &Self, tol: f64) -> bool;
    /// `self > other + tol` (strict `>` for exact scalars).
    fn exceeds(&self, other: &Self, tol: f64) -> bool;

    fn half(&self) -> Self {
        self.clone() / Self::from_ratio(2, 1)
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num as i128, den as i128)
    }
    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
    fn floor(&self) -> Self {
        Ratio::floor(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn is_finite(&self) -> bool {
        true
    }
    fn as_ratio(&self) -> Option<(i128, i128)> {
        Some((*self.numer(), *self.denom()))
    }
    fn within(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
    fn exceeds(&self, other: &Self, _tol: f64) -> bool {
        self > other
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn as_ratio(&self) -> Option<(i128, i128)> {
        None
    }
    fn within(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }
    fn exceeds(&self, other: &Self, tol: f64) -> bool {
        *self > other + tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeKind {
    ExactRational,
    Floating,
}

/// Tolerances shared by every comparison made on a profile.
///
/// `coincidence_tol` decides when two positions are the same point (and when
/// two consumer distances tie); `value_tol` is used when comparing profits
/// and gap sums. Both are zero in exact mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericMode {
    pub kind: ModeKind,
    pub coincidence_tol: f64,
    pub value_tol: f64,
}

impl NumericMode {
    pub const DEFAULT_COINCIDENCE_TOL: f64 = 1e-12;
    pub const DEFAULT_VALUE_TOL: f64 = 1e-9;

    pub const fn exact() -> Self {
        Self {
            kind: ModeKind::ExactRational,
            coincidence_tol: 0.0,
            value_tol: 0.0,
        }
    }

    pub const fn floating() -> Self {
        Self {
            kind: ModeKind::Floating,
            coincidence_tol: Self::DEFAULT_COINCIDENCE_TOL,
            value_tol: Self::DEFAULT_VALUE_TOL,
        }
    }

    pub fn floating_with(coincidence_tol: f64, value_tol: f64) -> Self {
        Self {
            kind: ModeKind::Floating,
            coincidence_tol,
            value_tol,
        }
    }

    /// The mode a scalar type uses unless told otherwise.
    pub fn default_for<S: Scalar>() -> Self {
        if S::EXACT {
            Self::exact()
        } else {
            Self::floating()
        }
    }

    pub(crate) fn check<S: Scalar>(&self) -> Result<()> {
        let ok = match self.kind {
            ModeKind::ExactRational => S::EXACT,
            ModeKind::Floating => !S::EXACT,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ModeMismatch { kind: self.kind })
        }
    }

    /// Two positions denote the same point.
    pub fn coincident<S: Scalar>(&self, a: &Position<S>, b: &Position<S>) -> bool {
        circ_distance(a, b).within(&S::zero(), self.coincidence_tol)
    }

    /// Two consumer distances tie.
    pub fn same_distance<S: Scalar>(&self, a: &S, b: &S) -> bool {
        a.within(b, self.coincidence_tol)
    }

    /// `a >= b` up to the value tolerance.
    pub fn value_ge<S: Scalar>(&self, a: &S, b: &S) -> bool {
        !b.exceeds(a, self.value_tol)
    }

    /// `a > b` beyond the value tolerance.
    pub fn value_gt<S: Scalar>(&self, a: &S, b: &S) -> bool {
        a.exceeds(b, self.value_tol)
    }
}

/// A point on the circle, stored in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, PartialOrd)]
pub struct Position<S>(S);

impl<S: Scalar> Position<S> {
    /// Reduces `x` modulo one.
    pub fn new(x: S) -> Result<Self> {
        normalize(x)
    }

    pub fn zero() -> Self {
        Position(S::zero())
    }

    pub fn value(&self) -> &S {
        &self.0
    }

    pub fn into_value(self) -> S {
        self.0
    }

    /// The position reached by travelling `arc` counter-clockwise.
    pub fn advance(&self, arc: S) -> Self {
        wrap(self.0.clone() + arc)
    }

    /// Mirror image under `x -> 1 - x`.
    pub fn reflect(&self) -> Self {
        wrap(S::one() - self.0.clone())
    }

    /// Counter-clockwise arc length from `self` to `to`, in `[0, 1)`.
    pub fn arc_to(&self, to: &Self) -> S {
        let d = to.0.clone() - self.0.clone();
        if d < S::zero() {
            d + S::one()
        } else {
            d
        }
    }
}

impl<S: Scalar> Display for Position<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        Display::fmt(&self.0, f)
    }
}

/// Total order for sorting; NaN never occurs in a constructed position.
pub(crate) fn cmp_positions<S: Scalar>(a: &Position<S>, b: &Position<S>) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

fn wrap<S: Scalar>(x: S) -> Position<S> {
    let r = x.clone() - x.floor();
    // f64 rounding can land a tiny negative input exactly on 1.
    if r >= S::one() || r < S::zero() {
        Position(S::zero())
    } else {
        Position(r)
    }
}

pub fn normalize<S: Scalar>(x: S) -> Result<Position<S>> {
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(wrap(x))
}

/// Shortest arc length between two points, `min{|x-y+1|, |x-y|, |x-y-1|}`.
pub fn circ_distance<S: Scalar>(x: &Position<S>, y: &Position<S>) -> S {
    let diff = x.0.clone() - y.0.clone();
    let plus = (diff.clone() + S::one()).abs();
    let minus = (diff.clone() - S::one()).abs();
    diff.abs().min_of(plus).min_of(minus)
}

/// Arc lengths between consecutive sorted vendors; the last entry is the wrap
/// arc from the last vendor back to the first.
#[derive(Debug, Clone, PartialEq)]
pub struct GapVector<S>(pub Vec<S>);

impl<S: Scalar> GapVector<S> {
    pub fn from_positions(positions: &[Position<S>]) -> Result<Self> {
        let n = positions.len();
        if n < 2 {
            return Err(Error::TooFewVendors(n));
        }
        let mut gaps: Vec<S> = positions
            .windows(2)
            .map(|w| w[1].value().clone() - w[0].value().clone())
            .collect();
        gaps.push(positions[0].value().clone() + S::one() - positions[n - 1].value().clone());
        Ok(GapVector(gaps))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: usize) -> &S {
        &self.0[k % self.0.len()]
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }

    pub fn max(&self) -> S {
        self.0
            .iter()
            .cloned()
            .fold(S::zero(), |acc, g| acc.max_of(g))
    }

    pub fn sum(&self) -> S {
        self.0.iter().cloned().fold(S::zero(), |acc, g| acc + g)
    }
}

pub fn gap_vector<S: Scalar>(profile: &LocationProfile<S>) -> GapVector<S> {
    GapVector::from_positions(profile.positions()).expect("profiles hold at least two vendors")
}

pub(crate) fn lcm_i128(a: i128, b: i128) -> Option<i128> {
    let g = a.gcd(&b);
    (a / g).checked_mul(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn pos(x: f64) -> Position<f64> {
        normalize(x).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(1.0).unwrap().into_value(), 0.0);
        assert_eq!(normalize(0.3).unwrap().into_value(), 0.3);
        assert_eq!(normalize(-0.25).unwrap().into_value(), 0.75);
        assert_eq!(normalize(q(-1, 4)).unwrap().into_value(), q(3, 4));
        assert_eq!(normalize(q(7, 3)).unwrap().into_value(), q(1, 3));
        assert_eq!(normalize(f64::NAN), Err(Error::NonFinite));
        assert_eq!(normalize(f64::INFINITY), Err(Error::NonFinite));
        assert_eq!(normalize(-1e-20).unwrap().into_value(), 0.0);
    }

    #[test]
    fn distance_examples() {
        assert!((circ_distance(&pos(0.0), &pos(0.9)) - 0.1).abs() < 1e-15);
        assert_eq!(circ_distance(&pos(0.25), &pos(0.25)), 0.0);
        assert_eq!(circ_distance(&pos(0.1), &pos(0.6)), 0.5);
        let a = normalize(q(0, 1)).unwrap();
        let b = normalize(q(9, 10)).unwrap();
        assert_eq!(circ_distance(&a, &b), q(1, 10));
    }

    #[test]
    fn gap_examples() {
        let p = |xs: &[Rational]| {
            GapVector::from_positions(
                &xs.iter()
                    .map(|x| normalize(*x).unwrap())
                    .collect::<Vec<_>>(),
            )
            .unwrap()
        };
        assert_eq!(p(&[q(0, 1), q(1, 2)]).0, vec![q(1, 2), q(1, 2)]);
        assert_eq!(
            p(&[q(0, 1), q(0, 1), q(1, 2)]).0,
            vec![q(0, 1), q(1, 2), q(1, 2)]
        );
        assert_eq!(
            p(&[q(0, 1), q(1, 5), q(1, 5), q(3, 5)]).0,
            vec![q(1, 5), q(0, 1), q(2, 5), q(2, 5)]
        );
        // all coincident: the wrap arc carries the whole circle
        assert_eq!(p(&[q(1, 5), q(1, 5)]).0, vec![q(0, 1), q(1, 1)]);
        assert_eq!(
            GapVector::from_positions(&[Position::<f64>::zero()]),
            Err(Error::TooFewVendors(1))
        );
    }

    #[test]
    fn mode_scalar_mismatch() {
        assert!(NumericMode::exact().check::<f64>().is_err());
        assert!(NumericMode::floating().check::<Rational>().is_err());
        assert!(NumericMode::exact().check::<Rational>().is_ok());
    }

    #[test]
    fn float_coincidence_uses_tolerance() {
        let m = NumericMode::floating();
        assert!(m.coincident(&pos(0.3), &pos(0.3 + 1e-13)));
        assert!(m.coincident(&pos(0.0), &pos(1.0 - 1e-13)));
        assert!(!m.coincident(&pos(0.3), &pos(0.3 + 1e-9)));
    }

    fn grid_point() -> impl Strategy<Value = Rational> {
        (0i64..360).prop_map(|k| q(k, 360))
    }

    proptest! {
        #[test]
        fn distance_symmetric_and_bounded(x in -3.0f64..3.0, y in -3.0f64..3.0) {
            let (a, b) = (pos(x), pos(y));
            let d = circ_distance(&a, &b);
            prop_assert_eq!(d, circ_distance(&b, &a));
            prop_assert!((0.0..=0.5).contains(&d));
        }

        #[test]
        fn triangle_inequality(x in grid_point(), y in grid_point(), z in grid_point()) {
            let (a, b, c) = (normalize(x).unwrap(), normalize(y).unwrap(), normalize(z).unwrap());
            prop_assert!(circ_distance(&a, &c) <= circ_distance(&a, &b) + circ_distance(&b, &c));
        }

        #[test]
        fn gaps_nonnegative_sum_to_one(mut xs in prop::collection::vec(grid_point(), 2..10)) {
            xs.sort();
            let ps: Vec<_> = xs.into_iter().map(|x| normalize(x).unwrap()).collect();
            let g = GapVector::from_positions(&ps).unwrap();
            prop_assert!(g.0.iter().all(|x| *x >= q(0, 1)));
            prop_assert_eq!(g.sum(), q(1, 1));
        }

        #[test]
        fn float_gaps_sum_to_one(mut xs in prop::collection::vec(0.0f64..1.0, 2..12)) {
            xs.sort_by(f64::total_cmp);
            let ps: Vec<_> = xs.into_iter().map(pos).collect();
            let g = GapVector::from_positions(&ps).unwrap();
            prop_assert!(g.0.iter().all(|x| *x >= 0.0));
            prop_assert!((g.sum() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn rotation_rotates_gaps(xs in prop::collection::vec(grid_point(), 2..9), shift in grid_point()) {
            let mut base: Vec<_> = xs.iter().map(|x| normalize(*x).unwrap()).collect();
            base.sort_by(cmp_positions);
            let mut rotated: Vec<_> = base.iter().map(|p| p.advance(shift)).collect();
            rotated.sort_by(cmp_positions);
            let g0 = GapVector::from_positions(&base).unwrap().0;
            let g1 = GapVector::from_positions(&rotated).unwrap().0;
            let n = g0.len();
            prop_assert!((0..n).any(|s| (0..n).all(|i| g1[i] == g0[(i + s) % n])));
        }
    }
}
