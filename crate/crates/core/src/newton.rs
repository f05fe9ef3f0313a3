//! The poset `B(G)` for split `GL_n`.
//!
//! A class is determined by its Newton point, a non-increasing vector of
//! rational slopes whose polygon has integral break points, together with
//! the Kottwitz point (the sum of the slopes). Arithmetic is exact and
//! generic over the integer type backing the rationals.

use std::collections::BTreeSet;
use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use serde::ser::{SerializeSeq, SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::weyl::Coweight;

/// Integer types usable as the backing of exact slopes.
pub trait Integral:
    Integer + Signed + Clone + Hash + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

impl<T> Integral for T where
    T: Integer + Signed + Clone + Hash + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

fn int<I: Integral>(v: i64) -> I {
    I::from_i64(v).expect("integer fits the scalar type")
}

fn ratio<I: Integral>(v: i64) -> Ratio<I> {
    Ratio::from_integer(int(v))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NewtonPoint<I: Integral> {
    slopes: Vec<Ratio<I>>,
}

impl<I: Integral> NewtonPoint<I> {
    /// Validates dominance and integrality of the break points and end point.
    pub fn new(slopes: Vec<Ratio<I>>) -> Result<Self> {
        if slopes.is_empty() {
            return Err(Error::MalformedSlopes("empty slope vector".into()));
        }
        if slopes.windows(2).any(|p| p[0] < p[1]) {
            return Err(Error::MalformedSlopes(format!("{} is not dominant", fmt_slopes(&slopes))));
        }
        let mut acc = Ratio::zero();
        for (k, s) in slopes.iter().enumerate() {
            acc = acc + s.clone();
            let is_break = k + 1 == slopes.len() || slopes[k + 1] != *s;
            if is_break && !acc.is_integer() {
                return Err(Error::MalformedSlopes(format!(
                    "{}: break point ({}, {}) is not integral",
                    fmt_slopes(&slopes),
                    k + 1,
                    acc
                )));
            }
        }
        Ok(NewtonPoint { slopes })
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| ratio(v)).collect())
    }

    /// The dominant representative of an integral coweight.
    pub fn from_coweight(c: &Coweight) -> Self {
        Self::from_integers(&c.dominant().0).expect("sorted integral vector is a Newton point")
    }

    pub fn slopes(&self) -> &[Ratio<I>] {
        &self.slopes
    }

    pub fn dim(&self) -> usize {
        self.slopes.len()
    }

    pub fn total(&self) -> Ratio<I> {
        self.slopes.iter().cloned().fold(Ratio::zero(), |a, b| a + b)
    }

    /// `S_0 = 0, S_1, ..., S_n`: the polygon evaluated at the integers.
    pub fn partial_sums(&self) -> Vec<Ratio<I>> {
        let mut out = Vec::with_capacity(self.slopes.len() + 1);
        let mut acc = Ratio::zero();
        out.push(acc.clone());
        for s in &self.slopes {
            acc = acc + s.clone();
            out.push(acc.clone());
        }
        out
    }

    pub fn is_integral(&self) -> bool {
        self.slopes.iter().all(Ratio::is_integer)
    }

    /// `<2 rho, nu>`.
    pub fn pair_two_rho(&self) -> Ratio<I> {
        let n = self.slopes.len() as i64;
        self.slopes.iter().enumerate().fold(Ratio::zero(), |acc, (k, s)| acc + s.clone() * ratio(n - 1 - 2 * k as i64))
    }

    /// `<rho, nu>`.
    pub fn pair_rho(&self) -> Ratio<I> {
        self.pair_two_rho() / ratio(2)
    }

    pub fn sub(&self, other: &Self) -> Vec<Ratio<I>> {
        self.slopes.iter().zip(&other.slopes).map(|(a, b)| a.clone() - b.clone()).collect()
    }

    /// Shifts by an integral coweight, revalidating the result.
    pub fn shifted(&self, delta: &Coweight) -> Result<Self> {
        if delta.len() != self.dim() {
            return Err(Error::MalformedSlopes(format!("shift {delta} has the wrong length")));
        }
        Self::new(self.slopes.iter().zip(&delta.0).map(|(s, &d)| s.clone() + ratio(d)).collect())
    }
}

fn fmt_slopes<I: Integral>(slopes: &[Ratio<I>]) -> String {
    let parts: Vec<String> = slopes.iter().map(|s| s.to_string()).collect();
    parts.join(",")
}

impl<I: Integral> Display for NewtonPoint<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", fmt_slopes(&self.slopes))
    }
}

/// Comma-separated integers or `p/q` entries, e.g. `"149,75,0,-75,-149"` or `"1/2,1/2"`.
impl<I: Integral> FromStr for NewtonPoint<I> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let slopes = s.split(',').map(|t| parse_rational::<I>(t.trim())).collect::<Result<Vec<_>>>()?;
        Self::new(slopes)
    }
}

fn parse_rational<I: Integral>(t: &str) -> Result<Ratio<I>> {
    let parse_int = |x: &str| -> Result<I> {
        let v: i64 = x.trim().parse().map_err(|e| Error::Parse(format!("slope {t:?}: {e}")))?;
        Ok(int(v))
    };
    match t.split_once('/') {
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("slope {t:?} has zero denominator")));
            }
            Ok(Ratio::new(parse_int(p)?, den))
        }
        None => Ok(Ratio::from_integer(parse_int(t)?)),
    }
}

pub fn serialize_int<I: Integral, S: Serializer>(v: &I, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    match v.to_i64() {
        Some(x) => serializer.serialize_i64(x),
        None => serializer.serialize_str(&v.to_string()),
    }
}

/// An integer as a JSON number when it fits in `i64`, else as a decimal string.
pub struct IntRepr<'a, I: Integral>(pub &'a I);

impl<I: Integral> Serialize for IntRepr<'_, I> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_int(self.0, serializer)
    }
}

/// A rational as a `[num, den]` pair.
pub struct RationalRepr<'a, I: Integral>(pub &'a Ratio<I>);

impl<I: Integral> Serialize for RationalRepr<'_, I> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        seq.serialize_element(&IntRepr(self.0.numer()))?;
        seq.serialize_element(&IntRepr(self.0.denom()))?;
        seq.end()
    }
}

impl<I: Integral> Serialize for NewtonPoint<I> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.slopes.len()))?;
        for s in &self.slopes {
            seq.serialize_element(&RationalRepr(s))?;
        }
        seq.end()
    }
}

/// A class `[b]` in `B(GL_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IsoClass<I: Integral> {
    nu: NewtonPoint<I>,
    kappa: I,
}

impl<I: Integral> IsoClass<I> {
    pub fn new(nu: NewtonPoint<I>) -> Self {
        let kappa = nu.total().to_integer();
        IsoClass { nu, kappa }
    }

    /// The basic class with the given Kottwitz point: all slopes `kappa / n`.
    pub fn basic(n: usize, kappa: i64) -> Self {
        let slope = Ratio::new(int::<I>(kappa), int::<I>(n as i64));
        Self::new(NewtonPoint::new(vec![slope; n]).expect("constant slopes with integral sum"))
    }

    pub fn nu(&self) -> &NewtonPoint<I> {
        &self.nu
    }

    pub fn kappa(&self) -> &I {
        &self.kappa
    }

    pub fn dim(&self) -> usize {
        self.nu.dim()
    }
}

impl<I: Integral> Display for IsoClass<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", fmt_slopes(&self.nu.slopes))
    }
}

impl<I: Integral> FromStr for IsoClass<I> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(IsoClass::new(s.parse()?))
    }
}

impl<I: Integral> Serialize for IsoClass<I> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_struct("IsoClass", 2)?;
        map.serialize_field("nu", &self.nu)?;
        map.serialize_field("kappa", &IntRepr(&self.kappa))?;
        map.end()
    }
}

/// `a <= b`: equal Kottwitz points and the polygon of `a` lies below that of `b`.
pub fn dominance_leq<I: Integral>(a: &IsoClass<I>, b: &IsoClass<I>) -> bool {
    if a.dim() != b.dim() || a.kappa != b.kappa {
        return false;
    }
    a.nu.partial_sums().iter().zip(b.nu.partial_sums()).all(|(x, y)| *x <= y)
}

/// `rank G - rank J_b`: `n` minus the number of simple summands of the isocrystal.
///
/// A run of `m q` equal slopes `p/q` (lowest terms) contributes `m`.
pub fn defect<I: Integral>(b: &IsoClass<I>) -> usize {
    let slopes = &b.nu.slopes;
    let mut simple_parts = 0usize;
    let mut k = 0;
    while k < slopes.len() {
        let mut run = 1;
        while k + run < slopes.len() && slopes[k + run] == slopes[k] {
            run += 1;
        }
        let den = slopes[k].denom().to_usize().expect("denominator bounded by n");
        debug_assert_eq!(run % den, 0, "validated slopes have integral breaks");
        simple_parts += run / den;
        k += run;
    }
    slopes.len() - simple_parts
}

/// The common length of every maximal chain from `a` to `b`:
/// `<rho, nu_b - nu_a> + (defect(a) - defect(b)) / 2`.
pub fn chain_length<I: Integral>(a: &IsoClass<I>, b: &IsoClass<I>) -> Result<u64> {
    if !dominance_leq(a, b) {
        return Err(Error::NotComparable(a.to_string(), b.to_string()));
    }
    let value = rho_gap(a, b) + Ratio::new(int::<I>(defect(a) as i64 - defect(b) as i64), int(2));
    debug_assert!(value.is_integer());
    Ok(value.to_integer().to_u64().expect("non-negative chain length"))
}

/// `<rho, nu_b - nu_a>`.
pub fn rho_gap<I: Integral>(a: &IsoClass<I>, b: &IsoClass<I>) -> Ratio<I> {
    b.nu.pair_rho() - a.nu.pair_rho()
}

/// Budget for interval enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntervalLimits {
    /// Largest admissible `<rho, nu_b - nu_a>`.
    pub max_gap: u64,
    /// Largest number of search nodes visited.
    pub max_nodes: usize,
}

impl Default for IntervalLimits {
    fn default() -> Self {
        IntervalLimits { max_gap: 64, max_nodes: 2_000_000 }
    }
}

/// All classes `c` with `a <= c <= b`.
///
/// Enumerates concave polygons with integral vertices between the polygons
/// of `a` and `b`, one vertex at a time with strictly decreasing slopes, so
/// every polygon is produced exactly once.
pub fn interval<I: Integral>(a: &IsoClass<I>, b: &IsoClass<I>, limits: &IntervalLimits) -> Result<Vec<IsoClass<I>>> {
    if !dominance_leq(a, b) {
        return Err(Error::NotComparable(a.to_string(), b.to_string()));
    }
    let gap = rho_gap(a, b);
    if gap > ratio(limits.max_gap as i64) {
        return Err(Error::LimitExceeded(format!("gap {gap} between {a} and {b} exceeds {}", limits.max_gap)));
    }
    let search = PolygonSearch {
        lower: a.nu.partial_sums(),
        upper: b.nu.partial_sums(),
        n: a.dim(),
        kappa: a.kappa.clone(),
        max_nodes: limits.max_nodes,
    };
    let mut state = SearchState { nodes: 0, vertices: vec![(0, I::zero())], found: Vec::new() };
    search.extend(&mut state, None)?;
    let mut out: Vec<IsoClass<I>> = state.found.into_iter().map(IsoClass::new).collect();
    out.sort();
    out.dedup();
    debug_assert!(out.iter().all(|c| dominance_leq(a, c) && dominance_leq(c, b)));
    Ok(out)
}

struct PolygonSearch<I: Integral> {
    lower: Vec<Ratio<I>>,
    upper: Vec<Ratio<I>>,
    n: usize,
    kappa: I,
    max_nodes: usize,
}

struct SearchState<I: Integral> {
    nodes: usize,
    vertices: Vec<(usize, I)>,
    found: Vec<NewtonPoint<I>>,
}

impl<I: Integral> PolygonSearch<I> {
    fn extend(&self, state: &mut SearchState<I>, prev_slope: Option<&Ratio<I>>) -> Result<()> {
        state.nodes += 1;
        if state.nodes > self.max_nodes {
            return Err(Error::LimitExceeded(format!("more than {} search nodes", self.max_nodes)));
        }
        let (k1, y1) = state.vertices.last().cloned().expect("search starts at the origin");
        if k1 == self.n {
            state.found.push(self.polygon_slopes(&state.vertices));
            return Ok(());
        }
        for k2 in k1 + 1..=self.n {
            let (lo, hi) = if k2 == self.n {
                (self.kappa.clone(), self.kappa.clone())
            } else {
                (self.lower[k2].ceil().to_integer(), self.upper[k2].floor().to_integer())
            };
            let mut y2 = lo;
            while y2 <= hi {
                let slope = Ratio::new(y2.clone() - y1.clone(), int((k2 - k1) as i64));
                let steeper = prev_slope.is_some_and(|p| slope >= *p);
                if !steeper && self.segment_fits(k1, &y1, k2, &slope) {
                    state.vertices.push((k2, y2.clone()));
                    self.extend(state, Some(&slope))?;
                    state.vertices.pop();
                }
                y2 = y2 + I::one();
            }
        }
        Ok(())
    }

    fn segment_fits(&self, k1: usize, y1: &I, k2: usize, slope: &Ratio<I>) -> bool {
        (k1 + 1..k2).all(|k| {
            let y = Ratio::from_integer(y1.clone()) + slope.clone() * ratio((k - k1) as i64);
            self.lower[k] <= y && y <= self.upper[k]
        })
    }

    fn polygon_slopes(&self, vertices: &[(usize, I)]) -> NewtonPoint<I> {
        let mut slopes = Vec::with_capacity(self.n);
        for pair in vertices.windows(2) {
            let (k1, y1) = &pair[0];
            let (k2, y2) = &pair[1];
            let s = Ratio::new(y2.clone() - y1.clone(), int((k2 - k1) as i64));
            slopes.extend(std::iter::repeat_n(s, k2 - k1));
        }
        NewtonPoint::new(slopes).expect("concave integral polygon")
    }
}

/// Covering relations `(lower, upper)` among the given classes, as index pairs.
pub fn hasse_covers<I: Integral>(classes: &[IsoClass<I>]) -> Vec<(usize, usize)> {
    let m = classes.len();
    let less = |i: usize, j: usize| i != j && dominance_leq(&classes[i], &classes[j]);
    let mut covers = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if less(i, j) && !(0..m).any(|k| less(i, k) && less(k, j)) {
                covers.push((i, j));
            }
        }
    }
    covers
}

/// A saturated chain `a = c_0 < c_1 < ... < c_m = b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chain<I: Integral> {
    pub classes: Vec<IsoClass<I>>,
}

impl<I: Integral> Chain<I> {
    /// Number of steps.
    pub fn len(&self) -> usize {
        self.classes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<I: Integral> Serialize for Chain<I> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.classes.serialize(serializer)
    }
}

impl<I: Integral> Display for Chain<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.classes.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(" < "))
    }
}

/// All maximal chains in the interval `[a, b]`.
pub fn maximal_chains<I: Integral>(a: &IsoClass<I>, b: &IsoClass<I>, limits: &IntervalLimits) -> Result<Vec<Chain<I>>> {
    let classes = interval(a, b, limits)?;
    let start = classes.iter().position(|c| c == a).expect("interval contains its bottom");
    let end = classes.iter().position(|c| c == b).expect("interval contains its top");
    let covers = hasse_covers(&classes);
    let mut up: Vec<Vec<usize>> = vec![Vec::new(); classes.len()];
    for (i, j) in covers {
        up[i].push(j);
    }
    let mut chains = BTreeSet::new();
    let mut path = vec![start];
    collect_chains(&up, end, &mut path, &mut |p| {
        chains.insert(Chain { classes: p.iter().map(|&k| classes[k].clone()).collect() });
    });
    Ok(chains.into_iter().collect())
}

fn collect_chains(up: &[Vec<usize>], end: usize, path: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    let last = *path.last().expect("non-empty path");
    if last == end {
        emit(path);
        return;
    }
    for &next in &up[last] {
        path.push(next);
        collect_chains(up, end, path, emit);
        path.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type Np = NewtonPoint<BigInt>;
    type Cls = IsoClass<BigInt>;

    fn cls(s: &str) -> Cls {
        s.parse().unwrap()
    }

    #[test]
    fn validation() {
        assert!(Np::from_str("1/2,1/2").is_ok());
        assert!(Np::from_str("1/2,-1/2").is_err());
        assert!(Np::from_str("0,1").is_err());
        assert!(Np::from_str("2/3,2/3,2/3").is_ok());
        assert!(Np::from_str("1/3,1/3,0").is_err());
        assert!(Np::from_str("1/0").is_err());
        assert!(matches!(Np::from_str("1/2,0"), Err(Error::MalformedSlopes(_))));
    }

    #[test]
    fn dominance() {
        let x = cls("149,75,0,-75,-149");
        let sxs = cls("149,74,0,-74,-149");
        assert!(dominance_leq(&x, &x));
        assert!(dominance_leq(&sxs, &x));
        assert!(!dominance_leq(&x, &sxs));
        assert!(dominance_leq(&cls("1/2,1/2"), &cls("1,0")));
        assert!(!dominance_leq(&cls("0,0"), &cls("1,0")), "different kappa");
        let diff: Vec<String> = x.nu().sub(sxs.nu()).iter().map(|r| r.to_string()).collect();
        assert_eq!(diff, ["0", "1", "0", "-1", "0"]);
    }

    #[test]
    fn defects() {
        assert_eq!(defect(&cls("149,75,0,-75,-149")), 0);
        assert_eq!(defect(&cls("1/2,1/2")), 1);
        assert_eq!(defect(&cls("2/3,2/3,2/3")), 2);
        assert_eq!(defect(&cls("1/2,1/2,1/2,1/2")), 2);
        assert_eq!(defect(&Cls::basic(5, 0)), 0);
        assert_eq!(defect(&Cls::basic(4, 1)), 3);
    }

    #[test]
    fn chain_lengths() {
        let x = cls("149,75,0,-75,-149");
        let sxs = cls("149,74,0,-74,-149");
        assert_eq!(chain_length(&x, &x).unwrap(), 0);
        assert_eq!(chain_length(&sxs, &x).unwrap(), 2);
        assert_eq!(chain_length(&cls("1/2,1/2"), &cls("1,0")).unwrap(), 1);
        assert!(matches!(chain_length(&x, &sxs), Err(Error::NotComparable(..))));
    }

    #[test]
    fn example_interval_and_chains() {
        let x = cls("149,75,0,-75,-149");
        let sxs = cls("149,74,0,-74,-149");
        let got = interval(&sxs, &x, &IntervalLimits::default()).unwrap();
        let b2 = cls("149,74,1,-75,-149");
        let b3 = cls("149,75,-1,-74,-149");
        let expected: BTreeSet<Cls> = [sxs.clone(), b2.clone(), b3.clone(), x.clone()].into();
        assert_eq!(got.into_iter().collect::<BTreeSet<_>>(), expected);
        let chains = maximal_chains(&sxs, &x, &IntervalLimits::default()).unwrap();
        assert_eq!(chains.len(), 2);
        for c in &chains {
            assert_eq!(c.len(), 2);
            assert!(c.classes[1] == b2 || c.classes[1] == b3);
        }
    }

    #[test]
    fn trivial_interval() {
        let x = cls("3,1,-4");
        assert_eq!(interval(&x, &x, &IntervalLimits::default()).unwrap(), vec![x.clone()]);
        let chains = maximal_chains(&x, &x, &IntervalLimits::default()).unwrap();
        assert_eq!(chains.len(), 1);
        assert!(chains[0].is_empty());
    }

    #[test]
    fn gl2_interval_has_no_half_integral_point() {
        // (1/2, -1/2) would need the break point (1, 1/2).
        let got = interval(&cls("0,0"), &cls("1,-1"), &IntervalLimits::default()).unwrap();
        assert_eq!(got, vec![cls("0,0"), cls("1,-1")]);
        let got = interval(&cls("1/2,1/2"), &cls("1,0"), &IntervalLimits::default()).unwrap();
        assert_eq!(got, vec![cls("1/2,1/2"), cls("1,0")]);
    }

    #[test]
    fn limits_are_enforced() {
        let lo = cls("0,0,0");
        let hi = cls("100,0,-100");
        let tight = IntervalLimits { max_gap: 10, max_nodes: 1000 };
        assert!(matches!(interval(&lo, &hi, &tight), Err(Error::LimitExceeded(_))));
        let few_nodes = IntervalLimits { max_gap: 1000, max_nodes: 5 };
        assert!(matches!(interval(&lo, &hi, &few_nodes), Err(Error::LimitExceeded(_))));
    }

    #[test]
    fn small_scalar_backing() {
        let a: IsoClass<i64> = "149,74,0,-74,-149".parse().unwrap();
        let b: IsoClass<i64> = "149,75,0,-75,-149".parse().unwrap();
        assert_eq!(chain_length(&a, &b).unwrap(), 2);
        assert_eq!(maximal_chains(&a, &b, &IntervalLimits::default()).unwrap().len(), 2);
    }

    #[test]
    fn json_shape() {
        let c = cls("1/2,1/2");
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(json, r#"{"nu":[[1,2],[1,2]],"kappa":1}"#);
    }
}
