//! Monte-Carlo estimation of generic Newton points for `GL_n`.
//!
//! Elements of `I x I` are sampled as `i1 * m(x) * i2` with `i1, i2` random
//! Iwahori matrices over `F_p[t]`, and the Newton point of each sample is
//! read off the lower convex hull of `(k, val e_k)` where `e_k` are the
//! coefficients of the characteristic polynomial.
//!
//! `i1 m i2` and `i2 i1 m` share a characteristic polynomial, and the latter
//! is a polynomial matrix times a monomial one, so its entries only need to
//! be known to a low absolute precision. Series carry that precision
//! explicitly; a Newton polygon is accepted only once every coefficient
//! that is not known exactly is provably on or above the hull.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::Ratio;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::affine::AffineElement;
use crate::error::{Error, Result};
use crate::newton::{self, RationalRepr};
use crate::{IsoClass, NewtonPoint};

/// Absolute precision of an exactly known series.
const EXACT: i64 = i64::MAX;

/// Seed salt for the streams that extend samples during the stability recheck.
const TAIL_SEED_SALT: u64 = 0x007a_115e_ed0f_d00d;

const INITIAL_PRECISION: i64 = 32;

/// Arithmetic in `F_p` on canonical representatives `0..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp {
    p: u32,
}

impl Fp {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::BadSamplerConfig(format!("{p} is not a prime below 2^31")));
        }
        Ok(Fp { p })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.p as u64) as u32
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.p - b)
    }

    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }
}

fn is_prime(p: u32) -> bool {
    if !(2..1 << 31).contains(&p) {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A Laurent series over `F_p` known modulo `t^prec`.
///
/// Invariants: `coeffs[0] != 0` unless `coeffs` is empty, and
/// `start + coeffs.len() <= prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    start: i64,
    coeffs: Vec<u32>,
    prec: i64,
}

impl Series {
    pub fn zero() -> Self {
        Series { start: 0, coeffs: Vec::new(), prec: EXACT }
    }

    /// The exact polynomial `sum coeffs[k] t^(low + k)`.
    pub fn from_coeffs(low: i64, coeffs: Vec<u32>) -> Self {
        Self::normalized(low, coeffs, EXACT)
    }

    pub fn monomial(degree: i64, coeff: u32) -> Self {
        Self::from_coeffs(degree, vec![coeff])
    }

    fn normalized(mut start: i64, mut coeffs: Vec<u32>, prec: i64) -> Self {
        let lead = coeffs.iter().position(|&c| c != 0).unwrap_or(coeffs.len());
        coeffs.drain(..lead);
        start += lead as i64;
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if prec != EXACT {
            let keep = (prec - start).clamp(0, coeffs.len() as i64) as usize;
            coeffs.truncate(keep);
            while coeffs.last() == Some(&0) {
                coeffs.pop();
            }
        }
        if coeffs.is_empty() {
            start = 0;
        }
        Series { start, coeffs, prec }
    }

    pub fn is_exact(&self) -> bool {
        self.prec == EXACT
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    /// The valuation, if it is determined by the known coefficients.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.start)
    }

    /// A lower bound for the valuation (`EXACT` for the zero series).
    pub fn valuation_bound(&self) -> i64 {
        self.valuation().unwrap_or(self.prec)
    }

    pub fn coeff(&self, degree: i64) -> u32 {
        let k = degree - self.start;
        if k < 0 || k >= self.coeffs.len() as i64 {
            0
        } else {
            self.coeffs[k as usize]
        }
    }

    /// Highest degree with a nonzero known coefficient.
    pub fn degree(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then(|| self.start + self.coeffs.len() as i64 - 1)
    }

    pub fn shift(&self, by: i64) -> Self {
        Series {
            start: if self.coeffs.is_empty() { 0 } else { self.start + by },
            coeffs: self.coeffs.clone(),
            prec: if self.is_exact() { EXACT } else { self.prec + by },
        }
    }

    /// Forgets everything at degree `prec` and above.
    pub fn truncated(&self, prec: i64) -> Self {
        Self::normalized(self.start, self.coeffs.clone(), prec.min(self.prec))
    }

    pub fn add(&self, other: &Self, f: &Fp) -> Self {
        let prec = self.prec.min(other.prec);
        let (a, b) = (self, other);
        if a.coeffs.is_empty() {
            return b.truncated(prec);
        }
        if b.coeffs.is_empty() {
            return a.truncated(prec);
        }
        let lo = a.start.min(b.start);
        let hi = (a.start + a.coeffs.len() as i64).max(b.start + b.coeffs.len() as i64);
        let hi = if prec == EXACT { hi } else { hi.min(prec) };
        let coeffs = (lo..hi.max(lo)).map(|d| f.add(a.coeff(d), b.coeff(d))).collect();
        Self::normalized(lo, coeffs, prec)
    }

    pub fn neg(&self, f: &Fp) -> Self {
        Series { start: self.start, coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(), prec: self.prec }
    }

    pub fn sub(&self, other: &Self, f: &Fp) -> Self {
        self.add(&other.neg(f), f)
    }

    pub fn mul(&self, other: &Self, f: &Fp) -> Self {
        let prec =
            other.valuation_bound().saturating_add(self.prec).min(self.valuation_bound().saturating_add(other.prec));
        let prec = if self.is_exact() && other.is_exact() { EXACT } else { prec.min(i64::MAX - 1) };
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Series { start: 0, coeffs: Vec::new(), prec };
        }
        let start = self.start + other.start;
        let full = self.coeffs.len() + other.coeffs.len() - 1;
        let len = if prec == EXACT { full } else { full.min((prec - start).max(0) as usize) };
        let p = f.p as u64;
        let mut acc = vec![0u64; len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 || i >= len {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(len - i) {
                acc[i + j] = (acc[i + j] + a as u64 * b as u64) % p;
            }
        }
        Self::normalized(start, acc.into_iter().map(|c| c as u32).collect(), prec)
    }
}

/// An `n x n` matrix of Laurent polynomials over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPolyMatrix {
    n: usize,
    field: Fp,
    deg_cap: u32,
    entries: Vec<Series>,
}

impl LaurentPolyMatrix {
    pub fn from_entries(n: usize, field: Fp, deg_cap: u32, entries: Vec<Series>) -> Self {
        assert_eq!(entries.len(), n * n, "entry count");
        LaurentPolyMatrix { n, field, deg_cap, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn deg_cap(&self) -> u32 {
        self.deg_cap
    }

    pub fn entry(&self, row: usize, col: usize) -> &Series {
        &self.entries[row * self.n + col]
    }

    /// Product with every entry cut off at degree `prec` (exclusive).
    pub fn mul_truncated(&self, other: &Self, prec: i64) -> Self {
        let n = self.n;
        let f = &self.field;
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = Series::zero();
                for k in 0..n {
                    let a = self.entry(r, k).truncated(prec);
                    let b = other.entry(k, c).truncated(prec);
                    acc = acc.add(&a.mul(&b, f), f);
                }
                entries.push(if prec == EXACT { acc } else { acc.truncated(prec) });
            }
        }
        LaurentPolyMatrix { n, field: self.field, deg_cap: self.deg_cap.max(other.deg_cap), entries }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_truncated(other, EXACT)
    }

    /// Reduction modulo `t` of a matrix with entries in `F_p[[t]]`.
    pub fn constant_terms(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.coeff(0)).collect()
    }

    /// `self * diag(t^shift) * P`, where column `c` of `P` is `e_{perm[c]}`.
    fn times_monomial(&self, shifts: &[i64], perm: &[usize]) -> Self {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for &k in &perm[..n] {
                entries.push(self.entry(r, k).shift(shifts[k]));
            }
        }
        LaurentPolyMatrix { n, field: self.field, deg_cap: self.deg_cap, entries }
    }
}

/// `t^lambda u` as the monomial matrix `diag(t^lambda) P_u` with `P_u e_k = e_{u(k)}`.
pub fn matrix_of(x: &AffineElement, field: Fp) -> LaurentPolyMatrix {
    let n = x.dim();
    let u = x.finite_part();
    let mut entries = vec![Series::zero(); n * n];
    for k in 0..n {
        let row = u.image(k);
        entries[row * n + k] = Series::monomial(x.lambda().0[row], 1);
    }
    LaurentPolyMatrix { n, field, deg_cap: 0, entries }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SamplerConfig {
    pub p: u32,
    pub samples: u64,
    pub deg_cap: u32,
    pub rng_seed: u64,
    pub stability_recheck: bool,
}

impl SamplerConfig {
    /// `2 n max|mu_i| + n` for the normal-form translation of `x`.
    pub fn precision_floor(x: &AffineElement) -> u32 {
        let n = x.dim() as i64;
        let top = x.normal_form().mu.0.iter().map(|c| c.abs()).max().unwrap_or(0);
        (2 * n * top + n) as u32
    }

    /// Defaults for `x`: `p = 101`, `deg_cap` at the precision floor.
    pub fn for_element(x: &AffineElement, samples: u64, rng_seed: u64) -> Self {
        SamplerConfig { p: 101, samples, deg_cap: Self::precision_floor(x), rng_seed, stability_recheck: true }
    }

    pub fn validate(&self, x: &AffineElement) -> Result<Fp> {
        let field = Fp::new(self.p)?;
        if self.samples == 0 {
            return Err(Error::BadSamplerConfig("at least one sample is required".into()));
        }
        let floor = Self::precision_floor(x);
        if self.deg_cap < floor {
            return Err(Error::BadSamplerConfig(format!("deg_cap {} is below the floor {floor}", self.deg_cap)));
        }
        Ok(field)
    }
}

/// A random element of the Iwahori subgroup: unit diagonal, arbitrary entries
/// below it and entries divisible by `t` above it, all of degree `<= deg_cap`.
pub fn sample_iwahori<R: Rng + ?Sized>(n: usize, field: Fp, deg_cap: u32, rng: &mut R) -> LaurentPolyMatrix {
    let p = field.modulus();
    let len = deg_cap as usize + 1;
    let mut entries = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let mut coeffs: Vec<u32> = (0..len).map(|_| rng.gen_range(0..p)).collect();
            if r == c {
                coeffs[0] = rng.gen_range(1..p);
            } else if r < c {
                coeffs[0] = 0;
            }
            entries.push(Series::from_coeffs(0, coeffs));
        }
    }
    LaurentPolyMatrix { n, field, deg_cap, entries }
}

/// Appends fresh random coefficients in degrees `deg_cap + 1 ..= 2 deg_cap + 1`.
fn extend_tail<R: Rng + ?Sized>(m: &LaurentPolyMatrix, rng: &mut R) -> LaurentPolyMatrix {
    let p = m.field.modulus();
    let old = m.deg_cap as usize + 1;
    let entries = m
        .entries
        .iter()
        .map(|e| {
            let mut coeffs: Vec<u32> = (0..old as i64).map(|d| e.coeff(d)).collect();
            coeffs.extend((0..old).map(|_| rng.gen_range(0..p)));
            Series::from_coeffs(0, coeffs)
        })
        .collect();
    LaurentPolyMatrix { n: m.n, field: m.field, deg_cap: 2 * m.deg_cap + 1, entries }
}

/// `e_k`: the sum of all principal `k x k` minors, for `k = 0..=n`.
fn char_poly_coefficients(m: &LaurentPolyMatrix) -> Vec<Series> {
    let n = m.n;
    assert!(n <= 16, "principal minor expansion supports n <= 16");
    let mut memo: HashMap<(u32, u32), Series> = HashMap::new();
    let mut e = vec![Series::zero(); n + 1];
    e[0] = Series::monomial(0, 1);
    for mask in 1u32..(1 << n) {
        let k = mask.count_ones() as usize;
        let minor = minor(m, mask, mask, &mut memo);
        e[k] = e[k].add(&minor, &m.field);
    }
    e
}

/// Determinant of the submatrix on `rows x cols`, expanded along its first row.
fn minor(m: &LaurentPolyMatrix, rows: u32, cols: u32, memo: &mut HashMap<(u32, u32), Series>) -> Series {
    if rows == 0 {
        return Series::monomial(0, 1);
    }
    if let Some(v) = memo.get(&(rows, cols)) {
        return v.clone();
    }
    let f = &m.field;
    let r = rows.trailing_zeros() as usize;
    let rest = rows & (rows - 1);
    let mut acc = Series::zero();
    let mut sign_odd = false;
    let mut remaining = cols;
    while remaining != 0 {
        let c = remaining.trailing_zeros() as usize;
        remaining &= remaining - 1;
        let a = m.entry(r, c);
        if !(a.valuation().is_none() && a.is_exact()) {
            let term = a.mul(&minor(m, rest, cols & !(1 << c), memo), f);
            acc = if sign_odd { acc.sub(&term, f) } else { acc.add(&term, f) };
        }
        sign_odd = !sign_odd;
    }
    memo.insert((rows, cols), acc.clone());
    acc
}

/// Lower convex hull of `(k, val e_k)`, if the known coefficients determine it.
fn certified_polygon(e: &[Series]) -> Option<Vec<(i64, i64)>> {
    let n = e.len() - 1;
    let known: Vec<(i64, i64)> =
        e.iter().enumerate().filter_map(|(k, s)| s.valuation().map(|v| (k as i64, v))).collect();
    if known.first()?.0 != 0 || known.last()?.0 != n as i64 {
        return None;
    }
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &known {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Drop b unless it lies strictly below the segment a -> pt.
            if (b.1 - a.1) * (pt.0 - a.0) >= (pt.1 - a.1) * (b.0 - a.0) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    for (k, s) in e.iter().enumerate() {
        if s.valuation().is_some() {
            continue;
        }
        let bound = s.valuation_bound();
        let k = k as i64;
        let seg = hull.windows(2).find(|w| w[0].0 <= k && k <= w[1].0)?;
        let (a, b) = (seg[0], seg[1]);
        // bound >= a.1 + (b.1 - a.1) (k - a.0) / (b.0 - a.0)
        let lhs = (bound as i128 - a.1 as i128) * (b.0 - a.0) as i128;
        if lhs < (b.1 - a.1) as i128 * (k - a.0) as i128 {
            return None;
        }
    }
    Some(hull)
}

fn class_of_polygon(hull: &[(i64, i64)]) -> IsoClass {
    let mut slopes = Vec::new();
    for w in hull.windows(2) {
        let run = w[1].0 - w[0].0;
        let s = Ratio::new(BigInt::from(w[1].1 - w[0].1), BigInt::from(run));
        slopes.extend(std::iter::repeat_n(s, run as usize));
    }
    slopes.reverse();
    IsoClass::new(NewtonPoint::new(slopes).expect("hull slopes have integral breaks"))
}

/// Newton point of the characteristic polynomial of `m`.
pub fn newton_point_of_matrix(m: &LaurentPolyMatrix) -> Result<IsoClass> {
    let e = char_poly_coefficients(m);
    let hull = certified_polygon(&e).ok_or_else(|| {
        Error::PrecisionLoss("characteristic polynomial not determined (singular or truncated)".into())
    })?;
    Ok(class_of_polygon(&hull))
}

/// Newton point of `i1 x i2` from the conjugate `i2 i1 x`, raising the working
/// precision until the polygon is certified. Only coefficients of degree
/// `<= deg_cap` of the Iwahori factors may be consulted.
fn sample_newton_point(
    i1: &LaurentPolyMatrix,
    i2: &LaurentPolyMatrix,
    x: &AffineElement,
    start: i64,
) -> Result<(IsoClass, i64)> {
    let cap = i1.deg_cap.min(i2.deg_cap) as i64 + 1;
    let exact_above = (i1.deg_cap + i2.deg_cap) as i64;
    let perm: Vec<usize> = (0..x.dim()).map(|k| x.finite_part().image(k)).collect();
    let shifts = &x.lambda().0;
    let mut prec = start.min(cap);
    loop {
        let working = if prec > exact_above { EXACT } else { prec };
        let product = i2.mul_truncated(i1, working).times_monomial(shifts, &perm);
        let e = char_poly_coefficients(&product);
        if let Some(hull) = certified_polygon(&e) {
            return Ok((class_of_polygon(&hull), prec));
        }
        if prec >= cap {
            return Err(Error::PrecisionLoss(format!(
                "polygon not certified using coefficients up to degree {}",
                cap - 1
            )));
        }
        prec = (2 * prec).min(cap);
    }
}

fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Result of a sampling run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSummary {
    /// Dominance-maximal sampled classes.
    pub max_points: Vec<IsoClass>,
    pub histogram: BTreeMap<IsoClass, u64>,
    pub accepted: u64,
    pub discarded: u64,
    pub stability_checked: u64,
}

impl Serialize for SampleSummary {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Bucket<'a> {
            class: &'a IsoClass,
            count: u64,
            #[serde(serialize_with = "ser_two_rho")]
            two_rho_pairing: &'a IsoClass,
        }
        fn ser_two_rho<S: serde::Serializer>(c: &&IsoClass, s: S) -> std::result::Result<S::Ok, S::Error> {
            RationalRepr(&c.nu().pair_two_rho()).serialize(s)
        }
        #[derive(Serialize)]
        struct View<'a> {
            max_points: &'a [IsoClass],
            accepted: u64,
            discarded: u64,
            stability_checked: u64,
            histogram: Vec<Bucket<'a>>,
        }
        View {
            max_points: &self.max_points,
            accepted: self.accepted,
            discarded: self.discarded,
            stability_checked: self.stability_checked,
            histogram: self
                .histogram
                .iter()
                .map(|(class, &count)| Bucket { class, count, two_rho_pairing: class })
                .collect(),
        }
        .serialize(serializer)
    }
}

#[derive(Default)]
struct Tally {
    histogram: BTreeMap<IsoClass, u64>,
    discarded: u64,
    stability_checked: u64,
    unstable: Vec<String>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        for (k, v) in other.histogram {
            *self.histogram.entry(k).or_insert(0) += v;
        }
        self.discarded += other.discarded;
        self.stability_checked += other.stability_checked;
        self.unstable.extend(other.unstable);
        self
    }
}

/// Samples `i1 m(x) i2` and returns the dominance-maximal Newton points seen.
///
/// Sample `k` draws from its own ChaCha stream, so the result does not depend
/// on the thread count. Every 20th sample is recomputed with the Iwahori
/// factors extended to twice the degree when `stability_recheck` is set.
pub fn estimate_generic_newton(x: &AffineElement, cfg: &SamplerConfig) -> Result<SampleSummary> {
    let field = cfg.validate(x)?;
    let n = x.dim();
    let tally = (0..cfg.samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(cfg.rng_seed, k);
            let i1 = sample_iwahori(n, field, cfg.deg_cap, &mut rng);
            let i2 = sample_iwahori(n, field, cfg.deg_cap, &mut rng);
            let mut t = Tally::default();
            match sample_newton_point(&i1, &i2, x, INITIAL_PRECISION) {
                Ok((class, prec)) => {
                    if cfg.stability_recheck && k % 20 == 0 {
                        let mut tail = sample_rng(cfg.rng_seed ^ TAIL_SEED_SALT, k);
                        let (j1, j2) = (extend_tail(&i1, &mut tail), extend_tail(&i2, &mut tail));
                        t.stability_checked = 1;
                        match sample_newton_point(&j1, &j2, x, 2 * prec) {
                            Ok((again, _)) if again == class => {}
                            Ok((again, _)) => t.unstable.push(format!("sample {k}: {class} became {again}")),
                            Err(e) => t.unstable.push(format!("sample {k}: {e}")),
                        }
                    }
                    t.histogram.insert(class, 1);
                }
                Err(Error::PrecisionLoss(_)) => t.discarded = 1,
                Err(e) => return Err(e),
            }
            Ok(t)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;

    if !tally.unstable.is_empty() {
        return Err(Error::PrecisionLoss(format!("stability recheck failed: {}", tally.unstable.join("; "))));
    }
    if tally.discarded * 10 > cfg.samples {
        return Err(Error::PrecisionLoss(format!("{} of {} samples discarded", tally.discarded, cfg.samples)));
    }
    let classes: Vec<&IsoClass> = tally.histogram.keys().collect();
    let max_points = classes
        .iter()
        .filter(|a| !classes.iter().any(|b| a != &b && newton::dominance_leq(a, b)))
        .map(|c| (*c).clone())
        .collect();
    Ok(SampleSummary {
        max_points,
        accepted: cfg.samples - tally.discarded,
        discarded: tally.discarded,
        stability_checked: tally.stability_checked,
        histogram: tally.histogram,
    })
}
