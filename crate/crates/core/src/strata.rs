//! Newton strata of superregular Iwahori double cosets.
//!
//! For `x = v t^mu w` with `mu` dominant and sufficiently regular, the
//! generic Newton point, cordiality and virtual dimensions are governed by
//! shortest paths in the quantum Bruhat graph. On top of that sit the
//! single-reflection reduction `x -> sx, s x sigma(s)`, a search over
//! `(v, w, s)` for reductions that produce non-equidimensional strata, and
//! a report assembling all numerical data for one such element.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::One;
use rayon::prelude::*;
use serde::ser::{SerializeSeq, SerializeStruct, Serializer};
use serde::Serialize;

use crate::affine::AffineElement;
use crate::error::{Error, Result};
use crate::newton::{self, IntervalLimits, RationalRepr};
use crate::qbg::QuantumBruhatGraph;
use crate::weyl::{parse_word_indices, sigma_support, Coweight, DiagramAutomorphism, WeylElement};
use crate::{Chain, IsoClass, NewtonPoint, Rational};

/// A triple `(v, w, s)` together with the Frobenius action on the diagram.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TripleCandidate {
    pub v: WeylElement,
    pub w: WeylElement,
    pub s: usize,
    pub sigma: DiagramAutomorphism,
}

impl TripleCandidate {
    pub fn new(v: WeylElement, w: WeylElement, s: usize, sigma: DiagramAutomorphism) -> Result<Self> {
        let rank = v.rank();
        if w.rank() != rank {
            return Err(Error::RankMismatch { expected: rank, found: w.rank() });
        }
        if sigma.rank() != rank {
            return Err(Error::RankMismatch { expected: rank, found: sigma.rank() });
        }
        if s == 0 || s > rank {
            return Err(Error::BadSimpleIndex { index: s, rank });
        }
        Ok(TripleCandidate { v, w, s, sigma })
    }

    /// Untwisted triple from words such as `"4 2 3 1"`.
    pub fn from_words(rank: usize, v: &str, w: &str, s: usize) -> Result<Self> {
        Self::new(
            WeylElement::parse_word(rank, v)?,
            WeylElement::parse_word(rank, w)?,
            s,
            DiagramAutomorphism::identity(rank),
        )
    }

    pub fn rank(&self) -> usize {
        self.v.rank()
    }

    /// `sigma(s)`.
    pub fn twisted_s(&self) -> usize {
        self.sigma.image_of(self.s)
    }

    /// Canonical ordering key: reduced words of `v` and `w`, then `s`.
    pub fn sort_key(&self) -> (Vec<usize>, Vec<usize>, usize) {
        (self.v.reduced_word(), self.w.reduced_word(), self.s)
    }

    /// One fixture row: `v;w;s` with space-separated indices.
    pub fn fixture_row(&self) -> String {
        format!("{};{};{}", space_word(&self.v), space_word(&self.w), self.s)
    }
}

fn space_word(u: &WeylElement) -> String {
    let parts: Vec<String> = u.reduced_word().iter().map(|i| i.to_string()).collect();
    parts.join(" ")
}

impl fmt::Display for TripleCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v={} w={} s={}", self.v, self.w, self.s)?;
        if !self.sigma.is_identity() {
            write!(f, " sigma={}", self.sigma)?;
        }
        Ok(())
    }
}

impl Serialize for TripleCandidate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("TripleCandidate", 4)?;
        st.serialize_field("v", &self.v)?;
        st.serialize_field("w", &self.w)?;
        st.serialize_field("s", &self.s)?;
        st.serialize_field("sigma", self.sigma.images())?;
        st.end()
    }
}

/// Outcome of each reduction condition for one triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    /// `l(sv) < l(v)`.
    pub v_descent: bool,
    /// `l(w sigma(s)) > l(w)`.
    pub w_ascent: bool,
    /// `l(sigma^{-1}(w) s v) < l(sigma^{-1}(w) v) - 1`.
    pub length_gap: bool,
    /// Both `sigma^{-1}(w) v` and `sigma^{-1}(w) s v` have full `sigma`-support.
    pub full_support: bool,
    /// `sx` satisfies the distance form of cordiality.
    pub sx_cordial: bool,
    /// `s x sigma(s)` satisfies the distance form of cordiality.
    pub sxs_cordial: bool,
}

impl LemmaCheck {
    pub fn passed(&self) -> bool {
        self.v_descent && self.w_ascent && self.length_gap && self.full_support && self.sx_cordial && self.sxs_cordial
    }
}

fn full_sigma_support(u: &WeylElement, sigma: &DiagramAutomorphism) -> bool {
    sigma_support(u, sigma).len() == u.rank()
}

/// `d(sigma^{-1}(w)^{-1}, v) = l(sigma^{-1}(w) v)` for the finite parts of `v t^mu w`.
fn distance_criterion(
    g: &QuantumBruhatGraph,
    v: &WeylElement,
    w: &WeylElement,
    sigma: &DiagramAutomorphism,
) -> Result<bool> {
    let tw = sigma.inverse().apply(w);
    Ok(g.distance(&tw.inverse(), v)? == (&tw * v).length())
}

pub fn check_lemma_conditions(c: &TripleCandidate, g: &QuantumBruhatGraph) -> Result<LemmaCheck> {
    if g.cartan().rank() != c.rank() {
        return Err(Error::RankMismatch { expected: g.cartan().rank(), found: c.rank() });
    }
    let sv = c.v.left_mul_simple(c.s);
    let ws = c.w.right_mul_simple(c.twisted_s());
    let tw = c.sigma.inverse().apply(&c.w);
    let twv = &tw * &c.v;
    let twsv = &tw * &sv;
    Ok(LemmaCheck {
        v_descent: sv.length() < c.v.length(),
        w_ascent: ws.length() > c.w.length(),
        length_gap: twsv.length() + 1 < twv.length(),
        full_support: full_sigma_support(&twv, &c.sigma) && full_sigma_support(&twsv, &c.sigma),
        sx_cordial: distance_criterion(g, &sv, &c.w, &c.sigma)?,
        sxs_cordial: distance_criterion(g, &sv, &ws, &c.sigma)?,
    })
}

/// Every triple passing [`check_lemma_conditions`], sorted by [`TripleCandidate::sort_key`].
pub fn search_triples(g: &QuantumBruhatGraph, sigma: &DiagramAutomorphism) -> Result<Vec<TripleCandidate>> {
    let rank = g.cartan().rank();
    if sigma.rank() != rank {
        return Err(Error::RankMismatch { expected: rank, found: sigma.rank() });
    }
    let vertices = g.vertices();
    let found: Result<Vec<Vec<TripleCandidate>>> = vertices
        .par_iter()
        .map(|v| {
            let mut local = Vec::new();
            for w in vertices {
                for s in 1..=rank {
                    let c = TripleCandidate { v: v.clone(), w: w.clone(), s, sigma: sigma.clone() };
                    if check_lemma_conditions(&c, g)?.passed() {
                        local.push(c);
                    }
                }
            }
            Ok(local)
        })
        .collect();
    let mut all: Vec<TripleCandidate> = found?.into_iter().flatten().collect();
    all.sort_by_cached_key(TripleCandidate::sort_key);
    Ok(all)
}

/// Parses `v;w;s` rows (header optional, `#` comments allowed) into untwisted triples.
pub fn parse_fixture(text: &str, rank: usize) -> Result<Vec<TripleCandidate>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.eq_ignore_ascii_case("v;w;s") {
            continue;
        }
        let cols: Vec<&str> = line.split(';').collect();
        if cols.len() != 3 {
            return Err(Error::Parse(format!("fixture line {}: expected 3 columns, found {}", lineno + 1, cols.len())));
        }
        let s = match parse_word_indices(cols[2])?.as_slice() {
            [s] => *s,
            _ => return Err(Error::Parse(format!("fixture line {}: bad s column {:?}", lineno + 1, cols[2]))),
        };
        out.push(TripleCandidate::from_words(rank, cols[0], cols[1], s)?);
    }
    Ok(out)
}

/// Set difference between a search result and a reference list.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FixtureDiff {
    pub missing: Vec<TripleCandidate>,
    pub unexpected: Vec<TripleCandidate>,
}

impl FixtureDiff {
    pub fn is_match(&self) -> bool {
        self.missing.is_empty() && self.unexpected.is_empty()
    }
}

pub fn compare_with_fixture(found: &[TripleCandidate], expected: &[TripleCandidate]) -> FixtureDiff {
    let key = |c: &TripleCandidate| (c.v.clone(), c.w.clone(), c.s, c.sigma.clone());
    let found_keys: std::collections::HashSet<_> = found.iter().map(key).collect();
    let expected_keys: std::collections::HashSet<_> = expected.iter().map(key).collect();
    let mut diff = FixtureDiff {
        missing: expected.iter().filter(|c| !found_keys.contains(&key(c))).cloned().collect(),
        unexpected: found.iter().filter(|c| !expected_keys.contains(&key(c))).cloned().collect(),
    };
    diff.missing.sort_by_cached_key(TripleCandidate::sort_key);
    diff.unexpected.sort_by_cached_key(TripleCandidate::sort_key);
    diff
}

fn require_split(sigma: &DiagramAutomorphism) -> Result<()> {
    if sigma.is_identity() {
        Ok(())
    } else {
        Err(Error::TwistedUnsupported)
    }
}

fn require_superregular(x: &AffineElement, m: u64) -> Result<()> {
    if x.is_superregular(m)? {
        Ok(())
    } else {
        Err(Error::NotSuperregular(format!(
            "{} has simple pairings {:?}, need all > {m}",
            x.normal_form(),
            x.normal_form().mu.simple_pairings()
        )))
    }
}

/// `[b_x]`: `nu_x = mu - wt(w^{-1} => v)`, `kappa = sum(mu)`.
pub fn generic_newton_point(
    x: &AffineElement,
    sigma: &DiagramAutomorphism,
    g: &QuantumBruhatGraph,
    m: u64,
) -> Result<IsoClass> {
    require_split(sigma)?;
    require_superregular(x, m)?;
    let nf = x.normal_form();
    let weight = g.min_path_weight(&nf.w.inverse(), &nf.v)?;
    let nu = &nf.mu - &weight;
    if !nu.is_dominant() {
        return Err(Error::NotSuperregular(format!("{nu} = {} - {weight} is not dominant", nf.mu)));
    }
    Ok(IsoClass::new(NewtonPoint::from_coweight(&nu)))
}

/// `d(w^{-1}, v) = l(w v)`.
///
/// In debug builds the equivalent identity
/// `l(x) - l(eta(x)) = <2 rho, nu_x> - defect(b_x)` is asserted alongside.
pub fn is_cordial(x: &AffineElement, sigma: &DiagramAutomorphism, g: &QuantumBruhatGraph, m: u64) -> Result<bool> {
    require_split(sigma)?;
    require_superregular(x, m)?;
    let nf = x.normal_form();
    let cordial = distance_criterion(g, &nf.v, &nf.w, sigma)?;
    #[cfg(debug_assertions)]
    {
        let b = generic_newton_point(x, sigma, g, m)?;
        if newton::defect(&b) == 0 {
            let lhs = Ratio::from_integer(BigInt::from(x.length() as i64 - x.eta(sigma).length() as i64));
            assert_eq!(cordial, lhs == b.nu().pair_two_rho(), "cordiality criteria disagree for {x}");
        }
    }
    Ok(cordial)
}

/// `d_x(b) = (l(x) + l(eta(x)) - defect(b) - <2 rho, nu_b>) / 2`.
pub fn virtual_dimension(x: &AffineElement, b: &IsoClass, sigma: &DiagramAutomorphism) -> Result<Rational> {
    if *b.kappa() != BigInt::from(x.kappa()) || b.dim() != x.dim() {
        return Err(Error::KappaMismatch(b.to_string(), format!("{x} (kappa {})", x.kappa())));
    }
    let lengths = BigInt::from(x.length()) + BigInt::from(x.eta(sigma).length()) - BigInt::from(newton::defect(b));
    Ok((Ratio::from_integer(lengths) - b.nu().pair_two_rho()) / Ratio::from_integer(BigInt::from(2)))
}

fn rational(v: i64) -> Rational {
    Ratio::from_integer(BigInt::from(v))
}

fn ser_rational<S: Serializer>(r: &Rational, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    RationalRepr(r).serialize(serializer)
}

fn ser_opt_rational<S: Serializer>(r: &Option<Rational>, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => serializer.serialize_some(&RationalRepr(r)),
        None => serializer.serialize_none(),
    }
}

fn ser_rational_set<S: Serializer>(set: &BTreeSet<Rational>, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = serializer.serialize_seq(Some(set.len()))?;
    for r in set {
        seq.serialize_element(&RationalRepr(r))?;
    }
    seq.end()
}

/// Data attached to one of `x`, `sx`, `s x sigma(s)`.
#[derive(Clone, Debug, Serialize)]
pub struct ElementSummary {
    pub element: AffineElement,
    pub length: u64,
    pub eta: WeylElement,
    pub eta_length: usize,
    pub generic_class: IsoClass,
    pub cordial: bool,
}

impl ElementSummary {
    fn build(x: AffineElement, sigma: &DiagramAutomorphism, g: &QuantumBruhatGraph, m: u64) -> Result<Self> {
        let generic_class = generic_newton_point(&x, sigma, g, m)?;
        let cordial = is_cordial(&x, sigma, g, m)?;
        let eta = x.eta(sigma);
        Ok(ElementSummary { length: x.length(), eta_length: eta.length(), eta, generic_class, cordial, element: x })
    }
}

/// Which reduced element carries the generic class of `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GenericBranch {
    Sx,
    Sxs,
    Both,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassRecord {
    pub class: IsoClass,
    pub in_bx: bool,
    pub in_noneq: bool,
    #[serde(serialize_with = "ser_opt_rational")]
    pub dim_xx: Option<Rational>,
    #[serde(serialize_with = "ser_rational_set")]
    pub component_codims: BTreeSet<Rational>,
    #[serde(serialize_with = "ser_rational")]
    pub d_sx: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub d_sxs: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub triple: TripleCandidate,
    pub mu: Coweight,
    pub superregularity_bound: u64,
    pub x: ElementSummary,
    pub sx: ElementSummary,
    pub sxs: ElementSummary,
    pub b_x: IsoClass,
    pub generic_branch: GenericBranch,
    /// `l(x) - l(s x sigma(s))`.
    pub length_drop: i64,
    /// `d_{sxs}(b) - d_{sx}(b)`, the same for every class.
    #[serde(serialize_with = "ser_rational")]
    pub virtual_dim_gap: Rational,
    pub classes: Vec<ClassRecord>,
    pub chain_length: u64,
    pub maximal_chains: Vec<Chain>,
    /// Some queried class has strata components of two different codimensions.
    pub mixed_codimension_certificate: bool,
}

impl AnalysisReport {
    pub fn record(&self, class: &IsoClass) -> Option<&ClassRecord> {
        self.classes.iter().find(|r| r.class == *class)
    }
}

/// Runs the single-reflection reduction `x -> sx, s x sigma(s)` on `x = v t^mu w`
/// and records generic classes, dimensions and codimensions for the queried classes.
///
/// Queried classes: the two generic classes, the basic class, the interval
/// between the generic classes of `s x sigma(s)` and `x`, and `extra_classes`.
pub fn analyze(
    c: &TripleCandidate,
    mu: &Coweight,
    m: u64,
    extra_classes: &[IsoClass],
    g: &QuantumBruhatGraph,
) -> Result<AnalysisReport> {
    require_split(&c.sigma)?;
    if g.cartan().rank() != c.rank() || mu.len() != c.v.dim() {
        return Err(Error::RankMismatch { expected: g.cartan().rank(), found: c.rank() });
    }
    if !mu.is_dominant() {
        return Err(Error::NonDominantTranslation(mu.to_string()));
    }
    let x = AffineElement::from_normal_form(c.v.clone(), mu.clone(), c.w.clone())?;
    require_superregular(&x, m)?;
    let sx = x.left_mul_simple(c.s);
    let sxs = sx.right_mul_simple(c.twisted_s());

    let x = ElementSummary::build(x, &c.sigma, g, m)?;
    let sx = ElementSummary::build(sx, &c.sigma, g, m)?;
    let sxs = ElementSummary::build(sxs, &c.sigma, g, m)?;

    let top_sx = &sx.generic_class;
    let top_sxs = &sxs.generic_class;
    let (b_x, generic_branch) = if top_sx == top_sxs {
        (top_sx.clone(), GenericBranch::Both)
    } else if newton::dominance_leq(top_sxs, top_sx) {
        (top_sx.clone(), GenericBranch::Sx)
    } else if newton::dominance_leq(top_sx, top_sxs) {
        (top_sxs.clone(), GenericBranch::Sxs)
    } else {
        return Err(Error::IncomparableTops(top_sx.to_string(), top_sxs.to_string()));
    };

    let limits = IntervalLimits::default();
    let mut queried: BTreeSet<IsoClass> = BTreeSet::new();
    queried.insert(top_sx.clone());
    queried.insert(top_sxs.clone());
    queried.insert(IsoClass::basic(x.element.dim(), x.element.kappa()));
    queried.extend(newton::interval(top_sxs, &b_x, &limits)?);
    queried.extend(extra_classes.iter().cloned());

    let length_x = rational(x.length as i64);
    let one = Rational::one();
    let mut classes = Vec::with_capacity(queried.len());
    for class in queried {
        let d_sx = virtual_dimension(&sx.element, &class, &c.sigma)?;
        let d_sxs = virtual_dimension(&sxs.element, &class, &c.sigma)?;
        let in_sx = newton::dominance_leq(&class, top_sx);
        let in_sxs = newton::dominance_leq(&class, top_sxs);
        let base = &length_x - class.nu().pair_two_rho() - &one;
        let mut component_codims = BTreeSet::new();
        if in_sxs {
            component_codims.insert(&base - &d_sxs);
        }
        if in_sx {
            component_codims.insert(&base - &d_sx);
        }
        let dim_xx = if in_sxs {
            Some(&d_sxs + &one)
        } else if in_sx {
            Some(&d_sx + &one)
        } else {
            None
        };
        classes.push(ClassRecord {
            class,
            in_bx: in_sx || in_sxs,
            in_noneq: in_sx && in_sxs,
            dim_xx,
            component_codims,
            d_sx,
            d_sxs,
        });
    }

    let virtual_dim_gap =
        rational((sxs.length as i64 + sxs.eta_length as i64) - (sx.length as i64 + sx.eta_length as i64)) / rational(2);
    debug_assert!(classes.iter().all(|r| &r.d_sxs - &r.d_sx == virtual_dim_gap));

    let chain_length = newton::chain_length(top_sxs, &b_x)?;
    let maximal_chains = newton::maximal_chains(top_sxs, &b_x, &limits)?;
    let mixed_codimension_certificate = classes.iter().any(|r| r.in_noneq);

    Ok(AnalysisReport {
        triple: c.clone(),
        mu: mu.clone(),
        superregularity_bound: m,
        length_drop: x.length as i64 - sxs.length as i64,
        x,
        sx,
        sxs,
        b_x,
        generic_branch,
        virtual_dim_gap,
        classes,
        chain_length,
        maximal_chains,
        mixed_codimension_certificate,
    })
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        r.to_string()
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "triple     {}", self.triple)?;
        writeln!(f, "mu         {}  (superregular above {})", self.mu, self.superregularity_bound)?;
        for (name, e) in [("x", &self.x), ("sx", &self.sx), ("sxs", &self.sxs)] {
            writeln!(
                f,
                "{name:<10} {}  length {}  eta {} (length {})  nu {}  cordial {}",
                e.element.normal_form(),
                e.length,
                e.eta,
                e.eta_length,
                e.generic_class,
                e.cordial
            )?;
        }
        writeln!(f, "b_x        {}  from {:?}", self.b_x, self.generic_branch)?;
        writeln!(f, "length drop {}  virtual dimension gap {}", self.length_drop, fmt_rational(&self.virtual_dim_gap))?;
        writeln!(f, "classes:")?;
        for r in &self.classes {
            let codims: Vec<String> = r.component_codims.iter().map(fmt_rational).collect();
            let dim = r.dim_xx.as_ref().map_or("-".to_string(), fmt_rational);
            writeln!(
                f,
                "  {}  in B(G)_x {}  noneq {}  dim {}  codims {{{}}}  d_sx {}  d_sxs {}",
                r.class,
                r.in_bx,
                r.in_noneq,
                dim,
                codims.join(", "),
                fmt_rational(&r.d_sx),
                fmt_rational(&r.d_sxs)
            )?;
        }
        writeln!(f, "maximal chains ({}, length {}):", self.maximal_chains.len(), self.chain_length)?;
        for chain in &self.maximal_chains {
            writeln!(f, "  {chain}")?;
        }
        let verdict = if self.mixed_codimension_certificate { "yes" } else { "no" };
        writeln!(f, "mixed codimension certificate: {verdict}")
    }
}
