//! The extended affine Weyl group `W~ = Z^n x| S_n` of `GL_n`.
//!
//! `t^lambda u` acts on `R^n` by `a -> u(a) + lambda`. The base alcove is
//! the one adjacent to the origin in the dominant chamber, i.e. the set
//! `{0 < <a, alpha> < 1}` for positive roots `alpha`. With this choice
//! `l(t^mu w) = <2 rho, mu> - l(w)` for dominant superregular `mu`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::weyl::{Coweight, DiagramAutomorphism, PositiveRoot, WeylElement};

/// The decomposition `x = v t^mu w` with `t^mu w` minimal in `W_0 (t^mu w)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct NormalForm {
    pub v: WeylElement,
    pub mu: Coweight,
    pub w: WeylElement,
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v:{} mu:{} w:{}", self.v, self.mu, self.w)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `x = t^lambda u`, with its normal form and length cached.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineElement {
    lambda: Coweight,
    u: WeylElement,
    normal: NormalForm,
    length: u64,
}

impl AffineElement {
    pub fn from_raw(lambda: Coweight, u: WeylElement) -> Result<Self> {
        if lambda.len() != u.dim() {
            return Err(Error::RankMismatch { expected: u.rank(), found: lambda.len().saturating_sub(1) });
        }
        let length = hyperplane_length(&lambda, &u);
        let normal = compute_normal_form(&lambda, &u, length);
        Ok(AffineElement { lambda, u, normal, length })
    }

    /// Assembles `v t^mu w`; fails unless `t^mu w` is a minimal coset representative.
    pub fn from_normal_form(v: WeylElement, mu: Coweight, w: WeylElement) -> Result<Self> {
        if v.dim() != w.dim() {
            return Err(Error::RankMismatch { expected: v.rank(), found: w.rank() });
        }
        let y = AffineElement::from_raw(mu.clone(), w.clone())?;
        if !y.normal.v.is_identity() {
            return Err(Error::InvalidNormalForm { v: v.to_string(), mu: mu.to_string(), w: w.to_string() });
        }
        let lambda = v.apply(&mu)?;
        let u = v.compose(&w)?;
        AffineElement::from_raw(lambda, u)
    }

    pub fn translation(mu: Coweight) -> Self {
        let rank = mu.len() - 1;
        AffineElement::from_raw(mu, WeylElement::identity(rank)).expect("consistent rank")
    }

    pub fn finite(u: WeylElement) -> Self {
        AffineElement::from_raw(Coweight::zero(u.dim()), u).expect("consistent rank")
    }

    pub fn identity(rank: usize) -> Self {
        Self::finite(WeylElement::identity(rank))
    }

    /// Coxeter generators of the affine Weyl group: `s_1..s_r` and
    /// `s_0 = t^{theta^vee} s_theta`.
    pub fn simple_affine(rank: usize, i: usize) -> Result<Self> {
        if i == 0 {
            let n = rank + 1;
            let theta = PositiveRoot { i: 0, j: n - 1 };
            let s_theta = WeylElement::identity(rank).right_mul_reflection(theta);
            AffineElement::from_raw(theta.coroot(n), s_theta)
        } else {
            Ok(Self::finite(WeylElement::simple(rank, i)?))
        }
    }

    pub fn lambda(&self) -> &Coweight {
        &self.lambda
    }

    pub fn finite_part(&self) -> &WeylElement {
        &self.u
    }

    pub fn rank(&self) -> usize {
        self.u.rank()
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    pub fn normal_form(&self) -> &NormalForm {
        &self.normal
    }

    /// `kappa(x)` for `GL_n`: the sum of the translation part.
    pub fn kappa(&self) -> i64 {
        self.lambda.sum()
    }

    pub fn compose(&self, other: &AffineElement) -> Result<AffineElement> {
        let moved = self.u.apply(&other.lambda)?;
        AffineElement::from_raw(&self.lambda + &moved, self.u.compose(&other.u)?)
    }

    pub fn inverse(&self) -> AffineElement {
        let u_inv = self.u.inverse();
        let lambda = u_inv.apply(&self.lambda).expect("consistent rank");
        let neg = Coweight(lambda.0.iter().map(|c| -c).collect());
        AffineElement::from_raw(neg, u_inv).expect("consistent rank")
    }

    pub fn left_mul_simple(&self, i: usize) -> AffineElement {
        let s = WeylElement::simple(self.rank(), i).expect("simple index in range");
        let lambda = s.apply(&self.lambda).expect("consistent rank");
        AffineElement::from_raw(lambda, self.u.left_mul_simple(i)).expect("consistent rank")
    }

    pub fn right_mul_simple(&self, i: usize) -> AffineElement {
        AffineElement::from_raw(self.lambda.clone(), self.u.right_mul_simple(i)).expect("consistent rank")
    }

    /// `s x` or `x s` together with the resulting length change (always +1 or -1).
    pub fn mult_simple(&self, side: Side, i: usize) -> Result<(AffineElement, i64)> {
        if i == 0 || i > self.rank() {
            return Err(Error::BadSimpleIndex { index: i, rank: self.rank() });
        }
        let y = match side {
            Side::Left => self.left_mul_simple(i),
            Side::Right => self.right_mul_simple(i),
        };
        let delta = y.length as i64 - self.length as i64;
        debug_assert!(delta == 1 || delta == -1);
        Ok((y, delta))
    }

    /// `s x sigma(s)`.
    pub fn conjugate_simple(&self, i: usize, sigma: &DiagramAutomorphism) -> Result<AffineElement> {
        let (left, _) = self.mult_simple(Side::Left, i)?;
        let (both, _) = left.mult_simple(Side::Right, sigma.image_of(i))?;
        Ok(both)
    }

    /// `eta(x) = sigma^{-1}(w) v`.
    pub fn eta(&self, sigma: &DiagramAutomorphism) -> WeylElement {
        let w = sigma.inverse().apply(&self.normal.w);
        &w * &self.normal.v
    }

    /// `<alpha_i, mu> > m` for every simple root, `mu` from the normal form.
    pub fn is_superregular(&self, m: u64) -> Result<bool> {
        let mu = &self.normal.mu;
        if !mu.is_dominant() {
            return Err(Error::NonDominantTranslation(mu.to_string()));
        }
        Ok(mu.simple_pairings().iter().all(|&p| p > m as i64))
    }

    pub fn raw_string(&self) -> String {
        format!("lambda:{} u:{}", self.lambda, self.u)
    }
}

impl fmt::Display for AffineElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.normal.fmt(f)
    }
}

/// Accepts `"v:<word> mu:<ints> w:<word>"` or `"lambda:<ints> u:<word>"`.
impl FromStr for AffineElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut fields: Vec<(String, String)> = Vec::new();
        for tok in s.split_whitespace() {
            if let Some((key, value)) = tok.split_once(':') {
                fields.push((key.to_string(), value.to_string()));
            } else if let Some(last) = fields.last_mut() {
                if !last.1.is_empty() {
                    last.1.push(' ');
                }
                last.1.push_str(tok);
            } else {
                return Err(Error::Parse(format!("unexpected token {tok:?}")));
            }
        }
        let get = |k: &str| fields.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());
        if let Some(mu) = get("mu") {
            let mu: Coweight = mu.parse()?;
            if mu.len() < 2 {
                return Err(Error::Parse("mu needs at least two entries".into()));
            }
            let rank = mu.len() - 1;
            let v = WeylElement::parse_word(rank, get("v").unwrap_or(""))?;
            let w = WeylElement::parse_word(rank, get("w").unwrap_or(""))?;
            AffineElement::from_normal_form(v, mu, w)
        } else if let Some(lambda) = get("lambda") {
            let lambda: Coweight = lambda.parse()?;
            if lambda.len() < 2 {
                return Err(Error::Parse("lambda needs at least two entries".into()));
            }
            let u = WeylElement::parse_word(lambda.len() - 1, get("u").unwrap_or(""))?;
            AffineElement::from_raw(lambda, u)
        } else {
            Err(Error::Parse(format!("expected mu: or lambda: in {s:?}")))
        }
    }
}

#[derive(Serialize)]
struct AffineView<'a> {
    v: &'a WeylElement,
    mu: &'a Coweight,
    w: &'a WeylElement,
    lambda: &'a Coweight,
    u: &'a WeylElement,
    length: u64,
}

impl Serialize for AffineElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        AffineView {
            v: &self.normal.v,
            mu: &self.normal.mu,
            w: &self.normal.w,
            lambda: &self.lambda,
            u: &self.u,
            length: self.length,
        }
        .serialize(serializer)
    }
}

/// Number of affine root hyperplanes separating the base alcove from `x` applied to it.
///
/// The base point is the barycenter `rho / n`; scaled by `2n` it becomes the
/// integer vector `2 rho`, and `x(p)` scales to `u(2 rho) + 2n lambda`. Since
/// `<p, alpha>` lies in `(0, 1)`, the hyperplanes `H_{alpha,k}` crossed are
/// counted by `|floor(<x(p), alpha>)|`.
fn hyperplane_length(lambda: &Coweight, u: &WeylElement) -> u64 {
    let n = lambda.len();
    let scale = 2 * n as i64;
    let moved = u.apply(&Coweight(crate::weyl::two_rho(n))).expect("consistent rank");
    let mut count = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            let b = moved.0[i] - moved.0[j] + scale * (lambda.0[i] - lambda.0[j]);
            count += b.div_euclid(scale).unsigned_abs();
        }
    }
    count
}

fn compute_normal_form(lambda: &Coweight, u: &WeylElement, length: u64) -> NormalForm {
    let rank = u.rank();
    let mut y_lambda = lambda.clone();
    let mut y_u = u.clone();
    let mut y_len = length;
    let mut v = WeylElement::identity(rank);
    'descend: loop {
        for i in 1..=rank {
            let s = WeylElement::simple(rank, i).expect("index in range");
            let cand_lambda = s.apply(&y_lambda).expect("consistent rank");
            let cand_u = y_u.left_mul_simple(i);
            let cand_len = hyperplane_length(&cand_lambda, &cand_u);
            if cand_len < y_len {
                y_lambda = cand_lambda;
                y_u = cand_u;
                y_len = cand_len;
                v = v.right_mul_simple(i);
                continue 'descend;
            }
        }
        break;
    }
    NormalForm { v, mu: y_lambda, w: y_u }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(word: &[usize]) -> WeylElement {
        WeylElement::from_word(4, word).unwrap()
    }

    fn mu() -> Coweight {
        "150,75,0,-75,-150".parse().unwrap()
    }

    fn example_x() -> AffineElement {
        AffineElement::from_normal_form(el(&[4, 2, 3, 1]), mu(), el(&[1, 2, 3, 4, 2, 3, 1])).unwrap()
    }

    #[test]
    fn identity_and_translations() {
        assert_eq!(AffineElement::identity(4).length(), 0);
        let t = AffineElement::translation(mu());
        assert_eq!(t.length(), mu().pair_two_rho() as u64);
        assert_eq!(t.length(), 1500);
        let nf = t.normal_form();
        assert!(nf.v.is_identity() && nf.w.is_identity());
    }

    #[test]
    fn example_length_and_normal_form() {
        let x = example_x();
        assert_eq!(x.length(), 1497);
        let nf = x.normal_form();
        assert_eq!(nf.v, el(&[4, 2, 3, 1]));
        assert_eq!(nf.mu, mu());
        assert_eq!(nf.w, el(&[1, 2, 3, 4, 2, 3, 1]));
        // Raw round trip.
        let raw = AffineElement::from_raw(x.lambda().clone(), x.finite_part().clone()).unwrap();
        assert_eq!(raw, x);
    }

    #[test]
    fn eta_and_reduction_step() {
        let id = DiagramAutomorphism::identity(4);
        let x = example_x();
        let v = el(&[4, 2, 3, 1]);
        let w = el(&[1, 2, 3, 4, 2, 3, 1]);
        assert_eq!(x.eta(&id), &w * &v);
        assert_eq!(x.eta(&id).length(), 7);
        let sxs = x.conjugate_simple(2, &id).unwrap();
        assert_eq!(sxs.length(), x.length() - 2);
        assert_eq!(sxs.eta(&id), x.eta(&id));
        let (sx, delta) = x.mult_simple(Side::Left, 2).unwrap();
        assert_eq!(delta, -1);
        assert_eq!(sx.length(), 1496);
        assert!(AffineElement::translation(mu()).eta(&id).is_identity());
    }

    #[test]
    fn simple_multiplication_from_identity() {
        let e = AffineElement::identity(4);
        for i in 1..=4 {
            for side in [Side::Left, Side::Right] {
                assert_eq!(e.mult_simple(side, i).unwrap().1, 1);
            }
        }
        assert!(e.mult_simple(Side::Left, 5).is_err());
    }

    #[test]
    fn superregularity() {
        let x = example_x();
        assert!(x.is_superregular(74).unwrap());
        assert!(!x.is_superregular(75).unwrap());
        assert!(!AffineElement::identity(4).is_superregular(0).unwrap());
        let t = AffineElement::translation("0,5,0,0,0".parse().unwrap());
        assert_eq!(t.normal_form().mu, "5,0,0,0,0".parse().unwrap());
        assert!(!t.is_superregular(0).unwrap());
    }

    #[test]
    fn invalid_normal_form_rejected() {
        // t^0 w is never minimal unless w = e.
        let r = AffineElement::from_normal_form(el(&[]), Coweight::zero(5), el(&[1]));
        assert!(matches!(r, Err(Error::InvalidNormalForm { .. })));
    }

    #[test]
    fn omega_elements_have_length_zero() {
        // t^{(1,0)} s normalizes the Iwahori subgroup of GL_2.
        let s = WeylElement::simple(1, 1).unwrap();
        let x = AffineElement::from_raw(Coweight(vec![1, 0]), s).unwrap();
        assert_eq!(x.length(), 0);
        assert_eq!(AffineElement::simple_affine(2, 0).unwrap().length(), 1);
    }

    #[test]
    fn text_forms() {
        let x = example_x();
        let parsed: AffineElement = x.to_string().parse().unwrap();
        assert_eq!(parsed, x);
        let raw: AffineElement = x.raw_string().parse().unwrap();
        assert_eq!(raw, x);
        let spelled: AffineElement = "v:4 2 3 1 mu:150,75,0,-75,-150 w:1 2 3 4 2 3 1".parse().unwrap();
        assert_eq!(spelled, x);
        assert!("v:1 w:2".parse::<AffineElement>().is_err());
    }

    #[test]
    fn inverse_and_composition() {
        let x = example_x();
        let e = x.compose(&x.inverse()).unwrap();
        assert_eq!(e, AffineElement::identity(4));
        assert_eq!(x.inverse().length(), x.length());
    }
}
