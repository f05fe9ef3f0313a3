//! Finite Weyl groups of type A in the permutation model.
//!
//! An element of `W_0 = S_n` is stored in one-line notation and acts on
//! coweights `Z^n` by permuting coordinates. Words are lists of 1-based
//! simple-reflection indices multiplied left to right, so `[4, 2, 3, 1]`
//! is the product `s4 * s2 * s3 * s1`.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// An integral coweight, i.e. a vector in `Z^n` for `GL_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coweight(pub Vec<i64>);

impl Coweight {
    pub fn zero(n: usize) -> Self {
        Coweight(vec![0; n])
    }

    /// The coroot `e_i - e_j` (0-based coordinates).
    pub fn coroot(n: usize, i: usize, j: usize) -> Self {
        let mut c = vec![0; n];
        c[i] += 1;
        c[j] -= 1;
        Coweight(c)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn dot(&self, other: &[i64]) -> i64 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    /// `<2 rho, self>` for type `A_{n-1}`.
    pub fn pair_two_rho(&self) -> i64 {
        self.dot(&two_rho(self.len()))
    }

    /// Non-increasing coordinates.
    pub fn is_dominant(&self) -> bool {
        self.0.windows(2).all(|p| p[0] >= p[1])
    }

    /// Coordinates sorted non-increasingly.
    pub fn dominant(&self) -> Coweight {
        let mut c = self.0.clone();
        c.sort_unstable_by(|a, b| b.cmp(a));
        Coweight(c)
    }

    /// Pairings `<alpha_i, self>` with the simple roots.
    pub fn simple_pairings(&self) -> Vec<i64> {
        self.0.windows(2).map(|p| p[0] - p[1]).collect()
    }
}

impl fmt::Display for Coweight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Coweight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        if s.is_empty() {
            return Ok(Coweight(Vec::new()));
        }
        s.split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|e| Error::Parse(format!("coweight entry {t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()
            .map(Coweight)
    }
}

impl Serialize for Coweight {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl Add for &Coweight {
    type Output = Coweight;
    fn add(self, rhs: &Coweight) -> Coweight {
        assert_eq!(self.len(), rhs.len(), "coweight length mismatch");
        Coweight(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Coweight {
    type Output = Coweight;
    fn sub(self, rhs: &Coweight) -> Coweight {
        assert_eq!(self.len(), rhs.len(), "coweight length mismatch");
        Coweight(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// `2 rho = (n-1, n-3, ..., -(n-1))` for `GL_n`.
pub fn two_rho(n: usize) -> Vec<i64> {
    (0..n).map(|k| n as i64 - 1 - 2 * k as i64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CartanType {
    A,
}

impl FromStr for CartanType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(CartanType::A),
            other => Err(Error::UnsupportedType(other.to_string())),
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CartanType::A => f.write_str("A"),
        }
    }
}

/// A positive root `e_i - e_j` with `i < j` (0-based coordinates).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PositiveRoot {
    pub i: usize,
    pub j: usize,
}

impl PositiveRoot {
    pub fn height(&self) -> usize {
        self.j - self.i
    }

    /// `<2 rho, alpha^vee>`; type A is simply laced so this is twice the height.
    pub fn two_rho_pairing(&self) -> i64 {
        2 * self.height() as i64
    }

    pub fn coroot(&self, n: usize) -> Coweight {
        Coweight::coroot(n, self.i, self.j)
    }
}

/// Root datum of a finite Weyl group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CartanData {
    cartan_type: CartanType,
    rank: usize,
}

impl CartanData {
    pub fn new(cartan_type: CartanType, rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Parse("rank must be positive".into()));
        }
        if rank > 254 {
            return Err(Error::Parse(format!("rank {rank} too large")));
        }
        Ok(CartanData { cartan_type, rank })
    }

    pub fn type_a(rank: usize) -> Result<Self> {
        Self::new(CartanType::A, rank)
    }

    pub fn cartan_type(&self) -> CartanType {
        self.cartan_type
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Dimension of the coweight lattice, `n = rank + 1` in type A.
    pub fn dim(&self) -> usize {
        self.rank + 1
    }

    pub fn simple_roots(&self) -> Vec<Coweight> {
        (0..self.rank).map(|i| Coweight::coroot(self.dim(), i, i + 1)).collect()
    }

    /// Type A is self-dual: coroots and roots share coordinates.
    pub fn simple_coroots(&self) -> Vec<Coweight> {
        self.simple_roots()
    }

    pub fn two_rho(&self) -> Vec<i64> {
        two_rho(self.dim())
    }

    pub fn positive_roots(&self) -> Vec<PositiveRoot> {
        let n = self.dim();
        let mut roots = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                roots.push(PositiveRoot { i, j });
            }
        }
        roots
    }

    /// Cartan matrix entry for 1-based simple indices.
    pub fn cartan_entry(&self, i: usize, j: usize) -> i64 {
        if i == j {
            2
        } else if i.abs_diff(j) == 1 {
            -1
        } else {
            0
        }
    }

    pub fn simple_indices(&self) -> impl Iterator<Item = usize> {
        1..=self.rank
    }

    pub fn identity(&self) -> WeylElement {
        WeylElement::identity(self.rank)
    }

    pub fn simple_reflection(&self, i: usize) -> Result<WeylElement> {
        WeylElement::simple(self.rank, i)
    }

    pub fn longest_element(&self) -> WeylElement {
        let n = self.dim();
        WeylElement { perm: (0..n as u8).rev().collect() }
    }

    /// Every element of `W_0`, ordered by one-line notation.
    pub fn elements(&self) -> Vec<WeylElement> {
        let n = self.dim();
        let mut out = Vec::new();
        let mut perm: Vec<u8> = (0..n as u8).collect();
        loop {
            out.push(WeylElement { perm: perm.clone() });
            if !next_permutation(&mut perm) {
                break;
            }
        }
        out
    }

    pub fn order(&self) -> usize {
        (1..=self.dim()).product()
    }
}

fn next_permutation(p: &mut [u8]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// An element of the finite Weyl group `S_n`, in one-line notation.
///
/// `perm[k]` is the image of coordinate `k` (0-based); composition is
/// `(u * v)[k] = u[v[k]]`, which makes `s_i -> (i, i+1)` a homomorphism
/// and sends the reflection in `e_i - e_j` to the transposition `(i j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElement {
    perm: Vec<u8>,
}

impl WeylElement {
    pub fn identity(rank: usize) -> Self {
        WeylElement { perm: (0..=rank as u8).collect() }
    }

    pub fn simple(rank: usize, i: usize) -> Result<Self> {
        if i == 0 || i > rank {
            return Err(Error::BadSimpleIndex { index: i, rank });
        }
        let mut e = Self::identity(rank);
        e.perm.swap(i - 1, i);
        Ok(e)
    }

    /// Product of simple reflections, left to right.
    pub fn from_word(rank: usize, word: &[usize]) -> Result<Self> {
        let mut e = Self::identity(rank);
        for &i in word {
            e = e.right_mul_simple_checked(i)?;
        }
        Ok(e)
    }

    /// Parses a whitespace-separated word such as `"4 2 3 1"` (also accepts
    /// `"s4 s2"`). The empty string is the identity.
    pub fn parse_word(rank: usize, text: &str) -> Result<Self> {
        let word = parse_word_indices(text)?;
        Self::from_word(rank, &word)
    }

    /// From 1-based one-line notation.
    pub fn from_one_line(one_line: &[usize]) -> Result<Self> {
        let n = one_line.len();
        if n < 2 {
            return Err(Error::BadPermutation(format!("{one_line:?}")));
        }
        let mut seen = vec![false; n];
        for &x in one_line {
            if x == 0 || x > n || seen[x - 1] {
                return Err(Error::BadPermutation(format!("{one_line:?}")));
            }
            seen[x - 1] = true;
        }
        Ok(WeylElement { perm: one_line.iter().map(|&x| (x - 1) as u8).collect() })
    }

    pub fn one_line(&self) -> Vec<usize> {
        self.perm.iter().map(|&x| x as usize + 1).collect()
    }

    pub(crate) fn image(&self, k: usize) -> usize {
        self.perm[k] as usize
    }

    pub fn rank(&self) -> usize {
        self.perm.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(k, &x)| k == x as usize)
    }

    pub fn compose(&self, other: &WeylElement) -> Result<WeylElement> {
        if self.perm.len() != other.perm.len() {
            return Err(Error::RankMismatch { expected: self.rank(), found: other.rank() });
        }
        Ok(WeylElement { perm: other.perm.iter().map(|&k| self.perm[k as usize]).collect() })
    }

    pub fn inverse(&self) -> WeylElement {
        let mut inv = vec![0u8; self.perm.len()];
        for (k, &x) in self.perm.iter().enumerate() {
            inv[x as usize] = k as u8;
        }
        WeylElement { perm: inv }
    }

    /// Coxeter length, computed as the number of inversions.
    pub fn length(&self) -> usize {
        let p = &self.perm;
        let mut count = 0;
        for a in 0..p.len() {
            for b in a + 1..p.len() {
                if p[a] > p[b] {
                    count += 1;
                }
            }
        }
        count
    }

    /// `s_i * self`: swaps the values `i-1` and `i`.
    pub fn left_mul_simple(&self, i: usize) -> WeylElement {
        let mut perm = self.perm.clone();
        let (a, b) = ((i - 1) as u8, i as u8);
        for x in perm.iter_mut() {
            if *x == a {
                *x = b;
            } else if *x == b {
                *x = a;
            }
        }
        WeylElement { perm }
    }

    /// `self * s_i`: swaps positions `i-1` and `i`.
    pub fn right_mul_simple(&self, i: usize) -> WeylElement {
        let mut perm = self.perm.clone();
        perm.swap(i - 1, i);
        WeylElement { perm }
    }

    fn right_mul_simple_checked(&self, i: usize) -> Result<WeylElement> {
        if i == 0 || i > self.rank() {
            return Err(Error::BadSimpleIndex { index: i, rank: self.rank() });
        }
        Ok(self.right_mul_simple(i))
    }

    /// `self * s_alpha` for a positive root.
    pub fn right_mul_reflection(&self, root: PositiveRoot) -> WeylElement {
        let mut perm = self.perm.clone();
        perm.swap(root.i, root.j);
        WeylElement { perm }
    }

    /// `l(s_i * self) < l(self)`.
    pub fn has_left_descent(&self, i: usize) -> bool {
        let pos = |v: u8| self.perm.iter().position(|&x| x == v).unwrap();
        pos(i as u8) < pos((i - 1) as u8)
    }

    /// `l(self * s_i) < l(self)`.
    pub fn has_right_descent(&self, i: usize) -> bool {
        self.perm[i - 1] > self.perm[i]
    }

    /// The lexicographically smallest reduced word, built by repeatedly
    /// stripping the smallest left descent.
    pub fn reduced_word(&self) -> Vec<usize> {
        let mut word = Vec::with_capacity(self.length());
        let mut cur = self.clone();
        while let Some(i) = (1..=cur.rank()).find(|&i| cur.has_left_descent(i)) {
            word.push(i);
            cur = cur.left_mul_simple(i);
        }
        word
    }

    /// Simple reflections occurring in any (equivalently every) reduced word.
    pub fn support(&self) -> BTreeSet<usize> {
        self.reduced_word().into_iter().collect()
    }

    pub fn has_full_support(&self) -> bool {
        self.support().len() == self.rank()
    }

    /// Left action on coweights: `(u lambda)_{u(k)} = lambda_k`.
    pub fn apply(&self, lambda: &Coweight) -> Result<Coweight> {
        if lambda.len() != self.perm.len() {
            return Err(Error::RankMismatch { expected: self.rank(), found: lambda.len().saturating_sub(1) });
        }
        let mut out = vec![0; lambda.len()];
        for (k, &x) in self.perm.iter().enumerate() {
            out[x as usize] = lambda.0[k];
        }
        Ok(Coweight(out))
    }

    pub fn word_string(&self) -> String {
        format_word(&self.reduced_word())
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word_string())
    }
}

impl Serialize for WeylElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.word_string())
    }
}

/// Panics on rank mismatch; use [`WeylElement::compose`] for checked composition.
impl Mul for &WeylElement {
    type Output = WeylElement;
    fn mul(self, rhs: &WeylElement) -> WeylElement {
        self.compose(rhs).expect("rank mismatch in Weyl group product")
    }
}

pub fn format_word(word: &[usize]) -> String {
    let parts: Vec<String> = word.iter().map(|i| i.to_string()).collect();
    parts.join(" ")
}

/// Accepts `"4 2 3 1"`, `"s4 s2 s3 s1"`, `"s4s2s3s1"` or `"4,2,3,1"`.
pub fn parse_word_indices(text: &str) -> Result<Vec<usize>> {
    text.split(|c: char| c.is_whitespace() || matches!(c, 's' | 'S' | ','))
        .filter(|tok| !tok.is_empty())
        .map(|tok| tok.parse::<usize>().map_err(|e| Error::Parse(format!("word letter {tok:?} in {text:?}: {e}"))))
        .collect()
}

/// A Dynkin diagram automorphism, given by its action on simple indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiagramAutomorphism {
    image: Vec<usize>,
}

impl DiagramAutomorphism {
    pub fn identity(rank: usize) -> Self {
        DiagramAutomorphism { image: (1..=rank).collect() }
    }

    /// The nontrivial automorphism `i -> n - i` of type `A_{n-1}`.
    pub fn flip(rank: usize) -> Self {
        DiagramAutomorphism { image: (1..=rank).rev().collect() }
    }

    /// `image[i-1] = sigma(i)`, validated against the Cartan matrix.
    pub fn new(cartan: &CartanData, image: Vec<usize>) -> Result<Self> {
        let r = cartan.rank();
        if image.len() != r {
            return Err(Error::RankMismatch { expected: r, found: image.len() });
        }
        let mut seen = vec![false; r];
        for &x in &image {
            if x == 0 || x > r || seen[x - 1] {
                return Err(Error::BadAutomorphism(format!("{image:?} is not a permutation of 1..={r}")));
            }
            seen[x - 1] = true;
        }
        for i in 1..=r {
            for j in 1..=r {
                if cartan.cartan_entry(image[i - 1], image[j - 1]) != cartan.cartan_entry(i, j) {
                    return Err(Error::BadAutomorphism(format!("{image:?} breaks a({i},{j})")));
                }
            }
        }
        Ok(DiagramAutomorphism { image })
    }

    pub fn parse(cartan: &CartanData, text: &str) -> Result<Self> {
        let image = parse_word_indices(text)?;
        if image.is_empty() {
            return Ok(Self::identity(cartan.rank()));
        }
        Self::new(cartan, image)
    }

    pub fn rank(&self) -> usize {
        self.image.len()
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(k, &x)| k + 1 == x)
    }

    pub fn image_of(&self, i: usize) -> usize {
        self.image[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.image.len()];
        for (k, &x) in self.image.iter().enumerate() {
            inv[x - 1] = k + 1;
        }
        DiagramAutomorphism { image: inv }
    }

    /// `sigma(u)`, obtained by relabelling a reduced word of `u`.
    pub fn apply(&self, u: &WeylElement) -> WeylElement {
        if self.is_identity() {
            return u.clone();
        }
        let word: Vec<usize> = u.reduced_word().iter().map(|&i| self.image_of(i)).collect();
        WeylElement::from_word(u.rank(), &word).expect("automorphism preserves rank")
    }

    pub fn apply_set(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        set.iter().map(|&i| self.image_of(i)).collect()
    }
}

impl fmt::Display for DiagramAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_word(&self.image))
    }
}

/// `supp_sigma(u)`: the union of all `sigma`-iterates of `supp(u)`.
pub fn sigma_support(u: &WeylElement, sigma: &DiagramAutomorphism) -> BTreeSet<usize> {
    let mut acc = u.support();
    let mut frontier = acc.clone();
    loop {
        let next = sigma.apply_set(&frontier);
        let fresh: BTreeSet<usize> = next.difference(&acc).copied().collect();
        if fresh.is_empty() {
            return acc;
        }
        acc.extend(fresh.iter().copied());
        frontier = next;
    }
}
