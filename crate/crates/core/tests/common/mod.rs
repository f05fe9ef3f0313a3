//! Brute-force reference implementations shared by the integration tests.
//!
//! Nothing here calls into the library's algorithms except to read plain
//! data (one-line notation, coordinates); every quantity is recomputed from
//! definitions.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::Zero;

pub type Q = Ratio<i64>;

/// One-line permutation on `0..n` with `(a b)[k] = a[b[k]]`.
pub type Perm = Vec<usize>;

pub fn compose(a: &Perm, b: &Perm) -> Perm {
    b.iter().map(|&k| a[k]).collect()
}

pub fn inversions(a: &Perm) -> usize {
    let n = a.len();
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| a[i] > a[j]).count()
}

pub fn all_perms(n: usize) -> Vec<Perm> {
    fn rec(n: usize, cur: &mut Perm, used: &mut Vec<bool>, out: &mut Vec<Perm>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for k in 0..n {
            if !used[k] {
                used[k] = true;
                cur.push(k);
                rec(n, cur, used, out);
                cur.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub fn transposition(n: usize, i: usize, j: usize) -> Perm {
    let mut p: Perm = (0..n).collect();
    p.swap(i, j);
    p
}

/// Quantum Bruhat graph rebuilt from the definition: `u -> u (i j)` is an edge
/// when the length goes up by one, or drops by `2 (j - i) - 1` (weight `e_i - e_j`).
pub struct OracleQbg {
    pub n: usize,
    pub vertices: Vec<Perm>,
    pub index: HashMap<Perm, usize>,
    pub edges: Vec<Vec<(usize, Vec<i64>)>>,
}

impl OracleQbg {
    pub fn new(n: usize) -> Self {
        let vertices = all_perms(n);
        let index: HashMap<Perm, usize> = vertices.iter().cloned().enumerate().map(|(k, p)| (p, k)).collect();
        let mut edges = vec![Vec::new(); vertices.len()];
        for (a, u) in vertices.iter().enumerate() {
            for i in 0..n {
                for j in i + 1..n {
                    let target = compose(u, &transposition(n, i, j));
                    let (lu, lt) = (inversions(u) as i64, inversions(&target) as i64);
                    let height = (j - i) as i64;
                    if lt == lu + 1 {
                        edges[a].push((index[&target], vec![0; n]));
                    } else if lt == lu - 2 * height + 1 {
                        let mut wt = vec![0; n];
                        wt[i] = 1;
                        wt[j] = -1;
                        edges[a].push((index[&target], wt));
                    }
                }
            }
        }
        OracleQbg { n, vertices, index, edges }
    }

    /// Distance and the set of weights of all shortest paths from `src` to every vertex.
    pub fn shortest_path_weights(&self, src: usize) -> (Vec<usize>, Vec<BTreeSet<Vec<i64>>>) {
        let m = self.vertices.len();
        let mut dist = vec![usize::MAX; m];
        let mut order = Vec::new();
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(a) = queue.pop_front() {
            order.push(a);
            for (b, _) in &self.edges[a] {
                if dist[*b] == usize::MAX {
                    dist[*b] = dist[a] + 1;
                    queue.push_back(*b);
                }
            }
        }
        let mut weights = vec![BTreeSet::new(); m];
        weights[src].insert(vec![0; self.n]);
        for &a in &order {
            let here: Vec<Vec<i64>> = weights[a].iter().cloned().collect();
            for (b, wt) in &self.edges[a] {
                if dist[*b] == dist[a] + 1 {
                    for w in &here {
                        let sum: Vec<i64> = w.iter().zip(wt).map(|(x, y)| x + y).collect();
                        weights[*b].insert(sum);
                    }
                }
            }
        }
        (dist, weights)
    }
}

/// Affine element `t^lambda u` acting by `a -> u(a) + lambda`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Affine {
    pub lambda: Vec<i64>,
    pub u: Perm,
}

impl Affine {
    pub fn identity(n: usize) -> Self {
        Affine { lambda: vec![0; n], u: (0..n).collect() }
    }

    /// `(t^a u)(t^b v) = t^(a + u b) (u v)`, with `(u b)_{u(k)} = b_k`.
    pub fn mul(&self, other: &Affine) -> Affine {
        let n = self.lambda.len();
        let mut moved = vec![0; n];
        for k in 0..n {
            moved[self.u[k]] = other.lambda[k];
        }
        Affine { lambda: self.lambda.iter().zip(&moved).map(|(a, b)| a + b).collect(), u: compose(&self.u, &other.u) }
    }

    /// Simple affine reflections of `GL_n`: `s_i = (i-1 i)` and `s_0 = t^(e_1 - e_n) (1 n)`.
    pub fn simple(n: usize, i: usize) -> Affine {
        if i == 0 {
            let mut lambda = vec![0; n];
            lambda[0] = 1;
            lambda[n - 1] = -1;
            Affine { lambda, u: transposition(n, 0, n - 1) }
        } else {
            Affine { lambda: vec![0; n], u: transposition(n, i - 1, i) }
        }
    }
}

/// Breadth-first search over words in `s_0, ..., s_{n-1}` up to `max_len`.
pub fn affine_word_lengths(n: usize, max_len: usize) -> HashMap<Affine, usize> {
    let gens: Vec<Affine> = (0..n).map(|i| Affine::simple(n, i)).collect();
    let mut seen = HashMap::new();
    let start = Affine::identity(n);
    seen.insert(start.clone(), 0);
    let mut frontier = vec![start];
    for depth in 1..=max_len {
        let mut next = Vec::new();
        for x in &frontier {
            for g in &gens {
                let y = x.mul(g);
                if !seen.contains_key(&y) {
                    seen.insert(y.clone(), depth);
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    seen
}

/// A Newton point as exact slopes, validated from scratch.
pub fn is_newton_point(slopes: &[Q]) -> bool {
    if slopes.windows(2).any(|w| w[0] < w[1]) {
        return false;
    }
    let mut acc = Q::zero();
    for (k, s) in slopes.iter().enumerate() {
        acc += *s;
        let breaks = k + 1 == slopes.len() || slopes[k + 1] != *s;
        if breaks && !acc.is_integer() {
            return false;
        }
    }
    true
}

pub fn partial_sums(slopes: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero()];
    let mut acc = Q::zero();
    for s in slopes {
        acc += *s;
        out.push(acc);
    }
    out
}

pub fn leq(a: &[Q], b: &[Q]) -> bool {
    let (pa, pb) = (partial_sums(a), partial_sums(b));
    pa.last() == pb.last() && pa.iter().zip(&pb).all(|(x, y)| x <= y)
}

/// `<rho, b - a>` with `rho = ((n-1)/2, ..., -(n-1)/2)`.
pub fn rho_gap(a: &[Q], b: &[Q]) -> Q {
    let n = a.len() as i64;
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(k, (x, y))| (*y - *x) * Q::new(n - 1 - 2 * k as i64, 2))
        .fold(Q::zero(), |s, t| s + t)
}

/// Every Newton point of `GL_n` with Kottwitz point `kappa` and slopes in `[lo, hi]`.
pub fn newton_points_in_box(n: usize, kappa: i64, lo: i64, hi: i64) -> Vec<Vec<Q>> {
    let mut grid: BTreeSet<Q> = BTreeSet::new();
    for q in 1..=n as i64 {
        for p in lo * q..=hi * q {
            grid.insert(Q::new(p, q));
        }
    }
    let grid: Vec<Q> = grid.into_iter().rev().collect();
    let mut out = Vec::new();
    fn rec(grid: &[Q], n: usize, from: usize, cur: &mut Vec<Q>, kappa: i64, out: &mut Vec<Vec<Q>>) {
        if cur.len() == n {
            let total: Q = cur.iter().fold(Q::zero(), |a, b| a + *b);
            if total == Q::from_integer(kappa) && is_newton_point(cur) {
                out.push(cur.clone());
            }
            return;
        }
        for k in from..grid.len() {
            cur.push(grid[k]);
            rec(grid, n, k, cur, kappa, out);
            cur.pop();
        }
    }
    rec(&grid, n, 0, &mut Vec::new(), kappa, &mut out);
    out
}

/// Lengths of all maximal chains from `a` to `b` among `universe`.
pub fn chain_lengths_brute(universe: &[Vec<Q>], a: &[Q], b: &[Q]) -> BTreeSet<usize> {
    let members: Vec<&Vec<Q>> = universe.iter().filter(|c| leq(a, c) && leq(c, b)).collect();
    let lt = |x: &Vec<Q>, y: &Vec<Q>| x != y && leq(x, y);
    let m = members.len();
    let mut up: Vec<Vec<usize>> = vec![Vec::new(); m];
    for i in 0..m {
        for j in 0..m {
            if lt(members[i], members[j]) && !(0..m).any(|k| lt(members[i], members[k]) && lt(members[k], members[j])) {
                up[i].push(j);
            }
        }
    }
    let start = members.iter().position(|c| c.as_slice() == a).expect("bottom present");
    let end = members.iter().position(|c| c.as_slice() == b).expect("top present");
    let mut memo: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    fn lengths(
        k: usize,
        end: usize,
        up: &[Vec<usize>],
        memo: &mut BTreeMap<usize, BTreeSet<usize>>,
    ) -> BTreeSet<usize> {
        if k == end {
            return [0].into();
        }
        if let Some(v) = memo.get(&k) {
            return v.clone();
        }
        let mut out = BTreeSet::new();
        for &j in &up[k] {
            for l in lengths(j, end, up, memo) {
                out.insert(l + 1);
            }
        }
        memo.insert(k, out.clone());
        out
    }
    lengths(start, end, &up, &mut memo)
}

pub fn to_big(slopes: &[Q]) -> Vec<Ratio<BigInt>> {
    slopes.iter().map(|s| Ratio::new(BigInt::from(*s.numer()), BigInt::from(*s.denom()))).collect()
}

/// `n` minus the number of simple summands, from slopes alone.
pub fn defect_brute(slopes: &[Q]) -> usize {
    let mut runs: BTreeMap<Q, usize> = BTreeMap::new();
    for s in slopes {
        *runs.entry(*s).or_insert(0) += 1;
    }
    slopes.len() - runs.iter().map(|(s, m)| m / s.denom().unsigned_abs() as usize).sum::<usize>()
}

/// `<2 rho, nu>` for integer vectors.
pub fn pair_two_rho(v: &[i64]) -> i64 {
    let n = v.len() as i64;
    v.iter().enumerate().map(|(k, x)| x * (n - 1 - 2 * k as i64)).sum()
}

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}
