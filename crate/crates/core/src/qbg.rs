//! The quantum Bruhat graph of a finite Weyl group.
//!
//! Vertices are the elements of `W_0`; for every vertex `u` and positive
//! root `alpha` there is an edge `u -> u s_alpha` when
//! `l(u s_alpha) = l(u) + 1` (Bruhat) or
//! `l(u s_alpha) = l(u) - <2 rho, alpha^vee> + 1` (quantum, weight `alpha^vee`).
//! All-pairs directed distances and shortest-path weights are filled eagerly.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::weyl::{CartanData, Coweight, PositiveRoot, WeylElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Bruhat,
    Quantum,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub target: usize,
    pub root: PositiveRoot,
    pub kind: EdgeKind,
}

#[derive(Clone, Debug)]
pub struct QuantumBruhatGraph {
    cartan: CartanData,
    vertices: Vec<WeylElement>,
    index: HashMap<WeylElement, usize>,
    edges: Vec<Vec<Edge>>,
    dist: Vec<u32>,
    weight: Vec<Coweight>,
}

impl QuantumBruhatGraph {
    pub fn build(cartan: &CartanData) -> Self {
        let vertices = cartan.elements();
        let index: HashMap<WeylElement, usize> = vertices.iter().cloned().enumerate().map(|(k, u)| (u, k)).collect();
        let roots = cartan.positive_roots();
        let lengths: Vec<usize> = vertices.iter().map(WeylElement::length).collect();

        let edges: Vec<Vec<Edge>> = vertices
            .iter()
            .enumerate()
            .map(|(k, u)| {
                roots
                    .iter()
                    .filter_map(|&root| {
                        let target = index[&u.right_mul_reflection(root)];
                        let (from, to) = (lengths[k] as i64, lengths[target] as i64);
                        let kind = if to == from + 1 {
                            EdgeKind::Bruhat
                        } else if to == from - root.two_rho_pairing() + 1 {
                            EdgeKind::Quantum
                        } else {
                            return None;
                        };
                        Some(Edge { target, root, kind })
                    })
                    .collect()
            })
            .collect();

        let mut graph =
            QuantumBruhatGraph { cartan: cartan.clone(), vertices, index, edges, dist: Vec::new(), weight: Vec::new() };
        graph.fill_tables();
        graph
    }

    /// Breadth-first search from every vertex. The weight of the first
    /// shortest path found is propagated; in debug builds every other
    /// shortest-path edge is checked to carry the same accumulated weight,
    /// which by induction proves weight uniformity.
    fn fill_tables(&mut self) {
        let count = self.vertices.len();
        let n = self.cartan.dim();
        let mut dist = vec![u32::MAX; count * count];
        let mut weight = vec![Coweight::zero(n); count * count];
        for src in 0..count {
            let row = src * count;
            dist[row + src] = 0;
            let mut queue = VecDeque::from([src]);
            while let Some(a) = queue.pop_front() {
                let da = dist[row + a];
                for edge in &self.edges[a] {
                    let b = edge.target;
                    let step = self.edge_weight(edge);
                    if dist[row + b] == u32::MAX {
                        dist[row + b] = da + 1;
                        weight[row + b] = &weight[row + a] + &step;
                        queue.push_back(b);
                    } else if dist[row + b] == da + 1 {
                        debug_assert_eq!(
                            weight[row + b],
                            &weight[row + a] + &step,
                            "non-uniform shortest path weights"
                        );
                    }
                }
            }
        }
        debug_assert!(dist.iter().all(|&d| d != u32::MAX), "graph not strongly connected");
        self.dist = dist;
        self.weight = weight;
    }

    pub fn edge_weight(&self, edge: &Edge) -> Coweight {
        match edge.kind {
            EdgeKind::Bruhat => Coweight::zero(self.cartan.dim()),
            EdgeKind::Quantum => edge.root.coroot(self.cartan.dim()),
        }
    }

    pub fn cartan(&self) -> &CartanData {
        &self.cartan
    }

    pub fn vertices(&self) -> &[WeylElement] {
        &self.vertices
    }

    pub fn vertex_index(&self, u: &WeylElement) -> Result<usize> {
        self.index.get(u).copied().ok_or(Error::RankMismatch { expected: self.cartan.rank(), found: u.rank() })
    }

    pub fn out_edges(&self, vertex: usize) -> &[Edge] {
        &self.edges[vertex]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// Directed distance from `u` to `v`.
    pub fn distance(&self, u: &WeylElement, v: &WeylElement) -> Result<usize> {
        let (a, b) = (self.vertex_index(u)?, self.vertex_index(v)?);
        Ok(self.dist[a * self.vertices.len() + b] as usize)
    }

    /// Sum of the quantum coroots along any shortest path from `u` to `v`.
    pub fn min_path_weight(&self, u: &WeylElement, v: &WeylElement) -> Result<Coweight> {
        let (a, b) = (self.vertex_index(u)?, self.vertex_index(v)?);
        Ok(self.weight[a * self.vertices.len() + b].clone())
    }

    /// Graphviz rendering; quantum edges are dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph qbg {\n");
        for (k, u) in self.vertices.iter().enumerate() {
            let label = if u.is_identity() { "e".to_string() } else { u.to_string() };
            let _ = writeln!(out, "  v{k} [label=\"{label}\"];");
        }
        for (k, edges) in self.edges.iter().enumerate() {
            for e in edges {
                let style = match e.kind {
                    EdgeKind::Bruhat => "solid",
                    EdgeKind::Quantum => "dashed",
                };
                let _ = writeln!(
                    out,
                    "  v{k} -> v{} [style={style}, label=\"{},{}\"];",
                    e.target,
                    e.root.i + 1,
                    e.root.j + 1
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(rank: usize) -> QuantumBruhatGraph {
        QuantumBruhatGraph::build(&CartanData::type_a(rank).unwrap())
    }

    #[test]
    fn a1_graph() {
        let g = graph(1);
        let e = WeylElement::identity(1);
        let s = WeylElement::simple(1, 1).unwrap();
        assert_eq!(g.edge_count(), 2);
        let ie = g.vertex_index(&e).unwrap();
        let is = g.vertex_index(&s).unwrap();
        assert_eq!(g.out_edges(ie)[0].kind, EdgeKind::Bruhat);
        assert_eq!(g.out_edges(is)[0].kind, EdgeKind::Quantum);
        assert_eq!(g.distance(&s, &e).unwrap(), 1);
        assert_eq!(g.distance(&e, &e).unwrap(), 0);
        assert_eq!(g.min_path_weight(&s, &e).unwrap(), Coweight(vec![1, -1]));
        assert_eq!(g.min_path_weight(&e, &s).unwrap(), Coweight(vec![0, 0]));
    }

    #[test]
    fn edge_counts_match_pairwise_recount() {
        // Not every root yields an edge: e -> s_theta is neither Bruhat nor quantum.
        for rank in 1..=4 {
            let g = graph(rank);
            let n = rank + 1;
            let mut expected = 0;
            for u in g.vertices() {
                for v in g.vertices() {
                    let d = &u.inverse() * v;
                    let moved: Vec<usize> = (0..n).filter(|&k| d.one_line()[k] != k + 1).collect();
                    if moved.len() != 2 {
                        continue;
                    }
                    let (lu, lv) = (u.length() as i64, v.length() as i64);
                    let height = (moved[1] - moved[0]) as i64;
                    if lv == lu + 1 || lv == lu - 2 * height + 1 {
                        expected += 1;
                    }
                }
            }
            assert_eq!(g.edge_count(), expected, "rank {rank}");
        }
        assert_eq!(graph(2).edge_count(), 15);
        assert_eq!(graph(4).edge_count(), 770);
        let g = graph(2);
        let e = g.vertex_index(&WeylElement::identity(2)).unwrap();
        assert_eq!(g.out_edges(e).len(), 2);
    }

    #[test]
    fn edge_length_bookkeeping() {
        let g = graph(3);
        for (k, u) in g.vertices().iter().enumerate() {
            for e in g.out_edges(k) {
                let target = &g.vertices()[e.target];
                let diff = target.length() as i64 - u.length() as i64;
                assert_eq!(diff, 1 - g.edge_weight(e).pair_two_rho());
            }
        }
    }

    #[test]
    fn example_distances() {
        let g = graph(4);
        let v = WeylElement::from_word(4, &[4, 2, 3, 1]).unwrap();
        let w = WeylElement::from_word(4, &[1, 2, 3, 4, 2, 3, 1]).unwrap();
        let sv = v.left_mul_simple(2);
        assert_eq!(g.distance(&w.inverse(), &sv).unwrap(), (&w * &sv).length());
        assert_eq!(g.distance(&w.inverse(), &sv).unwrap(), 4);
        assert_eq!(g.min_path_weight(&w.inverse(), &v).unwrap(), Coweight(vec![1, 0, 0, 0, -1]));
        assert_eq!(g.distance(&w.inverse(), &v).unwrap(), 5);
    }

    #[test]
    fn foreign_rank_vertex_is_rejected() {
        let g = graph(2);
        assert!(g.distance(&WeylElement::identity(3), &WeylElement::identity(2)).is_err());
    }

    #[test]
    fn dot_export_mentions_all_edges() {
        let dot = graph(2).to_dot();
        assert_eq!(dot.matches("->").count(), 15);
        // 8 Bruhat covers in S_3, the rest quantum.
        assert_eq!(dot.matches("dashed").count(), 7);
    }
}
