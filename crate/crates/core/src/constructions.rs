//! Deterministic graph generators: the extremal dense graph without a
//! `(k+1)`-st power of a Hamiltonian cycle, the absorber gadget `P⁻`, blow-ups
//! of `K⁻_{k+2}`, and dense host graphs for experiments.

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, Vertex};
use crate::rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("invalid extremal spec: {0}")]
    InvalidSpec(String),
    #[error("target degree {target} is not below n = {n}")]
    Infeasible { target: usize, n: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Parameters of the extremal graph: `k+1` parts of size `n/(k+1)`, each
/// with a distinguished subset `W_i` of size `⌈εn⌉`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalSpec {
    pub k: usize,
    pub n: usize,
    pub eps: f64,
}

impl ExtremalSpec {
    pub fn new(k: usize, n: usize, eps: f64) -> Result<Self, ConstructionError> {
        let spec = Self { k, n, eps };
        spec.validate()?;
        Ok(spec)
    }

    pub fn part_size(&self) -> usize {
        self.n / (self.k + 1)
    }

    /// `|W_i| = ⌈εn⌉`, rounding products within `1e-9` of an integer down.
    pub fn w_size(&self) -> usize {
        (self.eps * self.n as f64 - 1e-9).ceil().max(0.0) as usize
    }

    pub fn validate(&self) -> Result<(), ConstructionError> {
        let parts = self.k + 1;
        if self.n == 0 || !self.n.is_multiple_of(parts) {
            return Err(ConstructionError::InvalidSpec(format!(
                "n = {} is not a positive multiple of k+1 = {parts}",
                self.n
            )));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(ConstructionError::InvalidSpec(format!("eps = {} outside (0,1)", self.eps)));
        }
        if self.w_size() > self.part_size() {
            return Err(ConstructionError::InvalidSpec(format!(
                "ceil(eps n) = {} exceeds the part size {}",
                self.w_size(),
                self.part_size()
            )));
        }
        Ok(())
    }

    /// Part index of `v`; parts are consecutive index blocks.
    pub fn part_of(&self, v: Vertex) -> usize {
        v / self.part_size()
    }

    /// Whether `v` lies in its part's distinguished subset `W_i` (the first
    /// `⌈εn⌉` vertices of the part).
    pub fn in_w(&self, v: Vertex) -> bool {
        v % self.part_size() < self.w_size()
    }

    /// Exact degree of a vertex in or outside `⋃ W_i`.
    pub fn expected_degree(&self, in_w: bool) -> usize {
        let (n, s, w) = (self.n, self.part_size(), self.w_size());
        if in_w {
            n - s + (s - w)
        } else {
            n - s + w
        }
    }
}

/// Complete `(k+1)`-partite graph plus complete bipartite graphs between
/// each `W_i` and `V_i ∖ W_i`.
pub fn extremal_graph(spec: &ExtremalSpec) -> Result<Graph, ConstructionError> {
    spec.validate()?;
    let mut g = Graph::new(spec.n)?;
    for u in 0..spec.n {
        for v in u + 1..spec.n {
            let same_part = spec.part_of(u) == spec.part_of(v);
            if !same_part || spec.in_w(u) != spec.in_w(v) {
                g.insert_edge(u, v);
            }
        }
    }
    Ok(g)
}

/// `P⁻`: the `(k+1)`-st power of the path on `2k+2` vertices without its
/// middle edge. Vertices are `0..2k+2`; the removed edge is `{k, k+1}`.
pub fn pminus(k: usize) -> Graph {
    let len = 2 * k + 2;
    let mut g = Graph::empty(len);
    for u in 0..len {
        for v in u + 1..len.min(u + k + 2) {
            if (u, v) != (k, k + 1) {
                g.insert_edge(u, v);
            }
        }
    }
    g
}

/// The colouring `1,…,k+1,k+1,1,…,k` of `P⁻`, indexed by 0-based vertex.
pub fn pminus_coloring(k: usize) -> Vec<usize> {
    (1..=2 * k + 2)
        .map(|i| match i {
            i if i <= k + 1 => i,
            i if i == k + 2 => k + 1,
            i => i - k - 2,
        })
        .collect()
}

/// True iff adjacent vertices receive different colours.
pub fn is_proper_coloring(g: &Graph, colors: &[usize]) -> bool {
    colors.len() == g.n() && g.edges().all(|(u, v)| colors[u] != colors[v])
}

/// Class index (0-based) of `v` in [`blowup_kminus`]`(k, m)`.
pub fn blowup_class(m: usize, v: Vertex) -> usize {
    v / m
}

/// `K⁻_{k+2}(m)`: every vertex of `K_{k+2}` minus the edge between classes
/// 0 and 1 is replaced by an independent `m`-set, every edge by `K_{m,m}`.
pub fn blowup_kminus(k: usize, m: usize) -> Graph {
    assert!(m >= 1, "blow-up classes must be nonempty");
    let classes = k + 2;
    let mut g = Graph::empty(classes * m);
    for u in 0..classes * m {
        for v in u + 1..classes * m {
            let (a, b) = (blowup_class(m, u), blowup_class(m, v));
            if a != b && (a, b) != (0, 1) {
                g.insert_edge(u, v);
            }
        }
    }
    g
}

/// A dense host with `δ(G) ≥ ⌈αn⌉`: a binomial graph of density `α + 0.05`
/// whose deficient vertices are joined, in index order, to their
/// lowest-indexed non-neighbours.
pub fn dense_host(n: usize, alpha: f64, seed: u64) -> Result<Graph, ConstructionError> {
    let target = (alpha * n as f64 - 1e-9).ceil().max(0.0) as usize;
    if target >= n {
        return Err(ConstructionError::Infeasible { target, n });
    }
    let density = (alpha + 0.05).clamp(0.0, 1.0);
    let mut g = Graph::new(n)?;
    let mut rng = rng::stream(seed);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < density {
                g.insert_edge(u, v);
            }
        }
    }
    for v in 0..n {
        let mut w = 0;
        while g.degree(v) < target {
            if w != v && !g.has_edge(v, w) {
                g.insert_edge(v, w);
            }
            w += 1;
        }
    }
    Ok(g)
}
