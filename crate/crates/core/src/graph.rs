//! Simple undirected graphs with bit-row adjacency.
//!
//! Every vertex owns a fixed-width bit row over `0..n`, so joint
//! neighbourhoods are row intersections and clique tests are row lookups.
//! Vertices are indexed from 0.

use std::collections::VecDeque;
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// A vertex index in `0..n`.
pub type Vertex = usize;

/// Largest vertex count accepted by [`Graph::new`].
pub const MAX_VERTICES: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph with {0} vertices exceeds the cap of {MAX_VERTICES}")]
    TooLarge(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("edge {u}-{v} has an endpoint outside 0..{n}")]
    OutOfRange { u: Vertex, v: Vertex, n: usize },
    #[error("duplicate edge {0}-{1}")]
    Duplicate(Vertex, Vertex),
    #[error("vertex count mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
}

/// A simple undirected graph on `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    rows: Vec<FixedBitSet>,
    edges: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooLarge(n));
        }
        Ok(Self {
            n,
            rows: vec![FixedBitSet::with_capacity(n); n],
            edges: 0,
        })
    }

    /// Edgeless graph; panics above [`MAX_VERTICES`].
    pub fn empty(n: usize) -> Self {
        Self::new(n).expect("vertex count within cap")
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.insert_edge(u, v);
            }
        }
        g
    }

    /// The cycle `0-1-…-(n-1)-0`. For `n < 3` this is the path.
    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        if n >= 3 {
            g.insert_edge(n - 1, 0);
        }
        g
    }

    /// The path `0-1-…-(n-1)`.
    pub fn path(n: usize) -> Self {
        let mut g = Self::empty(n);
        for v in 1..n {
            g.insert_edge(v - 1, v);
        }
        g
    }

    /// Builds a graph from an edge list, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut g = Self::new(n)?;
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::OutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !g.insert_edge(u, v) {
                return Err(GraphError::Duplicate(u.min(v), u.max(v)));
            }
        }
        Ok(g)
    }

    /// Inserts `uv`; returns `false` if it was already present.
    ///
    /// Panics on loops or out-of-range endpoints.
    pub fn insert_edge(&mut self, u: Vertex, v: Vertex) -> bool {
        assert!(u < self.n && v < self.n, "edge {u}-{v} out of range");
        assert_ne!(u, v, "self-loop at {u}");
        if self.rows[u].contains(v) {
            return false;
        }
        self.rows[u].insert(v);
        self.rows[v].insert(u);
        self.edges += 1;
        true
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    #[inline]
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.rows[u].contains(v)
    }

    /// Neighbourhood row of `v`.
    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &FixedBitSet {
        &self.rows[v]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.rows[v].count_ones(..)
    }

    /// Minimum degree; 0 for the graph on no vertices.
    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (0..self.n).flat_map(move |u| self.rows[u].ones().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// The full vertex set as a bit row.
    pub fn vertex_set(&self) -> FixedBitSet {
        let mut all = FixedBitSet::with_capacity(self.n);
        all.insert_range(..);
        all
    }

    /// `⋂_{u∈J} N(u)`, with `N(∅) = V`.
    pub fn joint_neighborhood(&self, set: &[Vertex]) -> FixedBitSet {
        let mut acc = self.vertex_set();
        for &u in set {
            acc.intersect_with(&self.rows[u]);
        }
        acc
    }

    /// True iff the listed vertices are distinct and pairwise adjacent.
    /// The empty tuple is a clique.
    pub fn is_clique(&self, tuple: &[Vertex]) -> bool {
        for (i, &u) in tuple.iter().enumerate() {
            if u >= self.n {
                return false;
            }
            for &v in &tuple[..i] {
                if !self.has_edge(u, v) {
                    return false;
                }
            }
        }
        true
    }

    /// Breadth-first distances from `source`, truncated at `limit`.
    /// Unreached vertices map to `None`.
    pub fn bfs_distances(&self, source: Vertex, limit: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            if d == limit {
                continue;
            }
            for w in self.rows[u].ones() {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// The `k`-th power: `uv` is an edge iff `1 ≤ dist(u, v) ≤ k`.
    /// `k = 0` yields the edgeless graph.
    pub fn power(&self, k: usize) -> Graph {
        let mut out = Graph::empty(self.n);
        if k == 0 {
            return out;
        }
        for u in 0..self.n {
            for (v, d) in self.bfs_distances(u, k).into_iter().enumerate() {
                if v > u && d.is_some() {
                    out.insert_edge(u, v);
                }
            }
        }
        out
    }

    /// Edge union of two graphs on the same vertex set.
    pub fn union(&self, other: &Graph) -> Result<Graph, GraphError> {
        if self.n != other.n {
            return Err(GraphError::SizeMismatch(self.n, other.n));
        }
        let mut out = self.clone();
        for (u, v) in other.edges() {
            out.insert_edge(u, v);
        }
        Ok(out)
    }

    /// True iff every edge of `self` is an edge of `other`.
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n == other.n && self.rows.iter().zip(&other.rows).all(|(a, b)| a.is_subset(b))
    }

    /// Minimum degree of the subgraph induced on `within`; `None` when
    /// `within` is empty.
    pub fn induced_min_degree(&self, within: &FixedBitSet) -> Option<usize> {
        within
            .ones()
            .map(|v| self.rows[v].intersection_count(within))
            .min()
    }
}

/// Collects the members of a bit row.
pub fn members(set: &FixedBitSet) -> Vec<Vertex> {
    set.ones().collect()
}

/// Builds a bit row over `0..n` from a vertex list.
pub fn set_of(n: usize, vertices: impl IntoIterator<Item = Vertex>) -> FixedBitSet {
    let mut set = FixedBitSet::with_capacity(n);
    for v in vertices {
        set.insert(v);
    }
    set
}
