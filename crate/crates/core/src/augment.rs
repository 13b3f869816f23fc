//! Binomial random graphs and their union with a deterministic host.

use fixedbitset::FixedBitSet;
use rand::Rng as _;
use serde::Serialize;

use crate::graph::{Graph, GraphError, Vertex};
use crate::rng;

/// A sample of `G(n, p)` with the seed that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomPart {
    pub graph: Graph,
    pub p: f64,
    pub seed: u64,
}

/// Samples `G(n, p)`: each pair `u < v`, in lexicographic order, consumes one
/// uniform draw `x` and is kept iff `x < p`. Reusing a seed with a larger `p`
/// therefore yields a supergraph.
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<RandomPart, GraphError> {
    assert!((0.0..=1.0).contains(&p), "edge probability {p} outside [0,1]");
    let mut graph = Graph::new(n)?;
    let mut rng = rng::stream(seed);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                graph.insert_edge(u, v);
            }
        }
    }
    Ok(RandomPart { graph, p, seed })
}

/// `H = G ∪ G(n, p)`, remembering which edges came from the random part.
#[derive(Debug, Clone)]
pub struct AugmentedGraph {
    pub det: Graph,
    pub rnd: RandomPart,
    pub union: Graph,
}

impl AugmentedGraph {
    pub fn new(det: Graph, rnd: RandomPart) -> Result<Self, GraphError> {
        let union = det.union(&rnd.graph)?;
        Ok(Self { det, rnd, union })
    }

    /// `H = G` with an empty random part.
    pub fn deterministic(det: Graph) -> Self {
        let n = det.n();
        Self {
            union: det.clone(),
            rnd: RandomPart {
                graph: Graph::empty(n),
                p: 0.0,
                seed: 0,
            },
            det,
        }
    }

    pub fn n(&self) -> usize {
        self.det.n()
    }

    /// Whether `uv` was sampled into the random part, regardless of whether
    /// it is also a deterministic edge.
    pub fn is_random_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.rnd.graph.has_edge(u, v)
    }
}

/// Forms `H = G ∪ R`.
pub fn union(det: &Graph, rnd: &RandomPart) -> Result<AugmentedGraph, GraphError> {
    AugmentedGraph::new(det.clone(), rnd.clone())
}

/// Number of ordered pairs `(e, e')` of distinct edges sharing a vertex.
pub fn intersecting_edge_pairs(g: &Graph) -> u64 {
    (0..g.n())
        .map(|v| {
            let d = g.degree(v) as u64;
            d * d.saturating_sub(1)
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub passed: bool,
    pub count: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomPropertiesReport {
    /// `e(G(n,p)) ≤ Cn`.
    pub edge_count: PropertyCheck,
    /// Ordered intersecting edge pairs `≤ 2C²n`.
    pub intersecting_pairs: PropertyCheck,
    /// Per `x`: `|E(B_x − R) ∩ E(G(n,p))| ≥ βCn/4`, listed in the order the
    /// `B_x` were supplied.
    pub absorber_hits: Vec<PropertyCheck>,
}

impl RandomPropertiesReport {
    pub fn all_passed(&self) -> bool {
        self.edge_count.passed
            && self.intersecting_pairs.passed
            && self.absorber_hits.iter().all(|c| c.passed)
    }
}

/// Evaluates the three random-part properties used when selecting
/// absorbers. `bx` holds one graph `B_x` per vertex of interest and
/// `reserved` is the set `R` removed from each.
pub fn check_random_properties(
    h: &AugmentedGraph,
    c: f64,
    beta: f64,
    bx: &[Graph],
    reserved: &FixedBitSet,
) -> RandomPropertiesReport {
    let n = h.n() as f64;
    let rnd = &h.rnd.graph;
    let edges = rnd.edge_count() as f64;
    let pairs = intersecting_edge_pairs(rnd) as f64;
    let hit_bound = beta * c * n / 4.0;
    let absorber_hits = bx
        .iter()
        .map(|b| {
            let hits = b
                .edges()
                .filter(|&(u, v)| !reserved.contains(u) && !reserved.contains(v) && rnd.has_edge(u, v))
                .count() as f64;
            PropertyCheck {
                passed: hits >= hit_bound,
                count: hits,
                bound: hit_bound,
            }
        })
        .collect();
    RandomPropertiesReport {
        edge_count: PropertyCheck {
            passed: edges <= c * n,
            count: edges,
            bound: c * n,
        },
        intersecting_pairs: PropertyCheck {
            passed: pairs <= 2.0 * c * c * n,
            count: pairs,
            bound: 2.0 * c * c * n,
        },
        absorber_hits,
    }
}
