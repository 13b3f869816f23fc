use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::Serialize;

use super::{connector_internal, AbsorptionError, PipelineParams};
use crate::augment::AugmentedGraph;
use crate::graph::{Graph, Vertex};
use crate::rng;

/// An ordered `(2k+2)`-tuple spanning `P⁻` in the deterministic part whose
/// middle pair `(v_{k+1}, v_{k+2})` is an edge of the random part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Absorber {
    pub tuple: Vec<Vertex>,
}

impl Absorber {
    pub fn k(&self) -> usize {
        self.tuple.len() / 2 - 1
    }

    pub fn middle(&self) -> (Vertex, Vertex) {
        let k = self.k();
        (self.tuple[k], self.tuple[k + 1])
    }

    /// Checks the definition against `h` with every vertex outside `reserved`.
    pub fn is_valid(&self, h: &AugmentedGraph, reserved: &FixedBitSet) -> bool {
        let len = self.tuple.len();
        if len < 2 || !len.is_multiple_of(2) || self.tuple.iter().any(|&v| v >= h.n() || reserved.contains(v)) {
            return false;
        }
        let k = self.k();
        let (a, b) = self.middle();
        if !h.is_random_edge(a, b) {
            return false;
        }
        for i in 0..len {
            for j in i + 1..len {
                if self.tuple[i] == self.tuple[j] {
                    return false;
                }
                if j - i <= k + 1 && (i, j) != (k, k + 1) && !h.det.has_edge(self.tuple[i], self.tuple[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// Whether this is an `x`-absorber: the tuple lies in `N_G(x)`.
    pub fn absorbs(&self, g: &Graph, x: Vertex) -> bool {
        self.tuple.iter().all(|&v| g.has_edge(x, v))
    }

    pub fn overlaps(&self, other: &Absorber) -> bool {
        self.tuple.iter().any(|v| other.tuple.contains(v))
    }
}

/// Calls `f` for every injective embedding of `P⁻` into `g[allowed]` that
/// maps the middle pair to `(a, b)`, with positions `0..k` filled before
/// `k+2..2k+2`. Stops early when `f` returns `false`.
fn for_each_pminus(
    g: &Graph,
    k: usize,
    allowed: &FixedBitSet,
    a: Vertex,
    b: Vertex,
    f: &mut impl FnMut(&[Vertex]) -> bool,
) -> bool {
    let len = 2 * k + 2;
    let order: Vec<usize> = (0..k).chain(k + 2..len).collect();
    let mut tuple = vec![usize::MAX; len];
    tuple[k] = a;
    tuple[k + 1] = b;
    fill(g, k, allowed, &order, &mut tuple, f)
}

fn fill(
    g: &Graph,
    k: usize,
    allowed: &FixedBitSet,
    order: &[usize],
    tuple: &mut Vec<Vertex>,
    f: &mut impl FnMut(&[Vertex]) -> bool,
) -> bool {
    let Some((&pos, rest)) = order.split_first() else {
        return f(tuple);
    };
    let mut cand = allowed.clone();
    for (q, &v) in tuple.iter().enumerate() {
        if v == usize::MAX {
            continue;
        }
        cand.set(v, false);
        if pos.abs_diff(q) <= k + 1 {
            cand.intersect_with(g.neighbors(v));
        }
    }
    for v in cand.ones() {
        tuple[pos] = v;
        if !fill(g, k, allowed, rest, tuple, f) {
            tuple[pos] = usize::MAX;
            return false;
        }
    }
    tuple[pos] = usize::MAX;
    true
}

/// Number of embeddings counted by [`for_each_pminus`], with the last
/// position counted by popcount.
fn count_pminus(g: &Graph, k: usize, allowed: &FixedBitSet, a: Vertex, b: Vertex) -> u64 {
    if k == 0 {
        return 1;
    }
    let len = 2 * k + 2;
    let order: Vec<usize> = (0..k).chain(k + 2..len).collect();
    let mut tuple = vec![usize::MAX; len];
    tuple[k] = a;
    tuple[k + 1] = b;
    count_fill(g, k, allowed, &order, &mut tuple)
}

fn count_fill(g: &Graph, k: usize, allowed: &FixedBitSet, order: &[usize], tuple: &mut Vec<Vertex>) -> u64 {
    let (&pos, rest) = order.split_first().expect("at least one free position");
    let mut cand = allowed.clone();
    for (q, &v) in tuple.iter().enumerate() {
        if v == usize::MAX {
            continue;
        }
        cand.set(v, false);
        if pos.abs_diff(q) <= k + 1 {
            cand.intersect_with(g.neighbors(v));
        }
    }
    if rest.is_empty() {
        return cand.count_ones(..) as u64;
    }
    let mut total = 0;
    for v in cand.ones() {
        tuple[pos] = v;
        total += count_fill(g, k, allowed, rest, tuple);
    }
    tuple[pos] = usize::MAX;
    total
}

/// Enumerates absorbers of `h` avoiding `reserved`, in order of the middle
/// edge `(a, b)` (lexicographic over ordered random edges), then by the
/// remaining positions. Stops early when `f` returns `false`.
pub fn for_each_absorber(h: &AugmentedGraph, k: usize, reserved: &FixedBitSet, mut f: impl FnMut(&[Vertex]) -> bool) {
    let mut allowed = reserved.clone();
    allowed.grow(h.n());
    allowed.toggle_range(..);
    for a in allowed.ones() {
        for b in h.rnd.graph.neighbors(a).ones() {
            if !allowed.contains(b) {
                continue;
            }
            if !for_each_pminus(&h.det, k, &allowed, a, b, &mut f) {
                return;
            }
        }
    }
}

/// `B_x`: pairs `v, v′ ∈ N(x)` supporting enough copies of `P⁻` in `G[N(x)]`
/// with the middle pair mapped to `(v, v′)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsorberGraph {
    pub x: Vertex,
    /// Pairs `v < v′` with their support.
    pub pairs: Vec<(Vertex, Vertex, f64)>,
    pub threshold: f64,
    /// `true` when supports are sampled estimates (k = 2).
    pub sampled: bool,
}

impl AbsorberGraph {
    pub fn to_graph(&self, n: usize) -> Graph {
        Graph::from_edges(n, self.pairs.iter().map(|&(u, v, _)| (u, v))).expect("pairs are distinct")
    }
}

/// Samples drawn per pair when supports are estimated.
pub const SUPPORT_SAMPLES: usize = 400;

/// Builds `B_x`. Supports are exact for `k ≤ 1` and estimated from
/// [`SUPPORT_SAMPLES`] uniform injective fillings for `k = 2`; `k > 2` is
/// unsupported.
pub fn build_absorber_graph(
    h: &AugmentedGraph,
    x: Vertex,
    params: &PipelineParams,
) -> Result<AbsorberGraph, AbsorptionError> {
    let k = params.k;
    if k > 2 {
        return Err(AbsorptionError::Unsupported { k });
    }
    let g = &h.det;
    let nx = g.neighbors(x).clone();
    let members: Vec<Vertex> = nx.ones().collect();
    let threshold = params.absorber_support_threshold(h.n());
    let sampled = k == 2;
    let mut rng = rng::stream(rng::labelled_seed(params.seed, "support", x as u64));
    let mut pairs = Vec::new();
    for (i, &v) in members.iter().enumerate() {
        for &w in &members[i + 1..] {
            let support = if sampled {
                estimate_support(g, k, &members, v, w, &mut rng)
            } else {
                count_pminus(g, k, &nx, v, w) as f64
            };
            if support >= threshold {
                pairs.push((v, w, support));
            }
        }
    }
    Ok(AbsorberGraph {
        x,
        pairs,
        threshold,
        sampled,
    })
}

fn estimate_support(g: &Graph, k: usize, members: &[Vertex], a: Vertex, b: Vertex, rng: &mut rng::Rng) -> f64 {
    let pool: Vec<Vertex> = members.iter().copied().filter(|&v| v != a && v != b).collect();
    let free = 2 * k;
    if pool.len() < free {
        return 0.0;
    }
    let len = 2 * k + 2;
    let mut hits = 0;
    for _ in 0..SUPPORT_SAMPLES {
        let picked: Vec<Vertex> = pool.choose_multiple(rng, free).copied().collect();
        let mut tuple = Vec::with_capacity(len);
        tuple.extend_from_slice(&picked[..k]);
        tuple.push(a);
        tuple.push(b);
        tuple.extend_from_slice(&picked[k..]);
        let ok = (0..len).all(|i| {
            (i + 1..len.min(i + k + 2)).all(|j| (i, j) == (k, k + 1) || g.has_edge(tuple[i], tuple[j]))
        });
        hits += ok as usize;
    }
    let falling: f64 = (0..free).map(|i| (pool.len() - i) as f64).product();
    falling * hits as f64 / SUPPORT_SAMPLES as f64
}

/// Removes every absorber that shares a vertex with another one.
pub fn prune_overlapping(selected: &[Absorber], n: usize) -> Vec<Absorber> {
    let mut hits = vec![0usize; n];
    for a in selected {
        for &v in &a.tuple {
            hits[v] += 1;
        }
    }
    selected
        .iter()
        .filter(|a| a.tuple.iter().all(|&v| hits[v] == 1))
        .cloned()
        .collect()
}

/// A pruned absorber family with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsorberFamily {
    pub absorbers: Vec<Absorber>,
    /// Size of the random selection before pruning.
    pub selected: usize,
    /// Absorbers dropped to fit the absorbing path length cap.
    pub truncated: usize,
    pub q: f64,
    /// Number of `x`-absorbers in the family, per vertex `x`.
    pub x_counts: Vec<usize>,
    /// Minimum of `x_counts` over vertices outside the family.
    pub min_count: usize,
    pub floor: usize,
    pub attempts: usize,
}

impl AbsorberFamily {
    pub fn vertex_set(&self, n: usize) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(n);
        for a in &self.absorbers {
            for &v in &a.tuple {
                set.insert(v);
            }
        }
        set
    }
}

/// Selects each absorber of `H − R` with probability `q`, prunes overlapping
/// pairs, keeps the longest prefix that fits the absorbing path cap, and
/// retries until every vertex outside the family has the required number
/// of `x`-absorbers.
pub fn select_absorber_family(
    h: &AugmentedGraph,
    reserved: &FixedBitSet,
    params: &PipelineParams,
) -> Result<AbsorberFamily, AbsorptionError> {
    let n = h.n();
    let k = params.k;
    if k > 2 {
        return Err(AbsorptionError::Unsupported { k });
    }
    let q = params.selection_probability(n);
    let floor = params.absorber_floor(n);
    let size_cap = params.family_size_cap(n);
    let len_cap = params.absorbing_path_cap(n);
    let attempts = params.retries.absorbers.max(1);
    let mut worst = AbsorptionError::AbsorberShortfall {
        x: None,
        count: 0,
        floor,
    };
    for attempt in 0..attempts {
        let mut rng = rng::stream(rng::labelled_seed(params.seed, "absorbers", attempt as u64));
        let mut selected = Vec::new();
        if q > 0.0 {
            let mut skip = geometric(&mut rng, q);
            for_each_absorber(h, k, reserved, |t| {
                if skip == 0 {
                    selected.push(Absorber { tuple: t.to_vec() });
                    skip = geometric(&mut rng, q);
                } else {
                    skip -= 1;
                }
                true
            });
        }
        let mut family = prune_overlapping(&selected, n);
        let fit = fitting_prefix(k, len_cap).min(size_cap);
        let truncated = family.len().saturating_sub(fit);
        family.truncate(fit);
        if family.is_empty() {
            continue;
        }
        let x_counts: Vec<usize> = (0..n)
            .map(|x| family.iter().filter(|a| a.absorbs(&h.det, x)).count())
            .collect();
        let mut in_family = FixedBitSet::with_capacity(n);
        for a in &family {
            for &v in &a.tuple {
                in_family.insert(v);
            }
        }
        let (worst_x, min_count) = (0..n)
            .filter(|&x| !in_family.contains(x))
            .map(|x| (x, x_counts[x]))
            .min_by_key(|&(x, c)| (c, x))
            .unwrap_or((0, usize::MAX));
        if min_count >= floor {
            return Ok(AbsorberFamily {
                absorbers: family,
                selected: selected.len(),
                truncated,
                q,
                x_counts,
                min_count,
                floor,
                attempts: attempt + 1,
            });
        }
        worst = AbsorptionError::AbsorberShortfall {
            x: Some(worst_x),
            count: min_count,
            floor,
        };
    }
    Err(worst)
}

/// Largest family size `f` with `f(2k+2) + (f−1)(k+1)2^{k+1} ≤ cap`.
fn fitting_prefix(k: usize, cap: usize) -> usize {
    let (a, t) = (2 * k + 2, connector_internal(k));
    if cap < a {
        0
    } else {
        1 + (cap - a) / (a + t)
    }
}

/// Failures before the next success in Bernoulli(`q`) trials.
fn geometric(rng: &mut rng::Rng, q: f64) -> u64 {
    if q >= 1.0 {
        return 0;
    }
    let u: f64 = 1.0 - rng.gen::<f64>();
    (u.ln() / (1.0 - q).ln()).floor() as u64
}
