use rand::Rng as _;
use serde::Serialize;

use super::{walk_internal, AbsorptionError};
use crate::graph::{Graph, Vertex};
use crate::rng;
use crate::seq::{OrderedClique, PowerSeq, SeqKind};

/// Count of `k`-walks with `ℓ_k` internal vertices between two `k`-cliques.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KWalkReport {
    pub k: usize,
    pub internal: usize,
    /// Exact count, or `cap` when `capped`.
    pub count: u128,
    pub capped: bool,
    /// `count / n^{ℓ_k}`; a lower bound when capped.
    pub rho_hat: f64,
    /// Uniform samples from the counted walks.
    pub samples: Vec<PowerSeq>,
}

/// Counts `k`-walks `K, w_1, …, w_ℓ, K′` in `g` with `ℓ = ℓ_k` by dynamic
/// programming over the last `k` vertices, and draws `samples` walks
/// uniformly. Supports `k ∈ {1, 2}`.
pub fn enumerate_kwalks(
    g: &Graph,
    k: usize,
    from: &OrderedClique,
    to: &OrderedClique,
    cap: u128,
    samples: usize,
    seed: u64,
) -> Result<KWalkReport, AbsorptionError> {
    if !(1..=2).contains(&k) {
        return Err(AbsorptionError::Unsupported { k });
    }
    for end in [from, to] {
        if end.order() != k || !g.is_clique(end.vertices()) {
            return Err(crate::search::SearchError::BadEndClique(end.0.clone()).into());
        }
    }
    if !from.is_disjoint(to) {
        return Err(crate::search::SearchError::OverlappingEnds.into());
    }
    let n = g.n();
    let ell = walk_internal(k);
    let states = n.pow(k as u32);
    let encode = |w: &[Vertex]| w.iter().fold(0, |acc, &v| acc * n + v);
    let last = |s: usize| s % n;
    let shift = |s: usize, v: Vertex| (s * n + v) % states;
    // a state is the tuple of the last k vertices; appending v needs v
    // adjacent to all of them
    let fits = |s: usize, v: Vertex| {
        let mut s = s;
        (0..k).all(|_| {
            let u = s % n;
            s /= n;
            g.has_edge(u, v)
        })
    };
    let mut layers = vec![vec![0u128; states]];
    layers[0][encode(from.vertices())] = 1;
    let steps: Vec<Option<Vertex>> = (0..ell).map(|_| None).chain(to.vertices().iter().map(|&v| Some(v))).collect();
    for step in &steps {
        let prev = layers.last().unwrap();
        let mut next = vec![0u128; states];
        for (s, &c) in prev.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut extend = |v: Vertex| {
                if fits(s, v) {
                    let t = shift(s, v);
                    next[t] = next[t].saturating_add(c).min(cap);
                }
            };
            match step {
                Some(v) => extend(*v),
                None => g.neighbors(last(s)).ones().for_each(&mut extend),
            }
        }
        layers.push(next);
    }
    let count = layers.last().unwrap()[encode(to.vertices())];
    let capped = count >= cap;

    let mut rng = rng::stream(seed);
    let mut drawn = Vec::new();
    for _ in 0..if count > 0 { samples } else { 0 } {
        // walk backwards choosing predecessors in proportion to their counts
        let mut state = encode(to.vertices());
        let mut rev = Vec::new();
        for t in (1..layers.len()).rev() {
            rev.push(last(state));
            let preds: Vec<(usize, f64)> = (0..n)
                .map(|u| state / n + u * n.pow(k as u32 - 1))
                .filter(|&p| layers[t - 1][p] > 0 && fits(p, last(state)))
                .map(|p| (p, layers[t - 1][p] as f64))
                .collect();
            let total: f64 = preds.iter().map(|p| p.1).sum();
            let mut x = rng.gen::<f64>() * total;
            state = preds.last().expect("positive count has a predecessor").0;
            for &(p, w) in &preds {
                if x < w {
                    state = p;
                    break;
                }
                x -= w;
            }
        }
        let mut walk = from.vertices().to_vec();
        walk.extend(rev.into_iter().rev());
        drawn.push(PowerSeq {
            vertices: walk,
            power: k,
            kind: SeqKind::Walk,
        });
    }
    Ok(KWalkReport {
        k,
        internal: ell,
        count,
        capped,
        rho_hat: count as f64 / (n as f64).powi(ell as i32),
        samples: drawn,
    })
}
