use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use serde::Serialize;

use super::{AbsorptionError, PipelineParams};
use crate::augment::AugmentedGraph;
use crate::graph::{Graph, Vertex};
use crate::rng;
use crate::seq::PowerSeq;

/// Disjoint `(k+1)`-paths in `H − Q` and the vertices they miss.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverFamily {
    pub paths: Vec<PowerSeq>,
    pub leftover: Vec<Vertex>,
    /// Paths that started as a tile.
    pub tiles: usize,
}

/// Node cap for one tile search.
const TILE_NODES: u64 = 20_000;

/// Covers `V ∖ Q` by `(k+1)`-paths.
///
/// Tiles come first: an alternating path `a_1 b_1 … a_m b_m` in the random
/// part whose vertices share `km` common deterministic neighbours, completed
/// to a copy of `K⁻_{k+2}(m)` read as `a_i, c³_i, …, c^{k+2}_i, b_i`. Paths are
/// then extended greedily at both ends, merged when the junction is valid,
/// and fresh greedy paths start from the least connected remaining vertex.
/// Fragments shorter than `k+1` are left over.
pub fn cover(
    h: &AugmentedGraph,
    excluded: &FixedBitSet,
    params: &PipelineParams,
    attempt: u64,
) -> Result<CoverFamily, AbsorptionError> {
    let n = h.n();
    let k = params.k;
    let r = k + 1;
    let mut avail = excluded.clone();
    avail.grow(n);
    avail.toggle_range(..);
    let mut rng = rng::stream(rng::labelled_seed(params.seed, "cover", attempt));

    let mut paths: Vec<Vec<Vertex>> = Vec::new();
    let mut starts: Vec<Vertex> = avail.ones().collect();
    starts.shuffle(&mut rng);
    let mut tiler = Tiler {
        h,
        k,
        m: params.m.max(1),
        nodes: 0,
    };
    for &a in &starts {
        if !avail.contains(a) {
            continue;
        }
        tiler.nodes = 0;
        if let Some(tile) = tiler.tile_from(a, &avail) {
            for &v in &tile {
                avail.set(v, false);
            }
            debug_assert!(crate::seq::is_power_seq(&h.union, &tile, r, crate::seq::SeqKind::Path));
            paths.push(tile);
        }
    }
    let tiles = paths.len();

    let mut leftover = Vec::new();
    loop {
        let mut changed = false;
        for p in paths.iter_mut() {
            changed |= extend_both(&h.union, r, p, &mut avail);
        }
        changed |= merge_once(&h.union, r, &mut paths);
        if changed {
            continue;
        }
        let Some(start) = avail.ones().min_by_key(|&v| (h.union.neighbors(v).intersection_count(&avail), v)) else {
            break;
        };
        avail.set(start, false);
        let mut p = vec![start];
        extend_both(&h.union, r, &mut p, &mut avail);
        if p.len() >= r {
            paths.push(p);
        } else if let Some((i, spliced)) = paths.iter().enumerate().find_map(|(i, q)| Some((i, splice(&h.union, r, q, &p)?))) {
            paths[i] = spliced;
        } else {
            leftover.extend(p);
        }
    }
    leftover.sort_unstable();

    let leftover_cap = params.leftover_cap(n);
    let path_cap = params.path_count_cap(n);
    if leftover.len() > leftover_cap || paths.len() > path_cap {
        return Err(AbsorptionError::CoverShortfall {
            leftover: leftover.len(),
            leftover_cap,
            paths: paths.len(),
            path_cap,
        });
    }
    Ok(CoverFamily {
        paths: paths.into_iter().map(|p| PowerSeq::path(p, r)).collect(),
        leftover,
        tiles,
    })
}

struct Tiler<'a> {
    h: &'a AugmentedGraph,
    k: usize,
    m: usize,
    nodes: u64,
}

impl Tiler<'_> {
    fn tile_from(&mut self, a: Vertex, avail: &FixedBitSet) -> Option<Vec<Vertex>> {
        let mut common = avail.clone();
        common.intersect_with(self.h.det.neighbors(a));
        let mut alt = vec![a];
        let mut used = avail.clone();
        used.toggle_range(..);
        used.insert(a);
        self.alternate(&mut alt, &common, &mut used, avail)
    }

    /// Extends the alternating random path; `common` is the joint
    /// deterministic neighbourhood of its vertices within the available set.
    fn alternate(
        &mut self,
        alt: &mut Vec<Vertex>,
        common: &FixedBitSet,
        used: &mut FixedBitSet,
        avail: &FixedBitSet,
    ) -> Option<Vec<Vertex>> {
        self.nodes += 1;
        if self.nodes > TILE_NODES {
            return None;
        }
        let need = self.k * self.m;
        if alt.len() == 2 * self.m {
            let mut pool = common.clone();
            pool.difference_with(used);
            let classes = self.fill_classes(&pool)?;
            return Some(self.read_tile(alt, &classes));
        }
        let last = *alt.last().unwrap();
        let mut cand = self.h.rnd.graph.neighbors(last).clone();
        cand.intersect_with(avail);
        cand.difference_with(used);
        for v in cand.ones().collect::<Vec<_>>() {
            let mut next = common.clone();
            next.intersect_with(self.h.det.neighbors(v));
            next.set(v, false);
            let mut free = next.clone();
            free.difference_with(used);
            if free.count_ones(..) < need {
                continue;
            }
            alt.push(v);
            used.insert(v);
            if let Some(t) = self.alternate(alt, &next, used, avail) {
                return Some(t);
            }
            used.set(v, false);
            alt.pop();
            if self.nodes > TILE_NODES {
                return None;
            }
        }
        None
    }

    /// Chooses `k` classes of `m` vertices from `pool`, vertices of
    /// different classes pairwise adjacent in the deterministic part.
    fn fill_classes(&mut self, pool: &FixedBitSet) -> Option<Vec<Vec<Vertex>>> {
        let mut classes = vec![Vec::new(); self.k];
        if self.fill_slot(0, pool, &mut classes) {
            Some(classes)
        } else {
            None
        }
    }

    fn fill_slot(&mut self, slot: usize, pool: &FixedBitSet, classes: &mut [Vec<Vertex>]) -> bool {
        if slot == self.k * self.m {
            return true;
        }
        self.nodes += 1;
        if self.nodes > TILE_NODES {
            return false;
        }
        let class = slot / self.m;
        let mut cand = pool.clone();
        for (c, members) in classes.iter().enumerate() {
            for &u in members {
                cand.set(u, false);
                if c != class {
                    cand.intersect_with(self.h.det.neighbors(u));
                }
            }
        }
        // within a class keep indices increasing
        let floor = classes[class].last().map_or(0, |&u| u + 1);
        for v in cand.ones().filter(|&v| v >= floor).collect::<Vec<_>>() {
            classes[class].push(v);
            if self.fill_slot(slot + 1, pool, classes) {
                return true;
            }
            classes[class].pop();
        }
        false
    }

    fn read_tile(&self, alt: &[Vertex], classes: &[Vec<Vertex>]) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(alt.len() + self.k * self.m);
        for i in 0..self.m {
            out.push(alt[2 * i]);
            for class in classes {
                out.push(class[i]);
            }
            out.push(alt[2 * i + 1]);
        }
        out
    }
}

/// Greedily appends and prepends available vertices adjacent to the `r`
/// nearest path vertices, preferring those with fewest available
/// neighbours.
fn extend_both(h: &Graph, r: usize, path: &mut Vec<Vertex>, avail: &mut FixedBitSet) -> bool {
    let mut changed = false;
    for _ in 0..2 {
        loop {
            let mut cand = avail.clone();
            for &u in &path[path.len().saturating_sub(r)..] {
                cand.intersect_with(h.neighbors(u));
            }
            let Some(v) = cand.ones().min_by_key(|&v| (h.neighbors(v).intersection_count(avail), v)) else {
                break;
            };
            path.push(v);
            avail.set(v, false);
            changed = true;
        }
        path.reverse();
    }
    changed
}

/// Splices the first path (in either orientation) that fits into a gap of
/// another path, ends included.
fn merge_once(h: &Graph, r: usize, paths: &mut Vec<Vec<Vertex>>) -> bool {
    for j in 0..paths.len() {
        for i in 0..paths.len() {
            if i == j {
                continue;
            }
            if let Some(spliced) = splice(h, r, &paths[i], &paths[j]) {
                paths[i] = spliced;
                paths.remove(j);
                return true;
            }
        }
    }
    false
}

/// `host` with `piece` (or its reverse) inserted at the first gap where
/// every pair within distance `r` around the insertion is adjacent.
fn splice(h: &Graph, r: usize, host: &[Vertex], piece: &[Vertex]) -> Option<Vec<Vertex>> {
    let reversed: Vec<Vertex> = piece.iter().rev().copied().collect();
    for at in (0..=host.len()).rev() {
        for p in [piece, &reversed[..]] {
            let lo = at.saturating_sub(r);
            let hi = (at + r).min(host.len());
            let mut local: Vec<Vertex> = host[lo..at].to_vec();
            local.extend_from_slice(p);
            local.extend_from_slice(&host[at..hi]);
            if window_ok(h, r, &local) {
                let mut out = host[..at].to_vec();
                out.extend_from_slice(p);
                out.extend_from_slice(&host[at..]);
                return Some(out);
            }
        }
    }
    None
}

fn window_ok(h: &Graph, r: usize, seq: &[Vertex]) -> bool {
    (0..seq.len()).all(|i| (i + 1..seq.len().min(i + r + 1)).all(|j| h.has_edge(seq[i], seq[j])))
}
