//! Exact backtracking search for powers of Hamiltonian cycles and for
//! power paths of prescribed length between ordered cliques, plus clique
//! packings and a permutation-enumeration oracle.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::seq::{OrderedClique, PowerSeq};

/// Node and wall-clock limits for a single search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub node_cap: u64,
    pub time_cap: Duration,
}

impl SearchBudget {
    pub fn new(node_cap: u64, time_cap: Duration) -> Self {
        assert!(node_cap > 0 && !time_cap.is_zero(), "budget limits must be positive");
        Self { node_cap, time_cap }
    }

    pub fn nodes(node_cap: u64) -> Self {
        Self::new(node_cap, Duration::from_secs(3600))
    }

    /// Large enough to finish every exact search at desk scale (n ≤ 12).
    pub fn generous() -> Self {
        Self::new(u64::MAX / 2, Duration::from_secs(24 * 3600))
    }
}

/// `Absent` means the search space was exhausted; `BudgetExhausted` means the
/// search stopped early and nothing is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    Found(T),
    Absent,
    BudgetExhausted,
}

impl<T> SearchOutcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("need n >= r + 2, got n = {n}, r = {r}")]
    InvalidSize { n: usize, r: usize },
    #[error("end cliques overlap")]
    OverlappingEnds,
    #[error("end tuple {0:?} is not an ordered clique of the required order")]
    BadEndClique(Vec<Vertex>),
    #[error("end vertex {0} lies in the avoided set")]
    AvoidOverlap(Vertex),
    #[error("n = {0} is too large for permutation enumeration")]
    TooLarge(usize),
}

/// A cyclic vertex order claimed to carry the `power`-th power of a
/// Hamiltonian cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCertificate {
    pub order: Vec<Vertex>,
    pub power: usize,
}

impl CycleCertificate {
    /// One vertex per line, cyclic order.
    pub fn to_text(&self) -> String {
        self.order.iter().map(|v| format!("{v}\n")).collect()
    }

    pub fn from_text(text: &str, power: usize) -> Result<Self, std::num::ParseIntError> {
        let order = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.trim().parse())
            .collect::<Result<_, _>>()?;
        Ok(Self { order, power })
    }
}

/// True iff `cert.order` is a permutation of `V(h)` and every two vertices at
/// cyclic distance at most `cert.power` are adjacent.
pub fn verify_certificate(h: &Graph, cert: &CycleCertificate) -> bool {
    let n = h.n();
    if cert.order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in &cert.order {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return false;
        }
    }
    for i in 0..n {
        for d in 1..=cert.power {
            let j = (i + d) % n;
            if j != i && !h.has_edge(cert.order[i], cert.order[j]) {
                return false;
            }
        }
    }
    true
}

struct Meter {
    nodes: u64,
    budget: SearchBudget,
    start: Instant,
    exhausted: bool,
}

impl Meter {
    fn new(budget: SearchBudget) -> Self {
        Self {
            nodes: 0,
            budget,
            start: Instant::now(),
            exhausted: false,
        }
    }

    /// Counts one node; true once either limit is hit.
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget.node_cap
            || (self.nodes & 0x3ff == 0 && self.start.elapsed() > self.budget.time_cap)
        {
            self.exhausted = true;
        }
        self.exhausted
    }
}

/// Orders candidates by ascending number of neighbours inside `pool`, then
/// by index.
fn ranked_candidates(g: &Graph, candidates: &FixedBitSet, pool: &FixedBitSet) -> Vec<Vertex> {
    let mut ranked: Vec<(usize, Vertex)> = candidates
        .ones()
        .map(|v| (g.neighbors(v).intersection_count(pool), v))
        .collect();
    ranked.sort_unstable();
    ranked.into_iter().map(|(_, v)| v).collect()
}

/// Searches for the `r`-th power of a Hamiltonian cycle in `h`.
///
/// The order starts at vertex 0, each new vertex must be adjacent to the
/// previous `r`, closing positions are checked against the first vertices as
/// soon as they are placed, and `order[1] < order[n-1]` removes reflections.
pub fn find_power_ham_cycle(
    h: &Graph,
    r: usize,
    budget: SearchBudget,
) -> Result<SearchOutcome<CycleCertificate>, SearchError> {
    let n = h.n();
    if n < r + 2 {
        return Err(SearchError::InvalidSize { n, r });
    }
    let identity = CycleCertificate {
        order: (0..n).collect(),
        power: r,
    };
    if r == 0 {
        return Ok(SearchOutcome::Found(identity));
    }
    if n <= 2 * r + 1 {
        // every pair is within cyclic distance r
        return Ok(if h.edge_count() == n * (n - 1) / 2 {
            SearchOutcome::Found(identity)
        } else {
            SearchOutcome::Absent
        });
    }
    if h.min_degree() < 2 * r {
        return Ok(SearchOutcome::Absent);
    }
    let mut state = CycleSearch {
        h,
        r,
        n,
        order: vec![0],
        unused: {
            let mut s = h.vertex_set();
            s.set(0, false);
            s
        },
        meter: Meter::new(budget),
    };
    if state.extend() {
        let cert = CycleCertificate {
            order: state.order,
            power: r,
        };
        debug_assert!(verify_certificate(h, &cert));
        Ok(SearchOutcome::Found(cert))
    } else if state.meter.exhausted {
        Ok(SearchOutcome::BudgetExhausted)
    } else {
        Ok(SearchOutcome::Absent)
    }
}

struct CycleSearch<'a> {
    h: &'a Graph,
    r: usize,
    n: usize,
    order: Vec<Vertex>,
    unused: FixedBitSet,
    meter: Meter,
}

impl CycleSearch<'_> {
    /// Each of the first `r` vertices must still see enough unused vertices to
    /// fill the closing positions that wrap around to it.
    fn closing_feasible(&self) -> bool {
        let (n, r) = (self.n, self.r);
        let next = self.order.len();
        for j in 0..r.min(next) {
            let first_closing = n - r + j;
            let unfilled = n - first_closing.max(next);
            if unfilled > 0
                && self.h.neighbors(self.order[j]).intersection_count(&self.unused) < unfilled
            {
                return false;
            }
        }
        true
    }

    fn extend(&mut self) -> bool {
        let (n, r) = (self.n, self.r);
        let pos = self.order.len();
        if pos == n {
            return true;
        }
        if self.meter.tick() {
            return false;
        }
        let mut cand = self.unused.clone();
        for &u in &self.order[pos.saturating_sub(r)..] {
            cand.intersect_with(self.h.neighbors(u));
        }
        if pos + r >= n {
            for &u in &self.order[..=pos + r - n] {
                cand.intersect_with(self.h.neighbors(u));
            }
        }
        if pos == n - 1 {
            // reflection symmetry: order[1] < order[n-1]
            let floor = self.order[1];
            for v in 0..=floor {
                cand.set(v, false);
            }
        }
        for v in ranked_candidates(self.h, &cand, &self.unused) {
            self.order.push(v);
            self.unused.set(v, false);
            if self.closing_feasible() && self.extend() {
                return true;
            }
            self.unused.set(v, true);
            self.order.pop();
            if self.meter.exhausted {
                return false;
            }
        }
        false
    }
}

/// Searches for an `r`-path that starts with `from`, ends with `to`, and has
/// exactly `internal` internal vertices, none of them in `avoid`.
pub fn find_power_path(
    h: &Graph,
    r: usize,
    from: &OrderedClique,
    to: &OrderedClique,
    avoid: &FixedBitSet,
    internal: usize,
    budget: SearchBudget,
) -> Result<SearchOutcome<PowerSeq>, SearchError> {
    for end in [from, to] {
        if end.order() != r || !h.is_clique(end.vertices()) {
            return Err(SearchError::BadEndClique(end.0.clone()));
        }
        if let Some(&v) = end.vertices().iter().find(|&&v| avoid.contains(v)) {
            return Err(SearchError::AvoidOverlap(v));
        }
    }
    if !from.is_disjoint(to) {
        return Err(SearchError::OverlappingEnds);
    }
    // with fewer than r internals the two ends see each other directly
    for (a, &u) in from.vertices().iter().enumerate() {
        for (j, &w) in to.vertices().iter().enumerate() {
            if internal + j <= a && !h.has_edge(u, w) {
                return Ok(SearchOutcome::Absent);
            }
        }
    }
    let mut pool = h.vertex_set();
    pool.difference_with(avoid);
    for &v in from.vertices().iter().chain(to.vertices()) {
        pool.set(v, false);
    }
    // closing[s]: vertices adjacent to to[0..r-s], candidates for the
    // internal position internal-1-s
    let closing: Vec<FixedBitSet> = (0..r.min(internal))
        .map(|s| {
            let mut set = h.joint_neighborhood(&to.vertices()[..r - s]);
            set.intersect_with(&pool);
            set
        })
        .collect();
    let mut state = PathSearch {
        h,
        r,
        internal,
        to,
        seq: from.vertices().to_vec(),
        pool,
        closing,
        meter: Meter::new(budget),
    };
    if state.extend() {
        let mut vertices = state.seq;
        vertices.extend_from_slice(to.vertices());
        Ok(SearchOutcome::Found(PowerSeq::path(vertices, r)))
    } else if state.meter.exhausted {
        Ok(SearchOutcome::BudgetExhausted)
    } else {
        Ok(SearchOutcome::Absent)
    }
}

struct PathSearch<'a> {
    h: &'a Graph,
    r: usize,
    internal: usize,
    to: &'a OrderedClique,
    seq: Vec<Vertex>,
    /// Allowed and still unused vertices.
    pool: FixedBitSet,
    closing: Vec<FixedBitSet>,
    meter: Meter,
}

impl PathSearch<'_> {
    fn closing_feasible(&self) -> bool {
        let placed = self.seq.len() - self.r;
        let mut needed = 0;
        for (s, set) in self.closing.iter().enumerate() {
            let position = self.internal - 1 - s;
            if position >= placed {
                needed += 1;
            }
            if needed > 0 && set.intersection_count(&self.pool) < needed {
                return false;
            }
        }
        true
    }

    fn extend(&mut self) -> bool {
        let r = self.r;
        let i = self.seq.len() - r;
        if i == self.internal {
            return true;
        }
        if self.meter.tick() {
            return false;
        }
        let mut cand = self.pool.clone();
        let pos = self.seq.len();
        for &u in &self.seq[pos.saturating_sub(r)..] {
            cand.intersect_with(self.h.neighbors(u));
        }
        if r > 0 && r + i >= self.internal {
            let upto = (r + i - self.internal).min(r.saturating_sub(1));
            for &w in &self.to.vertices()[..=upto] {
                cand.intersect_with(self.h.neighbors(w));
            }
        }
        for v in ranked_candidates(self.h, &cand, &self.pool) {
            self.seq.push(v);
            self.pool.set(v, false);
            if self.closing_feasible() && self.extend() {
                return true;
            }
            self.pool.set(v, true);
            self.seq.pop();
            if self.meter.exhausted {
                return false;
            }
        }
        false
    }
}

/// Size of a vertex-disjoint packing of `K_r`'s.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliquePacking {
    pub size: usize,
    /// `true`: `size` is the maximum; `false`: a greedy lower bound.
    pub exact: bool,
    pub cliques: Vec<Vec<Vertex>>,
}

/// Largest `n` for which [`max_disjoint_cliques`] is exact.
pub const EXACT_PACKING_LIMIT: usize = 14;

/// Maximum number of vertex-disjoint `K_r`'s; exact up to
/// [`EXACT_PACKING_LIMIT`] vertices, greedy (flagged) beyond.
pub fn max_disjoint_cliques(g: &Graph, r: usize) -> CliquePacking {
    let n = g.n();
    if r == 0 {
        return CliquePacking {
            size: 0,
            exact: true,
            cliques: vec![],
        };
    }
    if n > EXACT_PACKING_LIMIT {
        return greedy_packing(g, r);
    }
    let mut by_lowest: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut clique = Vec::new();
    collect_cliques(g, r, &g.vertex_set(), &mut clique, &mut |c| {
        let mask = c.iter().fold(0u32, |m, &v| m | 1 << v);
        by_lowest[c[0]].push(mask);
    });
    let mut memo = HashMap::new();
    let size = best_packing(n, &by_lowest, 0, &mut memo);
    // replay the memo to recover one optimal packing
    let mut cliques = Vec::new();
    let mut used = 0u32;
    while let Some(v) = (0..n).find(|&v| used & (1 << v) == 0) {
        let target = memo[&used];
        let skip = best_packing(n, &by_lowest, used | 1 << v, &mut memo);
        if skip == target {
            used |= 1 << v;
            continue;
        }
        let mask = *by_lowest[v]
            .iter()
            .find(|&&m| m & used == 0 && 1 + best_packing(n, &by_lowest, used | m, &mut memo) == target)
            .expect("memoized optimum is attained");
        cliques.push((0..n).filter(|&u| mask & (1 << u) != 0).collect());
        used |= mask;
    }
    CliquePacking {
        size,
        exact: true,
        cliques,
    }
}

fn best_packing(n: usize, by_lowest: &[Vec<u32>], used: u32, memo: &mut HashMap<u32, usize>) -> usize {
    if let Some(&v) = memo.get(&used) {
        return v;
    }
    let result = match (0..n).find(|&v| used & (1 << v) == 0) {
        None => 0,
        Some(v) => {
            let mut best = best_packing(n, by_lowest, used | 1 << v, memo);
            for &mask in &by_lowest[v] {
                if mask & used == 0 {
                    best = best.max(1 + best_packing(n, by_lowest, used | mask, memo));
                }
            }
            best
        }
    };
    memo.insert(used, result);
    result
}

/// Enumerates `r`-cliques with increasing vertex indices inside `allowed`.
fn collect_cliques(
    g: &Graph,
    r: usize,
    allowed: &FixedBitSet,
    clique: &mut Vec<Vertex>,
    f: &mut impl FnMut(&[Vertex]),
) {
    if clique.len() == r {
        f(clique);
        return;
    }
    let floor = clique.last().map_or(0, |&v| v + 1);
    let mut cand = allowed.clone();
    for &u in clique.iter() {
        cand.intersect_with(g.neighbors(u));
    }
    for v in cand.ones().filter(|&v| v >= floor) {
        clique.push(v);
        collect_cliques(g, r, allowed, clique, f);
        clique.pop();
    }
}

fn first_clique(g: &Graph, r: usize, allowed: &FixedBitSet, clique: &mut Vec<Vertex>) -> bool {
    if clique.len() == r {
        return true;
    }
    let floor = clique.last().map_or(0, |&v| v + 1);
    let mut cand = allowed.clone();
    for &u in clique.iter() {
        cand.intersect_with(g.neighbors(u));
    }
    let options: Vec<Vertex> = cand.ones().filter(|&v| v >= floor).collect();
    for v in options {
        clique.push(v);
        if first_clique(g, r, allowed, clique) {
            return true;
        }
        clique.pop();
    }
    false
}

fn greedy_packing(g: &Graph, r: usize) -> CliquePacking {
    let mut allowed = g.vertex_set();
    let mut cliques = Vec::new();
    loop {
        let mut clique = Vec::new();
        if !first_clique(g, r, &allowed, &mut clique) {
            break;
        }
        for &v in &clique {
            allowed.set(v, false);
        }
        cliques.push(clique);
    }
    CliquePacking {
        size: cliques.len(),
        exact: false,
        cliques,
    }
}

/// Largest `n` accepted by [`brute_force_oracle`].
pub const ORACLE_LIMIT: usize = 9;

/// Decides containment of the `r`-th power of a Hamiltonian cycle by trying
/// every cyclic order with vertex 0 first. Independent of
/// [`find_power_ham_cycle`]; meant for cross-checking it.
pub fn brute_force_oracle(h: &Graph, r: usize) -> Result<bool, SearchError> {
    let n = h.n();
    if n > ORACLE_LIMIT {
        return Err(SearchError::TooLarge(n));
    }
    if n < r + 2 {
        return Err(SearchError::InvalidSize { n, r });
    }
    let mut order: Vec<Vertex> = (0..n).collect();
    Ok(permute(h, r, &mut order, 1))
}

fn permute(h: &Graph, r: usize, order: &mut Vec<Vertex>, k: usize) -> bool {
    let n = order.len();
    if k == n {
        return (0..n).all(|i| {
            (1..=r).all(|d| {
                let j = (i + d) % n;
                j == i || h.has_edge(order[i], order[j])
            })
        });
    }
    for i in k..n {
        order.swap(k, i);
        if permute(h, r, order, k + 1) {
            return true;
        }
        order.swap(k, i);
    }
    false
}
