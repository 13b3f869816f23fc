use serde::{Deserialize, Serialize};

/// Multipliers applied to the asymptotic floors and caps of the pipeline.
///
/// Every factor is 1 in the asymptotic regime. At a few dozen vertices the
/// asymptotic constants are vacuous (a reservoir of `γ²n` vertices with
/// `γ < ε/4^{k+2}` is empty), so experiment presets loosen them explicitly
/// and the checks run against the scaled values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeskScale {
    /// Scales the reservoir degree threshold `k/(k+1) + ε/2`.
    pub reservoir_degree: f64,
    /// Scales the consumed-reservoir cap `ε|R|/4`.
    pub reservoir_use: f64,
    /// Scales the support threshold `βn^{2k}` of the absorber graphs.
    pub absorber_support: f64,
    /// Scales the auto-derived selection probability `q`.
    pub selection: f64,
    /// Scales the family size cap `3γ^{3/2}n`.
    pub family_size: f64,
    /// Scales the per-vertex absorber floor `2γ²n`.
    pub absorber_floor: f64,
    /// Scales the absorbing path length cap `γn/2`.
    pub path_length: f64,
    /// Scales the cover leftover cap `γ²n` and the absorbable set cap `2γ²n`.
    pub leftover: f64,
    /// Scales the cover path count cap `γ³n`.
    pub path_count: f64,
    /// Split cover paths so that stitching consumes the reservoir, and drop
    /// the shortest ones when the reservoir cannot pay for every connection.
    pub balance_pieces: bool,
}

impl DeskScale {
    pub const ASYMPTOTIC: DeskScale = DeskScale {
        reservoir_degree: 1.0,
        reservoir_use: 1.0,
        absorber_support: 1.0,
        selection: 1.0,
        family_size: 1.0,
        absorber_floor: 1.0,
        path_length: 1.0,
        leftover: 1.0,
        path_count: 1.0,
        balance_pieces: false,
    };
}

impl Default for DeskScale {
    fn default() -> Self {
        Self::ASYMPTOTIC
    }
}

/// Attempts per randomized stage before it is reported as failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetryCaps {
    pub reservoir: usize,
    pub absorbers: usize,
    pub absorbing_path: usize,
    pub cover: usize,
    pub stitch: usize,
}

impl Default for RetryCaps {
    fn default() -> Self {
        Self {
            reservoir: 200,
            absorbers: 200,
            absorbing_path: 5,
            cover: 5,
            stitch: 5,
        }
    }
}

/// Constants of the construction, `α = k/(k+1) + ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub k: usize,
    pub eps: f64,
    pub gamma: f64,
    pub beta: f64,
    /// Augmentation constant: the random part has `p = C/n`.
    pub c: f64,
    /// Blow-up class size of the cover tiles.
    pub m: usize,
    /// Regularity-side constants. The desk tiling does not consult them;
    /// they are carried so run records keep the full hierarchy.
    pub tau: f64,
    pub delta: f64,
    /// Absorber selection probability; `None` derives `γ^{3/2} C^{-1} n^{-2k}`.
    pub q: Option<f64>,
    pub retries: RetryCaps,
    pub desk: DeskScale,
    /// Node cap for each connection search.
    pub connect_nodes: u64,
    pub seed: u64,
}

impl PipelineParams {
    /// Parameters with asymptotic scaling, `β = γ`, `m = 2`.
    pub fn new(k: usize, eps: f64, gamma: f64, c: f64, seed: u64) -> Self {
        Self {
            k,
            eps,
            gamma,
            beta: gamma,
            c,
            m: 2,
            tau: 1e-3,
            delta: 1e-3,
            q: None,
            retries: RetryCaps::default(),
            desk: DeskScale::ASYMPTOTIC,
            connect_nodes: 200_000,
            seed,
        }
    }

    /// Desk-scale preset for `n` between roughly 40 and 120.
    ///
    /// `γ` is chosen so that `|R| = ⌊γ²n⌋` pays for exactly three
    /// connections when `k = 0` and two otherwise, and the consumed-reservoir
    /// cap is loosened so that all of them fit. The absorbing path may use
    /// `3γn/2` vertices when `k = 0` and `γn` otherwise, every vertex needs one `x`-absorber when `k = 0`, and
    /// there is no per-vertex floor for `k ≥ 1`. Cover paths are capped at `n`
    /// since stitching rebalances them.
    pub fn desk_preset(k: usize, n: usize, alpha: f64, c: f64, seed: u64) -> Self {
        let eps = alpha - k as f64 / (k as f64 + 1.0);
        let t = connector_internal(k);
        let connections = if k == 0 { 3 } else { 2 };
        let reservoir = connections * t;
        let gamma = ((reservoir as f64 + 0.5) / n as f64).sqrt();
        let two_gamma_sq_n = 2.0 * gamma * gamma * n as f64;
        let desk = DeskScale {
            reservoir_degree: 0.5,
            reservoir_use: (4 * (connections - 1) * t) as f64 / (eps * reservoir as f64) + 1e-6,
            absorber_support: 1.0,
            selection: 3.0,
            family_size: 1.0,
            absorber_floor: if k == 0 { 1.0 / two_gamma_sq_n } else { 0.0 },
            path_length: if k == 0 { 3.0 } else { 1.0 },
            leftover: 2.0,
            path_count: 1.0 / gamma.powi(3),
            balance_pieces: true,
        };
        Self {
            beta: 0.1,
            desk,
            ..Self::new(k, eps, gamma, c, seed)
        }
    }

    /// `α = k/(k+1) + ε`.
    pub fn alpha(&self) -> f64 {
        self.k as f64 / (self.k as f64 + 1.0) + self.eps
    }

    /// Whether `γ < ε/4^{k+2}` as the absorbing stage assumes.
    pub fn gamma_in_range(&self) -> bool {
        self.gamma > 0.0 && self.gamma < self.eps / 4f64.powi(self.k as i32 + 2)
    }

    /// Internal vertices of every connection: `(k+1)·2^{k+1}`.
    pub fn connector_internal(&self) -> usize {
        connector_internal(self.k)
    }

    /// `⌊γ²n⌋`.
    pub fn reservoir_size(&self, n: usize) -> usize {
        (self.gamma * self.gamma * n as f64 + 1e-9).floor() as usize
    }

    /// Minimum `|N(v) ∩ R|` for every `v`.
    pub fn reservoir_degree_floor(&self, reservoir: usize) -> f64 {
        let k = self.k as f64;
        self.desk.reservoir_degree * (k / (k + 1.0) + self.eps / 2.0) * reservoir as f64
    }

    /// Largest consumed-reservoir size at which another connection may
    /// start.
    pub fn reservoir_use_cap(&self, reservoir: usize) -> usize {
        let cap = self.desk.reservoir_use * self.eps * reservoir as f64 / 4.0;
        (cap + 1e-9).floor().min(reservoir as f64) as usize
    }

    /// The selection probability, explicit or `γ^{3/2} C^{-1} n^{-2k}` scaled.
    pub fn selection_probability(&self, n: usize) -> f64 {
        let q = self.q.unwrap_or_else(|| {
            self.desk.selection * self.gamma.powf(1.5) / self.c.max(f64::MIN_POSITIVE)
                * (n as f64).powi(-2 * self.k as i32)
        });
        q.clamp(0.0, 1.0)
    }

    /// Support threshold `βn^{2k}` for absorber-graph edges.
    pub fn absorber_support_threshold(&self, n: usize) -> f64 {
        self.desk.absorber_support * self.beta * (n as f64).powi(2 * self.k as i32)
    }

    /// Cap `3γ^{3/2}n` on the pruned family.
    pub fn family_size_cap(&self, n: usize) -> usize {
        (self.desk.family_size * 3.0 * self.gamma.powf(1.5) * n as f64 + 1e-9).floor() as usize
    }

    /// Required number of `x`-absorbers per vertex, `2γ²n` scaled.
    pub fn absorber_floor(&self, n: usize) -> usize {
        (self.desk.absorber_floor * 2.0 * self.gamma * self.gamma * n as f64 - 1e-9)
            .ceil()
            .max(0.0) as usize
    }

    /// Cap `γn/2` on the absorbing path.
    pub fn absorbing_path_cap(&self, n: usize) -> usize {
        (self.desk.path_length * self.gamma * n as f64 / 2.0 + 1e-9).floor() as usize
    }

    /// Cap `γ²n` on the vertices a cover leaves uncovered.
    pub fn leftover_cap(&self, n: usize) -> usize {
        (self.desk.leftover * self.gamma * self.gamma * n as f64 + 1e-9).floor() as usize
    }

    /// Cap `2γ²n` on the set handed to the absorbing path.
    pub fn absorbable_cap(&self, n: usize) -> usize {
        (self.desk.leftover * 2.0 * self.gamma * self.gamma * n as f64 + 1e-9).floor() as usize
    }

    /// Cap `γ³n` on the number of cover paths (at least 1).
    pub fn path_count_cap(&self, n: usize) -> usize {
        ((self.desk.path_count * self.gamma.powi(3) * n as f64 + 1e-9).floor() as usize).max(1)
    }
}

/// `(k+1)·2^{k+1}`.
pub fn connector_internal(k: usize) -> usize {
    (k + 1) << (k + 1)
}

/// `ℓ_k = (k+1)(2^{k+1} − 2)`.
pub fn walk_internal(k: usize) -> usize {
    (k + 1) * ((1 << (k + 1)) - 2)
}
