use fixedbitset::FixedBitSet;
use rand::seq::index;

use super::{AbsorptionError, PipelineParams};
use crate::graph::{set_of, Graph, Vertex};
use crate::rng;

/// A reservoir `R` and the part `used ⊆ R` already spent on connections.
#[derive(Debug, Clone, PartialEq)]
pub struct Reservoir {
    pub set: FixedBitSet,
    pub used: FixedBitSet,
    /// Samples drawn before this one was accepted (1 = first sample).
    pub attempts: usize,
}

impl Reservoir {
    pub fn new(set: FixedBitSet) -> Self {
        let used = FixedBitSet::with_capacity(set.len());
        Self { set, used, attempts: 1 }
    }

    pub fn size(&self) -> usize {
        self.set.count_ones(..)
    }

    pub fn used_count(&self) -> usize {
        self.used.count_ones(..)
    }

    /// `R ∖ used`.
    pub fn available(&self) -> FixedBitSet {
        let mut avail = self.set.clone();
        avail.difference_with(&self.used);
        avail
    }

    pub fn members(&self) -> Vec<Vertex> {
        self.set.ones().collect()
    }

    /// Whether every vertex of `g` has at least `floor` neighbours in `R`.
    pub fn satisfies_degree(&self, g: &Graph, floor: f64) -> bool {
        (0..g.n()).all(|v| g.neighbors(v).intersection_count(&self.set) as f64 >= floor - 1e-9)
    }
}

/// `⌈(k/(k+1) + ε)n⌉`, the minimum degree the pipeline assumes.
pub(crate) fn required_degree(params: &PipelineParams, n: usize) -> usize {
    (params.alpha() * n as f64 - 1e-9).ceil().max(0.0) as usize
}

/// Samples `R` uniformly among `⌊γ²n⌋`-sets until every vertex has enough
/// neighbours in it.
pub fn build_reservoir(g: &Graph, params: &PipelineParams) -> Result<Reservoir, AbsorptionError> {
    let n = g.n();
    let required = required_degree(params, n);
    if g.min_degree() < required {
        return Err(AbsorptionError::PreconditionViolated {
            min_degree: g.min_degree(),
            required,
        });
    }
    let size = params.reservoir_size(n);
    if size == 0 {
        return Err(AbsorptionError::DegenerateReservoir { size });
    }
    let floor = params.reservoir_degree_floor(size);
    let attempts = params.retries.reservoir.max(1);
    for attempt in 0..attempts {
        let mut rng = rng::stream(rng::labelled_seed(params.seed, "reservoir", attempt as u64));
        let picked = index::sample(&mut rng, n, size);
        let mut res = Reservoir::new(set_of(n, picked.iter()));
        if res.satisfies_degree(g, floor) {
            res.attempts = attempt + 1;
            return Ok(res);
        }
    }
    Err(AbsorptionError::ReservoirFailure { attempts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_first_sample() {
        let p = PipelineParams::new(1, 0.2, 0.3, 10.0, 5);
        let r = build_reservoir(&Graph::complete(50), &p).unwrap();
        assert_eq!(r.attempts, 1);
        assert_eq!(r.size(), 4);
        assert_eq!(r.used_count(), 0);
    }

    #[test]
    fn degenerate_sizes() {
        let p = PipelineParams::new(1, 0.2, 0.1, 10.0, 5);
        assert_eq!(
            build_reservoir(&Graph::complete(50), &p),
            Err(AbsorptionError::DegenerateReservoir { size: 0 })
        );
    }

    #[test]
    fn precondition_checked() {
        let p = PipelineParams::new(1, 0.2, 0.3, 10.0, 5);
        assert!(matches!(
            build_reservoir(&Graph::cycle(50), &p),
            Err(AbsorptionError::PreconditionViolated { .. })
        ));
    }
}
