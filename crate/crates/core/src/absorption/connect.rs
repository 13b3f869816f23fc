use fixedbitset::FixedBitSet;

use super::{AbsorptionError, PipelineParams, Reservoir};
use crate::augment::AugmentedGraph;
use crate::search::{find_power_path, SearchBudget, SearchOutcome};
use crate::seq::{OrderedClique, PowerSeq};

/// A `(k+1)`-path from `from` to `to` in `H` with exactly `(k+1)2^{k+1}`
/// internal vertices, none in `avoid`.
///
/// The size bound on `avoid` is not enforced; the search decides.
pub fn connect(
    h: &AugmentedGraph,
    from: &OrderedClique,
    to: &OrderedClique,
    avoid: &FixedBitSet,
    params: &PipelineParams,
) -> Result<PowerSeq, AbsorptionError> {
    let budget = SearchBudget::nodes(params.connect_nodes);
    match find_power_path(&h.union, params.k + 1, from, to, avoid, params.connector_internal(), budget)? {
        SearchOutcome::Found(seq) => Ok(seq),
        SearchOutcome::Absent => Err(AbsorptionError::ConnectFailure("no connecting path".into())),
        SearchOutcome::BudgetExhausted => Err(AbsorptionError::ConnectFailure("search budget exhausted".into())),
    }
}

/// [`connect`] with every internal vertex drawn from `R ∖ used`; marks the
/// internals as used on success.
pub fn connect_through_reservoir(
    h: &AugmentedGraph,
    from: &OrderedClique,
    to: &OrderedClique,
    res: &mut Reservoir,
    params: &PipelineParams,
) -> Result<PowerSeq, AbsorptionError> {
    let used = res.used_count();
    let cap = params.reservoir_use_cap(res.size());
    let available = res.available();
    let needed = params.connector_internal();
    if used > cap || available.count_ones(..) < needed {
        return Err(AbsorptionError::ReservoirExhausted {
            used,
            cap,
            available: available.count_ones(..),
            needed,
        });
    }
    let mut avoid = available.clone();
    avoid.toggle_range(..);
    for &v in from.vertices().iter().chain(to.vertices()) {
        avoid.set(v, false);
    }
    let seq = connect(h, from, to, &avoid, params)?;
    for &v in seq.internal() {
        res.used.insert(v);
    }
    Ok(seq)
}
