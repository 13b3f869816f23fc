use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{
    absorb, build_absorbing_path, build_reservoir, connect_through_reservoir, connector_internal, cover,
    select_absorber_family, Absorbed, AbsorberFamily, AbsorbingPath, AbsorptionError, CoverFamily, PipelineParams,
    Reservoir,
};
use crate::augment::AugmentedGraph;
use crate::graph::Vertex;
use crate::rng;
use crate::search::{verify_certificate, CycleCertificate};
use crate::seq::PowerSeq;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Precondition,
    Reservoir,
    Absorbers,
    AbsorbingPath,
    Cover,
    Stitch,
    Absorb,
    Verify,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Precondition => "precondition",
            Stage::Reservoir => "reservoir",
            Stage::Absorbers => "absorbers",
            Stage::AbsorbingPath => "absorbing_path",
            Stage::Cover => "cover",
            Stage::Stitch => "stitch",
            Stage::Absorb => "absorb",
            Stage::Verify => "verify",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One line of the pipeline trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageEvent {
    pub stage: Stage,
    pub ok: bool,
    pub attempts: usize,
    pub sizes: BTreeMap<&'static str, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub micros: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageFailure {
    pub stage: Stage,
    pub detail: String,
}

impl fmt::Display for StageFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.detail)
    }
}

/// How `A` and the cover paths were closed into a cycle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stitching {
    /// `pieces[0]` is the absorbing path; the rest are cover paths in the
    /// orientation used.
    pub pieces: Vec<PowerSeq>,
    /// `connections[i]` runs from the end of `pieces[i]` to the start of
    /// `pieces[(i+1) % len]`.
    pub connections: Vec<PowerSeq>,
    /// Reservoir vertices already used when each connection started.
    pub used_before: Vec<usize>,
    pub consumed: usize,
    /// Cover vertices dropped because the reservoir could not pay for
    /// their paths; they are absorbed instead.
    pub dropped: Vec<Vertex>,
    pub splits: usize,
}

impl Stitching {
    /// Vertices of the cycle before absorption, in cyclic order.
    pub fn cycle_order(&self) -> Vec<Vertex> {
        let mut order = Vec::new();
        for (p, c) in self.pieces.iter().zip(&self.connections) {
            order.extend_from_slice(&p.vertices);
            order.extend_from_slice(c.internal());
        }
        order
    }
}

/// Everything a pipeline run produced, successful or not.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub outcome: Result<CycleCertificate, StageFailure>,
    pub trace: Vec<StageEvent>,
    /// The reservoir with `used` as left by stitching.
    pub reservoir: Option<Reservoir>,
    pub family: Option<AbsorberFamily>,
    pub absorbing: Option<AbsorbingPath>,
    pub cover: Option<CoverFamily>,
    pub stitching: Option<Stitching>,
    /// The absorbed set `U` and the resulting path.
    pub absorbable: Option<Vec<Vertex>>,
    pub absorbed: Option<Absorbed>,
}

impl Assembly {
    pub fn certificate(&self) -> Option<&CycleCertificate> {
        self.outcome.as_ref().ok()
    }

    /// Attempts beyond the first, per stage.
    pub fn retries(&self) -> BTreeMap<Stage, usize> {
        self.trace
            .iter()
            .map(|e| (e.stage, e.attempts.saturating_sub(1)))
            .collect()
    }
}

struct Recorder {
    trace: Vec<StageEvent>,
    clock: Instant,
}

impl Recorder {
    fn event(&mut self, stage: Stage, ok: bool, attempts: usize, sizes: &[(&'static str, usize)], detail: Option<String>) {
        let micros = self.clock.elapsed().as_micros() as u64;
        self.clock = Instant::now();
        self.trace.push(StageEvent {
            stage,
            ok,
            attempts,
            sizes: sizes.iter().copied().collect(),
            detail,
            micros,
        });
    }
}

/// Runs reservoir, absorbing path, cover, stitching and absorption, and
/// re-verifies the resulting certificate.
pub fn assemble(h: &AugmentedGraph, params: &PipelineParams) -> Assembly {
    let mut asm = Assembly {
        outcome: Err(StageFailure {
            stage: Stage::Precondition,
            detail: String::new(),
        }),
        trace: Vec::new(),
        reservoir: None,
        family: None,
        absorbing: None,
        cover: None,
        stitching: None,
        absorbable: None,
        absorbed: None,
    };
    let mut rec = Recorder {
        trace: Vec::new(),
        clock: Instant::now(),
    };
    asm.outcome = run(h, params, &mut asm, &mut rec);
    asm.trace = rec.trace;
    asm
}

fn fail(rec: &mut Recorder, stage: Stage, attempts: usize, detail: String) -> Result<CycleCertificate, StageFailure> {
    rec.event(stage, false, attempts, &[], Some(detail.clone()));
    Err(StageFailure { stage, detail })
}

fn run(
    h: &AugmentedGraph,
    params: &PipelineParams,
    asm: &mut Assembly,
    rec: &mut Recorder,
) -> Result<CycleCertificate, StageFailure> {
    let n = h.n();
    let r = params.k + 1;
    let t = connector_internal(params.k);

    let reservoir = match build_reservoir(&h.det, params) {
        Ok(res) => res,
        Err(e @ AbsorptionError::PreconditionViolated { .. }) => return fail(rec, Stage::Precondition, 1, e.to_string()),
        Err(e) => return fail(rec, Stage::Reservoir, params.retries.reservoir, e.to_string()),
    };
    rec.event(Stage::Reservoir, true, reservoir.attempts, &[("reservoir", reservoir.size())], None);

    let mut absorbing = None;
    let mut last_err = String::new();
    let path_attempts = params.retries.absorbing_path.max(1);
    let mut used_attempts = 0;
    for attempt in 0..path_attempts {
        used_attempts = attempt + 1;
        let stage_params = PipelineParams {
            seed: rng::labelled_seed(params.seed, "absorbing", attempt as u64),
            ..*params
        };
        let family = match select_absorber_family(h, &reservoir.set, &stage_params) {
            Ok(f) => f,
            Err(e) => return fail(rec, Stage::Absorbers, params.retries.absorbers, e.to_string()),
        };
        rec.event(
            Stage::Absorbers,
            true,
            family.attempts,
            &[
                ("selected", family.selected),
                ("family", family.absorbers.len()),
                ("truncated", family.truncated),
                ("min_count", family.min_count),
            ],
            None,
        );
        match build_absorbing_path(h, &reservoir.set, &family.absorbers, params) {
            Ok(a) => {
                asm.family = Some(family);
                absorbing = Some(a);
                break;
            }
            Err(e) => last_err = e.to_string(),
        }
    }
    let Some(absorbing) = absorbing else {
        return fail(rec, Stage::AbsorbingPath, used_attempts, last_err);
    };
    rec.event(Stage::AbsorbingPath, true, used_attempts, &[("length", absorbing.path.len())], None);
    asm.absorbing = Some(absorbing.clone());

    let mut excluded = reservoir.set.clone();
    excluded.union_with(&absorbing.vertex_set(n));
    let mut covered = None;
    let cover_attempts = params.retries.cover.max(1);
    for attempt in 0..cover_attempts {
        used_attempts = attempt + 1;
        match cover(h, &excluded, params, attempt as u64) {
            Ok(c) => {
                covered = Some(c);
                break;
            }
            Err(e) => last_err = e.to_string(),
        }
    }
    let Some(covered) = covered else {
        return fail(rec, Stage::Cover, used_attempts, last_err);
    };
    rec.event(
        Stage::Cover,
        true,
        used_attempts,
        &[
            ("paths", covered.paths.len()),
            ("tiles", covered.tiles),
            ("leftover", covered.leftover.len()),
        ],
        None,
    );
    asm.cover = Some(covered.clone());

    let max_connections = {
        let cap = params.reservoir_use_cap(reservoir.size());
        let by_use = cap / t + 1;
        by_use.min(reservoir.size() / t)
    };
    let mut pieces = covered.paths.clone();
    let mut dropped = Vec::new();
    let mut splits = 0;
    if params.desk.balance_pieces {
        while 1 + pieces.len() > max_connections && !pieces.is_empty() {
            let (i, _) = pieces
                .iter()
                .enumerate()
                .min_by_key(|(i, p)| (p.len(), std::cmp::Reverse(*i)))
                .unwrap();
            dropped.extend(pieces.remove(i).vertices);
        }
        while 1 + pieces.len() < max_connections {
            let Some((i, _)) = pieces
                .iter()
                .enumerate()
                .filter(|(_, p)| p.len() >= 2 * r)
                .max_by_key(|(i, p)| (p.len(), std::cmp::Reverse(*i)))
            else {
                break;
            };
            let p = pieces.remove(i);
            let mid = p.len() / 2;
            pieces.insert(i, PowerSeq::path(p.vertices[mid..].to_vec(), r));
            pieces.insert(i, PowerSeq::path(p.vertices[..mid].to_vec(), r));
            splits += 1;
        }
    }

    let stitch_attempts = params.retries.stitch.max(1);
    let mut stitched = None;
    for attempt in 0..stitch_attempts {
        used_attempts = attempt + 1;
        let mut order = pieces.clone();
        if attempt > 0 {
            let mut rng = rng::stream(rng::labelled_seed(params.seed, "stitch", attempt as u64));
            order.shuffle(&mut rng);
        }
        let mut res = reservoir.clone();
        match stitch(h, &absorbing.path, order, &mut res, params) {
            Ok((pieces, connections, used_before)) => {
                stitched = Some((
                    Stitching {
                        consumed: res.used_count(),
                        pieces,
                        connections,
                        used_before,
                        dropped: dropped.clone(),
                        splits,
                    },
                    res,
                ));
                break;
            }
            Err(e) => last_err = e.to_string(),
        }
    }
    let Some((stitching, reservoir)) = stitched else {
        asm.reservoir = Some(reservoir);
        return fail(rec, Stage::Stitch, used_attempts, last_err);
    };
    rec.event(
        Stage::Stitch,
        true,
        used_attempts,
        &[
            ("connections", stitching.connections.len()),
            ("consumed", stitching.consumed),
            ("dropped", stitching.dropped.len()),
            ("splits", splits),
        ],
        None,
    );

    let mut on_cycle = FixedBitSet::with_capacity(n);
    for v in stitching.cycle_order() {
        on_cycle.insert(v);
    }
    let u: Vec<Vertex> = (0..n).filter(|&v| !on_cycle.contains(v)).collect();
    asm.reservoir = Some(reservoir);
    asm.stitching = Some(stitching.clone());
    asm.absorbable = Some(u.clone());
    let cap = params.absorbable_cap(n);
    if u.len() > cap {
        return fail(rec, Stage::Absorb, 1, format!("{} vertices left to absorb, cap {cap}", u.len()));
    }
    let absorbed = match absorb(h, &absorbing, &u) {
        Ok(a) => a,
        Err(e) => return fail(rec, Stage::Absorb, 1, e.to_string()),
    };
    rec.event(Stage::Absorb, true, 1, &[("absorbed", u.len())], None);

    let mut order = absorbed.path.vertices.clone();
    order.extend_from_slice(stitching.connections[0].internal());
    for (p, c) in stitching.pieces.iter().zip(&stitching.connections).skip(1) {
        order.extend_from_slice(&p.vertices);
        order.extend_from_slice(c.internal());
    }
    asm.absorbed = Some(absorbed);
    let cert = CycleCertificate { order, power: r };
    if !verify_certificate(&h.union, &cert) {
        return fail(rec, Stage::Verify, 1, "certificate does not verify".into());
    }
    rec.event(Stage::Verify, true, 1, &[("n", n)], None);
    Ok(cert)
}

type Stitched = (Vec<PowerSeq>, Vec<PowerSeq>, Vec<usize>);

/// Connects `a`, then each piece in turn, back to `a` through the
/// reservoir. A piece is reversed when its first orientation cannot be
/// reached.
fn stitch(
    h: &AugmentedGraph,
    a: &PowerSeq,
    order: Vec<PowerSeq>,
    res: &mut Reservoir,
    params: &PipelineParams,
) -> Result<Stitched, AbsorptionError> {
    let mut placed = vec![a.clone()];
    let mut connections = Vec::new();
    let mut used_before = Vec::new();
    for piece in order {
        let from = placed.last().unwrap().last_end();
        let before = res.used_count();
        let (link, oriented) = match connect_through_reservoir(h, &from, &piece.first_end(), res, params) {
            Ok(link) => (link, piece),
            Err(AbsorptionError::ConnectFailure(_)) => {
                let flipped = piece.reversed();
                let link = connect_through_reservoir(h, &from, &flipped.first_end(), res, params)?;
                (link, flipped)
            }
            Err(e) => return Err(e),
        };
        used_before.push(before);
        connections.push(link);
        placed.push(oriented);
    }
    let before = res.used_count();
    let closing = connect_through_reservoir(h, &placed.last().unwrap().last_end(), &a.first_end(), res, params)?;
    used_before.push(before);
    connections.push(closing);
    Ok((placed, connections, used_before))
}
