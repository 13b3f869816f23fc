//! The absorption pipeline: reservoir, connections, absorbers, the absorbing
//! path, the almost-cover by power paths, and the final assembly into the
//! `(k+1)`-st power of a Hamiltonian cycle.
//!
//! Every stage works in `H = G ∪ G(n, p)` and returns plain data so tests can
//! re-validate intermediate structures independently.

mod absorbers;
mod absorbing;
mod assemble;
mod connect;
mod cover;
mod kwalks;
mod params;
mod reservoir;

use thiserror::Error;

use crate::graph::Vertex;
use crate::search::SearchError;

pub use absorbers::{
    build_absorber_graph, for_each_absorber, prune_overlapping, select_absorber_family, Absorber,
    AbsorberFamily, AbsorberGraph,
};
pub use absorbing::{absorb, build_absorbing_path, insert_vertex, Absorbed, AbsorbingPath, Insertion};
pub use assemble::{assemble, Assembly, Stage, StageEvent, StageFailure, Stitching};
pub use connect::{connect, connect_through_reservoir};
pub use cover::{cover, CoverFamily};
pub use kwalks::{enumerate_kwalks, KWalkReport};
pub use params::{connector_internal, walk_internal, DeskScale, PipelineParams, RetryCaps};
pub use reservoir::{build_reservoir, Reservoir};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AbsorptionError {
    #[error("minimum degree {min_degree} is below the required {required}")]
    PreconditionViolated { min_degree: usize, required: usize },
    #[error("reservoir of size floor(gamma^2 n) = {size} is degenerate")]
    DegenerateReservoir { size: usize },
    #[error("no valid reservoir after {attempts} samples")]
    ReservoirFailure { attempts: usize },
    #[error("connection failed: {0}")]
    ConnectFailure(String),
    #[error("reservoir exhausted: {used} used, cap {cap}, {available} available, {needed} needed")]
    ReservoirExhausted {
        used: usize,
        cap: usize,
        available: usize,
        needed: usize,
    },
    #[error("k = {k} is not supported here")]
    Unsupported { k: usize },
    #[error("absorber shortfall at {x:?}: {count} absorbers, floor {floor}")]
    AbsorberShortfall {
        x: Option<Vertex>,
        count: usize,
        floor: usize,
    },
    #[error("absorbing path has {len} vertices, cap {cap}")]
    PathTooLong { len: usize, cap: usize },
    #[error("vertex {x} cannot be absorbed")]
    AbsorptionFailure { x: Vertex },
    #[error("cover leaves {leftover} vertices (cap {leftover_cap}) in {paths} paths (cap {path_cap})")]
    CoverShortfall {
        leftover: usize,
        leftover_cap: usize,
        paths: usize,
        path_cap: usize,
    },
    #[error(transparent)]
    Search(#[from] SearchError),
}
