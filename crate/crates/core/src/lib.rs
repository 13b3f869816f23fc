//! Powers of Hamiltonian cycles in dense graphs augmented by sparse random
//! graphs.
//!
//! The crate covers the whole laboratory: graph primitives ([`graph`],
//! [`seq`], [`degrees`]), generators ([`constructions`], [`augment`]), exact
//! search ([`search`]), the constructive absorption pipeline
//! ([`absorption`]), probability bounds ([`bounds`]) and Monte Carlo drivers
//! ([`experiments`]).

pub mod absorption;
pub mod augment;
pub mod bounds;
pub mod constructions;
pub mod degrees;
pub mod edgelist;
pub mod experiments;
pub mod graph;
pub mod rng;
pub mod search;
pub mod seq;

pub use graph::{Graph, Vertex};
pub use seq::{OrderedClique, PowerSeq, SeqKind};
