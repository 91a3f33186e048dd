//! Implicit, arboricity-parameterised vertex colouring for dynamic graphs.
//!
//! A [`Runner`] maintains an undirected graph under edge insertions and
//! deletions, together with a bounded out-degree acyclic orientation and an
//! arboricity estimate. Colours are never stored: a query computes the
//! vertex's colour on demand from the orientation, memoised per update
//! epoch, so any set of answered queries extends to a proper colouring.
//!
//! Three engines answer queries behind one dispatcher:
//!
//! * [`det`]: deterministic, palette O(alpha^2), via two rounds of
//!   cover-free colour reduction over a 2^dmax base colouring;
//! * [`rand_simple`]: randomised, palette O(alpha log alpha), via colour
//!   experiments plus greedy residual colouring of the shattered leftovers;
//! * [`rand_better`]: randomised two-level scheme: badness-controlled
//!   arb-defective classes coloured by the simple engine, with its own
//!   residual fallback.
//!
//! Above a configurable arboricity threshold the dispatcher routes queries
//! through a random vertex partition whose parts have low arboricity with
//! high probability, keeping per-part palettes disjoint via label prefixes.

pub mod arith;
pub mod base_colour;
pub mod cover_free;
pub mod det;
pub mod dispatcher;
pub mod engine;
pub mod gen;
pub mod graph;
pub mod label;
mod memo;
pub mod oracle;
pub mod orientation;
pub mod prf;
pub mod rand_better;
pub mod rand_simple;
pub mod runner;
pub mod stream;

pub use dispatcher::EngineChoice;
pub use engine::{EngineConfig, QueryError};
pub use graph::{DynGraph, GraphError, UpdateReceipt, VertexId};
pub use label::{ColourLabel, EngineKind};
pub use oracle::ValidationReport;
pub use orientation::Orientation;
pub use runner::{RunConfig, Runner};
pub use stream::{RunOutput, RunStats, StreamError, StreamOp, UpdateStream};
