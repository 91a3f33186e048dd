//! Shared query-side plumbing: the per-query context handed to engines and
//! the error surface of colour queries.

use crate::graph::VertexId;
use crate::orientation::Orientation;
use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum QueryError {
    #[error("vertex {v} out of range (n = {n})")]
    VertexOutOfRange { v: VertexId, n: usize },
    #[error("residual palette exhausted (internal invariant break)")]
    PaletteExhausted,
}

/// Knobs shared by the randomised engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub seed: u64,
    /// Slack parameter of the two-level engine; at least 3.
    pub delta: u32,
    /// Out-degree below which the two-level engine delegates outright.
    pub base_threshold: u64,
}

impl EngineConfig {
    pub fn new(seed: u64, delta: u32, base_threshold: u64) -> Self {
        EngineConfig { seed, delta: delta.max(3), base_threshold }
    }
}

/// Borrowed view of everything an engine may read during one query: the
/// orientation current at `epoch` plus configuration. Engines must not read
/// the graph except through the orientation.
#[derive(Clone, Copy)]
pub struct Ctx<'a> {
    pub orientation: &'a Orientation,
    pub epoch: u64,
    pub cfg: &'a EngineConfig,
}

impl<'a> Ctx<'a> {
    pub fn new(orientation: &'a Orientation, epoch: u64, cfg: &'a EngineConfig) -> Self {
        Ctx { orientation, epoch, cfg }
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), QueryError> {
        if (v as usize) < self.orientation.n() {
            Ok(())
        } else {
            Err(QueryError::VertexOutOfRange { v, n: self.orientation.n() })
        }
    }
}
