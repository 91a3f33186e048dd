//! One maintained instance: the dynamic graph, its orientation and the
//! dispatcher, wired together under a single update/query surface.

use crate::arith::ceil_log2;
use crate::dispatcher::{DispatchConfig, Dispatcher, EngineChoice};
use crate::engine::{EngineConfig, QueryError};
use crate::graph::{DynGraph, GraphError, UpdateReceipt, VertexId};
use crate::label::ColourLabel;
use crate::oracle::{self, ValidationReport};
use crate::orientation::Orientation;
use crate::prf::keyed_hash;
use crate::rand_better::BetterStats;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub engine: EngineChoice,
    pub seed: u64,
    pub delta: u32,
    /// Defaults to ceil(log2 n)^2 when unset.
    pub base_threshold: Option<u64>,
    /// Updates between forced orientation rebuilds; defaults to m/2.
    pub rebuild_period: Option<u64>,
    /// Defaults to ceil(log2 n) when unset.
    pub direct_threshold: Option<u64>,
    /// Defaults to n^2 when unset.
    pub repartition_period: Option<u64>,
    pub verbose_labels: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            engine: EngineChoice::AutoMin,
            seed: 0,
            delta: 3,
            base_threshold: None,
            rebuild_period: None,
            direct_threshold: None,
            repartition_period: None,
            verbose_labels: false,
        }
    }
}

impl RunConfig {
    pub fn with_engine(engine: EngineChoice, seed: u64) -> Self {
        RunConfig { engine, seed, ..Default::default() }
    }
}

pub struct Runner {
    graph: DynGraph,
    orientation: Orientation,
    dispatcher: Dispatcher,
}

impl Runner {
    pub fn new(n: usize, cfg: &RunConfig) -> Self {
        let log_n = ceil_log2(n as u64).max(1) as u64;
        let graph = DynGraph::new(n);
        let orientation = Orientation::with_rebuild_period(&graph.adjacency(), cfg.rebuild_period);
        let dispatch = DispatchConfig {
            engine: cfg.engine,
            direct_threshold: cfg.direct_threshold.unwrap_or(log_n),
            partition_seed: keyed_hash(&[cfg.seed, 0x70617274]),
            repartition_period: cfg.repartition_period.unwrap_or((n as u64).pow(2).max(1)),
            engine_cfg: EngineConfig::new(
                cfg.seed,
                cfg.delta,
                cfg.base_threshold.unwrap_or(log_n * log_n),
            ),
        };
        Runner { graph, orientation, dispatcher: Dispatcher::new(dispatch) }
    }

    pub fn graph(&self) -> &DynGraph {
        &self.graph
    }

    pub fn orientation(&self) -> &Orientation {
        &self.orientation
    }

    pub fn dispatcher(&self) -> &Dispatcher {
        &self.dispatcher
    }

    pub fn insert_edge(&mut self, u: VertexId, v: VertexId) -> Result<UpdateReceipt, GraphError> {
        let receipt = self.graph.insert_edge(u, v)?;
        self.orientation.notify_insert(&self.graph, u, v);
        Ok(receipt)
    }

    pub fn delete_edge(&mut self, u: VertexId, v: VertexId) -> Result<UpdateReceipt, GraphError> {
        let receipt = self.graph.delete_edge(u, v)?;
        self.orientation.notify_delete(&self.graph, u, v);
        Ok(receipt)
    }

    pub fn colour(&mut self, v: VertexId) -> Result<ColourLabel, QueryError> {
        self.dispatcher.colour_query(&self.graph, &self.orientation, v)
    }

    /// Materialise every vertex in the given order, validate propriety and
    /// assemble the report.
    pub fn validate_in_order(&mut self, order: &[VertexId]) -> Result<ValidationReport, QueryError> {
        // Warm pass settles all engine state for this epoch, so component
        // statistics exist before the checking pass re-reads the values.
        for &v in order {
            self.colour(v)?;
        }
        let sizes = self.dispatcher.shatter_components(&self.graph, &self.orientation);
        let max_out = self.orientation.dmax();
        let (graph, orientation, dispatcher) =
            (&self.graph, &self.orientation, &mut self.dispatcher);
        oracle::materialise_and_check(
            graph,
            order,
            |v| dispatcher.colour_query(graph, orientation, v).map(|l| l.value),
            max_out,
            &sizes,
        )
    }

    pub fn validate(&mut self) -> Result<ValidationReport, QueryError> {
        let order: Vec<VertexId> = (0..self.graph.n() as VertexId).collect();
        self.validate_in_order(&order)
    }

    /// Aggregated two-level-engine counters (direct and part instances).
    pub fn better_stats(&self) -> BetterStats {
        self.dispatcher.better_stats()
    }
}
