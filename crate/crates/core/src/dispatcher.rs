//! Top-level query routing: direct engines for low arboricity, random
//! vertex partition into low-arboricity parts above the threshold.
//!
//! Part membership is a pure function of (partition seed, generation,
//! scale, vertex), so adjacent vertices either share a part (inner-engine
//! propriety applies) or differ in the label prefix. Part views carry
//! lazily rebuilt orientations, cached for the current epoch only.

use std::collections::HashMap;

use crate::arith::ceil_log2;
use crate::det::{self, DetEngine};
use crate::engine::{Ctx, EngineConfig, QueryError};
use crate::graph::{DynGraph, VertexId};
use crate::label::{ColourLabel, EngineKind};
use crate::orientation::Orientation;
use crate::prf::KeyStream;
use crate::rand_better::{self, BetterEngine, BetterStats};
use crate::rand_simple::{self, SimpleEngine};

const TAG_PARTITION: u64 = 0x50415254; // "PART"

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Det,
    RandSimple,
    RandBetter,
    /// Run whichever randomised family currently accounts for the smaller
    /// palette.
    AutoMin,
}

impl EngineChoice {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "det" => Some(EngineChoice::Det),
            "rand-simple" => Some(EngineChoice::RandSimple),
            "rand-better" => Some(EngineChoice::RandBetter),
            "auto-min" => Some(EngineChoice::AutoMin),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EngineChoice::Det => "det",
            EngineChoice::RandSimple => "rand-simple",
            EngineChoice::RandBetter => "rand-better",
            EngineChoice::AutoMin => "auto-min",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DispatchConfig {
    pub engine: EngineChoice,
    /// alpha_hat at or below this routes to the whole-graph engines.
    pub direct_threshold: u64,
    pub partition_seed: u64,
    /// Updates per partition-seed generation.
    pub repartition_period: u64,
    pub engine_cfg: EngineConfig,
}

/// Part count at a scale: ceil(8 * 2^scale / log2 n), at least one part.
pub fn parts_at_scale(scale: u32, n: usize) -> u64 {
    let log_n = ceil_log2(n as u64).max(1) as u64;
    (8u64 << scale).div_ceil(log_n).max(1)
}

/// Pure part assignment.
pub fn part_of(partition_seed: u64, generation: u64, scale: u32, v: VertexId, y: u64) -> u32 {
    KeyStream::new(&[partition_seed, generation, TAG_PARTITION, scale as u64, v as u64])
        .next_below(y) as u32
}

/// Adjacency of one part's subgraph view: edges survive only when both
/// endpoints hash into the part.
pub fn part_adjacency(
    g: &DynGraph,
    partition_seed: u64,
    generation: u64,
    scale: u32,
    part: u32,
) -> Vec<Vec<VertexId>> {
    let y = parts_at_scale(scale, g.n());
    g.adjacency_filtered(|v| part_of(partition_seed, generation, scale, v, y) == part)
}

#[derive(Debug, Default)]
struct EngineSet {
    det: DetEngine,
    simple: SimpleEngine,
    better: BetterEngine,
}

impl EngineSet {
    fn query(&mut self, kind: EngineKind, ctx: &Ctx, v: VertexId) -> Result<ColourLabel, QueryError> {
        match kind {
            EngineKind::Det => self.det.det_colour(ctx, v),
            EngineKind::RandSimple => self.simple.colour_query(ctx, v),
            EngineKind::RandBetter => self.better.colour_query(ctx, v),
        }
    }
}

struct PartInstance {
    orientation: Orientation,
    engines: EngineSet,
}

pub struct Dispatcher {
    pub cfg: DispatchConfig,
    direct: EngineSet,
    parts: HashMap<(u32, u32), PartInstance>,
    cache_epoch: u64,
    span_cache: Option<(u64, EngineKind, u64)>,
    /// Two-level-engine counters folded out of discarded part instances.
    folded_better: BetterStats,
}

fn fold_better(into: &mut BetterStats, s: &BetterStats) {
    into.proposals_made += s.proposals_made;
    into.outcomes_required += s.outcomes_required;
    into.outcome_weight += s.outcome_weight;
    into.max_badness_seen = into.max_badness_seen.max(s.max_badness_seen);
    into.min_remaining_after_prune = into.min_remaining_after_prune.min(s.min_remaining_after_prune);
}

/// Inner palette bound for one family as a function of orientation width.
fn family_bound(kind: EngineKind, d: u32, cfg: &EngineConfig) -> u64 {
    match kind {
        EngineKind::Det => det::palette_bound_for_dmax(d),
        EngineKind::RandSimple => rand_simple::palette_bound_for_dmax(d),
        EngineKind::RandBetter => {
            rand_better::palette_bound_for_dmax(d, cfg.delta, cfg.base_threshold)
        }
    }
}

impl Dispatcher {
    pub fn new(cfg: DispatchConfig) -> Self {
        Dispatcher {
            cfg,
            direct: EngineSet::default(),
            parts: HashMap::new(),
            cache_epoch: 0,
            span_cache: None,
            folded_better: BetterStats::default(),
        }
    }

    /// Lifetime counters of the two-level engine, across the direct instance
    /// and every part instance (including already-discarded ones).
    pub fn better_stats(&self) -> BetterStats {
        let mut total = self.folded_better;
        fold_better(&mut total, &self.direct.better.stats);
        for inst in self.parts.values() {
            fold_better(&mut total, &inst.engines.better.stats);
        }
        total
    }

    /// The engine family answering queries this epoch. The min{.,.} palette
    /// choice compares the two randomised families at the current width.
    pub fn engine_kind(&self, global: &Orientation) -> EngineKind {
        match self.cfg.engine {
            EngineChoice::Det => EngineKind::Det,
            EngineChoice::RandSimple => EngineKind::RandSimple,
            EngineChoice::RandBetter => EngineKind::RandBetter,
            EngineChoice::AutoMin => {
                let d = global.dmax();
                let simple = family_bound(EngineKind::RandSimple, d, &self.cfg.engine_cfg);
                let better = family_bound(EngineKind::RandBetter, d, &self.cfg.engine_cfg);
                if better < simple {
                    EngineKind::RandBetter
                } else {
                    EngineKind::RandSimple
                }
            }
        }
    }

    pub fn partition_generation(&self, epoch: u64) -> u64 {
        epoch / self.cfg.repartition_period.max(1)
    }

    /// Routed scale for the current arboricity estimate, when above the
    /// direct threshold.
    pub fn route_scale(&self, global: &Orientation) -> Option<u32> {
        let alpha = global.alpha_hat() as u64;
        if alpha <= self.cfg.direct_threshold {
            None
        } else {
            Some(ceil_log2(alpha))
        }
    }

    /// Uniform per-part palette span: no part orientation can exceed twice
    /// the global dmax (an out-orientation with max out-degree d certifies
    /// degeneracy at most 2d for every subgraph), so the maximum family
    /// bound over those widths keeps part blocks disjoint.
    fn span(&mut self, kind: EngineKind, epoch: u64, global: &Orientation) -> u64 {
        if let Some((e, k, s)) = self.span_cache {
            if e == epoch + 1 && k == kind {
                return s;
            }
        }
        let cap = 2 * global.dmax();
        let span = (0..=cap)
            .map(|d| family_bound(kind, d, &self.cfg.engine_cfg))
            .max()
            .unwrap_or(1)
            .max(1);
        self.span_cache = Some((epoch + 1, kind, span));
        span
    }

    pub fn colour_query(
        &mut self,
        g: &DynGraph,
        global: &Orientation,
        v: VertexId,
    ) -> Result<ColourLabel, QueryError> {
        let epoch = g.epoch();
        if (v as usize) >= g.n() {
            return Err(QueryError::VertexOutOfRange { v, n: g.n() });
        }
        let kind = self.engine_kind(global);
        let Some(scale) = self.route_scale(global) else {
            let cfg = self.cfg.engine_cfg;
            let ctx = Ctx::new(global, epoch, &cfg);
            return self.direct.query(kind, &ctx, v);
        };
        if self.cache_epoch != epoch + 1 {
            for (_, inst) in self.parts.drain() {
                fold_better(&mut self.folded_better, &inst.engines.better.stats);
            }
            self.cache_epoch = epoch + 1;
        }
        let span = self.span(kind, epoch, global);
        let y = parts_at_scale(scale, g.n());
        let generation = self.partition_generation(epoch);
        let part = part_of(self.cfg.partition_seed, generation, scale, v, y);
        let inst = self.parts.entry((scale, part)).or_insert_with(|| {
            let adj = part_adjacency(g, self.cfg.partition_seed, generation, scale, part);
            PartInstance { orientation: Orientation::build(&adj), engines: EngineSet::default() }
        });
        let cfg = self.cfg.engine_cfg;
        let ctx = Ctx::new(&inst.orientation, epoch, &cfg);
        let inner = inst.engines.query(kind, &ctx, v)?;
        Ok(inner.routed(scale, part, span))
    }

    /// Sizes of the failed/excluded forward components left by whatever was
    /// materialised this epoch. Stats only, and only meaningful in the
    /// shattering regime: with experiments skipped (tiny dmax) the residual
    /// path is the primary path, not a failure set.
    pub fn shatter_components(&self, g: &DynGraph, global: &Orientation) -> Vec<usize> {
        let epoch = g.epoch();
        let kind = self.engine_kind(global);
        let cfg = self.cfg.engine_cfg;
        let collect = |engines: &EngineSet, orientation: &Orientation| -> Vec<usize> {
            let d = orientation.dmax();
            let failed: Vec<VertexId> = match kind {
                EngineKind::Det => Vec::new(),
                EngineKind::RandSimple => {
                    if rand_simple::SimpleParams::for_dmax(d).active {
                        engines.simple.failed_materialised(epoch)
                    } else {
                        Vec::new()
                    }
                }
                EngineKind::RandBetter => {
                    let p = rand_better::BetterParams::for_dmax(d, cfg.delta, cfg.base_threshold);
                    engines.better.failed_for_stats(epoch, &p)
                }
            };
            crate::oracle::forward_component_sizes(orientation, &failed)
        };
        if self.route_scale(global).is_none() {
            collect(&self.direct, global)
        } else {
            self.parts
                .values()
                .flat_map(|inst| collect(&inst.engines, &inst.orientation))
                .collect()
        }
    }

    /// Parts materialised this epoch and the largest rebuilt out-degree
    /// among them.
    pub fn part_stats(&self) -> (usize, u32) {
        let max_d = self.parts.values().map(|p| p.orientation.dmax()).max().unwrap_or(0);
        (self.parts.len(), max_d)
    }

    /// Appendix-style palette accounting for the routed regime: part count
    /// times the inner bound at the partition's arboricity cap.
    pub fn routed_palette_bound(&self, g: &DynGraph, global: &Orientation) -> Option<u64> {
        let scale = self.route_scale(global)?;
        let y = parts_at_scale(scale, g.n());
        let cap = 3 * ceil_log2(g.n() as u64).max(1);
        let kind = self.engine_kind(global);
        Some(y * family_bound(kind, cap, &self.cfg.engine_cfg))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mkcfg(engine: EngineChoice, n: usize) -> DispatchConfig {
        DispatchConfig {
            engine,
            direct_threshold: ceil_log2(n as u64) as u64,
            partition_seed: 0xAB,
            repartition_period: (n as u64) * (n as u64),
            engine_cfg: EngineConfig::new(7, 3, ceil_log2(n as u64).pow(2) as u64),
        }
    }

    fn clique_blocks(n: usize, k: u32, blocks: u32) -> DynGraph {
        let mut g = DynGraph::new(n);
        for b in 0..blocks {
            let base = b * k;
            for u in 0..k {
                for v in (u + 1)..k {
                    g.insert_edge(base + u, base + v).unwrap();
                }
            }
        }
        g
    }

    #[test]
    fn single_part_views_keep_the_whole_graph() {
        // n = 300 has ceil(log2 n) = 9, so scale 0 gives y = ceil(8/9) = 1.
        let mut g = DynGraph::new(300);
        g.insert_edge(0, 1).unwrap();
        g.insert_edge(5, 9).unwrap();
        let y = parts_at_scale(0, 300);
        assert_eq!(y, 1);
        assert!((0..300u32).all(|v| part_of(1, 0, 0, v, y) == 0));
        assert_eq!(part_adjacency(&g, 1, 0, 0, 0), g.adjacency());
    }

    #[test]
    fn cross_part_edges_vanish_from_every_view() {
        let mut g = DynGraph::new(512);
        let mut rng = KeyStream::new(&[3]);
        for _ in 0..800 {
            let u = rng.next_below(512) as u32;
            let v = rng.next_below(512) as u32;
            if u != v {
                let _ = g.insert_edge(u, v);
            }
        }
        let scale = 5;
        let y = parts_at_scale(scale, 512);
        assert!(y > 1);
        let views: Vec<_> = (0..y as u32).map(|j| part_adjacency(&g, 9, 0, scale, j)).collect();
        for (u, v) in g.edges() {
            let pu = part_of(9, 0, scale, u, y);
            let pv = part_of(9, 0, scale, v, y);
            for (j, view) in views.iter().enumerate() {
                let present = view[u as usize].contains(&v);
                let expected = pu == pv && pu == j as u32;
                assert_eq!(present, expected, "edge {u}-{v} in view {j}");
            }
        }
        // Edge partition: every vertex belongs to exactly one part.
        for v in 0..512u32 {
            assert!(part_of(9, 0, scale, v, y) < y as u32);
            assert_eq!(part_of(9, 0, scale, v, y), part_of(9, 0, scale, v, y));
        }
    }

    #[test]
    fn forest_routes_direct() {
        let mut g = DynGraph::new(100);
        for v in 1..100u32 {
            g.insert_edge(v - 1, v).unwrap();
        }
        let o = Orientation::build(&g.adjacency());
        let mut d = Dispatcher::new(mkcfg(EngineChoice::Det, 100));
        assert_eq!(d.route_scale(&o), None);
        let label = d.colour_query(&g, &o, 3).unwrap();
        assert!(matches!(label.path[0], crate::label::PathSeg::Point { .. }));
    }

    #[test]
    fn dense_blocks_route_through_parts_and_stay_proper() {
        // K_40 blocks drive alpha_hat to 20 > ceil(log2 1000) = 10.
        let n = 1000;
        let g = clique_blocks(n, 40, 6);
        let o = Orientation::build(&g.adjacency());
        assert!(o.alpha_hat() as u64 > ceil_log2(n as u64) as u64);
        for engine in [EngineChoice::Det, EngineChoice::RandSimple, EngineChoice::AutoMin] {
            let mut d = Dispatcher::new(mkcfg(engine, n));
            let scale = d.route_scale(&o).expect("routed");
            let colours: Vec<u64> = (0..n as u32)
                .map(|v| {
                    let label = d.colour_query(&g, &o, v).unwrap();
                    assert_eq!(label.path[0], crate::label::PathSeg::Scale(scale));
                    label.value
                })
                .collect();
            for (u, v) in g.edges() {
                assert_ne!(colours[u as usize], colours[v as usize], "{engine:?} edge {u}-{v}");
            }
            let (parts_built, max_part_dmax) = d.part_stats();
            assert!(parts_built > 1, "expected several parts, got {parts_built}");
            // Palette accounting: when every part rebuilds under the
            // partition's arboricity cap, the distinct colours used stay
            // within part-count times the inner bound at that cap.
            let cap = 3 * ceil_log2(n as u64).max(1);
            if max_part_dmax <= cap {
                let bound = d.routed_palette_bound(&g, &o).unwrap();
                let distinct: std::collections::HashSet<u64> = colours.iter().copied().collect();
                assert!(
                    (distinct.len() as u64) <= bound,
                    "{engine:?}: {} distinct colours above accounting bound {bound}",
                    distinct.len()
                );
            }
        }
    }

    #[test]
    fn adjacent_vertices_in_different_parts_differ_by_prefix() {
        let n = 1000;
        let g = clique_blocks(n, 40, 6);
        let o = Orientation::build(&g.adjacency());
        let mut d = Dispatcher::new(mkcfg(EngineChoice::RandSimple, n));
        let scale = d.route_scale(&o).unwrap();
        let y = parts_at_scale(scale, n);
        let gen = d.partition_generation(g.epoch());
        let mut checked_split = false;
        for (u, v) in g.edges() {
            let pu = part_of(d.cfg.partition_seed, gen, scale, u, y);
            let pv = part_of(d.cfg.partition_seed, gen, scale, v, y);
            if pu != pv {
                let lu = d.colour_query(&g, &o, u).unwrap();
                let lv = d.colour_query(&g, &o, v).unwrap();
                assert_ne!(lu.value, lv.value);
                assert_ne!(lu.path[1], lv.path[1]);
                checked_split = true;
                break;
            }
        }
        assert!(checked_split, "partition never split an edge");
    }

    #[test]
    fn partition_is_pure_within_a_generation() {
        for v in 0..50u32 {
            let a = part_of(77, 3, 4, v, 13);
            let b = part_of(77, 3, 4, v, 13);
            assert_eq!(a, b);
        }
        // Different generations reshuffle (at least somewhere).
        let moved = (0..50u32).any(|v| part_of(77, 3, 4, v, 13) != part_of(77, 4, 4, v, 13));
        assert!(moved);
    }
}
