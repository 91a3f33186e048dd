//! Deterministic implicit colouring by two rounds of cover-free colour
//! reduction over the out-orientation.
//!
//! Level 0 is the slot-forest base colouring (palette 2^dmax). Level 1 maps
//! every level-0 colour to a polynomial set and picks an uncovered point,
//! shrinking the palette to q1^2; level 2 repeats the step down to q2^2.
//! Propriety holds level by level: distinct colours map to distinct
//! polynomials, and the chosen point avoids every out-neighbour's set.

use crate::arith::FamilySize;
use crate::base_colour::{BaseColour, BaseColouring};
use crate::cover_free::{self, CfParams};
use crate::engine::{Ctx, QueryError};
use crate::graph::VertexId;
use crate::label::{ColourLabel, EngineKind, PathSeg};
use crate::memo::Stamped;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LevelColour {
    Base(BaseColour),
    Index(u64),
}

#[derive(Debug, Default)]
pub struct DetEngine {
    base: BaseColouring,
    params_for_dmax: Option<(u32, CfParams, CfParams)>,
    lvl1: Stamped<u64>,
    lvl2: Stamped<u64>,
}

/// Both reduction levels for a given orientation width. r is the provider's
/// current dmax (the reduction needs r at least the out-degree; dmax exactly
/// minimises q).
pub fn level_params(dmax: u32) -> (CfParams, CfParams) {
    let r = dmax.max(1) as u64;
    let p1 = cover_free::select_params(FamilySize::Pow2(dmax), r);
    let k2 = p1.palette();
    let p2 = cover_free::select_params(FamilySize::Exact(k2), r);
    (p1, p2)
}

/// Final palette bound q2^2 as a function of the orientation width; used by
/// the dispatcher for palette-block spans.
pub fn palette_bound_for_dmax(dmax: u32) -> u64 {
    level_params(dmax).1.palette()
}

impl DetEngine {
    pub fn new() -> Self {
        Self::default()
    }

    fn params(&mut self, ctx: &Ctx) -> (CfParams, CfParams) {
        let dmax = ctx.orientation.dmax();
        match &self.params_for_dmax {
            Some((d, p1, p2)) if *d == dmax => (p1.clone(), p2.clone()),
            _ => {
                let (p1, p2) = level_params(dmax);
                self.params_for_dmax = Some((dmax, p1.clone(), p2.clone()));
                (p1, p2)
            }
        }
    }

    fn level1(&mut self, ctx: &Ctx, params1: &CfParams, v: VertexId) -> u64 {
        if let Some(&c) = self.lvl1.get(ctx.epoch, v as usize) {
            return c;
        }
        let own = self.base.base_colour(ctx.orientation, ctx.epoch, v);
        let target = cover_free::colour_to_set_wide(own.words(), params1)
            .expect("level-0 palette fits the level-1 family");
        let others: Vec<_> = ctx
            .orientation
            .out_neighbours(v)
            .iter()
            .map(|e| {
                let c = self.base.base_colour(ctx.orientation, ctx.epoch, e.to);
                cover_free::colour_to_set_wide(c.words(), params1)
                    .expect("level-0 palette fits the level-1 family")
            })
            .collect();
        let (x, y) = cover_free::uncovered_element(&target, &others, params1)
            .expect("r >= out-degree guarantees an uncovered point");
        let colour = x * params1.q + y;
        self.lvl1.set(ctx.epoch, v as usize, colour);
        colour
    }

    fn level2(&mut self, ctx: &Ctx, params1: &CfParams, params2: &CfParams, v: VertexId) -> u64 {
        if let Some(&c) = self.lvl2.get(ctx.epoch, v as usize) {
            return c;
        }
        let own = self.level1(ctx, params1, v);
        let target = cover_free::colour_to_set(own, params2)
            .expect("level-1 palette fits the level-2 family");
        let neighbours: Vec<VertexId> =
            ctx.orientation.out_neighbours(v).iter().map(|e| e.to).collect();
        let others: Vec<_> = neighbours
            .iter()
            .map(|&w| {
                let c = self.level1(ctx, params1, w);
                cover_free::colour_to_set(c, params2)
                    .expect("level-1 palette fits the level-2 family")
            })
            .collect();
        let (x, y) = cover_free::uncovered_element(&target, &others, params2)
            .expect("r >= out-degree guarantees an uncovered point");
        let colour = x * params2.q + y;
        self.lvl2.set(ctx.epoch, v as usize, colour);
        colour
    }

    /// The colour-reduction ladder, exposed per level (0, 1 or 2).
    pub fn reduce_colour(&mut self, ctx: &Ctx, v: VertexId, j: u8) -> Result<LevelColour, QueryError> {
        ctx.check_vertex(v)?;
        let (p1, p2) = self.params(ctx);
        Ok(match j {
            0 => LevelColour::Base(self.base.base_colour(ctx.orientation, ctx.epoch, v)),
            1 => LevelColour::Index(self.level1(ctx, &p1, v)),
            _ => LevelColour::Index(self.level2(ctx, &p1, &p2, v)),
        })
    }

    pub fn det_colour(&mut self, ctx: &Ctx, v: VertexId) -> Result<ColourLabel, QueryError> {
        ctx.check_vertex(v)?;
        let (p1, p2) = self.params(ctx);
        let colour = self.level2(ctx, &p1, &p2, v);
        let (x, y) = (colour / p2.q, colour % p2.q);
        Ok(ColourLabel::new(EngineKind::Det, vec![PathSeg::Point { x, y }], colour, colour))
    }

    /// Current q2^2, the engine's palette bound.
    pub fn palette_bound(&mut self, ctx: &Ctx) -> u64 {
        self.params(ctx).1.palette()
    }

    pub fn current_params(&mut self, ctx: &Ctx) -> (CfParams, CfParams) {
        self.params(ctx)
    }

    /// Distinct vertices whose level-0 colour was materialised this epoch.
    pub fn level0_touched(&self, epoch: u64) -> usize {
        self.base.touched_vertices(epoch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EngineConfig;
    use crate::graph::DynGraph;
    use crate::orientation::Orientation;
    use crate::prf::KeyStream;

    fn cfg() -> EngineConfig {
        EngineConfig::new(1, 3, 0)
    }

    #[test]
    fn isolated_vertex_flattens_to_zero() {
        let g = DynGraph::new(3);
        let o = Orientation::build(&g.adjacency());
        let mut eng = DetEngine::new();
        let config = cfg();
        let ctx = Ctx::new(&o, g.epoch(), &config);
        let label = eng.det_colour(&ctx, 1).unwrap();
        // Zero base colour maps through the injection twice; with no
        // out-neighbours the uncovered search degenerates to x = 0 and the
        // zero polynomial, so every level yields the point (0, 0).
        assert_eq!(label.value, 0);
        assert_eq!(eng.reduce_colour(&ctx, 1, 1).unwrap(), LevelColour::Index(0));
    }

    #[test]
    fn single_edge_gets_distinct_colours() {
        let mut g = DynGraph::new(2);
        g.insert_edge(0, 1).unwrap();
        let o = Orientation::build(&g.adjacency());
        let mut eng = DetEngine::new();
        let config = cfg();
        let ctx = Ctx::new(&o, g.epoch(), &config);
        let a = eng.det_colour(&ctx, 0).unwrap().value;
        let b = eng.det_colour(&ctx, 1).unwrap().value;
        assert_ne!(a, b);
    }

    #[test]
    fn level_zero_equals_base_colour() {
        let mut g = DynGraph::new(4);
        g.insert_edge(0, 1).unwrap();
        g.insert_edge(1, 2).unwrap();
        let o = Orientation::build(&g.adjacency());
        let mut eng = DetEngine::new();
        let config = cfg();
        let ctx = Ctx::new(&o, g.epoch(), &config);
        let mut bc = crate::base_colour::BaseColouring::new();
        for v in 0..4u32 {
            let got = eng.reduce_colour(&ctx, v, 0).unwrap();
            let want = bc.base_colour(&o, g.epoch(), v);
            assert_eq!(got, LevelColour::Base(want));
        }
    }

    /// Star centre with three out-neighbours lands exactly on the q = 5,
    /// deg = 1 family; the centre's point must avoid all three neighbour
    /// polynomials (checked by evaluating all four everywhere).
    #[test]
    fn star_centre_point_off_neighbour_polynomials() {
        let mut g = DynGraph::new(4);
        let mut o = Orientation::build(&g.adjacency());
        for leaf in 1..4u32 {
            g.insert_edge(0, leaf).unwrap();
            o.notify_insert(&g, 0, leaf);
        }
        assert_eq!(o.out_degree(0), 3);
        assert_eq!(o.dmax(), 3);
        let (p1, _) = level_params(3);
        assert_eq!((p1.deg, p1.q), (1, 5));
        let mut eng = DetEngine::new();
        let config = cfg();
        let ctx = Ctx::new(&o, g.epoch(), &config);
        let centre = match eng.reduce_colour(&ctx, 0, 1).unwrap() {
            LevelColour::Index(c) => c,
            other => panic!("unexpected {other:?}"),
        };
        let (x, y) = (centre / p1.q, centre % p1.q);
        let mut base = crate::base_colour::BaseColouring::new();
        for leaf in 1..4u32 {
            let c = base.base_colour(&o, g.epoch(), leaf);
            let poly = cover_free::colour_to_set_wide(c.words(), &p1).unwrap();
            assert_ne!(poly.eval(x, p1.q), y, "leaf {leaf} covers the centre's point");
        }
    }

    #[test]
    fn memo_is_consistent_across_query_order() {
        let mut g = DynGraph::new(5);
        g.insert_edge(0, 1).unwrap();
        g.insert_edge(0, 2).unwrap();
        g.insert_edge(1, 2).unwrap();
        let o = Orientation::build(&g.adjacency());
        let config = cfg();
        let ctx = Ctx::new(&o, g.epoch(), &config);
        let mut eng = DetEngine::new();
        // Query 0 first (which forces 1's level-1), then 1 directly.
        let first = eng.det_colour(&ctx, 0).unwrap();
        let via_memo = eng.reduce_colour(&ctx, 1, 1).unwrap();
        let mut fresh = DetEngine::new();
        let direct = fresh.reduce_colour(&ctx, 1, 1).unwrap();
        assert_eq!(via_memo, direct);
        assert_eq!(eng.det_colour(&ctx, 0).unwrap(), first);
    }

    #[test]
    fn random_graph_materialisation_is_proper() {
        let n = 500u32;
        let mut g = DynGraph::new(n as usize);
        let mut rng = KeyStream::new(&[21, 0]);
        let mut inserted = 0;
        while inserted < 2000 {
            let u = rng.next_below(n as u64) as u32;
            let v = rng.next_below(n as u64) as u32;
            if u != v && g.insert_edge(u, v).is_ok() {
                inserted += 1;
            }
        }
        let o = Orientation::build(&g.adjacency());
        let mut eng = DetEngine::new();
        let config = cfg();
        let ctx = Ctx::new(&o, g.epoch(), &config);
        let colours: Vec<u64> = (0..n).map(|v| eng.det_colour(&ctx, v).unwrap().value).collect();
        for (u, v) in g.edges() {
            assert_ne!(colours[u as usize], colours[v as usize], "edge {u}-{v}");
        }
        let bound = eng.palette_bound(&ctx);
        assert!(colours.iter().all(|&c| c < bound));
        // Propriety at level 1 as well, edge by edge along the orientation.
        for u in 0..n {
            let cu = eng.reduce_colour(&ctx, u, 1).unwrap();
            for e in o.out_neighbours(u) {
                assert_ne!(cu, eng.reduce_colour(&ctx, e.to, 1).unwrap());
            }
        }
    }

    /// A single query touches at most 1 + dmax + dmax^2 distinct level-0
    /// colours.
    #[test]
    fn query_volume_is_bounded() {
        let n = 400u32;
        let mut g = DynGraph::new(n as usize);
        let mut rng = KeyStream::new(&[23, 1]);
        let mut inserted = 0;
        while inserted < 1600 {
            let u = rng.next_below(n as u64) as u32;
            let v = rng.next_below(n as u64) as u32;
            if u != v && g.insert_edge(u, v).is_ok() {
                inserted += 1;
            }
        }
        let o = Orientation::build(&g.adjacency());
        let d = o.dmax() as usize;
        let config = cfg();
        let ctx = Ctx::new(&o, g.epoch(), &config);
        for v in (0..n).step_by(37) {
            let mut eng = DetEngine::new();
            eng.det_colour(&ctx, v).unwrap();
            let touched = eng.level0_touched(g.epoch());
            assert!(
                touched <= 1 + d + d * d,
                "query {v} touched {touched} > 1 + {d} + {d}^2"
            );
        }
    }
}
