//! Randomised implicit colouring by per-vertex colour experiments.
//!
//! Every vertex draws a handful of colours from a shared palette keyed by
//! (seed, epoch, vertex); the experiment succeeds when some drawn colour
//! avoids every out-neighbour's draws. Failed vertices shatter into small
//! components and are coloured greedily from a disjoint residual block,
//! recursing forward along the acyclic orientation so that answers are
//! independent of query order.

use crate::arith::ceil_log2;
use crate::engine::{Ctx, QueryError};
use crate::graph::VertexId;
use crate::label::{ColourLabel, EngineKind, PathSeg};
use crate::memo::Stamped;
use crate::prf::KeyStream;

/// Domain tag separating this engine's draws from everything else keyed by
/// the same (seed, epoch, vertex).
pub const TAG_SIMPLE: u64 = 0x514d4953; // "SIMQ"

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimpleParams {
    /// Provider's max out-degree, the authoritative d.
    pub d: u32,
    /// Formula guard: d' = max(d, 2).
    pub d_eff: u32,
    /// Number of colours each vertex draws: 4 * ceil(log2 d').
    pub samples: u32,
    /// Experiment palette size: 8 * d' * ceil(log2 d').
    pub palette: u64,
    /// Residual block size: 3d + 1.
    pub residual: u64,
    /// Experiments are skipped entirely at tiny d; everyone goes residual.
    pub active: bool,
}

impl SimpleParams {
    pub fn for_dmax(d: u32) -> Self {
        let d_eff = d.max(2);
        let log = ceil_log2(d_eff as u64).max(1);
        SimpleParams {
            d,
            d_eff,
            samples: (4 * log).max(1),
            palette: 8 * d_eff as u64 * log as u64,
            residual: 3 * d as u64 + 1,
            active: d > 4,
        }
    }

    /// Total colours the engine can emit: experiment block plus residual
    /// block.
    pub fn palette_bound(&self) -> u64 {
        self.palette + self.residual
    }
}

/// Palette bound as a function of the orientation width, for block spans.
pub fn palette_bound_for_dmax(d: u32) -> u64 {
    SimpleParams::for_dmax(d).palette_bound()
}

#[derive(Debug, Default)]
pub struct SimpleEngine {
    proposals: Stamped<Vec<u32>>,
    kappa: Stamped<Option<u32>>,
    residual: Stamped<u32>,
}

impl SimpleEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn params(&self, ctx: &Ctx) -> SimpleParams {
        SimpleParams::for_dmax(ctx.orientation.dmax())
    }

    /// The multiset of proposals for v, stored sorted and deduplicated.
    fn proposal_set(&mut self, ctx: &Ctx, params: &SimpleParams, v: VertexId) -> &Vec<u32> {
        if !self.proposals.is_set(ctx.epoch, v as usize) {
            let mut stream = KeyStream::new(&[ctx.cfg.seed, ctx.epoch, TAG_SIMPLE, v as u64]);
            let mut drawn: Vec<u32> =
                (0..params.samples).map(|_| stream.next_below(params.palette) as u32).collect();
            drawn.sort_unstable();
            drawn.dedup();
            self.proposals.set(ctx.epoch, v as usize, drawn);
        }
        self.proposals.get(ctx.epoch, v as usize).expect("just set")
    }

    /// Run (or recall) the colour experiment at v: out-neighbours' proposal
    /// sets are forced first, then kappa is the smallest own colour missing
    /// from all of them.
    pub fn propose_colour(&mut self, ctx: &Ctx, v: VertexId) -> (Vec<u32>, Option<u32>) {
        let params = self.params(ctx);
        let own = self.proposal_set(ctx, &params, v).clone();
        if let Some(&k) = self.kappa.get(ctx.epoch, v as usize) {
            return (own, k);
        }
        let neighbours: Vec<VertexId> =
            ctx.orientation.out_neighbours(v).iter().map(|e| e.to).collect();
        for &w in &neighbours {
            self.proposal_set(ctx, &params, w);
        }
        let kappa = own
            .iter()
            .copied()
            .find(|c| {
                neighbours.iter().all(|&w| {
                    self.proposals
                        .get(ctx.epoch, w as usize)
                        .expect("forced above")
                        .binary_search(c)
                        .is_err()
                })
            });
        self.kappa.set(ctx.epoch, v as usize, kappa);
        (own, kappa)
    }

    /// Whether v takes the residual path this epoch.
    pub fn failed(&mut self, ctx: &Ctx, v: VertexId) -> bool {
        let params = self.params(ctx);
        if !params.active {
            return true;
        }
        self.propose_colour(ctx, v).1.is_none()
    }

    /// Greedy residual colour: the smallest colour of the residual block not
    /// taken by any failed out-neighbour, recursing forward through the
    /// failed set (iteratively; chains can be long).
    pub fn colour_residual(&mut self, ctx: &Ctx, v: VertexId) -> Result<u32, QueryError> {
        debug_assert!(self.failed(ctx, v), "residual colouring requires a failed vertex");
        let params = self.params(ctx);
        if let Some(&c) = self.residual.get(ctx.epoch, v as usize) {
            return Ok(c);
        }
        struct Frame {
            v: VertexId,
            children: Vec<VertexId>,
            next: usize,
        }
        let failed_children = |eng: &mut Self, u: VertexId| -> Vec<VertexId> {
            let outs: Vec<VertexId> =
                ctx.orientation.out_neighbours(u).iter().map(|e| e.to).collect();
            outs.into_iter().filter(|&w| eng.failed(ctx, w)).collect()
        };
        let mut stack = vec![Frame { v, children: failed_children(self, v), next: 0 }];
        while let Some(top) = stack.last_mut() {
            if top.next < top.children.len() {
                let w = top.children[top.next];
                top.next += 1;
                if !self.residual.is_set(ctx.epoch, w as usize) {
                    stack.push(Frame { v: w, children: failed_children(self, w), next: 0 });
                }
            } else {
                let mut used = vec![false; params.residual as usize];
                for &w in &top.children {
                    let c = *self.residual.get(ctx.epoch, w as usize).expect("post-order");
                    used[c as usize] = true;
                }
                let colour = used.iter().position(|&u| !u).ok_or(QueryError::PaletteExhausted)?;
                self.residual.set(ctx.epoch, top.v as usize, colour as u32);
                stack.pop();
            }
        }
        Ok(*self.residual.get(ctx.epoch, v as usize).expect("just set"))
    }

    pub fn colour_query(&mut self, ctx: &Ctx, v: VertexId) -> Result<ColourLabel, QueryError> {
        ctx.check_vertex(v)?;
        let params = self.params(ctx);
        if self.failed(ctx, v) {
            let c = self.colour_residual(ctx, v)?;
            let value = params.palette + c as u64;
            Ok(ColourLabel::new(EngineKind::RandSimple, vec![PathSeg::Residual], c as u64, value))
        } else {
            let kappa = self.kappa.get(ctx.epoch, v as usize).copied().flatten().expect("not failed");
            Ok(ColourLabel::new(
                EngineKind::RandSimple,
                vec![PathSeg::Experiment],
                kappa as u64,
                kappa as u64,
            ))
        }
    }

    /// Failed vertices this epoch (forces every experiment; stats only).
    pub fn failed_set(&mut self, ctx: &Ctx) -> Vec<VertexId> {
        (0..ctx.orientation.n() as VertexId).filter(|&v| self.failed(ctx, v)).collect()
    }

    /// Failed vertices among those already materialised this epoch: failed
    /// experiments plus anything the residual path touched (which covers the
    /// tiny-d regime where experiments are skipped).
    pub fn failed_materialised(&self, epoch: u64) -> Vec<VertexId> {
        let mut out: std::collections::BTreeSet<VertexId> =
            self.residual.set_vertices(epoch).map(|v| v as VertexId).collect();
        for v in self.kappa.set_vertices(epoch) {
            if self.kappa.get(epoch, v) == Some(&None) {
                out.insert(v as VertexId);
            }
        }
        out.into_iter().collect()
    }
}
