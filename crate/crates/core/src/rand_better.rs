//! Two-level randomised colouring with badness-controlled proposals.
//!
//! Level 1 computes an arb-defective partition: each vertex proposes a
//! colour from a small palette, pruning colours its prompted or settled
//! out-neighbours already proposed more than p times. Proposal order is
//! driven by the queries, with one constraint enforced eagerly: no clear
//! vertex may ever see more than 2d prompted or settled in-neighbours. A
//! vertex whose proposal would overflow that badness cap somewhere is
//! grouped into a closure set H and H proposes in reverse topological
//! order, so targets commit before their sources.
//!
//! A prompted vertex settles by counting out-neighbours with its own
//! proposal: past the conflict threshold it is excluded (residual greedy,
//! own block); otherwise it joins the class of its colour and is coloured
//! by the one-level experiment restricted to that class. Below the
//! base threshold the whole engine delegates to the one-level engine.

use std::collections::{HashMap, HashSet};

use crate::arith::ceil_log2;
use crate::engine::{Ctx, QueryError};
use crate::graph::VertexId;
use crate::label::{ColourLabel, EngineKind, PathSeg};
use crate::memo::Stamped;
use crate::prf::KeyStream;
use crate::rand_simple::{SimpleEngine, SimpleParams};

pub const TAG_BETTER1: u64 = 0x42545231; // "BTR1"
pub const TAG_BETTER2: u64 = 0x42545232; // "BTR2"

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Joined,
    Excluded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
enum Status {
    #[default]
    Clear,
    Prompted,
    Settled(Outcome),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetterParams {
    /// Level-1 out-degree bound (the provider's dmax).
    pub d: u32,
    /// p = ceil(log2 d')^2 with d' = max(d, 2), at least 1.
    pub p: u32,
    /// Level-1 palette size ceil(2(1+delta) d / p), at least 1.
    pub palette: u64,
    /// Conflict threshold 2(1+delta) p.
    pub threshold: u64,
    pub delta: u32,
    /// d below the base threshold delegates to the one-level engine.
    pub delegate: bool,
    /// One-level engine parameters at arboricity budget `threshold`, used
    /// inside each class.
    pub lvl2: SimpleParams,
}

impl BetterParams {
    pub fn for_dmax(d: u32, delta: u32, base_threshold: u64) -> Self {
        let delta = delta.max(3);
        let d_eff = d.max(2);
        let log = ceil_log2(d_eff as u64).max(1);
        let p = (log * log).max(1);
        let palette = (2 * (1 + delta as u64) * d as u64).div_ceil(p as u64).max(1);
        let threshold = 2 * (1 + delta as u64) * p as u64;
        BetterParams {
            d,
            p,
            palette,
            threshold,
            delta,
            delegate: (d as u64) < base_threshold,
            lvl2: SimpleParams::for_dmax(threshold as u32),
        }
    }

    /// Width of one class block: level-2 experiment palette plus its
    /// residual block.
    pub fn class_span(&self) -> u64 {
        self.lvl2.palette_bound()
    }

    /// First colour of the excluded-residual block, after all class blocks.
    pub fn excluded_base(&self) -> u64 {
        self.palette * self.class_span()
    }

    pub fn palette_bound(&self) -> u64 {
        if self.delegate {
            SimpleParams::for_dmax(self.d).palette_bound()
        } else {
            self.excluded_base() + 3 * self.d as u64 + 1
        }
    }
}

/// Palette bound by orientation width, for dispatcher block spans.
pub fn palette_bound_for_dmax(d: u32, delta: u32, base_threshold: u64) -> u64 {
    BetterParams::for_dmax(d, delta, base_threshold).palette_bound()
}

/// Lifetime counters backing the amortised-proposal accounting; they survive
/// epoch changes deliberately.
#[derive(Debug, Clone, Copy)]
pub struct BetterStats {
    /// Level-1 colour proposals executed (closure members included).
    pub proposals_made: u64,
    /// Experiment outcomes the queries required, across both levels.
    pub outcomes_required: u64,
    /// Sum over those outcomes of the d in force at the time.
    pub outcome_weight: u64,
    pub max_badness_seen: u32,
    /// Smallest palette size seen after pruning, for the floor check
    /// remaining * p >= (1 + delta) d.
    pub min_remaining_after_prune: u64,
}

impl Default for BetterStats {
    fn default() -> Self {
        BetterStats {
            proposals_made: 0,
            outcomes_required: 0,
            outcome_weight: 0,
            max_badness_seen: 0,
            min_remaining_after_prune: u64::MAX,
        }
    }
}

#[derive(Debug, Default)]
pub struct BetterEngine {
    status: Stamped<Status>,
    badness: Stamped<u32>,
    proposal: Stamped<u32>,
    lvl2_props: Stamped<Vec<u32>>,
    lvl2_kappa: Stamped<Option<u32>>,
    lvl2_residual: Stamped<u32>,
    excl_residual: Stamped<u32>,
    delegated: SimpleEngine,
    pub stats: BetterStats,
}

impl BetterEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn params(&self, ctx: &Ctx) -> BetterParams {
        BetterParams::for_dmax(ctx.orientation.dmax(), ctx.cfg.delta, ctx.cfg.base_threshold)
    }

    fn status_of(&self, epoch: u64, v: VertexId) -> Status {
        self.status.get(epoch, v as usize).copied().unwrap_or_default()
    }

    fn badness_of(&self, epoch: u64, v: VertexId) -> u32 {
        self.badness.get(epoch, v as usize).copied().unwrap_or(0)
    }

    /// The proposed colour of v, proposing first if v is still clear.
    /// Proposing may pull a whole closure of vertices along, so that no
    /// clear vertex overflows 2d prompted/settled in-neighbours.
    pub fn propose_colour(&mut self, ctx: &Ctx, v: VertexId) -> u32 {
        let params = self.params(ctx);
        self.ensure_proposed(ctx, &params, v)
    }

    fn ensure_proposed(&mut self, ctx: &Ctx, params: &BetterParams, v: VertexId) -> u32 {
        if self.status_of(ctx.epoch, v) == Status::Clear {
            self.propose_closure(ctx, params, v);
        }
        *self.proposal.get(ctx.epoch, v as usize).expect("proposed")
    }

    fn propose_closure(&mut self, ctx: &Ctx, params: &BetterParams, v: VertexId) {
        let epoch = ctx.epoch;
        let cap = 2 * params.d as u64;
        // Grow H until proposing all of H overflows nobody outside it.
        let mut in_h: HashSet<VertexId> = HashSet::from([v]);
        let mut members = vec![v];
        let mut extra_in: HashMap<VertexId, u64> = HashMap::new();
        let mut queue = vec![v];
        while let Some(u) = queue.pop() {
            for e in ctx.orientation.out_neighbours(u) {
                let w = e.to;
                if self.status_of(epoch, w) != Status::Clear || in_h.contains(&w) {
                    continue;
                }
                let pushed = extra_in.entry(w).or_insert(0);
                *pushed += 1;
                if self.badness_of(epoch, w) as u64 + *pushed > cap {
                    in_h.insert(w);
                    members.push(w);
                    queue.push(w);
                }
            }
        }
        // Reverse topological order: out-edges point at smaller labels, so
        // ascending labels makes every target propose before its sources.
        members.sort_by_key(|&u| ctx.orientation.order_label(u));
        for u in members {
            debug_assert_eq!(self.status_of(epoch, u), Status::Clear);
            // Prune colours proposed more than p times among prompted or
            // settled out-neighbours.
            let mut counts: HashMap<u32, u32> = HashMap::new();
            for e in ctx.orientation.out_neighbours(u) {
                if matches!(self.status_of(epoch, e.to), Status::Prompted | Status::Settled(_)) {
                    let c = *self.proposal.get(epoch, e.to as usize).expect("has proposal");
                    *counts.entry(c).or_insert(0) += 1;
                }
            }
            let pruned: HashSet<u32> =
                counts.iter().filter(|&(_, &n)| n as u64 > params.p as u64).map(|(&c, _)| c).collect();
            let remaining = params.palette - pruned.len() as u64;
            debug_assert!(remaining >= 1, "pruning floor violated");
            self.stats.min_remaining_after_prune =
                self.stats.min_remaining_after_prune.min(remaining);
            let mut stream = KeyStream::new(&[ctx.cfg.seed, epoch, TAG_BETTER1, u as u64]);
            let colour = loop {
                let c = stream.next_below(params.palette) as u32;
                if !pruned.contains(&c) {
                    break c;
                }
            };
            self.proposal.set(epoch, u as usize, colour);
            self.status.set(epoch, u as usize, Status::Prompted);
            self.stats.proposals_made += 1;
            for e in ctx.orientation.out_neighbours(u) {
                if self.status_of(epoch, e.to) == Status::Clear {
                    let b = self.badness_of(epoch, e.to) + 1;
                    self.badness.set(epoch, e.to as usize, b);
                    self.stats.max_badness_seen = self.stats.max_badness_seen.max(b);
                    debug_assert!(b as u64 <= cap, "badness cap overflow at {}", e.to);
                }
            }
        }
    }

    fn decide_outcome(count: u64, threshold: u64) -> Outcome {
        if count > threshold {
            Outcome::Excluded
        } else {
            Outcome::Joined
        }
    }

    /// Settle v: count out-neighbours sharing v's proposal (forcing their
    /// proposals as needed) and compare against the conflict threshold.
    pub fn conflict_status(&mut self, ctx: &Ctx, v: VertexId) -> Outcome {
        let params = self.params(ctx);
        self.settle(ctx, &params, v)
    }

    fn settle(&mut self, ctx: &Ctx, params: &BetterParams, v: VertexId) -> Outcome {
        if let Status::Settled(o) = self.status_of(ctx.epoch, v) {
            return o;
        }
        let own = self.ensure_proposed(ctx, params, v);
        let outs: Vec<VertexId> = ctx.orientation.out_neighbours(v).iter().map(|e| e.to).collect();
        let mut count = 0u64;
        for w in outs {
            if self.ensure_proposed(ctx, params, w) == own {
                count += 1;
            }
        }
        let outcome = Self::decide_outcome(count, params.threshold);
        self.status.set(ctx.epoch, v as usize, Status::Settled(outcome));
        self.stats.outcomes_required += 1;
        self.stats.outcome_weight += params.d as u64;
        outcome
    }

    /// Out-neighbours of v inside v's class: settled, joined, same proposal.
    /// The class subgraph is never materialised; membership is forced here.
    fn class_out_neighbours(&mut self, ctx: &Ctx, params: &BetterParams, v: VertexId) -> Vec<VertexId> {
        let class = *self.proposal.get(ctx.epoch, v as usize).expect("proposed");
        let outs: Vec<VertexId> = ctx.orientation.out_neighbours(v).iter().map(|e| e.to).collect();
        outs.into_iter()
            .filter(|&w| {
                self.settle(ctx, params, w) == Outcome::Joined
                    && *self.proposal.get(ctx.epoch, w as usize).expect("proposed") == class
            })
            .collect()
    }

    fn lvl2_proposal_set(&mut self, ctx: &Ctx, params: &BetterParams, v: VertexId) -> &Vec<u32> {
        if !self.lvl2_props.is_set(ctx.epoch, v as usize) {
            let mut stream = KeyStream::new(&[ctx.cfg.seed, ctx.epoch, TAG_BETTER2, v as u64]);
            let mut drawn: Vec<u32> = (0..params.lvl2.samples)
                .map(|_| stream.next_below(params.lvl2.palette) as u32)
                .collect();
            drawn.sort_unstable();
            drawn.dedup();
            self.lvl2_props.set(ctx.epoch, v as usize, drawn);
        }
        self.lvl2_props.get(ctx.epoch, v as usize).expect("just set")
    }

    /// Level-2 colour experiment of a joined vertex within its class.
    fn lvl2_outcome(&mut self, ctx: &Ctx, params: &BetterParams, v: VertexId) -> Option<u32> {
        if let Some(&k) = self.lvl2_kappa.get(ctx.epoch, v as usize) {
            return k;
        }
        let own = self.lvl2_proposal_set(ctx, params, v).clone();
        let class_outs = self.class_out_neighbours(ctx, params, v);
        for &w in &class_outs {
            self.lvl2_proposal_set(ctx, params, w);
        }
        let kappa = own
            .iter()
            .copied()
            .find(|c| {
                class_outs.iter().all(|&w| {
                    self.lvl2_props
                        .get(ctx.epoch, w as usize)
                        .expect("forced above")
                        .binary_search(c)
                        .is_err()
                })
            });
        self.lvl2_kappa.set(ctx.epoch, v as usize, kappa);
        self.stats.outcomes_required += 1;
        self.stats.outcome_weight += params.d as u64;
        kappa
    }

    /// Greedy residual colour within the class for level-2 failures.
    fn lvl2_residual_colour(&mut self, ctx: &Ctx, params: &BetterParams, v: VertexId) -> Result<u32, QueryError> {
        if let Some(&c) = self.lvl2_residual.get(ctx.epoch, v as usize) {
            return Ok(c);
        }
        struct Frame {
            v: VertexId,
            children: Vec<VertexId>,
            next: usize,
        }
        let failed_class_children = |eng: &mut Self, u: VertexId| -> Vec<VertexId> {
            let outs = eng.class_out_neighbours(ctx, params, u);
            outs.into_iter().filter(|&w| eng.lvl2_outcome(ctx, params, w).is_none()).collect()
        };
        let first = failed_class_children(self, v);
        let mut stack = vec![Frame { v, children: first, next: 0 }];
        while let Some(top) = stack.last_mut() {
            if top.next < top.children.len() {
                let w = top.children[top.next];
                top.next += 1;
                if !self.lvl2_residual.is_set(ctx.epoch, w as usize) {
                    let ch = failed_class_children(self, w);
                    stack.push(Frame { v: w, children: ch, next: 0 });
                }
            } else {
                let mut used = vec![false; params.lvl2.residual as usize];
                for &w in &top.children {
                    let c = *self.lvl2_residual.get(ctx.epoch, w as usize).expect("post-order");
                    used[c as usize] = true;
                }
                let colour = used.iter().position(|&u| !u).ok_or(QueryError::PaletteExhausted)?;
                self.lvl2_residual.set(ctx.epoch, top.v as usize, colour as u32);
                stack.pop();
            }
        }
        Ok(*self.lvl2_residual.get(ctx.epoch, v as usize).expect("just set"))
    }

    /// Greedy residual colour for excluded vertices, recursing forward
    /// through excluded out-neighbours only.
    fn excluded_residual_colour(&mut self, ctx: &Ctx, params: &BetterParams, v: VertexId) -> Result<u32, QueryError> {
        if let Some(&c) = self.excl_residual.get(ctx.epoch, v as usize) {
            return Ok(c);
        }
        let residual_block = 3 * params.d as u64 + 1;
        struct Frame {
            v: VertexId,
            children: Vec<VertexId>,
            next: usize,
        }
        let excluded_children = |eng: &mut Self, u: VertexId| -> Vec<VertexId> {
            let outs: Vec<VertexId> = ctx.orientation.out_neighbours(u).iter().map(|e| e.to).collect();
            outs.into_iter().filter(|&w| eng.settle(ctx, params, w) == Outcome::Excluded).collect()
        };
        let first = excluded_children(self, v);
        let mut stack = vec![Frame { v, children: first, next: 0 }];
        while let Some(top) = stack.last_mut() {
            if top.next < top.children.len() {
                let w = top.children[top.next];
                top.next += 1;
                if !self.excl_residual.is_set(ctx.epoch, w as usize) {
                    let ch = excluded_children(self, w);
                    stack.push(Frame { v: w, children: ch, next: 0 });
                }
            } else {
                let mut used = vec![false; residual_block as usize];
                for &w in &top.children {
                    let c = *self.excl_residual.get(ctx.epoch, w as usize).expect("post-order");
                    used[c as usize] = true;
                }
                let colour = used.iter().position(|&u| !u).ok_or(QueryError::PaletteExhausted)?;
                self.excl_residual.set(ctx.epoch, top.v as usize, colour as u32);
                stack.pop();
            }
        }
        Ok(*self.excl_residual.get(ctx.epoch, v as usize).expect("just set"))
    }

    pub fn colour_query(&mut self, ctx: &Ctx, v: VertexId) -> Result<ColourLabel, QueryError> {
        ctx.check_vertex(v)?;
        let params = self.params(ctx);
        if params.delegate {
            let inner = self.delegated.colour_query(ctx, v)?;
            let mut path = vec![PathSeg::Base];
            path.extend(inner.path);
            return Ok(ColourLabel::new(EngineKind::RandBetter, path, inner.leaf, inner.value));
        }
        match self.settle(ctx, &params, v) {
            Outcome::Joined => {
                let class = *self.proposal.get(ctx.epoch, v as usize).expect("proposed") as u64;
                let base = class * params.class_span();
                match self.lvl2_outcome(ctx, &params, v) {
                    Some(kappa) => Ok(ColourLabel::new(
                        EngineKind::RandBetter,
                        vec![PathSeg::Class(class), PathSeg::Experiment],
                        kappa as u64,
                        base + kappa as u64,
                    )),
                    None => {
                        let c = self.lvl2_residual_colour(ctx, &params, v)?;
                        Ok(ColourLabel::new(
                            EngineKind::RandBetter,
                            vec![PathSeg::Class(class), PathSeg::Residual],
                            c as u64,
                            base + params.lvl2.palette + c as u64,
                        ))
                    }
                }
            }
            Outcome::Excluded => {
                let c = self.excluded_residual_colour(ctx, &params, v)?;
                Ok(ColourLabel::new(
                    EngineKind::RandBetter,
                    vec![PathSeg::Residual],
                    c as u64,
                    params.excluded_base() + c as u64,
                ))
            }
        }
    }

    /// Maximum badness among still-clear vertices this epoch; the cap
    /// invariant demands this never exceeds 2d.
    pub fn scan_max_clear_badness(&self, epoch: u64) -> u32 {
        let clear: Vec<usize> = self
            .badness
            .set_vertices(epoch)
            .filter(|&v| self.status_of(epoch, v as VertexId) == Status::Clear)
            .collect();
        clear
            .into_iter()
            .map(|v| self.badness_of(epoch, v as VertexId))
            .max()
            .unwrap_or(0)
    }

    /// Excluded vertices among those settled this epoch (stats only).
    pub fn excluded_set(&self, epoch: u64) -> Vec<VertexId> {
        self.status
            .set_vertices(epoch)
            .filter(|&v| self.status_of(epoch, v as VertexId) == Status::Settled(Outcome::Excluded))
            .map(|v| v as VertexId)
            .collect()
    }

    /// Level-2 failures this epoch (stats only).
    pub fn lvl2_failed_set(&self, epoch: u64) -> Vec<VertexId> {
        self.lvl2_kappa
            .set_vertices(epoch)
            .filter(|&v| self.lvl2_kappa.get(epoch, v) == Some(&None))
            .map(|v| v as VertexId)
            .collect()
    }

    /// Vertices counting as shattered for component statistics: the
    /// excluded set when the two-level scheme runs, or the delegated
    /// engine's failures (in its active regime) when delegating.
    pub fn failed_for_stats(&self, epoch: u64, params: &BetterParams) -> Vec<VertexId> {
        if params.delegate {
            if SimpleParams::for_dmax(params.d).active {
                self.delegated.failed_materialised(epoch)
            } else {
                Vec::new()
            }
        } else {
            self.excluded_set(epoch)
        }
    }
}
