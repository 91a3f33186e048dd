//! Bounded out-degree orientation with an acyclicity witness.
//!
//! The provider orients every edge from the endpoint with the larger order
//! label, where labels come from the reverse of a degeneracy peel. Inserts
//! between rebuilds keep acyclicity for free; a full rebuild runs when any
//! out-degree overflows the cap or enough updates have accumulated. The
//! arboricity estimate is refreshed from the peel's degeneracy at every
//! rebuild.

use crate::graph::{DynGraph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutEdge {
    pub to: VertexId,
    pub slot: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeelResult {
    /// Removal sequence; ties among minimum-degree vertices go to the
    /// smallest id.
    pub order: Vec<VertexId>,
    /// `position[v]` = index of v in `order`.
    pub position: Vec<u32>,
    pub degeneracy: u32,
}

/// Bucket-queue degeneracy peel over materialised adjacency lists.
pub fn peel_bucket(adj: &[Vec<VertexId>]) -> PeelResult {
    let n = adj.len();
    let mut degree: Vec<u32> = adj.iter().map(|a| a.len() as u32).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0) as usize;
    let mut buckets: Vec<std::collections::BTreeSet<VertexId>> = vec![Default::default(); max_deg + 1];
    for v in 0..n {
        buckets[degree[v] as usize].insert(v as VertexId);
    }
    let mut order = Vec::with_capacity(n);
    let mut position = vec![0u32; n];
    let mut removed = vec![false; n];
    let mut degeneracy = 0u32;
    let mut cursor = 0usize;
    for step in 0..n {
        while buckets[cursor].is_empty() {
            cursor += 1;
        }
        let v = *buckets[cursor].iter().next().expect("non-empty bucket");
        buckets[cursor].remove(&v);
        removed[v as usize] = true;
        degeneracy = degeneracy.max(degree[v as usize]);
        position[v as usize] = step as u32;
        order.push(v);
        for &w in &adj[v as usize] {
            if !removed[w as usize] {
                let d = degree[w as usize] as usize;
                buckets[d].remove(&w);
                buckets[d - 1].insert(w);
                degree[w as usize] -= 1;
                if d - 1 < cursor {
                    cursor = d - 1;
                }
            }
        }
    }
    PeelResult { order, position, degeneracy }
}

#[derive(Debug, Clone)]
pub struct Orientation {
    out: Vec<Vec<OutEdge>>,
    /// Reverse peel rank: every out-edge u -> v has order_label(u) >
    /// order_label(v).
    order_label: Vec<u32>,
    dmax: u32,
    /// Histogram of out-degrees, for O(1) amortised dmax maintenance.
    degree_hist: Vec<u32>,
    degeneracy: u32,
    alpha_hat: u32,
    updates_since_rebuild: u64,
    rebuild_period: Option<u64>,
    cap_multiplier: u32,
}

impl Orientation {
    /// Rebuild-from-scratch constructor (`rebuild_acyclic`).
    pub fn build(adj: &[Vec<VertexId>]) -> Self {
        let mut o = Orientation {
            out: Vec::new(),
            order_label: Vec::new(),
            dmax: 0,
            degree_hist: Vec::new(),
            degeneracy: 0,
            alpha_hat: 1,
            updates_since_rebuild: 0,
            rebuild_period: None,
            cap_multiplier: 2,
        };
        o.rebuild(adj);
        o
    }

    pub fn with_rebuild_period(adj: &[Vec<VertexId>], period: Option<u64>) -> Self {
        let mut o = Self::build(adj);
        o.rebuild_period = period;
        o
    }

    pub fn rebuild(&mut self, adj: &[Vec<VertexId>]) {
        let n = adj.len();
        let peel = peel_bucket(adj);
        self.order_label = vec![0; n];
        for v in 0..n {
            // Reverse peel order: first removed gets the highest label.
            self.order_label[v] = n as u32 - 1 - peel.position[v];
        }
        self.out = vec![Vec::new(); n];
        for (v, nbrs) in adj.iter().enumerate() {
            // Out-edges point at vertices peeled later, i.e. smaller labels.
            for &w in nbrs {
                if peel.position[w as usize] > peel.position[v] {
                    let slot = self.out[v].len() as u32;
                    self.out[v].push(OutEdge { to: w, slot });
                }
            }
        }
        self.degeneracy = peel.degeneracy;
        self.alpha_hat = (peel.degeneracy + 2) / 2; // ceil((degeneracy+1)/2), min 1
        self.degree_hist = vec![0; n + 1];
        self.dmax = 0;
        for v in 0..n {
            let d = self.out[v].len() as u32;
            self.degree_hist[d as usize] += 1;
            self.dmax = self.dmax.max(d);
        }
        self.updates_since_rebuild = 0;
    }

    pub fn n(&self) -> usize {
        self.out.len()
    }

    pub fn dmax(&self) -> u32 {
        self.dmax
    }

    pub fn alpha_hat(&self) -> u32 {
        self.alpha_hat
    }

    pub fn degeneracy(&self) -> u32 {
        self.degeneracy
    }

    pub fn order_label(&self, v: VertexId) -> u32 {
        self.order_label[v as usize]
    }

    /// Forced-rebuild trigger: cap_multiplier * (alpha_hat + 1), the
    /// multiplier defaulting to 2.
    pub fn out_degree_cap(&self) -> u32 {
        self.cap_multiplier * (self.alpha_hat + 1)
    }

    pub fn set_cap_multiplier(&mut self, m: u32) {
        self.cap_multiplier = m.max(1);
    }

    pub fn out_neighbours(&self, v: VertexId) -> &[OutEdge] {
        &self.out[v as usize]
    }

    pub fn out_degree(&self, v: VertexId) -> u32 {
        self.out[v as usize].len() as u32
    }

    /// Parent in the slot-s forest: the unique out-edge of v carrying slot s.
    pub fn slot_parent(&self, v: VertexId, slot: u32) -> Option<VertexId> {
        self.out[v as usize].get(slot as usize).map(|e| e.to)
    }

    fn shift_degree(&mut self, from: u32, to: u32) {
        self.degree_hist[from as usize] -= 1;
        if to as usize >= self.degree_hist.len() {
            self.degree_hist.resize(to as usize + 1, 0);
        }
        self.degree_hist[to as usize] += 1;
        if to > self.dmax {
            self.dmax = to;
        } else if from == self.dmax && self.degree_hist[from as usize] == 0 {
            while self.dmax > 0 && self.degree_hist[self.dmax as usize] == 0 {
                self.dmax -= 1;
            }
        }
    }

    /// Incremental maintenance; `g` is the graph after the change was
    /// applied. Rebuilds when the cap or the rebuild period is exceeded.
    pub fn notify_insert(&mut self, g: &DynGraph, u: VertexId, v: VertexId) {
        let owner = if self.order_label[u as usize] > self.order_label[v as usize] { u } else { v };
        let target = if owner == u { v } else { u };
        let d = self.out[owner as usize].len() as u32;
        self.out[owner as usize].push(OutEdge { to: target, slot: d });
        self.shift_degree(d, d + 1);
        self.updates_since_rebuild += 1;
        if d + 1 > self.out_degree_cap() || self.updates_since_rebuild > self.effective_period(g) {
            self.rebuild(&g.adjacency());
        }
    }

    pub fn notify_delete(&mut self, g: &DynGraph, u: VertexId, v: VertexId) {
        let owner = if self.out[u as usize].iter().any(|e| e.to == v) { u } else { v };
        let target = if owner == u { v } else { u };
        let list = &mut self.out[owner as usize];
        let idx = list
            .iter()
            .position(|e| e.to == target)
            .expect("deleted edge must be oriented somewhere");
        list.remove(idx);
        // Slots mirror list positions; renumber the tail.
        for (i, e) in list.iter_mut().enumerate().skip(idx) {
            e.slot = i as u32;
        }
        let d = self.out[owner as usize].len() as u32;
        self.shift_degree(d + 1, d);
        self.updates_since_rebuild += 1;
        if self.updates_since_rebuild > self.effective_period(g) {
            self.rebuild(&g.adjacency());
        }
    }

    fn effective_period(&self, g: &DynGraph) -> u64 {
        self.rebuild_period.unwrap_or_else(|| (g.m() as u64 / 2).max(64))
    }

    /// Total out-edges; must equal m at all times.
    pub fn total_out_edges(&self) -> usize {
        self.out.iter().map(|l| l.len()).sum()
    }
}
