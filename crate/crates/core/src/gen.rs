//! Deterministic workload generation for the harness and the statistical
//! suites. A single keyed stream drives every choice, so a (kind, params,
//! seed) triple always produces byte-identical output.

use std::collections::HashMap;

use crate::graph::VertexId;
use crate::prf::KeyStream;
use crate::stream::{StreamError, StreamOp, UpdateStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkloadKind {
    /// Random edge churn holding the edge count near a target.
    Gnm,
    /// Churn restricted to a fixed planar edge pool (grid plus diagonals),
    /// keeping degeneracy small.
    PlanarLike,
    /// Insert-heavy hubs: stresses high in-degree vertices and the badness
    /// machinery.
    StarBurst,
    /// Disjoint cliques driving the arboricity estimate up, to exercise
    /// partition routing.
    CliqueBlocks,
}

impl WorkloadKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "gnm" => Some(WorkloadKind::Gnm),
            "planar-like" => Some(WorkloadKind::PlanarLike),
            "star-burst" => Some(WorkloadKind::StarBurst),
            "clique-blocks" => Some(WorkloadKind::CliqueBlocks),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            WorkloadKind::Gnm => "gnm",
            WorkloadKind::PlanarLike => "planar-like",
            WorkloadKind::StarBurst => "star-burst",
            WorkloadKind::CliqueBlocks => "clique-blocks",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenParams {
    pub kind: WorkloadKind,
    pub n: usize,
    pub updates: u64,
    pub queries: u64,
    /// Emit a validate directive every this many updates (0 = never).
    pub validate_every: u64,
    pub seed: u64,
    /// Edge-count target for gnm.
    pub m_target: usize,
    /// Clique-blocks shape.
    pub blocks: u32,
    pub block_size: u32,
    /// Hub count for star-burst.
    pub hubs: u32,
}

impl GenParams {
    pub fn new(kind: WorkloadKind, n: usize, updates: u64, seed: u64) -> Self {
        GenParams {
            kind,
            n,
            updates,
            queries: updates / 100,
            validate_every: 0,
            seed,
            m_target: n * 2,
            blocks: 4,
            block_size: 20,
            hubs: (n / 100).max(1) as u32,
        }
    }
}

/// Tracks present edges with O(1) uniform deletion.
struct EdgePool {
    list: Vec<(VertexId, VertexId)>,
    index: HashMap<(VertexId, VertexId), usize>,
}

impl EdgePool {
    fn new() -> Self {
        EdgePool { list: Vec::new(), index: HashMap::new() }
    }

    fn key(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
        (u.min(v), u.max(v))
    }

    fn contains(&self, u: VertexId, v: VertexId) -> bool {
        self.index.contains_key(&Self::key(u, v))
    }

    fn insert(&mut self, u: VertexId, v: VertexId) {
        let k = Self::key(u, v);
        self.index.insert(k, self.list.len());
        self.list.push(k);
    }

    fn remove(&mut self, u: VertexId, v: VertexId) {
        let k = Self::key(u, v);
        let i = self.index.remove(&k).expect("edge present");
        let last = self.list.pop().expect("non-empty");
        if i < self.list.len() {
            self.list[i] = last;
            self.index.insert(last, i);
        }
    }

    fn random(&self, rng: &mut KeyStream) -> (VertexId, VertexId) {
        self.list[rng.next_index(self.list.len())]
    }

    fn len(&self) -> usize {
        self.list.len()
    }
}

pub fn gen_workload(p: &GenParams) -> Result<UpdateStream, StreamError> {
    if p.n < 2 {
        return Err(StreamError::BadParams("need at least two vertices".into()));
    }
    match p.kind {
        WorkloadKind::CliqueBlocks => {
            if p.block_size < 2 || (p.blocks as usize) * (p.block_size as usize) > p.n {
                return Err(StreamError::BadParams(format!(
                    "{} blocks of size {} exceed n = {}",
                    p.blocks, p.block_size, p.n
                )));
            }
        }
        WorkloadKind::StarBurst if p.hubs == 0 || p.hubs as usize >= p.n => {
            return Err(StreamError::BadParams("hub count out of range".into()));
        }
        _ => {}
    }
    let mut rng = KeyStream::new(&[p.seed, p.kind as u64, p.n as u64, p.updates]);
    let mut present = EdgePool::new();
    let mut ops = Vec::with_capacity(p.updates as usize + p.queries as usize + 4);
    let n = p.n as u64;

    // Kind-specific candidate machinery.
    let planar_pool: Vec<(VertexId, VertexId)> = if p.kind == WorkloadKind::PlanarLike {
        planar_edge_pool(p.n)
    } else {
        Vec::new()
    };
    let clique_pool: Vec<(VertexId, VertexId)> = if p.kind == WorkloadKind::CliqueBlocks {
        let mut pool = Vec::new();
        for b in 0..p.blocks {
            let base = b * p.block_size;
            for u in 0..p.block_size {
                for v in (u + 1)..p.block_size {
                    pool.push((base + u, base + v));
                }
            }
        }
        pool
    } else {
        Vec::new()
    };
    let mut clique_cursor = 0usize;

    let query_stride = p.updates.checked_div(p.queries).map_or(0, |s| s.max(1));
    for step in 1..=p.updates {
        let op = match p.kind {
            WorkloadKind::Gnm => {
                let insert = if present.len() < p.m_target {
                    rng.next_below(10) < 8
                } else {
                    rng.next_below(10) < 3
                };
                if insert || present.len() == 0 {
                    match random_absent_pair(&mut rng, n, &present) {
                        Some((u, v)) => {
                            present.insert(u, v);
                            StreamOp::Insert(u, v)
                        }
                        None => continue,
                    }
                } else {
                    let (u, v) = present.random(&mut rng);
                    present.remove(u, v);
                    StreamOp::Delete(u, v)
                }
            }
            WorkloadKind::PlanarLike => {
                let (u, v) = planar_pool[rng.next_index(planar_pool.len())];
                if present.contains(u, v) {
                    present.remove(u, v);
                    StreamOp::Delete(u, v)
                } else {
                    present.insert(u, v);
                    StreamOp::Insert(u, v)
                }
            }
            WorkloadKind::StarBurst => {
                let insert = present.len() == 0 || rng.next_below(10) < 7;
                if insert {
                    let hub = (rng.next_below(p.hubs as u64) as usize * p.n / p.hubs as usize)
                        as VertexId;
                    let mut tries = 0;
                    let mut found = None;
                    while tries < 32 {
                        let leaf = rng.next_below(n) as VertexId;
                        if leaf != hub && !present.contains(hub, leaf) {
                            found = Some(leaf);
                            break;
                        }
                        tries += 1;
                    }
                    match found {
                        Some(leaf) => {
                            present.insert(hub, leaf);
                            StreamOp::Insert(hub, leaf)
                        }
                        None => continue,
                    }
                } else {
                    let (u, v) = present.random(&mut rng);
                    present.remove(u, v);
                    StreamOp::Delete(u, v)
                }
            }
            WorkloadKind::CliqueBlocks => {
                if clique_cursor < clique_pool.len() {
                    let (u, v) = clique_pool[clique_cursor];
                    clique_cursor += 1;
                    present.insert(u, v);
                    StreamOp::Insert(u, v)
                } else {
                    // Churn within the blocks.
                    let (u, v) = clique_pool[rng.next_index(clique_pool.len())];
                    if present.contains(u, v) {
                        present.remove(u, v);
                        StreamOp::Delete(u, v)
                    } else {
                        present.insert(u, v);
                        StreamOp::Insert(u, v)
                    }
                }
            }
        };
        ops.push(op);
        if query_stride > 0 && step % query_stride == 0 {
            ops.push(StreamOp::Query(rng.next_below(n) as VertexId));
        }
        if p.validate_every > 0 && step % p.validate_every == 0 {
            ops.push(StreamOp::Validate);
        }
    }
    // Query-only workloads (updates = 0) still emit their queries.
    if p.updates == 0 {
        for _ in 0..p.queries {
            ops.push(StreamOp::Query(rng.next_below(n) as VertexId));
        }
    }
    Ok(UpdateStream { n: p.n, ops })
}

fn random_absent_pair(
    rng: &mut KeyStream,
    n: u64,
    present: &EdgePool,
) -> Option<(VertexId, VertexId)> {
    for _ in 0..64 {
        let u = rng.next_below(n) as VertexId;
        let v = rng.next_below(n) as VertexId;
        if u != v && !present.contains(u, v) {
            return Some((u.min(v), u.max(v)));
        }
    }
    None
}

/// Grid edges plus one diagonal per cell: a planar pool, so every generated
/// graph is a planar subgraph (degeneracy at most 5).
fn planar_edge_pool(n: usize) -> Vec<(VertexId, VertexId)> {
    let side = (n as f64).sqrt().floor() as usize;
    let side = side.max(2);
    let mut pool = Vec::new();
    let at = |r: usize, c: usize| (r * side + c) as VertexId;
    for r in 0..side {
        for c in 0..side {
            if at(r, c) as usize >= n {
                continue;
            }
            if c + 1 < side && (at(r, c + 1) as usize) < n {
                pool.push((at(r, c), at(r, c + 1)));
            }
            if r + 1 < side && (at(r + 1, c) as usize) < n {
                pool.push((at(r, c), at(r + 1, c)));
            }
            if r + 1 < side && c + 1 < side && (at(r + 1, c + 1) as usize) < n {
                pool.push((at(r, c), at(r + 1, c + 1)));
            }
        }
    }
    pool
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn replay_final_adjacency(s: &UpdateStream) -> Vec<Vec<VertexId>> {
        let mut g = crate::graph::DynGraph::new(s.n);
        for op in &s.ops {
            match *op {
                StreamOp::Insert(u, v) => {
                    g.insert_edge(u, v).expect("generated inserts are legal");
                }
                StreamOp::Delete(u, v) => {
                    g.delete_edge(u, v).expect("generated deletes are legal");
                }
                _ => {}
            }
        }
        g.adjacency()
    }

    #[test]
    fn zero_target_gnm_is_queries_only() {
        let mut p = GenParams::new(WorkloadKind::Gnm, 100, 0, 1);
        p.queries = 25;
        let s = gen_workload(&p).unwrap();
        assert_eq!(s.ops.len(), 25);
        assert!(s.ops.iter().all(|op| matches!(op, StreamOp::Query(_))));
    }

    #[test]
    fn clique_blocks_reach_target_arboricity() {
        // Five K_20 blocks: degeneracy 19, alpha_hat = ceil(20/2) = 10.
        let mut p = GenParams::new(WorkloadKind::CliqueBlocks, 200, 5 * 190, 3);
        p.blocks = 5;
        p.block_size = 20;
        p.queries = 0;
        let s = gen_workload(&p).unwrap();
        let adj = replay_final_adjacency(&s);
        let (degeneracy, _) = oracle::degeneracy_peel(&adj);
        assert_eq!(degeneracy, 19);
        assert!((degeneracy + 2) / 2 >= 10);
    }

    #[test]
    fn same_seed_same_bytes() {
        let p = GenParams::new(WorkloadKind::StarBurst, 500, 2000, 42);
        let a = gen_workload(&p).unwrap().to_text();
        let b = gen_workload(&p).unwrap().to_text();
        assert_eq!(a, b);
        let mut p2 = p.clone();
        p2.seed = 43;
        assert_ne!(a, gen_workload(&p2).unwrap().to_text());
    }

    #[test]
    fn planar_like_stays_low_degeneracy() {
        let mut p = GenParams::new(WorkloadKind::PlanarLike, 400, 3000, 7);
        p.queries = 0;
        let s = gen_workload(&p).unwrap();
        let adj = replay_final_adjacency(&s);
        let (degeneracy, _) = oracle::degeneracy_peel(&adj);
        assert!(degeneracy <= 5, "planar-like degeneracy {degeneracy}");
    }

    #[test]
    fn generated_streams_are_legal() {
        for kind in [
            WorkloadKind::Gnm,
            WorkloadKind::PlanarLike,
            WorkloadKind::StarBurst,
            WorkloadKind::CliqueBlocks,
        ] {
            let mut p = GenParams::new(kind, 300, 4000, 11);
            p.validate_every = 1000;
            let s = gen_workload(&p).unwrap();
            replay_final_adjacency(&s); // panics on illegal ops
            assert!(s.ops.iter().any(|op| matches!(op, StreamOp::Validate)));
            assert!(s.ops.iter().any(|op| matches!(op, StreamOp::Query(_))));
        }
    }

    #[test]
    fn bad_params_rejected() {
        let mut p = GenParams::new(WorkloadKind::CliqueBlocks, 30, 100, 1);
        p.blocks = 4;
        p.block_size = 10; // 40 > 30
        assert!(matches!(gen_workload(&p), Err(StreamError::BadParams(_))));
    }
}
