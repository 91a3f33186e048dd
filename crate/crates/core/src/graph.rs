//! The dynamic undirected graph: ground truth for every engine.
//!
//! The vertex set is fixed at construction; updates insert or delete single
//! edges. Every successful update bumps a monotone epoch counter which
//! invalidates all per-query caches downstream.

use std::collections::BTreeSet;

use thiserror::Error;

pub type VertexId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UpdateReceipt {
    pub epoch: u64,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum GraphError {
    #[error("self loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("edge {{{0}, {1}}} already present")]
    DuplicateEdge(VertexId, VertexId),
    #[error("edge {{{0}, {1}}} not present")]
    MissingEdge(VertexId, VertexId),
    #[error("vertex {v} out of range (n = {n})")]
    VertexOutOfRange { v: VertexId, n: usize },
}

#[derive(Debug, Clone)]
pub struct DynGraph {
    n: usize,
    adj: Vec<BTreeSet<VertexId>>,
    m: usize,
    epoch: u64,
}

impl DynGraph {
    pub fn new(n: usize) -> Self {
        DynGraph { n, adj: vec![BTreeSet::new(); n], m: 0, epoch: 0 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if (v as usize) < self.n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { v, n: self.n })
        }
    }

    pub fn contains_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adj
            .get(u as usize)
            .map(|s| s.contains(&v))
            .unwrap_or(false)
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v as usize].len()
    }

    /// Neighbours in ascending id order; all downstream tie-breaking
    /// inherits this order.
    pub fn neighbours(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj[v as usize].iter().copied()
    }

    /// Each undirected edge once, as (u, v) with u < v.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, s)| {
            let u = u as VertexId;
            s.iter().copied().filter(move |&v| u < v).map(move |v| (u, v))
        })
    }

    pub fn insert_edge(&mut self, u: VertexId, v: VertexId) -> Result<UpdateReceipt, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.adj[u as usize].contains(&v) {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        self.adj[u as usize].insert(v);
        self.adj[v as usize].insert(u);
        self.m += 1;
        self.epoch += 1;
        Ok(UpdateReceipt { epoch: self.epoch })
    }

    pub fn delete_edge(&mut self, u: VertexId, v: VertexId) -> Result<UpdateReceipt, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if !self.adj[u as usize].contains(&v) {
            return Err(GraphError::MissingEdge(u, v));
        }
        self.adj[u as usize].remove(&v);
        self.adj[v as usize].remove(&u);
        self.m -= 1;
        self.epoch += 1;
        Ok(UpdateReceipt { epoch: self.epoch })
    }

    /// Materialise adjacency lists (ascending neighbour order) for the
    /// peeling routines.
    pub fn adjacency(&self) -> Vec<Vec<VertexId>> {
        self.adj.iter().map(|s| s.iter().copied().collect()).collect()
    }

    /// Adjacency restricted to vertices accepted by `member`; edges survive
    /// only when both endpoints are members.
    pub fn adjacency_filtered(&self, member: impl Fn(VertexId) -> bool) -> Vec<Vec<VertexId>> {
        (0..self.n as VertexId)
            .map(|u| {
                if member(u) {
                    self.adj[u as usize]
                        .iter()
                        .copied()
                        .filter(|&v| member(v))
                        .collect()
                } else {
                    Vec::new()
                }
            })
            .collect()
    }
}
