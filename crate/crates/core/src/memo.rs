//! Epoch-stamped per-vertex memo tables.
//!
//! All query-side caches are keyed to the graph epoch: a stale stamp means
//! the slot is unset. Invalidation after an update is therefore O(1) and
//! lazy, which matters when thousands of updates land between queries.

#[derive(Debug, Clone)]
pub struct Stamped<T> {
    stamps: Vec<u64>,
    data: Vec<T>,
}

impl<T: Default + Clone> Stamped<T> {
    pub fn new() -> Self {
        Stamped { stamps: Vec::new(), data: Vec::new() }
    }

    fn grow(&mut self, n: usize) {
        if self.stamps.len() < n {
            self.stamps.resize(n, 0);
            self.data.resize(n, T::default());
        }
    }

    /// Stamps store epoch+1 so that epoch 0 is distinguishable from unset.
    pub fn get(&self, epoch: u64, v: usize) -> Option<&T> {
        if self.stamps.get(v).copied() == Some(epoch + 1) {
            Some(&self.data[v])
        } else {
            None
        }
    }

    pub fn set(&mut self, epoch: u64, v: usize, value: T) {
        self.grow(v + 1);
        self.stamps[v] = epoch + 1;
        self.data[v] = value;
    }

    pub fn is_set(&self, epoch: u64, v: usize) -> bool {
        self.stamps.get(v).copied() == Some(epoch + 1)
    }

    /// Vertices set at this epoch (used by stats collectors).
    pub fn set_vertices(&self, epoch: u64) -> impl Iterator<Item = usize> + '_ {
        self.stamps
            .iter()
            .enumerate()
            .filter(move |(_, &s)| s == epoch + 1)
            .map(|(v, _)| v)
    }
}

impl<T: Default + Clone> Default for Stamped<T> {
    fn default() -> Self {
        Self::new()
    }
}
