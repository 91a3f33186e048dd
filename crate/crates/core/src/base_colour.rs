//! Implicit 2^dmax base colouring from slot forests.
//!
//! Within a fixed orientation, the out-edges carrying slot s form a graph of
//! out-degree at most one; acyclicity makes each such graph a forest. Two-
//! colouring every slot forest by depth parity and concatenating the bits
//! yields a colour in which adjacent vertices differ in the bit of the slot
//! their shared edge occupies. Parities are memoised per epoch; a query
//! walks the parent chain only until it hits a memoised vertex.

use crate::graph::VertexId;
use crate::orientation::Orientation;

/// A base colour is a dmax-bit string. dmax can exceed 64, so the value is
/// kept as little-endian words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BaseColour {
    words: Vec<u64>,
    len: u32,
}

impl BaseColour {
    fn zero(len: u32) -> Self {
        BaseColour { words: vec![0; len.div_ceil(64).max(1) as usize], len }
    }

    fn set_bit(&mut self, i: u32) {
        self.words[(i / 64) as usize] |= 1 << (i % 64);
    }

    pub fn bit(&self, i: u32) -> bool {
        (self.words[(i / 64) as usize] >> (i % 64)) & 1 == 1
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Flattened value when it fits in a machine word.
    pub fn value_u64(&self) -> Option<u64> {
        if self.words.iter().skip(1).all(|&w| w == 0) {
            Some(self.words[0])
        } else {
            None
        }
    }
}

const UNSET: u8 = u8::MAX;

#[derive(Debug, Clone, Default)]
struct SlotMemo {
    epoch: u64, // epoch + 1; 0 = never touched
    parity: Vec<u8>,
}

/// Per-epoch memo of (vertex, slot) -> depth parity.
#[derive(Debug, Clone, Default)]
pub struct BaseColouring {
    slots: Vec<SlotMemo>,
    touched_epoch: u64,
    touched: Vec<bool>,
}

impl BaseColouring {
    pub fn new() -> Self {
        Self::default()
    }

    /// Depth parity of v in the slot-s forest: false at roots, flipping along
    /// each parent step.
    pub fn parity(&mut self, o: &Orientation, epoch: u64, v: VertexId, slot: u32) -> bool {
        let n = o.n();
        if self.slots.len() <= slot as usize {
            self.slots.resize(slot as usize + 1, SlotMemo::default());
        }
        let memo = &mut self.slots[slot as usize];
        if memo.epoch != epoch + 1 {
            memo.epoch = epoch + 1;
            memo.parity.clear();
            memo.parity.resize(n, UNSET);
        }
        if memo.parity[v as usize] != UNSET {
            return memo.parity[v as usize] == 1;
        }
        // Walk the parent chain, then unwind assigning parities.
        let mut chain = vec![v];
        let mut base;
        loop {
            let cur = *chain.last().expect("chain non-empty");
            match o.slot_parent(cur, slot) {
                Some(p) => {
                    if memo.parity[p as usize] != UNSET {
                        base = memo.parity[p as usize] == 1;
                        break;
                    }
                    chain.push(p);
                }
                None => {
                    let root = chain.pop().expect("chain non-empty");
                    memo.parity[root as usize] = 0;
                    base = false;
                    break;
                }
            }
        }
        for &u in chain.iter().rev() {
            base = !base;
            memo.parity[u as usize] = base as u8;
        }
        memo.parity[v as usize] == 1
    }

    pub fn base_colour(&mut self, o: &Orientation, epoch: u64, v: VertexId) -> BaseColour {
        let width = o.dmax();
        let mut colour = BaseColour::zero(width);
        for slot in 0..width {
            if self.parity(o, epoch, v, slot) {
                colour.set_bit(slot);
            }
        }
        self.note_touched(o.n(), epoch, v);
        colour
    }

    fn note_touched(&mut self, n: usize, epoch: u64, v: VertexId) {
        if self.touched_epoch != epoch + 1 {
            self.touched_epoch = epoch + 1;
            self.touched.clear();
            self.touched.resize(n, false);
        }
        self.touched[v as usize] = true;
    }

    /// Distinct vertices whose full base colour was materialised this epoch;
    /// backs the query-volume measurements.
    pub fn touched_vertices(&self, epoch: u64) -> usize {
        if self.touched_epoch == epoch + 1 {
            self.touched.iter().filter(|&&t| t).count()
        } else {
            0
        }
    }
}
