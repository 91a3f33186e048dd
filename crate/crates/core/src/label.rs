//! Structured colour labels with a canonical integer flattening.
//!
//! Engines attach the route taken (partition part, palette class, residual
//! fallback) so that palette-block accounting stays debuggable; propriety
//! checks compare only the flattened value.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EngineKind {
    Det,
    RandSimple,
    RandBetter,
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EngineKind::Det => "det",
            EngineKind::RandSimple => "rand-simple",
            EngineKind::RandBetter => "rand-better",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathSeg {
    /// Dispatcher scale index (only on routed queries).
    Scale(u32),
    /// Partition part at that scale.
    Part(u32),
    /// Deterministic leaf: a point of Z_q x Z_q, flattened x*q + y.
    Point { x: u64, y: u64 },
    /// Successful colour experiment.
    Experiment,
    /// Residual greedy fallback block.
    Residual,
    /// Level-1 class a vertex joined in the two-level engine.
    Class(u64),
    /// Small-degree delegation block of the two-level engine.
    Base,
}

impl fmt::Display for PathSeg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathSeg::Scale(i) => write!(f, "scale={i}"),
            PathSeg::Part(j) => write!(f, "part={j}"),
            PathSeg::Point { x, y } => write!(f, "point=({x},{y})"),
            PathSeg::Experiment => write!(f, "experiment"),
            PathSeg::Residual => write!(f, "residual"),
            PathSeg::Class(c) => write!(f, "class={c}"),
            PathSeg::Base => write!(f, "base"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColourLabel {
    pub engine: EngineKind,
    pub path: Vec<PathSeg>,
    /// Leaf colour within the innermost palette block.
    pub leaf: u64,
    /// Canonical flattened palette index; the value compared by propriety
    /// checks and printed by the harness.
    pub value: u64,
}

impl ColourLabel {
    pub fn new(engine: EngineKind, path: Vec<PathSeg>, leaf: u64, value: u64) -> Self {
        ColourLabel { engine, path, leaf, value }
    }

    /// Wrap an inner label in a dispatcher block: value moves into the
    /// (scale, part) block and the path records the route.
    pub fn routed(self, scale: u32, part: u32, span: u64) -> Self {
        debug_assert!(self.value < span, "inner value exceeds routed span");
        let mut path = vec![PathSeg::Scale(scale), PathSeg::Part(part)];
        path.extend(self.path);
        ColourLabel {
            engine: self.engine,
            path,
            leaf: self.leaf,
            value: part as u64 * span + self.value,
        }
    }
}

impl fmt::Display for ColourLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.engine)?;
        for (i, seg) in self.path.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{seg}")?;
        }
        write!(f, "] leaf={} value={}", self.leaf, self.value)
    }
}
