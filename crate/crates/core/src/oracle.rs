//! Independent brute-force validators used by tests and acceptance runs.
//!
//! Nothing here may reach into engine internals: validation sees engines
//! only through the colour-query closure it is handed, plus the public
//! orientation surface for component statistics.

use std::collections::{BTreeMap, HashSet};

use crate::cover_free::{colour_to_set, uncovered_element, CfParams, CoverFreeError, PolySet};
use crate::engine::QueryError;
use crate::graph::{DynGraph, VertexId};
use crate::orientation::Orientation;
use crate::prf::KeyStream;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub proper: bool,
    pub violating_edge: Option<(VertexId, VertexId)>,
    /// Distinct flattened colours over the materialised vector.
    pub palette_used: usize,
    pub max_colour: u64,
    /// Sizes of residual/failed forward components, histogram as
    /// (size, count).
    pub component_size_histogram: Vec<(usize, usize)>,
    pub max_out_degree: u32,
}

/// Query every vertex once in the given order, then scan every edge.
pub fn materialise_and_check(
    g: &DynGraph,
    order: &[VertexId],
    mut query: impl FnMut(VertexId) -> Result<u64, QueryError>,
    max_out_degree: u32,
    component_sizes: &[usize],
) -> Result<ValidationReport, QueryError> {
    debug_assert_eq!(order.len(), g.n());
    let mut colours = vec![0u64; g.n()];
    for &v in order {
        colours[v as usize] = query(v)?;
    }
    let mut violating_edge = None;
    for (u, v) in g.edges() {
        if colours[u as usize] == colours[v as usize] {
            violating_edge = Some((u, v));
            break;
        }
    }
    let distinct: HashSet<u64> = colours.iter().copied().collect();
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for &s in component_sizes {
        *histogram.entry(s).or_insert(0) += 1;
    }
    Ok(ValidationReport {
        proper: violating_edge.is_none(),
        violating_edge,
        palette_used: distinct.len(),
        max_colour: colours.iter().copied().max().unwrap_or(0),
        component_size_histogram: histogram.into_iter().collect(),
        max_out_degree,
    })
}

/// Exact degeneracy by repeated minimum-degree removal, smallest id first.
/// Deliberately naive; the bucket-queue peel in the orientation module is
/// the production implementation this one cross-checks.
pub fn degeneracy_peel(adj: &[Vec<VertexId>]) -> (u32, Vec<VertexId>) {
    let n = adj.len();
    let mut degree: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut degeneracy = 0u32;
    for _ in 0..n {
        let mut best: Option<VertexId> = None;
        for v in 0..n {
            if !removed[v] && best.map(|b| degree[v] < degree[b as usize]).unwrap_or(true) {
                best = Some(v as VertexId);
            }
        }
        let v = best.expect("vertices remain");
        removed[v as usize] = true;
        degeneracy = degeneracy.max(degree[v as usize] as u32);
        order.push(v);
        for &w in &adj[v as usize] {
            if !removed[w as usize] {
                degree[w as usize] -= 1;
            }
        }
    }
    (degeneracy, order)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverFreeCheck {
    pub holds: bool,
    /// Exhaustive below the subset budget; sampled above it.
    pub sampled: bool,
    pub cases_checked: u64,
}

/// Budget on (target, r-subset) cases before the check falls back to
/// uniform sampling.
const SUBSET_BUDGET: u64 = 1_000_000;
const SAMPLE_CASES: u64 = 10_000;

/// Verify cover-freeness of the polynomial family: no target set may be
/// covered by the union of r others. Exhaustive for small families, sampled
/// (and flagged as such) when the subset count explodes.
pub fn exhaustive_coverfree_check(p: &CfParams) -> Result<CoverFreeCheck, CoverFreeError> {
    p.validate()?;
    let family = p.family_size().ok_or(CoverFreeError::RangeTooLarge)?;
    if family > 10_000 {
        return Err(CoverFreeError::RangeTooLarge);
    }
    let polys: Vec<PolySet> =
        (0..family).map(|x| colour_to_set(x, p).expect("x < family size")).collect();
    let r = p.r as usize;
    let total_cases = (family as u128).saturating_mul(binomial(family - 1, p.r));
    if total_cases <= SUBSET_BUDGET as u128 {
        let mut cases = 0u64;
        for t in 0..family as usize {
            let rest: Vec<usize> = (0..family as usize).filter(|&i| i != t).collect();
            let mut subset = vec![0usize; r];
            if !for_each_subset(&rest, r, &mut subset, 0, 0, &mut |chosen| {
                cases += 1;
                let others: Vec<PolySet> =
                    chosen.iter().map(|&i| polys[i].clone()).collect();
                uncovered_element(&polys[t], &others, p).is_ok()
            }) {
                return Ok(CoverFreeCheck { holds: false, sampled: false, cases_checked: cases });
            }
        }
        Ok(CoverFreeCheck { holds: true, sampled: false, cases_checked: cases })
    } else {
        let mut rng = KeyStream::new(&[0x5EED, p.q, p.deg as u64, p.r]);
        for case in 0..SAMPLE_CASES {
            let t = rng.next_below(family) as usize;
            let mut others = Vec::with_capacity(r);
            while others.len() < r {
                let i = rng.next_below(family) as usize;
                if i != t {
                    others.push(polys[i].clone());
                }
            }
            if uncovered_element(&polys[t], &others, p).is_err() {
                return Ok(CoverFreeCheck { holds: false, sampled: true, cases_checked: case + 1 });
            }
        }
        Ok(CoverFreeCheck { holds: true, sampled: true, cases_checked: SAMPLE_CASES })
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    acc
}

/// Enumerate k-subsets of `items`, calling `f` on each; stops early (and
/// returns false) when `f` does.
fn for_each_subset(
    items: &[usize],
    k: usize,
    scratch: &mut Vec<usize>,
    depth: usize,
    from: usize,
    f: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if depth == k {
        return f(&scratch[..k]);
    }
    for i in from..items.len() {
        scratch[depth] = items[i];
        if !for_each_subset(items, k, scratch, depth + 1, i + 1, f) {
            return false;
        }
    }
    true
}

/// Sizes of R(v) for every failed vertex v: the failed vertices reachable
/// from v along out-edges through failed vertices only.
pub fn forward_component_sizes(o: &Orientation, failed: &[VertexId]) -> Vec<usize> {
    let failed_set: HashSet<VertexId> = failed.iter().copied().collect();
    failed
        .iter()
        .map(|&v| {
            let mut seen: HashSet<VertexId> = HashSet::from([v]);
            let mut stack = vec![v];
            while let Some(u) = stack.pop() {
                for e in o.out_neighbours(u) {
                    if failed_set.contains(&e.to) && seen.insert(e.to) {
                        stack.push(e.to);
                    }
                }
            }
            seen.len()
        })
        .collect()
}
