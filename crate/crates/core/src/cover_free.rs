//! Explicit r-cover-free families from polynomial graphs over Z_q.
//!
//! A set in the family is the graph {(i, P(i)) : i in Z_q} of a polynomial P
//! of degree at most `deg`. Two distinct polynomials agree on at most `deg`
//! points, so as long as r * deg < q no set is covered by the union of any r
//! others, and an uncovered evaluation point can be reported by scanning the
//! arguments in ascending order.

use crate::arith::{self, FamilySize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverFreeError {
    #[error("invalid cover-free parameters: {0}")]
    InvalidParams(String),
    #[error("colour index out of range for this family")]
    IndexOutOfRange,
    #[error("no uncovered element found (precondition violated)")]
    NoUncoveredElement,
    #[error("family too large for exhaustive checking")]
    RangeTooLarge,
}

/// Parameters of one polynomial-graph family. Colours are points of
/// Z_q x Z_q, flattened as x * q + y.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfParams {
    pub q: u64,
    pub deg: u32,
    pub r: u64,
    pub k: FamilySize,
}

impl CfParams {
    pub fn new(q: u64, deg: u32, r: u64, k: FamilySize) -> Result<Self, CoverFreeError> {
        let p = CfParams { q, deg, r, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), CoverFreeError> {
        if !arith::is_prime(self.q) {
            return Err(CoverFreeError::InvalidParams(format!("q = {} is not prime", self.q)));
        }
        if self.deg == 0 || self.r == 0 {
            return Err(CoverFreeError::InvalidParams("deg and r must be positive".into()));
        }
        if self.r * self.deg as u64 >= self.q {
            return Err(CoverFreeError::InvalidParams(format!(
                "need r*deg < q, got {}*{} >= {}",
                self.r, self.deg, self.q
            )));
        }
        if arith::pow_cmp(self.q, self.deg + 1, &self.k) != std::cmp::Ordering::Greater {
            return Err(CoverFreeError::InvalidParams(format!(
                "need q^(deg+1) > k, got q = {} deg = {}",
                self.q, self.deg
            )));
        }
        Ok(())
    }

    /// Output palette size q^2.
    pub fn palette(&self) -> u64 {
        self.q * self.q
    }

    /// Family size q^(deg+1) when it fits a u64.
    pub fn family_size(&self) -> Option<u64> {
        let mut acc: u64 = 1;
        for _ in 0..=self.deg {
            acc = acc.checked_mul(self.q)?;
        }
        Some(acc)
    }
}

/// A member set, represented by its polynomial. `coeffs[j]` is the coefficient
/// of x^j; the constant term is the least significant base-q digit of the
/// colour index it encodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySet {
    pub coeffs: Vec<u64>,
}

impl PolySet {
    pub fn eval(&self, x: u64, q: u64) -> u64 {
        let mut acc: u64 = 0;
        for &c in self.coeffs.iter().rev() {
            acc = (acc * x + c) % q;
        }
        acc
    }
}

/// Pick (deg, q) minimising the output palette q^2 subject to r*deg < q and
/// q^(deg+1) > k. deg ranges over 1..=ceil(log2(k+1)) (beyond that q = 2
/// already covers any k, and larger deg only hurts the r*deg constraint).
pub fn select_params(k: FamilySize, r: u64) -> CfParams {
    let r = r.max(1);
    let deg_max = match k {
        FamilySize::Exact(v) => arith::ceil_log2(v + 1).max(1),
        FamilySize::Pow2(bits) => bits + 1,
    };
    // The prime search start for each degree; process cheapest first so the
    // running minimum prunes the hopeless small degrees (whose root bound is
    // astronomically large for wide k).
    let mut starts: Vec<(u64, u32)> = (1..=deg_max)
        .map(|deg| {
            let root = arith::min_base_exceeding(deg + 1, &k);
            (root.max(r * deg as u64 + 1).max(2), deg)
        })
        .collect();
    starts.sort();
    let mut best: Option<CfParams> = None;
    for (q0, deg) in starts {
        if let Some(b) = &best {
            if q0 > b.q {
                continue;
            }
        }
        let q = arith::next_prime_at_least(q0);
        // Ties on q go to the smaller degree.
        if let Some(b) = &best {
            if q > b.q || (q == b.q && deg >= b.deg) {
                continue;
            }
        }
        let cand = CfParams { q, deg, r, k };
        debug_assert!(cand.validate().is_ok(), "search produced invalid params");
        best = Some(cand);
    }
    best.expect("degree range is non-empty")
}

/// Lexicographic injection g: the coefficient of x^j is the j-th base-q
/// digit of the colour index (least significant digit = constant term).
pub fn colour_to_set(x: u64, p: &CfParams) -> Result<PolySet, CoverFreeError> {
    colour_to_set_wide(&[x], p)
}

/// Same injection for indices wider than 64 bits (little-endian words).
pub fn colour_to_set_wide(x: &[u64], p: &CfParams) -> Result<PolySet, CoverFreeError> {
    let mut limbs = x.to_vec();
    if limbs.is_empty() {
        limbs.push(0);
    }
    let mut coeffs = Vec::with_capacity(p.deg as usize + 1);
    for _ in 0..=p.deg {
        coeffs.push(arith::div_rem_limbs(&mut limbs, p.q));
    }
    if limbs.iter().any(|&w| w != 0) {
        return Err(CoverFreeError::IndexOutOfRange);
    }
    Ok(PolySet { coeffs })
}

/// Smallest argument x where no other polynomial agrees with the target;
/// returns the point (x, target(x)). Exists whenever |others| <= r, because
/// the others cover at most r*deg < q arguments.
pub fn uncovered_element(
    target: &PolySet,
    others: &[PolySet],
    p: &CfParams,
) -> Result<(u64, u64), CoverFreeError> {
    'args: for x in 0..p.q {
        let t = target.eval(x, p.q);
        for o in others {
            if o.eval(x, p.q) == t {
                continue 'args;
            }
        }
        return Ok((x, t));
    }
    Err(CoverFreeError::NoUncoveredElement)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent enumeration oracle: scan every degree, take the smallest
    /// valid prime for each, keep the minimum q^2.
    fn oracle_select(k: u64, r: u64) -> (u32, u64) {
        let mut best: Option<(u64, u32)> = None;
        for deg in 1..=arith::ceil_log2(k + 1).max(1) {
            let mut q = 2u64;
            loop {
                let big_enough =
                    arith::pow_cmp(q, deg + 1, &FamilySize::Exact(k)) == std::cmp::Ordering::Greater;
                if arith::is_prime(q) && q > r * deg as u64 && big_enough {
                    break;
                }
                q += 1;
            }
            if best.map(|(bq, _)| q < bq).unwrap_or(true) {
                best = Some((q, deg));
            }
        }
        let (q, deg) = best.unwrap();
        (deg, q)
    }

    #[test]
    fn select_params_small_cases() {
        // k = 16, r = 3: deg 1 with q = 5 (5 > 3 and 25 > 16) is minimal.
        let p = select_params(FamilySize::Exact(16), 3);
        assert_eq!((p.deg, p.q), (1, 5));
        assert_eq!((p.deg, p.q), oracle_select(16, 3));

        // Trivial family.
        let p = select_params(FamilySize::Exact(1), 1);
        assert_eq!((p.deg, p.q), (1, 2));
        assert_eq!((p.deg, p.q), oracle_select(1, 1));
    }

    #[test]
    fn select_params_matches_enumeration_oracle() {
        // k = 101^2, r = 20: the oracle settles on deg 2, q = 41
        // (41 > 40 and 41^3 = 68921 > 10201), beating deg 4's q = 83.
        let k = 101u64 * 101;
        assert_eq!(oracle_select(k, 20), (2, 41));
        let p = select_params(FamilySize::Exact(k), 20);
        assert_eq!((p.deg, p.q), (2, 41));

        for (k, r) in [(2u64, 1u64), (100, 7), (1 << 20, 20), (3721, 7), (255, 4)] {
            let p = select_params(FamilySize::Exact(k), r);
            assert_eq!((p.deg, p.q), oracle_select(k, r), "k={k} r={r}");
            assert!(p.validate().is_ok());
        }
    }

    #[test]
    fn select_params_pow2_consistent_with_exact() {
        for bits in [1u32, 4, 13, 20, 40] {
            for r in [1u64, 5, 20, 127] {
                let a = select_params(FamilySize::Pow2(bits), r);
                let b = select_params(FamilySize::Exact(1u64 << bits), r);
                assert_eq!((a.deg, a.q), (b.deg, b.q), "bits={bits} r={r}");
            }
        }
        // Wide case stays computable and valid.
        let p = select_params(FamilySize::Pow2(127), 127);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn digit_convention() {
        let p = CfParams::new(5, 1, 3, FamilySize::Exact(16)).unwrap();
        // x = 0 maps to the zero polynomial, the set {(i, 0)}.
        let z = colour_to_set(0, &p).unwrap();
        assert_eq!(z.coeffs, vec![0, 0]);
        assert!((0..5).all(|i| z.eval(i, 5) == 0));
        // x = 7 = 1*5 + 2: constant term 2, linear coefficient 1.
        let s = colour_to_set(7, &p).unwrap();
        assert_eq!(s.coeffs, vec![2, 1]);
        assert_eq!(s.eval(3, 5), (3 + 2) % 5);
        // 25 = q^(deg+1) is out of range.
        assert_eq!(colour_to_set(25, &p), Err(CoverFreeError::IndexOutOfRange));
    }

    #[test]
    fn injection_is_injective_exhaustively() {
        // q = 3, deg = 2: all 27 polynomials pairwise distinct as functions.
        let p = CfParams::new(3, 2, 1, FamilySize::Exact(26)).unwrap();
        let sets: Vec<Vec<u64>> = (0..27)
            .map(|x| {
                let s = colour_to_set(x, &p).unwrap();
                (0..3).map(|i| s.eval(i, 3)).collect()
            })
            .collect();
        for a in 0..27 {
            for b in (a + 1)..27 {
                assert_ne!(sets[a], sets[b], "colours {a} and {b} map to one set");
            }
        }
    }

    #[test]
    fn wide_and_narrow_digit_paths_agree() {
        let p = CfParams::new(13, 3, 4, FamilySize::Exact(20_000)).unwrap();
        for x in [0u64, 1, 12, 13, 168, 2196, 19_999] {
            assert_eq!(colour_to_set(x, &p), colour_to_set_wide(&[x, 0], &p));
        }
    }

    #[test]
    fn intersection_bound_exhaustive() {
        // Any two distinct PolySets share at most deg evaluation points.
        for (q, deg) in [(5u64, 1u32), (7, 2)] {
            let fam: u64 = q.pow(deg + 1);
            let p = CfParams { q, deg, r: 1, k: FamilySize::Exact(fam - 1) };
            let polys: Vec<PolySet> = (0..fam).map(|x| colour_to_set(x, &p).unwrap()).collect();
            for a in 0..fam as usize {
                for b in (a + 1)..fam as usize {
                    let shared = (0..q)
                        .filter(|&x| polys[a].eval(x, q) == polys[b].eval(x, q))
                        .count() as u32;
                    assert!(shared <= deg, "q={q} deg={deg}: {a} and {b} share {shared}");
                }
            }
        }
    }

    #[test]
    fn uncovered_element_examples() {
        let p = CfParams::new(5, 1, 4, FamilySize::Exact(24)).unwrap();
        // Target P(x) = x against constants 0, 1, 2: covered at x = 0, 1, 2,
        // so the smallest uncovered argument is 3.
        let target = PolySet { coeffs: vec![0, 1] };
        let others = vec![
            PolySet { coeffs: vec![0, 0] },
            PolySet { coeffs: vec![1, 0] },
            PolySet { coeffs: vec![2, 0] },
        ];
        assert_eq!(uncovered_element(&target, &others, &p), Ok((3, 3)));
        // Nothing covered: the first point wins.
        assert_eq!(uncovered_element(&target, &[], &p), Ok((0, 0)));
    }

    #[test]
    fn uncovered_element_exhaustive_q5() {
        // q = 5, deg = 1, r = 4: every target against every 4-subset of the
        // remaining polynomials has an uncovered point.
        let p = CfParams::new(5, 1, 4, FamilySize::Exact(24)).unwrap();
        let polys: Vec<PolySet> = (0..25).map(|x| colour_to_set(x, &p).unwrap()).collect();
        for t in 0..25usize {
            let rest: Vec<usize> = (0..25).filter(|&i| i != t).collect();
            for a in 0..rest.len() {
                for b in (a + 1)..rest.len() {
                    for c in (b + 1)..rest.len() {
                        for d in (c + 1)..rest.len() {
                            let others = [
                                polys[rest[a]].clone(),
                                polys[rest[b]].clone(),
                                polys[rest[c]].clone(),
                                polys[rest[d]].clone(),
                            ];
                            let got = uncovered_element(&polys[t], &others, &p);
                            assert!(got.is_ok(), "target {t} covered by {:?}", [a, b, c, d]);
                            let (x, y) = got.unwrap();
                            assert_eq!(polys[t].eval(x, 5), y);
                            assert!(others.iter().all(|o| o.eval(x, 5) != y));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn invalid_params_rejected() {
        // 3*1 < 3 fails: the invariant surfaces before any enumeration.
        assert!(matches!(
            CfParams::new(3, 1, 3, FamilySize::Exact(8)),
            Err(CoverFreeError::InvalidParams(_))
        ));
        assert!(matches!(
            CfParams::new(4, 1, 1, FamilySize::Exact(2)),
            Err(CoverFreeError::InvalidParams(_))
        ));
    }
}
