//! Exhaustive oracles over all 2^N arc selections.
//!
//! Enumeration is partitioned across workers over disjoint index ranges with
//! a commutative reduction, so the result does not depend on the split.

use super::MpbsInstance;
use crate::rat::Rat;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

pub const DEFAULT_BRUTE_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForceResult {
    /// Lexicographically smallest maximizer.
    pub best: Vec<bool>,
    pub value: Rat,
    /// Number of distinct feasible maximizers.
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibleCount {
    pub feasible: u64,
    pub total: u64,
}

impl FeasibleCount {
    pub fn percentage(&self) -> f64 {
        100.0 * self.feasible as f64 / self.total as f64
    }
}

/// Integer-scaled view of an instance for fast enumeration. Exact: all
/// rationals are multiplied by their common denominator.
pub(crate) struct ScaledChecker {
    nodes: Vec<ScaledNode>,
    weights: Vec<i128>,
}

struct ScaledNode {
    in_mask: u64,
    out_mask: u64,
    fl: i128,
    cap: i128,
}

impl ScaledChecker {
    pub(crate) fn build(inst: &MpbsInstance) -> Option<ScaledChecker> {
        let mut denom = BigInt::one();
        for a in &inst.graph.arcs {
            denom = denom.lcm(a.weight.denom());
        }
        for &u in &inst.graph.nodes {
            denom = denom.lcm(inst.fl(u).denom());
            denom = denom.lcm(inst.cap(u).denom());
        }
        let scale = |r: &Rat| -> Option<i128> {
            let v = r.numer() * (&denom / r.denom());
            v.to_i128()
        };
        let weights = inst
            .graph
            .arcs
            .iter()
            .map(|a| scale(&a.weight))
            .collect::<Option<Vec<_>>>()?;
        if weights.iter().any(|w| w.checked_mul(64).is_none()) {
            return None;
        }
        let mut nodes = Vec::new();
        for &u in &inst.graph.nodes {
            let view = super::node_view(inst, u).ok()?;
            let mut in_mask = 0u64;
            let mut out_mask = 0u64;
            for &a in &view.incoming {
                in_mask |= 1 << a;
            }
            for &a in &view.outgoing {
                out_mask |= 1 << a;
            }
            nodes.push(ScaledNode {
                in_mask,
                out_mask,
                fl: scale(inst.fl(u))?,
                cap: scale(inst.cap(u))?,
            });
        }
        Some(ScaledChecker { nodes, weights })
    }

    #[inline]
    pub(crate) fn feasible(&self, bits: u64) -> bool {
        for node in &self.nodes {
            let sel_in = bits & node.in_mask;
            let sel_out = bits & node.out_mask;
            if (sel_in == 0) != (sel_out == 0) {
                return false;
            }
            if sel_in == 0 && sel_out == 0 {
                continue;
            }
            let mut net: i128 = 0;
            let mut m = sel_in;
            while m != 0 {
                let i = m.trailing_zeros();
                net += self.weights[i as usize];
                m &= m - 1;
            }
            let mut m = sel_out;
            while m != 0 {
                let i = m.trailing_zeros();
                net -= self.weights[i as usize];
                m &= m - 1;
            }
            if net < node.fl || net > node.cap {
                return false;
            }
        }
        true
    }

    #[inline]
    fn objective(&self, bits: u64) -> i128 {
        let mut w = 0i128;
        let mut m = bits;
        while m != 0 {
            let i = m.trailing_zeros();
            w += self.weights[i as usize];
            m &= m - 1;
        }
        w
    }
}

fn bits_to_vec(bits: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| bits & (1 << i) != 0).collect()
}

/// True iff the bit vector of `a` is lexicographically before that of `b`,
/// reading arc 0 first.
fn lex_before(a: u64, b: u64, n: usize) -> bool {
    for i in 0..n {
        let (ba, bb) = (a >> i & 1, b >> i & 1);
        if ba != bb {
            return ba < bb;
        }
    }
    false
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded { vars: n, cap });
    }
    Ok(())
}

/// Exhaustive maximum-weight feasible selection. Ties are broken towards the
/// lexicographically smallest bit vector; the number of optima is reported.
pub fn brute_force_mpbs(inst: &MpbsInstance, cap: Option<usize>) -> Result<BruteForceResult> {
    let n = inst.n_arcs();
    check_cap(n, cap.unwrap_or(DEFAULT_BRUTE_CAP))?;
    let checker = ScaledChecker::build(inst);
    let total: u64 = 1 << n;

    if let Some(chk) = checker {
        // (value, argmin-lex bits, multiplicity); the all-zero selection is
        // always feasible, so the fold seed is a real candidate.
        let merge = |a: (i128, u64, u64), b: (i128, u64, u64)| -> (i128, u64, u64) {
            if a.0 > b.0 {
                a
            } else if b.0 > a.0 {
                b
            } else {
                let best = if lex_before(a.1, b.1, n) { a.1 } else { b.1 };
                (a.0, best, a.2 + b.2)
            }
        };
        let best = (0..total)
            .into_par_iter()
            .fold(
                || (0i128, 0u64, 1u64),
                |acc, bits| {
                    if bits == 0 || !chk.feasible(bits) {
                        return acc;
                    }
                    merge(acc, (chk.objective(bits), bits, 1))
                },
            )
            .reduce(|| (0i128, 0u64, 1u64), merge);
        // Re-evaluate the winner exactly so the returned value carries no scaling.
        let x = bits_to_vec(best.1, n);
        let value = inst.objective(&x);
        return Ok(BruteForceResult {
            best: x,
            value,
            multiplicity: best.2,
        });
    }

    // Rational fallback for data whose common denominator overflows i128.
    let mut best_bits = 0u64;
    let mut best_val = Rat::zero();
    let mut mult = 1u64;
    for bits in 1..total {
        let x = bits_to_vec(bits, n);
        if !super::feasible(inst, &x) {
            continue;
        }
        let v = inst.objective(&x);
        if v > best_val {
            best_val = v;
            best_bits = bits;
            mult = 1;
        } else if v == best_val {
            mult += 1;
            if lex_before(bits, best_bits, n) {
                best_bits = bits;
            }
        }
    }
    Ok(BruteForceResult {
        best: bits_to_vec(best_bits, n),
        value: best_val,
        multiplicity: mult,
    })
}

/// Exact count of assignments satisfying all constraints.
pub fn count_feasible(inst: &MpbsInstance, cap: Option<usize>) -> Result<FeasibleCount> {
    let n = inst.n_arcs();
    check_cap(n, cap.unwrap_or(DEFAULT_BRUTE_CAP))?;
    let total: u64 = 1 << n;
    let feasible = if let Some(chk) = ScaledChecker::build(inst) {
        (0..total)
            .into_par_iter()
            .filter(|&bits| chk.feasible(bits))
            .count() as u64
    } else {
        (0..total)
            .filter(|&bits| super::feasible(inst, &bits_to_vec(bits, n)))
            .count() as u64
    };
    Ok(FeasibleCount { feasible, total })
}

/// Slow direct check used to cross-validate the scaled fast path.
#[cfg(test)]
pub(crate) fn feasible_reference(inst: &MpbsInstance, x: &[bool]) -> bool {
    inst.graph
        .nodes
        .iter()
        .all(|&u| super::inout_ok(inst, u, x) && super::capfloor_ok(inst, u, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Arc, MpbsInstance};
    use crate::rat::rat;

    fn two_cycle(w0: i64, w1: i64) -> MpbsInstance {
        MpbsInstance::with_window(
            vec![0, 1],
            vec![
                Arc {
                    id: 0,
                    origin: 0,
                    target: 1,
                    weight: rat(w0),
                },
                Arc {
                    id: 1,
                    origin: 1,
                    target: 0,
                    weight: rat(w1),
                },
            ],
            rat(-7),
            rat(8),
        )
    }

    #[test]
    fn two_cycle_optimum() {
        let r = brute_force_mpbs(&two_cycle(3, 4), None).unwrap();
        assert_eq!(r.best, vec![true, true]);
        assert_eq!(r.value, rat(7));
        assert_eq!(r.multiplicity, 1);
    }

    #[test]
    fn empty_optimum_when_nothing_fits() {
        // net of the 2-cycle is +/-9, outside [-7, 8]: only the empty
        // selection is feasible.
        let r = brute_force_mpbs(&two_cycle(14, 5), None).unwrap();
        assert_eq!(r.best, vec![false, false]);
        assert_eq!(r.value, rat(0));
        let c = count_feasible(&two_cycle(14, 5), None).unwrap();
        assert_eq!(c.feasible, 1);
    }

    #[test]
    fn duplicate_optimum_instance_reports_multiplicity() {
        // two 2-cycles sharing node 0; selecting both would push node 0 to
        // net +6, outside [-3, 3], so the two single-cycle selections tie.
        let inst2 = MpbsInstance::with_window(
            vec![0, 1, 2],
            vec![
                Arc {
                    id: 0,
                    origin: 0,
                    target: 1,
                    weight: rat(1),
                },
                Arc {
                    id: 1,
                    origin: 1,
                    target: 0,
                    weight: rat(4),
                },
                Arc {
                    id: 2,
                    origin: 0,
                    target: 2,
                    weight: rat(1),
                },
                Arc {
                    id: 3,
                    origin: 2,
                    target: 0,
                    weight: rat(4),
                },
            ],
            rat(-3),
            rat(3),
        );
        let r2 = brute_force_mpbs(&inst2, None).unwrap();
        assert_eq!(r2.value, rat(5));
        assert_eq!(r2.multiplicity, 2);
        // lexicographically smallest maximizer starts with arc 0 unselected
        assert_eq!(r2.best, vec![false, false, true, true]);
    }

    #[test]
    fn two_cycle_counts() {
        let c = count_feasible(&two_cycle(3, 4), None).unwrap();
        assert_eq!(c.feasible, 2);
        assert_eq!(c.total, 4);
        assert!((c.percentage() - 50.0).abs() < 1e-12);
    }

    #[test]
    fn paper_scale_feasible_counts_are_sparse() {
        use crate::model::{generate_instance, GenParams};
        // ten-arc instances keep a handful of feasible selections, around
        // one to two percent of the 1024 combinations
        for seed in 0..6 {
            let inst = generate_instance(&GenParams::paper_defaults(10, 5, seed)).unwrap();
            let c = count_feasible(&inst, None).unwrap();
            assert!(
                (1..=60).contains(&c.feasible),
                "seed {seed}: {}",
                c.feasible
            );
            assert!(c.percentage() < 6.0, "seed {seed}: {}", c.percentage());
        }
        let inst = generate_instance(&GenParams::paper_defaults(10, 5, 2)).unwrap();
        let c = count_feasible(&inst, None).unwrap();
        assert_eq!(c.feasible, 18);
        assert!((c.percentage() - 1.758).abs() < 0.01);
    }

    #[test]
    fn cap_is_enforced() {
        let inst = two_cycle(3, 4);
        assert!(matches!(
            brute_force_mpbs(&inst, Some(1)),
            Err(crate::Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn scaled_checker_matches_reference_on_rational_data() {
        use crate::rat::ratio;
        let mut inst = two_cycle(3, 4);
        inst.graph.arcs[0].weight = ratio(7, 2);
        let inst = MpbsInstance::new(inst.graph);
        let chk = ScaledChecker::build(&inst).unwrap();
        for bits in 0..4u64 {
            let x = bits_to_vec(bits, 2);
            assert_eq!(chk.feasible(bits), feasible_reference(&inst, &x));
        }
    }
}
