//! End-to-end formulation check: a QUBO with slack structure represents an
//! instance exactly when, over every logical assignment, the slack-maximized
//! value equals the objective on feasible selections and stays strictly
//! below the feasible optimum on infeasible ones.

use crate::model::{brute_force_mpbs, MpbsInstance, ScaledChecker};
use crate::qubo::{BlockIndex, Qubo, ScanEvaluator, VarLabel};
use crate::rat::{format_rat, Rat};
use crate::{Error, Result};
use num_traits::ToPrimitive;

pub const MAX_VERIFY_ARCS: usize = 20;
const MAX_LISTED: usize = 20;

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub ok: bool,
    pub violations: Vec<String>,
    pub violation_count: u64,
    /// Exhaustive feasible optimum of the instance.
    pub w_star: Rat,
    /// Max over logical assignments of the slack-maximized QUBO value.
    pub qubo_max: Rat,
}

fn bits_string(bits: u64, n: usize) -> String {
    (0..n)
        .map(|i| if bits & (1 << i) != 0 { '1' } else { '0' })
        .collect()
}

/// Checks (a) every feasible x evaluates to its objective, (b) every
/// infeasible x stays below the feasible optimum, (c) the argmax set equals
/// the set of feasible optima.
pub fn verify_formulation(
    inst: &MpbsInstance,
    q: &Qubo,
    blocks: &BlockIndex,
) -> Result<VerifyReport> {
    let n = inst.n_arcs();
    if n > MAX_VERIFY_ARCS {
        return Err(Error::CapExceeded {
            vars: n,
            cap: MAX_VERIFY_ARCS,
        });
    }
    // logical labels must list the arcs in id order so assignment bits of
    // the QUBO and of the instance coincide
    let logical: Vec<&VarLabel> = q
        .labels()
        .iter()
        .filter(|l| matches!(l, VarLabel::Logical(_)))
        .collect();
    if logical.len() != n
        || logical
            .iter()
            .enumerate()
            .any(|(i, l)| !matches!(l, VarLabel::Logical(a) if *a as usize == i))
    {
        return Err(Error::Invalid(
            "qubo logical labels do not list the instance arcs in id order".into(),
        ));
    }

    let ev = ScanEvaluator::new(q, blocks)?;
    let brute = brute_force_mpbs(inst, Some(MAX_VERIFY_ARCS))?;
    let w_star = brute.value.clone();
    let checker = ScaledChecker::build(inst);
    let total: u64 = 1 << n;

    // integer fast path: weights and the evaluator must share one scale,
    // i.e. every w * scale is integral
    let exact_scale_ok = inst
        .graph
        .arcs
        .iter()
        .all(|a| (&ev.scale % a.weight.denom()) == num_bigint::BigInt::from(0));
    let scaled_weights: Option<Vec<i128>> = if ev.has_fast_path() && exact_scale_ok {
        inst.graph
            .arcs
            .iter()
            .map(|a| (a.weight.numer() * &ev.scale / a.weight.denom()).to_i128())
            .collect()
    } else {
        None
    };

    let mut violations = Vec::new();
    let mut violation_count = 0u64;
    let push = |v: &mut Vec<String>, count: &mut u64, msg: String| {
        *count += 1;
        if v.len() < MAX_LISTED {
            v.push(msg);
        }
    };

    let feasible_at = |bits: u64| -> bool {
        match &checker {
            Some(c) => c.feasible(bits),
            None => {
                let x: Vec<bool> = (0..n).map(|i| bits & (1 << i) != 0).collect();
                crate::model::feasible(inst, &x)
            }
        }
    };

    let qubo_max: Rat;
    if let (Some(ws), true) = (&scaled_weights, exact_scale_ok) {
        let wstar_scaled = (w_star.numer() * &ev.scale / w_star.denom())
            .to_i128()
            .ok_or_else(|| Error::Invalid("objective too large for the fast path".into()))?;
        let obj = |bits: u64| -> i128 {
            let mut v = 0i128;
            let mut m = bits;
            while m != 0 {
                let i = m.trailing_zeros() as usize;
                v += ws[i];
                m &= m - 1;
            }
            v
        };
        let mut max_seen = i128::MIN;
        for bits in 0..total {
            let v = ev.value_scaled(bits).expect("fast path");
            if v > max_seen {
                max_seen = v;
            }
        }
        for bits in 0..total {
            let v = ev.value_scaled(bits).unwrap();
            let feas = feasible_at(bits);
            if feas {
                let o = obj(bits);
                if v != o {
                    push(
                        &mut violations,
                        &mut violation_count,
                        format!(
                            "feasible x={} evaluates wrong: got {v}, objective {o} (scaled)",
                            bits_string(bits, n)
                        ),
                    );
                }
                if o == wstar_scaled && v != max_seen {
                    push(
                        &mut violations,
                        &mut violation_count,
                        format!(
                            "optimal x={} is not a qubo argmax",
                            bits_string(bits, n)
                        ),
                    );
                }
            } else if v >= wstar_scaled {
                push(
                    &mut violations,
                    &mut violation_count,
                    format!(
                        "infeasible x={} reaches {v} >= optimum {wstar_scaled} (scaled)",
                        bits_string(bits, n)
                    ),
                );
            }
            if v == max_seen && (!feas || obj(bits) != wstar_scaled) {
                push(
                    &mut violations,
                    &mut violation_count,
                    format!(
                        "qubo argmax x={} is not a feasible optimum",
                        bits_string(bits, n)
                    ),
                );
            }
        }
        qubo_max = Rat::new(max_seen.into(), ev.scale.clone());
    } else {
        let mut max_seen: Option<Rat> = None;
        let mut values = Vec::with_capacity(total as usize);
        for bits in 0..total {
            let x: Vec<bool> = (0..n).map(|i| bits & (1 << i) != 0).collect();
            let v = ev.value(&x)?;
            if max_seen.as_ref().map_or(true, |m| &v > m) {
                max_seen = Some(v.clone());
            }
            values.push(v);
        }
        let max_seen = max_seen.expect("nonempty scan");
        for bits in 0..total {
            let x: Vec<bool> = (0..n).map(|i| bits & (1 << i) != 0).collect();
            let v = &values[bits as usize];
            let feas = feasible_at(bits);
            if feas {
                let o = inst.objective(&x);
                if v != &o {
                    push(
                        &mut violations,
                        &mut violation_count,
                        format!(
                            "feasible x={} evaluates wrong: got {}, objective {}",
                            bits_string(bits, n),
                            format_rat(v),
                            format_rat(&o)
                        ),
                    );
                }
                if o == w_star && v != &max_seen {
                    push(
                        &mut violations,
                        &mut violation_count,
                        format!("optimal x={} is not a qubo argmax", bits_string(bits, n)),
                    );
                }
            } else if v >= &w_star {
                push(
                    &mut violations,
                    &mut violation_count,
                    format!(
                        "infeasible x={} reaches {} >= optimum {}",
                        bits_string(bits, n),
                        format_rat(v),
                        format_rat(&w_star)
                    ),
                );
            }
            if v == &max_seen && (!feas || inst.objective(&x) != w_star) {
                push(
                    &mut violations,
                    &mut violation_count,
                    format!(
                        "qubo argmax x={} is not a feasible optimum",
                        bits_string(bits, n)
                    ),
                );
            }
        }
        qubo_max = max_seen;
    }

    Ok(VerifyReport {
        ok: violation_count == 0,
        violations,
        violation_count,
        w_star,
        qubo_max,
    })
}
