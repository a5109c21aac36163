//! Slack-ladder penalty encoding: squared equality/inequality penalties
//! with binary-expansion slack variables, the per-node settlement penalties
//! built from them, and the master-satellite range reduction that shrinks a
//! ladder before it is built.

use crate::iqp::{Label, SubConstraintTable};
use crate::model::{node_view, MpbsInstance};
use crate::ms::LambdaStrategy;
use crate::qubo::{embed_penalty, BlockIndex, QuadraticPenalty, Qubo};
use crate::rat::{ceil_log2_succ, rat, to_i64, Rat};
use crate::registry::{NodeSlackRow, SlackSummary};
use crate::{Error, Result};
use num_traits::Zero;

/// Binary expansion covering every integer in `[0, T]`: coefficients
/// `(1, 2, ..., 2^(n-2), S-bar)` with the remainder weight last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlackLadder {
    pub t: u64,
    pub coeffs: Vec<u64>,
}

impl SlackLadder {
    pub fn n_vars(&self) -> usize {
        self.coeffs.len()
    }
}

/// Ladder for the interval `[0, T]`; needs `ceil(log2(1 + T))` bits.
pub fn slack_ladder(t: i64) -> Result<SlackLadder> {
    if t < 0 {
        return Err(Error::Invalid(format!("ladder range must be >= 0, got {t}")));
    }
    let t = t as u64;
    if t == 0 {
        return Ok(SlackLadder { t, coeffs: vec![] });
    }
    let n = ceil_log2_succ(t);
    let mut coeffs: Vec<u64> = (0..n - 1).map(|i| 1u64 << i).collect();
    let s_bar = t - ((1u64 << (n - 1)) - 1);
    coeffs.push(s_bar);
    Ok(SlackLadder { t, coeffs })
}

/// Linear form over the local variables of one penalty, with a constant.
#[derive(Debug, Clone, Default)]
pub struct LocalLin {
    pub m: usize,
    pub coeffs: Vec<(usize, Rat)>,
    pub constant: Rat,
}

impl LocalLin {
    pub fn new(m: usize) -> Self {
        LocalLin {
            m,
            coeffs: vec![],
            constant: Rat::zero(),
        }
    }

    pub fn term(mut self, var: usize, c: Rat) -> Self {
        self.coeffs.push((var, c));
        self
    }

    pub fn with_constant(mut self, c: Rat) -> Self {
        self.constant = c;
        self
    }

    pub fn eval(&self, y: &[bool]) -> Rat {
        let mut v = self.constant.clone();
        for (i, c) in &self.coeffs {
            if y[*i] {
                v += c;
            }
        }
        v
    }

    fn dense(&self) -> Vec<Rat> {
        let mut d = vec![Rat::zero(); self.m];
        for (i, c) in &self.coeffs {
            d[*i] += c;
        }
        d
    }
}

/// `-(expr)^2` expanded into a quadratic penalty over `expr.m` locals:
/// zero exactly where the equality holds, `<= -1` at integer violations.
pub fn standard_equality_penalty(expr: &LocalLin) -> QuadraticPenalty {
    neg_square(expr, &[])
}

/// `-(expr + S(s))^2` with a ladder over `[0, T]`: the slack maximum is 0
/// iff `expr` lands in `[-T, 0]`.
pub fn standard_inequality_penalty(expr: &LocalLin, t: i64) -> Result<QuadraticPenalty> {
    let ladder = slack_ladder(t)?;
    Ok(neg_square(expr, &ladder.coeffs))
}

fn neg_square(expr: &LocalLin, ladder: &[u64]) -> QuadraticPenalty {
    let m = expr.m;
    let mut p = QuadraticPenalty::new(m, ladder.len());
    let mut lin = expr.dense();
    for &c in ladder {
        lin.push(rat(c as i64));
    }
    let c0 = &expr.constant;
    p.a0 = -(c0 * c0);
    for i in 0..lin.len() {
        if lin[i].is_zero() {
            continue;
        }
        p.add_term(i, i, -(&lin[i] * &lin[i]) - rat(2) * c0 * &lin[i]);
        for j in (i + 1)..lin.len() {
            if lin[j].is_zero() {
                continue;
            }
            p.add_term(i, j, -rat(2) * &lin[i] * &lin[j]);
        }
    }
    p
}

/// The two squared IN/OUT penalties of one node over locals
/// `(incoming 0..n_in, outgoing n_in..n_in+n_out)`, with ladders covering
/// `[0, n_in * n_out - 1]`. The joint slack maximum is 0 iff IN/OUT holds.
pub fn standard_inout_penalties(
    n_in: usize,
    n_out: usize,
) -> Result<(QuadraticPenalty, QuadraticPenalty, usize)> {
    assert!(n_in >= 1 && n_out >= 1);
    let m = n_in + n_out;
    let t = (n_in * n_out - 1) as i64;
    let mut ic1 = LocalLin::new(m);
    let mut ic2 = LocalLin::new(m);
    for i in 0..n_in {
        ic1 = ic1.term(i, rat(-(n_out as i64)));
        ic2 = ic2.term(i, rat(1));
    }
    for o in n_in..m {
        ic1 = ic1.term(o, rat(1));
        ic2 = ic2.term(o, rat(-(n_in as i64)));
    }
    let p1 = standard_inequality_penalty(&ic1, t)?;
    let p2 = standard_inequality_penalty(&ic2, t)?;
    let slacks = p1.m_slack + p2.m_slack;
    debug_assert_eq!(slacks, 2 * ceil_log2_succ((n_in * n_out - 1) as u64) as usize);
    Ok((p1, p2, slacks))
}

/// The squared CAP/FLOOR penalty of one node (same local convention), with
/// a ladder covering `[0, CAP - FL]`. Integer weights and windows only.
pub fn standard_capfloor_penalty(
    inst: &MpbsInstance,
    u: u32,
) -> Result<(QuadraticPenalty, usize)> {
    let view = node_view(inst, u)?;
    let (fl, cap) = (
        to_i64(inst.fl(u)).ok_or(Error::NonIntegerData(u))?,
        to_i64(inst.cap(u)).ok_or(Error::NonIntegerData(u))?,
    );
    let m = view.degree();
    let mut expr = LocalLin::new(m).with_constant(rat(-cap));
    for (pos, &a) in view.incoming.iter().enumerate() {
        let w = to_i64(inst.weight(a)).ok_or(Error::NonIntegerData(u))?;
        expr = expr.term(pos, rat(w));
    }
    for (pos, &a) in view.outgoing.iter().enumerate() {
        let w = to_i64(inst.weight(a)).ok_or(Error::NonIntegerData(u))?;
        expr = expr.term(view.n_in() + pos, rat(-w));
    }
    let p = standard_inequality_penalty(&expr, cap - fl)?;
    let slacks = p.m_slack;
    Ok((p, slacks))
}

/// Ladder range for a satellite inequality: only combinations satisfying
/// the master constraint matter, so the ladder needs to cover
/// `[0, |min expr|]` over master-satisfying rows only (clamped at 0).
pub fn ms_range_reduction(master: &SubConstraintTable, expr: &LocalLin) -> i64 {
    let mut min: Option<Rat> = None;
    let mut y = vec![false; master.m];
    for (bits, label) in master.rows() {
        let satisfied = match label {
            Label::NoPenalty => true,
            Label::Exact(v) => v.is_zero(),
            _ => false,
        };
        if !satisfied {
            continue;
        }
        for (i, b) in y.iter_mut().enumerate() {
            *b = bits & (1 << i) != 0;
        }
        let v = expr.eval(&y);
        if min.as_ref().map_or(true, |m| &v < m) {
            min = Some(v);
        }
    }
    match min {
        Some(v) if v < Rat::zero() => to_i64(&-v).unwrap_or(i64::MAX),
        _ => 0,
    }
}

/// Slack-ladder QUBO assembly: `W + sum_u lambda_u (P_io1 + P_io2 + P_cf)`.
/// IN/OUT relative multipliers stay at 1 because squared penalties are
/// never positive.
pub fn assemble_standard(
    inst: &MpbsInstance,
    lambda: &dyn LambdaStrategy,
    gamma: &Rat,
) -> Result<(Qubo, BlockIndex, SlackSummary)> {
    if gamma <= &rat(1) {
        return Err(Error::GammaOutOfRange(crate::rat::format_rat(gamma)));
    }
    let n = inst.n_arcs();
    let mut q = Qubo::new_logical(n);
    let mut blocks = BlockIndex::default();
    for arc in &inst.graph.arcs {
        q.add_term(arc.id as usize, arc.id as usize, arc.weight.clone());
    }

    let mut rows = Vec::new();
    for &u in &inst.graph.nodes {
        let view = node_view(inst, u)?;
        let locals: Vec<usize> = view
            .incoming
            .iter()
            .chain(&view.outgoing)
            .map(|&a| a as usize)
            .collect();
        let lam = lambda.lambda_node(inst, u, gamma)?;

        let (p1, p2, io_slacks) = standard_inout_penalties(view.n_in(), view.n_out())?;
        let (pcf, cf_slacks) = standard_capfloor_penalty(inst, u)?;
        embed_penalty(&mut q, &mut blocks, &p1, &locals, u, "io1", &lam)?;
        embed_penalty(&mut q, &mut blocks, &p2, &locals, u, "io2", &lam)?;
        embed_penalty(&mut q, &mut blocks, &pcf, &locals, u, "cf", &lam)?;

        rows.push(NodeSlackRow {
            node: u,
            n_in: view.n_in(),
            n_out: view.n_out(),
            scenario: format!("{}vs{}", view.n_in().min(view.n_out()), view.n_in().max(view.n_out())),
            io_slacks,
            cf_slacks,
            lambda_node: lam.clone(),
            lambda_io: rat(1),
            note: None,
        });
    }
    let summary = SlackSummary::new("standard", n, rows);
    debug_assert_eq!(summary.total_slacks(), q.n_slack());
    Ok((q, blocks, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iqp::truth_table_from_oracle;

    #[test]
    fn ladder_examples() {
        let l = slack_ladder(15).unwrap();
        assert_eq!(l.coeffs, vec![1, 2, 4, 8]);
        assert_eq!(slack_ladder(0).unwrap().n_vars(), 0);
        let l5 = slack_ladder(5).unwrap();
        assert_eq!(l5.coeffs, vec![1, 2, 2]);
        assert!(slack_ladder(-1).is_err());
    }

    /// every integer in [0, T] is reachable and nothing else
    fn ladder_surjective(t: i64) -> bool {
        let l = slack_ladder(t).unwrap();
        let n = l.n_vars();
        let mut hit = vec![false; t as usize + 1];
        for bits in 0u64..(1 << n) {
            let sum: u64 = l
                .coeffs
                .iter()
                .enumerate()
                .filter(|(k, _)| bits & (1 << k) != 0)
                .map(|(_, &c)| c)
                .sum();
            if sum > t as u64 {
                return false;
            }
            hit[sum as usize] = true;
        }
        hit.iter().all(|&h| h)
    }

    #[test]
    fn ladder_surjectivity_small() {
        for t in 0..=64 {
            assert!(ladder_surjective(t), "T = {t}");
        }
    }

    #[test]
    fn equality_penalty_values() {
        // EC = x1 + x2 + x3 - 1
        let expr = LocalLin::new(3)
            .term(0, rat(1))
            .term(1, rat(1))
            .term(2, rat(1))
            .with_constant(rat(-1));
        let p = standard_equality_penalty(&expr);
        assert_eq!(p.eval(&[true, false, false], &[]).unwrap(), rat(0));
        assert_eq!(p.eval(&[false, false, false], &[]).unwrap(), rat(-1));
        assert_eq!(p.eval(&[true, true, true], &[]).unwrap(), rat(-4));
    }

    #[test]
    fn inequality_penalty_ladder_interaction() {
        // IC = x1 - 1 with T = 1: satisfiable at both values of x1
        let expr = LocalLin::new(1).term(0, rat(1)).with_constant(rat(-1));
        let p = standard_inequality_penalty(&expr, 1).unwrap();
        assert_eq!(p.slack_max(&[false]).unwrap(), rat(0));
        assert_eq!(p.slack_max(&[true]).unwrap(), rat(0));

        // IC = 2 - x1 - x2 with T = 0: only (1,1) reaches zero
        let expr2 = LocalLin::new(2)
            .term(0, rat(-1))
            .term(1, rat(-1))
            .with_constant(rat(2));
        let p2 = standard_inequality_penalty(&expr2, 0).unwrap();
        for (bits, expect_zero) in [(0b00, false), (0b01, false), (0b10, false), (0b11, true)] {
            let y = [bits & 1 != 0, bits & 2 != 0];
            let v = p2.slack_max(&y).unwrap();
            if expect_zero {
                assert_eq!(v, rat(0));
            } else {
                assert!(v <= rat(-1), "{bits:02b}: {v}");
            }
        }
    }

    #[test]
    fn inout_slack_counts_match_table() {
        for (n_in, n_out, want) in [
            (1, 1, 0),
            (1, 2, 2),
            (1, 3, 4),
            (2, 2, 4),
            (1, 4, 4),
            (2, 3, 6),
        ] {
            let (_, _, slacks) = standard_inout_penalties(n_in, n_out).unwrap();
            assert_eq!(slacks, want, "{n_in}vs{n_out}");
        }
    }

    #[test]
    fn inout_penalties_enforce_the_constraint() {
        // exhaustive for every shape up to 5 arcs
        for (n_in, n_out) in [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (1, 4), (2, 3), (3, 2)] {
            let m = n_in + n_out;
            let (p1, p2, _) = standard_inout_penalties(n_in, n_out).unwrap();
            for bits in 0u64..(1 << m) {
                let y: Vec<bool> = (0..m).map(|i| bits & (1 << i) != 0).collect();
                let any_in = y[..n_in].iter().any(|&b| b);
                let any_out = y[n_in..].iter().any(|&b| b);
                let ok = (!any_in && !any_out) || (any_in && any_out);
                let v = p1.slack_max(&y).unwrap() + p2.slack_max(&y).unwrap();
                if ok {
                    assert_eq!(v, rat(0), "{n_in}vs{n_out} bits {bits:b}");
                } else {
                    assert!(v <= rat(-1), "{n_in}vs{n_out} bits {bits:b}: {v}");
                }
            }
        }
    }

    #[test]
    fn capfloor_penalty_block() {
        // node 0 of a 2-cycle: in 4, out 3, window [-7, 8]
        use crate::model::Arc;
        let inst = MpbsInstance::with_window(
            vec![0, 1],
            vec![
                Arc {
                    id: 0,
                    origin: 0,
                    target: 1,
                    weight: rat(3),
                },
                Arc {
                    id: 1,
                    origin: 1,
                    target: 0,
                    weight: rat(4),
                },
            ],
            rat(-7),
            rat(8),
        );
        let (p, slacks) = standard_capfloor_penalty(&inst, 0).unwrap();
        assert_eq!(slacks, 4); // CAP - FL = 15
        // locals: (incoming arc 1, outgoing arc 0)
        assert_eq!(p.slack_max(&[true, true]).unwrap(), rat(0)); // net +1
        assert_eq!(p.slack_max(&[false, false]).unwrap(), rat(0));
        assert_eq!(p.slack_max(&[true, false]).unwrap(), rat(0)); // net +4
        let (p0, s0) = {
            let inst0 = MpbsInstance::with_window(
                inst.graph.nodes.clone(),
                inst.graph.arcs.clone(),
                rat(0),
                rat(0),
            );
            standard_capfloor_penalty(&inst0, 0).unwrap()
        };
        assert_eq!(s0, 0); // CAP - FL = 0
        assert!(p0.slack_max(&[true, false]).unwrap() <= rat(-1));
    }

    #[test]
    fn non_integer_data_is_rejected() {
        use crate::model::Arc;
        let inst = MpbsInstance::with_window(
            vec![0, 1],
            vec![
                Arc {
                    id: 0,
                    origin: 0,
                    target: 1,
                    weight: crate::rat::ratio(7, 2),
                },
                Arc {
                    id: 1,
                    origin: 1,
                    target: 0,
                    weight: rat(4),
                },
            ],
            rat(-7),
            rat(8),
        );
        assert!(matches!(
            standard_capfloor_penalty(&inst, 0),
            Err(Error::NonIntegerData(0))
        ));
    }

    #[test]
    fn range_reduction_on_the_worked_example() {
        // master: x1 + x2 + x3 = 1; satellite IC = -2x1 - 2x2 + x3 + 2
        let master = truth_table_from_oracle(3, |y| {
            y.iter().filter(|&&b| b).count() == 1
        })
        .unwrap();
        let ic = LocalLin::new(3)
            .term(0, rat(-2))
            .term(1, rat(-2))
            .term(2, rat(1))
            .with_constant(rat(2));
        // unrestricted: min over all y is -2 at (1,1,0)
        let all = truth_table_from_oracle(3, |_| true).unwrap();
        assert_eq!(ms_range_reduction(&all, &ic), 2);
        // restricted to master-satisfying rows the minimum is 0
        assert_eq!(ms_range_reduction(&master, &ic), 0);
        // with the reduced range the penalty needs no slack bits at all and
        // punishes the master-satisfying violator (0,0,1) with -9
        let p = standard_inequality_penalty(&ic, 0).unwrap();
        assert_eq!(p.m_slack, 0);
        assert_eq!(p.eval(&[false, false, true], &[]).unwrap(), rat(-9));
    }
}
