//! Search for penalty-polynomial coefficients at a fixed slack count.
//!
//! Requirements split into two kinds. "For all s" rows are plain linear
//! inequalities on the coefficients. Zero-witness rows demand the
//! polynomial to reach a value at *some* slack completion: a disjunction,
//! handled by depth-first branching over the witness choice with an exact
//! LP feasibility check on the partial system at every node. The uniform
//! all-zeros witness pattern (and its constant-witness variants) is tried
//! first; after a feasible leaf, the L1 norm of the coefficients is
//! minimized to bias towards sparse, small polynomials.
//!
//! Slack variables are interchangeable and polarity-free, so the witness of
//! the first branched row is fixed to all-zeros and the second is explored
//! only up to bit permutation; any solution can be mapped into this frame
//! by relabeling slacks.

use super::{Label, PenaltySolveReport, SubConstraintTable};
use crate::lp::{lp_feasible, lp_l1_min, LinExpr, LpOutcome};
use crate::qubo::QuadraticPenalty;
use crate::rat::Rat;
use crate::Result;
use num_traits::Zero;
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Branch-node limit per fixed-slack solve; each node costs at most one
    /// LP.
    pub node_budget: usize,
    /// Minimize the coefficient L1 norm at the first feasible leaf.
    pub l1_minimize: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            node_budget: 100_000,
            l1_minimize: true,
        }
    }
}

#[derive(Debug)]
pub enum SolveOutcome {
    Solved(PenaltySolveReport),
    Infeasible,
    BudgetExhausted { nodes: usize },
}

/// Monomial basis of the generic quadratic polynomial: the constant, then
/// every unordered variable pair (i, i) and (i, j) over logical + slack
/// locals. Index order fixes the coefficient vector layout.
struct ParamBasis {
    m: usize,
    m_bar: usize,
    pairs: Vec<(usize, usize)>,
}

impl ParamBasis {
    fn new(m: usize, m_bar: usize) -> Self {
        let dim = m + m_bar;
        let mut pairs = Vec::new();
        for i in 0..dim {
            for j in i..dim {
                pairs.push((i, j));
            }
        }
        ParamBasis { m, m_bar, pairs }
    }

    fn n_params(&self) -> usize {
        1 + self.pairs.len()
    }

    /// P(y, s) as a linear expression over the coefficient vector.
    fn row(&self, y_bits: u64, s_bits: u64) -> LinExpr {
        let on = |local: usize| -> bool {
            if local < self.m {
                y_bits & (1 << local) != 0
            } else {
                s_bits & (1 << (local - self.m)) != 0
            }
        };
        let mut e = LinExpr::new().term(0, Rat::from_integer(1.into()));
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            if on(i) && on(j) {
                e = e.term(k + 1, Rat::from_integer(1.into()));
            }
        }
        e
    }

    fn polynomial(&self, coeffs: &[Rat]) -> QuadraticPenalty {
        let mut p = QuadraticPenalty::new(self.m, self.m_bar);
        p.a0 = coeffs[0].clone();
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            if !coeffs[k + 1].is_zero() {
                p.add_term(i, j, coeffs[k + 1].clone());
            }
        }
        p
    }
}

/// Triangular variable-elimination state for accumulated equalities. Each
/// pivot expresses one parameter as an affine form over still-free ones;
/// inequalities are rewritten before the LP so deep branch nodes solve
/// smaller systems.
#[derive(Clone, Default)]
struct Elimination {
    pivots: BTreeMap<usize, LinExpr>,
}

enum PushResult {
    Ok,
    Redundant,
    Inconsistent,
}

impl Elimination {
    fn substitute(&self, expr: &LinExpr) -> LinExpr {
        let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
        let mut constant = expr.constant.clone();
        for (v, c) in &expr.terms {
            if let Some(rhs) = self.pivots.get(v) {
                constant += &rhs.constant * c;
                for (v2, c2) in &rhs.terms {
                    *acc.entry(*v2).or_insert_with(Rat::zero) += c2 * c;
                }
            } else {
                *acc.entry(*v).or_insert_with(Rat::zero) += c;
            }
        }
        LinExpr {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
            constant,
        }
    }

    /// Adds `expr = 0`, eliminating one more parameter when possible.
    fn push_equality(&mut self, expr: &LinExpr) -> PushResult {
        let reduced = self.substitute(expr);
        match reduced.terms.first() {
            None => {
                if reduced.constant.is_zero() {
                    PushResult::Redundant
                } else {
                    PushResult::Inconsistent
                }
            }
            Some((pivot, pc)) => {
                let pivot = *pivot;
                let pc = pc.clone();
                let rhs = LinExpr {
                    terms: reduced
                        .terms
                        .iter()
                        .skip(1)
                        .map(|(v, c)| (*v, -(c / &pc)))
                        .collect(),
                    constant: -(&reduced.constant / &pc),
                };
                // older pivot expressions may reference the new pivot
                let mut updated = BTreeMap::new();
                for (v, e) in &self.pivots {
                    let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
                    let mut constant = e.constant.clone();
                    for (v2, c2) in &e.terms {
                        if *v2 == pivot {
                            constant += &rhs.constant * c2;
                            for (v3, c3) in &rhs.terms {
                                *acc.entry(*v3).or_insert_with(Rat::zero) += c3 * c2;
                            }
                        } else {
                            *acc.entry(*v2).or_insert_with(Rat::zero) += c2;
                        }
                    }
                    updated.insert(
                        *v,
                        LinExpr {
                            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
                            constant,
                        },
                    );
                }
                self.pivots = updated;
                self.pivots.insert(pivot, rhs);
                PushResult::Ok
            }
        }
    }

    /// Lifts an LP point over free parameters back to the full space.
    fn reconstruct(&self, free_point: &[Rat]) -> Vec<Rat> {
        let mut full = free_point.to_vec();
        for (v, e) in &self.pivots {
            let mut val = e.constant.clone();
            for (v2, c2) in &e.terms {
                val += c2 * &free_point[*v2];
            }
            full[*v] = val;
        }
        full
    }
}

fn eval_expr(expr: &LinExpr, point: &[Rat]) -> Rat {
    let mut v = expr.constant.clone();
    for (i, c) in &expr.terms {
        v += c * &point[*i];
    }
    v
}

struct Search {
    basis: ParamBasis,
    m_bar: usize,
    /// Fixed "for all s" inequality rows (expr <= 0).
    fixed_ineqs: Vec<LinExpr>,
    /// Branchable rows: (y_bits, required value).
    witness_rows: Vec<(u64, Rat)>,
    node_budget: usize,
    nodes: usize,
    lp_count: usize,
    budget_hit: bool,
}

impl Search {
    fn witness_equality(&self, row: usize, s_bits: u64) -> LinExpr {
        let (y_bits, ref v) = self.witness_rows[row];
        let mut e = self.basis.row(y_bits, s_bits);
        e.constant -= v;
        e
    }

    /// Feasibility of the fixed inequalities under the eliminations;
    /// returns a witness point in the full parameter space. Eliminated
    /// parameters are compressed out of the LP columns.
    fn lp_point(&mut self, elim: &Elimination) -> Option<Vec<Rat>> {
        self.lp_count += 1;
        let n = self.basis.n_params();
        let mut remap = vec![usize::MAX; n];
        let mut n_free = 0;
        for p in 0..n {
            if !elim.pivots.contains_key(&p) {
                remap[p] = n_free;
                n_free += 1;
            }
        }
        let ineqs: Vec<LinExpr> = self
            .fixed_ineqs
            .iter()
            .map(|e| {
                let sub = elim.substitute(e);
                LinExpr {
                    terms: sub.terms.into_iter().map(|(v, c)| (remap[v], c)).collect(),
                    constant: sub.constant,
                }
            })
            .collect();
        match lp_feasible(n_free, &[], &ineqs, None) {
            LpOutcome::Feasible(compressed) => {
                let mut free = vec![Rat::zero(); n];
                for p in 0..n {
                    if remap[p] != usize::MAX {
                        free[p] = compressed[remap[p]].clone();
                    }
                }
                Some(elim.reconstruct(&free))
            }
            _ => None,
        }
    }

    /// Witness candidates for a row, shrunk by slack symmetry: the first
    /// branched row is pinned to all-zeros, the second explored only up to
    /// bit permutation, later rows in full lexicographic order.
    fn candidates(&self, row: usize) -> Vec<u64> {
        match row {
            0 => vec![0],
            1 => (0..=self.m_bar).map(|k| (1u64 << k) - 1).collect(),
            _ => (0..(1u64 << self.m_bar)).collect(),
        }
    }

    /// Depth-first over witness choices. `point` is a known feasible point
    /// of the partial system, reused to skip LPs whenever it already meets
    /// the next equality.
    fn dfs(&mut self, row: usize, elim: &Elimination, point: &[Rat]) -> Option<Vec<u64>> {
        if row == self.witness_rows.len() {
            return Some(Vec::new());
        }
        for s_bits in self.candidates(row) {
            if self.nodes >= self.node_budget {
                self.budget_hit = true;
                return None;
            }
            self.nodes += 1;
            let eq = self.witness_equality(row, s_bits);
            let mut child = elim.clone();
            let reuse = match child.push_equality(&eq) {
                PushResult::Inconsistent => continue,
                PushResult::Redundant => Some(point.to_vec()),
                PushResult::Ok => {
                    if eval_expr(&eq, point).is_zero() {
                        Some(point.to_vec())
                    } else {
                        None
                    }
                }
            };
            let child_point = match reuse {
                Some(p) => p,
                None => match self.lp_point(&child) {
                    Some(p) => p,
                    None => continue,
                },
            };
            if let Some(mut rest) = self.dfs(row + 1, &child, &child_point) {
                rest.insert(0, s_bits);
                return Some(rest);
            }
        }
        None
    }

    /// One-shot probe of a complete witness assignment.
    fn try_pattern(&mut self, witnesses: &[u64]) -> bool {
        let mut elim = Elimination::default();
        for (row, &s) in witnesses.iter().enumerate() {
            match elim.push_equality(&self.witness_equality(row, s)) {
                PushResult::Inconsistent => return false,
                _ => {}
            }
        }
        self.lp_point(&elim).is_some()
    }
}

pub fn solve_fixed_slack(
    table: &SubConstraintTable,
    m_bar: usize,
    opts: &SolveOptions,
) -> Result<SolveOutcome> {
    let basis = ParamBasis::new(table.m, m_bar);
    let minus_one = crate::rat::rat(-1);

    let mut fixed_ineqs = Vec::new();
    let mut witness_rows = Vec::new();
    for (y_bits, label) in table.rows() {
        match label {
            Label::Free => {}
            Label::Penalty => {
                for s_bits in 0u64..(1 << m_bar) {
                    // P(y, s) <= -1
                    let mut e = basis.row(y_bits, s_bits);
                    e.constant -= &minus_one;
                    fixed_ineqs.push(e);
                }
            }
            Label::NoPenalty | Label::Exact(_) => {
                let target = match label {
                    Label::Exact(v) => v.clone(),
                    _ => Rat::zero(),
                };
                let bound = if target < Rat::zero() {
                    target.clone()
                } else {
                    Rat::zero()
                };
                for s_bits in 0u64..(1 << m_bar) {
                    // P(y, s) <= min(target, 0)
                    let mut e = basis.row(y_bits, s_bits);
                    e.constant -= &bound;
                    fixed_ineqs.push(e);
                }
                witness_rows.push((y_bits, target));
            }
        }
    }

    let mut search = Search {
        basis,
        m_bar,
        fixed_ineqs,
        witness_rows,
        node_budget: opts.node_budget,
        nodes: 0,
        lp_count: 0,
        budget_hit: false,
    };

    // constant-pattern probes: all witnesses at w (the zero row, whose
    // equality only pins the polynomial at y=0, always takes witness 0)
    let n_rows = search.witness_rows.len();
    let mut found: Option<Vec<u64>> = None;
    for w in 0u64..(1 << m_bar) {
        let pattern: Vec<u64> = search
            .witness_rows
            .iter()
            .map(|&(y, _)| if y == 0 { 0 } else { w })
            .collect();
        if search.try_pattern(&pattern) {
            found = Some(pattern);
            break;
        }
        if n_rows == 0 {
            break;
        }
    }

    let witnesses = match found {
        Some(w) => Some(w),
        None => {
            let root = Elimination::default();
            match search.lp_point(&root) {
                Some(point) => search.dfs(0, &root, &point),
                None => None,
            }
        }
    };
    let Some(witnesses) = witnesses else {
        return Ok(if search.budget_hit {
            SolveOutcome::BudgetExhausted {
                nodes: search.nodes,
            }
        } else {
            SolveOutcome::Infeasible
        });
    };

    // final solve on the full system with the chosen witnesses
    let eqs: Vec<LinExpr> = (0..search.witness_rows.len())
        .map(|r| search.witness_equality(r, witnesses[r]))
        .collect();
    let outcome = if opts.l1_minimize {
        lp_l1_min(search.basis.n_params(), &eqs, &search.fixed_ineqs)
    } else {
        lp_feasible(search.basis.n_params(), &eqs, &search.fixed_ineqs, None)
    };
    let LpOutcome::Feasible(coeffs) = outcome else {
        return Ok(SolveOutcome::Infeasible);
    };

    let polynomial = search.basis.polynomial(&coeffs);
    let witness_map: BTreeMap<u64, u64> = search
        .witness_rows
        .iter()
        .zip(&witnesses)
        .map(|(&(y, _), &s)| (y, s))
        .collect();
    Ok(SolveOutcome::Solved(PenaltySolveReport {
        polynomial,
        slacks_used: m_bar,
        witness_map,
        branch_count: search.nodes,
        lp_count: search.lp_count,
    }))
}
