//! Penalty-polynomial synthesis: enforce an arbitrary constraint over few
//! binary variables as a quadratic penalty with as few slack variables as
//! possible.
//!
//! A constraint over M variables is described by a sub-constraint table
//! assigning each of the 2^M combinations a requirement on the penalty
//! value. Synthesis searches for polynomial coefficients meeting every
//! requirement via exact LP feasibility, escalating the slack count only
//! when a fixed count admits no solution.

mod synth;

pub use synth::{solve_fixed_slack, SolveOptions, SolveOutcome};

use crate::qubo::QuadraticPenalty;
use crate::rat::{format_rat, parse_rat, Rat};
use crate::{Error, Result};
use num_traits::Zero;
use std::collections::BTreeMap;

pub const MAX_TABLE_VARS: usize = 12;
pub const MAX_VERIFY_VARS: usize = 20;

/// Requirement on the penalty polynomial at one variable combination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Label {
    /// P(y, s) <= -1 for every slack completion.
    Penalty,
    /// P(y, s) <= 0 for every s and = 0 for at least one s.
    NoPenalty,
    /// No requirement (the combination is ruled out elsewhere).
    Free,
    /// P reaches exactly this nonpositive value at one s and never exceeds it.
    Exact(Rat),
}

/// Per-combination requirements for a constraint over `m` variables.
/// Combination `y` is indexed by its bitmask with y1 as the least
/// significant bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubConstraintTable {
    pub m: usize,
    entries: Vec<Label>,
}

impl SubConstraintTable {
    pub fn new(m: usize, entries: Vec<Label>) -> Result<Self> {
        if m > MAX_TABLE_VARS {
            return Err(Error::TableTooLarge(m, MAX_TABLE_VARS));
        }
        if entries.len() != 1 << m {
            return Err(Error::LengthMismatch {
                got: entries.len(),
                want: 1 << m,
            });
        }
        for e in &entries {
            if let Label::Exact(v) = e {
                if v > &Rat::zero() {
                    return Err(Error::Invalid(format!(
                        "Exact value must be nonpositive, got {}",
                        format_rat(v)
                    )));
                }
            }
        }
        Ok(SubConstraintTable { m, entries })
    }

    pub fn entry(&self, y_bits: u64) -> &Label {
        &self.entries[y_bits as usize]
    }

    pub fn set(&mut self, y_bits: u64, label: Label) {
        self.entries[y_bits as usize] = label;
    }

    pub fn rows(&self) -> impl Iterator<Item = (u64, &Label)> {
        self.entries.iter().enumerate().map(|(i, l)| (i as u64, l))
    }

    /// Number of combinations carrying a requirement (non-Free rows).
    pub fn n_conditions(&self) -> usize {
        self.entries
            .iter()
            .filter(|l| !matches!(l, Label::Free))
            .count()
    }
}

/// Builds the master-mode table of a constraint oracle: Penalty where the
/// oracle reports a violation, NoPenalty where it is satisfied. Satellite
/// tables, which mark master-violating rows Free, are built in the
/// master-satellite module.
pub fn truth_table_from_oracle<F>(m: usize, oracle: F) -> Result<SubConstraintTable>
where
    F: Fn(&[bool]) -> bool,
{
    if m > MAX_TABLE_VARS {
        return Err(Error::TableTooLarge(m, MAX_TABLE_VARS));
    }
    let mut entries = Vec::with_capacity(1 << m);
    let mut y = vec![false; m];
    for bits in 0u64..(1 << m) {
        for (i, b) in y.iter_mut().enumerate() {
            *b = bits & (1 << i) != 0;
        }
        entries.push(if oracle(&y) {
            Label::NoPenalty
        } else {
            Label::Penalty
        });
    }
    SubConstraintTable::new(m, entries)
}

/// Number of free parameters in a quadratic polynomial over M logical and
/// M-bar slack binary variables.
pub fn free_param_count(m: usize, m_bar: usize) -> usize {
    let t = m + m_bar;
    1 + (t * t + t) / 2
}

/// Outcome of a synthesis run: the polynomial, its slack cost, and the
/// zero-witness per satisfied combination, plus search diagnostics.
#[derive(Debug, Clone)]
pub struct PenaltySolveReport {
    pub polynomial: QuadraticPenalty,
    pub slacks_used: usize,
    /// For each NoPenalty (or Exact) row, the slack bits achieving the
    /// required value.
    pub witness_map: BTreeMap<u64, u64>,
    pub branch_count: usize,
    pub lp_count: usize,
}

/// One violated requirement found by exhaustive verification.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub y_bits: u64,
    pub s_bits: u64,
    pub value: Rat,
    pub requirement: String,
}

impl std::fmt::Display for Counterexample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "y={:b} s={:b}: P = {}, {}",
            self.y_bits,
            self.s_bits,
            format_rat(&self.value),
            self.requirement
        )
    }
}

/// Exhaustively checks a polynomial against every labeled condition.
pub fn verify_penalty(
    p: &QuadraticPenalty,
    table: &SubConstraintTable,
) -> Result<(bool, Vec<Counterexample>)> {
    if p.m_logical != table.m {
        return Err(Error::LengthMismatch {
            got: p.m_logical,
            want: table.m,
        });
    }
    if p.dim() > MAX_VERIFY_VARS {
        return Err(Error::CapExceeded {
            vars: p.dim(),
            cap: MAX_VERIFY_VARS,
        });
    }
    let mut bad = Vec::new();
    let mut y = vec![false; p.m_logical];
    let mut s = vec![false; p.m_slack];
    for (y_bits, label) in table.rows() {
        if matches!(label, Label::Free) {
            continue;
        }
        for (i, b) in y.iter_mut().enumerate() {
            *b = y_bits & (1 << i) != 0;
        }
        let mut max: Option<Rat> = None;
        let mut witness_hit = false;
        let target = match label {
            Label::Penalty => None,
            Label::NoPenalty => Some(Rat::zero()),
            Label::Exact(v) => Some(v.clone()),
            Label::Free => unreachable!(),
        };
        for s_bits in 0u64..(1 << p.m_slack) {
            for (k, b) in s.iter_mut().enumerate() {
                *b = s_bits & (1 << k) != 0;
            }
            let v = p.eval(&y, &s)?;
            match (&target, label) {
                (None, _) => {
                    if v > crate::rat::rat(-1) {
                        bad.push(Counterexample {
                            y_bits,
                            s_bits,
                            value: v.clone(),
                            requirement: "penalty row requires P <= -1".into(),
                        });
                    }
                }
                (Some(t), _) => {
                    if &v > t {
                        bad.push(Counterexample {
                            y_bits,
                            s_bits,
                            value: v.clone(),
                            requirement: format!("row requires P <= {}", format_rat(t)),
                        });
                    }
                    if &v == t {
                        witness_hit = true;
                    }
                }
            }
            if max.as_ref().map_or(true, |m| &v > m) {
                max = Some(v);
            }
        }
        if let Some(t) = target {
            if !witness_hit {
                bad.push(Counterexample {
                    y_bits,
                    s_bits: 0,
                    value: max.unwrap(),
                    requirement: format!(
                        "no slack completion reaches the required value {}",
                        format_rat(&t)
                    ),
                });
            }
        }
    }
    Ok((bad.is_empty(), bad))
}

/// Enforces a table with the fewest slack variables within the budget:
/// tries 0, 1, ... `max_slacks` slacks and returns at the first feasible
/// count.
pub fn iqp_enforce(
    table: &SubConstraintTable,
    max_slacks: usize,
    opts: &SolveOptions,
) -> Result<PenaltySolveReport> {
    let mut last_reason = String::from("infeasible");
    for m_bar in 0..=max_slacks {
        match solve_fixed_slack(table, m_bar, opts)? {
            SolveOutcome::Solved(report) => {
                let (ok, bad) = verify_penalty(&report.polynomial, table)?;
                if !ok {
                    return Err(Error::Invalid(format!(
                        "synthesized polynomial failed verification: {}",
                        bad[0]
                    )));
                }
                return Ok(report);
            }
            SolveOutcome::Infeasible => {
                last_reason = "infeasible".into();
            }
            SolveOutcome::BudgetExhausted { nodes } => {
                last_reason = format!("branch budget exhausted after {nodes} nodes");
            }
        }
    }
    Err(Error::SlackBudgetExhausted {
        max_slacks,
        last_tried: max_slacks,
        reason: last_reason,
    })
}

/// Debug dump: `table v1` then one row per combination, leftmost bit = y1.
pub fn write_table_string(t: &SubConstraintTable) -> String {
    let mut out = String::from("table v1\n");
    for (bits, label) in t.rows() {
        let y: String = (0..t.m)
            .map(|i| if bits & (1 << i) != 0 { '1' } else { '0' })
            .collect();
        match label {
            Label::Penalty => out.push_str(&format!("{y} penalty\n")),
            Label::NoPenalty => out.push_str(&format!("{y} nopenalty\n")),
            Label::Free => out.push_str(&format!("{y} free\n")),
            Label::Exact(v) => out.push_str(&format!("{y} exact {}\n", format_rat(v))),
        }
    }
    out
}

pub fn read_table_string(text: &str) -> Result<SubConstraintTable> {
    let err = |line: usize, msg: String| Error::Parse {
        path: "table".into(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "table v1")) => {}
        _ => return Err(err(1, "expected header 'table v1'".into())),
    }
    let mut m = None;
    let mut entries: BTreeMap<u64, Label> = BTreeMap::new();
    for (i, raw) in lines {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let bits_str = f[0];
        let width = bits_str.len();
        if *m.get_or_insert(width) != width {
            return Err(err(lineno, "inconsistent bit width".into()));
        }
        let mut bits = 0u64;
        for (pos, ch) in bits_str.chars().enumerate() {
            match ch {
                '1' => bits |= 1 << pos,
                '0' => {}
                _ => return Err(err(lineno, format!("bad bit '{ch}'"))),
            }
        }
        let label = match (f.get(1), f.get(2)) {
            (Some(&"penalty"), None) => Label::Penalty,
            (Some(&"nopenalty"), None) => Label::NoPenalty,
            (Some(&"free"), None) => Label::Free,
            (Some(&"exact"), Some(v)) => Label::Exact(
                parse_rat(v).ok_or_else(|| err(lineno, format!("bad rational '{v}'")))?,
            ),
            _ => return Err(err(lineno, format!("bad row '{line}'"))),
        };
        if entries.insert(bits, label).is_some() {
            return Err(err(lineno, format!("duplicate row {bits_str}")));
        }
    }
    let m = m.ok_or_else(|| err(0, "no rows".into()))?;
    if entries.len() != 1 << m {
        return Err(err(
            0,
            format!("expected {} rows, got {}", 1 << m, entries.len()),
        ));
    }
    SubConstraintTable::new(m, entries.into_values().collect())
}

#[cfg(test)]
mod tests;
