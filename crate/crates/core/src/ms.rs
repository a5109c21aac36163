//! Master-satellite enforcement: satellite tables, accidental-incentive
//! accounting, relative multipliers, chained enforcement for three or more
//! constraints on shared variables, and the node-multiplier strategies.

use crate::iqp::{
    iqp_enforce, Label, PenaltySolveReport, SolveOptions, SubConstraintTable, MAX_TABLE_VARS,
};
use crate::model::MpbsInstance;
use crate::qubo::QuadraticPenalty;
use crate::rat::{rat, Rat};
use crate::{Error, Result};
use num_traits::Zero;

/// Constraint oracle over a fixed set of binary variables.
pub type Oracle<'a> = &'a dyn Fn(&[bool]) -> bool;

/// Table for a satellite constraint: combinations violating any master are
/// Free (no requirement there), the rest are labeled by the satellite.
pub fn satellite_table(
    masters: &[Oracle<'_>],
    satellite: Oracle<'_>,
    m: usize,
) -> Result<SubConstraintTable> {
    if m > MAX_TABLE_VARS {
        return Err(Error::TableTooLarge(m, MAX_TABLE_VARS));
    }
    let mut entries = Vec::with_capacity(1 << m);
    let mut y = vec![false; m];
    for bits in 0u64..(1 << m) {
        for (i, b) in y.iter_mut().enumerate() {
            *b = bits & (1 << i) != 0;
        }
        let label = if masters.iter().any(|mc| !mc(&y)) {
            Label::Free
        } else if satellite(&y) {
            Label::NoPenalty
        } else {
            Label::Penalty
        };
        entries.push(label);
    }
    SubConstraintTable::new(m, entries)
}

/// Largest joint value the satellite penalties can reach: max over y of the
/// sum of per-penalty slack maxima. Exact because slack sets are disjoint,
/// so each penalty maximizes its own slacks independently.
pub fn accidental_incentive_max(satellites: &[&QuadraticPenalty]) -> Result<Rat> {
    let m = satellites.first().map_or(0, |p| p.m_logical);
    for p in satellites {
        if p.m_logical != m {
            return Err(Error::LengthMismatch {
                got: p.m_logical,
                want: m,
            });
        }
    }
    let mut best: Option<Rat> = None;
    let mut y = vec![false; m];
    for bits in 0u64..(1 << m) {
        for (i, b) in y.iter_mut().enumerate() {
            *b = bits & (1 << i) != 0;
        }
        let mut sum = Rat::zero();
        for p in satellites {
            sum += p.slack_max(&y)?;
        }
        if best.as_ref().map_or(true, |b| &sum > b) {
            best = Some(sum);
        }
    }
    Ok(best.unwrap_or_else(Rat::zero))
}

/// `1 + gamma * max(0, incentive)`; 1 exactly when nothing is promoted.
pub fn relative_multiplier(incentive: &Rat, gamma: &Rat) -> Result<Rat> {
    if gamma <= &rat(1) {
        return Err(Error::GammaOutOfRange(crate::rat::format_rat(gamma)));
    }
    let clamped = if incentive > &Rat::zero() {
        incentive.clone()
    } else {
        Rat::zero()
    };
    Ok(rat(1) + gamma * clamped)
}

/// Relative multiplier of a master constraint whose satellite penalty is
/// `cf`: compensates the largest accidental incentive over all (y, s).
pub fn lambda_io(cf: &QuadraticPenalty, gamma: &Rat) -> Result<Rat> {
    let incentive = accidental_incentive_max(&[cf])?;
    relative_multiplier(&incentive, gamma)
}

/// Chained enforcement of constraints sharing one variable set: position i
/// is only required on combinations already satisfying positions < i, and
/// its multiplier compensates the joint incentives of later positions.
#[derive(Debug, Clone)]
pub struct ConstraintChain {
    pub tables: Vec<SubConstraintTable>,
    pub penalties: Vec<QuadraticPenalty>,
    pub multipliers: Vec<Rat>,
    pub reports: Vec<PenaltySolveReport>,
}

pub fn concatenated_enforce(
    oracles: &[Oracle<'_>],
    m: usize,
    budgets: &[usize],
    gamma: &Rat,
    opts: &SolveOptions,
) -> Result<ConstraintChain> {
    if oracles.len() < 2 || oracles.len() > 4 {
        return Err(Error::Invalid(format!(
            "chain length must be 2..=4, got {}",
            oracles.len()
        )));
    }
    if m > 8 {
        return Err(Error::TableTooLarge(m, 8));
    }
    if budgets.len() != oracles.len() {
        return Err(Error::LengthMismatch {
            got: budgets.len(),
            want: oracles.len(),
        });
    }
    if gamma <= &rat(1) {
        return Err(Error::GammaOutOfRange(crate::rat::format_rat(gamma)));
    }

    let mut tables = Vec::new();
    let mut reports: Vec<PenaltySolveReport> = Vec::new();
    for i in 0..oracles.len() {
        let table = satellite_table(&oracles[..i].to_vec(), oracles[i], m)?;
        let report = iqp_enforce(&table, budgets[i], opts)?;
        tables.push(table);
        reports.push(report);
    }
    let penalties: Vec<QuadraticPenalty> =
        reports.iter().map(|r| r.polynomial.clone()).collect();

    // multipliers from last to first: position i compensates sum_{j>i} P_j
    let k = penalties.len();
    let mut multipliers = vec![rat(1); k];
    let mut y = vec![false; m];
    for i in (0..k - 1).rev() {
        let mut worst = Rat::zero();
        for bits in 0u64..(1 << m) {
            for (b, flag) in y.iter_mut().enumerate() {
                *flag = bits & (1 << b) != 0;
            }
            let mut sum = Rat::zero();
            for p in &penalties[i + 1..] {
                sum += p.slack_max(&y)?;
            }
            if sum > worst {
                worst = sum;
            }
        }
        multipliers[i] = relative_multiplier(&worst, gamma)?;
    }

    // exhaustive soundness check of the combined form
    for bits in 0u64..(1 << m) {
        for (b, flag) in y.iter_mut().enumerate() {
            *flag = bits & (1 << b) != 0;
        }
        let all_ok = oracles.iter().all(|c| c(&y));
        let mut combined = Rat::zero();
        for (p, lam) in penalties.iter().zip(&multipliers) {
            combined += lam * p.slack_max(&y)?;
        }
        if all_ok && !combined.is_zero() {
            return Err(Error::Invalid(format!(
                "chain multiplier check failed: satisfied combination {bits:b} gets {combined}"
            )));
        }
        if !all_ok && combined > rat(-1) {
            return Err(Error::Invalid(format!(
                "chain multiplier check failed: violated combination {bits:b} gets only {combined}"
            )));
        }
    }

    Ok(ConstraintChain {
        tables,
        penalties,
        multipliers,
        reports,
    })
}

/// Node-level multiplier policy, selected by name at runtime.
pub trait LambdaStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn lambda_node(&self, inst: &MpbsInstance, u: u32, gamma: &Rat) -> Result<Rat>;
}

/// `gamma * w(u)`: dominates the objective restricted to the node's arcs.
pub struct LocalLambda;

/// `gamma *` (total weight of arcs incident to the node or any neighbour):
/// dominates the objective restricted to the closed neighbourhood.
pub struct NeighbourLambda;

/// `gamma *` (total weight): node-independent, always sufficient.
pub struct GlobalLambda;

fn check_gamma(gamma: &Rat) -> Result<()> {
    if gamma <= &rat(1) {
        return Err(Error::GammaOutOfRange(crate::rat::format_rat(gamma)));
    }
    Ok(())
}

impl LambdaStrategy for LocalLambda {
    fn name(&self) -> &'static str {
        "local"
    }
    fn lambda_node(&self, inst: &MpbsInstance, u: u32, gamma: &Rat) -> Result<Rat> {
        check_gamma(gamma)?;
        crate::model::node_view(inst, u)?;
        Ok(gamma * inst.node_weight(u))
    }
}

impl LambdaStrategy for NeighbourLambda {
    fn name(&self) -> &'static str {
        "neigh"
    }
    fn lambda_node(&self, inst: &MpbsInstance, u: u32, gamma: &Rat) -> Result<Rat> {
        check_gamma(gamma)?;
        crate::model::node_view(inst, u)?;
        let mut nodes = inst.neighbours(u);
        nodes.push(u);
        nodes.sort_unstable();
        nodes.dedup();
        let mut sum = Rat::zero();
        for arc in &inst.graph.arcs {
            if nodes.binary_search(&arc.origin).is_ok() || nodes.binary_search(&arc.target).is_ok()
            {
                sum += &arc.weight;
            }
        }
        Ok(gamma * sum)
    }
}

impl LambdaStrategy for GlobalLambda {
    fn name(&self) -> &'static str {
        "global"
    }
    fn lambda_node(&self, inst: &MpbsInstance, u: u32, gamma: &Rat) -> Result<Rat> {
        check_gamma(gamma)?;
        crate::model::node_view(inst, u)?;
        Ok(gamma * inst.total_weight())
    }
}

pub fn lambda_strategies() -> Vec<Box<dyn LambdaStrategy>> {
    vec![
        Box::new(LocalLambda),
        Box::new(NeighbourLambda),
        Box::new(GlobalLambda),
    ]
}

pub fn lookup_lambda(name: &str) -> Result<Box<dyn LambdaStrategy>> {
    lambda_strategies()
        .into_iter()
        .find(|s| s.name() == name)
        .ok_or_else(|| Error::UnknownName {
            kind: "lambda strategy",
            name: name.to_string(),
        })
}
