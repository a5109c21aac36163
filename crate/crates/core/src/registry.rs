//! Name-keyed registries for the interchangeable strategy families:
//! formulation methods (how constraints become penalties), node-multiplier
//! strategies, and QUBO solvers. The CLI resolves names at runtime; adding
//! a variant means implementing the trait and listing it here.

use crate::model::MpbsInstance;
use crate::qubo::{BlockIndex, Qubo};
use crate::rat::{format_rat, Rat};
use crate::{Error, Result};

pub use crate::ms::{lambda_strategies, lookup_lambda, LambdaStrategy};

/// Per-node slack accounting, printed by `formulate` as a table.
#[derive(Debug, Clone)]
pub struct NodeSlackRow {
    pub node: u32,
    pub n_in: usize,
    pub n_out: usize,
    pub scenario: String,
    pub io_slacks: usize,
    pub cf_slacks: usize,
    pub lambda_node: Rat,
    pub lambda_io: Rat,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SlackSummary {
    pub method: String,
    pub n_logical: usize,
    pub rows: Vec<NodeSlackRow>,
}

impl SlackSummary {
    pub fn new(method: &str, n_logical: usize, rows: Vec<NodeSlackRow>) -> Self {
        SlackSummary {
            method: method.to_string(),
            n_logical,
            rows,
        }
    }

    pub fn total_slacks(&self) -> usize {
        self.rows.iter().map(|r| r.io_slacks + r.cf_slacks).sum()
    }

    pub fn total_vars(&self) -> usize {
        self.n_logical + self.total_slacks()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "method {}: {} logical + {} slack = {} variables\n",
            self.method,
            self.n_logical,
            self.total_slacks(),
            self.total_vars()
        ));
        out.push_str("node\tscenario\tio_slacks\tcf_slacks\tlambda\tlambda_io\tnote\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                r.node,
                r.scenario,
                r.io_slacks,
                r.cf_slacks,
                format_rat(&r.lambda_node),
                format_rat(&r.lambda_io),
                r.note.as_deref().unwrap_or("-")
            ));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct FormulationParams {
    pub gamma: Rat,
    pub lambda: String,
    /// Synthesize penalties for nodes with more than 5 arcs instead of
    /// erroring out.
    pub generic_fallback: bool,
}

impl Default for FormulationParams {
    fn default() -> Self {
        FormulationParams {
            gamma: crate::rat::rat(2),
            lambda: "local".to_string(),
            generic_fallback: false,
        }
    }
}

pub struct Formulated {
    pub qubo: Qubo,
    pub blocks: BlockIndex,
    pub summary: SlackSummary,
}

/// One way of turning a settlement instance into a QUBO.
pub trait FormulationMethod: Send + Sync {
    fn name(&self) -> &'static str;
    fn formulate(&self, inst: &MpbsInstance, params: &FormulationParams) -> Result<Formulated>;
}

struct StandardMethod;

impl FormulationMethod for StandardMethod {
    fn name(&self) -> &'static str {
        "standard"
    }
    fn formulate(&self, inst: &MpbsInstance, params: &FormulationParams) -> Result<Formulated> {
        let lambda = lookup_lambda(&params.lambda)?;
        let (qubo, blocks, summary) =
            crate::standard::assemble_standard(inst, lambda.as_ref(), &params.gamma)?;
        Ok(Formulated {
            qubo,
            blocks,
            summary,
        })
    }
}

struct IqpmsMethod;

impl FormulationMethod for IqpmsMethod {
    fn name(&self) -> &'static str {
        "iqpms"
    }
    fn formulate(&self, inst: &MpbsInstance, params: &FormulationParams) -> Result<Formulated> {
        let lambda = lookup_lambda(&params.lambda)?;
        let (qubo, blocks, summary) = crate::iqpms::assemble_iqpms(
            inst,
            lambda.as_ref(),
            &params.gamma,
            params.generic_fallback,
        )?;
        Ok(Formulated {
            qubo,
            blocks,
            summary,
        })
    }
}

pub fn formulation_methods() -> Vec<Box<dyn FormulationMethod>> {
    vec![Box::new(StandardMethod), Box::new(IqpmsMethod)]
}

pub fn lookup_formulation(name: &str) -> Result<Box<dyn FormulationMethod>> {
    formulation_methods()
        .into_iter()
        .find(|m| m.name() == name)
        .ok_or_else(|| Error::UnknownName {
            kind: "formulation method",
            name: name.to_string(),
        })
}

#[derive(Debug, Clone)]
pub struct SolverOpts {
    /// Enumeration cap (logical variables) for the exact solver.
    pub cap: usize,
    pub runs: usize,
    pub sweeps: usize,
    pub seed: u64,
}

impl Default for SolverOpts {
    fn default() -> Self {
        SolverOpts {
            cap: 24,
            runs: 1,
            sweeps: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverOutput {
    /// Logical assignment, arc order.
    pub x: Vec<bool>,
    /// Slack-maximized QUBO value at x.
    pub value: Rat,
}

/// A way of maximizing a QUBO over its logical variables.
pub trait QuboSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, q: &Qubo, blocks: &BlockIndex, opts: &SolverOpts) -> Result<SolverOutput>;
}

struct BruteSolver;

impl QuboSolver for BruteSolver {
    fn name(&self) -> &'static str {
        "brute"
    }
    fn solve(&self, q: &Qubo, blocks: &BlockIndex, opts: &SolverOpts) -> Result<SolverOutput> {
        let out = crate::qubo::logical_scan(q, blocks, opts.cap)?;
        let bits = out.argmax_bits[0];
        let n = q.n_logical();
        Ok(SolverOutput {
            x: (0..n).map(|i| bits & (1 << i) != 0).collect(),
            value: out.max,
        })
    }
}

struct SaSolver;

impl QuboSolver for SaSolver {
    fn name(&self) -> &'static str {
        "sa"
    }
    fn solve(&self, q: &Qubo, blocks: &BlockIndex, opts: &SolverOpts) -> Result<SolverOutput> {
        let problem = crate::anneal::SaProblem::new(q)?;
        let ev = crate::qubo::ScanEvaluator::new(q, blocks)?;
        let mut best: Option<SolverOutput> = None;
        for run in 0..opts.runs.max(1) {
            let seed = crate::anneal::derive_seed(opts.seed, &[0xb0, run as u64]);
            let full = problem.sample(opts.sweeps, seed);
            let x = problem.logical_part(&full);
            let value = ev.value(&x)?;
            if best.as_ref().map_or(true, |b| value > b.value) {
                best = Some(SolverOutput { x, value });
            }
        }
        Ok(best.expect("at least one run"))
    }
}

pub fn qubo_solvers() -> Vec<Box<dyn QuboSolver>> {
    vec![Box::new(BruteSolver), Box::new(SaSolver)]
}

pub fn lookup_solver(name: &str) -> Result<Box<dyn QuboSolver>> {
    qubo_solvers()
        .into_iter()
        .find(|s| s.name() == name)
        .ok_or_else(|| Error::UnknownName {
            kind: "solver",
            name: name.to_string(),
        })
}
