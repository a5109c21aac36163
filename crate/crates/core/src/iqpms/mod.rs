//! Settlement-specific minimal-slack formulation: canonical node scenarios,
//! closed-form IN/OUT and CAP/FLOOR penalties for nodes with 2..5 incident
//! arcs, synthesized penalties for 5-arc CAP/FLOOR (and, behind a flag, for
//! larger nodes), assembly and end-to-end verification.
//!
//! IN/OUT is the master constraint of every node; CAP/FLOOR its satellite.
//! The IN/OUT penalty of a scenario never depends on weights or windows, so
//! one polynomial per shape covers the whole graph. CAP/FLOOR penalties for
//! up to 4 arcs come from fixed parametrized solutions: the per-combination
//! penalty values sigma are substituted in, no system is solved.

mod forms;
mod verify;

pub use forms::printed_io_polynomial;
pub use verify::{verify_formulation, VerifyReport};

use crate::iqp::{iqp_enforce, verify_penalty, Label, SolveOptions, SubConstraintTable};
use crate::model::{node_view, validate_instance, MpbsInstance, NodeView};
use crate::ms::{lambda_io, LambdaStrategy};
use crate::qubo::{embed_penalty, BlockIndex, QuadraticPenalty, Qubo};
use crate::rat::{rat, Rat};
use crate::registry::{NodeSlackRow, SlackSummary};
use crate::{Error, Result};
use num_traits::Zero;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Node shapes with closed-form treatment: X arcs of one direction versus Y
/// of the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    OneVsOne,
    OneVsTwo,
    OneVsThree,
    TwoVsTwo,
    OneVsFour,
    TwoVsThree,
}

impl Shape {
    pub fn from_degrees(n_in: usize, n_out: usize) -> Option<Shape> {
        match (n_in.min(n_out), n_in.max(n_out)) {
            (1, 1) => Some(Shape::OneVsOne),
            (1, 2) => Some(Shape::OneVsTwo),
            (1, 3) => Some(Shape::OneVsThree),
            (2, 2) => Some(Shape::TwoVsTwo),
            (1, 4) => Some(Shape::OneVsFour),
            (2, 3) => Some(Shape::TwoVsThree),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Shape::OneVsOne => "1vs1",
            Shape::OneVsTwo => "1vs2",
            Shape::OneVsThree => "1vs3",
            Shape::TwoVsTwo => "2vs2",
            Shape::OneVsFour => "1vs4",
            Shape::TwoVsThree => "2vs3",
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Shape::OneVsOne => 2,
            Shape::OneVsTwo => 3,
            Shape::OneVsThree | Shape::TwoVsTwo => 4,
            Shape::OneVsFour | Shape::TwoVsThree => 5,
        }
    }

    /// Size of the first canonical group (the X of XvsY).
    pub fn first_group(&self) -> usize {
        match self {
            Shape::TwoVsTwo | Shape::TwoVsThree => 2,
            _ => 1,
        }
    }

    /// IN/OUT over canonical coordinates: both groups selected or neither.
    pub fn io_ok(&self, y_bits: u64) -> bool {
        let a = self.first_group();
        let m = self.degree();
        let a_mask = (1u64 << a) - 1;
        let b_mask = ((1u64 << m) - 1) & !a_mask;
        (y_bits & a_mask != 0) == (y_bits & b_mask != 0)
    }

    /// Combinations required to carry a sigma value: IN/OUT-satisfying,
    /// excluding the all-zero combination.
    pub fn sigma_domain(&self) -> Vec<u64> {
        (1..(1u64 << self.degree()))
            .filter(|&bits| self.io_ok(bits))
            .collect()
    }
}

/// Canonical variable ordering of one node: position p of the penalty
/// polynomial acts on arc `ordering[p]`. The lone-direction arc (or the
/// two-arc group) comes first; incoming before outgoing for 2vs2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeScenario {
    pub shape: Shape,
    pub ordering: Vec<u32>,
    pub n_in: usize,
    pub n_out: usize,
    /// True when the first canonical group holds outgoing arcs.
    pub swapped: bool,
}

/// Deterministic scenario and ordering for a node with 2..5 incident arcs.
pub fn classify_node(inst: &MpbsInstance, u: u32) -> Result<NodeScenario> {
    let view = node_view(inst, u)?;
    classify_view(view).ok_or(Error::DegreeOutOfRange {
        node: u,
        degree: view.degree(),
    })
}

fn classify_view(view: &NodeView) -> Option<NodeScenario> {
    let (n_in, n_out) = (view.n_in(), view.n_out());
    if n_in == 0 || n_out == 0 {
        return None;
    }
    let shape = Shape::from_degrees(n_in, n_out)?;
    // arcs of the smaller group first; incoming first on ties
    let swapped = n_out < n_in;
    let (first, second) = if swapped {
        (&view.outgoing, &view.incoming)
    } else {
        (&view.incoming, &view.outgoing)
    };
    let mut ordering = Vec::with_capacity(view.degree());
    ordering.extend(first.iter().copied());
    ordering.extend(second.iter().copied());
    Some(NodeScenario {
        shape,
        ordering,
        n_in,
        n_out,
        swapped,
    })
}

/// CAP/FLOOR outcome per IN/OUT-satisfying combination: 0 where it holds,
/// -1 where it is violated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaTable {
    pub m: usize,
    values: std::collections::BTreeMap<u64, Rat>,
}

impl SigmaTable {
    pub fn sigma(&self, y_bits: u64) -> &Rat {
        &self.values[&y_bits]
    }

    pub fn violated(&self, y_bits: u64) -> bool {
        !self.values[&y_bits].is_zero()
    }

    /// Bitmask over the ascending sigma domain; used as a cache key.
    fn key(&self) -> u64 {
        let mut k = 0u64;
        for (t, (_, v)) in self.values.iter().enumerate() {
            if !v.is_zero() {
                k |= 1 << t;
            }
        }
        k
    }
}

/// Evaluates CAP/FLOOR on every IN/OUT-satisfying combination of the node,
/// in canonical coordinates.
pub fn sigma_table(inst: &MpbsInstance, u: u32, scenario: &NodeScenario) -> Result<SigmaTable> {
    let view = node_view(inst, u)?;
    let incoming: std::collections::BTreeSet<u32> = view.incoming.iter().copied().collect();
    let m = scenario.ordering.len();
    let mut values = std::collections::BTreeMap::new();
    for bits in scenario.shape.sigma_domain() {
        let mut net = Rat::zero();
        for (pos, &arc) in scenario.ordering.iter().enumerate() {
            if bits & (1 << pos) != 0 {
                if incoming.contains(&arc) {
                    net += inst.weight(arc);
                } else {
                    net -= inst.weight(arc);
                }
            }
        }
        let ok = inst.fl(u) <= &net && &net <= inst.cap(u);
        values.insert(bits, if ok { Rat::zero() } else { rat(-1) });
    }
    Ok(SigmaTable { m, values })
}

/// Master table of IN/OUT for one shape.
pub fn io_master_table(shape: Shape) -> SubConstraintTable {
    let m = shape.degree();
    let entries = (0..(1u64 << m))
        .map(|bits| {
            if shape.io_ok(bits) {
                Label::NoPenalty
            } else {
                Label::Penalty
            }
        })
        .collect();
    SubConstraintTable::new(m, entries).expect("shape degree fits")
}

/// IN/OUT penalty of a shape together with its slack cost. The published
/// per-shape polynomials are used as fixtures when they verify against the
/// master table; a shape whose printed form fails verification is
/// regenerated by the synthesis engine at the minimal slack count.
pub fn io_closed_form(shape: Shape) -> Result<(QuadraticPenalty, usize)> {
    static CACHE: OnceLock<Mutex<HashMap<Shape, (QuadraticPenalty, usize)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&shape) {
        return Ok(hit.clone());
    }
    let table = io_master_table(shape);
    let printed = forms::printed_io_polynomial(shape);
    let entry = if verify_penalty(&printed, &table)?.0 {
        let slacks = printed.m_slack;
        (printed, slacks)
    } else {
        let report = iqp_enforce(&table, 2, &SolveOptions::default())?;
        let slacks = report.slacks_used;
        (report.polynomial, slacks)
    };
    cache.lock().unwrap().insert(shape, entry.clone());
    Ok(entry)
}

/// CAP/FLOOR penalty for shapes of up to 4 arcs: pure sigma substitution
/// into the fixed solution of the shape's defining system, no solve. For
/// the 2-arc shape the returned polynomial enforces IN/OUT and CAP/FLOOR
/// together.
pub fn cf_closed_form(shape: Shape, sigma: &SigmaTable) -> Result<QuadraticPenalty> {
    if shape.degree() > 4 {
        return Err(Error::Invalid(format!(
            "no closed CAP/FLOOR form for {}; solved per node instead",
            shape.name()
        )));
    }
    if sigma.m != shape.degree() {
        return Err(Error::LengthMismatch {
            got: sigma.m,
            want: shape.degree(),
        });
    }
    Ok(forms::cf_substitution(shape, sigma))
}

/// Satellite table of CAP/FLOOR under the IN/OUT master, from sigma values.
pub fn cf_satellite_table(shape: Shape, sigma: &SigmaTable) -> Result<SubConstraintTable> {
    let m = shape.degree();
    let entries = (0..(1u64 << m))
        .map(|bits| {
            if !shape.io_ok(bits) {
                Label::Free
            } else if bits == 0 || !sigma.violated(bits) {
                Label::NoPenalty
            } else {
                Label::Penalty
            }
        })
        .collect();
    SubConstraintTable::new(m, entries)
}

/// CAP/FLOOR penalty of a 5-arc node: satellite synthesis against the
/// IN/OUT master, solved per (shape, sigma) and cached since many nodes
/// share the same table.
pub fn cf_degree5(
    inst: &MpbsInstance,
    u: u32,
    scenario: &NodeScenario,
) -> Result<(QuadraticPenalty, usize)> {
    static CACHE: OnceLock<Mutex<HashMap<(Shape, u64), (QuadraticPenalty, usize)>>> =
        OnceLock::new();
    if scenario.shape.degree() != 5 {
        return Err(Error::Invalid(format!(
            "cf_degree5 called on {}",
            scenario.shape.name()
        )));
    }
    let sigma = sigma_table(inst, u, scenario)?;
    let key = (scenario.shape, sigma.key());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let table = cf_satellite_table(scenario.shape, &sigma)?;
    let report = iqp_enforce(&table, 4, &SolveOptions::default())?;
    let entry = (report.polynomial, report.slacks_used);
    cache.lock().unwrap().insert(key, entry.clone());
    Ok(entry)
}

/// Expected worst-case CAP/FLOOR slack cost for 5-arc shapes; larger counts
/// are flagged as anomalies in the summary.
fn cf_expected_max(shape: Shape) -> usize {
    match shape {
        Shape::OneVsFour => 1,
        Shape::TwoVsThree => 2,
        _ => 0,
    }
}

/// Minimal-slack QUBO assembly:
/// `W + sum_u lambda_u (lambda_io_u P_io_u + P_cf_u)`,
/// with the merged IN/OUT+CAP/FLOOR polynomial on 2-arc nodes.
pub fn assemble_iqpms(
    inst: &MpbsInstance,
    lambda: &dyn LambdaStrategy,
    gamma: &Rat,
    generic_fallback: bool,
) -> Result<(Qubo, BlockIndex, SlackSummary)> {
    if gamma <= &rat(1) {
        return Err(Error::GammaOutOfRange(crate::rat::format_rat(gamma)));
    }
    let report = validate_instance(inst);
    if !report.is_empty() {
        return Err(Error::Validation(report));
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
        let lam = lambda.lambda_node(inst, u, gamma)?;
        let row = match classify_view(view) {
            Some(scenario) => {
                assemble_node(inst, u, &scenario, &lam, gamma, &mut q, &mut blocks)?
            }
            None if generic_fallback => {
                assemble_generic_node(inst, u, view, &lam, gamma, &mut q, &mut blocks)?
            }
            None => {
                return Err(Error::DegreeOutOfRange {
                    node: u,
                    degree: view.degree(),
                })
            }
        };
        rows.push(NodeSlackRow {
            lambda_node: lam,
            ..row
        });
    }
    let summary = SlackSummary::new("iqpms", n, rows);
    debug_assert_eq!(summary.total_slacks(), q.n_slack());
    Ok((q, blocks, summary))
}

fn assemble_node(
    inst: &MpbsInstance,
    u: u32,
    scenario: &NodeScenario,
    lam: &Rat,
    gamma: &Rat,
    q: &mut Qubo,
    blocks: &mut BlockIndex,
) -> Result<NodeSlackRow> {
    let locals: Vec<usize> = scenario.ordering.iter().map(|&a| a as usize).collect();
    let mut row = NodeSlackRow {
        node: u,
        n_in: scenario.n_in,
        n_out: scenario.n_out,
        scenario: scenario.shape.name().to_string(),
        io_slacks: 0,
        cf_slacks: 0,
        lambda_node: rat(0),
        lambda_io: rat(1),
        note: None,
    };

    if scenario.shape == Shape::OneVsOne {
        // one polynomial enforces both constraints on 2-arc nodes
        let sigma = sigma_table(inst, u, scenario)?;
        let merged = cf_closed_form(Shape::OneVsOne, &sigma)?;
        embed_penalty(q, blocks, &merged, &locals, u, "iocf", lam)?;
        return Ok(row);
    }

    let (p_io, io_slacks) = io_closed_form(scenario.shape)?;
    let (p_cf, cf_slacks) = if scenario.shape.degree() <= 4 {
        let sigma = sigma_table(inst, u, scenario)?;
        (cf_closed_form(scenario.shape, &sigma)?, 0)
    } else {
        cf_degree5(inst, u, scenario)?
    };
    if cf_slacks > cf_expected_max(scenario.shape) {
        row.note = Some(format!(
            "cap/floor needed {cf_slacks} slacks, expected <= {}",
            cf_expected_max(scenario.shape)
        ));
    }
    let l_io = lambda_io(&p_cf, gamma)?;
    embed_penalty(q, blocks, &p_io, &locals, u, "io", &(lam * &l_io))?;
    embed_penalty(q, blocks, &p_cf, &locals, u, "cf", lam)?;
    row.io_slacks = io_slacks;
    row.cf_slacks = cf_slacks;
    row.lambda_io = l_io;
    Ok(row)
}

/// Synthesized penalties for nodes outside the closed-form degree range.
fn assemble_generic_node(
    inst: &MpbsInstance,
    u: u32,
    view: &NodeView,
    lam: &Rat,
    gamma: &Rat,
    q: &mut Qubo,
    blocks: &mut BlockIndex,
) -> Result<NodeSlackRow> {
    let m = view.degree();
    let ordering: Vec<u32> = view
        .incoming
        .iter()
        .chain(&view.outgoing)
        .copied()
        .collect();
    let locals: Vec<usize> = ordering.iter().map(|&a| a as usize).collect();
    let n_in = view.n_in();
    let io_ok = |y: &[bool]| -> bool {
        let any_in = y[..n_in].iter().any(|&b| b);
        let any_out = y[n_in..].iter().any(|&b| b);
        any_in == any_out
    };
    let incoming: std::collections::BTreeSet<u32> = view.incoming.iter().copied().collect();
    let cf_ok = |y: &[bool]| -> bool {
        let mut net = Rat::zero();
        for (pos, &arc) in ordering.iter().enumerate() {
            if y[pos] {
                if incoming.contains(&arc) {
                    net += inst.weight(arc);
                } else {
                    net -= inst.weight(arc);
                }
            }
        }
        inst.fl(u) <= &net && &net <= inst.cap(u)
    };

    // a tight branch budget: exhausting a slack level this large is
    // expensive, and escalating one level early only costs a slack bit
    let opts = SolveOptions {
        node_budget: 2_500,
        ..SolveOptions::default()
    };
    let io_table = crate::iqp::truth_table_from_oracle(m, |y| io_ok(y))?;
    let io_report = iqp_enforce(&io_table, 4, &opts)?;
    if std::env::var("SETTLEQ_TRACE").is_ok() {
        eprintln!(
            "generic io: slacks {} branches {} lps {}",
            io_report.slacks_used, io_report.branch_count, io_report.lp_count
        );
    }
    let cf_table = crate::ms::satellite_table(&[&io_ok], &cf_ok, m)?;
    let cf_report = iqp_enforce(&cf_table, 4, &opts)?;
    if std::env::var("SETTLEQ_TRACE").is_ok() {
        eprintln!(
            "generic cf: slacks {} branches {} lps {}",
            cf_report.slacks_used, cf_report.branch_count, cf_report.lp_count
        );
    }

    let l_io = lambda_io(&cf_report.polynomial, gamma)?;
    embed_penalty(
        q,
        blocks,
        &io_report.polynomial,
        &locals,
        u,
        "io",
        &(lam * &l_io),
    )?;
    embed_penalty(q, blocks, &cf_report.polynomial, &locals, u, "cf", lam)?;
    Ok(NodeSlackRow {
        node: u,
        n_in,
        n_out: view.n_out(),
        scenario: format!("{}vs{}(generic)", n_in.min(view.n_out()), n_in.max(view.n_out())),
        io_slacks: io_report.slacks_used,
        cf_slacks: cf_report.slacks_used,
        lambda_node: rat(0),
        lambda_io: l_io,
        note: Some("synthesized outside the closed-form range".to_string()),
    })
}
