//! Settlement instances on directed weighted multigraphs: domain types,
//! structural validation, constraint evaluation and exhaustive oracles.

mod brute;
mod gen;
mod io;

pub use brute::{brute_force_mpbs, count_feasible, BruteForceResult, FeasibleCount};
pub(crate) use brute::ScaledChecker;
pub use gen::{generate_instance, GenParams};
pub use io::{read_instance, read_instance_str, write_instance, write_instance_string};

use crate::rat::{is_integer, Rat};
use crate::{Error, Result};
use num_traits::Zero;
use std::collections::BTreeMap;

/// A receivable: directed arc from debtor to creditor with a positive amount.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub id: u32,
    pub origin: u32,
    pub target: u32,
    pub weight: Rat,
}

/// Per-node attributes: receivable balance, actual balance, cap and floor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeAttrs {
    pub bl_r: Rat,
    pub bl_a: Rat,
    pub cap: Rat,
    pub fl: Rat,
}

impl NodeAttrs {
    /// Attributes with zero balances, so the effective window is `[fl, cap]`.
    pub fn window(fl: Rat, cap: Rat) -> Self {
        NodeAttrs {
            bl_r: Rat::zero(),
            bl_a: Rat::zero(),
            cap,
            fl,
        }
    }
}

/// Directed weighted node-attributed multigraph. Arc ids are contiguous
/// `0..N-1`, which fixes the bijection between arcs and logical variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RMultigraph {
    pub nodes: Vec<u32>,
    pub arcs: Vec<Arc>,
    pub attrs: BTreeMap<u32, NodeAttrs>,
}

/// Binary selection, indexed by arc id (optionally extended by slack bits
/// where an operation says so).
pub type Assignment = Vec<bool>;

/// Incident-arc partition of one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeView {
    pub node: u32,
    /// Arc ids with this node as target (creditor side).
    pub incoming: Vec<u32>,
    /// Arc ids with this node as origin (debtor side).
    pub outgoing: Vec<u32>,
}

impl NodeView {
    pub fn n_in(&self) -> usize {
        self.incoming.len()
    }
    pub fn n_out(&self) -> usize {
        self.outgoing.len()
    }
    pub fn degree(&self) -> usize {
        self.n_in() + self.n_out()
    }
}

/// A settlement instance: the multigraph plus the derived per-node net
/// windows `FL(u) = fl - bl_a` and `CAP(u) = cap - bl_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MpbsInstance {
    pub graph: RMultigraph,
    windows: BTreeMap<u32, (Rat, Rat)>,
    views: BTreeMap<u32, NodeView>,
}

impl MpbsInstance {
    pub fn new(graph: RMultigraph) -> Self {
        let mut windows = BTreeMap::new();
        for (&u, a) in &graph.attrs {
            windows.insert(u, (&a.fl - &a.bl_a, &a.cap - &a.bl_r));
        }
        let mut views: BTreeMap<u32, NodeView> = graph
            .nodes
            .iter()
            .map(|&u| {
                (
                    u,
                    NodeView {
                        node: u,
                        incoming: vec![],
                        outgoing: vec![],
                    },
                )
            })
            .collect();
        for arc in &graph.arcs {
            if let Some(v) = views.get_mut(&arc.origin) {
                v.outgoing.push(arc.id);
            }
            if let Some(v) = views.get_mut(&arc.target) {
                v.incoming.push(arc.id);
            }
        }
        MpbsInstance {
            graph,
            windows,
            views,
        }
    }

    /// Convenience constructor: all balances zero, one window for every node.
    pub fn with_window(nodes: Vec<u32>, arcs: Vec<Arc>, fl: Rat, cap: Rat) -> Self {
        let attrs = nodes
            .iter()
            .map(|&u| (u, NodeAttrs::window(fl.clone(), cap.clone())))
            .collect();
        MpbsInstance::new(RMultigraph { nodes, arcs, attrs })
    }

    pub fn n_arcs(&self) -> usize {
        self.graph.arcs.len()
    }

    pub fn fl(&self, u: u32) -> &Rat {
        &self.windows[&u].0
    }

    pub fn cap(&self, u: u32) -> &Rat {
        &self.windows[&u].1
    }

    pub fn weight(&self, arc: u32) -> &Rat {
        &self.graph.arcs[arc as usize].weight
    }

    /// Sum of weights of the arcs incident to `u` (the paper's `w(u)`).
    pub fn node_weight(&self, u: u32) -> Rat {
        let v = &self.views[&u];
        v.incoming
            .iter()
            .chain(&v.outgoing)
            .map(|&a| self.weight(a))
            .sum()
    }

    pub fn total_weight(&self) -> Rat {
        self.graph.arcs.iter().map(|a| &a.weight).sum()
    }

    /// Nodes sharing at least one arc with `u`.
    pub fn neighbours(&self, u: u32) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .graph
            .arcs
            .iter()
            .filter_map(|a| {
                if a.origin == u {
                    Some(a.target)
                } else if a.target == u {
                    Some(a.origin)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// True if every weight and both window ends are integers.
    pub fn is_integer_data(&self) -> bool {
        self.graph.arcs.iter().all(|a| is_integer(&a.weight))
            && self
                .windows
                .values()
                .all(|(fl, cap)| is_integer(fl) && is_integer(cap))
    }

    pub fn objective(&self, x: &[bool]) -> Rat {
        assert_eq!(x.len(), self.n_arcs(), "assignment length");
        self.graph
            .arcs
            .iter()
            .filter(|a| x[a.id as usize])
            .map(|a| &a.weight)
            .sum()
    }
}

/// Incoming/outgoing partition of the arcs incident to `u`.
pub fn node_view(inst: &MpbsInstance, u: u32) -> Result<&NodeView> {
    inst.views.get(&u).ok_or(Error::UnknownNode(u))
}

/// Structural invariant report; empty iff the instance is valid.
pub fn validate_instance(inst: &MpbsInstance) -> Vec<String> {
    let mut report = Vec::new();
    let g = &inst.graph;
    let declared: std::collections::BTreeSet<u32> = g.nodes.iter().copied().collect();
    if declared.len() != g.nodes.len() {
        report.push("duplicate node id".to_string());
    }
    for (i, arc) in g.arcs.iter().enumerate() {
        if arc.id as usize != i {
            report.push(format!(
                "arc ids not contiguous: position {i} holds id {}",
                arc.id
            ));
        }
        if !declared.contains(&arc.origin) || !declared.contains(&arc.target) {
            report.push(format!("arc {} references an undeclared node", arc.id));
        }
        if arc.weight <= Rat::zero() {
            report.push(format!("arc {}: non-positive weight", arc.id));
        }
        if arc.origin == arc.target {
            report.push(format!("arc {}: self-loop", arc.id));
        }
        if !g.attrs.contains_key(&arc.origin) || !g.attrs.contains_key(&arc.target) {
            report.push(format!("arc {}: endpoint lacks attributes", arc.id));
        }
    }
    for &u in &g.nodes {
        if !g.attrs.contains_key(&u) {
            report.push(format!("node {u} lacks attributes"));
            continue;
        }
        let view = &inst.views[&u];
        if view.incoming.is_empty() {
            report.push(format!("node {u} lacks incoming arc"));
        }
        if view.outgoing.is_empty() {
            report.push(format!("node {u} lacks outgoing arc"));
        }
        let (fl, cap) = &inst.windows[&u];
        if !(fl <= &Rat::zero() && &Rat::zero() <= cap) {
            report.push(format!("node {u}: window does not contain 0"));
        }
    }
    report
}

/// IN/OUT(u): either no incident arc is selected, or at least one incoming
/// and one outgoing arc are.
pub fn inout_ok(inst: &MpbsInstance, u: u32, x: &[bool]) -> bool {
    let v = &inst.views[&u];
    let any_in = v.incoming.iter().any(|&a| x[a as usize]);
    let any_out = v.outgoing.iter().any(|&a| x[a as usize]);
    (!any_in && !any_out) || (any_in && any_out)
}

/// CAP/FLOOR(u): the selected net value stays inside `[FL(u), CAP(u)]`.
pub fn capfloor_ok(inst: &MpbsInstance, u: u32, x: &[bool]) -> bool {
    let v = &inst.views[&u];
    let mut net = Rat::zero();
    for &a in &v.incoming {
        if x[a as usize] {
            net += inst.weight(a);
        }
    }
    for &a in &v.outgoing {
        if x[a as usize] {
            net -= inst.weight(a);
        }
    }
    let (fl, cap) = &inst.windows[&u];
    fl <= &net && &net <= cap
}

/// Full feasibility: IN/OUT and CAP/FLOOR at every node.
pub fn feasible(inst: &MpbsInstance, x: &[bool]) -> bool {
    assert_eq!(x.len(), inst.n_arcs(), "assignment length");
    inst.graph
        .nodes
        .iter()
        .all(|&u| inout_ok(inst, u, x) && capfloor_ok(inst, u, x))
}
