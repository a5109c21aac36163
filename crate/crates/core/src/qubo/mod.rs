//! Sparse upper-triangular QUBO forms with slack-ownership structure.
//!
//! Slack variables are owned by (node, constraint-tag) blocks and never
//! shared between constraints, so maximization over slacks decomposes
//! block by block.

mod io;
mod scan;

pub use io::{read_qubo, read_qubo_str, write_qubo, write_qubo_string};
pub use scan::{logical_scan, ScanEvaluator, ScanOutcome};

use crate::rat::Rat;
use crate::{Error, Result};
use num_traits::Zero;
use std::collections::BTreeMap;

/// Identity of one QUBO variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarLabel {
    /// Problem variable for one arc.
    Logical(u32),
    /// Slack bit owned by one constraint block.
    Slack { node: u32, tag: String, index: u32 },
}

/// A quadratic polynomial over M logical and M-bar slack binary variables
/// with exact rational coefficients. Local indices `0..m_logical` are the
/// y's, `m_logical..m_logical+m_slack` the s's; the diagonal entry `(i,i)`
/// is the linear coefficient of variable `i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QuadraticPenalty {
    pub m_logical: usize,
    pub m_slack: usize,
    pub a0: Rat,
    coeffs: BTreeMap<(usize, usize), Rat>,
}

impl QuadraticPenalty {
    pub fn new(m_logical: usize, m_slack: usize) -> Self {
        QuadraticPenalty {
            m_logical,
            m_slack,
            a0: Rat::zero(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.m_logical + self.m_slack
    }

    /// Local index of slack variable `k`.
    pub fn s(&self, k: usize) -> usize {
        self.m_logical + k
    }

    pub fn coeff(&self, i: usize, j: usize) -> Rat {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.coeffs.get(&key).cloned().unwrap_or_else(Rat::zero)
    }

    /// Adds `c` to the coefficient of `v_i v_j` (of `v_i` when `i == j`).
    /// Zero coefficients are dropped so sparsity stays observable.
    pub fn add_term(&mut self, i: usize, j: usize, c: Rat) {
        assert!(i < self.dim() && j < self.dim(), "local index out of range");
        let key = if i <= j { (i, j) } else { (j, i) };
        let entry = self.coeffs.entry(key).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &Rat)> {
        self.coeffs.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn n_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.a0.is_zero() && self.coeffs.is_empty()
    }

    pub fn scaled(&self, scale: &Rat) -> QuadraticPenalty {
        let mut out = QuadraticPenalty::new(self.m_logical, self.m_slack);
        if scale.is_zero() {
            return out;
        }
        out.a0 = &self.a0 * scale;
        for (&k, c) in &self.coeffs {
            out.coeffs.insert(k, c * scale);
        }
        out
    }

    /// Pointwise sum; both polynomials must share the variable layout.
    pub fn plus(&self, other: &QuadraticPenalty) -> QuadraticPenalty {
        assert_eq!(self.m_logical, other.m_logical);
        assert_eq!(self.m_slack, other.m_slack);
        let mut out = self.clone();
        out.a0 += &other.a0;
        for (&(i, j), c) in &other.coeffs {
            out.add_term(i, j, c.clone());
        }
        out
    }

    /// Exact value of P(y, s).
    pub fn eval(&self, y: &[bool], s: &[bool]) -> Result<Rat> {
        if y.len() != self.m_logical {
            return Err(Error::LengthMismatch {
                got: y.len(),
                want: self.m_logical,
            });
        }
        if s.len() != self.m_slack {
            return Err(Error::LengthMismatch {
                got: s.len(),
                want: self.m_slack,
            });
        }
        let on = |i: usize| -> bool {
            if i < self.m_logical {
                y[i]
            } else {
                s[i - self.m_logical]
            }
        };
        let mut v = self.a0.clone();
        for (&(i, j), c) in &self.coeffs {
            if on(i) && on(j) {
                v += c;
            }
        }
        Ok(v)
    }

    /// Max over all slack completions for a fixed y.
    pub fn slack_max(&self, y: &[bool]) -> Result<Rat> {
        let mut best: Option<Rat> = None;
        let mut s = vec![false; self.m_slack];
        for bits in 0..(1u64 << self.m_slack) {
            for (k, b) in s.iter_mut().enumerate() {
                *b = bits & (1 << k) != 0;
            }
            let v = self.eval(y, &s)?;
            if best.as_ref().map_or(true, |b| &v > b) {
                best = Some(v);
            }
        }
        Ok(best.expect("at least the empty slack assignment"))
    }
}

/// Evaluates a penalty at the given bit strings.
pub fn eval_penalty(p: &QuadraticPenalty, y: &[bool], s: &[bool]) -> Result<Rat> {
    p.eval(y, s)
}

/// Sparse upper-triangular quadratic form with a constant offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Qubo {
    labels: Vec<VarLabel>,
    coeffs: BTreeMap<(usize, usize), Rat>,
    pub offset: Rat,
}

impl Qubo {
    /// A QUBO over logical variables for arcs `0..n`, no couplings yet.
    pub fn new_logical(n: usize) -> Self {
        Qubo {
            labels: (0..n as u32).map(VarLabel::Logical).collect(),
            coeffs: BTreeMap::new(),
            offset: Rat::zero(),
        }
    }

    pub fn from_parts(
        labels: Vec<VarLabel>,
        coeffs: BTreeMap<(usize, usize), Rat>,
        offset: Rat,
    ) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(Error::Invalid(format!("duplicate label {l:?}")));
            }
        }
        for &(i, j) in coeffs.keys() {
            if i > j || j >= labels.len() {
                return Err(Error::Invalid(format!("bad coefficient key ({i}, {j})")));
            }
        }
        Ok(Qubo {
            labels,
            coeffs,
            offset,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[VarLabel] {
        &self.labels
    }

    pub fn n_logical(&self) -> usize {
        self.labels
            .iter()
            .filter(|l| matches!(l, VarLabel::Logical(_)))
            .count()
    }

    pub fn n_slack(&self) -> usize {
        self.n_vars() - self.n_logical()
    }

    pub fn coeff(&self, i: usize, j: usize) -> Rat {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.coeffs.get(&key).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add_term(&mut self, i: usize, j: usize, c: Rat) {
        assert!(i < self.n_vars() && j < self.n_vars(), "index out of range");
        let key = if i <= j { (i, j) } else { (j, i) };
        let entry = self.coeffs.entry(key).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &Rat)> {
        self.coeffs.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn n_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Positions of logical labels, in label order.
    pub fn logical_positions(&self) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| matches!(l, VarLabel::Logical(_)))
            .map(|(i, _)| i)
            .collect()
    }

    /// offset + sum over i <= j of Q_ij a_i a_j.
    pub fn eval(&self, a: &[bool]) -> Result<Rat> {
        if a.len() != self.n_vars() {
            return Err(Error::LengthMismatch {
                got: a.len(),
                want: self.n_vars(),
            });
        }
        let mut v = self.offset.clone();
        for (&(i, j), c) in &self.coeffs {
            if a[i] && a[j] {
                v += c;
            }
        }
        Ok(v)
    }
}

/// Per-(node, tag) slack ownership: which slack positions a constraint owns
/// and which logical positions its penalty touches.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlockIndex {
    pub blocks: BTreeMap<(u32, String), Block>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub slack_vars: Vec<usize>,
    pub logical_vars: Vec<usize>,
}

impl BlockIndex {
    /// Rebuilds ownership from slack labels and couplings of a QUBO.
    pub fn from_qubo(q: &Qubo) -> BlockIndex {
        let mut blocks: BTreeMap<(u32, String), Block> = BTreeMap::new();
        for (idx, l) in q.labels().iter().enumerate() {
            if let VarLabel::Slack { node, tag, .. } = l {
                blocks
                    .entry((*node, tag.clone()))
                    .or_insert_with(|| Block {
                        slack_vars: vec![],
                        logical_vars: vec![],
                    })
                    .slack_vars
                    .push(idx);
            }
        }
        let mut owner: BTreeMap<usize, (u32, String)> = BTreeMap::new();
        for (key, b) in &blocks {
            for &s in &b.slack_vars {
                owner.insert(s, key.clone());
            }
        }
        for (i, j, _) in q.terms() {
            for (s, o) in [(i, j), (j, i)] {
                if let Some(key) = owner.get(&s) {
                    if matches!(q.labels()[o], VarLabel::Logical(_)) {
                        let b = blocks.get_mut(key).unwrap();
                        if !b.logical_vars.contains(&o) {
                            b.logical_vars.push(o);
                        }
                    }
                }
            }
        }
        for b in blocks.values_mut() {
            b.logical_vars.sort_unstable();
        }
        BlockIndex { blocks }
    }
}

/// Adds `scale * p` into the QUBO, mapping the penalty's logical variables
/// through `logical_map` and registering fresh slack labels owned by
/// `(node, tag)`.
pub fn embed_penalty(
    q: &mut Qubo,
    blocks: &mut BlockIndex,
    p: &QuadraticPenalty,
    logical_map: &[usize],
    node: u32,
    tag: &str,
    scale: &Rat,
) -> Result<()> {
    if logical_map.len() != p.m_logical {
        return Err(Error::LengthMismatch {
            got: logical_map.len(),
            want: p.m_logical,
        });
    }
    let mut seen = std::collections::BTreeSet::new();
    for &pos in logical_map {
        if pos >= q.n_vars() || !matches!(q.labels[pos], VarLabel::Logical(_)) {
            return Err(Error::Invalid(format!(
                "logical_map entry {pos} is not a logical variable"
            )));
        }
        if !seen.insert(pos) {
            return Err(Error::MappingCollision);
        }
    }
    let key = (node, tag.to_string());
    if blocks.blocks.contains_key(&key) {
        return Err(Error::DuplicateOwner {
            node,
            tag: tag.to_string(),
        });
    }

    let mut slack_pos = Vec::with_capacity(p.m_slack);
    for k in 0..p.m_slack {
        q.labels.push(VarLabel::Slack {
            node,
            tag: tag.to_string(),
            index: k as u32,
        });
        slack_pos.push(q.n_vars() - 1);
    }
    let map = |local: usize| -> usize {
        if local < p.m_logical {
            logical_map[local]
        } else {
            slack_pos[local - p.m_logical]
        }
    };
    q.offset += &p.a0 * scale;
    for (i, j, c) in p.terms() {
        q.add_term(map(i), map(j), c * scale);
    }
    blocks.blocks.insert(
        key,
        Block {
            slack_vars: slack_pos,
            logical_vars: {
                let mut v: Vec<usize> = logical_map.to_vec();
                v.sort_unstable();
                v
            },
        },
    );
    Ok(())
}

/// Exact maximum of the QUBO over all variables, with every maximizer
/// (collection truncated at `keep`, count always exact).
pub fn brute_force_qubo_max(
    q: &Qubo,
    cap: Option<usize>,
    keep: Option<usize>,
) -> Result<(Vec<Vec<bool>>, Rat, u64)> {
    let n = q.n_vars();
    let cap = cap.unwrap_or(28);
    if n > cap {
        return Err(Error::CapExceeded { vars: n, cap });
    }
    let keep = keep.unwrap_or(1024);
    let mut best: Option<Rat> = None;
    let mut arg: Vec<Vec<bool>> = Vec::new();
    let mut count = 0u64;
    let mut a = vec![false; n];
    for bits in 0..(1u64 << n) {
        for (i, b) in a.iter_mut().enumerate() {
            *b = bits & (1 << i) != 0;
        }
        let v = q.eval(&a)?;
        match &best {
            Some(b) if &v < b => {}
            Some(b) if &v == b => {
                count += 1;
                if arg.len() < keep {
                    arg.push(a.clone());
                }
            }
            _ => {
                best = Some(v);
                count = 1;
                arg.clear();
                arg.push(a.clone());
            }
        }
    }
    Ok((arg, best.expect("nonempty enumeration"), count))
}

/// Max over all slack completions of the QUBO at a fixed logical assignment,
/// computed block by block. Valid because slack sets are disjoint and no
/// coefficient couples slacks of different blocks.
pub fn max_over_slacks(q: &Qubo, blocks: &BlockIndex, x: &[bool]) -> Result<Rat> {
    let ev = scan::SlackMaxEvaluator::new(q, blocks)?;
    ev.value(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, ratio};

    /// -x1 - x2 + 2 x1 x2 over two logical variables.
    fn match_penalty() -> QuadraticPenalty {
        let mut p = QuadraticPenalty::new(2, 0);
        p.add_term(0, 0, rat(-1));
        p.add_term(1, 1, rat(-1));
        p.add_term(0, 1, rat(2));
        p
    }

    #[test]
    fn eval_penalty_examples() {
        let p = match_penalty();
        assert_eq!(p.eval(&[true, true], &[]).unwrap(), rat(0));
        assert_eq!(p.eval(&[true, false], &[]).unwrap(), rat(-1));
        let zero = QuadraticPenalty::new(3, 1);
        assert_eq!(zero.eval(&[true, false, true], &[true]).unwrap(), rat(0));
        // three-variable solution polynomial evaluated at (0,1,1)
        let mut p3 = QuadraticPenalty::new(3, 0);
        for i in 0..3 {
            p3.add_term(i, i, rat(-1));
        }
        p3.add_term(0, 1, rat(2));
        p3.add_term(0, 2, rat(2));
        p3.add_term(1, 2, rat(-1));
        assert_eq!(p3.eval(&[false, true, true], &[]).unwrap(), rat(-3));
        assert!(p3.eval(&[false, true], &[]).is_err());
    }

    #[test]
    fn qubo_eval() {
        let mut q = Qubo::new_logical(2);
        q.add_term(0, 0, rat(5));
        assert_eq!(q.eval(&[true, false]).unwrap(), rat(5));
        let mut q2 = Qubo::new_logical(2);
        q2.add_term(0, 0, rat(1));
        q2.add_term(1, 1, rat(1));
        q2.add_term(0, 1, rat(-3));
        assert_eq!(q2.eval(&[true, true]).unwrap(), rat(-1));
        q2.offset = ratio(7, 3);
        assert_eq!(q2.eval(&[false, false]).unwrap(), ratio(7, 3));
        assert!(q2.eval(&[true]).is_err());
    }

    #[test]
    fn embed_expands_by_hand() {
        let mut q = Qubo::new_logical(8);
        let mut bi = BlockIndex::default();
        let p = match_penalty();
        embed_penalty(&mut q, &mut bi, &p, &[3, 7], 0, "io", &rat(14)).unwrap();
        assert_eq!(q.coeff(3, 3), rat(-14));
        assert_eq!(q.coeff(7, 7), rat(-14));
        assert_eq!(q.coeff(3, 7), rat(28));
        assert_eq!(q.n_vars(), 8);
    }

    #[test]
    fn embed_zero_polynomial_leaves_qubo_unchanged() {
        let mut q = Qubo::new_logical(4);
        let mut bi = BlockIndex::default();
        let before = q.clone();
        let zero = QuadraticPenalty::new(2, 0);
        embed_penalty(&mut q, &mut bi, &zero, &[0, 1], 2, "cf", &rat(3)).unwrap();
        assert_eq!(q, before);
    }

    #[test]
    fn duplicate_owner_rejected() {
        let mut q = Qubo::new_logical(4);
        let mut bi = BlockIndex::default();
        let p = match_penalty();
        embed_penalty(&mut q, &mut bi, &p, &[0, 1], 2, "io", &rat(1)).unwrap();
        assert!(matches!(
            embed_penalty(&mut q, &mut bi, &p, &[2, 3], 2, "io", &rat(1)),
            Err(Error::DuplicateOwner { .. })
        ));
        assert!(matches!(
            embed_penalty(&mut q, &mut bi, &p, &[2, 2], 2, "cf", &rat(1)),
            Err(Error::MappingCollision)
        ));
    }

    #[test]
    fn embed_is_linear_for_distinct_owners() {
        let p1 = match_penalty();
        let mut p2 = QuadraticPenalty::new(2, 0);
        p2.add_term(0, 1, rat(5));
        p2.a0 = rat(2);

        let mut qa = Qubo::new_logical(2);
        let mut ba = BlockIndex::default();
        embed_penalty(&mut qa, &mut ba, &p1, &[0, 1], 0, "a", &rat(1)).unwrap();
        embed_penalty(&mut qa, &mut ba, &p2, &[0, 1], 1, "b", &rat(1)).unwrap();

        let mut qb = Qubo::new_logical(2);
        let mut bb = BlockIndex::default();
        embed_penalty(&mut qb, &mut bb, &p1.plus(&p2), &[0, 1], 2, "ab", &rat(1)).unwrap();

        assert_eq!(qa.coeffs, qb.coeffs);
        assert_eq!(qa.offset, qb.offset);
    }

    #[test]
    fn brute_force_max_examples() {
        let mut q = Qubo::new_logical(2);
        q.add_term(0, 0, rat(5));
        q.add_term(1, 1, rat(-2));
        let (args, v, count) = brute_force_qubo_max(&q, None, None).unwrap();
        assert_eq!(v, rat(5));
        assert_eq!(count, 1);
        assert_eq!(args, vec![vec![true, false]]);

        let mut q2 = Qubo::new_logical(2);
        q2.add_term(0, 0, rat(1));
        q2.add_term(1, 1, rat(1));
        q2.add_term(0, 1, rat(-3));
        let (args, v, count) = brute_force_qubo_max(&q2, None, None).unwrap();
        assert_eq!(v, rat(1));
        assert_eq!(count, 2);
        assert!(args.contains(&vec![true, false]) && args.contains(&vec![false, true]));

        let empty = Qubo::from_parts(vec![], BTreeMap::new(), ratio(5, 2)).unwrap();
        let (_, v, _) = brute_force_qubo_max(&empty, None, None).unwrap();
        assert_eq!(v, ratio(5, 2));
    }

    #[test]
    fn offset_shift_preserves_argmax() {
        let mut q = Qubo::new_logical(3);
        q.add_term(0, 0, rat(2));
        q.add_term(1, 1, rat(-1));
        q.add_term(0, 2, rat(3));
        let (args1, _, _) = brute_force_qubo_max(&q, None, None).unwrap();
        q.offset = rat(-17);
        let (args2, v2, _) = brute_force_qubo_max(&q, None, None).unwrap();
        assert_eq!(args1, args2);
        assert_eq!(v2, rat(5) + rat(-17));
    }
}
