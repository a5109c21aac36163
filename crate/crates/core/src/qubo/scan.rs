//! Block-decomposed slack maximization and full scans over the logical
//! assignment space.
//!
//! Because each constraint owns its slack variables and no coefficient ever
//! couples slacks of two different constraints, `max_s Q(x, s)` splits into
//! independent per-block maxima. Each block touches few logical variables,
//! so a scan over all logical assignments precomputes one small table per
//! block and then evaluates in integer arithmetic.

use super::{BlockIndex, Qubo, VarLabel};
use crate::rat::Rat;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub(crate) const MAX_BLOCK_SLACKS: usize = 20;

struct BlockTerms {
    /// Slack positions inside the qubo label space, block-local order.
    slots: Vec<usize>,
    /// (slot, coefficient) linear slack terms.
    diag: Vec<(usize, Rat)>,
    /// (slot, x position, coefficient) slack-logical couplings.
    cross: Vec<(usize, usize, Rat)>,
    /// (slot, slot, coefficient) intra-block slack couplings.
    pairs: Vec<(usize, usize, Rat)>,
}

/// Exact rational evaluator: global logical part plus per-block slack maxima.
pub(crate) struct SlackMaxEvaluator {
    n_logical: usize,
    offset: Rat,
    logical_terms: Vec<(usize, usize, Rat)>,
    blocks: Vec<BlockTerms>,
}

impl SlackMaxEvaluator {
    pub(crate) fn new(q: &Qubo, bi: &BlockIndex) -> Result<Self> {
        let mut x_pos = vec![usize::MAX; q.n_vars()];
        let mut n_logical = 0;
        for (idx, l) in q.labels().iter().enumerate() {
            if matches!(l, VarLabel::Logical(_)) {
                x_pos[idx] = n_logical;
                n_logical += 1;
            }
        }

        // slack label -> owning block
        let mut owner = vec![usize::MAX; q.n_vars()];
        let mut blocks: Vec<BlockTerms> = Vec::new();
        for (_, b) in bi.blocks.iter() {
            let bid = blocks.len();
            if b.slack_vars.len() > MAX_BLOCK_SLACKS {
                return Err(Error::CapExceeded {
                    vars: b.slack_vars.len(),
                    cap: MAX_BLOCK_SLACKS,
                });
            }
            for (k, &s) in b.slack_vars.iter().enumerate() {
                if s >= q.n_vars() || matches!(q.labels()[s], VarLabel::Logical(_)) {
                    return Err(Error::Invalid(format!("block slack {s} is not a slack label")));
                }
                if owner[s] != usize::MAX {
                    return Err(Error::Invalid(format!("slack {s} owned by two blocks")));
                }
                owner[s] = bid * MAX_SLOT + k;
            }
            blocks.push(BlockTerms {
                slots: b.slack_vars.clone(),
                diag: vec![],
                cross: vec![],
                pairs: vec![],
            });
        }
        for (idx, l) in q.labels().iter().enumerate() {
            if !matches!(l, VarLabel::Logical(_)) && owner[idx] == usize::MAX {
                return Err(Error::UnindexedSlack(idx));
            }
        }

        let offset = q.offset.clone();
        let mut logical_terms = Vec::new();
        for (i, j, c) in q.terms() {
            let (li, lj) = (x_pos[i] != usize::MAX, x_pos[j] != usize::MAX);
            match (li, lj) {
                (true, true) => logical_terms.push((x_pos[i], x_pos[j], c.clone())),
                (false, false) => {
                    let (bi_, ki) = (owner[i] / MAX_SLOT, owner[i] % MAX_SLOT);
                    let (bj_, kj) = (owner[j] / MAX_SLOT, owner[j] % MAX_SLOT);
                    if bi_ != bj_ {
                        return Err(Error::Invalid(format!(
                            "coefficient couples slacks of different blocks ({i}, {j})"
                        )));
                    }
                    if ki == kj {
                        blocks[bi_].diag.push((ki, c.clone()));
                    } else {
                        blocks[bi_].pairs.push((ki.min(kj), ki.max(kj), c.clone()));
                    }
                }
                (true, false) => {
                    let (b, k) = (owner[j] / MAX_SLOT, owner[j] % MAX_SLOT);
                    blocks[b].cross.push((k, x_pos[i], c.clone()));
                }
                (false, true) => {
                    let (b, k) = (owner[i] / MAX_SLOT, owner[i] % MAX_SLOT);
                    blocks[b].cross.push((k, x_pos[j], c.clone()));
                }
            }
        }
        Ok(SlackMaxEvaluator {
            n_logical,
            offset,
            logical_terms,
            blocks,
        })
    }

    fn block_max(&self, b: &BlockTerms, x: &[bool]) -> Rat {
        // linear field per slot at this x
        let m = b.slots.len();
        let mut field: Vec<Rat> = vec![Rat::zero(); m];
        for (k, c) in &b.diag {
            field[*k] += c;
        }
        for (k, xi, c) in &b.cross {
            if x[*xi] {
                field[*k] += c;
            }
        }
        let mut best = Rat::zero(); // s = 0
        for bits in 1u64..(1 << m) {
            let mut v = Rat::zero();
            for (k, f) in field.iter().enumerate() {
                if bits & (1 << k) != 0 {
                    v += f;
                }
            }
            for (k, l, c) in &b.pairs {
                if bits & (1 << k) != 0 && bits & (1 << l) != 0 {
                    v += c;
                }
            }
            if v > best {
                best = v;
            }
        }
        best
    }

    pub(crate) fn value(&self, x: &[bool]) -> Result<Rat> {
        if x.len() != self.n_logical {
            return Err(Error::LengthMismatch {
                got: x.len(),
                want: self.n_logical,
            });
        }
        let mut v = self.offset.clone();
        for (i, j, c) in &self.logical_terms {
            if x[*i] && x[*j] {
                v += c;
            }
        }
        for b in &self.blocks {
            v += self.block_max(b, x);
        }
        Ok(v)
    }
}

const MAX_SLOT: usize = 64;

/// Integer-scaled scanner over all logical assignments. Every coefficient is
/// multiplied by the common denominator so the hot loop runs in i128; falls
/// back to rationals when scaling overflows.
pub struct ScanEvaluator {
    pub n_logical: usize,
    exact: SlackMaxEvaluator,
    scaled: Option<ScaledScan>,
    /// Common denominator applied in the scaled path.
    pub scale: BigInt,
}

struct ScaledScan {
    offset: i128,
    lin: Vec<i128>,
    quad: Vec<(u32, u32, i128)>,
    tables: Vec<(Vec<u32>, Vec<i128>)>,
}

impl ScanEvaluator {
    pub fn new(q: &Qubo, bi: &BlockIndex) -> Result<Self> {
        let exact = SlackMaxEvaluator::new(q, bi)?;
        let mut denom = BigInt::one();
        let mut consider = |r: &Rat| {
            denom = denom.lcm(r.denom());
        };
        consider(&exact.offset);
        for (_, _, c) in &exact.logical_terms {
            consider(c);
        }
        for b in &exact.blocks {
            for (_, c) in &b.diag {
                consider(c);
            }
            for (_, _, c) in &b.cross {
                consider(c);
            }
            for (_, _, c) in &b.pairs {
                consider(c);
            }
        }
        let scale = denom.clone();
        let scaled = build_scaled(&exact, &scale);
        Ok(ScanEvaluator {
            n_logical: exact.n_logical,
            exact,
            scaled,
            scale,
        })
    }

    /// Exact slack-maximized value at one logical assignment.
    pub fn value(&self, x: &[bool]) -> Result<Rat> {
        self.exact.value(x)
    }

    pub fn has_fast_path(&self) -> bool {
        self.scaled.is_some()
    }

    /// Scaled integer value (value * scale), when the fast path is available.
    #[inline]
    pub fn value_scaled(&self, bits: u64) -> Option<i128> {
        let s = self.scaled.as_ref()?;
        let mut v = s.offset;
        for (i, c) in s.lin.iter().enumerate() {
            if bits & (1 << i) != 0 {
                v += c;
            }
        }
        for (i, j, c) in &s.quad {
            if bits & (1 << i) != 0 && bits & (1 << j) != 0 {
                v += c;
            }
        }
        for (positions, table) in &s.tables {
            let mut idx = 0usize;
            for (bit, &p) in positions.iter().enumerate() {
                if bits & (1 << p) != 0 {
                    idx |= 1 << bit;
                }
            }
            v += table[idx];
        }
        Some(v)
    }

    fn bits_to_vec(&self, bits: u64) -> Vec<bool> {
        (0..self.n_logical).map(|i| bits & (1 << i) != 0).collect()
    }
}

fn build_scaled(exact: &SlackMaxEvaluator, scale: &BigInt) -> Option<ScaledScan> {
    let conv = |r: &Rat| -> Option<i128> { (r.numer() * (scale / r.denom())).to_i128() };
    let offset = conv(&exact.offset)?;
    let mut lin = vec![0i128; exact.n_logical];
    let mut quad = Vec::new();
    for (i, j, c) in &exact.logical_terms {
        let c = conv(c)?;
        if i == j {
            lin[*i] = lin[*i].checked_add(c)?;
        } else {
            quad.push((*i as u32, *j as u32, c));
        }
    }
    let mut tables = Vec::new();
    for b in &exact.blocks {
        // logical positions feeding this block's slack fields
        let mut positions: Vec<u32> = b.cross.iter().map(|(_, x, _)| *x as u32).collect();
        positions.sort_unstable();
        positions.dedup();
        if positions.len() > 20 {
            return None;
        }
        let mut table = Vec::with_capacity(1 << positions.len());
        let mut x = vec![false; exact.n_logical];
        for combo in 0u64..(1 << positions.len()) {
            for (bit, &p) in positions.iter().enumerate() {
                x[p as usize] = combo & (1 << bit) != 0;
            }
            let v = exact.block_max(b, &x);
            table.push(conv(&v)?);
            for &p in &positions {
                x[p as usize] = false;
            }
        }
        tables.push((positions, table));
    }
    // guard against additive overflow across terms: bound the absolute sum
    let mut bound: i128 = offset.checked_abs()?;
    for c in &lin {
        bound = bound.checked_add(c.checked_abs()?)?;
    }
    for (_, _, c) in &quad {
        bound = bound.checked_add(c.checked_abs()?)?;
    }
    for (_, t) in &tables {
        let m = t.iter().map(|v| v.abs()).max().unwrap_or(0);
        bound = bound.checked_add(m)?;
    }
    Some(ScaledScan {
        offset,
        lin,
        quad,
        tables,
    })
}

#[derive(Debug, Clone)]
pub struct ScanOutcome {
    /// Exact maximum of max_s Q(x, s) over all logical x.
    pub max: Rat,
    /// Every maximizing logical assignment (bits, arc 0 = LSB), ascending.
    pub argmax_bits: Vec<u64>,
    pub count: u64,
}

/// Scans all logical assignments, maximizing over slacks block-wise.
pub fn logical_scan(q: &Qubo, bi: &BlockIndex, cap: usize) -> Result<ScanOutcome> {
    let ev = ScanEvaluator::new(q, bi)?;
    let n = ev.n_logical;
    if n > cap {
        return Err(Error::CapExceeded { vars: n, cap });
    }
    let total = 1u64 << n;
    if ev.scaled.is_some() {
        let mut best = i128::MIN;
        let mut arg = Vec::new();
        for bits in 0..total {
            let v = ev.value_scaled(bits).expect("scaled path");
            if v > best {
                best = v;
                arg.clear();
                arg.push(bits);
            } else if v == best && arg.len() < 4096 {
                arg.push(bits);
            }
        }
        let count = {
            let mut c = 0u64;
            for bits in 0..total {
                if ev.value_scaled(bits).unwrap() == best {
                    c += 1;
                }
            }
            c
        };
        let max = ev.value(&ev.bits_to_vec(arg[0]))?;
        Ok(ScanOutcome {
            max,
            argmax_bits: arg,
            count,
        })
    } else {
        let mut best: Option<Rat> = None;
        let mut arg = Vec::new();
        let mut count = 0u64;
        for bits in 0..total {
            let v = ev.value(&ev.bits_to_vec(bits))?;
            match &best {
                Some(b) if &v < b => {}
                Some(b) if &v == b => {
                    count += 1;
                    if arg.len() < 4096 {
                        arg.push(bits);
                    }
                }
                _ => {
                    best = Some(v);
                    count = 1;
                    arg = vec![bits];
                }
            }
        }
        Ok(ScanOutcome {
            max: best.expect("nonempty scan"),
            argmax_bits: arg,
            count,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::{brute_force_qubo_max, embed_penalty, QuadraticPenalty};
    use crate::rat::rat;

    /// Random-ish small qubo with two slack blocks; compares the blockwise
    /// slack maximum against full enumeration over all slack bits.
    #[test]
    fn blockwise_matches_full_enumeration() {
        let mut q = Qubo::new_logical(3);
        let mut bi = BlockIndex::default();
        q.add_term(0, 0, rat(2));
        q.add_term(1, 2, rat(-1));

        let mut p1 = QuadraticPenalty::new(2, 2);
        p1.add_term(0, 0, rat(-3));
        p1.add_term(0, p1.s(0), rat(2));
        p1.add_term(p1.s(0), p1.s(0), rat(-1));
        p1.add_term(p1.s(0), p1.s(1), rat(1));
        p1.add_term(1, p1.s(1), rat(-2));
        p1.a0 = rat(1);
        embed_penalty(&mut q, &mut bi, &p1, &[0, 1], 0, "a", &rat(1)).unwrap();

        let mut p2 = QuadraticPenalty::new(2, 3);
        p2.add_term(0, p2.s(0), rat(4));
        p2.add_term(p2.s(0), p2.s(2), rat(-5));
        p2.add_term(p2.s(1), p2.s(1), rat(1));
        p2.add_term(1, p2.s(2), rat(3));
        embed_penalty(&mut q, &mut bi, &p2, &[1, 2], 1, "b", &rat(2)).unwrap();

        let n_slack = q.n_slack();
        assert_eq!(n_slack, 5);
        for bits in 0u64..8 {
            let x: Vec<bool> = (0..3).map(|i| bits & (1 << i) != 0).collect();
            let fast = super::super::max_over_slacks(&q, &bi, &x).unwrap();
            // oracle: enumerate every slack completion
            let mut best: Option<Rat> = None;
            for s in 0u64..(1 << n_slack) {
                let mut a = x.clone();
                for k in 0..n_slack {
                    a.push(s & (1 << k) != 0);
                }
                let v = q.eval(&a).unwrap();
                if best.as_ref().map_or(true, |b| &v > b) {
                    best = Some(v);
                }
            }
            assert_eq!(fast, best.unwrap(), "x = {bits:03b}");
        }
    }

    #[test]
    fn no_slack_qubo_reduces_to_eval() {
        let mut q = Qubo::new_logical(2);
        q.add_term(0, 1, rat(3));
        q.offset = rat(-1);
        let bi = BlockIndex::default();
        let x = vec![true, true];
        assert_eq!(
            super::super::max_over_slacks(&q, &bi, &x).unwrap(),
            q.eval(&x).unwrap()
        );
    }

    #[test]
    fn unindexed_slack_is_an_error() {
        let mut q = Qubo::new_logical(1);
        let mut bi = BlockIndex::default();
        let mut p = QuadraticPenalty::new(1, 1);
        p.add_term(0, p.s(0), rat(1));
        embed_penalty(&mut q, &mut bi, &p, &[0], 0, "a", &rat(1)).unwrap();
        bi.blocks.clear();
        assert!(matches!(
            super::super::max_over_slacks(&q, &bi, &[true]),
            Err(Error::UnindexedSlack(_))
        ));
    }

    #[test]
    fn scan_agrees_with_brute_force() {
        let mut q = Qubo::new_logical(3);
        let mut bi = BlockIndex::default();
        q.add_term(0, 0, rat(4));
        q.add_term(1, 1, rat(3));
        q.add_term(2, 2, rat(2));
        let mut p = QuadraticPenalty::new(2, 1);
        p.add_term(0, 0, rat(-5));
        p.add_term(0, 1, rat(-5));
        p.add_term(0, p.s(0), rat(5));
        p.add_term(p.s(0), p.s(0), rat(-5));
        embed_penalty(&mut q, &mut bi, &p, &[0, 1], 0, "a", &rat(1)).unwrap();
        let out = logical_scan(&q, &bi, 20).unwrap();
        let (_, v, _) = brute_force_qubo_max(&q, None, None).unwrap();
        assert_eq!(out.max, v);
    }
}
