//! Exact rational linear-programming feasibility.
//!
//! Dense two-phase simplex with Bland's anti-cycling rule. Variables are
//! free-signed (split internally into nonnegative pairs), so penalty
//! coefficient systems can be fed in directly. An optional linear objective
//! is minimized after feasibility; an unbounded objective is reported
//! distinctly from infeasibility.
//!
//! Arithmetic runs over i128 fractions with overflow checks and falls back
//! to big rationals when a solve overflows, so results are always exact.

use crate::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `sum coeff * var + constant`, compared against 0.
#[derive(Debug, Clone, Default)]
pub struct LinExpr {
    pub terms: Vec<(usize, Rat)>,
    pub constant: Rat,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(mut self, var: usize, coeff: Rat) -> Self {
        self.terms.push((var, coeff));
        self
    }

    pub fn with_constant(mut self, c: Rat) -> Self {
        self.constant = c;
        self
    }

    fn dense(&self, n: usize) -> Vec<Rat> {
        let mut v = vec![<Rat as Zero>::zero(); n];
        for (i, c) in &self.terms {
            v[*i] += c;
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    /// A feasible (and, with an objective, optimal) point.
    Feasible(Vec<Rat>),
    Infeasible,
    Unbounded,
}

#[derive(Clone, Copy, PartialEq)]
enum Sense {
    Le,
    Eq,
}

/// Exact scalar usable inside the simplex. Operations report overflow by
/// returning None; the big-rational instance never does.
trait LpNum: Clone + PartialOrd + Sized {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn neg(&self) -> Self;
    fn add(&self, rhs: &Self) -> Option<Self>;
    fn sub(&self, rhs: &Self) -> Option<Self>;
    fn mul(&self, rhs: &Self) -> Option<Self>;
    fn div(&self, rhs: &Self) -> Option<Self>;
    fn from_rat(r: &Rat) -> Option<Self>;
    fn to_rat(&self) -> Rat;
}

impl LpNum for Rat {
    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
    fn one() -> Self {
        <Rat as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn add(&self, rhs: &Self) -> Option<Self> {
        Some(self + rhs)
    }
    fn sub(&self, rhs: &Self) -> Option<Self> {
        Some(self - rhs)
    }
    fn mul(&self, rhs: &Self) -> Option<Self> {
        Some(self * rhs)
    }
    fn div(&self, rhs: &Self) -> Option<Self> {
        Some(self / rhs)
    }
    fn from_rat(r: &Rat) -> Option<Self> {
        Some(r.clone())
    }
    fn to_rat(&self) -> Rat {
        self.clone()
    }
}

/// i128 fraction with a positive denominator, normalized after every
/// operation. All arithmetic is overflow-checked.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Q128 {
    n: i128,
    d: i128,
}

impl Q128 {
    fn norm(n: i128, d: i128) -> Option<Q128> {
        if d == 0 {
            return None;
        }
        let (mut n, mut d) = if d < 0 {
            (n.checked_neg()?, d.checked_neg()?)
        } else {
            (n, d)
        };
        if n == 0 {
            return Some(Q128 { n: 0, d: 1 });
        }
        let g = n.unsigned_abs().gcd(&d.unsigned_abs());
        if g > 1 {
            n /= g as i128;
            d /= g as i128;
        }
        Some(Q128 { n, d })
    }
}

impl PartialOrd for Q128 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        // denominators are positive; compare n1*d2 with n2*d1
        let l = self.n.checked_mul(other.d)?;
        let r = other.n.checked_mul(self.d)?;
        l.partial_cmp(&r)
    }
}

impl LpNum for Q128 {
    fn zero() -> Self {
        Q128 { n: 0, d: 1 }
    }
    fn one() -> Self {
        Q128 { n: 1, d: 1 }
    }
    fn is_zero(&self) -> bool {
        self.n == 0
    }
    fn is_negative(&self) -> bool {
        self.n < 0
    }
    fn neg(&self) -> Self {
        Q128 { n: -self.n, d: self.d }
    }
    fn add(&self, rhs: &Self) -> Option<Self> {
        let g = self.d.gcd(&rhs.d);
        let (da, db) = (self.d / g, rhs.d / g);
        let n = self
            .n
            .checked_mul(db)?
            .checked_add(rhs.n.checked_mul(da)?)?;
        let d = self.d.checked_mul(db)?;
        Q128::norm(n, d)
    }
    fn sub(&self, rhs: &Self) -> Option<Self> {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Option<Self> {
        // cross-reduce before multiplying to keep magnitudes small
        let g1 = self.n.unsigned_abs().gcd(&rhs.d.unsigned_abs()) as i128;
        let g2 = rhs.n.unsigned_abs().gcd(&self.d.unsigned_abs()) as i128;
        let n = (self.n / g1).checked_mul(rhs.n / g2)?;
        let d = (self.d / g2).checked_mul(rhs.d / g1)?;
        Q128::norm(n, d)
    }
    fn div(&self, rhs: &Self) -> Option<Self> {
        if rhs.n == 0 {
            return None;
        }
        self.mul(&Q128 { n: rhs.d, d: rhs.n })
    }
    fn from_rat(r: &Rat) -> Option<Self> {
        Q128::norm(r.numer().to_i128()?, r.denom().to_i128()?)
    }
    fn to_rat(&self) -> Rat {
        Rat::new(BigInt::from(self.n), BigInt::from(self.d))
    }
}

/// Solves: find x with `e = 0` for all equalities and `i <= 0` for all
/// inequalities; minimizes `objective` when given.
pub fn lp_feasible(
    n_vars: usize,
    equalities: &[LinExpr],
    inequalities: &[LinExpr],
    objective: Option<&LinExpr>,
) -> LpOutcome {
    solve_split(n_vars, equalities, inequalities, objective, false)
}

/// Feasibility plus minimization of the L1 norm of the solution, encoded as
/// `min sum(p + n)` over the internal nonnegative split `x = p - n`. At a
/// vertex optimum at most one of each pair is nonzero, so the objective
/// equals `sum |x_v|`.
pub fn lp_l1_min(n_vars: usize, equalities: &[LinExpr], inequalities: &[LinExpr]) -> LpOutcome {
    solve_split(n_vars, equalities, inequalities, None, true)
}

fn solve_split(
    n_vars: usize,
    equalities: &[LinExpr],
    inequalities: &[LinExpr],
    objective: Option<&LinExpr>,
    l1: bool,
) -> LpOutcome {
    if equalities.is_empty() && objective.is_none() && !l1 {
        return feasibility_only(n_vars, inequalities);
    }
    let n_cols = 2 * n_vars;
    let split = |expr: &LinExpr| -> (Vec<Rat>, Rat) {
        let d = expr.dense(n_vars);
        let mut row = Vec::with_capacity(n_cols);
        for c in &d {
            row.push(c.clone());
            row.push(-c.clone());
        }
        (row, -expr.constant.clone())
    };
    let mut rows = Vec::new();
    for e in equalities {
        let (r, b) = split(e);
        rows.push((r, Sense::Eq, b));
    }
    for e in inequalities {
        let (r, b) = split(e);
        rows.push((r, Sense::Le, b));
    }
    let cost: Option<Vec<Rat>> = if l1 {
        Some(vec![<Rat as One>::one(); n_cols])
    } else {
        objective.map(|o| split(o).0)
    };

    let raw = simplex_generic::<Q128>(n_cols, &rows, &cost)
        .unwrap_or_else(|| simplex_generic::<Rat>(n_cols, &rows, &cost).expect("exact path"));
    match raw {
        RawOutcome::Infeasible => LpOutcome::Infeasible,
        RawOutcome::Unbounded => LpOutcome::Unbounded,
        RawOutcome::Feasible(z) => {
            let x = (0..n_vars).map(|v| &z[2 * v] - &z[2 * v + 1]).collect();
            LpOutcome::Feasible(x)
        }
    }
}

enum RawOutcome {
    Feasible(Vec<Rat>),
    Infeasible,
    Unbounded,
}

/// Pure-inequality feasibility via a single auxiliary column: minimize t
/// subject to `a_i z - t <= b_i`. One pivot makes the start basic; the
/// system is feasible iff the optimum is t = 0. This is the hot path of the
/// penalty search, which eliminates equalities before calling in.
fn feasibility_only(n_vars: usize, inequalities: &[LinExpr]) -> LpOutcome {
    let n_cols = 2 * n_vars;
    let mut rows: Vec<(Vec<Rat>, Rat)> = Vec::with_capacity(inequalities.len());
    for e in inequalities {
        let d = e.dense(n_vars);
        let mut row = Vec::with_capacity(n_cols);
        for c in &d {
            row.push(c.clone());
            row.push(-c.clone());
        }
        if row.iter().all(|c| Zero::is_zero(c)) {
            if Signed::is_negative(&-e.constant.clone()) {
                return LpOutcome::Infeasible;
            }
            continue;
        }
        rows.push((row, -e.constant.clone()));
    }
    if rows.iter().all(|(_, b)| !Signed::is_negative(b)) {
        return LpOutcome::Feasible(vec![<Rat as Zero>::zero(); n_vars]);
    }
    let raw = single_t_generic::<Q128>(n_cols, &rows)
        .unwrap_or_else(|| single_t_generic::<Rat>(n_cols, &rows).expect("exact path"));
    match raw {
        RawOutcome::Infeasible => LpOutcome::Infeasible,
        RawOutcome::Unbounded => unreachable!("t is bounded below"),
        RawOutcome::Feasible(z) => {
            let x = (0..n_vars).map(|v| &z[2 * v] - &z[2 * v + 1]).collect();
            LpOutcome::Feasible(x)
        }
    }
}

fn single_t_generic<T: LpNum>(n_struct: usize, rows: &[(Vec<Rat>, Rat)]) -> Option<RawOutcome> {
    let m = rows.len();
    let t_col = n_struct + m;
    let n_total = t_col + 1;
    let mut a: Vec<Vec<T>> = Vec::with_capacity(m);
    let mut b: Vec<T> = Vec::with_capacity(m);
    let mut worst: Option<usize> = None;
    for (i, (r, bi)) in rows.iter().enumerate() {
        let mut row: Vec<T> = Vec::with_capacity(n_total);
        for c in r {
            row.push(T::from_rat(c)?);
        }
        row.resize(n_total, T::zero());
        row[n_struct + i] = T::one();
        row[t_col] = T::one().neg();
        let bt = T::from_rat(bi)?;
        if bt.is_negative() {
            let better = match worst {
                None => true,
                Some(w) => bt < b[w],
            };
            if better {
                worst = Some(i);
            }
        }
        a.push(row);
        b.push(bt);
    }
    let mut t = Tableau {
        a,
        b,
        basis: (0..m).map(|i| n_struct + i).collect(),
        n_total,
    };
    // minimize t
    let mut obj = vec![T::zero(); n_total];
    obj[t_col] = T::one();
    let mut rhs = T::zero();
    if let Some(w) = worst {
        t.pivot(w, t_col, &mut obj, &mut rhs)?;
    } else {
        return Some(RawOutcome::Feasible(vec![<Rat as Zero>::zero(); n_struct]));
    }
    if !t.run(&mut obj, &mut rhs, n_total)? {
        return Some(RawOutcome::Unbounded);
    }
    if rhs.is_negative() {
        // optimal t = -rhs stayed positive: no point satisfies every row
        return Some(RawOutcome::Infeasible);
    }
    let mut z = vec![<Rat as Zero>::zero(); n_struct];
    for (r, &col) in t.basis.iter().enumerate() {
        if col < n_struct {
            z[col] = t.b[r].to_rat();
        }
    }
    Some(RawOutcome::Feasible(z))
}

struct Tableau<T> {
    a: Vec<Vec<T>>,
    b: Vec<T>,
    basis: Vec<usize>,
    n_total: usize,
}

impl<T: LpNum> Tableau<T> {
    fn pivot(&mut self, row: usize, col: usize, obj: &mut [T], obj_rhs: &mut T) -> Option<()> {
        let p = self.a[row][col].clone();
        for c in self.a[row].iter_mut() {
            if !c.is_zero() {
                *c = c.div(&p)?;
            }
        }
        self.b[row] = self.b[row].div(&p)?;
        let pivot_row = self.a[row].clone();
        let pivot_b = self.b[row].clone();
        for r in 0..self.a.len() {
            if r == row || self.a[r][col].is_zero() {
                continue;
            }
            let f = self.a[r][col].clone();
            for c in 0..self.n_total {
                if !pivot_row[c].is_zero() {
                    self.a[r][c] = self.a[r][c].sub(&pivot_row[c].mul(&f)?)?;
                }
            }
            self.b[r] = self.b[r].sub(&pivot_b.mul(&f)?)?;
        }
        if !obj[col].is_zero() {
            let f = obj[col].clone();
            for c in 0..self.n_total {
                if !pivot_row[c].is_zero() {
                    obj[c] = obj[c].sub(&pivot_row[c].mul(&f)?)?;
                }
            }
            *obj_rhs = obj_rhs.sub(&pivot_b.mul(&f)?)?;
        }
        self.basis[row] = col;
        Some(())
    }

    /// Minimizes the canonicalized cost row. Most-negative-reduced-cost
    /// pricing normally; after a streak of degenerate pivots switch to
    /// Bland's rule, which cannot cycle.
    /// Ok(true) at optimality, Ok(false) on unboundedness, None on overflow.
    fn run(&mut self, obj: &mut [T], obj_rhs: &mut T, n_allowed: usize) -> Option<bool> {
        let mut degenerate_streak = 0usize;
        loop {
            let bland = degenerate_streak > 24;
            let entering = if bland {
                (0..n_allowed).find(|&j| obj[j].is_negative())
            } else {
                let mut best: Option<(usize, &T)> = None;
                for (j, c) in obj.iter().enumerate().take(n_allowed) {
                    if c.is_negative() && best.map_or(true, |(_, b)| c < b) {
                        best = Some((j, c));
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(j) = entering else {
                return Some(true);
            };
            let mut leave: Option<(usize, T)> = None;
            for r in 0..self.a.len() {
                let arj = &self.a[r][j];
                if !arj.is_zero() && !arj.is_negative() {
                    let ratio = self.b[r].div(arj)?;
                    let better = match &leave {
                        None => true,
                        Some((lr, lv)) => match ratio.partial_cmp(lv) {
                            None => return None,
                            Some(std::cmp::Ordering::Less) => true,
                            Some(std::cmp::Ordering::Equal) => self.basis[r] < self.basis[*lr],
                            Some(std::cmp::Ordering::Greater) => false,
                        },
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((row, ratio)) = leave else {
                return Some(false);
            };
            if ratio.is_zero() {
                degenerate_streak += 1;
            } else {
                degenerate_streak = 0;
            }
            self.pivot(row, j, obj, obj_rhs)?;
        }
    }
}

/// Two-phase simplex; None means arithmetic overflow (retry with a wider
/// scalar type).
fn simplex_generic<T: LpNum>(
    n_struct: usize,
    in_rows: &[(Vec<Rat>, Sense, Rat)],
    cost: &Option<Vec<Rat>>,
) -> Option<RawOutcome> {
    // drop trivial rows, normalize rhs >= 0
    let mut norm: Vec<(Vec<T>, Sense, T, bool)> = Vec::new();
    for (r, sense, b) in in_rows {
        if r.iter().all(|c| Zero::is_zero(c)) {
            let ok = match sense {
                Sense::Le => !Signed::is_negative(b),
                Sense::Eq => Zero::is_zero(b),
            };
            if ok {
                continue;
            }
            return Some(RawOutcome::Infeasible);
        }
        let mut row: Vec<T> = Vec::with_capacity(r.len());
        for c in r {
            row.push(T::from_rat(c)?);
        }
        let mut bb = T::from_rat(b)?;
        let mut flipped = false;
        if bb.is_negative() {
            for c in row.iter_mut() {
                *c = c.neg();
            }
            bb = bb.neg();
            flipped = true;
        }
        norm.push((row, *sense, bb, flipped));
    }

    let m = norm.len();
    let n_slack = norm.iter().filter(|(_, s, _, _)| *s == Sense::Le).count();
    let mut n_total = n_struct + n_slack;
    let mut a: Vec<Vec<T>> = Vec::with_capacity(m);
    let mut b_col = Vec::with_capacity(m);
    let mut basis = vec![usize::MAX; m];
    let mut needs_artificial = Vec::new();
    let mut slack_idx = 0;
    for (i, (r, sense, b, flipped)) in norm.into_iter().enumerate() {
        let mut row = r;
        row.resize(n_total, T::zero());
        match sense {
            Sense::Le => {
                let col = n_struct + slack_idx;
                slack_idx += 1;
                row[col] = if flipped { T::one().neg() } else { T::one() };
                if flipped {
                    needs_artificial.push(i);
                } else {
                    basis[i] = col;
                }
            }
            Sense::Eq => needs_artificial.push(i),
        }
        a.push(row);
        b_col.push(b);
    }
    let n_art = needs_artificial.len();
    for row in a.iter_mut() {
        row.resize(n_total + n_art, T::zero());
    }
    for (k, &i) in needs_artificial.iter().enumerate() {
        a[i][n_total + k] = T::one();
        basis[i] = n_total + k;
    }
    let art_start = n_total;
    n_total += n_art;

    let mut t = Tableau {
        a,
        b: b_col,
        basis,
        n_total,
    };

    // phase 1: minimize the artificial sum
    if n_art > 0 {
        let mut obj = vec![T::zero(); n_total];
        for o in obj.iter_mut().skip(art_start) {
            *o = T::one();
        }
        let mut rhs = T::zero();
        for r in 0..t.a.len() {
            if t.basis[r] >= art_start {
                for c in 0..n_total {
                    if !t.a[r][c].is_zero() {
                        obj[c] = obj[c].sub(&t.a[r][c])?;
                    }
                }
                rhs = rhs.sub(&t.b[r])?;
            }
        }
        if !t.run(&mut obj, &mut rhs, n_total)? {
            return Some(RawOutcome::Infeasible);
        }
        if rhs.is_negative() {
            // objective value = -rhs > 0: artificials cannot vanish
            return Some(RawOutcome::Infeasible);
        }
        // pivot remaining artificials out or drop redundant rows
        let mut r = 0;
        while r < t.a.len() {
            if t.basis[r] >= art_start {
                if let Some(j) = (0..art_start).find(|&j| !t.a[r][j].is_zero()) {
                    let mut dummy = vec![T::zero(); n_total];
                    let mut dummy_rhs = T::zero();
                    t.pivot(r, j, &mut dummy, &mut dummy_rhs)?;
                } else {
                    t.a.remove(r);
                    t.b.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
            r += 1;
        }
    }

    // phase 2 over the original columns; artificials are excluded
    if let Some(c) = cost {
        let mut obj = vec![T::zero(); n_total];
        for (j, cj) in c.iter().enumerate() {
            obj[j] = T::from_rat(cj)?;
        }
        let mut rhs = T::zero();
        for r in 0..t.a.len() {
            let bcol = t.basis[r];
            if !obj[bcol].is_zero() {
                let f = obj[bcol].clone();
                for cc in 0..n_total {
                    if !t.a[r][cc].is_zero() {
                        obj[cc] = obj[cc].sub(&t.a[r][cc].mul(&f)?)?;
                    }
                }
                rhs = rhs.sub(&t.b[r].mul(&f)?)?;
            }
        }
        if !t.run(&mut obj, &mut rhs, art_start)? {
            return Some(RawOutcome::Unbounded);
        }
    }

    let mut z = vec![<Rat as Zero>::zero(); n_struct];
    for (r, &col) in t.basis.iter().enumerate() {
        if col < n_struct {
            z[col] = t.b[r].to_rat();
        }
    }
    Some(RawOutcome::Feasible(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn contradictory_system_is_infeasible() {
        // a = 1, a <= 0
        let eqs = [LinExpr::new().term(0, rat(1)).with_constant(rat(-1))];
        let ineqs = [LinExpr::new().term(0, rat(1))];
        assert_eq!(lp_feasible(1, &eqs, &ineqs, None), LpOutcome::Infeasible);
    }

    #[test]
    fn minimization_picks_the_vertex() {
        // a + b = 1, a >= 0, b >= 0, min a  ->  a = 0, b = 1
        let eqs = [LinExpr::new()
            .term(0, rat(1))
            .term(1, rat(1))
            .with_constant(rat(-1))];
        let ineqs = [
            LinExpr::new().term(0, rat(-1)),
            LinExpr::new().term(1, rat(-1)),
        ];
        let obj = LinExpr::new().term(0, rat(1));
        match lp_feasible(2, &eqs, &ineqs, Some(&obj)) {
            LpOutcome::Feasible(x) => {
                assert_eq!(x[0], rat(0));
                assert_eq!(x[1], rat(1));
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_objective_is_distinct() {
        let obj = LinExpr::new().term(0, rat(1));
        assert_eq!(lp_feasible(1, &[], &[], Some(&obj)), LpOutcome::Unbounded);
    }

    #[test]
    fn feasibility_without_objective_returns_a_point() {
        // 1 <= x <= 3
        let ineqs = [
            LinExpr::new().term(0, rat(1)).with_constant(rat(-3)),
            LinExpr::new().term(0, rat(-1)).with_constant(rat(1)),
        ];
        match lp_feasible(1, &[], &ineqs, None) {
            LpOutcome::Feasible(x) => {
                assert!(x[0] >= rat(1) && x[0] <= rat(3), "{:?}", x);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn l1_minimization_prefers_sparse_points() {
        // x + y = 2 with free signs: L1 minimum is |x|+|y| = 2
        let eqs = [LinExpr::new()
            .term(0, rat(1))
            .term(1, rat(1))
            .with_constant(rat(-2))];
        match lp_l1_min(2, &eqs, &[]) {
            LpOutcome::Feasible(x) => {
                let l1 = crate::rat::abs(&x[0]) + crate::rat::abs(&x[1]);
                assert_eq!(l1, rat(2));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_optimum_passes_through() {
        let eqs = [LinExpr::new().term(0, rat(1)).with_constant(rat(2))];
        let obj = LinExpr::new().term(0, rat(1));
        match lp_feasible(1, &eqs, &[], Some(&obj)) {
            LpOutcome::Feasible(x) => assert_eq!(x[0], rat(-2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_and_redundant_rows() {
        // x + y = 2 stated twice, x - y = 0, so x = y = 1
        let eqs = [
            LinExpr::new()
                .term(0, rat(1))
                .term(1, rat(1))
                .with_constant(rat(-2)),
            LinExpr::new()
                .term(0, rat(1))
                .term(1, rat(1))
                .with_constant(rat(-2)),
            LinExpr::new().term(0, rat(1)).term(1, rat(-1)),
        ];
        match lp_feasible(2, &eqs, &[], None) {
            LpOutcome::Feasible(x) => {
                assert_eq!(x[0], rat(1));
                assert_eq!(x[1], rat(1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn q128_overflow_falls_back_to_bigint() {
        // coefficients near the i128 boundary force the wide path
        let huge = Rat::new(BigInt::from(i128::MAX) * 4, BigInt::from(1));
        let eqs = [LinExpr::new()
            .term(0, huge.clone())
            .with_constant(-huge.clone())];
        match lp_feasible(1, &eqs, &[], None) {
            LpOutcome::Feasible(x) => assert_eq!(x[0], rat(1)),
            other => panic!("{other:?}"),
        }
    }
}
