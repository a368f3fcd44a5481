//! Dense simplex tableau over the integers.
//!
//! Rows belong to basic variables and columns to nonbasic ones. Every
//! entry is stored multiplied by the common denominator `det` (the absolute
//! determinant of the current basis), and pivots use the integer-preserving
//! update `t'[i][j] = (t[i][j]·p − t[i][c]·t[r][j]) / det`, whose division
//! is exact.
//!
//! Raising the variable of nonbasic column `j` by one lowers `val[i]` (the
//! value of row `i`'s basic variable times `det`) by `t[i][j]`, and raises
//! the objective by `red[j] / det`.

use std::cmp::Ordering;

use num_bigint::BigInt;

use super::float::{FloatStatus, FloatTableau};
use super::int::Int;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Basic(usize),
    AtLower(usize),
    AtUpper(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpOutcome {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// `maximize cᵀx` subject to `Ax + s = b`, `lower ≤ x ≤ upper`, `s ≥ 0`.
/// Variables `0..n` are structural, the rest are row slacks.
#[derive(Debug, Clone)]
pub(crate) struct Tableau {
    rows: usize,
    cols: usize,
    t: Vec<Int>,
    val: Vec<Int>,
    red: Vec<Int>,
    det: Int,
    cost: Vec<i64>,
    row_var: Vec<usize>,
    col_var: Vec<usize>,
    status: Vec<Status>,
    lower: Vec<Int>,
    upper: Vec<Option<Int>>,
    pub(crate) pivots: u64,
}

/// Degenerate pivots tolerated before switching to Bland's rule.
const STALL_LIMIT: usize = 50;

enum Step {
    Unbounded,
    Flip,
    Pivot(usize, bool),
}

impl Tableau {
    /// Slack basis with every structural variable at its lower bound.
    pub(crate) fn new(a: &[Vec<i64>], b: &[BigInt], cost: Vec<i64>, lower: Vec<BigInt>) -> Self {
        let rows = a.len();
        let cols = cost.len();
        let lower: Vec<Int> = lower.iter().map(Int::from).collect();
        let mut t = Vec::with_capacity(rows * cols);
        let mut val = Vec::with_capacity(rows);
        for (i, row) in a.iter().enumerate() {
            let mut v = Int::from(&b[i]);
            for (j, &x) in row.iter().enumerate() {
                let x = Int::from(x);
                v = v.sub(&x.mul(&lower[j]));
                t.push(x);
            }
            val.push(v);
        }
        let red = cost.iter().map(|&c| Int::from(c)).collect();
        let mut status: Vec<Status> = (0..cols).map(Status::AtLower).collect();
        status.extend((0..rows).map(Status::Basic));
        let mut all_lower = lower;
        all_lower.resize(cols + rows, Int::ZERO);
        Tableau {
            rows,
            cols,
            t,
            val,
            red,
            det: Int::S(1),
            cost,
            row_var: (cols..cols + rows).collect(),
            col_var: (0..cols).collect(),
            status,
            lower: all_lower,
            upper: vec![None; cols + rows],
            pivots: 0,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> &Int {
        &self.t[i * self.cols + j]
    }

    pub(crate) fn det(&self) -> BigInt {
        self.det.big()
    }

    pub(crate) fn structural_count(&self) -> usize {
        self.cost.len()
    }

    pub(crate) fn upper(&self, v: usize) -> Option<BigInt> {
        self.upper[v].as_ref().map(Int::big)
    }

    fn bound_value(&self, v: usize) -> &Int {
        match self.status[v] {
            Status::AtLower(_) => &self.lower[v],
            Status::AtUpper(_) => self.upper[v].as_ref().expect("finite upper"),
            Status::Basic(_) => unreachable!("basic variable has no bound value"),
        }
    }

    /// Value of variable `v` multiplied by `det`.
    fn value_scaled_int(&self, v: usize) -> Int {
        match self.status[v] {
            Status::Basic(r) => self.val[r].clone(),
            _ => self.bound_value(v).mul(&self.det),
        }
    }

    /// Objective value multiplied by `det`.
    pub(crate) fn objective_scaled(&self) -> BigInt {
        let mut acc = Int::ZERO;
        for (v, &c) in self.cost.iter().enumerate() {
            if c != 0 {
                acc = acc.add(&self.value_scaled_int(v).mul(&Int::from(c)));
            }
        }
        acc.big()
    }

    /// Replaces the bounds of variable `v`. A nonbasic variable keeps its
    /// side and the basic values follow it.
    pub(crate) fn set_bounds(&mut self, v: usize, lower: BigInt, upper: Option<BigInt>) {
        let lower = Int::from(&lower);
        let upper = upper.as_ref().map(Int::from);
        let (c, old) = match self.status[v] {
            Status::Basic(_) => {
                self.lower[v] = lower;
                self.upper[v] = upper;
                return;
            }
            Status::AtLower(c) | Status::AtUpper(c) => (c, self.bound_value(v).clone()),
        };
        self.lower[v] = lower;
        self.upper[v] = upper;
        if matches!(self.status[v], Status::AtUpper(_)) && self.upper[v].is_none() {
            self.status[v] = Status::AtLower(c);
        }
        let delta = self.bound_value(v).sub(&old);
        if !delta.is_zero() {
            for i in 0..self.rows {
                let x = self.at(i, c);
                if !x.is_zero() {
                    self.val[i] = self.val[i].sub(&x.mul(&delta));
                }
            }
        }
    }

    pub(crate) fn bounds(&self, v: usize) -> (BigInt, Option<BigInt>) {
        (self.lower[v].big(), self.upper(v))
    }

    /// Pivots nonbasic column `c` into row `r`; the leaving variable becomes
    /// nonbasic at its upper bound if `to_upper`, else at its lower bound.
    fn pivot(&mut self, r: usize, c: usize, to_upper: bool) {
        let cols = self.cols;
        let p = self.at(r, c).clone();
        debug_assert!(!p.is_zero());
        let det = std::mem::replace(&mut self.det, Int::ZERO);
        let leaving = self.row_var[r];
        let entering = self.col_var[c];
        let leave_value = if to_upper {
            self.upper[leaving].clone().expect("finite upper")
        } else {
            self.lower[leaving].clone()
        };
        let entering_old = self.bound_value(entering).clone();
        let row_r: Vec<Int> = self.t[r * cols..(r + 1) * cols].to_vec();
        let w_r = self.val[r].sub(&leave_value.mul(&det));
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let row = &mut self.t[i * cols..(i + 1) * cols];
            let f = row[c].clone();
            if f.is_zero() {
                for x in row.iter_mut() {
                    if !x.is_zero() {
                        *x = Int::mul_div(x, &p, &det);
                    }
                }
                self.val[i] = Int::mul_div(&self.val[i], &p, &det);
            } else {
                for (j, (x, y)) in row.iter_mut().zip(&row_r).enumerate() {
                    if j != c {
                        *x = Int::mul_sub_div(x, &p, &f, y, &det);
                    }
                }
                row[c] = f.neg();
                self.val[i] = Int::mul_sub_div(&self.val[i], &p, &f, &w_r, &det);
            }
        }
        self.t[r * cols + c] = det.clone();
        self.val[r] = entering_old.mul(&p).add(&w_r);
        let f = self.red[c].clone();
        for (j, (x, y)) in self.red.iter_mut().zip(&row_r).enumerate() {
            if j != c {
                *x = Int::mul_sub_div(x, &p, &f, y, &det);
            }
        }
        self.red[c] = f.neg();

        if p.is_negative() {
            for x in self.t.iter_mut().chain(&mut self.val).chain(&mut self.red) {
                if !x.is_zero() {
                    *x = x.neg();
                }
            }
            self.det = p.neg();
        } else {
            self.det = p;
        }
        self.row_var[r] = entering;
        self.col_var[c] = leaving;
        self.status[entering] = Status::Basic(r);
        self.status[leaving] = if to_upper {
            Status::AtUpper(c)
        } else {
            Status::AtLower(c)
        };
        self.pivots += 1;
    }

    fn can_increase(&self, v: usize) -> bool {
        self.upper[v].as_ref().is_none_or(|u| *u > self.lower[v])
    }

    /// Moves a nonbasic variable to its other bound.
    fn flip(&mut self, c: usize) {
        let v = self.col_var[c];
        let u = self.upper[v].clone().expect("finite upper");
        let delta = match self.status[v] {
            Status::AtLower(_) => {
                self.status[v] = Status::AtUpper(c);
                u.sub(&self.lower[v])
            }
            Status::AtUpper(_) => {
                self.status[v] = Status::AtLower(c);
                self.lower[v].sub(&u)
            }
            Status::Basic(_) => unreachable!(),
        };
        for i in 0..self.rows {
            let x = self.at(i, c);
            if !x.is_zero() {
                self.val[i] = self.val[i].sub(&x.mul(&delta));
            }
        }
        self.pivots += 1;
    }

    /// Primal simplex from a primal feasible basis.
    pub(crate) fn primal(&mut self, max_pivots: u64) -> LpOutcome {
        let mut stall = 0usize;
        let mut last = (self.objective_scaled(), self.det());
        let start = self.pivots;
        loop {
            if self.pivots - start > max_pivots {
                return LpOutcome::IterationLimit;
            }
            let bland = stall > STALL_LIMIT;
            let mut enter: Option<(usize, Int)> = None;
            for c in 0..self.cols {
                let v = self.col_var[c];
                let d = &self.red[c];
                let eligible = match self.status[v] {
                    Status::AtLower(_) => d.is_positive() && self.can_increase(v),
                    Status::AtUpper(_) => d.is_negative(),
                    Status::Basic(_) => false,
                };
                if !eligible {
                    continue;
                }
                if bland {
                    if enter.as_ref().is_none_or(|(bc, _)| v < self.col_var[*bc]) {
                        enter = Some((c, Int::ZERO));
                    }
                    continue;
                }
                let mag = d.abs();
                if enter.as_ref().is_none_or(|(_, m)| mag > *m) {
                    enter = Some((c, mag));
                }
            }
            let Some((c, _)) = enter else {
                return LpOutcome::Optimal;
            };
            let increasing = matches!(self.status[self.col_var[c]], Status::AtLower(_));
            match self.primal_ratio(c, increasing) {
                Step::Unbounded => return LpOutcome::Unbounded,
                Step::Flip => self.flip(c),
                Step::Pivot(r, up) => self.pivot(r, c, up),
            }
            let now = (self.objective_scaled(), self.det());
            if &now.0 * &last.1 == &last.0 * &now.1 {
                stall += 1;
            } else {
                stall = 0;
            }
            last = now;
        }
    }

    fn primal_ratio(&self, c: usize, increasing: bool) -> Step {
        // Best step as the fraction num/den (den > 0); ties go to the lowest
        // basic variable index.
        let mut best: Option<(Int, Int, usize, bool)> = None;
        for i in 0..self.rows {
            let a = self.at(i, c);
            if a.is_zero() {
                continue;
            }
            let rate = if increasing { a.neg() } else { a.clone() };
            let bv = self.row_var[i];
            let (num, den, up) = if rate.is_negative() {
                (
                    self.val[i].sub(&self.lower[bv].mul(&self.det)),
                    rate.neg(),
                    false,
                )
            } else {
                match &self.upper[bv] {
                    Some(u) => (u.mul(&self.det).sub(&self.val[i]), rate, true),
                    None => continue,
                }
            };
            let better = match &best {
                None => true,
                Some((bn, bd, bi, _)) => match Int::cmp_products(&num, bd, bn, &den) {
                    Ordering::Less => true,
                    Ordering::Equal => bv < self.row_var[*bi],
                    Ordering::Greater => false,
                },
            };
            if better {
                best = Some((num, den, i, up));
            }
        }
        let v = self.col_var[c];
        if let Some(u) = &self.upper[v] {
            let range = u.sub(&self.lower[v]);
            match &best {
                Some((bn, bd, _, _)) if Int::cmp_products(bn, &Int::S(1), &range, bd).is_lt() => {}
                _ => return Step::Flip,
            }
        }
        match best {
            Some((_, _, r, up)) => Step::Pivot(r, up),
            None => Step::Unbounded,
        }
    }

    /// Dual simplex from a dual feasible basis.
    pub(crate) fn dual(&mut self, max_pivots: u64) -> LpOutcome {
        let start = self.pivots;
        loop {
            if self.pivots - start > max_pivots {
                return LpOutcome::IterationLimit;
            }
            // Leaving row: largest bound violation, ties to the lowest row.
            let mut leave: Option<(usize, Int, bool)> = None;
            for i in 0..self.rows {
                let bv = self.row_var[i];
                let lo = self.lower[bv].mul(&self.det);
                let (viol, below) = if self.val[i] < lo {
                    (lo.sub(&self.val[i]), true)
                } else if let Some(u) = &self.upper[bv] {
                    let hi = u.mul(&self.det);
                    if self.val[i] > hi {
                        (self.val[i].sub(&hi), false)
                    } else {
                        continue;
                    }
                } else {
                    continue;
                };
                if leave.as_ref().is_none_or(|(_, v, _)| viol > *v) {
                    leave = Some((i, viol, below));
                }
            }
            let Some((r, _, below)) = leave else {
                return LpOutcome::Optimal;
            };
            // val[r] must rise (below) or fall; column c moves it by −t[r][c].
            let mut enter: Option<(Int, Int, usize)> = None;
            for c in 0..self.cols {
                let a = self.at(r, c);
                if a.is_zero() {
                    continue;
                }
                let v = self.col_var[c];
                let ok = match self.status[v] {
                    Status::AtLower(_) => self.can_increase(v) && (a.is_negative() == below),
                    Status::AtUpper(_) => a.is_positive() == below,
                    Status::Basic(_) => false,
                };
                if !ok {
                    continue;
                }
                let num = self.red[c].abs();
                let den = a.abs();
                let better = match &enter {
                    None => true,
                    Some((bn, bd, bc)) => match Int::cmp_products(&num, bd, bn, &den) {
                        Ordering::Less => true,
                        Ordering::Equal => v < self.col_var[*bc],
                        Ordering::Greater => false,
                    },
                };
                if better {
                    enter = Some((num, den, c));
                }
            }
            let Some((_, _, c)) = enter else {
                return LpOutcome::Infeasible;
            };
            self.pivot(r, c, !below);
        }
    }

    /// Floating-point copy with structural variable `v` replaced by
    /// `v − shift[v]`.
    pub(crate) fn to_float(&self, shift: &[BigInt]) -> FloatTableau {
        use num_rational::BigRational;
        use num_traits::ToPrimitive;
        let det = self.det.big();
        let n = self.structural_count();
        let det_f = det.to_f64().unwrap_or(f64::NAN);
        let f = |x: &Int| -> f64 {
            match x {
                Int::S(v) => *v as f64 / det_f,
                Int::B(b) => b.to_f64().unwrap_or(f64::NAN) / det_f,
            }
        };
        let g = |x: BigInt| -> f64 { x.to_f64().unwrap_or(f64::NAN) };
        let shift_of = |v: usize| {
            if v < n {
                shift[v].clone()
            } else {
                BigInt::from(0)
            }
        };
        let val = (0..self.rows)
            .map(|i| {
                let v = self.row_var[i];
                let num = self.val[i].big() - shift_of(v) * &det;
                BigRational::new(num, det.clone())
                    .to_f64()
                    .unwrap_or(f64::NAN)
            })
            .collect();
        let lower = (0..self.status.len())
            .map(|v| g(self.lower[v].big() - shift_of(v)))
            .collect();
        let upper = (0..self.status.len())
            .map(|v| match &self.upper[v] {
                Some(u) => g(u.big() - shift_of(v)),
                None => f64::INFINITY,
            })
            .collect();
        let status = self
            .status
            .iter()
            .map(|s| match *s {
                Status::Basic(r) => FloatStatus::Basic(r),
                Status::AtLower(c) => FloatStatus::AtLower(c),
                Status::AtUpper(c) => FloatStatus::AtUpper(c),
            })
            .collect();
        FloatTableau {
            structural: n,
            rows: self.rows,
            cols: self.cols,
            t: self.t.iter().map(f).collect(),
            val,
            red: self.red.iter().map(f).collect(),
            row_var: self.row_var.clone(),
            col_var: self.col_var.clone(),
            status,
            lower,
            upper,
            pivots: 0,
        }
    }

    /// Structural values multiplied by `det`.
    pub(crate) fn structural_values(&self) -> Vec<BigInt> {
        (0..self.structural_count())
            .map(|v| self.value_scaled_int(v).big())
            .collect()
    }

    /// Row duals `yᵢ = −(reduced cost of slack i)`, multiplied by `det`.
    pub(crate) fn duals_scaled(&self) -> Vec<BigInt> {
        let n = self.structural_count();
        (n..self.status.len())
            .map(|v| match self.status[v] {
                Status::Basic(_) => BigInt::from(0),
                Status::AtLower(c) | Status::AtUpper(c) => self.red[c].neg().big(),
            })
            .collect()
    }

    /// Basic structural variable whose value is farthest from an integer,
    /// ties to the lowest index, with its value multiplied by `det`.
    /// Fractional basic structural variable with the highest `priority`,
    /// then farthest from an integer, then lowest index.
    pub(crate) fn branch_candidate(&self, priority: &[u64]) -> Option<(usize, BigInt)> {
        let mut best: Option<(usize, Int)> = None;
        for v in 0..self.structural_count() {
            let Status::Basic(r) = self.status[v] else {
                continue;
            };
            let rem = self.val[r].mod_floor(&self.det);
            if rem.is_zero() {
                continue;
            }
            let other = self.det.sub(&rem);
            let dist = if other < rem { other } else { rem };
            let better = best.as_ref().is_none_or(|(b, d)| {
                priority[v] > priority[*b] || (priority[v] == priority[*b] && dist > *d)
            });
            if better {
                best = Some((v, dist));
            }
        }
        best.map(|(v, _)| {
            let Status::Basic(r) = self.status[v] else {
                unreachable!()
            };
            (v, self.val[r].big())
        })
    }
}
