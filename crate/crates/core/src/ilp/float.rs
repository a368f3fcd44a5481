//! Floating-point twin of the exact tableau, used to steer branch-and-bound.
//! Nothing it computes is trusted: bounds are re-derived exactly from its
//! dual values and candidate solutions are re-checked in integers.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FloatStatus {
    Basic(usize),
    AtLower(usize),
    AtUpper(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FloatOutcome {
    Optimal,
    Infeasible,
    /// Iteration cap or a numerically unusable pivot.
    Failed,
}

/// Same layout and sign conventions as the exact tableau with `det = 1`.
#[derive(Debug, Clone)]
pub(crate) struct FloatTableau {
    pub(crate) structural: usize,
    pub(crate) rows: usize,
    pub(crate) cols: usize,
    pub(crate) t: Vec<f64>,
    pub(crate) val: Vec<f64>,
    pub(crate) red: Vec<f64>,
    pub(crate) row_var: Vec<usize>,
    pub(crate) col_var: Vec<usize>,
    pub(crate) status: Vec<FloatStatus>,
    pub(crate) lower: Vec<f64>,
    pub(crate) upper: Vec<f64>,
    pub(crate) pivots: u64,
}

const FEAS_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;

fn tol(bound: f64) -> f64 {
    FEAS_TOL * bound.abs().max(1.0)
}

impl FloatTableau {
    fn bound_value(&self, v: usize) -> f64 {
        match self.status[v] {
            FloatStatus::AtLower(_) => self.lower[v],
            FloatStatus::AtUpper(_) => self.upper[v],
            FloatStatus::Basic(r) => self.val[r],
        }
    }

    pub(crate) fn value(&self, v: usize) -> f64 {
        self.bound_value(v)
    }

    pub(crate) fn objective(&self) -> f64 {
        (0..self.structural).map(|v| self.value(v)).sum()
    }

    /// Dual value of original row `i`.
    pub(crate) fn dual(&self, i: usize) -> f64 {
        match self.status[self.structural + i] {
            FloatStatus::Basic(_) => 0.0,
            FloatStatus::AtLower(c) | FloatStatus::AtUpper(c) => -self.red[c],
        }
    }

    pub(crate) fn set_bounds(&mut self, v: usize, lower: f64, upper: f64) {
        let c = match self.status[v] {
            FloatStatus::Basic(_) => {
                self.lower[v] = lower;
                self.upper[v] = upper;
                return;
            }
            FloatStatus::AtLower(c) | FloatStatus::AtUpper(c) => c,
        };
        let old = self.bound_value(v);
        self.lower[v] = lower;
        self.upper[v] = upper;
        if upper.is_infinite() {
            self.status[v] = FloatStatus::AtLower(c);
        }
        let delta = self.bound_value(v) - old;
        if delta != 0.0 {
            for i in 0..self.rows {
                self.val[i] -= self.t[i * self.cols + c] * delta;
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize, to_upper: bool) {
        let cols = self.cols;
        let p = self.t[r * cols + c];
        let leaving = self.row_var[r];
        let entering = self.col_var[c];
        let leave_value = if to_upper {
            self.upper[leaving]
        } else {
            self.lower[leaving]
        };
        let entering_old = self.bound_value(entering);
        let step = (self.val[r] - leave_value) / p;

        let inv = 1.0 / p;
        let mut row_r: Vec<f64> = self.t[r * cols..(r + 1) * cols]
            .iter()
            .map(|x| x * inv)
            .collect();
        // Column c of the pivot row becomes 1 for the axpy; fixed after.
        row_r[c] = 1.0;
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * cols + c];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * cols..(i + 1) * cols];
            for (x, y) in row.iter_mut().zip(&row_r) {
                *x -= f * y;
            }
            row[c] = -f * inv;
            self.val[i] -= f * step;
        }
        row_r[c] = inv;
        self.t[r * cols..(r + 1) * cols].copy_from_slice(&row_r);
        self.val[r] = entering_old + step;
        let f = self.red[c];
        if f != 0.0 {
            for (x, y) in self.red.iter_mut().zip(&row_r) {
                *x -= f * y;
            }
            self.red[c] = -f * inv;
        }
        self.row_var[r] = entering;
        self.col_var[c] = leaving;
        self.status[entering] = FloatStatus::Basic(r);
        self.status[leaving] = if to_upper {
            FloatStatus::AtUpper(c)
        } else {
            FloatStatus::AtLower(c)
        };
        self.pivots += 1;
    }

    /// Dual simplex from a dual feasible basis.
    pub(crate) fn dual_simplex(&mut self, max_pivots: u64) -> FloatOutcome {
        let start = self.pivots;
        loop {
            if self.pivots - start > max_pivots {
                return FloatOutcome::Failed;
            }
            let mut leave: Option<(usize, f64, bool)> = None;
            for i in 0..self.rows {
                let v = self.row_var[i];
                let x = self.val[i];
                let (viol, below) = if x < self.lower[v] - tol(self.lower[v]) {
                    (self.lower[v] - x, true)
                } else if x > self.upper[v] + tol(self.upper[v]) {
                    (x - self.upper[v], false)
                } else {
                    continue;
                };
                if leave.is_none_or(|(_, best, _)| viol > best) {
                    leave = Some((i, viol, below));
                }
            }
            let Some((r, _, below)) = leave else {
                return FloatOutcome::Optimal;
            };
            // Textbook ratio test, preferring larger pivots among near-ties.
            let mut enter: Option<(usize, f64, f64)> = None;
            for c in 0..self.cols {
                let a = self.t[r * self.cols + c];
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                let v = self.col_var[c];
                let ok = match self.status[v] {
                    FloatStatus::AtLower(_) => {
                        self.upper[v] > self.lower[v] && ((a < 0.0) == below)
                    }
                    FloatStatus::AtUpper(_) => (a > 0.0) == below,
                    FloatStatus::Basic(_) => false,
                };
                if !ok {
                    continue;
                }
                let ratio = self.red[c].abs() / a.abs();
                let better = match enter {
                    None => true,
                    Some((_, br, ba)) => {
                        ratio < br - 1e-12 || (ratio <= br + 1e-12 && a.abs() > ba)
                    }
                };
                if better {
                    enter = Some((c, ratio, a.abs()));
                }
            }
            let Some((c, _, _)) = enter else {
                return FloatOutcome::Infeasible;
            };
            self.pivot(r, c, !below);
            if !self.val[r].is_finite() {
                return FloatOutcome::Failed;
            }
        }
    }

    /// Fractional structural variable with the highest `priority`, then
    /// farthest from an integer, then lowest index.
    pub(crate) fn branch_candidate(&self, priority: &[u64], int_tol: f64) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for v in 0..self.structural {
            let x = self.value(v);
            let d = (x - x.round()).abs();
            if d <= int_tol {
                continue;
            }
            let better = best.is_none_or(|(b, bd)| {
                priority[v] > priority[b] || (priority[v] == priority[b] && d > bd)
            });
            if better {
                best = Some((v, d));
            }
        }
        best.map(|(v, _)| (v, self.value(v)))
    }
}
