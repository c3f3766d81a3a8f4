//! Dense bounded-variable dual simplex for `min c^T x` subject to
//! `A x (<= | =) b` and box bounds on the structural variables.
//!
//! Every row gets a logical variable (`[0, inf)` for `<=`, `[0, 0]` for
//! `=`). Structural variables start nonbasic at whichever bound makes
//! their cost nonnegative to move away from, so the all-logical basis is
//! dual feasible and no first phase is needed. Bound changes keep dual
//! feasibility, which is what branch-and-bound relies on for warm starts.

pub(crate) const FEAS_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RowKind {
    Le,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub(crate) struct DualSimplex {
    n_struct: usize,
    rows: usize,
    width: usize,
    /// `B^-1 [A | I]`, row-major.
    tab: Vec<f64>,
    /// `B^-1 b`
    rhs: Vec<f64>,
    /// reduced costs
    d: Vec<f64>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    basic_row: Vec<Option<usize>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    at_upper: Vec<bool>,
    x: Vec<f64>,
    pub(crate) iterations: usize,
}

impl DualSimplex {
    /// Box `[0, 1]` on every structural variable.
    pub(crate) fn new(cost: &[f64], rows: &[(Vec<f64>, RowKind, f64)]) -> Self {
        let n_struct = cost.len();
        let n_rows = rows.len();
        let width = n_struct + n_rows;
        let mut tab = vec![0.0; n_rows * width];
        let mut rhs = Vec::with_capacity(n_rows);
        let mut lower = vec![0.0; width];
        let mut upper = vec![1.0; width];
        for (r, (a, kind, b)) in rows.iter().enumerate() {
            debug_assert_eq!(a.len(), n_struct);
            tab[r * width..r * width + n_struct].copy_from_slice(a);
            tab[r * width + n_struct + r] = 1.0;
            rhs.push(*b);
            lower[n_struct + r] = 0.0;
            upper[n_struct + r] = match kind {
                RowKind::Le => f64::INFINITY,
                RowKind::Eq => 0.0,
            };
        }
        let mut d = vec![0.0; width];
        d[..n_struct].copy_from_slice(cost);
        let at_upper: Vec<bool> = (0..width).map(|j| j < n_struct && cost[j] < 0.0).collect();
        let x = (0..width).map(|j| if at_upper[j] { 1.0 } else { 0.0 }).collect();
        let mut basic_row = vec![None; width];
        for r in 0..n_rows {
            basic_row[n_struct + r] = Some(r);
        }
        let mut lp = Self {
            n_struct,
            rows: n_rows,
            width,
            tab,
            rhs,
            d,
            cost: cost.to_vec(),
            basis: (n_struct..width).collect(),
            basic_row,
            lower,
            upper,
            at_upper,
            x,
            iterations: 0,
        };
        lp.recompute_basic();
        lp
    }

    fn recompute_basic(&mut self) {
        let nonzero: Vec<usize> = (0..self.width)
            .filter(|&j| self.basic_row[j].is_none() && self.x[j] != 0.0)
            .collect();
        for r in 0..self.rows {
            let row = &self.tab[r * self.width..(r + 1) * self.width];
            let v = nonzero.iter().fold(self.rhs[r], |acc, &j| acc - row[j] * self.x[j]);
            self.x[self.basis[r]] = v;
        }
    }

    /// Fixes or narrows the box of structural variable `j`.
    pub(crate) fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        self.lower[j] = lo;
        self.upper[j] = hi;
        if self.basic_row[j].is_none() {
            let v = if self.at_upper[j] { hi } else { lo };
            self.x[j] = v;
            self.at_upper[j] = hi > lo && v == hi;
            self.recompute_basic();
        }
    }

    pub(crate) fn values(&self) -> &[f64] {
        &self.x[..self.n_struct]
    }

    pub(crate) fn objective(&self) -> f64 {
        self.cost.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }

    fn leaving_row(&self, bland: bool) -> Option<(usize, bool)> {
        let mut best: Option<(usize, bool, f64)> = None;
        for r in 0..self.rows {
            let var = self.basis[r];
            let v = self.x[var];
            let (viol, increase) = if v < self.lower[var] - FEAS_TOL {
                (self.lower[var] - v, true)
            } else if v > self.upper[var] + FEAS_TOL {
                (v - self.upper[var], false)
            } else {
                continue;
            };
            let better = match best {
                None => true,
                Some((br, _, bv)) => {
                    if bland {
                        var < self.basis[br]
                    } else {
                        viol > bv
                    }
                }
            };
            if better {
                best = Some((r, increase, viol));
            }
        }
        best.map(|(r, inc, _)| (r, inc))
    }

    fn entering_column(&self, r: usize, increase: bool, bland: bool) -> Option<usize> {
        let row = &self.tab[r * self.width..(r + 1) * self.width];
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.width {
            if self.basic_row[j].is_some() || self.upper[j] <= self.lower[j] {
                continue;
            }
            let a = row[j];
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            // x_B = rhs - a x_j: moving x_j up changes x_B by -a
            let up = !self.at_upper[j];
            let eligible = if increase == up { a < 0.0 } else { a > 0.0 };
            if !eligible {
                continue;
            }
            let ratio = self.d[j].abs() / a.abs();
            let better = match best {
                None => true,
                Some((_, br, ba)) => {
                    if ratio < br - 1e-12 {
                        true
                    } else if ratio <= br + 1e-12 {
                        !bland && a.abs() > ba
                    } else {
                        false
                    }
                }
            };
            if better {
                best = Some((j, ratio, a.abs()));
            }
        }
        best.map(|(j, _, _)| j)
    }

    fn pivot(&mut self, r: usize, q: usize, increase: bool) {
        let w = self.width;
        let leaving = self.basis[r];
        let target = if increase { self.lower[leaving] } else { self.upper[leaving] };
        let p = self.tab[r * w + q];
        for j in 0..w {
            self.tab[r * w + j] /= p;
        }
        self.rhs[r] /= p;
        let (head, tail) = self.tab.split_at_mut(r * w);
        let (pivot_row, rest) = tail.split_at_mut(w);
        for (i, row) in head.chunks_mut(w).chain(rest.chunks_mut(w)).enumerate() {
            let i = if i < r { i } else { i + 1 };
            let f = row[q];
            if f != 0.0 {
                for (x, pr) in row.iter_mut().zip(pivot_row.iter()) {
                    *x -= f * pr;
                }
                self.rhs[i] -= f * self.rhs[r];
            }
        }
        let f = self.d[q];
        if f != 0.0 {
            for (x, pr) in self.d.iter_mut().zip(pivot_row.iter()) {
                *x -= f * pr;
            }
        }
        self.d[q] = 0.0;
        self.basis[r] = q;
        self.basic_row[q] = Some(r);
        self.basic_row[leaving] = None;
        self.x[leaving] = target;
        self.at_upper[leaving] = !increase && self.upper[leaving] > self.lower[leaving];
        self.recompute_basic();
    }

    pub(crate) fn solve(&mut self) -> LpStatus {
        let scale = self.rows + self.width;
        let bland_after = 20 * scale;
        let limit = 500 * scale;
        let mut local = 0;
        loop {
            let bland = local >= bland_after;
            let Some((r, increase)) = self.leaving_row(bland) else {
                return LpStatus::Optimal;
            };
            let Some(q) = self.entering_column(r, increase, bland) else {
                return LpStatus::Infeasible;
            };
            self.pivot(r, q, increase);
            self.iterations += 1;
            local += 1;
            if local >= limit {
                return LpStatus::IterationLimit;
            }
        }
    }
}
