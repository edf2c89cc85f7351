//! Revised simplex for covering-type LPs with many rows and few variables.
//!
//! The primal problem is
//!
//! ```text
//! min c·x   s.t.  a_i·x >= b_i (i in rows),   lo <= x <= hi
//! ```
//!
//! After shifting `x = lo + x'` we run the primal simplex on its dual
//!
//! ```text
//! max Σ b'_i y_i - Σ (hi_j - lo_j) t_j
//! s.t. Σ_i y_i a_i - t + s = c,   y, t, s >= 0
//! ```
//!
//! whose basis has one row per primal variable. The simplex multipliers of an
//! optimal dual basis are a basic optimal primal solution, so the returned
//! point is a vertex of the primal polyhedron. Rows can be appended between
//! solves; they enter the dual as new nonbasic columns, which keeps the
//! current basis feasible (warm start).
//!
//! The basis inverse is kept explicitly and updated in product form, with a
//! fresh Gauss–Jordan factorisation every [`REFACTOR_INTERVAL`] pivots.
//! Pricing is Dantzig's rule with a Harris ratio test; after
//! [`DEGENERATE_LIMIT`] consecutive degenerate pivots the solver switches to
//! Bland's rule until the objective moves again.

use thiserror::Error;

const REFACTOR_INTERVAL: usize = 120;
const DEGENERATE_LIMIT: usize = 60;
const PRICE_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimplexError {
    #[error("variable {0} has negative cost and no upper bound")]
    UnboundedBelow(usize),
    #[error("basis matrix became singular")]
    Singular,
    #[error("row references variable {var} but the problem has {n}")]
    BadIndex { var: usize, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Optimal,
    Infeasible,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct SparseRow {
    pub idx: Vec<u32>,
    pub val: Vec<f64>,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Lower(usize),
    Upper(usize),
    Row(usize),
}

#[derive(Debug, Clone)]
struct Column {
    idx: Vec<u32>,
    val: Vec<f64>,
    obj: f64,
    kind: Kind,
}

const NONBASIC: usize = usize::MAX;

pub struct DualSimplex {
    m: usize,
    cost: Vec<f64>,
    lo: Vec<f64>,
    cols: Vec<Column>,
    rows: usize,
    basis: Vec<usize>,
    pos: Vec<usize>,
    binv: Vec<f64>,
    beta: Vec<f64>,
    pi: Vec<f64>,
    since_refactor: usize,
    pub iterations: usize,
}

impl DualSimplex {
    pub fn new(cost: &[f64], lo: &[f64], hi: &[f64]) -> Result<Self, SimplexError> {
        let m = cost.len();
        assert!(lo.len() == m && hi.len() == m);
        let mut cols = Vec::with_capacity(2 * m);
        let mut basis = vec![0; m];
        for j in 0..m {
            cols.push(Column { idx: vec![j as u32], val: vec![1.0], obj: 0.0, kind: Kind::Lower(j) });
        }
        for j in 0..m {
            if hi[j].is_finite() {
                cols.push(Column {
                    idx: vec![j as u32],
                    val: vec![-1.0],
                    obj: -(hi[j] - lo[j]),
                    kind: Kind::Upper(j),
                });
            }
        }
        let mut upper_col = vec![NONBASIC; m];
        for (k, c) in cols.iter().enumerate() {
            if let Kind::Upper(j) = c.kind {
                upper_col[j] = k;
            }
        }
        let mut binv = vec![0.0; m * m];
        let mut beta = vec![0.0; m];
        for j in 0..m {
            if cost[j] >= 0.0 {
                basis[j] = j;
                binv[j * m + j] = 1.0;
                beta[j] = cost[j];
            } else if upper_col[j] != NONBASIC {
                basis[j] = upper_col[j];
                binv[j * m + j] = -1.0;
                beta[j] = -cost[j];
            } else {
                return Err(SimplexError::UnboundedBelow(j));
            }
        }
        let mut pos = vec![NONBASIC; cols.len()];
        for (r, &c) in basis.iter().enumerate() {
            pos[c] = r;
        }
        let mut s = DualSimplex {
            m,
            cost: cost.to_vec(),
            lo: lo.to_vec(),
            cols,
            rows: 0,
            basis,
            pos,
            binv,
            beta,
            pi: vec![0.0; m],
            since_refactor: 0,
            iterations: 0,
        };
        s.recompute_pi();
        Ok(s)
    }

    pub fn add_rows(&mut self, rows: impl IntoIterator<Item = SparseRow>) -> Result<(), SimplexError> {
        for row in rows {
            let mut shift = 0.0;
            for (&j, &v) in row.idx.iter().zip(&row.val) {
                let j = j as usize;
                if j >= self.m {
                    return Err(SimplexError::BadIndex { var: j, n: self.m });
                }
                shift += v * self.lo[j];
            }
            self.cols.push(Column {
                idx: row.idx,
                val: row.val,
                obj: row.rhs - shift,
                kind: Kind::Row(self.rows),
            });
            self.pos.push(NONBASIC);
            self.rows += 1;
        }
        Ok(())
    }

    /// Current primal point (simplex multipliers shifted back by `lo`).
    pub fn primal(&self) -> Vec<f64> {
        self.pi.iter().zip(&self.lo).map(|(p, l)| p + l).collect()
    }

    fn recompute_pi(&mut self) {
        let m = self.m;
        self.pi.iter_mut().for_each(|p| *p = 0.0);
        for r in 0..m {
            let o = self.cols[self.basis[r]].obj;
            if o != 0.0 {
                let row = &self.binv[r * m..(r + 1) * m];
                for (p, b) in self.pi.iter_mut().zip(row) {
                    *p += o * b;
                }
            }
        }
    }

    fn refactor(&mut self) -> Result<(), SimplexError> {
        let m = self.m;
        // Gauss-Jordan on [B | I]
        let mut a = vec![0.0; m * m];
        for (r, &c) in self.basis.iter().enumerate() {
            let col = &self.cols[c];
            for (&i, &v) in col.idx.iter().zip(&col.val) {
                a[i as usize * m + r] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        let mut perm: Vec<usize> = (0..m).collect();
        for k in 0..m {
            let mut piv = k;
            let mut best = a[perm[k] * m + k].abs();
            for (i, &pi) in perm.iter().enumerate().skip(k + 1) {
                let v = a[pi * m + k].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best < 1e-11 {
                return Err(SimplexError::Singular);
            }
            perm.swap(k, piv);
            let pr = perm[k];
            let d = a[pr * m + k];
            for j in 0..m {
                a[pr * m + j] /= d;
                inv[pr * m + j] /= d;
            }
            for &i in &perm {
                if i == pr {
                    continue;
                }
                let f = a[i * m + k];
                if f == 0.0 {
                    continue;
                }
                for j in k..m {
                    a[i * m + j] -= f * a[pr * m + j];
                }
                for j in 0..m {
                    inv[i * m + j] -= f * inv[pr * m + j];
                }
            }
        }
        // row perm[k] of `inv` now holds row k of B^{-1}
        for k in 0..m {
            let src = perm[k];
            self.binv[k * m..(k + 1) * m].copy_from_slice(&inv[src * m..(src + 1) * m]);
        }
        for r in 0..m {
            let row = &self.binv[r * m..(r + 1) * m];
            let v: f64 = row.iter().zip(&self.cost).map(|(b, c)| b * c).sum();
            self.beta[r] = if v.abs() < 1e-12 { 0.0 } else { v };
        }
        self.recompute_pi();
        self.since_refactor = 0;
        Ok(())
    }

    fn reduced_cost(&self, c: &Column) -> f64 {
        let mut d = c.obj;
        for (&i, &v) in c.idx.iter().zip(&c.val) {
            d -= self.pi[i as usize] * v;
        }
        d
    }

    fn price(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (k, c) in self.cols.iter().enumerate() {
            if self.pos[k] != NONBASIC {
                continue;
            }
            let d = self.reduced_cost(c);
            if d > PRICE_TOL {
                if bland {
                    return Some((k, d));
                }
                if best.is_none_or(|(_, bd)| d > bd) {
                    best = Some((k, d));
                }
            }
        }
        best
    }

    fn ftran(&self, q: usize) -> Vec<f64> {
        let m = self.m;
        let col = &self.cols[q];
        let mut alpha = vec![0.0; m];
        for (&i, &v) in col.idx.iter().zip(&col.val) {
            let i = i as usize;
            for (r, a) in alpha.iter_mut().enumerate() {
                *a += self.binv[r * m + i] * v;
            }
        }
        alpha
    }

    fn ratio_test(&self, alpha: &[f64], bland: bool) -> Option<usize> {
        if bland {
            let mut best: Option<(usize, f64)> = None;
            for (r, &a) in alpha.iter().enumerate() {
                if a > PIVOT_TOL {
                    let theta = self.beta[r].max(0.0) / a;
                    let better = match best {
                        None => true,
                        Some((br, bt)) => {
                            theta < bt - 1e-12
                                || (theta <= bt + 1e-12 && self.basis[r] < self.basis[br])
                        }
                    };
                    if better {
                        best = Some((r, theta));
                    }
                }
            }
            return best.map(|(r, _)| r);
        }
        // Harris two-pass
        let mut bound = f64::INFINITY;
        for (r, &a) in alpha.iter().enumerate() {
            if a > PIVOT_TOL {
                bound = bound.min((self.beta[r].max(0.0) + FEAS_TOL) / a);
            }
        }
        if !bound.is_finite() {
            return None;
        }
        let mut best: Option<(usize, f64)> = None;
        for (r, &a) in alpha.iter().enumerate() {
            if a > PIVOT_TOL && self.beta[r].max(0.0) / a <= bound && best.is_none_or(|(_, ba)| a > ba) {
                best = Some((r, a));
            }
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[f64], dq: f64) {
        let m = self.m;
        let ar = alpha[r];
        {
            let row = &mut self.binv[r * m..(r + 1) * m];
            row.iter_mut().for_each(|v| *v /= ar);
        }
        let pivot_row: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
        for (k, &ak) in alpha.iter().enumerate() {
            if k == r || ak == 0.0 {
                continue;
            }
            let row = &mut self.binv[k * m..(k + 1) * m];
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= ak * p;
            }
        }
        let theta = self.beta[r].max(0.0) / ar;
        for (k, &ak) in alpha.iter().enumerate() {
            if k != r {
                self.beta[k] -= ak * theta;
                if self.beta[k] < 0.0 && self.beta[k] > -FEAS_TOL {
                    self.beta[k] = 0.0;
                }
            }
        }
        self.beta[r] = theta;
        for (p, v) in self.pi.iter_mut().zip(&pivot_row) {
            *p += dq * v;
        }
        let leaving = self.basis[r];
        self.pos[leaving] = NONBASIC;
        self.basis[r] = q;
        self.pos[q] = r;
        self.since_refactor += 1;
        self.iterations += 1;
    }

    /// Runs until optimality, infeasibility of the primal (unbounded dual)
    /// or the iteration budget is spent.
    pub fn solve(&mut self, max_iterations: usize) -> Result<Outcome, SimplexError> {
        let mut bland = false;
        let mut degenerate = 0usize;
        let mut fresh = self.since_refactor == 0;
        let budget_end = self.iterations.saturating_add(max_iterations);
        loop {
            if self.iterations >= budget_end {
                return Ok(Outcome::IterationLimit);
            }
            if self.since_refactor >= REFACTOR_INTERVAL {
                self.refactor()?;
                fresh = true;
            }
            let Some((q, dq)) = self.price(bland) else {
                if fresh {
                    return Ok(Outcome::Optimal);
                }
                self.refactor()?;
                fresh = true;
                continue;
            };
            let alpha = self.ftran(q);
            let Some(r) = self.ratio_test(&alpha, bland) else {
                if fresh {
                    return Ok(Outcome::Infeasible);
                }
                self.refactor()?;
                fresh = true;
                continue;
            };
            let step = self.beta[r].max(0.0) / alpha[r];
            if step * dq <= 1e-12 {
                degenerate += 1;
                if degenerate > DEGENERATE_LIMIT {
                    bland = true;
                }
            } else {
                degenerate = 0;
                bland = false;
            }
            self.pivot(r, q, &alpha, dq);
            fresh = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(idx: &[u32], val: &[f64], rhs: f64) -> SparseRow {
        SparseRow { idx: idx.to_vec(), val: val.to_vec(), rhs }
    }

    #[test]
    fn no_rows_sits_at_lower_bounds() {
        let mut s = DualSimplex::new(&[1.0, 2.0], &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(s.solve(100).unwrap(), Outcome::Optimal);
        assert_eq!(s.primal(), vec![0.0, 0.0]);
    }

    #[test]
    fn small_covering_lp() {
        // min x0 + x1 + x2, x0+x1 >= 1, x1+x2 >= 1, x0+x2 >= 1 -> 3/2
        let mut s = DualSimplex::new(&[1.0; 3], &[0.0; 3], &[1.0; 3]).unwrap();
        s.add_rows([
            row(&[0, 1], &[1.0, 1.0], 1.0),
            row(&[1, 2], &[1.0, 1.0], 1.0),
            row(&[0, 2], &[1.0, 1.0], 1.0),
        ])
        .unwrap();
        assert_eq!(s.solve(100).unwrap(), Outcome::Optimal);
        let x = s.primal();
        let obj: f64 = x.iter().sum();
        assert!((obj - 1.5).abs() < 1e-9, "{x:?}");
    }

    #[test]
    fn negative_cost_uses_upper_bound() {
        // min -x0 + x1, x1 - x0 >= -0.5, x in [0,1]^2 -> value -1/2
        let mut s = DualSimplex::new(&[-1.0, 1.0], &[0.0; 2], &[1.0; 2]).unwrap();
        s.add_rows([row(&[0, 1], &[-1.0, 1.0], -0.5)]).unwrap();
        assert_eq!(s.solve(100).unwrap(), Outcome::Optimal);
        let x = s.primal();
        assert!((x[1] - x[0] + 0.5).abs() < 1e-9 && x[0] >= 0.5 - 1e-9, "{x:?}");
    }

    #[test]
    fn detects_infeasibility() {
        let mut s = DualSimplex::new(&[1.0], &[0.0], &[1.0]).unwrap();
        s.add_rows([row(&[0], &[1.0], 2.0)]).unwrap();
        assert_eq!(s.solve(100).unwrap(), Outcome::Infeasible);
    }

    #[test]
    fn shifted_lower_bounds() {
        // min x0 + x1, x0 + x1 >= 3, x0 in [1, 2], x1 in [0.5, 5] -> 3
        let mut s = DualSimplex::new(&[1.0, 1.0], &[1.0, 0.5], &[2.0, 5.0]).unwrap();
        s.add_rows([row(&[0, 1], &[1.0, 1.0], 3.0)]).unwrap();
        assert_eq!(s.solve(100).unwrap(), Outcome::Optimal);
        let x = s.primal();
        assert!((x[0] + x[1] - 3.0).abs() < 1e-9 && x[0] >= 1.0 - 1e-9 && x[1] >= 0.5 - 1e-9);
    }

    #[test]
    fn unbounded_negative_cost_rejected() {
        assert_eq!(
            DualSimplex::new(&[-1.0], &[0.0], &[f64::INFINITY]).err(),
            Some(SimplexError::UnboundedBelow(0))
        );
    }

    #[test]
    fn warm_start_after_adding_rows() {
        let mut s = DualSimplex::new(&[1.0; 3], &[0.0; 3], &[1.0; 3]).unwrap();
        s.add_rows([row(&[0, 1, 2], &[1.0, 1.0, 1.0], 1.0)]).unwrap();
        s.solve(100).unwrap();
        let before = s.iterations;
        s.add_rows([row(&[0], &[1.0], 0.5), row(&[1], &[1.0], 0.5)]).unwrap();
        assert_eq!(s.solve(100).unwrap(), Outcome::Optimal);
        let x = s.primal();
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-9, "{x:?}");
        assert!(s.iterations > before);
    }
}
