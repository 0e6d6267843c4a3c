//! Primal bounded-variable simplex on a dense tableau.
//!
//! Two phases with one artificial variable per row. Nonbasic variables sit at
//! one of their bounds, so box constraints never become rows. Pivoting follows
//! Bland's rule (smallest eligible index for both the entering and leaving
//! choice), which makes the solver deterministic and cycle-free at the price
//! of speed.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

/// Largest supported number of tableau columns (structural + slack).
pub const MAX_DENSE_COLUMNS: usize = 4_000;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `maximize objective . x` subject to row constraints and finite box bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// `objective . x`; meaningful only when optimal.
    pub objective: f64,
    pub x: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("variable {0} has invalid or non-finite bounds")]
    InvalidBounds(usize),
    #[error("non-finite coefficient in {0}")]
    NonFinite(&'static str),
    #[error("problem has {0} columns, above the dense tableau cap")]
    TooLarge(usize),
    #[error("iteration limit reached after {0} pivots")]
    IterationLimit(usize),
}

impl LpProblem {
    pub fn maximize(objective: Vec<f64>, bounds: Vec<(f64, f64)>) -> Self {
        LpProblem { objective, constraints: Vec::new(), bounds }
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) {
        self.constraints.push(Constraint { coeffs, sense, rhs });
    }

    pub fn with_constraint(mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) -> Self {
        self.add_constraint(coeffs, sense, rhs);
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(LpError::DimensionMismatch("bounds length differs from objective length"));
        }
        if self.constraints.iter().any(|c| c.coeffs.len() != n) {
            return Err(LpError::DimensionMismatch("constraint row length differs from objective length"));
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite("objective"));
        }
        if self.constraints.iter().any(|c| !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite())) {
            return Err(LpError::NonFinite("constraints"));
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(LpError::InvalidBounds(j));
            }
        }
        Ok(())
    }

    /// Largest violation of any row or bound by `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
            let v = match c.sense {
                Sense::Le => lhs - c.rhs,
                Sense::Ge => c.rhs - lhs,
                Sense::Eq => libm::fabs(lhs - c.rhs),
            };
            worst = worst.max(v);
        }
        for (&(lo, hi), &v) in self.bounds.iter().zip(x) {
            worst = worst.max(lo - v).max(v - hi);
        }
        worst
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

struct Tableau {
    m: usize,
    cols: usize,
    art_start: usize,
    t: Vec<f64>,
    scaled_rhs: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    iterations: usize,
    limit: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn build(p: &LpProblem) -> Tableau {
        let n = p.num_vars();
        let m = p.constraints.len();
        let slack_count = p.constraints.iter().filter(|c| c.sense != Sense::Eq).count();
        let art_start = n + slack_count;
        let cols = art_start + m;

        let mut lo = Vec::with_capacity(cols);
        let mut hi = Vec::with_capacity(cols);
        let mut x = Vec::with_capacity(cols);
        for &(l, h) in &p.bounds {
            lo.push(l);
            hi.push(h);
            x.push(if libm::fabs(h) < libm::fabs(l) { h } else { l });
        }
        for _ in 0..slack_count {
            lo.push(0.0);
            hi.push(f64::INFINITY);
            x.push(0.0);
        }

        // rows of [A | slack] before scaling
        let mut t = vec![0.0; m * cols];
        let mut slack = n;
        for (i, c) in p.constraints.iter().enumerate() {
            let row = &mut t[i * cols..(i + 1) * cols];
            row[..n].copy_from_slice(&c.coeffs);
            match c.sense {
                Sense::Le => {
                    row[slack] = 1.0;
                    slack += 1;
                }
                Sense::Ge => {
                    row[slack] = -1.0;
                    slack += 1;
                }
                Sense::Eq => {}
            }
        }

        // artificial a_i with sign chosen so that a_i = |residual| >= 0
        let mut scaled_rhs = vec![0.0; m];
        for (i, c) in p.constraints.iter().enumerate() {
            let row = &mut t[i * cols..(i + 1) * cols];
            let lhs: f64 = row[..art_start].iter().zip(&x).map(|(a, b)| a * b).sum();
            let residual = c.rhs - lhs;
            let sign = if residual < 0.0 { -1.0 } else { 1.0 };
            for v in row[..art_start].iter_mut() {
                *v *= sign;
            }
            row[art_start + i] = 1.0;
            scaled_rhs[i] = sign * c.rhs;
        }
        for i in 0..m {
            lo.push(0.0);
            hi.push(f64::INFINITY);
            let row = &t[i * cols..(i + 1) * cols];
            let lhs: f64 = row[..art_start].iter().zip(&x).map(|(a, b)| a * b).sum();
            x.push(scaled_rhs[i] - lhs);
        }

        let mut is_basic = vec![false; cols];
        let basis: Vec<usize> = (0..m).map(|i| art_start + i).collect();
        for &b in &basis {
            is_basic[b] = true;
        }
        Tableau {
            m,
            cols,
            art_start,
            t,
            scaled_rhs,
            basis,
            is_basic,
            lo,
            hi,
            x,
            iterations: 0,
            limit: 100_000 + 50 * (m + cols),
        }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.cols + j]
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let cols = self.cols;
        let piv = self.at(r, j);
        for v in &mut self.t[r * cols..(r + 1) * cols] {
            *v /= piv;
        }
        let (before, rest) = self.t.split_at_mut(r * cols);
        let (prow, after) = rest.split_at_mut(cols);
        for row in before.chunks_exact_mut(cols).chain(after.chunks_exact_mut(cols)) {
            let f = row[j];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
                row[j] = 0.0;
            }
        }
        let leaving = self.basis[r];
        self.is_basic[leaving] = false;
        self.is_basic[j] = true;
        self.basis[r] = j;
    }

    fn optimize(&mut self, cost: &[f64]) -> Result<PhaseEnd, LpError> {
        loop {
            if self.iterations >= self.limit {
                return Err(LpError::IterationLimit(self.iterations));
            }
            let Some((j, dir)) = self.entering(cost) else {
                return Ok(PhaseEnd::Optimal);
            };

            // ratio test; ties go to the smallest variable index
            let mut theta = self.hi[j] - self.lo[j];
            let mut leave: Option<usize> = None;
            let mut leave_var = j;
            for i in 0..self.m {
                let alpha = dir * self.at(i, j);
                let b = self.basis[i];
                let limit = if alpha > PIVOT_TOL {
                    (self.x[b] - self.lo[b]) / alpha
                } else if alpha < -PIVOT_TOL && self.hi[b].is_finite() {
                    (self.hi[b] - self.x[b]) / -alpha
                } else {
                    continue;
                };
                let limit = limit.max(0.0);
                if limit < theta - TIE_TOL || (limit <= theta + TIE_TOL && b < leave_var) {
                    theta = limit;
                    leave = Some(i);
                    leave_var = b;
                }
            }
            if !theta.is_finite() {
                return Ok(PhaseEnd::Unbounded);
            }

            for i in 0..self.m {
                let b = self.basis[i];
                self.x[b] -= theta * dir * self.at(i, j);
            }
            self.x[j] += theta * dir;
            match leave {
                None => {
                    self.x[j] = if dir > 0.0 { self.hi[j] } else { self.lo[j] };
                }
                Some(r) => {
                    let b = self.basis[r];
                    self.x[b] = if dir * self.at(r, j) > 0.0 { self.lo[b] } else { self.hi[b] };
                    self.pivot(r, j);
                }
            }
            self.iterations += 1;
        }
    }

    /// Smallest-index nonbasic column whose reduced cost improves the
    /// objective in a direction its bounds allow.
    fn entering(&self, cost: &[f64]) -> Option<(usize, f64)> {
        for j in 0..self.cols {
            if self.is_basic[j] {
                continue;
            }
            let mut d = cost[j];
            for i in 0..self.m {
                let a = self.at(i, j);
                if a != 0.0 {
                    d -= cost[self.basis[i]] * a;
                }
            }
            if d > COST_TOL && self.x[j] < self.hi[j] - TIE_TOL {
                return Some((j, 1.0));
            }
            if d < -COST_TOL && self.x[j] > self.lo[j] + TIE_TOL {
                return Some((j, -1.0));
            }
        }
        None
    }

    fn artificial_sum(&self) -> f64 {
        self.x[self.art_start..].iter().sum()
    }

    /// Pivots zero-valued artificials out of the basis where possible and
    /// pins every artificial to zero.
    fn retire_artificials(&mut self) {
        for r in 0..self.m {
            if self.basis[r] < self.art_start {
                continue;
            }
            let candidate = (0..self.art_start)
                .find(|&j| !self.is_basic[j] && libm::fabs(self.at(r, j)) > PIVOT_TOL);
            if let Some(j) = candidate {
                let b = self.basis[r];
                self.x[b] = 0.0;
                self.pivot(r, j);
            }
        }
        for j in self.art_start..self.cols {
            self.hi[j] = 0.0;
            if !self.is_basic[j] {
                self.x[j] = 0.0;
            }
        }
    }

    /// Recomputes basic values from the nonbasic ones to shed pivoting drift.
    fn refresh_basics(&mut self) {
        for i in 0..self.m {
            let mut v = 0.0;
            for k in 0..self.m {
                v += self.at(i, self.art_start + k) * self.scaled_rhs[k];
            }
            for j in 0..self.cols {
                if !self.is_basic[j] && self.x[j] != 0.0 {
                    v -= self.at(i, j) * self.x[j];
                }
            }
            let b = self.basis[i];
            self.x[b] = v;
        }
    }
}

/// Solves `p`. Deterministic: identical input gives bit-identical output.
pub fn solve(p: &LpProblem) -> Result<LpSolution, LpError> {
    p.validate()?;
    let n = p.num_vars();
    let mut tab = Tableau::build(p);
    if tab.cols - tab.m > MAX_DENSE_COLUMNS {
        return Err(LpError::TooLarge(tab.cols - tab.m));
    }

    let scale = 1.0
        + p.constraints.iter().map(|c| libm::fabs(c.rhs)).fold(0.0, f64::max)
        + p.bounds.iter().map(|&(l, h)| libm::fabs(l).max(libm::fabs(h))).fold(0.0, f64::max);

    let mut phase1 = vec![0.0; tab.cols];
    for c in &mut phase1[tab.art_start..] {
        *c = -1.0;
    }
    tab.optimize(&phase1)?;
    tab.refresh_basics();
    if tab.artificial_sum() > 1e-9 * scale {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            objective: f64::NAN,
            x: tab.x[..n].to_vec(),
            iterations: tab.iterations,
        });
    }
    tab.retire_artificials();

    let mut phase2 = vec![0.0; tab.cols];
    phase2[..n].copy_from_slice(&p.objective);
    let end = tab.optimize(&phase2)?;
    tab.refresh_basics();
    let x = tab.x[..n].to_vec();
    let status = match end {
        PhaseEnd::Optimal => LpStatus::Optimal,
        PhaseEnd::Unbounded => LpStatus::Unbounded,
    };
    Ok(LpSolution { status, objective: p.objective_value(&x), x, iterations: tab.iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        libm::fabs(a - b) < 1e-9
    }

    #[test]
    fn single_variable_upper_row() {
        let p = LpProblem::maximize(vec![1.0], vec![(0.0, 2.0)]).with_constraint(vec![1.0], Sense::Le, 1.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(close(s.x[0], 1.0));
    }

    #[test]
    fn two_variables_sum_bound() {
        let p = LpProblem::maximize(vec![1.0, 1.0], vec![(0.0, 1.0), (0.0, 1.0)])
            .with_constraint(vec![1.0, 1.0], Sense::Le, 1.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(close(s.objective, 1.0));
    }

    #[test]
    fn box_only_goes_to_bounds() {
        let p = LpProblem::maximize(vec![2.0, -3.0], vec![(-1.0, 4.0), (-2.0, 5.0)]);
        let s = solve(&p).unwrap();
        assert_eq!(s.x, vec![4.0, -2.0]);
        assert!(close(s.objective, 14.0));
    }

    #[test]
    fn equality_and_ge_rows() {
        // max x + 2y, x + y = 3, x - y >= 1, x,y in [0, 10]  ->  x = 2, y = 1
        let p = LpProblem::maximize(vec![1.0, 2.0], vec![(0.0, 10.0), (0.0, 10.0)])
            .with_constraint(vec![1.0, 1.0], Sense::Eq, 3.0)
            .with_constraint(vec![1.0, -1.0], Sense::Ge, 1.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(close(s.x[0], 2.0) && close(s.x[1], 1.0));
        assert!(p.max_violation(&s.x) < 1e-9);
    }

    #[test]
    fn infeasible_is_reported() {
        let p = LpProblem::maximize(vec![1.0], vec![(0.0, 1.0)]).with_constraint(vec![1.0], Sense::Ge, 2.0);
        assert_eq!(solve(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        let p = LpProblem::maximize(vec![1.0, 1.0], vec![(0.0, 5.0), (0.0, 5.0)])
            .with_constraint(vec![1.0, 1.0], Sense::Eq, 4.0)
            .with_constraint(vec![2.0, 2.0], Sense::Eq, 8.0)
            .with_constraint(vec![1.0, 0.0], Sense::Le, 1.0);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(close(s.objective, 4.0));
        assert!(p.max_violation(&s.x) < 1e-9);
    }

    #[test]
    fn degenerate_vertex_terminates() {
        // many constraints through the origin
        let mut p = LpProblem::maximize(vec![1.0, 1.0, 1.0], vec![(0.0, 1.0); 3]);
        for k in 1..8 {
            let k = k as f64;
            p.add_constraint(vec![k, -1.0, 1.0 - k], Sense::Le, 0.0);
            p.add_constraint(vec![-1.0, k, -k], Sense::Le, 0.0);
        }
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(p.max_violation(&s.x) < 1e-9);
    }

    #[test]
    fn dimension_and_bound_errors() {
        let p = LpProblem::maximize(vec![1.0, 1.0], vec![(0.0, 1.0)]);
        assert!(matches!(solve(&p), Err(LpError::DimensionMismatch(_))));
        let p = LpProblem::maximize(vec![1.0], vec![(0.0, f64::INFINITY)]);
        assert_eq!(solve(&p), Err(LpError::InvalidBounds(0)));
        let p = LpProblem::maximize(vec![1.0], vec![(1.0, 0.0)]);
        assert_eq!(solve(&p), Err(LpError::InvalidBounds(0)));
        let p = LpProblem::maximize(vec![1.0], vec![(0.0, 1.0)]).with_constraint(vec![1.0, 2.0], Sense::Le, 1.0);
        assert!(matches!(solve(&p), Err(LpError::DimensionMismatch(_))));
    }

    #[test]
    fn repeated_solves_are_bit_identical() {
        let p = LpProblem::maximize(vec![3.0, 1.0, 2.0, -1.0], vec![(-1.0, 1.0); 4])
            .with_constraint(vec![1.0; 4], Sense::Eq, 0.0)
            .with_constraint(vec![0.5, 2.0, 1.25, 0.75], Sense::Le, -0.001);
        let a = solve(&p).unwrap();
        let b = solve(&p).unwrap();
        assert_eq!(a, b);
    }
}
