//! Search for positively degree-correlated attribute samples with a negative
//! gap.
//!
//! With the sample centred (`sum a = 0`) the sign of `r_{d,a}` is the sign of
//! `sum d_i a_i` and the sign of the gap is the sign of `sum delta_i a_i`. The
//! LP maximizes the first subject to the second being at most `-epsilon`, with
//! every `a_i` in `[-1, 1]`. The box replaces unit-norm scaling (which is not
//! linear); the reported `r_high` is the Pearson correlation of the witness,
//! which is scale-free.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use super::simplex::{solve, LpError, LpProblem, LpStatus, Sense};
use crate::graph::Graph;
use crate::metrics::{self, AttributeSample, MetricsError};

pub const DEFAULT_EPSILON: f64 = 1e-3;

/// Slack ladder used for epsilon sweeps.
pub const EPSILON_LADDER: [f64; 6] = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HighCorrelationError {
    #[error("degenerate graph: {0}")]
    DegenerateGraph(&'static str),
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("no centred sample in the box reaches a gap slack of {0}")]
    InfeasibleAtEpsilon(f64),
    #[error(transparent)]
    Solver(#[from] LpError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HighCorrelationResult {
    /// Pearson correlation between degrees and the witness.
    pub r_high: f64,
    /// Centred sample in `[-1, 1]^n`; isolates are undefined.
    pub witness: AttributeSample<f64>,
    /// Singular gap of the witness (negative).
    pub gap: f64,
    pub epsilon: f64,
    /// LP objective `sum d_i a_i`.
    pub objective: f64,
    pub iterations: usize,
    /// Tangent cuts added by the unit-ball refinement (0 for the plain LP).
    pub cuts: usize,
}

/// Independent recomputation of a witness's properties through the metrics
/// module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessCheck {
    pub mean: f64,
    pub gap: f64,
    pub r: f64,
}

impl HighCorrelationResult {
    pub fn check(&self, g: &Graph) -> Result<WitnessCheck, MetricsError> {
        let active: Vec<f64> = (0..g.node_count())
            .filter_map(|i| self.witness.get(i).copied())
            .collect();
        let mean = active.iter().sum::<f64>() / active.len() as f64;
        let gap = metrics::singular_gap_neighbor_form(g, &self.witness)?;
        let r = metrics::degree_attribute_correlation(g, &self.witness)?
            .value()
            .unwrap_or(f64::NAN);
        Ok(WitnessCheck { mean, gap, r })
    }
}

fn active_nodes(g: &Graph) -> Result<Vec<usize>, HighCorrelationError> {
    let active: Vec<usize> = (0..g.node_count()).filter(|&i| g.degree(i) > 0).collect();
    if active.len() < 2 {
        return Err(HighCorrelationError::DegenerateGraph("fewer than two non-isolated nodes"));
    }
    let d0 = g.degree(active[0]);
    if active.iter().all(|&i| g.degree(i) == d0) {
        return Err(HighCorrelationError::DegenerateGraph("regular graph"));
    }
    Ok(active)
}

/// The LP over the non-isolated nodes of `g` (variable `k` is node
/// `active[k]`): maximize `sum d a` s.t. `sum a = 0`, `sum delta a <= -epsilon`,
/// `a in [-1, 1]`.
pub fn high_correlation_problem(
    g: &Graph,
    epsilon: f64,
) -> Result<(LpProblem, Vec<usize>), HighCorrelationError> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(HighCorrelationError::InvalidEpsilon(epsilon));
    }
    let active = active_nodes(g)?;
    let delta: Vec<f64> = g.delta_ignoring_isolates();
    let k = active.len();
    let objective = active.iter().map(|&i| g.degree(i) as f64).collect();
    let p = LpProblem::maximize(objective, vec![(-1.0, 1.0); k])
        .with_constraint(vec![1.0; k], Sense::Eq, 0.0)
        .with_constraint(active.iter().map(|&i| delta[i]).collect(), Sense::Le, -epsilon);
    Ok((p, active))
}

fn finish(
    g: &Graph,
    active: &[usize],
    x: &[f64],
    epsilon: f64,
    objective: f64,
    iterations: usize,
    cuts: usize,
) -> Result<HighCorrelationResult, HighCorrelationError> {
    let mut values = vec![None; g.node_count()];
    for (&i, &v) in active.iter().zip(x) {
        values[i] = Some(v);
    }
    let witness = AttributeSample::from_options(values);
    let gap = metrics::singular_gap(g, &witness)?;
    let r_high = metrics::degree_attribute_correlation(g, &witness)?
        .value()
        .ok_or(HighCorrelationError::DegenerateGraph("witness is constant"))?;
    Ok(HighCorrelationResult { r_high, witness, gap, epsilon, objective, iterations, cuts })
}

/// Highest SGFP-failing correlation found by the box-normalized LP.
///
/// Isolated nodes carry no weight; the graph need not be connected but its
/// non-isolated part must not be regular. `r_high` is a lower bound on the
/// supremum of failing correlations.
pub fn max_failing_correlation(
    g: &Graph,
    epsilon: f64,
) -> Result<HighCorrelationResult, HighCorrelationError> {
    let (p, active) = high_correlation_problem(g, epsilon)?;
    let sol = solve(&p)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(HighCorrelationError::InfeasibleAtEpsilon(epsilon)),
        LpStatus::Unbounded => unreachable!("box-bounded LP cannot be unbounded"),
    }
    finish(g, &active, &sol.x, epsilon, sol.objective, sol.iterations, 0)
}

/// Runs [`max_failing_correlation`] once per slack value.
pub fn epsilon_sweep(
    g: &Graph,
    epsilons: &[f64],
) -> Vec<Result<HighCorrelationResult, HighCorrelationError>> {
    epsilons.iter().map(|&e| max_failing_correlation(g, e)).collect()
}

/// Same search with the unit Euclidean ball in place of the box, approximated
/// from outside by tangent cuts `<a_k/|a_k|, a> <= 1` (Kelley's method).
///
/// Because the ball is the natural normalization of a correlation, the witness
/// correlation converges to the supremum of failing correlations as `epsilon`
/// goes to zero, unlike the box LP which optimizes a surrogate.
pub fn max_failing_correlation_l2(
    g: &Graph,
    epsilon: f64,
    max_cuts: usize,
) -> Result<HighCorrelationResult, HighCorrelationError> {
    let (mut p, active) = high_correlation_problem(g, epsilon)?;
    let mut iterations = 0;
    let mut cuts = 0;
    loop {
        let sol = solve(&p)?;
        iterations += sol.iterations;
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Err(HighCorrelationError::InfeasibleAtEpsilon(epsilon)),
            LpStatus::Unbounded => unreachable!("box-bounded LP cannot be unbounded"),
        }
        let norm = libm::sqrt(sol.x.iter().map(|v| v * v).sum::<f64>());
        if norm <= 1.0 + 1e-6 || cuts >= max_cuts {
            return finish(g, &active, &sol.x, epsilon, sol.objective, iterations, cuts);
        }
        p.add_constraint(sol.x.iter().map(|v| v / norm).collect(), Sense::Le, 1.0);
        cuts += 1;
    }
}
