//! Linear programming: a dense bounded-variable simplex solver and the
//! high-correlation search built on it.

mod high_correlation;
mod simplex;

pub use high_correlation::{
    epsilon_sweep, high_correlation_problem, max_failing_correlation, max_failing_correlation_l2,
    HighCorrelationError, HighCorrelationResult, WitnessCheck, DEFAULT_EPSILON, EPSILON_LADDER,
};
pub use simplex::{solve, Constraint, LpError, LpProblem, LpSolution, LpStatus, Sense, MAX_DENSE_COLUMNS};
