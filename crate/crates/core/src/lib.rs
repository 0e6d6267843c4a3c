//! Node-level ("singular") generalized friendship paradox toolkit.
//!
//! For a graph with degrees `d` and a per-node attribute sample `a`, each node
//! contributes the mean of its friends' attributes, and the *gap* is the mean
//! of those second-order values minus the mean attribute. This crate computes
//! the gap and related statistics, decides exactly whether a graph admits a
//! positively degree-correlated attribute sample with a negative gap, and
//! searches for such samples with a bounded-variable simplex solver.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and the
//! command-line tool live in the companion `sgfp` crate.
//!
//! Modules:
//!
//! - [`graph`]: simple undirected graphs, degrees, reciprocal-degree sums.
//! - [`metrics`]: second-order attributes, singular and list gaps, correlations.
//! - [`classify`]: exact pro/anti classification and the failing-correlation threshold.
//! - [`lp`]: the simplex solver and the high-correlation search.
//! - [`construct`]: worked example graphs and the growth construction.
//! - [`randgen`]: seeded `G(n, p)` sampling and configuration-model rewiring.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classify;
pub mod construct;
pub mod graph;
pub mod lp;
pub mod metrics;
pub mod randgen;
pub mod rational;

pub use classify::{classify, AffineWitness, Classification, SgfpKind, ThresholdEstimate};
pub use graph::{Graph, GraphError, NodeId};
pub use metrics::{AttributeSample, Correlation, GapReport};
pub use rational::{Rational, Scalar};
