//! Exact pro/anti classification and the per-graph failing-correlation
//! threshold.
//!
//! A connected non-regular graph admits a centred sample with
//! `sum d a >= 0` and `sum delta a < 0` exactly when no pair `x >= 0, z`
//! satisfies `delta_i = x d_i + z` for every node (Farkas). Deltas are
//! rationals, so the affine fit is checked without tolerance.

use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Signed;
use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeId};
use crate::lp::{self, HighCorrelationError, EPSILON_LADDER};
use crate::metrics::{self, AttributeSample, Correlation, MetricsError};
use crate::rational::{Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SgfpKind {
    /// Positive degree-attribute correlation always yields a positive gap.
    ProSgfp,
    /// Some positively correlated sample yields a negative gap.
    AntiSgfp,
    /// Regular, disconnected or otherwise outside the domain.
    RegularOrDegenerate,
}

impl SgfpKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SgfpKind::ProSgfp => "ProSGFP",
            SgfpKind::AntiSgfp => "AntiSGFP",
            SgfpKind::RegularOrDegenerate => "RegularOrDegenerate",
        }
    }
}

/// `delta_i = slope * d_i + intercept` for every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineWitness {
    pub slope: Rational,
    pub intercept: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub kind: SgfpKind,
    /// Present exactly when `kind` is [`SgfpKind::ProSgfp`].
    pub witness: Option<AffineWitness>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error("degenerate graph: {0}")]
    DegenerateGraph(&'static str),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

fn degenerate_reason(g: &Graph) -> Option<&'static str> {
    if g.node_count() == 0 {
        Some("graph has no nodes")
    } else if !g.is_connected() {
        Some("graph is not connected")
    } else if g.is_regular() {
        Some("graph is regular")
    } else {
        None
    }
}

pub fn classify(g: &Graph) -> Classification {
    if let Some(reason) = degenerate_reason(g) {
        return Classification { kind: SgfpKind::RegularOrDegenerate, witness: None, reason: reason.into() };
    }
    let degrees = g.degrees();
    let delta = g.delta().expect("connected graph on 2+ nodes has no isolates");

    let i = 0;
    let j = degrees.iter().position(|&d| d != degrees[i]).expect("non-regular");
    let dd = Rational::from_count(degrees[i]) - Rational::from_count(degrees[j]);
    let slope = (delta[i].clone() - delta[j].clone()) / dd;
    let intercept = delta[i].clone() - slope.clone() * Rational::from_count(degrees[i]);

    let misfit = (0..g.node_count())
        .find(|&k| slope.clone() * Rational::from_count(degrees[k]) + intercept.clone() != delta[k]);
    match misfit {
        Some(k) => Classification {
            kind: SgfpKind::AntiSgfp,
            witness: None,
            reason: alloc::format!(
                "node `{}` (degree {}, delta {}) is off the affine fit through nodes `{}` and `{}`",
                g.label(k),
                degrees[k],
                delta[k],
                g.label(i),
                g.label(j)
            ),
        },
        None if slope.is_positive() => Classification {
            kind: SgfpKind::ProSgfp,
            witness: Some(AffineWitness { slope: slope.clone(), intercept: intercept.clone() }),
            reason: alloc::format!("delta = {slope} * degree + {intercept} on every node"),
        },
        None => Classification {
            // an exact fit with slope <= 0 would contradict r_{d,delta} > 0
            kind: SgfpKind::AntiSgfp,
            witness: None,
            reason: alloc::format!("affine fit has non-positive slope {slope}"),
        },
    }
}

/// Returns `g` with a path `at - q - r - s - t` hanging off `at`. The two
/// degree-2 nodes `r` and `s` get different deltas (1 and 3/2), so the result
/// is anti-SGFP whenever it is non-regular and connected.
pub fn attach_pendant_path(g: &Graph, at: &NodeId) -> Result<Graph, ClassifyError> {
    let root = g.index_of(at).ok_or_else(|| GraphError::UnknownNode(at.clone()))?;
    let mut out = g.clone();
    let mut prev = root;
    for step in ["q", "r", "s", "t"] {
        let next = out.add_fresh_node(&alloc::format!("{at}~{step}"));
        out.insert_edge(prev, next);
        prev = next;
    }
    Ok(out)
}

/// Turns a centred, degree-uncorrelated sample with a negative gap into one
/// with positive degree correlation and a still negative gap, by moving
/// `eps` of attribute from a minimum-degree node to a maximum-degree node.
///
/// Ties pick the lowest canonical index. `eps = min(1, n|gap| / (2 (delta_i -
/// delta_j)))` when the receiving node has the larger delta, else `1`.
pub fn perturb_to_positive_correlation<T: Scalar>(
    g: &Graph,
    a: &AttributeSample<T>,
) -> Result<AttributeSample<T>, ClassifyError> {
    if let Some(reason) = degenerate_reason(g) {
        return Err(ClassifyError::DegenerateGraph(reason));
    }
    let n = g.node_count();
    if a.len() != n {
        return Err(MetricsError::LengthMismatch { expected: n, got: a.len() }.into());
    }
    let values = a.values();
    let sum = values.iter().cloned().fold(T::zero(), |s, v| s + v);
    if !sum.is_zero() {
        return Err(ClassifyError::PreconditionViolated("attribute mean is not zero"));
    }
    let degrees = g.degrees();
    let dot = values
        .iter()
        .zip(&degrees)
        .fold(T::zero(), |s, (v, &d)| s + v.clone() * T::from_count(d));
    if !dot.is_zero() {
        return Err(ClassifyError::PreconditionViolated("degree-attribute correlation is not zero"));
    }
    let gap = metrics::singular_gap(g, a)?;
    if gap >= T::zero() {
        return Err(ClassifyError::PreconditionViolated("gap is not negative"));
    }

    let max_d = *degrees.iter().max().expect("non-empty");
    let min_d = *degrees.iter().min().expect("non-empty");
    let hi = degrees.iter().position(|&d| d == max_d).expect("max exists");
    let lo = degrees.iter().position(|&d| d == min_d).expect("min exists");
    let delta: Vec<T> = g.delta_as()?;
    let spread = delta[hi].clone() - delta[lo].clone();
    let eps = if spread > T::zero() {
        let bound = T::from_count(n) * (T::zero() - gap) / (T::from_count(2) * spread);
        if bound < T::one() { bound } else { T::one() }
    } else {
        T::one()
    };

    let mut out = values.to_vec();
    out[hi] = out[hi].clone() + eps.clone();
    out[lo] = out[lo].clone() - eps;
    Ok(AttributeSample::new(out))
}

/// Bounds on the per-graph threshold above which no correlation fails.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdEstimate {
    /// `sqrt(1 - r_{d,delta}^2)`: the supremum over unit centred samples of
    /// the degree correlation subject to a non-positive gap.
    pub candidate_sup: f64,
    /// Whether the oracle confirmed the candidate from below.
    pub validated: bool,
    /// Best failing correlation found by the oracle (max of the two searches).
    pub oracle_max: f64,
    /// Best from the grid search in the degree/delta plane.
    pub projected_max: f64,
    /// Best from the unit-ball LP sweep over [`EPSILON_LADDER`].
    pub lp_max: f64,
    /// Unit-ball LP result at the smallest slack of the ladder.
    pub lp_at_smallest_epsilon: f64,
}

impl ThresholdEstimate {
    /// The value to report as the threshold: the candidate when validated,
    /// otherwise the oracle's lower bound.
    pub fn reported(&self) -> f64 {
        if self.validated {
            self.candidate_sup
        } else {
            self.oracle_max
        }
    }
}

/// Gap bound enforced by the grid oracle.
const ORACLE_GAP: f64 = -1e-9;
const VALIDATION_WINDOW: f64 = 1e-3;
/// Rounding allowance above the candidate.
const VALIDATION_SLACK: f64 = 1e-9;
const L2_MAX_CUTS: usize = 400;

pub fn threshold_estimate(g: &Graph, grid: usize) -> Result<ThresholdEstimate, ClassifyError> {
    if let Some(reason) = degenerate_reason(g) {
        return Err(ClassifyError::DegenerateGraph(reason));
    }
    if grid == 0 {
        return Err(ClassifyError::PreconditionViolated("grid must be positive"));
    }
    let r = match metrics::r_d_delta(g) {
        Correlation::Defined(r) => r,
        Correlation::Undefined(_) => return Err(ClassifyError::DegenerateGraph("r_{d,delta} undefined")),
    };
    let candidate_sup = libm::sqrt((1.0 - r * r).max(0.0));

    let projected_max = plane_search(g, grid)?;

    let mut lp_max = f64::NEG_INFINITY;
    let mut lp_at_smallest_epsilon = f64::NEG_INFINITY;
    for &eps in EPSILON_LADDER.iter() {
        match lp::max_failing_correlation_l2(g, eps, L2_MAX_CUTS) {
            Ok(res) => {
                lp_max = lp_max.max(res.r_high);
                lp_at_smallest_epsilon = res.r_high;
            }
            Err(HighCorrelationError::InfeasibleAtEpsilon(_)) => {}
            Err(HighCorrelationError::Metrics(e)) => return Err(e.into()),
            Err(_) => return Err(ClassifyError::DegenerateGraph("LP search failed")),
        }
    }

    let oracle_max = projected_max.max(lp_max);
    let validated = oracle_max >= candidate_sup - VALIDATION_WINDOW
        && oracle_max <= candidate_sup + VALIDATION_SLACK;
    Ok(ThresholdEstimate {
        candidate_sup,
        validated,
        oracle_max,
        projected_max,
        lp_max,
        lp_at_smallest_epsilon,
    })
}

/// Grid search over unit centred samples `cos(t) u + sin(t) w`, where `u` is
/// the centred degree direction and `w` the unit direction orthogonal to `u`
/// pointing against the centred deltas. Feasibility (gap <= -1e-9) is
/// evaluated through the neighbour-mean form of the gap, and the first
/// feasible grid cell is refined by bisection.
fn plane_search(g: &Graph, grid: usize) -> Result<f64, ClassifyError> {
    let n = g.node_count();
    let d: Vec<f64> = g.degrees().iter().map(|&v| v as f64).collect();
    let delta: Vec<f64> = g.delta_f64()?;
    let u = unit(&center(&d)).ok_or(ClassifyError::DegenerateGraph("constant degrees"))?;
    let dc = center(&delta);
    let along = dot(&u, &dc);
    let perp: Vec<f64> = dc.iter().zip(&u).map(|(x, y)| x - along * y).collect();
    let w = match unit(&perp) {
        Some(v) => v.iter().map(|x| -x).collect(),
        // deltas are affine in degrees: any centred direction orthogonal to u
        None => (0..n)
            .filter_map(|k| {
                let mut e = alloc::vec![0.0; n];
                e[k] = 1.0;
                let e = center(&e);
                let c = dot(&e, &u);
                unit(&e.iter().zip(&u).map(|(x, y)| x - c * y).collect::<Vec<_>>())
            })
            .next()
            .expect("n >= 3 leaves an orthogonal direction"),
    };

    let sample = |t: f64| -> Vec<f64> {
        let (s, c) = (libm::sin(t), libm::cos(t));
        u.iter().zip(&w).map(|(x, y)| c * x + s * y).collect()
    };
    let feasible = |t: f64| -> Result<Option<f64>, ClassifyError> {
        let a = AttributeSample::new(sample(t));
        let gap = metrics::singular_gap_neighbor_form(g, &a)?;
        if gap > ORACLE_GAP {
            return Ok(None);
        }
        Ok(metrics::degree_attribute_correlation(g, &a)?.value())
    };

    let pi = core::f64::consts::PI;
    let mut first = None;
    for k in 0..=grid {
        let t = pi * k as f64 / grid as f64;
        if feasible(t)?.is_some() {
            first = Some(k);
            break;
        }
    }
    let Some(k) = first else {
        return Ok(f64::NEG_INFINITY);
    };
    let mut hi_t = pi * k as f64 / grid as f64;
    if k > 0 {
        let mut lo_t = pi * (k - 1) as f64 / grid as f64;
        for _ in 0..60 {
            let mid = 0.5 * (lo_t + hi_t);
            if feasible(mid)?.is_some() {
                hi_t = mid;
            } else {
                lo_t = mid;
            }
        }
    }
    Ok(feasible(hi_t)?.expect("bisection keeps the upper end feasible"))
}

fn center(v: &[f64]) -> Vec<f64> {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| x - m).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn unit(v: &[f64]) -> Option<Vec<f64>> {
    let norm = libm::sqrt(dot(v, v));
    (norm > 1e-12).then(|| v.iter().map(|x| x / norm).collect())
}
