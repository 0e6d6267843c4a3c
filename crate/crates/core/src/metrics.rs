//! First- and second-order attribute statistics.
//!
//! Every function is generic over [`Scalar`], so the same code runs in exact
//! rational arithmetic (worked examples, classification) and in `f64` (large
//! graphs). Isolated nodes have no second-order attribute; they are left out of
//! every mean and counted in [`GapReport::excluded_isolates`].

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::Graph;
use crate::rational::{Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("sequence length {got} does not match node count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("node {0} has an undefined attribute but is not isolated")]
    UndefinedAttribute(usize),
    #[error("every node is isolated")]
    AllIsolates,
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("neighbour form and delta form of the gap disagree")]
    FormMismatch,
}

/// Per-node attribute values in canonical node order.
///
/// Nodes may be marked undefined (e.g. isolates under a derived attribute);
/// their stored value is zero and is never read by the metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeSample<T> {
    values: Vec<T>,
    defined: Vec<bool>,
}

impl<T: Scalar> AttributeSample<T> {
    pub fn new(values: Vec<T>) -> Self {
        let defined = vec![true; values.len()];
        AttributeSample { values, defined }
    }

    pub fn from_options(values: Vec<Option<T>>) -> Self {
        let defined = values.iter().map(Option::is_some).collect();
        let values = values.into_iter().map(|v| v.unwrap_or_else(T::zero)).collect();
        AttributeSample { values, defined }
    }

    pub fn from_integers(values: &[i64]) -> Self {
        Self::new(values.iter().map(|&v| T::from_i64(v).expect("integer fits backend")).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&T> {
        self.defined[i].then(|| &self.values[i])
    }

    pub fn is_defined(&self, i: usize) -> bool {
        self.defined[i]
    }

    /// Raw values; undefined entries read as zero.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> AttributeSample<U> {
        AttributeSample {
            values: self.values.iter().map(f).collect(),
            defined: self.defined.clone(),
        }
    }

    pub fn to_f64(&self) -> AttributeSample<f64> {
        self.map(Scalar::to_f64_lossy)
    }

    /// `a + c` on every defined entry.
    pub fn shifted(&self, c: &T) -> Self {
        self.map(|v| v.clone() + c.clone())
    }

    /// `c * a` on every defined entry.
    pub fn scaled(&self, c: &T) -> Self {
        self.map(|v| v.clone() * c.clone())
    }
}

/// Outcome of a correlation: a value in `[-1, 1]`, or the reason it does not
/// exist. Degenerate inputs are expected in pipelines, so this is a value and
/// not an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Correlation {
    Defined(f64),
    Undefined(Undefined),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Undefined {
    /// Fewer than two values.
    TooFewValues,
    /// The first sequence is constant (e.g. a regular graph's degrees).
    ConstantFirst,
    /// The second sequence is constant.
    ConstantSecond,
    /// The graph is not connected.
    Disconnected,
}

impl Undefined {
    pub fn describe(self) -> &'static str {
        match self {
            Undefined::TooFewValues => "fewer than two values",
            Undefined::ConstantFirst => "degree sequence is constant (regular graph)",
            Undefined::ConstantSecond => "second sequence is constant",
            Undefined::Disconnected => "graph is not connected",
        }
    }
}

impl Correlation {
    pub fn value(self) -> Option<f64> {
        match self {
            Correlation::Defined(r) => Some(r),
            Correlation::Undefined(_) => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, Correlation::Defined(_))
    }
}

/// Pearson correlation with population moments.
///
/// Computed from exact centred sums in the backend; zero covariance yields
/// exactly `0.0` and a perfect linear relation yields exactly `±1.0` (exact in
/// the rational backend), the rest goes through one `f64` square root.
pub fn correlation<T: Scalar>(x: &[T], y: &[T]) -> Result<Correlation, MetricsError> {
    if x.len() != y.len() {
        return Err(MetricsError::LengthMismatch { expected: x.len(), got: y.len() });
    }
    if x.len() < 2 {
        return Ok(Correlation::Undefined(Undefined::TooFewValues));
    }
    if x.iter().all(|v| *v == x[0]) {
        return Ok(Correlation::Undefined(Undefined::ConstantFirst));
    }
    if y.iter().all(|v| *v == y[0]) {
        return Ok(Correlation::Undefined(Undefined::ConstantSecond));
    }
    let (cov, vx, vy) = centered_moments(x, y);
    Ok(Correlation::Defined(correlation_from_moments(&cov, &vx, &vy)))
}

/// `(sum (x-mx)(y-my), sum (x-mx)^2, sum (y-my)^2)`.
pub(crate) fn centered_moments<T: Scalar>(x: &[T], y: &[T]) -> (T, T, T) {
    let mx = mean(x);
    let my = mean(y);
    let mut cov = T::zero();
    let mut vx = T::zero();
    let mut vy = T::zero();
    for (a, b) in x.iter().zip(y) {
        let dx = a.clone() - mx.clone();
        let dy = b.clone() - my.clone();
        cov = cov + dx.clone() * dy.clone();
        vx = vx + dx.clone() * dx;
        vy = vy + dy.clone() * dy;
    }
    (cov, vx, vy)
}

fn correlation_from_moments<T: Scalar>(cov: &T, vx: &T, vy: &T) -> f64 {
    if cov.is_zero() {
        return 0.0;
    }
    if cov.clone() * cov.clone() == vx.clone() * vy.clone() {
        return if *cov > T::zero() { 1.0 } else { -1.0 };
    }
    let r = cov.to_f64_lossy() / (libm::sqrt(vx.to_f64_lossy()) * libm::sqrt(vy.to_f64_lossy()));
    r.clamp(-1.0, 1.0)
}

pub(crate) fn mean<T: Scalar>(xs: &[T]) -> T {
    let sum = xs.iter().cloned().fold(T::zero(), |a, b| a + b);
    sum / T::from_count(xs.len())
}

fn check_len<T>(g: &Graph, a: &AttributeSample<T>) -> Result<(), MetricsError> {
    if a.values.len() != g.node_count() {
        return Err(MetricsError::LengthMismatch { expected: g.node_count(), got: a.values.len() });
    }
    Ok(())
}

/// Non-isolated nodes, after checking every one of them has a defined value.
fn active_nodes<T: Scalar>(g: &Graph, a: &AttributeSample<T>) -> Result<Vec<usize>, MetricsError> {
    check_len(g, a)?;
    let mut active = Vec::with_capacity(g.node_count());
    for i in 0..g.node_count() {
        if g.degree(i) == 0 {
            continue;
        }
        if !a.is_defined(i) {
            return Err(MetricsError::UndefinedAttribute(i));
        }
        active.push(i);
    }
    Ok(active)
}

/// Mean of each node's friends' attributes; `None` for isolates.
pub fn second_order<T: Scalar>(
    g: &Graph,
    a: &AttributeSample<T>,
) -> Result<Vec<Option<T>>, MetricsError> {
    active_nodes(g, a)?;
    Ok((0..g.node_count())
        .map(|i| {
            let ns = g.neighbors(i);
            (!ns.is_empty()).then(|| {
                let sum = ns.iter().fold(T::zero(), |acc, &j| acc + a.values[j].clone());
                sum / T::from_count(ns.len())
            })
        })
        .collect())
}

/// Gap as mean second-order attribute minus mean attribute, over non-isolated
/// nodes.
pub fn singular_gap_neighbor_form<T: Scalar>(
    g: &Graph,
    a: &AttributeSample<T>,
) -> Result<T, MetricsError> {
    let active = active_nodes(g, a)?;
    if active.is_empty() {
        return Err(MetricsError::AllIsolates);
    }
    let s = second_order(g, a)?;
    let mut total = T::zero();
    for &i in &active {
        total = total + s[i].clone().expect("active node has friends") - a.values[i].clone();
    }
    Ok(total / T::from_count(active.len()))
}

/// Gap as `(1/n) sum (delta_j - 1) a_j`, over non-isolated nodes.
pub fn singular_gap_delta_form<T: Scalar>(
    g: &Graph,
    a: &AttributeSample<T>,
) -> Result<T, MetricsError> {
    let active = active_nodes(g, a)?;
    if active.is_empty() {
        return Err(MetricsError::AllIsolates);
    }
    let delta: Vec<T> = g.delta_ignoring_isolates();
    let total = active.iter().fold(T::zero(), |acc, &j| {
        acc + (delta[j].clone() - T::one()) * a.values[j].clone()
    });
    Ok(total / T::from_count(active.len()))
}

/// The singular gap, cross-checked between the neighbour form and the delta
/// form (exactly for rationals, to `1e-12` relative for floats).
pub fn singular_gap<T: Scalar>(g: &Graph, a: &AttributeSample<T>) -> Result<T, MetricsError> {
    let by_neighbors = singular_gap_neighbor_form(g, a)?;
    let by_delta = singular_gap_delta_form(g, a)?;
    if !by_neighbors.agrees_with(&by_delta) {
        return Err(MetricsError::FormMismatch);
    }
    Ok(by_neighbors)
}

/// Edge-level gap: `(sum d_i a_i) / (sum d_i) - mean(a)`.
pub fn list_gap<T: Scalar>(g: &Graph, a: &AttributeSample<T>) -> Result<T, MetricsError> {
    let active = active_nodes(g, a)?;
    if active.is_empty() {
        return Err(MetricsError::EmptyGraph);
    }
    let mut weighted = T::zero();
    let mut degree_sum = T::zero();
    let mut plain = T::zero();
    for &i in &active {
        let d = T::from_count(g.degree(i));
        weighted = weighted + d.clone() * a.values[i].clone();
        degree_sum = degree_sum + d;
        plain = plain + a.values[i].clone();
    }
    Ok(weighted / degree_sum - plain / T::from_count(active.len()))
}

/// Edge-level gap through `r_{d,a} * sigma_d * sigma_a / mean(d)` with
/// population standard deviations. Zero when either sequence is constant.
pub fn list_gap_closed_form<T: Scalar>(g: &Graph, a: &AttributeSample<T>) -> Result<f64, MetricsError> {
    let active = active_nodes(g, a)?;
    if active.is_empty() {
        return Err(MetricsError::EmptyGraph);
    }
    let d: Vec<f64> = active.iter().map(|&i| g.degree(i) as f64).collect();
    let x: Vec<f64> = active.iter().map(|&i| a.values[i].to_f64_lossy()).collect();
    let n = d.len() as f64;
    let r = match correlation(&d, &x)? {
        Correlation::Defined(r) => r,
        Correlation::Undefined(_) => return Ok(0.0),
    };
    let (_, vd, vx) = centered_moments(&d, &x);
    let sigma_d = libm::sqrt(vd / n);
    let sigma_a = libm::sqrt(vx / n);
    Ok(r * sigma_d * sigma_a / mean(&d))
}

/// `r_{d,a}` over non-isolated nodes.
pub fn degree_attribute_correlation<T: Scalar>(
    g: &Graph,
    a: &AttributeSample<T>,
) -> Result<Correlation, MetricsError> {
    let active = active_nodes(g, a)?;
    let d: Vec<T> = active.iter().map(|&i| T::from_count(g.degree(i))).collect();
    let x: Vec<T> = active.iter().map(|&i| a.values[i].clone()).collect();
    correlation(&d, &x)
}

/// Degree-delta correlation of a connected graph, evaluated exactly, so a
/// perfect affine relation reports exactly `1.0`.
pub fn r_d_delta(g: &Graph) -> Correlation {
    if !g.is_connected() {
        return Correlation::Undefined(Undefined::Disconnected);
    }
    r_d_delta_ignoring_isolates(g)
}

/// Degree-delta correlation over non-isolated nodes, for real or rewired
/// networks that need not be connected.
pub fn r_d_delta_ignoring_isolates(g: &Graph) -> Correlation {
    let active: Vec<usize> = (0..g.node_count()).filter(|&i| g.degree(i) > 0).collect();
    let delta: Vec<Rational> = g.delta_ignoring_isolates();
    let d: Vec<Rational> = active.iter().map(|&i| Rational::from_count(g.degree(i))).collect();
    let dl: Vec<Rational> = active.iter().map(|&i| delta[i].clone()).collect();
    correlation(&d, &dl).expect("equal lengths")
}

/// Float variant of [`r_d_delta_ignoring_isolates`] for large graphs; perfect
/// relations are only detected up to rounding.
pub fn r_d_delta_f64(g: &Graph) -> Correlation {
    let active: Vec<usize> = (0..g.node_count()).filter(|&i| g.degree(i) > 0).collect();
    let delta: Vec<f64> = g.delta_ignoring_isolates();
    let d: Vec<f64> = active.iter().map(|&i| g.degree(i) as f64).collect();
    let dl: Vec<f64> = active.iter().map(|&i| delta[i]).collect();
    correlation(&d, &dl).expect("equal lengths")
}

/// Everything the `analyze` pipeline reports for one graph and sample.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport<T> {
    pub n: usize,
    pub m: usize,
    pub degrees: Vec<usize>,
    pub delta: Vec<T>,
    pub attributes: Vec<Option<T>>,
    pub second_order: Vec<Option<T>>,
    pub singular_gap: T,
    pub list_gap: T,
    pub r_da: Correlation,
    pub r_ddelta: Correlation,
    pub excluded_isolates: usize,
}

pub fn analyze<T: Scalar>(g: &Graph, a: &AttributeSample<T>) -> Result<GapReport<T>, MetricsError> {
    let second_order = second_order(g, a)?;
    let singular_gap = singular_gap(g, a)?;
    let list_gap = list_gap(g, a)?;
    let r_da = degree_attribute_correlation(g, a)?;
    let r_ddelta = if T::is_exact() { r_d_delta_ignoring_isolates(g) } else { r_d_delta_f64(g) };
    Ok(GapReport {
        n: g.node_count(),
        m: g.edge_count(),
        degrees: g.degrees(),
        delta: g.delta_ignoring_isolates(),
        attributes: (0..a.len()).map(|i| a.get(i).cloned()).collect(),
        second_order,
        singular_gap,
        list_gap,
        r_da,
        r_ddelta,
        excluded_isolates: g.isolates().len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{integer, ratio};

    fn path3() -> Graph {
        Graph::from_edges([("x", "y"), ("y", "z")]).unwrap().0
    }

    fn fig4() -> Graph {
        Graph::from_edges([(1, 2), (2, 3), (2, 4), (3, 4)]).unwrap().0
    }

    fn q(values: &[i64]) -> AttributeSample<Rational> {
        AttributeSample::from_integers(values)
    }

    #[test]
    fn path_neighbor_means() {
        let s = second_order(&path3(), &q(&[1, 2, 3])).unwrap();
        assert_eq!(s, vec![Some(integer(2)), Some(integer(2)), Some(integer(2))]);
    }

    #[test]
    fn path_with_arithmetic_attributes_has_zero_gap() {
        assert_eq!(singular_gap(&path3(), &q(&[1, 2, 3])).unwrap(), integer(0));
    }

    #[test]
    fn constant_attributes_give_constant_second_order() {
        let s = second_order(&fig4(), &q(&[7, 7, 7, 7])).unwrap();
        assert!(s.iter().all(|v| *v == Some(integer(7))));
        assert_eq!(singular_gap(&fig4(), &q(&[7, 7, 7, 7])).unwrap(), integer(0));
        assert_eq!(list_gap(&fig4(), &q(&[7, 7, 7, 7])).unwrap(), integer(0));
    }

    #[test]
    fn fig4_gap_values() {
        let g = fig4();
        assert_eq!(singular_gap(&g, &q(&[1, 1, 2, 0])).unwrap(), integer(0));
        assert_eq!(singular_gap(&g, &q(&[1, 1, 1, 0])).unwrap(), ratio(1, 24));
        assert_eq!(singular_gap(&g, &q(&[1, 1, 3, 0])).unwrap(), ratio(-1, 24));
    }

    #[test]
    fn fig4_samples_are_uncorrelated_with_degree() {
        let g = fig4();
        for a in [[1, 1, 2, 0], [1, 1, 1, 0], [1, 1, 3, 0]] {
            let r = degree_attribute_correlation(&g, &q(&a)).unwrap();
            assert_eq!(r, Correlation::Defined(0.0));
        }
    }

    #[test]
    fn self_correlation_is_one() {
        let x = [1.0, 4.0, 2.5, -3.0];
        assert_eq!(correlation(&x, &x).unwrap(), Correlation::Defined(1.0));
        let neg: Vec<f64> = x.iter().map(|v| -2.0 * v + 1.0).collect();
        assert_eq!(correlation(&x, &neg).unwrap(), Correlation::Defined(-1.0));
    }

    #[test]
    fn correlation_degenerate_cases() {
        assert_eq!(
            correlation(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap(),
            Correlation::Undefined(Undefined::ConstantFirst)
        );
        assert_eq!(
            correlation(&[1.0, 2.0], &[5.0, 5.0]).unwrap(),
            Correlation::Undefined(Undefined::ConstantSecond)
        );
        assert_eq!(correlation(&[1.0], &[2.0]).unwrap(), Correlation::Undefined(Undefined::TooFewValues));
        assert!(matches!(
            correlation(&[1.0, 2.0], &[1.0]),
            Err(MetricsError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn path5_degree_delta_correlation() {
        let g = Graph::from_index_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let r = r_d_delta(&g).value().unwrap();
        assert!((r - 1.0 / libm::sqrt(1.2)).abs() < 1e-15);
    }

    #[test]
    fn star_degree_delta_correlation_is_exactly_one() {
        for n in 3..12 {
            let g = Graph::from_index_edges(n, (1..n).map(|i| (0, i))).unwrap();
            assert_eq!(r_d_delta(&g), Correlation::Defined(1.0));
        }
    }

    #[test]
    fn regular_and_disconnected_have_no_degree_delta_correlation() {
        let cycle = Graph::from_index_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(r_d_delta(&cycle), Correlation::Undefined(Undefined::ConstantFirst));
        let split = Graph::from_index_edges(5, [(0, 1), (2, 3), (3, 4)]).unwrap();
        assert_eq!(r_d_delta(&split), Correlation::Undefined(Undefined::Disconnected));
        assert!(r_d_delta_ignoring_isolates(&split).is_defined());
    }

    #[test]
    fn degree_as_attribute_list_gap() {
        // a = d gives sigma_d^2 / mean(d)
        let g = Graph::from_index_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (1, 3)]).unwrap();
        let d: Vec<i64> = g.degrees().iter().map(|&v| v as i64).collect();
        let a = q(&d);
        let lg = list_gap(&g, &a).unwrap();
        let df: Vec<f64> = d.iter().map(|&v| v as f64).collect();
        let mean = df.iter().sum::<f64>() / 5.0;
        let var = df.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 5.0;
        assert!((lg.to_f64_lossy() - var / mean).abs() < 1e-12);
        assert!((list_gap_closed_form(&g, &a).unwrap() - var / mean).abs() < 1e-12);
    }

    #[test]
    fn isolates_are_excluded_and_counted() {
        let g = Graph::from_index_edges(4, [(0, 1), (1, 2)]).unwrap();
        let a = AttributeSample::from_options(vec![
            Some(integer(1)),
            Some(integer(2)),
            Some(integer(3)),
            None,
        ]);
        let report = analyze(&g, &a).unwrap();
        assert_eq!(report.excluded_isolates, 1);
        assert_eq!(report.singular_gap, integer(0));
        assert_eq!(report.second_order[3], None);
    }

    #[test]
    fn undefined_attribute_on_connected_node_is_an_error() {
        let a = AttributeSample::from_options(vec![Some(integer(1)), None, Some(integer(3))]);
        assert_eq!(singular_gap(&path3(), &a).unwrap_err(), MetricsError::UndefinedAttribute(1));
    }

    #[test]
    fn all_isolates_and_length_errors() {
        let g = Graph::from_index_edges(2, []).unwrap();
        assert_eq!(singular_gap(&g, &q(&[1, 2])).unwrap_err(), MetricsError::AllIsolates);
        assert_eq!(list_gap(&g, &q(&[1, 2])).unwrap_err(), MetricsError::EmptyGraph);
        assert!(matches!(
            singular_gap(&path3(), &q(&[1, 2])),
            Err(MetricsError::LengthMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn float_backend_matches_rational_backend() {
        let g = fig4();
        let exact = singular_gap(&g, &q(&[1, 1, 3, 0])).unwrap();
        let float = singular_gap(&g, &q(&[1, 1, 3, 0]).to_f64()).unwrap();
        assert!((exact.to_f64_lossy() - float).abs() < 1e-15);
    }
}
