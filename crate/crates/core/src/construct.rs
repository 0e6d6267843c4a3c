//! Worked example graphs, standard families, and the growth construction that
//! pushes the degree-attribute correlation towards 1 while the gap stays
//! negative.

use alloc::format;
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeId};
use crate::metrics::AttributeSample;
use crate::rational::{integer, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("need at least {min} nodes, got {got}")]
    TooSmall { min: usize, got: usize },
    #[error("growth marker invalid: {0}")]
    InvariantBroken(&'static str),
    #[error("attribute sample has {got} values for {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("attribute of node {0} is undefined")]
    UndefinedAttribute(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn at_least(n: usize, min: usize) -> Result<(), ConstructError> {
    if n < min {
        return Err(ConstructError::TooSmall { min, got: n });
    }
    Ok(())
}

/// Node 0 joined to nodes `1..n`.
pub fn star(n: usize) -> Result<Graph, ConstructError> {
    at_least(n, 3)?;
    Ok(Graph::from_index_edges(n, (1..n).map(|i| (0, i)))?)
}

/// `0 - 1 - ... - (n-1)`.
pub fn path(n: usize) -> Result<Graph, ConstructError> {
    at_least(n, 3)?;
    Ok(Graph::from_index_edges(n, (1..n).map(|i| (i - 1, i)))?)
}

/// Complete graph on `n` nodes without the edge `0 - 1`.
pub fn knee(n: usize) -> Result<Graph, ConstructError> {
    at_least(n, 3)?;
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&e| e != (0, 1));
    Ok(Graph::from_index_edges(n, edges)?)
}

pub fn complete(n: usize) -> Graph {
    Graph::from_index_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
        .expect("indices in range")
}

/// Cycle on `n >= 3` nodes.
pub fn ring(n: usize) -> Result<Graph, ConstructError> {
    at_least(n, 3)?;
    Ok(Graph::from_index_edges(n, (0..n).map(|i| (i, (i + 1) % n)))?)
}

const FIG1_EDGES: [(&str, &str); 9] = [
    ("A", "B"),
    ("A", "C"),
    ("B", "D"),
    ("C", "D"),
    ("C", "E"),
    ("D", "F"),
    ("E", "F"),
    ("E", "G"),
    ("F", "H"),
];
const FIG1_ATTRS: [i64; 8] = [2, 2, 3, 3, 3, 3, 10, 10];
const FIG1_DEGREES: [i64; 8] = [2, 2, 3, 3, 3, 3, 1, 1];

/// Eight-node example with a negative gap (-9/8) and degree-attribute
/// correlation -17/sqrt(451). Nodes `A..H`, degrees `(2,2,3,3,3,3,1,1)`.
pub fn example_graph_fig1() -> (Graph, AttributeSample<Rational>) {
    let (g, _) = Graph::from_edges(FIG1_EDGES).expect("static edge list");
    (g, AttributeSample::from_integers(&FIG1_ATTRS))
}

/// Four-node graph (edges 1-2, 2-3, 2-4, 3-4) with three samples that are all
/// uncorrelated with degree but have gaps 0, 1/24 and -1/24.
pub fn example_graph_fig4() -> (Graph, [AttributeSample<Rational>; 3]) {
    let (g, _) = Graph::from_edges([(1, 2), (2, 3), (2, 4), (3, 4)]).expect("static edge list");
    let samples = [
        AttributeSample::from_integers(&[1, 1, 2, 0]),
        AttributeSample::from_integers(&[1, 1, 1, 0]),
        AttributeSample::from_integers(&[1, 1, 3, 0]),
    ];
    (g, samples)
}

/// Snapshot of the growth construction.
///
/// Each step inserts two degree-2 nodes with attribute 2 (by subdividing the
/// marked 2-2 edge twice) and two degree-3 nodes with attribute 3 (a joined
/// pair `P - Q` replacing the two marked 3-3 edges). Every new node has a
/// second-order attribute equal to its own attribute, and every existing node
/// keeps its degree, attribute and second-order attribute, so the sum of
/// `s_i - a_i` is unchanged while `n` grows by 4.
#[derive(Debug, Clone)]
pub struct GrowthState {
    graph: Graph,
    attrs: Vec<Rational>,
    attrs_f64: Vec<f64>,
    two_chain: (usize, usize),
    three_edges: [(usize, usize); 2],
    k: usize,
}

impl GrowthState {
    /// Generic seed: the caller supplies an edge whose endpoints both have
    /// degree 2 and attribute 2, and two disjoint edges whose four endpoints
    /// all have degree 3 and attribute 3.
    pub fn new(
        graph: Graph,
        attrs: AttributeSample<Rational>,
        two_chain_edge: (NodeId, NodeId),
        three_edges: [(NodeId, NodeId); 2],
    ) -> Result<Self, ConstructError> {
        if attrs.len() != graph.node_count() {
            return Err(ConstructError::LengthMismatch { expected: graph.node_count(), got: attrs.len() });
        }
        if let Some(i) = (0..attrs.len()).find(|&i| !attrs.is_defined(i)) {
            return Err(ConstructError::UndefinedAttribute(i));
        }
        let idx = |l: &NodeId| graph.index_of(l).ok_or_else(|| GraphError::UnknownNode(l.clone()));
        let two_chain = (idx(&two_chain_edge.0)?, idx(&two_chain_edge.1)?);
        let three = [
            (idx(&three_edges[0].0)?, idx(&three_edges[0].1)?),
            (idx(&three_edges[1].0)?, idx(&three_edges[1].1)?),
        ];
        let attrs_f64 = attrs.values().iter().map(|v| v.to_f64_lossy()).collect();
        let st = GrowthState { attrs: attrs.values().to_vec(), attrs_f64, graph, two_chain, three_edges: three, k: 0 };
        st.check_markers()?;
        Ok(st)
    }

    /// The eight-node example with markers `A - B` and `C - D`, `E - F`.
    pub fn from_fig1() -> Self {
        let (g, a) = example_graph_fig1();
        GrowthState::new(g, a, ("A".into(), "B".into()), [("C".into(), "D".into()), ("E".into(), "F".into())])
            .expect("fig1 markers qualify")
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn attributes(&self) -> AttributeSample<Rational> {
        AttributeSample::new(self.attrs.clone())
    }

    pub fn attributes_f64(&self) -> AttributeSample<f64> {
        AttributeSample::new(self.attrs_f64.clone())
    }

    pub fn steps(&self) -> usize {
        self.k
    }

    fn qualifies(&self, i: usize, degree: usize, value: i64) -> bool {
        self.graph.degree(i) == degree && self.attrs[i] == integer(value)
    }

    fn check_markers(&self) -> Result<(), ConstructError> {
        let (u, v) = self.two_chain;
        if !self.graph.has_edge(u, v) {
            return Err(ConstructError::InvariantBroken("2-2 marker is not an edge"));
        }
        if !(self.qualifies(u, 2, 2) && self.qualifies(v, 2, 2)) {
            return Err(ConstructError::InvariantBroken("2-2 marker endpoints need degree 2 and attribute 2"));
        }
        let [(a, b), (c, d)] = self.three_edges;
        if !(self.graph.has_edge(a, b) && self.graph.has_edge(c, d)) {
            return Err(ConstructError::InvariantBroken("3-3 marker is not an edge"));
        }
        let ends = [a, b, c, d];
        if (0..4).any(|i| (i + 1..4).any(|j| ends[i] == ends[j])) {
            return Err(ConstructError::InvariantBroken("3-3 markers must be disjoint"));
        }
        if !ends.iter().all(|&x| self.qualifies(x, 3, 3)) {
            return Err(ConstructError::InvariantBroken("3-3 marker endpoints need degree 3 and attribute 3"));
        }
        Ok(())
    }

    /// One step of the construction: four new nodes, markers moved to fresh
    /// qualifying edges.
    pub fn grow_step(mut self) -> Result<Self, ConstructError> {
        self.check_markers()?;
        let k = self.k + 1;
        let g = &mut self.graph;

        // u - x - y - v in place of u - v
        let (u, v) = self.two_chain;
        let x = g.add_fresh_node(&format!("t2.{k}.a"));
        let y = g.add_fresh_node(&format!("t2.{k}.b"));
        g.remove_edge(u, v);
        g.insert_edge(u, x);
        g.insert_edge(x, y);
        g.insert_edge(y, v);

        // p ~ {u1, v1, q}, q ~ {u2, v2, p} in place of u1 - v1 and u2 - v2
        let [(u1, v1), (u2, v2)] = self.three_edges;
        let p = g.add_fresh_node(&format!("t3.{k}.p"));
        let q = g.add_fresh_node(&format!("t3.{k}.q"));
        g.remove_edge(u1, v1);
        g.remove_edge(u2, v2);
        for (a, b) in [(p, u1), (p, v1), (q, u2), (q, v2), (p, q)] {
            g.insert_edge(a, b);
        }

        self.attrs.extend([integer(2), integer(2), integer(3), integer(3)]);
        self.attrs_f64.extend([2.0, 2.0, 3.0, 3.0]);
        self.two_chain = (x, y);
        self.three_edges = [(u1, p), (u2, q)];
        self.k = k;
        self.check_markers()?;
        Ok(self)
    }

    pub fn grow(mut self, steps: usize) -> Result<Self, ConstructError> {
        for _ in 0..steps {
            self = self.grow_step()?;
        }
        Ok(self)
    }
}

/// Closed-form degree-attribute correlation after `k` growth steps from the
/// eight-node example.
pub fn growth_correlation(k: u64) -> f64 {
    let kf = k as f64;
    let n = 8.0 + 4.0 * kf;
    let a_sum: i64 = FIG1_ATTRS.iter().sum();
    let d_sum: i64 = FIG1_DEGREES.iter().sum();
    let a_mean = (a_sum as f64 + 10.0 * kf) / n;
    let d_mean = (d_sum as f64 + 10.0 * kf) / n;

    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vd = 0.0;
    for (&a, &d) in FIG1_ATTRS.iter().zip(&FIG1_DEGREES) {
        let (da, dd) = (a as f64 - a_mean, d as f64 - d_mean);
        cov += da * dd;
        va += da * da;
        vd += dd * dd;
    }
    for value in [2.0, 3.0] {
        let (da, dd) = (value - a_mean, value - d_mean);
        cov += 2.0 * kf * da * dd;
        va += 2.0 * kf * da * da;
        vd += 2.0 * kf * dd * dd;
    }
    cov / (libm::sqrt(va) * libm::sqrt(vd))
}

/// Smallest `k <= max_k` whose closed-form correlation exceeds `threshold`.
pub fn first_step_above(threshold: f64, max_k: u64) -> Option<u64> {
    (0..=max_k).find(|&k| growth_correlation(k) > threshold)
}
