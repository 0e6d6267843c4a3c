//! Simple undirected graphs with a canonical dense node order.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::rational::{Rational, Scalar};
use thiserror::Error;

/// External node label. Labels are opaque strings; numeric-looking labels are
/// never coerced, so `"01"` and `"1"` are different nodes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(label: impl Into<String>) -> Self {
        NodeId(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.into())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl From<u64> for NodeId {
    fn from(v: u64) -> Self {
        NodeId(v.to_string())
    }
}

impl From<usize> for NodeId {
    fn from(v: usize) -> Self {
        NodeId(v.to_string())
    }
}

impl From<i32> for NodeId {
    fn from(v: i32) -> Self {
        NodeId(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop on node `{0}`")]
    SelfLoop(NodeId),
    #[error("node `{0}` is isolated")]
    IsolatedNode(NodeId),
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("node index {index} out of range for {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },
}

/// What [`Graph::from_edges`] had to clean up while building.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub duplicate_edges: usize,
}

/// Simple undirected finite graph.
///
/// Nodes are addressed by dense indices `0..n`; the index order is the
/// canonical order of every per-node sequence (degrees, deltas, attributes).
/// Adjacency lists are sorted and symmetric, with no self-loops and no
/// parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<NodeId>,
    index: BTreeMap<NodeId, usize>,
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl Graph {
    /// Builds a graph from labelled edges. Node order is the order of first
    /// appearance. Self-loops are rejected; repeated edges (in either
    /// orientation) are collapsed and counted.
    pub fn from_edges<I, A, B>(edges: I) -> Result<(Graph, BuildReport), GraphError>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<NodeId>,
        B: Into<NodeId>,
    {
        let mut g = Graph::empty();
        let mut report = BuildReport::default();
        for (u, v) in edges {
            let (u, v) = (u.into(), v.into());
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let i = g.intern(u);
            let j = g.intern(v);
            if !g.insert_edge(i, j) {
                report.duplicate_edges += 1;
            }
        }
        Ok((g, report))
    }

    /// Builds a graph on nodes labelled `0..n` from index pairs. Duplicates are
    /// collapsed silently; self-loops are rejected.
    pub fn from_index_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Graph, GraphError> {
        let mut g = Graph::with_nodes((0..n).map(NodeId::from));
        for (i, j) in edges {
            for k in [i, j] {
                if k >= n {
                    return Err(GraphError::IndexOutOfRange { index: k, n });
                }
            }
            if i == j {
                return Err(GraphError::SelfLoop(g.labels[i].clone()));
            }
            g.insert_edge(i, j);
        }
        Ok(g)
    }

    /// Edgeless graph on the given labels (duplicates are merged).
    pub fn with_nodes(labels: impl IntoIterator<Item = NodeId>) -> Graph {
        let mut g = Graph::empty();
        for l in labels {
            g.intern(l);
        }
        g
    }

    fn empty() -> Graph {
        Graph { labels: Vec::new(), index: BTreeMap::new(), adj: Vec::new(), m: 0 }
    }

    fn intern(&mut self, label: NodeId) -> usize {
        if let Some(&i) = self.index.get(&label) {
            return i;
        }
        let i = self.labels.len();
        self.index.insert(label.clone(), i);
        self.labels.push(label);
        self.adj.push(Vec::new());
        i
    }

    /// Adds a node with a fresh label derived from `hint` and returns its index.
    pub(crate) fn add_fresh_node(&mut self, hint: &str) -> usize {
        let mut label = NodeId::new(hint);
        let mut bump = 0usize;
        while self.index.contains_key(&label) {
            bump += 1;
            label = NodeId::new(alloc::format!("{hint}.{bump}"));
        }
        self.intern(label)
    }

    /// Returns false when the edge already existed.
    pub(crate) fn insert_edge(&mut self, i: usize, j: usize) -> bool {
        debug_assert!(i != j);
        match self.adj[i].binary_search(&j) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[i].insert(pos, j);
                let pos = self.adj[j].binary_search(&i).unwrap_err();
                self.adj[j].insert(pos, i);
                self.m += 1;
                true
            }
        }
    }

    /// Returns false when there was no such edge.
    pub(crate) fn remove_edge(&mut self, i: usize, j: usize) -> bool {
        match self.adj[i].binary_search(&j) {
            Ok(pos) => {
                self.adj[i].remove(pos);
                let pos = self.adj[j].binary_search(&i).expect("adjacency is symmetric");
                self.adj[j].remove(pos);
                self.m -= 1;
                true
            }
            Err(_) => false,
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn labels(&self) -> &[NodeId] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &NodeId {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &NodeId) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    /// Edges as index pairs `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, ns)| ns.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Degree sequence in canonical order.
    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn isolates(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&i| self.adj[i].is_empty()).collect()
    }

    /// `delta_j = sum over friends k of 1/d_k`, exactly.
    pub fn delta(&self) -> Result<Vec<Rational>, GraphError> {
        self.delta_as()
    }

    pub fn delta_f64(&self) -> Result<Vec<f64>, GraphError> {
        self.delta_as()
    }

    /// Reciprocal-degree sums in the chosen backend. Fails on the first
    /// isolated node.
    pub fn delta_as<T: Scalar>(&self) -> Result<Vec<T>, GraphError> {
        if let Some(i) = self.adj.iter().position(Vec::is_empty) {
            return Err(GraphError::IsolatedNode(self.labels[i].clone()));
        }
        Ok(self.delta_ignoring_isolates())
    }

    /// Like [`Graph::delta_as`] but isolates get `0` instead of an error.
    pub fn delta_ignoring_isolates<T: Scalar>(&self) -> Vec<T> {
        let recip: Vec<T> = self
            .adj
            .iter()
            .map(|ns| if ns.is_empty() { T::zero() } else { T::one() / T::from_count(ns.len()) })
            .collect();
        self.adj
            .iter()
            .map(|ns| ns.iter().fold(T::zero(), |acc, &k| acc + recip[k].clone()))
            .collect()
    }

    /// Connected components as sorted index lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// The empty graph is not considered connected.
    pub fn is_connected(&self) -> bool {
        self.node_count() > 0 && self.components().len() == 1
    }

    /// All degrees equal across the whole graph.
    pub fn is_regular(&self) -> bool {
        self.adj.windows(2).all(|w| w[0].len() == w[1].len())
    }

    /// Every component is regular on its own (degrees may differ between
    /// components).
    pub fn is_componentwise_regular(&self) -> bool {
        self.components().iter().all(|c| {
            let d0 = self.degree(c[0]);
            c.iter().all(|&i| self.degree(i) == d0)
        })
    }

    /// Number of distinct values in a sequence; a small helper used by tests
    /// and experiment summaries.
    pub fn distinct_count<T: Ord + Clone>(values: &[T]) -> usize {
        values.iter().cloned().collect::<BTreeSet<_>>().len()
    }
}
