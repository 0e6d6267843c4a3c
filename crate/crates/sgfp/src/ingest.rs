//! Edge lists, attribute and label CSV files, and the `prop_own` attribute.
//!
//! Edge list: one edge per line, two whitespace-separated node labels; blank
//! lines and lines starting with `#` are skipped. Node order is order of first
//! appearance. Attributes: CSV with header `node,value`, values as decimals or
//! `p/q` fractions, `NA` for undefined. Labels: CSV with
//! header `node,label`, where the literal `NA` marks a missing label (it is
//! still a category of its own).

use std::collections::HashSet;
use std::io::{self, BufRead, Read, Write};

use sgfp_core::graph::BuildReport;
use sgfp_core::rational::{parse_rational, Rational};
use sgfp_core::{AttributeSample, Graph, GraphError, NodeId, Scalar};
use thiserror::Error;

pub const MISSING_LABEL: &str = "NA";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    /// A row names a node the graph does not have, or a graph node has no row.
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("duplicate row for node `{0}`")]
    DuplicateRow(NodeId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl IngestError {
    fn parse(line: u64, message: impl Into<String>) -> Self {
        IngestError::Parse { line, message: message.into() }
    }
}

pub fn read_edge_list<R: BufRead>(source: R) -> Result<(Graph, BuildReport), IngestError> {
    let mut edges = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let no = i as u64 + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let mut fields = text.split_whitespace();
        match (fields.next(), fields.next(), fields.next()) {
            (Some(u), Some(v), None) => {
                if u == v {
                    return Err(IngestError::parse(no, format!("self-loop on `{u}`")));
                }
                edges.push((NodeId::from(u), NodeId::from(v)));
            }
            _ => return Err(IngestError::parse(no, "expected exactly two node labels")),
        }
    }
    Ok(Graph::from_edges(edges)?)
}

/// Writes the canonical text form: each edge with its endpoints in label
/// order, edges sorted. Isolated nodes cannot be expressed and are omitted.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> io::Result<()> {
    let mut rows: Vec<(&str, &str)> = g
        .edges()
        .map(|(i, j)| {
            let (a, b) = (g.label(i).as_str(), g.label(j).as_str());
            if a <= b { (a, b) } else { (b, a) }
        })
        .collect();
    rows.sort_unstable();
    for (a, b) in rows {
        writeln!(out, "{a} {b}")?;
    }
    Ok(())
}

/// Numeric types an attribute file can be read into.
pub trait AttributeValue: Scalar {
    fn parse_value(text: &str) -> Option<Self>;
    fn format_value(&self) -> String;
}

impl AttributeValue for f64 {
    fn parse_value(text: &str) -> Option<Self> {
        text.trim().parse().ok().filter(|v: &f64| v.is_finite())
    }

    fn format_value(&self) -> String {
        format!("{self}")
    }
}

impl AttributeValue for Rational {
    fn parse_value(text: &str) -> Option<Self> {
        parse_rational(text).ok()
    }

    fn format_value(&self) -> String {
        self.to_string()
    }
}

fn csv_reader<R: Read>(source: R, expected: [&str; 2]) -> Result<csv::Reader<R>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let headers = rdr.headers().map_err(|e| IngestError::parse(1, e.to_string()))?;
    if headers.len() != 2 || headers.get(0) != Some(expected[0]) || headers.get(1) != Some(expected[1]) {
        return Err(IngestError::parse(1, format!("expected header `{},{}`", expected[0], expected[1])));
    }
    Ok(rdr)
}

/// Reads `node,<column>` rows and matches them to graph nodes. Every graph
/// node must appear exactly once.
fn read_keyed_rows<R: Read, T>(
    g: &Graph,
    source: R,
    column: &str,
    mut parse: impl FnMut(&str) -> Option<T>,
) -> Result<Vec<T>, IngestError> {
    let mut rdr = csv_reader(source, ["node", column])?;
    let mut slots: Vec<Option<T>> = (0..g.node_count()).map(|_| None).collect();
    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            IngestError::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let node = NodeId::from(&record[0]);
        let Some(i) = g.index_of(&node) else {
            return Err(IngestError::UnknownNode(node));
        };
        if !seen.insert(i) {
            return Err(IngestError::DuplicateRow(node));
        }
        let value = parse(&record[1]).ok_or_else(|| {
            IngestError::parse(line, format!("bad {column} `{}` for node `{node}`", &record[1]))
        })?;
        slots[i] = Some(value);
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| IngestError::UnknownNode(g.label(i).clone())))
        .collect()
}

pub fn read_attributes<T: AttributeValue, R: Read>(
    g: &Graph,
    source: R,
) -> Result<AttributeSample<T>, IngestError> {
    let values = read_keyed_rows(g, source, "value", |s| {
        if s == MISSING_LABEL {
            Some(None)
        } else {
            T::parse_value(s).map(Some)
        }
    })?;
    Ok(AttributeSample::from_options(values))
}

/// `node,value` CSV in canonical node order; undefined entries are written as
/// `NA`.
pub fn write_attributes<T: AttributeValue, W: Write>(
    g: &Graph,
    a: &AttributeSample<T>,
    out: W,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "value"])?;
    for i in 0..g.node_count() {
        let value = a.get(i).map_or_else(|| MISSING_LABEL.to_string(), |v| v.format_value());
        w.write_record([g.label(i).as_str(), &value])?;
    }
    w.flush()?;
    Ok(())
}

/// One categorical label per node, in canonical node order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelTable {
    labels: Vec<String>,
}

impl LabelTable {
    pub fn new(labels: Vec<String>) -> Self {
        LabelTable { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn is_missing(&self, i: usize) -> bool {
        self.labels[i] == MISSING_LABEL
    }
}

pub fn read_labels<R: Read>(g: &Graph, source: R) -> Result<LabelTable, IngestError> {
    let labels = read_keyed_rows(g, source, "label", |s| Some(s.to_string()))?;
    Ok(LabelTable::new(labels))
}

/// Fraction of each node's neighbours that share its label. `NA` matches
/// `NA`. Isolated nodes are undefined.
pub fn prop_own(g: &Graph, labels: &LabelTable) -> AttributeSample<Rational> {
    assert_eq!(labels.len(), g.node_count(), "label table does not match graph");
    let values = (0..g.node_count())
        .map(|i| {
            let d = g.degree(i);
            if d == 0 {
                return None;
            }
            let same = g.neighbors(i).iter().filter(|&&j| labels.get(j) == labels.get(i)).count();
            Some(Rational::new(same.into(), d.into()))
        })
        .collect();
    AttributeSample::from_options(values)
}
