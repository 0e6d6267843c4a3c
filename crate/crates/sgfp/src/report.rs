//! JSON reports for the analyze, classify and optimize commands.
//!
//! Each report is a plain serde struct, so the same type parses its own
//! output. Exact rationals are written as strings (`"-9/8"`), floats as JSON
//! numbers; undefined correlations are `null` with a reason field alongside.

use serde::{Deserialize, Serialize};
use sgfp_core::lp::HighCorrelationResult;
use sgfp_core::{Classification, Correlation, GapReport, Graph, Scalar};

use crate::ingest::AttributeValue;

fn split(c: Correlation) -> (Option<f64>, Option<String>) {
    match c {
        Correlation::Defined(r) => (Some(r), None),
        Correlation::Undefined(u) => (None, Some(u.describe().to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactGaps {
    pub singular_gap: String,
    pub list_gap: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRow {
    pub node: String,
    pub degree: usize,
    pub delta: f64,
    pub attribute: Option<f64>,
    pub second_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReportJson {
    pub n: usize,
    pub m: usize,
    pub singular_gap: f64,
    pub list_gap: f64,
    pub r_da: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_da_undefined: Option<String>,
    pub r_ddelta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_ddelta_undefined: Option<String>,
    pub excluded_isolates: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactGaps>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<NodeRow>>,
}

impl GapReportJson {
    pub fn from_report<T: AttributeValue>(g: &Graph, r: &GapReport<T>, per_node: bool) -> Self {
        let (r_da, r_da_undefined) = split(r.r_da);
        let (r_ddelta, r_ddelta_undefined) = split(r.r_ddelta);
        let exact = T::is_exact().then(|| ExactGaps {
            singular_gap: r.singular_gap.format_value(),
            list_gap: r.list_gap.format_value(),
        });
        let nodes = per_node.then(|| {
            (0..r.n)
                .map(|i| NodeRow {
                    node: g.label(i).to_string(),
                    degree: r.degrees[i],
                    delta: r.delta[i].to_f64_lossy(),
                    attribute: r.attributes[i].as_ref().map(Scalar::to_f64_lossy),
                    second_order: r.second_order[i].as_ref().map(Scalar::to_f64_lossy),
                })
                .collect()
        });
        GapReportJson {
            n: r.n,
            m: r.m,
            singular_gap: r.singular_gap.to_f64_lossy(),
            list_gap: r.list_gap.to_f64_lossy(),
            r_da,
            r_da_undefined,
            r_ddelta,
            r_ddelta_undefined,
            excluded_isolates: r.excluded_isolates,
            exact,
            nodes,
        }
    }

    /// Why the degree-attribute correlation is undefined, if it is.
    pub fn degenerate_reason(&self) -> Option<&str> {
        self.r_da_undefined.as_deref()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationJson {
    /// `ProSGFP`, `AntiSGFP` or `RegularOrDegenerate`.
    pub kind: String,
    /// Slope of `delta = x d + z`, exact; present for pro graphs.
    pub x: Option<String>,
    pub z: Option<String>,
    pub r_ddelta: Option<f64>,
    pub reason: String,
}

impl ClassificationJson {
    pub fn new(c: &Classification, r_ddelta: Correlation) -> Self {
        ClassificationJson {
            kind: c.kind.as_str().to_string(),
            x: c.witness.as_ref().map(|w| w.slope.to_string()),
            z: c.witness.as_ref().map(|w| w.intercept.to_string()),
            r_ddelta: r_ddelta.value(),
            reason: c.reason.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub node: String,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighCorrelationJson {
    pub r_high: f64,
    pub gap: f64,
    pub epsilon: f64,
    pub objective: f64,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<WitnessEntry>>,
}

impl HighCorrelationJson {
    pub fn new(g: &Graph, r: &HighCorrelationResult, with_witness: bool) -> Self {
        let witness = with_witness.then(|| {
            (0..g.node_count())
                .map(|i| WitnessEntry { node: g.label(i).to_string(), value: r.witness.get(i).copied() })
                .collect()
        });
        HighCorrelationJson {
            r_high: r.r_high,
            gap: r.gap,
            epsilon: r.epsilon,
            objective: r.objective,
            iterations: r.iterations,
            witness,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sgfp_core::construct::{example_graph_fig1, star};
    use sgfp_core::metrics::{analyze, r_d_delta};
    use sgfp_core::Rational;

    #[test]
    fn gap_report_round_trip() {
        let (g, a) = example_graph_fig1();
        let r = analyze::<Rational>(&g, &a).unwrap();
        let json = GapReportJson::from_report(&g, &r, true);
        assert_eq!(json.exact.as_ref().unwrap().singular_gap, "-9/8");
        assert_eq!(json.singular_gap, -1.125);
        let text = serde_json::to_string(&json).unwrap();
        let back: GapReportJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, json);
    }

    #[test]
    fn classification_round_trip() {
        let g = star(10).unwrap();
        let c = sgfp_core::classify(&g);
        let json = ClassificationJson::new(&c, r_d_delta(&g));
        assert_eq!(json.kind, "ProSGFP");
        assert_eq!(json.x.as_deref(), Some("10/9"));
        assert_eq!(json.r_ddelta, Some(1.0));
        let back: ClassificationJson = serde_json::from_str(&serde_json::to_string(&json).unwrap()).unwrap();
        assert_eq!(back, json);
    }
}
