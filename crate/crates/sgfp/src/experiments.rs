//! Batch experiments: the random-graph census, the rewiring comparison and the
//! growth table.
//!
//! Every batch element draws from its own derived seed and results are
//! collected in index order, so output does not depend on the thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sgfp_core::construct::{growth_correlation, GrowthState};
use sgfp_core::lp::{max_failing_correlation, HighCorrelationError, HighCorrelationResult};
use sgfp_core::metrics::{self, MetricsError};
use sgfp_core::randgen::{
    configuration_rewire, gnp, preferential_attachment, sample_connected_nonregular, RandGenError, Seed,
    DEFAULT_MAX_TRIES,
};
use sgfp_core::{classify, Correlation, Graph, SgfpKind};
use thiserror::Error;

/// Tolerance for re-verifying an LP witness through the metrics module.
pub const WITNESS_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    RandGen(#[from] RandGenError),
    #[error(transparent)]
    Lp(#[from] HighCorrelationError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("sample {index} (n = {n}): {message}")]
    Inconsistent { n: usize, index: u64, message: String },
    #[error(transparent)]
    Construct(#[from] sgfp_core::construct::ConstructError),
}

/// Runs `f` on a pool of `jobs` threads (0 = rayon's default).
pub fn with_jobs<R: Send>(jobs: usize, f: impl FnOnce() -> R + Send) -> R {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool");
    pool.install(f)
}

/// Recomputes mean, gap and correlation of an LP witness and compares them
/// with what the solver reported.
pub fn verify_witness(g: &Graph, res: &HighCorrelationResult) -> Result<(), String> {
    let check = res.check(g).map_err(|e| e.to_string())?;
    if check.mean.abs() > WITNESS_TOL {
        return Err(format!("witness mean {} is not 0", check.mean));
    }
    if check.gap >= 0.0 || check.gap.is_nan() {
        return Err(format!("witness gap {} is not negative", check.gap));
    }
    if (check.r - res.r_high).abs() > WITNESS_TOL {
        return Err(format!("witness correlation {} differs from r_high {}", check.r, res.r_high));
    }
    Ok(())
}

/// One row of the census table (CSV header = field names).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub n: usize,
    pub samples: usize,
    pub pro_count: usize,
    pub pro_proportion: f64,
    pub mean_r_high_pro: Option<f64>,
    pub mean_r_high_anti: Option<f64>,
    pub mean_r_ddelta_pro: Option<f64>,
    pub mean_r_ddelta_anti: Option<f64>,
    pub base_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensusSample {
    pub kind: SgfpKind,
    pub r_ddelta: f64,
    pub r_high: f64,
}

pub fn census_seed(base: u64, n: usize, index: u64) -> Seed {
    Seed::new(base).derive(n as u64).derive(index)
}

/// Classifies one `G(n, 1/2)` sample and runs the LP search, checking that
/// the two agree: pro graphs carry an exact affine witness and `r_{d,delta} = 1`,
/// anti graphs yield a verified witness with positive correlation.
pub fn census_sample(n: usize, index: u64, base_seed: u64, epsilon: f64) -> Result<CensusSample, ExperimentError> {
    let g = sample_connected_nonregular(n, 0.5, census_seed(base_seed, n, index), DEFAULT_MAX_TRIES)?;
    let fail = |message: String| ExperimentError::Inconsistent { n, index, message };
    let c = classify(&g);
    let r_ddelta = match metrics::r_d_delta(&g) {
        Correlation::Defined(r) => r,
        Correlation::Undefined(u) => return Err(fail(format!("r_ddelta undefined: {}", u.describe()))),
    };
    let res = max_failing_correlation(&g, epsilon)?;
    verify_witness(&g, &res).map_err(fail)?;
    match c.kind {
        SgfpKind::ProSgfp => {
            if c.witness.is_none() || r_ddelta != 1.0 {
                return Err(fail(format!("pro graph without exact fit (r_ddelta = {r_ddelta})")));
            }
            if res.r_high > 0.0 {
                return Err(fail(format!("pro graph has failing correlation {}", res.r_high)));
            }
        }
        SgfpKind::AntiSgfp => {
            if res.r_high <= 0.0 || res.r_high.is_nan() {
                return Err(fail(format!("anti graph but r_high = {}", res.r_high)));
            }
        }
        SgfpKind::RegularOrDegenerate => return Err(fail(c.reason)),
    }
    Ok(CensusSample { kind: c.kind, r_ddelta, r_high: res.r_high })
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

pub fn census_n(n: usize, samples: usize, base_seed: u64, epsilon: f64) -> Result<CensusRecord, ExperimentError> {
    let outcomes: Vec<CensusSample> = (0..samples as u64)
        .into_par_iter()
        .map(|i| census_sample(n, i, base_seed, epsilon))
        .collect::<Result<_, _>>()?;
    let pro = |s: &&CensusSample| s.kind == SgfpKind::ProSgfp;
    let anti = |s: &&CensusSample| s.kind == SgfpKind::AntiSgfp;
    let pro_count = outcomes.iter().filter(pro).count();
    Ok(CensusRecord {
        n,
        samples,
        pro_count,
        pro_proportion: pro_count as f64 / samples as f64,
        mean_r_high_pro: mean(outcomes.iter().filter(pro).map(|s| s.r_high)),
        mean_r_high_anti: mean(outcomes.iter().filter(anti).map(|s| s.r_high)),
        mean_r_ddelta_pro: mean(outcomes.iter().filter(pro).map(|s| s.r_ddelta)),
        mean_r_ddelta_anti: mean(outcomes.iter().filter(anti).map(|s| s.r_ddelta)),
        base_seed,
    })
}

pub fn census(
    nmin: usize,
    nmax: usize,
    samples: usize,
    base_seed: u64,
    epsilon: f64,
) -> Result<Vec<CensusRecord>, ExperimentError> {
    (nmin..=nmax).map(|n| census_n(n, samples, base_seed, epsilon)).collect()
}

/// One row of the rewiring table. Correlations that cannot be computed (a
/// rewired graph that came out regular, say) are left empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewireRecord {
    pub network: String,
    pub r_high_original: Option<f64>,
    pub r_ddelta_original: Option<f64>,
    pub r_high_rewired: Option<f64>,
    pub r_ddelta_rewired: Option<f64>,
    pub seed: u64,
    pub dropped_edges: usize,
    pub rewired_isolates: usize,
}

fn r_high_of(g: &Graph, epsilon: f64) -> Option<f64> {
    let res = max_failing_correlation(g, epsilon).ok()?;
    verify_witness(g, &res).ok()?;
    Some(res.r_high)
}

pub fn rewire_one(id: &str, g: &Graph, seed: Seed, epsilon: f64) -> RewireRecord {
    let out = configuration_rewire(g, seed);
    RewireRecord {
        network: id.to_string(),
        r_high_original: r_high_of(g, epsilon),
        r_ddelta_original: metrics::r_d_delta_ignoring_isolates(g).value(),
        r_high_rewired: r_high_of(&out.graph, epsilon),
        r_ddelta_rewired: metrics::r_d_delta_ignoring_isolates(&out.graph).value(),
        seed: seed.base,
        dropped_edges: out.dropped_edges(),
        rewired_isolates: out.graph.isolates().len(),
    }
}

pub fn rewire_batch(graphs: &[(String, Graph)], base_seed: u64, epsilon: f64) -> Vec<RewireRecord> {
    graphs
        .par_iter()
        .enumerate()
        .map(|(i, (id, g))| rewire_one(id, g, Seed::new(base_seed).derive(i as u64), epsilon))
        .collect()
}

/// Pearson correlation between `r_high` and `r_{d,delta}` across a batch,
/// for the originals and for the rewired graphs. Rows with a missing value
/// are skipped.
pub fn batch_correlations(records: &[RewireRecord]) -> (Correlation, Correlation) {
    let pairs = |f: fn(&RewireRecord) -> (Option<f64>, Option<f64>)| {
        let (x, y): (Vec<f64>, Vec<f64>) = records
            .iter()
            .filter_map(|r| match f(r) {
                (Some(a), Some(b)) => Some((a, b)),
                _ => None,
            })
            .unzip();
        metrics::correlation(&x, &y).expect("equal lengths")
    };
    (
        pairs(|r| (r.r_high_original, r.r_ddelta_original)),
        pairs(|r| (r.r_high_rewired, r.r_ddelta_rewired)),
    )
}

/// Connected, non-regular, anti-SGFP graphs of varied shape: sparse and dense
/// `G(n, p)` draws and preferential-attachment graphs, 20 to 80 nodes.
pub fn synthetic_batch(count: usize, base_seed: u64) -> Vec<(String, Graph)> {
    let root = Seed::new(base_seed);
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut attempt = 0u64;
            loop {
                let s = root.derive(i).derive(attempt);
                attempt += 1;
                let mut rng = s.base;
                let mut next = |m: u64| {
                    rng = Seed::new(rng).derive(1).base;
                    rng % m
                };
                let n = 20 + next(61) as usize;
                let (name, g) = match i % 3 {
                    0 => {
                        let p = 0.05 + 0.45 * (next(1000) as f64 / 1000.0);
                        (format!("gnp-{i}"), gnp(n, p, s).expect("p in range"))
                    }
                    1 => {
                        let m = 1 + next(4) as usize;
                        (format!("pa-{i}"), preferential_attachment(n, m, s).expect("n > m"))
                    }
                    _ => {
                        let p = 0.5 + 0.45 * (next(1000) as f64 / 1000.0);
                        (format!("dense-{i}"), gnp(n, p, s).expect("p in range"))
                    }
                };
                if g.is_connected() && !g.is_regular() && classify(&g).kind == SgfpKind::AntiSgfp {
                    return (name, g);
                }
            }
        })
        .collect()
}

/// One row of the growth table (CSV header = field names).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowRow {
    pub k: usize,
    pub n: usize,
    pub gap: f64,
    pub r: f64,
    pub r_closed_form: f64,
}

/// Grows the eight-node example `k_max` steps, measuring gap and correlation
/// every `every` steps (and at `k_max`).
pub fn grow_table(k_max: usize, every: usize) -> Result<Vec<GrowRow>, ExperimentError> {
    let every = every.max(1);
    let mut st = GrowthState::from_fig1();
    let mut rows = Vec::new();
    for k in 0..=k_max {
        if k > 0 {
            st = st.grow_step()?;
        }
        if k % every == 0 || k == k_max {
            let a = st.attributes_f64();
            let g = st.graph();
            rows.push(GrowRow {
                k,
                n: g.node_count(),
                gap: metrics::singular_gap(g, &a)?,
                r: metrics::degree_attribute_correlation(g, &a)?.value().unwrap_or(f64::NAN),
                r_closed_form: growth_correlation(k as u64),
            });
        }
    }
    Ok(rows)
}

pub fn write_csv<T: Serialize, W: std::io::Write>(rows: &[T], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
