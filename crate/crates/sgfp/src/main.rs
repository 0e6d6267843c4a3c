use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sgfp::experiments;
use sgfp::ingest::{self, AttributeValue};
use sgfp::report::{ClassificationJson, GapReportJson, HighCorrelationJson};
use sgfp_core::construct::{self, example_graph_fig1, example_graph_fig4};
use sgfp_core::lp::{max_failing_correlation, max_failing_correlation_l2, HighCorrelationError};
use sgfp_core::metrics::{self, MetricsError};
use sgfp_core::randgen::{gnp, Seed};
use sgfp_core::{classify, AttributeSample, Graph, Rational, SgfpKind};

#[derive(Parser)]
#[command(name = "sgfp", version, about = "Node-level friendship paradox gaps, classification and experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Base seed for every random draw.
    #[arg(long, global = true, default_value_t = 20240501)]
    seed: u64,
    /// Gap slack for the LP search.
    #[arg(long, global = true, default_value_t = 1e-3)]
    epsilon: f64,
    /// Samples per graph size (census).
    #[arg(long, global = true, default_value_t = 10_000)]
    samples: usize,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Exact rational arithmetic (default).
    #[arg(long, global = true, conflicts_with = "float")]
    rational: bool,
    /// Floating-point arithmetic.
    #[arg(long, global = true)]
    float: bool,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Gap and correlation report for a graph and an attribute file (JSON).
    Analyze {
        graph: PathBuf,
        attributes: PathBuf,
        /// Include per-node degree, delta, attribute and friend mean.
        #[arg(long)]
        per_node: bool,
    },
    /// Exact pro/anti classification (JSON).
    Classify { graph: PathBuf },
    /// Highest failing correlation found by the LP search (JSON).
    Optimize {
        graph: PathBuf,
        /// Include the witness sample.
        #[arg(long)]
        witness: bool,
        /// Normalize by the unit ball (cutting planes) instead of the box.
        #[arg(long)]
        ball: bool,
    },
    /// Census of connected non-regular G(n, 1/2) graphs (CSV).
    Census {
        #[arg(long, default_value_t = 3)]
        nmin: usize,
        #[arg(long, default_value_t = 7)]
        nmax: usize,
    },
    /// Growth construction from the eight-node example (CSV: k,n,gap,r,r_closed_form).
    Grow {
        #[arg(default_value_t = 100)]
        k: usize,
        /// Emit every this many steps.
        #[arg(long, default_value_t = 1)]
        every: usize,
    },
    /// r_high and r_{d,delta} before and after configuration-model rewiring (CSV).
    RewireExperiment {
        graphs: Vec<PathBuf>,
        /// Add this many generated anti-SGFP graphs to the batch.
        #[arg(long, default_value_t = 0)]
        synthetic: usize,
    },
    /// Fraction of each node's friends sharing its label (CSV node,value, or JSON with --analyze).
    Propown {
        graph: PathBuf,
        labels: PathBuf,
        /// Report the gap and correlation of the derived attribute instead.
        #[arg(long)]
        analyze: bool,
    },
    /// Write a generated graph as an edge list.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
}

#[derive(Subcommand)]
enum Family {
    Gnp {
        n: usize,
        #[arg(default_value_t = 0.5)]
        p: f64,
    },
    Star { n: usize },
    Knee { n: usize },
    Path { n: usize },
    /// The eight-node example; `--attributes` also writes its sample.
    Fig1 {
        #[arg(long)]
        attributes: Option<PathBuf>,
    },
    /// The four-node example; `--attributes` writes sample 0, 1 or 2.
    Fig4 {
        #[arg(long)]
        attributes: Option<PathBuf>,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..3))]
        sample: u8,
    },
}

/// Distinguishes degenerate input (exit 2) from other failures (exit 1).
enum Failure {
    Degenerate(String),
    Other(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Other(e.into())
    }
}

type Outcome = Result<(), Failure>;

struct Sink {
    inner: Box<dyn Write>,
}

impl Sink {
    fn open(path: Option<&Path>) -> anyhow::Result<Sink> {
        let inner: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Sink { inner })
    }

    fn json<T: Serialize>(&mut self, value: &T) -> anyhow::Result<()> {
        serde_json::to_writer_pretty(&mut self.inner, value)?;
        writeln!(self.inner)?;
        self.inner.flush()?;
        Ok(())
    }
}

fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

fn load_graph(path: &Path) -> anyhow::Result<Graph> {
    let (g, report) = ingest::read_edge_list(open(path)?).with_context(|| format!("reading {}", path.display()))?;
    if report.duplicate_edges > 0 {
        eprintln!("{}: collapsed {} duplicate edge(s)", path.display(), report.duplicate_edges);
    }
    Ok(g)
}

fn degenerate_metrics(e: MetricsError) -> Failure {
    match e {
        MetricsError::AllIsolates | MetricsError::EmptyGraph => Failure::Degenerate(e.to_string()),
        other => Failure::Other(other.into()),
    }
}

fn analyze_sample<T: AttributeValue>(g: &Graph, a: &AttributeSample<T>, per_node: bool, sink: &mut Sink) -> Outcome {
    let report = metrics::analyze(g, a).map_err(degenerate_metrics)?;
    let json = GapReportJson::from_report(g, &report, per_node);
    sink.json(&json)?;
    match json.degenerate_reason() {
        Some(reason) => Err(Failure::Degenerate(format!("degree-attribute correlation undefined: {reason}"))),
        None => Ok(()),
    }
}

fn analyze<T: AttributeValue>(graph: &Path, attrs: &Path, per_node: bool, sink: &mut Sink) -> Outcome {
    let g = load_graph(graph)?;
    let a: AttributeSample<T> =
        ingest::read_attributes(&g, open(attrs)?).with_context(|| format!("reading {}", attrs.display()))?;
    analyze_sample(&g, &a, per_node, sink)
}

fn cmd_classify(path: &Path, sink: &mut Sink) -> Outcome {
    let g = load_graph(path)?;
    let c = classify(&g);
    sink.json(&ClassificationJson::new(&c, metrics::r_d_delta(&g)))?;
    if c.kind == SgfpKind::RegularOrDegenerate {
        return Err(Failure::Degenerate(c.reason));
    }
    Ok(())
}

fn cmd_optimize(path: &Path, epsilon: f64, witness: bool, ball: bool, sink: &mut Sink) -> Outcome {
    let g = load_graph(path)?;
    let res = if ball { max_failing_correlation_l2(&g, epsilon, 400) } else { max_failing_correlation(&g, epsilon) };
    let res = res.map_err(|e| match e {
        HighCorrelationError::DegenerateGraph(_) => Failure::Degenerate(e.to_string()),
        other => Failure::Other(other.into()),
    })?;
    experiments::verify_witness(&g, &res).map_err(|m| anyhow::anyhow!("witness failed verification: {m}"))?;
    sink.json(&HighCorrelationJson::new(&g, &res, witness))?;
    Ok(())
}

fn write_csv<T: Serialize>(rows: &[T], sink: &mut Sink) -> anyhow::Result<()> {
    experiments::write_csv(rows, &mut sink.inner)?;
    Ok(())
}

fn cmd_gen(family: &Family, seed: u64, sink: &mut Sink) -> anyhow::Result<()> {
    let g = match family {
        Family::Gnp { n, p } => gnp(*n, *p, Seed::new(seed))?,
        Family::Star { n } => construct::star(*n)?,
        Family::Knee { n } => construct::knee(*n)?,
        Family::Path { n } => construct::path(*n)?,
        Family::Fig1 { attributes } => {
            let (g, a) = example_graph_fig1();
            if let Some(p) = attributes {
                ingest::write_attributes(&g, &a, File::create(p)?)?;
            }
            g
        }
        Family::Fig4 { attributes, sample } => {
            let (g, samples) = example_graph_fig4();
            if let Some(p) = attributes {
                ingest::write_attributes(&g, &samples[*sample as usize], File::create(p)?)?;
            }
            g
        }
    };
    if !g.isolates().is_empty() {
        eprintln!("{} isolated node(s) cannot be written to an edge list", g.isolates().len());
    }
    ingest::write_edge_list(&g, &mut sink.inner)?;
    sink.inner.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let gl = &cli.global;
    if !(gl.epsilon > 0.0 && gl.epsilon.is_finite()) {
        return Err(anyhow::anyhow!("--epsilon must be positive").into());
    }
    let exact = !gl.float;
    let mut sink = Sink::open(gl.output.as_deref())?;
    match &cli.command {
        Command::Analyze { graph, attributes, per_node } => {
            if exact {
                analyze::<Rational>(graph, attributes, *per_node, &mut sink)
            } else {
                analyze::<f64>(graph, attributes, *per_node, &mut sink)
            }
        }
        Command::Classify { graph } => cmd_classify(graph, &mut sink),
        Command::Optimize { graph, witness, ball } => cmd_optimize(graph, gl.epsilon, *witness, *ball, &mut sink),
        Command::Census { nmin, nmax } => {
            if *nmin < 3 || nmin > nmax {
                return Err(anyhow::anyhow!("need 3 <= nmin <= nmax").into());
            }
            if *nmax > 10 {
                eprintln!("warning: n > 10 is slow and outside the tested range");
            }
            let rows = experiments::with_jobs(gl.jobs, || {
                experiments::census(*nmin, *nmax, gl.samples, gl.seed, gl.epsilon)
            })?;
            write_csv(&rows, &mut sink)?;
            Ok(())
        }
        Command::Grow { k, every } => {
            write_csv(&experiments::grow_table(*k, *every)?, &mut sink)?;
            Ok(())
        }
        Command::RewireExperiment { graphs, synthetic } => {
            let mut batch = Vec::new();
            for p in graphs {
                batch.push((p.display().to_string(), load_graph(p)?));
            }
            if batch.is_empty() && *synthetic == 0 {
                return Err(anyhow::anyhow!("no graphs: pass edge-list files or --synthetic N").into());
            }
            let rows = experiments::with_jobs(gl.jobs, || {
                batch.extend(experiments::synthetic_batch(*synthetic, gl.seed));
                experiments::rewire_batch(&batch, gl.seed, gl.epsilon)
            });
            write_csv(&rows, &mut sink)?;
            let (orig, rewired) = experiments::batch_correlations(&rows);
            let show = |c: sgfp_core::Correlation| c.value().map_or("undefined".to_string(), |v| format!("{v:.4}"));
            eprintln!("corr(r_high, r_ddelta): original {}, rewired {}", show(orig), show(rewired));
            Ok(())
        }
        Command::Propown { graph, labels, analyze } => {
            let g = load_graph(graph)?;
            let table = ingest::read_labels(&g, open(labels)?).with_context(|| format!("reading {}", labels.display()))?;
            let a = ingest::prop_own(&g, &table);
            if *analyze {
                if exact {
                    analyze_sample(&g, &a, false, &mut sink)
                } else {
                    analyze_sample(&g, &a.to_f64(), false, &mut sink)
                }
            } else {
                if exact {
                    ingest::write_attributes(&g, &a, &mut sink.inner)?;
                } else {
                    ingest::write_attributes(&g, &a.to_f64(), &mut sink.inner)?;
                }
                Ok(())
            }
        }
        Command::Gen { family } => Ok(cmd_gen(family, gl.seed, &mut sink)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Degenerate(reason)) => {
            eprintln!("degenerate input: {reason}");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
