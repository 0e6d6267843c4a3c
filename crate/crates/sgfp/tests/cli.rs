use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sgfp::experiments::CensusRecord;
use sgfp::report::{ClassificationJson, GapReportJson, HighCorrelationJson};

fn sgfp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgfp")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let p = dir.join(name);
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--output", p.to_str().unwrap()]);
    let out = sgfp(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn analyze_fig1() {
    let dir = tempfile::tempdir().unwrap();
    let attrs = dir.path().join("fig1.csv");
    let graph = gen(dir.path(), "fig1.txt", &["fig1", "--attributes", attrs.to_str().unwrap()]);
    let out = sgfp(&["analyze", graph.to_str().unwrap(), attrs.to_str().unwrap(), "--per-node"]);
    assert_eq!(out.status.code(), Some(0));
    let report: GapReportJson = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.singular_gap, -1.125);
    assert_eq!(report.exact.unwrap().singular_gap, "-9/8");
    assert!((report.r_da.unwrap() + 0.8005).abs() < 1e-4);
    assert_eq!(report.nodes.unwrap().len(), 8);

    let out = sgfp(&["--float", "analyze", graph.to_str().unwrap(), attrs.to_str().unwrap()]);
    let report: GapReportJson = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report.exact.is_none());
    assert!((report.singular_gap + 1.125).abs() < 1e-12);
}

#[test]
fn fig1_attribute_file_round_trips() {
    use sgfp_core::construct::example_graph_fig1;
    use sgfp_core::Rational;
    let dir = tempfile::tempdir().unwrap();
    let attrs = dir.path().join("a.csv");
    let graph = gen(dir.path(), "g.txt", &["fig1", "--attributes", attrs.to_str().unwrap()]);
    let (g, _) = sgfp::ingest::read_edge_list(std::io::BufReader::new(fs::File::open(graph).unwrap())).unwrap();
    let a: sgfp_core::AttributeSample<Rational> =
        sgfp::ingest::read_attributes(&g, fs::File::open(attrs).unwrap()).unwrap();
    let (g0, a0) = example_graph_fig1();
    for i in 0..g0.node_count() {
        let j = g.index_of(g0.label(i)).unwrap();
        assert_eq!(a.get(j), a0.get(i));
        assert_eq!(g.degree(j), g0.degree(i));
    }
}

#[test]
fn constant_attributes_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "g.txt", "1 2\n2 3\n");
    let attrs = write(dir.path(), "a.csv", "node,value\n1,5\n2,5\n3,5\n");
    let out = sgfp(&["analyze", graph.to_str().unwrap(), attrs.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let report: GapReportJson = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report.r_da.is_none());
    assert!(report.r_da_undefined.is_some());
}

#[test]
fn bad_input_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "g.txt", "1 2\n2\n");
    let out = sgfp(&["classify", graph.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let out = sgfp(&["classify", "/nonexistent/graph.txt"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn classify_star_and_regular() {
    let dir = tempfile::tempdir().unwrap();
    let star = gen(dir.path(), "star.txt", &["star", "10"]);
    let out = sgfp(&["classify", star.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let c: ClassificationJson = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(c.kind, "ProSGFP");
    assert_eq!(c.x.as_deref(), Some("10/9"));

    let ring = write(dir.path(), "ring.txt", "a b\nb c\nc a\n");
    let out = sgfp(&["classify", ring.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let c: ClassificationJson = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(c.kind, "RegularOrDegenerate");
}

#[test]
fn optimize_path5() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(dir.path(), "p5.txt", &["path", "5"]);
    let out = sgfp(&["optimize", path.to_str().unwrap(), "--witness"]);
    assert_eq!(out.status.code(), Some(0));
    let r: HighCorrelationJson = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(r.r_high > 0.0 && r.r_high <= 0.4082 + 1e-6, "{}", r.r_high);
    assert!(r.gap < 0.0);
    assert_eq!(r.witness.unwrap().len(), 5);

    let out = sgfp(&["optimize", path.to_str().unwrap(), "--ball", "--epsilon", "1e-8"]);
    let r: HighCorrelationJson = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((r.r_high - (1.0 - 1.0 / 1.2f64).sqrt()).abs() < 0.05);

    let ring = write(dir.path(), "ring.txt", "a b\nb c\nc d\nd a\n");
    assert_eq!(sgfp(&["optimize", ring.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn census_is_deterministic_across_jobs() {
    let one = sgfp(&["census", "--nmin", "4", "--nmax", "5", "--samples", "300", "--jobs", "1"]);
    let three = sgfp(&["census", "--nmin", "4", "--nmax", "5", "--samples", "300", "--jobs", "3"]);
    assert!(one.status.success());
    assert_eq!(one.stdout, three.stdout);
    let mut rdr = csv::Reader::from_reader(one.stdout.as_slice());
    let rows: Vec<CensusRecord> = rdr.deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].n, 4);
    assert!(rows[0].pro_count <= rows[0].samples);
    let other_seed = sgfp(&["census", "--nmin", "4", "--nmax", "5", "--samples", "300", "--seed", "1"]);
    assert_ne!(one.stdout, other_seed.stdout);
}

#[test]
fn grow_table() {
    let out = sgfp(&["grow", "1000", "--every", "1000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,n,gap,r,r_closed_form"));
    let row0: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    let row1: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row0[2], -1.125);
    assert!((row0[3] + 0.8005).abs() < 1e-4);
    assert_eq!(row1[0], 1000.0);
    assert!(row1[3] > row0[3] && row1[3] > 0.9);
}

#[test]
fn rewire_experiment_files_and_synthetic() {
    let dir = tempfile::tempdir().unwrap();
    let a = gen(dir.path(), "a.txt", &["gnp", "30", "0.3", "--seed", "4"]);
    let out = sgfp(&["rewire-experiment", a.to_str().unwrap(), "--synthetic", "3", "--jobs", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with("network,r_high_original,r_ddelta_original,r_high_rewired,r_ddelta_rewired,seed,"));
    assert_eq!(text.lines().count(), 5);
    assert!(String::from_utf8_lossy(&out.stderr).contains("corr(r_high, r_ddelta)"));
    let again = sgfp(&["rewire-experiment", a.to_str().unwrap(), "--synthetic", "3", "--jobs", "1"]);
    assert_eq!(again.stdout, out.stdout);
}

#[test]
fn propown_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(dir.path(), "g.txt", "c x\nc y\nc z\n");
    let labels = write(dir.path(), "l.csv", "node,label\nc,M\nx,M\ny,M\nz,NA\n");
    let out = sgfp(&["propown", graph.to_str().unwrap(), labels.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "node,value\nc,2/3\nx,1\ny,1\nz,0\n");

    let attrs = write(dir.path(), "a.csv", &stdout(&out));
    let analyzed = sgfp(&["analyze", graph.to_str().unwrap(), attrs.to_str().unwrap()]);
    let direct = sgfp(&["propown", graph.to_str().unwrap(), labels.to_str().unwrap(), "--analyze"]);
    assert_eq!(analyzed.stdout, direct.stdout);

    let missing = write(dir.path(), "m.csv", "node,label\nc,M\nx,M\n");
    let out = sgfp(&["propown", graph.to_str().unwrap(), missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown node"));
}

/// Search seeded random graphs and two-letter labelings for a `prop_own`
/// sample with positive degree correlation and negative gap, then check the
/// command-line pipeline reports both signs from the written files.
#[test]
fn planted_labels_reach_the_failing_quadrant() {
    use sgfp::ingest::{prop_own, write_edge_list, LabelTable};
    use sgfp_core::metrics::{degree_attribute_correlation, singular_gap};
    use sgfp_core::randgen::{sample_connected_nonregular, Seed};
    use sgfp_core::Rational;

    let planted = (0..2000u64).find_map(|i| {
        let s = Seed::new(31).derive(i);
        let g = sample_connected_nonregular(10, 0.3, s, 1000).unwrap();
        let bits = s.derive(1).base;
        let labels = LabelTable::new((0..10).map(|k| if bits >> k & 1 == 1 { "A" } else { "B" }.to_string()).collect());
        let a = prop_own(&g, &labels);
        let r = degree_attribute_correlation(&g, &a).unwrap().value()?;
        let gap: Rational = singular_gap(&g, &a).unwrap();
        (r > 0.0 && gap < Rational::from_integer(0.into())).then_some((g, labels))
    });
    let (g, labels) = planted.expect("a failing labeling exists among the candidates");

    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    write_edge_list(&g, fs::File::create(&graph).unwrap()).unwrap();
    let mut text = String::from("node,label\n");
    for i in 0..g.node_count() {
        text.push_str(&format!("{},{}\n", g.label(i), labels.get(i)));
    }
    let labels = write(dir.path(), "l.csv", &text);
    let out = sgfp(&["propown", graph.to_str().unwrap(), labels.to_str().unwrap(), "--analyze"]);
    let report: GapReportJson = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report.r_da.unwrap() > 0.0 && report.singular_gap < 0.0, "{report:?}");
}

#[test]
fn gen_families() {
    let out = sgfp(&["gen", "path", "4"]);
    assert_eq!(stdout(&out), "0 1\n1 2\n2 3\n");
    let out = sgfp(&["gen", "knee", "4"]);
    assert_eq!(stdout(&out).lines().count(), 5);
    let out = sgfp(&["gen", "star", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let a = sgfp(&["gen", "gnp", "12", "--seed", "3"]);
    let b = sgfp(&["gen", "gnp", "12", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let out = sgfp(&["gen", "fig4"]);
    assert_eq!(stdout(&out), "1 2\n2 3\n2 4\n3 4\n");
}
