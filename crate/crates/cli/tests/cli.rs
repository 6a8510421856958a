use std::path::Path;
use std::process::{Command, Output};

use mux_overhead::analysis::{read_csv, CsvRow};
use mux_overhead::prelude::*;
use mux_overhead_cli::manifest::validate_manifest;
use tempfile::TempDir;

fn muxov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_muxov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let o = muxov(args);
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
}

fn rows(path: &Path) -> Vec<CsvRow> {
    read_csv(std::fs::File::open(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn k_one_gives_zero_overhead() {
    let d = TempDir::new().unwrap();
    ok(&["bench-random", "--spec", "grid5", "--gates", "300", "--k", "1", "--seeds", "4", "--out", s(d.path())]);
    let r = rows(&d.path().join("results.csv"));
    assert_eq!(r.len(), 4);
    assert!(r.iter().all(|r| r.abs_overhead_ns == 0 && r.rel_overhead == 1.0));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let base = ["bench-random", "--spec", "grid5", "--gates", "200,400", "--ks", "2,5,25", "--seeds", "3", "--strategy", "clustered"];
    let mut first = base.to_vec();
    first.extend(["--out", s(a.path())]);
    let mut second = base.to_vec();
    second.extend(["--out", s(b.path()), "--jobs", "1"]);
    ok(&first);
    ok(&second);
    for f in ["results.csv", "breakdown.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f} differs"
        );
    }
    // canonical order: gates, then k, then seed
    let r = rows(&a.path().join("results.csv"));
    let keys: Vec<(String, usize, u64)> = r.iter().map(|r| (r.circuit.clone(), r.k, r.seed)).collect();
    let mut sorted = keys.clone();
    sorted.sort_by_key(|(c, k, s)| (c.trim_start_matches("random-").parse::<usize>().unwrap(), *k, *s));
    assert_eq!(keys, sorted);
}

#[test]
fn manifest_validates_and_hashes_inputs() {
    let d = TempDir::new().unwrap();
    let spec_path = d.path().join("line.json");
    let spec = grid_spec(square_grid(1, 4).unwrap());
    std::fs::write(&spec_path, spec.to_json()).unwrap();
    let out = d.path().join("out");
    ok(&["bench-random", "--spec", s(&spec_path), "--gates", "50", "--ks", "2,4", "--seeds", "2", "--seed", "9", "--out", s(&out)]);
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    validate_manifest(&m).unwrap();
    assert_eq!(m["seeds"], serde_json::json!([9, 10]));
    let bytes = std::fs::read(&spec_path).unwrap();
    assert_eq!(m["inputs"][0]["sha256"], mux_overhead_cli::manifest::sha256_hex(&bytes));
    for o in m["outputs"].as_array().unwrap() {
        assert!(out.join(o.as_str().unwrap()).is_file());
    }
}

#[test]
fn ghz_on_small_grid_has_sub_microsecond_overhead() {
    let d = TempDir::new().unwrap();
    ok(&["bench-algo", "ghz", "--spec", "grid5", "--k", "2", "--seeds", "5", "--out", s(d.path())]);
    let r = rows(&d.path().join("results.csv"));
    assert!(r.iter().all(|r| r.abs_overhead_ns < 1000));
}

#[test]
fn algo_output_sorted_by_gate_count_and_qasm_matches_builtin() {
    let d = TempDir::new().unwrap();
    let qasm = d.path().join("myqft.qasm");
    std::fs::write(&qasm, emit_qasm(&algo_circuit(Algorithm::Qft, 6, 0).unwrap())).unwrap();
    let out = d.path().join("out");
    ok(&["bench-algo", s(&qasm), "qft", "ghz", "--qubits", "6", "--spec", "grid5", "--ks", "2,3", "--seeds", "2", "--out", s(&out)]);
    let r = rows(&out.join("results.csv"));
    let order: Vec<&str> = r.iter().map(|r| r.circuit.as_str()).collect();
    assert_eq!(order.first(), Some(&"ghz-6"));
    let from_file: Vec<_> = r.iter().filter(|r| r.circuit == "myqft").collect();
    let builtin: Vec<_> = r.iter().filter(|r| r.circuit == "qft-6").collect();
    assert_eq!(from_file.len(), 4);
    for (a, b) in from_file.iter().zip(&builtin) {
        assert_eq!(
            (a.k, a.seed, a.t_routed_ns, a.t_serialized_ns),
            (b.k, b.seed, b.t_routed_ns, b.t_serialized_ns)
        );
    }
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["inputs"].as_array().unwrap().len(), 1);
}

#[test]
fn exit_codes() {
    let d = TempDir::new().unwrap();
    let o = muxov(&["bench-algo", "shor", "--out", s(d.path())]);
    assert_eq!(o.status.code(), Some(2));
    let o = muxov(&["bench-random", "--k", "26", "--spec", "grid5", "--out", s(d.path())]);
    assert_eq!(o.status.code(), Some(2));
    let o = muxov(&["bench-random", "--order", "random"]);
    assert_eq!(o.status.code(), Some(2));
    let o = muxov(&["bench-random", "--tsw-ns", "30", "--out", s(d.path())]);
    assert_eq!(o.status.code(), Some(2), "switching slower than 1q gates is invalid");
    let o = muxov(&["fit", s(&d.path().join("missing.csv")), "--out", s(d.path())]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn toy_and_queue_csvs() {
    let d = TempDir::new().unwrap();
    ok(&["toy", "--ks", "1,2,25", "--p1", "1.0", "--p2", "0", "--trials", "10", "--out", s(d.path())]);
    let toy = std::fs::read_to_string(d.path().join("toy.csv")).unwrap();
    let mut lines = toy.lines();
    assert_eq!(lines.next(), Some("k,mean_factor,std_factor"));
    assert_eq!(lines.next(), Some("1,1.0,0.0"));
    assert_eq!(lines.nth(1), Some("25,25.0,0.0"));

    ok(&["queue", "--eta", "2", "--ks", "1,4", "--trials", "20000", "--out", s(d.path())]);
    let q = std::fs::read_to_string(d.path().join("queue.csv")).unwrap();
    let mut lines = q.lines();
    assert_eq!(lines.next(), Some("k,mc_mean,analytic"));
    for (line, exact) in lines.zip([0.5, 25.0 / 24.0]) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[2] - exact).abs() < 1e-12);
        assert!((v[1] - exact).abs() / exact < 0.03);
    }
}

fn synthetic_csv(path: &Path, p: f64, n1: usize, t1: f64) {
    let mut text = String::from(
        "circuit,algo,n,k,strategy,seed,t_translated_ns,t_routed_ns,t_serialized_ns,abs_overhead_ns,rel_overhead,N1,N2,D,rho1,rho2\n",
    );
    for k in [1usize, 2, 4, 8, 16] {
        // integer ns, so the planted value is recovered to rounding
        let abs = (p * n1 as f64 * t1 * (k as f64).ln()).round() as u64;
        let base = 100_000;
        text.push_str(&format!(
            "c,random,25,{k},trivial,0,{base},{base},{},{abs},{},{n1},10,5,0.1,0.1\n",
            base + abs,
            (base + abs) as f64 / base as f64
        ));
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn fit_recovers_planted_coefficient() {
    let d = TempDir::new().unwrap();
    let csv = d.path().join("in.csv");
    synthetic_csv(&csv, 0.75, 1000, 20.0);
    ok(&["fit", s(&csv), "--spec", "grid5", "--out", s(d.path())]);
    let f: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("fit.json")).unwrap()).unwrap();
    let keys: Vec<&String> = f.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["log_base", "p", "residual_linear", "residual_log", "stderr"]);
    assert!((f["p"].as_f64().unwrap() - 0.75).abs() < 1e-4);
    assert_eq!(f["log_base"], "e");
    assert!(f["residual_log"].as_f64().unwrap() < f["residual_linear"].as_f64().unwrap());
}

#[test]
fn plots() {
    let d = TempDir::new().unwrap();
    let empty = d.path().join("empty.csv");
    std::fs::write(&empty, "circuit,algo,n,k,strategy,seed,t_translated_ns,t_routed_ns,t_serialized_ns,abs_overhead_ns,rel_overhead,N1,N2,D,rho1,rho2\n").unwrap();
    assert_eq!(muxov(&["plot", s(&empty), "--out", s(d.path())]).status.code(), Some(2));

    let run = d.path().join("run");
    ok(&["bench-random", "--spec", "grid5", "--gates", "100,200,300", "--ks", "1,2,5,25", "--seeds", "4", "--out", s(&run)]);
    let results = run.join("results.csv");
    ok(&["plot", s(&results), "--kind", "lines", "--out", s(&run)]);
    let svg = std::fs::read_to_string(run.join("lines.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 4);

    ok(&["plot", s(&results), "--kind", "hist", "--bins", "7", "--out", s(&run)]);
    let svg = std::fs::read_to_string(run.join("hist.svg")).unwrap();
    // independent binning: bin index by comparison against explicit edges
    let r = rows(&results);
    let lo = r.iter().map(|r| r.rel_overhead).fold(f64::INFINITY, f64::min);
    let hi = r.iter().map(|r| r.rel_overhead).fold(f64::NEG_INFINITY, f64::max);
    let edges: Vec<f64> = (0..=7).map(|i| lo + (hi - lo) * i as f64 / 7.0).collect();
    for k in [1usize, 2, 5, 25] {
        let mut counts = [0usize; 7];
        for row in r.iter().filter(|x| x.k == k) {
            let b = (0..7).rev().find(|&b| row.rel_overhead >= edges[b]).unwrap();
            counts[b] += 1;
        }
        let want = counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        assert!(
            svg.contains(&format!("data-k=\"{k}\" data-counts=\"{want}\"")),
            "k={k}: expected counts {want}"
        );
    }

    ok(&["plot", s(&results), "--kind", "breakdown", "--out", s(&run)]);
    let svg = std::fs::read_to_string(run.join("breakdown.svg")).unwrap();
    assert_eq!(svg.matches("class=\"bar\"").count(), 4);
}

#[test]
fn random_bench_overhead_linear_in_gate_count() {
    let d = TempDir::new().unwrap();
    ok(&["bench-random", "--spec", "grid5", "--gates", "1000,2000,3000,4000,5000", "--k", "5", "--seeds", "40", "--out", s(d.path())]);
    let text = std::fs::read_to_string(d.path().join("breakdown.csv")).unwrap();
    let pts: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<&str> = l.split(',').collect();
            (v[0].parse().unwrap(), v[4].parse().unwrap())
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r2 = sxy * sxy / (sxx * syy);
    assert!(r2 > 0.99, "R^2 = {r2}");
}
