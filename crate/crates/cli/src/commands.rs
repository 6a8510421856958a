use std::path::{Path, PathBuf};

use serde::Serialize;

use mux_overhead::analysis::{report_for_routed, translate, write_csv, read_csv, CsvRow};
use mux_overhead::models::{toy_sweep, No2qRule};
use mux_overhead::parallel::{par_map, with_jobs};
use mux_overhead::prelude::*;
use mux_overhead::stats::{iqr, median};

use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::plot::{render, PlotKind};
use crate::{BenchAlgoArgs, BenchRandomArgs, FitArgs, OutputArgs, PipelineArgs, PlotArgs, QueueArgs, ToyArgs};

fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::io(path, e))
}

fn prepare_out(o: &OutputArgs) -> CliResult<&Path> {
    std::fs::create_dir_all(&o.out).map_err(|e| CliError::io(&o.out, e))?;
    Ok(&o.out)
}

/// Preset name or JSON path; file contents are hashed into the manifest.
pub fn load_spec(name: &str, manifest: &mut RunManifest) -> CliResult<HardwareSpec> {
    if let Some(spec) = HardwareSpec::preset(name) {
        return Ok(spec);
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(CliError::validation(format!(
            "unknown spec `{name}` (expected grid5, grid11, eagle or a JSON file)"
        )));
    }
    let bytes = read_file(path)?;
    manifest.add_input(path, &bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::validation(format!("{name} is not UTF-8")))?;
    Ok(HardwareSpec::from_json(&text)?)
}

struct Pipeline {
    spec: HardwareSpec,
    ks: Vec<usize>,
    seeds: Vec<u64>,
    strategy: GroupingStrategy,
    opts: SerializerOptions,
}

fn seed_list(seed: u64, count: usize) -> CliResult<Vec<u64>> {
    if count == 0 {
        return Err(CliError::validation("--seeds must be at least 1"));
    }
    Ok((0..count as u64).map(|i| seed.wrapping_add(i)).collect())
}

fn pipeline(a: &PipelineArgs, manifest: &mut RunManifest) -> CliResult<Pipeline> {
    let mut spec = load_spec(&a.spec, manifest)?;
    if let Some(t) = a.tsw_ns {
        spec = spec.with_t_sw(t)?;
    }
    let n = spec.coupling.n;
    let mut ks = match a.k {
        Some(k) => vec![k],
        None if a.ks.is_empty() => [1, 2, 4, 8, n].into_iter().filter(|&k| k <= n).collect(),
        None => a.ks.clone(),
    };
    ks.sort_unstable();
    ks.dedup();
    if let Some(&bad) = ks.iter().find(|&&k| k == 0 || k > n) {
        return Err(CliError::validation(format!(
            "k = {bad} is outside 1..={n} for this device"
        )));
    }
    let seeds = seed_list(a.seed, a.seeds)?;
    manifest.seeds = seeds.clone();
    Ok(Pipeline {
        spec,
        ks,
        seeds,
        strategy: a.strategy.parse()?,
        opts: SerializerOptions {
            order: a.order.parse()?,
            hide_delays: a.hide_delays == "on",
            t_sw: None,
        },
    })
}

fn csv_bytes(reports: &[OverheadReport]) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_csv(&mut buf, reports)?;
    Ok(buf)
}

fn serialize_rows<T: Serialize>(rows: &[T]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner()
        .map_err(|e| CliError::validation(e.to_string()))
}

/// Per-(gates, k) medians; routing and serialization are the increments over the
/// previous stage.
#[derive(Debug, Serialize)]
struct BreakdownRow {
    gates: usize,
    k: usize,
    median_translated_ns: f64,
    median_routing_ns: f64,
    median_serialization_ns: f64,
    q25_abs_overhead_ns: f64,
    q75_abs_overhead_ns: f64,
    median_rel_overhead: f64,
    q25_rel_overhead: f64,
    q75_rel_overhead: f64,
}

fn breakdown_row(gates: usize, k: usize, rs: &[&OverheadReport]) -> BreakdownRow {
    let col = |f: &dyn Fn(&OverheadReport) -> f64| median(&rs.iter().map(|r| f(r)).collect::<Vec<_>>());
    let abs: Vec<f64> = rs.iter().map(|r| r.abs_overhead as f64).collect();
    let rel: Vec<f64> = rs.iter().map(|r| r.rel_overhead).collect();
    let (a25, a75) = iqr(&abs);
    let (r25, r75) = iqr(&rel);
    BreakdownRow {
        gates,
        k,
        median_translated_ns: col(&|r| r.t_translated as f64),
        median_routing_ns: col(&|r| (r.t_routed - r.t_translated) as f64),
        median_serialization_ns: col(&|r| r.abs_overhead as f64),
        q25_abs_overhead_ns: a25,
        q75_abs_overhead_ns: a75,
        median_rel_overhead: median(&rel),
        q25_rel_overhead: r25,
        q75_rel_overhead: r75,
    }
}

pub fn bench_random(a: &BenchRandomArgs) -> CliResult<PathBuf> {
    let mut manifest = RunManifest::new("bench-random", a)?;
    let p = pipeline(&a.pipeline, &mut manifest)?;
    let out = prepare_out(&a.pipeline.output)?;
    if a.gates.is_empty() || a.gates.contains(&0) {
        return Err(CliError::validation("--gates needs positive gate counts"));
    }
    let mut gates = a.gates.clone();
    gates.sort_unstable();
    gates.dedup();
    let n = p.spec.coupling.n;
    let jobs: Vec<(usize, u64)> = gates
        .iter()
        .flat_map(|&g| p.seeds.iter().map(move |&s| (g, s)))
        .collect();
    let per_job = with_jobs(a.pipeline.output.jobs, || {
        par_map(&jobs, |&(g, seed)| -> Result<Vec<(usize, OverheadReport)>> {
            let logical = random_circuit(&RandomCircuitConfig::new(n, g, seed), &p.spec)?;
            let (translated, t_tr) = translate(&logical, &p.spec)?;
            let routed = route(&translated, &p.spec, seed)?;
            p.ks.iter()
                .map(|&k| {
                    let params = PipelineParams::new(k, seed)
                        .with_strategy(p.strategy)
                        .with_serializer(p.opts);
                    let meta = ReportMeta {
                        circuit: format!("random-{g}"),
                        algo: "random".into(),
                        n,
                        k,
                        strategy: p.strategy.name().into(),
                        seed,
                    };
                    Ok((g, report_for_routed(t_tr, &routed, &p.spec, &params, meta)?))
                })
                .collect()
        })
    });
    let mut rows: Vec<(usize, OverheadReport)> = Vec::new();
    for r in per_job {
        rows.extend(r?);
    }
    rows.sort_by_key(|(g, r)| (*g, r.meta.k, r.meta.seed));

    let mut summary = Vec::new();
    for &g in &gates {
        for &k in &p.ks {
            let rs: Vec<&OverheadReport> = rows
                .iter()
                .filter(|(gg, r)| *gg == g && r.meta.k == k)
                .map(|(_, r)| r)
                .collect();
            summary.push(breakdown_row(g, k, &rs));
        }
    }
    let reports: Vec<OverheadReport> = rows.into_iter().map(|(_, r)| r).collect();
    manifest.write_output(out, "results.csv", &csv_bytes(&reports)?)?;
    manifest.write_output(out, "breakdown.csv", &serialize_rows(&summary)?)?;
    manifest.finish(out)
}

#[derive(Debug, Serialize)]
struct AlgoSummaryRow {
    circuit: String,
    algo: String,
    gates: usize,
    k: usize,
    median_abs_overhead_ns: f64,
    q25_abs_overhead_ns: f64,
    q75_abs_overhead_ns: f64,
    median_rel_overhead: f64,
    q25_rel_overhead: f64,
    q75_rel_overhead: f64,
    rho1: f64,
    rho2: f64,
}

/// Name of a built-in algorithm or a QASM file path.
fn load_input(
    input: &str,
    qubits: usize,
    seed: u64,
    manifest: &mut RunManifest,
) -> CliResult<(String, String, Circuit)> {
    if let Ok(alg) = input.parse::<Algorithm>() {
        return Ok((format!("{}-{qubits}", alg.name()), alg.name().into(), algo_circuit(alg, qubits, seed)?));
    }
    let path = Path::new(input);
    if !path.is_file() {
        return Err(CliError::validation(format!(
            "`{input}` is neither a known algorithm nor a QASM file"
        )));
    }
    let bytes = read_file(path)?;
    manifest.add_input(path, &bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::validation(format!("{input} is not UTF-8")))?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| input.to_string());
    Ok((label, "qasm".into(), parse_qasm(&text)?))
}

pub fn bench_algo(a: &BenchAlgoArgs) -> CliResult<PathBuf> {
    let mut manifest = RunManifest::new("bench-algo", a)?;
    let p = pipeline(&a.pipeline, &mut manifest)?;
    let out = prepare_out(&a.pipeline.output)?;
    let qubits = a.qubits.unwrap_or(p.spec.coupling.n);
    let mut circuits = Vec::new();
    for input in &a.inputs {
        circuits.push(load_input(input, qubits, a.pipeline.seed, &mut manifest)?);
    }
    circuits.sort_by(|x, y| (x.2.gates.len(), &x.0).cmp(&(y.2.gates.len(), &y.0)));

    let mut reports = Vec::new();
    let mut summary = Vec::new();
    with_jobs(a.pipeline.output.jobs, || -> CliResult<()> {
        for (label, algo, logical) in &circuits {
            let table = sweep_k(logical, &p.spec, p.strategy, &p.ks, &p.seeds, &p.opts)?;
            let dens: Vec<&DensityReport> = table.rows.iter().map(|r| &r.densities).collect();
            let rho1 = median(&dens.iter().map(|d| d.rho1).collect::<Vec<_>>());
            let rho2 = median(&dens.iter().map(|d| d.rho2).collect::<Vec<_>>());
            for s in &table.summary {
                summary.push(AlgoSummaryRow {
                    circuit: label.clone(),
                    algo: algo.clone(),
                    gates: logical.gates.len(),
                    k: s.k,
                    median_abs_overhead_ns: s.median_abs_ns,
                    q25_abs_overhead_ns: s.q25_abs_ns,
                    q75_abs_overhead_ns: s.q75_abs_ns,
                    median_rel_overhead: s.median_rel,
                    q25_rel_overhead: s.q25_rel,
                    q75_rel_overhead: s.q75_rel,
                    rho1,
                    rho2,
                });
            }
            for mut r in table.rows {
                r.meta.circuit = label.clone();
                r.meta.algo = algo.clone();
                reports.push(r);
            }
        }
        Ok(())
    })?;
    manifest.write_output(out, "results.csv", &csv_bytes(&reports)?)?;
    manifest.write_output(out, "summary.csv", &serialize_rows(&summary)?)?;
    manifest.finish(out)
}

#[derive(Debug, Serialize)]
struct ToyRow {
    k: usize,
    mean_factor: f64,
    std_factor: f64,
}

pub fn toy(a: &ToyArgs) -> CliResult<PathBuf> {
    let mut manifest = RunManifest::new("toy", a)?;
    manifest.seeds = vec![a.seed];
    let out = prepare_out(&a.output)?;
    let grid = square_grid(a.grid, a.grid)?;
    let n = grid.n;
    let ks: Vec<usize> = if a.ks.is_empty() { (2..=n).collect() } else { a.ks.clone() };
    if let Some(&bad) = ks.iter().find(|&&k| k == 0 || k > n) {
        return Err(CliError::validation(format!("k = {bad} is outside 1..={n}")));
    }
    if a.trials == 0 || a.depth == 0 {
        return Err(CliError::validation("--trials and --depth must be positive"));
    }
    let mut cfg = ToyModelConfig::new(grid, 1, a.p1, a.p2, a.t2);
    cfg.depth = a.depth;
    cfg.seed = a.seed;
    cfg.no_2q_rule = if a.no2q_rule == "total" {
        No2qRule::TotalCount
    } else {
        No2qRule::PerSwitchMax
    };
    let results = with_jobs(a.output.jobs, || toy_sweep(&cfg, &ks, a.trials))?;
    let rows: Vec<ToyRow> = results
        .iter()
        .map(|r| ToyRow {
            k: r.k,
            mean_factor: r.mean_factor,
            std_factor: r.std_factor,
        })
        .collect();
    manifest.write_output(out, "toy.csv", &serialize_rows(&rows)?)?;
    manifest.finish(out)
}

#[derive(Debug, Serialize)]
struct QueueRow {
    k: usize,
    mc_mean: f64,
    analytic: f64,
}

pub fn queue(a: &QueueArgs) -> CliResult<PathBuf> {
    let mut manifest = RunManifest::new("queue", a)?;
    let out = prepare_out(&a.output)?;
    let ks: Vec<usize> = if a.ks.is_empty() {
        (0..=7).map(|e| 1usize << e).collect()
    } else {
        a.ks.clone()
    };
    if !(a.eta > 0.0) || a.trials == 0 || ks.contains(&0) {
        return Err(CliError::validation("need --eta > 0, --trials >= 1 and k >= 1"));
    }
    // one derived seed per k position
    let seeds: Vec<u64> = (0..ks.len() as u64).map(|i| a.seed.wrapping_add(i)).collect();
    manifest.seeds = seeds.clone();
    let rows = with_jobs(a.output.jobs, || {
        ks.iter()
            .zip(&seeds)
            .map(|(&k, &s)| {
                let mc = queue_max_waiting_mc(a.eta, k, a.trials, s)?;
                Ok(QueueRow {
                    k,
                    mc_mean: mc.mean,
                    analytic: expected_max_exponential(a.eta, k),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    manifest.write_output(out, "queue.csv", &serialize_rows(&rows)?)?;
    manifest.finish(out)
}

fn load_rows(path: &Path, manifest: &mut RunManifest) -> CliResult<Vec<CsvRow>> {
    let bytes = read_file(path)?;
    manifest.add_input(path, &bytes);
    Ok(read_csv(bytes.as_slice())?)
}

/// Median absolute overhead per k, with the median routed N1 as the scale.
pub fn fit_points(rows: &[CsvRow]) -> (Vec<(usize, f64)>, f64) {
    let mut ks: Vec<usize> = rows.iter().map(|r| r.k).collect();
    ks.sort_unstable();
    ks.dedup();
    let pts = ks
        .iter()
        .map(|&k| {
            let v: Vec<f64> = rows
                .iter()
                .filter(|r| r.k == k)
                .map(|r| r.abs_overhead_ns as f64)
                .collect();
            (k, median(&v))
        })
        .collect();
    let n1 = median(&rows.iter().map(|r| r.n1 as f64).collect::<Vec<_>>());
    (pts, n1)
}

pub fn fit(a: &FitArgs) -> CliResult<PathBuf> {
    let mut manifest = RunManifest::new("fit", a)?;
    let out = prepare_out(&a.output)?;
    let spec = load_spec(&a.spec, &mut manifest)?;
    let t1 = spec
        .t_1q()
        .ok_or_else(|| CliError::validation("spec has no physical single-qubit gate"))?;
    let mut rows = load_rows(&a.input, &mut manifest)?;
    if let Some(c) = &a.circuit {
        rows.retain(|r| &r.circuit == c);
    }
    if rows.is_empty() {
        return Err(CliError::validation("no rows to fit"));
    }
    let (pts, n1) = fit_points(&rows);
    let f = fit_log_model(&pts, n1, t1 as f64)?;
    let mut json = f.to_json();
    json.push('\n');
    manifest.write_output(out, "fit.json", json.as_bytes())?;
    manifest.finish(out)
}

pub fn plot(a: &PlotArgs) -> CliResult<PathBuf> {
    let mut manifest = RunManifest::new("plot", a)?;
    let out = prepare_out(&a.output)?;
    let kind: PlotKind = a.kind.parse()?;
    let rows = load_rows(&a.input, &mut manifest)?;
    let svg = render(&rows, kind, a.bins)?;
    manifest.write_output(out, &format!("{}.svg", kind.name()), svg.as_bytes())?;
    manifest.finish(out)
}
