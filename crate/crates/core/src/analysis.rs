//! End-to-end pipeline, overhead reports, k sweeps and scaling fits.

use serde::{Deserialize, Serialize};

use crate::circuit::{densities_over, Circuit, DensityReport, Nanos};
use crate::grouping::GroupingStrategy;
use crate::hardware::HardwareSpec;
use crate::parallel::par_map;
use crate::router::{rebase_to_native, route, RoutedCircuit};
use crate::serializer::{serialize, SerializerOptions};
use crate::stats::{iqr, median};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineParams {
    pub k: usize,
    /// Seeds both the router and the (random/clustered) grouping.
    pub seed: u64,
    pub strategy: GroupingStrategy,
    pub serializer: SerializerOptions,
}

impl PipelineParams {
    pub fn new(k: usize, seed: u64) -> Self {
        PipelineParams {
            k,
            seed,
            strategy: GroupingStrategy::Trivial,
            serializer: SerializerOptions::default(),
        }
    }

    pub fn with_strategy(mut self, strategy: GroupingStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_serializer(mut self, opts: SerializerOptions) -> Self {
        self.serializer = opts;
        self
    }
}

/// Labels carried into reports and CSV rows.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub circuit: String,
    pub algo: String,
    pub n: usize,
    pub k: usize,
    pub strategy: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverheadReport {
    pub meta: ReportMeta,
    pub t_translated: Nanos,
    pub t_routed: Nanos,
    pub t_serialized: Nanos,
    pub abs_overhead: Nanos,
    pub rel_overhead: f64,
    pub densities: DensityReport,
}

/// One CSV row; field order is the output column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub circuit: String,
    pub algo: String,
    pub n: usize,
    pub k: usize,
    pub strategy: String,
    pub seed: u64,
    pub t_translated_ns: Nanos,
    pub t_routed_ns: Nanos,
    pub t_serialized_ns: Nanos,
    pub abs_overhead_ns: Nanos,
    pub rel_overhead: f64,
    #[serde(rename = "N1")]
    pub n1: usize,
    #[serde(rename = "N2")]
    pub n2: usize,
    #[serde(rename = "D")]
    pub depth: usize,
    pub rho1: f64,
    pub rho2: f64,
}

pub const CSV_COLUMNS: [&str; 16] = [
    "circuit",
    "algo",
    "n",
    "k",
    "strategy",
    "seed",
    "t_translated_ns",
    "t_routed_ns",
    "t_serialized_ns",
    "abs_overhead_ns",
    "rel_overhead",
    "N1",
    "N2",
    "D",
    "rho1",
    "rho2",
];

impl OverheadReport {
    pub fn to_row(&self) -> CsvRow {
        CsvRow {
            circuit: self.meta.circuit.clone(),
            algo: self.meta.algo.clone(),
            n: self.meta.n,
            k: self.meta.k,
            strategy: self.meta.strategy.clone(),
            seed: self.meta.seed,
            t_translated_ns: self.t_translated,
            t_routed_ns: self.t_routed,
            t_serialized_ns: self.t_serialized,
            abs_overhead_ns: self.abs_overhead,
            rel_overhead: self.rel_overhead,
            n1: self.densities.n1,
            n2: self.densities.n2,
            depth: self.densities.depth,
            rho1: self.densities.rho1,
            rho2: self.densities.rho2,
        }
    }
}

/// Writes reports as CSV with the fixed column set.
pub fn write_csv<W: std::io::Write>(out: W, reports: &[OverheadReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if reports.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for r in reports {
        w.serialize(r.to_row())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().ne(CSV_COLUMNS) {
        return Err(Error::validation(format!(
            "unexpected CSV header `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// Assembles a report, checking `translated <= routed <= serialized`.
pub fn overhead_report(
    t_translated: Nanos,
    t_routed: Nanos,
    t_serialized: Nanos,
    densities: DensityReport,
    meta: ReportMeta,
) -> Result<OverheadReport> {
    if t_routed < t_translated || t_serialized < t_routed {
        return Err(Error::PipelineInconsistency(format!(
            "expected translated <= routed <= serialized, got {t_translated} / {t_routed} / {t_serialized} ns"
        )));
    }
    if meta.k == 1 && t_serialized != t_routed {
        return Err(Error::PipelineInconsistency(format!(
            "k = 1 must not add overhead ({t_routed} -> {t_serialized} ns)"
        )));
    }
    let rel_overhead = if t_routed == 0 {
        1.0
    } else {
        t_serialized as f64 / t_routed as f64
    };
    Ok(OverheadReport {
        meta,
        t_translated,
        t_routed,
        t_serialized,
        abs_overhead: t_serialized - t_routed,
        rel_overhead,
        densities,
    })
}

/// Densities over the qubits the routed circuit actually touches.
pub fn routed_densities(routed: &Circuit) -> Result<DensityReport> {
    match densities_over(routed, routed.active_qubits()) {
        Err(Error::Degenerate(_)) => Ok(DensityReport {
            n1: 0,
            n2: 0,
            depth: 0,
            rho1: 0.0,
            rho2: 0.0,
            rho_total: 0.0,
        }),
        other => other,
    }
}

/// Rebased circuit with its duration.
pub fn translate(logical: &Circuit, spec: &HardwareSpec) -> Result<(Circuit, Nanos)> {
    let c = rebase_to_native(logical, spec)?;
    let t = c.duration()?;
    Ok((c, t))
}

/// Serializes an already routed circuit and builds the report.
pub fn report_for_routed(
    t_translated: Nanos,
    routed: &RoutedCircuit,
    spec: &HardwareSpec,
    params: &PipelineParams,
    meta: ReportMeta,
) -> Result<OverheadReport> {
    let grouping = params
        .strategy
        .build(&spec.coupling, params.k, params.seed)?;
    let s = serialize(&routed.circuit, &grouping, spec, &params.serializer)?;
    let dens = routed_densities(&routed.circuit)?;
    overhead_report(t_translated, s.base_duration, s.duration, dens, meta)
}

fn meta_for(logical: &Circuit, params: &PipelineParams) -> ReportMeta {
    ReportMeta {
        circuit: String::new(),
        algo: String::new(),
        n: logical.n,
        k: params.k,
        strategy: params.strategy.name().to_string(),
        seed: params.seed,
    }
}

/// rebase → route → group → serialize → report.
pub fn run_pipeline(
    logical: &Circuit,
    spec: &HardwareSpec,
    params: &PipelineParams,
) -> Result<OverheadReport> {
    let (translated, t_translated) = translate(logical, spec)?;
    let routed = route(&translated, spec, params.seed)?;
    report_for_routed(
        t_translated,
        &routed,
        spec,
        params,
        meta_for(logical, params),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub k: usize,
    pub median_abs_ns: f64,
    pub q25_abs_ns: f64,
    pub q75_abs_ns: f64,
    pub median_rel: f64,
    pub q25_rel: f64,
    pub q75_rel: f64,
    pub median_translated_ns: f64,
    pub median_routed_ns: f64,
    pub median_serialized_ns: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    /// Sorted by `(k, seed)`.
    pub rows: Vec<OverheadReport>,
    /// One entry per k, ascending.
    pub summary: Vec<SweepSummary>,
}

impl SweepTable {
    pub fn from_rows(mut rows: Vec<OverheadReport>) -> Self {
        rows.sort_by_key(|r| (r.meta.k, r.meta.seed));
        let mut summary = Vec::new();
        let mut at = 0;
        while at < rows.len() {
            let k = rows[at].meta.k;
            let end = at + rows[at..].iter().take_while(|r| r.meta.k == k).count();
            let chunk = &rows[at..end];
            let abs: Vec<f64> = chunk.iter().map(|r| r.abs_overhead as f64).collect();
            let rel: Vec<f64> = chunk.iter().map(|r| r.rel_overhead).collect();
            let col = |f: fn(&OverheadReport) -> Nanos| {
                median(&chunk.iter().map(|r| f(r) as f64).collect::<Vec<_>>())
            };
            let (a25, a75) = iqr(&abs);
            let (r25, r75) = iqr(&rel);
            summary.push(SweepSummary {
                k,
                median_abs_ns: median(&abs),
                q25_abs_ns: a25,
                q75_abs_ns: a75,
                median_rel: median(&rel),
                q25_rel: r25,
                q75_rel: r75,
                median_translated_ns: col(|r| r.t_translated),
                median_routed_ns: col(|r| r.t_routed),
                median_serialized_ns: col(|r| r.t_serialized),
            });
            at = end;
        }
        SweepTable { rows, summary }
    }
}

/// Runs the pipeline for every `(k, seed)`; the seed drives routing and grouping.
pub fn sweep_k(
    logical: &Circuit,
    spec: &HardwareSpec,
    strategy: GroupingStrategy,
    ks: &[usize],
    seeds: &[u64],
    opts: &SerializerOptions,
) -> Result<SweepTable> {
    if ks.is_empty() || seeds.is_empty() {
        return Err(Error::validation("sweep needs at least one k and one seed"));
    }
    let (translated, t_translated) = translate(logical, spec)?;
    let routed: Vec<RoutedCircuit> = par_map(seeds, |&s| route(&translated, spec, s))
        .into_iter()
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = ks
        .iter()
        .flat_map(|&k| (0..seeds.len()).map(move |i| (k, i)))
        .collect();
    let rows = par_map(&jobs, |&(k, i)| {
        let params = PipelineParams {
            k,
            seed: seeds[i],
            strategy,
            serializer: *opts,
        };
        report_for_routed(
            t_translated,
            &routed[i],
            spec,
            &params,
            meta_for(logical, &params),
        )
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable::from_rows(rows))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub p: f64,
    pub stderr: f64,
    pub residual_log: f64,
    pub residual_linear: f64,
    /// Coefficient of the competing `(k - 1)` model.
    #[serde(skip)]
    pub q_linear: f64,
    pub log_base: String,
}

impl FitResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }

    pub fn log_wins(&self) -> bool {
        self.residual_log < self.residual_linear
    }
}

fn one_param_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    let c = sxy / sxx;
    let ss: f64 = points.iter().map(|(x, y)| (y - c * x).powi(2)).sum();
    let dof = points.len().saturating_sub(1).max(1) as f64;
    let stderr = (ss / dof / sxx).sqrt();
    (c, ss, stderr)
}

/// Least-squares fit of `T(k) = p * N1 * t_1q * ln k`, compared against
/// `T(k) = q * N1 * t_1q * (k - 1)`.
pub fn fit_log_model(points: &[(usize, f64)], n1: f64, t_1q: f64) -> Result<FitResult> {
    if points.iter().any(|&(k, _)| k == 0) {
        return Err(Error::validation("k must be at least 1"));
    }
    let informative = points.iter().filter(|&&(k, _)| k >= 2).count();
    if informative == 0 {
        return Err(Error::Degenerate("all fit points have k = 1".into()));
    }
    if informative < 3 {
        return Err(Error::Degenerate(format!(
            "need at least 3 points with k >= 2, got {informative}"
        )));
    }
    if n1 * t_1q <= 0.0 {
        return Err(Error::Degenerate("N1 * t_1q must be positive".into()));
    }
    let scale = n1 * t_1q;
    let log_pts: Vec<(f64, f64)> = points
        .iter()
        .map(|&(k, t)| (scale * (k as f64).ln(), t))
        .collect();
    let lin_pts: Vec<(f64, f64)> = points
        .iter()
        .map(|&(k, t)| (scale * (k as f64 - 1.0), t))
        .collect();
    let (p, residual_log, stderr) = one_param_fit(&log_pts);
    let (q_linear, residual_linear, _) = one_param_fit(&lin_pts);
    Ok(FitResult {
        p,
        stderr,
        residual_log,
        residual_linear,
        q_linear,
        log_base: "e".into(),
    })
}
