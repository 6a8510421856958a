//! Minimal SVG charts from result CSVs.

use std::collections::BTreeMap;
use std::fmt::Write;

use mux_overhead::analysis::CsvRow;
use mux_overhead::stats::median;

use crate::error::{CliError, CliResult};

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Lines,
    Hist,
    Breakdown,
}

impl std::str::FromStr for PlotKind {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "lines" => Ok(PlotKind::Lines),
            "hist" => Ok(PlotKind::Hist),
            "breakdown" => Ok(PlotKind::Breakdown),
            _ => Err(CliError::validation(format!("unknown plot kind `{s}`"))),
        }
    }
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::Lines => "lines",
            PlotKind::Hist => "hist",
            PlotKind::Breakdown => "breakdown",
        }
    }
}

/// Equal-width bins over `[lo, hi]`; the last bin is closed on the right.
pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<usize> {
    let mut counts = vec![0; bins];
    let width = (hi - lo) / bins as f64;
    for &v in values {
        let b = if width > 0.0 {
            (((v - lo) / width).floor() as usize).min(bins - 1)
        } else {
            0
        };
        counts[b] += 1;
    }
    counts
}

fn by_k(rows: &[CsvRow]) -> BTreeMap<usize, Vec<&CsvRow>> {
    let mut m: BTreeMap<usize, Vec<&CsvRow>> = BTreeMap::new();
    for r in rows {
        m.entry(r.k).or_default().push(r);
    }
    m
}

struct Axes {
    x: (f64, f64),
    y: (f64, f64),
}

impl Axes {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let pad = |(a, b): (f64, f64)| if b > a { (a, b) } else { (a, a + 1.0) };
        Axes { x: pad(x), y: pad(y) }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        H - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (H - 2.0 * MARGIN)
    }
}

fn open(svg: &mut String, title: &str, xlabel: &str, ylabel: &str, ax: &Axes) {
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <!-- produced by muxov; see manifest.json -->\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{title}</text>\n",
        W / 2.0
    );
    let (x0, x1, y0, y1) = (MARGIN, W - MARGIN, H - MARGIN, MARGIN);
    let _ = writeln!(
        svg,
        "<path d=\"M{x0:.1} {y1:.1} V{y0:.1} H{x1:.1}\" stroke=\"black\" fill=\"none\"/>"
    );
    for (v, p) in [(ax.x.0, x0), (ax.x.1, x1)] {
        let _ = writeln!(
            svg,
            "<text x=\"{p:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"10\">{}</text>",
            y0 + 14.0,
            tick(v)
        );
    }
    for (v, p) in [(ax.y.0, y0), (ax.y.1, y1)] {
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{p:.1}\" text-anchor=\"end\" font-size=\"10\">{}</text>",
            x0 - 4.0,
            tick(v)
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\">{xlabel}</text>",
        W / 2.0,
        H - 16.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 {:.1})\">{ylabel}</text>",
        H / 2.0,
        H / 2.0
    );
}

fn tick(v: f64) -> String {
    if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.2}")
    }
}

fn legend(svg: &mut String, i: usize, label: &str) {
    let y = MARGIN + 14.0 * i as f64;
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{y:.1}\" font-size=\"10\" fill=\"{}\">{label}</text>",
        W - MARGIN + 4.0,
        PALETTE[i % PALETTE.len()]
    );
}

/// One polyline per k: median absolute overhead against median routed gate count, per circuit.
fn lines(rows: &[CsvRow]) -> String {
    let mut series = Vec::new();
    for (k, rs) in by_k(rows) {
        let mut per_circuit: BTreeMap<&str, Vec<&CsvRow>> = BTreeMap::new();
        for r in rs {
            per_circuit.entry(r.circuit.as_str()).or_default().push(r);
        }
        let mut pts: Vec<(f64, f64)> = per_circuit
            .values()
            .map(|c| {
                let x: Vec<f64> = c.iter().map(|r| (r.n1 + r.n2) as f64).collect();
                let y: Vec<f64> = c.iter().map(|r| r.abs_overhead_ns as f64).collect();
                (median(&x), median(&y))
            })
            .collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        series.push((k, pts));
    }
    let all = series.iter().flat_map(|(_, p)| p.iter());
    let (xs, ys): (Vec<f64>, Vec<f64>) = all.copied().unzip();
    let ax = Axes::new(
        (xs.iter().copied().fold(f64::INFINITY, f64::min), xs.iter().copied().fold(0.0, f64::max)),
        (0.0, ys.iter().copied().fold(0.0, f64::max)),
    );
    let mut svg = String::new();
    open(&mut svg, "serialization overhead", "routed gates (N1 + N2)", "abs overhead [ns]", &ax);
    for (i, (k, pts)) in series.iter().enumerate() {
        let d: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", ax.px(x), ax.py(y)))
            .collect();
        let _ = writeln!(
            svg,
            "<polyline class=\"series\" data-k=\"{k}\" points=\"{}\" stroke=\"{}\" fill=\"none\"/>",
            d.join(" "),
            PALETTE[i % PALETTE.len()]
        );
        legend(&mut svg, i, &format!("k={k}"));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Relative overhead histograms, one panel row per k over shared bins.
fn hist(rows: &[CsvRow], bins: usize) -> String {
    let vals: Vec<f64> = rows.iter().map(|r| r.rel_overhead).collect();
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let groups = by_k(rows);
    let panels = groups.len();
    let ax = Axes::new((lo, hi), (0.0, panels as f64));
    let mut svg = String::new();
    open(&mut svg, "relative overhead", "rel overhead", "k panels", &ax);
    let bw = (ax.px(ax.x.1) - ax.px(ax.x.0)) / bins as f64;
    for (i, (k, rs)) in groups.iter().enumerate() {
        let v: Vec<f64> = rs.iter().map(|r| r.rel_overhead).collect();
        let counts = histogram(&v, lo, hi, bins);
        let top = *counts.iter().max().unwrap_or(&1) as f64;
        let base = ax.py(i as f64);
        let span = ax.py(i as f64) - ax.py(i as f64 + 0.9);
        let _ = writeln!(svg, "<g class=\"panel\" data-k=\"{k}\" data-counts=\"{}\">", join(&counts));
        for (b, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let h = span * c as f64 / top;
            let _ = writeln!(
                svg,
                "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{h:.1}\" fill=\"{}\"/>",
                ax.px(ax.x.0) + bw * b as f64,
                base - h,
                bw,
                PALETTE[i % PALETTE.len()]
            );
        }
        svg.push_str("</g>\n");
        legend(&mut svg, i, &format!("k={k}"));
    }
    svg.push_str("</svg>\n");
    svg
}

fn join(c: &[usize]) -> String {
    c.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// Stacked median durations per k: translated, routing, serialization.
fn breakdown(rows: &[CsvRow]) -> String {
    let groups = by_k(rows);
    let stacks: Vec<(usize, [f64; 3])> = groups
        .iter()
        .map(|(&k, rs)| {
            let col = |f: &dyn Fn(&CsvRow) -> f64| median(&rs.iter().map(|r| f(r)).collect::<Vec<_>>());
            (
                k,
                [
                    col(&|r| r.t_translated_ns as f64),
                    col(&|r| (r.t_routed_ns - r.t_translated_ns) as f64),
                    col(&|r| (r.t_serialized_ns - r.t_routed_ns) as f64),
                ],
            )
        })
        .collect();
    let top = stacks
        .iter()
        .map(|(_, s)| s.iter().sum::<f64>())
        .fold(0.0, f64::max);
    let ax = Axes::new((0.0, stacks.len() as f64), (0.0, top));
    let mut svg = String::new();
    open(&mut svg, "duration breakdown", "k", "median duration [ns]", &ax);
    let bw = 0.7 * (ax.px(1.0) - ax.px(0.0));
    for (i, (k, parts)) in stacks.iter().enumerate() {
        let x = ax.px(i as f64 + 0.15);
        let mut acc = 0.0;
        let _ = writeln!(svg, "<g class=\"bar\" data-k=\"{k}\">");
        for (j, &p) in parts.iter().enumerate() {
            let (y0, y1) = (ax.py(acc), ax.py(acc + p));
            let _ = writeln!(
                svg,
                "<rect x=\"{x:.1}\" y=\"{y1:.1}\" width=\"{bw:.1}\" height=\"{:.1}\" fill=\"{}\"/>",
                y0 - y1,
                PALETTE[j]
            );
            acc += p;
        }
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"10\">{k}</text>\n</g>",
            x + bw / 2.0,
            H - MARGIN + 26.0
        );
    }
    for (j, name) in ["translated", "routing", "serialization"].iter().enumerate() {
        legend(&mut svg, j, name);
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn render(rows: &[CsvRow], kind: PlotKind, bins: usize) -> CliResult<String> {
    if rows.is_empty() {
        return Err(CliError::validation("nothing to plot: the CSV has no data rows"));
    }
    if bins == 0 {
        return Err(CliError::validation("--bins must be positive"));
    }
    Ok(match kind {
        PlotKind::Lines => lines(rows),
        PlotKind::Hist => hist(rows, bins),
        PlotKind::Breakdown => breakdown(rows),
    })
}
