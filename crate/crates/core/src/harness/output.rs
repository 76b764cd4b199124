use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{fit_rate, summarize, ExperimentConfig, RateReport, Row, Run, SummaryRow};
use crate::error::{Error, Result};
use crate::targets::SAMPLE_GENERATOR;

/// Decimal notation rounded to 12 significant digits, trailing zeros trimmed.
pub fn format_decimal(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let exp: i32 = sci.split_once('e').and_then(|(_, e)| e.parse().ok()).expect("scientific format");
    let rounded: f64 = sci.parse().expect("round trip");
    let decimals = (11 - exp).max(0) as usize;
    let mut out = format!("{rounded:.decimals$}");
    if out.contains('.') {
        out.truncate(out.trim_end_matches('0').trim_end_matches('.').len());
    }
    out
}

pub fn raw_csv(rows: &[Row]) -> String {
    let mut out = String::from("n,repetition,seed,nu,error\n");
    for r in rows {
        let error = match &r.error {
            Ok(e) => format_decimal(*e),
            Err(code) => code.clone(),
        };
        let _ = writeln!(out, "{},{},{},{},{}", r.n, r.repetition, r.seed, format_decimal(r.nu), error);
    }
    out
}

/// Inverse of [`raw_csv`]; a non-numeric error field is read back as an error code.
pub fn parse_raw_csv(text: &str) -> Result<Vec<Row>> {
    let mut lines = text.lines();
    if lines.next() != Some("n,repetition,seed,nu,error") {
        return Err(Error::InvalidArgument("missing raw CSV header".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let bad = || Error::InvalidArgument(format!("malformed raw CSV row `{line}`"));
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(bad());
            }
            Ok(Row {
                n: fields[0].parse().map_err(|_| bad())?,
                repetition: fields[1].parse().map_err(|_| bad())?,
                seed: fields[2].parse().map_err(|_| bad())?,
                nu: fields[3].parse().map_err(|_| bad())?,
                error: fields[4].parse::<f64>().map_err(|_| fields[4].to_string()),
            })
        })
        .collect()
}

pub fn summary_csv(summary: &[SummaryRow]) -> String {
    let mut out = String::from("n,mean_error,std_error,count\n");
    for r in summary {
        let _ = writeln!(out, "{},{},{},{}", r.n, format_decimal(r.mean_error), format_decimal(r.std_error), r.count);
    }
    out
}

pub fn rate_csv(report: &RateReport) -> String {
    format!(
        "slope,intercept,r_squared,theoretical_rate\n{},{},{},{}\n",
        format_decimal(report.slope),
        format_decimal(report.intercept),
        format_decimal(report.r_squared),
        format_decimal(report.theoretical_rate)
    )
}

pub fn write_raw_csv(rows: &[Row], path: &Path) -> Result<()> {
    Ok(std::fs::write(path, raw_csv(rows))?)
}

pub fn write_summary_csv(summary: &[SummaryRow], path: &Path) -> Result<()> {
    Ok(std::fs::write(path, summary_csv(summary))?)
}

pub fn write_rate_csv(report: &RateReport, path: &Path) -> Result<()> {
    Ok(std::fs::write(path, rate_csv(report))?)
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

struct LogAxes {
    x: (f64, f64),
    y: (f64, f64),
}

impl LogAxes {
    fn px(&self, v: f64) -> f64 {
        LEFT + (v.log10() - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, v: f64) -> f64 {
        HEIGHT - BOTTOM - (v.log10() - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    let (lo, hi) = (lo.log10(), hi.log10());
    let pad = ((hi - lo) * 0.05).max(0.05);
    (lo - pad, hi + pad)
}

fn polyline(points: impl Iterator<Item = (f64, f64)>) -> String {
    let mut d = String::new();
    for (i, (x, y)) in points.enumerate() {
        let _ = write!(d, "{}{x:.2},{y:.2} ", if i == 0 { "M" } else { "L" });
    }
    d.trim_end().to_string()
}

/// SVG with log-log axes, the mean-error curve, a ±1 standard-deviation band
/// and the dashed least-squares line annotated with its slope.
pub fn render_plot(summary: &[SummaryRow], rate: &RateReport) -> Result<String> {
    if summary.len() < 2 {
        return Err(Error::InvalidArgument("plot needs at least two n values".into()));
    }
    if summary.iter().any(|r| !(r.mean_error > 0.0) || r.n == 0) {
        return Err(Error::InvalidArgument("plot needs positive mean errors".into()));
    }
    let lower = |r: &SummaryRow| (r.mean_error - r.std_error).max(r.mean_error * 0.1);
    let upper = |r: &SummaryRow| r.mean_error + r.std_error;
    let fit = |n: f64| (rate.intercept + rate.slope * n.ln()).exp();
    let n_lo = summary.iter().map(|r| r.n as f64).fold(f64::INFINITY, f64::min);
    let n_hi = summary.iter().map(|r| r.n as f64).fold(0.0, f64::max);
    let y_lo = summary.iter().map(lower).chain([fit(n_lo), fit(n_hi)]).fold(f64::INFINITY, f64::min);
    let y_hi = summary.iter().map(upper).chain([fit(n_lo), fit(n_hi)]).fold(0.0, f64::max);
    let axes = LogAxes { x: padded(n_lo, n_hi), y: padded(y_lo, y_hi) };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(svg, r#"<path d="M{x0},{y0} L{x0},{y1} L{x1},{y1}" fill="none" stroke="black"/>"#);
    for (decade_lo, decade_hi, vertical) in [(axes.x.0, axes.x.1, false), (axes.y.0, axes.y.1, true)] {
        for k in decade_lo.floor() as i32..=decade_hi.ceil() as i32 {
            for m in 1..10 {
                let v = f64::from(m) * 10f64.powi(k);
                let lv = v.log10();
                if lv < decade_lo || lv > decade_hi {
                    continue;
                }
                let len = if m == 1 { 6.0 } else { 3.0 };
                if vertical {
                    let y = axes.py(v);
                    let _ = writeln!(svg, r#"<path d="M{x0},{y:.2} L{:.2},{y:.2}" stroke="black"/>"#, x0 - len);
                    if matches!(m, 1 | 2 | 5) {
                        let label = format_decimal(v);
                        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#, x0 - 8.0, y + 4.0);
                    }
                } else {
                    let x = axes.px(v);
                    let _ = writeln!(svg, r#"<path d="M{x:.2},{y1} L{x:.2},{:.2}" stroke="black"/>"#, y1 + len);
                    if matches!(m, 1 | 2 | 5) {
                        let label = format_decimal(v);
                        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#, y1 + 20.0);
                    }
                }
            }
        }
    }
    let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">n</text>"#, (x0 + x1) / 2.0, HEIGHT - 15.0);
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">error</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    let band = polyline(
        summary
            .iter()
            .map(|r| (axes.px(r.n as f64), axes.py(upper(r))))
            .chain(summary.iter().rev().map(|r| (axes.px(r.n as f64), axes.py(lower(r))))),
    );
    let _ = writeln!(svg, r#"<path class="band" d="{band} Z" fill="green" fill-opacity="0.25" stroke="none"/>"#);
    let mean = polyline(summary.iter().map(|r| (axes.px(r.n as f64), axes.py(r.mean_error))));
    let _ = writeln!(svg, r#"<path class="mean" d="{mean}" fill="none" stroke="green" stroke-width="2"/>"#);
    let line = polyline([n_lo, n_hi].into_iter().map(|n| (axes.px(n), axes.py(fit(n)))));
    let _ = writeln!(
        svg,
        r#"<path class="fit" d="{line}" fill="none" stroke="black" stroke-width="1.5" stroke-dasharray="6,4"/>"#
    );
    let _ = writeln!(svg, r#"<text class="slope" x="{:.2}" y="{:.2}" text-anchor="end">r = {:.3}</text>"#, x1 - 10.0, y0 + 15.0, rate.slope);
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot(summary: &[SummaryRow], rate: &RateReport, path: &Path) -> Result<()> {
    Ok(std::fs::write(path, render_plot(summary, rate)?)?)
}

fn c_label(c: f64) -> String {
    format_decimal(c).replace('.', "p")
}

/// Write every artifact of an experiment to the resolved output directory and
/// return the paths written. Per `(filter, c)` run: raw, summary and rate CSVs
/// and an SVG; the rate CSV and plot are skipped when fewer than three `n`
/// values succeed. A `.meta` file records the configuration and generator.
pub fn write_experiment(cfg: &ExperimentConfig, runs: &[Run]) -> Result<Vec<PathBuf>> {
    let dir = cfg.resolved_output_dir();
    std::fs::create_dir_all(&dir)?;
    let mut written = Vec::new();
    let mut meta = format!(
        "kernel = {:?}\ntarget = {:?}\ns = {}\nbeta = {}\ntruncation = {}\nnoise_sigma = {}\ntest_points = {}\nerror_metric = {:?}\nbase_seed = {}\ngenerator = {:?}\n",
        cfg.kernel,
        cfg.target,
        cfg.s,
        cfg.beta,
        cfg.truncation,
        cfg.noise_sigma,
        cfg.test_points,
        format!("{:?}", cfg.error_metric),
        cfg.base_seed,
        SAMPLE_GENERATOR
    );
    for run in runs {
        let prefix = format!("{}_{}_c{}", cfg.stem, run.filter, c_label(run.c));
        let raw = dir.join(format!("{prefix}_raw.csv"));
        write_raw_csv(&run.rows, &raw)?;
        written.push(raw);
        let summary = summarize(&run.rows);
        let path = dir.join(format!("{prefix}_summary.csv"));
        write_summary_csv(&summary, &path)?;
        written.push(path);
        match fit_rate(&run.rows, cfg.s, cfg.beta) {
            Ok(report) => {
                let path = dir.join(format!("{prefix}_rate.csv"));
                write_rate_csv(&report, &path)?;
                written.push(path);
                let path = dir.join(format!("{prefix}.svg"));
                emit_plot(&report.summary, &report, &path)?;
                written.push(path);
            }
            Err(e) => {
                let _ = writeln!(meta, "skipped_rate_{prefix} = {:?}", e.to_string());
            }
        }
    }
    let path = dir.join(format!("{}.meta", cfg.stem));
    std::fs::write(&path, meta)?;
    written.push(path);
    Ok(written)
}
