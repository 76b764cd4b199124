//! The end-to-end rate experiment: sample datasets over an `n` grid, fit with
//! `ν = c · n^{β/(sβ+1)}`, measure the Simpson `L²` error against the series
//! target, and fit the log-log convergence rate.

mod config;
mod output;

use std::sync::Arc;

use faer::Mat;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimator::{predict_many, regularization_from_n, FittedEstimator, SpectralDecomposition};
use crate::filters::Filter;
use crate::mercer::{kernel_from_id, Domain, Kernel};
use crate::numeric;
use crate::targets::{sample_data, target_from_id, SeriesTarget};

pub use config::{ErrorMetric, ExperimentConfig, Preset, OUTPUT_DIR_ENV};
pub use output::{
    emit_plot, format_decimal, parse_raw_csv, raw_csv, rate_csv, render_plot, summary_csv, write_experiment,
    write_raw_csv, write_rate_csv, write_summary_csv,
};

/// Rows of the prediction grid evaluated per cross-kernel block.
const PREDICTION_BLOCK: usize = 2048;

/// One `(n, repetition)` measurement. A failed fit keeps its error code.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub n: usize,
    pub repetition: usize,
    pub seed: u64,
    pub nu: f64,
    pub error: std::result::Result<f64, String>,
}

/// All rows for one filter and one `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub filter: String,
    pub c: f64,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub mean_error: f64,
    pub std_error: f64,
    pub count: usize,
}

/// Log-log least squares of the per-`n` mean error.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub summary: Vec<SummaryRow>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub theoretical_rate: f64,
}

/// `(∫ (f̂ - f*)²)^{1/2}` over the target's interval by composite Simpson.
pub fn l2_error_simpson(est: &FittedEstimator, t: &SeriesTarget, panels: usize) -> Result<f64> {
    let (lo, hi) = interval(t.domain())?;
    numeric::simpson(
        |x| {
            let r = est.predict_one(&[x]) - t.eval(&[x]);
            r * r
        },
        lo,
        hi,
        panels,
    )
    .map(f64::sqrt)
}

fn interval(domain: Domain) -> Result<(f64, f64)> {
    match domain {
        Domain::Interval { lo, hi } => Ok((lo, hi)),
        other => Err(Error::InvalidArgument(format!("Simpson error needs an interval domain, got {other:?}"))),
    }
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Dataset seed for repetition `j` at sample size `n`.
pub fn repetition_seed(base_seed: u64, n: usize, j: usize) -> u64 {
    mix(mix(mix(base_seed) ^ n as u64) ^ j as u64)
}

/// Run the configured filter for every `c` in the config.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<Run>> {
    run_sweep(cfg, &[cfg.filter()?])
}

/// Run several filters on the same datasets.
///
/// Each dataset is decomposed once and the decomposition is shared by every
/// filter and every `c`; rows are returned sorted by `(n, repetition)`.
pub fn run_sweep(cfg: &ExperimentConfig, filters: &[Filter]) -> Result<Vec<Run>> {
    cfg.validate()?;
    let kernel = kernel_from_id(&cfg.kernel)?;
    let target = target_from_id(&cfg.target, cfg.s, cfg.truncation)?;
    if kernel.domain() != target.domain() {
        return Err(Error::Config(format!(
            "kernel `{}` and target `{}` live on different domains",
            cfg.kernel, cfg.target
        )));
    }
    let (lo, hi) = interval(target.domain())?;
    let weights = numeric::simpson_weights(lo, hi, cfg.test_points)?;
    let nodes: Vec<Vec<f64>> = numeric::lin_space(lo, hi, cfg.test_points + 1).into_iter().map(|x| vec![x]).collect();
    let truth = target.eval_many(&nodes);
    let grid = Grid { nodes, weights, truth };

    let jobs: Vec<(usize, usize)> =
        cfg.n_grid.iter().flat_map(|&n| (0..cfg.repetitions).map(move |j| (n, j))).collect();
    let results: Vec<Vec<Row>> = jobs
        .par_iter()
        .map(|&(n, j)| run_dataset(cfg, kernel.as_ref(), &target, &grid, filters, n, j))
        .collect();

    let combos = filters.len() * cfg.c.len();
    let mut runs: Vec<Run> = filters
        .iter()
        .flat_map(|f| cfg.c.iter().map(move |&c| Run { filter: f.name.clone(), c, rows: Vec::new() }))
        .collect();
    for rows in results {
        debug_assert_eq!(rows.len(), combos);
        for (run, row) in runs.iter_mut().zip(rows) {
            run.rows.push(row);
        }
    }
    for run in &mut runs {
        run.rows.sort_by_key(|r| (r.n, r.repetition));
    }
    Ok(runs)
}

struct Grid {
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
    truth: Vec<f64>,
}

/// Rows for one dataset, ordered filter-major then by `c`.
fn run_dataset(
    cfg: &ExperimentConfig,
    kernel: &dyn Kernel,
    target: &SeriesTarget,
    grid: &Grid,
    filters: &[Filter],
    n: usize,
    j: usize,
) -> Vec<Row> {
    let seed = repetition_seed(cfg.base_seed, n, j);
    let combos: Vec<(&Filter, f64)> = filters.iter().flat_map(|f| cfg.c.iter().map(move |&c| (f, c))).collect();
    let row = |c: f64, error| Row { n, repetition: j, seed, nu: regularization_from_n(cfg.beta, cfg.s, c, n), error };

    let prepared = sample_data(target, n, cfg.noise_sigma, seed)
        .and_then(|samples| SpectralDecomposition::new(kernel, &samples).map(|d| (samples, d)));
    let (samples, decomposition) = match prepared {
        Ok(p) => p,
        Err(e) => return combos.iter().map(|(_, c)| row(*c, Err(e.code().to_string()))).collect(),
    };

    let fitted: Vec<Result<Vec<f64>>> = combos
        .iter()
        .map(|(f, c)| decomposition.coefficients(f, regularization_from_n(cfg.beta, cfg.s, *c, n)))
        .collect();
    let mut coefficients = Mat::<f64>::zeros(n, combos.len());
    for (col, alpha) in fitted.iter().enumerate() {
        if let Ok(alpha) = alpha {
            for (i, a) in alpha.iter().enumerate() {
                coefficients[(i, col)] = *a;
            }
        }
    }
    let points: Vec<Vec<f64>> = samples.into_iter().map(|s| s.x).collect();
    let predictions = predict_many(kernel, &points, &coefficients, &grid.nodes, PREDICTION_BLOCK);

    combos
        .iter()
        .zip(&fitted)
        .enumerate()
        .map(|(col, ((_, c), alpha))| match alpha {
            Err(e) => row(*c, Err(e.code().to_string())),
            Ok(_) => {
                let sq: f64 = (0..grid.nodes.len())
                    .map(|i| {
                        let r = predictions[(i, col)] - grid.truth[i];
                        grid.weights[i] * r * r
                    })
                    .sum();
                row(*c, Ok(match cfg.error_metric {
                    ErrorMetric::L2 => sq.sqrt(),
                    ErrorMetric::SquaredL2 => sq,
                }))
            }
        })
        .collect()
}

/// Per-`n` mean and sample standard deviation of the successful rows.
pub fn summarize(rows: &[Row]) -> Vec<SummaryRow> {
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    ns.into_iter()
        .map(|n| {
            let errors: Vec<f64> = rows.iter().filter(|r| r.n == n).filter_map(|r| r.error.clone().ok()).collect();
            let count = errors.len();
            let mean = errors.iter().sum::<f64>() / count as f64;
            let var = if count > 1 {
                errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (count - 1) as f64
            } else {
                0.0
            };
            SummaryRow { n, mean_error: mean, std_error: var.sqrt(), count }
        })
        .collect()
}

/// Fit `log(mean error) = r · log n + b`; the theoretical rate is `-sβ/(sβ+1)`,
/// which applies to the squared error (the unsquared error decays at half that rate).
pub fn fit_rate(rows: &[Row], s: f64, beta: f64) -> Result<RateReport> {
    let summary = summarize(rows);
    if summary.len() < 3 {
        return Err(Error::InvalidArgument(format!("rate fit needs at least 3 distinct n, got {}", summary.len())));
    }
    if let Some(bad) = summary.iter().find(|r| !(r.mean_error > 0.0 && r.mean_error.is_finite())) {
        return Err(Error::NonPositiveError { n: bad.n, value: bad.mean_error });
    }
    let xs: Vec<f64> = summary.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = summary.iter().map(|r| r.mean_error).collect();
    let fit = numeric::fit_log_log(&xs, &ys)?;
    Ok(RateReport {
        summary,
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        theoretical_rate: -s * beta / (s * beta + 1.0),
    })
}

/// Kernel handle for a config, for callers that fit outside the pipeline.
pub fn config_kernel(cfg: &ExperimentConfig) -> Result<Arc<dyn Kernel>> {
    kernel_from_id(&cfg.kernel)
}
