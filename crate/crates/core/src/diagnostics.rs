//! Closed-form spectral diagnostics computed from an explicit eigensystem:
//! effective dimension, eigenvalue decay, embedding constants, approximation
//! error and `L^q` norms of series targets.
//!
//! Every convergence verdict is a doubling test with an explicit tolerance;
//! the objects examined here sit at integrability boundaries, so a verdict
//! is evidence at a finite truncation, not a certificate.

use std::fmt;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filters::Filter;
use crate::mercer::EigenSystem;
use crate::numeric;
use crate::targets::{NormEstimate, SeriesTarget};

/// Absolute change below which a doubled partial norm counts as converged.
pub const DEFAULT_NORM_TOLERANCE: f64 = 1e-4;
/// Relative change below which a doubled estimate counts as converged.
pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 0.01;
/// Largest ratio of successive squared increments still read as geometric decay.
pub const DEFAULT_RATIO_LIMIT: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Converged,
    Diverging,
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Converged => "converged",
            Verdict::Diverging => "diverging",
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// Verdict from partial norms at `N`, `2N`, `4N` and their squares.
///
/// Converged when the last doubling moves the norm by less than `tolerance`,
/// or when the squared increments shrink by a ratio below `ratio_limit`.
pub(crate) fn doubling_verdict(values: [f64; 3], squared: [f64; 3], tolerance: f64, ratio_limit: f64) -> Verdict {
    if !values.iter().all(|v| v.is_finite()) {
        return Verdict::Diverging;
    }
    if (values[2] - values[1]).abs() < tolerance {
        return Verdict::Converged;
    }
    let first = squared[1] - squared[0];
    let second = squared[2] - squared[1];
    if first > 0.0 && second / first < ratio_limit {
        Verdict::Converged
    } else {
        Verdict::Diverging
    }
}

/// A named table of `(input, value)` pairs with optional fit and verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticReport {
    pub name: String,
    pub grid: Vec<(f64, f64)>,
    pub fitted_exponent: Option<f64>,
    pub verdict: Option<Verdict>,
    /// Headline scalar of the diagnostic, when it has one.
    pub value: Option<f64>,
    /// Key/value pairs written to the sidecar metadata file.
    pub metadata: Vec<(String, String)>,
}

impl DiagnosticReport {
    pub fn new(name: impl Into<String>, grid: Vec<(f64, f64)>) -> Self {
        DiagnosticReport {
            name: name.into(),
            grid,
            fitted_exponent: None,
            verdict: None,
            value: None,
            metadata: Vec::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    /// Fit `log value = exponent · log input + b` over the grid.
    pub fn fit_exponent(mut self) -> Result<Self> {
        if self.grid.len() < 3 {
            return Err(Error::InvalidArgument("exponent fit needs at least three grid points".into()));
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = self.grid.iter().copied().unzip();
        self.fitted_exponent = Some(numeric::fit_log_log(&xs, &ys)?.slope);
        Ok(self)
    }

    /// CSV body with header `input,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("input,value\n");
        for (x, v) in &self.grid {
            out.push_str(&crate::harness::format_decimal(*x));
            out.push(',');
            out.push_str(&crate::harness::format_decimal(*v));
            out.push('\n');
        }
        out
    }

    /// Sidecar metadata as `key = "value"` lines.
    pub fn metadata_block(&self) -> String {
        let mut out = format!("name = {:?}\n", self.name);
        if let Some(e) = self.fitted_exponent {
            out.push_str(&format!("fitted_exponent = {e}\n"));
        }
        if let Some(v) = self.verdict {
            out.push_str(&format!("verdict = \"{v}\"\n"));
        }
        if let Some(v) = self.value {
            out.push_str(&format!("value = {v}\n"));
        }
        for (k, v) in &self.metadata {
            out.push_str(&format!("{k} = {v:?}\n"));
        }
        out
    }

    /// Write `path` (CSV) and `path.meta` (metadata).
    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        let mut meta = path.as_os_str().to_owned();
        meta.push(".meta");
        std::fs::write(meta, self.metadata_block())?;
        Ok(())
    }
}

/// Effective dimension `N(ν) = Σ λ_i / (λ_i + 1/ν)` at a finite truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveDimension {
    /// Sum over `i ≤ truncation`.
    pub partial: f64,
    /// Estimate of the omitted tail `ν Σ_{i > N} λ_i` from a power-law fit
    /// to the last half of the retained eigenvalues (zero for finite systems).
    pub tail_bound: f64,
}

pub fn effective_dimension(es: &dyn EigenSystem, nu: f64, truncation: usize) -> Result<EffectiveDimension> {
    if !(nu > 0.0) {
        return Err(Error::InvalidRegularization(nu));
    }
    let n = es.mode_count().map_or(truncation, |len| truncation.min(len));
    let partial = (1..=n)
        .map(|i| {
            let l = nu * es.eigenvalue(i);
            l / (l + 1.0)
        })
        .sum();
    let tail_bound = if es.mode_count().is_some_and(|len| len <= truncation) || n < 20 {
        0.0
    } else {
        let lo = n / 2;
        let step = ((n - lo) / 200).max(1);
        let (xs, ys): (Vec<f64>, Vec<f64>) = (lo..=n)
            .step_by(step)
            .map(|i| (i as f64, es.eigenvalue(i)))
            .filter(|(_, l)| *l > 0.0)
            .unzip();
        match numeric::fit_log_log(&xs, &ys) {
            Ok(fit) if -fit.slope > 1.0 => {
                let beta = -fit.slope;
                nu * fit.intercept.exp() * (n as f64).powf(1.0 - beta) / (beta - 1.0)
            }
            _ => f64::INFINITY,
        }
    };
    Ok(EffectiveDimension { partial, tail_bound })
}

/// `N(ν)` over a grid with a fitted log-log exponent (≈ `1/β`).
pub fn effective_dimension_report(es: &dyn EigenSystem, nus: &[f64], truncation: usize) -> Result<DiagnosticReport> {
    let grid = nus
        .iter()
        .map(|&nu| effective_dimension(es, nu, truncation).map(|d| (nu, d.partial)))
        .collect::<Result<Vec<_>>>()?;
    let report = DiagnosticReport::new("effective_dimension", grid)
        .with_meta("system", es.id())
        .with_meta("truncation", truncation);
    if nus.len() >= 3 {
        report.fit_exponent()
    } else {
        Ok(report)
    }
}

/// Negated least-squares slope of `log λ_i` against `log i` over `[i_min, i_max]`.
pub fn edr_fit(es: &dyn EigenSystem, i_min: usize, i_max: usize) -> Result<f64> {
    if i_min == 0 || i_max < i_min + 9 {
        return Err(Error::InvalidArgument(format!(
            "EDR fit needs 1 ≤ i_min and at least 10 indices, got [{i_min}, {i_max}]"
        )));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = (i_min..=i_max)
        .map(|i| (i as f64, es.eigenvalue(i)))
        .filter(|(_, l)| *l > 0.0)
        .unzip();
    if xs.len() < 10 {
        return Err(Error::TooFewIndices { required: 10, found: xs.len() });
    }
    Ok(-numeric::fit_log_log(&xs, &ys)?.slope)
}

/// `M̂_α = max_x (Σ_{i ≤ N} λ_i^α e_i(x)²)^{1/2}` over `x_grid`.
///
/// The report grid holds the per-point values at truncation `N`; the verdict
/// is `diverging` when doubling `N` changes the value at the maximizing point
/// by more than 1%.
pub fn embedding_constant(
    es: &dyn EigenSystem,
    alpha: f64,
    x_grid: &[Vec<f64>],
    truncation: usize,
) -> Result<DiagnosticReport> {
    if !(alpha > 0.0) || x_grid.is_empty() {
        return Err(Error::InvalidArgument("embedding constant needs α > 0 and a non-empty grid".into()));
    }
    let n = es.mode_count().map_or(truncation, |len| truncation.min(len));
    let doubled = es.mode_count().map_or(2 * n, |len| (2 * n).min(len));
    let weights: Vec<f64> = (1..=doubled).map(|i| es.eigenvalue(i).powf(alpha)).collect();
    let sums: Vec<(f64, f64)> = x_grid
        .par_iter()
        .map(|x| {
            let mut at_n = 0.0;
            let mut acc = 0.0;
            for (i, w) in weights.iter().enumerate() {
                let e = es.eigenfunction(i + 1, x);
                acc += w * e * e;
                if i + 1 == n {
                    at_n = acc;
                }
            }
            (at_n.sqrt(), acc.sqrt())
        })
        .collect();
    let (argmax, (best, best_doubled)) = sums
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
        .expect("non-empty grid");
    let verdict = if (best_doubled - best).abs() > DEFAULT_RELATIVE_TOLERANCE * best.abs() {
        Verdict::Diverging
    } else {
        Verdict::Converged
    };
    let grid = x_grid.iter().zip(&sums).map(|(x, s)| (x[0], s.0)).collect();
    let mut report = DiagnosticReport::new("embedding_constant", grid)
        .with_meta("system", es.id())
        .with_meta("alpha", alpha)
        .with_meta("truncation", n)
        .with_meta("argmax", format!("{:?}", x_grid[argmax]))
        .with_meta("doubled_value", best_doubled)
        .with_meta("relative_tolerance", DEFAULT_RELATIVE_TOLERANCE);
    report.value = Some(best);
    report.verdict = Some(verdict);
    Ok(report)
}

/// `‖f_ν - f‖_{[H]^γ}` for the population filter estimate `f_ν = φ_ν(L) L f`:
/// `(Σ_k λ^{-γ} ψ_ν(λ)² c_k²)^{1/2}` with `λ = λ_{map(k)}`.
pub fn approximation_error(
    es: &dyn EigenSystem,
    t: &SeriesTarget,
    filter: &Filter,
    nu: f64,
    gamma: f64,
    truncation: usize,
) -> Result<NormEstimate> {
    let (system, map) = t.eigensystem().ok_or(Error::MissingEigensystem)?;
    if system.id() != es.id() {
        return Err(Error::InvalidArgument(format!(
            "target is expressed in `{}`, not `{}`",
            system.id(),
            es.id()
        )));
    }
    if !(nu > 0.0) {
        return Err(Error::InvalidRegularization(nu));
    }
    if !(0.0..=1.0).contains(&gamma) || truncation == 0 {
        return Err(Error::InvalidArgument(format!("need γ in [0, 1] and N ≥ 1, got {gamma}, {truncation}")));
    }
    let mut squared = [0.0f64; 3];
    let mut acc = 0.0;
    let mut stage = 0;
    for k in 1..=4 * truncation {
        let c = t.coefficient(k);
        if c != 0.0 {
            let lambda = es.eigenvalue(map.apply(k));
            let psi = filter.psi(nu, lambda);
            if psi != 0.0 {
                acc += lambda.powf(-gamma) * psi * psi * c * c;
            }
        }
        if k == truncation << stage {
            squared[stage] = acc;
            stage += 1;
        }
    }
    let verdict = doubling_verdict(squared.map(f64::sqrt), squared, DEFAULT_NORM_TOLERANCE, DEFAULT_RATIO_LIMIT);
    Ok(NormEstimate {
        value: squared[0].sqrt(),
        doubled: squared[1].sqrt(),
        quadrupled: squared[2].sqrt(),
        verdict,
    })
}

/// `(∫ |f|^q dμ)^{1/q}` by composite Simpson with `panels` panels, at each truncation.
///
/// Converged when the last two estimates differ by less than 1% relative.
pub fn lq_norm_estimate(
    t: &SeriesTarget,
    q: f64,
    panels: usize,
    truncations: &[usize],
) -> Result<DiagnosticReport> {
    if q < 1.0 || truncations.len() < 2 {
        return Err(Error::InvalidArgument("need q ≥ 1 and at least two truncations".into()));
    }
    let (lo, hi) = match t.domain() {
        crate::mercer::Domain::Interval { lo, hi } => (lo, hi),
        other => return Err(Error::InvalidArgument(format!("L^q estimate needs an interval, got {other:?}"))),
    };
    let weights = numeric::simpson_weights(lo, hi, panels)?;
    let nodes = numeric::lin_space(lo, hi, panels + 1);
    let grid = truncations
        .iter()
        .map(|&n| {
            let target = t.with_truncation(n);
            let integral: f64 = nodes
                .par_iter()
                .zip(weights.par_iter())
                .map(|(x, w)| w * target.eval(&[*x]).abs().powf(q))
                .sum();
            (n as f64, (integral / (hi - lo)).powf(1.0 / q))
        })
        .collect::<Vec<_>>();
    let last = grid[grid.len() - 1].1;
    let prev = grid[grid.len() - 2].1;
    let verdict = if (last - prev).abs() < DEFAULT_RELATIVE_TOLERANCE * prev.abs() {
        Verdict::Converged
    } else {
        Verdict::Diverging
    };
    let mut report = DiagnosticReport::new("lq_norm", grid)
        .with_meta("target", t.name())
        .with_meta("q", q)
        .with_meta("panels", panels)
        .with_meta("relative_tolerance", DEFAULT_RELATIVE_TOLERANCE);
    report.value = Some(last);
    report.verdict = Some(verdict);
    Ok(report)
}
