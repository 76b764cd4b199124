use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::filters::{Filter, DEFAULT_CUTOFF_TAU_CAP, DEFAULT_GRADIENT_FLOW_TAU};
use crate::targets::DEFAULT_TRUNCATION;

/// Overrides `output_dir` from the config file when set.
pub const OUTPUT_DIR_ENV: &str = "SPECREG_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// `n ∈ {200, 400, 800, 1200, 1600, 2000}`, 20 repetitions.
    Desk,
    /// `n` from 1000 to 5000 in steps of 100, 50 repetitions.
    Paper,
}

/// What the `error` column records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum ErrorMetric {
    /// `‖f̂ - f*‖_{L²}`.
    #[serde(rename = "l2")]
    L2,
    /// `‖f̂ - f*‖²_{L²}`, the quantity whose rate is `n^{-sβ/(sβ+1)}`.
    #[serde(rename = "squared_l2")]
    SquaredL2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kernel: String,
    pub filter: String,
    /// Qualification for gradient flow, or the cap for spectral cut-off.
    pub tau: Option<f64>,
    pub target: String,
    pub s: f64,
    pub truncation: usize,
    pub beta: f64,
    /// Every `c` is run; `ν = c · n^{β/(sβ+1)}`.
    pub c: Vec<f64>,
    pub n_grid: Vec<usize>,
    pub repetitions: usize,
    pub noise_sigma: f64,
    /// Simpson panels on the target interval.
    pub test_points: usize,
    pub error_metric: ErrorMetric,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    /// File name prefix for emitted artifacts.
    pub stem: String,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    preset: Option<Preset>,
    kernel: Option<String>,
    filter: Option<String>,
    tau: Option<f64>,
    target: Option<String>,
    s: Option<f64>,
    truncation: Option<usize>,
    beta: Option<f64>,
    c: Option<OneOrMany>,
    n_grid: Option<Vec<usize>>,
    repetitions: Option<usize>,
    noise_sigma: Option<f64>,
    test_points: Option<usize>,
    error_metric: Option<ErrorMetric>,
    base_seed: Option<u64>,
    output_dir: Option<PathBuf>,
    stem: Option<String>,
}

impl ExperimentConfig {
    /// Min kernel, KRR, `min_series` with `s = 0.4`, `σ = 1`, desk-scale grid.
    pub fn desk() -> Self {
        ExperimentConfig {
            kernel: "min".into(),
            filter: "krr".into(),
            tau: None,
            target: "min_series".into(),
            s: 0.4,
            truncation: DEFAULT_TRUNCATION,
            beta: 2.0,
            c: vec![1.0],
            n_grid: vec![200, 400, 800, 1200, 1600, 2000],
            repetitions: 20,
            noise_sigma: 1.0,
            test_points: 10_000,
            error_metric: ErrorMetric::L2,
            base_seed: 0,
            output_dir: PathBuf::from("results"),
            stem: "experiment".into(),
        }
    }

    pub fn paper() -> Self {
        ExperimentConfig { n_grid: (10..=50).map(|k| k * 100).collect(), repetitions: 50, ..Self::desk() }
    }

    pub fn preset(preset: Preset) -> Self {
        match preset {
            Preset::Desk => Self::desk(),
            Preset::Paper => Self::paper(),
        }
    }

    /// Parse a flat TOML table; keys absent from the file keep their preset values.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut cfg = Self::preset(raw.preset.unwrap_or(Preset::Desk));
        macro_rules! take {
            ($($field:ident),*) => { $(if let Some(v) = raw.$field { cfg.$field = v; })* };
        }
        take!(kernel, filter, target, s, truncation, beta, n_grid, repetitions, noise_sigma, test_points, error_metric, base_seed, output_dir, stem);
        if raw.tau.is_some() {
            cfg.tau = raw.tau;
        }
        match raw.c {
            Some(OneOrMany::One(c)) => cfg.c = vec![c],
            Some(OneOrMany::Many(c)) => cfg.c = c,
            None => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) || self.n_grid[0] == 0 {
            return fail(format!("n_grid must be non-empty, positive and strictly increasing: {:?}", self.n_grid));
        }
        if self.test_points < 2 || !self.test_points.is_multiple_of(2) {
            return fail(format!("test_points must be even and at least 2, got {}", self.test_points));
        }
        if self.repetitions == 0 {
            return fail("repetitions must be at least 1".into());
        }
        if self.c.is_empty() || self.c.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return fail(format!("c must be a non-empty list of positive numbers, got {:?}", self.c));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return fail(format!("noise_sigma must be non-negative, got {}", self.noise_sigma));
        }
        if !(self.beta > 1.0 && self.beta.is_finite()) || !(self.s > 0.0) || self.truncation == 0 {
            return fail(format!("need β > 1, s > 0 and truncation ≥ 1, got {}, {}, {}", self.beta, self.s, self.truncation));
        }
        self.filter()?;
        Ok(())
    }

    pub fn filter(&self) -> Result<Filter> {
        let tau = match self.filter.as_str() {
            "gf" => Some(self.tau.unwrap_or(DEFAULT_GRADIENT_FLOW_TAU)),
            "cutoff" => Some(self.tau.unwrap_or(DEFAULT_CUTOFF_TAU_CAP)),
            _ => self.tau,
        };
        Filter::from_id(&self.filter, tau).map_err(|e| Error::Config(e.to_string()))
    }

    /// `output_dir`, unless overridden by the environment.
    pub fn resolved_output_dir(&self) -> PathBuf {
        std::env::var_os(OUTPUT_DIR_ENV).map_or_else(|| self.output_dir.clone(), PathBuf::from)
    }
}
