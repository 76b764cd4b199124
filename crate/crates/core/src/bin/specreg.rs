use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use specreg::diagnostics::{
    approximation_error, edr_fit, effective_dimension_report, embedding_constant, lq_norm_estimate, DiagnosticReport,
};
use specreg::estimator::{fit, Sample};
use specreg::filters::{validate_filter, Filter, ValidationGrid};
use specreg::harness::{fit_rate, format_decimal, run_experiment, write_experiment, ExperimentConfig};
use specreg::mercer::{eigensystem_from_id, kernel_from_id};
use specreg::numeric::{lin_space, log_space};
use specreg::targets::target_from_id;
use specreg::Result;

#[derive(Parser)]
#[command(name = "specreg", version, about = "Spectral regularization for kernel regression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a rate experiment and write raw, summary and rate CSVs plus an SVG plot.
    Experiment { config: PathBuf },
    /// Fit one estimator to a CSV of `x,y` rows and print its coefficients.
    Fit {
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        filter: String,
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        tau: Option<f64>,
        /// Print predictions on this many equispaced points instead of coefficients.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Evaluate a spectral diagnostic on a closed-form eigensystem.
    Diagnose {
        /// `min` or `periodic`.
        system: String,
        diagnostic: Diagnostic,
        #[command(flatten)]
        opts: DiagnoseOpts,
    },
    /// Check the filter-function bounds on the default grid.
    ValidateFilter {
        filter: String,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        kappa_sq: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Diagnostic {
    EffectiveDimension,
    Edr,
    Embedding,
    Approximation,
    LqNorm,
}

#[derive(clap::Args)]
struct DiagnoseOpts {
    #[arg(long, default_value_t = 1e2)]
    nu_min: f64,
    #[arg(long, default_value_t = 1e5)]
    nu_max: f64,
    #[arg(long, default_value_t = 16)]
    points: usize,
    #[arg(long, default_value_t = 100_000)]
    truncation: usize,
    #[arg(long, default_value_t = 100)]
    i_min: usize,
    #[arg(long, default_value_t = 1000)]
    i_max: usize,
    #[arg(long, default_value_t = 0.6)]
    alpha: f64,
    #[arg(long, default_value = "min_series")]
    target: String,
    #[arg(long, default_value_t = 0.4)]
    s: f64,
    #[arg(long, default_value = "krr")]
    filter: String,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long, default_value_t = 4.0)]
    q: f64,
    #[arg(long, default_value_t = 200_000)]
    panels: usize,
    /// Write `<path>` and `<path>.meta` instead of printing.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.code());
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Experiment { config } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let runs = run_experiment(&cfg)?;
            for path in write_experiment(&cfg, &runs)? {
                println!("wrote {}", path.display());
            }
            for r in &runs {
                match fit_rate(&r.rows, cfg.s, cfg.beta) {
                    Ok(rate) => println!(
                        "{} c={}: slope {:.4} (theory {:.4}), R² {:.4}",
                        r.filter, r.c, rate.slope, rate.theoretical_rate, rate.r_squared
                    ),
                    Err(e) => println!("{} c={}: no rate ({e})", r.filter, r.c),
                }
            }
        }
        Command::Fit { kernel, filter, nu, data, tau, grid } => {
            let kernel = kernel_from_id(&kernel)?;
            let filter = Filter::from_id(&filter, tau)?;
            let samples = read_samples(&data)?;
            let est = fit(kernel, &filter, &samples, nu)?;
            match grid {
                Some(points) => {
                    println!("x,prediction");
                    for x in lin_space(0.0, 1.0, points.max(2)) {
                        println!("{},{}", format_decimal(x), format_decimal(est.predict_one(&[x])));
                    }
                }
                None => {
                    println!("x,coefficient");
                    for (p, a) in est.points.iter().zip(&est.coefficients) {
                        println!("{},{}", format_decimal(p[0]), format_decimal(*a));
                    }
                }
            }
        }
        Command::Diagnose { system, diagnostic, opts } => {
            let report = diagnose(&system, diagnostic, &opts)?;
            match &opts.output {
                Some(path) => report.write(path)?,
                None => {
                    print!("{}", report.to_csv());
                    eprint!("{}", report.metadata_block());
                }
            }
        }
        Command::ValidateFilter { filter, tau, kappa_sq } => {
            let filter = Filter::from_id(&filter, tau)?;
            let v = validate_filter(&filter, &ValidationGrid::default_for(&filter, kappa_sq))?;
            println!("filter {} (tau {}, E {}, F_tau {})", filter.name, filter.tau, filter.e, filter.f_tau);
            println!("max phi ratio {:.6}, max psi ratio {:.6}", v.max_phi_ratio, v.max_psi_ratio);
            if let Some(w) = v.worst() {
                println!(
                    "worst violation: {:?} bound at nu {}, z {}, alpha {}, ratio {:.6}",
                    w.bound, w.nu, w.z, w.alpha, w.ratio
                );
            }
            println!("{}", if v.passes() { "PASS" } else { "FAIL" });
            if !v.passes() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn diagnose(system: &str, diagnostic: Diagnostic, o: &DiagnoseOpts) -> Result<DiagnosticReport> {
    let es = eigensystem_from_id(system)?;
    let nus = log_space(o.nu_min, o.nu_max, o.points);
    match diagnostic {
        Diagnostic::EffectiveDimension => effective_dimension_report(es.as_ref(), &nus, o.truncation),
        Diagnostic::Edr => {
            let beta = edr_fit(es.as_ref(), o.i_min, o.i_max)?;
            let mut report = DiagnosticReport::new("edr", Vec::new())
                .with_meta("system", system)
                .with_meta("i_min", o.i_min)
                .with_meta("i_max", o.i_max);
            report.value = Some(beta);
            Ok(report)
        }
        Diagnostic::Embedding => {
            let grid: Vec<Vec<f64>> = lin_space(0.0, 1.0, 101).into_iter().map(|x| vec![x]).collect();
            embedding_constant(es.as_ref(), o.alpha, &grid, o.truncation)
        }
        Diagnostic::Approximation => {
            let target = target_from_id(&o.target, o.s, specreg::targets::DEFAULT_TRUNCATION)?;
            let filter = Filter::from_id(&o.filter, o.tau)?;
            let grid = nus
                .iter()
                .map(|&nu| approximation_error(es.as_ref(), &target, &filter, nu, o.gamma, o.truncation).map(|e| (nu, e.value)))
                .collect::<Result<Vec<_>>>()?;
            DiagnosticReport::new("approximation_error", grid)
                .with_meta("system", system)
                .with_meta("target", &o.target)
                .with_meta("filter", &o.filter)
                .with_meta("gamma", o.gamma)
                .with_meta("truncation", o.truncation)
                .fit_exponent()
        }
        Diagnostic::LqNorm => {
            let target = target_from_id(&o.target, o.s, specreg::targets::DEFAULT_TRUNCATION)?;
            let base = specreg::targets::DEFAULT_TRUNCATION;
            lq_norm_estimate(&target, o.q, o.panels, &[base, 2 * base, 4 * base])
        }
    }
}

fn read_samples(path: &std::path::Path) -> Result<Vec<Sample>> {
    let text = std::fs::read_to_string(path)?;
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.chars().any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E')) {
            continue;
        }
        let bad = || specreg::Error::InvalidArgument(format!("line {}: expected `x,y`, got `{line}`", i + 1));
        let (x, y) = line.split_once(',').ok_or_else(bad)?;
        let x: f64 = x.trim().parse().map_err(|_| bad())?;
        let y: f64 = y.trim().parse().map_err(|_| bad())?;
        samples.push(Sample::scalar(x, y));
    }
    Ok(samples)
}
