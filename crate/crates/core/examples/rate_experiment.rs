//! A reduced rate experiment: fit kernel ridge regression over an n grid,
//! fit the log-log rate, and write CSVs and an SVG plot.
//!
//! Pass a TOML config path to run that instead; `SPECREG_OUTPUT_DIR` moves the output.

use specreg::harness::{fit_rate, run_experiment, write_experiment, ErrorMetric, ExperimentConfig};

fn main() -> specreg::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => ExperimentConfig::from_file(path.as_ref())?,
        None => {
            let mut cfg = ExperimentConfig::desk();
            cfg.n_grid = vec![100, 200, 400, 800];
            cfg.repetitions = 8;
            cfg.c = vec![1.0, 5.0];
            cfg.error_metric = ErrorMetric::SquaredL2;
            cfg.output_dir = std::env::temp_dir().join("specreg-rate");
            cfg
        }
    };
    let runs = run_experiment(&cfg)?;
    for run in &runs {
        let rate = fit_rate(&run.rows, cfg.s, cfg.beta)?;
        println!("{} c={}: r = {:.3} (theory {:.3}), R^2 = {:.3}", run.filter, run.c, rate.slope, rate.theoretical_rate, rate.r_squared);
        for row in &rate.summary {
            println!("  n={:>5} mean {:.5} sd {:.5}", row.n, row.mean_error, row.std_error);
        }
    }
    for path in write_experiment(&cfg, &runs)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
