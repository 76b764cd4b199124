//! Spectral diagnostics on the min-kernel system: effective dimension,
//! eigenvalue decay, embedding constants, approximation error and the
//! L^q integrability of the unbounded series target.

use specreg::diagnostics::{
    approximation_error, edr_fit, effective_dimension_report, embedding_constant, lq_norm_estimate,
};
use specreg::filters::krr_filter;
use specreg::mercer::min_kernel_eigensystem;
use specreg::numeric::{lin_space, log_space};
use specreg::targets::{interpolation_norm, min_series_target};

fn main() -> specreg::Result<()> {
    let es = min_kernel_eigensystem();

    let edim = effective_dimension_report(&es, &log_space(1e2, 1e5, 10), 10_000_000)?;
    println!("N(nu) slope {:.4} (1/beta = 0.5)", edim.fitted_exponent.unwrap_or(f64::NAN));
    println!("fitted eigenvalue decay over [100, 1000]: {:.4}", edr_fit(&es, 100, 1000)?);

    let grid: Vec<Vec<f64>> = lin_space(0.0, 1.0, 51).into_iter().map(|x| vec![x]).collect();
    for alpha in [1.0, 0.6, 0.4] {
        let report = embedding_constant(&es, alpha, &grid, 100_000)?;
        println!("embedding constant alpha={alpha}: {:.4} ({})", report.value.unwrap_or(f64::NAN), report.verdict.unwrap());
    }

    let target = min_series_target(0.4, 100_000)?;
    for s_prime in [0.3, 0.39, 0.4] {
        let norm = interpolation_norm(&target, s_prime, 100_000)?;
        println!("[H]^{s_prime} norm: {:.4} -> {:.4} -> {:.4} ({})", norm.value, norm.doubled, norm.quadrupled, norm.verdict);
    }

    for nu in [1e2, 1e4, 1e6] {
        let e = approximation_error(&es, &target, &krr_filter(), nu, 0.0, 100_000)?;
        println!("||f_nu - f*|| at nu={nu:e}: {:.5}", e.value);
    }

    let short = min_series_target(0.4, 3000)?;
    for q in [4.0, 40.0] {
        let report = lq_norm_estimate(&short, q, 20_000, &[3000, 6000, 12_000])?;
        let values: Vec<String> = report.grid.iter().map(|(n, v)| format!("N={n}: {v:.4}")).collect();
        println!("L^{q} norm {} ({})", values.join(", "), report.verdict.unwrap());
    }
    Ok(())
}
