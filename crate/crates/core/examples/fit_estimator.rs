//! Fit the three spectral algorithms to noisy samples of an unbounded
//! target, reusing one eigendecomposition for every filter and every nu.

use std::sync::Arc;

use specreg::estimator::{fit, regularization_from_n, ridge_closed_form, FittedEstimator, SpectralDecomposition};
use specreg::filters::{gradient_flow_filter, krr_filter, spectral_cutoff_filter};
use specreg::harness::l2_error_simpson;
use specreg::mercer::{min_kernel, Kernel};
use specreg::targets::{min_series_target, sample_data};

fn main() -> specreg::Result<()> {
    let kernel: Arc<dyn Kernel> = Arc::new(min_kernel());
    let target = min_series_target(0.4, 3000)?;
    let n = 400;
    let samples = sample_data(&target, n, 1.0, 42)?;
    let nu = regularization_from_n(2.0, 0.4, 1.0, n);
    println!("n = {n}, nu = {nu:.2}");

    let decomposition = SpectralDecomposition::new(kernel.as_ref(), &samples)?;
    let eig = decomposition.eigenvalues();
    println!("top eigenvalues of K/n: {:.5?}", &eig[n - 4..]);

    let points: Vec<Vec<f64>> = samples.iter().map(|s| s.x.clone()).collect();
    for filter in [krr_filter(), gradient_flow_filter(2.0), spectral_cutoff_filter(8.0)] {
        let alpha = decomposition.coefficients(&filter, nu)?;
        let est = FittedEstimator::new(kernel.clone(), points.clone(), alpha, nu, filter.name.clone());
        println!("{:<7} L2 error {:.4}   f(0.5) = {:+.4}", filter.name, l2_error_simpson(&est, &target, 10_000)?, est.predict_one(&[0.5]));
    }

    let krr = fit(kernel.clone(), &krr_filter(), &samples, nu)?;
    let ridge = ridge_closed_form(kernel, &samples, 1.0 / nu)?;
    let gap = krr.coefficients.iter().zip(&ridge.coefficients).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("spectral KRR vs direct ridge solve: max coefficient gap {gap:.2e}");
    println!("target f*(0.5) = {:+.4}", target.eval(&[0.5]));
    Ok(())
}
