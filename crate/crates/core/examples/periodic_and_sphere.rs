//! Shift-invariant kernels on the torus and dot-product kernels on the
//! sphere: eigensystems from Fourier coefficients and the embedding check
//! driven by spherical-harmonic multiplicities.

use specreg::mercer::{
    dot_product_embedding_check, mercer_partial_sum, periodic_kernel_eigensystem, periodic_sobolev_kernel,
    sphere_harmonic_dims, EigenSystem, Kernel, PeriodicSpectrum,
};

fn main() -> specreg::Result<()> {
    let kernel = periodic_sobolev_kernel(2000)?;
    let es = kernel.eigensystem().expect("closed-form spectrum");
    println!("periodic Sobolev kernel on the circle, beta = {}", es.beta());
    for i in 1..=5 {
        println!("  lambda_{i} = {:.5}", es.eigenvalue(i));
    }
    let (x, y) = ([0.3], [2.0]);
    println!(
        "k(x, y) = {:.5}, Mercer sum over 4001 modes = {:.5}",
        kernel.eval(&x, &y),
        mercer_partial_sum(es.as_ref(), &x, &y, 4001)
    );

    // a two-dimensional torus kernel given only by its profile
    let spectrum = PeriodicSpectrum::profile(|z: &[f64]| (z[0].cos() + 1.0) * (z[1].cos() + 2.0), 64);
    let torus = periodic_kernel_eigensystem(&spectrum, 2, 3)?;
    let nonzero: Vec<_> = torus.modes().iter().filter(|m| m.eigenvalue > 0.0).collect();
    println!("2-torus product kernel: {} non-zero modes, beta = {}", nonzero.len(), torus.beta());
    for m in nonzero.iter().take(4) {
        println!("  frequency {:?} {:?}: {:.4}", m.frequency, m.kind, m.eigenvalue);
    }

    for d in [2u64, 3] {
        let dims: Vec<u128> = (0..6).map(|n| sphere_harmonic_dims(d, n)).collect();
        println!("S^{d} harmonic multiplicities: {dims:?}");
        let mu = move |n: u64| ((n + 1) as f64).powf(-2.0 * d as f64);
        for alpha in [0.3, 0.7] {
            let check = dot_product_embedding_check(mu, d, 2.0, alpha, 100_000)?;
            println!(
                "  alpha={alpha}: {} (predicted {}), implied beta {:.3}",
                check.verdict, check.predicted, check.implied_edr
            );
        }
    }
    Ok(())
}
