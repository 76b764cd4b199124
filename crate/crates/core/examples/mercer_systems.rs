//! Closed-form Mercer systems on the unit interval: eigenpairs of the min
//! kernel, Mercer partial sums, and the positive-definiteness checks.

use specreg::mercer::{
    check_kernel, mercer_partial_sum, min_kernel, min_kernel_eigensystem, orthonormality_defect, sobolev_h1_kernel,
    EigenSystem, Kernel,
};

fn main() -> specreg::Result<()> {
    let k = min_kernel();
    let es = min_kernel_eigensystem();

    println!("min kernel, beta = {}", es.beta());
    for i in 1..=5 {
        println!("  lambda_{i} = {:.6}   e_{i}(0.3) = {:+.6}", es.eigenvalue(i), es.eigenfunction(i, &[0.3]));
    }

    for (x, y) in [(0.5, 0.25), (1.0, 1.0), (0.1, 0.9)] {
        let exact = k.eval(&[x], &[y]);
        let partial: Vec<String> = [10, 1_000, 100_000]
            .iter()
            .map(|&n| format!("N={n}: {:.6}", mercer_partial_sum(&es, &[x], &[y], n)))
            .collect();
        println!("k({x}, {y}) = {exact:.6}; {}", partial.join(", "));
    }

    println!("orthonormality defect of e_1..e_10: {:.2e}", orthonormality_defect(&es, 10, 10_000)?);

    for kernel in [&k as &dyn Kernel, &sobolev_h1_kernel()] {
        let check = check_kernel(kernel, 50, 1)?;
        println!(
            "{}: kappa^2 = {:.4}, symmetry defect {:.1e}, min Gram eigenvalue {:.2e}, passes: {}",
            kernel.id(),
            kernel.kappa_sq(),
            check.symmetry_defect,
            check.min_gram_eigenvalue,
            check.passes()
        );
    }
    Ok(())
}
