//! The three built-in filter functions and the grid validator for the
//! qualification bounds.

use specreg::filters::{
    gradient_flow_filter, krr_filter, spectral_cutoff_filter, validate_filter, Filter, ValidationGrid,
};

fn main() -> specreg::Result<()> {
    let nu = 10.0;
    println!("{:>8} {:>12} {:>12} {:>12}", "z", "krr", "gf", "cutoff");
    let filters = [krr_filter(), gradient_flow_filter(2.0), spectral_cutoff_filter(8.0)];
    for z in [0.0, 0.01, 0.05, 0.1, 0.5, 1.0] {
        let row: Vec<String> = filters.iter().map(|f| format!("{:>12.5}", f.phi(nu, z))).collect();
        println!("{z:>8} {}", row.join(" "));
    }

    // a user-supplied filter: Tikhonov with a doubled penalty
    let custom = Filter::custom("half_krr", 1.0, 1.0, 2.0, |nu, z| nu / (nu * z + 2.0));

    for f in filters.iter().chain([&gradient_flow_filter(3.0), &custom]) {
        let report = validate_filter(f, &ValidationGrid::default_for(f, 1.0))?;
        print!(
            "{:<10} tau={:<4} E={} F={:.4}  max ratios phi {:.4} psi {:.4}  ",
            f.name, f.tau, f.e, f.f_tau, report.max_phi_ratio, report.max_psi_ratio
        );
        match report.worst() {
            None => println!("pass"),
            Some(v) => println!("FAIL at {:?} bound, alpha={}, nu={:.3}, z={:.3e}", v.bound, v.alpha, v.nu, v.z),
        }
    }
    Ok(())
}
