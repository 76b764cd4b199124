//! Filter functions `φ_ν` defining spectral algorithms.
//!
//! A filter with qualification `τ` and constants `E`, `F_τ` must satisfy, for
//! every `ν` and `z ∈ [0, κ²]`,
//!
//! * `z^α φ_ν(z) ≤ E ν^{1-α}` for `α ∈ [0, 1]`,
//! * `|ψ_ν(z)| z^α ≤ F_τ ν^{-α}` for `α ∈ [0, τ]`, where `ψ_ν(z) = 1 - z φ_ν(z)`.
//!
//! [`validate_filter`] checks both inequalities on a finite grid.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric;

/// Qualification reported for spectral cut-off, whose true qualification is unbounded.
pub const DEFAULT_CUTOFF_TAU_CAP: f64 = 8.0;

/// Default qualification used for gradient flow.
pub const DEFAULT_GRADIENT_FLOW_TAU: f64 = 2.0;

type PhiFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum FilterKind {
    /// `φ_ν(z) = ν / (νz + 1)`
    Krr,
    /// `φ_ν(z) = (1 - e^{-νz}) / z`, `φ_ν(0) = ν`
    GradientFlow,
    /// `φ_ν(z) = 1/z` for `z ≥ 1/ν`, else 0
    Cutoff,
    Custom(PhiFn),
}

impl fmt::Debug for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterKind::Krr => f.write_str("Krr"),
            FilterKind::GradientFlow => f.write_str("GradientFlow"),
            FilterKind::Cutoff => f.write_str("Cutoff"),
            FilterKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Filter {
    pub name: String,
    pub kind: FilterKind,
    /// Qualification `τ`.
    pub tau: f64,
    /// Constant `E` in the `φ` bound.
    pub e: f64,
    /// Constant `F_τ` in the `ψ` bound.
    pub f_tau: f64,
}

/// Kernel ridge regression: `τ = 1`, `E = F_τ = 1`.
pub fn krr_filter() -> Filter {
    Filter { name: "krr".into(), kind: FilterKind::Krr, tau: 1.0, e: 1.0, f_tau: 1.0 }
}

/// Gradient flow with qualification `tau`: `E = 1`, `F_τ = (τ/e)^τ`.
pub fn gradient_flow_filter(tau: f64) -> Filter {
    Filter {
        name: "gf".into(),
        kind: FilterKind::GradientFlow,
        tau,
        e: 1.0,
        f_tau: (tau / std::f64::consts::E).powf(tau),
    }
}

/// Spectral cut-off (truncated eigen-expansion): `E = F_τ = 1`, qualification reported as `tau_cap`.
pub fn spectral_cutoff_filter(tau_cap: f64) -> Filter {
    Filter { name: "cutoff".into(), kind: FilterKind::Cutoff, tau: tau_cap, e: 1.0, f_tau: 1.0 }
}

impl Filter {
    /// An arbitrary filter `phi(ν, z)` with the given constants.
    pub fn custom(
        name: impl Into<String>,
        tau: f64,
        e: f64,
        f_tau: f64,
        phi: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Filter { name: name.into(), kind: FilterKind::Custom(Arc::new(phi)), tau, e, f_tau }
    }

    /// Look up a shipped filter by its config identifier (`krr`, `gf`, `cutoff`).
    /// `tau` sets the gradient-flow qualification or the cut-off cap.
    pub fn from_id(id: &str, tau: Option<f64>) -> Result<Self> {
        match id {
            "krr" => Ok(krr_filter()),
            "gf" => Ok(gradient_flow_filter(tau.unwrap_or(DEFAULT_GRADIENT_FLOW_TAU))),
            "cutoff" => Ok(spectral_cutoff_filter(tau.unwrap_or(DEFAULT_CUTOFF_TAU_CAP))),
            other => Err(Error::InvalidArgument(format!("unknown filter `{other}`"))),
        }
    }

    #[inline]
    pub fn phi(&self, nu: f64, z: f64) -> f64 {
        match &self.kind {
            FilterKind::Krr => nu / (nu * z + 1.0),
            FilterKind::GradientFlow => {
                let t = nu * z;
                if t < 1e-8 {
                    nu * (1.0 - t / 2.0 + t * t / 6.0)
                } else {
                    -(-t).exp_m1() / z
                }
            }
            FilterKind::Cutoff => {
                // z⁻¹ ≤ ν keeps the tie at z = 1/ν
                if z > 0.0 && z * nu >= 1.0 {
                    1.0 / z
                } else {
                    0.0
                }
            }
            FilterKind::Custom(phi) => phi(nu, z),
        }
    }

    /// Residual `ψ_ν(z) = 1 - z φ_ν(z)`, in closed form for the built-in filters.
    #[inline]
    pub fn psi(&self, nu: f64, z: f64) -> f64 {
        match &self.kind {
            FilterKind::Krr => 1.0 / (nu * z + 1.0),
            FilterKind::GradientFlow => (-nu * z).exp(),
            FilterKind::Cutoff => {
                if z > 0.0 && z * nu >= 1.0 {
                    0.0
                } else {
                    1.0
                }
            }
            FilterKind::Custom(_) => 1.0 - z * self.phi(nu, z),
        }
    }
}

/// Which of the two defining inequalities a grid point violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Phi,
    Psi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub bound: Bound,
    pub nu: f64,
    pub z: f64,
    pub alpha: f64,
    pub ratio: f64,
}

/// Grids for [`validate_filter`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationGrid {
    pub nu: Vec<f64>,
    pub z: Vec<f64>,
    /// Exponents for the `φ` bound, within `[0, 1]`.
    pub alpha_phi: Vec<f64>,
    /// Exponents for the `ψ` bound, within `[0, τ]`.
    pub alpha_psi: Vec<f64>,
}

impl ValidationGrid {
    /// `ν` log-spaced over `[0.1, 1e5]` (200 points), `z = 0` plus 500 points in `(0, kappa_sq]`,
    /// `α ∈ {0, 0.25, 0.5, 0.75, 1}`, extended in steps of 0.25 up to `τ` for the `ψ` bound.
    pub fn default_for(filter: &Filter, kappa_sq: f64) -> Self {
        let mut z = vec![0.0];
        z.extend((1..=500).map(|i| kappa_sq * i as f64 / 500.0));
        let alpha_phi = vec![0.0, 0.25, 0.5, 0.75, 1.0];
        let mut alpha_psi = alpha_phi.clone();
        let mut a = 1.25;
        while a <= filter.tau + 1e-12 {
            alpha_psi.push(a);
            a += 0.25;
        }
        if (alpha_psi.last().copied().unwrap_or(0.0) - filter.tau).abs() > 1e-12 && filter.tau > 1.0 {
            alpha_psi.push(filter.tau);
        }
        ValidationGrid { nu: numeric::log_space(0.1, 1e5, 200), z, alpha_phi, alpha_psi }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterValidation {
    pub filter: String,
    /// `max z^α φ_ν(z) / (E ν^{1-α})` over the grid.
    pub max_phi_ratio: f64,
    /// `max |ψ_ν(z)| z^α / (F_τ ν^{-α})` over the grid.
    pub max_psi_ratio: f64,
    pub violations: Vec<Violation>,
}

impl FilterValidation {
    pub const TOLERANCE: f64 = 1e-9;

    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }

    /// Worst violation, if any.
    pub fn worst(&self) -> Option<&Violation> {
        self.violations.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio))
    }
}

/// Evaluate both defining inequalities over the grid; points with a ratio
/// above `1 + 1e-9` are reported as violations.
pub fn validate_filter(filter: &Filter, grid: &ValidationGrid) -> Result<FilterValidation> {
    if grid.nu.is_empty() || grid.z.is_empty() || (grid.alpha_phi.is_empty() && grid.alpha_psi.is_empty()) {
        return Err(Error::InvalidArgument("validation grids must be non-empty".into()));
    }
    if grid.alpha_phi.iter().any(|a| !(0.0..=1.0).contains(a))
        || grid.alpha_psi.iter().any(|a| *a < 0.0 || *a > filter.tau.max(1.0) + 1e-12)
    {
        return Err(Error::InvalidArgument(format!(
            "exponents must lie in [0, 1] for φ and [0, max(1, τ = {})] for ψ",
            filter.tau
        )));
    }
    let limit = 1.0 + FilterValidation::TOLERANCE;
    let mut report = FilterValidation {
        filter: filter.name.clone(),
        max_phi_ratio: 0.0,
        max_psi_ratio: 0.0,
        violations: Vec::new(),
    };
    for &nu in &grid.nu {
        if !(nu > 0.0) {
            return Err(Error::InvalidRegularization(nu));
        }
        for &z in &grid.z {
            let phi = filter.phi(nu, z);
            let psi = filter.psi(nu, z);
            for &alpha in &grid.alpha_phi {
                let ratio = z.powf(alpha) * phi / (filter.e * nu.powf(1.0 - alpha));
                report.max_phi_ratio = report.max_phi_ratio.max(ratio);
                if ratio > limit {
                    report.violations.push(Violation { bound: Bound::Phi, nu, z, alpha, ratio });
                }
            }
            for &alpha in &grid.alpha_psi {
                let ratio = psi.abs() * z.powf(alpha) / (filter.f_tau * nu.powf(-alpha));
                report.max_psi_ratio = report.max_psi_ratio.max(ratio);
                if ratio > limit {
                    report.violations.push(Violation { bound: Bound::Psi, nu, z, alpha, ratio });
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn krr_values() {
        let f = krr_filter();
        assert_eq!(f.phi(1.0, 0.0), 1.0);
        assert_eq!(f.phi(2.0, 0.5), 1.0);
        assert_eq!((f.tau, f.e, f.f_tau), (1.0, 1.0, 1.0));
    }

    #[test]
    fn gradient_flow_values() {
        let f = gradient_flow_filter(2.0);
        assert_eq!(f.phi(3.0, 0.0), 3.0);
        assert!((f.phi(1.0, 1.0) - 0.632_120_558_828_557_7).abs() < 1e-15);
        assert!((f.f_tau - 0.541_341_132_946_450_9).abs() < 1e-15);
        assert_eq!(f.e, 1.0);
        // both branches match the Taylor expansion on either side of the switch point
        let nu = 1e4;
        for z in [0.99e-12, 1.01e-12] {
            let t = nu * z;
            let taylor = nu * (1.0 - t / 2.0 + t * t / 6.0 - t * t * t / 24.0);
            assert!((f.phi(nu, z) - taylor).abs() / taylor < 1e-15);
        }
        // small-argument relative accuracy
        let z = 1e-10;
        let exact = nu * (1.0 - nu * z / 2.0 + (nu * z).powi(2) / 6.0);
        assert!((f.phi(nu, z) - exact).abs() / exact < 1e-14);
    }

    #[test]
    fn cutoff_values() {
        let f = spectral_cutoff_filter(DEFAULT_CUTOFF_TAU_CAP);
        assert_eq!(f.phi(2.0, 1.0), 1.0);
        assert_eq!(f.phi(2.0, 0.25), 0.0);
        assert_eq!(f.phi(2.0, 0.5), 2.0, "tie at z = 1/ν is kept");
        assert_eq!(f.phi(2.0, 0.0), 0.0);
        assert_eq!((f.e, f.f_tau, f.tau), (1.0, 1.0, 8.0));
    }

    #[test]
    fn lookup_by_id() {
        assert_eq!(Filter::from_id("gf", Some(3.0)).unwrap().tau, 3.0);
        assert_eq!(Filter::from_id("cutoff", None).unwrap().tau, DEFAULT_CUTOFF_TAU_CAP);
        assert!(Filter::from_id("landweber", None).is_err());
    }

    #[test]
    fn krr_grid_maxima_stay_below_analytic_suprema() {
        let f = krr_filter();
        let grid = ValidationGrid {
            nu: numeric::log_space(0.1, 1e4, 60),
            z: numeric::lin_space(0.0, 1.0, 2001),
            alpha_phi: vec![0.0, 0.5, 1.0],
            alpha_psi: vec![0.0, 0.5, 1.0],
        };
        let report = validate_filter(&f, &grid).unwrap();
        assert!(report.passes());
        // sup_{u ≥ 0} u^α / (1 + u) = α^α (1 - α)^{1-α}
        for &alpha in &[0.0f64, 0.5, 1.0] {
            let sup = if alpha == 0.0 || alpha == 1.0 { 1.0 } else { alpha.powf(alpha) * (1.0 - alpha).powf(1.0 - alpha) };
            let single = ValidationGrid { alpha_phi: vec![alpha], alpha_psi: vec![], ..grid.clone() };
            let r = validate_filter(&f, &single).unwrap();
            assert!(r.max_phi_ratio <= sup + 1e-12, "α={alpha}: {} > {sup}", r.max_phi_ratio);
        }
        // at α = 1/2 the sup 1/2 is attained at z = 1/ν, which lies on the grid for ν = 1
        let at_one = ValidationGrid { nu: vec![1.0], alpha_phi: vec![0.5], alpha_psi: vec![], ..grid };
        let r = validate_filter(&f, &at_one).unwrap();
        assert!((r.max_phi_ratio - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cutoff_supremum_at_threshold() {
        let f = spectral_cutoff_filter(DEFAULT_CUTOFF_TAU_CAP);
        // for α < 1, z^α φ_ν(z) = z^{α-1} is largest at z = 1/ν where it equals ν^{1-α}
        let grid = ValidationGrid {
            nu: vec![2.0, 4.0, 10.0],
            z: vec![0.0, 0.1, 0.25, 0.5, 1.0],
            alpha_phi: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            alpha_psi: vec![0.0, 1.0, 4.0, 8.0],
        };
        let r = validate_filter(&f, &grid).unwrap();
        assert!(r.passes());
        assert!((r.max_phi_ratio - 1.0).abs() < 1e-12);
        let r = validate_filter(&f, &ValidationGrid::default_for(&f, 1.0)).unwrap();
        assert!(r.passes(), "{:?}", r.worst());
    }

    #[test]
    fn broken_filter_is_flagged() {
        let f = Filter::custom("broken", 1.0, 1.0, 1.0, |nu, _| 2.0 * nu);
        let grid = ValidationGrid {
            nu: vec![1.0, 10.0],
            z: vec![0.0, 0.5],
            alpha_phi: vec![0.0],
            alpha_psi: vec![],
        };
        let r = validate_filter(&f, &grid).unwrap();
        assert!(!r.passes());
        let worst = r.worst().unwrap();
        assert_eq!(worst.bound, Bound::Phi);
        assert_eq!(worst.alpha, 0.0);
        assert_eq!(worst.ratio, 2.0);
    }

    #[test]
    fn gradient_flow_psi_bound_at_small_alpha() {
        // sup_z e^{-νz} = 1 at z = 0, so the ψ bound at α = 0 needs F_τ ≥ 1;
        // (τ/e)^τ is below one for τ < e.
        let f = gradient_flow_filter(2.0);
        let r = validate_filter(&f, &ValidationGrid::default_for(&f, 1.0)).unwrap();
        assert!((r.max_phi_ratio - 1.0).abs() < 1e-9 || r.max_phi_ratio < 1.0);
        let worst = r.worst().unwrap();
        assert_eq!(worst.bound, Bound::Psi);
        assert_eq!(worst.alpha, 0.0);
        assert!((worst.ratio - 1.0 / f.f_tau).abs() < 1e-12);
        // with F_τ = max(1, (τ/e)^τ) the same grid passes
        let corrected = Filter { f_tau: f.f_tau.max(1.0), ..f.clone() };
        assert!(validate_filter(&corrected, &ValidationGrid::default_for(&corrected, 1.0)).unwrap().passes());
        // and for τ ≥ e the stated constant already dominates
        let g = gradient_flow_filter(3.0);
        assert!(validate_filter(&g, &ValidationGrid::default_for(&g, 1.0)).unwrap().passes());
    }

    #[test]
    fn rejects_bad_grids() {
        let f = krr_filter();
        let mut grid = ValidationGrid::default_for(&f, 1.0);
        grid.alpha_psi.push(3.0);
        assert!(validate_filter(&f, &grid).is_err());
        let empty = ValidationGrid { nu: vec![], ..ValidationGrid::default_for(&f, 1.0) };
        assert!(validate_filter(&f, &empty).is_err());
    }

    fn shipped() -> Vec<Filter> {
        vec![krr_filter(), gradient_flow_filter(2.0), spectral_cutoff_filter(DEFAULT_CUTOFF_TAU_CAP)]
    }

    proptest! {
        #[test]
        fn residual_identity(nu in 1e-1f64..1e5, z in 0.0f64..1.0) {
            for f in shipped() {
                let lhs = f.psi(nu, z) + z * f.phi(nu, z);
                prop_assert!((lhs - 1.0).abs() <= 4.0 * f64::EPSILON * (1.0 + z * f.phi(nu, z)));
            }
        }

        #[test]
        fn krr_and_gf_non_decreasing_in_nu(nu in 1e-1f64..1e4, factor in 1.0f64..50.0, z in 1e-6f64..1.0) {
            for f in [krr_filter(), gradient_flow_filter(2.0)] {
                prop_assert!(f.phi(nu * factor, z) >= f.phi(nu, z) * (1.0 - 1e-14));
            }
        }
    }
}
