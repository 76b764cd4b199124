use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use super::{Domain, EigenSystem, Kernel};

/// `k(x, y) = min(x, y)` on `[0, 1]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MinKernel;

pub fn min_kernel() -> MinKernel {
    MinKernel
}

impl Kernel for MinKernel {
    fn id(&self) -> &str {
        "min"
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        x[0].min(y[0])
    }

    fn domain(&self) -> Domain {
        Domain::UNIT_INTERVAL
    }

    fn kappa_sq(&self) -> f64 {
        1.0
    }

    fn eigensystem(&self) -> Option<Arc<dyn EigenSystem>> {
        Some(Arc::new(MinEigenSystem))
    }
}

/// Mercer system of the min kernel under the uniform measure on `[0, 1]`:
/// `λ_n = ((2n-1)π/2)^{-2}` and `e_n(x) = √2 sin((2n-1)πx/2)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MinEigenSystem;

pub fn min_kernel_eigensystem() -> MinEigenSystem {
    MinEigenSystem
}

impl MinEigenSystem {
    /// Angular frequency `(2n-1)π/2` of the n-th mode.
    #[inline]
    pub fn frequency(index: usize) -> f64 {
        (2 * index - 1) as f64 * PI / 2.0
    }
}

impl EigenSystem for MinEigenSystem {
    fn id(&self) -> &str {
        "min"
    }

    fn eigenvalue(&self, index: usize) -> f64 {
        let w = Self::frequency(index);
        1.0 / (w * w)
    }

    fn eigenfunction(&self, index: usize, x: &[f64]) -> f64 {
        SQRT_2 * (Self::frequency(index) * x[0]).sin()
    }

    fn beta(&self) -> f64 {
        2.0
    }

    fn domain(&self) -> Domain {
        Domain::UNIT_INTERVAL
    }

    fn default_truncation(&self) -> usize {
        100_000
    }

    fn sine_mode(&self, index: usize) -> Option<(f64, f64)> {
        Some((SQRT_2, Self::frequency(index)))
    }
}

/// Reproducing kernel of `H¹([0, 1])` with the norm `‖f‖² = ∫ f² + ∫ f'²`:
///
/// `k(x, y) = cosh(1 - max(x, y)) · cosh(min(x, y)) / sinh(1)`.
///
/// The variant with `cosh(1 - min(x, y))` in the second factor does not
/// reproduce the `H¹` inner product; the unit tests check both numerically.
/// No closed-form eigensystem under the uniform measure is provided.
#[derive(Debug, Clone, Copy, Default)]
pub struct SobolevH1Kernel;

pub fn sobolev_h1_kernel() -> SobolevH1Kernel {
    SobolevH1Kernel
}

impl Kernel for SobolevH1Kernel {
    fn id(&self) -> &str {
        "sobolev_h1"
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let (lo, hi) = if x[0] <= y[0] { (x[0], y[0]) } else { (y[0], x[0]) };
        (1.0 - hi).cosh() * lo.cosh() / 1f64.sinh()
    }

    fn domain(&self) -> Domain {
        Domain::UNIT_INTERVAL
    }

    fn kappa_sq(&self) -> f64 {
        // k(x, x) = (cosh 1 + cosh(2x - 1)) / (2 sinh 1), maximal at the endpoints.
        1f64.cosh() / 1f64.sinh()
    }
}

/// A user-supplied decreasing spectrum on the cosine basis of `[0, 1]`:
/// `e_1 = 1`, `e_i(x) = √2 cos((i-1)πx)`.
#[derive(Debug, Clone)]
pub struct CosineBasisSystem {
    eigenvalues: Vec<f64>,
    beta: f64,
}

impl CosineBasisSystem {
    pub fn new(eigenvalues: Vec<f64>, beta: f64) -> Self {
        Self { eigenvalues, beta }
    }

    /// `λ_i = i^{-beta}` for `i ≤ len`.
    pub fn power_law(beta: f64, len: usize) -> Self {
        Self::new((1..=len).map(|i| (i as f64).powf(-beta)).collect(), beta)
    }
}

impl EigenSystem for CosineBasisSystem {
    fn id(&self) -> &str {
        "cosine"
    }

    fn eigenvalue(&self, index: usize) -> f64 {
        self.eigenvalues.get(index - 1).copied().unwrap_or(0.0)
    }

    fn eigenfunction(&self, index: usize, x: &[f64]) -> f64 {
        if index == 1 {
            1.0
        } else {
            SQRT_2 * ((index - 1) as f64 * PI * x[0]).cos()
        }
    }

    fn beta(&self) -> f64 {
        self.beta
    }

    fn domain(&self) -> Domain {
        Domain::UNIT_INTERVAL
    }

    fn default_truncation(&self) -> usize {
        self.eigenvalues.len()
    }

    fn mode_count(&self) -> Option<usize> {
        Some(self.eigenvalues.len())
    }
}
