use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use super::{fitted_decay, Domain, EigenSystem, Kernel};
use crate::error::{Error, Result};

type ProfileFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type CoefficientFn = Arc<dyn Fn(&[i64]) -> f64 + Send + Sync>;

/// How the spectrum of a shift-invariant kernel `k(x, y) = g((x - y) mod [-π, π)^d)` is given.
#[derive(Clone)]
pub enum PeriodicSpectrum {
    /// The even profile `g`; Fourier coefficients are computed by the periodic trapezoid rule
    /// on `points` nodes per coordinate.
    Profile { g: ProfileFn, points: usize },
    /// Closed-form Fourier coefficients `ĝ(m) = (2π)^{-d} ∫ g(z) e^{-i⟨m,z⟩} dz`.
    Coefficients(CoefficientFn),
}

impl PeriodicSpectrum {
    pub fn profile(g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static, points: usize) -> Self {
        PeriodicSpectrum::Profile { g: Arc::new(g), points }
    }

    pub fn coefficients(rule: impl Fn(&[i64]) -> f64 + Send + Sync + 'static) -> Self {
        PeriodicSpectrum::Coefficients(Arc::new(rule))
    }

    fn coefficient(&self, m: &[i64]) -> f64 {
        match self {
            PeriodicSpectrum::Coefficients(rule) => rule(m),
            PeriodicSpectrum::Profile { g, points } => {
                let d = m.len();
                let p = *points;
                let h = 2.0 * PI / p as f64;
                let total = p.pow(d as u32);
                let mut z = vec![0.0; d];
                let mut acc = 0.0;
                for flat in 0..total {
                    let mut rest = flat;
                    let mut phase = 0.0;
                    for (c, zc) in z.iter_mut().enumerate() {
                        *zc = -PI + (rest % p) as f64 * h;
                        rest /= p;
                        phase += m[c] as f64 * *zc;
                    }
                    acc += g(&z) * phase.cos();
                }
                acc / total as f64
            }
        }
    }
}

impl fmt::Debug for PeriodicSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PeriodicSpectrum::Profile { points, .. } => {
                f.debug_struct("Profile").field("points", points).finish_non_exhaustive()
            }
            PeriodicSpectrum::Coefficients(_) => f.write_str("Coefficients(..)"),
        }
    }
}

/// Real part (`Cos`), imaginary part (`Sin`) or the constant mode of the Fourier basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigKind {
    Constant,
    Cos,
    Sin,
}

/// One real eigenfunction of a periodic system.
///
/// A frequency pair `±m` yields `√2 cos⟨m, x⟩` (recorded at `+m`, the member whose
/// first non-zero coordinate is positive) and `√2 sin⟨m, x⟩` (recorded at `-m`).
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicMode {
    pub frequency: Vec<i64>,
    pub kind: TrigKind,
    pub eigenvalue: f64,
}

impl PeriodicMode {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let phase: f64 = self.frequency.iter().zip(x).map(|(m, v)| *m as f64 * v).sum();
        match self.kind {
            TrigKind::Constant => 1.0,
            TrigKind::Cos => SQRT_2 * phase.cos(),
            // the sine mode is stored at -m, so flip the phase back
            TrigKind::Sin => -SQRT_2 * phase.sin(),
        }
    }
}

/// Mercer system of a shift-invariant kernel on the torus under the uniform measure.
#[derive(Debug, Clone)]
pub struct PeriodicEigenSystem {
    dim: usize,
    modes: Vec<PeriodicMode>,
    beta: f64,
}

impl PeriodicEigenSystem {
    pub fn modes(&self) -> &[PeriodicMode] {
        &self.modes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Override the claimed decay exponent.
    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }
}

/// Enumerate the frequencies `{-max_freq..=max_freq}^d` in the deterministic order
/// (L1 magnitude, sign pattern, coordinates).
fn enumerate_frequencies(d: usize, max_freq: usize) -> Vec<Vec<i64>> {
    let side = 2 * max_freq + 1;
    let mut all: Vec<Vec<i64>> = (0..side.pow(d as u32))
        .map(|mut flat| {
            (0..d)
                .map(|_| {
                    let v = (flat % side) as i64 - max_freq as i64;
                    flat /= side;
                    v
                })
                .collect()
        })
        .collect();
    all.sort_by(|a, b| {
        let l1 = |m: &Vec<i64>| m.iter().map(|v| v.unsigned_abs()).sum::<u64>();
        let signs = |m: &Vec<i64>| m.iter().map(|v| -v.signum()).collect::<Vec<_>>();
        let mags = |m: &Vec<i64>| m.iter().map(|v| v.unsigned_abs()).collect::<Vec<_>>();
        l1(a).cmp(&l1(b))
            .then_with(|| signs(a).cmp(&signs(b)))
            .then_with(|| mags(a).cmp(&mags(b)))
    });
    all
}

fn is_canonical(m: &[i64]) -> bool {
    m.iter().find(|v| **v != 0).is_some_and(|v| *v > 0)
}

/// Build the eigensystem of `k(x, y) = g((x - y) mod [-π, π)^d)` truncated at
/// `|m_c| ≤ max_freq` in every coordinate.
///
/// Eigenvalues are sorted non-increasing; ties keep the enumeration order.
/// Coefficients in `[-1e-9, 1e-12]` are treated as zero, anything below
/// `-1e-9` means `g` is not positive definite. The claimed `β` defaults to the
/// least-squares decay of the positive eigenvalues (infinite for finite rank).
pub fn periodic_kernel_eigensystem(
    spectrum: &PeriodicSpectrum,
    d: usize,
    max_freq: usize,
) -> Result<PeriodicEigenSystem> {
    if d == 0 {
        return Err(Error::InvalidArgument("torus dimension must be positive".into()));
    }
    let mut modes = Vec::new();
    for m in enumerate_frequencies(d, max_freq) {
        let is_zero = m.iter().all(|v| *v == 0);
        if !is_zero && !is_canonical(&m) {
            continue;
        }
        let mut value = spectrum.coefficient(&m);
        if value < -1e-9 {
            return Err(Error::NonPsdSpectrum { value, frequency: m });
        }
        if value <= 1e-12 {
            value = 0.0;
        }
        if is_zero {
            modes.push(PeriodicMode { frequency: m, kind: TrigKind::Constant, eigenvalue: value });
        } else {
            let neg: Vec<i64> = m.iter().map(|v| -v).collect();
            modes.push(PeriodicMode { frequency: m, kind: TrigKind::Cos, eigenvalue: value });
            modes.push(PeriodicMode { frequency: neg, kind: TrigKind::Sin, eigenvalue: value });
        }
    }
    modes.sort_by(|a, b| b.eigenvalue.total_cmp(&a.eigenvalue));
    let beta = if modes.iter().filter(|m| m.eigenvalue > 0.0).count() >= 10 {
        fitted_decay(modes.iter().enumerate().map(|(i, m)| (i + 1, m.eigenvalue))).unwrap_or(f64::INFINITY)
    } else {
        f64::INFINITY
    };
    Ok(PeriodicEigenSystem { dim: d, modes, beta })
}

impl EigenSystem for PeriodicEigenSystem {
    fn id(&self) -> &str {
        "periodic"
    }

    fn eigenvalue(&self, index: usize) -> f64 {
        self.modes.get(index - 1).map_or(0.0, |m| m.eigenvalue)
    }

    fn eigenfunction(&self, index: usize, x: &[f64]) -> f64 {
        self.modes.get(index - 1).map_or(0.0, |m| m.eval(x))
    }

    fn beta(&self) -> f64 {
        self.beta
    }

    fn domain(&self) -> Domain {
        Domain::Torus { dim: self.dim }
    }

    fn default_truncation(&self) -> usize {
        self.modes.len()
    }

    fn mode_count(&self) -> Option<usize> {
        Some(self.modes.len())
    }
}

/// `k(x, y) = g((x - y) mod [-π, π)^d)` for an even positive-definite profile `g`.
#[derive(Clone)]
pub struct PeriodicKernel {
    g: ProfileFn,
    dim: usize,
    system: Option<Arc<dyn EigenSystem>>,
}

impl PeriodicKernel {
    pub fn new(g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static, dim: usize) -> Self {
        Self { g: Arc::new(g), dim, system: None }
    }

    /// Attach a known eigensystem.
    pub fn with_eigensystem(mut self, system: Arc<dyn EigenSystem>) -> Self {
        self.system = Some(system);
        self
    }
}

/// The periodic first-order Sobolev kernel on the circle,
/// `g(z) = 1 + 2 Σ_{m≥1} cos(mz)/m² = 1 + π²/3 - π|z| + z²/2`, with its
/// eigensystem truncated at `|m| ≤ max_freq` (so `β = 2`).
pub fn periodic_sobolev_kernel(max_freq: usize) -> Result<PeriodicKernel> {
    let spectrum = PeriodicSpectrum::coefficients(|m| if m[0] == 0 { 1.0 } else { 1.0 / (m[0] * m[0]) as f64 });
    let system = periodic_kernel_eigensystem(&spectrum, 1, max_freq)?.with_beta(2.0);
    let g = |z: &[f64]| {
        let a = z[0].abs();
        1.0 + PI * PI / 3.0 - PI * a + a * a / 2.0
    };
    Ok(PeriodicKernel::new(g, 1).with_eigensystem(Arc::new(system)))
}

/// `a mod [-π, π)`.
pub(crate) fn wrap(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

impl fmt::Debug for PeriodicKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicKernel").field("dim", &self.dim).finish_non_exhaustive()
    }
}

impl Kernel for PeriodicKernel {
    fn id(&self) -> &str {
        "periodic"
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let z: Vec<f64> = x.iter().zip(y).map(|(a, b)| wrap(a - b)).collect();
        (self.g)(&z)
    }

    fn domain(&self) -> Domain {
        Domain::Torus { dim: self.dim }
    }

    fn kappa_sq(&self) -> f64 {
        // for a positive-definite profile, |g(z)| ≤ g(0)
        (self.g)(&vec![0.0; self.dim])
    }

    fn eigensystem(&self) -> Option<Arc<dyn EigenSystem>> {
        self.system.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mercer::{check_kernel, mercer_partial_sum, orthonormality_defect};

    /// `g(z) = 1 + 2 Σ_{m≥1} cos(mz)/m² = 1 + π²/3 - π|z| + z²/2` on `[-π, π]`.
    fn sobolev_profile(z: &[f64]) -> f64 {
        let a = z[0].abs();
        1.0 + PI * PI / 3.0 - PI * a + a * a / 2.0
    }

    fn sobolev_coefficients(m: &[i64]) -> f64 {
        if m[0] == 0 {
            1.0
        } else {
            1.0 / (m[0] * m[0]) as f64
        }
    }

    #[test]
    fn constant_profile_has_one_mode() {
        let es = periodic_kernel_eigensystem(&PeriodicSpectrum::profile(|_| 1.0, 64), 1, 5).unwrap();
        let nonzero: Vec<_> = es.modes().iter().filter(|m| m.eigenvalue > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(nonzero[0].frequency, vec![0]);
        assert!((nonzero[0].eigenvalue - 1.0).abs() < 1e-12);
        assert!(es.beta().is_infinite());
    }

    #[test]
    fn cosine_profile_splits_into_plus_minus_one() {
        let es = periodic_kernel_eigensystem(&PeriodicSpectrum::profile(|z| z[0].cos(), 64), 1, 6).unwrap();
        let nonzero: Vec<_> = es.modes().iter().filter(|m| m.eigenvalue > 0.0).collect();
        assert_eq!(nonzero.len(), 2);
        let mut freqs: Vec<i64> = nonzero.iter().map(|m| m.frequency[0]).collect();
        freqs.sort();
        assert_eq!(freqs, vec![-1, 1]);
        for m in nonzero {
            assert!((m.eigenvalue - 0.5).abs() < 1e-12);
        }
        // the two real modes are the first two indices, cos before sin
        assert_eq!(es.modes()[0].kind, TrigKind::Cos);
        assert_eq!(es.modes()[1].kind, TrigKind::Sin);
    }

    #[test]
    fn rejects_indefinite_profile() {
        let err = periodic_kernel_eigensystem(&PeriodicSpectrum::profile(|z| -z[0].cos(), 64), 1, 3);
        assert!(matches!(err, Err(Error::NonPsdSpectrum { .. })));
    }

    #[test]
    fn eigenfunctions_are_uniformly_bounded() {
        let es = periodic_kernel_eigensystem(&PeriodicSpectrum::coefficients(sobolev_coefficients), 1, 40)
            .unwrap();
        for k in 0..=400 {
            let x = [-PI + 2.0 * PI * k as f64 / 401.0];
            for mode in es.modes() {
                assert!(mode.eval(&x).abs() <= SQRT_2 + 1e-12);
            }
            // |exp(i⟨m,x⟩)| = 1: the cos/sin pair of each frequency has squared sum 2
            for pair in es.modes().iter().filter(|m| m.kind == TrigKind::Cos) {
                let neg: Vec<i64> = pair.frequency.iter().map(|v| -v).collect();
                let sin = es.modes().iter().find(|m| m.frequency == neg).unwrap();
                let modulus = (pair.eval(&x).powi(2) + sin.eval(&x).powi(2)) / 2.0;
                assert!((modulus - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn orthonormal_in_one_and_two_dimensions() {
        let es1 = periodic_kernel_eigensystem(&PeriodicSpectrum::coefficients(sobolev_coefficients), 1, 6)
            .unwrap();
        assert!(orthonormality_defect(&es1, 10, 10_000).unwrap() < 1e-6);
        let es2 = periodic_kernel_eigensystem(
            &PeriodicSpectrum::coefficients(|m| 1.0 / (1.0 + (m[0] * m[0] + m[1] * m[1]) as f64).powi(2)),
            2,
            3,
        )
        .unwrap();
        assert!(orthonormality_defect(&es2, 10, 400).unwrap() < 1e-6);
    }

    #[test]
    fn profile_quadrature_matches_closed_form() {
        let numeric = periodic_kernel_eigensystem(&PeriodicSpectrum::profile(sobolev_profile, 4096), 1, 5).unwrap();
        let exact = periodic_kernel_eigensystem(&PeriodicSpectrum::coefficients(sobolev_coefficients), 1, 5)
            .unwrap();
        // the constant mode and |m| = 1 tie at eigenvalue 1, so match modes by label
        assert_eq!(numeric.modes().len(), exact.modes().len());
        for b in exact.modes() {
            let a = numeric
                .modes()
                .iter()
                .find(|a| a.frequency == b.frequency && a.kind == b.kind)
                .unwrap();
            assert!((a.eigenvalue - b.eigenvalue).abs() < 1e-6);
        }
    }

    #[test]
    fn mercer_reconstruction_of_periodic_sobolev_kernel() {
        let es = Arc::new(
            periodic_kernel_eigensystem(&PeriodicSpectrum::coefficients(sobolev_coefficients), 1, 50_000)
                .unwrap()
                .with_beta(2.0),
        );
        assert!((es.beta() - 2.0).abs() < 1e-12);
        let kernel = PeriodicKernel::new(sobolev_profile, 1).with_eigensystem(es.clone());
        assert!(check_kernel(&kernel, 20, 11).unwrap().passes());
        let grid: Vec<f64> = (0..20).map(|i| -PI + 2.0 * PI * (i as f64 + 0.5) / 20.0).collect();
        let mut worst = 0.0f64;
        for &x in &grid {
            for &y in &grid {
                let approx = mercer_partial_sum(es.as_ref(), &[x], &[y], 100_000);
                worst = worst.max((approx - kernel.eval(&[x], &[y])).abs());
            }
        }
        assert!(worst <= 1e-2, "worst {worst}");
    }

    #[test]
    fn enumeration_order_is_deterministic() {
        let f = enumerate_frequencies(2, 1);
        assert_eq!(f[0], vec![0, 0]);
        assert_eq!(f.len(), 9);
        assert_eq!(f, enumerate_frequencies(2, 1));
        assert!((wrap(3.5 * PI) + 0.5 * PI).abs() < 1e-12);
    }
}
