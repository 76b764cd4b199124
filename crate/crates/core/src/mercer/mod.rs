//! Kernels and their Mercer eigensystems.
//!
//! A [`Kernel`] is a pointwise-evaluable symmetric positive semi-definite
//! function on a [`Domain`]; an [`EigenSystem`] is an explicit Mercer
//! decomposition `k(x, y) = Σ λ_i e_i(x) e_i(y)` with respect to the uniform
//! measure on that domain. Eigen-indices are 1-based and `λ_1` is the
//! largest eigenvalue.

mod interval;
mod periodic;
mod sphere;

use std::fmt;
use std::sync::Arc;

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numeric;

pub use interval::{
    min_kernel, min_kernel_eigensystem, sobolev_h1_kernel, CosineBasisSystem, MinEigenSystem,
    MinKernel, SobolevH1Kernel,
};
pub use periodic::{
    periodic_kernel_eigensystem, periodic_sobolev_kernel, PeriodicEigenSystem, PeriodicKernel, PeriodicMode, PeriodicSpectrum,
    TrigKind,
};
pub use sphere::{dot_product_embedding_check, sphere_harmonic_dims, SphereEmbeddingCheck};

/// Domain of a kernel, always paired with its uniform probability measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// Closed interval `[lo, hi]`.
    Interval { lo: f64, hi: f64 },
    /// The torus `[-π, π)^dim`.
    Torus { dim: usize },
    /// The unit sphere `S^dim ⊂ R^{dim+1}`.
    Sphere { dim: usize },
}

impl Domain {
    pub const UNIT_INTERVAL: Domain = Domain::Interval { lo: 0.0, hi: 1.0 };

    /// Number of coordinates of a point.
    pub fn coordinates(&self) -> usize {
        match *self {
            Domain::Interval { .. } => 1,
            Domain::Torus { dim } => dim,
            Domain::Sphere { dim } => dim + 1,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.coordinates() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match *self {
            Domain::Interval { lo, hi } => x[0] >= lo && x[0] <= hi,
            Domain::Torus { .. } => x.iter().all(|v| (-std::f64::consts::PI..std::f64::consts::PI).contains(v)),
            Domain::Sphere { .. } => (x.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-9,
        }
    }

    /// Draw a point from the uniform measure.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match *self {
            Domain::Interval { lo, hi } => vec![lo + (hi - lo) * rng.random::<f64>()],
            Domain::Torus { dim } => (0..dim)
                .map(|_| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * rng.random::<f64>())
                .collect(),
            Domain::Sphere { dim } => loop {
                let v: Vec<f64> = (0..=dim).map(|_| rng.sample(StandardNormal)).collect();
                let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                if norm > 1e-12 {
                    break v.into_iter().map(|a| a / norm).collect();
                }
            },
        }
    }
}

/// A symmetric positive semi-definite kernel.
pub trait Kernel: Send + Sync + fmt::Debug {
    /// Stable identifier used in configuration files.
    fn id(&self) -> &str;

    fn eval(&self, x: &[f64], y: &[f64]) -> f64;

    fn domain(&self) -> Domain;

    /// Upper bound `κ² ≥ sup_x k(x, x)`.
    fn kappa_sq(&self) -> f64;

    /// Mercer eigensystem of the kernel under the uniform measure, when known in closed form.
    fn eigensystem(&self) -> Option<Arc<dyn EigenSystem>> {
        None
    }
}

/// An explicit Mercer system `(λ_i, e_i)`.
pub trait EigenSystem: Send + Sync + fmt::Debug {
    fn id(&self) -> &str;

    /// `λ_i` for a 1-based index.
    fn eigenvalue(&self, index: usize) -> f64;

    /// `e_i(x)` for a 1-based index.
    fn eigenfunction(&self, index: usize, x: &[f64]) -> f64;

    /// Claimed eigenvalue decay exponent `β`.
    fn beta(&self) -> f64;

    fn domain(&self) -> Domain;

    fn default_truncation(&self) -> usize;

    /// Number of modes for finite systems; `None` when the system is infinite.
    fn mode_count(&self) -> Option<usize> {
        None
    }

    /// `(amplitude, ω)` when `e_i(x) = amplitude · sin(ω x)` on an interval with `ω`
    /// affine in the index. Enables recurrence-based series evaluation.
    fn sine_mode(&self, _index: usize) -> Option<(f64, f64)> {
        None
    }
}

/// `Σ_{i ≤ terms} λ_i e_i(x) e_i(y)`.
pub fn mercer_partial_sum(es: &dyn EigenSystem, x: &[f64], y: &[f64], terms: usize) -> f64 {
    let terms = es.mode_count().map_or(terms, |len| terms.min(len));
    (1..=terms)
        .map(|i| es.eigenvalue(i) * es.eigenfunction(i, x) * es.eigenfunction(i, y))
        .sum()
}

/// Dense Gram matrix `K_ij = k(x_i, y_j)`.
pub fn gram_matrix(kernel: &dyn Kernel, xs: &[Vec<f64>], ys: &[Vec<f64>]) -> Mat<f64> {
    Mat::from_fn(xs.len(), ys.len(), |i, j| kernel.eval(&xs[i], &ys[j]))
}

/// Symmetric Gram matrix `K_ij = k(x_i, x_j)`, evaluating each pair once.
pub fn symmetric_gram(kernel: &dyn Kernel, xs: &[Vec<f64>]) -> Mat<f64> {
    let n = xs.len();
    let mut k = Mat::<f64>::zeros(n, n);
    for j in 0..n {
        for i in j..n {
            let v = kernel.eval(&xs[i], &xs[j]);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// Outcome of the basic kernel sanity checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelCheck {
    /// `max |k(x,y) - k(y,x)|` over random pairs.
    pub symmetry_defect: f64,
    /// Smallest eigenvalue of the Gram matrix on random points.
    pub min_gram_eigenvalue: f64,
    /// `max (k(x,x) - κ²)` over random points; non-positive when the bound holds.
    pub diagonal_excess: f64,
}

impl KernelCheck {
    pub fn passes(&self) -> bool {
        self.symmetry_defect <= 1e-12 && self.min_gram_eigenvalue >= -1e-9 && self.diagonal_excess <= 1e-12
    }
}

/// Symmetry, PSD and diagonal-bound checks on `points` uniform random points.
pub fn check_kernel(kernel: &dyn Kernel, points: usize, seed: u64) -> Result<KernelCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = kernel.domain();
    let xs: Vec<Vec<f64>> = (0..points).map(|_| domain.sample(&mut rng)).collect();
    let mut symmetry_defect = 0.0f64;
    let mut diagonal_excess = f64::NEG_INFINITY;
    for x in &xs {
        diagonal_excess = diagonal_excess.max(kernel.eval(x, x) - kernel.kappa_sq());
        for y in &xs {
            symmetry_defect = symmetry_defect.max((kernel.eval(x, y) - kernel.eval(y, x)).abs());
        }
    }
    let gram = symmetric_gram(kernel, &xs);
    let eigenvalues = gram
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    let min_gram_eigenvalue = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(KernelCheck { symmetry_defect, min_gram_eigenvalue, diagonal_excess })
}

/// `max_{i,j ≤ max_index} |⟨e_i, e_j⟩ - δ_ij|` under the uniform measure.
///
/// Intervals use composite Simpson with `panels` panels, tori of dimension at
/// most two use the tensor-product rule, and anything larger falls back to
/// Monte Carlo with `panels` fixed-seed draws.
pub fn orthonormality_defect(es: &dyn EigenSystem, max_index: usize, panels: usize) -> Result<f64> {
    let max_index = es.mode_count().map_or(max_index, |len| max_index.min(len));
    let (nodes, weights) = quadrature_rule(es.domain(), panels)?;
    let values: Vec<Vec<f64>> = (1..=max_index)
        .map(|i| nodes.iter().map(|x| es.eigenfunction(i, x)).collect())
        .collect();
    let mut worst = 0.0f64;
    for i in 0..max_index {
        for j in i..max_index {
            let inner: f64 = weights
                .iter()
                .zip(values[i].iter().zip(&values[j]))
                .map(|(w, (a, b))| w * a * b)
                .sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((inner - target).abs());
        }
    }
    Ok(worst)
}

/// Nodes and weights integrating against the uniform probability measure.
fn quadrature_rule(domain: Domain, panels: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    match domain {
        Domain::Interval { lo, hi } => {
            let w = numeric::simpson_weights(lo, hi, panels)?;
            let nodes = numeric::lin_space(lo, hi, panels + 1).into_iter().map(|x| vec![x]).collect();
            Ok((nodes, w.into_iter().map(|v| v / (hi - lo)).collect()))
        }
        Domain::Torus { dim } if dim <= 2 => {
            let pi = std::f64::consts::PI;
            let w1: Vec<f64> = numeric::simpson_weights(-pi, pi, panels)?
                .into_iter()
                .map(|v| v / (2.0 * pi))
                .collect();
            let x1 = numeric::lin_space(-pi, pi, panels + 1);
            if dim == 1 {
                return Ok((x1.into_iter().map(|x| vec![x]).collect(), w1));
            }
            let mut nodes = Vec::with_capacity(w1.len() * w1.len());
            let mut weights = Vec::with_capacity(w1.len() * w1.len());
            for (a, wa) in x1.iter().zip(&w1) {
                for (b, wb) in x1.iter().zip(&w1) {
                    nodes.push(vec![*a, *b]);
                    weights.push(wa * wb);
                }
            }
            Ok((nodes, weights))
        }
        other => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x005e_ed0f_0a7e);
            let draws = panels.max(1);
            let nodes = (0..draws).map(|_| other.sample(&mut rng)).collect();
            Ok((nodes, vec![1.0 / draws as f64; draws]))
        }
    }
}

/// Frequency cut-off of the eigensystem attached by [`kernel_from_id`] to `"periodic"`.
pub const DEFAULT_PERIODIC_MAX_FREQ: usize = 50_000;

/// Look up a kernel by its configuration identifier:
/// `"min"`, `"sobolev_h1"` or `"periodic"` (the periodic Sobolev kernel on the circle).
pub fn kernel_from_id(id: &str) -> Result<Arc<dyn Kernel>> {
    match id {
        "min" => Ok(Arc::new(min_kernel())),
        "sobolev_h1" => Ok(Arc::new(sobolev_h1_kernel())),
        "periodic" => Ok(Arc::new(periodic_sobolev_kernel(DEFAULT_PERIODIC_MAX_FREQ)?)),
        other => Err(Error::InvalidArgument(format!("unknown kernel `{other}`"))),
    }
}

/// The closed-form eigensystem behind a kernel identifier, when there is one.
pub fn eigensystem_from_id(id: &str) -> Result<Arc<dyn EigenSystem>> {
    kernel_from_id(id)?
        .eigensystem()
        .ok_or(Error::MissingEigensystem)
}

/// Least-squares decay exponent of `λ_i` over `i ∈ [i_min, i_max]`, ignoring zero eigenvalues.
pub(crate) fn fitted_decay(eigenvalues: impl Iterator<Item = (usize, f64)>) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = eigenvalues
        .filter(|(_, l)| *l > 0.0)
        .map(|(i, l)| (i as f64, l))
        .unzip();
    if xs.len() < 10 {
        return None;
    }
    numeric::fit_log_log(&xs, &ys).ok().map(|f| -f.slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_membership() {
        assert!(Domain::UNIT_INTERVAL.contains(&[0.0]));
        assert!(Domain::UNIT_INTERVAL.contains(&[1.0]));
        assert!(!Domain::UNIT_INTERVAL.contains(&[1.5]));
        assert!(!Domain::UNIT_INTERVAL.contains(&[0.5, 0.5]));
        assert!(Domain::Torus { dim: 2 }.contains(&[-std::f64::consts::PI, 0.0]));
        assert!(!Domain::Torus { dim: 1 }.contains(&[std::f64::consts::PI]));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = Domain::Sphere { dim: 2 }.sample(&mut rng);
            assert!(Domain::Sphere { dim: 2 }.contains(&p));
        }
    }

    #[test]
    fn monte_carlo_rule_is_deterministic() {
        let (a, _) = quadrature_rule(Domain::Torus { dim: 3 }, 100).unwrap();
        let (b, _) = quadrature_rule(Domain::Torus { dim: 3 }, 100).unwrap();
        assert_eq!(a, b);
    }
}
