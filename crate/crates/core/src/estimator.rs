//! The spectral-algorithm estimator `f̂_ν = φ_ν(T_X) g_Z`.
//!
//! `T_X` restricted to the span of `{k(x_i, ·)}` has the same non-zero
//! spectrum as `K/n`, so with `K/n = U Λ Uᵀ` the estimator is the kernel
//! expansion `f̂(x) = Σ α_i k(x_i, x)` with `α = (1/n) U φ_ν(Λ) Uᵀ y`.

use std::sync::Arc;

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::filters::Filter;
use crate::mercer::{gram_matrix, symmetric_gram, Kernel};

/// Eigenvalues of `K/n` in `[-NEGATIVE_EIGENVALUE_TOLERANCE, 0)` are clamped to zero.
pub const NEGATIVE_EIGENVALUE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: Vec<f64>,
    pub y: f64,
}

impl Sample {
    pub fn scalar(x: f64, y: f64) -> Self {
        Sample { x: vec![x], y }
    }
}

/// Eigendecomposition of the normalized Gram matrix `K/n` together with `Uᵀy`.
///
/// One decomposition serves every filter and every `ν`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    n: usize,
    /// Eigenvalues of `K/n`, non-decreasing, clamped at zero.
    eigenvalues: Vec<f64>,
    eigenvectors: Mat<f64>,
    projected: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn new(kernel: &dyn Kernel, samples: &[Sample]) -> Result<Self> {
        validate_samples(kernel, samples)?;
        let points: Vec<Vec<f64>> = samples.iter().map(|s| s.x.clone()).collect();
        let y: Vec<f64> = samples.iter().map(|s| s.y).collect();
        Self::from_gram(symmetric_gram(kernel, &points), &y)
    }

    /// Decompose an explicit Gram matrix `K` (not yet divided by `n`).
    pub fn from_gram(gram: Mat<f64>, y: &[f64]) -> Result<Self> {
        let n = y.len();
        if n == 0 || gram.nrows() != n || gram.ncols() != n {
            return Err(Error::InvalidArgument(format!(
                "Gram matrix is {}x{} for {} responses",
                gram.nrows(),
                gram.ncols(),
                n
            )));
        }
        if let Some(index) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteResponse { index });
        }
        let scale = 1.0 / n as f64;
        let normalized = Mat::from_fn(n, n, |i, j| 0.5 * (gram[(i, j)] + gram[(j, i)]) * scale);
        let evd = normalized
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
        let mut eigenvalues: Vec<f64> = (0..n).map(|i| evd.S().column_vector()[i]).collect();
        let min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -NEGATIVE_EIGENVALUE_TOLERANCE {
            return Err(Error::NonPsdGram { min_eigenvalue: min });
        }
        for v in eigenvalues.iter_mut() {
            *v = v.max(0.0);
        }
        let eigenvectors = evd.U().to_owned();
        let projected = (0..n)
            .map(|j| (0..n).map(|i| eigenvectors[(i, j)] * y[i]).sum())
            .collect();
        Ok(SpectralDecomposition { n, eigenvalues, eigenvectors, projected })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Eigenvalues of `K/n` in non-decreasing order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Column `j` is the eigenvector for `eigenvalues()[j]`.
    pub fn eigenvectors(&self) -> &Mat<f64> {
        &self.eigenvectors
    }

    /// `α = (1/n) U φ_ν(Λ) Uᵀ y`.
    pub fn coefficients(&self, filter: &Filter, nu: f64) -> Result<Vec<f64>> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::InvalidRegularization(nu));
        }
        let scale = 1.0 / self.n as f64;
        let weights: Vec<f64> = self
            .eigenvalues
            .iter()
            .zip(&self.projected)
            .map(|(z, p)| filter.phi(nu, *z) * p * scale)
            .collect();
        let mut alpha = vec![0.0; self.n];
        for (j, w) in weights.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            let col = self.eigenvectors.col(j);
            for (a, u) in alpha.iter_mut().zip(col.iter()) {
                *a += w * u;
            }
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::Decomposition("non-finite coefficients".into()));
        }
        Ok(alpha)
    }
}

fn validate_samples(kernel: &dyn Kernel, samples: &[Sample]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let domain = kernel.domain();
    if let Some(i) = samples.iter().position(|s| !domain.contains(&s.x)) {
        return Err(Error::InvalidArgument(format!(
            "sample {i} at {:?} lies outside the kernel domain {domain:?}",
            samples[i].x
        )));
    }
    if let Some(index) = samples.iter().position(|s| !s.y.is_finite()) {
        return Err(Error::NonFiniteResponse { index });
    }
    Ok(())
}

/// A kernel expansion `f̂(x) = Σ α_i k(x_i, x)`.
#[derive(Debug, Clone)]
pub struct FittedEstimator {
    pub points: Vec<Vec<f64>>,
    pub coefficients: Vec<f64>,
    pub kernel: Arc<dyn Kernel>,
    pub nu: f64,
    pub filter_name: String,
}

impl FittedEstimator {
    pub fn new(
        kernel: Arc<dyn Kernel>,
        points: Vec<Vec<f64>>,
        coefficients: Vec<f64>,
        nu: f64,
        filter_name: impl Into<String>,
    ) -> Self {
        FittedEstimator { points, coefficients, kernel, nu, filter_name: filter_name.into() }
    }

    pub fn predict_one(&self, x: &[f64]) -> f64 {
        self.points
            .iter()
            .zip(&self.coefficients)
            .map(|(p, a)| a * self.kernel.eval(p, x))
            .sum()
    }

    pub fn predict(&self, xs: &[Vec<f64>]) -> Vec<f64> {
        xs.iter().map(|x| self.predict_one(x)).collect()
    }
}

/// Fit the spectral algorithm defined by `filter` at regularization `nu`.
pub fn fit(kernel: Arc<dyn Kernel>, filter: &Filter, samples: &[Sample], nu: f64) -> Result<FittedEstimator> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::InvalidRegularization(nu));
    }
    let decomposition = SpectralDecomposition::new(kernel.as_ref(), samples)?;
    let coefficients = decomposition.coefficients(filter, nu)?;
    let points = samples.iter().map(|s| s.x.clone()).collect();
    Ok(FittedEstimator::new(kernel, points, coefficients, nu, filter.name.clone()))
}

pub fn predict(est: &FittedEstimator, xs: &[Vec<f64>]) -> Vec<f64> {
    est.predict(xs)
}

/// Evaluate several coefficient vectors sharing the same centres at once.
///
/// `coefficients` is `n × m`; the result is `xs.len() × m`. Rows are processed
/// in blocks so the cross-kernel matrix never has more than `block` rows.
pub fn predict_many(
    kernel: &dyn Kernel,
    points: &[Vec<f64>],
    coefficients: &Mat<f64>,
    xs: &[Vec<f64>],
    block: usize,
) -> Mat<f64> {
    let m = coefficients.ncols();
    let mut out = Mat::<f64>::zeros(xs.len(), m);
    let block = block.max(1);
    for start in (0..xs.len()).step_by(block) {
        let end = (start + block).min(xs.len());
        let cross = gram_matrix(kernel, &xs[start..end], points);
        let part = &cross * coefficients;
        out.as_mut().submatrix_mut(start, 0, end - start, m).copy_from(&part);
    }
    out
}

/// `ν = c · n^{β/(sβ+1)}`.
pub fn regularization_from_n(beta: f64, s: f64, c: f64, n: usize) -> f64 {
    c * (n as f64).powf(beta / (s * beta + 1.0))
}

/// Kernel ridge regression by a direct solve: `α = (K + nλI)⁻¹ y`.
pub fn ridge_closed_form(kernel: Arc<dyn Kernel>, samples: &[Sample], lambda: f64) -> Result<FittedEstimator> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("ridge parameter must be positive, got {lambda}")));
    }
    validate_samples(kernel.as_ref(), samples)?;
    let n = samples.len();
    let points: Vec<Vec<f64>> = samples.iter().map(|s| s.x.clone()).collect();
    let mut system = symmetric_gram(kernel.as_ref(), &points);
    for i in 0..n {
        system[(i, i)] += n as f64 * lambda;
    }
    let rhs = Mat::from_fn(n, 1, |i, _| samples[i].y);
    let llt = system.llt(Side::Lower).map_err(|e| Error::Solve(format!("{e:?}")))?;
    let alpha = llt.solve(&rhs);
    let coefficients = (0..n).map(|i| alpha[(i, 0)]).collect();
    Ok(FittedEstimator::new(kernel, points, coefficients, 1.0 / lambda, "ridge"))
}
