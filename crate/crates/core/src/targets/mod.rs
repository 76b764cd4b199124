//! Misspecified series targets, the data-generating process, and the
//! hard-instance families used for minimax lower bounds.

mod hard;
mod packing;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::diagnostics::{doubling_verdict, Verdict, DEFAULT_NORM_TOLERANCE, DEFAULT_RATIO_LIMIT};
use crate::error::{Error, Result};
use crate::estimator::Sample;
use crate::mercer::{Domain, EigenSystem};

pub use hard::{default_epsilon, hard_instance, write_hard_instance, HardInstanceFamily, PairDistance};
pub use packing::{pack_hypercube, pack_hypercube_with, packing_distance, packing_size, Codebook, DEFAULT_PACKING_BUDGET, DEFAULT_PACKING_SEED};

/// Generator used by [`sample_data`]; recorded in experiment metadata.
pub const SAMPLE_GENERATOR: &str = "rand_chacha::ChaCha8Rng seeded from u64; x ~ U(domain); noise ~ rand_distr::Normal(0, sigma)";

/// Number of series terms kept when evaluating the experiment targets.
pub const DEFAULT_TRUNCATION: usize = 3000;

/// Affine map from term index `k ≥ 1` to basis index `scale · k + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermMap {
    pub scale: usize,
    pub offset: isize,
}

impl TermMap {
    pub const IDENTITY: TermMap = TermMap { scale: 1, offset: 0 };
    /// `k ↦ 2k - 1`
    pub const ODD: TermMap = TermMap { scale: 2, offset: -1 };

    pub fn shifted(offset: usize) -> Self {
        TermMap { scale: 1, offset: offset as isize }
    }

    #[inline]
    pub fn apply(&self, k: usize) -> usize {
        (self.scale as isize * k as isize + self.offset) as usize
    }
}

#[derive(Clone)]
pub enum SeriesBasis {
    /// `sin(2kπx) + cos(2kπx)` on `[0, 1]`; not an eigenbasis of any shipped kernel.
    SobolevTrig,
    /// `e_{term_map(k)}` of an explicit eigensystem.
    Eigen { system: Arc<dyn EigenSystem>, term_map: TermMap },
}

impl fmt::Debug for SeriesBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesBasis::SobolevTrig => f.write_str("SobolevTrig"),
            SeriesBasis::Eigen { system, term_map } => f
                .debug_struct("Eigen")
                .field("system", &system.id())
                .field("term_map", term_map)
                .finish(),
        }
    }
}

type CoefficientRule = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// `f(x) = Σ_{k ≤ truncation} c_k b_k(x)`.
#[derive(Clone)]
pub struct SeriesTarget {
    name: String,
    basis: SeriesBasis,
    rule: CoefficientRule,
    smoothness: f64,
    coefficients: Vec<f64>,
}

impl fmt::Debug for SeriesTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeriesTarget")
            .field("name", &self.name)
            .field("basis", &self.basis)
            .field("smoothness", &self.smoothness)
            .field("truncation", &self.coefficients.len())
            .finish()
    }
}

impl SeriesTarget {
    pub fn new(
        name: impl Into<String>,
        basis: SeriesBasis,
        smoothness: f64,
        truncation: usize,
        rule: impl Fn(usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let rule: CoefficientRule = Arc::new(rule);
        let coefficients = (1..=truncation).map(|k| rule(k)).collect();
        SeriesTarget { name: name.into(), basis, rule, smoothness, coefficients }
    }

    /// `coefficient · e_index` for a single mode of `system`.
    pub fn single_term(system: Arc<dyn EigenSystem>, index: usize, coefficient: f64) -> Self {
        let basis = SeriesBasis::Eigen { system, term_map: TermMap::shifted(index - 1) };
        SeriesTarget::new("single", basis, 0.0, 1, move |k| if k == 1 { coefficient } else { 0.0 })
    }

    /// The same series with a different number of terms.
    pub fn with_truncation(&self, truncation: usize) -> Self {
        let coefficients = (1..=truncation).map(|k| (self.rule)(k)).collect();
        SeriesTarget { coefficients, ..self.clone() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn basis(&self) -> &SeriesBasis {
        &self.basis
    }

    pub fn smoothness(&self) -> f64 {
        self.smoothness
    }

    pub fn truncation(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficient(&self, k: usize) -> f64 {
        (self.rule)(k)
    }

    pub fn eigensystem(&self) -> Option<(&Arc<dyn EigenSystem>, TermMap)> {
        match &self.basis {
            SeriesBasis::Eigen { system, term_map } => Some((system, *term_map)),
            SeriesBasis::SobolevTrig => None,
        }
    }

    pub fn domain(&self) -> Domain {
        match &self.basis {
            SeriesBasis::SobolevTrig => Domain::UNIT_INTERVAL,
            SeriesBasis::Eigen { system, .. } => system.domain(),
        }
    }

    /// Truncated series value at `x`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.basis {
            SeriesBasis::SobolevTrig => {
                // θ_k = 2kπx; sin θ + cos θ summed with a rotation recurrence
                let step = 2.0 * PI * x[0];
                rotation_sum(&self.coefficients, step, step, |s, c| s + c)
            }
            SeriesBasis::Eigen { system, term_map } => {
                let first = term_map.apply(1);
                if let (Some((amp, w1)), Some((_, w2))) =
                    (system.sine_mode(first), system.sine_mode(term_map.apply(2)))
                {
                    amp * rotation_sum(&self.coefficients, w1 * x[0], (w2 - w1) * x[0], |s, _| s)
                } else {
                    self.coefficients
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| **c != 0.0)
                        .map(|(i, c)| c * system.eigenfunction(term_map.apply(i + 1), x))
                        .sum()
                }
            }
        }
    }

    pub fn eval_many(&self, xs: &[Vec<f64>]) -> Vec<f64> {
        xs.iter().map(|x| self.eval(x)).collect()
    }
}

/// `Σ_k c_k g(sin θ_k, cos θ_k)` with `θ_k = first + (k-1) step`.
///
/// The angle is advanced by rotation and re-seeded exactly every 64 terms.
fn rotation_sum(coefficients: &[f64], first: f64, step: f64, g: impl Fn(f64, f64) -> f64) -> f64 {
    let (ds, dc) = step.sin_cos();
    let mut acc = 0.0;
    let (mut s, mut c) = (0.0, 0.0);
    for (i, coef) in coefficients.iter().enumerate() {
        if i % 64 == 0 {
            let (a, b) = (first + i as f64 * step).sin_cos();
            s = a;
            c = b;
        }
        acc += coef * g(s, c);
        let next_s = s * dc + c * ds;
        c = c * dc - s * ds;
        s = next_s;
    }
    acc
}

fn check_smoothness(s: f64) -> Result<()> {
    if s > 0.0 && s < 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("series targets need 0 < s < 0.5, got {s}")))
    }
}

/// `f(x) = Σ k^{-(s+0.5)} (sin 2kπx + cos 2kπx)` on `[0, 1]`.
pub fn sobolev_series_target(s: f64, truncation: usize) -> Result<SeriesTarget> {
    check_smoothness(s)?;
    Ok(SeriesTarget::new("sobolev_series", SeriesBasis::SobolevTrig, s, truncation, move |k| {
        (k as f64).powf(-(s + 0.5))
    }))
}

/// `f(x) = Σ k^{-(s+0.5)} e_{2k-1}(x)` over the min-kernel eigensystem.
pub fn min_series_target(s: f64, truncation: usize) -> Result<SeriesTarget> {
    check_smoothness(s)?;
    let basis = SeriesBasis::Eigen {
        system: Arc::new(crate::mercer::min_kernel_eigensystem()),
        term_map: TermMap::ODD,
    };
    Ok(SeriesTarget::new("min_series", basis, s, truncation, move |k| (k as f64).powf(-(s + 0.5))))
}

/// Look up a shipped target by its config identifier. `"min_single"` is the
/// well-specified target `λ_1^{1/2} e_1` on the min system and ignores `s`.
pub fn target_from_id(id: &str, s: f64, truncation: usize) -> Result<SeriesTarget> {
    match id {
        "sobolev_series" => sobolev_series_target(s, truncation),
        "min_series" => min_series_target(s, truncation),
        "min_single" => {
            let es = crate::mercer::min_kernel_eigensystem();
            let c = es.eigenvalue(1).sqrt();
            Ok(SeriesTarget::single_term(Arc::new(es), 1, c))
        }
        other => Err(Error::InvalidArgument(format!("unknown target `{other}`"))),
    }
}

pub fn evaluate_target(t: &SeriesTarget, x: &[f64]) -> f64 {
    t.eval(x)
}

/// A partial interpolation-space norm with its convergence evidence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    /// `(Σ_{k ≤ N} c_k² λ_{map(k)}^{-s'})^{1/2}` at the requested truncation `N`.
    pub value: f64,
    /// Values at `2N` and `4N`.
    pub doubled: f64,
    pub quadrupled: f64,
    pub verdict: Verdict,
}

/// `‖f‖_{[H]^{s'}}` in coefficient space, truncated at `truncation` terms.
///
/// The verdict comes from the doubling test: converged when going from `2N`
/// to `4N` terms moves the value by less than `1e-4`, or when the squared
/// increments shrink geometrically (ratio below 0.95, i.e. summands decaying
/// faster than `k^{-1.07}`); otherwise diverging.
pub fn interpolation_norm(t: &SeriesTarget, s_prime: f64, truncation: usize) -> Result<NormEstimate> {
    interpolation_norm_with(t, s_prime, truncation, DEFAULT_NORM_TOLERANCE, DEFAULT_RATIO_LIMIT)
}

pub fn interpolation_norm_with(
    t: &SeriesTarget,
    s_prime: f64,
    truncation: usize,
    tolerance: f64,
    ratio_limit: f64,
) -> Result<NormEstimate> {
    let (system, map) = t.eigensystem().ok_or(Error::MissingEigensystem)?;
    if s_prime < 0.0 || truncation == 0 {
        return Err(Error::InvalidArgument(format!(
            "need s' ≥ 0 and a positive truncation, got s' = {s_prime}, N = {truncation}"
        )));
    }
    let term = |k: usize| {
        let c = t.coefficient(k);
        if c == 0.0 {
            0.0
        } else {
            c * c * system.eigenvalue(map.apply(k)).powf(-s_prime)
        }
    };
    let mut squared = [0.0f64; 3];
    let mut acc = 0.0;
    let mut stage = 0;
    for k in 1..=4 * truncation {
        acc += term(k);
        if k == truncation << stage {
            squared[stage] = acc;
            stage += 1;
        }
    }
    let verdict = doubling_verdict(squared.map(f64::sqrt), squared, tolerance, ratio_limit);
    Ok(NormEstimate {
        value: squared[0].sqrt(),
        doubled: squared[1].sqrt(),
        quadrupled: squared[2].sqrt(),
        verdict,
    })
}

/// `n` i.i.d. samples `y = f(x) + ε`, `x` uniform on the target domain,
/// `ε ~ N(0, σ²)`. A pure function of its arguments.
pub fn sample_data(t: &SeriesTarget, n: usize, sigma: f64, seed: u64) -> Result<Vec<Sample>> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise level must be non-negative, got {sigma}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let domain = t.domain();
    Ok((0..n)
        .map(|_| {
            let x = domain.sample(&mut rng);
            let eps = noise.sample(&mut rng);
            let y = t.eval(&x) + eps;
            Sample { x, y }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mercer::min_kernel_eigensystem;
    use std::f64::consts::SQRT_2;

    /// Direct summation oracle, independent of the rotation recurrence.
    fn direct_min(s: f64, n: usize, x: f64) -> f64 {
        (1..=n)
            .map(|k| (k as f64).powf(-(s + 0.5)) * SQRT_2 * ((4 * k - 3) as f64 * PI * x / 2.0).sin())
            .sum()
    }

    fn direct_sobolev(s: f64, n: usize, x: f64) -> f64 {
        (1..=n)
            .map(|k| {
                let a = 2.0 * k as f64 * PI * x;
                (k as f64).powf(-(s + 0.5)) * (a.sin() + a.cos())
            })
            .sum()
    }

    #[test]
    fn recurrence_matches_direct_summation() {
        let t = min_series_target(0.4, 3000).unwrap();
        let u = sobolev_series_target(0.4, 3000).unwrap();
        for &x in &[0.0, 0.013, 0.25, 0.5, 0.77, 0.999, 1.0] {
            assert!((t.eval(&[x]) - direct_min(0.4, 3000, x)).abs() < 1e-10);
            assert!((u.eval(&[x]) - direct_sobolev(0.4, 3000, x)).abs() < 1e-10);
        }
    }

    #[test]
    fn sobolev_series_at_zero_grows() {
        // every term equals k^{-(s+0.5)} at x = 0
        let s = 0.4;
        let a = sobolev_series_target(s, 1000).unwrap().eval(&[0.0]);
        let b = sobolev_series_target(s, 8000).unwrap().eval(&[0.0]);
        let expected: f64 = (1..=1000).map(|k| (k as f64).powf(-0.9)).sum();
        assert!((a - expected).abs() < 1e-9);
        assert!(b > a + 1.0);
    }

    #[test]
    fn sobolev_series_stable_in_the_interior() {
        let t = sobolev_series_target(0.4, 3000).unwrap();
        let a = t.eval(&[0.5]);
        let b = t.with_truncation(6000).eval(&[0.5]);
        assert!((a - b).abs() < 1e-3, "{a} vs {b}");
        assert_eq!(t.truncation(), 3000);
    }

    #[test]
    fn min_series_boundary_behaviour() {
        let t = min_series_target(0.4, 3000).unwrap();
        assert_eq!(t.eval(&[0.0]), 0.0);
        // e_{2k-1}(1) = √2 sin((4k-3)π/2) = +√2 for every k
        for k in 1..=100usize {
            let v = ((4 * k - 3) as f64 * PI / 2.0).sin();
            assert!((v - 1.0).abs() < 1e-12, "k={k}: {v}");
        }
        let expected: f64 = SQRT_2 * (1..=3000).map(|k| (k as f64).powf(-0.9)).sum::<f64>();
        assert!((t.eval(&[1.0]) - expected).abs() < 1e-9);
        assert!((t.eval(&[0.5]) - t.with_truncation(6000).eval(&[0.5])).abs() < 1e-3);
    }

    #[test]
    fn min_series_is_unbounded_at_one() {
        let mut previous = 0.0;
        for n in [10, 100, 1000, 10_000, 100_000] {
            let v = min_series_target(0.4, n).unwrap().eval(&[1.0]);
            assert!(v > previous);
            previous = v;
        }
        assert!(previous > 20.0);
    }

    #[test]
    fn single_term_target() {
        let es: Arc<dyn EigenSystem> = Arc::new(min_kernel_eigensystem());
        let t = SeriesTarget::single_term(es.clone(), 1, 1.0);
        assert!((t.eval(&[1.0]) - SQRT_2).abs() < 1e-15);
        // λ_1^{s/2} e_1 has unit [H]^s norm
        let s = 0.7;
        let t = SeriesTarget::single_term(es, 1, min_kernel_eigensystem().eigenvalue(1).powf(s / 2.0));
        let norm = interpolation_norm(&t, s, 10).unwrap();
        assert!((norm.value - 1.0).abs() < 1e-14);
        assert_eq!(norm.verdict, Verdict::Converged);
    }

    #[test]
    fn min_series_norm_verdicts() {
        let t = min_series_target(0.4, 3000).unwrap();
        assert_eq!(interpolation_norm(&t, 0.3, 3000).unwrap().verdict, Verdict::Converged);
        assert_eq!(interpolation_norm(&t, 0.0, 3000).unwrap().verdict, Verdict::Converged);
        let at_s = interpolation_norm(&t, 0.4, 3000).unwrap();
        assert_eq!(at_s.verdict, Verdict::Diverging);
        assert!(at_s.quadrupled > at_s.doubled && at_s.doubled > at_s.value);
    }

    #[test]
    fn sobolev_series_has_no_eigensystem() {
        let t = sobolev_series_target(0.4, 100).unwrap();
        assert!(matches!(interpolation_norm(&t, 0.2, 100), Err(Error::MissingEigensystem)));
    }

    #[test]
    fn constructors_validate_smoothness() {
        assert!(min_series_target(0.5, 10).is_err());
        assert!(sobolev_series_target(0.0, 10).is_err());
        assert!(target_from_id("min_series", 0.4, 10).is_ok());
        assert!(target_from_id("other", 0.4, 10).is_err());
    }

    #[test]
    fn sampling_contract() {
        let t = min_series_target(0.4, 200).unwrap();
        let a = sample_data(&t, 50, 0.0, 9).unwrap();
        for s in &a {
            assert_eq!(s.y, t.eval(&s.x));
            assert!((0.0..=1.0).contains(&s.x[0]));
        }
        assert_eq!(sample_data(&t, 50, 1.0, 9).unwrap(), sample_data(&t, 50, 1.0, 9).unwrap());
        assert_ne!(sample_data(&t, 50, 1.0, 9).unwrap(), sample_data(&t, 50, 1.0, 10).unwrap());
        assert!(sample_data(&t, 5, -1.0, 9).is_err());
    }

    #[test]
    fn noise_variance() {
        let t = min_series_target(0.4, 20).unwrap();
        let samples = sample_data(&t, 100_000, 1.0, 2024).unwrap();
        let residuals: Vec<f64> = samples.iter().map(|s| s.y - t.eval(&s.x)).collect();
        let mean = residuals.iter().sum::<f64>() / residuals.len() as f64;
        let var = residuals.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (residuals.len() - 1) as f64;
        assert!((0.98..=1.02).contains(&var), "variance {var}");
    }
}
