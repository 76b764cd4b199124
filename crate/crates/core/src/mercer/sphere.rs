use crate::diagnostics::Verdict;
use crate::error::{Error, Result};
use crate::numeric;

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Dimension `a_n` of the degree-`n` spherical harmonics on `S^d`:
/// `C(n+d, n) - C(n-2+d, n-2)`, the second term vanishing for `n < 2`.
pub fn sphere_harmonic_dims(d: u64, n: u64) -> u128 {
    assert!(d >= 2, "sphere dimension must be at least 2");
    let lead = binomial(n + d, n);
    if n < 2 {
        lead
    } else {
        lead - binomial(n - 2 + d, n - 2)
    }
}

/// Evidence for the embedding property of a dot-product kernel on `S^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereEmbeddingCheck {
    /// `(N, S_N)` with `S_N = Σ_{n ≤ N} a_n μ_n^α`.
    pub partial_sums: Vec<(usize, f64)>,
    /// Estimated exponent `p` of the summand decay `a_n μ_n^α ≍ n^{-p}` from the last two increments.
    pub summand_decay: f64,
    pub verdict: Verdict,
    /// `-slope` of `log μ_n` against the log cumulative multiplicity `Σ_{r ≤ n} a_r`.
    pub implied_edr: f64,
    /// Expected verdict from the decay assumption: convergent iff `α > 1/β`.
    pub predicted: Verdict,
}

/// Partial sums `Σ_{n ≤ N} a_n μ_n^α` at `N = max_n / 100, max_n / 10, max_n`.
///
/// The verdict compares the increments over the last two decades: a summand
/// decaying like `n^{-p}` makes them shrink by `10^{1-p}`, so the series is
/// declared convergent when the estimated `p` exceeds one.
pub fn dot_product_embedding_check(
    mu: impl Fn(u64) -> f64,
    d: u64,
    beta: f64,
    alpha: f64,
    max_n: usize,
) -> Result<SphereEmbeddingCheck> {
    if d < 2 || max_n < 1000 || !(alpha > 0.0 && alpha <= 1.0) || beta <= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "need d ≥ 2, max_n ≥ 1000, α in (0, 1], β > 1; got d={d}, max_n={max_n}, α={alpha}, β={beta}"
        )));
    }
    let checkpoints = [max_n / 100, max_n / 10, max_n];
    let mut partial_sums = Vec::with_capacity(3);
    let mut acc = 0.0;
    let mut cumulative = 0.0;
    let mut fit_x = Vec::new();
    let mut fit_y = Vec::new();
    let mut next = 0;
    for n in 0..=max_n as u64 {
        let a_n = sphere_harmonic_dims(d, n) as f64;
        let mu_n = mu(n);
        if !(mu_n > 0.0) {
            return Err(Error::InvalidArgument(format!("μ_{n} = {mu_n} is not positive")));
        }
        acc += a_n * mu_n.powf(alpha);
        cumulative += a_n;
        if n >= 10 {
            // eigenvalue μ_n occupies indices up to the cumulative multiplicity
            fit_x.push(cumulative);
            fit_y.push(mu_n);
        }
        if next < checkpoints.len() && n as usize == checkpoints[next] {
            partial_sums.push((checkpoints[next], acc));
            next += 1;
        }
    }
    let d1 = partial_sums[1].1 - partial_sums[0].1;
    let d2 = partial_sums[2].1 - partial_sums[1].1;
    let summand_decay = if d1 > 0.0 && d2 > 0.0 { 1.0 - (d2 / d1).log10() } else { f64::INFINITY };
    let verdict = if summand_decay > 1.0 { Verdict::Converged } else { Verdict::Diverging };
    let implied_edr = -numeric::fit_log_log(&fit_x, &fit_y)?.slope;
    let predicted = if alpha * beta > 1.0 { Verdict::Converged } else { Verdict::Diverging };
    Ok(SphereEmbeddingCheck { partial_sums, summand_decay, verdict, implied_edr, predicted })
}
