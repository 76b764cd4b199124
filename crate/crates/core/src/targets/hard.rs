use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use super::packing::{pack_hypercube, Codebook};
use super::{interpolation_norm, SeriesBasis, SeriesTarget, TermMap};
use crate::error::{Error, Result};
use crate::mercer::EigenSystem;

/// Squared `[H]^γ` distance between two members of a hard-instance family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDistance {
    pub i: usize,
    pub j: usize,
    pub hamming: u32,
    /// `‖f_i - f_j‖²_{[H]^γ}` computed in coefficient space.
    pub squared_distance: f64,
}

/// `f_i = ε^{1/2} Σ_{k ≤ m} ω_k^{(i)} λ_{m+k}^{γ/2} e_{m+k}` over a hypercube packing.
#[derive(Debug, Clone)]
pub struct HardInstanceFamily {
    pub m: usize,
    pub epsilon: f64,
    pub gamma: f64,
    pub s: f64,
    pub codebook: Codebook,
    pub functions: Vec<SeriesTarget>,
    /// `‖f_i‖_{[H]^s}` for every member.
    pub norms: Vec<f64>,
    pub pairs: Vec<PairDistance>,
}

/// `ε = c0 · m^{-(s-γ)β - 1}`.
pub fn default_epsilon(c0: f64, m: usize, s: f64, gamma: f64, beta: f64) -> f64 {
    c0 * (m as f64).powf(-(s - gamma) * beta - 1.0)
}

/// Build the family of hard instances over `pack_hypercube(m)` (or the single
/// codeword `1` when `m = 1`).
pub fn hard_instance(
    es: Arc<dyn EigenSystem>,
    m: usize,
    s: f64,
    gamma: f64,
    epsilon: f64,
    packing_seed: u64,
    packing_budget: usize,
) -> Result<HardInstanceFamily> {
    if m == 0 || !(s > 0.0) || !(0.0..=s.min(1.0)).contains(&gamma) || !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need m ≥ 1, s > 0, 0 ≤ γ ≤ min(1, s), ε > 0; got m={m}, s={s}, γ={gamma}, ε={epsilon}"
        )));
    }
    if es.mode_count().is_some_and(|len| len < 2 * m) {
        return Err(Error::InvalidArgument(format!(
            "eigensystem `{}` has fewer than 2m = {} modes",
            es.id(),
            2 * m
        )));
    }
    let codebook = if m == 1 {
        Codebook { m: 1, words: vec![1] }
    } else {
        pack_hypercube(m, packing_seed, packing_budget)?
    };
    let member = |bits: u64, name: String| {
        let system = es.clone();
        let scale = epsilon.sqrt();
        SeriesTarget::new(
            name,
            SeriesBasis::Eigen { system: es.clone(), term_map: TermMap::shifted(m) },
            s,
            m,
            move |k| {
                if k <= m && bits >> (k - 1) & 1 == 1 {
                    scale * system.eigenvalue(m + k).powf(gamma / 2.0)
                } else {
                    0.0
                }
            },
        )
    };
    let functions: Vec<SeriesTarget> = codebook
        .words
        .iter()
        .enumerate()
        .map(|(i, w)| member(*w, format!("hard_{i}")))
        .collect();
    let norms = functions
        .iter()
        .map(|f| interpolation_norm(f, s, m).map(|n| n.value))
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    for i in 0..functions.len() {
        for j in i + 1..functions.len() {
            let diff = difference(&functions[i], &functions[j], es.clone(), m);
            let norm = interpolation_norm(&diff, gamma, m)?.value;
            pairs.push(PairDistance { i, j, hamming: codebook.hamming(i, j), squared_distance: norm * norm });
        }
    }
    Ok(HardInstanceFamily { m, epsilon, gamma, s, codebook, functions, norms, pairs })
}

fn difference(a: &SeriesTarget, b: &SeriesTarget, es: Arc<dyn EigenSystem>, m: usize) -> SeriesTarget {
    let (ca, cb) = (a.coefficients().to_vec(), b.coefficients().to_vec());
    SeriesTarget::new(
        "difference",
        SeriesBasis::Eigen { system: es, term_map: TermMap::shifted(m) },
        a.smoothness(),
        m,
        move |k| if k <= ca.len() { ca[k - 1] - cb[k - 1] } else { 0.0 },
    )
}

/// Plain-text export: a header, then for every member a `codeword` line
/// followed by one `basis_index,coefficient` line per term.
pub fn write_hard_instance(family: &HardInstanceFamily, path: &Path) -> Result<()> {
    let mut out = String::new();
    writeln!(
        out,
        "# hard instance m={} epsilon={:e} gamma={} s={} members={}",
        family.m,
        family.epsilon,
        family.gamma,
        family.s,
        family.functions.len()
    )
    .expect("writing to a String");
    for (i, f) in family.functions.iter().enumerate() {
        writeln!(out, "codeword {i} {}", family.codebook.to_bit_string(i)).expect("writing to a String");
        for (k, c) in f.coefficients().iter().enumerate() {
            writeln!(out, "{},{:e}", family.m + k + 1, c).expect("writing to a String");
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mercer::min_kernel_eigensystem;
    use crate::numeric::simpson;
    use crate::targets::{DEFAULT_PACKING_BUDGET, DEFAULT_PACKING_SEED};

    fn min() -> Arc<dyn EigenSystem> {
        Arc::new(min_kernel_eigensystem())
    }

    #[test]
    fn single_codeword_edge_case() {
        let eps = 0.04;
        let fam = hard_instance(min(), 1, 0.4, 0.0, eps, 0, 10).unwrap();
        assert_eq!(fam.functions.len(), 1);
        let f = &fam.functions[0];
        // f = √ε e_2
        assert!((f.eval(&[0.3]) - eps.sqrt() * min().eigenfunction(2, &[0.3])).abs() < 1e-15);
        let l2 = simpson(|x| f.eval(&[x]).powi(2), 0.0, 1.0, 10_000).unwrap().sqrt();
        assert!((l2 - eps.sqrt()).abs() < 1e-9);
        assert!(fam.pairs.is_empty());
    }

    #[test]
    fn distance_identity_against_direct_coefficients() {
        let (m, s, gamma, eps) = (16, 0.4, 0.0, 0.01);
        let fam = hard_instance(min(), m, s, gamma, eps, DEFAULT_PACKING_SEED, DEFAULT_PACKING_BUDGET).unwrap();
        let es = min_kernel_eigensystem();
        for p in &fam.pairs {
            assert!((p.squared_distance - eps * p.hamming as f64).abs() < 1e-10);
            assert!(p.squared_distance >= eps * m as f64 / 8.0 - 1e-12);
        }
        for (i, norm) in fam.norms.iter().enumerate() {
            // ‖f_i‖²_{[H]^s} = ε Σ ω_k λ_{m+k}^{γ-s}
            let direct: f64 = (1..=m)
                .filter(|k| fam.codebook.bit(i, *k))
                .map(|k| eps * es.eigenvalue(m + k).powf(gamma - s))
                .sum();
            assert!(norm.is_finite());
            assert!((norm * norm - direct).abs() < 1e-12 * direct.max(1.0));
        }
    }

    #[test]
    fn nonzero_gamma_identity() {
        let fam = hard_instance(min(), 24, 0.8, 0.5, 1e-3, 4, 10_000).unwrap();
        for p in &fam.pairs {
            assert!((p.squared_distance - 1e-3 * p.hamming as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn epsilon_scaling() {
        let e = default_epsilon(0.01, 16, 0.4, 0.0, 2.0);
        assert!((e - 0.01 * 16f64.powf(-1.8)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(hard_instance(min(), 16, 0.4, 0.5, 0.01, 0, 100).is_err());
        assert!(hard_instance(min(), 0, 0.4, 0.0, 0.01, 0, 100).is_err());
        assert!(hard_instance(min(), 4, 0.4, 0.0, 0.01, 0, 100).is_err());
    }

    #[test]
    fn export_lists_codewords_and_terms() {
        let fam = hard_instance(min(), 8, 0.4, 0.0, 0.01, 1, 100).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hard.txt");
        write_hard_instance(&fam, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# hard instance m=8"));
        assert_eq!(lines[1], "codeword 0 00000000");
        assert_eq!(lines.len(), 1 + fam.functions.len() * 9);
        assert!(lines[2].starts_with("9,"));
    }
}
