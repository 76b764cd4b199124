//! Small numerical helpers shared across modules: quadrature rules,
//! least-squares line fits and log-spaced grids.

use crate::error::{Error, Result};

/// Composite Simpson rule on `[lo, hi]` with an even number of panels.
pub fn simpson<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, panels: usize) -> Result<f64> {
    if panels == 0 || !panels.is_multiple_of(2) {
        return Err(Error::OddPanels(panels));
    }
    let h = (hi - lo) / panels as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + i as f64 * h);
    }
    Ok(acc * h / 3.0)
}

/// Simpson weights for `panels + 1` equispaced nodes (without the `h/3` factor applied
/// separately: the returned weights already include it).
pub fn simpson_weights(lo: f64, hi: f64, panels: usize) -> Result<Vec<f64>> {
    if panels == 0 || !panels.is_multiple_of(2) {
        return Err(Error::OddPanels(panels));
    }
    let h = (hi - lo) / panels as f64;
    Ok((0..=panels)
        .map(|i| {
            let w = if i == 0 || i == panels {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect())
}

/// Composite trapezoid rule on `[lo, hi]`.
pub fn trapezoid<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, panels: usize) -> f64 {
    let h = (hi - lo) / panels as f64;
    let mut acc = 0.5 * (f(lo) + f(hi));
    for i in 1..panels {
        acc += f(lo + i as f64 * h);
    }
    acc * h
}

/// Ordinary least-squares line `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "line fit needs at least two paired points, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("line fit over a single abscissa".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LineFit { slope, intercept, r_squared })
}

/// Fit `log y = slope * log x + intercept`.
pub fn fit_log_log(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidArgument("log-log fit needs positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    fit_line(&lx, &ly)
}

/// `count` points log-spaced between `lo` and `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}

/// `count` points equally spaced between `lo` and `hi` inclusive.
pub fn lin_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_for_cubics() {
        let v = simpson(|x| 4.0 * x * x * x - x + 2.0, 0.0, 1.0, 2).unwrap();
        assert!((v - 2.5).abs() < 1e-14);
    }

    #[test]
    fn simpson_rejects_odd_panels() {
        assert!(matches!(simpson(|x| x, 0.0, 1.0, 3), Err(Error::OddPanels(3))));
        assert!(simpson_weights(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn weights_match_rule() {
        let w = simpson_weights(0.0, 2.0, 10).unwrap();
        let direct = simpson(|x| x.exp(), 0.0, 2.0, 10).unwrap();
        let weighted: f64 = w
            .iter()
            .enumerate()
            .map(|(i, w)| w * (0.2 * i as f64).exp())
            .sum();
        assert!((direct - weighted).abs() < 1e-13);
    }

    #[test]
    fn exact_power_law_fit() {
        let xs: Vec<f64> = (1..20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-1.5)).collect();
        let fit = fit_log_log(&xs, &ys).unwrap();
        assert!((fit.slope + 1.5).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grids() {
        let g = log_space(0.1, 1e5, 7);
        assert_eq!(g.len(), 7);
        assert!((g[0] - 0.1).abs() < 1e-15 && (g[6] - 1e5).abs() < 1e-8);
        assert_eq!(lin_space(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }
}
