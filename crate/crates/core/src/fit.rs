//! Least-squares fringe fits.
//!
//! Counts are modelled as `a N (1 + b cos 2πfΔT)`. With `p = a` and `q = a b`
//! the model is linear in `(p, q)`, so the fit is a 2×2 normal-equation solve.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::oracle;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    /// Euclidean norm of the count residuals.
    pub residual_norm: f64,
    /// `|b|`, the visibility of the fitted curve.
    pub visibility: f64,
}

/// Fits `a N (1 + b cos 2πfΔT)` to `(ΔT, count)` points.
pub fn fit_cosine(points: &[(f64, f64)], n_tot: u64, frequency: f64) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::EmptyInput("cosine fit needs at least 3 points"));
    }
    if n_tot == 0 {
        return Err(Error::invalid("n_tot", "must be positive"));
    }
    let n = n_tot as f64;
    let m = points.len() as f64;

    // Centre the cosine column so the normal matrix stays well conditioned.
    let cos: Vec<f64> = points.iter().map(|&(dt, _)| (TAU * frequency * dt).cos()).collect();
    let cbar = cos.iter().sum::<f64>() / m;
    let ybar = points.iter().map(|&(_, y)| y).sum::<f64>() / m;
    let (mut scc, mut scy) = (0.0, 0.0);
    for (c, &(_, y)) in cos.iter().zip(points) {
        scc += (c - cbar) * (c - cbar);
        scy += (c - cbar) * (y - ybar);
    }
    if scc <= 1e-12 * m {
        return Err(Error::DegenerateFit);
    }
    let q = scy / scc / n;
    let p = ybar / n - q * cbar;
    if p <= 0.0 {
        return Err(Error::NonPositiveAmplitude(p));
    }

    let residual_norm = cos
        .iter()
        .zip(points)
        .map(|(c, &(_, y))| (y - n * (p + q * c)).powi(2))
        .sum::<f64>()
        .sqrt();
    let b = q / p;
    Ok(FitResult {
        a: p,
        b,
        residual_norm,
        visibility: b.abs(),
    })
}

/// Fits a constant `a N`: the mean count divided by `N`.
pub fn fit_constant(points: &[(f64, f64)], n_tot: u64) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyInput("constant fit needs at least 1 point"));
    }
    if n_tot == 0 {
        return Err(Error::invalid("n_tot", "must be positive"));
    }
    let mean = points.iter().map(|&(_, y)| y).sum::<f64>() / points.len() as f64;
    Ok(mean / n_tot as f64)
}

/// Visibility of the raw counts, `(max - min) / (max + min)`.
pub fn empirical_visibility(points: &[(f64, f64)]) -> Result<f64> {
    let counts: Vec<f64> = points.iter().map(|&(_, y)| y).collect();
    oracle::visibility(&counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(a: f64, b: f64, n: u64, m: usize) -> Vec<(f64, f64)> {
        (0..m)
            .map(|i| {
                let dt = -2.0 + 4.0 * i as f64 / (m - 1) as f64;
                (dt, a * n as f64 * (1.0 + b * (TAU * dt).cos()))
            })
            .collect()
    }

    #[test]
    fn recovers_generating_parameters() {
        let pts = synthetic(0.125, 0.5, 2_000_000, 41);
        let f = fit_cosine(&pts, 2_000_000, 1.0).unwrap();
        assert!((f.a - 0.125).abs() < 1e-10);
        assert!((f.b - 0.5).abs() < 1e-10);
        assert!(f.residual_norm < 1e-6);
        assert_eq!(f.visibility, f.b.abs());
    }

    #[test]
    fn visibility_matches_fitted_contrast_on_dense_data() {
        let pts = synthetic(0.077, 0.974, 1000, 4001);
        let f = fit_cosine(&pts, 1000, 1.0).unwrap();
        let v = empirical_visibility(&pts).unwrap();
        assert!((f.visibility - v).abs() < 1e-6);
    }

    #[test]
    fn degenerate_design_rejected() {
        // Every ΔT an integer number of periods: all cosines equal one.
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 10.0)).collect();
        assert!(matches!(fit_cosine(&pts, 100, 1.0), Err(Error::DegenerateFit)));
    }

    #[test]
    fn negative_amplitude_flagged() {
        let pts: Vec<(f64, f64)> = synthetic(-0.1, 0.5, 100, 11);
        assert!(matches!(
            fit_cosine(&pts, 100, 1.0),
            Err(Error::NonPositiveAmplitude(_))
        ));
    }

    #[test]
    fn too_few_points() {
        assert!(fit_cosine(&[(0.0, 1.0), (0.25, 2.0)], 10, 1.0).is_err());
    }

    #[test]
    fn constant_fit() {
        let pts: Vec<(f64, f64)> = (0..7).map(|i| (i as f64 * 0.1, 0.25 * 4000.0)).collect();
        assert_eq!(fit_constant(&pts, 4000).unwrap(), 0.25);
        assert!(fit_constant(&[], 10).is_err());
    }

    #[test]
    fn flat_counts_have_zero_visibility() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 7.0)).collect();
        assert_eq!(empirical_visibility(&pts).unwrap(), 0.0);
        let zeros: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 0.0)).collect();
        assert!(matches!(empirical_visibility(&zeros), Err(Error::ZeroSignal)));
    }

    #[test]
    fn simple_model_curve_has_half_visibility() {
        let pts: Vec<(f64, f64)> = (0..1001)
            .map(|i| {
                let dt = i as f64 / 1000.0;
                let c = oracle::predicted_coincidence(
                    1_000_000,
                    dt,
                    1.0,
                    oracle::CoincidenceModel::Simple,
                    None,
                )
                .unwrap();
                (dt, c)
            })
            .collect();
        assert!((empirical_visibility(&pts).unwrap() - 0.5).abs() < 1e-9);
    }
}
