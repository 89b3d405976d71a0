use super::evolve::FidelityCurve;
use crate::error::{DecoError, Result};
use crate::numerics::least_squares;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub min_infidelity: f64,
    pub max_infidelity: f64,
    pub min_points: usize,
    /// Bound on `|linear term| / quadratic term` at the window's first point.
    pub tau1_tol: f64,
    /// Relative spread of `(1 − F)/t²` above which curvature is flagged.
    pub curvature_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            min_infidelity: 1e-8,
            max_infidelity: 1e-3,
            min_points: 5,
            tau1_tol: 1e-3,
            curvature_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tau2Fit {
    pub tau2: f64,
    /// Quadratic coefficient `1/2τ₂²`.
    pub rate: f64,
    /// Linear coefficient of `1 − F`.
    pub linear: f64,
    pub tau1_ratio: f64,
    pub tau1_ok: bool,
    /// Relative rms residual of the polynomial fit.
    pub residual: f64,
    /// Relative rms deviation of `(1 − F)/t²` from a constant.
    pub curvature: f64,
    pub curvature_flag: bool,
    pub window: (usize, usize),
}

/// Fits `(1 − F)/t² = a + b/t + c t + d t²` over the longest contiguous
/// run of grid points with `1 − F` inside the window; `τ₂ = 1/√(2a)`.
pub fn fit_tau2(curve: &FidelityCurve, opts: FitOptions) -> Result<Tau2Fit> {
    let inside = |k: usize| {
        let (t, y) = (curve.times[k], curve.infidelity[k]);
        t > 0.0 && y >= opts.min_infidelity && y <= opts.max_infidelity
    };
    let mut best = (0, 0);
    let mut k = 0;
    while k < curve.times.len() {
        if inside(k) {
            let start = k;
            while k < curve.times.len() && inside(k) {
                k += 1;
            }
            if k - start > best.1 - best.0 {
                best = (start, k);
            }
        } else {
            k += 1;
        }
    }
    let (lo, hi) = best;
    let m = hi - lo;
    if m < opts.min_points {
        let ymax = curve.infidelity.iter().cloned().fold(0.0, f64::max);
        return Err(DecoError::FitWindow(format!(
            "{m} grid points with {:e} ≤ 1 − F ≤ {:e} (need {}); largest 1 − F is {ymax:e}, regrid {}",
            opts.min_infidelity,
            opts.max_infidelity,
            opts.min_points,
            if ymax < opts.max_infidelity { "to longer times" } else { "more densely" }
        )));
    }
    let t = &curve.times[lo..hi];
    let y = &curve.infidelity[lo..hi];
    // scaled time keeps the design well conditioned
    let t_ref = (t[0] * t[m - 1]).sqrt();
    let z: Vec<f64> = t.iter().zip(y).map(|(t, y)| y / (t * t)).collect();
    let ncols = if m >= 8 { 4 } else { 2 };
    let design = DMatrix::from_fn(m, ncols, |r, c| {
        let s = t[r] / t_ref;
        match c {
            0 => 1.0,
            1 => 1.0 / s,
            2 => s,
            _ => s * s,
        }
    });
    let zv = DVector::from_vec(z.clone());
    let (coef, resid) = least_squares(&design, &zv)?;
    let a = coef[0];
    if !(a > 0.0) {
        return Err(DecoError::Numeric(format!("fitted quadratic coefficient is {a:e}")));
    }
    let linear = coef[1] * t_ref;
    let tau1_ratio = linear.abs() / (a * t[0]);
    let residual = (resid.norm_squared() / m as f64).sqrt() / a;
    let mean = z.iter().sum::<f64>() / m as f64;
    let curvature = (z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m as f64).sqrt() / mean;
    Ok(Tau2Fit {
        tau2: 1.0 / (2.0 * a).sqrt(),
        rate: a,
        linear,
        tau1_ratio,
        tau1_ok: tau1_ratio < opts.tau1_tol,
        residual,
        curvature,
        curvature_flag: curvature > opts.curvature_tol,
        window: (lo, hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(f: impl Fn(f64) -> f64) -> FidelityCurve {
        let times: Vec<f64> = std::iter::once(0.0)
            .chain((0..60).map(|k| 1e-12 * 10f64.powf(k as f64 * 6.0 / 59.0)))
            .collect();
        let infidelity: Vec<f64> = times.iter().map(|t| f(*t)).collect();
        FidelityCurve {
            fidelity: infidelity.iter().map(|y| 1.0 - y).collect(),
            times,
            infidelity,
            tau2_fit: None,
            fit_residual: None,
            truncation_converged: false,
            trace_error: 0.0,
            purity_error: 0.0,
        }
    }

    #[test]
    fn exact_quadratic() {
        let tau = 1e-7;
        let fit = fit_tau2(&synthetic(|t| 0.5 * (t / tau).powi(2)), FitOptions::default()).unwrap();
        assert!((fit.tau2 / tau - 1.0).abs() < 1e-6);
        assert!(fit.tau1_ok);
        assert!(!fit.curvature_flag);
    }

    #[test]
    fn cubic_contamination_is_flagged() {
        let tau = 1e-7;
        // t³ term worth 1% of the quadratic one at the top of the window
        let t_top = tau * (2e-3f64).sqrt();
        let fit = fit_tau2(
            &synthetic(|t| 0.5 * (t / tau).powi(2) * (1.0 + 0.01 * t / t_top)),
            FitOptions::default(),
        )
        .unwrap();
        assert!((fit.tau2 / tau - 1.0).abs() < 1e-2);
        assert!(fit.curvature_flag);
    }

    #[test]
    fn empty_window() {
        let err = fit_tau2(&synthetic(|_| 0.0), FitOptions::default()).unwrap_err();
        assert!(matches!(err, DecoError::FitWindow(_)));
    }
}
