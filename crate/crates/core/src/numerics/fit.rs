//! Small least-squares helpers.

use crate::error::{DecoError, Result};
use crate::scalar::Real;
use nalgebra::{DMatrix, DVector, RealField};

/// Straight-line fit `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit<R> {
    pub slope: R,
    pub intercept: R,
    /// Root-mean-square residual.
    pub rms_residual: R,
}

pub fn fit_line<R: Real>(x: &[R], y: &[R]) -> Result<LineFit<R>> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(DecoError::Misuse(format!(
            "line fit needs matching inputs with at least two points (got {} and {})",
            x.len(),
            y.len()
        )));
    }
    let n = R::from_usize_lossy(x.len());
    let mx = x.iter().fold(R::zero(), |s, &v| s + v) / n;
    let my = y.iter().fold(R::zero(), |s, &v| s + v) / n;
    let (mut sxx, mut sxy) = (R::zero(), R::zero());
    for (&xi, &yi) in x.iter().zip(y) {
        sxx = sxx + (xi - mx) * (xi - mx);
        sxy = sxy + (xi - mx) * (yi - my);
    }
    if sxx == R::zero() {
        return Err(DecoError::Misuse("line fit with identical abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss = x.iter().zip(y).fold(R::zero(), |s, (&xi, &yi)| {
        let r = yi - slope * xi - intercept;
        s + r * r
    });
    Ok(LineFit {
        slope,
        intercept,
        rms_residual: (ss / n).sqrt(),
    })
}

/// Slope of `ln y` against `ln x`.
pub fn log_log_slope<R: Real>(x: &[R], y: &[R]) -> Result<LineFit<R>> {
    if x.iter().chain(y).any(|v| *v <= R::zero()) {
        return Err(DecoError::Misuse("log-log fit needs positive data".into()));
    }
    let lx: Vec<R> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<R> = y.iter().map(|v| v.ln()).collect();
    fit_line(&lx, &ly)
}

/// Linear least squares `min ‖A c − y‖` through SVD; returns coefficients and
/// the residual vector.
pub fn least_squares<R: Real + RealField>(
    design: &DMatrix<R>,
    y: &DVector<R>,
) -> Result<(DVector<R>, DVector<R>)> {
    let svd = design.clone().svd(true, true);
    let eps = R::lit(1e-13);
    let coeffs = svd
        .solve(y, eps)
        .map_err(|e| DecoError::Numeric(format!("least squares: {e}")))?;
    let resid = y - design * &coeffs;
    Ok((coeffs, resid))
}
