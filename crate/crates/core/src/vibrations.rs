//! Centre-of-mass vibrational normal modes.
//!
//! Displacement coordinates are indexed `3·site + axis` with axis order
//! x, y, z. The transform `S` has one column per mode `K`.

use crate::error::{DecoError, Result};
use crate::scalar::Real;
use nalgebra::{DMatrix, RealField};
use num_traits::Float;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Largest register for which the dense eigenproblem is solved.
pub const DENSE_MAX_SITES: usize = 1000;

const SYMMETRY_TOL: f64 = 1e-12;

/// Trap coupling topology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Topology {
    /// `V_ij^{αβ} = δ_ij δ_αβ V₀`.
    Independent { v0: f64 },
    /// Open chain along x with nearest-neighbour coupling `c_nn`.
    Chain1d { v0: f64, c_nn: f64 },
    /// Dense `3N × 3N` matrix from a text file.
    Custom { path: PathBuf },
}

/// Replacement for `1/ν_K` in collective approximations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AverageStrategy {
    /// Arithmetic mean of `1/ν_K`.
    #[default]
    MeanInverse,
    /// `1 / mean(ν_K)`.
    InverseMean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix<R: Real> {
    pub matrix: DMatrix<R>,
    pub mass: R,
}

impl<R: Real> CouplingMatrix<R> {
    pub fn n_sites(&self) -> usize {
        self.matrix.nrows() / 3
    }
}

fn check_symmetric<R: Real>(m: &DMatrix<R>) -> Result<()> {
    let scale = m.iter().fold(R::zero(), |s, v| s.max(v.abs()));
    let tol = R::lit(SYMMETRY_TOL) * scale;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)]).abs();
            if d > tol {
                return Err(DecoError::Validation(vec![format!(
                    "coupling matrix not symmetric at ({i}, {j}): {} vs {}",
                    m[(i, j)],
                    m[(j, i)]
                )]));
            }
        }
    }
    Ok(())
}

/// Parses the custom matrix format: a header line with the dimension
/// `3N`, then `3N × 3N` whitespace-separated entries.
pub fn parse_coupling_text<R: Real>(text: &str) -> Result<DMatrix<R>> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    let dim: usize = tokens
        .next()
        .ok_or_else(|| DecoError::Parse("coupling matrix file is empty".into()))?
        .parse()
        .map_err(|e| DecoError::Parse(format!("coupling matrix header: {e}")))?;
    if dim == 0 || !dim.is_multiple_of(3) {
        return Err(DecoError::Parse(format!(
            "coupling matrix dimension {dim} is not a positive multiple of 3"
        )));
    }
    let values: Vec<f64> = tokens
        .map(|t| {
            t.parse::<f64>()
                .map_err(|e| DecoError::Parse(format!("coupling matrix entry `{t}`: {e}")))
        })
        .collect::<Result<_>>()?;
    if values.len() != dim * dim {
        return Err(DecoError::Parse(format!(
            "coupling matrix expects {} entries, found {}",
            dim * dim,
            values.len()
        )));
    }
    Ok(DMatrix::from_row_iterator(
        dim,
        dim,
        values.into_iter().map(R::lit),
    ))
}

pub fn load_coupling_file<R: Real>(path: &Path) -> Result<DMatrix<R>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DecoError::io(path.display().to_string(), e))?;
    parse_coupling_text(&text)
}

pub fn build_coupling_matrix<R: Real>(
    n_sites: usize,
    mass: R,
    topology: &Topology,
) -> Result<CouplingMatrix<R>> {
    if n_sites == 0 {
        return Err(DecoError::Misuse("no sites".into()));
    }
    let dim = 3 * n_sites;
    let matrix = match topology {
        Topology::Independent { v0 } => {
            if *v0 <= 0.0 {
                return Err(DecoError::Validation(vec![format!(
                    "vibrations.v0 must be positive, got {v0}"
                )]));
            }
            DMatrix::from_diagonal_element(dim, dim, R::lit(*v0))
        }
        Topology::Chain1d { v0, c_nn } => {
            if *v0 <= 2.0 * c_nn.abs() {
                let lowest = v0 - 2.0 * c_nn.abs() * (std::f64::consts::PI / (n_sites as f64 + 1.0)).cos();
                return Err(DecoError::Spectral(format!(
                    "unstable chain: v0 = {v0} must exceed 2|c_nn| = {}; smallest eigenvalue {lowest}",
                    2.0 * c_nn.abs()
                )));
            }
            let mut m = DMatrix::from_diagonal_element(dim, dim, R::lit(*v0));
            for i in 0..n_sites.saturating_sub(1) {
                m[(3 * i, 3 * (i + 1))] = R::lit(*c_nn);
                m[(3 * (i + 1), 3 * i)] = R::lit(*c_nn);
            }
            m
        }
        Topology::Custom { path } => {
            let m: DMatrix<R> = load_coupling_file(path)?;
            if m.nrows() != dim {
                return Err(DecoError::Validation(vec![format!(
                    "coupling matrix is {}×{}, expected {dim}×{dim} for {n_sites} sites",
                    m.nrows(),
                    m.ncols()
                )]));
            }
            m
        }
    };
    check_symmetric(&matrix)?;
    Ok(CouplingMatrix { matrix, mass })
}

/// Solved normal modes, ascending in frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalModes<R: Real> {
    pub frequencies: Vec<R>,
    /// Column `K` is the unit displacement pattern of mode `K`.
    pub transform: DMatrix<R>,
    /// `√(ħ/2mν_K)`.
    pub zero_point_lengths: Vec<R>,
    pub mass: R,
}

/// Full symmetric eigendecomposition `V S = m ν² S`.
///
/// Columns are sorted by ascending `ν` and each column's first
/// non-negligible component is made positive.
pub fn solve_normal_modes<R: Real + RealField>(
    cm: &CouplingMatrix<R>,
    hbar: R,
) -> Result<NormalModes<R>> {
    let dim = cm.matrix.nrows();
    if dim / 3 > DENSE_MAX_SITES {
        return Err(DecoError::Dimension {
            dim: dim / 3,
            limit: DENSE_MAX_SITES,
        });
    }
    let eig = cm.matrix.clone().symmetric_eigen();
    let norm = cm.matrix.iter().fold(R::zero(), |s, v| Float::max(s, Float::abs(*v)));
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let smallest = eig.eigenvalues[order[0]];
    if smallest <= R::lit(1e-12) * norm {
        return Err(DecoError::Spectral(format!(
            "coupling matrix is not positive definite; smallest eigenvalue {smallest}"
        )));
    }
    let mut transform = DMatrix::zeros(dim, dim);
    let mut frequencies = Vec::with_capacity(dim);
    let comp_tol = R::lit(1e-10);
    for (k, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        let first = col.iter().find(|v| Float::abs(**v) > comp_tol).copied();
        if let Some(f) = first {
            if f < R::zero() {
                col = -col;
            }
        }
        transform.set_column(k, &col);
        frequencies.push(Float::sqrt(eig.eigenvalues[src] / cm.mass));
    }
    let zero_point_lengths = frequencies
        .iter()
        .map(|&nu| Float::sqrt(hbar / (R::lit(2.0) * cm.mass * nu)))
        .collect();
    let nm = NormalModes {
        frequencies,
        transform,
        zero_point_lengths,
        mass: cm.mass,
    };
    let resid = nm.max_eigen_residual(cm);
    // 1e-10 in double precision; looser for narrower scalars
    let rel = Float::max(R::lit(1e-10), R::lit(1e3) * R::epsilon());
    if resid > rel * norm {
        return Err(DecoError::Spectral(format!(
            "eigen residual {resid} exceeds {rel}·‖V‖ = {}",
            rel * norm
        )));
    }
    Ok(nm)
}

impl<R: Real + RealField> NormalModes<R> {
    /// `max_K ‖V S_K − m ν_K² S_K‖`.
    pub fn max_eigen_residual(&self, cm: &CouplingMatrix<R>) -> R {
        let mut worst = R::zero();
        for k in 0..self.frequencies.len() {
            let col = self.transform.column(k);
            let lam = self.mass * self.frequencies[k] * self.frequencies[k];
            let r = (&cm.matrix * col - col * lam).norm();
            worst = Float::max(worst, r);
        }
        worst
    }

    /// `‖SᵀS − 1‖_max`.
    pub fn orthogonality_residual(&self) -> R {
        let n = self.transform.ncols();
        let g = self.transform.transpose() * &self.transform - DMatrix::<R>::identity(n, n);
        g.iter().fold(R::zero(), |s, v| Float::max(s, Float::abs(*v)))
    }

    /// `‖SSᵀ − 1‖_max`.
    pub fn completeness_residual(&self) -> R {
        let n = self.transform.nrows();
        let g = &self.transform * self.transform.transpose() - DMatrix::<R>::identity(n, n);
        g.iter().fold(R::zero(), |s, v| Float::max(s, Float::abs(*v)))
    }
}

/// Mode set consumed by the Lamb-Dicke sums: either the analytic
/// independent-trap modes (no dense storage) or a solved dense set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModeSet<R: Real> {
    /// Site `i` owns modes `3i..3i+3`, all at frequency `nu`.
    Independent {
        n_sites: usize,
        nu: R,
        zero_point: R,
    },
    Solved(NormalModes<R>),
}

impl<R: Real> ModeSet<R> {
    pub fn independent(n_sites: usize, v0: R, mass: R, hbar: R) -> Self {
        let nu = (v0 / mass).sqrt();
        ModeSet::Independent {
            n_sites,
            nu,
            zero_point: (hbar / (R::lit(2.0) * mass * nu)).sqrt(),
        }
    }

    pub fn n_sites(&self) -> usize {
        match self {
            ModeSet::Independent { n_sites, .. } => *n_sites,
            ModeSet::Solved(nm) => nm.transform.nrows() / 3,
        }
    }

    pub fn n_modes(&self) -> usize {
        3 * self.n_sites()
    }

    pub fn frequency(&self, k: usize) -> R {
        match self {
            ModeSet::Independent { nu, .. } => *nu,
            ModeSet::Solved(nm) => nm.frequencies[k],
        }
    }

    pub fn zero_point_length(&self, k: usize) -> R {
        match self {
            ModeSet::Independent { zero_point, .. } => *zero_point,
            ModeSet::Solved(nm) => nm.zero_point_lengths[k],
        }
    }

    /// Modes with support on `site`, with the displacement 3-vector
    /// `S_{site,·;K}` of each.
    pub fn site_modes(&self, site: usize) -> Vec<(usize, [R; 3])> {
        match self {
            ModeSet::Independent { .. } => (0..3)
                .map(|a| {
                    let mut v = [R::zero(); 3];
                    v[a] = R::one();
                    (3 * site + a, v)
                })
                .collect(),
            ModeSet::Solved(nm) => (0..nm.transform.ncols())
                .filter_map(|k| {
                    let v = [
                        nm.transform[(3 * site, k)],
                        nm.transform[(3 * site + 1, k)],
                        nm.transform[(3 * site + 2, k)],
                    ];
                    if v.iter().all(|c| *c == R::zero()) {
                        None
                    } else {
                        Some((k, v))
                    }
                })
                .collect(),
        }
    }

    /// Stand-in for `1/ν_K` in collective approximations.
    pub fn average_inverse_frequency(&self, strategy: AverageStrategy) -> R {
        match self {
            ModeSet::Independent { nu, .. } => R::one() / *nu,
            ModeSet::Solved(nm) => {
                let n = R::from_usize_lossy(nm.frequencies.len());
                match strategy {
                    AverageStrategy::MeanInverse => {
                        nm.frequencies.iter().fold(R::zero(), |s, v| s + R::one() / *v) / n
                    }
                    AverageStrategy::InverseMean => {
                        n / nm.frequencies.iter().fold(R::zero(), |s, v| s + *v)
                    }
                }
            }
        }
    }

    /// Mean vibrational frequency `ν̄` consistent with the averaging strategy.
    pub fn mean_frequency(&self, strategy: AverageStrategy) -> R {
        R::one() / self.average_inverse_frequency(strategy)
    }
}

fn dot3<R: Real>(a: &[R; 3], b: &[R; 3]) -> R {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Geometric Lamb-Dicke factors `c_K = √(ħ/2mν_K)(k·S_{site;K})` for every
/// mode `K` (zero where the mode has no support on `site`).
pub fn lamb_dicke_coefficients<R: Real>(
    modes: &ModeSet<R>,
    wavevector: [R; 3],
    site: usize,
) -> Result<Vec<R>> {
    if site >= modes.n_sites() {
        return Err(DecoError::SiteOutOfRange {
            site,
            n_sites: modes.n_sites(),
        });
    }
    let mut out = vec![R::zero(); modes.n_modes()];
    for (k, s) in modes.site_modes(site) {
        out[k] = modes.zero_point_length(k) * dot3(&wavevector, &s);
    }
    Ok(out)
}

/// Analytic open-chain x-mode frequencies `ν_n² = (V₀ + 2c cos(nπ/(N+1)))/m`.
pub fn chain_band(n_sites: usize, v0: f64, c_nn: f64, mass: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (1..=n_sites)
        .map(|n| {
            let arg = n as f64 * std::f64::consts::PI / (n_sites as f64 + 1.0);
            ((v0 + 2.0 * c_nn * arg.cos()) / mass).sqrt()
        })
        .collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    const HBAR: f64 = 1.054_571_817e-34;

    #[test]
    fn independent_matrix_is_diagonal() {
        let cm = build_coupling_matrix(2, 1.0, &Topology::Independent { v0: 3.0 }).unwrap();
        assert_eq!(cm.matrix, DMatrix::from_diagonal_element(6, 6, 3.0));
    }

    #[test]
    fn chain_block_structure() {
        let cm = build_coupling_matrix(2, 1.0, &Topology::Chain1d { v0: 3.0, c_nn: 0.5 }).unwrap();
        assert_eq!(cm.matrix[(0, 3)], 0.5);
        assert_eq!(cm.matrix[(3, 0)], 0.5);
        assert_eq!(cm.matrix[(1, 4)], 0.0);
        assert_eq!(cm.matrix[(2, 5)], 0.0);
        assert!(build_coupling_matrix::<f64>(2, 1.0, &Topology::Chain1d { v0: 1.0, c_nn: 0.5 }).is_err());
    }

    #[test]
    fn two_site_chain_frequencies() {
        let (v0, c, m) = (4.0, 1.0, 2.0);
        let cm = build_coupling_matrix(2, m, &Topology::Chain1d { v0, c_nn: c }).unwrap();
        let nm = solve_normal_modes(&cm, HBAR).unwrap();
        let lo = ((v0 - c) / m).sqrt();
        let hi = ((v0 + c) / m).sqrt();
        assert!((nm.frequencies[0] - lo).abs() < 1e-14);
        assert!((nm.frequencies[5] - hi).abs() < 1e-14);
        assert!(nm.orthogonality_residual() < 1e-12);
    }

    #[test]
    fn non_symmetric_custom_rejected() {
        let m: DMatrix<f64> = parse_coupling_text("3\n1 0 0\n0.5 1 0\n0 0 1\n").unwrap();
        assert!(check_symmetric(&m).is_err());
        assert!(parse_coupling_text::<f64>("3\n1 0 0\n").is_err());
    }

    #[test]
    fn independent_lamb_dicke_factors() {
        let (v0, m) = (1e-12, 1e-25);
        let modes = ModeSet::independent(3, v0, m, HBAR);
        let k = 2.0e6;
        let c = lamb_dicke_coefficients(&modes, [k, 0.0, 0.0], 1).unwrap();
        let nu = (v0 / m).sqrt();
        let expected = k * (HBAR / (2.0 * m * nu)).sqrt();
        assert!((c[3] / expected - 1.0).abs() < 1e-14);
        assert_eq!(c.iter().filter(|v| **v != 0.0).count(), 1);
        let zero = lamb_dicke_coefficients(&modes, [0.0; 3], 0).unwrap();
        assert!(zero.iter().all(|v| *v == 0.0));
    }
}
