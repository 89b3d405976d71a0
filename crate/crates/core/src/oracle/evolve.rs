use super::fit::{fit_tau2, FitOptions};
use super::system::SmallSystem;
use crate::error::{DecoError, Result};
use crate::io::{csv_line, fmt_f64};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

pub const GRID_POINTS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvolveOptions {
    /// Allows `max t · ‖V_I‖ > 1`.
    pub allow_long_times: bool,
    pub fit: FitOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityCurve {
    /// `ħ = 1` time units.
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    /// `1 − F` computed without cancellation.
    pub infidelity: Vec<f64>,
    pub tau2_fit: Option<f64>,
    pub fit_residual: Option<f64>,
    pub truncation_converged: bool,
    /// Largest `|Tr W(t) − 1|` over the grid.
    pub trace_error: f64,
    /// Largest deviation of `Tr W(t)²` from its initial value.
    pub purity_error: f64,
}

impl FidelityCurve {
    pub fn to_csv(&self) -> String {
        let mut out = csv_line(["t", "F", "one_minus_F"].map(String::from));
        for k in 0..self.times.len() {
            out.push_str(&csv_line([
                fmt_f64(self.times[k]),
                fmt_f64(self.fidelity[k]),
                fmt_f64(self.infidelity[k]),
            ]));
        }
        out
    }
}

/// `t = 0` followed by log-spaced points over `[10⁻⁵, 1] / ‖V_I‖`.
pub fn default_grid(system: &SmallSystem) -> Vec<f64> {
    let scale = if system.v_norm > 0.0 { 1.0 / system.v_norm } else { 1.0 };
    let (lo, hi) = (1e-5f64.ln(), 0.0f64);
    std::iter::once(0.0)
        .chain((0..GRID_POINTS).map(|k| scale * (lo + (hi - lo) * k as f64 / (GRID_POINTS - 1) as f64).exp()))
        .collect()
}

fn propagate(eig: &SymmetricEigen<Complex64, nalgebra::Dyn>, coeffs: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
    let phased = DVector::from_iterator(
        coeffs.len(),
        coeffs.iter().zip(eig.eigenvalues.iter()).map(|(c, e)| c * Complex64::from_polar(1.0, -e * t)),
    );
    &eig.eigenvectors * phased
}

/// Exact `F(t) = ⟨ψ_S0(t)| ρ_S(t) |ψ_S0(t)⟩` on the grid, with `W(t)`
/// evolved through the eigendecomposition of the full Hamiltonian and
/// `ψ_S0` through the coherent system Hamiltonian alone.
pub fn evolve_fidelity(system: &SmallSystem, times: &[f64], opts: EvolveOptions) -> Result<FidelityCurve> {
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(DecoError::Misuse("time grid must be non-negative and increasing".into()));
    }
    let t_max = times.last().copied().unwrap_or(0.0);
    if !opts.allow_long_times && t_max * system.v_norm > 1.0 + 1e-12 {
        return Err(DecoError::Misuse(format!(
            "max t · ‖V_I‖ = {:.3} leaves the short-time regime",
            t_max * system.v_norm
        )));
    }
    let sdim = system.system_dim();
    let bdim = system.bath_dim();
    let dim = sdim * bdim;
    let eig = SymmetricEigen::try_new(system.h.clone(), 1e-15, 0)
        .ok_or_else(|| DecoError::Numeric("Hamiltonian eigendecomposition failed".into()))?;
    let eig_s = SymmetricEigen::try_new(system.h_s0.clone(), 1e-15, 0)
        .ok_or_else(|| DecoError::Numeric("system Hamiltonian eigendecomposition failed".into()))?;
    let psi_coeffs = eig_s.eigenvectors.adjoint() * &system.psi_s;

    // eigenbasis coefficients of ψ_S ⊗ |b⟩
    let zero = Complex64::new(0.0, 0.0);
    let initial: Vec<DVector<Complex64>> = system
        .bath_weights
        .iter()
        .map(|&(b, _)| {
            let mut v = DVector::from_element(dim, zero);
            for s in 0..sdim {
                v[s * bdim + b] = system.psi_s[s];
            }
            eig.eigenvectors.adjoint() * v
        })
        .collect();
    let weights: Vec<f64> = system.bath_weights.iter().map(|w| w.1).collect();
    let purity0: f64 = weights.iter().map(|p| p * p).sum();

    let mut fidelity = Vec::with_capacity(times.len());
    let mut infidelity = Vec::with_capacity(times.len());
    let mut trace_error = 0.0f64;
    let mut purity_error = 0.0f64;
    for &t in times {
        let psi0 = propagate(&eig_s, &psi_coeffs, t);
        let states: Vec<DVector<Complex64>> = initial.iter().map(|c| propagate(&eig, c, t)).collect();
        let mut loss = 0.0;
        let mut trace = 0.0;
        for (phi, p) in states.iter().zip(&weights) {
            // (⟨ψ_S0| ⊗ 1) Φ, then the squared norm of the orthogonal remainder
            let mut proj = vec![zero; bdim];
            for s in 0..sdim {
                let a = psi0[s].conj();
                for (b, pr) in proj.iter_mut().enumerate() {
                    *pr += a * phi[s * bdim + b];
                }
            }
            let mut rem = 0.0;
            for s in 0..sdim {
                for b in 0..bdim {
                    rem += (phi[s * bdim + b] - psi0[s] * proj[b]).norm_sqr();
                }
            }
            loss += p * rem;
            trace += p * phi.norm_squared();
        }
        let gram = DMatrix::from_fn(states.len(), states.len(), |a, b| states[a].dotc(&states[b]).norm_sqr());
        let purity: f64 = (0..states.len())
            .flat_map(|a| (0..states.len()).map(move |b| (a, b)))
            .map(|(a, b)| weights[a] * weights[b] * gram[(a, b)])
            .sum();
        trace_error = trace_error.max((trace - 1.0).abs());
        purity_error = purity_error.max((purity - purity0).abs());
        infidelity.push(loss);
        fidelity.push(1.0 - loss);
    }
    let mut curve = FidelityCurve {
        times: times.to_vec(),
        fidelity,
        infidelity,
        tau2_fit: None,
        fit_residual: None,
        truncation_converged: false,
        trace_error,
        purity_error,
    };
    if let Ok(fit) = fit_tau2(&curve, opts.fit) {
        curve.tau2_fit = Some(fit.tau2);
        curve.fit_residual = Some(fit.residual);
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{build_small_system, OracleSpec, SeMode};
    use crate::states::StateSpec;

    #[test]
    fn uncoupled_fidelity_is_one() {
        let mut s = OracleSpec::new("free", 2, StateSpec::Hadamard);
        s.se_modes.push(SeMode {
            omega: 1.0,
            g: vec![Complex64::new(0.0, 0.0); 2],
            occupation: 0.3,
            truncation: Some(4),
        });
        s.rabi = vec![0.1, 0.2];
        let sys = build_small_system(&s).unwrap();
        let grid: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let c = evolve_fidelity(&sys, &grid, EvolveOptions { allow_long_times: true, ..Default::default() }).unwrap();
        assert!(c.infidelity.iter().all(|v| v.abs() < 1e-12));
        assert!(c.trace_error < 1e-10);
    }
}
