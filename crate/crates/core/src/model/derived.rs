use super::{Model, ValidatedModel};
use crate::error::{DecoError, Result};
use crate::vec3;
use crate::vibrations::{build_coupling_matrix, solve_normal_modes, ModeSet, Topology};
use serde::{Deserialize, Serialize};

/// Lamb-Dicke parameters above this are flagged as outside the regime.
pub const LAMB_DICKE_WARN: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// Cavity vacuum Rabi frequency `g_b`, rad/s.
    pub g_b: f64,
    /// Lamb-Dicke parameter `η = |k_b|√(ħ/2mν̄)`, the same for every site
    /// since mass and `ν̄` are register-wide.
    pub eta: f64,
    /// `Γω_c(ω_c/ω₀)³`, 1/s².
    pub se_sum_prefactor: f64,
    /// Mean vibrational frequency `ν̄`, rad/s.
    pub nu_bar: f64,
}

/// `Γω_c(ω_c/ω₀)³`.
pub fn se_sum_prefactor(model: &Model) -> f64 {
    let wc = model.se_bath.cutoff_omega_c;
    model.gamma_se() * wc * (wc / model.qubits.omega0).powi(3)
}

/// `(ω_b/2ε₀ħV_b)^{1/2}|d₁₀|`, or the configured value.
pub fn vacuum_rabi(model: &Model) -> f64 {
    match model.cavity.vacuum_rabi {
        Some(g) => g,
        None => model.cavity_field_factor() * model.dipole_sq().sqrt(),
    }
}

fn eta_for(model: &Model, nu_bar: f64) -> f64 {
    let k = vec3::norm(model.cavity.wavevector);
    k * (model.constants.hbar / (2.0 * model.qubits.mass * nu_bar)).sqrt()
}

fn natural_modes(model: &Model) -> Result<ModeSet<f64>> {
    let n = model.n_qubits();
    let m = model.qubits.mass;
    let hbar = model.constants.hbar;
    match &model.vibrations.topology {
        Topology::Independent { v0 } => Ok(ModeSet::independent(n, *v0, m, hbar)),
        topo => {
            let cm = build_coupling_matrix(n, m, topo)?;
            Ok(ModeSet::Solved(solve_normal_modes(&cm, hbar)?))
        }
    }
}

/// Factor applied to the trap coupling matrix so that the Lamb-Dicke
/// parameter equals the configured target (1 without a target).
pub fn stiffness_scale(model: &Model) -> Result<f64> {
    let Some(target) = model.vibrations.lamb_dicke else {
        return Ok(1.0);
    };
    let probe = match &model.vibrations.topology {
        Topology::Independent { v0 } => {
            ModeSet::independent(1, *v0, model.qubits.mass, model.constants.hbar)
        }
        _ => natural_modes(model)?,
    };
    let natural = eta_for(model, probe.mean_frequency(model.vibrations.average));
    // η ∝ ν̄^{-1/2} ∝ V^{-1/4}
    Ok((natural / target).powi(4))
}

/// Vibrational modes of the model, with the Lamb-Dicke target applied.
///
/// Independent traps use the analytic mode set and never allocate the
/// `3N × 3N` problem.
pub fn build_modes(model: &Model) -> Result<ModeSet<f64>> {
    let n = model.n_qubits();
    let m = model.qubits.mass;
    let hbar = model.constants.hbar;
    let s = stiffness_scale(model)?;
    match &model.vibrations.topology {
        Topology::Independent { v0 } => Ok(ModeSet::independent(n, v0 * s, m, hbar)),
        topo => {
            let mut cm = build_coupling_matrix(n, m, topo)?;
            cm.matrix *= s;
            Ok(ModeSet::Solved(solve_normal_modes(&cm, hbar)?))
        }
    }
}

/// `g_b`, `η` and the SE mode-sum prefactor.
pub fn derived_quantities(
    model: &ValidatedModel,
    modes: Option<&ModeSet<f64>>,
) -> Result<DerivedParams> {
    let modes = modes.ok_or_else(|| {
        DecoError::RequiresNormalModes(
            "η needs the mean vibrational frequency; solve the normal modes first".into(),
        )
    })?;
    let nu_bar = modes.mean_frequency(model.vibrations.average);
    if !(nu_bar > 0.0) {
        return Err(DecoError::RequiresNormalModes(format!(
            "mean vibrational frequency is {nu_bar}"
        )));
    }
    let eta = eta_for(model, nu_bar);
    if eta > LAMB_DICKE_WARN {
        log::warn!("Lamb-Dicke parameter {eta:.3} exceeds {LAMB_DICKE_WARN}; expansion outside its regime");
    }
    Ok(DerivedParams {
        g_b: vacuum_rabi(model),
        eta,
        se_sum_prefactor: se_sum_prefactor(model),
        nu_bar,
    })
}
