//! Physical parameters of the register, cavity, baths and traps.
//!
//! All quantities are SI with angular frequencies in rad/s. The structs
//! double as the configuration schema (see [`config`]).

pub mod config;
pub mod derived;
pub mod validate;

pub use config::{load_model, load_model_file, model_json, resolve_config_path, serialize_model, CONFIG_ENV};
pub use derived::{build_modes, derived_quantities, se_sum_prefactor, vacuum_rabi, DerivedParams};
pub use validate::{validate_model, ValidatedModel};

use crate::constants::PhysicalConstants;
use crate::states::CavityState;
use crate::vec3::{self, Vec3};
use crate::vibrations::{AverageStrategy, Topology};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Either one value shared by every site or an explicit per-site list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerSite<T> {
    Uniform(T),
    List(Vec<T>),
}

impl<T: Clone> PerSite<T> {
    pub fn get(&self, site: usize) -> T {
        match self {
            PerSite::Uniform(v) => v.clone(),
            PerSite::List(v) => v[site].clone(),
        }
    }

    pub fn len_matches(&self, n: usize) -> bool {
        match self {
            PerSite::Uniform(_) => true,
            PerSite::List(v) => v.len() == n,
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, PerSite::Uniform(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitParams {
    /// Number of qubits `N`.
    pub count: usize,
    /// Transition frequency `ω₀`.
    pub omega0: f64,
    /// Electric dipole matrix element `d₁₀`, C·m.
    pub dipole_d10: Vec3,
    /// Spontaneous emission rate `Γ`; derived from the dipole when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_se: Option<f64>,
    /// Qubit mass, kg.
    pub mass: f64,
    /// Magnetic dipole matrix elements `m₀₀`, `m₁₁`, J/T.
    #[serde(default)]
    pub magnetic_m00: Vec3,
    #[serde(default)]
    pub magnetic_m11: Vec3,
}

/// Equilibrium positions `r_{i0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layout", rename_all = "snake_case", deny_unknown_fields)]
pub enum Geometry {
    /// Evenly spaced along `axis`, site 0 at the origin.
    Line {
        spacing: f64,
        #[serde(default = "x_axis")]
        axis: Vec3,
    },
    /// Simple cubic lattice filled x-fastest.
    Cubic { spacing: f64 },
    Explicit { positions: Vec<Vec3> },
}

fn x_axis() -> Vec3 {
    [1.0, 0.0, 0.0]
}

impl Geometry {
    pub fn position(&self, site: usize, n_sites: usize) -> Vec3 {
        match self {
            Geometry::Line { spacing, axis } => {
                let u = vec3::unit(*axis).unwrap_or([1.0, 0.0, 0.0]);
                vec3::scale(u, spacing * site as f64)
            }
            Geometry::Cubic { spacing } => {
                let side = cube_side(n_sites);
                let (x, y, z) = (site % side, (site / side) % side, site / (side * side));
                [
                    x as f64 * spacing,
                    y as f64 * spacing,
                    z as f64 * spacing,
                ]
            }
            Geometry::Explicit { positions } => positions[site],
        }
    }

    /// `r_{i0} − r_{j0}`.
    pub fn separation(&self, i: usize, j: usize, n_sites: usize) -> Vec3 {
        vec3::sub(self.position(i, n_sites), self.position(j, n_sites))
    }

    /// Smallest pairwise distance, computed analytically for lattices.
    pub fn nearest_neighbour_distance(&self, n_sites: usize) -> Option<f64> {
        if n_sites < 2 {
            return None;
        }
        match self {
            Geometry::Line { spacing, .. } | Geometry::Cubic { spacing } => Some(spacing.abs()),
            Geometry::Explicit { positions } => {
                let mut best = f64::INFINITY;
                for i in 0..positions.len() {
                    for j in (i + 1)..positions.len() {
                        best = best.min(vec3::norm(vec3::sub(positions[i], positions[j])));
                    }
                }
                Some(best)
            }
        }
    }
}

fn cube_side(n: usize) -> usize {
    let mut s = (n as f64).cbrt().round() as usize;
    while s * s * s < n {
        s += 1;
    }
    s.max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityParams {
    pub omega_b: f64,
    /// Quantization volume `V_b`, m³. Either this or `vacuum_rabi`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode_volume: Option<f64>,
    /// Vacuum Rabi frequency `g_b`; fixes the mode volume when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vacuum_rabi: Option<f64>,
    pub wavevector: Vec3,
    pub polarization: Vec3,
    #[serde(default = "vacuum")]
    pub state: CavityState<f64>,
}

fn vacuum() -> CavityState<f64> {
    CavityState::Vacuum
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeBathParams {
    /// Exponential cutoff `ω_c` on `|g_k|²`.
    pub cutoff_omega_c: f64,
    #[serde(default)]
    pub temperature: f64,
    /// Bandwidth `Δk`; defaults to `ω_c/c`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth_delta_k: Option<f64>,
    /// Mean wavenumber `k̄`; defaults to `ω₀/c`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_kbar: Option<f64>,
    /// Include the continuum spontaneous-emission bath at all.
    #[serde(default = "yes")]
    pub enabled: bool,
}

fn yes() -> bool {
    true
}

/// Spectral profile of a cavity-decay coupling, `|c(ξ)| = A (ξ/ξ_c)^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingProfile {
    Zero,
    Flat { amplitude: f64 },
    Power { amplitude: f64, power: f64 },
}

impl CouplingProfile {
    pub fn amplitude(&self) -> f64 {
        match self {
            CouplingProfile::Zero => 0.0,
            CouplingProfile::Flat { amplitude } | CouplingProfile::Power { amplitude, .. } => {
                *amplitude
            }
        }
    }

    pub fn power(&self) -> f64 {
        match self {
            CouplingProfile::Power { power, .. } => *power,
            _ => 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude() == 0.0
    }
}

/// Quasi-mode coupling of the cavity to its decay continuum,
/// `Σ_k (b† (u_k b_k + w_k b_k†) + h.c.)`, with density of modes `ρ`
/// and cutoff `exp(−ξ/ξ_c)` on coupling products.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityDecayParams {
    pub cutoff_xi_c: f64,
    /// Modes per unit angular frequency, s.
    pub mode_density: f64,
    pub u: CouplingProfile,
    pub w: CouplingProfile,
}

impl Default for CavityDecayParams {
    fn default() -> Self {
        CavityDecayParams {
            cutoff_xi_c: 1.0e9,
            mode_density: 1.0e-6,
            u: CouplingProfile::Zero,
            w: CouplingProfile::Zero,
        }
    }
}

/// Time-zero snapshot of the gating fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GatingSnapshot {
    /// `Ω_i` as `[re, im]`, rad/s.
    pub omega_rabi: PerSite<[f64; 2]>,
    /// `Δ_{i1} − Δ_{i0}`, rad/s.
    pub delta_shift: PerSite<f64>,
    /// Classical-field wavevector `k_c` entering the recoil couplings.
    pub classical_wavevector: Vec3,
    /// `∇(m_aa·B)` at each site, J/m.
    pub field_gradient_m00: PerSite<Vec3>,
    pub field_gradient_m11: PerSite<Vec3>,
}

impl Default for GatingSnapshot {
    fn default() -> Self {
        GatingSnapshot {
            omega_rabi: PerSite::Uniform([0.0, 0.0]),
            delta_shift: PerSite::Uniform(0.0),
            classical_wavevector: [0.0; 3],
            field_gradient_m00: PerSite::Uniform([0.0; 3]),
            field_gradient_m11: PerSite::Uniform([0.0; 3]),
        }
    }
}

impl GatingSnapshot {
    pub fn omega(&self, site: usize) -> Complex64 {
        let [re, im] = self.omega_rabi.get(site);
        Complex64::new(re, im)
    }

    fn per_site_all<T: Clone>(p: &PerSite<T>, zero: impl Fn(&T) -> bool) -> bool {
        match p {
            PerSite::Uniform(v) => zero(v),
            PerSite::List(v) => v.iter().all(zero),
        }
    }

    pub fn rabi_is_zero(&self) -> bool {
        Self::per_site_all(&self.omega_rabi, |v| v[0] == 0.0 && v[1] == 0.0)
    }

    pub fn shift_is_zero(&self) -> bool {
        Self::per_site_all(&self.delta_shift, |v| *v == 0.0)
    }

    pub fn gradients_are_zero(&self) -> bool {
        let z = |v: &Vec3| v.iter().all(|c| *c == 0.0);
        Self::per_site_all(&self.field_gradient_m00, z) && Self::per_site_all(&self.field_gradient_m11, z)
    }

    pub fn is_off(&self) -> bool {
        self.rabi_is_zero() && self.shift_is_zero() && self.gradients_are_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VibrationParams {
    pub topology: Topology,
    /// Target Lamb-Dicke parameter; rescales the trap stiffness when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lamb_dicke: Option<f64>,
    #[serde(default)]
    pub average: AverageStrategy,
}

/// Complete parameter set of the register model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Model {
    #[serde(skip)]
    pub constants: PhysicalConstants,
    pub qubits: QubitParams,
    pub geometry: Geometry,
    pub cavity: CavityParams,
    pub se_bath: SeBathParams,
    #[serde(default)]
    pub cavity_decay: CavityDecayParams,
    #[serde(default)]
    pub gating: GatingSnapshot,
    pub vibrations: VibrationParams,
}

impl Model {
    pub fn n_qubits(&self) -> usize {
        self.qubits.count
    }

    /// Copy of the model with a different register size. Explicit
    /// position lists and per-site lists must already match `n`.
    pub fn with_count(&self, n: usize) -> Model {
        let mut m = self.clone();
        m.qubits.count = n;
        m
    }

    pub fn position(&self, site: usize) -> Vec3 {
        self.geometry.position(site, self.qubits.count)
    }

    pub fn separation(&self, i: usize, j: usize) -> Vec3 {
        self.geometry.separation(i, j, self.qubits.count)
    }

    pub fn dipole_sq(&self) -> f64 {
        vec3::dot(self.qubits.dipole_d10, self.qubits.dipole_d10)
    }

    /// Unit dipole direction (x when the dipole vanishes).
    pub fn dipole_unit(&self) -> Vec3 {
        vec3::unit(self.qubits.dipole_d10).unwrap_or([1.0, 0.0, 0.0])
    }

    /// `Γ` as configured, or the free-space rate of the dipole.
    pub fn gamma_se(&self) -> f64 {
        self.qubits.gamma_se.unwrap_or_else(|| {
            self.constants
                .free_space_decay_rate(self.qubits.omega0, self.dipole_sq())
        })
    }

    pub fn temperature(&self) -> f64 {
        self.se_bath.temperature
    }

    pub fn delta_k(&self) -> f64 {
        self.se_bath
            .bandwidth_delta_k
            .unwrap_or(self.se_bath.cutoff_omega_c / self.constants.c)
    }

    pub fn kbar(&self) -> f64 {
        self.se_bath
            .mean_kbar
            .unwrap_or(self.qubits.omega0 / self.constants.c)
    }

    /// Effective mode volume: configured, or fixed by `vacuum_rabi`.
    pub fn mode_volume(&self) -> f64 {
        match (self.cavity.vacuum_rabi, self.cavity.mode_volume) {
            (Some(g), _) if g > 0.0 => {
                self.cavity.omega_b * self.dipole_sq()
                    / (2.0 * self.constants.eps0 * self.constants.hbar * g * g)
            }
            (_, Some(v)) => v,
            _ => f64::INFINITY,
        }
    }

    /// Single-photon field amplitude factor `√(ω_b/2ε₀ħV_b)`, 1/(C·m·s).
    pub fn cavity_field_factor(&self) -> f64 {
        if let Some(g) = self.cavity.vacuum_rabi {
            let d = self.dipole_sq().sqrt();
            return if d > 0.0 { g / d } else { 0.0 };
        }
        (self.cavity.omega_b
            / (2.0 * self.constants.eps0 * self.constants.hbar * self.mode_volume()))
        .sqrt()
    }

    /// `|d₁₀·e_b|·√(ω_b/2ε₀ħV_b)`, the coupling magnitude entering `p_K^i`.
    pub fn cavity_coupling(&self) -> f64 {
        self.cavity_field_factor()
            * vec3::dot(self.qubits.dipole_d10, self.cavity.polarization).abs()
    }

    /// Whether the continuum SE bath contributes.
    pub fn se_active(&self) -> bool {
        self.se_bath.enabled && self.gamma_se() > 0.0
    }
}
