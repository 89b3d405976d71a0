use super::{CouplingProfile, Geometry, Model, PerSite};
use crate::error::{DecoError, Result};
use crate::vec3;
use crate::vibrations::Topology;

/// Tolerance on `|e_b| = 1` and `e_b·k̂_b = 0`.
pub const TRANSVERSE_TOL: f64 = 1e-10;
/// Relative mismatch between `Γ` and the dipole's free-space rate that
/// triggers a warning.
pub const GAMMA_CONSISTENCY: f64 = 0.05;

/// A model whose invariants have been checked. Immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedModel {
    model: Model,
    warnings: Vec<String>,
}

impl ValidatedModel {
    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn into_inner(self) -> Model {
        self.model
    }
}

impl std::ops::Deref for ValidatedModel {
    type Target = Model;
    fn deref(&self) -> &Model {
        &self.model
    }
}

struct Checks {
    errors: Vec<String>,
}

impl Checks {
    fn positive(&mut self, name: &str, v: f64) {
        if !(v > 0.0 && v.is_finite()) {
            self.errors.push(format!("{name} must be positive and finite, got {v}"));
        }
    }

    fn non_negative(&mut self, name: &str, v: f64) {
        if !(v >= 0.0 && v.is_finite()) {
            self.errors.push(format!("{name} must be non-negative and finite, got {v}"));
        }
    }

    fn finite3(&mut self, name: &str, v: [f64; 3]) {
        if v.iter().any(|c| !c.is_finite()) {
            self.errors.push(format!("{name} has non-finite components"));
        }
    }

    fn per_site<T>(&mut self, name: &str, p: &PerSite<T>, n: usize) {
        if let PerSite::List(v) = p {
            if v.len() != n {
                self.errors
                    .push(format!("{name} has {} entries, expected {n}", v.len()));
            }
        }
    }

    fn profile(&mut self, name: &str, p: &CouplingProfile) {
        match p {
            CouplingProfile::Zero => {}
            CouplingProfile::Flat { amplitude } => self.non_negative(&format!("{name}.amplitude"), *amplitude),
            CouplingProfile::Power { amplitude, power } => {
                self.non_negative(&format!("{name}.amplitude"), *amplitude);
                if !(power.is_finite() && *power > -0.5) {
                    self.errors.push(format!(
                        "{name}.power = {power} is not integrable against the cutoff (need power > -0.5)"
                    ));
                }
            }
        }
    }
}

/// Checks every invariant, collecting all failures.
pub fn validate_model(model: Model) -> Result<ValidatedModel> {
    let mut c = Checks { errors: Vec::new() };
    let mut warnings = Vec::new();
    let n = model.qubits.count;
    let q = &model.qubits;

    if n == 0 {
        c.errors.push("qubits.count must be at least 1".into());
    }
    c.positive("qubits.omega0", q.omega0);
    c.positive("qubits.mass", q.mass);
    c.finite3("qubits.dipole_d10", q.dipole_d10);
    c.finite3("qubits.magnetic_m00", q.magnetic_m00);
    c.finite3("qubits.magnetic_m11", q.magnetic_m11);
    if let Some(g) = q.gamma_se {
        c.non_negative("qubits.gamma_se", g);
        let d2 = model.dipole_sq();
        if g > 0.0 && d2 > 0.0 && q.omega0 > 0.0 {
            let free = model.constants.free_space_decay_rate(q.omega0, d2);
            let rel = (free / g - 1.0).abs();
            if rel > GAMMA_CONSISTENCY {
                warnings.push(format!(
                    "qubits.gamma_se = {g:e} differs from the dipole's free-space rate {free:e} by {:.1}%",
                    100.0 * rel
                ));
            }
        }
    }

    match &model.geometry {
        Geometry::Line { spacing, axis } => {
            if n > 1 {
                c.positive("geometry.spacing", *spacing);
            }
            if vec3::unit(*axis).is_none() {
                c.errors.push("geometry.axis must be non-zero".into());
            }
        }
        Geometry::Cubic { spacing } => {
            if n > 1 {
                c.positive("geometry.spacing", *spacing);
            }
        }
        Geometry::Explicit { positions } => {
            if positions.len() != n {
                c.errors.push(format!(
                    "geometry.positions has {} entries, expected {n}",
                    positions.len()
                ));
            }
            let mut idx: Vec<usize> = (0..positions.len()).collect();
            idx.sort_by(|&a, &b| {
                let (pa, pb) = (positions[a], positions[b]);
                pa[0].total_cmp(&pb[0])
                    .then(pa[1].total_cmp(&pb[1]))
                    .then(pa[2].total_cmp(&pb[2]))
            });
            for w in idx.windows(2) {
                if positions[w[0]] == positions[w[1]] {
                    let (i, j) = (w[0].min(w[1]), w[0].max(w[1]));
                    c.errors.push(format!(
                        "geometry.positions: sites {i} and {j} coincide (d_ij = 0)"
                    ));
                }
            }
        }
    }

    let cav = &model.cavity;
    c.positive("cavity.omega_b", cav.omega_b);
    match (cav.mode_volume, cav.vacuum_rabi) {
        (Some(_), Some(_)) => c
            .errors
            .push("cavity: give either mode_volume or vacuum_rabi, not both".into()),
        (None, None) => c
            .errors
            .push("cavity.mode_volume (or cavity.vacuum_rabi) is required".into()),
        (Some(v), None) => c.positive("cavity.mode_volume", v),
        (None, Some(g)) => {
            c.non_negative("cavity.vacuum_rabi", g);
            if g > 0.0 && model.dipole_sq() == 0.0 {
                c.errors
                    .push("cavity.vacuum_rabi > 0 needs a non-zero qubits.dipole_d10".into());
            }
        }
    }
    c.finite3("cavity.wavevector", cav.wavevector);
    let e_norm = vec3::norm(cav.polarization);
    if (e_norm - 1.0).abs() > TRANSVERSE_TOL {
        c.errors
            .push(format!("cavity.polarization must be a unit vector, |e_b| = {e_norm}"));
    }
    if let Some(k_hat) = vec3::unit(cav.wavevector) {
        let d = vec3::dot(k_hat, cav.polarization);
        if d.abs() > TRANSVERSE_TOL {
            c.errors.push(format!(
                "cavity.polarization is not transverse to cavity.wavevector (e_b·k̂_b = {d:e})"
            ));
        }
    }

    let se = &model.se_bath;
    c.positive("se_bath.cutoff_omega_c", se.cutoff_omega_c);
    c.non_negative("se_bath.temperature", se.temperature);
    if let Some(dk) = se.bandwidth_delta_k {
        c.positive("se_bath.bandwidth_delta_k", dk);
    }
    if let Some(kb) = se.mean_kbar {
        c.non_negative("se_bath.mean_kbar", kb);
    }

    let cd = &model.cavity_decay;
    c.positive("cavity_decay.cutoff_xi_c", cd.cutoff_xi_c);
    c.positive("cavity_decay.mode_density", cd.mode_density);
    c.profile("cavity_decay.u", &cd.u);
    c.profile("cavity_decay.w", &cd.w);
    if !cd.u.is_zero() && !cd.w.is_zero() && cd.u.power() + cd.w.power() <= -1.0 {
        c.errors
            .push("cavity_decay: u·w product is not integrable (need power_u + power_w > -1)".into());
    }

    let g = &model.gating;
    c.per_site("gating.omega_rabi", &g.omega_rabi, n);
    c.per_site("gating.delta_shift", &g.delta_shift, n);
    c.per_site("gating.field_gradient_m00", &g.field_gradient_m00, n);
    c.per_site("gating.field_gradient_m11", &g.field_gradient_m11, n);
    c.finite3("gating.classical_wavevector", g.classical_wavevector);

    let vib = &model.vibrations;
    match &vib.topology {
        Topology::Independent { v0 } => c.positive("vibrations.topology.v0", *v0),
        Topology::Chain1d { v0, c_nn } => {
            c.positive("vibrations.topology.v0", *v0);
            if *v0 <= 2.0 * c_nn.abs() {
                c.errors.push(format!(
                    "vibrations.topology: unstable chain, v0 = {v0} must exceed 2|c_nn| = {}",
                    2.0 * c_nn.abs()
                ));
            }
        }
        Topology::Custom { path } => {
            if path.as_os_str().is_empty() {
                c.errors.push("vibrations.topology.path is empty".into());
            }
        }
    }
    if let Some(eta) = vib.lamb_dicke {
        if !(eta > 0.0 && eta < 1.0) {
            c.errors
                .push(format!("vibrations.lamb_dicke must lie in (0, 1), got {eta}"));
        }
        if vec3::norm(cav.wavevector) == 0.0 {
            c.errors
                .push("vibrations.lamb_dicke needs a non-zero cavity.wavevector".into());
        }
    }

    if c.errors.is_empty() {
        Ok(ValidatedModel { model, warnings })
    } else {
        Err(DecoError::Validation(c.errors))
    }
}
