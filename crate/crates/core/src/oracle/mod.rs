//! Exact small-system ground truth for the variance engine.
//!
//! A handful of qubits, discrete bath modes and a truncated cavity are
//! evolved exactly under the full Hamiltonian (units with `ħ = 1`), the
//! fidelity `F(t) = Tr(ρ_S0 ρ_S)` is computed on the qubit ⊗ cavity
//! system, and `τ₂` is fitted from `1 − F ≈ t²/2τ₂²`.

pub mod compare;
pub mod evolve;
pub mod fit;
pub mod system;

pub use compare::{compare, cross_validate, run_suite, Comparison, DiscreteTerms, Suite};
pub use evolve::{default_grid, evolve_fidelity, EvolveOptions, FidelityCurve};
pub use fit::{fit_tau2, FitOptions, Tau2Fit};
pub use system::{build_small_system, SmallSystem};

use crate::error::{DecoError, Result};
use crate::states::StateSpec;
use num_complex::Complex64;

pub const MAX_QUBITS: usize = 4;
pub const MAX_SE_MODES: usize = 3;
pub const MAX_SE_TRUNCATION: usize = 6;
pub const MAX_VIB_MODES: usize = 2;
pub const MAX_DIMENSION: usize = 20_000;
/// Discarded thermal weight per mode.
pub const THERMAL_TAIL: f64 = 1e-6;
/// Suite frequencies relative to the unit used for couplings; small enough
/// that the fit window lies well inside `ωt ≪ 1`.
pub const SUITE_FREQUENCY_SCALE: f64 = 0.02;

/// Discrete SE mode `ω a†a + Σ_i σ_X^i (g_i a + g_i* a†)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeMode {
    pub omega: f64,
    /// One coupling per qubit.
    pub g: Vec<Complex64>,
    pub occupation: f64,
    pub truncation: Option<usize>,
}

/// Vibrational mode `ν A†A` entering through `X = A + A†`.
#[derive(Debug, Clone, PartialEq)]
pub struct VibMode {
    pub nu: f64,
    pub occupation: f64,
    pub truncation: Option<usize>,
    /// `p_i`: `σ_X^i b p_i X + h.c.` (needs the cavity).
    pub ld_cavity: Vec<Complex64>,
    /// `2ReΘ_i`: `σ_X^i X`.
    pub ld_classical: Vec<f64>,
    /// `½(m₁ − m₀)_i`: `σ_Z^i X`.
    pub ld_magnetic: Vec<f64>,
}

/// `n σ_X^qubit a_se X_vib + h.c.`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdSeCoupling {
    pub qubit: usize,
    pub se_mode: usize,
    pub vib_mode: usize,
    pub n: Complex64,
}

/// External mode of the cavity-decay bath: `ξ c†c + b†(u c + w c†) + h.c.`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayMode {
    pub xi: f64,
    pub u: f64,
    pub w: f64,
    pub occupation: f64,
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CavitySpec {
    pub omega_b: f64,
    pub fock: u32,
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpec {
    pub name: String,
    pub n_qubits: usize,
    pub omega0: f64,
    pub state: StateSpec<f64>,
    pub se_modes: Vec<SeMode>,
    pub cavity: Option<CavitySpec>,
    pub vib_modes: Vec<VibMode>,
    pub ld_se: Vec<LdSeCoupling>,
    pub decay_modes: Vec<DecayMode>,
    /// Coherent `a_i σ_X^i`, one amplitude per qubit.
    pub rabi: Vec<f64>,
    /// Coherent `a_i σ_Z^i`, one amplitude per qubit.
    pub zeeman: Vec<f64>,
}

impl OracleSpec {
    pub fn new(name: &str, n_qubits: usize, state: StateSpec<f64>) -> Self {
        OracleSpec {
            name: name.to_string(),
            n_qubits,
            omega0: 1.0,
            state,
            se_modes: Vec::new(),
            cavity: None,
            vib_modes: Vec::new(),
            ld_se: Vec::new(),
            decay_modes: Vec::new(),
            rabi: Vec::new(),
            zeeman: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let n = self.n_qubits;
        if n == 0 || n > MAX_QUBITS {
            errs.push(format!("n_qubits = {n} outside 1..={MAX_QUBITS}"));
        }
        if self.se_modes.len() > MAX_SE_MODES {
            errs.push(format!("at most {MAX_SE_MODES} SE modes"));
        }
        if self.vib_modes.len() > MAX_VIB_MODES {
            errs.push(format!("at most {MAX_VIB_MODES} vibrational modes"));
        }
        for (k, m) in self.se_modes.iter().enumerate() {
            if m.g.len() != n {
                errs.push(format!("SE mode {k}: {} couplings for {n} qubits", m.g.len()));
            }
            if m.truncation.is_some_and(|t| !(2..=MAX_SE_TRUNCATION).contains(&t)) {
                errs.push(format!("SE mode {k}: truncation outside 2..={MAX_SE_TRUNCATION}"));
            }
            if !(m.occupation >= 0.0) {
                errs.push(format!("SE mode {k}: negative occupation"));
            }
        }
        for (k, m) in self.vib_modes.iter().enumerate() {
            for (what, len) in [
                ("ld_cavity", m.ld_cavity.len()),
                ("ld_classical", m.ld_classical.len()),
                ("ld_magnetic", m.ld_magnetic.len()),
            ] {
                if len != 0 && len != n {
                    errs.push(format!("vib mode {k}: {what} has {len} entries for {n} qubits"));
                }
            }
            if !m.ld_cavity.is_empty() && self.cavity.is_none() {
                errs.push(format!("vib mode {k}: cavity Lamb-Dicke coupling without a cavity"));
            }
            if m.truncation.is_some_and(|t| t < 2) {
                errs.push(format!("vib mode {k}: truncation below 2"));
            }
            if !(m.occupation >= 0.0) {
                errs.push(format!("vib mode {k}: negative occupation"));
            }
        }
        for c in &self.ld_se {
            if c.qubit >= n || c.se_mode >= self.se_modes.len() || c.vib_mode >= self.vib_modes.len() {
                errs.push(format!("LD-SE coupling {c:?} refers to a missing qubit or mode"));
            }
        }
        if !self.decay_modes.is_empty() && self.cavity.is_none() {
            errs.push("decay modes need a cavity".into());
        }
        for (k, d) in self.decay_modes.iter().enumerate() {
            if d.truncation.is_some_and(|t| t < 2) {
                errs.push(format!("decay mode {k}: truncation below 2"));
            }
        }
        if let Some(c) = &self.cavity {
            if c.truncation.is_some_and(|t| t < c.fock as usize + 2) {
                errs.push("cavity truncation must exceed the initial Fock level by 2".into());
            }
        }
        for (what, v) in [("rabi", &self.rabi), ("zeeman", &self.zeeman)] {
            if !v.is_empty() && v.len() != n {
                errs.push(format!("{what} has {} entries for {n} qubits", v.len()));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(DecoError::Validation(errs))
        }
    }

    /// Copy with every free and coherent frequency multiplied by `f`;
    /// couplings are unchanged.
    pub fn with_frequency_scale(&self, f: f64) -> OracleSpec {
        let mut s = self.clone();
        s.omega0 *= f;
        s.se_modes.iter_mut().for_each(|m| m.omega *= f);
        s.vib_modes.iter_mut().for_each(|m| m.nu *= f);
        s.decay_modes.iter_mut().for_each(|m| m.xi *= f);
        if let Some(c) = &mut s.cavity {
            c.omega_b *= f;
        }
        s.rabi.iter_mut().chain(s.zeeman.iter_mut()).for_each(|a| *a *= f);
        s
    }

    /// Copy with every automatic truncation raised by `extra` levels.
    pub fn with_extra_levels(&self, extra: usize) -> OracleSpec {
        let mut s = self.clone();
        for m in &mut s.se_modes {
            let t = system::mode_truncation(m.truncation, m.occupation, 3) + extra;
            m.truncation = Some(t.min(MAX_SE_TRUNCATION));
        }
        for m in &mut s.vib_modes {
            m.truncation = Some(system::mode_truncation(m.truncation, m.occupation, 3) + extra);
        }
        for m in &mut s.decay_modes {
            m.truncation = Some(system::mode_truncation(m.truncation, m.occupation, 3) + extra);
        }
        if let Some(c) = &mut s.cavity {
            c.truncation = Some(c.truncation.unwrap_or(c.fock as usize + 3) + extra);
        }
        s
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn se(omega: f64, g: Vec<Complex64>) -> SeMode {
    SeMode {
        omega,
        g,
        occupation: 0.0,
        truncation: None,
    }
}

fn vib(nu: f64, occupation: f64) -> VibMode {
    VibMode {
        nu,
        occupation,
        truncation: None,
        ld_cavity: Vec::new(),
        ld_classical: Vec::new(),
        ld_magnetic: Vec::new(),
    }
}

fn cavity() -> Option<CavitySpec> {
    Some(CavitySpec {
        omega_b: 1.0,
        fock: 0,
        truncation: None,
    })
}

/// Three representative specs: correlated SE, cavity Lamb-Dicke, thermal
/// vibrations.
pub fn quick_suite() -> Vec<OracleSpec> {
    let mut a = OracleSpec::new("ghz2-se-vacuum", 2, StateSpec::Ghz);
    a.se_modes.push(se(1.0, vec![c(0.02, 0.0), c(0.012, 0.0)]));

    let mut b = OracleSpec::new("hadamard1-cavity-ld", 1, StateSpec::Hadamard);
    b.cavity = cavity();
    let mut m = vib(0.3, 0.0);
    m.ld_cavity = vec![c(0.01, 0.0)];
    b.vib_modes.push(m);

    let mut t = OracleSpec::new("two-qubit-vib-thermal", 2, StateSpec::Hadamard);
    t.cavity = cavity();
    let mut m = vib(0.3, 0.5);
    m.ld_cavity = vec![c(0.01, 0.0), c(0.0, 0.008)];
    m.ld_classical = vec![0.006, -0.004];
    t.vib_modes.push(m);
    slowed(vec![a, b, t])
}

fn slowed(specs: Vec<OracleSpec>) -> Vec<OracleSpec> {
    specs.iter().map(|s| s.with_frequency_scale(SUITE_FREQUENCY_SCALE)).collect()
}

/// The quick suite plus SE, LD-SE, magnetic, cavity-decay and gating
/// combinations at zero and finite occupation.
pub fn full_suite() -> Vec<OracleSpec> {
    let mut out = Vec::new();

    let mut s = OracleSpec::new("zero-state-se", 1, StateSpec::AllZero);
    s.se_modes.push(se(1.0, vec![c(0.02, 0.0)]));
    out.push(s);

    let mut s = OracleSpec::new("w3-two-se-modes", 3, StateSpec::W);
    s.se_modes.push(se(0.9, vec![c(0.02, 0.0), c(0.015, 0.005), c(-0.01, 0.0)]));
    s.se_modes.push(se(1.2, vec![c(0.0, 0.01), c(0.012, 0.0), c(0.02, -0.004)]));
    out.push(s);

    let mut s = OracleSpec::new(
        "product2-se-thermal",
        2,
        StateSpec::Product(vec![[c(0.8, 0.0), c(0.6, 0.0)], [c(0.6, 0.0), c(0.0, 0.8)]]),
    );
    let mut m = se(1.0, vec![c(0.02, 0.0), c(0.01, 0.01)]);
    m.occupation = 0.2;
    m.truncation = Some(6);
    s.se_modes.push(m);
    out.push(s);

    let mut s = OracleSpec::new("ld-se-bilinear", 1, StateSpec::AllZero);
    s.se_modes.push(se(1.0, vec![c(0.01, 0.0)]));
    s.vib_modes.push(vib(0.2, 0.0));
    s.ld_se.push(LdSeCoupling {
        qubit: 0,
        se_mode: 0,
        vib_mode: 0,
        n: c(0.015, 0.0),
    });
    out.push(s);

    let mut s = OracleSpec::new(
        "magnetic-classical-interference",
        2,
        StateSpec::Sparse(vec![(0, c(0.6, 0.0)), (1, c(0.0, 0.48)), (3, c(0.64, 0.0))]),
    );
    let mut m = vib(0.25, 0.0);
    m.ld_classical = vec![0.01, 0.004];
    m.ld_magnetic = vec![0.008, -0.006];
    s.vib_modes.push(m);
    out.push(s);

    let mut s = OracleSpec::new("cavity-decay", 1, StateSpec::Hadamard);
    s.cavity = Some(CavitySpec {
        omega_b: 1.0,
        fock: 1,
        truncation: None,
    });
    s.decay_modes.push(DecayMode {
        xi: 1.1,
        u: 0.02,
        w: 0.01,
        occupation: 0.0,
        truncation: None,
    });
    out.push(s);

    let mut s = OracleSpec::new("ghz3-cavity-ld-thermal", 3, StateSpec::Ghz);
    s.cavity = cavity();
    let mut m = vib(0.3, 0.5);
    m.ld_cavity = vec![c(0.01, 0.0), c(0.008, 0.0), c(0.0, 0.006)];
    s.vib_modes.push(m);
    out.push(s);

    let mut s = OracleSpec::new("gated-se", 2, StateSpec::AllZero);
    s.se_modes.push(se(1.0, vec![c(0.02, 0.0), c(0.0, 0.015)]));
    s.rabi = vec![0.05, 0.02];
    s.zeeman = vec![0.03, -0.01];
    out.push(s);

    let mut s = OracleSpec::new(
        "sparse2-mixed-thermal",
        2,
        StateSpec::Sparse(vec![(0, c(0.5, 0.0)), (1, c(0.5, 0.0)), (2, c(0.0, 0.5)), (3, c(-0.5, 0.0))]),
    );
    s.cavity = cavity();
    s.se_modes.push(se(1.0, vec![c(0.015, 0.0), c(0.01, 0.0)]));
    let mut m = vib(0.3, 0.5);
    m.ld_cavity = vec![c(0.008, 0.0), c(0.006, 0.0)];
    m.ld_magnetic = vec![0.005, 0.0];
    s.vib_modes.push(m);
    s.ld_se.push(LdSeCoupling {
        qubit: 1,
        se_mode: 0,
        vib_mode: 0,
        n: c(0.01, 0.0),
    });
    out.push(s);
    let mut all = quick_suite();
    all.extend(slowed(out));
    all
}

/// A copy of `spec` with the sign of one coupling flipped, for negative
/// controls: engine and oracle should then disagree.
pub fn corrupted(spec: &OracleSpec) -> OracleSpec {
    let mut s = spec.clone();
    if let Some(m) = s.se_modes.first_mut() {
        if let Some(g) = m.g.last_mut() {
            *g = -*g;
            return s;
        }
    }
    if let Some(m) = s.vib_modes.first_mut() {
        if let Some(p) = m.ld_cavity.last_mut() {
            *p = -*p;
        } else if let Some(t) = m.ld_classical.last_mut() {
            *t = -*t;
        }
    }
    s
}
