#![allow(dead_code)]

use decotime_core::model::{build_modes, load_model, validate_model, CouplingProfile, Geometry, Model, ValidatedModel};
use decotime_core::states::{build_state, CavityState, RegisterState, StateSpec};
use decotime_core::tau2::{assemble_interaction_terms, tau2_closed_form, tau2_general, StateClass, TermList};
use decotime_core::vibrations::{ModeSet, Topology};
use num_complex::Complex64;
use rand::Rng;

pub const BENCH: &str = include_str!("../../../../configs/benchmark.toml");

pub fn bench() -> Model {
    load_model(BENCH).unwrap()
}

pub struct Setup {
    pub model: ValidatedModel,
    pub modes: ModeSet<f64>,
    pub terms: TermList,
}

pub fn setup(m: Model) -> Setup {
    let model = validate_model(m).unwrap();
    let modes = build_modes(&model).unwrap();
    let terms = assemble_interaction_terms(&model, Some(&modes)).unwrap();
    Setup { model, modes, terms }
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Random normalized state on `1..=terms` basis states of `n` qubits.
pub fn random_sparse(n: usize, terms: usize, rng: &mut impl Rng) -> RegisterState<f64> {
    let dim = 1u64 << n;
    let k = rng.gen_range(1..=terms);
    let mut entries: Vec<(u64, Complex64)> = (0..k)
        .map(|_| {
            (
                rng.gen_range(0..dim),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            )
        })
        .collect();
    entries.sort_by_key(|e| e.0);
    entries.dedup_by_key(|e| e.0);
    let norm = entries.iter().map(|e| e.1.norm_sqr()).sum::<f64>().sqrt();
    for e in &mut entries {
        e.1 /= norm;
    }
    build_state(StateSpec::Sparse(entries), n).unwrap()
}

pub fn random_product(n: usize, rng: &mut impl Rng) -> RegisterState<f64> {
    let sites = (0..n)
        .map(|_| {
            let th: f64 = rng.gen_range(0.0..std::f64::consts::PI);
            let ph: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            [
                Complex64::new((th / 2.0).cos(), 0.0),
                Complex64::from_polar((th / 2.0).sin(), ph),
            ]
        })
        .collect();
    build_state(StateSpec::Product(sites), n).unwrap()
}

/// Random positions inside a cube of side `size`, at least `size/100` apart.
pub fn random_geometry(n: usize, size: f64, rng: &mut impl Rng) -> Geometry {
    let mut positions: Vec<[f64; 3]> = Vec::with_capacity(n);
    while positions.len() < n {
        let p = [0, 1, 2].map(|_| rng.gen_range(0.0..size));
        let far = positions
            .iter()
            .all(|q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt() > size / 100.0);
        if far {
            positions.push(p);
        }
    }
    Geometry::Explicit { positions }
}

/// Benchmark model with `n` sites, random geometry, topology, temperature
/// and decay profiles.
pub fn random_setup(n: usize, rng: &mut impl Rng) -> (Setup, f64) {
    let mut m = bench().with_count(n);
    m.geometry = random_geometry(n, 10f64.powf(rng.gen_range(-8.5..-6.0)), rng);
    if rng.gen_bool(0.5) {
        let Topology::Independent { v0 } = m.vibrations.topology else { unreachable!() };
        m.vibrations.topology = Topology::Chain1d {
            v0,
            c_nn: rng.gen_range(-0.3..0.3) * v0,
        };
    }
    let t = if rng.gen_bool(0.5) { 0.0 } else { 10f64.powf(rng.gen_range(-3.0..6.0)) };
    if rng.gen_bool(0.5) {
        m.cavity_decay.w = CouplingProfile::Power {
            amplitude: rng.gen_range(1e2..1e4),
            power: rng.gen_range(0.2..2.0),
        };
        m.cavity_decay.u = CouplingProfile::Power {
            amplitude: rng.gen_range(1e2..1e4),
            power: rng.gen_range(0.2..2.0),
        };
    }
    (setup(m), t)
}

/// Largest relative gap between the general engine and the closed form of
/// `class`, over the total and every breakdown entry.
pub fn closed_form_gap(class: StateClass, s: &Setup, state: &RegisterState<f64>, t: f64) -> Result<f64, String> {
    let engine = tau2_general(state, CavityState::Vacuum, &s.terms.restrict(class.families()), t)
        .map_err(|e| format!("{class}: engine: {e}"))?;
    let closed = tau2_closed_form(class, state, &s.model, Some(&s.modes), t)
        .map_err(|e| format!("{class}: closed form: {e}"))?;
    let scale = closed.inv_half_tau2_sq.max(f64::MIN_POSITIVE);
    let mut gap = rel(engine.inv_half_tau2_sq, closed.inv_half_tau2_sq);
    for (k, v) in &closed.breakdown {
        gap = gap.max((engine.entry(k) - v).abs() / scale);
    }
    Ok(gap)
}
