mod common;

use common::{closed_form_gap, random_product, random_setup, random_sparse, Setup};
use decotime_core::states::{build_state, RegisterState, StateSpec};
use decotime_core::tau2::StateClass;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TRIALS: usize = 100;
pub const TOL: f64 = 1e-10;

fn check(class: StateClass, s: &Setup, state: &RegisterState<f64>, t: f64) {
    let gap = closed_form_gap(class, s, state, t).unwrap();
    assert!(gap < TOL, "{class}, N = {}, T = {t}: relative gap {gap:e}", state.n_qubits());
}

fn run(class: StateClass, seed: u64, n_min: usize, make: impl Fn(usize, &mut ChaCha8Rng) -> RegisterState<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..TRIALS {
        let n = rng.gen_range(n_min..=10);
        let (s, t) = random_setup(n, &mut rng);
        let state = make(n, &mut rng);
        check(class, &s, &state, t);
    }
}

#[test]
fn se_stationary() {
    run(StateClass::SeStationary, 11, 1, |n, r| random_sparse(n, 16, r));
}

#[test]
fn correlated_vacuum() {
    run(StateClass::CorrelatedVacuum, 12, 1, |n, r| random_sparse(n, 16, r));
}

#[test]
fn uncorrelated_vacuum() {
    run(StateClass::UncorrelatedVacuum, 13, 1, random_product);
}

#[test]
fn hadamard() {
    run(StateClass::Hadamard, 14, 1, |n, r| {
        let s = build_state(StateSpec::Hadamard, n).unwrap();
        if r.gen_bool(0.5) {
            s.with_global_phase(r.gen_range(0.0..6.0)).unwrap()
        } else {
            s
        }
    });
}

#[test]
fn ghz() {
    run(StateClass::Ghz, 15, 3, |n, r| {
        let s = build_state(StateSpec::Ghz, n).unwrap();
        if r.gen_bool(0.5) {
            s.materialize().unwrap()
        } else {
            s
        }
    });
}

#[test]
fn no_se() {
    run(StateClass::NoSe, 16, 1, |n, r| random_sparse(n, 16, r));
}
