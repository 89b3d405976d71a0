mod common;

use common::{bench, random_geometry, random_sparse, rel, setup};
use decotime_core::model::{CouplingProfile, PerSite};
use decotime_core::modesums::{se_diagonal_closed_form, se_diagonal_sum};
use decotime_core::states::{build_state, Axis, CavityState, StateSpec};
use decotime_core::tau2::{
    classify_products, fidelity_short_time, scaling_sweep, tau2_general, Couplings, Label, Regime,
    RegimeThresholds, StateClass, SweepOptions,
};
use decotime_core::DecoError;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn only_se_when_recoil_and_decay_absent() {
    let mut m = bench().with_count(3);
    m.cavity.wavevector = [0.0; 3];
    m.vibrations.lamb_dicke = None;
    let s = setup(m);
    assert_eq!(s.terms.active_families(), vec![Label::SeDipole]);
    assert!(s.terms.coherent_terms().is_empty());
}

#[test]
fn benchmark_represents_every_family() {
    let s = setup(bench().with_count(10));
    assert_eq!(s.terms.represented_families().len(), 7);
    assert!(s.terms.coherent_terms().is_empty());
    let active = s.terms.active_families();
    assert!(active.contains(&Label::SeDipole) && active.contains(&Label::LdSe) && active.contains(&Label::LdCavity));
}

#[test]
fn rabi_snapshot_adds_coherent_term() {
    let mut m = bench().with_count(3);
    m.gating.omega_rabi = PerSite::List(vec![[0.0, 0.0], [2.0e6, 0.0], [0.0, 0.0]]);
    let s = setup(m);
    let coh = s.terms.coherent_terms();
    assert!(coh
        .iter()
        .any(|t| t.label == Label::GatingRabi && t.op.site == 1 && t.op.pauli == Some(Axis::X)));
    assert!(coh.iter().all(|t| t.op.site == 1));
}

#[test]
fn hadamard_sees_only_cavity_terms() {
    let n = 10;
    let mut m = bench().with_count(n);
    m.cavity_decay.w = CouplingProfile::Flat { amplitude: 2.0e3 };
    let s = setup(m);
    let h = build_state(StateSpec::Hadamard, n).unwrap();
    let r = tau2_general(&h, CavityState::Vacuum, &s.terms, 0.0).unwrap();
    assert_eq!(r.entry("SE-dipole"), 0.0);
    let mut k = 0.0;
    for i in 0..n {
        for j in 0..n {
            k += s.terms.cavity_ld_sum(i, j, 0.0).unwrap().re;
        }
    }
    let l = decotime_core::modesums::cavity_decay_sum(&s.model).unwrap().value;
    assert!(rel(r.inv_half_tau2_sq, k + l) < 1e-12, "{} vs {}", r.inv_half_tau2_sq, k + l);
    let sum: f64 = r.breakdown.values().sum();
    assert!(rel(sum, r.inv_half_tau2_sq) < 1e-10);
}

#[test]
fn all_zero_se_only() {
    let n = 3;
    let mut m = bench().with_count(n);
    m.cavity.wavevector = [0.0; 3];
    m.vibrations.lamb_dicke = None;
    let s = setup(m);
    let z = build_state(StateSpec::AllZero, n).unwrap();
    let r = tau2_general(&z, CavityState::Vacuum, &s.terms, 0.0).unwrap();
    let g = se_diagonal_sum(&s.model, 0.0).unwrap().value;
    assert!(rel(r.inv_half_tau2_sq, n as f64 * g) < 1e-10);
    assert_eq!(r.cross_site_fraction, 0.0);
    // the same state written out explicitly takes the general path
    let sparse = z.materialize().unwrap();
    let r2 = tau2_general(&sparse, CavityState::Vacuum, &s.terms, 0.0).unwrap();
    assert!(rel(r2.inv_half_tau2_sq, r.inv_half_tau2_sq) < 1e-12);
}

#[test]
fn no_couplings_means_no_decoherence() {
    let mut m = bench().with_count(4);
    m.se_bath.enabled = false;
    m.cavity.vacuum_rabi = Some(0.0);
    let s = setup(m);
    assert!(s.terms.active_families().is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let st = random_sparse(4, 6, &mut rng);
    let r = tau2_general(&st, CavityState::Vacuum, &s.terms, 0.0).unwrap();
    assert_eq!(r.tau2, f64::INFINITY);
    assert_eq!(fidelity_short_time(&r, 1.0), 1.0);
    assert_eq!(serde_json::to_value(&r).unwrap()["tau2"], "inf");
}

#[test]
fn short_time_fidelity() {
    let s = setup(bench().with_count(5));
    let st = build_state(StateSpec::Ghz, 5).unwrap();
    let r = tau2_general(&st, CavityState::Vacuum, &s.terms, 0.0).unwrap();
    assert_eq!(fidelity_short_time(&r, 0.0), 1.0);
    assert!((fidelity_short_time(&r, r.tau2) - 0.5).abs() < 1e-12);
}

#[test]
fn regime_examples() {
    let th = RegimeThresholds::default();
    assert_eq!(classify_products(1e3, 1e3, th), Regime::Independent);
    assert_eq!(classify_products(1e-3, 1e-2, th), Regime::Collective);
    assert_eq!(classify_products(1.0, 1.0, th), Regime::Intermediate);
}

#[test]
fn negative_or_infinite_temperature_rejected() {
    let s = setup(bench().with_count(2));
    let st = build_state(StateSpec::Hadamard, 2).unwrap();
    for t in [-1.0, f64::INFINITY, f64::NAN] {
        assert!(matches!(
            tau2_general(&st, CavityState::Vacuum, &s.terms, t),
            Err(DecoError::Unsupported(_))
        ));
    }
}

#[test]
fn closed_form_class_mismatch() {
    let s = setup(bench().with_count(3));
    let g = build_state(StateSpec::Ghz, 3).unwrap();
    let err = decotime_core::tau2::tau2_closed_form(StateClass::Hadamard, &g, &s.model, Some(&s.modes), 0.0)
        .unwrap_err();
    assert!(matches!(err, DecoError::StateClassMismatch { .. }));
    let g2 = build_state(StateSpec::Ghz, 2).unwrap();
    let s2 = setup(bench().with_count(2));
    assert!(decotime_core::tau2::tau2_closed_form(StateClass::Ghz, &g2, &s2.model, Some(&s2.modes), 0.0).is_err());
}

#[test]
fn sweeps_scale_as_inverse_root_n() {
    let n_list: Vec<usize> = (2..=8).map(|e| 10usize.pow(e)).collect();
    for spec in [StateSpec::Hadamard, StateSpec::Ghz] {
        let t = scaling_sweep(&bench(), &spec, &n_list, SweepOptions::default()).unwrap();
        assert!((t.slope + 0.5).abs() < 1e-6, "{}", t.slope);
        assert_eq!(t.rows.len(), 7);
        let csv = t.to_csv();
        assert!(csv.starts_with("N,tau2_s,inv_half_tau2_sq"));
        assert_eq!(csv.lines().count(), 8);
    }
    let null = SweepOptions {
        coupling_exponent: -0.5,
        ..SweepOptions::default()
    };
    let t = scaling_sweep(&bench(), &StateSpec::Hadamard, &n_list, null).unwrap();
    assert!(t.slope.abs() < 1e-9, "{}", t.slope);
    assert!(scaling_sweep(&bench(), &StateSpec::Hadamard, &[10, 100], SweepOptions::default()).is_err());
    assert!(scaling_sweep(&bench(), &StateSpec::Hadamard, &[10, 100, 50], SweepOptions::default()).is_err());
}

fn small_model(n: usize, seed: u64) -> common::Setup {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = bench().with_count(n);
    m.geometry = random_geometry(n, 2e-8, &mut rng);
    m.cavity_decay.w = CouplingProfile::Power { amplitude: 1e3, power: 1.0 };
    m.cavity_decay.u = CouplingProfile::Power { amplitude: 5e2, power: 0.5 };
    setup(m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn global_phase_invariance(seed in any::<u64>(), n in 1usize..=5, phase in 0.0f64..6.3) {
        let s = small_model(n, seed);
        let st = random_sparse(n, 8, &mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        let a = tau2_general(&st, CavityState::Vacuum, &s.terms, 0.0).unwrap();
        let b = tau2_general(&st.with_global_phase(phase).unwrap(), CavityState::Vacuum, &s.terms, 0.0).unwrap();
        prop_assert!(rel(a.inv_half_tau2_sq, b.inv_half_tau2_sq) < 1e-12);
    }

    #[test]
    fn relabeling_invariance(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = small_model(n, seed);
        let st = random_sparse(n, 8, &mut rng);
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let mut m2 = s.model.model().clone();
        let mut pos = vec![[0.0; 3]; n];
        for i in 0..n {
            pos[perm[i]] = s.model.position(i);
        }
        m2.geometry = decotime_core::model::Geometry::Explicit { positions: pos };
        let s2 = setup(m2);
        let a = tau2_general(&st, CavityState::Vacuum, &s.terms, 0.0).unwrap();
        let b = tau2_general(&st.permuted(&perm).unwrap(), CavityState::Vacuum, &s2.terms, 0.0).unwrap();
        prop_assert!(rel(a.inv_half_tau2_sq, b.inv_half_tau2_sq) < 1e-10);
    }

    #[test]
    fn variance_non_negative(seed in any::<u64>(), n in 1usize..=6, t in prop_oneof![Just(0.0), 1.0f64..1e4]) {
        let s = small_model(n, seed);
        let st = random_sparse(n, 12, &mut ChaCha8Rng::seed_from_u64(seed ^ 2));
        let r = tau2_general(&st, CavityState::Vacuum, &s.terms, t).unwrap();
        prop_assert!(r.inv_half_tau2_sq >= 0.0);
        let sum: f64 = r.breakdown.values().sum();
        prop_assert!((sum - r.inv_half_tau2_sq).abs() <= 1e-10 * r.inv_half_tau2_sq.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn se_variance_grows_with_temperature(seed in any::<u64>(), n in 1usize..=4) {
        let s = small_model(n, seed);
        let se = s.terms.restrict(StateClass::SeStationary.families());
        let st = random_sparse(n, 8, &mut ChaCha8Rng::seed_from_u64(seed ^ 3));
        let mut last = 0.0;
        for t in [0.0, 1e5, 1e6, 1e7] {
            let r = tau2_general(&st, CavityState::Vacuum, &se, t).unwrap().inv_half_tau2_sq;
            prop_assert!(r >= last * (1.0 - 1e-12), "T = {t}: {r} < {last}");
            last = r;
        }
    }
}

#[test]
fn diagonal_closed_form_feeds_ghz_approximation() {
    let s = setup(bench().with_count(4));
    let g = build_state(StateSpec::Ghz, 4).unwrap();
    let r = decotime_core::tau2::tau2_closed_form(StateClass::Ghz, &g, &s.model, Some(&s.modes), 0.0).unwrap();
    let approx = r.approximation.unwrap();
    let sdiag = se_diagonal_closed_form(&s.model, 0.0).value;
    assert!(approx > 4.0 * sdiag);
    assert!(rel(r.inv_half_tau2_sq, approx) < 1e-6);
}
