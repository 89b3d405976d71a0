use decotime_core::model::{build_modes, load_model, validate_model};
use decotime_core::states::{build_state, StateSpec};
use decotime_core::tau2::{assemble_interaction_terms, tau2_closed_form, tau2_general, StateClass};

const BENCH: &str = include_str!("../../../configs/benchmark.toml");

#[test]
fn hadamard_and_ghz_at_ten_thousand() {
    let model = validate_model(load_model(BENCH).unwrap()).unwrap();
    let modes = build_modes(&model).unwrap();
    let terms = assemble_interaction_terms(&model, Some(&modes)).unwrap();
    let h = build_state(StateSpec::Hadamard, 10_000).unwrap();
    let g = build_state(StateSpec::Ghz, 10_000).unwrap();
    let rh = tau2_general(&h, model.cavity.state, &terms, 0.0).unwrap();
    let rg = tau2_general(&g, model.cavity.state, &terms, 0.0).unwrap();
    let ch = tau2_closed_form(StateClass::Hadamard, &h, &model, Some(&modes), 0.0).unwrap();
    let cg = tau2_closed_form(StateClass::Ghz, &g, &model, Some(&modes), 0.0).unwrap();
    println!("{rh:#?}\n{rg:#?}\n{ch:#?}\n{cg:#?}");
    let expected = 1.0 / (1e6 * (2.0f64 * 1e4).sqrt());
    assert!((ch.tau2 / expected - 1.0).abs() < 1e-9, "{}", ch.tau2);
    assert!((rh.tau2 / expected - 1.0).abs() < 1e-9);
    assert_eq!(rh.entry("SE-dipole"), 0.0);
    assert!(cg.tau2 > 1e-18 && cg.tau2 < 1e-16);
    assert!((rg.tau2 / cg.tau2 - 1.0).abs() < 1e-10);
}
