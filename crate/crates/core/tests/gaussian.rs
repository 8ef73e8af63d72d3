//! Gaussian-state and QFI properties on random inputs.

mod common;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relclock::gauss::{
    apply_full, apply_reduced, extract_params, wrap_angle, GaussianParams, GaussianState,
};
use relclock::metrology::phase_qfi;
use relclock::modes::{free_phase_map, ModeBasis};

/// Pure displaced squeezed state with the given parameters, built directly
/// from the covariance ellipse rather than through the library constructors.
fn pure_state(alpha: f64, theta: f64, r: f64, phi: f64) -> GaussianState {
    let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let psi = 2.0 * theta + phi;
    let cov = DMatrix::from_row_slice(
        2,
        2,
        &[
            0.25 * (c + s * psi.cos()),
            0.25 * s * psi.sin(),
            0.25 * s * psi.sin(),
            0.25 * (c - s * psi.cos()),
        ],
    );
    let x = DVector::from_column_slice(&[alpha * theta.cos(), alpha * theta.sin()]);
    GaussianState::new(x, cov).unwrap()
}

fn angle_diff(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

proptest! {
    #[test]
    fn coherent_roundtrip(amplitude in 0.01f64..20.0, phase in -3.1f64..3.1) {
        let p = extract_params(&GaussianState::coherent(amplitude, phase).unwrap()).unwrap();
        prop_assert!((p.displacement - amplitude).abs() < 1e-10 * amplitude.max(1.0));
        prop_assert!(angle_diff(p.phase, phase) < 1e-10);
        prop_assert!((p.purity - 1.0).abs() < 1e-12);
        prop_assert!(p.squeeze_magnitude.abs() < 1e-10);
    }

    #[test]
    fn squeezed_vacuum_roundtrip(mean_n in 0.01f64..50.0, angle in -3.1f64..3.1) {
        let p = extract_params(&GaussianState::squeezed_vacuum(mean_n, angle).unwrap()).unwrap();
        prop_assert!((p.squeeze_magnitude - mean_n.sqrt().asinh()).abs() < 1e-10);
        prop_assert!(angle_diff(p.squeeze_angle, angle) < 1e-10);
        prop_assert!((p.purity - 1.0).abs() < 1e-10);
        prop_assert!(p.displacement == 0.0);
    }

    #[test]
    fn displaced_squeezed_roundtrip(
        alpha in 0.1f64..5.0,
        theta in -3.0f64..3.0,
        r in 0.01f64..2.0,
        phi in -3.0f64..3.0,
    ) {
        let p = extract_params(&pure_state(alpha, theta, r, phi)).unwrap();
        prop_assert!((p.displacement - alpha).abs() < 1e-10);
        prop_assert!(angle_diff(p.phase, theta) < 1e-10);
        prop_assert!((p.squeeze_magnitude - r).abs() < 1e-10);
        prop_assert!(angle_diff(p.squeeze_angle, phi) < 1e-9);
        prop_assert!((p.purity - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reduced_matches_full(seed in 0u64..1_000, k in 1usize..=4, amp in 0.0f64..3.0, n_bar in 0.0f64..4.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map = common::near_symplectic(&mut rng, 8, 0.2, 1e-4);
        let single = pure_state(amp, 0.7, n_bar.sqrt().asinh(), -0.4);
        let reduced = apply_reduced(&map, k, &single).unwrap();
        let full = apply_full(&map, &single.embed(k, 8).unwrap()).unwrap().partial_trace(k).unwrap();
        let dx = (reduced.first_moments() - full.first_moments()).abs().max();
        let dc = (reduced.covariance() - full.covariance()).abs().max();
        prop_assert!(dx <= 1e-10 && dc <= 1e-10, "dx {} dc {}", dx, dc);
    }

    #[test]
    fn passive_maps_keep_coherent_states_pure(seed in 0u64..1_000, k in 1usize..=3, amp in 0.0f64..3.0, phase in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let passive = common::random_symplectic(&mut rng, 7, 0.5).passive_part();
        prop_assert_eq!(passive.beta_norm(), 0.0);
        let state = GaussianState::coherent(amp, phase).unwrap();
        let out = extract_params(&apply_reduced(&passive, k, &state).unwrap()).unwrap();
        prop_assert!((out.purity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_rotations_keep_squeezed_states_pure(t in 0.0f64..20.0, r in 0.0f64..2.0, k in 1usize..=3) {
        let basis = ModeBasis::minkowski(0.0, 1.0, 7).unwrap();
        let state = pure_state(0.5, 0.3, r, 0.8);
        let out = extract_params(&apply_reduced(&free_phase_map(&basis, t), k, &state).unwrap()).unwrap();
        prop_assert!((out.purity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symplectic_maps_respect_uncertainty(seed in 0u64..1_000, k in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map = common::random_symplectic(&mut rng, 8, 0.3);
        let state = pure_state(1.0, 0.3, 0.8, 1.0);
        let out = apply_reduced(&map, k, &state).unwrap();
        let det = out.covariance().determinant();
        prop_assert!(det >= 1.0 / 16.0 - 1e-12);
        let full = apply_full(&map, &state.embed(k, 8).unwrap()).unwrap();
        prop_assert!(full.uncertainty_margin() > -1e-10);
    }

    #[test]
    fn qfi_is_phase_independent(amp in 0.0f64..4.0, r in 0.0f64..1.5, phi in -3.0f64..3.0, t in 0.0f64..10.0) {
        let state = pure_state(amp, 0.1, r, phi);
        let basis = ModeBasis::minkowski(0.0, 1.0, 5).unwrap();
        let rotated = apply_reduced(&free_phase_map(&basis, t), 1, &state).unwrap();
        let before = phase_qfi(&extract_params(&state).unwrap());
        let after = phase_qfi(&extract_params(&rotated).unwrap());
        prop_assert!((before - after).abs() <= 1e-10 * before.max(1.0));
    }

    #[test]
    fn squeezed_beats_coherent(n_bar in 0.01f64..100.0) {
        let sq = phase_qfi(&extract_params(&GaussianState::squeezed_vacuum(n_bar, 0.0).unwrap()).unwrap());
        let co = phase_qfi(&extract_params(&GaussianState::coherent(n_bar.sqrt(), 0.0).unwrap()).unwrap());
        prop_assert!(sq >= co);
    }
}

#[test]
fn qfi_monotone_in_displacement_and_squeezing() {
    let params = |alpha: f64, r: f64, purity: f64| GaussianParams {
        displacement: alpha,
        phase: 0.0,
        squeeze_magnitude: r,
        squeeze_angle: 0.0,
        purity,
        clipped: false,
    };
    for purity in [0.3, 0.7, 1.0] {
        for i in 0..20 {
            let x = i as f64 * 0.2;
            assert!(phase_qfi(&params(x + 0.2, 0.5, purity)) > phase_qfi(&params(x, 0.5, purity)));
            assert!(phase_qfi(&params(1.0, x + 0.2, purity)) > phase_qfi(&params(1.0, x, purity)));
        }
    }
}

#[test]
fn vacuum_partial_trace_and_examples() {
    let v = GaussianState::vacuum(6);
    assert_eq!(v.partial_trace(4).unwrap(), GaussianState::vacuum(1));
    let p = extract_params(&GaussianState::squeezed_vacuum(1.0, 0.0).unwrap()).unwrap();
    assert!((p.squeeze_magnitude - 0.881_373_587_019_543).abs() < 1e-12);
    let cov = GaussianState::squeezed_vacuum(1.0, 0.0)
        .unwrap()
        .covariance()
        .clone();
    let r = 1f64.asinh();
    assert!((cov[(0, 0)] - (2.0 * r).exp() / 4.0).abs() < 1e-12);
    assert!((cov[(1, 1)] - (-2.0 * r).exp() / 4.0).abs() < 1e-12);
    assert!(cov[(0, 1)].abs() < 1e-15);
}

#[test]
fn free_evolution_phases_add() {
    let basis = ModeBasis::minkowski(0.0, 1.0, 6).unwrap();
    let state = GaussianState::coherent(1.5, 0.2).unwrap();
    let (t1, t2) = (0.37, 1.91);
    let step = |s: &GaussianState, t: f64| apply_reduced(&free_phase_map(&basis, t), 2, s).unwrap();
    let two_steps = extract_params(&step(&step(&state, t1), t2)).unwrap();
    let one_step = extract_params(&step(&state, t1 + t2)).unwrap();
    assert!(angle_diff(two_steps.phase, one_step.phase) < 1e-12);
    let expected = wrap_angle(0.2 + 2.0 * PI * (t1 + t2));
    assert!(angle_diff(one_step.phase, expected) < 1e-12);
}
