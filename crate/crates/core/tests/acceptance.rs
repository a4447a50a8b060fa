//! Acceptance criteria 1-10, one line per criterion. Every bound is pinned here
//! so a loosened tolerance in the library fails this target.

use relframes::selftest::{self, Bound, CriterionOutcome};

const PINNED: &[(u32, &str, Bound)] = &[
    (1, "lorentz_residual", Bound::AtMost(1e-11)),
    (1, "maps_u_to_v", Bound::AtMost(1e-12)),
    (1, "pairwise_inverse", Bound::AtMost(1e-11)),
    (1, "runtime_s", Bound::AtMost(1.0)),
    (2, "reciprocity_residual", Bound::AtMost(1e-12)),
    (3, "closed_form_vs_product", Bound::AtMost(1e-9)),
    (3, "fixed_time_leg", Bound::AtMost(1e-12)),
    (3, "limit_relative_error_1e-4", Bound::AtMost(1e-6)),
    (3, "decade_ratio_1e-2_1e-3", Bound::Between(95.0, 105.0)),
    (3, "decade_ratio_1e-3_1e-4", Bound::Between(95.0, 105.0)),
    (4, "closed_form_minus_half_pi", Bound::AtMost(1e-15)),
    (4, "relative_error", Bound::AtMost(1e-6)),
    (4, "small_speed_relative_error", Bound::AtMost(1e-3)),
    (4, "runtime_s", Bound::AtMost(5.0)),
    (5, "orthogonality_drift", Bound::AtMost(1e-9)),
    (5, "norm_drift", Bound::AtMost(1e-9)),
    (5, "larmor_plus_fw_identity", Bound::AtMost(1e-13)),
    (6, "grid_identity_residual", Bound::AtMost(1e-12)),
    (6, "worked_5_0_3", Bound::AtMost(1e-14)),
    (6, "worked_2_1_0", Bound::AtMost(1e-14)),
    (7, "f_frame_orthonormality", Bound::AtMost(1e-12)),
    (7, "first_derivative_relations", Bound::AtMost(1e-7)),
    (7, "second_derivative_relations", Bound::AtMost(1e-7)),
    (7, "closed_form_vs_rk4", Bound::AtMost(1e-8)),
    (8, "b2_component", Bound::AtMost(0.0)),
    (8, "components_on_frenet_triad", Bound::AtMost(1e-8)),
    (8, "reconstructed_field", Bound::AtMost(1e-8)),
    (9, "interval_invariance", Bound::AtMost(1e-13)),
    (9, "omega_additivity", Bound::AtMost(1e-12)),
    (9, "tetrad_orthonormality", Bound::AtMost(1e-12)),
    (9, "galilean_halving_ratio", Bound::Between(3.95, 4.05)),
    (9, "galilean_decade_ratio", Bound::Between(99.0, 101.0)),
    (9, "bracket_mismatches", Bound::AtMost(0.0)),
    (9, "structure_constants", Bound::AtMost(1e-14)),
    (10, "transfer_maps_frames", Bound::AtMost(1e-11)),
    (10, "transfer_rotation_part", Bound::AtMost(1e-11)),
    (10, "min_holonomy_angle", Bound::AtLeast(1e-3)),
    (10, "conformal_factor_deviation", Bound::AtMost(0.0)),
    (10, "axiom_failures", Bound::AtMost(0.0)),
];

fn verify(outcome: &CriterionOutcome) {
    println!("{}", outcome.summary());
    let pinned: Vec<_> = PINNED.iter().filter(|(id, _, _)| *id == outcome.id).collect();
    assert_eq!(
        pinned.len(),
        outcome.checks.len(),
        "criterion {} check count",
        outcome.id
    );
    for (_, label, bound) in pinned {
        let check = outcome
            .checks
            .iter()
            .find(|c| c.label == *label)
            .unwrap_or_else(|| panic!("criterion {} lacks check {label}", outcome.id));
        assert_eq!(
            check.bound, *bound,
            "criterion {} check {label} bound changed",
            outcome.id
        );
    }
    assert!(outcome.passed(), "{}", outcome.summary());
}

#[test]
fn criterion_01_boost_suite() {
    verify(&selftest::boost_suite());
}

#[test]
fn criterion_02_reciprocity() {
    verify(&selftest::reciprocity());
}

#[test]
fn criterion_03_cycle_oracle() {
    verify(&selftest::cycle_oracle());
}

#[test]
fn criterion_04_thomas_orbit() {
    verify(&selftest::thomas_orbit_angle());
}

#[test]
fn criterion_05_bmt_conservation() {
    verify(&selftest::bmt_conservation());
}

#[test]
fn criterion_06_spectral_identities() {
    verify(&selftest::spectral_identities());
}

#[test]
fn criterion_07_decoupled_frame() {
    verify(&selftest::decoupled_frame());
}

#[test]
fn criterion_08_field_round_trip() {
    verify(&selftest::field_round_trip());
}

#[test]
fn criterion_09_rotating_frames() {
    verify(&selftest::rotating_frames());
}

#[test]
fn criterion_10_observer_manifold() {
    verify(&selftest::observer_manifold());
}
