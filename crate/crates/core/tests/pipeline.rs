//! Cross-module checks: the same physics reached through different routes.

use std::f64::consts::PI;

use nalgebra::Vector3;
use relframes::frenet::{curvatures_from_field, reconstruct_field, ConstantFieldWorldline};
use relframes::lorentz::rest_frame;
use relframes::minkowski::{FieldTensor, FourVector, Tetrad};
use relframes::numerics::IntegratorConfig;
use relframes::observer::{holonomy_defect, validate_axioms, ObserverManifold};
use relframes::spin::{bmt_co_integrate, bmt_integrate, em_split, fw_transport, ChargeParams, SpinState};
use relframes::worldline::uniform_grid;

fn lab_field(e: [f64; 3], b: [f64; 3]) -> FieldTensor {
    let lab = Tetrad::canonical();
    reconstruct_field(&lab.e(0), &Vector3::from(e), &Vector3::from(b), &lab).unwrap()
}

#[test]
fn analytic_and_co_integrated_bmt_agree() {
    let f = lab_field([0.2, 0.0, 0.1], [0.0, 0.3, 1.0]);
    let cp = ChargeParams::new(-1.0, 2.3).unwrap();
    let u0 = FourVector::from_three_velocity(Vector3::new(0.1, 0.5, 0.0)).unwrap();
    let s0 = rest_frame(&u0).unwrap().e(3);
    let state = SpinState::new(u0, s0).unwrap();
    let grid = uniform_grid(0.0, 6.0, 60);
    let cfg = IntegratorConfig::with_step(1e-3);
    let wl = ConstantFieldWorldline::new(&f, FourVector::zero(), u0, -cp.e_over_m).unwrap();
    let along = bmt_integrate(&state, &f, &cp, &wl, &grid, &cfg).unwrap();
    let co = bmt_co_integrate(&state, &f, &cp, &grid, &cfg).unwrap();
    for i in 0..grid.len() {
        let scale = 1.0 + along.u[i].max_abs();
        assert!((along.u[i] - co.u[i]).max_abs() < 1e-9 * scale, "u at {i}");
        assert!((along.spin[i] - co.spin[i]).max_abs() < 1e-9 * scale, "spin at {i}");
    }
}

#[test]
fn transverse_spin_in_longitudinal_electric_field_is_fermi_walker_transported() {
    // A spin transverse to a longitudinal electric field feels no torque,
    // so the BMT spin is just Fermi-Walker transported.
    let f = lab_field([0.4, 0.0, 0.0], [0.0, 0.0, 0.0]);
    let cp = ChargeParams::new(-1.0, 2.0).unwrap();
    let u0 = FourVector::from_three_velocity(Vector3::new(0.3, 0.0, 0.0)).unwrap();
    let s0 = rest_frame(&u0).unwrap().e(2);
    let grid = uniform_grid(0.0, 3.0, 30);
    let cfg = IntegratorConfig::with_step(1e-3);
    let wl = ConstantFieldWorldline::new(&f, FourVector::zero(), u0, -cp.e_over_m).unwrap();
    let run = bmt_integrate(&SpinState::new(u0, s0).unwrap(), &f, &cp, &wl, &grid, &cfg).unwrap();
    let fw = fw_transport(&wl, &grid, &s0, &cfg).unwrap();
    for (a, b) in run.spin.iter().zip(&fw) {
        assert!((*a - *b).max_abs() < 1e-10);
    }
}

#[test]
fn rest_frame_fields_match_constant_field_curvatures() {
    let f = lab_field([0.3, -0.1, 0.2], [0.5, 0.2, -0.7]);
    let u0 = FourVector::from_three_velocity(Vector3::new(0.2, 0.1, -0.4)).unwrap();
    let (k, frame) = curvatures_from_field(&f, &u0, 1.0).unwrap();
    let (e, _) = em_split(&f, &rest_frame(&u0).unwrap());
    assert!((k.a - e.norm()).abs() < 1e-12);
    assert!((k.a - f.apply(&frame.u).norm_sq().sqrt()).abs() < 1e-12);
}

#[test]
fn cyclotron_observer_charts_close_after_one_turn() {
    let b0 = 1.5;
    let f = lab_field([0.0; 3], [0.0, 0.0, b0]);
    let u0 = FourVector::from_three_velocity(Vector3::new(0.6, 0.0, 0.0)).unwrap();
    let wl = ConstantFieldWorldline::new(&f, FourVector::zero(), u0, 1.0).unwrap();
    let period = 2.0 * PI / b0;
    let grid = uniform_grid(0.0, period, 96);
    let m = ObserverManifold::frenet(&wl, &grid, &FourVector::basis(0)).unwrap();
    assert!(validate_axioms(&m, &wl).passed());
    let first = m.charts().first().unwrap();
    let last = m.charts().last().unwrap();
    assert!((first.velocity() - last.velocity()).max_abs() < 1e-10);
    assert!((last.event.spatial() - first.event.spatial()).norm() < 1e-10);
    assert!((last.event.time() - 1.25 * period).abs() < 1e-10);
    let h = holonomy_defect(&m, 0, 32, 64).unwrap();
    assert!(h.angle > 1e-3);
    let axis = h.axis.unwrap();
    assert!(axis.x.abs() < 1e-9 && axis.y.abs() < 1e-9);
}
