//! End-to-end invariant suite. Each criterion gathers named measurements
//! against pinned bounds; a criterion passes when all of its checks do.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use nalgebra::{Matrix4, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::frenet::{
    curvatures_from_field_strict, f_frame, field_on_frenet_constant, frenet_rhs, magnetic_vector, propagate_exact,
    reconstruct_field, spectral_split, ConstantFieldWorldline, CurvatureTriple, FrenetFrame,
};
use crate::lorentz::{boost, boost_space_axes, cycle2_exact_axes, cycle2_product, cycle_from_velocities, rest_frame};
use crate::minkowski::{dot, FieldTensor, FourVector, Tetrad};
use crate::numerics::{central_diff, frame_to_state, integrate, second_diff, state_to_frame, IntegratorConfig};
use crate::observer::{
    holonomy_defect, orbit_grid, transfer_between, transfer_rotation_residual, ObserverManifold,
    DEFAULT_CHARTS_PER_PERIOD,
};
use crate::rotation::{
    galilean_deviation, rrt_generators, rrt_lie_brackets, rrt_map, rrt_preserves_interval, rrt_tetrad_at, PlaneEvent,
    RotationParams, VectorField,
};
use crate::sampling;
use crate::spin::{bmt_integrate, bmt_rhs, fw_spin_contribution, larmor_rhs, thomas_orbit, ChargeParams, SpinState};
use crate::worldline::{uniform_grid, CircularOrbit, Worldline};

/// Acceptance bound for a measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Between(f64, f64),
}

impl Bound {
    pub fn admits(&self, value: f64) -> bool {
        match *self {
            Bound::AtMost(hi) => value <= hi,
            Bound::AtLeast(lo) => value >= lo,
            Bound::Between(lo, hi) => (lo..=hi).contains(&value),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost(hi) => write!(f, "<= {hi:e}"),
            Bound::AtLeast(lo) => write!(f, ">= {lo:e}"),
            Bound::Between(lo, hi) => write!(f, "in [{lo}, {hi}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub label: &'static str,
    pub value: f64,
    pub bound: Bound,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.bound.admits(self.value)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub checks: Vec<Check>,
    /// Set when the criterion could not be evaluated at all.
    pub error: Option<String>,
    pub seconds: f64,
}

impl CriterionOutcome {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(Check::passed)
    }

    /// One-line summary, `PASS`/`FAIL` first.
    pub fn summary(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let worst = match &self.error {
            Some(e) => format!("error: {e}"),
            None => self
                .checks
                .iter()
                .map(|c| format!("{}={:.3e} ({})", c.label, c.value, c.bound))
                .collect::<Vec<_>>()
                .join("; "),
        };
        format!(
            "{status} [{:>2}] {} ({:.2}s): {worst}",
            self.id, self.name, self.seconds
        )
    }
}

struct Recorder {
    checks: Vec<Check>,
}

impl Recorder {
    fn new() -> Self {
        Recorder { checks: Vec::new() }
    }

    fn record(&mut self, label: &'static str, value: f64, bound: Bound) {
        self.checks.push(Check { label, value, bound });
    }
}

fn run_criterion(id: u32, name: &'static str, body: impl FnOnce(&mut Recorder) -> Result<()>) -> CriterionOutcome {
    let start = Instant::now();
    let mut rec = Recorder::new();
    let error = body(&mut rec).err().map(|e| e.to_string());
    CriterionOutcome {
        id,
        name,
        checks: rec.checks,
        error,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Pair of four-velocities whose relative Lorentz factor is at most `max_gamma`.
fn bounded_pair(rng: &mut ChaCha8Rng, max_gamma: f64) -> (FourVector, FourVector) {
    loop {
        let u = sampling::velocity(rng, 0.995);
        let v = sampling::velocity(rng, 0.995);
        if -dot(&u, &v) <= max_gamma && u.time() <= max_gamma && v.time() <= max_gamma {
            return (u, v);
        }
    }
}

pub fn boost_suite() -> CriterionOutcome {
    run_criterion(1, "boost suite", |rec| {
        let start = Instant::now();
        let mut rng = rng(101);
        let (mut lorentz, mut maps, mut inverse) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..1000 {
            let (u, v) = bounded_pair(&mut rng, 10.0);
            let b = boost(&u, &v)?;
            lorentz = lorentz.max(b.matrix().residual());
            maps = maps.max((b.apply(&u) - v).max_abs());
            let back = boost(&v, &u)?;
            inverse = inverse.max((back.matrix().0 * b.matrix().0 - Matrix4::identity()).amax());
        }
        rec.record("lorentz_residual", lorentz, Bound::AtMost(1e-11));
        rec.record("maps_u_to_v", maps, Bound::AtMost(1e-12));
        rec.record("pairwise_inverse", inverse, Bound::AtMost(1e-11));
        rec.record("runtime_s", start.elapsed().as_secs_f64(), Bound::AtMost(1.0));
        Ok(())
    })
}

pub fn reciprocity() -> CriterionOutcome {
    run_criterion(2, "reciprocity", |rec| {
        let mut rng = rng(202);
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let u = sampling::velocity(&mut rng, 0.9);
            let v = sampling::velocity(&mut rng, 0.9);
            let frame = sampling::frame_at(&mut rng, &u);
            let image = boost_space_axes(&frame, &boost(&u, &v)?)?;
            for l in 1..4 {
                worst = worst.max((dot(&image.e(l), &frame.e(0)) + dot(&image.e(0), &frame.e(l))).abs());
            }
        }
        rec.record("reciprocity_residual", worst, Bound::AtMost(1e-12));
        Ok(())
    })
}

pub fn cycle_oracle() -> CriterionOutcome {
    run_criterion(3, "cycle oracle", |rec| {
        let mut rng = rng(303);
        let (mut closed, mut fixed) = (0.0f64, 0.0f64);
        for _ in 0..500 {
            let u = sampling::velocity(&mut rng, 0.8);
            let v = sampling::velocity(&mut rng, 0.8);
            let w = sampling::velocity(&mut rng, 0.8);
            let t = rest_frame(&u)?;
            let g = cycle2_exact_axes(&u, &v, &w, &t)?;
            let brute = t.transformed(&cycle2_product(&u, &v, &w)?)?;
            closed = closed.max((g.components() - brute.components()).amax());
            fixed = fixed.max((g.e(0) - t.e(0)).max_abs());
        }
        rec.record("closed_form_vs_product", closed, Bound::AtMost(1e-9));
        rec.record("fixed_time_leg", fixed, Bound::AtMost(1e-12));

        let v = Vector3::new(1.0, 0.0, 0.0);
        let w = Vector3::new(0.3, 0.8, 0.0);
        let limit = 0.5 * v.cross(&w).norm();
        let mut dev = Vec::new();
        for b in [1e-2, 1e-3, 1e-4] {
            let r = cycle_from_velocities(&[v * b, w * b])?;
            dev.push((r.rotation_angle / (b * b) - limit).abs());
        }
        rec.record("limit_relative_error_1e-4", dev[2] / limit, Bound::AtMost(1e-6));
        rec.record("decade_ratio_1e-2_1e-3", dev[0] / dev[1], Bound::Between(95.0, 105.0));
        rec.record("decade_ratio_1e-3_1e-4", dev[1] / dev[2], Bound::Between(95.0, 105.0));
        Ok(())
    })
}

pub fn thomas_orbit_angle() -> CriterionOutcome {
    run_criterion(4, "Thomas orbit", |rec| {
        let start = Instant::now();
        let fast = thomas_orbit(0.6, 1.0, 4096)?;
        rec.record(
            "closed_form_minus_half_pi",
            (fast.closed_form - PI / 2.0).abs(),
            Bound::AtMost(1e-15),
        );
        rec.record(
            "relative_error",
            ((fast.angle - fast.closed_form) / fast.closed_form).abs(),
            Bound::AtMost(1e-6),
        );
        let slow = thomas_orbit(0.01, 1.0, 1024)?;
        let small = PI * 0.01f64.powi(2);
        rec.record(
            "small_speed_relative_error",
            ((slow.angle - small) / small).abs(),
            Bound::AtMost(1e-3),
        );
        rec.record("runtime_s", start.elapsed().as_secs_f64(), Bound::AtMost(5.0));
        Ok(())
    })
}

pub fn bmt_conservation() -> CriterionOutcome {
    run_criterion(5, "BMT conservation", |rec| {
        let cp = ChargeParams::new(-1.0, 2.002)?;
        let b0 = 1.0;
        let f = FieldTensor::from_fields(&Vector3::zeros(), &Vector3::new(0.0, 0.0, b0));
        let u0 = FourVector::from_three_velocity(Vector3::new(0.6, 0.0, 0.0))?;
        let s0 = FourVector::new(0.75, 1.25, 0.0, 0.0) * 0.6 + FourVector::new(0.0, 0.0, 0.0, 0.8);
        let state = SpinState::new(u0, s0)?;
        let wl = ConstantFieldWorldline::new(&f, FourVector::zero(), u0, -cp.e_over_m)?;
        let period = 2.0 * PI / (cp.e_over_m.abs() * b0);
        let grid = uniform_grid(0.0, 10.0 * period, 640);
        let run = bmt_integrate(&state, &f, &cp, &wl, &grid, &IntegratorConfig::with_step(1e-3))?;
        rec.record("orthogonality_drift", run.max_orthogonality_drift, Bound::AtMost(1e-9));
        rec.record("norm_drift", run.max_norm_drift, Bound::AtMost(1e-9));

        let mut rng = rng(505);
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let u = sampling::velocity(&mut rng, 0.8);
            let s = sampling::orthogonal_unit(&mut rng, &u);
            let st = SpinState::new(u, s)?;
            let f = sampling::field(&mut rng, 1.0);
            let cp = ChargeParams::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.0..4.0))?;
            let split = larmor_rhs(&st, &f, &cp) + fw_spin_contribution(&st, &f, &cp);
            worst = worst.max((bmt_rhs(&st, &f, &cp) - split).max_abs());
        }
        rec.record("larmor_plus_fw_identity", worst, Bound::AtMost(1e-13));
        Ok(())
    })
}

pub fn spectral_identities() -> CriterionOutcome {
    run_criterion(6, "spectral identities", |rec| {
        let n = 30;
        let axis = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let k = CurvatureTriple::new(axis(0.1, 5.0, i), axis(0.1, 5.0, j), axis(-5.0, 5.0, l))?;
                    if let Ok(s) = spectral_split(&k) {
                        worst = worst.max(s.identity_residual(&k));
                    }
                }
            }
        }
        rec.record("grid_identity_residual", worst, Bound::AtMost(1e-12));
        let s = spectral_split(&CurvatureTriple::new(5.0, 0.0, 3.0)?)?;
        let first = (s.chi - 5.0)
            .abs()
            .max((s.omega - 3.0).abs())
            .max((s.gamma - 1.0).abs())
            .max(s.lambda.abs());
        rec.record("worked_5_0_3", first, Bound::AtMost(1e-14));
        let s = spectral_split(&CurvatureTriple::new(2.0, 1.0, 0.0)?)?;
        let second = (s.chi - 3f64.sqrt())
            .abs()
            .max(s.omega.abs())
            .max((s.gamma - 2.0 / 3f64.sqrt()).abs())
            .max((s.lambda - 1.0 / 3f64.sqrt()).abs());
        rec.record("worked_2_1_0", second, Bound::AtMost(1e-14));
        Ok(())
    })
}

fn random_frenet_frame(rng: &mut ChaCha8Rng) -> Result<FrenetFrame> {
    let t = sampling::tetrad(rng, 0.8);
    FrenetFrame::new(t.e(0), t.e(1), t.e(2), -t.e(3))
}

fn rk4_frenet(frame: &FrenetFrame, k: &CurvatureTriple, s: f64) -> Result<FrenetFrame> {
    let rhs = |_: f64, y: &nalgebra::SVector<f64, 16>| {
        let v = state_to_frame(y);
        frame_to_state(&frenet_rhs(
            &FrenetFrame {
                u: v[0],
                n: v[1],
                b: v[2],
                c: v[3],
            },
            k,
        ))
    };
    let traj = integrate(
        rhs,
        frame_to_state(&frame.vectors()),
        0.0,
        s,
        &IntegratorConfig::with_step(1e-4),
    )?;
    let v = state_to_frame(&traj.last().1);
    Ok(FrenetFrame {
        u: v[0],
        n: v[1],
        b: v[2],
        c: v[3],
    })
}

pub fn decoupled_frame() -> CriterionOutcome {
    run_criterion(7, "decoupled frame", |rec| {
        let mut rng = rng(707);
        let (mut ortho, mut first, mut second, mut oracle) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for k in [
            CurvatureTriple::new(5.0, 0.0, 3.0)?,
            CurvatureTriple::new(1.5, 0.8, 0.6)?,
            CurvatureTriple::new(1.1, 0.7, -0.4)?,
            CurvatureTriple::new(2.0, 2.5, 1.2)?,
        ] {
            let frame = random_frenet_frame(&mut rng)?;
            let split = spectral_split(&k)?;
            let f = f_frame(&frame, &split, &k)?;
            ortho = ortho.max(Tetrad::new(f)?.orthonormality_residual());
            let fk = |s: f64, i: usize| {
                let later = propagate_exact(&frame, &k, s).expect("nondegenerate");
                f_frame(&later, &split, &k).expect("nonzero curvature")[i]
            };
            let d0 = central_diff(|s| fk(s, 0), 0.0, 1e-6);
            let d1 = central_diff(|s| fk(s, 1), 0.0, 1e-6);
            let scale1 = 1.0 + split.chi.max(split.omega);
            first = first.max((d0 - split.chi * f[2]).max_abs() / scale1);
            first = first.max((d1 - split.epsilon * split.omega * f[3]).max_abs() / scale1);
            let rates = [
                split.chi.powi(2),
                -split.omega.powi(2),
                split.chi.powi(2),
                -split.omega.powi(2),
            ];
            let scale2 = 1.0 + split.chi.powi(2).max(split.omega.powi(2));
            for (i, rate) in rates.iter().enumerate() {
                let dd = second_diff(|s| fk(s, i), 0.3, 1e-4);
                second = second.max((dd - *rate * fk(0.3, i)).max_abs() / scale2);
            }
            let exact = propagate_exact(&frame, &k, 0.2)?;
            let numeric = rk4_frenet(&frame, &k, 0.2)?;
            for (x, y) in exact.vectors().iter().zip(numeric.vectors().iter()) {
                oracle = oracle.max((*x - *y).max_abs());
            }
        }
        rec.record("f_frame_orthonormality", ortho, Bound::AtMost(1e-12));
        rec.record("first_derivative_relations", first, Bound::AtMost(1e-7));
        rec.record("second_derivative_relations", second, Bound::AtMost(1e-7));
        rec.record("closed_form_vs_rk4", oracle, Bound::AtMost(1e-8));
        Ok(())
    })
}

pub fn field_round_trip() -> CriterionOutcome {
    run_criterion(8, "field round trip", |rec| {
        let mut rng = rng(808);
        let (mut trip, mut triad, mut b2) = (0.0f64, 0.0f64, 0.0f64);
        let mut tested = 0;
        while tested < 200 {
            let f = sampling::field(&mut rng, 1.0);
            let u0 = sampling::velocity(&mut rng, 0.7);
            let kq = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let (k, frame) = curvatures_from_field_strict(&f, &u0, kq)?;
            if k.a * k.tau < 1e-3 {
                continue;
            }
            tested += 1;
            let (e, b) = field_on_frenet_constant(&k, kq)?;
            b2 = b2.max(b[1].abs());
            let on_triad = |v: &FourVector| Vector3::new(dot(v, &frame.n), dot(v, &frame.b), dot(v, &frame.c));
            triad = triad.max((on_triad(&f.apply(&frame.u)) - e).amax());
            triad = triad.max((on_triad(&magnetic_vector(&f, &frame.u)) - b).amax());
            let back = reconstruct_field(&frame.u, &e, &b, &frame.tetrad()?)?;
            trip = trip.max(back.distance(&f));
        }
        rec.record("b2_component", b2, Bound::AtMost(0.0));
        rec.record("components_on_frenet_triad", triad, Bound::AtMost(1e-8));
        rec.record("reconstructed_field", trip, Bound::AtMost(1e-8));
        Ok(())
    })
}

pub fn rotating_frames() -> CriterionOutcome {
    run_criterion(9, "rotating frames", |rec| {
        let mut rng = rng(909);
        let (mut interval, mut additivity) = (0.0f64, 0.0f64);
        for _ in 0..1000 {
            let (w, r) = (rng.gen_range(-1.5..1.5), rng.gen_range(0.1..5.0));
            let p = RotationParams::new(w / r, 1.0, r, 0.0)?;
            let pick = |rng: &mut ChaCha8Rng| PlaneEvent::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let (a, b) = (pick(&mut rng), pick(&mut rng));
            let (before, after) = rrt_preserves_interval(a, b, &p);
            let scale = (1.0 + (a.x0 - b.x0).powi(2) + (r * (a.theta - b.theta)).powi(2)) * (2.0 * w).abs().exp();
            interval = interval.max((before - after).abs() / scale);

            let (w1, w2) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let p1 = RotationParams::new(w1, 1.0, r, 0.0)?;
            let p2 = RotationParams::new(w2, 1.0, r, 0.0)?;
            let p12 = RotationParams::new(w1 + w2, 1.0, r, 0.0)?;
            let two = rrt_map(rrt_map(a, &p1), &p2);
            let one = rrt_map(a, &p12);
            let scale = (1.0 + a.x0.abs() + (a.theta * r).abs()) * (w1 * r).cosh() * (w2 * r).cosh();
            additivity = additivity.max((two.x0 - one.x0).abs().max((two.theta - one.theta).abs() * r) / scale);
        }
        rec.record("interval_invariance", interval, Bound::AtMost(1e-13));
        rec.record("omega_additivity", additivity, Bound::AtMost(1e-12));

        let mut ortho = 0.0f64;
        for i in 0..20 {
            for j in 0..20 {
                let r = 0.1 + 9.9 * i as f64 / 19.0;
                let alpha = -3.0 + 6.0 * j as f64 / 19.0;
                ortho = ortho.max(rrt_tetrad_at(r, alpha)?.orthonormality_residual());
            }
        }
        rec.record("tetrad_orthonormality", ortho, Bound::AtMost(1e-12));

        let err = |c: f64| -> Result<f64> { Ok(galilean_deviation(0.3, 2.0, &RotationParams::new(0.8, c, 1.5, 0.0)?)) };
        rec.record(
            "galilean_halving_ratio",
            err(1e3)? / err(2e3)?,
            Bound::Between(3.95, 4.05),
        );
        rec.record(
            "galilean_decade_ratio",
            err(1e2)? / err(1e3)?,
            Bound::Between(99.0, 101.0),
        );

        let mut mismatches = 0.0;
        for alpha in [0.0, 0.4, -1.3, 2.0] {
            let [x1, x2, x3] = rrt_generators(alpha);
            mismatches += f64::from(u8::from(x1.bracket(&x2) != x3.scaled(-1.0)));
            mismatches += f64::from(u8::from(x2.bracket(&x3) != VectorField::default()));
            mismatches += f64::from(u8::from(x3.bracket(&x1) != x2));
        }
        rec.record("bracket_mismatches", mismatches, Bound::AtMost(0.0));
        let k = rrt_lie_brackets(0.4)?;
        let dev = (k.c[0][1] - Vector3::new(0.0, 0.0, -1.0))
            .amax()
            .max(k.c[1][2].amax())
            .max((k.c[2][0] - Vector3::new(0.0, 1.0, 0.0)).amax());
        rec.record("structure_constants", dev, Bound::AtMost(1e-14));
        Ok(())
    })
}

pub fn observer_manifold() -> CriterionOutcome {
    run_criterion(10, "observer manifold", |rec| {
        let orbit = CircularOrbit::new(1.0, 0.6)?;
        let grid = orbit_grid(&orbit, 1.0, DEFAULT_CHARTS_PER_PERIOD);
        let m = ObserverManifold::fermi_walker(
            &orbit,
            &grid,
            &FourVector::basis(0),
            None,
            &IntegratorConfig::with_step(1e-3),
        )?;
        let charts = m.charts();
        let mut mapping = 0.0f64;
        for (i, c1) in charts.iter().enumerate().step_by(8) {
            for c2 in charts.iter().skip(i).step_by(5) {
                let l = transfer_between(c1, c2)?;
                mapping = mapping.max((l.0 * c1.tetrad.components() - c2.tetrad.components()).amax());
            }
        }
        rec.record("transfer_maps_frames", mapping, Bound::AtMost(1e-11));
        let mut rotation = 0.0f64;
        let mut conformal = 0.0f64;
        for c in charts {
            rotation = rotation.max(transfer_rotation_residual(c)?);
            conformal = conformal.max((c.conformal_factor - 1.0).abs());
        }
        rec.record("transfer_rotation_part", rotation, Bound::AtMost(1e-11));
        let third = DEFAULT_CHARTS_PER_PERIOD / 3;
        let mut smallest = f64::INFINITY;
        for start in (0..third).step_by(7) {
            smallest = smallest.min(holonomy_defect(&m, start, start + third, start + 2 * third)?.angle);
        }
        rec.record("min_holonomy_angle", smallest, Bound::AtLeast(1e-3));
        rec.record("conformal_factor_deviation", conformal, Bound::AtMost(0.0));
        let report = crate::observer::validate_axioms(&m, &orbit as &dyn Worldline);
        rec.record("axiom_failures", report.failures.len() as f64, Bound::AtMost(0.0));
        Ok(())
    })
}

/// Criterion runners in order.
pub const CRITERIA: [fn() -> CriterionOutcome; 10] = [
    boost_suite,
    reciprocity,
    cycle_oracle,
    thomas_orbit_angle,
    bmt_conservation,
    spectral_identities,
    decoupled_frame,
    field_round_trip,
    rotating_frames,
    observer_manifold,
];

pub fn run_all() -> Vec<CriterionOutcome> {
    CRITERIA.iter().map(|c| c()).collect()
}
