//! Scenario runners: each produces a sample table and an invariant report.

use nalgebra::{Matrix4, Vector3, Vector4};
use relframes::frenet::{spectral_split, ConstantFieldWorldline};
use relframes::lorentz::{boost, boost_space_axes, cycle, rest_frame};
use relframes::minkowski::{dot, FieldTensor, FourVector, LorentzMatrix};
use relframes::numerics::{central_diff, IntegratorConfig};
use relframes::observer::{
    holonomy_defect, orbit_grid, transfer_between, transfer_rotation_residual, validate_axioms, ObserverManifold,
};
use relframes::rotation::{
    galilean_deviation, plane_interval, rim_speed, rrt_map, rrt_tetrad, PlaneEvent, RotationParams,
};
use relframes::spin::{bmt_co_integrate, thomas_orbit, ChargeParams, SpinState};
use relframes::worldline::{uniform_grid, CircularOrbit, Worldline};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::Table;
use crate::scenario::{
    BmtScenario, BoostScenario, CycleScenario, FrameChoice, FrenetScenario, ObserverScenario, Overrides, RrtScenario,
    Scenario, ScenarioKind, ThomasScenario,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    AtMost(f64),
    AtLeast(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub value: f64,
    pub limit: Limit,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub kind: &'static str,
    pub passed: bool,
    pub checks: Vec<InvariantCheck>,
    pub data: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Artifacts {
    pub table: Table,
    pub report: Report,
}

/// Collects checks; `residual` bounds honour the scenario's tolerance override,
/// `exact` bounds do not.
struct Checks<'a> {
    scenario: &'a Scenario,
    list: Vec<InvariantCheck>,
}

impl<'a> Checks<'a> {
    fn new(scenario: &'a Scenario) -> Self {
        Checks {
            scenario,
            list: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, value: f64, limit: Limit) {
        let passed = match limit {
            Limit::AtMost(hi) => value <= hi,
            Limit::AtLeast(lo) => value >= lo,
        };
        self.list.push(InvariantCheck {
            name: name.to_string(),
            value,
            limit,
            passed,
        });
    }

    fn residual(&mut self, name: &str, value: f64, default: f64) {
        let tol = self.scenario.tolerance(default);
        self.push(name, value, Limit::AtMost(tol));
    }

    fn exact(&mut self, name: &str, value: f64, limit: Limit) {
        self.push(name, value, limit);
    }

    fn finish(self, data: Value) -> Report {
        Report {
            scenario: self.scenario.path.display().to_string(),
            kind: self.scenario.body.kind(),
            passed: self.list.iter().all(|c| c.passed),
            checks: self.list,
            data,
        }
    }
}

fn runtime(context: &str) -> impl Fn(relframes::Error) -> CliError + '_ {
    move |source| CliError::Runtime {
        context: context.to_string(),
        source,
    }
}

fn components(x: &FourVector) -> [f64; 4] {
    [x.0[0], x.0[1], x.0[2], x.0[3]]
}

fn four_columns(prefix: &str) -> Vec<String> {
    (0..4).map(|i| format!("{prefix}{i}")).collect()
}

fn matrix_table(m: &Matrix4<f64>) -> Table {
    let mut header = vec!["row".to_string()];
    header.extend(four_columns("col"));
    let rows = (0..4)
        .map(|r| {
            let mut row = vec![r as f64];
            row.extend(m.row(r).iter().copied());
            row
        })
        .collect();
    Table::new(header, rows)
}

fn matrix_rows(m: &Matrix4<f64>) -> Vec<[f64; 4]> {
    (0..4).map(|r| [m[(r, 0)], m[(r, 1)], m[(r, 2)], m[(r, 3)]]).collect()
}

pub fn run(scenario: &Scenario, overrides: &Overrides) -> Result<Artifacts, CliError> {
    let cfg = scenario.integrator(overrides);
    match &scenario.body {
        ScenarioKind::Boost(s) => run_boost(scenario, s),
        ScenarioKind::Cycle(s) => run_cycle(scenario, s),
        ScenarioKind::Rrt(s) => run_rrt(scenario, s),
        ScenarioKind::Thomas(s) => run_thomas(scenario, s),
        ScenarioKind::Bmt(s) => run_bmt(scenario, s, &cfg),
        ScenarioKind::Frenet(s) => run_frenet(scenario, s),
        ScenarioKind::Observer(s) => run_observer(scenario, s, &cfg),
    }
}

fn run_boost(sc: &Scenario, body: &BoostScenario) -> Result<Artifacts, CliError> {
    let err = runtime("boost");
    let u = body.from.four_velocity().map_err(&err)?;
    let v = body.to.four_velocity().map_err(&err)?;
    let b = boost(&u, &v).map_err(&err)?;
    let back = boost(&v, &u).map_err(&err)?;
    let frame = rest_frame(&u).map_err(&err)?;
    let image = boost_space_axes(&frame, &b).map_err(&err)?;
    let reciprocity = (1..4)
        .map(|l| (dot(&image.e(l), &frame.e(0)) + dot(&image.e(0), &frame.e(l))).abs())
        .fold(0.0, f64::max);

    let mut checks = Checks::new(sc);
    checks.residual("lorentz_residual", b.matrix().residual(), 1e-11);
    checks.residual("maps_source_to_target", (b.apply(&u) - v).max_abs(), 1e-12);
    checks.residual(
        "pairwise_inverse",
        (back.matrix().0 * b.matrix().0 - Matrix4::identity()).amax(),
        1e-11,
    );
    checks.residual("reciprocity", reciprocity, 1e-12);
    let data = json!({
        "gamma": b.gamma(),
        "relative_speed": (1.0 - b.gamma().powi(-2)).sqrt(),
        "matrix": matrix_rows(&b.matrix().0),
    });
    Ok(Artifacts {
        table: matrix_table(&b.matrix().0),
        report: checks.finish(data),
    })
}

fn run_cycle(sc: &Scenario, body: &CycleScenario) -> Result<Artifacts, CliError> {
    let err = runtime("cycle");
    let u = body.base.four_velocity().map_err(&err)?;
    let via = body
        .via
        .iter()
        .map(|v| v.four_velocity())
        .collect::<relframes::Result<Vec<_>>>()
        .map_err(&err)?;
    let result = cycle(&u, &via).map_err(&err)?;
    let m = &result.matrix;

    let mut checks = Checks::new(sc);
    checks.residual("lorentz_residual", m.residual(), 1e-10);
    checks.residual("fixes_base_velocity", (m.apply(&u) - u).max_abs(), 1e-10);
    checks.residual(
        "fixes_reported_vector",
        (m.apply(&result.fixed_vector) - result.fixed_vector).max_abs(),
        1e-10,
    );
    let data = json!({
        "rotation_angle": result.rotation_angle,
        "rotation_axis": result.rotation_axis.map(|a| [a.x, a.y, a.z]),
        "fixed_vector": components(&result.fixed_vector),
        "matrix": matrix_rows(&m.0),
    });
    Ok(Artifacts {
        table: matrix_table(&m.0),
        report: checks.finish(data),
    })
}

/// Events on a parabola across the (x0, theta) plane, used when none are given.
fn default_events(n: usize) -> Vec<PlaneEvent> {
    (0..n)
        .map(|i| {
            let t = 2.0 * i as f64 / (n - 1) as f64 - 1.0;
            PlaneEvent::new(t, 0.5 * t * t - 0.25)
        })
        .collect()
}

fn run_rrt(sc: &Scenario, body: &RrtScenario) -> Result<Artifacts, CliError> {
    let err = runtime("rrt");
    let p = RotationParams::new(body.omega, body.c, body.r, body.z).map_err(&err)?;
    let events = if body.events.is_empty() {
        default_events(body.samples)
    } else {
        body.events
            .iter()
            .map(|&[x0, theta]| PlaneEvent::new(x0, theta))
            .collect()
    };
    let origin = PlaneEvent::new(0.0, 0.0);
    let growth = (2.0 * p.alpha().abs()).exp();
    let mut interval_residual: f64 = 0.0;
    let mut rows = Vec::with_capacity(events.len());
    for &ev in &events {
        let image = rrt_map(ev, &p);
        let before = plane_interval(origin, ev, p.r());
        let after = plane_interval(origin, image, p.r());
        interval_residual = interval_residual.max((before - after).abs() / ((1.0 + before.abs()) * growth));
        rows.push(vec![ev.x0, ev.theta, image.x0, image.theta, before, after]);
    }
    let tetrad = rrt_tetrad(&p).map_err(&err)?;

    let mut checks = Checks::new(sc);
    checks.residual("interval_invariance", interval_residual, 1e-13);
    checks.residual("tetrad_orthonormality", tetrad.orthonormality_residual(), 1e-12);

    let (theta, t) = (body.galilean_probe[0], body.galilean_probe[1]);
    let sweep = body
        .c_sweep
        .iter()
        .map(|&c| Ok((c, galilean_deviation(theta, t, &p_with_c(&p, c)?))))
        .collect::<relframes::Result<Vec<_>>>()
        .map_err(&err)?;
    let ratios: Vec<Value> = sweep
        .windows(2)
        .map(|w| {
            let ratio = w[0].1 / w[1].1;
            let expected = (w[1].0 / w[0].0).powi(2);
            json!({"c_from": w[0].0, "c_to": w[1].0, "ratio": ratio, "expected": expected})
        })
        .collect();
    if sweep.len() >= 2 {
        let worst = sweep
            .windows(2)
            .map(|w| ((w[0].1 / w[1].1) / (w[1].0 / w[0].0).powi(2) - 1.0).abs())
            .fold(0.0, f64::max);
        checks.exact("galilean_ratio_relative_error", worst, Limit::AtMost(0.05));
    }
    let data = json!({
        "alpha": p.alpha(),
        "rim_speed": rim_speed(p.omega(), p.r(), p.c()),
        "tetrad_residual": tetrad.orthonormality_residual(),
        "galilean_probe": {"theta": theta, "t": t},
        "galilean_sweep": sweep.iter().map(|(c, d)| json!({"c": c, "deviation": d})).collect::<Vec<_>>(),
        "galilean_ratios": ratios,
    });
    let header = [
        "x0",
        "theta",
        "x0_mapped",
        "theta_mapped",
        "interval",
        "interval_mapped",
    ];
    Ok(Artifacts {
        table: Table::new(header.iter().map(|h| h.to_string()).collect(), rows),
        report: checks.finish(data),
    })
}

fn p_with_c(p: &RotationParams, c: f64) -> relframes::Result<RotationParams> {
    RotationParams::new(p.omega(), c, p.r(), p.z())
}

fn run_thomas(sc: &Scenario, body: &ThomasScenario) -> Result<Artifacts, CliError> {
    let err = runtime("thomas");
    let mut rows = Vec::new();
    let mut orbits = Vec::new();
    let mut worst: f64 = 0.0;
    for &speed in &body.speeds {
        let o = thomas_orbit(speed, body.radius, body.samples).map_err(&err)?;
        let rel = o.relative_error();
        worst = worst.max(rel);
        rows.push(vec![
            o.speed,
            o.gamma,
            o.angle,
            o.closed_form,
            rel,
            o.proper_period,
            o.lab_rate,
        ]);
        orbits.push(json!({
            "speed": o.speed,
            "gamma": o.gamma,
            "angle_per_orbit": o.angle,
            "closed_form": o.closed_form,
            "principal_closed_form": o.principal_closed_form(),
            "relative_error": rel,
            "lab_rate": o.lab_rate,
        }));
    }
    let mut checks = Checks::new(sc);
    checks.residual("angle_relative_error", worst, 1e-6);
    let header = [
        "speed",
        "gamma",
        "angle",
        "closed_form",
        "relative_error",
        "proper_period",
        "lab_rate",
    ];
    Ok(Artifacts {
        table: Table::new(header.iter().map(|h| h.to_string()).collect(), rows),
        report: checks.finish(json!({ "orbits": orbits, "steps_per_orbit": body.samples })),
    })
}

fn run_bmt(sc: &Scenario, body: &BmtScenario, cfg: &IntegratorConfig) -> Result<Artifacts, CliError> {
    let err = runtime("bmt");
    let f = body.field.tensor().map_err(&err)?;
    let u0 = FourVector::from_three_velocity(Vector3::from(body.beta)).map_err(&err)?;
    let [sx, sy, sz] = body.spin;
    let s0 = rest_frame(&u0)
        .map_err(&err)?
        .reconstruct(&Vector4::new(0.0, sx, sy, sz));
    let state = SpinState::new(u0, s0).map_err(&err)?;
    let cp = ChargeParams::new(body.e_over_m, body.g).map_err(&err)?;
    let grid = uniform_grid(body.s_range[0], body.s_range[1], body.samples - 1);
    let run = bmt_co_integrate(&state, &f, &cp, &grid, cfg).map_err(&err)?;

    let rows = run
        .s
        .iter()
        .zip(run.u.iter().zip(&run.spin))
        .map(|(&s, (u, spin))| {
            let mut row = vec![s];
            row.extend(components(u));
            row.extend(components(spin));
            row.push(dot(u, spin));
            row.push(spin.norm_sq());
            row
        })
        .collect();
    let mut header = vec!["s".to_string()];
    header.extend(four_columns("u"));
    header.extend(four_columns("s"));
    header.extend(["u_dot_s".to_string(), "s_dot_s".to_string()]);

    let mut checks = Checks::new(sc);
    checks.residual("orthogonality_drift", run.max_orthogonality_drift, 1e-9);
    checks.residual("spin_norm_drift", run.max_norm_drift, 1e-9);
    checks.residual("velocity_norm_drift", run.max_velocity_drift, 1e-9);
    let data = json!({
        "e_over_m": cp.e_over_m,
        "g": cp.g,
        "projections": run.projections,
        "step": cfg.step,
        "initial_spin": components(&s0),
        "final_spin": run.spin.last().map(components),
    });
    Ok(Artifacts {
        table: Table::new(header, rows),
        report: checks.finish(data),
    })
}

fn run_frenet(sc: &Scenario, body: &FrenetScenario) -> Result<Artifacts, CliError> {
    let err = runtime("frenet");
    let f = body.field.tensor().map_err(&err)?;
    let u0 = FourVector::from_three_velocity(Vector3::from(body.beta)).map_err(&err)?;
    let kq = -body.e_over_m;
    let wl = ConstantFieldWorldline::new(&f, FourVector::zero(), u0, kq).map_err(&err)?;
    let (k, _) = wl
        .frenet()
        .ok_or_else(|| err(relframes::Error::ZeroCurvature { a: 0.0 }))?;
    let split = spectral_split(&k).map_err(&err)?;
    let generator = f.scaled(kq);
    let grid = uniform_grid(body.s_range[0], body.s_range[1], body.samples - 1);

    let mut rows = Vec::with_capacity(grid.len());
    let (mut ortho, mut force, mut tangent): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let h = 1e-5;
    for &s in &grid {
        let frame = wl
            .frame_at(s)
            .ok_or_else(|| err(relframes::Error::ZeroCurvature { a: 0.0 }))?;
        ortho = ortho.max(frame.orthonormality_residual());
        let x = wl.position(s);
        let rate = generator.apply(&frame.u);
        let scale = frame.u.max_abs() + rate.max_abs();
        force = force.max((central_diff(|t| wl.velocity(t), s, h) - rate).max_abs() / scale);
        tangent = tangent.max((central_diff(|t| wl.position(t), s, h) - frame.u).max_abs() / scale);
        let mut row = vec![s];
        for v in [x, frame.u, frame.n, frame.b, frame.c] {
            row.extend(components(&v));
        }
        rows.push(row);
    }
    let mut header = vec!["s".to_string()];
    for p in ["x", "u", "n", "b", "c"] {
        header.extend(four_columns(p));
    }

    let mut checks = Checks::new(sc);
    checks.residual("split_identities", split.identity_residual(&k), 1e-12);
    checks.residual("frame_orthonormality", ortho, 1e-9);
    checks.residual("lorentz_force", force, 1e-6);
    checks.residual("position_tangent", tangent, 1e-6);
    let data = json!({
        "curvatures": {"a": k.a, "tau": k.tau, "sigma": k.sigma},
        "split": {
            "chi": split.chi,
            "omega": split.omega,
            "delta": split.delta,
            "gamma": split.gamma,
            "lambda": split.lambda,
            "epsilon": split.epsilon,
        },
        "kq": kq,
    });
    Ok(Artifacts {
        table: Table::new(header, rows),
        report: checks.finish(data),
    })
}

fn run_observer(sc: &Scenario, body: &ObserverScenario, cfg: &IntegratorConfig) -> Result<Artifacts, CliError> {
    let err = runtime("observer");
    let lab = FourVector::basis(0);
    let (manifold, trajectory): (ObserverManifold, Box<dyn Worldline>) = match &body.frame {
        FrameChoice::FermiWalker { speed, radius, periods } => {
            let orbit = CircularOrbit::new(*radius, *speed).map_err(&err)?;
            let grid = orbit_grid(&orbit, *periods, body.samples);
            let m = ObserverManifold::fermi_walker(&orbit, &grid, &lab, None, cfg).map_err(&err)?;
            (m, Box::new(orbit))
        }
        FrameChoice::Rrt {
            omega,
            r,
            c,
            z,
            s_range,
        } => {
            let p = RotationParams::new(*omega, *c, *r, *z).map_err(&err)?;
            let grid = uniform_grid(s_range[0], s_range[1], body.samples - 1);
            let m = ObserverManifold::rrt(&p, &grid, &lab).map_err(&err)?;
            (m, Box::new(CircularOrbit::from_rotation(&p).map_err(&err)?))
        }
        FrameChoice::Frenet {
            field,
            beta,
            e_over_m,
            s_range,
        } => {
            let f: FieldTensor = field.tensor().map_err(&err)?;
            let u0 = FourVector::from_three_velocity(Vector3::from(*beta)).map_err(&err)?;
            let wl = ConstantFieldWorldline::new(&f, FourVector::zero(), u0, -e_over_m).map_err(&err)?;
            let grid = uniform_grid(s_range[0], s_range[1], body.samples - 1);
            let m = ObserverManifold::frenet(&wl, &grid, &lab).map_err(&err)?;
            (m, Box::new(wl))
        }
    };
    let charts = manifold.charts();
    let axioms = validate_axioms(&manifold, trajectory.as_ref());

    let (mut rotation, mut conformal, mut mapping): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for c in charts {
        rotation = rotation.max(transfer_rotation_residual(c).map_err(&err)?);
        conformal = conformal.max((c.conformal_factor - 1.0).abs());
    }
    let stride = (charts.len() / 16).max(1);
    for c1 in charts.iter().step_by(stride) {
        for c2 in charts.iter().step_by(stride) {
            let l: LorentzMatrix = transfer_between(c1, c2).map_err(&err)?;
            let scale = 1.0 + c1.tetrad.components().amax().powi(2);
            mapping = mapping.max((l.0 * c1.tetrad.components() - c2.tetrad.components()).amax() / scale);
        }
    }

    let third = charts.len() / 3;
    let mut holonomy = Vec::new();
    let mut smallest = f64::INFINITY;
    if third > 0 {
        for i in (0..third).step_by((third / 16).max(1)) {
            let (j, k) = (i + third, i + 2 * third);
            match holonomy_defect(&manifold, i, j, k) {
                Ok(h) => {
                    smallest = smallest.min(h.angle);
                    holonomy.push(
                        json!({"i": i, "j": j, "k": k, "angle": h.angle, "axis": h.axis.map(|a| [a.x, a.y, a.z])}),
                    );
                }
                Err(relframes::Error::DegenerateTriple) => {
                    holonomy.push(json!({"i": i, "j": j, "k": k, "angle": null, "axis": null}));
                }
                Err(e) => return Err(err(e)),
            }
        }
    }

    let mut checks = Checks::new(sc);
    checks.exact("axiom_failures", axioms.failures.len() as f64, Limit::AtMost(0.0));
    checks.residual("transfer_rotation_part", rotation, 1e-11);
    checks.residual("transfer_maps_frames", mapping, 1e-11);
    checks.exact("conformal_factor_deviation", conformal, Limit::AtMost(0.0));
    if let Some(min) = body.min_holonomy {
        checks.exact("min_holonomy_angle", smallest, Limit::AtLeast(min));
    }
    let data = json!({
        "frame_rule": format!("{:?}", manifold.frame_rule()),
        "charts": charts.len(),
        "axioms": {
            "failures": axioms.failures.iter().map(|f| json!({
                "index": f.index, "s": f.s, "kind": format!("{:?}", f.kind), "residual": f.residual,
            })).collect::<Vec<_>>(),
            "max_origin_residual": axioms.max_origin_residual,
            "max_tangent_residual": axioms.max_tangent_residual,
            "max_orthonormality_residual": axioms.max_orthonormality_residual,
            "max_transfer_residual": axioms.max_transfer_residual,
        },
        "holonomy": holonomy,
    });

    let rows = charts
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut row = vec![i as f64, c.s];
            row.extend(components(&c.event));
            row.extend(components(&c.velocity()));
            row.push(c.conformal_factor);
            row
        })
        .collect();
    let mut header = vec!["index".to_string(), "s".to_string()];
    header.extend(four_columns("x"));
    header.extend(four_columns("u"));
    header.push("conformal_factor".to_string());
    Ok(Artifacts {
        table: Table::new(header, rows),
        report: checks.finish(data),
    })
}
