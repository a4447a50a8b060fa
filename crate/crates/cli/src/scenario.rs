//! Scenario files: JSON objects tagged by `kind`. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use relframes::frenet::{curvatures_from_field, reconstruct_field, spectral_split};
use relframes::minkowski::{FieldTensor, FourVector, Tetrad, UNIT_TOLERANCE};
use relframes::numerics::{IntegratorConfig, Method, RenormPolicy};
use relframes::rotation::RotationParams;
use relframes::spin::ChargeParams;
use relframes::worldline::CircularOrbit;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_SAMPLES: usize = 256;
pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    Rk4,
    Rk45,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RenormName {
    /// Project back onto the constraint surface and log.
    Project,
    /// Abort the run.
    Error,
}

/// Integrator and check settings shared by every scenario kind.
#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub step: Option<f64>,
    pub method: Option<MethodName>,
    pub renorm: Option<RenormName>,
    pub renorm_threshold: Option<f64>,
    /// Overrides the default tolerance of the scenario's invariant checks.
    pub tolerance: Option<f64>,
}

/// Command-line values that take precedence over [`Settings`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub step: Option<f64>,
    pub method: Option<MethodName>,
    pub renorm: Option<RenormName>,
}

/// A velocity given as a three-velocity `[bx, by, bz]` or a unit four-velocity `[u0, u1, u2, u3]`.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(transparent)]
pub struct Velocity(pub Vec<f64>);

impl Velocity {
    pub fn four_velocity(&self) -> relframes::Result<FourVector> {
        match self.0.as_slice() {
            &[bx, by, bz] => FourVector::from_three_velocity(Vector3::new(bx, by, bz)),
            &[t, x, y, z] => {
                let u = FourVector::new(t, x, y, z);
                u.check_unit_future_timelike(UNIT_TOLERANCE)?;
                Ok(u)
            }
            other => Err(relframes::Error::InvalidParameter(format!(
                "velocity needs 3 or 4 components, got {}",
                other.len()
            ))),
        }
    }
}

/// Lab-frame electric and magnetic vectors.
#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LabField {
    #[serde(default)]
    pub e: [f64; 3],
    #[serde(default)]
    pub b: [f64; 3],
}

impl LabField {
    pub fn tensor(&self) -> relframes::Result<FieldTensor> {
        let lab = Tetrad::canonical();
        reconstruct_field(&lab.e(0), &Vector3::from(self.e), &Vector3::from(self.b), &lab)
    }
}

fn default_c() -> f64 {
    1.0
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_radius() -> f64 {
    1.0
}

fn default_periods() -> f64 {
    1.0
}

fn default_e_over_m() -> f64 {
    -1.0
}

fn default_g() -> f64 {
    2.0
}

fn default_s_range() -> [f64; 2] {
    [0.0, 10.0]
}

fn default_probe() -> [f64; 2] {
    [0.3, 2.0]
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BoostScenario {
    pub from: Velocity,
    pub to: Velocity,
    #[serde(default)]
    pub settings: Settings,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CycleScenario {
    pub base: Velocity,
    pub via: Vec<Velocity>,
    #[serde(default)]
    pub settings: Settings,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RrtScenario {
    pub omega: f64,
    pub r: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default)]
    pub z: f64,
    /// `(x0, theta)` pairs; generated when empty.
    #[serde(default)]
    pub events: Vec<[f64; 2]>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Light speeds at which the Galilean-limit deviation is measured.
    #[serde(default)]
    pub c_sweep: Vec<f64>,
    /// `(theta, t)` at which the Galilean deviation is evaluated.
    #[serde(default = "default_probe")]
    pub galilean_probe: [f64; 2],
    #[serde(default)]
    pub settings: Settings,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ThomasScenario {
    pub speeds: Vec<f64>,
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// Integration steps per orbit.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub settings: Settings,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BmtScenario {
    #[serde(default)]
    pub field: LabField,
    #[serde(default)]
    pub beta: [f64; 3],
    /// Rest-frame spin vector.
    pub spin: [f64; 3],
    #[serde(default = "default_e_over_m")]
    pub e_over_m: f64,
    #[serde(default = "default_g")]
    pub g: f64,
    #[serde(default = "default_s_range")]
    pub s_range: [f64; 2],
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub settings: Settings,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FrenetScenario {
    pub field: LabField,
    #[serde(default)]
    pub beta: [f64; 3],
    #[serde(default = "default_e_over_m")]
    pub e_over_m: f64,
    #[serde(default = "default_s_range")]
    pub s_range: [f64; 2],
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub settings: Settings,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FrameChoice {
    FermiWalker {
        speed: f64,
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default = "default_periods")]
        periods: f64,
    },
    Rrt {
        omega: f64,
        r: f64,
        #[serde(default = "default_c")]
        c: f64,
        #[serde(default)]
        z: f64,
        #[serde(default = "default_s_range")]
        s_range: [f64; 2],
    },
    Frenet {
        field: LabField,
        #[serde(default)]
        beta: [f64; 3],
        #[serde(default = "default_e_over_m")]
        e_over_m: f64,
        #[serde(default = "default_s_range")]
        s_range: [f64; 2],
    },
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverScenario {
    pub frame: FrameChoice,
    /// Charts per orbit for Fermi-Walker frames, charts in total otherwise.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// When set, every sampled holonomy angle must reach this value.
    pub min_holonomy: Option<f64>,
    #[serde(default)]
    pub settings: Settings,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScenarioKind {
    Boost(BoostScenario),
    Cycle(CycleScenario),
    Rrt(RrtScenario),
    Thomas(ThomasScenario),
    Bmt(BmtScenario),
    Frenet(FrenetScenario),
    Observer(ObserverScenario),
}

impl ScenarioKind {
    pub fn kind(&self) -> &'static str {
        match self {
            ScenarioKind::Boost(_) => "boost",
            ScenarioKind::Cycle(_) => "cycle",
            ScenarioKind::Rrt(_) => "rrt",
            ScenarioKind::Thomas(_) => "thomas",
            ScenarioKind::Bmt(_) => "bmt",
            ScenarioKind::Frenet(_) => "frenet",
            ScenarioKind::Observer(_) => "observer",
        }
    }

    pub fn settings(&self) -> &Settings {
        match self {
            ScenarioKind::Boost(s) => &s.settings,
            ScenarioKind::Cycle(s) => &s.settings,
            ScenarioKind::Rrt(s) => &s.settings,
            ScenarioKind::Thomas(s) => &s.settings,
            ScenarioKind::Bmt(s) => &s.settings,
            ScenarioKind::Frenet(s) => &s.settings,
            ScenarioKind::Observer(s) => &s.settings,
        }
    }
}

/// A parsed and validated scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub path: PathBuf,
    pub body: ScenarioKind,
}

impl Scenario {
    /// Scenario file name without extension; names the output files.
    pub fn stem(&self) -> String {
        self.path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scenario".into())
    }

    pub fn integrator(&self, overrides: &Overrides) -> IntegratorConfig {
        let settings = self.body.settings();
        let mut cfg = IntegratorConfig::with_step(overrides.step.or(settings.step).unwrap_or(DEFAULT_STEP));
        cfg.method = match overrides.method.or(settings.method) {
            Some(MethodName::Rk45) => Method::Rk45,
            Some(MethodName::Rk4) | None => Method::Rk4,
        };
        cfg.renorm_policy = match overrides.renorm.or(settings.renorm) {
            Some(RenormName::Error) => RenormPolicy::Error,
            Some(RenormName::Project) | None => RenormPolicy::ProjectLog,
        };
        if let Some(t) = settings.renorm_threshold {
            cfg.renorm_threshold = t;
        }
        cfg
    }

    pub fn tolerance(&self, default: f64) -> f64 {
        self.body.settings().tolerance.unwrap_or(default)
    }
}

pub fn parse_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario_str(path, &text)
}

pub fn parse_scenario_str(path: &Path, text: &str) -> Result<Scenario, CliError> {
    let body: ScenarioKind = serde_json::from_str(text).map_err(|e| {
        let message = e.to_string();
        let (line, column) = if e.line() > 0 {
            (e.line(), e.column())
        } else {
            locate_field(text, &message)
        };
        CliError::Parse {
            path: path.to_path_buf(),
            line,
            column,
            message,
        }
    })?;
    let scenario = Scenario {
        path: path.to_path_buf(),
        body,
    };
    validate(&scenario)?;
    Ok(scenario)
}

/// Tagged-enum errors come back without a position; point at the first
/// occurrence of the key named in the message instead, or at the start.
fn locate_field(text: &str, message: &str) -> (usize, usize) {
    let key = message.split('`').nth(1).map(|k| format!("\"{k}\""));
    let offset = key.and_then(|k| text.find(&k)).unwrap_or(0);
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = offset - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// Re-checks every physical precondition of the target module.
fn validate(sc: &Scenario) -> Result<(), CliError> {
    let path = sc.path.as_path();
    let lib = |r: relframes::Result<()>| r.map_err(|e| CliError::from_precondition(path, &e));
    let invalid = |what: &str, detail: String| CliError::validation(path, what, detail);

    let settings = sc.body.settings();
    for (name, value) in [
        ("step", settings.step),
        ("renorm_threshold", settings.renorm_threshold),
        ("tolerance", settings.tolerance),
    ] {
        if let Some(v) = value {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(
                    "InvalidSetting",
                    format!("{name} must be positive and finite, got {v}"),
                ));
            }
        }
    }
    lib(sc.integrator(&Overrides::default()).validate())?;

    let check_samples = |n: usize| {
        if n < 2 {
            Err(invalid("TooFewSamples", format!("samples must be at least 2, got {n}")))
        } else {
            Ok(())
        }
    };
    let check_range = |r: [f64; 2]| {
        if r.iter().all(|v| v.is_finite()) && r[1] > r[0] {
            Ok(())
        } else {
            Err(invalid(
                "InvalidRange",
                format!("s_range must be increasing, got {r:?}"),
            ))
        }
    };
    let check_charge = |e_over_m: f64, g: f64| lib(ChargeParams::new(e_over_m, g).map(|_| ()));
    let check_field = |f: &LabField| lib(f.tensor().map(|_| ()));
    let check_beta = |b: [f64; 3]| lib(FourVector::from_three_velocity(Vector3::from(b)).map(|_| ()));
    let check_frenet = |f: &LabField, beta: [f64; 3], e_over_m: f64| {
        let tensor = f.tensor().map_err(|e| CliError::from_precondition(path, &e))?;
        let u0 =
            FourVector::from_three_velocity(Vector3::from(beta)).map_err(|e| CliError::from_precondition(path, &e))?;
        let (k, _) =
            curvatures_from_field(&tensor, &u0, -e_over_m).map_err(|e| CliError::from_precondition(path, &e))?;
        lib(spectral_split(&k).map(|_| ()))
    };

    match &sc.body {
        ScenarioKind::Boost(b) => {
            lib(b.from.four_velocity().map(|_| ()))?;
            lib(b.to.four_velocity().map(|_| ()))?;
        }
        ScenarioKind::Cycle(c) => {
            lib(c.base.four_velocity().map(|_| ()))?;
            if c.via.is_empty() {
                return Err(invalid(
                    "EmptyCycle",
                    "cycle needs at least one intermediate velocity".into(),
                ));
            }
            for v in &c.via {
                lib(v.four_velocity().map(|_| ()))?;
            }
        }
        ScenarioKind::Rrt(r) => {
            lib(RotationParams::new(r.omega, r.c, r.r, r.z).map(|_| ()))?;
            if r.events.is_empty() {
                check_samples(r.samples)?;
            }
            if r.events.iter().flatten().any(|v| !v.is_finite()) {
                return Err(CliError::from_precondition(path, &relframes::Error::NonFinite));
            }
            for &c in &r.c_sweep {
                lib(RotationParams::new(r.omega, c, r.r, r.z).map(|_| ()))?;
            }
        }
        ScenarioKind::Thomas(t) => {
            if t.speeds.is_empty() {
                return Err(invalid("NoSpeeds", "thomas needs at least one orbital speed".into()));
            }
            check_samples(t.samples)?;
            for &v in &t.speeds {
                lib(CircularOrbit::new(t.radius, v).map(|_| ()))?;
            }
        }
        ScenarioKind::Bmt(b) => {
            check_field(&b.field)?;
            check_beta(b.beta)?;
            check_charge(b.e_over_m, b.g)?;
            check_range(b.s_range)?;
            check_samples(b.samples)?;
            if !(Vector3::from(b.spin).norm() > 0.0) {
                return Err(invalid("ZeroSpin", "spin must be a nonzero finite vector".into()));
            }
        }
        ScenarioKind::Frenet(f) => {
            check_charge(f.e_over_m, 2.0)?;
            check_range(f.s_range)?;
            check_samples(f.samples)?;
            check_frenet(&f.field, f.beta, f.e_over_m)?;
        }
        ScenarioKind::Observer(o) => {
            check_samples(o.samples)?;
            if let Some(h) = o.min_holonomy {
                if !(h.is_finite() && h >= 0.0) {
                    return Err(invalid(
                        "InvalidSetting",
                        format!("min_holonomy must be nonnegative, got {h}"),
                    ));
                }
            }
            match &o.frame {
                FrameChoice::FermiWalker { speed, radius, periods } => {
                    lib(CircularOrbit::new(*radius, *speed).map(|_| ()))?;
                    if !(periods.is_finite() && *periods > 0.0) {
                        return Err(invalid(
                            "InvalidRange",
                            format!("periods must be positive, got {periods}"),
                        ));
                    }
                }
                FrameChoice::Rrt {
                    omega,
                    r,
                    c,
                    z,
                    s_range,
                } => {
                    let p =
                        RotationParams::new(*omega, *c, *r, *z).map_err(|e| CliError::from_precondition(path, &e))?;
                    lib(CircularOrbit::from_rotation(&p).map(|_| ()))?;
                    check_range(*s_range)?;
                }
                FrameChoice::Frenet {
                    field,
                    beta,
                    e_over_m,
                    s_range,
                } => {
                    check_charge(*e_over_m, 2.0)?;
                    check_range(*s_range)?;
                    check_frenet(field, *beta, *e_over_m)?;
                }
            }
        }
    }
    Ok(())
}
