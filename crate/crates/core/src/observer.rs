//! Observer manifolds: an indexed family of local Minkowski charts along a
//! trajectory, each with its own tetrad and a boost onto a fixed laboratory
//! direction.
//!
//! Charts are never keyed by event, so two observers passing through the same
//! event stay distinct.

use crate::error::{Error, Result};
use crate::frenet::{f_frame, spectral_split, ConstantFieldWorldline};
use crate::lorentz::{boost, cycle, decompose, rest_frame, Boost};
use crate::minkowski::{FourVector, LorentzMatrix, Tetrad, STRICT_TOLERANCE, UNIT_TOLERANCE};
use crate::numerics::IntegratorConfig;
use crate::rotation::{rrt_tetrad, RotationParams};
use crate::spin::fw_transport_frame;
use crate::worldline::{CircularOrbit, Worldline};

/// Charts per orbital period when sampling periodic trajectories.
pub const DEFAULT_CHARTS_PER_PERIOD: usize = 256;
/// Tolerance on `tetrad.e_0 = u(s)` and on chart origins.
pub const CHART_TOLERANCE: f64 = 1e-9;

/// How a chart's tetrad is chosen along the trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameRule {
    /// Co-rotating frame of a rigidly rotating disc.
    Rrt,
    /// Fermi-Walker transport of an initial frame.
    FermiWalker,
    /// Frenet-Serret frame of a charge in a constant field.
    Frenet,
}

/// One local observer.
#[derive(Clone, Debug, PartialEq)]
pub struct ObserverChart {
    pub s: f64,
    /// Origin of the chart on the event manifold.
    pub event: FourVector,
    pub tetrad: Tetrad,
    /// Always 1 on a flat event manifold.
    pub conformal_factor: f64,
    /// `boost(u(s), lab)`.
    pub transfer_boost: Boost,
    /// Decoupled frame carried alongside the Frenet tetrad.
    pub f_frame: Option<Tetrad>,
}

impl ObserverChart {
    pub fn new(s: f64, event: FourVector, tetrad: Tetrad, lab: &FourVector) -> Result<Self> {
        let transfer_boost = boost(&tetrad.e(0), lab)?;
        Ok(ObserverChart {
            s,
            event,
            tetrad,
            conformal_factor: 1.0,
            transfer_boost,
            f_frame: None,
        })
    }

    pub fn velocity(&self) -> FourVector {
        self.tetrad.e(0)
    }
}

/// Charts ordered by proper time, all boosted onto one laboratory direction.
#[derive(Clone, Debug, PartialEq)]
pub struct ObserverManifold {
    lab_direction: FourVector,
    charts: Vec<ObserverChart>,
    frame_rule: FrameRule,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty proper-time grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(
            "proper-time grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

impl ObserverManifold {
    /// Assembles a manifold from prebuilt charts, checking the ordering.
    pub fn from_charts(lab_direction: FourVector, charts: Vec<ObserverChart>, frame_rule: FrameRule) -> Result<Self> {
        lab_direction.check_unit_future_timelike(UNIT_TOLERANCE)?;
        let grid: Vec<f64> = charts.iter().map(|c| c.s).collect();
        check_grid(&grid)?;
        Ok(ObserverManifold {
            lab_direction,
            charts,
            frame_rule,
        })
    }

    /// Fermi-Walker charts along `wl`, starting from `frame0` or the rest frame at `grid[0]`.
    pub fn fermi_walker(
        wl: &dyn Worldline,
        grid: &[f64],
        lab: &FourVector,
        frame0: Option<&Tetrad>,
        cfg: &IntegratorConfig,
    ) -> Result<Self> {
        check_grid(grid)?;
        lab.check_unit_future_timelike(UNIT_TOLERANCE)?;
        let start = match frame0 {
            Some(t) => t.clone(),
            None => rest_frame(&wl.velocity(grid[0]))?,
        };
        let transport = fw_transport_frame(wl, grid, &start, cfg)?;
        let charts = grid
            .iter()
            .zip(transport.frames)
            .map(|(&s, tetrad)| ObserverChart::new(s, wl.position(s), tetrad, lab))
            .collect::<Result<Vec<_>>>()?;
        ObserverManifold::from_charts(*lab, charts, FrameRule::FermiWalker)
    }

    /// Co-rotating charts at radius `p.r` on a disc rotating about z.
    pub fn rrt(p: &RotationParams, grid: &[f64], lab: &FourVector) -> Result<Self> {
        check_grid(grid)?;
        let orbit = CircularOrbit::from_rotation(p)?;
        let frame = rrt_tetrad(p)?;
        let charts = grid
            .iter()
            .map(|&s| ObserverChart::new(s, orbit.position(s), frame.to_cartesian(orbit.phase(s))?, lab))
            .collect::<Result<Vec<_>>>()?;
        ObserverManifold::from_charts(*lab, charts, FrameRule::Rrt)
    }

    /// Frenet-Serret charts along a constant-field worldline, with the decoupled
    /// frame stored next to each tetrad.
    pub fn frenet(wl: &ConstantFieldWorldline, grid: &[f64], lab: &FourVector) -> Result<Self> {
        check_grid(grid)?;
        let (k, _) = wl.frenet().ok_or(Error::ZeroCurvature { a: 0.0 })?;
        let split = spectral_split(&k)?;
        let charts = grid
            .iter()
            .map(|&s| {
                let frame = wl.frame_at(s).ok_or(Error::ZeroCurvature { a: 0.0 })?;
                let mut chart = ObserverChart::new(s, wl.position(s), frame.tetrad()?, lab)?;
                chart.f_frame = Some(Tetrad::new(f_frame(&frame, &split, &k)?)?);
                Ok(chart)
            })
            .collect::<Result<Vec<_>>>()?;
        ObserverManifold::from_charts(*lab, charts, FrameRule::Frenet)
    }

    pub fn lab_direction(&self) -> FourVector {
        self.lab_direction
    }

    pub fn charts(&self) -> &[ObserverChart] {
        &self.charts
    }

    pub fn frame_rule(&self) -> FrameRule {
        self.frame_rule
    }

    pub fn len(&self) -> usize {
        self.charts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charts.is_empty()
    }
}

/// Grid of `periods * per_period` intervals over proper periods of `orbit`.
pub fn orbit_grid(orbit: &CircularOrbit, periods: f64, per_period: usize) -> Vec<f64> {
    let n = ((periods * per_period as f64).round() as usize).max(1);
    let end = periods * orbit.proper_period();
    (0..=n).map(|i| end * i as f64 / n as f64).collect()
}

/// The Lorentz map sending each frame vector of `c1` to the matching vector of `c2`.
pub fn transfer_between(c1: &ObserverChart, c2: &ObserverChart) -> Result<LorentzMatrix> {
    let m = c2.tetrad.components() * c1.tetrad.dual();
    let scale = 1.0 + m.amax() * m.amax();
    LorentzMatrix::verified(m, 1e-9 * scale)
}

/// The chart's boost onto the laboratory direction.
pub fn transfer_to_event(c: &ObserverChart) -> &Boost {
    &c.transfer_boost
}

/// Rotation left after boosting `u_i -> u_j -> u_k -> u_i` between chart velocities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Holonomy {
    pub angle: f64,
    /// Axis in the rest triad of `u_i`; `None` when the angle vanishes.
    pub axis: Option<nalgebra::Vector3<f64>>,
}

pub fn holonomy_defect(m: &ObserverManifold, i: usize, j: usize, k: usize) -> Result<Holonomy> {
    let charts = m.charts();
    let get = |idx: usize| {
        charts
            .get(idx)
            .map(ObserverChart::velocity)
            .ok_or_else(|| Error::InvalidParameter(format!("chart index {idx} out of range")))
    };
    let (ui, uj, uk) = (get(i)?, get(j)?, get(k)?);
    let distinct = |x: &FourVector, y: &FourVector| (*x - *y).max_abs() > STRICT_TOLERANCE;
    if !(distinct(&ui, &uj) && distinct(&uj, &uk) && distinct(&uk, &ui)) {
        return Err(Error::DegenerateTriple);
    }
    let result = cycle(&ui, &[uj, uk])?;
    Ok(Holonomy {
        angle: result.rotation_angle,
        axis: result.rotation_axis,
    })
}

/// Which property a chart failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxiomKind {
    /// The chart origin lies on the trajectory.
    Origin,
    /// The tetrad's time leg is the trajectory tangent.
    Tangent,
    /// The tetrad is orthonormal for the flat metric (unit conformal factor).
    Orthonormality,
    ConformalFactor,
    /// The transfer boost maps the tangent onto the laboratory direction.
    Transfer,
    /// Charts are strictly ordered by proper time.
    Ordering,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxiomFailure {
    pub index: usize,
    pub s: f64,
    pub kind: AxiomKind,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct AxiomReport {
    pub failures: Vec<AxiomFailure>,
    pub max_origin_residual: f64,
    pub max_tangent_residual: f64,
    pub max_orthonormality_residual: f64,
    pub max_transfer_residual: f64,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks every chart against `trajectory`; never fails, the report carries violations.
pub fn validate_axioms(m: &ObserverManifold, trajectory: &dyn Worldline) -> AxiomReport {
    let mut report = AxiomReport::default();
    let lab = m.lab_direction();
    for (index, chart) in m.charts().iter().enumerate() {
        let s = chart.s;
        let mut check = |kind, residual: f64, tol: f64, slot: &mut f64| {
            *slot = slot.max(residual);
            if !(residual <= tol) {
                report.failures.push(AxiomFailure {
                    index,
                    s,
                    kind,
                    residual,
                });
            }
        };
        let x = trajectory.position(s);
        let origin = (chart.event - x).max_abs();
        let mut slot = report.max_origin_residual;
        check(
            AxiomKind::Origin,
            origin,
            CHART_TOLERANCE * (1.0 + x.max_abs()),
            &mut slot,
        );
        report.max_origin_residual = slot;

        let u = trajectory.velocity(s);
        let tangent = (chart.velocity() - u).max_abs();
        let mut slot = report.max_tangent_residual;
        check(
            AxiomKind::Tangent,
            tangent,
            CHART_TOLERANCE * (1.0 + u.max_abs()),
            &mut slot,
        );
        report.max_tangent_residual = slot;

        let scale = chart.tetrad.components().amax().powi(2).max(1.0);
        let ortho = chart.tetrad.orthonormality_residual() / scale;
        let mut slot = report.max_orthonormality_residual;
        check(AxiomKind::Orthonormality, ortho, CHART_TOLERANCE, &mut slot);
        report.max_orthonormality_residual = slot;

        let mut unused = 0.0;
        check(
            AxiomKind::ConformalFactor,
            (chart.conformal_factor - 1.0).abs(),
            0.0,
            &mut unused,
        );

        let b = &chart.transfer_boost;
        let transfer = (b.apply(&chart.velocity()) - lab)
            .max_abs()
            .max((b.source() - chart.velocity()).max_abs())
            .max((b.target() - lab).max_abs());
        let mut slot = report.max_transfer_residual;
        check(
            AxiomKind::Transfer,
            transfer,
            CHART_TOLERANCE * (1.0 + b.gamma()),
            &mut slot,
        );
        report.max_transfer_residual = slot;
    }
    for (index, w) in m.charts().windows(2).enumerate() {
        if !(w[1].s > w[0].s) {
            report.failures.push(AxiomFailure {
                index: index + 1,
                s: w[1].s,
                kind: AxiomKind::Ordering,
                residual: w[0].s - w[1].s,
            });
        }
    }
    report
}

/// All charts, across several manifolds, whose origin is within `tol` of `event`,
/// as `(manifold, chart)` index pairs.
pub fn charts_at_event(manifolds: &[&ObserverManifold], event: &FourVector, tol: f64) -> Vec<(usize, usize)> {
    manifolds
        .iter()
        .enumerate()
        .flat_map(|(mi, m)| {
            m.charts()
                .iter()
                .enumerate()
                .filter(|(_, c)| (c.event - *event).max_abs() <= tol)
                .map(move |(ci, _)| (mi, ci))
        })
        .collect()
}

/// Rotation part of a chart's transfer boost about its own velocity (identity for a pure boost).
pub fn transfer_rotation_residual(c: &ObserverChart) -> Result<f64> {
    let (_, r) = decompose(c.transfer_boost.matrix(), &c.velocity())?;
    Ok((r.0 - nalgebra::Matrix4::identity()).amax())
}
