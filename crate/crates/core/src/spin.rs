//! Fermi-Walker transport, Thomas precession and the BMT spin equation.

use std::ops::Mul;

use nalgebra::{Matrix3, Matrix4, SVector, Vector3};

use crate::error::{Error, Result};
use crate::minkowski::{dot, levi_civita3, outer_lowered, FieldTensor, FourVector, Tetrad, UNIT_TOLERANCE};
use crate::numerics::{
    frame_residual, frame_to_state, integrate_at, integrate_at_with_hook, renormalize_frame, state_to_frame,
    IntegratorConfig, RenormPolicy,
};
use crate::worldline::{CircularOrbit, Worldline, WorldlineSample};

/// Tolerance for `u.du = 0` on increments.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-9;

/// Four-velocity with polarisation vector orthogonal to it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinState {
    pub u: FourVector,
    pub s: FourVector,
}

impl SpinState {
    pub fn new(u: FourVector, s: FourVector) -> Result<Self> {
        u.check_unit_future_timelike(UNIT_TOLERANCE)?;
        if !s.is_finite() {
            return Err(Error::NonFinite);
        }
        let residual = dot(&u, &s).abs();
        if residual > ORTHOGONALITY_TOLERANCE * (1.0 + u.max_abs() * s.max_abs()) {
            return Err(Error::NotOrthogonal { residual });
        }
        Ok(SpinState { u, s })
    }
}

/// Signed charge-to-mass ratio and Lande factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChargeParams {
    pub e_over_m: f64,
    pub g: f64,
}

impl ChargeParams {
    pub fn new(e_over_m: f64, g: f64) -> Result<Self> {
        if !e_over_m.is_finite() || !g.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(ChargeParams { e_over_m, g })
    }

    /// Electron-like defaults used by the scenarios: `e/m = -1`, `g = 2`.
    pub fn electron() -> Self {
        ChargeParams { e_over_m: -1.0, g: 2.0 }
    }
}

/// `b = I + u du_flat - du u_flat`.
pub fn infinitesimal_boost(u: &FourVector, du: &FourVector) -> Result<Matrix4<f64>> {
    let residual = dot(u, du).abs();
    if residual > ORTHOGONALITY_TOLERANCE * (1.0 + u.max_abs() * du.max_abs()) {
        return Err(Error::NotOrthogonalIncrement { residual });
    }
    Ok(Matrix4::identity() + outer_lowered(u, du) - outer_lowered(du, u))
}

/// Fermi-Walker derivative `pdot = u (udot.p) - udot (u.p)`.
pub fn fw_derivative(p: &FourVector, u: &FourVector, udot: &FourVector) -> FourVector {
    dot(udot, p) * *u - dot(u, p) * *udot
}

fn check_grid(wl: &dyn Worldline, grid: &[f64]) -> Result<()> {
    for &s in grid {
        wl.sample(s).check()?;
    }
    Ok(())
}

/// Fermi-Walker transports `p0` from `grid[0]` through the grid.
pub fn fw_transport(
    wl: &dyn Worldline,
    grid: &[f64],
    p0: &FourVector,
    cfg: &IntegratorConfig,
) -> Result<Vec<FourVector>> {
    if !p0.is_finite() {
        return Err(Error::NonFinite);
    }
    check_grid(wl, grid)?;
    let ys = integrate_at(
        |s, y: &SVector<f64, 4>| fw_derivative(&FourVector(*y), &wl.velocity(s), &wl.acceleration(s)).0,
        p0.0,
        grid,
        cfg,
    )?;
    Ok(ys.into_iter().map(FourVector).collect())
}

/// [`fw_transport`] along tabulated samples, returning `p` at each sample.
pub fn fw_transport_samples(
    samples: &[WorldlineSample],
    p0: &FourVector,
    cfg: &IntegratorConfig,
) -> Result<Vec<FourVector>> {
    let table = crate::worldline::Sampled::new(samples.to_vec(), FourVector::zero())?;
    let grid: Vec<f64> = samples.iter().map(|p| p.s).collect();
    fw_transport(&table, &grid, p0, cfg)
}

/// Frames transported along a worldline, with the renormalization tally.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameTransport {
    pub frames: Vec<Tetrad>,
    pub renormalizations: usize,
    /// Largest orthonormality residual seen before any correction.
    pub max_residual: f64,
}

/// Fermi-Walker transports a whole tetrad, renormalizing per `cfg` when the
/// orthonormality residual exceeds `cfg.renorm_threshold`.
pub fn fw_transport_frame(
    wl: &dyn Worldline,
    grid: &[f64],
    frame0: &Tetrad,
    cfg: &IntegratorConfig,
) -> Result<FrameTransport> {
    check_grid(wl, grid)?;
    let mut renormalizations = 0;
    let mut max_residual: f64 = 0.0;
    let ys = integrate_at_with_hook(
        |s, y: &SVector<f64, 16>| {
            let f = state_to_frame(y);
            let (u, a) = (wl.velocity(s), wl.acceleration(s));
            frame_to_state(&f.map(|e| fw_derivative(&e, &u, &a)))
        },
        frame_to_state(frame0.vectors()),
        grid,
        cfg,
        |s, y| {
            let f = state_to_frame(y);
            let residual = frame_residual(&f);
            max_residual = max_residual.max(residual);
            if residual > cfg.renorm_threshold {
                match cfg.renorm_policy {
                    RenormPolicy::ProjectLog => {
                        let (g, corr) = renormalize_frame(&f)?;
                        log::info!("renormalized transported frame at s = {s}, correction {corr:e}");
                        renormalizations += 1;
                        *y = frame_to_state(&g);
                    }
                    RenormPolicy::Error => {
                        return Err(Error::DriftExceeded {
                            s,
                            drift: residual,
                            threshold: cfg.renorm_threshold,
                        });
                    }
                }
            }
            Ok(())
        },
    )?;
    let frames = ys
        .iter()
        .map(|y| Tetrad::new(state_to_frame(y)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameTransport {
        frames,
        renormalizations,
        max_residual,
    })
}

/// Rotation rate of boosted axes,
/// `Omega = [gdot (v u_flat - u v_flat) + (u udot_flat - udot u_flat) - gamma (v udot_flat - udot v_flat)] / (1 + gamma)`
/// with `gamma = -v.u` and `gdot = -v.udot`. Acts on contravariant components.
pub fn omega_exact(u: &FourVector, udot: &FourVector, v: &FourVector) -> Result<Matrix4<f64>> {
    u.check_unit_future_timelike(UNIT_TOLERANCE)?;
    v.check_unit_future_timelike(UNIT_TOLERANCE)?;
    let gamma = -dot(v, u);
    let gdot = -dot(v, udot);
    let wedge = |a: &FourVector, b: &FourVector| outer_lowered(a, b) - outer_lowered(b, a);
    Ok((gdot * wedge(v, u) + wedge(u, udot) - gamma * wedge(v, udot)) / (1.0 + gamma))
}

fn check_gamma(beta: &Vector3<f64>, gamma: f64) -> Result<()> {
    let b2 = beta.norm_squared();
    if !(b2 < 1.0) {
        return Err(Error::InconsistentGamma { gamma, beta: b2.sqrt() });
    }
    let expected = 1.0 / (1.0 - b2).sqrt();
    if !((gamma - expected).abs() <= 1e-9 * expected) {
        return Err(Error::InconsistentGamma { gamma, beta: b2.sqrt() });
    }
    Ok(())
}

/// Spatial precession matrix `gamma^2/(1+gamma) (beta Gamma^T - Gamma beta^T)`,
/// where `Gamma` is the proper-time rate of the three-velocity.
pub fn omega_spatial(beta: &Vector3<f64>, beta_rate: &Vector3<f64>, gamma: f64) -> Result<Matrix3<f64>> {
    check_gamma(beta, gamma)?;
    let k = gamma * gamma / (1.0 + gamma);
    Ok(k * (beta * beta_rate.transpose() - beta_rate * beta.transpose()))
}

/// Matrix `M_lr = eps_lrs w_s`. Acting on `p` it gives `p x w`.
pub fn epsilon_generator(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::from_fn(|l, r| (0..3).map(|s| levi_civita3(l, r, s) * w[s]).sum())
}

/// Rate vector `w` of an antisymmetric `M`, so that `M p = w x p`.
pub fn rate_vector(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

/// BMT equation `sdot = -(e/2m) [g F s_flat + (g-2) u (u_flat F s_flat)]`.
pub fn bmt_rhs(state: &SpinState, f: &FieldTensor, cp: &ChargeParams) -> FourVector {
    let fs = FourVector(f.matrix() * state.s.lower().0);
    let ufs = f.bilinear(&state.u, &state.s);
    -(cp.e_over_m / 2.0) * (cp.g * fs + (cp.g - 2.0) * ufs * state.u)
}

/// Lorentz force `udot = -(e/m) F u`.
pub fn lorentz_force_rhs(u: &FourVector, f: &FieldTensor, cp: &ChargeParams) -> FourVector {
    -cp.e_over_m * f.apply(u)
}

/// Larmor term `-Ftilde w_flat` with `Ftilde = P F P^T`, `P = I + u u_flat`,
/// and magnetic moment `w = (g e / 2m) s`.
pub fn larmor_rhs(state: &SpinState, f: &FieldTensor, cp: &ChargeParams) -> FourVector {
    let proj = Matrix4::identity() + outer_lowered(&state.u, &state.u);
    let projected = proj * f.matrix() * proj.transpose();
    let moment = (cp.g * cp.e_over_m / 2.0) * state.s;
    FourVector(-(projected * moment.lower().0))
}

/// Fermi-Walker contribution `-(e/m) (u F_k^h - F^ih u_k) u_h s^k`.
pub fn fw_spin_contribution(state: &SpinState, f: &FieldTensor, cp: &ChargeParams) -> FourVector {
    let (u, s) = (&state.u, &state.s);
    -cp.e_over_m * (f.bilinear(s, u) * *u - dot(u, s) * f.apply(u))
}

/// Electric and magnetic parts seen in `frame`: `E^l = F^{0l}` and
/// `B_n = -1/2 eta_npqr u^p F^{qr}`, on the frame's spatial triad.
///
/// On a right-handed frame `B^1 = F^{23}`; a left-handed frame flips the sign.
pub fn em_split(f: &FieldTensor, frame: &Tetrad) -> (Vector3<f64>, Vector3<f64>) {
    let fab = frame.tensor_components(&f.matrix());
    let orientation = frame.determinant().signum();
    let e = Vector3::new(fab[(0, 1)], fab[(0, 2)], fab[(0, 3)]);
    let b = orientation * Vector3::new(fab[(2, 3)], fab[(3, 1)], fab[(1, 2)]);
    (e, b)
}

/// Thomas precession in terms of the fields:
/// `-gamma^2/(1+gamma) eps [beta x E + beta x (beta x B)]`.
/// Fields are charge-normalized (the `e/m` factor is absorbed).
pub fn thomas_omega_em(beta: &Vector3<f64>, e: &Vector3<f64>, b: &Vector3<f64>, gamma: f64) -> Result<Matrix3<f64>> {
    check_gamma(beta, gamma)?;
    let w = beta.cross(e) + beta.cross(&beta.cross(b));
    Ok(-(gamma * gamma / (1.0 + gamma)) * epsilon_generator(&w))
}

/// Total precession as written for the nucleus rest frame:
/// `-(e/2m) eps [g B - beta x E] / (1+gamma)
///  + (g-2)(e/2m) eps [gamma^2/(1+gamma) beta x (beta x B) + gamma beta x E]`.
///
/// At `beta = 0` this gives half of the rest-frame BMT rate `(e/2m) g B`.
pub fn total_precession(
    beta: &Vector3<f64>,
    e: &Vector3<f64>,
    b: &Vector3<f64>,
    gamma: f64,
    cp: &ChargeParams,
) -> Result<Matrix3<f64>> {
    check_gamma(beta, gamma)?;
    let half = cp.e_over_m / 2.0;
    let bxe = beta.cross(e);
    let bbb = beta.cross(&beta.cross(b));
    let first = -half * epsilon_generator(&(cp.g * b - bxe)) / (1.0 + gamma);
    let second = (cp.g - 2.0) * half * epsilon_generator(&((gamma * gamma / (1.0 + gamma)) * bbb + gamma * bxe));
    Ok(first + second)
}

/// The same matrix as [`total_precession`], collected as `g P + Q`.
pub fn total_precession_by_g(
    beta: &Vector3<f64>,
    e: &Vector3<f64>,
    b: &Vector3<f64>,
    gamma: f64,
    cp: &ChargeParams,
) -> Result<(Matrix3<f64>, Matrix3<f64>)> {
    check_gamma(beta, gamma)?;
    let half = cp.e_over_m / 2.0;
    let k = gamma * gamma / (1.0 + gamma);
    let anomalous = k * beta.cross(&beta.cross(b)) + gamma * beta.cross(e);
    let per_g = half * (anomalous - b / (1.0 + gamma));
    let rest = half * (beta.cross(e) / (1.0 + gamma) - 2.0 * anomalous);
    Ok((epsilon_generator(&per_g), epsilon_generator(&rest)))
}

/// `dQ/dt = Qdot / gamma`.
pub fn coordinate_time_rate<T: Mul<f64, Output = T>>(q_dot: T, gamma: f64) -> T {
    debug_assert!(gamma >= 1.0);
    q_dot * (1.0 / gamma)
}

/// Per-orbit Thomas rotation obtained by integrating the spatial precession
/// matrix over one proper period.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThomasOrbit {
    pub speed: f64,
    pub gamma: f64,
    pub angle: f64,
    /// `2 pi (gamma - 1)`.
    pub closed_form: f64,
    pub proper_period: f64,
    /// Mean precession rate per unit lab time.
    pub lab_rate: f64,
}

impl ThomasOrbit {
    /// `closed_form` reduced to the principal rotation angle in `[0, pi]`,
    /// which is what the integrated rotation matrix can report.
    pub fn principal_closed_form(&self) -> f64 {
        let tau = 2.0 * std::f64::consts::PI;
        let phi = self.closed_form.rem_euclid(tau);
        phi.min(tau - phi)
    }

    /// Relative deviation of the integrated angle from the closed form, modulo full turns.
    pub fn relative_error(&self) -> f64 {
        (self.angle - self.principal_closed_form()).abs() / self.closed_form
    }
}

/// Integrates `dR/ds = Omega(s) R` around one circular orbit of lab speed `speed`.
pub fn thomas_orbit(speed: f64, radius: f64, steps: usize) -> Result<ThomasOrbit> {
    let orbit = CircularOrbit::new(radius, speed)?;
    let gamma = orbit.gamma();
    let period = orbit.proper_period();
    let cfg = IntegratorConfig::with_step(period / steps.max(1) as f64);
    let mut failure = None;
    let ys = integrate_at(
        |s, y: &SVector<f64, 9>| {
            let r = Matrix3::from_column_slice(y.as_slice());
            let om = match omega_spatial(&orbit.three_velocity(s), &orbit.three_velocity_rate(s), gamma) {
                Ok(m) => m,
                Err(e) => {
                    failure = Some(e);
                    Matrix3::zeros()
                }
            };
            SVector::<f64, 9>::from_column_slice((om * r).as_slice())
        },
        SVector::<f64, 9>::from_column_slice(Matrix3::<f64>::identity().as_slice()),
        &[0.0, period],
        &cfg,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let r = Matrix3::from_column_slice(ys[1].as_slice());
    let axial = rate_vector(&(0.5 * (r - r.transpose())));
    let angle = axial.norm().atan2(0.5 * (r.trace() - 1.0));
    Ok(ThomasOrbit {
        speed,
        gamma,
        angle,
        closed_form: 2.0 * std::f64::consts::PI * (gamma - 1.0),
        proper_period: period,
        lab_rate: angle / orbit.lab_period(),
    })
}

/// A BMT run: velocities and polarisations on the output grid plus drift statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct BmtRun {
    pub s: Vec<f64>,
    pub u: Vec<FourVector>,
    pub spin: Vec<FourVector>,
    /// Largest `|u.s|` observed after any step, before projection.
    pub max_orthogonality_drift: f64,
    /// Largest `|s.s - s0.s0|`.
    pub max_norm_drift: f64,
    /// Largest `|u.u + 1|` (co-integration only; zero for analytic worldlines).
    pub max_velocity_drift: f64,
    pub projections: usize,
}

fn project_spin(
    u: &FourVector,
    s: &mut FourVector,
    step_s: f64,
    cfg: &IntegratorConfig,
    projections: &mut usize,
    worst: &mut f64,
) -> Result<()> {
    let drift = dot(u, s).abs();
    *worst = worst.max(drift);
    if drift > cfg.renorm_threshold {
        match cfg.renorm_policy {
            RenormPolicy::ProjectLog => {
                let us = dot(u, s) / -dot(u, u);
                *s += us * *u;
                *projections += 1;
                log::info!("projected spin onto u-orthogonal space at s = {step_s}, |u.s| was {drift:e}");
            }
            RenormPolicy::Error => {
                return Err(Error::DriftExceeded {
                    s: step_s,
                    drift,
                    threshold: cfg.renorm_threshold,
                });
            }
        }
    }
    Ok(())
}

/// Integrates the BMT equation along a given worldline (analytic velocity).
pub fn bmt_integrate(
    state0: &SpinState,
    f: &FieldTensor,
    cp: &ChargeParams,
    wl: &dyn Worldline,
    grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<BmtRun> {
    let Some(&s0) = grid.first() else {
        return Err(Error::InvalidParameter("empty proper-time grid".into()));
    };
    let residual = (wl.velocity(s0) - state0.u).max_abs();
    if residual > 1e-9 * (1.0 + state0.u.max_abs()) {
        return Err(Error::FrameMismatch { residual });
    }
    let norm0 = state0.s.norm_sq();
    let mut projections = 0;
    let mut max_orth: f64 = 0.0;
    let mut max_norm: f64 = 0.0;
    let ys = integrate_at_with_hook(
        |s, y: &SVector<f64, 4>| {
            let st = SpinState {
                u: wl.velocity(s),
                s: FourVector(*y),
            };
            bmt_rhs(&st, f, cp).0
        },
        state0.s.0,
        grid,
        cfg,
        |s, y| {
            let mut spin = FourVector(*y);
            max_norm = max_norm.max((spin.norm_sq() - norm0).abs());
            project_spin(&wl.velocity(s), &mut spin, s, cfg, &mut projections, &mut max_orth)?;
            *y = spin.0;
            Ok(())
        },
    )?;
    Ok(BmtRun {
        s: grid.to_vec(),
        u: grid.iter().map(|&s| wl.velocity(s)).collect(),
        spin: ys.into_iter().map(FourVector).collect(),
        max_orthogonality_drift: max_orth,
        max_norm_drift: max_norm,
        max_velocity_drift: 0.0,
        projections,
    })
}

/// Integrates the Lorentz force and BMT equation together.
pub fn bmt_co_integrate(
    state0: &SpinState,
    f: &FieldTensor,
    cp: &ChargeParams,
    grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<BmtRun> {
    let norm0 = state0.s.norm_sq();
    let mut projections = 0;
    let mut max_orth: f64 = 0.0;
    let mut max_norm: f64 = 0.0;
    let mut max_vel: f64 = 0.0;
    let mut y0 = SVector::<f64, 8>::zeros();
    y0.fixed_rows_mut::<4>(0).copy_from(&state0.u.0);
    y0.fixed_rows_mut::<4>(4).copy_from(&state0.s.0);
    let split = |y: &SVector<f64, 8>| {
        (
            FourVector(y.fixed_rows::<4>(0).into_owned()),
            FourVector(y.fixed_rows::<4>(4).into_owned()),
        )
    };
    let ys = integrate_at_with_hook(
        |_, y: &SVector<f64, 8>| {
            let (u, s) = split(y);
            let mut out = SVector::<f64, 8>::zeros();
            out.fixed_rows_mut::<4>(0).copy_from(&lorentz_force_rhs(&u, f, cp).0);
            out.fixed_rows_mut::<4>(4)
                .copy_from(&bmt_rhs(&SpinState { u, s }, f, cp).0);
            out
        },
        y0,
        grid,
        cfg,
        |s, y| {
            let (u, mut spin) = split(y);
            max_vel = max_vel.max((u.norm_sq() + 1.0).abs());
            max_norm = max_norm.max((spin.norm_sq() - norm0).abs());
            project_spin(&u, &mut spin, s, cfg, &mut projections, &mut max_orth)?;
            y.fixed_rows_mut::<4>(4).copy_from(&spin.0);
            Ok(())
        },
    )?;
    let (us, spins): (Vec<_>, Vec<_>) = ys.iter().map(split).unzip();
    Ok(BmtRun {
        s: grid.to_vec(),
        u: us,
        spin: spins,
        max_orthogonality_drift: max_orth,
        max_norm_drift: max_norm,
        max_velocity_drift: max_vel,
        projections,
    })
}
