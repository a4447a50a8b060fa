//! ODE stepping, frame renormalization and finite differences.

use std::ops::{Add, Mul, Sub};

use nalgebra::SVector;

use crate::error::{Error, Result};
use crate::minkowski::{dot, eta, FourVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    /// Classic fixed-step fourth-order Runge-Kutta.
    #[default]
    Rk4,
    /// Dormand-Prince 5(4) with adaptive step.
    Rk45,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RenormPolicy {
    /// Project back and log the correction.
    #[default]
    ProjectLog,
    /// Fail with [`Error::DriftExceeded`].
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub step: f64,
    pub method: Method,
    pub renorm_threshold: f64,
    pub renorm_policy: RenormPolicy,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            step: 1e-3,
            method: Method::Rk4,
            renorm_threshold: 1e-10,
            renorm_policy: RenormPolicy::ProjectLog,
            rtol: 1e-11,
            atol: 1e-13,
        }
    }
}

impl IntegratorConfig {
    pub fn with_step(step: f64) -> Self {
        IntegratorConfig {
            step,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        positive("step", self.step)?;
        positive("renorm_threshold", self.renorm_threshold)?;
        positive("rtol", self.rtol)?;
        positive("atol", self.atol)
    }
}

/// Smallest step the adaptive integrator may take.
pub const MIN_STEP: f64 = 1e-12;

/// Sampled solution: `y[k]` is the state at `s[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub s: Vec<f64>,
    pub y: Vec<SVector<f64, N>>,
}

impl<const N: usize> Trajectory<N> {
    pub fn last(&self) -> (f64, SVector<f64, N>) {
        let k = self.s.len() - 1;
        (self.s[k], self.y[k])
    }
}

fn rk4_step<const N: usize, F>(rhs: &mut F, s: f64, y: &SVector<f64, N>, h: f64) -> SVector<f64, N>
where
    F: FnMut(f64, &SVector<f64, N>) -> SVector<f64, N>,
{
    let k1 = rhs(s, y);
    let k2 = rhs(s + 0.5 * h, &(y + k1 * (0.5 * h)));
    let k3 = rhs(s + 0.5 * h, &(y + k2 * (0.5 * h)));
    let k4 = rhs(s + h, &(y + k3 * h));
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

// Dormand-Prince tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn dopri_step<const N: usize, F>(rhs: &mut F, s: f64, y: &SVector<f64, N>, h: f64) -> (SVector<f64, N>, SVector<f64, N>)
where
    F: FnMut(f64, &SVector<f64, N>) -> SVector<f64, N>,
{
    let mut k = [SVector::<f64, N>::zeros(); 7];
    for i in 0..7 {
        let mut yi = *y;
        for j in 0..i {
            if A[i][j] != 0.0 {
                yi += k[j] * (h * A[i][j]);
            }
        }
        k[i] = rhs(s + C[i] * h, &yi);
    }
    let mut y5 = *y;
    let mut err = SVector::<f64, N>::zeros();
    for i in 0..7 {
        y5 += k[i] * (h * B5[i]);
        err += k[i] * (h * (B5[i] - B4[i]));
    }
    (y5, err)
}

/// Integrates `dy/ds = rhs(s, y)` from `s0` to `s1`, recording every step.
pub fn integrate<const N: usize, F>(
    rhs: F,
    y0: SVector<f64, N>,
    s0: f64,
    s1: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &SVector<f64, N>) -> SVector<f64, N>,
{
    integrate_with_hook(rhs, y0, s0, s1, cfg, |_, _| Ok(()))
}

/// As [`integrate`], calling `hook(s, &mut y)` after each accepted step. The
/// hook may correct the state in place or abort the run.
pub fn integrate_with_hook<const N: usize, F, H>(
    mut rhs: F,
    y0: SVector<f64, N>,
    s0: f64,
    s1: f64,
    cfg: &IntegratorConfig,
    mut hook: H,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &SVector<f64, N>) -> SVector<f64, N>,
    H: FnMut(f64, &mut SVector<f64, N>) -> Result<()>,
{
    cfg.validate()?;
    if !y0.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFiniteState { s: s0 });
    }
    let mut out = Trajectory {
        s: vec![s0],
        y: vec![y0],
    };
    let span = s1 - s0;
    if span == 0.0 {
        return Ok(out);
    }
    let dir = span.signum();
    match cfg.method {
        Method::Rk4 => {
            let n = (span.abs() / cfg.step).ceil().max(1.0) as usize;
            let h = span / n as f64;
            let mut y = y0;
            for k in 0..n {
                let s = s0 + h * k as f64;
                y = rk4_step(&mut rhs, s, &y, h);
                let s_next = if k + 1 == n { s1 } else { s0 + h * (k + 1) as f64 };
                if !y.iter().all(|v| v.is_finite()) {
                    return Err(Error::NonFiniteState { s: s_next });
                }
                hook(s_next, &mut y)?;
                out.s.push(s_next);
                out.y.push(y);
            }
        }
        Method::Rk45 => {
            let mut s = s0;
            let mut y = y0;
            let mut h = cfg.step.min(span.abs()) * dir;
            while (s1 - s) * dir > 0.0 {
                if (s + h - s1) * dir > 0.0 {
                    h = s1 - s;
                }
                if h.abs() < MIN_STEP && (s1 - s).abs() > MIN_STEP {
                    return Err(Error::StepUnderflow { s, step: h.abs() });
                }
                let (y_new, err) = dopri_step(&mut rhs, s, &y, h);
                if !y_new.iter().all(|v| v.is_finite()) {
                    h *= 0.25;
                    if h.abs() < MIN_STEP {
                        return Err(Error::NonFiniteState { s });
                    }
                    continue;
                }
                let mut e: f64 = 0.0;
                for i in 0..N {
                    let scale = cfg.atol + cfg.rtol * y[i].abs().max(y_new[i].abs());
                    e = e.max(err[i].abs() / scale);
                }
                if e <= 1.0 {
                    s = if (s1 - (s + h)).abs() <= f64::EPSILON * s1.abs().max(1.0) {
                        s1
                    } else {
                        s + h
                    };
                    y = y_new;
                    hook(s, &mut y)?;
                    out.s.push(s);
                    out.y.push(y);
                }
                let factor = if e == 0.0 {
                    5.0
                } else {
                    (0.9 * e.powf(-0.2)).clamp(0.2, 5.0)
                };
                h *= factor;
            }
        }
    }
    Ok(out)
}

/// Integrates through the increasing grid `points`, returning the state at each.
pub fn integrate_at<const N: usize, F>(
    mut rhs: F,
    y0: SVector<f64, N>,
    points: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<SVector<f64, N>>>
where
    F: FnMut(f64, &SVector<f64, N>) -> SVector<f64, N>,
{
    integrate_at_with_hook(&mut rhs, y0, points, cfg, |_, _| Ok(()))
}

/// [`integrate_at`] with a per-step hook.
pub fn integrate_at_with_hook<const N: usize, F, H>(
    mut rhs: F,
    y0: SVector<f64, N>,
    points: &[f64],
    cfg: &IntegratorConfig,
    mut hook: H,
) -> Result<Vec<SVector<f64, N>>>
where
    F: FnMut(f64, &SVector<f64, N>) -> SVector<f64, N>,
    H: FnMut(f64, &mut SVector<f64, N>) -> Result<()>,
{
    let mut out = Vec::with_capacity(points.len());
    let Some(&first) = points.first() else {
        return Ok(out);
    };
    let mut y = y0;
    out.push(y);
    let mut s = first;
    for &next in &points[1..] {
        let run = integrate_with_hook(&mut rhs, y, s, next, cfg, &mut hook)?;
        y = run.last().1;
        out.push(y);
        s = next;
    }
    Ok(out)
}

/// Residual above which [`renormalize_frame`] refuses to correct.
pub const MAX_RENORM_RESIDUAL: f64 = 1e-3;

/// `max_ab |e_a . e_b - eta_ab|`.
pub fn frame_residual(frame: &[FourVector; 4]) -> f64 {
    let mut r: f64 = 0.0;
    for a in 0..4 {
        for b in a..4 {
            r = r.max((dot(&frame[a], &frame[b]) - eta(a, b)).abs());
        }
    }
    r
}

/// Modified Gram-Schmidt in the Minkowski metric, timelike leg first.
/// Returns the corrected frame and the largest component change.
pub fn renormalize_frame(frame: &[FourVector; 4]) -> Result<([FourVector; 4], f64)> {
    let residual = frame_residual(frame);
    if !(residual < MAX_RENORM_RESIDUAL) {
        return Err(Error::TooFarFromOrthonormal { residual });
    }
    let mut out = *frame;
    for k in 0..4 {
        let mut v = out[k];
        for (j, e) in out.iter().enumerate().take(k) {
            v -= (dot(&v, e) * eta(j, j)) * *e;
        }
        let n = dot(&v, &v) * eta(k, k);
        out[k] = v / n.sqrt();
    }
    let correction = (0..4).map(|k| (out[k] - frame[k]).max_abs()).fold(0.0, f64::max);
    if correction > 0.0 {
        log::debug!("frame renormalized, correction {correction:e} (residual {residual:e})");
    }
    Ok((out, correction))
}

/// Packs four frame vectors into a 16-component state.
pub fn frame_to_state(frame: &[FourVector; 4]) -> SVector<f64, 16> {
    let mut y = SVector::<f64, 16>::zeros();
    for (a, e) in frame.iter().enumerate() {
        y.fixed_rows_mut::<4>(4 * a).copy_from(&e.0);
    }
    y
}

pub fn state_to_frame(y: &SVector<f64, 16>) -> [FourVector; 4] {
    std::array::from_fn(|a| FourVector(y.fixed_rows::<4>(4 * a).into_owned()))
}

/// `(f(s + h) - f(s - h)) / 2h`.
pub fn central_diff<T, F>(f: F, s: f64, h: f64) -> T
where
    F: Fn(f64) -> T,
    T: Sub<Output = T> + Mul<f64, Output = T>,
{
    debug_assert!(h > 0.0);
    (f(s + h) - f(s - h)) * (0.5 / h)
}

/// `(f(s + h) - 2 f(s) + f(s - h)) / h^2`.
pub fn second_diff<T, F>(f: F, s: f64, h: f64) -> T
where
    F: Fn(f64) -> T,
    T: Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    debug_assert!(h > 0.0);
    let mid = f(s);
    (f(s + h) + f(s - h) - mid * 2.0) * (1.0 / (h * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Vector1, Vector2};

    #[test]
    fn zero_rhs_keeps_state() {
        let run = integrate(
            |_, _| Vector2::zeros(),
            Vector2::new(1.0, -2.0),
            0.0,
            3.0,
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert!(run.y.iter().all(|y| *y == Vector2::new(1.0, -2.0)));
        assert_eq!(run.last().0, 3.0);
    }

    #[test]
    fn rk4_exponential() {
        let run = integrate(
            |_, y| *y,
            Vector1::new(1.0),
            0.0,
            1.0,
            &IntegratorConfig::with_step(1e-3),
        )
        .unwrap();
        assert!((run.last().1[0] - std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn rk4_backwards() {
        let run = integrate(
            |_, y| *y,
            Vector1::new(1.0),
            0.0,
            -1.0,
            &IntegratorConfig::with_step(1e-3),
        )
        .unwrap();
        assert!((run.last().1[0] - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn rk4_fourth_order() {
        // Harmonic oscillator, compared at t = 10 for three halvings.
        let err = |h: f64| {
            let run = integrate(
                |_, y: &Vector2<f64>| Vector2::new(y[1], -y[0]),
                Vector2::new(1.0, 0.0),
                0.0,
                10.0,
                &IntegratorConfig::with_step(h),
            )
            .unwrap();
            (run.last().1[0] - 10f64.cos()).abs()
        };
        let (e1, e2, e3) = (err(4e-2), err(2e-2), err(1e-2));
        assert!((e1 / e2 - 16.0).abs() < 1.0, "{}", e1 / e2);
        assert!((e2 / e3 - 16.0).abs() < 1.0, "{}", e2 / e3);
    }

    #[test]
    fn dopri_exponential_and_oscillator() {
        let cfg = IntegratorConfig {
            method: Method::Rk45,
            step: 0.1,
            ..Default::default()
        };
        let run = integrate(|_, y| *y, Vector1::new(1.0), 0.0, 1.0, &cfg).unwrap();
        assert_eq!(run.last().0, 1.0);
        assert!((run.last().1[0] - std::f64::consts::E).abs() < 1e-9);
        let osc = integrate(
            |_, y: &Vector2<f64>| Vector2::new(y[1], -y[0]),
            Vector2::new(1.0, 0.0),
            0.0,
            20.0,
            &cfg,
        )
        .unwrap();
        assert!((osc.last().1[0] - 20f64.cos()).abs() < 1e-8);
    }

    #[test]
    fn dopri_underflow_on_blowup() {
        let cfg = IntegratorConfig {
            method: Method::Rk45,
            step: 0.1,
            ..Default::default()
        };
        let r = integrate(
            |_, y: &Vector1<f64>| Vector1::new(y[0] * y[0]),
            Vector1::new(1.0),
            0.0,
            2.0,
            &cfg,
        );
        assert!(
            matches!(r, Err(Error::StepUnderflow { .. }) | Err(Error::NonFiniteState { .. })),
            "{r:?}"
        );
    }

    #[test]
    fn non_finite_state_is_reported() {
        let r = integrate(
            |_, _| Vector1::new(f64::NAN),
            Vector1::new(0.0),
            0.0,
            1.0,
            &IntegratorConfig::default(),
        );
        assert!(matches!(r, Err(Error::NonFiniteState { .. })));
    }

    #[test]
    fn hook_sees_every_step() {
        let mut count = 0;
        let run = integrate_with_hook(
            |_, _| Vector1::new(1.0),
            Vector1::new(0.0),
            0.0,
            1.0,
            &IntegratorConfig::with_step(0.25),
            |_, y| {
                count += 1;
                y[0] = 0.0;
                Ok(())
            },
        )
        .unwrap();
        assert_eq!(count, 4);
        assert_eq!(run.last().1[0], 0.0);
    }

    #[test]
    fn sampled_grid() {
        let pts = [0.0, 0.5, 1.0];
        let ys = integrate_at(|_, y| *y, Vector1::new(1.0), &pts, &IntegratorConfig::with_step(1e-3)).unwrap();
        assert!((ys[1][0] - 0.5f64.exp()).abs() < 1e-12);
        assert!((ys[2][0] - 1f64.exp()).abs() < 1e-12);
    }

    fn boosted() -> [FourVector; 4] {
        let g = 1.25;
        [
            FourVector::new(g, 0.75, 0.0, 0.0),
            FourVector::new(0.75, g, 0.0, 0.0),
            FourVector::basis(2),
            FourVector::basis(3),
        ]
    }

    #[test]
    fn renormalize_orthonormal_is_noop() {
        let f = boosted();
        let (g, corr) = renormalize_frame(&f).unwrap();
        assert!(corr < 1e-15);
        for a in 0..4 {
            assert!((g[a] - f[a]).max_abs() < 1e-15);
        }
    }

    #[test]
    fn renormalize_restores_small_perturbation() {
        let mut f = boosted();
        f[1] += FourVector::new(0.0, 0.0, 1e-8, 0.0);
        let (g, corr) = renormalize_frame(&f).unwrap();
        assert!(frame_residual(&g) < 1e-15);
        assert!(corr > 5e-9 && corr < 2e-8, "{corr}");
        let (h, again) = renormalize_frame(&g).unwrap();
        assert!(again < 1e-15);
        assert!((h[1] - g[1]).max_abs() < 1e-15);
    }

    #[test]
    fn renormalize_refuses_large_error() {
        let mut f = boosted();
        f[2] += FourVector::new(0.0, 0.0, 0.0, 1e-2);
        assert!(matches!(
            renormalize_frame(&f),
            Err(Error::TooFarFromOrthonormal { .. })
        ));
    }

    #[test]
    fn frame_state_round_trip() {
        let f = boosted();
        assert_eq!(state_to_frame(&frame_to_state(&f)), f);
    }

    #[test]
    fn finite_differences() {
        let lin = central_diff(|s| Vector2::new(3.0 * s + 1.0, -2.0 * s), 0.7, 0.1);
        assert!((lin - Vector2::new(3.0, -2.0)).amax() < 1e-14);
        let d = central_diff(|s| Vector1::new(s.sin()), 0.0, 1e-5);
        assert!((d[0] - 1.0).abs() < 1e-10);
        let dd = second_diff(|s| Vector1::new(s.exp()), 0.0, 1e-4);
        assert!((dd[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = IntegratorConfig::with_step(0.0);
        assert!(integrate(|_, y| *y, Vector1::new(1.0), 0.0, 1.0, &cfg).is_err());
    }
}
