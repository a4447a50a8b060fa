//! Frenet-Serret frames of charged worldlines in constant fields.
//!
//! Frame vectors `(u, n, b, c)` obey
//! `udot = a n`, `ndot = a u + tau b`, `bdot = -tau n + sigma c`, `cdot = -sigma b`.
//! With `eta_0123 = +1` these frames have determinant `-1`; that orientation
//! makes the field projections `c F b = B_1`, `n F c = B_2`, `b F n = B_3` hold
//! and makes the decoupled f-frame right-handed.

use nalgebra::{Matrix4, Matrix5, Vector3};

use crate::error::{Error, Result};
use crate::minkowski::{dot, EpsilonConvention, FieldTensor, FourVector, Tetrad, UNIT_TOLERANCE};
use crate::worldline::Worldline;

/// Relative tolerance for the degeneracy of the spectrum.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;
/// Absolute tolerance below which a curvature, rate or mixing parameter counts as zero.
pub const ZERO_TOLERANCE: f64 = 1e-12;
/// Orthonormality tolerance for frames (scaled by the largest component squared).
pub const FRAME_TOLERANCE: f64 = 1e-9;

/// Curvature, torsion and signed third curvature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureTriple {
    pub a: f64,
    pub tau: f64,
    pub sigma: f64,
}

impl CurvatureTriple {
    pub fn new(a: f64, tau: f64, sigma: f64) -> Result<Self> {
        if !(a.is_finite() && tau.is_finite() && sigma.is_finite()) {
            return Err(Error::NonFinite);
        }
        if a < 0.0 || tau < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "curvature and torsion must be nonnegative, got a = {a}, tau = {tau}"
            )));
        }
        Ok(CurvatureTriple { a, tau, sigma })
    }

    /// Sign of `sigma`, `+1` when `sigma >= 0`.
    pub fn epsilon(&self) -> f64 {
        if self.sigma < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

/// Roots `+-chi`, `+-i omega` of the characteristic quartic and the mixing
/// parameters `Gamma^2 - Lambda^2 = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralSplit {
    pub chi: f64,
    pub omega: f64,
    pub delta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub epsilon: f64,
}

impl SpectralSplit {
    /// Largest violation of the defining identities, relative to `a^2 + tau^2 + sigma^2`.
    pub fn identity_residual(&self, k: &CurvatureTriple) -> f64 {
        let (a, t, g) = (k.a, k.tau, k.sigma);
        let (x2, w2) = (self.chi * self.chi, self.omega * self.omega);
        let scale = 1.0 + a * a + t * t + g * g;
        let (gg, ll) = (self.gamma * self.gamma, self.lambda * self.lambda);
        [
            (x2 - w2 - (a * a - t * t - g * g)) / scale,
            (a * g - self.epsilon * self.omega * self.chi) / scale,
            (x2 + w2 - self.delta) / scale,
            gg - ll - 1.0,
            (a * a - gg * x2 - ll * w2) / scale,
            (a * t - self.gamma * self.lambda * (x2 + w2)) / scale,
        ]
        .iter()
        .fold(0.0f64, |m, r| m.max(r.abs()))
    }
}

/// Eigen-analysis of the Frenet connection matrix.
///
/// Uses `chi^2 = [(a^2-tau^2-sigma^2) + Delta]/2` and
/// `omega^2 = [Delta - (a^2-tau^2-sigma^2)]/2`, evaluated in cancellation-free form.
pub fn spectral_split(k: &CurvatureTriple) -> Result<SpectralSplit> {
    let (a2, t2, s2) = (k.a * k.a, k.tau * k.tau, k.sigma * k.sigma);
    let d = a2 - t2 - s2;
    let sum = a2 + t2 + s2;
    let delta = d.hypot(2.0 * k.a * k.sigma);
    if !(delta > DEGENERACY_TOLERANCE * sum) {
        return Err(Error::DegenerateSpectrum { delta });
    }
    // chi^2 omega^2 = a^2 sigma^2 recovers the smaller root without cancellation.
    let product = a2 * s2;
    let (chi2, omega2) = if d >= 0.0 {
        let chi2 = 0.5 * (d + delta);
        (chi2, product / chi2)
    } else {
        let omega2 = 0.5 * (delta - d);
        (product / omega2, omega2)
    };
    let gamma2 = (sum + delta) / (2.0 * delta);
    let lambda2 = 2.0 * a2 * t2 / ((sum + delta) * delta);
    Ok(SpectralSplit {
        chi: chi2.sqrt(),
        omega: omega2.sqrt(),
        delta,
        gamma: gamma2.sqrt(),
        lambda: lambda2.sqrt(),
        epsilon: k.epsilon(),
    })
}

/// `(u, n, b, c)` with `u` unit future timelike and the rest unit spacelike.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrenetFrame {
    pub u: FourVector,
    pub n: FourVector,
    pub b: FourVector,
    pub c: FourVector,
}

fn frame_scale(v: &[FourVector; 4]) -> f64 {
    let m = v.iter().fold(1.0f64, |m, x| m.max(x.max_abs()));
    m * m
}

fn gram_residual(v: &[FourVector; 4]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in i..4 {
            let target = if i != j {
                0.0
            } else if i == 0 {
                -1.0
            } else {
                1.0
            };
            worst = worst.max((dot(&v[i], &v[j]) - target).abs());
        }
    }
    worst
}

fn determinant(v: &[FourVector; 4]) -> f64 {
    Matrix4::from_columns(&[v[0].0, v[1].0, v[2].0, v[3].0]).determinant()
}

impl FrenetFrame {
    /// Validates orthonormality (relative to the squared component scale) and orientation.
    pub fn new(u: FourVector, n: FourVector, b: FourVector, c: FourVector) -> Result<Self> {
        let frame = FrenetFrame { u, n, b, c };
        let v = frame.vectors();
        if !v.iter().all(FourVector::is_finite) {
            return Err(Error::NonFinite);
        }
        if u.time() <= 0.0 {
            return Err(Error::PastPointing { time: u.time() });
        }
        let residual = frame.orthonormality_residual();
        if residual > FRAME_TOLERANCE {
            return Err(Error::NotOrthonormal { residual });
        }
        if determinant(&v) > 0.0 {
            return Err(Error::InvalidParameter("Frenet frame must have determinant -1".into()));
        }
        Ok(frame)
    }

    pub fn vectors(&self) -> [FourVector; 4] {
        [self.u, self.n, self.b, self.c]
    }

    pub fn tetrad(&self) -> Result<Tetrad> {
        Tetrad::new(self.vectors())
    }

    /// Gram residual divided by the squared largest component.
    pub fn orthonormality_residual(&self) -> f64 {
        let v = self.vectors();
        gram_residual(&v) / frame_scale(&v)
    }

    pub fn determinant(&self) -> f64 {
        determinant(&self.vectors())
    }
}

/// Frenet-Serret derivatives `(udot, ndot, bdot, cdot)`.
pub fn frenet_rhs(frame: &FrenetFrame, k: &CurvatureTriple) -> [FourVector; 4] {
    let FrenetFrame { u, n, b, c } = *frame;
    [k.a * n, k.a * u + k.tau * b, -k.tau * n + k.sigma * c, -k.sigma * b]
}

fn require_curvature(k: &CurvatureTriple) -> Result<()> {
    if !(k.a > ZERO_TOLERANCE) {
        return Err(Error::ZeroCurvature { a: k.a });
    }
    Ok(())
}

/// Decoupled frame `f0 = Gamma u + Lambda b`, `f1 = Lambda u + Gamma b`,
/// `f2 = [Gamma chi n + eps Lambda omega c]/a`, `f3 = [-eps Lambda omega n + Gamma chi c]/a`.
pub fn f_frame(frame: &FrenetFrame, split: &SpectralSplit, k: &CurvatureTriple) -> Result<[FourVector; 4]> {
    require_curvature(k)?;
    let FrenetFrame { u, n, b, c } = *frame;
    let (g, l, e) = (split.gamma, split.lambda, split.epsilon);
    let (gx, lw) = (g * split.chi / k.a, e * l * split.omega / k.a);
    Ok([g * u + l * b, l * u + g * b, gx * n + lw * c, -lw * n + gx * c])
}

fn from_f_frame(f: &[FourVector; 4], split: &SpectralSplit, k: &CurvatureTriple) -> FrenetFrame {
    let (g, l, e) = (split.gamma, split.lambda, split.epsilon);
    let (gx, lw) = (g * split.chi / k.a, e * l * split.omega / k.a);
    FrenetFrame {
        u: g * f[0] - l * f[1],
        b: -l * f[0] + g * f[1],
        n: gx * f[2] - lw * f[3],
        c: lw * f[2] + gx * f[3],
    }
}

/// Evolves the f-frame: a hyperbolic rotation by `chi s` in `(f0, f2)` and a
/// circular rotation by `eps omega s` in `(f1, f3)`.
fn evolve_f(f: &[FourVector; 4], split: &SpectralSplit, s: f64) -> [FourVector; 4] {
    let (sh, ch) = ((split.chi * s).sinh(), (split.chi * s).cosh());
    let (sn, cs) = (split.epsilon * split.omega * s).sin_cos();
    [
        ch * f[0] + sh * f[2],
        cs * f[1] + sn * f[3],
        sh * f[0] + ch * f[2],
        -sn * f[1] + cs * f[3],
    ]
}

/// Closed-form solution of the Frenet-Serret system after proper time `s`.
pub fn propagate_exact(frame0: &FrenetFrame, k: &CurvatureTriple, s: f64) -> Result<FrenetFrame> {
    let split = spectral_split(k)?;
    let f = f_frame(frame0, &split, k)?;
    Ok(from_f_frame(&evolve_f(&f, &split, s), &split, k))
}

/// `sinh(x)/x`.
fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0)
    } else {
        x.sinh() / x
    }
}

/// `(cosh(x) - 1)/x`.
fn coshc(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        x / 2.0 * (1.0 + x2 / 12.0)
    } else {
        (x.cosh() - 1.0) / x
    }
}

/// `sin(x)/x`.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// `(1 - cos(x))/x`.
fn versc(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        x / 2.0 * (1.0 - x2 / 12.0)
    } else {
        (1.0 - x.cos()) / x
    }
}

/// Displacement `x(s) - x(0)`, the exact integral of `u` along [`propagate_exact`].
pub fn displacement_exact(frame0: &FrenetFrame, k: &CurvatureTriple, s: f64) -> Result<FourVector> {
    let split = spectral_split(k)?;
    let f = f_frame(frame0, &split, k)?;
    let hyper = split.chi * s;
    let circ = split.epsilon * split.omega * s;
    let int_f0 = s * (sinhc(hyper) * f[0] + coshc(hyper) * f[2]);
    let int_f1 = s * (sinc(circ) * f[1] + versc(circ) * f[3]);
    Ok(split.gamma * int_f0 - split.lambda * int_f1)
}

/// Drift centre `y = x + (a/omega^2) n` and its velocity `(a tau/(Lambda omega^2)) f0`.
pub fn drift_center(
    x: &FourVector,
    frame: &FrenetFrame,
    k: &CurvatureTriple,
    split: &SpectralSplit,
) -> Result<(FourVector, FourVector)> {
    if !(split.omega > ZERO_TOLERANCE) {
        return Err(Error::ZeroOmega);
    }
    if !(split.lambda > ZERO_TOLERANCE) {
        return Err(Error::ZeroLambda);
    }
    let f = f_frame(frame, split, k)?;
    let w2 = split.omega * split.omega;
    let y = *x + (k.a / w2) * frame.n;
    let ydot = (k.a * k.tau / (split.lambda * w2)) * f[0];
    Ok((y, ydot))
}

/// Residuals of the second-derivative identities, `None` where an identity
/// is indeterminate (division by a vanishing `Lambda`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UddReport {
    /// `uddot + omega^2 u = (a tau/Lambda) f0`.
    pub u_plus: Option<f64>,
    /// `uddot - chi^2 u = (a tau/Gamma) f1`.
    pub u_minus: f64,
    /// `nddot + omega^2 n = (Gamma chi/a)(chi^2 + omega^2) f2`.
    pub n_plus: f64,
    /// `nddot - chi^2 n = eps (Lambda omega/a)(chi^2 + omega^2) f3`.
    pub n_minus: f64,
}

impl UddReport {
    pub fn max_residual(&self) -> f64 {
        [self.u_plus.unwrap_or(0.0), self.u_minus, self.n_plus, self.n_minus]
            .iter()
            .fold(0.0f64, |m, r| m.max(*r))
    }

    pub fn skipped(&self) -> bool {
        self.u_plus.is_none()
    }
}

/// Evaluates the identities with `uddot`, `nddot` from the Frenet-Serret system.
pub fn udd_identities(frame: &FrenetFrame, k: &CurvatureTriple, split: &SpectralSplit) -> Result<UddReport> {
    let f = f_frame(frame, split, k)?;
    let FrenetFrame { u, n, b, c } = *frame;
    let (a, t, sg) = (k.a, k.tau, k.sigma);
    let (x2, w2) = (split.chi * split.chi, split.omega * split.omega);
    let udd = a * a * u + a * t * b;
    let ndd = (a * a - t * t) * n + t * sg * c;
    let res = |lhs: FourVector, rhs: FourVector| (lhs - rhs).max_abs();
    let u_plus = if split.lambda > ZERO_TOLERANCE {
        Some(res(udd + w2 * u, (a * t / split.lambda) * f[0]))
    } else {
        None
    };
    Ok(UddReport {
        u_plus,
        u_minus: res(udd - x2 * u, (a * t / split.gamma) * f[1]),
        n_plus: res(ndd + w2 * n, (split.gamma * split.chi / a) * split.delta * f[2]),
        n_minus: res(
            ndd - x2 * n,
            (split.epsilon * split.lambda * split.omega / a) * split.delta * f[3],
        ),
    })
}

/// Removes the components of `v` along the mutually orthogonal unit vectors `basis`.
fn orthogonalize(v: &FourVector, basis: &[FourVector]) -> FourVector {
    basis.iter().fold(*v, |acc, e| acc - (dot(&acc, e) / dot(e, e)) * *e)
}

fn unit_spacelike(v: &FourVector) -> FourVector {
    *v * (1.0 / v.norm_sq().sqrt())
}

/// Completes orthonormal `basis` with the canonical axis that survives projection best.
fn complete(basis: &[FourVector]) -> FourVector {
    (1..4)
        .map(|i| orthogonalize(&FourVector::basis(i), basis))
        .max_by(|x, y| x.norm_sq().total_cmp(&y.norm_sq()))
        .map(|v| unit_spacelike(&orthogonalize(&v, basis)))
        .expect("three candidate axes")
}

/// Curvatures and Frenet frame at `u0` of a charge with `udot = kq F u`.
///
/// When the torsion vanishes the `(b, c)` pair is completed from the canonical
/// axes and `sigma` is read off that completion; see
/// [`curvatures_from_field_strict`] to reject that case.
pub fn curvatures_from_field(f: &FieldTensor, u0: &FourVector, kq: f64) -> Result<(CurvatureTriple, FrenetFrame)> {
    u0.check_unit_future_timelike(UNIT_TOLERANCE)?;
    let scale = kq.abs() * f.max_abs() * (1.0 + u0.max_abs()).powi(2);
    let zero = ZERO_TOLERANCE * scale.max(1.0);
    let generator = |x: &FourVector| kq * f.apply(x);

    let u = u0.normalized_timelike()?;
    let udot = orthogonalize(&generator(&u), &[u]);
    let a = udot.norm_sq().max(0.0).sqrt();
    if !(a > zero) {
        return Err(Error::ZeroCurvature { a });
    }
    let n = unit_spacelike(&orthogonalize(&udot, &[u]));

    let w = orthogonalize(&generator(&n), &[u, n]);
    let tau_raw = w.norm_sq().max(0.0).sqrt();
    let (tau, b) = if tau_raw > zero {
        (tau_raw, unit_spacelike(&w))
    } else {
        (0.0, complete(&[u, n]))
    };

    let z = orthogonalize(&generator(&b), &[u, n, b]);
    let mut c = if z.norm_sq().sqrt() > zero {
        unit_spacelike(&z)
    } else {
        complete(&[u, n, b])
    };
    if determinant(&[u, n, b, c]) > 0.0 {
        c = -c;
    }
    let sigma = dot(&c, &generator(&b));
    let k = CurvatureTriple::new(a, tau, if sigma.abs() > zero { sigma } else { 0.0 })?;
    Ok((k, FrenetFrame::new(u, n, b, c)?))
}

/// As [`curvatures_from_field`] but fails with `DegenerateTorsion` when `tau` vanishes.
pub fn curvatures_from_field_strict(
    f: &FieldTensor,
    u0: &FourVector,
    kq: f64,
) -> Result<(CurvatureTriple, FrenetFrame)> {
    let (k, frame) = curvatures_from_field(f, u0, kq)?;
    if k.tau == 0.0 {
        return Err(Error::DegenerateTorsion { tau: 0.0 });
    }
    Ok((k, frame))
}

fn require_hypothesis(k: &CurvatureTriple, kq: f64) -> Result<()> {
    if kq == 0.0 || !kq.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "charge ratio must be finite and nonzero, got {kq}"
        )));
    }
    let value = k.a * k.tau;
    if !(value > ZERO_TOLERANCE) {
        return Err(Error::HypothesisViolated { value });
    }
    Ok(())
}

/// Constant-field components on the Frenet triad `(n, b, c)`:
/// `E = (a/kq, 0, 0)`, `B = (sigma/kq, 0, tau/kq)`.
pub fn field_on_frenet_constant(k: &CurvatureTriple, kq: f64) -> Result<(Vector3<f64>, Vector3<f64>)> {
    require_hypothesis(k, kq)?;
    Ok((
        Vector3::new(k.a / kq, 0.0, 0.0),
        Vector3::new(k.sigma / kq, 0.0, k.tau / kq),
    ))
}

/// Magnetic components on `(n, b, c)` for a field with proper-time
/// derivatives `fdot`, `fddot` along the worldline:
/// `B2 = c Fdot u / a`, `B3 = tau/kq - b Fddot u / a`,
/// `B1 = sigma/kq - [2a c Fdot n + c Fddot u - adot B2]/(a tau)`.
///
/// The torsion rate enters only through the supplied field derivatives.
pub fn magnetic_components_general(
    fdot: &FieldTensor,
    fddot: &FieldTensor,
    frame: &FrenetFrame,
    k: &CurvatureTriple,
    adot: f64,
    kq: f64,
) -> Result<Vector3<f64>> {
    require_hypothesis(k, kq)?;
    let FrenetFrame { u, n, b, c } = *frame;
    let b2 = fdot.bilinear(&c, &u) / k.a;
    let b3 = k.tau / kq - fddot.bilinear(&b, &u) / k.a;
    let b1 = k.sigma / kq - (2.0 * k.a * fdot.bilinear(&c, &n) + fddot.bilinear(&c, &u) - adot * b2) / (k.a * k.tau);
    Ok(Vector3::new(b1, b2, b3))
}

/// Assembles `F^{ab} = eta^{abmn} u_m B_n + u^a E^b - u^b E^a` from components
/// of `E` and `B` on the spatial legs of `frame`, whose time leg must be `u`.
pub fn reconstruct_field(u: &FourVector, e: &Vector3<f64>, b: &Vector3<f64>, frame: &Tetrad) -> Result<FieldTensor> {
    let residual = (frame.e(0) - *u).max_abs();
    if residual > UNIT_TOLERANCE * (1.0 + u.max_abs()) {
        return Err(Error::FrameMismatch { residual });
    }
    let spatial = frame.spatial();
    let combine = |w: &Vector3<f64>| w[0] * spatial[0] + w[1] * spatial[1] + w[2] * spatial[2];
    let (ev, bv) = (combine(e), combine(b));
    let (ul, bl) = (u.lower().0, bv.lower().0);
    let eta = EpsilonConvention::LowerPositive;
    let m = Matrix4::from_fn(|i, j| {
        let mut magnetic = 0.0;
        for p in 0..4 {
            for q in 0..4 {
                magnetic += eta.upper(i, j, p, q) * ul[p] * bl[q];
            }
        }
        magnetic + u[i] * ev[j] - u[j] * ev[i]
    });
    FieldTensor::from_matrix(&m, 1e-9 * (1.0 + m.amax()))
}

/// `B_n = -1/2 eta_npqr u^p F^{qr}` as a contravariant vector.
pub fn magnetic_vector(f: &FieldTensor, u: &FourVector) -> FourVector {
    let eta = EpsilonConvention::LowerPositive;
    let fm = f.matrix();
    let mut lowered = nalgebra::Vector4::zeros();
    for n in 0..4 {
        let mut acc = 0.0;
        for p in 0..4 {
            for q in 0..4 {
                for r in 0..4 {
                    acc += eta.lower(n, p, q, r) * u[p] * fm[(q, r)];
                }
            }
        }
        lowered[n] = -0.5 * acc;
    }
    crate::minkowski::Covector(lowered).raise()
}

/// Worldline of a charge with `udot = kq F u` in a constant field.
///
/// Uses the closed-form Frenet propagation when the curvature and spectrum
/// allow it and the exponential of `kq F` otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantFieldWorldline {
    origin: FourVector,
    u0: FourVector,
    route: Route,
}

#[derive(Clone, Debug, PartialEq)]
enum Route {
    Frenet { frame0: FrenetFrame, k: CurvatureTriple },
    Exponential { generator: Matrix4<f64> },
}

impl ConstantFieldWorldline {
    pub fn new(f: &FieldTensor, origin: FourVector, u0: FourVector, kq: f64) -> Result<Self> {
        u0.check_unit_future_timelike(UNIT_TOLERANCE)?;
        if !origin.is_finite() || !kq.is_finite() {
            return Err(Error::NonFinite);
        }
        let route = match curvatures_from_field(f, &u0, kq) {
            Ok((k, frame0)) if spectral_split(&k).is_ok() => Route::Frenet { frame0, k },
            Ok(_) | Err(Error::ZeroCurvature { .. }) => Route::Exponential {
                generator: kq * f.mixed(),
            },
            Err(e) => return Err(e),
        };
        Ok(ConstantFieldWorldline { origin, u0, route })
    }

    /// Curvatures and initial frame when the closed-form route is in use.
    pub fn frenet(&self) -> Option<(CurvatureTriple, FrenetFrame)> {
        match &self.route {
            Route::Frenet { frame0, k } => Some((*k, *frame0)),
            Route::Exponential { .. } => None,
        }
    }

    /// Frenet frame at proper time `s` (closed-form route only).
    pub fn frame_at(&self, s: f64) -> Option<FrenetFrame> {
        self.frenet()
            .map(|(k, frame0)| propagate_exact(&frame0, &k, s).expect("split checked at construction"))
    }

    pub fn uses_closed_form(&self) -> bool {
        matches!(self.route, Route::Frenet { .. })
    }
}

impl Worldline for ConstantFieldWorldline {
    fn position(&self, s: f64) -> FourVector {
        match &self.route {
            Route::Frenet { frame0, k } => {
                self.origin + displacement_exact(frame0, k, s).expect("split checked at construction")
            }
            Route::Exponential { generator } => {
                let mut aug = Matrix5::zeros();
                aug.fixed_view_mut::<4, 4>(0, 0).copy_from(&(generator * s));
                aug.fixed_view_mut::<4, 1>(0, 4).copy_from(&(self.u0.0 * s));
                let flow = aug.exp();
                self.origin + FourVector(flow.fixed_view::<4, 1>(0, 4).into_owned())
            }
        }
    }

    fn velocity(&self, s: f64) -> FourVector {
        match &self.route {
            Route::Frenet { frame0, k } => propagate_exact(frame0, k, s).expect("split checked at construction").u,
            Route::Exponential { generator } => FourVector((generator * s).exp() * self.u0.0),
        }
    }

    fn acceleration(&self, s: f64) -> FourVector {
        match &self.route {
            Route::Frenet { frame0, k } => {
                k.a * propagate_exact(frame0, k, s).expect("split checked at construction").n
            }
            Route::Exponential { generator } => FourVector(generator * self.velocity(s).0),
        }
    }
}
