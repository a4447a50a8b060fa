//! Galilean rotating frames and Franklin's relativistic rotation transformation.
//!
//! Unlike the rest of the crate, this module keeps `c` explicit so the
//! Newtonian limit can be dialled in.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Matrix3, Matrix4, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::minkowski::{FourVector, Tetrad};

/// Orthogonality tolerance for rotation matrices.
pub const ORTHOGONAL_TOLERANCE: f64 = 1e-9;

/// Velocity seen from a rotating frame: `v' = R v + Rdot x`.
pub fn galilean_rotating_velocity(
    x: &Vector3<f64>,
    v: &Vector3<f64>,
    rot: &Matrix3<f64>,
    rot_rate: &Matrix3<f64>,
) -> Result<Vector3<f64>> {
    let residual = (rot.transpose() * rot - Matrix3::identity()).amax();
    if residual > ORTHOGONAL_TOLERANCE {
        return Err(Error::NotOrthogonal { residual });
    }
    Ok(rot * v + rot_rate * x)
}

/// Acceleration in the rotating frame,
/// `a' = a + 2 w v' + (wdot + w w) x'`, all in rotating-frame components.
pub fn galilean_rotating_acceleration(
    x: &Vector3<f64>,
    v: &Vector3<f64>,
    omega: &Matrix3<f64>,
    omega_rate: &Matrix3<f64>,
    accel: &Vector3<f64>,
) -> Result<Vector3<f64>> {
    let residual = (omega + omega.transpose()).amax();
    if residual > ORTHOGONAL_TOLERANCE {
        return Err(Error::NotAntisymmetric { residual });
    }
    Ok(accel + 2.0 * omega * v + (omega_rate + omega * omega) * x)
}

/// Frame turning at rate `omega` about z, seen at time `t`.
/// Returns `(R, Rdot, w)` with `R` taking lab components to rotating ones and
/// `w = R^T Rdot`.
pub fn uniform_z_rotation(omega: f64, t: f64) -> (Matrix3<f64>, Matrix3<f64>, Matrix3<f64>) {
    let (s, c) = (omega * t).sin_cos();
    let rot = Matrix3::new(c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0);
    let rot_rate = omega * Matrix3::new(-s, c, 0.0, -c, -s, 0.0, 0.0, 0.0, 0.0);
    let w = rot.transpose() * rot_rate;
    (rot, rot_rate, w)
}

/// Event in cylindrical coordinates with `x0 = c t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylEvent {
    pub x0: f64,
    pub r: f64,
    pub theta: f64,
    pub z: f64,
}

impl CylEvent {
    pub fn new(x0: f64, r: f64, theta: f64, z: f64) -> Result<Self> {
        if !(r >= 0.0) {
            return Err(Error::ZeroRadius { r });
        }
        Ok(CylEvent { x0, r, theta, z })
    }

    pub fn cartesian(&self) -> FourVector {
        FourVector::new(self.x0, self.r * self.theta.cos(), self.r * self.theta.sin(), self.z)
    }

    pub fn plane(&self) -> PlaneEvent {
        PlaneEvent {
            x0: self.x0,
            theta: self.theta,
        }
    }
}

/// The two variables the rotation map acts on. `r` and `z` live in [`RotationParams`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneEvent {
    pub x0: f64,
    pub theta: f64,
}

impl PlaneEvent {
    pub fn new(x0: f64, theta: f64) -> Self {
        PlaneEvent { x0, theta }
    }
}

/// Angular velocity, light speed and the fixed radius and height.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationParams {
    omega: f64,
    c: f64,
    r: f64,
    z: f64,
}

impl RotationParams {
    pub fn new(omega: f64, c: f64, r: f64, z: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::ZeroRadius { r });
        }
        if !(omega * r / c).is_finite() || !z.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(RotationParams { omega, c, r, z })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Rapidity `omega r / c`.
    pub fn alpha(&self) -> f64 {
        self.omega * self.r / self.c
    }

    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        RotationParams::new(omega, self.c, self.r, self.z)
    }
}

/// `theta' = theta cosh a - (x0/r) sinh a`, `x0' = x0 cosh a - r theta sinh a`.
pub fn rrt_map(ev: PlaneEvent, p: &RotationParams) -> PlaneEvent {
    let (sh, ch) = (p.alpha().sinh(), p.alpha().cosh());
    PlaneEvent {
        x0: ev.x0 * ch - p.r * ev.theta * sh,
        theta: ev.theta * ch - (ev.x0 / p.r) * sh,
    }
}

/// Two-dimensional interval `-(dx0)^2 + (r dtheta)^2`.
pub fn plane_interval(a: PlaneEvent, b: PlaneEvent, r: f64) -> f64 {
    let dt = b.x0 - a.x0;
    let dl = r * (b.theta - a.theta);
    -dt * dt + dl * dl
}

/// Interval between two events before and after the map.
pub fn rrt_preserves_interval(a: PlaneEvent, b: PlaneEvent, p: &RotationParams) -> (f64, f64) {
    (
        plane_interval(a, b, p.r),
        plane_interval(rrt_map(a, p), rrt_map(b, p), p.r),
    )
}

/// `|theta'_rrt - (theta - omega t)|` at lab time `t`.
pub fn galilean_deviation(theta: f64, t: f64, p: &RotationParams) -> f64 {
    let image = rrt_map(PlaneEvent::new(p.c * t, theta), p);
    (image.theta - (theta - p.omega * t)).abs()
}

/// Rim speed `c tanh(omega r / c)`.
pub fn rim_speed(omega: f64, r: f64, c: f64) -> f64 {
    c * (omega * r / c).tanh()
}

/// Rotating observer's tetrad in the `(x0, r, theta, z)` coordinate basis,
/// orthonormal for `-dx0^2 + dr^2 + r^2 dtheta^2 + dz^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RrtTetrad {
    r: f64,
    alpha: f64,
    vectors: [Vector4<f64>; 4],
}

impl RrtTetrad {
    pub fn vector(&self, h: usize) -> Vector4<f64> {
        self.vectors[h]
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn metric(&self) -> Matrix4<f64> {
        Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, self.r * self.r, 1.0))
    }

    /// Gram matrix of the frame in the cylindrical metric.
    pub fn gram(&self) -> Matrix4<f64> {
        let m = Matrix4::from_columns(&self.vectors);
        m.transpose() * self.metric() * m
    }

    pub fn orthonormality_residual(&self) -> f64 {
        let eta = Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, 1.0, 1.0));
        (self.gram() - eta).amax()
    }

    /// Angular velocity `d theta / d x0` of the frame's time leg.
    pub fn angular_velocity(&self) -> f64 {
        self.vectors[0][2] / self.vectors[0][0]
    }

    /// The same frame in Cartesian components at azimuth `theta`.
    pub fn to_cartesian(&self, theta: f64) -> Result<Tetrad> {
        let (s, c) = theta.sin_cos();
        let mut jac = Matrix4::zeros();
        jac[(0, 0)] = 1.0;
        jac[(1, 1)] = c;
        jac[(2, 1)] = s;
        jac[(1, 2)] = -self.r * s;
        jac[(2, 2)] = self.r * c;
        jac[(3, 3)] = 1.0;
        let cols = self.vectors.map(|v| FourVector(jac * v));
        Tetrad::new(cols)
    }
}

/// Tetrad of the co-rotating observer at radius `p.r`.
pub fn rrt_tetrad(p: &RotationParams) -> Result<RrtTetrad> {
    rrt_tetrad_at(p.r, p.alpha())
}

/// [`rrt_tetrad`] from radius and rapidity directly.
pub fn rrt_tetrad_at(r: f64, alpha: f64) -> Result<RrtTetrad> {
    if !(r > 0.0) {
        return Err(Error::ZeroRadius { r });
    }
    let (sh, ch) = (alpha.sinh(), alpha.cosh());
    Ok(RrtTetrad {
        r,
        alpha,
        vectors: [
            Vector4::new(ch, 0.0, sh / r, 0.0),
            Vector4::new(0.0, 1.0, 0.0, 0.0),
            Vector4::new(sh, 0.0, ch / r, 0.0),
            Vector4::new(0.0, 0.0, 0.0, 1.0),
        ],
    })
}

/// Polynomial in four variables: exponent tuple to coefficient.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly(BTreeMap<[u32; 4], f64>);

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: f64) -> Self {
        Poly::monomial(c, [0; 4])
    }

    pub fn monomial(c: f64, powers: [u32; 4]) -> Self {
        let mut p = Poly::zero();
        p.add_term(c, powers);
        p
    }

    /// Coefficient times a single coordinate.
    pub fn linear(c: f64, var: usize) -> Self {
        let mut powers = [0; 4];
        powers[var] = 1;
        Poly::monomial(c, powers)
    }

    fn add_term(&mut self, c: f64, powers: [u32; 4]) {
        if c == 0.0 {
            return;
        }
        let entry = self.0.entry(powers).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.0.remove(&powers);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; 4], &f64)> {
        self.0.iter()
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero();
        for (pw, c) in &self.0 {
            if pw[var] > 0 {
                let mut q = *pw;
                q[var] -= 1;
                out.add_term(c * pw[var] as f64, q);
            }
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (pa, ca) in &self.0 {
            for (pb, cb) in &other.0 {
                let q = [pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2], pa[3] + pb[3]];
                out.add_term(ca * cb, q);
            }
        }
        out
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (p, c) in &other.0 {
            out.add_term(*c, *p);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (p, c) in &other.0 {
            out.add_term(-*c, *p);
        }
        out
    }

    pub fn scale(&self, k: f64) -> Poly {
        let mut out = Poly::zero();
        for (p, c) in &self.0 {
            out.add_term(c * k, *p);
        }
        out
    }

    pub fn eval(&self, x: &[f64; 4]) -> f64 {
        self.0
            .iter()
            .map(|(p, c)| c * (0..4).map(|k| x[k].powi(p[k] as i32)).product::<f64>())
            .sum()
    }
}

/// Vector field with polynomial components.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VectorField(pub [Poly; 4]);

impl VectorField {
    pub fn constant(c: [f64; 4]) -> Self {
        VectorField(c.map(Poly::constant))
    }

    pub fn scaled(&self, k: f64) -> VectorField {
        VectorField(std::array::from_fn(|i| self.0[i].scale(k)))
    }

    /// `[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i`.
    pub fn bracket(&self, other: &VectorField) -> VectorField {
        let comp = |i: usize| {
            let mut acc = Poly::zero();
            for j in 0..4 {
                acc = acc.add(&self.0[j].mul(&other.0[i].derivative(j)));
                acc = acc.sub(&other.0[j].mul(&self.0[i].derivative(j)));
            }
            acc
        };
        VectorField([comp(0), comp(1), comp(2), comp(3)])
    }

    pub fn eval(&self, x: &[f64; 4]) -> Vector4<f64> {
        Vector4::new(
            self.0[0].eval(x),
            self.0[1].eval(x),
            self.0[2].eval(x),
            self.0[3].eval(x),
        )
    }
}

/// `c[i][j]` holds the coefficients of `[X_i, X_j]` in the basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureConstants {
    pub c: [[Vector3<f64>; 3]; 3],
}

/// Residual above which a bracket counts as outside the span.
pub const SPAN_TOLERANCE: f64 = 1e-12;

fn decompose_in_basis(target: &VectorField, basis: &[VectorField; 3]) -> Result<Vector3<f64>> {
    let mut keys: Vec<(usize, [u32; 4])> = Vec::new();
    for f in basis.iter().chain(std::iter::once(target)) {
        for (i, p) in f.0.iter().enumerate() {
            for (pw, _) in p.terms() {
                if !keys.contains(&(i, *pw)) {
                    keys.push((i, *pw));
                }
            }
        }
    }
    if keys.is_empty() {
        return Ok(Vector3::zeros());
    }
    let coeff = |f: &VectorField, (i, pw): &(usize, [u32; 4])| f.0[*i].0.get(pw).copied().unwrap_or(0.0);
    let a = DMatrix::from_fn(keys.len(), 3, |k, j| coeff(&basis[j], &keys[k]));
    let b = DVector::from_fn(keys.len(), |k, _| coeff(target, &keys[k]));
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&b, 1e-14).map_err(|_| Error::NotInSpan {
        residual: f64::INFINITY,
    })?;
    let residual = (&a * &x - &b).amax();
    if residual > SPAN_TOLERANCE {
        return Err(Error::NotInSpan { residual });
    }
    Ok(Vector3::new(x[0], x[1], x[2]))
}

/// Structure constants of the algebra spanned by `basis`, or
/// [`Error::NotInSpan`] if some bracket leaves it.
pub fn structure_constants(basis: &[VectorField; 3]) -> Result<StructureConstants> {
    let mut c = [[Vector3::zeros(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                c[i][j] = decompose_in_basis(&basis[i].bracket(&basis[j]), basis)?;
            }
        }
    }
    Ok(StructureConstants { c })
}

/// Generators of the rotating-observer algebra in coordinates
/// `(x0, r, rho = r theta, z)`: `X1 = rho d_0 + x0 d_rho`, and the constant
/// fields `X2 = sinh(a) d_0 + cosh(a) d_rho`, `X3 = cosh(a) d_0 + sinh(a) d_rho`
/// (the frame legs along the `(x0, rho)` plane).
pub fn rrt_generators(alpha: f64) -> [VectorField; 3] {
    let (sh, ch) = (alpha.sinh(), alpha.cosh());
    let x1 = VectorField([Poly::linear(1.0, 2), Poly::zero(), Poly::linear(1.0, 0), Poly::zero()]);
    [
        x1,
        VectorField::constant([sh, 0.0, ch, 0.0]),
        VectorField::constant([ch, 0.0, sh, 0.0]),
    ]
}

/// The first generator in the printed form `(0, -r x0, 0, -rho)`, paired with
/// the same constant fields. Kept to show that it does not close.
pub fn rrt_generators_as_printed(alpha: f64) -> [VectorField; 3] {
    let [_, x2, x3] = rrt_generators(alpha);
    let x1 = VectorField([
        Poly::zero(),
        Poly::monomial(-1.0, [1, 1, 0, 0]),
        Poly::zero(),
        Poly::linear(-1.0, 2),
    ]);
    [x1, x2, x3]
}

/// Brackets of [`rrt_generators`] at rapidity `alpha`.
pub fn rrt_lie_brackets(alpha: f64) -> Result<StructureConstants> {
    structure_constants(&rrt_generators(alpha))
}

/// Bracket evaluated at a point from central-difference Jacobians.
pub fn bracket_by_differences(x: &VectorField, y: &VectorField, at: &[f64; 4], h: f64) -> Vector4<f64> {
    let jac = |f: &VectorField| {
        let mut j = Matrix4::zeros();
        for k in 0..4 {
            let mut p = *at;
            let mut m = *at;
            p[k] += h;
            m[k] -= h;
            j.set_column(k, &((f.eval(&p) - f.eval(&m)) / (2.0 * h)));
        }
        j
    };
    jac(y) * x.eval(at) - jac(x) * y.eval(at)
}
