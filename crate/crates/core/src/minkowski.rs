//! Flat-spacetime tensor algebra in a fixed global chart.
//!
//! Signature is (-,+,+,+): `eta = diag(-1, 1, 1, 1)`. Vectors carry upper
//! (contravariant) components, covectors lower ones. The Levi-Civita symbol is
//! oriented by `eps_0123 = +1` unless a convention is passed explicitly.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use crate::error::{Error, Result};

/// Default orthonormality tolerance for strict tetrad construction.
pub const STRICT_TOLERANCE: f64 = 1e-10;

/// Determinant magnitude below which a frame is treated as singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;

/// Tolerance used when checking `u.u = -1` on inputs.
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// Metric component `eta_ab = delta_ab - 2 delta_a^0 delta_b^0`.
#[inline]
pub fn eta(a: usize, b: usize) -> f64 {
    match (a, b) {
        (0, 0) => -1.0,
        (a, b) if a == b => 1.0,
        _ => 0.0,
    }
}

/// The metric as a matrix. It is its own inverse.
#[inline]
pub fn metric() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, 1.0, 1.0))
}

/// Contravariant four-vector `x^i`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct FourVector(pub Vector4<f64>);

/// Covariant components `x_i`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Covector(pub Vector4<f64>);

impl FourVector {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        FourVector(Vector4::new(t, x, y, z))
    }

    pub fn zero() -> Self {
        FourVector(Vector4::zeros())
    }

    /// Coordinate basis vector `d_a`.
    pub fn basis(a: usize) -> Self {
        let mut v = Vector4::zeros();
        v[a] = 1.0;
        FourVector(v)
    }

    /// Unit future-pointing four-velocity `gamma (1, beta)`.
    pub fn from_three_velocity(beta: Vector3<f64>) -> Result<Self> {
        let b2 = beta.norm_squared();
        if !b2.is_finite() || b2 >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "three-velocity must satisfy |beta| < 1, got {}",
                b2.sqrt()
            )));
        }
        let gamma = 1.0 / (1.0 - b2).sqrt();
        Ok(FourVector::from_time_space(gamma, gamma * beta))
    }

    pub fn from_time_space(t: f64, x: Vector3<f64>) -> Self {
        FourVector::new(t, x[0], x[1], x[2])
    }

    pub fn time(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial(&self) -> Vector3<f64> {
        Vector3::new(self.0[1], self.0[2], self.0[3])
    }

    /// Three-velocity `x^lambda / x^0` of a timelike vector.
    pub fn three_velocity(&self) -> Vector3<f64> {
        self.spatial() / self.time()
    }

    pub fn dot(&self, other: &FourVector) -> f64 {
        dot(self, other)
    }

    pub fn norm_sq(&self) -> f64 {
        dot(self, self)
    }

    pub fn lower(&self) -> Covector {
        lower(self)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    /// Normalizes a timelike vector to `x.x = -1`, keeping its time orientation.
    pub fn normalized_timelike(&self) -> Result<FourVector> {
        let n = self.norm_sq();
        if !(n < 0.0) {
            return Err(Error::NotUnitTimelike { norm: n });
        }
        Ok(*self / (-n).sqrt())
    }

    /// Normalizes a spacelike vector to `x.x = +1`.
    pub fn normalized_spacelike(&self) -> Option<FourVector> {
        let n = self.norm_sq();
        if n > 0.0 {
            Some(*self / n.sqrt())
        } else {
            None
        }
    }

    /// Checks `x.x = -1` within `tol` and `x^0 > 0`.
    pub fn check_unit_future_timelike(&self, tol: f64) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::NonFinite);
        }
        let n = self.norm_sq();
        if (n + 1.0).abs() > tol * (1.0 + self.time() * self.time()) {
            return Err(Error::NotUnitTimelike { norm: n });
        }
        if self.time() <= 0.0 {
            return Err(Error::PastPointing { time: self.time() });
        }
        Ok(())
    }
}

impl Covector {
    pub fn raise(&self) -> FourVector {
        raise(self)
    }

    pub fn apply(&self, x: &FourVector) -> f64 {
        self.0.dot(&x.0)
    }
}

/// `eta_ij x^i y^j`.
pub fn dot(x: &FourVector, y: &FourVector) -> f64 {
    -x.0[0] * y.0[0] + x.0[1] * y.0[1] + x.0[2] * y.0[2] + x.0[3] * y.0[3]
}

/// `x_i = eta_ij x^j`.
pub fn lower(x: &FourVector) -> Covector {
    Covector(Vector4::new(-x.0[0], x.0[1], x.0[2], x.0[3]))
}

/// `x^i = eta^ij x_j`.
pub fn raise(xi: &Covector) -> FourVector {
    FourVector(Vector4::new(-xi.0[0], xi.0[1], xi.0[2], xi.0[3]))
}

/// Mixed outer product `x^i y_j` of a vector with the lowered form of another.
pub fn outer_lowered(x: &FourVector, y: &FourVector) -> Matrix4<f64> {
    x.0 * y.lower().0.transpose()
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, rhs: FourVector) -> FourVector {
        FourVector(self.0 + rhs.0)
    }
}

impl AddAssign for FourVector {
    fn add_assign(&mut self, rhs: FourVector) {
        self.0 += rhs.0;
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, rhs: FourVector) -> FourVector {
        FourVector(self.0 - rhs.0)
    }
}

impl SubAssign for FourVector {
    fn sub_assign(&mut self, rhs: FourVector) {
        self.0 -= rhs.0;
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector(-self.0)
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, rhs: f64) -> FourVector {
        FourVector(self.0 * rhs)
    }
}

impl Mul<FourVector> for f64 {
    type Output = FourVector;
    fn mul(self, rhs: FourVector) -> FourVector {
        FourVector(rhs.0 * self)
    }
}

impl Div<f64> for FourVector {
    type Output = FourVector;
    fn div(self, rhs: f64) -> FourVector {
        FourVector(self.0 / rhs)
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<[f64; 4]> for FourVector {
    fn from(c: [f64; 4]) -> Self {
        FourVector::new(c[0], c[1], c[2], c[3])
    }
}

/// Largest violation of `eta_cd L^c_a L^d_b = eta_ab`.
pub fn lorentz_residual(m: &Matrix4<f64>) -> f64 {
    let g = metric();
    (m.transpose() * g * m - g).amax()
}

/// A 4x4 matrix `L^i_j` acting on contravariant components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzMatrix(pub Matrix4<f64>);

impl LorentzMatrix {
    pub fn identity() -> Self {
        LorentzMatrix(Matrix4::identity())
    }

    /// Wraps `m` after checking it preserves the metric to `tol`.
    pub fn verified(m: Matrix4<f64>, tol: f64) -> Result<Self> {
        if !m.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite);
        }
        let residual = lorentz_residual(&m);
        if residual > tol {
            return Err(Error::NotLorentz { residual });
        }
        Ok(LorentzMatrix(m))
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn residual(&self) -> f64 {
        lorentz_residual(&self.0)
    }

    pub fn apply(&self, x: &FourVector) -> FourVector {
        FourVector(self.0 * x.0)
    }

    /// Inverse of a Lorentz matrix, `eta L^T eta`.
    pub fn inverse(&self) -> LorentzMatrix {
        let g = metric();
        LorentzMatrix(g * self.0.transpose() * g)
    }

    pub fn deviation_from(&self, other: &LorentzMatrix) -> f64 {
        (self.0 - other.0).amax()
    }
}

impl Mul for LorentzMatrix {
    type Output = LorentzMatrix;
    fn mul(self, rhs: LorentzMatrix) -> LorentzMatrix {
        LorentzMatrix(self.0 * rhs.0)
    }
}

/// Orthonormal frame `e_a = e_a^i d_i` together with its dual `e_i^a`.
///
/// `components` stores `e_a` as column `a`; `dual` is its matrix inverse, so
/// row `a` of `dual` is the covector `theta^a`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tetrad {
    vectors: [FourVector; 4],
    components: Matrix4<f64>,
    dual: Matrix4<f64>,
    metric_residual: f64,
    dual_residual: f64,
    det: f64,
}

impl Tetrad {
    /// Builds the frame and its dual, recording the orthonormality residual.
    pub fn new(vectors: [FourVector; 4]) -> Result<Self> {
        if !vectors.iter().all(FourVector::is_finite) {
            return Err(Error::NonFinite);
        }
        let components = Matrix4::from_columns(&[vectors[0].0, vectors[1].0, vectors[2].0, vectors[3].0]);
        let det = components.determinant();
        if !(det.abs() > SINGULAR_TOLERANCE) {
            return Err(Error::SingularFrame { det });
        }
        let dual = components.try_inverse().ok_or(Error::SingularFrame { det })?;
        let g = metric();
        let metric_residual = (components.transpose() * g * components - g).amax();
        let dual_residual = (dual * components - Matrix4::identity()).amax();
        Ok(Tetrad {
            vectors,
            components,
            dual,
            metric_residual,
            dual_residual,
            det,
        })
    }

    /// As [`Tetrad::new`], rejecting frames whose residual exceeds `tol`.
    pub fn new_strict(vectors: [FourVector; 4], tol: f64) -> Result<Self> {
        let t = Tetrad::new(vectors)?;
        let residual = t.metric_residual.max(t.dual_residual);
        if residual > tol {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(t)
    }

    pub fn canonical() -> Self {
        Tetrad::new([
            FourVector::basis(0),
            FourVector::basis(1),
            FourVector::basis(2),
            FourVector::basis(3),
        ])
        .expect("identity frame is regular")
    }

    pub fn from_matrix(components: &Matrix4<f64>) -> Result<Self> {
        let c = |a: usize| FourVector(components.column(a).into_owned());
        Tetrad::new([c(0), c(1), c(2), c(3)])
    }

    pub fn e(&self, a: usize) -> FourVector {
        self.vectors[a]
    }

    pub fn vectors(&self) -> &[FourVector; 4] {
        &self.vectors
    }

    /// Dual covector `theta^a` with components `e_i^a`.
    pub fn theta(&self, a: usize) -> Covector {
        Covector(self.dual.row(a).transpose())
    }

    pub fn components(&self) -> &Matrix4<f64> {
        &self.components
    }

    pub fn dual(&self) -> &Matrix4<f64> {
        &self.dual
    }

    /// `max_ab |e_a . e_b - eta_ab|`.
    pub fn orthonormality_residual(&self) -> f64 {
        self.metric_residual
    }

    /// `max |e_a^i e_i^b - delta_a^b|`.
    pub fn duality_residual(&self) -> f64 {
        self.dual_residual
    }

    pub fn determinant(&self) -> f64 {
        self.det
    }

    pub fn is_right_handed(&self) -> bool {
        self.det > 0.0
    }

    /// Physical components `x^a = x^i e_i^a`.
    pub fn physical_components(&self, x: &FourVector) -> Vector4<f64> {
        self.dual * x.0
    }

    /// Inverse of [`Tetrad::physical_components`]: `x^i = x^a e_a^i`.
    pub fn reconstruct(&self, xa: &Vector4<f64>) -> FourVector {
        FourVector(self.components * xa)
    }

    /// The frame `E_a = L e_a`.
    pub fn transformed(&self, l: &LorentzMatrix) -> Result<Tetrad> {
        Tetrad::from_matrix(&(l.0 * self.components))
    }

    /// Spatial triad vectors `e_1, e_2, e_3`.
    pub fn spatial(&self) -> [FourVector; 3] {
        [self.vectors[1], self.vectors[2], self.vectors[3]]
    }

    /// Frame components `T^{ab} = T^{ij} e_i^a e_j^b` of a contravariant 2-tensor.
    pub fn tensor_components(&self, t: &Matrix4<f64>) -> Matrix4<f64> {
        self.dual * t * self.dual.transpose()
    }

    /// Restriction of a mixed tensor `M^i_j` to the spatial triad,
    /// `M^lambda_mu = e_i^lambda M^i_j e_mu^j`.
    pub fn spatial_block(&self, m: &Matrix4<f64>) -> Matrix3<f64> {
        let full = self.dual * m * self.components;
        full.fixed_view::<3, 3>(1, 1).into_owned()
    }
}

/// Levi-Civita symbol with lower indices, `eps_0123 = +1`.
pub fn levi_civita(a: usize, b: usize, c: usize, d: usize) -> f64 {
    let idx = [a, b, c, d];
    for i in 0..4 {
        if idx[i] > 3 {
            return 0.0;
        }
        for j in (i + 1)..4 {
            if idx[i] == idx[j] {
                return 0.0;
            }
        }
    }
    let mut sign = 1.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Three-dimensional symbol `eps_123 = +1`, indices 0..3 meaning x, y, z.
pub fn levi_civita3(a: usize, b: usize, c: usize) -> f64 {
    if a == b || b == c || a == c {
        return 0.0;
    }
    let mut sign = 1.0;
    let idx = [a, b, c];
    for i in 0..3 {
        for j in (i + 1)..3 {
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Which index placement of the Levi-Civita tensor carries the `+1` on `0123`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EpsilonConvention {
    /// `eta_0123 = +1` (hence `eta^0123 = -1`).
    #[default]
    LowerPositive,
    /// `eta^0123 = +1` (hence `eta_0123 = -1`).
    UpperPositive,
}

impl EpsilonConvention {
    pub fn sign(self) -> f64 {
        match self {
            EpsilonConvention::LowerPositive => 1.0,
            EpsilonConvention::UpperPositive => -1.0,
        }
    }

    /// Component of the covariant volume form `eta_abcd`.
    pub fn lower(self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.sign() * levi_civita(a, b, c, d)
    }

    /// Component of the contravariant volume form `eta^abcd` (raised with the metric).
    pub fn upper(self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        -self.lower(a, b, c, d)
    }
}

/// Antisymmetric contravariant 2-tensor `F^{ij}`, stored by its six
/// independent components so antisymmetry holds exactly.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct FieldTensor {
    /// Components in the order (01, 02, 03, 12, 13, 23).
    c: [f64; 6],
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl FieldTensor {
    pub fn new(f01: f64, f02: f64, f03: f64, f12: f64, f13: f64, f23: f64) -> Self {
        FieldTensor {
            c: [f01, f02, f03, f12, f13, f23],
        }
    }

    pub fn zero() -> Self {
        FieldTensor::default()
    }

    pub fn from_components(c: [f64; 6]) -> Self {
        FieldTensor { c }
    }

    /// Lab-frame tensor with `F^{0l} = E^l`, `F^{23} = B^1`, `F^{31} = B^2`, `F^{12} = B^3`.
    pub fn from_fields(e: &Vector3<f64>, b: &Vector3<f64>) -> Self {
        FieldTensor::new(e[0], e[1], e[2], b[2], -b[1], b[0])
    }

    pub fn components(&self) -> [f64; 6] {
        self.c
    }

    /// Reads an antisymmetric matrix, rejecting asymmetry beyond `tol`.
    pub fn from_matrix(m: &Matrix4<f64>, tol: f64) -> Result<Self> {
        let residual = (m + m.transpose()).amax();
        if residual > tol {
            return Err(Error::NotAntisymmetric { residual });
        }
        let mut c = [0.0; 6];
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            c[k] = 0.5 * (m[(i, j)] - m[(j, i)]);
        }
        Ok(FieldTensor { c })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (lo, hi, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        let k = PAIRS.iter().position(|&p| p == (lo, hi)).expect("index pair in range");
        sign * self.c[k]
    }

    /// Contravariant matrix `F^{ij}`.
    pub fn matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            m[(i, j)] = self.c[k];
            m[(j, i)] = -self.c[k];
        }
        m
    }

    /// Covariant matrix `F_ij = eta_ik eta_jl F^{kl}`.
    pub fn covariant(&self) -> Matrix4<f64> {
        let g = metric();
        g * self.matrix() * g
    }

    /// Mixed matrix `F^i_j = F^{ik} eta_kj`.
    pub fn mixed(&self) -> Matrix4<f64> {
        self.matrix() * metric()
    }

    /// `F^i_j x^j`.
    pub fn apply(&self, x: &FourVector) -> FourVector {
        FourVector(self.mixed() * x.0)
    }

    /// `x^a F_ab y^b`.
    pub fn bilinear(&self, x: &FourVector, y: &FourVector) -> f64 {
        x.lower().0.dot(&(self.matrix() * y.lower().0))
    }

    pub fn scaled(&self, k: f64) -> FieldTensor {
        let mut c = self.c;
        c.iter_mut().for_each(|v| *v *= k);
        FieldTensor { c }
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest componentwise difference to `other`.
    pub fn distance(&self, other: &FieldTensor) -> f64 {
        self.c
            .iter()
            .zip(other.c.iter())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl Add for FieldTensor {
    type Output = FieldTensor;
    fn add(self, rhs: FieldTensor) -> FieldTensor {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c.iter()) {
            *a += b;
        }
        FieldTensor { c }
    }
}

impl Neg for FieldTensor {
    type Output = FieldTensor;
    fn neg(self) -> FieldTensor {
        self.scaled(-1.0)
    }
}

/// Hodge dual `*F^{ab}`: lower `*F_cd = 1/2 eta_cdef F^{ef}`, then raise both
/// indices so the result is again a contravariant field tensor.
pub fn dual_field(f: &FieldTensor, convention: EpsilonConvention) -> FieldTensor {
    let fm = f.matrix();
    let mut lower = Matrix4::zeros();
    for c in 0..4 {
        for d in 0..4 {
            let mut s = 0.0;
            for e in 0..4 {
                for g in 0..4 {
                    s += convention.lower(c, d, e, g) * fm[(e, g)];
                }
            }
            lower[(c, d)] = 0.5 * s;
        }
    }
    let g = metric();
    let raised = g * lower * g;
    FieldTensor::from_matrix(&raised, 1e-12).expect("dual of an antisymmetric tensor is antisymmetric")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn boosted_x(beta: f64) -> Tetrad {
        let g = 1.0 / (1.0 - beta * beta).sqrt();
        Tetrad::new_strict(
            [
                FourVector::new(g, g * beta, 0.0, 0.0),
                FourVector::new(g * beta, g, 0.0, 0.0),
                FourVector::basis(2),
                FourVector::basis(3),
            ],
            STRICT_TOLERANCE,
        )
        .unwrap()
    }

    #[test]
    fn dot_examples() {
        let e0 = FourVector::basis(0);
        let e1 = FourVector::basis(1);
        assert_eq!(dot(&e0, &e0), -1.0);
        assert_eq!(dot(&e1, &e1), 1.0);
        let null = FourVector::new(1.0, 1.0, 0.0, 0.0);
        assert_eq!(dot(&null, &null), 0.0);
    }

    #[test]
    fn metric_matches_delta_form() {
        for a in 0..4 {
            for b in 0..4 {
                let delta = if a == b { 1.0 } else { 0.0 };
                let d0 = if a == 0 && b == 0 { 1.0 } else { 0.0 };
                assert_eq!(eta(a, b), delta - 2.0 * d0);
                assert_eq!(metric()[(a, b)], eta(a, b));
            }
        }
    }

    #[test]
    fn lower_examples() {
        assert_eq!(
            lower(&FourVector::new(1.0, 0.0, 0.0, 0.0)).0,
            Vector4::new(-1.0, 0.0, 0.0, 0.0)
        );
        assert_eq!(
            lower(&FourVector::new(0.0, 2.0, 0.0, 0.0)).0,
            Vector4::new(0.0, 2.0, 0.0, 0.0)
        );
    }

    #[test]
    fn canonical_tetrad_has_identity_dual() {
        let t = Tetrad::canonical();
        assert_eq!(*t.dual(), Matrix4::identity());
        assert!(t.is_right_handed());
        let x = FourVector::new(3.0, 1.0, 0.0, 2.0);
        assert_eq!(t.physical_components(&x), x.0);
    }

    #[test]
    fn boosted_tetrad_is_orthonormal() {
        let t = boosted_x(0.6);
        assert!(t.orthonormality_residual() < 1e-12);
        assert!(t.duality_residual() < 1e-12);
        let own = t.physical_components(&t.e(0));
        assert_abs_diff_eq!(own, Vector4::new(1.0, 0.0, 0.0, 0.0), epsilon = 1e-14);
    }

    #[test]
    fn repeated_column_is_singular() {
        let e1 = FourVector::basis(1);
        let r = Tetrad::new([FourVector::basis(0), e1, e1, FourVector::basis(3)]);
        assert!(matches!(r, Err(Error::SingularFrame { .. })));
    }

    #[test]
    fn strict_mode_rejects_skewed_frame() {
        let r = Tetrad::new_strict(
            [
                FourVector::basis(0),
                FourVector::new(0.0, 1.0, 0.1, 0.0),
                FourVector::basis(2),
                FourVector::basis(3),
            ],
            STRICT_TOLERANCE,
        );
        assert!(matches!(r, Err(Error::NotOrthonormal { .. })));
    }

    #[test]
    fn levi_civita_orientation() {
        assert_eq!(levi_civita(0, 1, 2, 3), 1.0);
        assert_eq!(levi_civita(1, 0, 2, 3), -1.0);
        assert_eq!(levi_civita(2, 3, 0, 1), 1.0);
        assert_eq!(levi_civita(3, 0, 1, 2), -1.0);
        assert_eq!(levi_civita(0, 0, 2, 3), 0.0);
        assert_eq!(levi_civita3(0, 1, 2), 1.0);
        assert_eq!(levi_civita3(2, 1, 0), -1.0);
    }

    #[test]
    fn dual_of_zero_is_zero() {
        assert_eq!(
            dual_field(&FieldTensor::zero(), EpsilonConvention::LowerPositive),
            FieldTensor::zero()
        );
    }

    #[test]
    fn dual_of_pure_f01_lives_in_23_block() {
        let f = FieldTensor::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let d = dual_field(&f, EpsilonConvention::LowerPositive);
        // *F_23 = eps_2301 F^01 = +1; raising spatial indices keeps the sign.
        assert_eq!(d.components(), [0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let flipped = dual_field(&f, EpsilonConvention::UpperPositive);
        assert_eq!(flipped.components(), [0.0, 0.0, 0.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn double_dual_on_basis_components() {
        for k in 0..6 {
            let mut c = [0.0; 6];
            c[k] = 1.0;
            let f = FieldTensor::from_components(c);
            let dd = dual_field(
                &dual_field(&f, EpsilonConvention::LowerPositive),
                EpsilonConvention::LowerPositive,
            );
            assert_eq!(dd, -f, "component {k}");
        }
    }

    #[test]
    fn field_accessors_agree() {
        let f = FieldTensor::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0);
        let m = f.matrix();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(f.get(i, j), m[(i, j)]);
            }
        }
        assert_eq!(FieldTensor::from_matrix(&m, 0.0).unwrap(), f);
        let x = FourVector::new(0.3, -1.0, 2.0, 0.5);
        let y = FourVector::new(1.1, 0.2, 0.0, -0.7);
        let direct: f64 = (0..4)
            .flat_map(|a| (0..4).map(move |b| (a, b)))
            .map(|(a, b)| x[a] * eta(a, a) * f.get(a, b) * eta(b, b) * y[b])
            .sum();
        assert_abs_diff_eq!(f.bilinear(&x, &y), direct, epsilon = 1e-13);
    }

    fn finite() -> impl Strategy<Value = f64> {
        -10.0..10.0f64
    }

    fn vec4() -> impl Strategy<Value = FourVector> {
        (finite(), finite(), finite(), finite()).prop_map(|(a, b, c, d)| FourVector::new(a, b, c, d))
    }

    proptest! {
        #[test]
        fn dot_is_symmetric(x in vec4(), y in vec4()) {
            prop_assert_eq!(dot(&x, &y), dot(&y, &x));
        }

        #[test]
        fn raise_lower_round_trip(x in vec4()) {
            prop_assert_eq!(raise(&lower(&x)), x);
        }

        #[test]
        fn dual_is_linear_and_squares_to_minus_one(
            a in proptest::array::uniform6(finite()),
            b in proptest::array::uniform6(finite()),
            k in finite(),
        ) {
            let fa = FieldTensor::from_components(a);
            let fb = FieldTensor::from_components(b);
            let conv = EpsilonConvention::LowerPositive;
            let lhs = dual_field(&(fa + fb.scaled(k)), conv);
            let rhs = dual_field(&fa, conv) + dual_field(&fb, conv).scaled(k);
            prop_assert!(lhs.distance(&rhs) < 1e-12);
            let dd = dual_field(&dual_field(&fa, conv), conv);
            prop_assert!(dd.distance(&-fa) < 1e-12);
        }
    }
}
