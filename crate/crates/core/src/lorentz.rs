//! Boosts between unit timelike vectors, Lorentz cycles and the
//! boost-rotation split.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::minkowski::{dot, lorentz_residual, outer_lowered, FourVector, LorentzMatrix, Tetrad, UNIT_TOLERANCE};

/// Largest relative Lorentz factor accepted by [`boost`].
pub const MAX_GAMMA: f64 = 1e6;

/// Tolerance (relative to the squared entry scale) for Lorentz checks.
pub const LORENTZ_TOLERANCE: f64 = 1e-9;

/// Angles below this are reported without an axis.
pub const ANGLE_TOLERANCE: f64 = 1e-12;

/// Pure boost carrying `source` to `target`, fixing the 2-plane orthogonal to both.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Boost {
    matrix: LorentzMatrix,
    source: FourVector,
    target: FourVector,
    gamma: f64,
}

impl Boost {
    pub fn matrix(&self) -> &LorentzMatrix {
        &self.matrix
    }

    pub fn source(&self) -> FourVector {
        self.source
    }

    pub fn target(&self) -> FourVector {
        self.target
    }

    /// Relative Lorentz factor `-u.v`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn apply(&self, x: &FourVector) -> FourVector {
        self.matrix.apply(x)
    }

    /// The boost back from `target` to `source`.
    pub fn inverse(&self) -> Boost {
        Boost {
            matrix: self.matrix.inverse(),
            source: self.target,
            target: self.source,
            gamma: self.gamma,
        }
    }
}

fn check_velocity(x: &FourVector) -> Result<()> {
    x.check_unit_future_timelike(UNIT_TOLERANCE)
}

/// `B = I + (u+v)(u+v)_flat / (1+gamma) - 2 v u_flat`, sending `u` to `v`.
pub fn boost(u: &FourVector, v: &FourVector) -> Result<Boost> {
    check_velocity(u)?;
    check_velocity(v)?;
    let gamma = -dot(u, v);
    if gamma > MAX_GAMMA {
        return Err(Error::ExtremeRapidity { gamma });
    }
    if 1.0 + gamma < 1e-12 {
        return Err(Error::AntipodalDegenerate { value: 1.0 + gamma });
    }
    let sum = *u + *v;
    let m = Matrix4::identity() + outer_lowered(&sum, &sum) / (1.0 + gamma) - 2.0 * outer_lowered(v, u);
    Ok(Boost {
        matrix: LorentzMatrix(m),
        source: *u,
        target: *v,
        gamma: gamma.max(1.0),
    })
}

/// Boost from the lab rest vector `e_0` to the observer moving with three-velocity `beta`.
pub fn boost_from_velocity(beta: Vector3<f64>) -> Result<Boost> {
    boost(&FourVector::basis(0), &FourVector::from_three_velocity(beta)?)
}

/// Rest frame of `u`: the canonical frame carried along the boost `e_0 -> u`.
pub fn rest_frame(u: &FourVector) -> Result<Tetrad> {
    let b = boost(&FourVector::basis(0), u)?;
    Tetrad::transformed(&Tetrad::canonical(), b.matrix())
}

/// Three-velocity of `frame` as measured in `reference`: `gamma^-1 (e_0)^i E_i^lambda`.
pub fn relative_velocity(frame: &Tetrad, reference: &Tetrad) -> Result<Vector3<f64>> {
    let u = frame.e(0);
    u.normalized_timelike()?;
    let comps = reference.physical_components(&u);
    let gamma = comps[0];
    if !(gamma > 0.0) {
        return Err(Error::NotUnitTimelike { norm: u.norm_sq() });
    }
    Ok(Vector3::new(comps[1], comps[2], comps[3]) / gamma)
}

fn frame_mismatch(a: &FourVector, b: &FourVector) -> Result<()> {
    let residual = (*a - *b).max_abs();
    if residual > 1e-9 * (1.0 + a.max_abs()) {
        return Err(Error::FrameMismatch { residual });
    }
    Ok(())
}

/// The frame `E_a = B e_a` for a tetrad whose time leg is the boost source.
pub fn boost_space_axes(t: &Tetrad, b: &Boost) -> Result<Tetrad> {
    frame_mismatch(&t.e(0), &b.source())?;
    t.transformed(b.matrix())
}

/// Same frame as [`boost_space_axes`], assembled from the relative velocity:
/// `E_l = [delta_ls + (gamma-1) bhat_l bhat_s] e_s - gamma beta_l e_0`, where
/// `beta` is the velocity of the source frame relative to the image.
pub fn boost_space_axes_closed_form(t: &Tetrad, b: &Boost) -> Result<Tetrad> {
    frame_mismatch(&t.e(0), &b.source())?;
    let v = t.physical_components(&b.target());
    let gamma = v[0];
    let beta = -Vector3::new(v[1], v[2], v[3]) / gamma;
    let speed = beta.norm();
    let mut cols = [t.e(0); 4];
    cols[0] = b.target();
    for l in 0..3 {
        let mut e = t.e(l + 1) - gamma * beta[l] * t.e(0);
        if speed > ANGLE_TOLERANCE {
            let hat = beta / speed;
            for s in 0..3 {
                e += (gamma - 1.0) * hat[l] * hat[s] * t.e(s + 1);
            }
        }
        cols[l + 1] = e;
    }
    Tetrad::new(cols)
}

fn scaled_lorentz_check(m: &Matrix4<f64>) -> Result<()> {
    let scale = m.amax().max(1.0);
    let residual = lorentz_residual(m);
    if !(residual <= LORENTZ_TOLERANCE * scale * scale) {
        return Err(Error::NotLorentz { residual });
    }
    Ok(())
}

/// `L1 L2`, rechecked as a Lorentz matrix.
pub fn compose(l1: &LorentzMatrix, l2: &LorentzMatrix) -> Result<LorentzMatrix> {
    let m = l1.0 * l2.0;
    scaled_lorentz_check(&m)?;
    Ok(LorentzMatrix(m))
}

/// Rotation angle in `[0, pi]` and axis in the rest triad of the fixed vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleAxis {
    pub angle: f64,
    /// `None` when the angle is below [`ANGLE_TOLERANCE`].
    pub axis: Option<Vector3<f64>>,
}

/// Angle/axis of a 3x3 rotation given as `I + offset`. Keeping the offset
/// separate avoids cancellation for tiny angles.
fn angle_axis_from_offset(offset: &Matrix3<f64>) -> AngleAxis {
    let axial = 0.5
        * Vector3::new(
            offset[(2, 1)] - offset[(1, 2)],
            offset[(0, 2)] - offset[(2, 0)],
            offset[(1, 0)] - offset[(0, 1)],
        );
    let cos = 1.0 + 0.5 * offset.trace();
    let sin = axial.norm();
    let angle = sin.atan2(cos);
    if angle < ANGLE_TOLERANCE {
        return AngleAxis { angle, axis: None };
    }
    if angle < std::f64::consts::PI - 1e-4 {
        return AngleAxis {
            angle,
            axis: Some(axial / sin),
        };
    }
    // Near pi the axial part vanishes; read the axis off the symmetric part,
    // sym = cos I + (1 - cos) n n^T.
    let m = Matrix3::identity() + offset;
    let sym = 0.5 * (m + m.transpose());
    let nn = (sym - Matrix3::identity() * cos) / (1.0 - cos);
    let k = (0..3).max_by(|&i, &j| nn[(i, i)].total_cmp(&nn[(j, j)])).unwrap_or(0);
    let mut axis = nn.column(k).into_owned();
    axis /= axis.norm();
    if axial.dot(&axis) < 0.0 || (sin < 1e-14 && first_nonzero_negative(&axis)) {
        axis = -axis;
    }
    AngleAxis {
        angle,
        axis: Some(axis),
    }
}

fn first_nonzero_negative(v: &Vector3<f64>) -> bool {
    v.iter().find(|c| c.abs() > 1e-12).is_some_and(|c| *c < 0.0)
}

/// Angle/axis of a Lorentz matrix fixing `u`, read off in the rest triad of `u`.
pub fn rotation_angle_axis(r: &LorentzMatrix, u: &FourVector) -> Result<AngleAxis> {
    scaled_lorentz_check(&r.0)?;
    check_velocity(u)?;
    let residual = (r.apply(u) - *u).max_abs();
    if residual > 1e-9 * (1.0 + u.max_abs()) {
        return Err(Error::NotARotationAboutU { residual });
    }
    let frame = rest_frame(u)?;
    let offset = frame.spatial_block(&(r.0 - Matrix4::identity()));
    Ok(angle_axis_from_offset(&offset))
}

/// Boost-rotation split `L = B R` with `B = boost(u, L u)` and `R u = u`.
pub fn decompose(l: &LorentzMatrix, u: &FourVector) -> Result<(Boost, LorentzMatrix)> {
    scaled_lorentz_check(&l.0)?;
    check_velocity(u)?;
    let image = l.apply(u);
    if image.time() <= 0.0 {
        return Err(Error::PastPointing { time: image.time() });
    }
    let b = boost(u, &image)?;
    let r = b.inverse().matrix().0 * l.0;
    Ok((b, LorentzMatrix(r)))
}

/// Result of closing a chain of boosts back onto its starting velocity.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleResult {
    pub matrix: LorentzMatrix,
    pub fixed_vector: FourVector,
    pub rotation_angle: f64,
    pub rotation_axis: Option<Vector3<f64>>,
}

/// `B(b <- a) - I` written in terms of `d = b - a` and `eps = gamma - 1`.
/// Exact algebraically; loses no digits when `a` and `b` nearly coincide.
fn boost_offset(a: &FourVector, d: &FourVector) -> Matrix4<f64> {
    let eps = 0.5 * dot(d, d);
    let aa = outer_lowered(a, a);
    let ad = outer_lowered(a, d);
    let da = outer_lowered(d, a);
    let dd = outer_lowered(d, d);
    (-2.0 * eps * aa + 2.0 * ad - 2.0 * (1.0 + eps) * da + dd) / (2.0 + eps)
}

/// Accumulates `(I + K_n) ... (I + K_1) - I` from the step offsets.
fn chain_offset(points: &[FourVector], offsets: &[FourVector]) -> Matrix4<f64> {
    let mut total = Matrix4::zeros();
    for k in 0..points.len() - 1 {
        let d = offsets[k + 1] - offsets[k];
        let step = boost_offset(&points[k], &d);
        total = step + total + step * total;
    }
    total
}

/// Lorentz cycle `u -> v_1 -> ... -> v_n -> u`.
pub fn cycle(u: &FourVector, intermediates: &[FourVector]) -> Result<CycleResult> {
    check_velocity(u)?;
    for v in intermediates {
        check_velocity(v)?;
    }
    let mut points = Vec::with_capacity(intermediates.len() + 2);
    points.push(*u);
    points.extend_from_slice(intermediates);
    points.push(*u);
    for w in points.windows(2) {
        let gamma = -dot(&w[0], &w[1]);
        if gamma > MAX_GAMMA {
            return Err(Error::ExtremeRapidity { gamma });
        }
    }
    let offsets: Vec<FourVector> = points.iter().map(|p| *p - *u).collect();
    let offset = chain_offset(&points, &offsets);
    let frame = rest_frame(u)?;
    let aa = angle_axis_from_offset(&frame.spatial_block(&offset));
    Ok(CycleResult {
        matrix: LorentzMatrix(Matrix4::identity() + offset),
        fixed_vector: *u,
        rotation_angle: aa.angle,
        rotation_axis: aa.axis,
    })
}

/// Cycle through lab three-velocities starting and ending at rest.
///
/// The four-velocities are carried as offsets `(gamma - 1, gamma beta)` from
/// `e_0`, with `gamma - 1 = beta^2 / ((1 + s) s)`, `s = sqrt(1 - beta^2)`, so
/// very small velocities keep full relative precision.
pub fn cycle_from_velocities(betas: &[Vector3<f64>]) -> Result<CycleResult> {
    let e0 = FourVector::basis(0);
    let mut offsets = vec![FourVector::zero()];
    for beta in betas {
        let b2 = beta.norm_squared();
        if !(b2 < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "|beta| = {} is not subluminal",
                b2.sqrt()
            )));
        }
        let s = (1.0 - b2).sqrt();
        let gamma_m1 = b2 / ((1.0 + s) * s);
        offsets.push(FourVector::from_time_space(gamma_m1, beta / s));
    }
    offsets.push(FourVector::zero());
    let points: Vec<FourVector> = offsets.iter().map(|o| e0 + *o).collect();
    for p in &points {
        if -dot(p, &e0) > MAX_GAMMA {
            return Err(Error::ExtremeRapidity { gamma: p.time() });
        }
    }
    let offset = chain_offset(&points, &offsets);
    let aa = angle_axis_from_offset(&offset.fixed_view::<3, 3>(1, 1).into_owned());
    Ok(CycleResult {
        matrix: LorentzMatrix(Matrix4::identity() + offset),
        fixed_vector: e0,
        rotation_angle: aa.angle,
        rotation_axis: aa.axis,
    })
}

/// `c(a, b) = (a + b) / (1 - a.b)`.
fn cayley(a: &FourVector, b: &FourVector) -> FourVector {
    (*a + *b) / (1.0 - dot(a, b))
}

/// Image of `t` under the cycle `u -> v -> w -> u`, from the closed form
/// `G_l = e_l + A (w.e_l) + B (v.e_l)`, `G_0 = u`.
pub fn cycle2_exact_axes(u: &FourVector, v: &FourVector, w: &FourVector, t: &Tetrad) -> Result<Tetrad> {
    check_velocity(u)?;
    check_velocity(v)?;
    check_velocity(w)?;
    frame_mismatch(&t.e(0), u)?;
    let c_vw = cayley(v, w);
    let c_uw = cayley(u, w);
    let c_uv = cayley(u, v);
    let u_cvw = dot(u, &c_vw);
    let w_cuv = dot(w, &c_uv);
    let coeff_a = c_vw + u_cvw * c_uw;
    let coeff_b = c_uv - c_uw + w_cuv * c_vw + (u_cvw * w_cuv) * c_uw;
    let mut cols = [*u; 4];
    for (l, col) in cols.iter_mut().enumerate().skip(1) {
        let e = t.e(l);
        *col = e + dot(w, &e) * coeff_a + dot(v, &e) * coeff_b;
    }
    Tetrad::new(cols)
}

/// Brute-force counterpart of [`cycle2_exact_axes`]: the explicit product of three boosts.
pub fn cycle2_product(u: &FourVector, v: &FourVector, w: &FourVector) -> Result<LorentzMatrix> {
    let first = boost(u, v)?;
    let second = boost(v, w)?;
    let third = boost(w, u)?;
    Ok(LorentzMatrix(third.matrix().0 * second.matrix().0 * first.matrix().0))
}

/// Spatial part of a four-vector in the rest frame of `u`.
pub fn rest_components(u: &FourVector, x: &FourVector) -> Result<Vector4<f64>> {
    Ok(rest_frame(u)?.physical_components(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn x_boost(beta: f64) -> FourVector {
        FourVector::from_three_velocity(Vector3::new(beta, 0.0, 0.0)).unwrap()
    }

    #[test]
    fn boost_of_identical_vectors_is_identity() {
        let e0 = FourVector::basis(0);
        assert_eq!(boost(&e0, &e0).unwrap().matrix().0, Matrix4::identity());
    }

    #[test]
    fn worked_x_boost_matrix() {
        let b = boost(&FourVector::basis(0), &FourVector::new(1.25, 0.75, 0.0, 0.0)).unwrap();
        let mut expected = Matrix4::identity();
        expected[(0, 0)] = 1.25;
        expected[(1, 1)] = 1.25;
        expected[(0, 1)] = 0.75;
        expected[(1, 0)] = 0.75;
        assert_abs_diff_eq!(b.matrix().0, expected, epsilon = 1e-15);
        assert_eq!(b.gamma(), 1.25);
    }

    #[test]
    fn boost_rejects_bad_inputs() {
        let e0 = FourVector::basis(0);
        assert!(matches!(
            boost(&e0, &FourVector::new(1.0, 1.0, 0.0, 0.0)),
            Err(Error::NotUnitTimelike { .. })
        ));
        assert!(matches!(boost(&e0, &-e0), Err(Error::PastPointing { .. })));
        let fast = FourVector::new(2e6, (4e12f64 - 1.0).sqrt(), 0.0, 0.0);
        assert!(matches!(boost(&e0, &fast), Err(Error::ExtremeRapidity { .. })));
    }

    #[test]
    fn boost_fixes_orthogonal_plane() {
        let u = x_boost(0.3);
        let v = FourVector::from_three_velocity(Vector3::new(0.0, 0.4, 0.0)).unwrap();
        let b = boost(&u, &v).unwrap();
        let e3 = FourVector::basis(3);
        assert_abs_diff_eq!(b.apply(&e3).0, e3.0, epsilon = 1e-15);
    }

    #[test]
    fn relative_velocity_examples() {
        let lab = Tetrad::canonical();
        assert_eq!(relative_velocity(&lab, &lab).unwrap(), Vector3::zeros());
        let moving = rest_frame(&x_boost(0.6)).unwrap();
        assert_abs_diff_eq!(
            relative_velocity(&moving, &lab).unwrap(),
            Vector3::new(0.6, 0.0, 0.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            relative_velocity(&lab, &moving).unwrap(),
            Vector3::new(-0.6, 0.0, 0.0),
            epsilon = 1e-15
        );
    }

    #[test]
    fn space_axes_worked_example() {
        let lab = Tetrad::canonical();
        let b = boost(&FourVector::basis(0), &x_boost(0.6)).unwrap();
        let direct = boost_space_axes(&lab, &b).unwrap();
        let closed = boost_space_axes_closed_form(&lab, &b).unwrap();
        let e1 = FourVector::new(0.75, 1.25, 0.0, 0.0);
        assert_abs_diff_eq!(direct.e(1).0, e1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(closed.e(1).0, e1.0, epsilon = 1e-15);
        assert_eq!(direct.e(2), FourVector::basis(2));
        assert_eq!(closed.e(3), FourVector::basis(3));
        let id = boost(&FourVector::basis(0), &FourVector::basis(0)).unwrap();
        assert_eq!(boost_space_axes_closed_form(&lab, &id).unwrap(), lab);
    }

    #[test]
    fn space_axes_reject_mismatched_frame() {
        let b = boost(&x_boost(0.2), &x_boost(0.5)).unwrap();
        assert!(matches!(
            boost_space_axes(&Tetrad::canonical(), &b),
            Err(Error::FrameMismatch { .. })
        ));
    }

    #[test]
    fn compose_examples() {
        let u = x_boost(0.5);
        let v = FourVector::from_three_velocity(Vector3::new(0.0, 0.5, 0.0)).unwrap();
        let b = boost(&u, &v).unwrap();
        let id = LorentzMatrix::identity();
        assert_eq!(compose(b.matrix(), &id).unwrap(), *b.matrix());
        let back = compose(boost(&v, &u).unwrap().matrix(), b.matrix()).unwrap();
        assert_abs_diff_eq!(back.0, Matrix4::identity(), epsilon = 1e-12);

        let b1 = boost_from_velocity(Vector3::new(0.5, 0.0, 0.0)).unwrap();
        let b2 = boost_from_velocity(Vector3::new(0.0, 0.5, 0.0)).unwrap();
        let prod = compose(b2.matrix(), b1.matrix()).unwrap();
        let asym = (prod.0 - prod.0.transpose()).amax();
        assert!(asym > 1e-3, "asymmetry {asym}");

        let mut bad = Matrix4::identity();
        bad[(0, 1)] = 0.5;
        assert!(matches!(
            compose(&LorentzMatrix(bad), &id),
            Err(Error::NotLorentz { .. })
        ));
    }

    #[test]
    fn empty_cycle_is_identity() {
        let r = cycle(&FourVector::basis(0), &[]).unwrap();
        assert_eq!(r.matrix.0, Matrix4::identity());
        assert_eq!(r.rotation_angle, 0.0);
        assert!(r.rotation_axis.is_none());
    }

    #[test]
    fn xy_cycle_fixes_rest_vector_and_rotates() {
        let e0 = FourVector::basis(0);
        let v = x_boost(0.6);
        let w = FourVector::from_three_velocity(Vector3::new(0.0, 0.6, 0.0)).unwrap();
        let r = cycle(&e0, &[v, w]).unwrap();
        assert_abs_diff_eq!(r.matrix.apply(&e0).0, e0.0, epsilon = 1e-15);
        assert!(r.rotation_angle > 1e-3);
        let brute = cycle2_product(&e0, &v, &w).unwrap();
        assert_abs_diff_eq!(r.matrix.0, brute.0, epsilon = 1e-13);
        let (bpart, rot) = decompose(&brute, &e0).unwrap();
        assert_abs_diff_eq!(bpart.matrix().0, Matrix4::identity(), epsilon = 1e-13);
        let aa = rotation_angle_axis(&rot, &e0).unwrap();
        assert_abs_diff_eq!(aa.angle, r.rotation_angle, epsilon = 1e-10);
        // Traversing x then y turns the axes about -z.
        let axis = r.rotation_axis.unwrap();
        assert_abs_diff_eq!(axis, Vector3::new(0.0, 0.0, -1.0), epsilon = 1e-12);
    }

    #[test]
    fn generic_and_small_velocity_routes_agree() {
        let beta = 1e-2;
        let betas = [Vector3::new(beta, 0.0, 0.0), Vector3::new(0.0, beta, 0.0)];
        let fine = cycle_from_velocities(&betas).unwrap();
        let vs: Vec<FourVector> = betas
            .iter()
            .map(|b| FourVector::from_three_velocity(*b).unwrap())
            .collect();
        let generic = cycle(&FourVector::basis(0), &vs).unwrap();
        let brute = cycle2_product(&FourVector::basis(0), &vs[0], &vs[1]).unwrap();
        let via_matrix = rotation_angle_axis(&brute, &FourVector::basis(0)).unwrap();
        assert_abs_diff_eq!(fine.rotation_angle, generic.rotation_angle, epsilon = 1e-14);
        assert_abs_diff_eq!(fine.rotation_angle, via_matrix.angle, epsilon = 1e-12);
    }

    #[test]
    fn small_velocity_limit_is_half_the_cross_product() {
        let v = Vector3::new(1.0, 0.0, 0.0);
        let w = Vector3::new(0.3, 0.8, 0.0);
        let limit = 0.5 * v.cross(&w).norm();
        let dev: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&b| {
                let r = cycle_from_velocities(&[v * b, w * b]).unwrap();
                (r.rotation_angle / (b * b) - limit).abs()
            })
            .collect();
        assert!(dev[2] < dev[1] && dev[1] < dev[0]);
        for k in 0..2 {
            let ratio = dev[k] / dev[k + 1];
            assert!((ratio - 100.0).abs() < 5.0, "decade ratio {ratio}");
        }
    }

    #[test]
    fn closed_form_axes_trivial_and_worked() {
        let e0 = FourVector::basis(0);
        let lab = Tetrad::canonical();
        let same = cycle2_exact_axes(&e0, &e0, &e0, &lab).unwrap();
        assert_abs_diff_eq!(same.components().clone_owned(), Matrix4::identity(), epsilon = 1e-15);

        let v = FourVector::from_three_velocity(Vector3::new(0.3f64.tanh(), 0.0, 0.0)).unwrap();
        let w = FourVector::from_three_velocity(Vector3::new(0.0, 0.3f64.tanh(), 0.0)).unwrap();
        let g = cycle2_exact_axes(&e0, &v, &w, &lab).unwrap();
        let brute = cycle2_product(&e0, &v, &w).unwrap();
        let expected = lab.transformed(&brute).unwrap();
        assert_abs_diff_eq!(
            g.components().clone_owned(),
            expected.components().clone_owned(),
            epsilon = 1e-12
        );
        assert_eq!(g.e(0), e0);
    }

    #[test]
    fn angle_axis_of_constructed_rotation() {
        let (s, c) = 0.1f64.sin_cos();
        let mut m = Matrix4::identity();
        m[(1, 1)] = c;
        m[(1, 2)] = -s;
        m[(2, 1)] = s;
        m[(2, 2)] = c;
        let aa = rotation_angle_axis(&LorentzMatrix(m), &FourVector::basis(0)).unwrap();
        assert_abs_diff_eq!(aa.angle, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(aa.axis.unwrap(), Vector3::new(0.0, 0.0, 1.0), epsilon = 1e-15);

        let id = rotation_angle_axis(&LorentzMatrix::identity(), &FourVector::basis(0)).unwrap();
        assert_eq!(id.angle, 0.0);
        assert!(id.axis.is_none());
    }

    #[test]
    fn half_turn_axis_uses_sign_rule() {
        let mut m = Matrix4::identity();
        m[(1, 1)] = -1.0;
        m[(3, 3)] = -1.0;
        let aa = rotation_angle_axis(&LorentzMatrix(m), &FourVector::basis(0)).unwrap();
        assert_abs_diff_eq!(aa.angle, std::f64::consts::PI, epsilon = 1e-15);
        assert_eq!(aa.axis.unwrap(), Vector3::new(0.0, 1.0, 0.0));
        let mut flip = Matrix4::identity();
        flip[(2, 2)] = -1.0;
        flip[(3, 3)] = -1.0;
        let n = rotation_angle_axis(&LorentzMatrix(flip), &FourVector::basis(0)).unwrap();
        assert_eq!(n.axis.unwrap(), Vector3::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn angle_axis_rejects_boost() {
        let b = boost_from_velocity(Vector3::new(0.3, 0.0, 0.0)).unwrap();
        assert!(matches!(
            rotation_angle_axis(b.matrix(), &FourVector::basis(0)),
            Err(Error::NotARotationAboutU { .. })
        ));
    }

    #[test]
    fn pure_boost_has_trivial_rotation_part() {
        let b = boost(
            &x_boost(0.2),
            &FourVector::from_three_velocity(Vector3::new(0.1, -0.5, 0.3)).unwrap(),
        )
        .unwrap();
        let (bp, rot) = decompose(b.matrix(), &b.source()).unwrap();
        assert_abs_diff_eq!(rot.0, Matrix4::identity(), epsilon = 1e-12);
        assert_abs_diff_eq!(bp.matrix().0, b.matrix().0, epsilon = 1e-12);
    }

    #[test]
    fn rotation_about_moving_vector() {
        // Conjugating a z-rotation by a boost gives a rotation fixing the boosted vector.
        let (s, c) = 0.7f64.sin_cos();
        let mut rz = Matrix4::identity();
        rz[(1, 1)] = c;
        rz[(1, 2)] = -s;
        rz[(2, 1)] = s;
        rz[(2, 2)] = c;
        let u = FourVector::from_three_velocity(Vector3::new(0.2, 0.1, -0.4)).unwrap();
        let b = boost(&FourVector::basis(0), &u).unwrap();
        let r = LorentzMatrix(b.matrix().0 * rz * b.inverse().matrix().0);
        let aa = rotation_angle_axis(&r, &u).unwrap();
        assert_abs_diff_eq!(aa.angle, 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(aa.axis.unwrap(), Vector3::new(0.0, 0.0, 1.0), epsilon = 1e-12);
    }

    #[test]
    fn non_group_witness() {
        let e0 = FourVector::basis(0);
        let v = x_boost(0.6);
        let w = FourVector::from_three_velocity(Vector3::new(0.0, 0.6, 0.0)).unwrap();
        let l = cycle2_product(&e0, &v, &w).unwrap();
        let (_, rot) = decompose(&l, &e0).unwrap();
        assert!(rotation_angle_axis(&rot, &e0).unwrap().angle > 1e-3);
    }

    #[test]
    fn random_cycle_closed_form_matches_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let u = sampling::velocity(&mut rng, 0.8);
            let v = sampling::velocity(&mut rng, 0.8);
            let w = sampling::velocity(&mut rng, 0.8);
            let t = rest_frame(&u).unwrap();
            let g = cycle2_exact_axes(&u, &v, &w, &t).unwrap();
            let brute = t.transformed(&cycle2_product(&u, &v, &w).unwrap()).unwrap();
            let dev = (g.components() - brute.components()).amax();
            assert!(dev < 1e-9, "deviation {dev}");
        }
    }

    proptest! {
        #[test]
        fn boost_maps_and_inverts(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = sampling::velocity(&mut rng, 0.9);
            let v = sampling::velocity(&mut rng, 0.9);
            let b = boost(&u, &v).unwrap();
            prop_assert!((b.apply(&u) - v).max_abs() < 1e-12);
            prop_assert!(b.matrix().residual() < 1e-11);
            let back = boost(&v, &u).unwrap();
            prop_assert!((back.matrix().0 - b.matrix().inverse().0).amax() < 1e-12);
        }

        #[test]
        fn reciprocity(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = sampling::velocity(&mut rng, 0.9);
            let v = sampling::velocity(&mut rng, 0.9);
            let frame = sampling::frame_at(&mut rng, &u);
            let b = boost(&u, &v).unwrap();
            let image = boost_space_axes(&frame, &b).unwrap();
            for l in 1..4 {
                let r = dot(&image.e(l), &frame.e(0)) + dot(&image.e(0), &frame.e(l));
                prop_assert!(r.abs() < 1e-12, "lambda {} residual {}", l, r);
            }
            let closed = boost_space_axes_closed_form(&frame, &b).unwrap();
            prop_assert!((closed.components() - image.components()).amax() < 1e-12);
            prop_assert!(image.orthonormality_residual() < 1e-12);
        }

        #[test]
        fn decomposition_reassembles(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = sampling::velocity(&mut rng, 0.8);
            let b1 = boost(&sampling::velocity(&mut rng, 0.8), &sampling::velocity(&mut rng, 0.8)).unwrap();
            let b2 = boost(&sampling::velocity(&mut rng, 0.8), &sampling::velocity(&mut rng, 0.8)).unwrap();
            let l = compose(b1.matrix(), b2.matrix()).unwrap();
            let (b, r) = decompose(&l, &u).unwrap();
            prop_assert!((b.matrix().0 * r.0 - l.0).amax() < 1e-12);
            prop_assert!((r.apply(&u) - u).max_abs() < 1e-12);
        }
    }
}
