//! Seeded random inputs for property checks and the self-test.

use nalgebra::{Matrix4, Rotation3, Vector3};
use rand::Rng;

use crate::lorentz::rest_frame;
use crate::minkowski::{FieldTensor, FourVector, Tetrad};

/// Uniformly distributed unit vector.
pub fn direction<R: Rng>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Lab three-velocity with speed uniform in `[0, max_speed)`.
pub fn three_velocity<R: Rng>(rng: &mut R, max_speed: f64) -> Vector3<f64> {
    direction(rng) * rng.gen_range(0.0..max_speed)
}

/// Unit future-pointing four-velocity with lab speed below `max_speed`.
pub fn velocity<R: Rng>(rng: &mut R, max_speed: f64) -> FourVector {
    FourVector::from_three_velocity(three_velocity(rng, max_speed)).expect("speed below one")
}

pub fn rotation<R: Rng>(rng: &mut R) -> Rotation3<f64> {
    Rotation3::from_scaled_axis(direction(rng) * rng.gen_range(0.0..std::f64::consts::PI))
}

/// Orthonormal frame with time leg `u` and randomly oriented spatial triad.
pub fn frame_at<R: Rng>(rng: &mut R, u: &FourVector) -> Tetrad {
    let rest = rest_frame(u).expect("valid four-velocity");
    let mut spin = Matrix4::identity();
    spin.fixed_view_mut::<3, 3>(1, 1).copy_from(rotation(rng).matrix());
    Tetrad::from_matrix(&(rest.components() * spin)).expect("regular frame")
}

/// Random orthonormal frame moving slower than `max_speed`.
pub fn tetrad<R: Rng>(rng: &mut R, max_speed: f64) -> Tetrad {
    let u = velocity(rng, max_speed);
    frame_at(rng, &u)
}

/// Field tensor with components uniform in `[-scale, scale]`.
pub fn field<R: Rng>(rng: &mut R, scale: f64) -> FieldTensor {
    let mut c = [0.0; 6];
    for v in c.iter_mut() {
        *v = rng.gen_range(-scale..scale);
    }
    FieldTensor::from_components(c)
}

/// Spacelike unit vector orthogonal to `u`.
pub fn orthogonal_unit<R: Rng>(rng: &mut R, u: &FourVector) -> FourVector {
    let frame = rest_frame(u).expect("valid four-velocity");
    let d = direction(rng);
    d[0] * frame.e(1) + d[1] * frame.e(2) + d[2] * frame.e(3)
}
