//! Timelike worldlines parametrized by proper time.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::minkowski::{dot, FourVector};
use crate::rotation::RotationParams;

/// Allowed `|u . udot|` relative to `|udot|` for a consistent sample.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-9;

/// One point of a worldline: proper time, four-velocity and its derivative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorldlineSample {
    pub s: f64,
    pub u: FourVector,
    pub udot: FourVector,
}

impl WorldlineSample {
    /// Checks `u.u = -1` and `u.udot = 0`.
    pub fn check(&self) -> Result<()> {
        let norm = self.u.norm_sq();
        let residual = dot(&self.u, &self.udot).abs();
        let scale = 1.0 + self.u.max_abs() * self.udot.max_abs();
        if !self.u.is_finite() || !self.udot.is_finite() {
            return Err(Error::NonFinite);
        }
        if (norm + 1.0).abs() > CONSISTENCY_TOLERANCE * (1.0 + self.u.time().powi(2))
            || residual > CONSISTENCY_TOLERANCE * scale
        {
            return Err(Error::InconsistentWorldline {
                s: self.s,
                residual: residual.max((norm + 1.0).abs()),
            });
        }
        Ok(())
    }
}

pub trait Worldline {
    fn position(&self, s: f64) -> FourVector;
    fn velocity(&self, s: f64) -> FourVector;
    fn acceleration(&self, s: f64) -> FourVector;

    fn sample(&self, s: f64) -> WorldlineSample {
        WorldlineSample {
            s,
            u: self.velocity(s),
            udot: self.acceleration(s),
        }
    }
}

/// Straight worldline `x(s) = origin + s u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Inertial {
    pub origin: FourVector,
    pub u: FourVector,
}

impl Inertial {
    pub fn new(origin: FourVector, u: FourVector) -> Result<Self> {
        u.check_unit_future_timelike(1e-9)?;
        Ok(Inertial { origin, u })
    }
}

impl Worldline for Inertial {
    fn position(&self, s: f64) -> FourVector {
        self.origin + s * self.u
    }

    fn velocity(&self, _s: f64) -> FourVector {
        self.u
    }

    fn acceleration(&self, _s: f64) -> FourVector {
        FourVector::zero()
    }
}

/// Uniform circular motion about the z axis, counter-clockwise, starting on
/// the +x axis at `t = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircularOrbit {
    radius: f64,
    speed: f64,
    gamma: f64,
}

impl CircularOrbit {
    /// Orbit of radius `radius` with lab speed `speed` (`|speed| < 1`).
    pub fn new(radius: f64, speed: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::ZeroRadius { r: radius });
        }
        if !(speed.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "orbital speed {speed} is not subluminal"
            )));
        }
        Ok(CircularOrbit {
            radius,
            speed,
            gamma: 1.0 / (1.0 - speed * speed).sqrt(),
        })
    }

    /// The orbit of a co-rotating observer: rim speed `tanh(omega r)` in units of c.
    pub fn from_rotation(p: &RotationParams) -> Result<Self> {
        CircularOrbit::new(p.r(), p.alpha().tanh())
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Lab angular frequency.
    pub fn angular_frequency(&self) -> f64 {
        self.speed / self.radius
    }

    pub fn lab_period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.angular_frequency().abs()
    }

    pub fn proper_period(&self) -> f64 {
        self.lab_period() / self.gamma
    }

    pub fn phase(&self, s: f64) -> f64 {
        self.angular_frequency() * self.gamma * s
    }

    /// Lab three-velocity at proper time `s`.
    pub fn three_velocity(&self, s: f64) -> Vector3<f64> {
        let (sn, cs) = self.phase(s).sin_cos();
        self.speed * Vector3::new(-sn, cs, 0.0)
    }

    /// Proper-time derivative of the lab three-velocity.
    pub fn three_velocity_rate(&self, s: f64) -> Vector3<f64> {
        let (sn, cs) = self.phase(s).sin_cos();
        -self.speed * self.angular_frequency() * self.gamma * Vector3::new(cs, sn, 0.0)
    }
}

impl Worldline for CircularOrbit {
    fn position(&self, s: f64) -> FourVector {
        let (sn, cs) = self.phase(s).sin_cos();
        FourVector::new(self.gamma * s, self.radius * cs, self.radius * sn, 0.0)
    }

    fn velocity(&self, s: f64) -> FourVector {
        FourVector::from_time_space(self.gamma, self.gamma * self.three_velocity(s))
    }

    fn acceleration(&self, s: f64) -> FourVector {
        FourVector::from_time_space(0.0, self.gamma * self.three_velocity_rate(s))
    }
}

/// Worldline through tabulated samples, interpolated by cubic Hermite
/// polynomials in each interval.
#[derive(Clone, Debug, PartialEq)]
pub struct Sampled {
    samples: Vec<WorldlineSample>,
    origin: FourVector,
    /// Position at the start of each interval.
    knots: Vec<FourVector>,
}

impl Sampled {
    /// Validates the samples (strictly increasing `s`, `u.udot = 0`) and
    /// anchors the position at the first sample to `origin`.
    pub fn new(samples: Vec<WorldlineSample>, origin: FourVector) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidParameter("need at least two worldline samples".into()));
        }
        for w in samples.windows(2) {
            if !(w[1].s > w[0].s) {
                return Err(Error::InvalidParameter(format!(
                    "samples not increasing at s = {}",
                    w[1].s
                )));
            }
        }
        for sm in &samples {
            sm.check()?;
        }
        let mut knots = vec![origin];
        for w in samples.windows(2) {
            let h = w[1].s - w[0].s;
            // Exact integral of the Hermite cubic over the interval.
            let inc = (h / 2.0) * (w[0].u + w[1].u) + (h * h / 12.0) * (w[0].udot - w[1].udot);
            knots.push(*knots.last().expect("nonempty") + inc);
        }
        Ok(Sampled { samples, origin, knots })
    }

    pub fn samples(&self) -> &[WorldlineSample] {
        &self.samples
    }

    pub fn range(&self) -> (f64, f64) {
        (self.samples[0].s, self.samples[self.samples.len() - 1].s)
    }

    fn locate(&self, s: f64) -> (usize, f64, f64) {
        let n = self.samples.len();
        let k = match self.samples.binary_search_by(|p| p.s.total_cmp(&s)) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        };
        let h = self.samples[k + 1].s - self.samples[k].s;
        (k, (s - self.samples[k].s) / h, h)
    }
}

impl Worldline for Sampled {
    fn position(&self, s: f64) -> FourVector {
        let (k, t, h) = self.locate(s);
        let (a, b) = (&self.samples[k], &self.samples[k + 1]);
        // Antiderivatives of the Hermite basis on [0, t].
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let i00 = t - t3 + 0.5 * t4;
        let i10 = 0.5 * t2 - 2.0 * t3 / 3.0 + 0.25 * t4;
        let i01 = t3 - 0.5 * t4;
        let i11 = -t3 / 3.0 + 0.25 * t4;
        self.knots[k] + h * (i00 * a.u + (h * i10) * a.udot + i01 * b.u + (h * i11) * b.udot)
    }

    fn velocity(&self, s: f64) -> FourVector {
        let (k, t, h) = self.locate(s);
        let (a, b) = (&self.samples[k], &self.samples[k + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * a.u + (h * h10) * a.udot + h01 * b.u + (h * h11) * b.udot
    }

    fn acceleration(&self, s: f64) -> FourVector {
        let (k, t, h) = self.locate(s);
        let (a, b) = (&self.samples[k], &self.samples[k + 1]);
        let t2 = t * t;
        let d00 = 6.0 * t2 - 6.0 * t;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = -6.0 * t2 + 6.0 * t;
        let d11 = 3.0 * t2 - 2.0 * t;
        (d00 / h) * a.u + d10 * a.udot + (d01 / h) * b.u + d11 * b.udot
    }
}

impl Sampled {
    pub fn origin(&self) -> FourVector {
        self.origin
    }
}

/// Samples `wl` at the given proper times.
pub fn tabulate(wl: &dyn Worldline, grid: &[f64]) -> Vec<WorldlineSample> {
    grid.iter().map(|&s| wl.sample(s)).collect()
}

/// `n + 1` equally spaced points covering `[s0, s1]`.
pub fn uniform_grid(s0: f64, s1: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n)
        .map(|k| {
            if k == n {
                s1
            } else {
                s0 + (s1 - s0) * k as f64 / n as f64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::central_diff;
    use approx::assert_abs_diff_eq;

    #[test]
    fn inertial_is_straight() {
        let u = FourVector::from_three_velocity(Vector3::new(0.1, 0.2, 0.0)).unwrap();
        let wl = Inertial::new(FourVector::zero(), u).unwrap();
        assert_eq!(wl.position(2.0), 2.0 * u);
        assert_eq!(wl.acceleration(5.0), FourVector::zero());
        assert!(Inertial::new(FourVector::zero(), FourVector::new(1.0, 1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn circular_orbit_kinematics() {
        let orbit = CircularOrbit::new(2.0, 0.6).unwrap();
        assert_abs_diff_eq!(orbit.gamma(), 1.25, epsilon = 1e-15);
        for s in [0.0, 0.7, 3.1] {
            let smp = orbit.sample(s);
            smp.check().unwrap();
            let du = central_diff(|t| orbit.velocity(t), s, 1e-5);
            assert!((du - smp.udot).max_abs() < 1e-9);
            let dx = central_diff(|t| orbit.position(t), s, 1e-5);
            assert!((dx - smp.u).max_abs() < 1e-9);
        }
        let x = orbit.position(orbit.proper_period());
        assert_abs_diff_eq!(x.spatial(), Vector3::new(2.0, 0.0, 0.0), epsilon = 1e-12);
        assert_abs_diff_eq!(x.time(), orbit.lab_period(), epsilon = 1e-12);
        assert!(CircularOrbit::new(1.0, 1.0).is_err());
        assert!(CircularOrbit::new(0.0, 0.5).is_err());
    }

    #[test]
    fn co_rotating_orbit_speed() {
        let p = RotationParams::new(0.5, 1.0, 1.0, 0.0).unwrap();
        let orbit = CircularOrbit::from_rotation(&p).unwrap();
        assert_abs_diff_eq!(orbit.speed(), 0.5f64.tanh(), epsilon = 1e-15);
    }

    #[test]
    fn sampled_rejects_inconsistent_samples() {
        let bad = WorldlineSample {
            s: 0.0,
            u: FourVector::basis(0),
            udot: FourVector::new(1.0, 0.0, 0.0, 0.0),
        };
        let good = WorldlineSample {
            s: 1.0,
            u: FourVector::basis(0),
            udot: FourVector::zero(),
        };
        assert!(matches!(
            Sampled::new(vec![bad, good], FourVector::zero()),
            Err(Error::InconsistentWorldline { .. })
        ));
        assert!(Sampled::new(vec![good, good], FourVector::zero()).is_err());
    }

    #[test]
    fn sampled_interpolates_orbit() {
        let orbit = CircularOrbit::new(1.0, 0.6).unwrap();
        let grid = uniform_grid(0.0, orbit.proper_period(), 256);
        let table = Sampled::new(tabulate(&orbit, &grid), orbit.position(0.0)).unwrap();
        for s in [0.013, 1.7, 4.9] {
            assert!((table.velocity(s) - orbit.velocity(s)).max_abs() < 1e-8);
            assert!((table.acceleration(s) - orbit.acceleration(s)).max_abs() < 1e-4);
            assert!((table.position(s) - orbit.position(s)).max_abs() < 1e-8);
        }
        let end = table.range().1;
        assert!((table.position(end) - orbit.position(end)).max_abs() < 1e-8);
        let dx = central_diff(|t| table.position(t), 2.0, 1e-6);
        assert!((dx - table.velocity(2.0)).max_abs() < 1e-8);
    }

    #[test]
    fn grid_endpoints() {
        let g = uniform_grid(0.0, 1.0, 4);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
