//! Point targets on constant-velocity trajectories and the ground truth
//! derived from them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Vec3};

/// Constant-velocity straight-line path. `p0` is the position at t = 0;
/// the trajectory is defined over `[t_start, t_end]`.
#[derive(Debug, Clone, Copy)]
pub struct LinearTrajectory {
    pub p0: Vec3,
    pub velocity: Vec3,
    pub t_start: f64,
    pub t_end: f64,
}

impl LinearTrajectory {
    pub fn new(p0: Vec3, velocity: Vec3, t_start: f64, t_end: f64) -> Result<Self> {
        if !(t_end > t_start) {
            return Err(Error::InvalidArgument(format!(
                "trajectory span must satisfy t_end > t_start ({t_start}..{t_end})"
            )));
        }
        if !p0.is_finite() || !velocity.is_finite() {
            return Err(Error::InvalidArgument("non-finite trajectory".into()));
        }
        Ok(LinearTrajectory { p0, velocity, t_start, t_end })
    }

    /// Pass-style construction: the target crosses the array zenith axis at
    /// `(0, 0, radius)` at time `t_cross`, moving with `speed` along heading
    /// azimuth `heading_deg` (from +x, in the plane) and attack angle
    /// `attack_deg` (positive descends toward the array plane).
    pub fn from_pass(
        speed: f64,
        heading_deg: f64,
        attack_deg: f64,
        radius: f64,
        t_cross: f64,
        t_start: f64,
        t_end: f64,
    ) -> Result<Self> {
        if !(speed > 0.0) || !(radius > 0.0) {
            return Err(Error::InvalidArgument(
                "pass requires positive speed and radius".into(),
            ));
        }
        let h = heading_deg.to_radians();
        let b = attack_deg.to_radians();
        let velocity = Vec3::new(
            speed * b.cos() * h.cos(),
            speed * b.cos() * h.sin(),
            -speed * b.sin(),
        );
        let p0 = Vec3::new(0.0, 0.0, radius) - velocity * t_cross;
        LinearTrajectory::new(p0, velocity, t_start, t_end)
    }

    /// Position at `t`, which must lie within the trajectory span.
    pub fn position_at(&self, t: f64) -> Result<Vec3> {
        if t < self.t_start || t > self.t_end {
            return Err(Error::OutOfRange(format!(
                "t = {t} outside trajectory span [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        Ok(self.position_unchecked(t))
    }

    pub fn position_unchecked(&self, t: f64) -> Vec3 {
        self.p0 + self.velocity * t
    }

    /// Range from `center` at time `t` (no span check).
    pub fn range_at(&self, t: f64, center: Vec3) -> f64 {
        self.position_unchecked(t).distance(center)
    }

    /// Range rate toward `center` at time `t`; positive means receding.
    pub fn range_rate_at(&self, t: f64, center: Vec3) -> f64 {
        let q = self.position_unchecked(t) - center;
        let r = q.norm();
        if r == 0.0 {
            return 0.0;
        }
        q.dot(self.velocity) / r
    }

    /// Ground truth for the pass relative to `geom`'s center.
    pub fn ground_truth(&self, geom: &ArrayGeometry) -> Result<TruthRecord> {
        let v = self.velocity;
        let speed = v.norm();
        if speed == 0.0 {
            return Err(Error::UndefinedHeading);
        }
        let center = geom.center();
        let q = self.p0 - center;

        // closed-form argmin of |q + v t| clamped to the span
        let t_closest = clamp(-q.dot(v) / v.dot(v), self.t_start, self.t_end);

        // horizontal (zenith-axis) crossing time; equals t_closest for a
        // purely radial trajectory
        let vh = (v.x * v.x + v.y * v.y).sqrt();
        let t_zenith = if vh == 0.0 {
            t_closest
        } else {
            clamp(
                -(q.x * v.x + q.y * v.y) / (vh * vh),
                self.t_start,
                self.t_end,
            )
        };

        Ok(TruthRecord {
            phi_v_deg: f64::atan2(v.y, v.x).to_degrees(),
            beta_deg: f64::atan2(-v.z, vh).to_degrees(),
            speed,
            t_closest,
            r_closest: self.range_at(t_closest, center),
            t_zenith,
            r_zenith: self.range_at(t_zenith, center),
        })
    }
}

fn clamp(x: f64, lo: f64, hi: f64) -> f64 {
    x.max(lo).min(hi)
}

/// Ground truth of one pass.
///
/// `beta_deg` is the attack angle of the velocity vector relative to the
/// array plane: `atan(-v_R / v_theta)` evaluated where the target crosses
/// the zenith axis, which for a straight pass equals the angle between the
/// velocity and the plane. Positive beta descends toward the array.
#[derive(Debug, Clone, Copy)]
pub struct TruthRecord {
    pub phi_v_deg: f64,
    pub beta_deg: f64,
    pub speed: f64,
    pub t_closest: f64,
    pub r_closest: f64,
    pub t_zenith: f64,
    pub r_zenith: f64,
}

impl TruthRecord {
    /// Radial velocity at the zenith crossing (positive receding).
    pub fn v_radial(&self) -> f64 {
        -self.speed * self.beta_deg.to_radians().sin()
    }

    /// Tangential speed at the zenith crossing.
    pub fn v_tangential(&self) -> f64 {
        self.speed * self.beta_deg.to_radians().cos()
    }
}

/// Point scatterer with a complex reflectivity amplitude.
#[derive(Debug, Clone, Copy)]
pub struct PointTarget {
    pub trajectory: LinearTrajectory,
    pub reflectivity: Complex64,
}

impl PointTarget {
    pub fn new(trajectory: LinearTrajectory, reflectivity: Complex64) -> Self {
        PointTarget { trajectory, reflectivity }
    }

    pub fn unit(trajectory: LinearTrajectory) -> Self {
        PointTarget::new(trajectory, Complex64::new(1.0, 0.0))
    }
}

/// Collection of targets illuminated together.
#[derive(Debug, Clone, Default)]
pub struct Scene {
    pub targets: Vec<PointTarget>,
}

impl Scene {
    pub fn single(trajectory: LinearTrajectory) -> Self {
        Scene { targets: vec![PointTarget::unit(trajectory)] }
    }
}
