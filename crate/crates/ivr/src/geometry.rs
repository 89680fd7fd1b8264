//! Antenna array geometry: the 2x2 transmit/receive aperture, its baselines,
//! and target angles projected onto a baseline plane.
//!
//! The array lies in the z = 0 plane and looks toward +z (zenith). The square
//! layout places the three receivers so that Rx1-Rx2 forms the x-axis
//! (`Phi = 0`) baseline, Rx1-Rx3 the y-axis (`Phi = 90`) baseline, and
//! Rx2-Rx3 the `Phi = -45` diagonal with `D = sqrt(2) L`. The transmitter
//! sits at the corner diagonally opposite Rx1; its -x offset makes the
//! returned power asymmetric between the approach and recede halves of a
//! pass, as seen on hardware.
//!
//! `Phi` is measured from the x-axis toward -y and folded into (-90, 90]
//! degrees, so the projection factor `cos(phi_v + Phi)` holds with
//! `Phi = 0` for the x baseline and `Phi = 90` for the y baseline.

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Ratio between a Gaussian pattern's half-power width and its sigma.
pub const HPBW_SIGMA_RATIO: f64 = 2.355;

/// Cartesian 3-vector in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).norm()
    }

    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        if n == 0.0 {
            return Vec3::ZERO;
        }
        self * (1.0 / n)
    }

    /// Rotate about the z-axis by `angle_rad` (right-handed, +x toward +y).
    pub fn rotated_z(self, angle_rad: f64) -> Vec3 {
        let (s, c) = angle_rad.sin_cos();
        Vec3::new(c * self.x - s * self.y, s * self.x + c * self.y, self.z)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl std::ops::Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Transmit/receive aperture: one Tx and three Rx in the z = 0 plane.
#[derive(Debug, Clone)]
pub struct ArrayGeometry {
    /// Carrier frequency, Hz.
    pub f0: f64,
    /// Carrier wavelength, m (`c / f0`).
    pub wavelength: f64,
    /// Transmitter position.
    pub tx: Vec3,
    /// Receiver positions, ordered Rx1, Rx2, Rx3.
    pub rx: [Vec3; 3],
    /// Square side length, m.
    pub side_length: f64,
}

/// Receiver pair with its interferometric parameters.
///
/// `b_hat` points from element `rx_a` to element `rx_b`; `d_lambda` is the
/// electrical baseline length `D f0 / c` in wavelengths.
#[derive(Debug, Clone, Copy)]
pub struct Baseline {
    pub rx_a: usize,
    pub rx_b: usize,
    pub b_hat: Vec3,
    pub phi_deg: f64,
    pub d: f64,
    pub d_lambda: f64,
}

impl ArrayGeometry {
    /// Build the square array used throughout: side length given in
    /// wavelengths at carrier `f0`.
    pub fn square(side_length_wavelengths: f64, f0: f64) -> Result<Self> {
        if !(side_length_wavelengths > 0.0) || !side_length_wavelengths.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "side length must be positive, got {side_length_wavelengths}"
            )));
        }
        if !(f0 > 0.0) || !f0.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "carrier frequency must be positive, got {f0}"
            )));
        }
        if side_length_wavelengths < 5.0 {
            log::warn!(
                "baseline {side_length_wavelengths} wavelengths is short; \
                 correlation interferometry typically wants D > 5 lambda"
            );
        }
        let wavelength = SPEED_OF_LIGHT / f0;
        let h = side_length_wavelengths * wavelength / 2.0;
        Ok(ArrayGeometry {
            f0,
            wavelength,
            // Rx1 shares the two orthogonal baselines; Rx2-Rx3 is the
            // sqrt(2) diagonal; Tx is offset toward -x.
            tx: Vec3::new(-h, h, 0.0),
            rx: [
                Vec3::new(h, -h, 0.0),
                Vec3::new(-h, -h, 0.0),
                Vec3::new(h, h, 0.0),
            ],
            side_length: side_length_wavelengths * wavelength,
        })
    }

    /// Geometric center of the four elements (the measurement origin).
    pub fn center(&self) -> Vec3 {
        (self.tx + self.rx[0] + self.rx[1] + self.rx[2]) * 0.25
    }

    /// Baseline between receivers `a` and `b` (0-based indices).
    pub fn baseline(&self, a: usize, b: usize) -> Result<Baseline> {
        if a >= 3 || b >= 3 {
            return Err(Error::InvalidArgument(format!(
                "receiver index out of range: ({a}, {b})"
            )));
        }
        if a == b {
            return Err(Error::InvalidArgument(
                "baseline requires two distinct receivers".into(),
            ));
        }
        let sep = self.rx[b] - self.rx[a];
        let d = sep.norm();
        let b_hat = sep * (1.0 / d);
        Ok(Baseline {
            rx_a: a,
            rx_b: b,
            b_hat,
            phi_deg: fold_phi_deg(f64::atan2(-b_hat.y, b_hat.x).to_degrees()),
            d,
            d_lambda: d * self.f0 / SPEED_OF_LIGHT,
        })
    }

    /// The (`Phi = 0`, `Phi = 90`) measurement pair with `b_hat` oriented
    /// along +x and +y respectively.
    pub fn xy_baselines(&self) -> (Baseline, Baseline) {
        let bx = self.baseline(1, 0).expect("fixed indices valid");
        let by = self.baseline(0, 2).expect("fixed indices valid");
        (bx, by)
    }

    /// The `Phi = -45` diagonal baseline, `b_hat` along (+x, +y).
    pub fn diagonal_baseline(&self) -> Baseline {
        self.baseline(1, 2).expect("fixed indices valid")
    }

    /// Copy of the geometry with receiver `idx` rotated about the array
    /// center by `angle_deg` in the z = 0 plane. Models the mount
    /// misalignment perturbation.
    pub fn with_rx_rotated(&self, idx: usize, angle_deg: f64) -> Result<Self> {
        if idx >= 3 {
            return Err(Error::InvalidArgument(format!(
                "receiver index out of range: {idx}"
            )));
        }
        let mut g = self.clone();
        let c = self.center();
        g.rx[idx] = c + (self.rx[idx] - c).rotated_z(angle_deg.to_radians());
        Ok(g)
    }
}

/// Fold a baseline angle into (-90, 90] degrees; baselines are
/// orientation-free for `Phi`.
fn fold_phi_deg(mut phi: f64) -> f64 {
    while phi > 90.0 {
        phi -= 180.0;
    }
    while phi <= -90.0 {
        phi += 180.0;
    }
    phi
}

/// Angle between +z and the projection of `target` onto the plane spanned by
/// the baseline vector and +z. Radians, in (-pi/2, pi/2) for targets with
/// z > 0.
pub fn projected_angle(target: Vec3, bl: &Baseline) -> Result<f64> {
    if target.norm() == 0.0 {
        return Err(Error::InvalidArgument(
            "projected angle undefined for zero-length target vector".into(),
        ));
    }
    Ok(f64::atan2(target.dot(bl.b_hat), target.z))
}
