//! Forward and inverse velocity models, and assembly of the full 3-D
//! velocity vector from one recorded pass.
//!
//! Angular motion at rate `omega` across a baseline of electrical length
//! `D_lambda` beats at `f_omega = omega D_lambda cos(alpha)`; near broadside
//! the tangential component measured by that baseline is
//! `v_alpha = f_omega R / D_lambda`. Two orthogonal baselines give the
//! in-plane components, the Doppler shift gives the radial one, and
//!
//! ```text
//! phi_v  = atan2(v_alpha_y, v_alpha_x)
//! v_theta = sqrt(v_alpha_x^2 + v_alpha_y^2)
//! beta   = atan(-v_R / v_theta)
//! ```
//!
//! complete the vector. [`reconstruct`] runs the whole chain on a
//! [`BasebandRecording`], using the a-priori pass geometry only for the
//! off-broadside measurement-time calibration and, in real mode, for sign
//! resolution of the folded spectra.

use crate::dsp::{
    centroid_frequency_in_band, channel_spectrogram, correlation_spectrogram,
    dc_null_calibration, estimate_closest_approach, peak_frequency_in_band, EstimatorParams,
};
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::recording::BasebandRecording;
use crate::scene::TruthRecord;
use crate::synthesis::BasebandMode;

/// Beat frequency produced by angular rate `omega` on a baseline of
/// `d_lambda` wavelengths at projected angle `alpha`.
pub fn interferometric_frequency(omega: f64, d_lambda: f64, alpha_rad: f64) -> f64 {
    omega * d_lambda * alpha_rad.cos()
}

/// Narrow-beam inversion: `v_alpha = f_omega R / D_lambda`.
pub fn tangential_from_frequency(f_omega: f64, r: f64, d_lambda: f64) -> Result<f64> {
    if !(r > 0.0) || !(d_lambda > 0.0) {
        return Err(Error::InvalidArgument(
            "tangential inversion needs positive R and D_lambda".into(),
        ));
    }
    Ok(f_omega * r / d_lambda)
}

/// Inversion with the heading projection correction
/// `cos(phi_v + Phi)` divided out. Fails within ~0.00006 degrees of the
/// orthogonal orientation where the projection is not invertible.
pub fn tangential_from_frequency_corrected(
    f_omega: f64,
    r: f64,
    d_lambda: f64,
    phi_v_deg: f64,
    baseline_phi_deg: f64,
) -> Result<f64> {
    let c = (phi_v_deg + baseline_phi_deg).to_radians().cos();
    if c.abs() < 1e-6 {
        return Err(Error::NonInvertibleProjection);
    }
    Ok(tangential_from_frequency(f_omega, r, d_lambda)? / c)
}

/// Components of tangential velocity seen by the x and y baselines for a
/// target at azimuth `phi` and elevation `theta` (zero at zenith) moving
/// with spherical velocity components `(v_phi, v_theta)`.
///
/// At the zenith the spherical decomposition degenerates; with `v_phi = 0`
/// and `phi` read as the heading azimuth the formula reduces to the plain
/// Cartesian components `(v_theta cos(phi), v_theta sin(phi))`.
pub fn forward_components(v_phi: f64, v_theta: f64, phi_deg: f64, theta_deg: f64) -> (f64, f64) {
    let (sp, cp) = phi_deg.to_radians().sin_cos();
    let ct = theta_deg.to_radians().cos();
    (v_phi * cp + v_theta * cp * ct, v_phi * sp + v_theta * sp * ct)
}

/// `v_R = f_d lambda / 2`, signed.
pub fn radial_velocity(f_d: f64, wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0) {
        return Err(Error::InvalidArgument("wavelength must be positive".into()));
    }
    Ok(f_d * wavelength / 2.0)
}

/// Quadrant-aware heading azimuth in (-180, 180] degrees.
pub fn heading_azimuth(v_alpha_x: f64, v_alpha_y: f64) -> Result<f64> {
    if v_alpha_x == 0.0 && v_alpha_y == 0.0 {
        return Err(Error::UndefinedHeading);
    }
    Ok(f64::atan2(v_alpha_y, v_alpha_x).to_degrees())
}

/// L2 norm of the two tangential components.
pub fn tangential_magnitude(v_alpha_x: f64, v_alpha_y: f64) -> f64 {
    f64::hypot(v_alpha_x, v_alpha_y)
}

/// Attack angle `beta = atan(-v_R / v_theta)` in [-90, 90] degrees;
/// `v_theta` is the tangential magnitude (nonnegative).
pub fn attack_angle(v_r: f64, v_theta: f64) -> Result<f64> {
    if v_r == 0.0 && v_theta == 0.0 {
        return Err(Error::UndefinedAttackAngle);
    }
    Ok(f64::atan2(-v_r, v_theta).to_degrees())
}

/// A-priori pass parameters used for the measurement-time calibration (the
/// trajectory is taken as known, as in the reference experiments).
#[derive(Debug, Clone, Copy)]
pub struct Calibration {
    pub speed: f64,
    pub heading_deg: f64,
    pub attack_deg: f64,
    pub t_zenith: f64,
    pub r_nominal: f64,
}

impl Calibration {
    pub fn from_truth(truth: &TruthRecord) -> Self {
        Calibration {
            speed: truth.speed,
            heading_deg: truth.phi_v_deg,
            attack_deg: truth.beta_deg,
            t_zenith: truth.t_zenith,
            r_nominal: truth.r_zenith,
        }
    }
}

/// Per-axis measurements behind a [`Velocity3DEstimate`].
#[derive(Debug, Clone, Copy)]
pub struct VelocityComponents {
    pub v_alpha_x: f64,
    pub v_alpha_y: f64,
    pub v_r: f64,
    /// Calibrated range used in the tangential inversion.
    pub r_used: f64,
    /// Electrical lengths of the two baselines used.
    pub d_lambda_x: f64,
    pub d_lambda_y: f64,
}

/// Reconstructed 3-D velocity of one pass.
#[derive(Debug, Clone, Copy)]
pub struct Velocity3DEstimate {
    pub phi_v_deg: f64,
    pub v_theta: f64,
    pub beta_deg: f64,
    pub speed: f64,
    pub components: VelocityComponents,
    /// Frame time the spectral peaks were read at.
    pub t_meas: f64,
}

/// Run the full estimation chain on one recorded pass: locate the
/// measurement time, read the two correlation peaks and the Doppler peak at
/// that frame, calibrate for the off-broadside offset, invert to velocity
/// components, and assemble `(phi_v, v_theta, beta, speed)`.
pub fn reconstruct(
    rec: &BasebandRecording,
    geom: &ArrayGeometry,
    params: &EstimatorParams,
    cal: &Calibration,
) -> Result<Velocity3DEstimate> {
    let t_ca = estimate_closest_approach(rec, params, params.ca_method)?;

    let (bl_x, bl_y) = geom.xy_baselines();
    let spec_x = correlation_spectrogram(rec, bl_x.rx_a, bl_x.rx_b, params)?;
    let spec_y = correlation_spectrogram(rec, bl_y.rx_a, bl_y.rx_b, params)?;
    let spec_d = channel_spectrogram(rec, 0, params)?;

    // all three spectrograms share the frame grid; snap once
    let fi = spec_x.frame_index_nearest(t_ca)?;
    let t_frame = spec_x.frame_times[fi];

    // off-broadside calibration from the known pass geometry
    let v_h = cal.speed * cal.attack_deg.to_radians().cos();
    let (r_corr, alpha_corr) = dc_null_calibration(v_h, 1.0, t_frame, cal.t_zenith, cal.r_nominal)?;
    // radial velocity the tangential motion alone would show at t_frame
    let v_r_geom = v_h * alpha_corr.sin();

    // Doppler: the band centroid around the frame's peak, since the tone
    // sweeps within one window near the crossing
    let (f_lo, f_hi) = match rec.mode {
        BasebandMode::Real => (params.min_freq, f64::INFINITY),
        BasebandMode::ComplexIq => (f64::NEG_INFINITY, f64::INFINITY),
    };
    let pk_d = centroid_frequency_in_band(&spec_d, t_frame, f_lo, f_hi, -12.0)?;
    let v_r = match rec.mode {
        BasebandMode::ComplexIq => radial_velocity(pk_d.f, geom.wavelength)? - v_r_geom,
        BasebandMode::Real => {
            let v_raw = radial_velocity(pk_d.f, geom.wavelength)?.abs();
            let bin_v = spec_d.bin_width() * geom.wavelength / 2.0;
            let slack = (2.0 * bin_v).max(0.2 * v_r_geom.abs());
            if v_raw <= v_r_geom.abs() + slack {
                // explained by the off-zenith measurement geometry
                let s = if v_r_geom >= 0.0 { 1.0 } else { -1.0 };
                s * v_raw - v_r_geom
            } else {
                // genuine radial motion; approach/recede from the assumed pass
                let s = if cal.attack_deg >= 0.0 { -1.0 } else { 1.0 };
                s * v_raw - v_r_geom
            }
        }
    };

    // correlation peaks (full band; the baseband high-pass does not carry
    // over to the difference frequency)
    let pk_x = peak_frequency_in_band(&spec_x, t_frame, params.interpolate, f64::NEG_INFINITY, f64::INFINITY)?;
    let pk_y = peak_frequency_in_band(&spec_y, t_frame, params.interpolate, f64::NEG_INFINITY, f64::INFINITY)?;

    // full off-axis inversion: at track angle alpha each baseline tone is
    // foreshortened by cos^3(alpha) (range growth, Eq.-(3) projection, and
    // the angular-rate slowdown); R_corr supplies one cosine, divide out the
    // other two
    let cos2 = alpha_corr.cos().powi(2);
    let (v_alpha_x, v_alpha_y) = match rec.mode {
        BasebandMode::ComplexIq => (
            tangential_from_frequency(pk_x.f, r_corr, bl_x.d_lambda)? / cos2,
            tangential_from_frequency(pk_y.f, r_corr, bl_y.d_lambda)? / cos2,
        ),
        BasebandMode::Real => {
            // folded spectra: magnitudes measured, signs from the known heading
            let h = cal.heading_deg.to_radians();
            let sx = if h.cos() >= 0.0 { 1.0 } else { -1.0 };
            let sy = if h.sin() >= 0.0 { 1.0 } else { -1.0 };
            (
                sx * tangential_from_frequency(pk_x.f.abs(), r_corr, bl_x.d_lambda)? / cos2,
                sy * tangential_from_frequency(pk_y.f.abs(), r_corr, bl_y.d_lambda)? / cos2,
            )
        }
    };

    let phi_v_deg = heading_azimuth(v_alpha_x, v_alpha_y)?;
    let v_theta = tangential_magnitude(v_alpha_x, v_alpha_y);
    let beta_deg = attack_angle(v_r, v_theta)?;

    Ok(Velocity3DEstimate {
        phi_v_deg,
        v_theta,
        beta_deg,
        speed: f64::hypot(v_theta, v_r),
        components: VelocityComponents {
            v_alpha_x,
            v_alpha_y,
            v_r,
            r_used: r_corr,
            d_lambda_x: bl_x.d_lambda,
            d_lambda_y: bl_y.d_lambda,
        },
        t_meas: t_frame,
    })
}
