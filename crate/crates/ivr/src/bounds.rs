//! Resolution and Cramer-Rao accuracy bounds, with antenna-pattern and
//! signal-envelope moment computation.
//!
//! Moments follow the plain polynomial convention (`mu = int t w dt`,
//! `zeta^2 = int t^2 w dt`, `E_s = int w dt` with `w` the squared envelope
//! or squared power pattern). The frequency bounds then carry the `(2 pi)^2`
//! factor explicitly,
//!
//! ```text
//! var(f_d)     >= 1 / [ snr * 4 pi^2 * (zeta_t^2 - mu_t^2 / E_s) ]
//! var(f_omega) >= omega^3 / [ snr * 4 pi^2 * (zeta_A^2 - mu_A^2 / E_s) ]
//! ```
//!
//! where `snr` is the peak linear SNR per unit time, `2 |eta|^2 / N_0` in Hz
//! (see [`peak_snr_rate`]). The `omega^3` in the angular bound converts the
//! pattern moments from angle to time through `theta = omega t`.

use crate::error::{Error, Result};
use crate::geometry::{HPBW_SIGMA_RATIO, SPEED_OF_LIGHT};

/// Doppler resolution of a `T`-second observation: `1 / T` Hz.
pub fn doppler_resolution(t_obs: f64) -> f64 {
    1.0 / t_obs
}

/// Minimum resolvable interferometric frequency separation,
/// `2.355 omega / (pi theta_BW)` Hz.
pub fn interferometric_resolution(omega: f64, theta_bw_rad: f64) -> f64 {
    HPBW_SIGMA_RATIO * omega / (std::f64::consts::PI * theta_bw_rad)
}

/// Amplitude spectrum of the correlator output for a point target crossing a
/// Gaussian beam of width `sigma` at angular rate `omega`, centered on the
/// interferometric frequency `f_omega`:
///
/// ```text
/// R_c(f) = sqrt(2 pi sigma^2 / omega^2) exp[-(2 pi^2 sigma^2 / omega^2)(f - f_omega)^2]
/// ```
pub fn correlation_spectrum(f: f64, sigma_rad: f64, omega: f64, f_omega: f64) -> f64 {
    let s2w2 = sigma_rad * sigma_rad / (omega * omega);
    let pi = std::f64::consts::PI;
    (2.0 * pi * s2w2).sqrt() * (-(2.0 * pi * pi * s2w2) * (f - f_omega).powi(2)).exp()
}

/// Resolution width of [`correlation_spectrum`]: the full width at which its
/// squared magnitude has fallen by `e`, which is exactly
/// `omega / (pi sigma)` and coincides with [`interferometric_resolution`].
pub fn correlation_spectrum_width(sigma_rad: f64, omega: f64) -> f64 {
    omega / (std::f64::consts::PI * sigma_rad)
}

/// Moments of the squared antenna power pattern over angle.
#[derive(Debug, Clone, Copy)]
pub struct PatternMoments {
    /// First moment, `int theta A(theta)^2 dtheta`; zero for symmetric
    /// patterns.
    pub mu_a: f64,
    /// Second moment, `int theta^2 A(theta)^2 dtheta`.
    pub zeta_a_sq: f64,
    /// Pattern energy, `int A(theta)^2 dtheta`.
    pub e_s: f64,
}

/// Moments of a squared signal envelope over time.
#[derive(Debug, Clone, Copy)]
pub struct TimeMoments {
    pub mu_t: f64,
    pub zeta_t_sq: f64,
    pub e_s: f64,
}

/// Moments of the Gaussian power pattern with the given half-power
/// beamwidth, integrated over [-pi/2, pi/2].
pub fn pattern_moments(hpbw_deg: f64) -> Result<PatternMoments> {
    if !(hpbw_deg > 0.0) {
        return Err(Error::InvalidArgument("beamwidth must be positive".into()));
    }
    let sigma = hpbw_deg.to_radians() / HPBW_SIGMA_RATIO;
    // A(theta) is the power pattern; the moment weight is its square
    let w = |theta: f64| (-(theta * theta) / (sigma * sigma)).exp();
    let half_pi = std::f64::consts::FRAC_PI_2;
    let n = 32_768;
    let e_s = simpson(&w, -half_pi, half_pi, n);
    let mu_a = simpson(|t| t * w(t), -half_pi, half_pi, n);
    let zeta_a_sq = simpson(|t| t * t * w(t), -half_pi, half_pi, n);
    if !(e_s > 0.0) || !(zeta_a_sq > 0.0) {
        return Err(Error::Numeric("pattern moments did not converge".into()));
    }
    Ok(PatternMoments { mu_a, zeta_a_sq, e_s })
}

/// Moments of a sampled envelope `a(t)` starting at `t0`; the weight is
/// `a(t)^2`, integrated by the trapezoid rule.
pub fn time_moments(envelope: &[f64], sample_rate: f64, t0: f64) -> Result<TimeMoments> {
    if envelope.len() < 2 {
        return Err(Error::InvalidArgument("envelope needs at least 2 samples".into()));
    }
    if !(sample_rate > 0.0) {
        return Err(Error::InvalidArgument("sample rate must be positive".into()));
    }
    let dt = 1.0 / sample_rate;
    let mut e_s = 0.0;
    let mut mu_t = 0.0;
    let mut zeta_t_sq = 0.0;
    for (k, &a) in envelope.iter().enumerate() {
        let t = t0 + k as f64 * dt;
        let w = a * a;
        let trap = if k == 0 || k == envelope.len() - 1 { 0.5 } else { 1.0 };
        e_s += trap * w * dt;
        mu_t += trap * t * w * dt;
        zeta_t_sq += trap * t * t * w * dt;
    }
    if !(e_s > 0.0) {
        return Err(Error::DegenerateMoments);
    }
    Ok(TimeMoments { mu_t, zeta_t_sq, e_s })
}

/// Peak linear SNR per unit time, `2 |eta|^2 / N_0` in Hz, for a recording
/// whose per-sample peak envelope-to-noise power ratio is `snr_db` at
/// `sample_rate`.
pub fn peak_snr_rate(snr_db: f64, sample_rate: f64) -> f64 {
    2.0 * 10f64.powf(snr_db / 10.0) * sample_rate
}

/// Variance bound on the Doppler frequency estimate (Hz^2) and the
/// corresponding radial-velocity standard deviation `(c / 2 f0) sqrt(var)`.
pub fn doppler_crlb(snr_peak: f64, tm: &TimeMoments, f0: f64) -> Result<(f64, f64)> {
    if !(snr_peak > 0.0) || !(f0 > 0.0) {
        return Err(Error::InvalidArgument("snr and f0 must be positive".into()));
    }
    let spread = tm.zeta_t_sq - tm.mu_t * tm.mu_t / tm.e_s;
    if !(spread > 0.0) {
        return Err(Error::DegenerateMoments);
    }
    let var = 1.0 / (snr_peak * 4.0 * std::f64::consts::PI.powi(2) * spread);
    Ok((var, SPEED_OF_LIGHT / (2.0 * f0) * var.sqrt()))
}

/// Variance bound on the interferometric frequency estimate (Hz^2) for a
/// target at angular rate `omega`, and the tangential-velocity standard
/// deviation `(R / D_lambda) sqrt(var)`.
pub fn angular_crlb(
    snr_peak: f64,
    pm: &PatternMoments,
    omega: f64,
    r: f64,
    d_lambda: f64,
) -> Result<(f64, f64)> {
    if !(snr_peak > 0.0) || !(omega > 0.0) || !(r > 0.0) || !(d_lambda > 0.0) {
        return Err(Error::InvalidArgument(
            "snr, omega, R and D_lambda must be positive".into(),
        ));
    }
    let spread = pm.zeta_a_sq - pm.mu_a * pm.mu_a / pm.e_s;
    if !(spread > 0.0) {
        return Err(Error::DegenerateMoments);
    }
    let var = omega.powi(3) / (snr_peak * 4.0 * std::f64::consts::PI.powi(2) * spread);
    Ok((var, r / d_lambda * var.sqrt()))
}

/// Gaussian beam-limited envelope of a pass at angular rate `omega`:
/// `a(t) = exp(-(omega t)^2 / 2 sigma^2)` sampled over +-5 sigma/omega.
/// This is the per-channel two-way amplitude envelope a Gaussian pattern
/// imposes on a crossing target.
pub fn pass_envelope_moments(
    hpbw_deg: f64,
    omega: f64,
    sample_rate: f64,
) -> Result<TimeMoments> {
    if !(omega > 0.0) {
        return Err(Error::InvalidArgument("omega must be positive".into()));
    }
    let sigma = hpbw_deg.to_radians() / HPBW_SIGMA_RATIO;
    let t_half = 5.0 * sigma / omega;
    let n = (2.0 * t_half * sample_rate).ceil() as usize + 1;
    let env: Vec<f64> = (0..n)
        .map(|k| {
            let t = -t_half + k as f64 / sample_rate;
            (-(omega * t).powi(2) / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    time_moments(&env, sample_rate, -t_half)
}

/// Bundle of resolution figures and accuracy bounds for one operating point.
///
/// The angular bound is evaluated at half the per-channel SNR, since the
/// correlator output carries the noise of both receivers.
#[derive(Debug, Clone)]
pub struct CrlbReport {
    pub snr_db: f64,
    pub f0: f64,
    pub r: f64,
    pub d_lambda: f64,
    pub speed: f64,
    pub omega: f64,
    pub hpbw_deg: f64,
    pub window_len: f64,
    pub doppler_resolution_hz: f64,
    pub interferometric_resolution_hz: f64,
    pub var_f_d: f64,
    pub std_v_r: f64,
    pub var_f_omega: f64,
    pub std_v_alpha: f64,
}

impl CrlbReport {
    #[allow(clippy::too_many_arguments)]
    pub fn compute(
        snr_db: f64,
        sample_rate: f64,
        hpbw_deg: f64,
        speed: f64,
        r: f64,
        f0: f64,
        d_lambda: f64,
        window_len: f64,
    ) -> Result<Self> {
        let omega = speed / r;
        let snr_rate = peak_snr_rate(snr_db, sample_rate);
        let tm = pass_envelope_moments(hpbw_deg, omega, sample_rate)?;
        let (var_f_d, std_v_r) = doppler_crlb(snr_rate, &tm, f0)?;
        let pm = pattern_moments(hpbw_deg)?;
        let (var_f_omega, std_v_alpha) = angular_crlb(snr_rate / 2.0, &pm, omega, r, d_lambda)?;
        Ok(CrlbReport {
            snr_db,
            f0,
            r,
            d_lambda,
            speed,
            omega,
            hpbw_deg,
            window_len,
            doppler_resolution_hz: doppler_resolution(window_len),
            interferometric_resolution_hz: interferometric_resolution(
                omega,
                hpbw_deg.to_radians(),
            ),
            var_f_d,
            std_v_r,
            var_f_omega,
            std_v_alpha,
        })
    }

    pub fn csv_header() -> &'static str {
        "snr_db,f0,r,d_lambda,speed,omega,hpbw_deg,window_len,\
         doppler_resolution_hz,interferometric_resolution_hz,\
         var_f_d,std_v_r,var_f_omega,std_v_alpha"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.snr_db,
            self.f0,
            self.r,
            self.d_lambda,
            self.speed,
            self.omega,
            self.hpbw_deg,
            self.window_len,
            self.doppler_resolution_hz,
            self.interferometric_resolution_hz,
            self.var_f_d,
            self.std_v_r,
            self.var_f_omega,
            self.std_v_alpha
        )
    }
}

impl std::fmt::Display for CrlbReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "operating point")?;
        writeln!(f, "  carrier f0              {:>14.4e} Hz", self.f0)?;
        writeln!(f, "  baseline D_lambda       {:>14.4} wavelengths", self.d_lambda)?;
        writeln!(f, "  range R                 {:>14.4} m", self.r)?;
        writeln!(f, "  speed                   {:>14.4} m/s", self.speed)?;
        writeln!(f, "  angular rate omega      {:>14.4} rad/s", self.omega)?;
        writeln!(f, "  beamwidth               {:>14.4} deg", self.hpbw_deg)?;
        writeln!(f, "  peak SNR                {:>14.4} dB", self.snr_db)?;
        writeln!(f, "resolution")?;
        writeln!(
            f,
            "  Doppler ({:.3} s window) {:>13.4} Hz",
            self.window_len, self.doppler_resolution_hz
        )?;
        writeln!(
            f,
            "  interferometric         {:>14.4} Hz",
            self.interferometric_resolution_hz
        )?;
        writeln!(f, "accuracy bounds")?;
        writeln!(f, "  var(f_d)                {:>14.4e} Hz^2", self.var_f_d)?;
        writeln!(f, "  std(v_R)                {:>14.4e} m/s", self.std_v_r)?;
        writeln!(f, "  var(f_omega)            {:>14.4e} Hz^2", self.var_f_omega)?;
        write!(f, "  std(v_alpha)            {:>14.4e} m/s", self.std_v_alpha)
    }
}

/// Composite Simpson rule with `n` (even) intervals.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}
