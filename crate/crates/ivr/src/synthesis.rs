//! Baseband return synthesis: bistatic delays, Gaussian beam weighting,
//! propagation loss, direct-downconversion real mode, baseband high-pass,
//! and seeded noise.
//!
//! The downconverted sample for channel n is
//!
//! ```text
//! r_n(t) = sum_targets  rho * G_tx(t) * G_rx_n(t) * L(t) * exp(+j 2 pi f0 tau_n(t))
//! ```
//!
//! with `tau_n` the bistatic round-trip delay. The baseband phase sign is
//! chosen so that a receding target (increasing delay) produces a positive
//! Doppler shift `f_d = 2 v_R / lambda`, and the pair correlation
//! `r_a conj(r_b)` carries phase `-2 pi f0 (tau_b - tau_a)`.
//!
//! Real mode takes the real part (losing the Doppler sign and producing the
//! characteristic null when the range rate crosses zero), then applies the
//! first-order baseband high-pass, then adds noise. Noise is white Gaussian,
//! scaled per channel so the peak envelope-to-noise power ratio equals
//! `snr_db`, drawn from one deterministic ChaCha substream per channel index.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Vec3, HPBW_SIGMA_RATIO, SPEED_OF_LIGHT};
use crate::recording::BasebandRecording;
use crate::scene::Scene;

/// Output sample type of the downconverter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasebandMode {
    ComplexIq,
    Real,
}

impl BasebandMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            BasebandMode::ComplexIq => "complex",
            BasebandMode::Real => "real",
        }
    }
}

/// Front-end and sampling configuration.
///
/// `snr_db` is the peak per-channel envelope-to-noise power ratio; `None`
/// synthesizes noiseless recordings. The carrier lives in [`ArrayGeometry`].
#[derive(Debug, Clone)]
pub struct RadarConfig {
    pub sample_rate: f64,
    pub hpbw_deg: f64,
    pub mode: BasebandMode,
    pub highpass_cutoff: f64,
    pub propagation_loss: bool,
    pub snr_db: Option<f64>,
    pub rng_seed: u64,
}

impl Default for RadarConfig {
    fn default() -> Self {
        RadarConfig {
            sample_rate: 4166.7,
            hpbw_deg: 30.0,
            mode: BasebandMode::Real,
            highpass_cutoff: 15.0,
            propagation_loss: true,
            snr_db: None,
            rng_seed: 0,
        }
    }
}

impl RadarConfig {
    /// Clean validation mode: complex I/Q, no high-pass, no propagation
    /// loss, noiseless.
    pub fn complex_validation() -> Self {
        RadarConfig {
            mode: BasebandMode::ComplexIq,
            highpass_cutoff: 0.0,
            propagation_loss: false,
            snr_db: None,
            ..RadarConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.sample_rate > 0.0) {
            return Err(Error::InvalidArgument("sample_rate must be positive".into()));
        }
        if !(self.hpbw_deg > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "hpbw must be positive, got {}",
                self.hpbw_deg
            )));
        }
        if self.hpbw_deg >= 180.0 {
            // values past 180 fall outside the Gaussian pattern's validity;
            // useful only to switch beam weighting off
            log::warn!("hpbw {} deg is non-physical; beam weighting ~disabled", self.hpbw_deg);
        }
        if self.highpass_cutoff < 0.0 {
            return Err(Error::InvalidArgument("highpass_cutoff must be >= 0".into()));
        }
        Ok(())
    }

    /// One-line summary recorded as provenance on recordings.
    pub fn summary(&self) -> String {
        format!(
            "rate={},hpbw={},mode={},hp={},loss={},snr={},seed={}",
            self.sample_rate,
            self.hpbw_deg,
            self.mode.as_str(),
            self.highpass_cutoff,
            self.propagation_loss,
            self.snr_db.map_or("none".to_string(), |s| s.to_string()),
            self.rng_seed
        )
    }
}

/// Bistatic round-trip delay tx -> p -> rx, seconds.
pub fn round_trip_delay(tx: Vec3, rx: Vec3, p: Vec3) -> Result<f64> {
    let d_tx = tx.distance(p);
    let d_rx = p.distance(rx);
    if d_tx == 0.0 || d_rx == 0.0 {
        return Err(Error::InvalidArgument(
            "target coincides with an array element".into(),
        ));
    }
    Ok((d_tx + d_rx) / SPEED_OF_LIGHT)
}

/// Gaussian beam amplitude at `theta` radians off boresight: the square root
/// of the power pattern `A(theta) = exp(-theta^2 / 2 sigma^2)` with
/// `sigma = hpbw / 2.355`.
pub fn beam_amplitude(theta: f64, hpbw_deg: f64) -> f64 {
    let sigma = hpbw_deg.to_radians() / HPBW_SIGMA_RATIO;
    (-theta * theta / (4.0 * sigma * sigma)).exp()
}

fn off_boresight(element: Vec3, p: Vec3) -> f64 {
    // boresight is +z for every element
    let d = p - element;
    let r = d.norm();
    if r == 0.0 {
        return 0.0;
    }
    (d.z / r).clamp(-1.0, 1.0).acos()
}

/// Synthesize the three-channel baseband recording of `scene` over
/// `span = (t0, t1)`. Deterministic for a fixed config and seed.
pub fn synthesize(
    scene: &Scene,
    geom: &ArrayGeometry,
    cfg: &RadarConfig,
    span: (f64, f64),
) -> Result<BasebandRecording> {
    cfg.validate()?;
    let (t0, t1) = span;
    if !(t1 > t0) {
        return Err(Error::InvalidArgument("span must satisfy t1 > t0".into()));
    }
    let dt = 1.0 / cfg.sample_rate;
    let n = ((t1 - t0) * cfg.sample_rate).floor() as usize + 1;
    if n < 2 {
        return Err(Error::InvalidArgument("span yields fewer than 2 samples".into()));
    }
    for tgt in &scene.targets {
        let tr = &tgt.trajectory;
        if t0 < tr.t_start || t1 > tr.t_end {
            return Err(Error::OutOfRange(format!(
                "span [{t0}, {t1}] not covered by trajectory span [{}, {}]",
                tr.t_start, tr.t_end
            )));
        }
    }

    let nyquist = cfg.sample_rate / 2.0;
    let mut channels: [Vec<Complex64>; 3] =
        [vec![Complex64::ZERO; n], vec![Complex64::ZERO; n], vec![Complex64::ZERO; n]];

    for tgt in &scene.targets {
        let mut prev_tau = [0.0f64; 3];
        for k in 0..n {
            let t = t0 + k as f64 * dt;
            let p = tgt.trajectory.position_unchecked(t);
            let d_tx = geom.tx.distance(p);
            if d_tx == 0.0 {
                return Err(Error::InvalidArgument("target hit the transmitter".into()));
            }
            let g_tx = beam_amplitude(off_boresight(geom.tx, p), cfg.hpbw_deg);
            for ch in 0..3 {
                let rx = geom.rx[ch];
                let d_rx = p.distance(rx);
                if d_rx == 0.0 {
                    return Err(Error::InvalidArgument("target hit a receiver".into()));
                }
                let tau = (d_tx + d_rx) / SPEED_OF_LIGHT;
                if k > 0 {
                    let f_inst = geom.f0 * (tau - prev_tau[ch]).abs() / dt;
                    if f_inst > nyquist {
                        return Err(Error::Aliasing { f_inst, nyquist });
                    }
                }
                prev_tau[ch] = tau;

                let g_rx = beam_amplitude(off_boresight(rx, p), cfg.hpbw_deg);
                let loss = if cfg.propagation_loss { 1.0 / (d_tx * d_rx) } else { 1.0 };
                let phase = 2.0 * std::f64::consts::PI * geom.f0 * tau;
                channels[ch][k] +=
                    tgt.reflectivity * g_tx * g_rx * loss * Complex64::from_polar(1.0, phase);
            }
        }
    }

    // peak envelope per channel, before real-mode projection and filtering
    let peaks: Vec<f64> = channels
        .iter()
        .map(|c| c.iter().map(|s| s.norm()).fold(0.0, f64::max))
        .collect();

    if cfg.mode == BasebandMode::Real {
        for c in channels.iter_mut() {
            for s in c.iter_mut() {
                *s = Complex64::new(s.re, 0.0);
            }
        }
    }

    if cfg.highpass_cutoff > 0.0 {
        for c in channels.iter_mut() {
            highpass_in_place(c, cfg.highpass_cutoff, dt);
        }
    }

    if let Some(snr_db) = cfg.snr_db {
        let snr = 10f64.powf(snr_db / 10.0);
        for (ch, c) in channels.iter_mut().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
            rng.set_stream(ch as u64);
            match cfg.mode {
                BasebandMode::Real => {
                    // noise power sigma^2 = peak^2 / snr
                    let sigma = peaks[ch] / snr.sqrt();
                    for s in c.iter_mut() {
                        let w: f64 = rng.sample(StandardNormal);
                        s.re += sigma * w;
                    }
                }
                BasebandMode::ComplexIq => {
                    // per-quadrature sigma so E|n|^2 = peak^2 / snr
                    let sigma = peaks[ch] / (2.0 * snr).sqrt();
                    for s in c.iter_mut() {
                        let wr: f64 = rng.sample(StandardNormal);
                        let wi: f64 = rng.sample(StandardNormal);
                        *s += Complex64::new(sigma * wr, sigma * wi);
                    }
                }
            }
        }
    }

    Ok(BasebandRecording {
        sample_rate: cfg.sample_rate,
        t0,
        mode: cfg.mode,
        channels,
        seed: cfg.rng_seed,
        config_summary: cfg.summary(),
    })
}

/// First-order high-pass, bilinear RC form, applied independently to the
/// real and imaginary parts.
fn highpass_in_place(x: &mut [Complex64], cutoff: f64, dt: f64) {
    let rc = 1.0 / (2.0 * std::f64::consts::PI * cutoff);
    let a = rc / (rc + dt);
    let mut prev_x = x[0];
    let mut prev_y = x[0];
    for s in x.iter_mut().skip(1) {
        let cur = *s;
        let y = (prev_y + cur - prev_x) * a;
        *s = y;
        prev_x = cur;
        prev_y = y;
    }
}
