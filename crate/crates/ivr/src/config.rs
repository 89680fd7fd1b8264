//! Structured text configuration (TOML) with sections `radar`, `array`,
//! `scene`, `estimator` and `experiment`. Unknown keys are rejected.
//!
//! Scene targets are declared either pass-style (`speed`, `heading_deg`,
//! `attack_deg`, `radius`, `t_cross`) or explicitly (`p0`, `velocity`);
//! exactly one of the two.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dsp::{CaMethod, EstimatorParams, WindowKind};
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Vec3};
use crate::harness::{ExperimentConfig, ExperimentKind};
use crate::scene::{LinearTrajectory, PointTarget, Scene};
use crate::synthesis::{BasebandMode, RadarConfig};

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub radar: RadarSection,
    pub array: ArraySection,
    pub scene: SceneSection,
    pub estimator: EstimatorSection,
    pub experiment: Option<ExperimentSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadarSection {
    pub sample_rate: f64,
    pub hpbw_deg: f64,
    pub mode: String,
    pub highpass_cutoff: f64,
    pub propagation_loss: bool,
    pub snr_db: Option<f64>,
    pub seed: u64,
}

impl Default for RadarSection {
    fn default() -> Self {
        RadarSection {
            sample_rate: 4166.7,
            hpbw_deg: 30.0,
            mode: "real".into(),
            highpass_cutoff: 15.0,
            propagation_loss: true,
            snr_db: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArraySection {
    pub f0: f64,
    pub side_length_wavelengths: f64,
    /// Mount-misalignment perturbation: rotates Rx3 about the array center.
    pub rx3_rotation_deg: f64,
}

impl Default for ArraySection {
    fn default() -> Self {
        ArraySection { f0: 41.8e9, side_length_wavelengths: 7.26, rx3_rotation_deg: 0.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct SceneSection {
    pub targets: Vec<TargetSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TargetSection {
    // pass-style
    pub speed: Option<f64>,
    pub heading_deg: f64,
    pub attack_deg: f64,
    pub radius: Option<f64>,
    pub t_cross: Option<f64>,
    // explicit
    pub p0: Option<[f64; 3]>,
    pub velocity: Option<[f64; 3]>,
    // common
    pub t_start: f64,
    pub t_end: f64,
    pub reflectivity: f64,
}

impl Default for TargetSection {
    fn default() -> Self {
        TargetSection {
            speed: None,
            heading_deg: 0.0,
            attack_deg: 0.0,
            radius: None,
            t_cross: None,
            p0: None,
            velocity: None,
            t_start: 0.0,
            t_end: 2.5,
            reflectivity: 1.0,
        }
    }
}

impl TargetSection {
    pub fn to_target(&self) -> Result<PointTarget> {
        let pass_style = self.speed.is_some() || self.radius.is_some();
        let explicit = self.p0.is_some() || self.velocity.is_some();
        let trajectory = match (pass_style, explicit) {
            (true, false) => {
                let speed = self.speed.ok_or_else(|| {
                    Error::Config("pass-style target needs `speed`".into())
                })?;
                let radius = self.radius.ok_or_else(|| {
                    Error::Config("pass-style target needs `radius`".into())
                })?;
                let t_cross = self.t_cross.unwrap_or(0.5 * (self.t_start + self.t_end));
                LinearTrajectory::from_pass(
                    speed,
                    self.heading_deg,
                    self.attack_deg,
                    radius,
                    t_cross,
                    self.t_start,
                    self.t_end,
                )?
            }
            (false, true) => {
                let p0 = self.p0.ok_or_else(|| {
                    Error::Config("explicit target needs `p0`".into())
                })?;
                let v = self.velocity.ok_or_else(|| {
                    Error::Config("explicit target needs `velocity`".into())
                })?;
                LinearTrajectory::new(
                    Vec3::new(p0[0], p0[1], p0[2]),
                    Vec3::new(v[0], v[1], v[2]),
                    self.t_start,
                    self.t_end,
                )?
            }
            (true, true) => {
                return Err(Error::Config(
                    "target declared both pass-style and explicitly".into(),
                ))
            }
            (false, false) => {
                return Err(Error::Config(
                    "target needs `speed`+`radius` or `p0`+`velocity`".into(),
                ))
            }
        };
        Ok(PointTarget::new(
            trajectory,
            num_complex::Complex64::new(self.reflectivity, 0.0),
        ))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimatorSection {
    pub window_len: f64,
    pub overlap: f64,
    pub nfft: usize,
    pub window: String,
    pub interpolate: bool,
    pub min_freq: f64,
    pub ca_method: String,
}

impl Default for EstimatorSection {
    fn default() -> Self {
        EstimatorSection {
            window_len: 0.25,
            overlap: 0.6,
            nfft: 1 << 14,
            window: "boxcar".into(),
            interpolate: false,
            min_freq: 8.0,
            ca_method: "auto".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub kind: String,
    pub angles_deg: Vec<f64>,
    pub passes_per_direction: usize,
    pub speed: f64,
    pub radius: f64,
    pub radius_start: f64,
    pub radius_end: f64,
    pub span: f64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            kind: "tangential_sweep".into(),
            angles_deg: vec![0.0, -15.0, -30.0, -45.0],
            passes_per_direction: 50,
            speed: 0.50131,
            radius: 0.755,
            radius_start: 0.755,
            radius_end: 0.917,
            span: 2.5,
        }
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Serialize back to the config text form.
    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_radar_config(&self) -> Result<RadarConfig> {
        Ok(RadarConfig {
            sample_rate: self.radar.sample_rate,
            hpbw_deg: self.radar.hpbw_deg,
            mode: parse_mode(&self.radar.mode)?,
            highpass_cutoff: self.radar.highpass_cutoff,
            propagation_loss: self.radar.propagation_loss,
            snr_db: self.radar.snr_db,
            rng_seed: self.radar.seed,
        })
    }

    /// Nominal geometry the estimator assumes.
    pub fn to_geometry(&self) -> Result<ArrayGeometry> {
        ArrayGeometry::square(self.array.side_length_wavelengths, self.array.f0)
    }

    /// Geometry the synthesizer uses (perturbation applied).
    pub fn to_synthesis_geometry(&self) -> Result<ArrayGeometry> {
        let g = self.to_geometry()?;
        if self.array.rx3_rotation_deg != 0.0 {
            g.with_rx_rotated(2, self.array.rx3_rotation_deg)
        } else {
            Ok(g)
        }
    }

    pub fn to_scene(&self) -> Result<Scene> {
        if self.scene.targets.is_empty() {
            return Err(Error::Config("scene declares no targets".into()));
        }
        let targets = self
            .scene
            .targets
            .iter()
            .map(|t| t.to_target())
            .collect::<Result<Vec<_>>>()?;
        Ok(Scene { targets })
    }

    pub fn to_estimator_params(&self) -> Result<EstimatorParams> {
        Ok(EstimatorParams {
            window_len: self.estimator.window_len,
            overlap: self.estimator.overlap,
            nfft: self.estimator.nfft,
            window_kind: parse_window(&self.estimator.window)?,
            interpolate: self.estimator.interpolate,
            min_freq: self.estimator.min_freq,
            ca_method: parse_ca_method(&self.estimator.ca_method)?,
        })
    }

    pub fn to_experiment_config(&self) -> Result<ExperimentConfig> {
        let exp = self.experiment.as_ref().ok_or_else(|| {
            Error::Config("config has no [experiment] section".into())
        })?;
        let kind = match exp.kind.as_str() {
            "tangential_sweep" => ExperimentKind::TangentialSweep,
            "elevation_sweep" => ExperimentKind::ElevationSweep,
            other => return Err(Error::Config(format!("unknown experiment kind {other:?}"))),
        };
        let cfg = ExperimentConfig {
            kind,
            angles_deg: exp.angles_deg.clone(),
            passes_per_direction: exp.passes_per_direction,
            speed: exp.speed,
            radius: exp.radius,
            radius_start: exp.radius_start,
            radius_end: exp.radius_end,
            span: exp.span,
            f0: self.array.f0,
            side_length_wavelengths: self.array.side_length_wavelengths,
            rx3_rotation_deg: self.array.rx3_rotation_deg,
            radar: self.to_radar_config()?,
            estimator: self.to_estimator_params()?,
            seed: self.radar.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn parse_mode(s: &str) -> Result<BasebandMode> {
    match s {
        "complex" | "complex_iq" => Ok(BasebandMode::ComplexIq),
        "real" => Ok(BasebandMode::Real),
        other => Err(Error::Config(format!("unknown mode {other:?}"))),
    }
}

fn parse_window(s: &str) -> Result<WindowKind> {
    match s {
        "boxcar" => Ok(WindowKind::Boxcar),
        "hann" => Ok(WindowKind::Hann),
        other => Err(Error::Config(format!("unknown window {other:?}"))),
    }
}

fn parse_ca_method(s: &str) -> Result<CaMethod> {
    match s {
        "auto" => Ok(CaMethod::Auto),
        "doppler_peak" => Ok(CaMethod::DopplerPeak),
        "envelope_peak" => Ok(CaMethod::EnvelopePeak),
        other => Err(Error::Config(format!("unknown ca_method {other:?}"))),
    }
}
