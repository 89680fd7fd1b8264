//! Simulation and estimation toolkit for dual-axis correlation-interferometric
//! radar velocimetry.
//!
//! A single continuous-wave transmitter and three receivers arranged on a
//! square aperture measure the full three-dimensional velocity of a moving
//! point target: radial velocity from the Doppler shift, and the two
//! tangential components from the beat frequencies of the correlated signals
//! on the two orthogonal receiver baselines.
//!
//! The crate covers the whole chain:
//!
//! - [`geometry`]: the 2x2 aperture, baselines, projected angles
//! - [`scene`]: constant-velocity point targets and pass ground truth
//! - [`synthesis`]: multi-channel baseband return generation
//! - [`recording`]: text and binary recording interchange formats
//! - [`dsp`]: channel correlation, spectrograms, peak estimation, and the
//!   direct-downconversion null calibration
//! - [`velocity`]: forward/inverse velocity models and full 3-D
//!   reconstruction
//! - [`bounds`]: resolution formulas and Cramer-Rao lower bounds
//! - [`harness`]: seeded Monte Carlo experiment campaigns with CSV export
//! - [`config`]: the structured text configuration schema used by the CLI

pub mod bounds;
pub mod cli;
pub mod config;
pub mod dsp;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod recording;
pub mod scene;
pub mod synthesis;
pub mod velocity;

pub use error::{Error, Result};
pub use geometry::{projected_angle, ArrayGeometry, Baseline, Vec3, HPBW_SIGMA_RATIO, SPEED_OF_LIGHT};
pub use recording::BasebandRecording;
pub use scene::{LinearTrajectory, PointTarget, Scene, TruthRecord};
pub use synthesis::{beam_amplitude, round_trip_delay, synthesize, BasebandMode, RadarConfig};
