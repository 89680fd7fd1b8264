//! Command-line interface: `simulate`, `estimate`, `bounds`, `experiment`.
//!
//! Usage problems (bad flags, missing or invalid config) exit with status 2;
//! runtime failures exit 1. The default output directory is `$IVR_OUT_DIR`
//! or `./ivr_out`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_mode, FileConfig};
use crate::error::{Error, Result};
use crate::harness;
use crate::recording::BasebandRecording;
use crate::velocity::{reconstruct, Calibration};

#[derive(Debug, Parser)]
#[command(
    name = "ivr",
    version,
    about = "Dual-axis correlation-interferometric radar velocimetry toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct CommonArgs {
    /// Structured config file (sections: radar, array, scene, estimator,
    /// experiment)
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override the RNG seed
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory (default: $IVR_OUT_DIR or ./ivr_out)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Override the baseband mode
    #[arg(long, value_parser = ["complex", "real"])]
    mode: Option<String>,

    /// Override the peak per-channel SNR in dB
    #[arg(long)]
    snr_db: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize a baseband recording of the configured scene
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Write the binary twin format instead of text
        #[arg(long)]
        binary: bool,
    },
    /// Reconstruct the 3-D velocity from a recording file
    Estimate {
        #[command(flatten)]
        common: CommonArgs,
        /// Recording file written by `simulate` (text or binary)
        #[arg(long)]
        input: PathBuf,
    },
    /// Print the resolution figures and Cramer-Rao bounds
    Bounds {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write bounds.csv into the output directory
        #[arg(long)]
        csv: bool,
    },
    /// Run a Monte Carlo experiment campaign
    Experiment {
        #[command(flatten)]
        common: CommonArgs,
        /// Also export plot-oriented data (spectrogram grids, series)
        #[arg(long)]
        plotdata: bool,
    },
}

impl CommonArgs {
    fn load_config(&self) -> Result<FileConfig> {
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| Error::Config("--config is required for this command".into()))?;
        self.apply_overrides(FileConfig::load(path))
    }

    fn load_config_or_default(&self) -> Result<FileConfig> {
        match &self.config {
            Some(path) => self.apply_overrides(FileConfig::load(path)),
            None => self.apply_overrides(Ok(FileConfig::default())),
        }
    }

    fn apply_overrides(&self, cfg: Result<FileConfig>) -> Result<FileConfig> {
        let mut cfg = cfg?;
        if let Some(seed) = self.seed {
            cfg.radar.seed = seed;
        }
        if let Some(mode) = &self.mode {
            parse_mode(mode)?;
            cfg.radar.mode = mode.clone();
        }
        if let Some(snr) = self.snr_db {
            cfg.radar.snr_db = Some(snr);
        }
        Ok(cfg)
    }

    fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| {
            std::env::var_os("IVR_OUT_DIR")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("ivr_out"))
        })
    }
}

pub fn run() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate { common, binary } => simulate(&common, binary),
        Command::Estimate { common, input } => estimate(&common, &input),
        Command::Bounds { common, csv } => bounds(&common, csv),
        Command::Experiment { common, plotdata } => experiment(&common, plotdata),
    }
}

fn scene_span(scene: &crate::scene::Scene) -> Result<(f64, f64)> {
    let t0 = scene
        .targets
        .iter()
        .map(|t| t.trajectory.t_start)
        .fold(f64::NEG_INFINITY, f64::max);
    let t1 = scene
        .targets
        .iter()
        .map(|t| t.trajectory.t_end)
        .fold(f64::INFINITY, f64::min);
    if !(t1 > t0) {
        return Err(Error::Config("scene target spans do not overlap".into()));
    }
    Ok((t0, t1))
}

fn simulate(common: &CommonArgs, binary: bool) -> Result<()> {
    let cfg = common.load_config()?;
    let scene = cfg.to_scene()?;
    let geom = cfg.to_synthesis_geometry()?;
    let radar = cfg.to_radar_config()?;
    let span = scene_span(&scene)?;
    let rec = crate::synthesis::synthesize(&scene, &geom, &radar, span)?;
    let dir = common.out_dir();
    std::fs::create_dir_all(&dir)?;
    let path = dir.join(if binary { "recording.ivrb" } else { "recording.ivr" });
    rec.save(&path, binary)?;
    println!("{}", path.display());
    Ok(())
}

fn estimate(common: &CommonArgs, input: &Path) -> Result<()> {
    let cfg = common.load_config()?;
    let rec = BasebandRecording::load(input)?;
    let geom = cfg.to_geometry()?;
    let params = cfg.to_estimator_params()?;
    let scene = cfg.to_scene()?;
    let truth = scene.targets[0].trajectory.ground_truth(&geom)?;
    let est = reconstruct(&rec, &geom, &params, &Calibration::from_truth(&truth))?;
    let csv = format!(
        "pass_id,phi_v_deg,beta_deg,v_theta,v_R,speed\n0,{},{},{},{},{}\n",
        est.phi_v_deg, est.beta_deg, est.v_theta, est.components.v_r, est.speed
    );
    match &common.out {
        Some(_) => {
            let dir = common.out_dir();
            std::fs::create_dir_all(&dir)?;
            let path = dir.join("estimates.csv");
            std::fs::write(&path, &csv)?;
            println!("{}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn bounds(common: &CommonArgs, csv: bool) -> Result<()> {
    let cfg = common.load_config_or_default()?;
    let snr_db = cfg
        .radar
        .snr_db
        .ok_or_else(|| Error::Config("bounds needs --snr-db (or radar.snr_db)".into()))?;
    // operating point: first scene target if present, reference pass otherwise
    let (speed, radius) = cfg
        .scene
        .targets
        .first()
        .and_then(|t| t.speed.zip(t.radius))
        .unwrap_or((0.50131, 0.755));
    let geom = cfg.to_geometry()?;
    let (bx, _) = geom.xy_baselines();
    let report = crate::bounds::CrlbReport::compute(
        snr_db,
        cfg.radar.sample_rate,
        cfg.radar.hpbw_deg,
        speed,
        radius,
        cfg.array.f0,
        bx.d_lambda,
        cfg.estimator.window_len,
    )?;
    println!("{report}");
    if csv {
        let dir = common.out_dir();
        std::fs::create_dir_all(&dir)?;
        let path = dir.join("bounds.csv");
        std::fs::write(
            &path,
            format!("{}\n{}\n", crate::bounds::CrlbReport::csv_header(), report.csv_row()),
        )?;
        println!("{}", path.display());
    }
    Ok(())
}

fn experiment(common: &CommonArgs, plotdata: bool) -> Result<()> {
    let cfg = common.load_config()?;
    let mut exp = cfg.to_experiment_config()?;
    if let Some(seed) = common.seed {
        exp.seed = seed;
    }
    let results = harness::run_experiment(&exp)?;
    let dir = common.out_dir();
    harness::export_csv(&exp, &results, &dir)?;
    if plotdata {
        harness::export_plotdata(&exp, &results, &dir.join("plotdata"))?;
    }
    let o = &results.summary.overall;
    println!("passes: {} ok, {} failed", o.n_ok, o.n_failed);
    println!("rmse speed   {:>10.4} mm/s", o.rmse_speed * 1e3);
    println!("rmse phi_v   {:>10.4} deg", o.rmse_phi_v);
    println!("rmse beta    {:>10.4} deg", o.rmse_beta);
    println!("rmse v_R     {:>10.4} mm/s", o.rmse_v_r * 1e3);
    println!("rmse v_theta {:>10.4} mm/s", o.rmse_v_theta * 1e3);
    println!("results in {}", dir.display());
    Ok(())
}
