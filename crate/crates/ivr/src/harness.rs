//! Seeded Monte Carlo experiment campaigns: sweep an angle, fly repeated
//! passes in both directions, reconstruct each one, and aggregate summary
//! statistics.
//!
//! Experiment kinds mirror the two reference campaigns: a tangential sweep
//! over heading azimuth at fixed radius, and an elevation sweep over attack
//! angle with the measurement radius interpolated linearly across the angle
//! list (the per-angle radii of the reference setup are not tabulated; the
//! interpolation is recorded in the run metadata). The array-inclination
//! setup is realized by tilting the trajectory relative to a fixed array,
//! which is the equivalent geometry.
//!
//! Pass seeds derive from the campaign seed with a splitmix64 mix of the
//! (angle, direction, pass) counter, so runs are reproducible pass by pass
//! and aggregation is order-independent.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::dsp::EstimatorParams;
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::scene::{LinearTrajectory, Scene};
use crate::synthesis::{synthesize, RadarConfig};
use crate::velocity::{reconstruct, Calibration, Velocity3DEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// Heading azimuth sweep at fixed radius, attack angle zero.
    TangentialSweep,
    /// Attack-angle sweep; radius interpolates `radius_start..radius_end`.
    ElevationSweep,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::TangentialSweep => "tangential_sweep",
            ExperimentKind::ElevationSweep => "elevation_sweep",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub angles_deg: Vec<f64>,
    pub passes_per_direction: usize,
    pub speed: f64,
    pub radius: f64,
    pub radius_start: f64,
    pub radius_end: f64,
    pub span: f64,
    pub f0: f64,
    pub side_length_wavelengths: f64,
    pub rx3_rotation_deg: f64,
    pub radar: RadarConfig,
    pub estimator: EstimatorParams,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.angles_deg.is_empty() {
            return Err(Error::Config("experiment needs at least one angle".into()));
        }
        if self.passes_per_direction < 1 {
            return Err(Error::Config("passes_per_direction must be >= 1".into()));
        }
        if !(self.speed > 0.0 && self.span > 0.0) {
            return Err(Error::Config("speed and span must be positive".into()));
        }
        Ok(())
    }

    /// Measurement radius for angle index `i`.
    pub fn radius_for(&self, i: usize) -> f64 {
        match self.kind {
            ExperimentKind::TangentialSweep => self.radius,
            ExperimentKind::ElevationSweep => {
                let n = self.angles_deg.len();
                if n == 1 {
                    self.radius_start
                } else {
                    self.radius_start
                        + (self.radius_end - self.radius_start) * i as f64 / (n - 1) as f64
                }
            }
        }
    }
}

/// One synthesized-and-reconstructed pass.
#[derive(Debug, Clone)]
pub struct PassRecord {
    pub pass_id: usize,
    pub angle_deg: f64,
    pub direction: i8,
    pub seed: u64,
    pub truth_speed: f64,
    pub truth_phi_v_deg: f64,
    pub truth_beta_deg: f64,
    pub truth_v_r: f64,
    pub truth_v_theta: f64,
    pub est: Option<Velocity3DEstimate>,
    pub error: Option<String>,
}

/// Mean / sample std of the estimates, RMSE and max |error| against truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantityStats {
    pub mean: f64,
    pub std: f64,
    pub rmse: f64,
    pub max_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleSummary {
    pub angle_deg: f64,
    pub direction: i8,
    pub n_ok: usize,
    pub n_failed: usize,
    pub speed: QuantityStats,
    pub phi_v: QuantityStats,
    pub beta: QuantityStats,
    pub v_r: QuantityStats,
    pub v_theta: QuantityStats,
    pub mean_v_alpha_x: f64,
    pub mean_v_alpha_y: f64,
}

/// Campaign-wide RMSE over every successful pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverallStats {
    pub n_ok: usize,
    pub n_failed: usize,
    pub rmse_speed: f64,
    pub rmse_phi_v: f64,
    pub rmse_beta: f64,
    pub rmse_v_r: f64,
    pub rmse_v_theta: f64,
}

#[derive(Debug, Clone)]
pub struct SummaryStats {
    pub per_cell: Vec<AngleSummary>,
    pub overall: OverallStats,
}

#[derive(Debug, Clone)]
pub struct ExperimentResults {
    pub passes: Vec<PassRecord>,
    pub summary: SummaryStats,
}

/// Trajectory of one pass of the campaign.
pub fn pass_trajectory(
    cfg: &ExperimentConfig,
    angle_idx: usize,
    direction: i8,
) -> Result<LinearTrajectory> {
    let angle = cfg.angles_deg[angle_idx];
    let radius = cfg.radius_for(angle_idx);
    let (heading, attack) = match cfg.kind {
        ExperimentKind::TangentialSweep => {
            (wrap_deg(angle + if direction < 0 { 180.0 } else { 0.0 }), 0.0)
        }
        // fixed tilted array, target running +/- x: the return pass sees the
        // opposite attack sign
        ExperimentKind::ElevationSweep => (
            if direction < 0 { 180.0 } else { 0.0 },
            f64::from(direction) * angle,
        ),
    };
    LinearTrajectory::from_pass(
        cfg.speed,
        heading,
        attack,
        radius,
        cfg.span / 2.0,
        0.0,
        cfg.span,
    )
}

/// Run the campaign. Pass failures are recorded, not fatal.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResults> {
    cfg.validate()?;
    let geom = ArrayGeometry::square(cfg.side_length_wavelengths, cfg.f0)?;
    let synth_geom = if cfg.rx3_rotation_deg != 0.0 {
        geom.with_rx_rotated(2, cfg.rx3_rotation_deg)?
    } else {
        geom.clone()
    };

    let mut passes = Vec::new();
    let mut pass_id = 0usize;
    for (ai, &angle) in cfg.angles_deg.iter().enumerate() {
        for (di, &direction) in [1i8, -1i8].iter().enumerate() {
            for p in 0..cfg.passes_per_direction {
                let counter =
                    ((ai as u64) << 32) | ((di as u64) << 24) | (p as u64 & 0xff_ffff);
                let seed = splitmix64(cfg.seed ^ splitmix64(counter.wrapping_add(1)));
                let rec = run_pass(cfg, &geom, &synth_geom, ai, direction, seed, pass_id, angle);
                passes.push(rec);
                pass_id += 1;
            }
        }
    }
    let summary = aggregate(&passes);
    Ok(ExperimentResults { passes, summary })
}

#[allow(clippy::too_many_arguments)]
fn run_pass(
    cfg: &ExperimentConfig,
    geom: &ArrayGeometry,
    synth_geom: &ArrayGeometry,
    angle_idx: usize,
    direction: i8,
    seed: u64,
    pass_id: usize,
    angle: f64,
) -> PassRecord {
    let mut record = PassRecord {
        pass_id,
        angle_deg: angle,
        direction,
        seed,
        truth_speed: f64::NAN,
        truth_phi_v_deg: f64::NAN,
        truth_beta_deg: f64::NAN,
        truth_v_r: f64::NAN,
        truth_v_theta: f64::NAN,
        est: None,
        error: None,
    };
    let attempt = (|| -> Result<Velocity3DEstimate> {
        let traj = pass_trajectory(cfg, angle_idx, direction)?;
        let truth = traj.ground_truth(geom)?;
        record.truth_speed = truth.speed;
        record.truth_phi_v_deg = truth.phi_v_deg;
        record.truth_beta_deg = truth.beta_deg;
        record.truth_v_r = truth.v_radial();
        record.truth_v_theta = truth.v_tangential();
        let mut radar = cfg.radar.clone();
        radar.rng_seed = seed;
        let rec = synthesize(&Scene::single(traj), synth_geom, &radar, (0.0, cfg.span))?;
        reconstruct(&rec, geom, &cfg.estimator, &Calibration::from_truth(&truth))
    })();
    match attempt {
        Ok(est) => record.est = Some(est),
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Aggregate per-pass records into per-(angle, direction) summaries and the
/// campaign-wide RMSE. Records are sorted internally, so the result does not
/// depend on input order.
pub fn aggregate(passes: &[PassRecord]) -> SummaryStats {
    let mut sorted: Vec<&PassRecord> = passes.iter().collect();
    sorted.sort_by_key(|r| r.pass_id);

    let mut cells: Vec<(f64, i8, Vec<&PassRecord>)> = Vec::new();
    for r in &sorted {
        match cells
            .iter_mut()
            .find(|(a, d, _)| *a == r.angle_deg && *d == r.direction)
        {
            Some((_, _, v)) => v.push(r),
            None => cells.push((r.angle_deg, r.direction, vec![r])),
        }
    }

    let mut per_cell = Vec::new();
    let mut all_errs: [Vec<f64>; 5] = Default::default();
    let mut n_ok_total = 0;
    let mut n_failed_total = 0;
    for (angle, direction, records) in cells {
        let ok: Vec<&&PassRecord> = records.iter().filter(|r| r.est.is_some()).collect();
        let n_failed = records.len() - ok.len();
        n_ok_total += ok.len();
        n_failed_total += n_failed;

        let take = |get_est: &dyn Fn(&Velocity3DEstimate) -> f64,
                    get_truth: &dyn Fn(&PassRecord) -> f64,
                    wrap: bool|
         -> (Vec<f64>, Vec<f64>) {
            let ests: Vec<f64> = ok.iter().map(|r| get_est(r.est.as_ref().unwrap())).collect();
            let errs: Vec<f64> = ok
                .iter()
                .map(|r| {
                    let e = get_est(r.est.as_ref().unwrap()) - get_truth(r);
                    if wrap {
                        wrap_deg(e)
                    } else {
                        e
                    }
                })
                .collect();
            (ests, errs)
        };

        let (speed_e, speed_err) = take(&|e| e.speed, &|r| r.truth_speed, false);
        let (phi_e, phi_err) = take(&|e| e.phi_v_deg, &|r| r.truth_phi_v_deg, true);
        let (beta_e, beta_err) = take(&|e| e.beta_deg, &|r| r.truth_beta_deg, false);
        let (vr_e, vr_err) = take(&|e| e.components.v_r, &|r| r.truth_v_r, false);
        let (vt_e, vt_err) = take(&|e| e.v_theta, &|r| r.truth_v_theta, false);

        for (acc, errs) in all_errs.iter_mut().zip([
            &speed_err,
            &phi_err,
            &beta_err,
            &vr_err,
            &vt_err,
        ]) {
            acc.extend_from_slice(errs);
        }

        per_cell.push(AngleSummary {
            angle_deg: angle,
            direction,
            n_ok: ok.len(),
            n_failed,
            speed: quantity_stats(&speed_e, &speed_err),
            phi_v: quantity_stats(&phi_e, &phi_err),
            beta: quantity_stats(&beta_e, &beta_err),
            v_r: quantity_stats(&vr_e, &vr_err),
            v_theta: quantity_stats(&vt_e, &vt_err),
            mean_v_alpha_x: mean(
                &ok.iter()
                    .map(|r| r.est.as_ref().unwrap().components.v_alpha_x)
                    .collect::<Vec<_>>(),
            ),
            mean_v_alpha_y: mean(
                &ok.iter()
                    .map(|r| r.est.as_ref().unwrap().components.v_alpha_y)
                    .collect::<Vec<_>>(),
            ),
        });
    }

    SummaryStats {
        per_cell,
        overall: OverallStats {
            n_ok: n_ok_total,
            n_failed: n_failed_total,
            rmse_speed: rmse(&all_errs[0]),
            rmse_phi_v: rmse(&all_errs[1]),
            rmse_beta: rmse(&all_errs[2]),
            rmse_v_r: rmse(&all_errs[3]),
            rmse_v_theta: rmse(&all_errs[4]),
        },
    }
}

pub fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        return f64::NAN;
    }
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample standard deviation (n - 1 denominator).
pub fn sample_std(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

pub fn rmse(errors: &[f64]) -> f64 {
    if errors.is_empty() {
        return f64::NAN;
    }
    (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt()
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |a, &v| a.max(v.abs()))
}

fn quantity_stats(estimates: &[f64], errors: &[f64]) -> QuantityStats {
    QuantityStats {
        mean: mean(estimates),
        std: sample_std(estimates),
        rmse: rmse(errors),
        max_err: max_abs(errors),
    }
}

/// Wrap an angle difference into (-180, 180] degrees.
pub fn wrap_deg(mut x: f64) -> f64 {
    while x > 180.0 {
        x -= 360.0;
    }
    while x <= -180.0 {
        x += 360.0;
    }
    x
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

// ---------------------------------------------------------------- export

/// Write per-pass and summary CSVs plus a metadata file into `dir`:
/// `estimates.csv`, `passes.csv`, `summary.csv`, `overall.csv`,
/// `run_metadata.txt`.
pub fn export_csv(cfg: &ExperimentConfig, results: &ExperimentResults, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;

    let mut f = BufWriter::new(fs::File::create(dir.join("estimates.csv"))?);
    writeln!(f, "pass_id,phi_v_deg,beta_deg,v_theta,v_R,speed")?;
    for r in &results.passes {
        if let Some(e) = &r.est {
            writeln!(
                f,
                "{},{},{},{},{},{}",
                r.pass_id, e.phi_v_deg, e.beta_deg, e.v_theta, e.components.v_r, e.speed
            )?;
        }
    }

    let mut f = BufWriter::new(fs::File::create(dir.join("passes.csv"))?);
    writeln!(
        f,
        "pass_id,angle_deg,direction,seed,truth_speed,truth_phi_v_deg,truth_beta_deg,\
         est_speed,est_phi_v_deg,est_beta_deg,est_v_theta,est_v_r,status"
    )?;
    for r in &results.passes {
        match &r.est {
            Some(e) => writeln!(
                f,
                "{},{},{},{},{},{},{},{},{},{},{},{},ok",
                r.pass_id,
                r.angle_deg,
                r.direction,
                r.seed,
                r.truth_speed,
                r.truth_phi_v_deg,
                r.truth_beta_deg,
                e.speed,
                e.phi_v_deg,
                e.beta_deg,
                e.v_theta,
                e.components.v_r
            )?,
            None => writeln!(
                f,
                "{},{},{},{},{},{},{},,,,,,error: {}",
                r.pass_id,
                r.angle_deg,
                r.direction,
                r.seed,
                r.truth_speed,
                r.truth_phi_v_deg,
                r.truth_beta_deg,
                r.error.as_deref().unwrap_or("unknown").replace(',', ";")
            )?,
        }
    }

    let mut f = BufWriter::new(fs::File::create(dir.join("summary.csv"))?);
    writeln!(f, "{}", summary_csv_header())?;
    for c in &results.summary.per_cell {
        writeln!(f, "{}", summary_csv_row(c))?;
    }

    let mut f = BufWriter::new(fs::File::create(dir.join("overall.csv"))?);
    let o = &results.summary.overall;
    writeln!(f, "n_ok,n_failed,rmse_speed,rmse_phi_v_deg,rmse_beta_deg,rmse_v_r,rmse_v_theta")?;
    writeln!(
        f,
        "{},{},{},{},{},{},{}",
        o.n_ok, o.n_failed, o.rmse_speed, o.rmse_phi_v, o.rmse_beta, o.rmse_v_r, o.rmse_v_theta
    )?;

    let mut f = BufWriter::new(fs::File::create(dir.join("run_metadata.txt"))?);
    writeln!(f, "kind: {}", cfg.kind.as_str())?;
    writeln!(f, "angles_deg: {:?}", cfg.angles_deg)?;
    writeln!(f, "passes_per_direction: {}", cfg.passes_per_direction)?;
    writeln!(f, "speed: {}", cfg.speed)?;
    writeln!(f, "seed: {}", cfg.seed)?;
    writeln!(f, "radar: {}", cfg.radar.summary())?;
    writeln!(f, "rx3_rotation_deg: {}", cfg.rx3_rotation_deg)?;
    if cfg.kind == ExperimentKind::ElevationSweep {
        let radii: Vec<f64> = (0..cfg.angles_deg.len()).map(|i| cfg.radius_for(i)).collect();
        writeln!(
            f,
            "radius schedule (linear interpolation {} -> {} m, assumed): {:?}",
            cfg.radius_start, cfg.radius_end, radii
        )?;
    } else {
        writeln!(f, "radius: {}", cfg.radius)?;
    }
    Ok(())
}

fn summary_csv_header() -> String {
    let mut cols = vec![
        "angle_deg".to_string(),
        "direction".to_string(),
        "n_ok".to_string(),
        "n_failed".to_string(),
    ];
    for q in ["speed", "phi_v_deg", "beta_deg", "v_r", "v_theta"] {
        for s in ["mean", "std", "rmse", "max_err"] {
            cols.push(format!("{s}_{q}"));
        }
    }
    cols.push("mean_v_alpha_x".into());
    cols.push("mean_v_alpha_y".into());
    cols.join(",")
}

fn summary_csv_row(c: &AngleSummary) -> String {
    let mut cols = vec![
        c.angle_deg.to_string(),
        c.direction.to_string(),
        c.n_ok.to_string(),
        c.n_failed.to_string(),
    ];
    for q in [&c.speed, &c.phi_v, &c.beta, &c.v_r, &c.v_theta] {
        cols.push(q.mean.to_string());
        cols.push(q.std.to_string());
        cols.push(q.rmse.to_string());
        cols.push(q.max_err.to_string());
    }
    cols.push(c.mean_v_alpha_x.to_string());
    cols.push(c.mean_v_alpha_y.to_string());
    cols.join(",")
}

/// Re-read a `summary.csv` written by [`export_csv`].
pub fn read_summary_csv(path: &Path) -> Result<Vec<AngleSummary>> {
    let f = fs::File::open(path)?;
    let mut lines = BufReader::new(f).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty summary csv".into()))??;
    if header != summary_csv_header() {
        return Err(Error::Format("unexpected summary csv header".into()));
    }
    let mut out = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<&str> = line.split(',').collect();
        if v.len() != 26 {
            return Err(Error::Format(format!("expected 26 columns, got {}", v.len())));
        }
        let p = |i: usize| -> Result<f64> {
            v[i].parse().map_err(|e| Error::Format(format!("column {i}: {e}")))
        };
        let q = |i: usize| -> Result<QuantityStats> {
            Ok(QuantityStats { mean: p(i)?, std: p(i + 1)?, rmse: p(i + 2)?, max_err: p(i + 3)? })
        };
        out.push(AngleSummary {
            angle_deg: p(0)?,
            direction: v[1].parse().map_err(|e| Error::Format(format!("direction: {e}")))?,
            n_ok: v[2].parse().map_err(|e| Error::Format(format!("n_ok: {e}")))?,
            n_failed: v[3].parse().map_err(|e| Error::Format(format!("n_failed: {e}")))?,
            speed: q(4)?,
            phi_v: q(8)?,
            beta: q(12)?,
            v_r: q(16)?,
            v_theta: q(20)?,
            mean_v_alpha_x: p(24)?,
            mean_v_alpha_y: p(25)?,
        });
    }
    Ok(out)
}

/// Plot-oriented exports: per-angle estimate-vs-truth series, and the
/// correlation/Doppler spectrograms of the first pass of each cell as
/// gridded `t,f,psd` CSV dumps.
pub fn export_plotdata(
    cfg: &ExperimentConfig,
    results: &ExperimentResults,
    dir: &Path,
) -> Result<()> {
    fs::create_dir_all(dir)?;

    let mut f = BufWriter::new(fs::File::create(dir.join("estimate_vs_truth.csv"))?);
    writeln!(
        f,
        "angle_deg,direction,truth_speed,mean_speed,std_speed,truth_angle,mean_angle,std_angle"
    )?;
    for c in &results.summary.per_cell {
        // the swept angle is phi_v for tangential campaigns, beta otherwise
        let (truth_angle, est) = match cfg.kind {
            ExperimentKind::TangentialSweep => {
                let t = results
                    .passes
                    .iter()
                    .find(|r| r.angle_deg == c.angle_deg && r.direction == c.direction)
                    .map(|r| r.truth_phi_v_deg)
                    .unwrap_or(f64::NAN);
                (t, &c.phi_v)
            }
            ExperimentKind::ElevationSweep => {
                let t = results
                    .passes
                    .iter()
                    .find(|r| r.angle_deg == c.angle_deg && r.direction == c.direction)
                    .map(|r| r.truth_beta_deg)
                    .unwrap_or(f64::NAN);
                (t, &c.beta)
            }
        };
        writeln!(
            f,
            "{},{},{},{},{},{},{},{}",
            c.angle_deg,
            c.direction,
            cfg.speed,
            c.speed.mean,
            c.speed.std,
            truth_angle,
            est.mean,
            est.std
        )?;
    }

    // first pass of each cell: spectrogram grids
    let geom = ArrayGeometry::square(cfg.side_length_wavelengths, cfg.f0)?;
    let synth_geom = if cfg.rx3_rotation_deg != 0.0 {
        geom.with_rx_rotated(2, cfg.rx3_rotation_deg)?
    } else {
        geom.clone()
    };
    for (ai, &angle) in cfg.angles_deg.iter().enumerate() {
        let direction = 1i8;
        let seed = results
            .passes
            .iter()
            .find(|r| r.angle_deg == angle && r.direction == direction)
            .map(|r| r.seed)
            .unwrap_or(cfg.seed);
        let traj = pass_trajectory(cfg, ai, direction)?;
        let mut radar = cfg.radar.clone();
        radar.rng_seed = seed;
        let rec = synthesize(&Scene::single(traj), &synth_geom, &radar, (0.0, cfg.span))?;
        let (bx, by) = geom.xy_baselines();
        let tag = format!("angle{ai}");
        for (name, spec) in [
            ("corr_x", crate::dsp::correlation_spectrogram(&rec, bx.rx_a, bx.rx_b, &cfg.estimator)?),
            ("corr_y", crate::dsp::correlation_spectrogram(&rec, by.rx_a, by.rx_b, &cfg.estimator)?),
            ("doppler", crate::dsp::channel_spectrogram(&rec, 0, &cfg.estimator)?),
        ] {
            let mut f =
                BufWriter::new(fs::File::create(dir.join(format!("spectrogram_{tag}_{name}.csv")))?);
            spec.write_csv(&mut f)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::BasebandMode;

    fn tiny_config(kind: ExperimentKind) -> ExperimentConfig {
        ExperimentConfig {
            kind,
            angles_deg: vec![0.0, -30.0],
            passes_per_direction: 1,
            speed: 0.50131,
            radius: 0.755,
            radius_start: 0.755,
            radius_end: 0.917,
            span: 2.5,
            f0: 41.8e9,
            side_length_wavelengths: 7.26,
            rx3_rotation_deg: 0.0,
            radar: RadarConfig {
                mode: BasebandMode::ComplexIq,
                highpass_cutoff: 0.0,
                propagation_loss: false,
                snr_db: None,
                ..RadarConfig::default()
            },
            estimator: EstimatorParams {
                interpolate: true,
                min_freq: 0.0,
                ..EstimatorParams::default()
            },
            seed: 5,
        }
    }

    #[test]
    fn stats_on_hand_computed_cases() {
        // estimates {1, 2, 3} against truth 2
        let ests = [1.0, 2.0, 3.0];
        let errs = [-1.0, 0.0, 1.0];
        assert!((mean(&ests) - 2.0).abs() < 1e-15);
        assert!((sample_std(&ests) - 1.0).abs() < 1e-15);
        assert!((rmse(&errs) - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((max_abs(&errs) - 1.0).abs() < 1e-15);
        // rmse^2 >= bias^2
        let errs = [0.5, 1.5, 2.5];
        assert!(rmse(&errs).powi(2) >= mean(&errs).powi(2));
    }

    #[test]
    fn wrap_deg_cases() {
        assert_eq!(wrap_deg(190.0), -170.0);
        assert_eq!(wrap_deg(-190.0), 170.0);
        assert_eq!(wrap_deg(180.0), 180.0);
        assert_eq!(wrap_deg(0.0), 0.0);
    }

    #[test]
    fn tangential_campaign_runs_and_is_accurate() {
        let cfg = tiny_config(ExperimentKind::TangentialSweep);
        let res = run_experiment(&cfg).unwrap();
        assert_eq!(res.passes.len(), 4);
        assert_eq!(res.summary.overall.n_failed, 0);
        // noiseless complex mode: phi_v RMSE < 1 degree per cell
        for c in &res.summary.per_cell {
            assert!(c.phi_v.rmse < 1.0, "cell {} {}: {}", c.angle_deg, c.direction, c.phi_v.rmse);
        }
    }

    #[test]
    fn direction_symmetry_in_ideal_mode() {
        let mut cfg = tiny_config(ExperimentKind::TangentialSweep);
        cfg.angles_deg = vec![0.0];
        let res = run_experiment(&cfg).unwrap();
        let fwd = res.passes.iter().find(|r| r.direction == 1).unwrap();
        let bwd = res.passes.iter().find(|r| r.direction == -1).unwrap();
        let (ef, eb) = (fwd.est.as_ref().unwrap(), bwd.est.as_ref().unwrap());
        assert!((ef.speed - eb.speed).abs() / ef.speed < 0.01);
        let dphi = wrap_deg(eb.phi_v_deg - ef.phi_v_deg - 180.0);
        assert!(dphi.abs() < 1.0, "heading flip mismatch {dphi}");
    }

    #[test]
    fn elevation_campaign_radius_schedule() {
        let mut cfg = tiny_config(ExperimentKind::ElevationSweep);
        cfg.angles_deg = vec![0.0, 10.0, 20.0, 30.0, 40.0];
        assert!((cfg.radius_for(0) - 0.755).abs() < 1e-12);
        assert!((cfg.radius_for(4) - 0.917).abs() < 1e-12);
        assert!((cfg.radius_for(2) - 0.836).abs() < 1e-12);
        // opposite direction reverses the attack sign
        let fwd = pass_trajectory(&cfg, 3, 1).unwrap();
        let bwd = pass_trajectory(&cfg, 3, -1).unwrap();
        let g = ArrayGeometry::square(7.26, 41.8e9).unwrap();
        assert!((fwd.ground_truth(&g).unwrap().beta_deg - 30.0).abs() < 1e-9);
        assert!((bwd.ground_truth(&g).unwrap().beta_deg + 30.0).abs() < 1e-9);
    }

    #[test]
    fn determinism_and_order_independent_aggregation() {
        let mut cfg = tiny_config(ExperimentKind::TangentialSweep);
        cfg.radar.snr_db = Some(16.0);
        cfg.radar.mode = BasebandMode::Real;
        cfg.radar.highpass_cutoff = 1.0;
        cfg.estimator.min_freq = 1.0;
        cfg.estimator.interpolate = false;
        cfg.passes_per_direction = 2;
        let r1 = run_experiment(&cfg).unwrap();
        let r2 = run_experiment(&cfg).unwrap();
        for (a, b) in r1.passes.iter().zip(&r2.passes) {
            assert_eq!(a.seed, b.seed);
            let (ea, eb) = (a.est.as_ref().unwrap(), b.est.as_ref().unwrap());
            assert_eq!(ea.speed.to_bits(), eb.speed.to_bits());
            assert_eq!(ea.phi_v_deg.to_bits(), eb.phi_v_deg.to_bits());
        }
        // shuffled records aggregate identically
        let mut shuffled = r1.passes.clone();
        shuffled.reverse();
        shuffled.swap(0, 3);
        let s = aggregate(&shuffled);
        assert_eq!(s.per_cell, r1.summary.per_cell);
        assert_eq!(s.overall, r1.summary.overall);
    }

    #[test]
    fn failures_are_recorded_not_fatal() {
        let mut cfg = tiny_config(ExperimentKind::TangentialSweep);
        cfg.speed = 8.0; // aliases at 41.8 GHz / 4.167 kSps
        let res = run_experiment(&cfg).unwrap();
        assert_eq!(res.summary.overall.n_ok, 0);
        assert!(res.passes.iter().all(|r| r.error.is_some()));
    }

    #[test]
    fn export_and_reimport_summary() {
        let cfg = tiny_config(ExperimentKind::TangentialSweep);
        let res = run_experiment(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        export_csv(&cfg, &res, dir.path()).unwrap();
        for name in ["estimates.csv", "passes.csv", "summary.csv", "overall.csv", "run_metadata.txt"] {
            assert!(dir.path().join(name).exists(), "{name}");
        }
        let back = read_summary_csv(&dir.path().join("summary.csv")).unwrap();
        assert_eq!(back, res.summary.per_cell);
        // per-pass cardinality: one estimate row per successful pass
        let text = std::fs::read_to_string(dir.path().join("estimates.csv")).unwrap();
        assert_eq!(text.lines().count(), 1 + res.summary.overall.n_ok);
    }

    #[test]
    fn empty_results_export_headers_only() {
        let cfg = tiny_config(ExperimentKind::TangentialSweep);
        let res = ExperimentResults {
            passes: Vec::new(),
            summary: aggregate(&[]),
        };
        let dir = tempfile::tempdir().unwrap();
        export_csv(&cfg, &res, dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("estimates.csv")).unwrap();
        assert_eq!(text.lines().count(), 1);
        let text = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(text.lines().count(), 1);
    }
}
