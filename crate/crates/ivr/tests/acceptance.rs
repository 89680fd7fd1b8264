//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the measured values (run with `--nocapture` to see them on success).

use ivr::bounds::{
    angular_crlb, correlation_spectrum, doppler_resolution, interferometric_resolution,
    pattern_moments, peak_snr_rate, CrlbReport,
};
use ivr::dsp::{
    correlation_spectrogram, count_spectral_peaks, estimate_closest_approach, peak_frequency,
    periodogram_complex, CaMethod, EstimatorParams, WindowKind,
};
use ivr::geometry::{ArrayGeometry, Vec3, SPEED_OF_LIGHT};
use ivr::harness::{run_experiment, ExperimentConfig, ExperimentKind};
use ivr::scene::{LinearTrajectory, PointTarget, Scene};
use ivr::synthesis::{round_trip_delay, synthesize, BasebandMode, RadarConfig};
use ivr::velocity::{reconstruct, tangential_from_frequency, Calibration};

const F0: f64 = 41.8e9;
const SIDE_WL: f64 = 7.26;
const SPEED: f64 = 0.50131;
const R_NOM: f64 = 0.755;
const BIN: f64 = 4166.7 / 16384.0; // 0.2543 Hz

fn geom() -> ArrayGeometry {
    ArrayGeometry::square(SIDE_WL, F0).unwrap()
}

fn clean_params() -> EstimatorParams {
    EstimatorParams { interpolate: true, min_freq: 0.0, ..EstimatorParams::default() }
}

fn pass_recording(heading_deg: f64, attack_deg: f64) -> (ivr::BasebandRecording, Calibration) {
    let g = geom();
    let tr =
        LinearTrajectory::from_pass(SPEED, heading_deg, attack_deg, R_NOM, 1.25, 0.0, 2.5).unwrap();
    let rec =
        synthesize(&Scene::single(tr), &g, &RadarConfig::complex_validation(), (0.0, 2.5)).unwrap();
    let truth = tr.ground_truth(&g).unwrap();
    (rec, Calibration::from_truth(&truth))
}

fn check(criterion: &str, ok: bool, detail: &str) {
    println!("[{}] {criterion}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{criterion}: {detail}");
}

#[test]
fn criterion_1_phase_oracle() {
    let g = geom();
    let tr = LinearTrajectory::from_pass(SPEED, -25.0, 15.0, R_NOM, 0.25, 0.0, 0.5).unwrap();
    let rec =
        synthesize(&Scene::single(tr), &g, &RadarConfig::complex_validation(), (0.0, 0.5)).unwrap();
    let dt = 1.0 / rec.sample_rate;
    let wrap = |x: f64| {
        let mut y = x % (2.0 * std::f64::consts::PI);
        if y > std::f64::consts::PI {
            y -= 2.0 * std::f64::consts::PI;
        }
        if y < -std::f64::consts::PI {
            y += 2.0 * std::f64::consts::PI;
        }
        y
    };
    let mut worst = 0.0f64;
    for (a, b) in [(0usize, 1usize), (0, 2), (1, 2)] {
        for k in 0..rec.len() {
            let p = tr.position_unchecked(rec.t0 + k as f64 * dt);
            let tau_a = round_trip_delay(g.tx, g.rx[a], p).unwrap();
            let tau_b = round_trip_delay(g.tx, g.rx[b], p).unwrap();
            let expected = wrap(-2.0 * std::f64::consts::PI * F0 * (tau_b - tau_a));
            let got = (rec.channels[a][k] * rec.channels[b][k].conj()).arg();
            worst = worst.max(wrap(got - expected).abs());
        }
    }
    check(
        "criterion 1 (phase oracle)",
        worst < 1e-9,
        &format!("max |arg(r_a conj r_b) + 2 pi f0 (tau_b - tau_a)| = {worst:.3e} rad (< 1e-9)"),
    );
}

#[test]
fn criterion_2_nominal_pass_frequencies() {
    let g = geom();
    let params = EstimatorParams::default();

    // x-aligned pass on the Phi = 0 baseline: 4.821 Hz
    let (rec, _) = pass_recording(0.0, 0.0);
    let t = estimate_closest_approach(&rec, &params, CaMethod::EnvelopePeak).unwrap();
    let (bx, _) = g.xy_baselines();
    let spec = correlation_spectrogram(&rec, bx.rx_a, bx.rx_b, &params).unwrap();
    let f_x = peak_frequency(&spec, t, false).unwrap().f.abs();

    // pass aligned with the diagonal baseline (full projection on it):
    // sqrt(2) x 4.821 = 6.82 Hz on D_lambda = 10.267
    let (rec45, _) = pass_recording(45.0, 0.0);
    let t45 = estimate_closest_approach(&rec45, &params, CaMethod::EnvelopePeak).unwrap();
    let bd = g.diagonal_baseline();
    let spec45 = correlation_spectrogram(&rec45, bd.rx_a, bd.rx_b, &params).unwrap();
    let f_45 = peak_frequency(&spec45, t45, false).unwrap().f.abs();

    // radial pass: Doppler at 2 v / lambda = 139.8 Hz on every channel
    let tr = LinearTrajectory::new(Vec3::new(0.0, 0.0, 0.6), Vec3::new(0.0, 0.0, SPEED), 0.0, 2.0)
        .unwrap();
    let rec_r =
        synthesize(&Scene::single(tr), &g, &RadarConfig::complex_validation(), (0.0, 2.0)).unwrap();
    let mut f_d = 0.0f64;
    let mut doppler_ok = true;
    for ch in 0..3 {
        let spec_d = ivr::dsp::channel_spectrogram(&rec_r, ch, &params).unwrap();
        f_d = peak_frequency(&spec_d, 1.0, false).unwrap().f.abs();
        doppler_ok &= (f_d - 139.8).abs() <= 0.26;
    }

    let ok = (f_x - 4.821).abs() <= 0.26 && (f_45 - 6.82).abs() <= 0.26 && doppler_ok;
    check(
        "criterion 2 (nominal-pass frequencies)",
        ok,
        &format!(
            "Phi=0 peak {f_x:.3} Hz (4.821 +- 0.26), Phi=-45 peak {f_45:.3} Hz (6.82 +- 0.26), \
             Doppler {f_d:.2} Hz (139.8 +- 0.26)"
        ),
    );
}

#[test]
fn criterion_3_roundtrip_reconstruction_grid() {
    let g = geom();
    let params = clean_params();
    let mut worst_phi = 0.0f64;
    let mut worst_beta = 0.0f64;
    let mut worst_speed = 0.0f64;
    for &phi_v in &[0.0, -15.0, -30.0, -45.0] {
        for &beta in &[0.0, 10.0, 20.0, 30.0, 40.0] {
            let (rec, cal) = pass_recording(phi_v, beta);
            let est = reconstruct(&rec, &g, &params, &cal).unwrap();
            worst_phi = worst_phi.max((est.phi_v_deg - phi_v).abs());
            worst_beta = worst_beta.max((est.beta_deg - beta).abs());
            worst_speed = worst_speed.max((est.speed - SPEED).abs() / SPEED);
        }
    }
    let ok = worst_phi <= 2.0 && worst_beta <= 2.0 && worst_speed <= 0.03;
    check(
        "criterion 3 (noiseless round-trip grid)",
        ok,
        &format!(
            "max |phi_v err| {worst_phi:.3} deg (<= 2), max |beta err| {worst_beta:.3} deg (<= 2), \
             max speed err {:.2}% (<= 3%)",
            100.0 * worst_speed
        ),
    );
}

fn paper_experiment(kind: ExperimentKind, angles: Vec<f64>) -> ExperimentConfig {
    ExperimentConfig {
        kind,
        angles_deg: angles,
        passes_per_direction: 50,
        speed: SPEED,
        radius: R_NOM,
        radius_start: 0.755,
        radius_end: 0.917,
        span: 2.5,
        f0: F0,
        side_length_wavelengths: SIDE_WL,
        rx3_rotation_deg: 0.0,
        radar: RadarConfig { snr_db: Some(16.0), ..RadarConfig::default() },
        estimator: EstimatorParams::default(),
        seed: 2024,
    }
}

#[test]
fn criterion_4_experiment_rmse_bounds() {
    // Experiment I: tangential sweep
    let cfg = paper_experiment(
        ExperimentKind::TangentialSweep,
        vec![0.0, -15.0, -30.0, -45.0],
    );
    let res = run_experiment(&cfg).unwrap();
    let o1 = res.summary.overall;

    // Experiment II: elevation sweep
    let cfg = paper_experiment(ExperimentKind::ElevationSweep, vec![0.0, 10.0, 20.0, 30.0, 40.0]);
    let res = run_experiment(&cfg).unwrap();
    let o2 = res.summary.overall;

    let ok = o1.n_failed == 0
        && o2.n_failed == 0
        && o1.rmse_speed <= 41.01e-3
        && o1.rmse_phi_v <= 10.42
        && o2.rmse_speed <= 45.07e-3
        && o2.rmse_beta <= 5.11;
    check(
        "criterion 4 (hardware RMSE upper bounds, real mode, 16 dB)",
        ok,
        &format!(
            "Exp-I speed RMSE {:.2} mm/s (<= 41.01), phi_v RMSE {:.2} deg (<= 10.42); \
             Exp-II speed RMSE {:.2} mm/s (<= 45.07), beta RMSE {:.2} deg (<= 5.11); \
             failures {}/{}",
            o1.rmse_speed * 1e3,
            o1.rmse_phi_v,
            o2.rmse_speed * 1e3,
            o2.rmse_beta,
            o1.n_failed,
            o2.n_failed
        ),
    );
}

#[test]
fn criterion_5_crlb_reproduction_and_monte_carlo_floor() {
    // order-of-magnitude reproduction across the observed SNR range
    let snrs = [16.0, 20.0, 24.0, 27.0];
    let mut sum_va = 0.0;
    let mut sum_vr = 0.0;
    for &snr in &snrs {
        let rep = CrlbReport::compute(snr, 4166.7, 30.0, SPEED, R_NOM, F0, SIDE_WL, 0.25).unwrap();
        sum_va += rep.std_v_alpha;
        sum_vr += rep.std_v_r;
    }
    let mean_va = sum_va / snrs.len() as f64;
    let mean_vr = sum_vr / snrs.len() as f64;
    let ratio_va = mean_va / 0.31e-3;
    let ratio_vr = mean_vr / 1.73e-6;
    let repro_ok = (1.0 / 3.0..=3.0).contains(&ratio_va) && (1.0 / 3.0..=3.0).contains(&ratio_vr);
    check(
        "criterion 5a (CRLB order of magnitude)",
        repro_ok,
        &format!(
            "mean angular std {:.3} mm/s = {ratio_va:.2} x 0.31 mm/s; \
             mean Doppler std {:.2} um/s = {ratio_vr:.2} x 1.73 um/s (both within 3x)",
            mean_va * 1e3,
            mean_vr * 1e6
        ),
    );

    // Monte Carlo estimator variance >= bound at every tested SNR
    let g = geom();
    let (bx, _) = g.xy_baselines();
    let pm = pattern_moments(30.0).unwrap();
    let omega = SPEED / R_NOM;
    let params = clean_params();
    let tr = LinearTrajectory::from_pass(SPEED, 0.0, 0.0, R_NOM, 0.8, 0.0, 1.6).unwrap();
    let truth = tr.ground_truth(&g).unwrap();
    let mut detail = String::new();
    let mut mc_ok = true;
    for &snr_db in &[10.0, 16.0, 20.0, 27.0] {
        let mut v_hats = Vec::with_capacity(200);
        for trial in 0..200u64 {
            let cfg = RadarConfig {
                mode: BasebandMode::ComplexIq,
                highpass_cutoff: 0.0,
                propagation_loss: false,
                snr_db: Some(snr_db),
                rng_seed: 9000 + trial,
                ..RadarConfig::default()
            };
            let rec = synthesize(&Scene::single(tr), &g, &cfg, (0.0, 1.6)).unwrap();
            let t = estimate_closest_approach(&rec, &params, CaMethod::EnvelopePeak).unwrap();
            let spec = correlation_spectrogram(&rec, bx.rx_a, bx.rx_b, &params).unwrap();
            let pk = peak_frequency(&spec, t, true).unwrap();
            v_hats.push(tangential_from_frequency(pk.f, truth.r_zenith, bx.d_lambda).unwrap());
        }
        let mean = v_hats.iter().sum::<f64>() / v_hats.len() as f64;
        let var =
            v_hats.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (v_hats.len() - 1) as f64;
        // correlator output carries both receivers' noise: half the SNR
        let snr_rate = peak_snr_rate(snr_db, 4166.7) / 2.0;
        let (_, bound_std) = angular_crlb(snr_rate, &pm, omega, R_NOM, bx.d_lambda).unwrap();
        let bound = bound_std * bound_std;
        detail.push_str(&format!(
            "snr {snr_db} dB: MC var {var:.3e} vs CRLB {bound:.3e} ({:.0}x); ",
            var / bound
        ));
        mc_ok &= var >= bound;
    }
    check("criterion 5b (MC variance >= CRLB)", mc_ok, &detail);
}

#[test]
fn criterion_6_resolution_identities() {
    // exact Doppler resolution
    let dr_ok = doppler_resolution(0.25) == 4.0;

    // analytic width of the correlation spectrum vs the resolution formula
    let sigma = 30f64.to_radians() / ivr::HPBW_SIGMA_RATIO;
    let omega = SPEED / R_NOM;
    let f_omega = 4.8205;
    let peak_sq = correlation_spectrum(f_omega, sigma, omega, f_omega).powi(2);
    let target = peak_sq / std::f64::consts::E;
    let mut lo = f_omega;
    let mut hi = f_omega + 20.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if correlation_spectrum(mid, sigma, omega, f_omega).powi(2) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let width_analytic = 2.0 * (lo - f_omega);
    let formula = interferometric_resolution(omega, 30f64.to_radians());
    let ana_ok = (width_analytic - formula).abs() / formula < 1e-9;

    // measured -3 dB width of the simulated correlation peak
    let g = geom();
    let (rec, _) = pass_recording(0.0, 0.0);
    let (bx, _) = g.xy_baselines();
    let corr = ivr::dsp::correlate_channels(&rec, bx.rx_a, bx.rx_b).unwrap();
    let spec = periodogram_complex(&corr, rec.sample_rate, rec.t0, 1 << 17, WindowKind::Boxcar)
        .unwrap();
    let row = &spec.psd[0];
    let (pk_bin, pk) = row
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, &v)| (i, v))
        .unwrap();
    let half = pk / 2.0;
    let mut hi_bin = pk_bin;
    while row[hi_bin] > half {
        hi_bin += 1;
    }
    let mut lo_bin = pk_bin;
    while row[lo_bin] > half {
        lo_bin -= 1;
    }
    let cross = |i: usize, j: usize| {
        spec.freqs[i] + (half - row[i]) / (row[j] - row[i]) * (spec.freqs[j] - spec.freqs[i])
    };
    let width_meas = cross(hi_bin - 1, hi_bin) - cross(lo_bin + 1, lo_bin);
    let meas_ok = (width_meas - 0.951).abs() / 0.951 <= 0.20;

    check(
        "criterion 6 (resolution identities)",
        dr_ok && ana_ok && meas_ok,
        &format!(
            "1/T = {} Hz (== 4); spectrum width {width_analytic:.6} Hz vs formula {formula:.6} \
             (rel {:.1e}); simulated peak -3 dB width {width_meas:.3} Hz vs 0.951 (rel {:+.1}%)",
            doppler_resolution(0.25),
            (width_analytic - formula).abs() / formula,
            100.0 * (width_meas - 0.951) / 0.951
        ),
    );
}

#[test]
fn criterion_7_small_angle_claim() {
    let d_lambda = SIDE_WL;
    let omega = SPEED / R_NOM;
    let mut max_rel = 0.0f64;
    let mut a = -20.0f64;
    while a <= 20.0 {
        let f = ivr::velocity::interferometric_frequency(omega, d_lambda, a.to_radians());
        let v_exact = omega * R_NOM;
        let v_approx = tangential_from_frequency(f, R_NOM, d_lambda).unwrap();
        max_rel = max_rel.max((v_exact - v_approx).abs() / v_approx);
        a += 0.01;
    }
    check(
        "criterion 7 (small-angle claim)",
        (max_rel - 0.0642).abs() < 1e-3 && max_rel < 0.10,
        &format!("max relative error over |alpha| <= 20 deg: {:.2}% (6.4% expected, < 10%)", 100.0 * max_rel),
    );
}

#[test]
fn criterion_8_two_target_intermodulation() {
    let g = geom();
    let span = 1.5;
    let mid = span / 2.0;
    // drift-matched pair: distinct radial velocities (cross tones at +-112 Hz)
    // and distinct angular rates (self tones at +1.74 and -1.16 Hz)
    let v1 = Vec3::new(0.12, 0.0, 0.22);
    let v2 = Vec3::new(-0.16, 0.0, -0.18);
    let t1 = LinearTrajectory::new(Vec3::new(0.0, 0.0, 0.5) - v1 * mid, v1, 0.0, span).unwrap();
    let t2 = LinearTrajectory::new(Vec3::new(0.0, 0.0, 1.0) - v2 * mid, v2, 0.0, span).unwrap();
    let scene = Scene {
        targets: vec![PointTarget::unit(t1), PointTarget::unit(t2)],
    };
    let rec = synthesize(&scene, &g, &RadarConfig::complex_validation(), (0.0, span)).unwrap();
    let (bx, _) = g.xy_baselines();
    let corr = ivr::dsp::correlate_channels(&rec, bx.rx_a, bx.rx_b).unwrap();
    let spec =
        periodogram_complex(&corr, rec.sample_rate, rec.t0, 1 << 17, WindowKind::Hann).unwrap();
    // 2 Hz separation groups the chirp ripple of each cross product into one
    // response while keeping the two self tones (2.9 Hz apart) distinct
    let n = count_spectral_peaks(&spec.freqs, &spec.psd[0], -20.0, 2.0);
    check(
        "criterion 8 (N^2 intermodulation tones)",
        n == 4,
        &format!("{n} correlation tones above -20 dB of max (expected 4)"),
    );
}

#[test]
fn criterion_9_determinism_and_interchange() {
    let bin = env!("CARGO_BIN_EXE_ivr");
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("cfg.toml");
    std::fs::write(
        &config_path,
        r#"
[radar]
mode = "real"
snr_db = 16.0
seed = 11

[[scene.targets]]
speed = 0.50131
radius = 0.755
t_end = 2.5
"#,
    )
    .unwrap();

    let run = |args: &[&str]| {
        let out = std::process::Command::new(bin).args(args).output().unwrap();
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };

    // simulate twice: bit-identical recordings
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let cfg = config_path.to_str().unwrap();
    run(&["simulate", "--config", cfg, "--out", out_a.to_str().unwrap()]);
    run(&["simulate", "--config", cfg, "--out", out_b.to_str().unwrap()]);
    let rec_a = std::fs::read(out_a.join("recording.ivr")).unwrap();
    let rec_b = std::fs::read(out_b.join("recording.ivr")).unwrap();
    let deterministic = rec_a == rec_b;

    // file-based estimate equals the in-process pipeline bit-exactly
    let stdout = run(&[
        "estimate",
        "--config",
        cfg,
        "--input",
        out_a.join("recording.ivr").to_str().unwrap(),
    ]);
    let fc = ivr::config::FileConfig::load(&config_path).unwrap();
    let g = fc.to_geometry().unwrap();
    let scene = fc.to_scene().unwrap();
    let rec = synthesize(
        &scene,
        &fc.to_synthesis_geometry().unwrap(),
        &fc.to_radar_config().unwrap(),
        (0.0, 2.5),
    )
    .unwrap();
    let truth = scene.targets[0].trajectory.ground_truth(&g).unwrap();
    let est = reconstruct(
        &rec,
        &g,
        &fc.to_estimator_params().unwrap(),
        &Calibration::from_truth(&truth),
    )
    .unwrap();
    let expected = format!(
        "pass_id,phi_v_deg,beta_deg,v_theta,v_R,speed\n0,{},{},{},{},{}\n",
        est.phi_v_deg, est.beta_deg, est.v_theta, est.components.v_r, est.speed
    );
    let interchange = String::from_utf8(stdout).unwrap() == expected;

    check(
        "criterion 9 (determinism & interchange)",
        deterministic && interchange,
        &format!("identical recordings: {deterministic}; file-based estimate bit-exact: {interchange}"),
    );
}
