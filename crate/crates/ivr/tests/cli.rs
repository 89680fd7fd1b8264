//! End-to-end checks of the `ivr` binary: subcommands, exit codes, file
//! outputs, and environment-variable handling.

use std::path::Path;
use std::process::{Command, Output};

fn ivr() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ivr"))
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("cfg.toml");
    std::fs::write(
        &path,
        r#"
[radar]
mode = "complex"
highpass_cutoff = 0.0
propagation_loss = false
seed = 3

[[scene.targets]]
speed = 0.50131
radius = 0.755
t_end = 2.5

[estimator]
interpolate = true
min_freq = 0.0

[experiment]
kind = "tangential_sweep"
angles_deg = [0.0, -30.0]
passes_per_direction = 1
"#,
    )
    .unwrap();
    path
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn bounds_prints_report() {
    let out = ivr().args(["bounds", "--snr-db", "20"]).output().unwrap();
    assert_ok(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("std(v_alpha)"));
    assert!(text.contains("interferometric"));
}

#[test]
fn bounds_without_snr_is_usage_error() {
    let out = ivr().args(["bounds"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_exits_2() {
    let out = ivr()
        .args(["simulate", "--config", "/nonexistent/cfg.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config"));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[radar]\nbogus_key = 1\n").unwrap();
    let out = ivr()
        .args(["simulate", "--config", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_exits_2() {
    let out = ivr().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_estimate_text_and_binary_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let cfg = cfg.to_str().unwrap();

    let out_t = dir.path().join("text");
    let out_b = dir.path().join("bin");
    assert_ok(
        &ivr()
            .args(["simulate", "--config", cfg, "--out", out_t.to_str().unwrap()])
            .output()
            .unwrap(),
    );
    assert_ok(
        &ivr()
            .args(["simulate", "--config", cfg, "--out", out_b.to_str().unwrap(), "--binary"])
            .output()
            .unwrap(),
    );

    let est = |input: &Path| -> String {
        let out = ivr()
            .args(["estimate", "--config", cfg, "--input", input.to_str().unwrap()])
            .output()
            .unwrap();
        assert_ok(&out);
        String::from_utf8(out.stdout).unwrap()
    };
    let from_text = est(&out_t.join("recording.ivr"));
    let from_bin = est(&out_b.join("recording.ivrb"));
    assert_eq!(from_text, from_bin);
    assert!(from_text.starts_with("pass_id,phi_v_deg,beta_deg,v_theta,v_R,speed\n0,"));

    // the noiseless estimate lands on the configured pass
    let row = from_text.lines().nth(1).unwrap();
    let speed: f64 = row.split(',').next_back().unwrap().parse().unwrap();
    assert!((speed - 0.50131).abs() / 0.50131 < 0.01, "{speed}");
}

#[test]
fn experiment_writes_result_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out_dir = dir.path().join("results");
    let out = ivr()
        .args([
            "experiment",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--plotdata",
        ])
        .output()
        .unwrap();
    assert_ok(&out);
    for name in ["estimates.csv", "passes.csv", "summary.csv", "overall.csv", "run_metadata.txt"] {
        assert!(out_dir.join(name).exists(), "{name} missing");
    }
    assert!(out_dir.join("plotdata").join("estimate_vs_truth.csv").exists());
    assert!(out_dir.join("plotdata").join("spectrogram_angle0_corr_x.csv").exists());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("rmse speed"), "{stdout}");
}

#[test]
fn experiment_seed_override_changes_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.toml");
    std::fs::write(
        &cfg_path,
        r#"
[radar]
snr_db = 16.0

[experiment]
kind = "tangential_sweep"
angles_deg = [0.0]
passes_per_direction = 1
"#,
    )
    .unwrap();
    let cfg = cfg_path.to_str().unwrap();
    let run = |seed: &str, out: &str| {
        let out_dir = dir.path().join(out);
        assert_ok(
            &ivr()
                .args(["experiment", "--config", cfg, "--seed", seed, "--out", out_dir.to_str().unwrap()])
                .output()
                .unwrap(),
        );
        std::fs::read_to_string(out_dir.join("passes.csv")).unwrap()
    };
    let a = run("1", "a");
    let b = run("1", "b");
    let c = run("2", "c");
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn out_dir_env_variable_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let env_out = dir.path().join("from_env");
    let out = ivr()
        .args(["simulate", "--config", cfg.to_str().unwrap()])
        .env("IVR_OUT_DIR", env_out.to_str().unwrap())
        .output()
        .unwrap();
    assert_ok(&out);
    assert!(env_out.join("recording.ivr").exists());
}
