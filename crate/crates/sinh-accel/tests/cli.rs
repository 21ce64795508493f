//! End-to-end checks of the binary: config ingestion, flag overrides,
//! deterministic artifacts, and the exit-status classes.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sinh-accel"))
}

fn write_config(dir: &std::path::Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn pdf_subcommand_matches_table_value() {
    let out = bin()
        .args([
            "pdf",
            "--points",
            "0",
            "--t",
            "0.004",
            "--eps",
            "1e-15",
            "--repeat",
            "0",
        ])
        .args(["--config", &config_nts().display().to_string()])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().nth(1).unwrap();
    let value: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
    assert!((value - 27813.7583243051).abs() < 1e-6, "pdf value {value}");
    // the audit columns carry the realized mesh and term count
    let n: usize = line.split(',').nth(6).unwrap().parse().unwrap();
    assert!(n > 0 && n <= 40);
}

fn config_nts() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("sinh_accel_cli_tests");
    std::fs::create_dir_all(&dir).unwrap();
    write_config(
        &dir,
        "nts.conf",
        "model.family = nts\nmodel.nu = 0.3\nmodel.alpha = 10\nmodel.beta = 0\nmodel.m2 = 0.1\nmodel.mu = 0\n",
    )
}

#[test]
fn config_file_with_command_key_runs() {
    let dir = std::env::temp_dir().join("sinh_accel_cli_tests");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = write_config(
        &dir,
        "full.conf",
        "command = pdf\nmodel.family = nts\nmodel.nu = 0.5\nmodel.alpha = 10\nmodel.m2 = 0.1\n\
         levy.t = 0.004\npoints = 0, -0.1\nmethod.eps = 1e-12\noutput.repeat = 0\n",
    );
    let out = bin().args(["--config", &cfg.display().to_string()]).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3); // header + 2 rows
}

#[test]
fn byte_identical_artifacts_at_repeat_zero() {
    let dir = std::env::temp_dir().join("sinh_accel_cli_tests");
    std::fs::create_dir_all(&dir).unwrap();
    let run = |path: &str| {
        let out_path = dir.join(path);
        let st = bin()
            .args([
                "simulate",
                "--n-paths",
                "16",
                "--n-steps",
                "4",
                "--t-step",
                "0.001",
                "--seed",
                "9",
                "--repeat",
                "0",
                "--out",
                &out_path.display().to_string(),
            ])
            .args(["--config", &config_kobol().display().to_string()])
            .status()
            .unwrap();
        assert!(st.success());
        std::fs::read(&out_path).unwrap()
    };
    let a = run("paths_a.csv");
    let b = run("paths_b.csv");
    assert_eq!(a, b, "identical config + seed must give byte-identical artifacts");
}

fn config_kobol() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("sinh_accel_cli_tests");
    std::fs::create_dir_all(&dir).unwrap();
    write_config(
        &dir,
        "kobol.conf",
        "model.family = kobol\nmodel.c = 0.6\nmodel.nu = 0.7\nmodel.lambda-plus = 5\n\
         model.lambda-minus = -10\nmodel.mu = 0\nmethod.eps = 1e-8\ngrid.h-center = 1e-4\n",
    )
}

#[test]
fn empty_strike_list_is_a_config_error() {
    let out = bin()
        .args(["price", "--kind", "put", "--tau", "0.25", "--spot", "100"])
        .args(["--config", &config_kobol().display().to_string()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "config errors exit with 2");
    assert!(String::from_utf8_lossy(&out.stderr).contains("strike"));
}

#[test]
fn domain_error_exit_code() {
    // a call needs lambda_- < -1; this model has lambda_- = -0.5
    let dir = std::env::temp_dir().join("sinh_accel_cli_tests");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = write_config(
        &dir,
        "shallow.conf",
        "model.family = kobol\nmodel.c = 0.6\nmodel.nu = 0.7\nmodel.lambda-plus = 5\n\
         model.lambda-minus = -0.5\nmodel.mu = 0\n",
    );
    let out = bin()
        .args([
            "price", "--kind", "call", "--tau", "0.25", "--spot", "100", "--strikes", "100",
            "--repeat", "0",
        ])
        .args(["--config", &cfg.display().to_string()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "domain errors exit with 3");
}

#[test]
fn kv_format_and_table_reproduction() {
    let out = bin()
        .args(["reproduce-table", "10", "--repeat", "0", "--format", "kv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("benchmark = 8.76713465"));
    assert!(text.contains("error ="));
    assert!(text.contains("zeta ="));
}

#[test]
fn heston_price_subcommand() {
    let dir = std::env::temp_dir().join("sinh_accel_cli_tests");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = write_config(
        &dir,
        "heston.conf",
        "model.family = heston\nmodel.kappa = 0.30\nmodel.m = 0.18\nmodel.sigma0 = 2.44\n\
         model.rho = -0.58\ninstrument.r = 0.02\ninstrument.v0 = 0.18\n",
    );
    let out = bin()
        .args([
            "price", "--kind", "put", "--tau", "0.004", "--spot", "100", "--strikes", "100",
            "--eps", "1e-12", "--repeat", "0",
        ])
        .args(["--config", &cfg.display().to_string()])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let value: f64 = text.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!((value - 1.0603962422).abs() < 5e-10, "heston put {value}");
}
