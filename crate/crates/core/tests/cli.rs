use std::process::Command;

fn specreg() -> Command {
    Command::new(env!("CARGO_BIN_EXE_specreg"))
}

#[test]
fn validate_filter_reports_pass_and_fail() {
    let out = specreg().args(["validate-filter", "krr"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
    let out = specreg().args(["validate-filter", "gf", "--tau", "2"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    let out = specreg().args(["validate-filter", "gf", "--tau", "3"]).output().unwrap();
    assert!(out.status.success());
}

#[test]
fn fit_reads_csv_and_predicts() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    std::fs::write(&data, "x,y\n1.0,2.0\n").unwrap();
    let out = specreg()
        .args(["fit", "--kernel", "min", "--filter", "krr", "--nu", "1", "--data"])
        .arg(&data)
        .args(["--grid", "3"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "x,prediction\n0,0\n0.5,0.5\n1,1\n");
}

#[test]
fn fit_rejects_bad_regularization() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    std::fs::write(&data, "0.5,1.0\n").unwrap();
    let out = specreg()
        .args(["fit", "--kernel", "min", "--filter", "krr", "--nu", "0", "--data"])
        .arg(&data)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid_nu"));
}

#[test]
fn diagnose_effective_dimension_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("edim.csv");
    let out = specreg()
        .args(["diagnose", "min", "effective-dimension", "--points", "8", "--truncation", "1000000", "--output"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("input,value\n"));
    assert_eq!(csv.lines().count(), 9);
    let meta = std::fs::read_to_string(dir.path().join("edim.csv.meta")).unwrap();
    assert!(meta.contains("system = \"min\""));
    assert!(meta.contains("fitted_exponent"));
}

#[test]
fn diagnose_edr_on_periodic_system() {
    let out = specreg().args(["diagnose", "periodic", "edr", "--i-min", "10", "--i-max", "1000"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let meta = String::from_utf8_lossy(&out.stderr);
    let value: f64 = meta
        .lines()
        .find_map(|l| l.strip_prefix("value = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 2.0).abs() < 0.05, "{value}");
}

#[test]
fn diagnose_rejects_system_without_eigensystem() {
    let out = specreg().args(["diagnose", "sobolev_h1", "edr"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing_eigensystem"));
}

#[test]
fn experiment_honours_output_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "n_grid = [30, 60, 120]\nrepetitions = 2\ntest_points = 200\noutput_dir = \"ignored\"\nstem = \"cli\"\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = specreg()
        .arg("experiment")
        .arg(&config)
        .env(specreg::harness::OUTPUT_DIR_ENV, &out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("cli_krr_c1_raw.csv").exists());
    assert!(out_dir.join("cli_krr_c1.svg").exists());
    assert!(String::from_utf8_lossy(&out.stdout).contains("slope"));
}

#[test]
fn experiment_rejects_unknown_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "learning_rate = 0.1\n").unwrap();
    let out = specreg().arg("experiment").arg(&config).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("config"));
}
