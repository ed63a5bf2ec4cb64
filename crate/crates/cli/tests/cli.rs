use std::process::{Command, Output};

fn trapfpt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trapfpt"))
        .arg("--no-cache")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn header(out: &Output) -> String {
    stdout(out).lines().next().unwrap_or_default().to_string()
}

#[test]
fn survival_csv_has_one_column_per_start() {
    let out = trapfpt(&["survival", "--kappa", "0.012", "--z", "2,5,10,20", "--points", "11"]);
    assert!(out.status.success());
    let h = header(&out);
    assert_eq!(h.split(',').count(), 5, "{h}");
    assert!(h.starts_with("t_over_tau,"));
    assert!(h.contains("S_kappa0.012_z5"));
    assert_eq!(stdout(&out).lines().count(), 12);
}

#[test]
fn fpt_hides_early_rows_unless_asked() {
    let args = ["fpt", "--kappa", "0.012", "--z", "5", "--tmax", "0.1", "--points", "11"];
    let hidden = stdout(&trapfpt(&args)).lines().count();
    let mut keep = args.to_vec();
    keep.push("--keep-early");
    let shown = stdout(&trapfpt(&keep)).lines().count();
    assert!(shown > hidden, "{shown} vs {hidden}");
}

#[test]
fn mfpt_vanishes_on_the_sphere() {
    let out = trapfpt(&["mfpt", "--kappa", "0.012", "--z", "1,2", "--with-integral"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row[0], 1.0);
    assert!(row[1..].iter().all(|v| *v == 0.0), "{text}");
}

#[test]
fn eigen_polynomial_case() {
    let out = trapfpt(&["eigen", "--kappa", "1.5", "--count", "1", "--format", "csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let idx = header(&out).split(',').position(|c| c == "alpha_n").expect("alpha column");
    let alpha: f64 = text.lines().nth(1).unwrap().split(',').nth(idx).unwrap().parse().unwrap();
    assert!((alpha - 1.0).abs() < 1e-10, "{alpha}");
}

#[test]
fn eigen_json_lists_modes() {
    let out = trapfpt(&["eigen", "--kappa", "0.012", "--count", "3"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["modes"].as_array().unwrap().len(), 3);
    assert!(v["modes"][0]["lambda_n_tau"].as_f64().unwrap() > 0.0);
}

#[test]
fn escape_is_zero_on_the_sphere() {
    let out = trapfpt(&["escape", "--kappa", "0.012", "--z", "1,5"]);
    assert!(out.status.success());
    assert_eq!(header(&out).split(',').next(), Some("z"));
    let row = stdout(&out).lines().nth(1).unwrap().to_string();
    assert!(row.split(',').skip(1).all(|v| v.parse::<f64>().unwrap() == 0.0), "{row}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(trapfpt(&["eigen", "--kappa", "0"]).status.code(), Some(2));
    assert_eq!(trapfpt(&["simulate", "--kappa", "0.012", "--z", "5", "--n", "0"]).status.code(), Some(2));
    assert_eq!(trapfpt(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--kappa", "0.049", "--z", "2", "--n", "300", "--points", "6", "--horizon", "1"];
    let a = trapfpt(&args);
    let b = trapfpt(&args);
    assert!(a.status.success());
    assert!(header(&a).starts_with("t_over_tau,survival,std_err"));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn simulate_compare_fails_on_tight_tolerance() {
    let out = trapfpt(&[
        "simulate", "--kappa", "0.049", "--z", "2", "--n", "200", "--horizon", "1", "--points", "6",
        "--compare", "--compare-times", "0.5,1", "--tolerance", "1e-9",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn cache_directory_is_populated() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_trapfpt"))
        .args(["--cache-dir", dir.path().to_str().unwrap(), "eigen", "--kappa", "0.012", "--count", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_some());
}
