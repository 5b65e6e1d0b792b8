use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn nsfk(dir: &Path, args: &[&str], config: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nsfk"));
    cmd.current_dir(dir)
        .args(args)
        .args(["--out", "out", "--quiet"]);
    if let Some(text) = config {
        let path = dir.join("config.toml");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn report(dir: &Path, command: &str) -> Value {
    let text =
        std::fs::read_to_string(dir.join("out").join(format!("{command}-report.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn check<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))
}

const SMALL_SYMBOL: &str = "[symbol]\ncertificate_points = 2001\nlyapunov_modes = 10\n[symbol.grid]\nxi_min = 1e-3\nxi_max = 1e3\npoints = 801\n";

const SMALL_RUN: &str =
    "[nonlinear]\nlength = 40.0\nn = 256\ndt = 0.05\nt_final = 4.0\nsample_interval = 0.5\n";

const SMALL_LINEAR: &str = "[linear]\nnodes = 512\nt_max = 1e3\ntimes = 31\n";

#[test]
fn reference_thermo_passes() {
    let d = TempDir::new().unwrap();
    let o = nsfk(d.path(), &["verify-thermo"], None);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let r = report(d.path(), "verify-thermo");
    assert_eq!(r["passed"], true);
    assert_eq!(r["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    let csv = std::fs::read_to_string(d.path().join("out/thermo_conditions.csv")).unwrap();
    assert!(csv.starts_with("group,condition,passed,worst,tolerance,rho,theta\n"));
    assert!(d.path().join("out/verify-thermo-report.txt").exists());
}

#[test]
fn low_gamma_is_a_config_error() {
    let d = TempDir::new().unwrap();
    let o = nsfk(
        d.path(),
        &["verify-thermo"],
        Some("[closure]\ngamma = 0.5\n"),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gamma"));
}

#[test]
fn missing_config_is_a_usage_error() {
    let d = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_nsfk"))
        .args(["verify-thermo", "--quiet", "--config"])
        .arg(d.path().join("absent.toml"))
        .arg("--out")
        .arg(d.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parse_error_names_line() {
    let d = TempDir::new().unwrap();
    let o = nsfk(
        d.path(),
        &["verify-thermo"],
        Some("[closure]\nmu0 = \"one\"\n"),
    );
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("mu0"), "{err}");
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_nsfk"))
        .arg("frobnicate")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reference_symbol_is_regularity_gain() {
    let d = TempDir::new().unwrap();
    let o = nsfk(d.path(), &["analyze-symbol"], Some(SMALL_SYMBOL));
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let r = report(d.path(), "analyze-symbol");
    assert_eq!(r["details"]["classification"], "RegularityGain");
    let p = r["details"]["dissipativity_type"]["p"].as_f64().unwrap();
    let q = r["details"]["dissipativity_type"]["q"].as_f64().unwrap();
    assert!((p - 1.0).abs() < 0.05 && q.abs() < 0.05);
    assert_eq!(r["details"]["friedrichs"]["feasible"], false);
}

#[test]
fn no_transport_fails_strict_dissipativity() {
    let d = TempDir::new().unwrap();
    let cfg = format!("{SMALL_SYMBOL}[closure]\nmu0 = 0.0\nalpha0 = 0.0\n");
    let o = nsfk(d.path(), &["analyze-symbol"], Some(&cfg));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("strict dissipativity"));
    let r = report(d.path(), "analyze-symbol");
    assert_eq!(check(&r, "strict dissipativity")["passed"], false);
}

#[test]
fn capillarity_free_is_friedrichs_feasible() {
    let d = TempDir::new().unwrap();
    let cfg = format!("{SMALL_SYMBOL}[closure]\nkappa0 = 0.0\n");
    nsfk(d.path(), &["analyze-symbol"], Some(&cfg));
    let r = report(d.path(), "analyze-symbol");
    assert_eq!(r["details"]["friedrichs"]["feasible"], true);
    assert_eq!(check(&r, "strict dissipativity")["passed"], true);
    assert_eq!(check(&r, "compensating certificate")["passed"], true);
    let l = check(&r, "lyapunov functional");
    assert_eq!(l["passed"], false);
    assert!(l["note"].as_str().unwrap().contains("delta"));
}

#[test]
fn linear_decay_reports_exponents() {
    let d = TempDir::new().unwrap();
    let o = nsfk(d.path(), &["linear-decay"], Some(SMALL_LINEAR));
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let r = report(d.path(), "linear-decay");
    let e = check(&r, "decay exponent l=0")["observed"]
        .as_f64()
        .unwrap();
    assert!((e + 0.25).abs() <= 0.05, "{e}");
    let csv = std::fs::read_to_string(d.path().join("out/linear_norms.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 32);
}

#[test]
fn custom_profile_from_csv() {
    let d = TempDir::new().unwrap();
    let mut rows = String::from("xi,w1_re,w1_im,w2_re,w2_im,w3_re,w3_im\n");
    for k in 0..=400 {
        let x = k as f64 * 0.02;
        let g = (-x * x).exp();
        rows += &format!("{x},{g},0,{g},0,{g},0\n");
    }
    let path = d.path().join("profile.csv");
    std::fs::write(&path, rows).unwrap();
    let cfg = format!(
        "{SMALL_LINEAR}expected = [-0.25, -0.75]\n[linear.profile]\nkind = \"samples\"\npath = {:?}\n",
        path
    );
    let o = nsfk(d.path(), &["linear-decay"], Some(&cfg));
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn malformed_profile_is_a_config_error() {
    let d = TempDir::new().unwrap();
    let path = d.path().join("profile.csv");
    std::fs::write(&path, "xi,w1_re\n0,1\n").unwrap();
    let cfg = format!("[linear.profile]\nkind = \"samples\"\npath = {:?}\n", path);
    let o = nsfk(d.path(), &["linear-decay"], Some(&cfg));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zero_amplitude_run_passes_trivially() {
    let d = TempDir::new().unwrap();
    let cfg = format!("{SMALL_RUN}[nonlinear.perturbation]\namplitude = 0.0\n");
    let o = nsfk(d.path(), &["nonlinear-run"], Some(&cfg));
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = std::fs::read_to_string(d.path().join("out/ledger.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("t,mass,momentum"));
    for l in lines {
        let cols: Vec<&str> = l.split(',').collect();
        assert_eq!(cols[5].parse::<f64>().unwrap(), 0.0);
        assert_eq!(cols[7], "");
    }
}

#[test]
fn oversized_step_is_reported() {
    let d = TempDir::new().unwrap();
    let cfg = format!("{SMALL_RUN}scheme = \"rk4\"\n").replace("dt = 0.05", "dt = 0.5");
    let o = nsfk(d.path(), &["nonlinear-run"], Some(&cfg));
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("0.5"), "{err}");
}

#[test]
fn outputs_are_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        let o = nsfk(d.path(), &["nonlinear-run", "--seed", "5"], Some(SMALL_RUN));
        assert!(o.status.code().is_some_and(|c| c <= 1));
    }
    let read = |d: &TempDir, f: &str| std::fs::read(d.path().join("out").join(f)).unwrap();
    assert_eq!(read(&a, "ledger.csv"), read(&b, "ledger.csv"));
    let ra = report(a.path(), "nonlinear-run");
    assert_eq!(ra["seed"], 5);
    assert_eq!(
        ra["config_hash"],
        report(b.path(), "nonlinear-run")["config_hash"]
    );
}

#[test]
fn seed_changes_the_hash() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    nsfk(a.path(), &["verify-thermo", "--seed", "1"], None);
    nsfk(b.path(), &["verify-thermo", "--seed", "2"], None);
    assert_ne!(
        report(a.path(), "verify-thermo")["config_hash"],
        report(b.path(), "verify-thermo")["config_hash"]
    );
}

#[test]
fn thread_override_is_validated() {
    let d = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_nsfk"))
        .args(["verify-thermo", "--quiet", "--out"])
        .arg(d.path())
        .env("NSFK_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_nsfk"))
        .args(["verify-thermo", "--quiet", "--out"])
        .arg(d.path())
        .env("NSFK_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn shipped_reference_config_matches_defaults() {
    let shipped = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/reference.toml");
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    nsfk(a.path(), &["verify-thermo"], None);
    nsfk(
        b.path(),
        &["verify-thermo"],
        Some(&std::fs::read_to_string(shipped).unwrap()),
    );
    assert_eq!(
        report(a.path(), "verify-thermo")["config_hash"],
        report(b.path(), "verify-thermo")["config_hash"]
    );
}
