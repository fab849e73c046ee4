use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hybrid_coupler::io::{read_table, Format};

fn device() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../devices/table1.ini")
}

fn hcoupler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcoupler"))
        .args(args)
        .env_remove("HCOUPLER_WORKERS")
        .output()
        .expect("spawn hcoupler")
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (Output, PathBuf) {
    let out = dir.join(name);
    let dev = device();
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--device", dev.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    (hcoupler(&full), out)
}

fn table(path: &Path, format: Format) -> (Vec<String>, Vec<Vec<f64>>, Vec<String>) {
    read_table(&std::fs::read_to_string(path).unwrap(), format).unwrap()
}

#[test]
fn modes_at_zero_flux() {
    let dir = tempfile::tempdir().unwrap();
    let (o, path) = run_to(dir.path(), "modes.csv", &["modes", "--flux", "0", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (cols, rows, errors) = table(&path, Format::Csv);
    assert_eq!(cols[0], "flux");
    assert_eq!(rows.len(), 2);
    assert!(errors.iter().all(String::is_empty));
    let nu = cols.iter().position(|c| c == "nu_ghz").unwrap();
    assert!((4.5..5.5).contains(&rows[0][nu]), "nu1 = {}", rows[0][nu]);
    assert!((7.2..8.3).contains(&rows[1][nu]), "nu2 = {}", rows[1][nu]);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("# device_sha256: "));
    assert!(text.contains("# flux_convention: half_period"));
    assert!(text.contains("# pole_guard: "));
}

#[test]
fn zero_modes_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (o, path) = run_to(dir.path(), "m.csv", &["modes", "--flux", "0", "--n", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!path.exists());
}

#[test]
fn missing_device_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.csv");
    let o = hcoupler(&["modes", "--device", "/nonexistent/device.ini", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    assert!(!o.stderr.is_empty());
}

#[test]
fn malformed_options_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["spectrum", "--flux", "0:0.5"],
        vec!["spectrum", "--flux", "0:0.5:1"],
        vec!["couplings", "--w1", "-1", "--w2", "4.7"],
        vec!["zz", "--w1", "4.25", "--w2", "4.7", "--levels", "1"],
        vec!["fieldmap", "--mode", "3"],
        vec!["design", "--param", "x_j", "--values", "0.02:0.03:2"],
        vec!["spectrum", "--format", "xml"],
        vec!["spectrum", "--pole-guard", "2"],
    ] {
        let (o, path) = run_to(dir.path(), "bad.csv", &args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!path.exists(), "{args:?}");
    }
}

#[test]
fn unknown_device_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let dev = dir.path().join("dev.ini");
    let text = std::fs::read_to_string(device()).unwrap() + "C_extra = 1 fF\n";
    std::fs::write(&dev, text).unwrap();
    let out = dir.path().join("m.csv");
    let o = hcoupler(&["modes", "--device", dev.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn partial_failure_writes_table_with_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let (o, path) = run_to(dir.path(), "s.csv", &["spectrum", "--flux", "0.3:0.45:4", "--pole-guard", "0.99"]);
    assert_eq!(o.status.code(), Some(4));
    let (_, rows, errors) = table(&path, Format::Csv);
    assert_eq!(rows.len(), 4);
    let failed = errors.iter().filter(|e| !e.is_empty()).count();
    assert!(failed > 0 && failed < 4);
    for (r, e) in rows.iter().zip(&errors) {
        assert!(r[0].is_finite());
        assert_eq!(e.is_empty(), r[1].is_finite());
    }
}

#[test]
fn total_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let (o, _) = run_to(dir.path(), "s.csv", &["spectrum", "--flux", "0.38:0.41:4", "--pole-guard", "0.99"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["couplings", "--w1", "4.25", "--w2", "4.7", "--flux", "-0.5:0.5:21"];
    let (a, csv) = run_to(dir.path(), "c.csv", &[&base[..], &["--format", "csv"]].concat());
    let (b, json) = run_to(dir.path(), "c.json", &[&base[..], &["--format", "json"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let (cc, rc, ec) = table(&csv, Format::Csv);
    let (cj, rj, ej) = table(&json, Format::Json);
    assert_eq!(cc, cj);
    assert_eq!(ec, ej);
    assert_eq!(rc.len(), 21);
    for (x, y) in rc.iter().zip(&rj) {
        for (u, v) in x.iter().zip(y) {
            assert_eq!(u.to_bits(), v.to_bits());
        }
    }
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(doc["rows"][0][1].is_number());
    assert_eq!(doc["columns"][0], "flux");
    assert!(doc["metadata"]["device_sha256"].is_string());
}

#[test]
fn output_is_byte_identical_across_workers_and_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["zz", "--w1", "4.25", "--w2", "4.7", "--flux", "0:0.5:101"];
    let mut outputs = Vec::new();
    for (i, w) in ["1", "4", "4", "3"].iter().enumerate() {
        let (o, p) = run_to(dir.path(), &format!("z{i}.csv"), &[&base[..], &["--workers", w]].concat());
        assert_eq!(o.status.code(), Some(0));
        outputs.push(std::fs::read(p).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn zz_reports_peak_and_contrast() {
    let dir = tempfile::tempdir().unwrap();
    let (o, path) = run_to(dir.path(), "zz.csv", &["zz", "--w1", "4.25", "--w2", "4.7", "--flux", "0:0.5:401"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let meta = |key: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(&format!("# {key}: "))).unwrap();
        line.rsplit(' ').next().unwrap().parse().unwrap()
    };
    let peak = meta("max_abs_xi_mhz");
    assert!((50.0..200.0).contains(&peak), "peak {peak} MHz");
    assert!(meta("contrast") > 1e4);
    let (cols, rows, _) = table(&path, Format::Csv);
    let xi = cols.iter().position(|c| c == "xi_mhz").unwrap();
    let grid_max = rows.iter().map(|r| r[xi].abs()).fold(0.0, f64::max);
    assert!(grid_max <= peak * (1.0 + 1e-9));
}

#[test]
fn fieldmap_and_design_run() {
    let dir = tempfile::tempdir().unwrap();
    let (o, p) = run_to(dir.path(), "f.json", &["fieldmap", "--mode", "2", "--x-points", "21", "--flux", "0:0.5:3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let (cols, rows, _) = table(&p, Format::Json);
    assert_eq!(cols[0], "flux");
    assert!(rows.len() >= 3 * 21);
    let (o, p) = run_to(dir.path(), "d.csv", &["design", "--param", "c_j", "--values", "10e-15:50e-15:3", "--flux", "0:0.5:3"]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows, _) = table(&p, Format::Csv);
    assert_eq!(rows.len(), 9);
}

#[test]
fn worker_count_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let dev = device();
    let out = dir.path().join("s.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_hcoupler"))
        .args(["spectrum", "--flux", "0:0.5:5", "--device", dev.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .env("HCOUPLER_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(out.exists());
}
