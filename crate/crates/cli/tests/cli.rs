use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(cmd: &str, config: &str, extra: &[&str]) -> (Output, TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, config).unwrap();
    let out = dir.path().join("out");
    let output = Command::new(env!("CARGO_BIN_EXE_liouville-sync"))
        .arg(cmd)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .env_remove("LIOUVILLE_SYNC_THREADS")
        .output()
        .unwrap();
    (output, dir)
}

fn ok(cmd: &str, config: &str) -> TempDir {
    let (o, dir) = run(cmd, config, &[]);
    assert!(o.status.success(), "{cmd} failed: {}", String::from_utf8_lossy(&o.stderr));
    dir
}

fn out_file(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join("out").join(name)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn complex_list(v: &Value) -> Vec<(f64, f64)> {
    v.as_array().unwrap().iter().map(|z| (z[0].as_f64().unwrap(), z[1].as_f64().unwrap())).collect()
}

const XXZ: &str = r#"
schema_version = 1
seed = 3

[model]
builder = "xxz_loss"
delta = 1.0
b = 0.5
gamma = 2.0

[evolve]
initial = { kind = "random_mixed" }
t_end = 40.0
n_times = 201
observables = [{ op = "sx", sites = [1, 2] }]
bloch_sites = [0]

[sync]
op = "sx"
pairs = [[1, 2], [0, 1]]

[sweep]
mode = "track"
lambda0 = [0.0, 4.0]
s_min = 1e-3
decades = 1
per_decade = 8
"#;

#[test]
fn xxz_spectrum_has_four_i_pair() {
    let dir = ok("spectrum", XXZ);
    let s = json(&out_file(&dir, "spectrum.json"));
    let freqs: Vec<f64> = s["frequencies"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(freqs.len(), 2);
    assert!((freqs[0] + 4.0).abs() < 1e-9 && (freqs[1] - 4.0).abs() < 1e-9);
    assert_eq!(complex_list(&s["eigenvalues"]).len(), 64);
    // defective decaying blocks
    assert!(s["overlap_condition"].is_null());
    assert_eq!(s["stationary"]["dimension"], 2);
}

#[test]
fn empty_model_has_zero_spectrum() {
    let cfg = "schema_version = 1\n[model]\nbuilder = \"custom\"\nsites = [2, 2]\n";
    let dir = ok("spectrum", cfg);
    let s = json(&out_file(&dir, "spectrum.json"));
    let vals = complex_list(&s["eigenvalues"]);
    assert_eq!(vals.len(), 16);
    assert!(vals.iter().all(|(re, im)| re.abs() < 1e-14 && im.abs() < 1e-14));
    assert_eq!(s["unital"]["unital"], true);

    let dir = ok("symmetries", cfg);
    let y = json(&out_file(&dir, "symmetries.json"));
    assert!(!y["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn pure_gain_spectrum_reports_peripheral_frequencies() {
    let cfg = r#"
schema_version = 1
[model]
builder = "spin1_pair"
omega_a = 0.4
omega_b = 1.1
eps = 0.5
gamma_u = [0.8, 1.2]
gamma_d = [0.0, 0.0]
"#;
    let dir = ok("spectrum", cfg);
    let s = json(&out_file(&dir, "spectrum.json"));
    let freqs = s["frequencies"].as_array().unwrap();
    assert!(freqs.len() >= 2, "{freqs:?}");
    assert_eq!(s["stationary"]["faithful"], false);
}

#[test]
fn hubbard_symmetries_include_field_frequency() {
    let cfg = r#"
schema_version = 1
[model]
builder = "hubbard"
n_sites = 2
u = 1.0
eps = 0.3
b = 0.7
gamma_minus = 0.4
gamma_plus = 0.4
gamma_z = 0.3
"#;
    let dir = ok("symmetries", cfg);
    let y = json(&out_file(&dir, "symmetries.json"));
    let omegas: Vec<f64> = y["symmetries"].as_array().unwrap().iter().map(|s| s["omega"].as_f64().unwrap()).collect();
    assert!(omegas.iter().any(|w| (w.abs() - 0.7).abs() < 1e-8), "{omegas:?}");
    assert_eq!(y["no_sync_certificate"]["no_sync_certified"], false);
}

#[test]
fn negative_control_is_certified() {
    let cfg = "schema_version = 1\nseed = 11\n[model]\nbuilder = \"negative_control\"\nn_qubits = 2\ngamma = 0.7\n";
    let dir = ok("symmetries", cfg);
    let y = json(&out_file(&dir, "symmetries.json"));
    assert_eq!(y["no_sync_certificate"]["no_sync_certified"], true);
    assert_eq!(y["commutant_dim"], 1);
}

#[test]
fn evolve_writes_anti_phase_columns() {
    let dir = ok("evolve", XXZ);
    let mut rdr = csv::Reader::from_path(out_file(&dir, "evolve.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["t", "sx_1", "sx_2"]);
    let rows: Vec<Vec<f64>> = rdr.records().map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 201);
    let last = rows.last().unwrap();
    assert!((last[1] + last[2]).abs() < 1e-6, "{last:?}");

    let mut rdr = csv::Reader::from_path(out_file(&dir, "bloch.csv")).unwrap();
    let last = rdr.records().last().unwrap().unwrap();
    let az: f64 = last[4].parse().unwrap();
    assert!((az + 1.0).abs() < 1e-6);
}

#[test]
fn sync_report_classifies_xxz_pairs() {
    let dir = ok("sync-report", XXZ);
    let r = json(&out_file(&dir, "sync_report.json"));
    let pairs = r["pairs"].as_array().unwrap();
    assert_eq!(pairs[0]["report"]["verdict"], "stable");
    assert_eq!(pairs[0]["report"]["anti"], true);
    assert_eq!(pairs[0]["report"]["robust"], true);
    assert_eq!(pairs[0]["weak_symmetry_conditions"]["anti_pass"], true);
    assert_eq!(pairs[1]["report"]["verdict"], "none");
}

#[test]
fn constant_family_sweep_is_flat() {
    let dir = ok("sweep", XXZ);
    let mut rdr = csv::Reader::from_path(out_file(&dir, "track.csv")).unwrap();
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let im: f64 = rec[2].parse().unwrap();
        assert!((im - 4.0).abs() < 1e-9);
    }
    let fit = json(&out_file(&dir, "fit.json"));
    assert!(fit["refused"].is_null());
    assert!(fit["fit"]["exponent"].is_null());
}

#[test]
fn short_sweep_exits_numerical() {
    let cfg = XXZ.replace("per_decade = 8", "per_decade = 3");
    let (o, _dir) = run("sweep", &cfg, &[]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn bad_configs_exit_with_schema_error() {
    for cfg in [
        XXZ.replace("schema_version = 1", "schema_version = 2"),
        XXZ.replace("delta = 1.0", "delta = 1.0\ncolour = 3"),
        XXZ.replace("op = \"sx\"\npairs", "op = \"bogus\"\npairs"),
        "schema_version = 1\n[model]\nbuilder = \"custom\"\nsites = [2]\nhamiltonian = [{ ops = [{ site = 4, op = \"sz\" }] }]\n".to_string(),
    ] {
        let (o, _dir) = run("sync-report", &cfg, &[]);
        assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (o, _dir) = run("evolve", XXZ, &["--threads", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let read = |dir: &TempDir| {
        ["evolve.csv", "bloch.csv", "evolve_meta.json"].map(|f| std::fs::read(out_file(dir, f)).unwrap())
    };
    let a = read(&ok("evolve", XXZ));
    let (o, dir) = run("evolve", XXZ, &["--threads", "2"]);
    assert!(o.status.success());
    assert_eq!(a, read(&dir));
    let (o, dir) = run("evolve", XXZ, &["--seed", "4"]);
    assert!(o.status.success());
    assert_ne!(a[0], read(&dir)[0]);
}

#[test]
fn config_parses_examples() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = liouville_sync_cli::config::Config::load(&path).unwrap();
        cfg.model.build(cfg.seed).unwrap();
    }
}
