use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn scdec(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scdec"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .env_remove("SCDEC_OUT_DIR")
        .env_remove("SCDEC_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> (PathBuf, PathBuf) {
    let out = scdec(dir, args);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{args:?}: {}\n{stdout}", String::from_utf8_lossy(&out.stderr));
    let path = |key: &str| {
        stdout
            .lines()
            .find_map(|l| l.strip_prefix(key))
            .map(|p| PathBuf::from(p.trim()))
            .unwrap_or_else(|| panic!("no `{key}` line in {stdout}"))
    };
    (path("csv:"), path("manifest:"))
}

fn rows(csv: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(csv).unwrap();
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn header(csv: &Path) -> String {
    std::fs::read_to_string(csv).unwrap().lines().next().unwrap().to_string()
}

fn manifest(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// BEC threshold from the closed form `min_x x / (1 - (1 - x)^(dr-1))^(dl-1)`.
fn bec_oracle(dl: i32, dr: i32) -> f64 {
    (1..=1_000_000)
        .map(|k| k as f64 / 1e6)
        .map(|x| x / (1.0 - (1.0 - x).powi(dr - 1)).powi(dl - 1))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn uncoupled_thresholds() {
    let dir = TempDir::new().unwrap();
    let (csv, json) = ok(dir.path(), &["threshold", "--dl", "5", "--dr", "15", "--channel", "dec"]);
    assert_eq!(header(&csv), "dl,dr,L,w,channel,threshold");
    let t: f64 = rows(&csv)[0][5].parse().unwrap();
    assert!((t - 0.363471).abs() < 1e-5, "{t}");
    assert_eq!(manifest(&json)["summary"]["threshold"].as_f64().unwrap(), t);

    for (dl, dr) in [(3, 9), (3, 6)] {
        let (csv, _) = ok(dir.path(), &["threshold", "--dl", &dl.to_string(), "--dr", &dr.to_string(), "--channel", "bec"]);
        let t: f64 = rows(&csv)[0][5].parse().unwrap();
        assert!((t - bec_oracle(dl, dr)).abs() < 1e-5, "({dl},{dr}): {t}");
    }
}

#[test]
fn coupled_threshold() {
    let dir = TempDir::new().unwrap();
    let (csv, _) = ok(
        dir.path(),
        &["threshold", "--dl", "5", "--dr", "15", "--L", "300", "--w", "5", "--tol", "1e-5"],
    );
    let t: f64 = rows(&csv)[0][5].parse().unwrap();
    assert!((t - 0.49995).abs() < 5e-5, "{t}");
}

#[test]
fn custom_table_reproduces_dec() {
    let dir = TempDir::new().unwrap();
    let mut args: Vec<String> = ["threshold", "--dl", "5", "--dr", "15", "--channel", "custom"].map(String::from).to_vec();
    for k in 0..=100 {
        let eps = k as f64 / 100.0;
        let path = dir.path().join(format!("slice{k}.csv"));
        let mut text = String::from("x,f_value\n");
        for j in 0..=400 {
            let x = j as f64 / 400.0;
            let f = 4.0 * eps * eps / (2.0 - x * (1.0 - eps)).powi(2);
            text.push_str(&format!("{x},{f}\n"));
        }
        std::fs::write(&path, text).unwrap();
        args.push("--table".into());
        args.push(format!("{eps}={}", path.display()));
    }
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let (csv, _) = ok(dir.path(), &args);
    let t: f64 = rows(&csv)[0][5].parse().unwrap();
    assert!((t - 0.363471).abs() < 2e-3, "{t}");
}

#[test]
fn exit_curves() {
    let dir = TempDir::new().unwrap();
    let (csv, json) = ok(dir.path(), &["exit", "--dl", "5", "--dr", "15", "--points", "50"]);
    assert_eq!(header(&csv), "x,exit_value,epsilon");
    let uncoupled = rows(&csv);
    assert_eq!(uncoupled.len(), 50);
    let leftmost = manifest(&json)["summary"]["leftmost_epsilon"].as_f64().unwrap();
    assert!((0.3634..0.37).contains(&leftmost));

    // With w = 1 the sections decouple and the coupled curve at entropy
    // chi is the uncoupled curve at x = chi wherever the latter exists.
    // Below that range reverse DE finds mixtures instead: independent
    // sections sitting at zero or at the non-zero fixed point.
    let (csv, _) = ok(dir.path(), &["exit", "--dl", "5", "--dr", "15", "--L", "2", "--w", "1"]);
    assert_eq!(header(&csv), "chi,exit_value,epsilon");
    let coupled = rows(&csv);
    assert_eq!(coupled.len(), 49);
    assert!(uncoupled.iter().filter(|u| u[2] != "NaN").count() > 30);
    for (c, u) in coupled.iter().zip(&uncoupled) {
        let (chi, x): (f64, f64) = (c[0].parse().unwrap(), u[0].parse().unwrap());
        assert!((chi - x).abs() < 1e-12);
        let (ec, eu): (f64, f64) = (c[2].parse().unwrap(), u[2].parse().unwrap());
        if !eu.is_nan() {
            assert!((ec - eu).abs() < 1e-9, "chi {chi}: {ec} vs {eu}");
        }
    }
}

#[test]
fn constellation_and_replay() {
    let dir = TempDir::new().unwrap();
    let args = ["constellation", "--dl", "5", "--dr", "15", "--L", "33", "--w", "5", "--chi", "0.2"];
    let (csv, json) = ok(dir.path(), &args);
    assert_eq!(header(&csv), "section,x");
    assert_eq!(rows(&csv).len(), 67);
    let m = manifest(&json);
    assert!((m["summary"]["epsilon"].as_f64().unwrap() - 0.49995).abs() < 1e-4);
    assert!((m["summary"]["shape"]["plateau_value"].as_f64().unwrap() - 0.4434).abs() < 1e-3);
    assert_eq!(m["run"]["command"], "constellation");
    assert_eq!(m["tolerances"]["reverse_de"].as_f64().unwrap(), 1e-12);

    let first = std::fs::read(&csv).unwrap();
    std::fs::remove_file(&csv).unwrap();
    let (again, _) = ok(dir.path(), &["replay", json.to_str().unwrap()]);
    assert_eq!(again, csv);
    assert_eq!(std::fs::read(&again).unwrap(), first);

    let (alias, _) = ok(dir.path(), &["reverse-de", "--dl", "5", "--dr", "15", "--L", "33", "--w", "5", "--chi", "0.2"]);
    assert_eq!(alias, csv);
}

#[test]
fn forward_de_outputs() {
    let dir = TempDir::new().unwrap();
    let (csv, json) = ok(dir.path(), &["forward-de", "--dl", "5", "--dr", "15", "--epsilon", "0.3"]);
    assert_eq!(header(&csv), "iter,x");
    let xs: Vec<f64> = rows(&csv).iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(xs.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(manifest(&json)["summary"]["converged_to_zero"], true);

    let (csv, json) = ok(
        dir.path(),
        &["forward-de", "--dl", "3", "--dr", "9", "--L", "16", "--w", "3", "--epsilon", "0.499", "--schedule", "random", "--seed", "4"],
    );
    assert_eq!(rows(&csv).len(), 33);
    let m = manifest(&json);
    assert_eq!(m["summary"]["outcome"], "fixed-point");
    assert_eq!(m["seeds"], serde_json::json!([4]));
}

#[test]
fn simulation_outputs() {
    let dir = TempDir::new().unwrap();
    let (csv, json) = ok(
        dir.path(),
        &["simulate", "--dl", "3", "--dr", "6", "--L", "4", "--w", "2", "--M", "60", "--epsilons", "0.2,0.7", "--seeds", "1,2", "--dump-graph"],
    );
    assert_eq!(header(&csv), "epsilon,seed,residual_erasure_fraction,iterations");
    let r = rows(&csv);
    assert_eq!(r.len(), 4);
    let m = manifest(&json);
    assert_eq!(m["seeds"], serde_json::json!([1, 2]));
    let edges = csv.with_extension("edges");
    let dump = std::fs::read_to_string(edges).unwrap();
    assert!(dump.starts_with("# scdec tanner graph v1\n"));

    // Same arguments, same bytes.
    let first = std::fs::read(&csv).unwrap();
    let (again, _) = ok(
        dir.path(),
        &["simulate", "--dl", "3", "--dr", "6", "--L", "4", "--w", "2", "--M", "60", "--epsilons", "0.2,0.7", "--seeds", "1,2", "--dump-graph"],
    );
    assert_eq!(std::fs::read(again).unwrap(), first);
}

#[test]
fn bounds_output() {
    let dir = TempDir::new().unwrap();
    let (csv, _) = ok(dir.path(), &["bounds", "--dl", "5", "--dr", "15", "--L", "300", "--w", "5"]);
    let r = rows(&csv);
    let names: Vec<&str> = r.iter().map(|row| row[0].as_str()).collect();
    assert_eq!(names, ["design_rate", "shannon_threshold", "lemma2_bound", "lemma3_bound"]);
    let lemma2: f64 = r[2][1].parse().unwrap();
    assert!((lemma2 - 0.5434).abs() < 1e-4);
}

#[test]
fn invalid_arguments_exit_with_2() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["threshold", "--dl", "5", "--dr", "15", "--bogus"][..],
        &["threshold", "--dl", "5"],
        &["threshold", "--dl", "5", "--dr", "15", "--L", "3"],
        &["threshold", "--dl", "5", "--dr", "15", "--channel", "awgn"],
        &["frobnicate"],
    ] {
        let out = scdec(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn numerical_failures_exit_with_1() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["constellation", "--dl", "5", "--dr", "15", "--L", "33", "--w", "5", "--chi", "0.999"][..],
        &["threshold", "--dl", "9", "--dr", "3"],
        &["forward-de", "--dl", "5", "--dr", "15", "--epsilon", "1.5"],
        &["threshold", "--dl", "5", "--dr", "15", "--channel", "custom"],
    ] {
        let out = scdec(dir.path(), args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
    }
}

#[test]
fn help_documents_every_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_scdec")).args(["simulate", "--help"]).output().unwrap();
    let help = String::from_utf8_lossy(&out.stdout);
    for flag in ["--dl", "--dr", "--L", "--w", "--M", "--epsilons", "--seeds", "--max-iter", "--dump-graph", "--threads", "--out-dir"] {
        assert!(help.contains(flag), "{flag} missing from help:\n{help}");
    }
}
