use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn kpzlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kpzlab"))
        .current_dir(dir)
        .env_remove("KPZLAB_THREADS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr_code(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    v["error"]["code"].as_str().unwrap().to_string()
}

fn data_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn droplet_config(dir: &Path) {
    fs::write(dir.join("droplet.json"), r#"{"tau": 1, "samples": 10}"#).unwrap();
}

#[test]
fn missing_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = kpzlab(dir.path(), &["simulate", "png", "--config", "absent.json", "--out", "o"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_code(&out), "CONFIG_NOT_FOUND");
    assert!(!dir.path().join("o").exists());
}

#[test]
fn droplet_run_writes_one_row_per_sample() {
    let dir = tempfile::tempdir().unwrap();
    droplet_config(dir.path());
    let out = kpzlab(dir.path(), &["simulate", "png", "--config", "droplet.json", "--out", "o"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&dir.path().join("o/png_heights.csv"));
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.len() == 4 && r[3].parse::<i64>().unwrap() >= 0));
}

#[test]
fn same_config_and_seed_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    droplet_config(dir.path());
    for o in ["a", "b"] {
        let out = kpzlab(dir.path(), &["simulate", "png", "--config", "droplet.json", "--seed", "17", "--out", o]);
        assert!(out.status.success());
    }
    let a = fs::read(dir.path().join("a/png_heights.csv")).unwrap();
    let b = fs::read(dir.path().join("b/png_heights.csv")).unwrap();
    assert_eq!(a, b);
    let out = kpzlab(dir.path(), &["simulate", "png", "--config", "droplet.json", "--seed", "18", "--out", "c"]);
    assert!(out.status.success());
    let c = fs::read(dir.path().join("c/png_heights.csv")).unwrap();
    assert_ne!(a, c);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.json"), r#"{"n": 8, "samples": 40, "mode": "spectrum", "seed": 3}"#).unwrap();
    for (o, t) in [("a", "1"), ("b", "3")] {
        let out = kpzlab(dir.path(), &["simulate", "dyson", "--config", "g.json", "--threads", t, "--out", o]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(
        fs::read(dir.path().join("a/dyson_spectra.csv")).unwrap(),
        fs::read(dir.path().join("b/dyson_spectra.csv")).unwrap()
    );
    let out = kpzlab(dir.path(), &["simulate", "dyson", "--config", "g.json", "--threads", "0", "--out", "z"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn manifest_digests_match_files_and_nothing_leaks() {
    let dir = tempfile::tempdir().unwrap();
    droplet_config(dir.path());
    let out = kpzlab(dir.path(), &["simulate", "png", "--config", "droplet.json", "--out", "o"]);
    assert!(out.status.success());
    let m: Value = serde_json::from_slice(&fs::read(dir.path().join("o/manifest.json")).unwrap()).unwrap();
    let outputs = m["outputs"].as_array().unwrap();
    assert!(outputs.iter().any(|o| o["path"] == "png_heights.csv"));
    assert!(outputs.iter().any(|o| o["path"] == "run.json"));
    for o in outputs {
        let body = fs::read(dir.path().join("o").join(o["path"].as_str().unwrap())).unwrap();
        assert_eq!(o["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&body)));
    }
    let meta: Value = serde_json::from_slice(&fs::read(dir.path().join("o/run.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 0);
    assert_eq!(meta["config"]["tau"], 1.0);
    let mut top: Vec<String> =
        fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    top.sort();
    assert_eq!(top, ["droplet.json", "o"]);
    let mut inner: Vec<String> =
        fs::read_dir(dir.path().join("o")).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    inner.sort();
    assert_eq!(inner, ["manifest.json", "png_heights.csv", "run.json"]);
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.json"), r#"{"tau": 1, "samples": 10, "tua": 2}"#).unwrap();
    let out = kpzlab(dir.path(), &["simulate", "png", "--config", "bad.json", "--out", "o"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_code(&out), "CONFIG_PARSE");
}

#[test]
fn edge_series_needs_a_time_grid() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("e.json"), r#"{"n": 8, "samples": 4, "mode": "edge_series"}"#).unwrap();
    let out = kpzlab(dir.path(), &["simulate", "dyson", "--config", "e.json", "--out", "o"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_code(&out), "MISSING_PARAM:t_grid");

    fs::write(dir.path().join("e.json"), r#"{"n": 8, "samples": 4, "mode": "edge_series", "t_grid": [0, 0.5]}"#)
        .unwrap();
    let out = kpzlab(dir.path(), &["simulate", "dyson", "--config", "e.json", "--out", "o"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&dir.path().join("o/dyson_edge.csv"));
    assert_eq!(rows.len(), 8);
}

#[test]
fn airy_kernel_on_three_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = kpzlab(dir.path(), &["kernel", "airy", "--x", "-1:1:3", "--out", "k"]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("k/kernel.csv")).unwrap();
    assert!(text.starts_with("# kernel=airy"));
    let rows = data_rows(&dir.path().join("k/kernel.csv"));
    assert_eq!(rows.len(), 3);
    let v: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(v[0] > v[1] && v[1] > v[2] && v[2] > 0.0);
}

#[test]
fn hermite_without_n_names_the_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let out = kpzlab(dir.path(), &["kernel", "hermite", "--x", "0", "--out", "k"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_code(&out), "MISSING_PARAM:N");
}

#[test]
fn unknown_kernel_lists_the_options() {
    let dir = tempfile::tempdir().unwrap();
    let out = kpzlab(dir.path(), &["kernel", "bessel2", "--x", "0", "--out", "k"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_code(&out), "UNKNOWN_KERNEL");
    let err = String::from_utf8_lossy(&out.stderr);
    for k in ["airy", "airy_ext", "hermite", "hermite_ext", "dbessel", "dbessel_ext"] {
        assert!(err.contains(k));
    }
}

#[test]
fn dbessel_diagonal_is_a_density() {
    let dir = tempfile::tempdir().unwrap();
    let out = kpzlab(dir.path(), &["kernel", "dbessel", "--tau", "10", "--x", "-10:30:41", "--out", "k"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&dir.path().join("k/kernel.csv"));
    assert_eq!(rows.len(), 41);
    for r in rows {
        let v: f64 = r[4].parse().unwrap();
        assert!((0.0..=1.0).contains(&v), "{v}");
    }
}

#[test]
fn extended_kernels_accept_two_times() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["kernel", "airy_ext", "--x", "0,1", "--xp", "0", "--t", "0", "--tp", "0.5", "--out", "a"][..],
        &["kernel", "hermite_ext", "-N", "10", "--x", "0,1", "--t", "0", "--tp", "0.5", "--out", "h"][..],
        &["kernel", "dbessel_ext", "--tau", "10", "--x", "18,20", "--t", "0", "--tp", "1", "--out", "d"][..],
    ] {
        let out = kpzlab(dir.path(), args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(data_rows(&dir.path().join("a/kernel.csv")).len(), 2);
}

#[test]
fn tw_table_on_the_default_window() {
    let dir = tempfile::tempdir().unwrap();
    let out = kpzlab(dir.path(), &["tw", "--from", "-6", "--to", "2", "--step", "0.5", "--out", "t"]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("t/tw.csv")).unwrap();
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# order=") && first.contains("Lcut=") && first.contains("version="));
    let rows = data_rows(&dir.path().join("t/tw.csv"));
    assert_eq!(rows.len(), 17);
    let f2: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(f2.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn airy_stats_rows_follow_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = kpzlab(dir.path(), &["airy-stats", "--t", "0.1,1", "--out", "a"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&dir.path().join("a/airy_stats.csv"));
    assert_eq!(rows.len(), 2);
    let s: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(s[0] > 0.0 && s[0] < s[1]);
}

#[test]
fn compare_empty_input() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.csv"), "").unwrap();
    let out = kpzlab(dir.path(), &["compare", "empty.csv", "--out", "c"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_code(&out), "EMPTY_INPUT");
}

#[test]
fn compare_reports_pass_and_fail() {
    let dir = tempfile::tempdir().unwrap();
    let out = kpzlab(dir.path(), &["tw", "--from", "-6", "--to", "2", "--step", "0.5", "--out", "t"]);
    assert!(out.status.success());
    let out = kpzlab(dir.path(), &["compare", "t/tw.csv", "--out", "ok"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_slice(&fs::read(dir.path().join("ok/compare.json")).unwrap()).unwrap();
    assert_eq!(r["pass"], true);
    let c = &r["checks"][0];
    assert!(c["statistic"].is_string() && c["value"].is_number() && c["band"].is_number());

    // Ten heights at tau = 1 are nowhere near F2.
    droplet_config(dir.path());
    let out = kpzlab(dir.path(), &["simulate", "png", "--config", "droplet.json", "--out", "p"]);
    assert!(out.status.success());
    let out = kpzlab(dir.path(), &["compare", "p/png_heights.csv", "--out", "bad"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stderr_code(&out), "ACCEPTANCE_FAILED");
    let r: Value = serde_json::from_slice(&fs::read(dir.path().join("bad/compare.json")).unwrap()).unwrap();
    assert_eq!(r["pass"], false);
    assert_eq!(r["checks"][0]["pass"], false);
}

#[test]
fn usage_errors_exit_two_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = kpzlab(dir.path(), &["simulate", "lattice"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_code(&out), "USAGE");
    let out = kpzlab(dir.path(), &["--help"]);
    assert_eq!(out.status.code(), Some(0));
}
