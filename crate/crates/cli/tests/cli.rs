use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn raydiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_raydiv")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_dist(dir: &Path, name: &str, atoms: &[f64], weights: &[f64]) -> String {
    let path = dir.join(name);
    let body = serde_json::json!({ "atoms": atoms, "weights": weights });
    fs::write(&path, body.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

fn value_of(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(key).map(|rest| rest.trim().to_string()))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
}

#[test]
fn divergence_over_rays_both_directions() {
    let dir = TempDir::new().unwrap();
    let mu = write_dist(dir.path(), "mu.json", &[1.0, 2.0], &[0.2, 0.8]);
    let nu = write_dist(dir.path(), "nu.json", &[1.0, 2.0], &[0.5, 0.5]);
    let out = raydiv(&["divergence", "--gen", "tv", "--over-rays", "--direction", "both", "--mu", &mu, "--nu", &nu]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("# raydiv "));
    assert!(text.contains("gen=tv direction=both over_rays=true"));
    assert_eq!(value_of(&text, "tv forward"), "0");
    assert_eq!(value_of(&text, "tv reverse"), "0.3");
}

#[test]
fn divergence_json_and_identical_files() {
    let dir = TempDir::new().unwrap();
    let mu = write_dist(dir.path(), "mu.json", &[0.5, 1.5, 4.0], &[0.25, 0.25, 0.5]);
    let out = raydiv(&["divergence", "--gen", "kl,tv", "--direction", "symmetrized", "--mu", &mu, "--nu", &mu, "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["direction"], "symmetrized");
    let results = doc["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    assert!(results.iter().all(|r| r["value"] == 0.0));
}

#[test]
fn exit_codes_distinguish_failures() {
    let dir = TempDir::new().unwrap();
    let mu = write_dist(dir.path(), "mu.json", &[1.0, 2.0], &[0.5, 0.5]);
    let nu = write_dist(dir.path(), "nu.json", &[1.0], &[1.0]);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"atoms\": [1], \"weights\": [").unwrap();
    let bad = bad.to_str().unwrap();

    let code = |args: &[&str]| raydiv(args).status.code().unwrap();
    assert_eq!(code(&["divergence", "--mu", &mu, "--nu", &nu]), 5);
    assert_eq!(code(&["divergence", "--mu", bad, "--nu", &nu]), 3);
    assert_eq!(code(&["divergence", "--mu", "/nonexistent/mu.json", "--nu", &nu]), 3);
    assert_eq!(code(&["divergence", "--gen", "bogus", "--mu", &mu, "--nu", &mu]), 2);
    assert_eq!(code(&["divergence", "--direction", "sideways", "--mu", &mu, "--nu", &mu]), 2);
    assert_eq!(code(&["nonsense"]), 2);
}

#[test]
fn ks_reports_identity_residual() {
    let dir = TempDir::new().unwrap();
    let mu = write_dist(dir.path(), "mu.json", &[1.0, 2.0, 3.0], &[0.3, 0.3, 0.4]);
    let nu = write_dist(dir.path(), "nu.json", &[1.0, 2.0, 3.0], &[0.2, 0.5, 0.3]);
    let out = raydiv(&["ks", "--mu", &mu, "--nu", &nu]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(value_of(&text, "one_sided_forward"), "0.1");
    assert_eq!(value_of(&text, "two_sided"), "0.1");
    let residual: f64 = value_of(&text, "identity_residual_forward").parse().unwrap();
    assert!(residual < 1e-10);

    let same = raydiv(&["ks", "--mu", &mu, "--nu", &mu]);
    let text = stdout(&same);
    for key in ["one_sided_forward", "one_sided_reverse", "two_sided", "identity_residual_forward"] {
        assert_eq!(value_of(&text, key), "0");
    }
}

#[test]
fn ks_disjoint_supports() {
    let dir = TempDir::new().unwrap();
    let mu = write_dist(dir.path(), "mu.json", &[0.0], &[1.0]);
    let nu = write_dist(dir.path(), "nu.json", &[1.0, 2.0], &[0.5, 0.5]);
    let out = raydiv(&["ks", "--mu", &mu, "--nu", &nu, "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["two_sided"], 1.0);
    assert!(doc["identity_residual_forward"].is_null());
    let text = stdout(&raydiv(&["ks", "--mu", &mu, "--nu", &nu]));
    assert!(value_of(&text, "identity_residual_forward").starts_with("not applicable"));
}

#[test]
fn gc_is_reproducible_and_decreasing() {
    let dir = TempDir::new().unwrap();
    let paths: Vec<PathBuf> = (0..2).map(|k| dir.path().join(format!("gc{k}.csv"))).collect();
    for p in &paths {
        let out = raydiv(&[
            "gc", "--nu", "0.2,0.5,0.3", "--sizes", "100,1000,10000", "--trials", "20", "--gens", "tv,hellinger2",
            "--seed", "42", "--out", p.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (a, b) = (fs::read(&paths[0]).unwrap(), fs::read(&paths[1]).unwrap());
    assert_eq!(a, b);

    let csv = String::from_utf8(a).unwrap();
    assert!(csv.contains("seed=42") && csv.contains("rng=chacha8") && csv.contains("gens=tv,hellinger2"));
    assert!(csv.lines().next().unwrap().starts_with("# raydiv 0.1.0 gc"));
    let medians: Vec<f64> = csv
        .lines()
        .filter(|l| l.starts_with("tv,") && l.contains(",forward_median,"))
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(medians.len(), 3);
    assert!(medians.windows(2).all(|w| w[0] > w[1]), "{medians:?}");
}

#[test]
fn gc_single_atom_target_is_zero() {
    let out = raydiv(&["gc", "--nu", "1", "--sizes", "1", "--trials", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let values: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap())
        .collect();
    assert!(!values.is_empty());
    assert!(values.iter().all(|v| v.parse::<f64>().unwrap() == 0.0));
}

#[test]
fn gc_rejects_bad_configuration() {
    let out = raydiv(&["gc", "--nu", "0.5,0.5", "--sizes", "100,10", "--trials", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

fn grid_value(csv: &str, i: usize, j: usize) -> Option<f64> {
    let prefix = format!("{i},{j},");
    let line = csv.lines().find(|l| l.starts_with(&prefix)).unwrap();
    let v = line.rsplit(',').next().unwrap();
    (!v.is_empty()).then(|| v.parse().unwrap())
}

#[test]
fn levelcurves_writes_grids_and_svg() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("grids");
    let out = raydiv(&[
        "levelcurves", "--nu", "0.2,0.5,0.3", "--grid", "101", "--gens", "tv,hellinger2", "--out",
        out_dir.to_str().unwrap(), "--svg",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let read = |stem: &str| fs::read_to_string(out_dir.join(format!("{stem}.csv"))).unwrap();

    for g in ["tv", "hellinger2"] {
        for kind in ["plain", "rays"] {
            for o in ["forward", "reverse"] {
                let csv = read(&format!("{g}_{kind}_{o}"));
                assert_eq!(grid_value(&csv, 20, 50), Some(0.0));
                assert_eq!(grid_value(&csv, 0, 0), None);
                let svg = fs::read_to_string(out_dir.join(format!("{g}_{kind}_{o}.svg"))).unwrap();
                assert!(svg.starts_with("<svg") && svg.contains("levels=40"));
            }
        }
    }
    let forward = grid_value(&read("tv_rays_forward"), 10, 50).unwrap();
    let reverse = grid_value(&read("tv_rays_reverse"), 10, 50).unwrap();
    assert!(forward.abs() < 1e-12);
    assert!((reverse - 0.1).abs() < 1e-10);
}

#[test]
fn levelcurves_argument_errors() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    assert_eq!(raydiv(&["levelcurves", "--nu", "0.5,0.5", "--out", out_dir]).status.code(), Some(2));
    assert_eq!(raydiv(&["levelcurves", "--nu", "0.2,0.5,0.3", "--grid", "1", "--out", out_dir]).status.code(), Some(2));
}

#[test]
fn fuzz_passes_and_reports_violations() {
    let ok = raydiv(&["fuzz", "--pairs", "200", "--max-atoms", "20", "--seed", "7"]);
    assert!(ok.status.success());
    assert!(stdout(&ok).contains("pairs 200 checks") && stdout(&ok).contains("violations 0"));

    let empty = raydiv(&["fuzz", "--pairs", "0"]);
    assert!(empty.status.success());
    assert!(stdout(&empty).contains("pairs 0 checks 0 violations 0"));

    let broken = raydiv(&["fuzz", "--pairs", "5", "--seed", "7", "--slack", "-1"]);
    assert_eq!(broken.status.code(), Some(4));
    let text = stdout(&broken);
    let first = text.lines().find(|l| l.starts_with('{')).unwrap();
    let violation: serde_json::Value = serde_json::from_str(first).unwrap();
    assert!(violation["mu"]["atoms"].is_array() && violation["nu"]["weights"].is_array());
}
