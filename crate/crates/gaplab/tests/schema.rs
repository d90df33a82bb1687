use std::collections::BTreeSet;
use std::path::Path;

use gaplab::report::{key_paths, to_json_string, unexplained_nulls, REASON_SUFFIX};
use gaplab::{run_pipeline, RunConfig};
use serde_json::Value;

fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

/// Keys listed in the first column of the README report table.
fn documented_keys() -> BTreeSet<String> {
    let readme = std::fs::read_to_string(manifest().join("../../README.md")).expect("README.md");
    readme
        .lines()
        .filter_map(|l| l.strip_prefix("| `"))
        .filter_map(|l| l.split_once('`'))
        .map(|(k, _)| k.to_string())
        .filter(|k| k.chars().all(|c| c.is_ascii_alphanumeric() || "_.[]".contains(c)))
        .collect()
}

fn report(name: &str, sets: &[&str]) -> Value {
    let sets: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
    let cfg = RunConfig::load(&manifest().join("configs").join(format!("{name}.toml")), &sets).unwrap();
    run_pipeline(&cfg).unwrap().report
}

fn sample_reports() -> Vec<(String, Value)> {
    let cases: [(&str, &[&str]); 7] = [
        ("box1d", &["grid.nodes=[401]"]),
        ("harmonic", &["grid.nodes=[401]"]),
        ("double_well_b5", &["grid.nodes=[401]"]),
        ("box2d", &["grid.nodes=[41, 41]"]),
        ("double_well_b1", &["grid.nodes=[401]", "run.mode=eigen-only"]),
        ("double_well_b1", &["grid.nodes=[401]", "run.mode=distances-only"]),
        ("box1d", &["grid.nodes=[401]", "analysis.alphas=[-5.0]"]),
    ];
    cases
        .iter()
        .map(|(name, sets)| (format!("{name} {sets:?}"), report(name, sets)))
        .collect()
}

#[test]
fn every_emitted_key_is_documented() {
    let documented = documented_keys();
    assert!(documented.len() > 200, "README table not found");
    for (label, r) in sample_reports() {
        let undocumented: Vec<String> = key_paths(&r)
            .into_iter()
            .filter(|k| {
                let base = k.strip_suffix(REASON_SUFFIX).unwrap_or(k);
                !documented.contains(k) && !documented.contains(base)
            })
            .collect();
        assert!(undocumented.is_empty(), "{label}: undocumented keys {undocumented:?}");
    }
}

#[test]
fn every_null_carries_a_reason() {
    for (label, r) in sample_reports() {
        assert_eq!(unexplained_nulls(&r), Vec::<String>::new(), "{label}");
    }
}

#[test]
fn mode_gating() {
    let eig = report("box1d", &["grid.nodes=[201]", "run.mode=eigen-only"]);
    let dist = report("box1d", &["grid.nodes=[201]", "run.mode=distances-only"]);
    let full = report("box1d", &["grid.nodes=[201]"]);
    let blocks = ["ground_state", "ratio", "distance", "bounds", "oscillation"];
    for b in blocks {
        assert!(eig[b].is_null(), "{b}");
        assert!(full[b].is_object(), "{b}");
        assert_eq!(dist[b].is_object(), b == "distance", "{b}");
    }
    for r in [&eig, &dist] {
        assert_eq!(r["spectral"], full["spectral"]);
        assert_eq!(r["potential"], full["potential"]);
    }
    assert_eq!(dist["distance"], full["distance"]);
}

#[test]
fn failed_blocks_become_reasoned_nulls() {
    let r = report("box1d", &["grid.nodes=[201]", "analysis.alphas=[-5.0]"]);
    assert!(r["distance"].is_null());
    assert!(r["distance_reason"].as_str().unwrap().contains("alpha"));
    assert!(r["spectral"].is_object());
}

#[test]
fn config_echo_reproduces_the_report() {
    let r = report("harmonic", &["grid.nodes=[301]"]);
    let again = run_pipeline(&RunConfig::from_echo(&r["config"]).unwrap()).unwrap().report;
    assert_eq!(to_json_string(&r), to_json_string(&again));
}
