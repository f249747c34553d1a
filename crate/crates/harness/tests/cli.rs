use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lieflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lieflow")).args(args).output().unwrap()
}

fn config(name: &str) -> String {
    let p: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    p.to_string_lossy().into_owned()
}

#[test]
fn list_json_is_parseable() {
    let out = lieflow(&["list", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().filter_map(|e| e["name"].as_str()).collect();
    for flow in ["zero", "rotation", "shear", "expansion", "nilpotent", "kelvin", "clebsch"] {
        assert!(names.contains(&flow), "{flow} missing from {names:?}");
    }
}

#[test]
fn list_flag_matches_subcommand() {
    assert_eq!(lieflow(&["--list"]).stdout, lieflow(&["list"]).stdout);
}

#[test]
fn catalog_configs_pass() {
    for name in ["zero.toml", "rotation.toml", "expansion.toml", "nilpotent.toml"] {
        let out = lieflow(&["check", "--config", &config(name)]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn nilpotent_helmholtz_fails() {
    let out = lieflow(&["check", "--config", &config("nilpotent-helmholtz.toml")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL helmholtz"));
}

#[test]
fn configuration_errors_exit_two() {
    assert_eq!(lieflow(&["check"]).status.code(), Some(2));
    assert_eq!(lieflow(&["check", "--config", "/nonexistent/run.toml"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[flow]\nname = \"vortex\"\n").unwrap();
    let out = lieflow(&["check", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vortex"));
}

#[test]
fn report_writes_requested_format_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = lieflow(&[
        "report",
        "--config",
        &config("rotation.toml"),
        "--out",
        dir.path().to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let files: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(files.iter().any(|f| f == "kelvin.csv"));
    assert!(files.iter().any(|f| f == "summary.json"));
    assert!(!files.iter().any(|f| f.ends_with(".json") && f != "summary.json"));
}
