use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn infops(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_infops"))
        .args(args)
        .env_remove("INFOPS_CONFIG")
        .output()
        .expect("spawn infops")
}

fn dataset() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic")
}

/// Copies the bundled dataset so a test can edit its config.
fn copy_dataset(dir: &Path) {
    for entry in fs::read_dir(dataset()).unwrap() {
        let entry = entry.unwrap();
        fs::copy(entry.path(), dir.join(entry.file_name())).unwrap();
    }
}

#[test]
fn ingest_check_prints_summary() {
    let out = tempfile::tempdir().unwrap();
    let cfg = dataset().join("config.toml");
    let o = infops(&[
        "ingest-check",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        out.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["records"], 5000);
    assert!(out.path().join("manifest.json").exists());
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    copy_dataset(dir.path());
    let cfg = dir.path().join("config.toml");
    let text = fs::read_to_string(&cfg)
        .unwrap()
        .replace("[causal]\n", "[causal]\ntau_mx = 4\n");
    fs::write(&cfg, text).unwrap();
    let o = infops(&[
        "causal",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tau_mx"));
}

#[test]
fn missing_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    copy_dataset(dir.path());
    fs::remove_file(dir.path().join("statuses.csv")).unwrap();
    let cfg = dir.path().join("config.toml");
    let o = infops(&[
        "build-nets",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("statuses.csv"));
}

#[test]
fn zero_threads_is_rejected() {
    let cfg = dataset().join("config.toml");
    let o = infops(&["stance", "--config", cfg.to_str().unwrap(), "--threads", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_from_environment() {
    let out = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_infops"))
        .args(["stance", "--out-dir", out.path().to_str().unwrap()])
        .env("INFOPS_CONFIG", dataset().join("config.toml"))
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.path().join("stance/user_stance.csv").exists());
}

#[test]
fn default_config_round_trips() {
    let o = infops(&["default-config"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let cfg = infops_core::pipeline::PipelineConfig::from_toml(&text).unwrap();
    assert_eq!(cfg.to_toml().unwrap(), text);
}

#[test]
fn synth_writes_a_loadable_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let o = infops(&[
        "synth",
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--seed",
        "3",
        "--tweets",
        "400",
        "--users",
        "120",
        "--days",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cfg = dir.path().join("config.toml");
    let o = infops(&[
        "ingest-check",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}
