//! Compiles a C program against the generated header and links it with the
//! static library.

use std::path::{Path, PathBuf};
use std::process::Command;

fn crate_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

/// `target/<profile>` of the running test binary.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_is_valid_c_and_cpp() {
    let header = crate_dir().join("include/infops.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "infops_ks_two_sample",
        "infops_stl",
        "infops_causal_effects",
        "infops_threshold_links",
        "infops_run_pipeline",
        "infops_last_error_message",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    for (lang, std) in [("c", "-std=c11"), ("c++", "-std=c++17")] {
        let o = Command::new("cc")
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, std])
            .arg(&header)
            .output()
            .expect("a C compiler on PATH");
        assert!(o.status.success(), "{lang}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn c_program_links_and_runs() {
    // Tests do not produce the staticlib, so build it in the same profile.
    let profile = profile_dir();
    let mut build = Command::new(env!("CARGO"));
    build.args(["build", "-p", "infops-ffi", "--lib"]);
    if profile.file_name().is_some_and(|p| p == "release") {
        build.arg("--release");
    }
    let status = build.status().unwrap();
    assert!(status.success());

    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("smoke");
    let o = Command::new("cc")
        .arg("-std=c11")
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg(profile.join("libinfops_ffi.a"))
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
