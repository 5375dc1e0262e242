//! Golden-file tests: every subcommand must be byte-reproducible under a
//! fixed config and seed. Each case runs twice (independent determinism
//! check) and is compared against the committed golden output.
//!
//! Regenerate with `MOBQC_REGOLDEN=1 cargo test -p mobqc-cli --test golden`.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_mobqc")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn run(args: &[&str], workdir: &Path) -> String {
    let output = Command::new(bin())
        .args(args)
        .current_dir(workdir)
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "mobqc {args:?} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout).expect("utf-8 output")
}

fn check_golden(name: &str, produced: &str) {
    let path = golden_dir().join(name);
    if std::env::var_os("MOBQC_REGOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, produced).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("missing golden {name}: {e}"));
    assert!(
        produced == expected,
        "{name} differs from golden (len {} vs {})",
        produced.len(),
        expected.len()
    );
}

fn run_twice_and_check(name: &str, args: &[&str]) {
    let dir = tempfile::tempdir().unwrap();
    let first = run(args, dir.path());
    let second = run(args, dir.path());
    assert_eq!(first, second, "{name}: two runs differ");
    check_golden(name, &first);
}

#[test]
fn gates_golden() {
    run_twice_and_check(
        "gates.csv",
        &[
            "gates",
            "--resource",
            "star",
            "--calibrate-target",
            "0.731",
            "--seed",
            "3",
        ],
    );
}

#[test]
fn gate_specs_golden() {
    let dir = tempfile::tempdir().unwrap();
    let specs = dir.path().join("specs.json");
    let args = [
        "gates",
        "--resource",
        "star",
        "--seed",
        "3",
        "--specs-out",
        specs.to_str().unwrap(),
    ];
    run(&args, dir.path());
    let first = std::fs::read_to_string(&specs).unwrap();
    run(&args, dir.path());
    let second = std::fs::read_to_string(&specs).unwrap();
    assert_eq!(first, second);
    check_golden("specs.json", &first);
}

#[test]
fn verify_golden() {
    run_twice_and_check(
        "verify.csv",
        &[
            "verify",
            "--resource",
            "linear",
            "--test",
            "both",
            "--adversary",
            r#"{"thetas":[3.141592653589793,0,0]}"#,
            "--shots",
            "2000",
            "--seed",
            "11",
        ],
    );
}

#[test]
fn verify_exact_golden() {
    run_twice_and_check(
        "verify_exact.csv",
        &[
            "verify",
            "--resource",
            "star",
            "--test",
            "both",
            "--calibrate-target",
            "0.731",
            "--exact",
            "--seed",
            "0",
        ],
    );
}

#[test]
fn tomography_golden() {
    let run_into = |dir: &Path| {
        let out = dir.join("tomo");
        let args = [
            "tomography",
            "--resource",
            "star",
            "--shots",
            "200",
            "--seed",
            "5",
            "--out",
            out.to_str().unwrap(),
        ];
        run(&args, dir);
        out
    };
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let o1 = run_into(d1.path());
    let o2 = run_into(d2.path());
    for name in ["counts.csv", "dm_real.csv", "dm_imag.csv", "fidelity.json"] {
        let a = std::fs::read_to_string(o1.join(name)).unwrap();
        let b = std::fs::read_to_string(o2.join(name)).unwrap();
        assert_eq!(a, b, "{name}: two runs differ");
        check_golden(&format!("tomography/{name}"), &a);
    }
}

#[test]
fn tomography_counts_roundtrip() {
    // feeding the emitted counts back reproduces the same reconstruction
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a");
    run(
        &[
            "tomography",
            "--resource",
            "star",
            "--shots",
            "150",
            "--seed",
            "9",
            "--out",
            out1.to_str().unwrap(),
        ],
        dir.path(),
    );
    let counts = out1.join("counts.csv");
    let out2 = dir.path().join("b");
    run(
        &[
            "tomography",
            "--resource",
            "star",
            "--seed",
            "9",
            "--counts-in",
            counts.to_str().unwrap(),
            "--out",
            out2.to_str().unwrap(),
        ],
        dir.path(),
    );
    for name in ["dm_real.csv", "dm_imag.csv"] {
        let a = std::fs::read_to_string(out1.join(name)).unwrap();
        let b = std::fs::read_to_string(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs after counts round-trip");
    }
}

#[test]
fn session_golden() {
    run_twice_and_check(
        "session.json",
        &[
            "session",
            "--resource",
            "linear",
            "--program",
            "TestA",
            "--seed",
            "7",
        ],
    );
}

#[test]
fn batch_golden() {
    run_twice_and_check(
        "batch.json",
        &[
            "batch",
            "--resource",
            "star",
            "--mix",
            "0.45,0.45,0.1",
            "--sessions",
            "40",
            "--seed",
            "13",
            "--gate",
            "Z2X3",
        ],
    );
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"resource":"linear","seed":7,"program":"TestA"}"#,
    )
    .unwrap();
    let via_config = run(&["session", "--config", cfg.to_str().unwrap()], dir.path());
    let via_flags = run(
        &["session", "--resource", "linear", "--program", "TestA", "--seed", "7"],
        dir.path(),
    );
    assert_eq!(via_config, via_flags);
}

#[test]
fn unknown_config_keys_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"resource":"linear","surprise":1}"#).unwrap();
    let status = Command::new(bin())
        .args(["session", "--config", cfg.to_str().unwrap()])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // missing noise file -> config error
    let missing = Command::new(bin())
        .args(["gates", "--noise", "no-such-file.json"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
    // unreachable calibration target -> numerical failure
    let unreachable = Command::new(bin())
        .args(["gates", "--calibrate-target", "0.01"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(unreachable.status.code(), Some(3));
    // invalid mix -> config error
    let mix = Command::new(bin())
        .args(["batch", "--mix", "0.5,0.4,0.0"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(mix.status.code(), Some(2));
}
