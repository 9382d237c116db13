use std::path::Path;
use std::process::{Command, Output};

const TINY: &str = r#"{
  "corpus": { "synthetic_lines": 400, "n_train": 300, "n_test": 40 },
  "codec": { "training": { "epochs": 1 } },
  "constellation": { "epochs": 1, "eval_size": 32, "train_sentences": 200 },
  "sweep": { "snr_db": [4.0, 12.0], "sentences": 6 },
  "modexp": { "snr_db": [6.0], "sentences": 6 }
}"#;

fn semlink(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semlink"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn run_all(dir: &Path, out: &str) {
    for cmd in [
        &["prepare"][..],
        &["train", "--target", "codec"],
        &["train", "--target", "constellation"],
        &["sweep", "--workers", "2"],
        &["modexp"],
    ] {
        let mut args = cmd.to_vec();
        args.extend(["--config", "tiny.json", "--out", out]);
        let o = semlink(dir, &args);
        assert_eq!(code(&o), 0, "{cmd:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn usage_and_config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&semlink(dir.path(), &["frobnicate"])), 1);
    assert_eq!(code(&semlink(dir.path(), &[])), 1);
    assert_eq!(code(&semlink(dir.path(), &["sweep", "--seed", "x"])), 1);
    assert_eq!(code(&semlink(dir.path(), &["--help"])), 0);
    assert_eq!(code(&semlink(dir.path(), &["sweep", "--config", "missing.json"])), 1);
    std::fs::write(dir.path().join("bad.json"), r#"{"sweep": {"schemes": ["arq"]}}"#).unwrap();
    assert_eq!(code(&semlink(dir.path(), &["sweep", "--config", "bad.json"])), 1);
    std::fs::write(dir.path().join("typo.json"), r#"{"seeed": 3}"#).unwrap();
    assert_eq!(code(&semlink(dir.path(), &["prepare", "--config", "typo.json"])), 1);
    assert_eq!(code(&semlink(dir.path(), &["sweep", "--workers", "0"])), 1);
}

#[test]
fn missing_artifacts_are_runtime_failures() {
    let dir = tempfile::tempdir().unwrap();
    let o = semlink(dir.path(), &["sweep", "--out", "empty"]);
    assert_eq!(code(&o), 2);
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
}

#[test]
fn gradcheck_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = semlink(dir.path(), &["gradcheck", "--out", "g"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn pipeline_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("tiny.json"), TINY).unwrap();
    run_all(dir.path(), "a");
    run_all(dir.path(), "b");
    let files = [
        "train.txt",
        "test.txt",
        "vocab.tsv",
        "huffman.tsv",
        "codec.json",
        "codec_loss.csv",
        "codec320.json",
        "constellation.json",
        "constellation_loss.csv",
        "sweep.csv",
        "modexp.csv",
    ];
    for f in files {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert!(a == b, "{f} differs between reruns");
    }
    let sweep = std::fs::read_to_string(dir.path().join("a/sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 1 + 3 * 2);
    let modexp = std::fs::read_to_string(dir.path().join("a/modexp.csv")).unwrap();
    assert!(modexp.lines().count() > 1);
}
