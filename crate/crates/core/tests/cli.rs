use std::process::{Command, Output};

fn freeqm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freeqm"))
        .args(args)
        .env_remove("FREEQM_RANK")
        .env_remove("FREEQM_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim_end().to_string()
}

#[test]
fn words_and_decomp() {
    let o = freeqm(&["words", "sms-split", "aba"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "s=a m=b");
    assert_eq!(stdout(&freeqm(&["words", "count", "--w", "aba", "--mode", "big", "ababa"])), "2");
    assert_eq!(stdout(&freeqm(&["words", "reduce", "abB"])), "a");
    assert_eq!(stdout(&freeqm(&["decomp", "show", "--scheme", "rolli", "aabbb"])), r#"["aa","bbb"]"#);
    assert_eq!(stdout(&freeqm(&["qm", "eval", "--qm", "hom:a=1/2", "aab"])), "1/1");
}

#[test]
fn exit_codes() {
    assert_eq!(freeqm(&["decomp", "check-a", "--scheme", "brooks:w=ab", "--max-len", "6"]).status.code(), Some(0));
    assert_eq!(freeqm(&["decomp", "check-a", "--scheme", "sms:w=aba", "--max-len", "5"]).status.code(), Some(1));
    let o = freeqm(&["decomp", "show", "--scheme", "sms:w=abab", "ab"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    assert_eq!(freeqm(&["words", "reduce", "xyz"]).status.code(), Some(2));
    assert_eq!(freeqm(&["words", "frobnicate"]).status.code(), Some(2));
    assert_eq!(freeqm(&["--rank", "0", "words", "reduce", "a"]).status.code(), Some(2));
}

#[test]
fn verify_primitive_report() {
    let args = [
        "verify", "primitive", "--qm", "brooks:w=ab", "--omega", "qmcobound:w=ba", "--k", "2", "--budget", "6",
    ];
    let o = freeqm(&args);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["max_residual"], "0/1");
    assert_eq!(json["pass"], true);
    assert_eq!(json["runtime_ms"], serde_json::Value::Null);
    assert_eq!(o.stdout, freeqm(&args).stdout);

    let o = freeqm(&["verify", "primitive", "--qm", "zero", "--omega", "zero:k=2", "--k", "2", "--budget", "4"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn rolli_weight_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("weights.tsv");
    std::fs::write(&path, "# piece\tweight\naa\t1/2\nb\t-1\n").unwrap();
    let desc = format!("rolli:weights={}", path.display());
    let o = freeqm(&["qm", "eval", "--qm", &desc, "aab"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "-1/2");
}

#[test]
fn env_rank() {
    let o = Command::new(env!("CARGO_BIN_EXE_freeqm"))
        .args(["words", "reduce", "acC"])
        .env("FREEQM_RANK", "3")
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "a");
}
