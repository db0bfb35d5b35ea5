use std::path::Path;
use std::process::{Command, Output};

fn claimscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_claimscope"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("config.json");
    let text = format!(
        r#"{{
  "data": {{"synth": {{"n_providers": 60, "n_beneficiaries": 300, "n_claims": 1200, "fraud_provider_fraction": 0.2}}}},
  "autoencoder": {{"epochs": 5}},
  "forest": {{"n_trees": 10}}{extra}
}}"#
    );
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names
}

#[test]
fn run_writes_every_artifact_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let mut reports = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = claimscope(&[
            "run",
            "--config",
            &cfg,
            "--model",
            "autoencoder",
            "--seed",
            "5",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(
            listing(&out),
            [
                "eda.json",
                "join_report.json",
                "model.json",
                "report.json",
                "roc.csv",
                "sweep.csv"
            ]
        );
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap())
                .unwrap();
        assert_eq!(report["model"], "autoencoder");
        assert_eq!(report["split"]["seed"], 5);
        reports.push((
            std::fs::read(out.join("report.json")).unwrap(),
            std::fs::read(out.join("roc.csv")).unwrap(),
        ));
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn staged_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let o = claimscope(&["synth", "--seed", "3", "--out", data.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        listing(&data),
        [
            "beneficiary.csv",
            "inpatient.csv",
            "labels.csv",
            "outpatient.csv"
        ]
    );

    let files = format!(
        r#", "data": {{"files": {{"beneficiaries": "{0}/beneficiary.csv", "inpatient": "{0}/inpatient.csv", "outpatient": "{0}/outpatient.csv", "labels": "{0}/labels.csv"}}}}"#,
        data.display()
    );
    let cfg_path = dir.path().join("files.json");
    std::fs::write(
        &cfg_path,
        format!(r#"{{"forest": {{"n_trees": 10}}{files}}}"#),
    )
    .unwrap();
    let cfg = cfg_path.to_str().unwrap();
    let out = dir.path().join("out");
    let out_s = out.to_str().unwrap();
    for (cmd, expect) in [
        ("eda", vec!["eda.json", "join_report.json"]),
        ("train", vec!["eda.json", "join_report.json", "model.json"]),
        (
            "evaluate",
            vec![
                "eda.json",
                "join_report.json",
                "model.json",
                "report.json",
                "roc.csv",
            ],
        ),
        (
            "sweep",
            vec![
                "eda.json",
                "join_report.json",
                "model.json",
                "report.json",
                "roc.csv",
                "sweep.csv",
            ],
        ),
    ] {
        let o = claimscope(&[
            cmd,
            "--config",
            cfg,
            "--model",
            "forest",
            "--threshold",
            "0.4",
            "--out",
            out_s,
        ]);
        assert!(
            o.status.success(),
            "{cmd}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert_eq!(listing(&out), expect, "after {cmd}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["evaluation"]["threshold"], 0.4);
    let sweep = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(
        sweep.lines().next().unwrap(),
        "threshold,precision,recall,f1,accuracy"
    );
}

#[test]
fn missing_csv_exits_with_data_code() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent_beneficiary.csv");
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"data": {{"files": {{"beneficiaries": "{}", "inpatient": "i.csv", "outpatient": "o.csv", "labels": "l.csv"}}}}}}"#,
            missing.display()
        ),
    )
    .unwrap();
    let o = claimscope(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains(&missing.display().to_string()));
}

#[test]
fn config_problems_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = claimscope(&[
        "run",
        "--config",
        dir.path().join("nope.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = write_config(dir.path(), r#", "split": {"test_fraction": 1.5}"#);
    let o = claimscope(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let o = claimscope(&["run", "--model", "svm"]);
    assert_eq!(o.status.code(), Some(2));
    let o = claimscope(&[
        "run",
        "--config",
        &write_config(dir.path(), ""),
        "--percentile",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_with_code_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let text = std::fs::read_to_string(&cfg).unwrap().replace(
        r#""autoencoder": {"epochs": 5}"#,
        r#""autoencoder": {"epochs": 5, "learning_rate": 1e200, "dropout_rate": 0.0}"#,
    );
    std::fs::write(&cfg, text).unwrap();
    let o = claimscope(&[
        "run",
        "--config",
        &cfg,
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}
