use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn apimap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apimap")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = apimap(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(apimap(&[]).status.code(), Some(2));
    assert_eq!(apimap(&["train"]).status.code(), Some(2));
    assert_eq!(apimap(&["recommend", "--source", "a", "--target", "b", "--approach", "best"]).status.code(), Some(2));
    assert_eq!(apimap(&["--help"]).status.code(), Some(0));
}

#[test]
fn training_on_an_empty_file_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    let out = apimap(&["train", s(&empty), "-o", s(&dir.path().join("m.json"))]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("training set is empty"), "{err}");
    assert!(!dir.path().join("m.json").exists());
}

#[test]
fn missing_inputs_fail_with_exit_1() {
    let out = apimap(&["recommend", "--source", "nope.json", "--target", "nope.json", "--approach", "ms"]);
    assert_eq!(out.status.code(), Some(1));
    let lib = fixtures().join("api/easymock.json");
    let out = apimap(&["recommend", "--source", s(&lib), "--target", s(&lib)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--model"));
    let out = apimap(&[
        "parse-docs",
        s(&fixtures().join("javadoc/not-javadoc")),
        "--name",
        "x",
        "--version",
        "1",
        "-o",
        "x.json",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

/// parse-docs → features → train → recommend, in `dir`.
fn pipeline(dir: &Path) -> (Vec<u8>, String) {
    let mut libs = Vec::new();
    for (name, version) in [("easymock", "3.4"), ("mockito", "2.8.9"), ("json", "20160810"), ("gson", "2.8.0")] {
        let out = dir.join(format!("{name}.json"));
        ok(&[
            "parse-docs",
            s(&fixtures().join("javadoc").join(name)),
            "--name",
            name,
            "--version",
            version,
            "-o",
            s(&out),
        ]);
        libs.push(out);
    }
    let features = dir.join("features.csv");
    let mapping = fixtures().join("mapping.csv");
    let mut args = vec!["features", "--mapping", s(&mapping), "-o", s(&features)];
    for l in &libs {
        args.extend(["--library", s(l)]);
    }
    assert!(ok(&args).starts_with("104 feature vectors"));
    let model = dir.join("model.json");
    ok(&["train", s(&features), "-o", s(&model), "--min-leaf", "1", "--leaves", "4", "--trees", "50", "--seed", "3"]);
    let recs = ok(&["recommend", "--model", s(&model), "--source", s(&libs[0]), "--target", s(&libs[1])]);
    (std::fs::read(&model).unwrap(), recs)
}

#[test]
fn end_to_end_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (model_a, recs_a) = pipeline(a.path());
    let (model_b, recs_b) = pipeline(b.path());
    assert_eq!(model_a, model_b);
    assert_eq!(recs_a, recs_b);
    assert_eq!(recs_a.lines().count(), 7);
    assert!(
        recs_a
            .lines()
            .any(|l| l
                .starts_with("org.easymock.IMockBuilder#createMock(String,MockType) -> org.mockito.Mockito#mock(T) ")),
        "{recs_a}"
    );
}

#[test]
fn baselines_write_json_sets() {
    let dir = tempfile::tempdir().unwrap();
    let json = fixtures().join("api/json.json");
    let gson = fixtures().join("api/gson.json");
    for approach in ["ltr", "tmap", "ms"] {
        let out = dir.path().join(format!("{approach}.json"));
        ok(&["recommend", "--approach", approach, "--source", s(&json), "--target", s(&gson), "-o", s(&out)]);
        let set: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
        assert_eq!(set["approach"], approach);
        let recs = set["recommendations"].as_array().unwrap();
        assert_eq!(recs.len(), 6);
        let to_json = recs.iter().find(|r| r["source"] == "org.json.JSONAware#toJSONString()").unwrap();
        assert_eq!(to_json["target"], "com.google.gson.JsonElement#toString()", "{approach}");
    }
}

fn evaluate(out: &Path, extra: &[&str]) -> Output {
    let api = fixtures().join("api");
    let mapping = fixtures().join("mapping.csv");
    let libs: Vec<PathBuf> =
        ["easymock", "mockito", "json", "gson"].iter().map(|n| api.join(format!("{n}.json"))).collect();
    let mut args = vec![
        "evaluate",
        "--mapping",
        s(&mapping),
        "--out-dir",
        s(out),
        "--min-leaf",
        "2",
        "--leaves",
        "4",
        "--trees",
        "20",
    ];
    for l in &libs {
        args.extend(["--library", s(l)]);
    }
    args.extend(extra);
    apimap(&args)
}

#[test]
fn evaluate_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    // 13 of the 104 fixture pairs are valid; with seeds 29..=38 the first
    // fold always holds both classes
    let first = dir.path().join("a");
    let out = evaluate(&first, &["--seed", "29"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("easymock→mockito") && stdout.contains("Average Accuracy"), "{stdout}");
    for f in ["report.json", "table.txt", "roc.csv", "curve.csv", "significance.json"] {
        assert!(first.join(f).exists(), "{f}");
    }
    let curve = std::fs::read_to_string(first.join("curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 10);
    let second = dir.path().join("b");
    assert!(evaluate(&second, &["--seed", "29"]).status.success());
    for f in ["report.json", "curve.csv", "significance.json"] {
        assert_eq!(std::fs::read(first.join(f)).unwrap(), std::fs::read(second.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn leave_one_rule_out_alone() {
    let dir = tempfile::tempdir().unwrap();
    let out = evaluate(dir.path(), &["--protocol", "loro", "--ltr", "published"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["per_rule"].as_object().unwrap().len(), 2);
    assert!(report["curve"].as_array().unwrap().is_empty());
    assert!(!dir.path().join("significance.json").exists());
}

#[test]
fn single_class_training_fold_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = evaluate(dir.path(), &["--protocol", "curve", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("training-size curve") && err.contains("single class"), "{err}");
}

#[test]
fn tune_reports_the_best_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let features = dir.path().join("f.csv");
    let api = fixtures().join("api");
    let libs: Vec<String> =
        ["easymock", "mockito", "json", "gson"].iter().map(|n| s(&api.join(format!("{n}.json"))).to_owned()).collect();
    let mapping = fixtures().join("mapping.csv");
    let mut args = vec!["features", "--mapping", s(&mapping), "-o", s(&features)];
    for l in &libs {
        args.extend(["--library", l.as_str()]);
    }
    ok(&args);
    let out = dir.path().join("tune.json");
    let stdout = ok(&[
        "tune",
        s(&features),
        "-o",
        s(&out),
        "--leaves",
        "2,4",
        "--min-leaf",
        "1,5",
        "--rate",
        "0.1",
        "--trees",
        "10,20",
    ]);
    assert!(stdout.starts_with("best: "), "{stdout}");
    let result: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(result["table"].as_array().map(Vec::len), Some(8), "{result}");
}
