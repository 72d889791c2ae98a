use std::path::Path;

use apimap::api_json::{load_api_json, save_api_json, to_json, JsonFileError};
use apimap::dataset::{load_mapping_dataset, read_rows, write_records};
use apimap::feature_csv::{load_features, read_features, save_features, FeatureFileError};
use apimap::model_io::{self, ModelFileError};
use apimap_core::corpus::{ApiLibrary, ApiMethod, DatasetError, Label, MappingDataset};
use apimap_core::features::{FeatureVector, PairKey, DEFAULT_TRAINED_FEATURES, NUM_FEATURES};
use apimap_core::learner::{GbdtHyperparams, GbdtModel};
use proptest::prelude::*;

fn fixture(rel: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

fn libraries() -> Vec<ApiLibrary> {
    ["easymock", "mockito", "json", "gson"]
        .iter()
        .map(|n| load_api_json(&fixture(&format!("api/{n}.json"))).unwrap())
        .collect()
}

fn text() -> impl Strategy<Value = String> {
    "[ -~]{0,30}"
}

fn method() -> impl Strategy<Value = ApiMethod> {
    (
        "[a-z]{1,6}(\\.[a-z]{1,6}){0,2}",
        "[A-Z][A-Za-z]{0,8}",
        "[a-z][A-Za-z]{0,8}",
        text(),
        "(String|int|T|void|JsonElement)",
        text(),
        prop::collection::vec(("(String|int|T|Object\\.\\.\\.)", "[a-z]{1,6}", text()), 0..4),
    )
        .prop_map(|(pkg, class, name, desc, ret, rdesc, params)| {
            let mut m = ApiMethod::new(&pkg, &class, &name).with_description(&desc).with_return(&ret, &rdesc);
            for (ty, n, d) in params {
                m = m.with_param(&ty, &n, &d);
            }
            m
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn api_json_round_trip(methods in prop::collection::vec(method(), 0..6)) {
        let mut seen = std::collections::BTreeSet::new();
        let methods: Vec<ApiMethod> = methods.into_iter().filter(|m| seen.insert(m.id())).collect();
        let lib = ApiLibrary::new("lib", "1.0", methods).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lib.json");
        save_api_json(&lib, &path).unwrap();
        let back = load_api_json(&path).unwrap();
        prop_assert_eq!(to_json(&back), to_json(&lib));
        prop_assert_eq!(back, lib);
    }

    #[test]
    fn feature_csv_round_trip(rows in prop::collection::vec((prop::array::uniform10(0.0..=1.0f64), any::<Option<bool>>()), 0..20)) {
        let vectors: Vec<FeatureVector> = rows
            .into_iter()
            .enumerate()
            .map(|(i, (phi, label))| FeatureVector {
                phi,
                label: label.map(Label::from_bool),
                pair: PairKey { rule_id: "a→b".into(), source_id: format!("p.A#s{i:02}(int,String)"), target_id: "q.B#t()".into() },
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        save_features(&path, &vectors).unwrap();
        prop_assert_eq!(load_features(&path).unwrap(), vectors);
    }
}

#[test]
fn missing_methods_field_is_reported_by_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"name": "x", "version": "1"}"#).unwrap();
    let err = load_api_json(&path).unwrap_err();
    assert!(matches!(err, JsonFileError::SchemaViolation { .. }), "{err}");
    assert_eq!(err.field_path(), Some("methods"));

    std::fs::write(&path, r#"{"name": "x", "version": "1", "methods": [{"package": "p", "class": 3}]}"#).unwrap();
    let err = load_api_json(&path).unwrap_err();
    assert_eq!(err.field_path(), Some("methods[0].class"));
}

#[test]
fn fixture_dataset_resolves() {
    let ds = load_mapping_dataset(&fixture("mapping.csv"), &libraries()).unwrap();
    assert_eq!(ds.len(), 7 * 8 + 6 * 8);
    assert_eq!(ds.rule_ids().collect::<Vec<_>>(), ["easymock→mockito", "json→gson"]);
    let valid = ds.records().filter(|r| r.record.label.is_valid()).count();
    assert_eq!(valid, 13);
}

fn dataset_error(csv: &str) -> DatasetError {
    let rows = read_rows(csv.as_bytes(), Path::new("m.csv")).unwrap();
    MappingDataset::resolve(rows, &libraries()).unwrap_err()
}

#[test]
fn dataset_rejects_bad_rows() {
    let head = "rule_id,source_method_id,target_method_id,label\n";
    let pair = "org.json.JSONObject#has(String),com.google.gson.JsonObject#has(String)";
    assert_eq!(
        dataset_error(&format!("{head}json→gson,{pair},valid\njson→gson,{pair},maybe\n")),
        DatasetError::MalformedRow { row: 3, reason: "unknown label \"maybe\"".into() }
    );
    assert_eq!(
        dataset_error(&format!("{head}json→gson,{pair},valid\njson→gson,{pair},invalid\n")),
        DatasetError::DuplicateRecord { row: 3 }
    );
    assert_eq!(
        dataset_error(&format!("{head}json→gson,org.json.JSONObject#nope(),com.google.gson.JsonObject#size(),valid\n")),
        DatasetError::UnresolvableMethodId { row: 2, id: "org.json.JSONObject#nope()".into() }
    );
    assert!(read_rows("a,b\n".as_bytes(), Path::new("m.csv")).is_err());
    assert!(read_rows(format!("{head}x,y,valid\n").as_bytes(), Path::new("m.csv")).is_err());
}

#[test]
fn dataset_fields_are_trimmed_and_written_back() {
    let csv = "rule_id,source_method_id,target_method_id,label\n json→gson , org.json.JSONObject#has(String) , com.google.gson.JsonObject#has(String) , valid \n";
    let rows = read_rows(csv.as_bytes(), Path::new("m.csv")).unwrap();
    let ds = MappingDataset::resolve(rows, &libraries()).unwrap();
    let rec = &ds.records().next().unwrap().record;
    assert_eq!(rec.source_method_id, "org.json.JSONObject#has(String)");
    assert_eq!(rec.label, Label::Valid);
    let mut out = Vec::new();
    write_records(&mut out, ds.records().map(|r| &r.record)).unwrap();
    assert_eq!(
        String::from_utf8(out).unwrap(),
        "rule_id,source_method_id,target_method_id,label\njson→gson,org.json.JSONObject#has(String),com.google.gson.JsonObject#has(String),valid\n"
    );
}

#[test]
fn feature_csv_errors() {
    assert!(read_features("".as_bytes(), Path::new("f.csv")).unwrap().is_empty());
    let header = "rule_id,source_id,target_id,phi1,phi2,phi3,phi4,phi5,phi6,phi7,phi8,phi9,phix,label\n";
    let row = |v: &str, label: &str| format!("r,s,t,{v},0,0,0,0,0,0,0,0,0,{label}\n");
    let err = read_features(format!("{header}{}", row("NaN", "valid")).as_bytes(), Path::new("f.csv")).unwrap_err();
    assert!(matches!(err, FeatureFileError::Malformed { line: 2, .. }), "{err}");
    let err = read_features(format!("{header}{}", row("x", "valid")).as_bytes(), Path::new("f.csv")).unwrap_err();
    assert!(matches!(err, FeatureFileError::Malformed { line: 2, .. }), "{err}");
    let err = read_features(format!("{header}{}", row("0.5", "sure")).as_bytes(), Path::new("f.csv")).unwrap_err();
    assert!(matches!(err, FeatureFileError::Malformed { .. }), "{err}");
    let err = read_features("a,b\n1,2\n".as_bytes(), Path::new("f.csv")).unwrap_err();
    assert!(matches!(err, FeatureFileError::Malformed { line: 1, .. }), "{err}");
    let ok = read_features(format!("{header}{}", row("0.5", "")).as_bytes(), Path::new("f.csv")).unwrap();
    assert_eq!(ok[0].label, None);
    assert_eq!(ok[0].phi[0], 0.5);
    assert_eq!(ok[0].phi.len(), NUM_FEATURES);
}

fn small_model() -> GbdtModel {
    let rows: Vec<Vec<f64>> =
        (0..40).map(|i| (0..NUM_FEATURES).map(|k| ((i * 7 + k * 3) % 11) as f64 / 10.0).collect()).collect();
    let labels: Vec<bool> = rows.iter().map(|r| r[0] + r[4] > 0.9).collect();
    let hp = GbdtHyperparams { min_leaf_instances: 3, num_trees: 20, seed: 42, ..Default::default() };
    GbdtModel::train(&rows, &labels, &DEFAULT_TRAINED_FEATURES, &hp).unwrap()
}

#[test]
fn model_round_trip_is_exact() {
    let model = small_model();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    model_io::save_model(&model, &path).unwrap();
    let back = model_io::load_model(&path).unwrap();
    assert_eq!(back, model);
    assert_eq!(model_io::to_bytes(&back), std::fs::read(&path).unwrap());
    let x = [0.3; NUM_FEATURES];
    assert_eq!(back.predict_proba(&x).unwrap().to_bits(), model.predict_proba(&x).unwrap().to_bits());
}

#[test]
fn model_version_is_checked() {
    let model = small_model();
    let text = String::from_utf8(model_io::to_bytes(&model)).unwrap();
    let newer = text.replacen("\"format_version\": 1", "\"format_version\": 2", 1);
    let err = model_io::from_bytes(newer.as_bytes(), Path::new("m.json")).unwrap_err();
    assert!(matches!(err, ModelFileError::VersionMismatch { found: Some(2), .. }), "{err}");
    let missing = text.replacen("\"format_version\": 1,", "", 1);
    let err = model_io::from_bytes(missing.as_bytes(), Path::new("m.json")).unwrap_err();
    assert!(matches!(err, ModelFileError::VersionMismatch { found: None, .. }), "{err}");
    let err = model_io::from_bytes(b"[1, 2", Path::new("m.json")).unwrap_err();
    assert!(matches!(err, ModelFileError::Json(_)), "{err}");
}

#[test]
fn model_with_broken_tree_is_rejected() {
    let model = small_model();
    let mut value: serde_json::Value = serde_json::from_slice(&model_io::to_bytes(&model)).unwrap();
    value["input_arity"] = serde_json::json!(3);
    let err = model_io::from_bytes(value.to_string().as_bytes(), Path::new("m.json")).unwrap_err();
    assert!(matches!(err, ModelFileError::Malformed { .. }), "{err}");
}
