//! Evaluation and recommendation reports.

use std::fmt::Write as _;
use std::path::Path;

use apimap_core::eval::{Approach, CurvePoint, EvaluationReport, RecommendationSet, RocPoint};

use crate::api_json::{write_pretty, JsonFileError};

fn percent(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| format!("{:.2}%", v * 100.0))
}

/// Per-rule table: RAPIM pair-classification accuracy followed by top-1
/// accuracy of the three baselines, then the average row.
pub fn text_table(report: &EvaluationReport) -> String {
    let baselines = [Approach::Ltr, Approach::Tmap, Approach::Ms];
    let width = report.per_rule.keys().map(|k| k.chars().count()).max().unwrap_or(0).max("Average Accuracy".len());
    let mut out = String::new();
    let _ = write!(out, "{:<width$}  {:>8}", "Migration rule", "RAPIM");
    for b in baselines {
        let _ = write!(out, "  {:>8}", b.as_str().to_uppercase());
    }
    out.push('\n');
    for (rule, outcome) in &report.per_rule {
        let _ = write!(out, "{rule:<width$}  {:>8}", percent(Some(outcome.rapim_accuracy)));
        for b in baselines {
            let _ = write!(out, "  {:>8}", percent(outcome.top1.get(&b).and_then(|c| c.accuracy())));
        }
        out.push('\n');
    }
    let _ = write!(out, "{:<width$}  {:>8}", "Average Accuracy", percent(Some(report.average_accuracy)));
    for b in baselines {
        let _ = write!(out, "  {:>8}", percent(report.top1_average.get(&b).copied()));
    }
    out.push('\n');
    let _ = writeln!(out, "{:<width$}  {:>8}", "Error", percent(Some(report.error)));
    out
}

pub fn roc_csv(points: &[RocPoint]) -> String {
    let mut out = String::from("fpr,tpr\n");
    for p in points {
        let _ = writeln!(out, "{},{}", p.fpr, p.tpr);
    }
    out
}

pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("folds_used,accuracy\n");
    for p in points {
        let _ = writeln!(out, "{},{}", p.folds_used, p.accuracy);
    }
    out
}

pub fn recommendations_text(set: &RecommendationSet) -> String {
    let mut out = String::new();
    for r in &set.recommendations {
        let _ = writeln!(out, "{} -> {} ({:.4})", r.source, r.target, r.score);
    }
    out
}

fn write_text(file: &Path, text: &str) -> Result<(), JsonFileError> {
    std::fs::write(file, text).map_err(|source| JsonFileError::Io { file: file.to_path_buf(), source })
}

/// Writes `report.json`, `table.txt`, `roc.csv` and `curve.csv` into `dir`.
pub fn write_evaluation(report: &EvaluationReport, dir: &Path) -> Result<(), JsonFileError> {
    std::fs::create_dir_all(dir).map_err(|source| JsonFileError::Io { file: dir.to_path_buf(), source })?;
    write_pretty(report, &dir.join("report.json"))?;
    write_text(&dir.join("table.txt"), &text_table(report))?;
    write_text(&dir.join("roc.csv"), &roc_csv(&report.roc))?;
    write_text(&dir.join("curve.csv"), &curve_csv(&report.curve))
}

pub fn write_recommendations(set: &RecommendationSet, file: &Path) -> Result<(), JsonFileError> {
    write_pretty(set, file)
}
