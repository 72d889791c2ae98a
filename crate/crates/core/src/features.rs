//! Pairwise similarity features between a source and a target method.
//!
//! | index | feature | input | pipeline |
//! |-------|---------|-------|----------|
//! | 0 | φ1 | method description | light tokenization only |
//! | 1 | φ2 | return description | prose preprocessing |
//! | 2 | φ3 | parameter descriptions | prose preprocessing |
//! | 3 | φ4 | parameter signature | identifier extraction |
//! | 4 | φ5 | return type | exact match, 0 or 1 |
//! | 5 | φ6 | method name | identifier extraction |
//! | 6 | φ7 | parameter count | arity ratio |
//! | 7 | φ8 | package name | identifier extraction |
//! | 8 | φ9 | class name | identifier extraction |
//! | 9 | φx | class description | prose preprocessing |
//!
//! Textual features are TF-IDF cosine similarities. The classifier is fed
//! φ1–φ8 by default; φ9 and φx are kept for the TMAP baseline.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ApiMethod, Label};
use crate::math;
use crate::textops::{self, StopWords};
use crate::vsm::{text_similarity, VsmConfig};

pub const NUM_FEATURES: usize = 10;

pub const PHI1: usize = 0;
pub const PHI2: usize = 1;
pub const PHI3: usize = 2;
pub const PHI4: usize = 3;
pub const PHI5: usize = 4;
pub const PHI6: usize = 5;
pub const PHI7: usize = 6;
pub const PHI8: usize = 7;
pub const PHI9: usize = 8;
pub const PHIX: usize = 9;

/// Column names, in index order.
pub const FEATURE_NAMES: [&str; NUM_FEATURES] =
    ["phi1", "phi2", "phi3", "phi4", "phi5", "phi6", "phi7", "phi8", "phi9", "phix"];

/// Features fed to the classifier unless configured otherwise: φ1–φ8.
pub const DEFAULT_TRAINED_FEATURES: [usize; 8] = [PHI1, PHI2, PHI3, PHI4, PHI5, PHI6, PHI7, PHI8];

/// Features eligible for filter-based selection: φ1–φ9.
pub const SELECTABLE_FEATURES: [usize; 9] = [PHI1, PHI2, PHI3, PHI4, PHI5, PHI6, PHI7, PHI8, PHI9];

pub const DEFAULT_SELECTION_THRESHOLD: f64 = 0.05;

/// Minimum number of labeled vectors for filter selection.
pub const MIN_SELECTION_SAMPLES: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("need at least {needed} vectors, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("all labels belong to a single class")]
    DegenerateLabels,
    #[error("vector has {got} features, expected {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("vector is missing its label")]
    MissingLabel,
}

/// Identifies the pair a feature vector describes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct PairKey {
    pub rule_id: String,
    pub source_id: String,
    pub target_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub phi: [f64; NUM_FEATURES],
    pub label: Option<Label>,
    pub pair: PairKey,
}

impl FeatureVector {
    pub fn is_valid_label(&self) -> Option<bool> {
        self.label.map(Label::is_valid)
    }
}

/// Every derived document of one method, computed once and reused for all
/// of its pairings.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodProfile {
    pub id: String,
    pub method_name: String,
    pub return_type: String,
    pub param_signature: String,
    pub param_count: usize,
    pub description_light: String,
    pub description_tpp: String,
    pub return_description_tpp: String,
    pub param_description_tpp: String,
    pub class_description_tpp: String,
    pub param_signature_terms: String,
    pub name_terms: String,
    pub package_terms: String,
    pub class_terms: String,
}

/// Computes features with a fixed stop list and VSM configuration.
#[derive(Debug, Clone, Default)]
pub struct FeatureExtractor {
    pub stop_words: StopWords,
    pub vsm: VsmConfig,
}

impl FeatureExtractor {
    pub fn new(stop_words: StopWords, vsm: VsmConfig) -> Self {
        Self { stop_words, vsm }
    }

    fn tpp(&self, d: &str) -> String {
        textops::text_preprocess_with(d, &self.stop_words).into_string()
    }

    fn sim(&self, a: &str, b: &str) -> f64 {
        text_similarity(a, b, &self.vsm)
    }

    pub fn profile(&self, m: &ApiMethod) -> MethodProfile {
        let ips = m.input_parameters_signature();
        MethodProfile {
            id: m.id(),
            method_name: m.method_name.clone(),
            return_type: m.return_type_signature.trim().into(),
            param_count: m.input_parameter_count(),
            description_light: textops::light_tokenize(&m.method_description),
            description_tpp: self.tpp(&m.method_description),
            return_description_tpp: self.tpp(&m.return_type_description),
            param_description_tpp: self.tpp(&m.input_parameters_description()),
            class_description_tpp: self.tpp(&m.class_description),
            param_signature_terms: textops::identifier_terms(&ips),
            name_terms: textops::identifier_terms(&m.method_name),
            package_terms: textops::identifier_terms(&m.package_name),
            class_terms: textops::identifier_terms(&m.class_name),
            param_signature: ips,
        }
    }

    /// All ten features of a profiled pair.
    pub fn pair_features(&self, s: &MethodProfile, t: &MethodProfile) -> [f64; NUM_FEATURES] {
        let mut phi = [0.0; NUM_FEATURES];
        phi[PHI1] = self.sim(&s.description_light, &t.description_light);
        phi[PHI2] = self.sim(&s.return_description_tpp, &t.return_description_tpp);
        phi[PHI3] = self.sim(&s.param_description_tpp, &t.param_description_tpp);
        phi[PHI4] = self.sim(&s.param_signature_terms, &t.param_signature_terms);
        phi[PHI5] = return_signature_match(&s.return_type, &t.return_type);
        phi[PHI6] = self.sim(&s.name_terms, &t.name_terms);
        phi[PHI7] = param_count_ratio(s.param_count, t.param_count);
        phi[PHI8] = self.sim(&s.package_terms, &t.package_terms);
        phi[PHI9] = self.sim(&s.class_terms, &t.class_terms);
        phi[PHIX] = self.sim(&s.class_description_tpp, &t.class_description_tpp);
        phi
    }

    pub fn extract_feature_vector(
        &self,
        s: &ApiMethod,
        t: &ApiMethod,
        label: Option<Label>,
        rule_id: &str,
    ) -> FeatureVector {
        let sp = self.profile(s);
        let tp = self.profile(t);
        FeatureVector {
            phi: self.pair_features(&sp, &tp),
            label,
            pair: PairKey { rule_id: rule_id.into(), source_id: sp.id, target_id: tp.id },
        }
    }

    pub fn phi1_method_description(&self, s: &ApiMethod, t: &ApiMethod) -> f64 {
        self.sim(&textops::light_tokenize(&s.method_description), &textops::light_tokenize(&t.method_description))
    }

    pub fn phi2_return_description(&self, s: &ApiMethod, t: &ApiMethod) -> f64 {
        self.sim(&self.tpp(&s.return_type_description), &self.tpp(&t.return_type_description))
    }

    pub fn phi3_param_description(&self, s: &ApiMethod, t: &ApiMethod) -> f64 {
        self.sim(&self.tpp(&s.input_parameters_description()), &self.tpp(&t.input_parameters_description()))
    }

    pub fn phi4_param_signature(&self, s: &ApiMethod, t: &ApiMethod) -> f64 {
        self.identifier_sim(&s.input_parameters_signature(), &t.input_parameters_signature())
    }

    pub fn phi5_return_signature(&self, s: &ApiMethod, t: &ApiMethod) -> f64 {
        return_signature_match(&s.return_type_signature, &t.return_type_signature)
    }

    pub fn phi6_method_name(&self, s: &ApiMethod, t: &ApiMethod) -> f64 {
        self.identifier_sim(&s.method_name, &t.method_name)
    }

    pub fn phi7_param_count(&self, s: &ApiMethod, t: &ApiMethod) -> f64 {
        param_count_ratio(s.input_parameter_count(), t.input_parameter_count())
    }

    pub fn phi8_package_name(&self, s: &ApiMethod, t: &ApiMethod) -> f64 {
        self.identifier_sim(&s.package_name, &t.package_name)
    }

    pub fn phi9_class_name(&self, s: &ApiMethod, t: &ApiMethod) -> f64 {
        self.identifier_sim(&s.class_name, &t.class_name)
    }

    pub fn phi_x_class_description(&self, s: &ApiMethod, t: &ApiMethod) -> f64 {
        self.sim(&self.tpp(&s.class_description), &self.tpp(&t.class_description))
    }

    /// Similarity of two identifiers after extraction and lowercasing.
    pub fn identifier_sim(&self, a: &str, b: &str) -> f64 {
        self.sim(&textops::identifier_terms(a), &textops::identifier_terms(b))
    }
}

/// 1 when the trimmed return types are equal (case-sensitive), else 0.
pub fn return_signature_match(a: &str, b: &str) -> f64 {
    if a.trim() == b.trim() {
        1.0
    } else {
        0.0
    }
}

/// `1 − |a − b| / (a + b)`, and 1 when both counts are zero.
pub fn param_count_ratio(a: usize, b: usize) -> f64 {
    if a + b == 0 {
        return 1.0;
    }
    1.0 - a.abs_diff(b) as f64 / (a + b) as f64
}

/// Per-column z-score parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub mean: Vec<f64>,
    /// Population standard deviation.
    pub std: Vec<f64>,
    pub fitted_on: usize,
}

impl NormalizationParams {
    pub fn arity(&self) -> usize {
        self.mean.len()
    }

    /// Maps each value to `(x − mean) / std`; zero-variance columns map to 0.
    pub fn apply(&self, row: &[f64]) -> Result<Vec<f64>, FeatureError> {
        if row.len() != self.arity() {
            return Err(FeatureError::ArityMismatch { expected: self.arity(), got: row.len() });
        }
        Ok(row
            .iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(x, (m, s))| if *s > 0.0 { (x - m) / s } else { 0.0 })
            .collect())
    }
}

/// Fits z-score parameters on at least two rows of equal length.
pub fn zscore_fit<R: AsRef<[f64]>>(rows: &[R]) -> Result<NormalizationParams, FeatureError> {
    if rows.len() < 2 {
        return Err(FeatureError::InsufficientData { needed: 2, got: rows.len() });
    }
    let arity = rows[0].as_ref().len();
    let n = rows.len() as f64;
    let mut mean = alloc::vec![0.0; arity];
    for r in rows {
        let r = r.as_ref();
        if r.len() != arity {
            return Err(FeatureError::ArityMismatch { expected: arity, got: r.len() });
        }
        for (m, x) in mean.iter_mut().zip(r) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut var = alloc::vec![0.0; arity];
    for r in rows {
        for ((v, x), m) in var.iter_mut().zip(r.as_ref()).zip(&mean) {
            *v += (x - m) * (x - m);
        }
    }
    let std = var.into_iter().map(|v| math::sqrt(v / n)).collect();
    Ok(NormalizationParams { mean, std, fitted_on: rows.len() })
}

pub fn zscore_apply(params: &NormalizationParams, row: &[f64]) -> Result<Vec<f64>, FeatureError> {
    params.apply(row)
}

/// Relevance of each feature to the label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScores {
    pub scores: [f64; NUM_FEATURES],
    pub retained: [bool; NUM_FEATURES],
}

impl FeatureScores {
    /// Retained indices among `candidates`, in ascending order.
    pub fn retained_among(&self, candidates: &[usize]) -> Vec<usize> {
        candidates.iter().copied().filter(|&i| self.retained[i]).collect()
    }
}

/// Absolute Pearson correlation of `x` with `y`; 0 when either is constant.
pub fn abs_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.is_empty() || x.len() != y.len() || is_constant(x) || is_constant(y) {
        return 0.0;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return 0.0;
    }
    (sxy / math::sqrt(sxx * syy)).abs().min(1.0)
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|x| *x == v[0])
}

/// Scores every feature by |Pearson correlation| with the 0/1 label and
/// retains those at or above `threshold`.
pub fn filter_feature_selection(vectors: &[FeatureVector], threshold: f64) -> Result<FeatureScores, FeatureError> {
    let labels = vectors
        .iter()
        .map(|v| v.is_valid_label().ok_or(FeatureError::MissingLabel))
        .collect::<Result<Vec<bool>, _>>()?;
    let rows: Vec<&[f64]> = vectors.iter().map(|v| &v.phi[..]).collect();
    let scores = score_columns(&rows, &labels)?;
    let mut fixed = [0.0; NUM_FEATURES];
    let mut retained = [false; NUM_FEATURES];
    for (i, s) in scores.into_iter().enumerate().take(NUM_FEATURES) {
        fixed[i] = s;
        retained[i] = s >= threshold;
    }
    Ok(FeatureScores { scores: fixed, retained })
}

/// Column-wise |Pearson| against binary labels, for any row width.
pub fn score_columns<R: AsRef<[f64]>>(rows: &[R], labels: &[bool]) -> Result<Vec<f64>, FeatureError> {
    if rows.len() < MIN_SELECTION_SAMPLES {
        return Err(FeatureError::InsufficientData { needed: MIN_SELECTION_SAMPLES, got: rows.len() });
    }
    if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
        return Err(FeatureError::DegenerateLabels);
    }
    let arity = rows[0].as_ref().len();
    let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect();
    Ok((0..arity)
        .map(|j| {
            let col: Vec<f64> = rows.iter().map(|r| r.as_ref()[j]).collect();
            abs_pearson(&col, &y)
        })
        .collect())
}
