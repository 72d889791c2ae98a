//! Two-document TF-IDF weighting and cosine similarity.
//!
//! The document collection is always exactly the pair being compared, so
//! `N = 2` and a term's document frequency is 1 or 2. With the plain
//! `log(N/df)` factor every shared term weighs zero and every unshared term
//! is absent from the other vector, which makes all cross-document
//! similarities zero. [`IdfMode::Smoothed`] (the default) uses
//! `1 + log(N/df)` instead; [`IdfMode::Literal`] keeps the plain factor.

use alloc::collections::BTreeMap;
use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::math;

const DOCUMENTS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdfMode {
    #[default]
    Smoothed,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VsmConfig {
    /// Base of the logarithm in the idf factor; must exceed 1.
    pub log_base: f64,
    pub idf: IdfMode,
}

impl Default for VsmConfig {
    fn default() -> Self {
        Self { log_base: core::f64::consts::E, idf: IdfMode::Smoothed }
    }
}

impl VsmConfig {
    pub fn literal() -> Self {
        Self { idf: IdfMode::Literal, ..Self::default() }
    }

    pub fn is_valid(&self) -> bool {
        self.log_base.is_finite() && self.log_base > 1.0
    }

    fn idf(&self, df: usize) -> f64 {
        let raw = math::ln(DOCUMENTS / df as f64) / math::ln(self.log_base);
        match self.idf {
            IdfMode::Smoothed => 1.0 + raw,
            IdfMode::Literal => raw,
        }
    }
}

/// Per-term weights of one document.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TermWeightVector {
    pub weights: BTreeMap<String, f64>,
    /// Number of terms (with repetition) in the document.
    pub term_count: usize,
}

impl TermWeightVector {
    pub fn norm(&self) -> f64 {
        math::sqrt(self.weights.values().map(|w| w * w).sum())
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

fn term_frequencies(doc: &str) -> (BTreeMap<&str, usize>, usize) {
    let mut tf = BTreeMap::new();
    let mut n = 0;
    for term in doc.split_whitespace() {
        *tf.entry(term).or_insert(0) += 1;
        n += 1;
    }
    (tf, n)
}

/// Weights `tf/t_n · idf` for each document of the pair.
pub fn build_weight_vectors(doc_s: &str, doc_t: &str, cfg: &VsmConfig) -> (TermWeightVector, TermWeightVector) {
    let (tf_s, n_s) = term_frequencies(doc_s);
    let (tf_t, n_t) = term_frequencies(doc_t);
    let weigh = |tf: &BTreeMap<&str, usize>, n: usize, other: &BTreeMap<&str, usize>| {
        let weights = tf
            .iter()
            .map(|(&term, &count)| {
                let df = if other.contains_key(term) { 2 } else { 1 };
                (String::from(term), count as f64 / n as f64 * cfg.idf(df))
            })
            .collect();
        TermWeightVector { weights, term_count: n }
    };
    (weigh(&tf_s, n_s, &tf_t), weigh(&tf_t, n_t, &tf_s))
}

/// `a·b / (‖a‖‖b‖)`, clamped to `[0, 1]`; zero when either norm is zero.
pub fn cosine_similarity(a: &TermWeightVector, b: &TermWeightVector) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    // merge over both sorted key sets so the summation order is symmetric
    let mut dot = 0.0;
    let mut ia = a.weights.iter().peekable();
    let mut ib = b.weights.iter().peekable();
    while let (Some((ka, wa)), Some((kb, wb))) = (ia.peek(), ib.peek()) {
        match ka.cmp(kb) {
            core::cmp::Ordering::Less => {
                ia.next();
            }
            core::cmp::Ordering::Greater => {
                ib.next();
            }
            core::cmp::Ordering::Equal => {
                dot += *wa * *wb;
                ia.next();
                ib.next();
            }
        }
    }
    let (lo, hi) = if na <= nb { (na, nb) } else { (nb, na) };
    (dot / (lo * hi)).clamp(0.0, 1.0)
}

/// Cosine similarity of the TF-IDF vectors of two token strings.
pub fn text_similarity(s: &str, t: &str, cfg: &VsmConfig) -> f64 {
    let (ws, wt) = build_weight_vectors(s, t, cfg);
    cosine_similarity(&ws, &wt)
}
