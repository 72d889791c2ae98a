//! Reference scorers: a linear learning-to-rank model over φ1–φ8, TMAP's
//! five-similarity sum, and method-signature similarity built on LCS.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{FeatureExtractor, FeatureVector, MethodProfile, PHI9, PHIX};
use crate::textops;
use crate::vsm::text_similarity;

pub const LTR_FEATURES: usize = 8;

/// Averaged weights reported for the learning-to-rank comparison.
pub const PUBLISHED_LTR_WEIGHTS: [f64; LTR_FEATURES] = [0.41, 0.10, 0.17, 0.39, 0.49, -0.11, 0.37, -0.00058];

/// Ridge term keeping the normal equations solvable with constant columns.
const RIDGE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("training labels contain a single class")]
    DegenerateLabels,
    #[error("vector is missing its label")]
    MissingLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LtrWeights(pub [f64; LTR_FEATURES]);

impl LtrWeights {
    pub fn published() -> Self {
        Self(PUBLISHED_LTR_WEIGHTS)
    }

    pub fn zero() -> Self {
        Self([0.0; LTR_FEATURES])
    }

    /// `Σ w_i φ_i` over φ1–φ8.
    pub fn score(&self, phi: &[f64]) -> f64 {
        self.0.iter().zip(phi).map(|(w, x)| w * x).sum()
    }
}

pub fn ltr_score(w: &LtrWeights, v: &FeatureVector) -> f64 {
    w.score(&v.phi)
}

/// Least-squares fit of the 0/1 label on φ1–φ8 with an intercept, which is
/// then dropped since it does not affect ranking.
pub fn ltr_train(vectors: &[FeatureVector]) -> Result<LtrWeights, BaselineError> {
    let labels = vectors
        .iter()
        .map(|v| v.is_valid_label().ok_or(BaselineError::MissingLabel))
        .collect::<Result<Vec<bool>, _>>()?;
    let rows: Vec<&[f64]> = vectors.iter().map(|v| &v.phi[..LTR_FEATURES]).collect();
    least_squares_weights(&rows, &labels)
}

/// Least squares over arbitrary rows of at least eight columns.
pub fn least_squares_weights(rows: &[&[f64]], labels: &[bool]) -> Result<LtrWeights, BaselineError> {
    if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
        return Err(BaselineError::DegenerateLabels);
    }
    const K: usize = LTR_FEATURES + 1;
    let mut ata = [[0.0f64; K]; K];
    let mut aty = [0.0f64; K];
    for (row, &y) in rows.iter().zip(labels) {
        let mut x = [1.0f64; K];
        x[1..].copy_from_slice(&row[..LTR_FEATURES]);
        let y = if y { 1.0 } else { 0.0 };
        for i in 0..K {
            aty[i] += x[i] * y;
            for j in 0..K {
                ata[i][j] += x[i] * x[j];
            }
        }
    }
    for (i, row) in ata.iter_mut().enumerate().skip(1) {
        row[i] += RIDGE * rows.len() as f64;
    }
    let sol = solve(ata, aty);
    let mut w = [0.0; LTR_FEATURES];
    w.copy_from_slice(&sol[1..]);
    Ok(LtrWeights(w))
}

/// Gaussian elimination with partial pivoting; singular pivots yield 0.
fn solve<const K: usize>(mut a: [[f64; K]; K], mut b: [f64; K]) -> [f64; K] {
    for col in 0..K {
        let pivot = (col..K)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()).then(j.cmp(&i)))
            .expect("nonempty range");
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col];
        if p.abs() < 1e-300 {
            continue;
        }
        for row in col + 1..K {
            let f = a[row][col] / p;
            if f != 0.0 {
                for k in col..K {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = [0.0; K];
    for row in (0..K).rev() {
        let p = a[row][row];
        if p.abs() < 1e-300 {
            continue;
        }
        let s: f64 = (row + 1..K).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / p;
    }
    x
}

/// TMAP: preprocessed method-description similarity plus method name,
/// package, class name and class-description similarities. Range `[0, 5]`.
pub fn tmap_score(fx: &FeatureExtractor, s: &MethodProfile, t: &MethodProfile) -> f64 {
    let phi = fx.pair_features(s, t);
    tmap_from_parts(fx, s, t, &phi)
}

pub(crate) fn tmap_from_parts(fx: &FeatureExtractor, s: &MethodProfile, t: &MethodProfile, phi: &[f64]) -> f64 {
    let description = text_similarity(&s.description_tpp, &t.description_tpp, &fx.vsm);
    description + phi[crate::features::PHI6] + phi[crate::features::PHI8] + phi[PHI9] + phi[PHIX]
}

/// Length of the longest common subsequence of two char slices.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { cur[j].max(prev[j + 1]) };
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `|LCS| / max(|a|, |b|)` over lowercased characters; 1 when both are empty.
pub fn lcs_norm(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.to_lowercase().chars().collect();
    let b: Vec<char> = b.to_lowercase().chars().collect();
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    lcs_len(&a, &b) as f64 / longest as f64
}

fn type_tokens(t: &str) -> BTreeSet<String> {
    textops::identifier_terms(t).split(' ').filter(|s| !s.is_empty()).map(String::from).collect()
}

/// Jaccard overlap of lowercased camel-case tokens; 1 when both are empty.
pub fn token_level_sim(a: &str, b: &str) -> f64 {
    let ta = type_tokens(a);
    let tb = type_tokens(b);
    if ta.is_empty() && tb.is_empty() {
        return 1.0;
    }
    let inter = ta.intersection(&tb).count();
    let union = ta.union(&tb).count();
    inter as f64 / union as f64
}

/// `0.25·sm(return types) + 0.25·lcs(parameter signatures) + 0.5·lcs(names)`.
pub fn ms_score(s: &MethodProfile, t: &MethodProfile) -> f64 {
    0.25 * token_level_sim(&s.return_type, &t.return_type)
        + 0.25 * lcs_norm(&s.param_signature, &t.param_signature)
        + 0.5 * lcs_norm(&s.method_name, &t.method_name)
}
