//! Two-class gradient-boosted decision trees.
//!
//! Logistic loss, one regression tree per round fitted to the residuals
//! `y − σ(F)`, leaves grown best-first by squared-error reduction, Newton
//! leaf values, and shrinkage by the learning rate. Inputs are z-scored with
//! statistics fitted on the training rows and stored in the model.

mod tree;
mod tune;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Label;
use crate::features::{zscore_fit, FeatureError, FeatureVector, NormalizationParams};
use crate::math;

pub use tree::{midpoint, RegressionTree, TreeNode, LEAF_CLAMP};
pub use tune::{grid_search_tune, stratified_split, HyperparamGrid, TuningPoint, TuningResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnerError {
    #[error("training set is empty")]
    EmptyDataset,
    #[error("training labels contain a single class")]
    DegenerateLabels,
    #[error("input has {got} features, model expects {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error("hyperparameter grid is empty")]
    EmptyGrid,
    #[error("malformed model: {0}")]
    MalformedModel(String),
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbdtHyperparams {
    pub max_leaves: usize,
    pub min_leaf_instances: usize,
    pub learning_rate: f64,
    pub num_trees: usize,
    /// Recorded with the model; training itself has no random component.
    pub seed: u64,
}

impl Default for GbdtHyperparams {
    fn default() -> Self {
        Self { max_leaves: 6, min_leaf_instances: 47, learning_rate: 0.14, num_trees: 233, seed: 0 }
    }
}

impl GbdtHyperparams {
    pub fn validate(&self) -> Result<(), LearnerError> {
        let bad = |m: &str| Err(LearnerError::InvalidHyperparams(m.into()));
        if self.max_leaves < 1 {
            return bad("max_leaves must be at least 1");
        }
        if self.min_leaf_instances < 1 {
            return bad("min_leaf_instances must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad("learning_rate must be in (0, 1]");
        }
        if self.num_trees < 1 {
            return bad("num_trees must be at least 1");
        }
        Ok(())
    }
}

/// A trained ensemble. Immutable; prediction depends only on stored state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtModel {
    pub hyperparams: GbdtHyperparams,
    /// Length of the raw input vectors the model accepts.
    pub input_arity: usize,
    /// Which raw inputs are used, in order.
    pub feature_indices: Vec<usize>,
    /// Z-score parameters over the selected inputs.
    pub normalization: NormalizationParams,
    pub base_score: f64,
    pub learning_rate: f64,
    pub trees: Vec<RegressionTree>,
}

/// Mean logistic loss of raw scores against 0/1 labels.
pub fn logistic_loss(scores: &[f64], labels: &[bool]) -> f64 {
    let total: f64 = scores.iter().zip(labels).map(|(&f, &y)| math::softplus(f) - if y { f } else { 0.0 }).sum();
    total / scores.len().max(1) as f64
}

pub fn sigmoid(x: f64) -> f64 {
    math::sigmoid(x)
}

impl GbdtModel {
    /// Trains on raw rows; `features` picks the columns used.
    pub fn train<R: AsRef<[f64]>>(
        rows: &[R],
        labels: &[bool],
        features: &[usize],
        hp: &GbdtHyperparams,
    ) -> Result<Self, LearnerError> {
        hp.validate()?;
        if rows.is_empty() {
            return Err(LearnerError::EmptyDataset);
        }
        if rows.len() != labels.len() {
            return Err(LearnerError::MalformedModel(format!("{} rows but {} labels", rows.len(), labels.len())));
        }
        let input_arity = rows[0].as_ref().len();
        for r in rows {
            if r.as_ref().len() != input_arity {
                return Err(LearnerError::ArityMismatch { expected: input_arity, got: r.as_ref().len() });
            }
        }
        if let Some(&bad) = features.iter().find(|&&f| f >= input_arity) {
            return Err(LearnerError::ArityMismatch { expected: input_arity, got: bad + 1 });
        }
        if features.is_empty() {
            return Err(LearnerError::InvalidHyperparams("no features selected".into()));
        }
        let positives = labels.iter().filter(|&&y| y).count();
        if positives == 0 || positives == labels.len() {
            return Err(LearnerError::DegenerateLabels);
        }

        let selected: Vec<Vec<f64>> = rows.iter().map(|r| features.iter().map(|&f| r.as_ref()[f]).collect()).collect();
        // both classes present, so there are at least two rows
        let normalization = zscore_fit(&selected)?;
        let normalized: Vec<Vec<f64>> = selected.iter().map(|r| normalization.apply(r)).collect::<Result<_, _>>()?;

        let p = positives as f64 / labels.len() as f64;
        let base_score = math::ln(p / (1.0 - p));
        let data = tree::ColumnData::new(&normalized);
        let mut scores = alloc::vec![base_score; rows.len()];
        let mut residuals = alloc::vec![0.0; rows.len()];
        let mut hessians = alloc::vec![0.0; rows.len()];
        let mut trees = Vec::with_capacity(hp.num_trees);
        for _ in 0..hp.num_trees {
            for i in 0..rows.len() {
                let prob = math::sigmoid(scores[i]);
                residuals[i] = if labels[i] { 1.0 } else { 0.0 } - prob;
                hessians[i] = prob * (1.0 - prob);
            }
            let t = tree::grow_tree(&data, &residuals, &hessians, hp.max_leaves, hp.min_leaf_instances);
            for (s, x) in scores.iter_mut().zip(&normalized) {
                *s += hp.learning_rate * t.predict(x);
            }
            trees.push(t);
        }

        Ok(Self {
            hyperparams: *hp,
            input_arity,
            feature_indices: features.to_vec(),
            normalization,
            base_score,
            learning_rate: hp.learning_rate,
            trees,
        })
    }

    /// Trains on labeled feature vectors.
    pub fn train_vectors(
        vectors: &[FeatureVector],
        features: &[usize],
        hp: &GbdtHyperparams,
    ) -> Result<Self, LearnerError> {
        let labels = vectors
            .iter()
            .map(|v| v.is_valid_label().ok_or(FeatureError::MissingLabel))
            .collect::<Result<Vec<bool>, _>>()?;
        let rows: Vec<&[f64]> = vectors.iter().map(|v| &v.phi[..]).collect();
        Self::train(&rows, &labels, features, hp)
    }

    /// Selects and z-scores a raw input.
    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>, LearnerError> {
        if x.len() != self.input_arity {
            return Err(LearnerError::ArityMismatch { expected: self.input_arity, got: x.len() });
        }
        let selected: Vec<f64> = self.feature_indices.iter().map(|&f| x[f]).collect();
        Ok(self.normalization.apply(&selected)?)
    }

    /// Raw additive score using the first `n_trees` trees.
    pub fn raw_score_truncated(&self, x: &[f64], n_trees: usize) -> Result<f64, LearnerError> {
        let z = self.transform(x)?;
        Ok(self.base_score + self.trees.iter().take(n_trees).map(|t| self.learning_rate * t.predict(&z)).sum::<f64>())
    }

    pub fn raw_score(&self, x: &[f64]) -> Result<f64, LearnerError> {
        self.raw_score_truncated(x, self.trees.len())
    }

    /// Probability of the valid class, always strictly inside (0, 1).
    pub fn predict_proba(&self, x: &[f64]) -> Result<f64, LearnerError> {
        self.raw_score(x).map(probability)
    }

    pub fn predict_proba_truncated(&self, x: &[f64], n_trees: usize) -> Result<f64, LearnerError> {
        self.raw_score_truncated(x, n_trees).map(probability)
    }

    /// Valid iff the probability is at least `threshold`.
    pub fn classify(&self, x: &[f64], threshold: f64) -> Result<Label, LearnerError> {
        self.predict_proba(x).map(|p| classify_probability(p, threshold))
    }

    /// Structural checks for models that did not come out of [`Self::train`].
    pub fn validate(&self) -> Result<(), LearnerError> {
        let bad = |m: String| Err(LearnerError::MalformedModel(m));
        if self.feature_indices.is_empty() {
            return bad("no features".into());
        }
        if self.feature_indices.iter().any(|&f| f >= self.input_arity) {
            return bad("feature index out of range".into());
        }
        let k = self.feature_indices.len();
        if self.normalization.mean.len() != k || self.normalization.std.len() != k {
            return bad("normalization arity does not match features".into());
        }
        if !self.base_score.is_finite() || !self.learning_rate.is_finite() {
            return bad("non-finite score parameters".into());
        }
        for (i, t) in self.trees.iter().enumerate() {
            if !t.is_well_formed(k) {
                return bad(format!("tree {i} is malformed"));
            }
        }
        Ok(())
    }
}

/// σ(score) kept off the endpoints, which σ reaches in f64 for |score| > 37.
fn probability(score: f64) -> f64 {
    math::sigmoid(score).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

pub fn classify_probability(p: f64, threshold: f64) -> Label {
    Label::from_bool(p >= threshold)
}
