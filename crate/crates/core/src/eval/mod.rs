//! Accuracy metrics, top-1 recommendation and the evaluation protocols.

mod metrics;
mod protocol;
mod recommend;

use alloc::string::String;

use thiserror::Error;

use crate::baselines::BaselineError;
use crate::features::FeatureError;
use crate::learner::LearnerError;

pub use metrics::{auc, confusion_accuracy, mann_whitney_u, roc_points, ConfusionMatrix, MannWhitney, RocPoint};
pub use protocol::{
    confusion_of, fold_models, fold_sizes, leave_one_rule_out, roc_curve, training_size_curve,
    training_size_significance, CurvePoint, EvalConfig, EvalDataset, EvaluationReport, FeatureSelection, FoldModels,
    LtrMode, RapimConfig, RuleData, RuleOutcome, SignificanceReport, TopOneCount, CURVE_FOLDS, MIN_SIGNIFICANCE_SEEDS,
};
pub use recommend::{
    best_target, rank_targets, recommend_profiles, recommend_top1, Approach, LtrScorer, MsScorer, PairScorer,
    RapimScorer, Recommendation, RecommendationSet, ScoredTarget, TmapScorer,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("target library has no methods")]
    EmptyTargetLibrary,
    #[error("leave-one-rule-out needs at least two rules, got {got}")]
    TooFewRules { got: usize },
    #[error("unknown rule {0:?}")]
    UnknownRule(String),
    #[error("need at least {needed} labeled pairs, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("need at least {needed} seeds, got {got}")]
    TooFewSeeds { needed: usize, got: usize },
    #[error("both labels must be present")]
    DegenerateLabels,
    #[error("sample is empty")]
    EmptySample,
    #[error("sample contains a non-finite value")]
    NonFiniteSample,
    #[error("vector is missing its label")]
    MissingLabel,
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
}
