use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::baselines::{self, LtrWeights};
use crate::corpus::ApiLibrary;
use crate::features::{FeatureExtractor, MethodProfile, NUM_FEATURES};
use crate::learner::{GbdtModel, LearnerError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Approach {
    Rapim,
    Ltr,
    Tmap,
    Ms,
}

impl Approach {
    pub const ALL: [Approach; 4] = [Approach::Rapim, Approach::Ltr, Approach::Tmap, Approach::Ms];

    pub fn as_str(self) -> &'static str {
        match self {
            Approach::Rapim => "rapim",
            Approach::Ltr => "ltr",
            Approach::Tmap => "tmap",
            Approach::Ms => "ms",
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Approach {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Approach::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| alloc::format!("unknown approach {s:?}"))
    }
}

/// Scores a (source, target) pair; higher means a better match.
pub trait PairScorer {
    fn approach(&self) -> Approach;
    fn extractor(&self) -> &FeatureExtractor;
    fn score(&self, source: &MethodProfile, target: &MethodProfile) -> f64;
}

/// Valid-class probability from a trained model.
#[derive(Debug, Clone)]
pub struct RapimScorer {
    extractor: FeatureExtractor,
    model: GbdtModel,
}

impl RapimScorer {
    pub fn new(extractor: FeatureExtractor, model: GbdtModel) -> Result<Self, EvalError> {
        model.validate()?;
        if model.input_arity != NUM_FEATURES {
            return Err(LearnerError::ArityMismatch { expected: NUM_FEATURES, got: model.input_arity }.into());
        }
        Ok(Self { extractor, model })
    }

    pub fn model(&self) -> &GbdtModel {
        &self.model
    }
}

impl PairScorer for RapimScorer {
    fn approach(&self) -> Approach {
        Approach::Rapim
    }

    fn extractor(&self) -> &FeatureExtractor {
        &self.extractor
    }

    fn score(&self, source: &MethodProfile, target: &MethodProfile) -> f64 {
        let phi = self.extractor.pair_features(source, target);
        self.model.predict_proba(&phi).expect("arity checked at construction")
    }
}

#[derive(Debug, Clone)]
pub struct LtrScorer {
    extractor: FeatureExtractor,
    weights: LtrWeights,
}

impl LtrScorer {
    pub fn new(extractor: FeatureExtractor, weights: LtrWeights) -> Self {
        Self { extractor, weights }
    }

    pub fn weights(&self) -> &LtrWeights {
        &self.weights
    }
}

impl PairScorer for LtrScorer {
    fn approach(&self) -> Approach {
        Approach::Ltr
    }

    fn extractor(&self) -> &FeatureExtractor {
        &self.extractor
    }

    fn score(&self, source: &MethodProfile, target: &MethodProfile) -> f64 {
        self.weights.score(&self.extractor.pair_features(source, target))
    }
}

#[derive(Debug, Clone, Default)]
pub struct TmapScorer {
    extractor: FeatureExtractor,
}

impl TmapScorer {
    pub fn new(extractor: FeatureExtractor) -> Self {
        Self { extractor }
    }
}

impl PairScorer for TmapScorer {
    fn approach(&self) -> Approach {
        Approach::Tmap
    }

    fn extractor(&self) -> &FeatureExtractor {
        &self.extractor
    }

    fn score(&self, source: &MethodProfile, target: &MethodProfile) -> f64 {
        baselines::tmap_score(&self.extractor, source, target)
    }
}

#[derive(Debug, Clone, Default)]
pub struct MsScorer {
    extractor: FeatureExtractor,
}

impl MsScorer {
    pub fn new(extractor: FeatureExtractor) -> Self {
        Self { extractor }
    }
}

impl PairScorer for MsScorer {
    fn approach(&self) -> Approach {
        Approach::Ms
    }

    fn extractor(&self) -> &FeatureExtractor {
        &self.extractor
    }

    fn score(&self, source: &MethodProfile, target: &MethodProfile) -> f64 {
        baselines::ms_score(source, target)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredTarget {
    pub target: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub source: String,
    pub target: String,
    pub score: f64,
}

/// One top-1 recommendation per source method, ordered as the sources were
/// given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationSet {
    pub approach: Approach,
    pub recommendations: Vec<Recommendation>,
}

impl RecommendationSet {
    pub fn get(&self, source: &str) -> Option<&Recommendation> {
        self.recommendations.iter().find(|r| r.source == source)
    }
}

/// Descending score, then ascending target id.
fn rank_order(a: &ScoredTarget, b: &ScoredTarget) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.target.cmp(&b.target))
}

/// Every target scored against `source`, best first.
pub fn rank_targets<S: PairScorer + ?Sized>(
    scorer: &S,
    source: &MethodProfile,
    targets: &[MethodProfile],
) -> Vec<ScoredTarget> {
    let mut ranked: Vec<ScoredTarget> =
        targets.iter().map(|t| ScoredTarget { target: t.id.clone(), score: scorer.score(source, t) }).collect();
    ranked.sort_by(rank_order);
    ranked
}

/// Best target for `source`.
pub fn best_target<S: PairScorer + ?Sized>(
    scorer: &S,
    source: &MethodProfile,
    targets: &[MethodProfile],
) -> Result<ScoredTarget, EvalError> {
    targets
        .iter()
        .map(|t| ScoredTarget { target: t.id.clone(), score: scorer.score(source, t) })
        .min_by(rank_order)
        .ok_or(EvalError::EmptyTargetLibrary)
}

pub fn recommend_profiles<S: PairScorer + ?Sized>(
    scorer: &S,
    sources: &[MethodProfile],
    targets: &[MethodProfile],
) -> Result<RecommendationSet, EvalError> {
    if targets.is_empty() {
        return Err(EvalError::EmptyTargetLibrary);
    }
    let recommendations = sources
        .iter()
        .map(|s| {
            let best = best_target(scorer, s, targets)?;
            Ok(Recommendation { source: s.id.clone(), target: best.target, score: best.score })
        })
        .collect::<Result<_, EvalError>>()?;
    Ok(RecommendationSet { approach: scorer.approach(), recommendations })
}

/// Top-1 mapping from every method of `source_lib` into `target_lib`.
pub fn recommend_top1<S: PairScorer + ?Sized>(
    scorer: &S,
    source_lib: &ApiLibrary,
    target_lib: &ApiLibrary,
) -> Result<RecommendationSet, EvalError> {
    if target_lib.is_empty() {
        return Err(EvalError::EmptyTargetLibrary);
    }
    let fx = scorer.extractor();
    let sources: Vec<MethodProfile> = source_lib.methods().iter().map(|m| fx.profile(m)).collect();
    let targets: Vec<MethodProfile> = target_lib.methods().iter().map(|m| fx.profile(m)).collect();
    recommend_profiles(scorer, &sources, &targets)
}
