use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::metrics::{auc, roc_points, ConfusionMatrix, MannWhitney, RocPoint};
use super::recommend::{best_target, Approach, LtrScorer, MsScorer, PairScorer, RapimScorer, TmapScorer};
use super::{mann_whitney_u, EvalError};
use crate::baselines::{self, LtrWeights};
use crate::corpus::MappingDataset;
use crate::features::{
    filter_feature_selection, FeatureExtractor, FeatureVector, MethodProfile, PairKey, DEFAULT_SELECTION_THRESHOLD,
    DEFAULT_TRAINED_FEATURES, SELECTABLE_FEATURES,
};
use crate::learner::{GbdtHyperparams, GbdtModel};

/// Labeled pairs of one migration rule plus the profiles of every method
/// they mention.
#[derive(Debug, Clone)]
pub struct RuleData {
    pub vectors: Vec<FeatureVector>,
    /// Distinct source methods, sorted by id.
    pub sources: Vec<MethodProfile>,
    /// Distinct target methods, sorted by id. These are the candidates for
    /// top-1 recommendation within the rule.
    pub targets: Vec<MethodProfile>,
}

impl RuleData {
    fn valid_pairs(&self) -> BTreeSet<(&str, &str)> {
        self.vectors
            .iter()
            .filter(|v| v.is_valid_label() == Some(true))
            .map(|v| (v.pair.source_id.as_str(), v.pair.target_id.as_str()))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct EvalDataset {
    pub extractor: FeatureExtractor,
    pub rules: BTreeMap<String, RuleData>,
}

impl EvalDataset {
    pub fn build(dataset: &MappingDataset, extractor: &FeatureExtractor) -> Self {
        let mut rules = BTreeMap::new();
        for (rule_id, records) in dataset.rules() {
            let mut sources = BTreeMap::new();
            let mut targets = BTreeMap::new();
            let mut vectors = Vec::with_capacity(records.len());
            for r in records {
                let sp = sources
                    .entry(r.record.source_method_id.clone())
                    .or_insert_with(|| extractor.profile(&r.source))
                    .clone();
                let tp =
                    targets.entry(r.record.target_method_id.clone()).or_insert_with(|| extractor.profile(&r.target));
                vectors.push(FeatureVector {
                    phi: extractor.pair_features(&sp, tp),
                    label: Some(r.record.label),
                    pair: PairKey {
                        rule_id: rule_id.clone(),
                        source_id: r.record.source_method_id.clone(),
                        target_id: r.record.target_method_id.clone(),
                    },
                });
            }
            rules.insert(
                rule_id.clone(),
                RuleData {
                    vectors,
                    sources: sources.into_values().collect(),
                    targets: targets.into_values().collect(),
                },
            );
        }
        Self { extractor: extractor.clone(), rules }
    }

    /// Every labeled vector, rule by rule.
    pub fn vectors(&self) -> impl Iterator<Item = &FeatureVector> {
        self.rules.values().flat_map(|r| r.vectors.iter())
    }

    pub fn len(&self) -> usize {
        self.rules.values().map(|r| r.vectors.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum FeatureSelection {
    /// Train on exactly these feature indices.
    Fixed { features: Vec<usize> },
    /// Keep the φ1–φ9 columns whose |Pearson| with the training labels
    /// reaches `threshold`.
    Filter { threshold: f64 },
}

impl Default for FeatureSelection {
    fn default() -> Self {
        FeatureSelection::Fixed { features: DEFAULT_TRAINED_FEATURES.to_vec() }
    }
}

impl FeatureSelection {
    pub fn filter() -> Self {
        FeatureSelection::Filter { threshold: DEFAULT_SELECTION_THRESHOLD }
    }

    pub fn select(&self, train: &[FeatureVector]) -> Result<Vec<usize>, EvalError> {
        match self {
            FeatureSelection::Fixed { features } => Ok(features.clone()),
            FeatureSelection::Filter { threshold } => {
                Ok(filter_feature_selection(train, *threshold)?.retained_among(&SELECTABLE_FEATURES))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RapimConfig {
    pub hyperparams: GbdtHyperparams,
    pub selection: FeatureSelection,
    /// Probability at or above which a pair is classified valid.
    pub threshold: f64,
}

impl Default for RapimConfig {
    fn default() -> Self {
        Self { hyperparams: GbdtHyperparams::default(), selection: FeatureSelection::default(), threshold: 0.5 }
    }
}

impl RapimConfig {
    pub fn train(&self, train: &[FeatureVector]) -> Result<GbdtModel, EvalError> {
        let features = self.selection.select(train)?;
        Ok(GbdtModel::train_vectors(train, &features, &self.hyperparams)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LtrMode {
    /// Fit weights on the training rules.
    #[default]
    Trained,
    /// Use the published weights.
    Published,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalConfig {
    pub rapim: RapimConfig,
    pub ltr: LtrMode,
}

/// Models trained for one held-out rule.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldModels {
    pub rapim: GbdtModel,
    pub ltr: LtrWeights,
}

/// Trains on every rule except `test_rule`.
pub fn fold_models(data: &EvalDataset, test_rule: &str, config: &EvalConfig) -> Result<FoldModels, EvalError> {
    if !data.rules.contains_key(test_rule) {
        return Err(EvalError::UnknownRule(test_rule.into()));
    }
    let train: Vec<FeatureVector> = data
        .rules
        .iter()
        .filter(|(id, _)| id.as_str() != test_rule)
        .flat_map(|(_, r)| r.vectors.iter().cloned())
        .collect();
    let rapim = config.rapim.train(&train)?;
    let ltr = match config.ltr {
        LtrMode::Trained => baselines::ltr_train(&train)?,
        LtrMode::Published => LtrWeights::published(),
    };
    Ok(FoldModels { rapim, ltr })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TopOneCount {
    pub correct: usize,
    /// Source methods with at least one valid labeled target.
    pub total: usize,
}

impl TopOneCount {
    pub fn accuracy(&self) -> Option<f64> {
        (self.total > 0).then(|| self.correct as f64 / self.total as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleOutcome {
    /// RAPIM as a pair classifier.
    pub rapim: ConfusionMatrix,
    pub rapim_accuracy: f64,
    /// Top-1 recommendation counts per approach.
    pub top1: BTreeMap<Approach, TopOneCount>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub folds_used: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub per_rule: BTreeMap<String, RuleOutcome>,
    /// RAPIM pair-classification accuracy per rule.
    pub per_rule_accuracy: BTreeMap<String, f64>,
    /// Mean of `per_rule_accuracy`.
    pub average_accuracy: f64,
    pub error: f64,
    /// Mean top-1 accuracy per approach over rules that have eligible sources.
    pub top1_average: BTreeMap<Approach, f64>,
    /// Pooled over all held-out pairs.
    pub roc: Vec<RocPoint>,
    pub auc: Option<f64>,
    pub curve: Vec<CurvePoint>,
}

fn top_one(scorer: &dyn PairScorer, rule: &RuleData) -> Result<TopOneCount, EvalError> {
    let valid = rule.valid_pairs();
    let mut count = TopOneCount::default();
    for s in &rule.sources {
        if !valid.iter().any(|(src, _)| *src == s.id) {
            continue;
        }
        count.total += 1;
        let best = best_target(scorer, s, &rule.targets)?;
        if valid.contains(&(s.id.as_str(), best.target.as_str())) {
            count.correct += 1;
        }
    }
    Ok(count)
}

/// Holds out each rule in turn, training RAPIM and LTR on the rest.
pub fn leave_one_rule_out(data: &EvalDataset, config: &EvalConfig) -> Result<EvaluationReport, EvalError> {
    if data.rules.len() < 2 {
        return Err(EvalError::TooFewRules { got: data.rules.len() });
    }
    let mut per_rule = BTreeMap::new();
    let mut pooled = Vec::new();
    for (rule_id, rule) in &data.rules {
        let models = fold_models(data, rule_id, config)?;
        let mut rapim = ConfusionMatrix::default();
        for v in &rule.vectors {
            let actual = v.is_valid_label().ok_or(EvalError::MissingLabel)?;
            let p = models.rapim.predict_proba(&v.phi)?;
            rapim.record(p >= config.rapim.threshold, actual);
            pooled.push((p, actual));
        }
        let scorers: [&dyn PairScorer; 4] = [
            &RapimScorer::new(data.extractor.clone(), models.rapim)?,
            &LtrScorer::new(data.extractor.clone(), models.ltr),
            &TmapScorer::new(data.extractor.clone()),
            &MsScorer::new(data.extractor.clone()),
        ];
        let mut top1 = BTreeMap::new();
        for s in scorers {
            top1.insert(s.approach(), top_one(s, rule)?);
        }
        let rapim_accuracy = rapim.accuracy()?;
        per_rule.insert(rule_id.clone(), RuleOutcome { rapim, rapim_accuracy, top1 });
    }

    let per_rule_accuracy: BTreeMap<String, f64> =
        per_rule.iter().map(|(id, o)| (id.clone(), o.rapim_accuracy)).collect();
    let average_accuracy = per_rule_accuracy.values().sum::<f64>() / per_rule_accuracy.len() as f64;
    let mut top1_average = BTreeMap::new();
    for a in Approach::ALL {
        let accs: Vec<f64> = per_rule.values().filter_map(|o| o.top1[&a].accuracy()).collect();
        if !accs.is_empty() {
            top1_average.insert(a, accs.iter().sum::<f64>() / accs.len() as f64);
        }
    }
    let (roc, auc_value) = match roc_points(&pooled) {
        Ok(points) => {
            let a = auc(&points);
            (points, Some(a))
        }
        Err(EvalError::DegenerateLabels) => (Vec::new(), None),
        Err(e) => return Err(e),
    };
    Ok(EvaluationReport {
        per_rule,
        per_rule_accuracy,
        average_accuracy,
        error: 1.0 - average_accuracy,
        top1_average,
        roc,
        auc: auc_value,
        curve: Vec::new(),
    })
}

/// Sizes of `folds` near-equal folds; the remainder goes one each to the
/// first folds.
pub fn fold_sizes(n: usize, folds: usize) -> Vec<usize> {
    (0..folds).map(|i| n / folds + usize::from(i < n % folds)).collect()
}

pub const CURVE_FOLDS: usize = 10;

/// Shuffles once, splits into ten folds and, for k = 1..9, trains on the
/// first k folds and measures pair accuracy on the rest.
pub fn training_size_curve(
    vectors: &[FeatureVector],
    config: &RapimConfig,
    seed: u64,
) -> Result<Vec<CurvePoint>, EvalError> {
    let needed = 2 * CURVE_FOLDS;
    if vectors.len() < needed {
        return Err(EvalError::InsufficientData { needed, got: vectors.len() });
    }
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let sizes = fold_sizes(vectors.len(), CURVE_FOLDS);
    let mut curve = Vec::with_capacity(CURVE_FOLDS - 1);
    let mut cut = 0;
    for k in 1..CURVE_FOLDS {
        cut += sizes[k - 1];
        let train: Vec<FeatureVector> = order[..cut].iter().map(|&i| vectors[i].clone()).collect();
        let model = config.train(&train)?;
        let mut m = ConfusionMatrix::default();
        for &i in &order[cut..] {
            let v = &vectors[i];
            let actual = v.is_valid_label().ok_or(EvalError::MissingLabel)?;
            m.record(model.predict_proba(&v.phi)? >= config.threshold, actual);
        }
        curve.push(CurvePoint { folds_used: k, accuracy: m.accuracy()? });
    }
    Ok(curve)
}

pub const MIN_SIGNIFICANCE_SEEDS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceReport {
    /// Accuracy at k = 2, one per seed.
    pub k2: Vec<f64>,
    /// Accuracies at k = 3..9 pooled over all seeds.
    pub pooled_rest: Vec<f64>,
    pub test: MannWhitney,
}

/// Repeats the training-size curve per seed and compares k = 2 against the
/// pooled k = 3..9 runs.
pub fn training_size_significance(
    vectors: &[FeatureVector],
    config: &RapimConfig,
    seeds: &[u64],
) -> Result<SignificanceReport, EvalError> {
    if seeds.len() < MIN_SIGNIFICANCE_SEEDS {
        return Err(EvalError::TooFewSeeds { needed: MIN_SIGNIFICANCE_SEEDS, got: seeds.len() });
    }
    let mut k2 = Vec::with_capacity(seeds.len());
    let mut pooled_rest = Vec::new();
    for &seed in seeds {
        for p in training_size_curve(vectors, config, seed)? {
            match p.folds_used {
                1 => {}
                2 => k2.push(p.accuracy),
                _ => pooled_rest.push(p.accuracy),
            }
        }
    }
    let test = mann_whitney_u(&k2, &pooled_rest)?;
    Ok(SignificanceReport { k2, pooled_rest, test })
}

/// ROC of a model's probabilities over labeled vectors.
pub fn roc_curve(model: &GbdtModel, vectors: &[FeatureVector]) -> Result<Vec<RocPoint>, EvalError> {
    let scored = vectors
        .iter()
        .map(|v| {
            let actual = v.is_valid_label().ok_or(EvalError::MissingLabel)?;
            Ok((model.predict_proba(&v.phi)?, actual))
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    roc_points(&scored)
}

/// Pair-classification confusion of a model at `threshold`.
pub fn confusion_of(
    model: &GbdtModel,
    vectors: &[FeatureVector],
    threshold: f64,
) -> Result<ConfusionMatrix, EvalError> {
    let mut m = ConfusionMatrix::default();
    for v in vectors {
        let actual = v.is_valid_label().ok_or(EvalError::MissingLabel)?;
        m.record(model.predict_proba(&v.phi)? >= threshold, actual);
    }
    Ok(m)
}
