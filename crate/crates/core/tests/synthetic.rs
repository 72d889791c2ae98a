//! Seeded end-to-end run: 500 pairs labeled by φ1 > 0.5, with 5% of the
//! labels flipped.

use apimap_core::corpus::Label;
use apimap_core::eval::{auc, confusion_of, roc_curve};
use apimap_core::features::{
    filter_feature_selection, FeatureVector, PairKey, DEFAULT_SELECTION_THRESHOLD, DEFAULT_TRAINED_FEATURES,
    NUM_FEATURES, PHI1, PHI9,
};
use apimap_core::learner::{GbdtHyperparams, GbdtModel};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 7;
const PAIRS: usize = 500;
const FLIPPED: usize = PAIRS / 20;
const TRAIN: usize = 350;

/// Returns (vectors with noisy labels, noise-free labels).
fn dataset() -> (Vec<FeatureVector>, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut clean = Vec::with_capacity(PAIRS);
    let mut vectors: Vec<FeatureVector> = (0..PAIRS)
        .map(|i| {
            let mut phi = [0.0; NUM_FEATURES];
            for x in &mut phi {
                *x = rng.random();
            }
            clean.push(phi[PHI1] > 0.5);
            FeatureVector {
                phi,
                label: Some(Label::from_bool(phi[PHI1] > 0.5)),
                pair: PairKey { rule_id: "synthetic".into(), source_id: format!("s{i}"), target_id: format!("t{i}") },
            }
        })
        .collect();
    for i in sample(&mut rng, PAIRS, FLIPPED) {
        let v = &mut vectors[i];
        v.label = v.label.map(|l| Label::from_bool(!l.is_valid()));
    }
    (vectors, clean)
}

fn with_labels(vectors: &[FeatureVector], labels: &[bool]) -> Vec<FeatureVector> {
    vectors.iter().zip(labels).map(|(v, &y)| FeatureVector { label: Some(Label::from_bool(y)), ..v.clone() }).collect()
}

#[test]
fn noise_rate_is_five_percent() {
    let (vectors, clean) = dataset();
    let flipped = vectors.iter().zip(&clean).filter(|(v, &c)| v.is_valid_label() != Some(c)).count();
    assert_eq!(flipped, 25);
}

#[test]
fn boosted_trees_recover_the_rule() {
    let (vectors, clean) = dataset();
    let model =
        GbdtModel::train_vectors(&vectors[..TRAIN], &DEFAULT_TRAINED_FEATURES, &GbdtHyperparams::default()).unwrap();
    let held_out = with_labels(&vectors[TRAIN..], &clean[TRAIN..]);
    let acc = confusion_of(&model, &held_out, 0.5).unwrap().accuracy().unwrap();
    let area = auc(&roc_curve(&model, &held_out).unwrap());
    assert!(acc >= 0.95, "{acc}");
    assert!(area >= 0.95, "{area}");
}

#[test]
fn filter_selection_separates_signal_from_noise() {
    let (vectors, clean) = dataset();
    let s = filter_feature_selection(&with_labels(&vectors, &clean), DEFAULT_SELECTION_THRESHOLD).unwrap();
    // flipped labels cap the signal column near 0.866 * 0.9
    let noisy = filter_feature_selection(&vectors, DEFAULT_SELECTION_THRESHOLD).unwrap();
    assert!(noisy.scores[PHI1] < 0.8 && noisy.scores[PHI1] > 0.7, "{:?}", noisy.scores);
    assert!(s.scores[PHI1] > 0.8, "{:?}", s.scores);
    assert!(s.scores[PHI9] < 0.1, "{:?}", s.scores);
    assert!(!s.retained[PHI9]);
    assert!(s.retained[PHI1]);
}
