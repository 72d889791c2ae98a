use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GbdtHyperparams, GbdtModel, LearnerError};

/// Candidate values per hyperparameter; the search covers the full product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperparamGrid {
    pub max_leaves: Vec<usize>,
    pub min_leaf_instances: Vec<usize>,
    pub learning_rate: Vec<f64>,
    pub num_trees: Vec<usize>,
}

impl HyperparamGrid {
    pub fn single(hp: &GbdtHyperparams) -> Self {
        Self {
            max_leaves: alloc::vec![hp.max_leaves],
            min_leaf_instances: alloc::vec![hp.min_leaf_instances],
            learning_rate: alloc::vec![hp.learning_rate],
            num_trees: alloc::vec![hp.num_trees],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.max_leaves.is_empty()
            || self.min_leaf_instances.is_empty()
            || self.learning_rate.is_empty()
            || self.num_trees.is_empty()
    }

    pub fn len(&self) -> usize {
        self.max_leaves.len() * self.min_leaf_instances.len() * self.learning_rate.len() * self.num_trees.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningPoint {
    pub hyperparams: GbdtHyperparams,
    /// `1 − accuracy` on the validation split.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningResult {
    pub best: GbdtHyperparams,
    pub best_error: f64,
    /// Every evaluated configuration, in grid order.
    pub table: Vec<TuningPoint>,
}

/// Splits row indices into (train, validation), taking `fraction` of each
/// class for validation after a seeded shuffle.
pub fn stratified_split(labels: &[bool], fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut valid = Vec::new();
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        let k = libm::round(idx.len() as f64 * fraction) as usize;
        let k = k.min(idx.len().saturating_sub(1)).max(usize::from(idx.len() > 1));
        valid.extend_from_slice(&idx[..k]);
        train.extend_from_slice(&idx[k..]);
    }
    train.sort_unstable();
    valid.sort_unstable();
    (train, valid)
}

/// Exhaustive grid search minimizing validation error. Ties go to fewer
/// trees, then fewer leaves, then grid order.
///
/// For each (leaves, min leaf, rate) the ensemble is trained once with the
/// largest tree count and evaluated at every requested count by truncation,
/// which is identical to training with that count.
pub fn grid_search_tune<R: AsRef<[f64]>>(
    rows: &[R],
    labels: &[bool],
    features: &[usize],
    grid: &HyperparamGrid,
    validation_fraction: f64,
    seed: u64,
) -> Result<TuningResult, LearnerError> {
    if grid.is_empty() {
        return Err(LearnerError::EmptyGrid);
    }
    let (train_idx, valid_idx) = stratified_split(labels, validation_fraction, seed);
    if valid_idx.is_empty() {
        return Err(LearnerError::EmptyDataset);
    }
    let train_rows: Vec<&[f64]> = train_idx.iter().map(|&i| rows[i].as_ref()).collect();
    let train_labels: Vec<bool> = train_idx.iter().map(|&i| labels[i]).collect();
    let max_trees = *grid.num_trees.iter().max().expect("nonempty");

    let mut table = Vec::with_capacity(grid.len());
    for &max_leaves in &grid.max_leaves {
        for &min_leaf_instances in &grid.min_leaf_instances {
            for &learning_rate in &grid.learning_rate {
                let hp = GbdtHyperparams { max_leaves, min_leaf_instances, learning_rate, num_trees: max_trees, seed };
                let model = GbdtModel::train(&train_rows, &train_labels, features, &hp)?;
                for &num_trees in &grid.num_trees {
                    let hp = GbdtHyperparams { num_trees, ..hp };
                    hp.validate()?;
                    let mut wrong = 0usize;
                    for &i in &valid_idx {
                        let p = model.predict_proba_truncated(rows[i].as_ref(), num_trees)?;
                        if (p >= 0.5) != labels[i] {
                            wrong += 1;
                        }
                    }
                    table.push(TuningPoint { hyperparams: hp, error: wrong as f64 / valid_idx.len() as f64 });
                }
            }
        }
    }

    let best = table
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| {
            a.error
                .total_cmp(&b.error)
                .then(a.hyperparams.num_trees.cmp(&b.hyperparams.num_trees))
                .then(a.hyperparams.max_leaves.cmp(&b.hyperparams.max_leaves))
                .then(ia.cmp(ib))
        })
        .map(|(_, p)| p.clone())
        .expect("nonempty table");
    Ok(TuningResult { best: best.hyperparams, best_error: best.error, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::Rng;

    fn data(n: usize) -> (Vec<Vec<f64>>, Vec<bool>) {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect();
        let labels = rows.iter().map(|r| r[0] > 0.4).collect();
        (rows, labels)
    }

    #[test]
    fn split_is_stratified_and_deterministic() {
        let (_, labels) = data(100);
        let (t, v) = stratified_split(&labels, 0.3, 5);
        assert_eq!(t.len() + v.len(), 100);
        assert!(v.iter().any(|&i| labels[i]) && v.iter().any(|&i| !labels[i]));
        assert_eq!(stratified_split(&labels, 0.3, 5), (t, v));
    }

    #[test]
    fn single_point_grid() {
        let (rows, labels) = data(80);
        let hp = GbdtHyperparams { min_leaf_instances: 3, num_trees: 20, ..Default::default() };
        let r = grid_search_tune(&rows, &labels, &[0, 1], &HyperparamGrid::single(&hp), 0.25, 1).unwrap();
        assert_eq!(r.best.num_trees, 20);
        assert_eq!(r.best.max_leaves, 6);
        assert_eq!(r.table.len(), 1);
    }

    #[test]
    fn picks_minimum_and_breaks_ties_toward_fewer_trees() {
        let (rows, labels) = data(120);
        let grid = HyperparamGrid {
            max_leaves: vec![2, 6],
            min_leaf_instances: vec![3, 200],
            learning_rate: vec![0.14],
            num_trees: vec![1, 10, 60],
        };
        let r = grid_search_tune(&rows, &labels, &[0, 1], &grid, 0.25, 1).unwrap();
        assert_eq!(r.table.len(), grid.len());
        let worst = r.table.iter().map(|p| p.error).fold(0.0, f64::max);
        assert!(r.best_error <= worst);
        for p in &r.table {
            assert!(r.best_error <= p.error);
            if p.error == r.best_error {
                assert!(r.best.num_trees <= p.hyperparams.num_trees);
            }
        }
        assert!(r.best_error < 0.1, "{}", r.best_error);
    }

    #[test]
    fn empty_grid() {
        let (rows, labels) = data(10);
        let grid = HyperparamGrid {
            max_leaves: vec![],
            min_leaf_instances: vec![1],
            learning_rate: vec![0.1],
            num_trees: vec![1],
        };
        assert_eq!(grid_search_tune(&rows, &labels, &[0], &grid, 0.3, 0), Err(LearnerError::EmptyGrid));
    }
}
