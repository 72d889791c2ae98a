use apimap_core::learner::{logistic_loss, GbdtHyperparams, GbdtModel, TreeNode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Z-scores computed column by column with population std.
fn zscore(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len() as f64;
    let d = rows[0].len();
    let mut out = rows.to_vec();
    for j in 0..d {
        let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        for (o, r) in out.iter_mut().zip(rows) {
            o[j] = if sd > 0.0 { (r[j] - mean) / sd } else { 0.0 };
        }
    }
    out
}

fn sse(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - m).powi(2)).sum()
}

/// Exhaustive search of every (feature, midpoint) against the first-round
/// residuals. Returns the winning partition as a left-membership mask.
fn brute_force_stump(rows: &[Vec<f64>], labels: &[bool], min_leaf: usize) -> Option<(usize, Vec<bool>)> {
    let z = zscore(rows);
    let p = labels.iter().filter(|&&y| y).count() as f64 / labels.len() as f64;
    let r: Vec<f64> = labels.iter().map(|&y| f64::from(u8::from(y)) - p).collect();
    let parent = sse(&r);
    let mut best: Option<(f64, usize, f64)> = None;
    for j in 0..z[0].len() {
        let mut vals: Vec<f64> = z.iter().map(|x| x[j]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for w in vals.windows(2) {
            let t = w[0] + (w[1] - w[0]) / 2.0;
            let left: Vec<f64> = (0..z.len()).filter(|&i| z[i][j] <= t).map(|i| r[i]).collect();
            let right: Vec<f64> = (0..z.len()).filter(|&i| z[i][j] > t).map(|i| r[i]).collect();
            if left.len() < min_leaf || right.len() < min_leaf {
                continue;
            }
            let gain = parent - sse(&left) - sse(&right);
            if gain <= 1e-9 {
                continue;
            }
            if best.is_none_or(|(g, _, _)| gain > g + 1e-9) {
                best = Some((gain, j, t));
            }
        }
    }
    best.map(|(_, j, t)| (j, z.iter().map(|x| x[j] <= t).collect()))
}

fn random_dataset(rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<bool>) {
    loop {
        let n = rng.random_range(2..=20);
        let d = rng.random_range(1..=2);
        let discrete = rng.random_bool(0.5);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..d)
                    .map(|_| if discrete { f64::from(rng.random_range(0..4u8)) } else { rng.random::<f64>() * 10.0 })
                    .collect()
            })
            .collect();
        let labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        if labels.iter().any(|&y| y) && labels.iter().any(|&y| !y) {
            return (rows, labels);
        }
    }
}

#[test]
fn first_stump_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut split_cases = 0;
    for case in 0..400 {
        let (rows, labels) = random_dataset(&mut rng);
        let min_leaf = rng.random_range(1..=3);
        let hp = GbdtHyperparams { max_leaves: 2, min_leaf_instances: min_leaf, num_trees: 1, ..Default::default() };
        let d = rows[0].len();
        let features: Vec<usize> = (0..d).collect();
        let model = GbdtModel::train(&rows, &labels, &features, &hp).unwrap();
        let tree = &model.trees[0];
        let expected = brute_force_stump(&rows, &labels, min_leaf);
        match (tree.root_split(), expected) {
            (None, None) => assert_eq!(tree.leaf_count(), 1),
            (Some((feature, threshold)), Some((bf_feature, bf_left))) => {
                split_cases += 1;
                assert_eq!(feature, bf_feature, "case {case}");
                let z = zscore(&rows);
                let left: Vec<bool> = z.iter().map(|x| x[feature] <= threshold).collect();
                assert_eq!(left, bf_left, "case {case}");
                // the learned tree routes rows the same way
                for (x, &l) in rows.iter().zip(&left) {
                    let leaf = tree.leaf_index(&model.transform(x).unwrap());
                    assert_eq!(leaf == 1, l);
                }
            }
            (got, want) => panic!("case {case}: model {got:?}, brute force {:?}", want.map(|w| w.0)),
        }
    }
    assert!(split_cases > 200, "{split_cases}");
}

fn separable(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| rng.random()).collect()).collect();
    let labels = rows.iter().map(|r| r[0] + 0.3 * rng.random::<f64>() > 0.6).collect();
    (rows, labels)
}

#[test]
fn training_loss_never_increases() {
    for seed in 0..3 {
        let (rows, labels) = separable(300, seed);
        let hp = GbdtHyperparams { min_leaf_instances: 10, ..Default::default() };
        assert_eq!(hp.num_trees, 233);
        let model = GbdtModel::train(&rows, &labels, &[0, 1, 2], &hp).unwrap();
        let mut prev = f64::INFINITY;
        for t in 0..=model.trees.len() {
            let scores: Vec<f64> = rows.iter().map(|r| model.raw_score_truncated(r, t).unwrap()).collect();
            let loss = logistic_loss(&scores, &labels);
            assert!(loss <= prev + 1e-12, "seed {seed} round {t}: {loss} > {prev}");
            prev = loss;
        }
    }
}

#[test]
fn leaves_respect_minimum_and_budget() {
    let (rows, labels) = separable(400, 9);
    let hp = GbdtHyperparams { num_trees: 30, ..Default::default() };
    let model = GbdtModel::train(&rows, &labels, &[0, 1, 2], &hp).unwrap();
    let normalized: Vec<Vec<f64>> = rows.iter().map(|r| model.transform(r).unwrap()).collect();
    for tree in &model.trees {
        assert!(tree.leaf_count() <= hp.max_leaves);
        assert!(tree.is_well_formed(3));
        let mut counts = std::collections::BTreeMap::new();
        for x in &normalized {
            *counts.entry(tree.leaf_index(x)).or_insert(0usize) += 1;
        }
        assert!(counts.values().all(|&c| c >= hp.min_leaf_instances), "{counts:?}");
        for n in tree.nodes() {
            if let TreeNode::Leaf { value } = n {
                assert!(value.abs() <= apimap_core::learner::LEAF_CLAMP);
            }
        }
    }
}

#[test]
fn training_is_deterministic() {
    let (rows, labels) = separable(200, 4);
    let hp = GbdtHyperparams { min_leaf_instances: 5, num_trees: 50, seed: 7, ..Default::default() };
    let a = GbdtModel::train(&rows, &labels, &[0, 2], &hp).unwrap();
    let b = GbdtModel::train(&rows, &labels, &[0, 2], &hp).unwrap();
    assert_eq!(a, b);
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
    for r in &rows {
        assert_eq!(a.predict_proba(r).unwrap().to_bits(), b.predict_proba(r).unwrap().to_bits());
    }
}
