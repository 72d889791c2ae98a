use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Values at or below `threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TreeNode {
    /// The left child is the next node in the list; `right` is the index
    /// of the right child.
    Split {
        feature: usize,
        threshold: f64,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

/// A regression tree stored as a preorder node list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegressionTree {
    nodes: Vec<TreeNode>,
}

impl RegressionTree {
    pub fn leaf(value: f64) -> Self {
        Self { nodes: vec![TreeNode::Leaf { value }] }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.nodes[self.leaf_index(x)].leaf_value()
    }

    /// Index of the leaf node that `x` falls into.
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Leaf { .. } => return i,
                TreeNode::Split { feature, threshold, right } => {
                    i = if x[feature] <= threshold { i + 1 } else { right };
                }
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, TreeNode::Leaf { .. })).count()
    }

    /// The root split, if the tree has one.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        match self.nodes.first()? {
            TreeNode::Split { feature, threshold, .. } => Some((*feature, *threshold)),
            TreeNode::Leaf { .. } => None,
        }
    }

    /// Checks that the node list is a well-formed preorder tree over
    /// `arity` features.
    pub fn is_well_formed(&self, arity: usize) -> bool {
        fn walk(nodes: &[TreeNode], i: usize, arity: usize) -> Option<usize> {
            match nodes.get(i)? {
                TreeNode::Leaf { value } => value.is_finite().then_some(i + 1),
                TreeNode::Split { feature, threshold, right } => {
                    if *feature >= arity || !threshold.is_finite() {
                        return None;
                    }
                    let end_left = walk(nodes, i + 1, arity)?;
                    if end_left != *right {
                        return None;
                    }
                    walk(nodes, *right, arity)
                }
            }
        }
        walk(&self.nodes, 0, arity) == Some(self.nodes.len())
    }
}

impl TreeNode {
    fn leaf_value(&self) -> f64 {
        match self {
            TreeNode::Leaf { value } => *value,
            TreeNode::Split { .. } => unreachable!("leaf_index returns leaves only"),
        }
    }
}

/// Columns of the normalized training matrix plus, per column, the row
/// indices sorted by value (ties by row index).
pub(crate) struct ColumnData {
    pub columns: Vec<Vec<f64>>,
    pub sorted: Vec<Vec<usize>>,
}

impl ColumnData {
    pub fn new(rows: &[Vec<f64>]) -> Self {
        let arity = rows.first().map_or(0, Vec::len);
        let columns: Vec<Vec<f64>> = (0..arity).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        let sorted = columns
            .iter()
            .map(|col| {
                let mut idx: Vec<usize> = (0..col.len()).collect();
                idx.sort_by(|&a, &b| col[a].total_cmp(&col[b]).then(a.cmp(&b)));
                idx
            })
            .collect();
        Self { columns, sorted }
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }
}

/// Gains closer than this are treated as ties.
pub(crate) const GAIN_TOLERANCE: f64 = 1e-12;

/// Newton leaf values are clamped to this magnitude.
pub const LEAF_CLAMP: f64 = 4.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

/// Best split of the rows flagged by `member`, maximizing squared-error
/// reduction of `residuals`. Each side must keep `min_leaf` rows. Ties go to
/// the lower feature index, then the lower threshold.
pub(crate) fn best_split(
    data: &ColumnData,
    residuals: &[f64],
    member: &[bool],
    count: usize,
    min_leaf: usize,
) -> Option<SplitCandidate> {
    if count < 2 * min_leaf.max(1) {
        return None;
    }
    let total: f64 = (0..residuals.len()).filter(|&i| member[i]).map(|i| residuals[i]).sum();
    let parent = total * total / count as f64;
    let mut best: Option<SplitCandidate> = None;
    for (feature, order) in data.sorted.iter().enumerate() {
        let col = &data.columns[feature];
        let mut left_n = 0usize;
        let mut left_sum = 0.0;
        let mut prev: Option<usize> = None;
        for &row in order.iter().filter(|&&r| member[r]) {
            if let Some(p) = prev {
                let (lo, hi) = (col[p], col[row]);
                let right_n = count - left_n;
                if lo < hi && left_n >= min_leaf && right_n >= min_leaf {
                    let right_sum = total - left_sum;
                    let gain = left_sum * left_sum / left_n as f64 + right_sum * right_sum / right_n as f64 - parent;
                    let better = match best {
                        None => gain > GAIN_TOLERANCE,
                        Some(b) => gain > b.gain + GAIN_TOLERANCE,
                    };
                    if better {
                        best = Some(SplitCandidate { feature, threshold: midpoint(lo, hi), gain });
                    }
                }
            }
            left_n += 1;
            left_sum += residuals[row];
            prev = Some(row);
        }
    }
    best
}

/// Midpoint of `lo < hi` that still separates them.
pub fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo + (hi - lo) / 2.0;
    if m >= hi {
        lo
    } else {
        m
    }
}

/// Newton step for logistic loss: `Σr / Σp(1−p)`, clamped.
pub(crate) fn newton_value(residuals: &[f64], hessians: &[f64], member: &[bool]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..residuals.len() {
        if member[i] {
            num += residuals[i];
            den += hessians[i];
        }
    }
    if den <= f64::MIN_POSITIVE {
        return 0.0;
    }
    (num / den).clamp(-LEAF_CLAMP, LEAF_CLAMP)
}

enum Building {
    Leaf { member: Vec<bool>, count: usize, candidate: Option<SplitCandidate> },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

/// Grows one tree best-first: the open leaf whose best split reduces
/// squared error the most is split next, until `max_leaves` is reached or
/// no leaf can be split without dropping below `min_leaf` rows.
pub(crate) fn grow_tree(
    data: &ColumnData,
    residuals: &[f64],
    hessians: &[f64],
    max_leaves: usize,
    min_leaf: usize,
) -> RegressionTree {
    let n = data.rows();
    let root_member = vec![true; n];
    let candidate = best_split(data, residuals, &root_member, n, min_leaf);
    let mut nodes = vec![Building::Leaf { member: root_member, count: n, candidate }];
    let mut leaves = 1;
    while leaves < max_leaves {
        let mut pick: Option<(usize, f64)> = None;
        for (i, node) in nodes.iter().enumerate() {
            if let Building::Leaf { candidate: Some(c), .. } = node {
                if pick.is_none_or(|(_, g)| c.gain > g + GAIN_TOLERANCE) {
                    pick = Some((i, c.gain));
                }
            }
        }
        let Some((i, _)) = pick else { break };
        let Building::Leaf { member, candidate: Some(c), .. } =
            core::mem::replace(&mut nodes[i], Building::Split { feature: 0, threshold: 0.0, left: 0, right: 0 })
        else {
            unreachable!()
        };
        let col = &data.columns[c.feature];
        let mut left = vec![false; n];
        let mut right = vec![false; n];
        let (mut nl, mut nr) = (0, 0);
        for r in 0..n {
            if member[r] {
                if col[r] <= c.threshold {
                    left[r] = true;
                    nl += 1;
                } else {
                    right[r] = true;
                    nr += 1;
                }
            }
        }
        let lc = best_split(data, residuals, &left, nl, min_leaf);
        let rc = best_split(data, residuals, &right, nr, min_leaf);
        let li = nodes.len();
        nodes.push(Building::Leaf { member: left, count: nl, candidate: lc });
        nodes.push(Building::Leaf { member: right, count: nr, candidate: rc });
        nodes[i] = Building::Split { feature: c.feature, threshold: c.threshold, left: li, right: li + 1 };
        leaves += 1;
    }

    let mut out = Vec::with_capacity(nodes.len());
    emit_preorder(&nodes, 0, residuals, hessians, &mut out);
    RegressionTree { nodes: out }
}

fn emit_preorder(nodes: &[Building], i: usize, residuals: &[f64], hessians: &[f64], out: &mut Vec<TreeNode>) {
    match &nodes[i] {
        Building::Leaf { member, count, .. } => {
            debug_assert!(*count > 0);
            out.push(TreeNode::Leaf { value: newton_value(residuals, hessians, member) });
        }
        Building::Split { feature, threshold, left, right } => {
            let at = out.len();
            out.push(TreeNode::Split { feature: *feature, threshold: *threshold, right: 0 });
            emit_preorder(nodes, *left, residuals, hessians, out);
            let r = out.len();
            if let TreeNode::Split { right, .. } = &mut out[at] {
                *right = r;
            }
            emit_preorder(nodes, *right, residuals, hessians, out);
        }
    }
}
