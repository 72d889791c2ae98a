use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::math;

/// Pair-classification outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn record(&mut self, predicted_valid: bool, actually_valid: bool) {
        match (predicted_valid, actually_valid) {
            (true, true) => self.tp += 1,
            (false, false) => self.tn += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        self.tp += other.tp;
        self.tn += other.tn;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }

    pub fn accuracy(&self) -> Result<f64, EvalError> {
        confusion_accuracy(self)
    }

    pub fn error(&self) -> Result<f64, EvalError> {
        Ok(1.0 - self.accuracy()?)
    }
}

/// `(tp + tn) / total`.
pub fn confusion_accuracy(m: &ConfusionMatrix) -> Result<f64, EvalError> {
    let total = m.total();
    if total == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    Ok((m.tp + m.tn) as f64 / total as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

/// ROC points for `(score, is_valid)` pairs. A pair counts as valid at
/// threshold `t` when its score is at least `t`; thresholds are the distinct
/// scores plus 0 and 1. Sorted by fpr, then tpr, and always containing
/// (0,0) and (1,1).
pub fn roc_points(scored: &[(f64, bool)]) -> Result<Vec<RocPoint>, EvalError> {
    let pos = scored.iter().filter(|s| s.1).count();
    let neg = scored.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(EvalError::DegenerateLabels);
    }
    let mut thresholds: Vec<f64> = scored.iter().map(|s| s.0).chain([0.0, 1.0]).collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    let mut points: Vec<RocPoint> = thresholds
        .iter()
        .map(|&t| {
            let tp = scored.iter().filter(|s| s.1 && s.0 >= t).count();
            let fp = scored.iter().filter(|s| !s.1 && s.0 >= t).count();
            RocPoint { fpr: fp as f64 / neg as f64, tpr: tp as f64 / pos as f64 }
        })
        .chain([RocPoint { fpr: 0.0, tpr: 0.0 }, RocPoint { fpr: 1.0, tpr: 1.0 }])
        .collect();
    points.sort_by(|a, b| a.fpr.total_cmp(&b.fpr).then(a.tpr.total_cmp(&b.tpr)));
    points.dedup();
    Ok(points)
}

/// Trapezoid area under points sorted by fpr.
pub fn auc(points: &[RocPoint]) -> f64 {
    points.windows(2).map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// Pairs where the first sample is larger, ties counting one half.
    pub u_a: f64,
    pub u_b: f64,
    pub z: f64,
    /// Two-sided, normal approximation with tie and continuity correction.
    pub p_value: f64,
    /// False when `n·m < 20`, where the approximation is poor.
    pub reliable: bool,
}

pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney, EvalError> {
    if a.is_empty() || b.is_empty() {
        return Err(EvalError::EmptySample);
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(EvalError::NonFiniteSample);
    }
    let n = a.len() as u64;
    let m = b.len() as u64;
    let mut all: Vec<(f64, bool)> = a.iter().map(|&x| (x, true)).chain(b.iter().map(|&x| (x, false))).collect();
    all.sort_by(|x, y| x.0.total_cmp(&y.0));

    // ranks doubled so tie averages stay integral
    let mut rank2_a = 0u64;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j + 1 < all.len() && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        let doubled = (i + 1 + j + 1) as u64;
        let in_a = all[i..=j].iter().filter(|e| e.1).count() as u64;
        rank2_a += doubled * in_a;
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let u2_a = rank2_a - n * (n + 1);
    let u2_b = 2 * n * m - u2_a;
    let u_a = u2_a as f64 / 2.0;
    let u_b = u2_b as f64 / 2.0;

    let nf = n as f64;
    let mf = m as f64;
    let total = nf + mf;
    let mean = nf * mf / 2.0;
    let var = if total > 1.0 { nf * mf / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0))) } else { 0.0 };
    let (z, p_value) = if var > 0.0 {
        let d = u_a - mean;
        let corrected = (d.abs() - 0.5).max(0.0);
        let z = corrected.copysign(d) / math::sqrt(var);
        (z, math::erfc(z.abs() / core::f64::consts::SQRT_2).min(1.0))
    } else {
        (0.0, 1.0)
    };
    Ok(MannWhitney { u_a, u_b, z, p_value, reliable: n * m >= 20 })
}
