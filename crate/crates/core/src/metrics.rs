//! ROC-AUC and the per-example logistic loss.

use std::cmp::Ordering;

use crate::batch::PredictionBatch;
use crate::error::{Error, Result};
use crate::pairwise::LossOutput;

/// Area under the ROC curve together with the class counts it was computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AucResult {
    pub auc: f64,
    pub n_pos: usize,
    pub n_neg: usize,
}

/// Mann-Whitney AUC: the fraction of (positive, negative) pairs ordered
/// correctly, with tied scores counting one half.
///
/// Runs in `O(n log n)`. Correct pairs are counted in half-units as an
/// integer, so the result is the exact ratio rounded once.
pub fn roc_auc(batch: &PredictionBatch) -> Result<AucResult> {
    let n_pos = batch.n_positive();
    let n_neg = batch.n_negative();
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::AucUndefined { n_pos, n_neg });
    }

    let y = batch.predictions();
    let labels = batch.labels();
    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_unstable_by(|&a, &b| y[a].partial_cmp(&y[b]).unwrap_or(Ordering::Equal));

    // 2 × (correct pairs) + (tied pairs)
    let mut half_units: u128 = 0;
    let mut negatives_below: u128 = 0;
    let mut start = 0;
    while start < order.len() {
        let score = y[order[start]];
        let mut end = start;
        let (mut pos, mut neg) = (0u128, 0u128);
        while end < order.len() && y[order[end]] == score {
            if labels[order[end]].is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            end += 1;
        }
        half_units += 2 * pos * negatives_below + pos * neg;
        negatives_below += neg;
        start = end;
    }

    let pairs = n_pos as u128 * n_neg as u128;
    Ok(AucResult {
        auc: half_units as f64 / (2 * pairs) as f64,
        n_pos,
        n_neg,
    })
}

/// `log(1 + e^{-z})` without overflow.
#[inline]
fn softplus_neg(z: f64) -> f64 {
    if z >= 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

/// `1 / (1 + e^{z})` without overflow.
#[inline]
fn sigmoid_neg(z: f64) -> f64 {
    if z >= 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

/// `Σ_i log(1 + exp(−y_i ŷ_i))`, equal weight per example.
///
/// The gradient is `−y_i / (1 + exp(y_i ŷ_i))`. `pair_count` reports the
/// number of pairs in the batch for uniformity with the pairwise losses.
pub fn logistic_loss(batch: &PredictionBatch, want_gradient: bool) -> LossOutput {
    let mut value = 0.0;
    let mut gradient = want_gradient.then(|| Vec::with_capacity(batch.len()));
    for (y, label) in batch.iter() {
        let s = label.sign();
        let z = s * y;
        value += softplus_neg(z);
        if let Some(g) = gradient.as_mut() {
            g.push(-s * sigmoid_neg(z));
        }
    }
    LossOutput {
        value,
        gradient,
        pair_count: batch.pair_count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_separation() {
        let b = PredictionBatch::from_classes(&[2.0, 3.0], &[0.0, 1.0, -5.0]).unwrap();
        assert_eq!(roc_auc(&b).unwrap().auc, 1.0);
    }

    #[test]
    fn constant_predictions_half() {
        let b = PredictionBatch::from_classes(&[0.2; 4], &[0.2; 7]).unwrap();
        let r = roc_auc(&b).unwrap();
        assert_eq!(r.auc, 0.5);
        assert_eq!((r.n_pos, r.n_neg), (4, 7));
    }

    #[test]
    fn three_of_four() {
        let b = PredictionBatch::from_classes(&[0.9, 0.4], &[0.5, 0.1]).unwrap();
        assert_eq!(roc_auc(&b).unwrap().auc, 0.75);
    }

    #[test]
    fn single_class_is_error() {
        let b = PredictionBatch::from_classes(&[0.9, 0.4], &[]).unwrap();
        assert!(matches!(roc_auc(&b), Err(Error::AucUndefined { n_pos: 2, n_neg: 0 })));
        let empty = PredictionBatch::new(vec![], vec![]).unwrap();
        assert!(roc_auc(&empty).is_err());
    }

    #[test]
    fn logistic_at_zero() {
        let b = PredictionBatch::from_signs(vec![0.0, 0.0], &[1, -1]).unwrap();
        let out = logistic_loss(&b, true);
        assert!((out.value - 2.0 * std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(out.gradient.unwrap(), vec![-0.5, 0.5]);
    }

    #[test]
    fn logistic_extremes_do_not_overflow() {
        let good = PredictionBatch::from_signs(vec![100.0], &[1]).unwrap();
        let v = logistic_loss(&good, true);
        assert!(v.value >= 0.0 && v.value < 1e-40);
        let bad = PredictionBatch::from_signs(vec![-100.0], &[1]).unwrap();
        let v = logistic_loss(&bad, true);
        assert!((v.value - 100.0).abs() < 1e-12);
        assert!((v.gradient.unwrap()[0] + 1.0).abs() < 1e-15);
        let huge = PredictionBatch::from_signs(vec![1e300, -1e300], &[-1, 1]).unwrap();
        assert!(logistic_loss(&huge, true).value.is_finite());
    }
}
