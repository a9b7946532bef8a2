use crate::batch::PredictionBatch;

use super::{square_loss_coefficients, LossOutput, MarginConfig};

/// All-pairs square loss in linear time.
///
/// The positives are folded into one quadratic `a⁺x² + b⁺x + c⁺`, which is
/// then evaluated at every negative score. Gradients:
///
/// - negative `k`: `2a⁺ŷ_k + b⁺`
/// - positive `j`: `−2[n⁻(m − ŷ_j) + Σ_{k∈I⁻} ŷ_k]`
pub fn functional_square_loss(batch: &PredictionBatch, cfg: &MarginConfig, want_gradient: bool) -> LossOutput {
    let n_neg = batch.n_negative();
    let pair_count = batch.pair_count();
    if pair_count == 0 {
        return LossOutput::zero(batch.len(), 0, want_gradient);
    }
    let m = cfg.margin();
    let q = square_loss_coefficients(batch, cfg);

    let mut value = 0.0;
    let mut negative_sum = 0.0;
    for (y, label) in batch.iter() {
        if !label.is_positive() {
            value += q.eval(y);
            negative_sum += y;
        }
    }

    let gradient = want_gradient.then(|| {
        let n_neg = n_neg as f64;
        batch
            .iter()
            .map(|(y, label)| {
                if label.is_positive() {
                    -2.0 * (n_neg * (m - y) + negative_sum)
                } else {
                    q.derivative(y)
                }
            })
            .collect()
    });

    LossOutput {
        value,
        gradient,
        pair_count,
    }
    .scaled(cfg.normalization)
}
