//! Quadratic-time reference implementations.
//!
//! These visit every (positive, negative) pair explicitly and are the
//! ground truth the sweep-based losses are checked against. Keep them
//! simple; do not optimize.

use crate::batch::PredictionBatch;

use super::{LossOutput, MarginConfig};

fn pair_loop(
    batch: &PredictionBatch,
    cfg: &MarginConfig,
    want_gradient: bool,
    hinge: bool,
) -> LossOutput {
    let m = cfg.margin();
    let y = batch.predictions();
    let positives: Vec<usize> = batch.positive_indices().collect();
    let negatives: Vec<usize> = batch.negative_indices().collect();
    let pair_count = batch.pair_count();

    let mut value = 0.0;
    let mut gradient = want_gradient.then(|| vec![0.0; y.len()]);
    for &j in &positives {
        for &k in &negatives {
            // m − (ŷ_j − ŷ_k)
            let r = m - y[j] + y[k];
            if hinge && r <= 0.0 {
                continue;
            }
            value += r * r;
            if let Some(g) = gradient.as_mut() {
                g[j] -= 2.0 * r;
                g[k] += 2.0 * r;
            }
        }
    }
    LossOutput {
        value,
        gradient,
        pair_count,
    }
    .scaled(cfg.normalization)
}

/// `Σ_{j∈I⁺} Σ_{k∈I⁻} (m − ŷ_j + ŷ_k)²` by direct enumeration.
pub fn naive_square_loss(batch: &PredictionBatch, cfg: &MarginConfig, want_gradient: bool) -> LossOutput {
    pair_loop(batch, cfg, want_gradient, false)
}

/// `Σ_{j∈I⁺} Σ_{k∈I⁻} (m − ŷ_j + ŷ_k)²₊` by direct enumeration.
pub fn naive_squared_hinge_loss(
    batch: &PredictionBatch,
    cfg: &MarginConfig,
    want_gradient: bool,
) -> LossOutput {
    pair_loop(batch, cfg, want_gradient, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairwise::Normalization;

    fn cfg() -> MarginConfig {
        MarginConfig::default()
    }

    #[test]
    fn margin_exact_pair_is_zero() {
        let b = PredictionBatch::from_classes(&[1.0], &[0.0]).unwrap();
        assert_eq!(naive_square_loss(&b, &cfg(), true).value, 0.0);
        assert_eq!(naive_square_loss(&b, &cfg(), true).gradient.unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn equal_scores_cost_margin_squared() {
        let b = PredictionBatch::from_classes(&[0.0], &[0.0]).unwrap();
        assert_eq!(naive_square_loss(&b, &cfg(), false).value, 1.0);
        assert_eq!(naive_squared_hinge_loss(&b, &cfg(), false).value, 1.0);
    }

    #[test]
    fn two_pair_sum() {
        // pairs: (1 − 0.5 + 0.1)² = 0.36, (1 + 0.2 + 0.1)² = 1.69
        let b = PredictionBatch::from_classes(&[0.5, -0.2], &[0.1]).unwrap();
        let per_pair: f64 = [0.5f64, -0.2]
            .iter()
            .map(|yj| (1.0 - yj + 0.1) * (1.0 - yj + 0.1))
            .sum();
        let out = naive_square_loss(&b, &cfg(), true);
        assert!((out.value - 2.05).abs() < 1e-12);
        assert!((out.value - per_pair).abs() < 1e-15);
        assert_eq!(out.pair_count, 2);
    }

    #[test]
    fn hinge_inactive_pair() {
        let b = PredictionBatch::from_classes(&[2.5], &[0.0]).unwrap();
        assert_eq!(naive_squared_hinge_loss(&b, &cfg(), true).value, 0.0);
        assert_eq!(naive_squared_hinge_loss(&b, &cfg(), true).gradient.unwrap(), vec![0.0, 0.0]);
        assert_eq!(naive_square_loss(&b, &cfg(), false).value, 2.25);
    }

    #[test]
    fn single_example_and_empty() {
        for b in [
            PredictionBatch::from_classes(&[0.3], &[]).unwrap(),
            PredictionBatch::from_classes(&[], &[0.3]).unwrap(),
            PredictionBatch::from_classes(&[], &[]).unwrap(),
        ] {
            let mean = MarginConfig::new(1.0, Normalization::MeanOverPairs).unwrap();
            for c in [cfg(), mean] {
                let out = naive_squared_hinge_loss(&b, &c, true);
                assert_eq!(out.value, 0.0);
                assert!(out.gradient.unwrap().iter().all(|&g| g == 0.0));
                assert_eq!(out.pair_count, 0);
            }
        }
    }

    #[test]
    fn mean_normalization_divides_by_pairs() {
        let b = PredictionBatch::from_classes(&[0.5; 3], &[0.5; 2]).unwrap();
        let mean = MarginConfig::new(1.0, Normalization::MeanOverPairs).unwrap();
        assert_eq!(naive_squared_hinge_loss(&b, &cfg(), false).value, 6.0);
        assert_eq!(naive_squared_hinge_loss(&b, &mean, false).value, 1.0);
    }
}
