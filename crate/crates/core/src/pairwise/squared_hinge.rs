use std::cmp::Ordering;

use crate::batch::{Label, PredictionBatch};

use super::{LossOutput, MarginConfig, QuadCoefficients};

/// Margin-augmented scores and the order that sorts them.
///
/// Negatives are shifted up by the margin, `v_i = ŷ_i + m·[y_i = −1]`, so a
/// positive `j` has an active hinge against a negative `k` exactly when `j`
/// comes before `k` in `order` (pairs tied on `v` contribute zero either way).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    /// `v_i`, indexed like the batch.
    pub augmented: Vec<f64>,
    /// Indices sorted by ascending `v`; ties put positives first, then lower index.
    pub order: Vec<usize>,
}

impl SweepPlan {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

pub fn build_sweep_plan(batch: &PredictionBatch, cfg: &MarginConfig) -> SweepPlan {
    let m = cfg.margin();
    let labels = batch.labels();
    let augmented: Vec<f64> = batch
        .iter()
        .map(|(y, label)| match label {
            Label::Positive => y,
            Label::Negative => y + m,
        })
        .collect();

    let mut keyed: Vec<(f64, usize)> = augmented.iter().copied().zip(0..).collect();
    keyed.sort_unstable_by(|&(va, ia), &(vb, ib)| {
        va.partial_cmp(&vb)
            .unwrap_or(Ordering::Equal)
            .then_with(|| labels[ib].is_positive().cmp(&labels[ia].is_positive()))
            .then(ia.cmp(&ib))
    });
    let order = keyed.into_iter().map(|(_, i)| i).collect();
    SweepPlan { augmented, order }
}

/// All-pairs squared hinge loss in `O(n log n)`.
///
/// A forward sweep over the plan accumulates the quadratic coefficients of
/// every positive seen so far and evaluates them at each negative; the
/// derivative of that quadratic is the negative's gradient. A backward sweep
/// accumulates, for each positive `j`, the count `N_j` and score sum `S_j` of
/// the negatives after it, giving `∂L/∂ŷ_j = −2[N_j(m − ŷ_j) + S_j]`.
pub fn functional_squared_hinge_loss(
    batch: &PredictionBatch,
    cfg: &MarginConfig,
    want_gradient: bool,
) -> LossOutput {
    let pair_count = batch.pair_count();
    if pair_count == 0 {
        return LossOutput::zero(batch.len(), 0, want_gradient);
    }
    let plan = build_sweep_plan(batch, cfg);
    sweep(batch, cfg, &plan, want_gradient)
}

fn sweep(batch: &PredictionBatch, cfg: &MarginConfig, plan: &SweepPlan, want_gradient: bool) -> LossOutput {
    let m = cfg.margin();
    let y = batch.predictions();
    let labels = batch.labels();

    let mut q = QuadCoefficients::ZERO;
    let mut value = 0.0;
    let mut gradient = want_gradient.then(|| vec![0.0; y.len()]);

    for &i in &plan.order {
        let yi = y[i];
        if labels[i].is_positive() {
            q.add_positive(yi, m);
        } else {
            value += q.eval(yi);
            if let Some(g) = gradient.as_mut() {
                g[i] = q.derivative(yi);
            }
        }
    }

    if let Some(g) = gradient.as_mut() {
        let mut count = 0.0;
        let mut sum = 0.0;
        for &i in plan.order.iter().rev() {
            let yi = y[i];
            if labels[i].is_positive() {
                g[i] = -2.0 * (count * (m - yi) + sum);
            } else {
                count += 1.0;
                sum += yi;
            }
        }
    }

    LossOutput {
        value,
        gradient,
        pair_count: batch.pair_count(),
    }
    .scaled(cfg.normalization)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairwise::{naive_squared_hinge_loss, Normalization};

    #[test]
    fn plan_augments_negatives_only() {
        let b = PredictionBatch::from_signs(vec![0.3, 0.0], &[1, -1]).unwrap();
        let plan = build_sweep_plan(&b, &MarginConfig::default());
        assert_eq!(plan.augmented, vec![0.3, 1.0]);
        assert_eq!(plan.order, vec![0, 1]);
    }

    #[test]
    fn plan_tie_puts_positive_first() {
        // negative listed first so index order alone would put it first
        let b = PredictionBatch::from_signs(vec![0.0, 1.0], &[-1, 1]).unwrap();
        let plan = build_sweep_plan(&b, &MarginConfig::default());
        assert_eq!(plan.augmented, vec![1.0, 1.0]);
        assert_eq!(plan.order, vec![1, 0]);
        let out = functional_squared_hinge_loss(&b, &MarginConfig::default(), true);
        assert_eq!(out.value, 0.0);
        assert_eq!(out, naive_squared_hinge_loss(&b, &MarginConfig::default(), true));
    }

    #[test]
    fn plan_ties_between_same_class_use_index() {
        let b = PredictionBatch::from_signs(vec![0.5, 0.2, 0.5, 0.2], &[-1, 1, -1, 1]).unwrap();
        let plan = build_sweep_plan(&b, &MarginConfig::default());
        assert_eq!(plan.order, vec![1, 3, 0, 2]);
    }

    #[test]
    fn empty_plan() {
        let b = PredictionBatch::new(vec![], vec![]).unwrap();
        assert!(build_sweep_plan(&b, &MarginConfig::default()).is_empty());
    }

    #[test]
    fn inactive_hinge() {
        let b = PredictionBatch::from_classes(&[2.5], &[0.0]).unwrap();
        let out = functional_squared_hinge_loss(&b, &MarginConfig::default(), true);
        assert_eq!(out.value, 0.0);
        assert_eq!(out.gradient.unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn equal_scores() {
        let b = PredictionBatch::from_classes(&[0.0], &[0.0]).unwrap();
        let out = functional_squared_hinge_loss(&b, &MarginConfig::default(), true);
        assert_eq!(out.value, 1.0);
        assert_eq!(out.gradient.unwrap(), vec![-2.0, 2.0]);
    }

    #[test]
    fn constant_predictions() {
        let b = PredictionBatch::from_classes(&[0.5; 3], &[0.5; 2]).unwrap();
        let total = functional_squared_hinge_loss(&b, &MarginConfig::default(), false);
        assert_eq!(total.value, 6.0);
        let mean = MarginConfig::new(1.0, Normalization::MeanOverPairs).unwrap();
        assert_eq!(functional_squared_hinge_loss(&b, &mean, false).value, 1.0);
    }

    #[test]
    fn matches_oracle_on_mixed_batch() {
        let b = PredictionBatch::from_signs(
            vec![0.9, -0.4, 0.1, 1.7, 0.3, -1.2, 0.8],
            &[1, -1, 1, -1, -1, 1, 1],
        )
        .unwrap();
        for m in [0.0, 0.5, 1.0, 2.0] {
            let cfg = MarginConfig::with_margin(m).unwrap();
            let fast = functional_squared_hinge_loss(&b, &cfg, true);
            let slow = naive_squared_hinge_loss(&b, &cfg, true);
            assert!((fast.value - slow.value).abs() < 1e-12, "m={m}");
            for (a, b) in fast.gradient.unwrap().iter().zip(slow.gradient.unwrap()) {
                assert!((a - b).abs() < 1e-12, "m={m}");
            }
        }
    }
}
