//! Linear scorer trained by minibatch SGD on a chosen surrogate, with epoch
//! and hyper-parameter selection by validation AUC.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::datagen::{Dataset, Splits};
use crate::error::{Error, Result};
use crate::metrics::roc_auc;
use crate::pairwise::{loss_dispatch, LossKind, MarginConfig, Normalization};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearModel {
    pub fn zeros(n_features: usize) -> Self {
        LinearModel {
            weights: vec![0.0; n_features],
            bias: 0.0,
        }
    }

    pub fn predict(&self, data: &Dataset) -> Vec<f64> {
        data.scores(&self.weights, self.bias)
    }

    pub fn is_finite(&self) -> bool {
        self.bias.is_finite() && self.weights.iter().all(|w| w.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub loss_kind: LossKind,
    pub margin: f64,
    pub normalization: Normalization,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            loss_kind: LossKind::SquaredHinge,
            margin: 1.0,
            normalization: Normalization::MeanOverPairs,
            batch_size: 100,
            learning_rate: 0.1,
            epochs: 10,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<MarginConfig> {
        if self.batch_size == 0 {
            return Err(Error::InvalidParameter("batch_size must be >= 1".into()));
        }
        // zero is allowed as a no-op baseline
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "learning_rate must be finite and >= 0, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidParameter("epochs must be >= 1".into()));
        }
        MarginConfig::new(self.margin, self.normalization)
    }
}

/// Full-set metrics after one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    pub subtrain_loss: f64,
    pub subtrain_auc: f64,
    pub valid_auc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainRun {
    pub config: TrainConfig,
    pub epochs: Vec<EpochRecord>,
    /// Epoch with the highest validation AUC, earliest on ties. `None` when
    /// no epoch completed.
    pub selected_epoch: Option<usize>,
    /// Test AUC of the model as it was at `selected_epoch`.
    pub test_auc: Option<f64>,
    pub diverged: bool,
    /// Epoch during which a non-finite loss or parameter appeared.
    pub diverged_at: Option<usize>,
    /// Model at `selected_epoch`.
    pub model: Option<LinearModel>,
}

impl TrainRun {
    pub fn best_valid_auc(&self) -> Option<f64> {
        self.selected_epoch.map(|e| self.epochs[e - 1].valid_auc)
    }
}

/// Index of the maximum, earliest on ties. NaN entries are skipped.
pub(crate) fn argmax_earliest(values: impl IntoIterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// One SGD step on the rows `idx`. Returns the minibatch loss, or `None`
/// when the scores are no longer finite.
fn sgd_step(
    model: &mut LinearModel,
    data: &Dataset,
    idx: &[usize],
    kind: LossKind,
    cfg: &MarginConfig,
    learning_rate: f64,
) -> Option<f64> {
    let batch = data.select(idx);
    let scores = model.predict(&batch);
    let batch = batch.batch(scores).ok()?;
    let out = loss_dispatch(kind, &batch, cfg, true);
    if !out.value.is_finite() {
        return None;
    }
    let grad = out.gradient.expect("gradient requested");
    // ∂L/∂w = Xᵀ ∂L/∂ŷ
    let mut grad_w = vec![0.0; model.weights.len()];
    for (r, &g) in grad.iter().enumerate() {
        if g != 0.0 {
            for (gw, x) in grad_w.iter_mut().zip(data.row(idx[r])) {
                *gw += g * x;
            }
        }
    }
    let grad_b: f64 = grad.iter().sum();
    for (w, gw) in model.weights.iter_mut().zip(&grad_w) {
        *w -= learning_rate * gw;
    }
    model.bias -= learning_rate * grad_b;
    Some(out.value)
}

fn full_metrics(model: &LinearModel, splits: &Splits, kind: LossKind, cfg: &MarginConfig) -> Result<Option<(f64, f64, f64)>> {
    let sub_scores = model.predict(&splits.subtrain);
    let valid_scores = model.predict(&splits.validation);
    if sub_scores.iter().chain(&valid_scores).any(|s| !s.is_finite()) {
        return Ok(None);
    }
    let sub = splits.subtrain.batch(sub_scores)?;
    let loss = loss_dispatch(kind, &sub, cfg, false).value;
    if !loss.is_finite() {
        return Ok(None);
    }
    let sub_auc = roc_auc(&sub)?.auc;
    let valid_auc = roc_auc(&splits.validation.batch(valid_scores)?)?.auc;
    Ok(Some((loss, sub_auc, valid_auc)))
}

/// Train a zero-initialized linear model.
///
/// Each epoch shuffles the subtrain rows (seeded), takes SGD steps on
/// consecutive minibatches, then records loss and AUC on the full subtrain
/// and validation sets. A non-finite loss or parameter stops the run and
/// marks it diverged. Fails only on invalid configuration or splits whose
/// subtrain, validation or test set lacks a class.
pub fn sgd_train(splits: &Splits, config: &TrainConfig) -> Result<TrainRun> {
    let cfg = config.validate()?;
    if splits.subtrain.is_empty() {
        return Err(Error::InvalidParameter("empty subtrain set".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = LinearModel::zeros(splits.subtrain.n_features());
    let mut order: Vec<usize> = (0..splits.subtrain.len()).collect();

    let mut run = TrainRun {
        config: *config,
        epochs: Vec::with_capacity(config.epochs),
        selected_epoch: None,
        test_auc: None,
        diverged: false,
        diverged_at: None,
        model: None,
    };
    let mut best_model: Option<LinearModel> = None;

    'epochs: for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(config.batch_size) {
            let ok = sgd_step(&mut model, &splits.subtrain, chunk, config.loss_kind, &cfg, config.learning_rate);
            if ok.is_none() || !model.is_finite() {
                run.diverged = true;
                run.diverged_at = Some(epoch);
                break 'epochs;
            }
        }
        let Some((subtrain_loss, subtrain_auc, valid_auc)) = full_metrics(&model, splits, config.loss_kind, &cfg)? else {
            run.diverged = true;
            run.diverged_at = Some(epoch);
            break;
        };
        let improved = run.epochs.iter().all(|r| valid_auc > r.valid_auc);
        run.epochs.push(EpochRecord {
            epoch,
            subtrain_loss,
            subtrain_auc,
            valid_auc,
        });
        if improved {
            run.selected_epoch = Some(epoch);
            best_model = Some(model.clone());
        }
    }

    if let Some(best) = &best_model {
        let test = splits.test.batch(best.predict(&splits.test))?;
        run.test_auc = Some(roc_auc(&test)?.auc);
    }
    run.model = best_model;
    Ok(run)
}

/// Every grid cell's run plus the index of the selected one.
#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub runs: Vec<TrainRun>,
    pub best: usize,
}

impl GridResult {
    pub fn best_run(&self) -> &TrainRun {
        &self.runs[self.best]
    }
}

/// Hyper-parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub loss_kinds: Vec<LossKind>,
    pub batch_sizes: Vec<usize>,
    pub learning_rates: Vec<f64>,
}

impl Grid {
    /// Cells in loss, batch size, learning rate order.
    pub fn configs(&self, base: &TrainConfig) -> Vec<TrainConfig> {
        let mut out = Vec::new();
        for &loss_kind in &self.loss_kinds {
            for &batch_size in &self.batch_sizes {
                for &learning_rate in &self.learning_rates {
                    out.push(TrainConfig {
                        loss_kind,
                        batch_size,
                        learning_rate,
                        ..*base
                    });
                }
            }
        }
        out
    }
}

/// Train every grid cell (in parallel) and select the run whose best epoch
/// has the highest validation AUC; earlier cells win ties.
pub fn grid_search(splits: &Splits, grid: &Grid, base: &TrainConfig) -> Result<GridResult> {
    let configs = grid.configs(base);
    if configs.is_empty() {
        return Err(Error::InvalidParameter("empty hyper-parameter grid".into()));
    }
    let runs = configs
        .par_iter()
        .map(|c| sgd_train(splits, c))
        .collect::<Result<Vec<_>>>()?;
    let best = argmax_earliest(runs.iter().map(|r| r.best_valid_auc().unwrap_or(f64::NAN)))
        .ok_or(Error::AllDiverged { cells: runs.len() })?;
    Ok(GridResult { runs, best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{apply_imbalance_and_split, generate_gaussian_mixture, SplitSpec};

    fn splits(sep: f64, imratio: f64) -> Splits {
        let d = generate_gaussian_mixture(2000, 5, sep, 21).unwrap();
        apply_imbalance_and_split(&d, &SplitSpec::new(imratio, 3).unwrap()).unwrap()
    }

    #[test]
    fn argmax_prefers_earliest() {
        assert_eq!(argmax_earliest([0.5, 0.9, 0.9, 0.1]), Some(1));
        assert_eq!(argmax_earliest([f64::NAN, 0.2]), Some(1));
        assert_eq!(argmax_earliest([f64::NAN]), None);
        assert_eq!(argmax_earliest(std::iter::empty()), None);
    }

    #[test]
    fn zero_learning_rate_freezes_metrics() {
        let s = splits(2.0, 0.1);
        let cfg = TrainConfig {
            learning_rate: 0.0,
            epochs: 4,
            ..TrainConfig::default()
        };
        let run = sgd_train(&s, &cfg).unwrap();
        assert_eq!(run.epochs.len(), 4);
        for r in &run.epochs {
            assert_eq!(
                (r.subtrain_loss, r.subtrain_auc, r.valid_auc),
                (run.epochs[0].subtrain_loss, run.epochs[0].subtrain_auc, run.epochs[0].valid_auc)
            );
        }
        assert_eq!(run.selected_epoch, Some(1));
        assert_eq!(run.model.unwrap(), LinearModel::zeros(5));
    }

    #[test]
    fn deterministic() {
        let s = splits(2.0, 0.1);
        let cfg = TrainConfig {
            batch_size: 32,
            epochs: 3,
            ..TrainConfig::default()
        };
        assert_eq!(sgd_train(&s, &cfg).unwrap(), sgd_train(&s, &cfg).unwrap());
    }

    #[test]
    fn huge_learning_rate_diverges_without_panicking() {
        let s = splits(2.0, 0.1);
        for loss_kind in [LossKind::Square, LossKind::SquaredHinge] {
            let cfg = TrainConfig {
                loss_kind,
                normalization: Normalization::TotalOverPairs,
                learning_rate: 1e200,
                batch_size: 500,
                epochs: 5,
                ..TrainConfig::default()
            };
            let run = sgd_train(&s, &cfg).unwrap();
            assert!(run.diverged, "{loss_kind}");
            assert!(run.diverged_at.is_some());
        }
    }

    #[test]
    fn single_class_minibatch_leaves_model_unchanged() {
        let s = splits(2.0, 0.1);
        let negatives: Vec<usize> = (0..s.subtrain.len()).filter(|&i| !s.subtrain.labels()[i].is_positive()).take(20).collect();
        let cfg = MarginConfig::default();
        let mut model = LinearModel {
            weights: vec![0.3, -0.1, 0.2, 0.0, 1.0],
            bias: 0.5,
        };
        let before = model.clone();
        for kind in [LossKind::Square, LossKind::SquaredHinge] {
            let loss = sgd_step(&mut model, &s.subtrain, &negatives, kind, &cfg, 10.0).unwrap();
            assert_eq!(loss, 0.0);
            assert_eq!(model, before);
        }
    }

    #[test]
    fn singleton_grid_equals_single_run() {
        let s = splits(2.0, 0.1);
        let base = TrainConfig {
            epochs: 3,
            ..TrainConfig::default()
        };
        let grid = Grid {
            loss_kinds: vec![base.loss_kind],
            batch_sizes: vec![base.batch_size],
            learning_rates: vec![base.learning_rate],
        };
        let g = grid_search(&s, &grid, &base).unwrap();
        assert_eq!(g.runs.len(), 1);
        assert_eq!(g.best_run(), &sgd_train(&s, &base).unwrap());
    }

    #[test]
    fn all_diverged_grid_is_error() {
        let s = splits(2.0, 0.1);
        let base = TrainConfig {
            normalization: Normalization::TotalOverPairs,
            epochs: 2,
            ..TrainConfig::default()
        };
        let grid = Grid {
            loss_kinds: vec![LossKind::Square],
            batch_sizes: vec![1000],
            learning_rates: vec![1e250, 1e300],
        };
        assert!(matches!(grid_search(&s, &grid, &base), Err(Error::AllDiverged { cells: 2 })));
    }

    #[test]
    fn full_batch_small_steps_decrease_loss() {
        let d = generate_gaussian_mixture(3000, 10, 4.0, 5).unwrap();
        let s = apply_imbalance_and_split(&d, &SplitSpec::new(0.1, 6).unwrap()).unwrap();
        for loss_kind in [LossKind::Square, LossKind::SquaredHinge] {
            let cfg = TrainConfig {
                loss_kind,
                batch_size: s.subtrain.len(),
                learning_rate: 1e-3,
                epochs: 10,
                ..TrainConfig::default()
            };
            let run = sgd_train(&s, &cfg).unwrap();
            let losses: Vec<f64> = run.epochs.iter().map(|e| e.subtrain_loss).collect();
            assert_eq!(losses.len(), 10);
            assert!(losses.windows(2).all(|w| w[1] < w[0]), "{loss_kind}: {losses:?}");
        }
    }

    #[test]
    fn no_signal_gives_chance_auc() {
        let d = generate_gaussian_mixture(10_000, 5, 0.0, 12).unwrap();
        let s = apply_imbalance_and_split(&d, &SplitSpec::new(0.1, 13).unwrap()).unwrap();
        for loss_kind in LossKind::ALL {
            let cfg = TrainConfig {
                loss_kind,
                epochs: 5,
                ..TrainConfig::default()
            };
            let auc = sgd_train(&s, &cfg).unwrap().test_auc.unwrap();
            assert!((auc - 0.5).abs() <= 0.05, "{loss_kind}: {auc}");
        }
    }

    #[test]
    fn extreme_imbalance_grid_selects_argmax() {
        let d = generate_gaussian_mixture(10_000, 5, 3.0, 14).unwrap();
        let s = apply_imbalance_and_split(&d, &SplitSpec::new(0.001, 15).unwrap()).unwrap();
        assert!(s.validation.n_positive() >= 1);
        let grid = Grid {
            loss_kinds: vec![LossKind::SquaredHinge],
            batch_sizes: vec![10, 1000],
            learning_rates: vec![0.01, 0.1],
        };
        let g = grid_search(&s, &grid, &TrainConfig { epochs: 5, ..TrainConfig::default() }).unwrap();
        let best = g.best_run().best_valid_auc().unwrap();
        for (i, run) in g.runs.iter().enumerate() {
            let v = run.best_valid_auc().unwrap();
            assert!(v < best || (v == best && i >= g.best), "cell {i} beats the selection");
        }
    }

    #[test]
    fn validation_errors() {
        let s = splits(2.0, 0.1);
        for cfg in [
            TrainConfig { batch_size: 0, ..TrainConfig::default() },
            TrainConfig { learning_rate: -1.0, ..TrainConfig::default() },
            TrainConfig { epochs: 0, ..TrainConfig::default() },
            TrainConfig { margin: -1.0, ..TrainConfig::default() },
        ] {
            assert!(sgd_train(&s, &cfg).is_err());
        }
    }
}
