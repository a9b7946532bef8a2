// Train a linear scorer on imbalanced synthetic data with the squared hinge
// and logistic losses, selecting hyper-parameters and epoch by validation AUC.
//
//     cargo run --release --example train_imbalanced

use pairwise_auc::datagen::{apply_imbalance_and_split, gaussian_mixture_bayes_auc, generate_gaussian_mixture, SplitSpec};
use pairwise_auc::trainer::{grid_search, Grid, TrainConfig};
use pairwise_auc::LossKind;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let separation = 4.0;
    let data = generate_gaussian_mixture(10_000, 10, separation, 42)?;
    let splits = apply_imbalance_and_split(&data, &SplitSpec::new(0.01, 43)?)?;
    println!(
        "subtrain {} ({} positive), validation {} ({} positive), test {}",
        splits.subtrain.len(),
        splits.subtrain.n_positive(),
        splits.validation.len(),
        splits.validation.n_positive(),
        splits.test.len()
    );
    println!("Bayes-optimal AUC {:.4}", gaussian_mixture_bayes_auc(separation));

    let base = TrainConfig {
        epochs: 10,
        seed: 44,
        ..TrainConfig::default()
    };
    for loss in [LossKind::SquaredHinge, LossKind::Logistic] {
        let grid = Grid {
            loss_kinds: vec![loss],
            batch_sizes: vec![100, 1000],
            learning_rates: vec![0.01, 0.1, 1.0],
        };
        let result = grid_search(&splits, &grid, &base)?;
        let best = result.best_run();
        println!(
            "{loss:>14}: batch {} lr {} epoch {:?} -> test AUC {:.4}",
            best.config.batch_size,
            best.config.learning_rate,
            best.selected_epoch,
            best.test_auc.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
