// ROC-AUC with tie handling, and the per-example logistic loss.
//
//     cargo run --example auc

use pairwise_auc::{logistic_loss, roc_auc, PredictionBatch};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let batch = PredictionBatch::from_classes(&[0.9, 0.4], &[0.5, 0.1])?;
    println!("auc = {}", roc_auc(&batch)?.auc);

    let tied = PredictionBatch::from_classes(&[0.3, 0.3, 0.8], &[0.3, 0.1])?;
    let r = roc_auc(&tied)?;
    println!("with ties: auc = {} ({} positives, {} negatives)", r.auc, r.n_pos, r.n_neg);

    let single = PredictionBatch::from_classes(&[0.3], &[])?;
    println!("single class: {}", roc_auc(&single).unwrap_err());

    let out = logistic_loss(&batch, true);
    println!("logistic loss = {:.6}, gradient = {:?}", out.value, out.gradient.unwrap_or_default());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
