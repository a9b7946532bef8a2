// Write a `prediction,label` file, read it back and evaluate it, the same
// format the `pairwise-auc loss|grad|auc` commands consume.
//
//     cargo run --example csv_batch

use std::fs::File;

use pairwise_auc::cli::{read_batch_csv, write_batch_csv};
use pairwise_auc::{functional_squared_hinge_loss, roc_auc, MarginConfig, PredictionBatch};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let batch = PredictionBatch::from_signs(vec![1.25, -0.5, 0.1, 0.7], &[1, -1, -1, 1])?;
    let dir = std::env::temp_dir().join(format!("pairwise-auc-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("batch.csv");
    write_batch_csv(&batch, File::create(&path)?)?;
    print!("{}", std::fs::read_to_string(&path)?);

    let back = read_batch_csv(&path)?;
    assert_eq!(back, batch);
    let loss = functional_squared_hinge_loss(&back, &MarginConfig::default(), false).value;
    println!("squared hinge = {loss}, auc = {}", roc_auc(&back)?.auc);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
