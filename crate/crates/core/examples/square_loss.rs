// Linear-time all-pairs square loss, checked against the pair-by-pair sum.
//
//     cargo run --example square_loss

use pairwise_auc::{functional_square_loss, naive_square_loss, square_loss_coefficients, MarginConfig, PredictionBatch};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let batch = PredictionBatch::from_classes(&[0.5, -0.2], &[0.1])?;
    let cfg = MarginConfig::with_margin(1.0)?;

    let q = square_loss_coefficients(&batch, &cfg);
    println!("positives fold into {}x^2 + {}x + {}", q.a, q.b, q.c);

    let fast = functional_square_loss(&batch, &cfg, true);
    let slow = naive_square_loss(&batch, &cfg, true);
    println!("functional loss = {}", fast.value);
    println!("naive loss      = {}", slow.value);
    println!("gradient        = {:?}", fast.gradient.as_deref().unwrap_or_default());
    assert!((fast.value - slow.value).abs() < 1e-12);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
