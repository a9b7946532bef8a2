// Log-linear all-pairs squared hinge loss: the sorted sweep and its gradient.
//
//     cargo run --example squared_hinge

use pairwise_auc::{
    build_sweep_plan, functional_squared_hinge_loss, naive_squared_hinge_loss, MarginConfig, Normalization,
    PredictionBatch,
};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let batch = PredictionBatch::from_signs(vec![2.5, 0.3, 0.0, -0.4, 0.9], &[1, 1, -1, -1, -1])?;
    let cfg = MarginConfig::with_margin(1.0)?;

    let plan = build_sweep_plan(&batch, &cfg);
    println!("augmented scores: {:?}", plan.augmented);
    println!("sweep order:      {:?}", plan.order);

    let fast = functional_squared_hinge_loss(&batch, &cfg, true);
    let slow = naive_squared_hinge_loss(&batch, &cfg, true);
    println!("loss {} over {} pairs (naive {})", fast.value, fast.pair_count, slow.value);
    for (i, (g, h)) in fast.gradient.iter().flatten().zip(slow.gradient.iter().flatten()).enumerate() {
        println!("  d/dy[{i}] = {g:>8.4}  (naive {h:>8.4})");
        assert!((g - h).abs() < 1e-12);
    }

    let mean = MarginConfig::new(1.0, Normalization::MeanOverPairs)?;
    println!("mean over pairs: {}", functional_squared_hinge_loss(&batch, &mean, false).value);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
