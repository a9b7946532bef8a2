// Compare analytic gradients of every loss with central finite differences.
//
//     cargo run --example gradient_check

use pairwise_auc::bench::benchmark_batch;
use pairwise_auc::{loss_dispatch, LossKind, MarginConfig, PredictionBatch};

fn finite_difference(kind: LossKind, batch: &PredictionBatch, cfg: &MarginConfig, i: usize, h: f64) -> f64 {
    let shifted = |d: f64| {
        let mut y = batch.predictions().to_vec();
        y[i] += d;
        let b = PredictionBatch::new(y, batch.labels().to_vec()).expect("finite");
        loss_dispatch(kind, &b, cfg, false).value
    };
    (shifted(h) - shifted(-h)) / (2.0 * h)
}

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let batch = benchmark_batch(60, 3);
    let cfg = MarginConfig::with_margin(1.0)?;
    for kind in LossKind::ALL {
        let analytic = loss_dispatch(kind, &batch, &cfg, true).gradient.unwrap_or_default();
        let worst = (0..batch.len())
            .map(|i| {
                let fd = finite_difference(kind, &batch, &cfg, i, 1e-5);
                (fd - analytic[i]).abs() / analytic[i].abs().max(1.0)
            })
            .fold(0.0, f64::max);
        println!("{kind:>14}: max relative error {worst:.2e}");
        assert!(worst < 1e-5);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
