// Time naive and functional losses across sizes and fit log-log slopes.
//
//     cargo run --release --example benchmark [max_n]
//
// The quadratic implementations stop at 20 000 examples.

use std::time::Duration;

use pairwise_auc::bench::{fit_loglog_slopes, run_benchmark, write_bench_csv, BenchConfig, Timing};

fn sizes_up_to(max_n: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut decade = 10;
    while decade <= max_n {
        for step in [1, 2, 5] {
            if decade * step <= max_n {
                sizes.push(decade * step);
            }
        }
        decade *= 10;
    }
    sizes
}

pub fn run_with(max_n: usize) -> Result<(), Box<dyn std::error::Error>> {
    let cfg = BenchConfig {
        sizes: sizes_up_to(max_n),
        timeout: Duration::from_secs(30),
        ..BenchConfig::default()
    };
    let report = run_benchmark(&cfg)?;
    let mut csv = Vec::new();
    write_bench_csv(&report.points, &mut csv)?;
    print!("{}", String::from_utf8(csv)?);
    for (alg, fit) in fit_loglog_slopes(&report.points, Timing::LossAndGradient) {
        println!("{alg:>26}: slope {:?}", fit.slope());
    }
    Ok(())
}

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    run_with(2_000)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    let max_n = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(100_000);
    run_with(max_n)
}
