//! Wall-clock timing of the loss implementations across input sizes, and
//! log-log slope fitting of the results.

use std::collections::BTreeMap;
use std::fmt;
use std::hint::black_box;
use std::io::{Read, Write};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::batch::{Label, PredictionBatch};
use crate::error::{Error, Result};
use crate::metrics::logistic_loss;
use crate::pairwise::{
    functional_square_loss, functional_squared_hinge_loss, naive_square_loss, naive_squared_hinge_loss,
    MarginConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    NaiveSquare,
    NaiveSquaredHinge,
    FunctionalSquare,
    FunctionalSquaredHinge,
    Logistic,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::NaiveSquare,
        Algorithm::NaiveSquaredHinge,
        Algorithm::FunctionalSquare,
        Algorithm::FunctionalSquaredHinge,
        Algorithm::Logistic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::NaiveSquare => "naive-square",
            Algorithm::NaiveSquaredHinge => "naive-squared-hinge",
            Algorithm::FunctionalSquare => "functional-square",
            Algorithm::FunctionalSquaredHinge => "functional-squared-hinge",
            Algorithm::Logistic => "logistic",
        }
    }

    pub fn is_quadratic(self) -> bool {
        matches!(self, Algorithm::NaiveSquare | Algorithm::NaiveSquaredHinge)
    }

    /// Evaluate this algorithm with margin 1 and total normalization; returns
    /// the loss value (and the first gradient entry folded in, so the
    /// gradient cannot be optimized away).
    pub fn evaluate(self, batch: &PredictionBatch, cfg: &MarginConfig, want_gradient: bool) -> f64 {
        let out = match self {
            Algorithm::NaiveSquare => naive_square_loss(batch, cfg, want_gradient),
            Algorithm::NaiveSquaredHinge => naive_squared_hinge_loss(batch, cfg, want_gradient),
            Algorithm::FunctionalSquare => functional_square_loss(batch, cfg, want_gradient),
            Algorithm::FunctionalSquaredHinge => functional_squared_hinge_loss(batch, cfg, want_gradient),
            Algorithm::Logistic => logistic_loss(batch, want_gradient),
        };
        out.value + out.gradient.and_then(|g| g.first().copied()).unwrap_or(0.0)
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm {s:?}")))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Median timings for one (size, algorithm) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchPoint {
    pub n: usize,
    pub algorithm: Algorithm,
    /// Loss value only.
    pub seconds_loss: f64,
    /// Loss value and full gradient.
    pub seconds_grad: f64,
    pub repetitions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissingReason {
    AboveNaiveCutoff,
    Timeout,
    /// A smaller size of the same algorithm already timed out.
    SkippedAfterTimeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MissingPoint {
    pub n: usize,
    pub algorithm: Algorithm,
    pub reason: MissingReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    /// Ascending.
    pub sizes: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub seed: u64,
    /// Largest `n` attempted for the quadratic algorithms.
    pub naive_cutoff: usize,
    /// Budget per (size, algorithm) cell, covering both timings. Checked
    /// between repetitions, so a single call that runs long is not interrupted.
    pub timeout: Duration,
    pub repetitions: usize,
    /// Each repetition repeats the call until at least this much time has
    /// passed and reports the per-call average, so tiny inputs still get a
    /// measurable duration.
    pub min_sample: Duration,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![10, 100, 1000, 10_000],
            algorithms: Algorithm::ALL.to_vec(),
            seed: 1,
            naive_cutoff: 20_000,
            timeout: Duration::from_secs(60),
            repetitions: 3,
            min_sample: Duration::from_millis(2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub points: Vec<BenchPoint>,
    pub missing: Vec<MissingPoint>,
}

impl BenchReport {
    pub fn point(&self, n: usize, algorithm: Algorithm) -> Option<&BenchPoint> {
        self.points.iter().find(|p| p.n == n && p.algorithm == algorithm)
    }
}

/// `n` standard-normal predictions with alternating labels (positive first).
/// Depends only on `(n, seed)`.
pub fn benchmark_batch(n: usize, seed: u64) -> PredictionBatch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let predictions = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let labels = (0..n)
        .map(|i| if i % 2 == 0 { Label::Positive } else { Label::Negative })
        .collect();
    PredictionBatch::new(predictions, labels).expect("normal samples are finite")
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        0.5 * (xs[mid - 1] + xs[mid])
    }
}

/// Median seconds per call, or `None` once `deadline` has passed.
fn measure(mut call: impl FnMut() -> f64, repetitions: usize, min_sample: Duration, deadline: Instant) -> Option<f64> {
    // warm-up, discarded
    let start = Instant::now();
    black_box(call());
    let warm = start.elapsed();
    if Instant::now() > deadline {
        return None;
    }
    let iters = if warm >= min_sample {
        1
    } else {
        (min_sample.as_secs_f64() / warm.as_secs_f64().max(1e-9)).ceil().min(1e6) as u32
    };
    let mut samples = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        let start = Instant::now();
        for _ in 0..iters {
            black_box(call());
        }
        samples.push(start.elapsed().as_secs_f64() / f64::from(iters));
        if Instant::now() > deadline {
            return None;
        }
    }
    Some(median(samples))
}

/// Time every (size, algorithm) cell sequentially.
///
/// Batch generation is outside the timed region; everything inside the loss
/// call (sorting, allocation of the gradient) is inside it.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.repetitions < 3 {
        return Err(Error::InvalidParameter("repetitions must be >= 3".into()));
    }
    if !cfg.sizes.is_sorted() {
        return Err(Error::InvalidParameter("sizes must be ascending".into()));
    }
    let margin = MarginConfig::default();
    let mut report = BenchReport::default();
    let mut timed_out: Vec<Algorithm> = Vec::new();

    for &n in &cfg.sizes {
        let batch = benchmark_batch(n, cfg.seed);
        for &algorithm in &cfg.algorithms {
            let reason = if algorithm.is_quadratic() && n > cfg.naive_cutoff {
                Some(MissingReason::AboveNaiveCutoff)
            } else if timed_out.contains(&algorithm) {
                Some(MissingReason::SkippedAfterTimeout)
            } else {
                None
            };
            if let Some(reason) = reason {
                report.missing.push(MissingPoint { n, algorithm, reason });
                continue;
            }

            let deadline = Instant::now() + cfg.timeout;
            let loss = measure(|| algorithm.evaluate(&batch, &margin, false), cfg.repetitions, cfg.min_sample, deadline);
            let grad = loss.and_then(|_| {
                measure(|| algorithm.evaluate(&batch, &margin, true), cfg.repetitions, cfg.min_sample, deadline)
            });
            match (loss, grad) {
                (Some(seconds_loss), Some(seconds_grad)) => report.points.push(BenchPoint {
                    n,
                    algorithm,
                    seconds_loss,
                    seconds_grad,
                    repetitions: cfg.repetitions,
                }),
                _ => {
                    timed_out.push(algorithm);
                    report.missing.push(MissingPoint {
                        n,
                        algorithm,
                        reason: MissingReason::Timeout,
                    });
                }
            }
        }
    }
    Ok(report)
}

pub const BENCH_CSV_HEADER: [&str; 5] = ["n", "algorithm", "seconds_loss", "seconds_grad", "repetitions"];

/// `n,algorithm,seconds_loss,seconds_grad,repetitions`
pub fn write_bench_csv<W: Write>(points: &[BenchPoint], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(BENCH_CSV_HEADER)?;
    for p in points {
        w.write_record([
            p.n.to_string(),
            p.algorithm.to_string(),
            format!("{:?}", p.seconds_loss),
            format!("{:?}", p.seconds_grad),
            p.repetitions.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_bench_csv<R: Read>(reader: R) -> Result<Vec<BenchPoint>> {
    let mut r = csv::Reader::from_reader(reader);
    if r.headers()?.iter().ne(BENCH_CSV_HEADER) {
        return Err(Error::Parse {
            path: "<bench>".into(),
            line: 1,
            message: format!("expected header {}", BENCH_CSV_HEADER.join(",")),
        });
    }
    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize| rec.get(i).unwrap_or("");
        let bad = |e: String| Error::Parse {
            path: "<bench>".into(),
            line,
            message: e,
        };
        points.push(BenchPoint {
            n: field(0).parse().map_err(|e| bad(format!("n: {e}")))?,
            algorithm: field(1).parse()?,
            seconds_loss: field(2).parse().map_err(|e| bad(format!("seconds_loss: {e}")))?,
            seconds_grad: field(3).parse().map_err(|e| bad(format!("seconds_grad: {e}")))?,
            repetitions: field(4).parse().map_err(|e| bad(format!("repetitions: {e}")))?,
        });
    }
    Ok(points)
}

/// Which timing column a fit uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timing {
    Loss,
    LossAndGradient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlopeFit {
    Estimate {
        slope: f64,
        points_used: usize,
        /// Fewer than three points in the fit, or less than two decades of
        /// sizes overall.
        low_confidence: bool,
    },
    NotEstimable,
}

impl SlopeFit {
    pub fn slope(&self) -> Option<f64> {
        match *self {
            SlopeFit::Estimate { slope, .. } => Some(slope),
            SlopeFit::NotEstimable => None,
        }
    }
}

/// Ordinary least-squares slope of `ys` on `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Per-algorithm OLS slope of `log t` on `log n`, using the sizes within a
/// factor of ten of the largest one (at least the two largest sizes).
pub fn fit_loglog_slopes(points: &[BenchPoint], timing: Timing) -> BTreeMap<Algorithm, SlopeFit> {
    let mut by_alg: BTreeMap<Algorithm, Vec<(f64, f64)>> = BTreeMap::new();
    for p in points {
        let t = match timing {
            Timing::Loss => p.seconds_loss,
            Timing::LossAndGradient => p.seconds_grad,
        };
        if p.n > 0 && t > 0.0 {
            by_alg.entry(p.algorithm).or_default().push((p.n as f64, t));
        }
    }
    by_alg
        .into_iter()
        .map(|(alg, mut pts)| {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            pts.dedup_by(|a, b| a.0 == b.0);
            if pts.len() < 2 {
                return (alg, SlopeFit::NotEstimable);
            }
            let n_max = pts[pts.len() - 1].0;
            let n_min = pts[0].0;
            let in_decade = pts.iter().filter(|(n, _)| *n >= n_max / 10.0).count();
            let used = &pts[pts.len() - in_decade.max(2)..];
            let xs: Vec<f64> = used.iter().map(|(n, _)| n.ln()).collect();
            let ys: Vec<f64> = used.iter().map(|(_, t)| t.ln()).collect();
            let fit = SlopeFit::Estimate {
                slope: ols_slope(&xs, &ys),
                points_used: used.len(),
                low_confidence: used.len() < 3 || n_max / n_min < 100.0,
            };
            (alg, fit)
        })
        .collect()
}
