//! Command-line surface and its file formats.
//!
//! * batch files: CSV with header `prediction,label`, labels `-1` or `1`;
//! * `bench.csv`: see [`crate::bench::write_bench_csv`];
//! * run tables: CSV with header
//!   `loss_kind,batch_size,learning_rate,epoch,subtrain_loss,subtrain_auc,valid_auc,diverged`.
//!
//! Numbers are printed with Rust's shortest round-trip formatting, so a
//! printed value parses back to the identical `f64`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::batch::{Label, PredictionBatch};
use crate::bench::{fit_loglog_slopes, run_benchmark, write_bench_csv, Algorithm, BenchConfig, Timing};
use crate::datagen::{apply_imbalance_and_split, generate_gaussian_mixture, SplitSpec};
use crate::error::{Error, Result};
use crate::metrics::roc_auc;
use crate::pairwise::{
    loss_dispatch, naive_square_loss, naive_squared_hinge_loss, LossKind, LossOutput, MarginConfig, Normalization,
};
use crate::trainer::{grid_search, Grid, GridResult, TrainConfig};

pub const BATCH_CSV_HEADER: [&str; 2] = ["prediction", "label"];
pub const RUN_TABLE_HEADER: [&str; 8] = [
    "loss_kind",
    "batch_size",
    "learning_rate",
    "epoch",
    "subtrain_loss",
    "subtrain_auc",
    "valid_auc",
    "diverged",
];

/// Shortest round-trip decimal; negative zero prints as `0`.
pub fn format_f64(x: f64) -> String {
    format!("{}", x + 0.0)
}

/// Parse a `prediction,label` CSV. `source` names the input in error messages.
pub fn parse_batch_csv<R: Read>(reader: R, source: &str) -> Result<PredictionBatch> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
    let err = |line: u64, message: String| Error::Parse {
        path: source.to_string(),
        line,
        message,
    };
    let mut records = r.records();
    match records.next() {
        Some(rec) => {
            let rec = rec?;
            if rec.iter().map(str::trim).ne(BATCH_CSV_HEADER) {
                return Err(err(1, format!("expected header `prediction,label`, got `{}`", rec.iter().collect::<Vec<_>>().join(","))));
            }
        }
        None => return Err(err(1, "missing header `prediction,label`".into())),
    }

    let mut predictions = Vec::new();
    let mut labels = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 2 {
            return Err(err(line, format!("expected 2 fields, got {}", rec.len())));
        }
        let raw = rec[0].trim();
        let y: f64 = raw.parse().map_err(|_| err(line, format!("invalid prediction {raw:?}")))?;
        if !y.is_finite() {
            return Err(err(line, format!("prediction {raw:?} is not finite")));
        }
        let label = match rec[1].trim() {
            "1" => Label::Positive,
            "-1" => Label::Negative,
            other => return Err(err(line, format!("invalid label {other:?}, expected -1 or 1"))),
        };
        predictions.push(y);
        labels.push(label);
    }
    PredictionBatch::new(predictions, labels)
}

pub fn read_batch_csv(path: &Path) -> Result<PredictionBatch> {
    let file = File::open(path)?;
    parse_batch_csv(BufReader::new(file), &path.display().to_string())
}

pub fn write_batch_csv<W: Write>(batch: &PredictionBatch, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(BATCH_CSV_HEADER)?;
    for (y, label) in batch.iter() {
        let label = if label.is_positive() { "1" } else { "-1" };
        w.write_record([format_f64(y).as_str(), label])?;
    }
    w.flush()?;
    Ok(())
}

/// One row of a run table.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTableRow {
    pub loss_kind: LossKind,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epoch: usize,
    pub subtrain_loss: f64,
    pub subtrain_auc: f64,
    pub valid_auc: f64,
    pub diverged: bool,
}

/// Rows for every recorded epoch of every run, in grid order. A diverged run
/// gets one extra row for the epoch it diverged in, with NaN metrics.
pub fn run_table_rows(grid: &GridResult) -> Vec<RunTableRow> {
    let mut rows = Vec::new();
    for run in &grid.runs {
        let c = &run.config;
        let row = |epoch, subtrain_loss, subtrain_auc, valid_auc, diverged| RunTableRow {
            loss_kind: c.loss_kind,
            batch_size: c.batch_size,
            learning_rate: c.learning_rate,
            epoch,
            subtrain_loss,
            subtrain_auc,
            valid_auc,
            diverged,
        };
        for e in &run.epochs {
            rows.push(row(e.epoch, e.subtrain_loss, e.subtrain_auc, e.valid_auc, false));
        }
        if let Some(epoch) = run.diverged_at {
            rows.push(row(epoch, f64::NAN, f64::NAN, f64::NAN, true));
        }
    }
    rows
}

pub fn write_run_table<W: Write>(rows: &[RunTableRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RUN_TABLE_HEADER)?;
    for r in rows {
        w.write_record([
            r.loss_kind.to_string(),
            r.batch_size.to_string(),
            format_f64(r.learning_rate),
            r.epoch.to_string(),
            format_f64(r.subtrain_loss),
            format_f64(r.subtrain_auc),
            format_f64(r.valid_auc),
            r.diverged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_run_table<R: Read>(reader: R) -> Result<Vec<RunTableRow>> {
    let mut r = csv::Reader::from_reader(reader);
    if r.headers()?.iter().ne(RUN_TABLE_HEADER) {
        return Err(Error::Parse {
            path: "<run table>".into(),
            line: 1,
            message: "unexpected header".into(),
        });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |m: String| Error::Parse {
            path: "<run table>".into(),
            line,
            message: m,
        };
        let num = |i: usize| -> Result<f64> { rec[i].parse().map_err(|e| bad(format!("{}: {e}", RUN_TABLE_HEADER[i]))) };
        let int = |i: usize| -> Result<usize> { rec[i].parse().map_err(|e| bad(format!("{}: {e}", RUN_TABLE_HEADER[i]))) };
        rows.push(RunTableRow {
            loss_kind: rec[0].parse()?,
            batch_size: int(1)?,
            learning_rate: num(2)?,
            epoch: int(3)?,
            subtrain_loss: num(4)?,
            subtrain_auc: num(5)?,
            valid_auc: num(6)?,
            diverged: rec[7].parse().map_err(|e| bad(format!("diverged: {e}")))?,
        });
    }
    Ok(rows)
}

#[derive(Debug, Parser)]
#[command(name = "pairwise-auc", version, about = "All-pairs AUC surrogate losses, AUC, benchmarks and training")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the loss of a prediction,label CSV file.
    Loss(LossArgs),
    /// Print the gradient of the loss as `index,gradient` CSV, in input order.
    Grad(LossArgs),
    /// Print the ROC-AUC of a prediction,label CSV file.
    Auc {
        input: PathBuf,
    },
    /// Time loss and gradient computation across input sizes.
    Bench(BenchArgs),
    /// Grid-search a linear model on synthetic imbalanced data.
    Train(TrainArgs),
}

#[derive(Debug, Args)]
pub struct LossArgs {
    pub input: PathBuf,
    #[arg(long, default_value = "squared-hinge")]
    pub loss: LossKind,
    #[arg(long, default_value_t = 1.0)]
    pub margin: f64,
    #[arg(long, default_value = "total")]
    pub normalize: Normalization,
    /// Use the quadratic pair-by-pair implementation.
    #[arg(long)]
    pub naive: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000,100000,1000000")]
    pub sizes: Vec<usize>,
    /// Defaults to every algorithm.
    #[arg(long, value_delimiter = ',')]
    pub algorithms: Vec<Algorithm>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 20_000)]
    pub naive_cutoff: usize,
    /// Seconds per (size, algorithm) cell.
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,
    #[arg(long, default_value_t = 3)]
    pub repetitions: usize,
    #[arg(long, default_value = "bench.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, default_value_t = 0.01)]
    pub imratio: f64,
    #[arg(long, default_value_t = 4.0)]
    pub separation: f64,
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub p: usize,
    /// One or more of square, squared-hinge, logistic.
    #[arg(long, value_delimiter = ',', default_value = "squared-hinge")]
    pub loss: Vec<LossKind>,
    #[arg(long, default_value_t = 1.0)]
    pub margin: f64,
    #[arg(long, default_value = "mean-pairs")]
    pub normalize: Normalization,
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
    pub batch_sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.001,0.01,0.1,1")]
    pub lrs: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "run_table.csv")]
    pub out: PathBuf,
}

impl LossArgs {
    fn evaluate(&self, want_gradient: bool) -> Result<LossOutput> {
        let cfg = MarginConfig::new(self.margin, self.normalize)?;
        let batch = read_batch_csv(&self.input)?;
        Ok(match (self.naive, self.loss) {
            (false, kind) => loss_dispatch(kind, &batch, &cfg, want_gradient),
            (true, LossKind::Square) => naive_square_loss(&batch, &cfg, want_gradient),
            (true, LossKind::SquaredHinge) => naive_squared_hinge_loss(&batch, &cfg, want_gradient),
            (true, LossKind::Logistic) => {
                return Err(Error::InvalidParameter(
                    "--naive applies only to the pairwise losses".into(),
                ))
            }
        })
    }
}

/// Run one parsed command, writing its report to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Loss(args) => {
            let value = args.evaluate(false)?.value;
            writeln!(out, "{}", format_f64(value))?;
        }
        Command::Grad(args) => {
            let grad = args.evaluate(true)?.gradient.expect("gradient requested");
            writeln!(out, "index,gradient")?;
            for (i, g) in grad.iter().enumerate() {
                writeln!(out, "{i},{}", format_f64(*g))?;
            }
        }
        Command::Auc { input } => {
            let auc = roc_auc(&read_batch_csv(input)?)?.auc;
            writeln!(out, "{}", format_f64(auc))?;
        }
        Command::Bench(args) => cmd_bench(args, out)?,
        Command::Train(args) => cmd_train(args, out)?,
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    if !(args.timeout.is_finite() && args.timeout >= 0.0) {
        return Err(Error::InvalidParameter(format!("invalid timeout {}", args.timeout)));
    }
    let cfg = BenchConfig {
        sizes: args.sizes.clone(),
        algorithms: if args.algorithms.is_empty() {
            Algorithm::ALL.to_vec()
        } else {
            args.algorithms.clone()
        },
        seed: args.seed,
        naive_cutoff: args.naive_cutoff,
        timeout: Duration::from_secs_f64(args.timeout),
        repetitions: args.repetitions,
        ..BenchConfig::default()
    };
    let report = run_benchmark(&cfg)?;
    write_bench_csv(&report.points, BufWriter::new(File::create(&args.out)?))?;
    writeln!(out, "wrote {} points to {}", report.points.len(), args.out.display())?;
    for m in &report.missing {
        writeln!(out, "missing n={} algorithm={} reason={:?}", m.n, m.algorithm, m.reason)?;
    }
    for (alg, fit) in fit_loglog_slopes(&report.points, Timing::LossAndGradient) {
        match fit.slope() {
            Some(s) => writeln!(out, "slope {alg} {s:.3}")?,
            None => writeln!(out, "slope {alg} not estimable")?,
        }
    }
    Ok(())
}

fn cmd_train(args: &TrainArgs, out: &mut dyn Write) -> Result<()> {
    let data = generate_gaussian_mixture(args.n, args.p, args.separation, args.seed)?;
    let splits = apply_imbalance_and_split(&data, &SplitSpec::new(args.imratio, args.seed.wrapping_add(1))?)?;
    let base = TrainConfig {
        loss_kind: args.loss.first().copied().unwrap_or(LossKind::SquaredHinge),
        margin: args.margin,
        normalization: args.normalize,
        epochs: args.epochs,
        seed: args.seed.wrapping_add(2),
        ..TrainConfig::default()
    };
    let grid = Grid {
        loss_kinds: args.loss.clone(),
        batch_sizes: args.batch_sizes.clone(),
        learning_rates: args.lrs.clone(),
    };
    let result = grid_search(&splits, &grid, &base)?;
    write_run_table(&run_table_rows(&result), BufWriter::new(File::create(&args.out)?))?;

    let best = result.best_run();
    let epoch = best.selected_epoch.expect("selected run has an epoch");
    writeln!(
        out,
        "selected loss_kind={} batch_size={} learning_rate={} epoch={} valid_auc={} test_auc={}",
        best.config.loss_kind,
        best.config.batch_size,
        format_f64(best.config.learning_rate),
        epoch,
        format_f64(best.epochs[epoch - 1].valid_auc),
        format_f64(best.test_auc.expect("selected run has a test AUC")),
    )?;
    Ok(())
}
