//! All-pairs AUC surrogate losses.
//!
//! Both losses sum `ℓ(ŷ_j − ŷ_k)` over every pair of a positive example `j`
//! and a negative example `k`:
//!
//! - square loss, `ℓ(z) = (m − z)²`, computed in linear time by
//!   [`functional_square_loss`];
//! - squared hinge loss, `ℓ(z) = (m − z)²₊`, computed in log-linear time by
//!   [`functional_squared_hinge_loss`].
//!
//! The per-pair double loops in [`naive`] are kept as reference oracles.
//! Every function accepts single-class and empty batches and returns a zero
//! loss and a zero gradient for them.

mod coefficients;
pub mod naive;
mod square;
mod squared_hinge;

pub use coefficients::{square_loss_coefficients, QuadCoefficients};
pub use naive::{naive_square_loss, naive_squared_hinge_loss};
pub use square::functional_square_loss;
pub use squared_hinge::{build_sweep_plan, functional_squared_hinge_loss, SweepPlan};

use std::fmt;
use std::str::FromStr;

use crate::batch::PredictionBatch;
use crate::error::{Error, Result};
use crate::metrics::logistic_loss;

/// How the pair sum is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Plain sum over all pairs.
    #[default]
    TotalOverPairs,
    /// Sum divided by `n⁺·n⁻` (zero when there are no pairs).
    MeanOverPairs,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::TotalOverPairs => "total",
            Normalization::MeanOverPairs => "mean-pairs",
        }
    }

    pub(crate) fn scale(self, pair_count: u64) -> f64 {
        match self {
            Normalization::MeanOverPairs if pair_count > 0 => 1.0 / pair_count as f64,
            _ => 1.0,
        }
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "total" => Ok(Normalization::TotalOverPairs),
            "mean-pairs" => Ok(Normalization::MeanOverPairs),
            other => Err(Error::InvalidParameter(format!(
                "unknown normalization {other:?} (expected total or mean-pairs)"
            ))),
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Margin `m ≥ 0` and output normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginConfig {
    margin: f64,
    pub normalization: Normalization,
}

impl MarginConfig {
    pub fn new(margin: f64, normalization: Normalization) -> Result<Self> {
        if !margin.is_finite() || margin < 0.0 {
            return Err(Error::InvalidMargin(margin));
        }
        Ok(MarginConfig {
            margin,
            normalization,
        })
    }

    /// Total (un-normalized) loss with the given margin.
    pub fn with_margin(margin: f64) -> Result<Self> {
        Self::new(margin, Normalization::TotalOverPairs)
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }
}

impl Default for MarginConfig {
    fn default() -> Self {
        MarginConfig {
            margin: 1.0,
            normalization: Normalization::TotalOverPairs,
        }
    }
}

/// Loss value with an optional gradient with respect to each prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct LossOutput {
    pub value: f64,
    pub gradient: Option<Vec<f64>>,
    pub pair_count: u64,
}

impl LossOutput {
    pub(crate) fn zero(n: usize, pair_count: u64, want_gradient: bool) -> Self {
        LossOutput {
            value: 0.0,
            gradient: want_gradient.then(|| vec![0.0; n]),
            pair_count,
        }
    }

    pub(crate) fn scaled(mut self, normalization: Normalization) -> Self {
        let s = normalization.scale(self.pair_count);
        if s != 1.0 {
            self.value *= s;
            if let Some(g) = self.gradient.as_mut() {
                g.iter_mut().for_each(|x| *x *= s);
            }
        }
        self
    }
}

/// Which surrogate to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossKind {
    Square,
    SquaredHinge,
    /// Per-example logistic loss; ignores the margin configuration.
    Logistic,
}

impl LossKind {
    pub const ALL: [LossKind; 3] = [LossKind::Square, LossKind::SquaredHinge, LossKind::Logistic];

    pub fn as_str(self) -> &'static str {
        match self {
            LossKind::Square => "square",
            LossKind::SquaredHinge => "squared-hinge",
            LossKind::Logistic => "logistic",
        }
    }

    pub fn is_pairwise(self) -> bool {
        !matches!(self, LossKind::Logistic)
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LossKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown loss {s:?} (expected square, squared-hinge or logistic)"
                ))
            })
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Evaluate `kind` with its fast implementation.
pub fn loss_dispatch(
    kind: LossKind,
    batch: &PredictionBatch,
    cfg: &MarginConfig,
    want_gradient: bool,
) -> LossOutput {
    match kind {
        LossKind::Square => functional_square_loss(batch, cfg, want_gradient),
        LossKind::SquaredHinge => functional_squared_hinge_loss(batch, cfg, want_gradient),
        LossKind::Logistic => logistic_loss(batch, want_gradient),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margin_validation() {
        assert!(MarginConfig::with_margin(0.0).is_ok());
        assert!(matches!(MarginConfig::with_margin(-0.1), Err(Error::InvalidMargin(_))));
        assert!(MarginConfig::with_margin(f64::NAN).is_err());
    }

    #[test]
    fn parse_names() {
        for k in LossKind::ALL {
            assert_eq!(k.as_str().parse::<LossKind>().unwrap(), k);
        }
        assert!("hinge".parse::<LossKind>().is_err());
        assert_eq!("mean-pairs".parse::<Normalization>().unwrap(), Normalization::MeanOverPairs);
    }

    #[test]
    fn dispatch_routes() {
        let cfg = MarginConfig::default();
        let exact = PredictionBatch::from_classes(&[1.0], &[0.0]).unwrap();
        assert_eq!(loss_dispatch(LossKind::Square, &exact, &cfg, false).value, 0.0);

        let inactive = PredictionBatch::from_classes(&[2.5], &[0.0]).unwrap();
        assert_eq!(loss_dispatch(LossKind::SquaredHinge, &inactive, &cfg, false).value, 0.0);
        assert_eq!(loss_dispatch(LossKind::Square, &inactive, &cfg, false).value, 2.25);

        // closed form: log(1+e^-0.5) + log(1+e^-1) + log(1+e^-2)
        let b = PredictionBatch::from_signs(vec![0.5, -1.0, 2.0], &[1, -1, 1]).unwrap();
        let expected: f64 = [0.5f64, 1.0, 2.0].iter().map(|z| (1.0 + (-z).exp()).ln()).sum();
        let got = loss_dispatch(LossKind::Logistic, &b, &cfg, false).value;
        assert!((got - expected).abs() < 1e-15);
    }
}
