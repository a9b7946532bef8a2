use crate::batch::PredictionBatch;

use super::MarginConfig;

/// Coefficients of the quadratic `a·x² + b·x + c`.
///
/// Adding the per-positive triple `(1, 2(m − ŷ_j), (m − ŷ_j)²)` for a set of
/// positives gives the total square loss of that set against a negative
/// scoring `x`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadCoefficients {
    pub const ZERO: QuadCoefficients = QuadCoefficients {
        a: 0.0,
        b: 0.0,
        c: 0.0,
    };

    /// Account for one positive example scoring `prediction`.
    #[inline]
    pub fn add_positive(&mut self, prediction: f64, margin: f64) {
        let z = margin - prediction;
        self.a += 1.0;
        self.b += 2.0 * z;
        self.c += z * z;
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.a * x + self.b) * x + self.c
    }

    /// `d/dx (a·x² + b·x + c)`
    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        2.0 * self.a * x + self.b
    }
}

/// Sum the coefficient triples of every positive example in `batch`.
pub fn square_loss_coefficients(batch: &PredictionBatch, cfg: &MarginConfig) -> QuadCoefficients {
    let m = cfg.margin();
    let mut q = QuadCoefficients::ZERO;
    for (y, label) in batch.iter() {
        if label.is_positive() {
            q.add_positive(y, m);
        }
    }
    q
}
