use crate::error::{Error, Result};

/// Binary class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn from_sign(value: i64) -> Option<Label> {
        match value {
            1 => Some(Label::Positive),
            -1 => Some(Label::Negative),
            _ => None,
        }
    }

    /// `+1.0` or `-1.0`.
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

/// Real-valued scores paired with binary labels.
///
/// Construction rejects mismatched lengths and non-finite scores, so the
/// loss sweeps never have to check for them.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionBatch {
    predictions: Vec<f64>,
    labels: Vec<Label>,
}

impl PredictionBatch {
    pub fn new(predictions: Vec<f64>, labels: Vec<Label>) -> Result<Self> {
        if predictions.len() != labels.len() {
            return Err(Error::LengthMismatch {
                predictions: predictions.len(),
                labels: labels.len(),
            });
        }
        if let Some((index, &value)) = predictions
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite())
        {
            return Err(Error::NonFinitePrediction { index, value });
        }
        Ok(PredictionBatch {
            predictions,
            labels,
        })
    }

    /// Build from integer labels, each of which must be `-1` or `1`.
    pub fn from_signs(predictions: Vec<f64>, signs: &[i64]) -> Result<Self> {
        let labels = signs
            .iter()
            .enumerate()
            .map(|(index, &value)| Label::from_sign(value).ok_or(Error::InvalidLabel { index, value }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(predictions, labels)
    }

    /// Convenience constructor from separate positive and negative score lists.
    /// Positives come first in the resulting batch.
    pub fn from_classes(positives: &[f64], negatives: &[f64]) -> Result<Self> {
        let predictions = positives.iter().chain(negatives).copied().collect();
        let labels = std::iter::repeat_n(Label::Positive, positives.len())
            .chain(std::iter::repeat_n(Label::Negative, negatives.len()))
            .collect();
        Self::new(predictions, labels)
    }

    pub fn predictions(&self) -> &[f64] {
        &self.predictions
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.predictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictions.is_empty()
    }

    pub fn n_positive(&self) -> usize {
        self.labels.iter().filter(|l| l.is_positive()).count()
    }

    pub fn n_negative(&self) -> usize {
        self.len() - self.n_positive()
    }

    /// Number of (positive, negative) pairs.
    pub fn pair_count(&self) -> u64 {
        self.n_positive() as u64 * self.n_negative() as u64
    }

    pub fn positive_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_positive())
            .map(|(i, _)| i)
    }

    pub fn negative_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.is_positive())
            .map(|(i, _)| i)
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Label)> + '_ {
        self.predictions.iter().copied().zip(self.labels.iter().copied())
    }
}
