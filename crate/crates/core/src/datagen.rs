//! Seeded synthetic data and the subtrain / validation / test protocol.
//!
//! All randomness comes from `ChaCha8Rng` seeded with `seed_from_u64`, so a
//! given seed and parameter set always produces the same bytes.

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::batch::{Label, PredictionBatch};
use crate::error::{Error, Result};

/// Where a dataset came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Provenance {
    pub seed: u64,
    pub n: usize,
    pub p: usize,
    pub class_separation: f64,
}

/// Row-major feature matrix with labels.
///
/// `origin[i]` is the row index of example `i` in the dataset it was
/// generated as, so splits can be checked for disjointness.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_features: usize,
    labels: Vec<Label>,
    origin: Vec<usize>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn new(features: Vec<f64>, n_features: usize, labels: Vec<Label>, provenance: Provenance) -> Result<Self> {
        if n_features == 0 || features.len() != labels.len() * n_features {
            return Err(Error::InvalidParameter(format!(
                "feature matrix of {} values does not fit {} rows of {} features",
                features.len(),
                labels.len(),
                n_features
            )));
        }
        if features.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite feature value".into()));
        }
        let origin = (0..labels.len()).collect();
        Ok(Dataset {
            features,
            n_features,
            labels,
            origin,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn origin(&self) -> &[usize] {
        &self.origin
    }

    pub fn n_positive(&self) -> usize {
        self.labels.iter().filter(|l| l.is_positive()).count()
    }

    pub fn n_negative(&self) -> usize {
        self.len() - self.n_positive()
    }

    /// Rows `indices`, in that order, keeping origin and provenance.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        Dataset {
            features,
            n_features: self.n_features,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            origin: indices.iter().map(|&i| self.origin[i]).collect(),
            provenance: self.provenance,
        }
    }

    /// Score every row with a linear function `w·x + bias`.
    pub fn scores(&self, weights: &[f64], bias: f64) -> Vec<f64> {
        assert_eq!(weights.len(), self.n_features);
        self.features
            .chunks_exact(self.n_features)
            .map(|row| row.iter().zip(weights).map(|(x, w)| x * w).sum::<f64>() + bias)
            .collect()
    }

    /// Pair `scores` with this dataset's labels.
    pub fn batch(&self, scores: Vec<f64>) -> Result<PredictionBatch> {
        PredictionBatch::new(scores, self.labels.clone())
    }

    /// CSV with header `x0,…,x{p-1},label`; labels written as `-1` / `1`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (0..self.n_features).map(|j| format!("x{j}")).collect();
        header.push("label".into());
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut rec: Vec<String> = self.row(i).iter().map(|x| format!("{x:?}")).collect();
            rec.push(if self.labels[i].is_positive() { "1" } else { "-1" }.into());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Inverse of [`Dataset::write_csv`]. Provenance is not stored in the
    /// file and comes back zeroed apart from `n` and `p`.
    pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        let p = header.len().saturating_sub(1);
        if p == 0 || header.get(p) != Some("label") {
            return Err(Error::Parse {
                path: "<dataset>".into(),
                line: 1,
                message: "expected header x0,…,label".into(),
            });
        }
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            let bad = |message: String| Error::Parse {
                path: "<dataset>".into(),
                line,
                message,
            };
            for j in 0..p {
                let field = rec.get(j).unwrap_or("");
                features.push(field.trim().parse::<f64>().map_err(|e| bad(format!("feature {field:?}: {e}")))?);
            }
            let label = match rec.get(p).map(str::trim) {
                Some("1") => Label::Positive,
                Some("-1") => Label::Negative,
                other => return Err(bad(format!("label {other:?}, expected -1 or 1"))),
            };
            labels.push(label);
        }
        let provenance = Provenance {
            seed: 0,
            n: labels.len(),
            p,
            class_separation: 0.0,
        };
        Dataset::new(features, p, labels, provenance)
    }
}

/// Balanced two-class Gaussian mixture: positives from `N(μ·1, I)`,
/// negatives from `N(−μ·1, I)` with `μ = class_separation / (2√p)`, so the
/// class means are `class_separation` apart. Labels alternate starting with
/// a positive.
pub fn generate_gaussian_mixture(n: usize, p: usize, class_separation: f64, seed: u64) -> Result<Dataset> {
    if n < 2 || p < 1 {
        return Err(Error::InvalidParameter(format!("need n >= 2 and p >= 1, got n={n}, p={p}")));
    }
    if !class_separation.is_finite() || class_separation < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "class_separation must be finite and >= 0, got {class_separation}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = class_separation / (2.0 * (p as f64).sqrt());
    let mut features = Vec::with_capacity(n * p);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = if i % 2 == 0 { Label::Positive } else { Label::Negative };
        let shift = label.sign() * mu;
        for _ in 0..p {
            let z: f64 = StandardNormal.sample(&mut rng);
            features.push(z + shift);
        }
        labels.push(label);
    }
    Dataset::new(
        features,
        p,
        labels,
        Provenance {
            seed,
            n,
            p,
            class_separation,
        },
    )
}

/// AUC of the optimal linear scorer (weights `1`) on the mixture above:
/// `Φ(class_separation / √2)`.
pub fn gaussian_mixture_bayes_auc(class_separation: f64) -> f64 {
    Normal::standard().cdf(class_separation / std::f64::consts::SQRT_2)
}

/// Imbalance and split parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    /// Proportion of positives in the train portion, in `(0, 0.5]`.
    pub imratio: f64,
    /// Share of the train portion used for gradients; the rest is validation.
    pub subtrain_fraction: f64,
    /// Share of the full dataset reserved, balanced, for testing.
    pub test_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(imratio: f64, seed: u64) -> Result<Self> {
        let spec = SplitSpec {
            imratio,
            subtrain_fraction: 0.8,
            test_fraction: 0.2,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.imratio > 0.0 && self.imratio <= 0.5) {
            return Err(Error::InvalidParameter(format!("imratio must be in (0, 0.5], got {}", self.imratio)));
        }
        for (name, v) in [("subtrain_fraction", self.subtrain_fraction), ("test_fraction", self.test_fraction)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter(format!("{name} must be in (0, 1), got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Splits {
    pub subtrain: Dataset,
    pub validation: Dataset,
    pub test: Dataset,
}

/// Reserve a balanced test set, drop positives from the remainder until the
/// requested imbalance holds, then split the remainder per class into
/// subtrain and validation.
///
/// With `N` remaining negatives, `round(imratio·N / (1 − imratio))`
/// positives are kept; all negatives are kept.
pub fn apply_imbalance_and_split(data: &Dataset, spec: &SplitSpec) -> Result<Splits> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pos: Vec<usize> = (0..data.len()).filter(|&i| data.labels[i].is_positive()).collect();
    let mut neg: Vec<usize> = (0..data.len()).filter(|&i| !data.labels[i].is_positive()).collect();
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);

    let per_class = ((spec.test_fraction * data.len() as f64 / 2.0).floor() as usize).min(pos.len()).min(neg.len());
    let mut test: Vec<usize> = pos[..per_class].iter().chain(&neg[..per_class]).copied().collect();
    let pos = &pos[per_class..];
    let neg = &neg[per_class..];

    let infeasible = |reason: String| Error::InfeasibleImratio {
        imratio: spec.imratio,
        reason,
    };
    let wanted = if spec.imratio == 0.5 {
        neg.len()
    } else {
        (spec.imratio * neg.len() as f64 / (1.0 - spec.imratio)).round() as usize
    };
    if wanted > pos.len() {
        return Err(infeasible(format!(
            "needs {wanted} positives but only {} remain after the test split",
            pos.len()
        )));
    }
    let pos = &pos[..wanted];

    let cut = |count: usize| ((spec.subtrain_fraction * count as f64).round() as usize).min(count);
    let (pos_cut, neg_cut) = (cut(pos.len()), cut(neg.len()));
    if pos_cut == 0 || pos_cut == pos.len() || neg_cut == 0 || neg_cut == neg.len() {
        return Err(infeasible(format!(
            "{} positives and {} negatives cannot fill both subtrain and validation",
            pos.len(),
            neg.len()
        )));
    }
    let mut subtrain: Vec<usize> = pos[..pos_cut].iter().chain(&neg[..neg_cut]).copied().collect();
    let mut validation: Vec<usize> = pos[pos_cut..].iter().chain(&neg[neg_cut..]).copied().collect();

    subtrain.sort_unstable();
    validation.sort_unstable();
    test.sort_unstable();
    Ok(Splits {
        subtrain: data.select(&subtrain),
        validation: data.select(&validation),
        test: data.select(&test),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::roc_auc;
    use std::collections::HashSet;

    #[test]
    fn deterministic_generation() {
        let a = generate_gaussian_mixture(500, 4, 2.0, 7).unwrap();
        let b = generate_gaussian_mixture(500, 4, 2.0, 7).unwrap();
        assert_eq!(a, b);
        let c = generate_gaussian_mixture(500, 4, 2.0, 8).unwrap();
        assert_ne!(a, c);
        assert_eq!(a.n_positive(), 250);
    }

    #[test]
    fn invalid_dimensions() {
        assert!(generate_gaussian_mixture(1, 3, 1.0, 0).is_err());
        assert!(generate_gaussian_mixture(10, 0, 1.0, 0).is_err());
        assert!(generate_gaussian_mixture(10, 3, -1.0, 0).is_err());
    }

    #[test]
    fn true_direction_reaches_bayes_auc() {
        let d = generate_gaussian_mixture(2000, 10, 4.0, 11).unwrap();
        let auc = roc_auc(&d.batch(d.scores(&[1.0; 10], 0.0)).unwrap()).unwrap().auc;
        let bayes = gaussian_mixture_bayes_auc(4.0);
        assert!((bayes - 0.997661).abs() < 1e-6, "{bayes}");
        assert!((auc - bayes).abs() < 0.02, "{auc} vs {bayes}");
    }

    #[test]
    fn no_separation_is_uninformative() {
        let d = generate_gaussian_mixture(4000, 5, 0.0, 3).unwrap();
        let auc = roc_auc(&d.batch(d.scores(&[1.0; 5], 0.0)).unwrap()).unwrap().auc;
        assert!((auc - 0.5).abs() < 0.05, "{auc}");
    }

    #[test]
    fn balanced_ratio_keeps_everything() {
        let d = generate_gaussian_mixture(1000, 2, 1.0, 1).unwrap();
        let s = apply_imbalance_and_split(&d, &SplitSpec::new(0.5, 9).unwrap()).unwrap();
        assert_eq!(s.subtrain.len() + s.validation.len() + s.test.len(), 1000);
    }

    #[test]
    fn one_percent_imbalance_counts() {
        // 12500 rows: 2500 balanced test rows, 5000 + 5000 left for training
        let d = generate_gaussian_mixture(12_500, 2, 1.0, 1).unwrap();
        let s = apply_imbalance_and_split(&d, &SplitSpec::new(0.01, 4).unwrap()).unwrap();
        let n_neg = s.subtrain.n_negative() + s.validation.n_negative();
        let n_pos = s.subtrain.n_positive() + s.validation.n_positive();
        assert_eq!(n_neg, 5000);
        assert_eq!(n_pos, 51);
        let n_train = (n_neg + n_pos) as f64;
        assert!((n_pos as f64 / n_train - 0.01).abs() <= 1.0 / n_train);
        assert_eq!(s.test.n_positive(), 1250);
        assert_eq!(s.test.n_negative(), 1250);
        assert_eq!(s.subtrain.n_positive(), 41);
        assert_eq!(s.validation.n_positive(), 10);
    }

    #[test]
    fn splits_are_disjoint_and_deterministic() {
        let d = generate_gaussian_mixture(3001, 3, 1.0, 2).unwrap();
        let spec = SplitSpec::new(0.1, 5).unwrap();
        let s = apply_imbalance_and_split(&d, &spec).unwrap();
        let mut seen = HashSet::new();
        for part in [&s.subtrain, &s.validation, &s.test] {
            for &o in part.origin() {
                assert!(seen.insert(o), "row {o} appears twice");
            }
        }
        assert!(s.test.n_positive().abs_diff(s.test.n_negative()) <= 1);
        assert_eq!(s, apply_imbalance_and_split(&d, &spec).unwrap());
    }

    #[test]
    fn infeasible_ratio() {
        let d = generate_gaussian_mixture(40, 2, 1.0, 2).unwrap();
        let err = apply_imbalance_and_split(&d, &SplitSpec::new(0.01, 1).unwrap()).unwrap_err();
        assert!(matches!(err, Error::InfeasibleImratio { .. }));
        assert!(SplitSpec::new(0.0, 1).is_err());
        assert!(SplitSpec::new(0.6, 1).is_err());
    }

    #[test]
    fn dataset_csv_round_trip() {
        let d = generate_gaussian_mixture(20, 3, 1.0, 2).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let back = Dataset::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.labels(), d.labels());
        for i in 0..d.len() {
            assert_eq!(back.row(i), d.row(i));
        }
    }
}
