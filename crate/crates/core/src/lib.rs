//! Exact all-pairs AUC surrogate losses in sub-quadratic time.
//!
//! The square loss over every (positive, negative) pair is computed in
//! `O(n)` and the squared hinge loss in `O(n log n)`, both with exact
//! gradients, by folding the positives into one quadratic
//! `a·x² + b·x + c` that is evaluated at each negative score. Around that
//! core the crate provides:
//!
//! - [`pairwise`]: the fast losses and their quadratic-time oracles;
//! - [`metrics`]: Mann-Whitney ROC-AUC and the logistic loss;
//! - [`datagen`]: seeded Gaussian-mixture data with imbalanced splits;
//! - [`trainer`]: minibatch SGD of a linear scorer with validation-AUC
//!   model selection;
//! - [`bench`]: timing across sizes and log-log slope fits;
//! - [`cli`]: the `pairwise-auc` command line and its CSV formats.
//!
//! ```
//! use pairwise_auc::{functional_squared_hinge_loss, MarginConfig, PredictionBatch};
//!
//! let batch = PredictionBatch::from_classes(&[0.5, -0.2], &[0.1]).unwrap();
//! let out = functional_squared_hinge_loss(&batch, &MarginConfig::default(), true);
//! assert!((out.value - 2.05).abs() < 1e-12);
//! ```

pub mod batch;
pub mod bench;
pub mod cli;
pub mod datagen;
pub mod error;
pub mod metrics;
pub mod pairwise;
pub mod trainer;

pub use batch::{Label, PredictionBatch};
pub use error::{Error, Result};
pub use metrics::{logistic_loss, roc_auc, AucResult};
pub use pairwise::{
    build_sweep_plan, functional_square_loss, functional_squared_hinge_loss, loss_dispatch, naive_square_loss,
    naive_squared_hinge_loss, square_loss_coefficients, LossKind, LossOutput, MarginConfig, Normalization,
    QuadCoefficients, SweepPlan,
};
