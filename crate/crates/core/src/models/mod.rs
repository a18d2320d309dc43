//! The three classifiers and the pieces they share: the prediction trait,
//! hyperparameters, the timed fit and the training report.
//!
//! Default hyperparameters:
//!
//! | model | defaults |
//! |---|---|
//! | naive Bayes | `alpha = 1` (Laplace) |
//! | logistic regression | `l2 = 1e-4`, `epochs = 10`, `learning_rate = 0.1` decayed as `1/√epoch`, SGD |
//! | SVM | `C = 1`, `gamma = 1/(|V|·Var(X))`, `tol = 1e-3`, `max_passes = 10`, 256 MiB row cache |
//!
//! Ties at the decision boundary go to Positive for every model.

mod io;
pub mod lr;
pub mod nb;
pub mod svm;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::Sentiment;
use crate::error::{ensure_arg, Error, Result};
use crate::features::{FeatureKind, SparseFeatureVector, Vocabulary};
use crate::scalar::Scalar;

pub use io::{stored_precision, FORMAT_VERSION, MAGIC};
pub use lr::{LogisticRegression, LrParams, LrSchedule, LrSolver};
pub use nb::NaiveBayes;
pub use svm::{Svm, SvmParams};

pub trait Classifier<F: Scalar> {
    /// Signed score; non-negative means Positive.
    fn decision(&self, x: &SparseFeatureVector) -> F;

    fn predict(&self, x: &SparseFeatureVector) -> Sentiment {
        if self.decision(x) >= F::zero() {
            Sentiment::Positive
        } else {
            Sentiment::Negative
        }
    }
}

/// Validates a training set and returns per-class document counts.
pub(crate) fn check_training_set(x: &[SparseFeatureVector], y: &[Sentiment], dim: usize) -> Result<[usize; 2]> {
    ensure_arg!(
        x.len() == y.len(),
        "{} feature vectors but {} labels",
        x.len(),
        y.len()
    );
    if let Some(max) = x.iter().filter_map(SparseFeatureVector::max_id).max() {
        ensure_arg!(
            (max as usize) < dim,
            "feature id {max} outside a vocabulary of {dim}"
        );
    }
    let mut docs = [0usize; 2];
    for l in y {
        docs[l.index()] += 1;
    }
    for class in Sentiment::ALL {
        if docs[class.index()] == 0 {
            return Err(Error::Training(format!(
                "no {class} examples in the training data; both classes are required"
            )));
        }
    }
    Ok(docs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    NaiveBayes,
    LogisticRegression,
    Svm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::NaiveBayes, ModelKind::LogisticRegression, ModelKind::Svm];

    /// Short name used on the command line and in CSV output.
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::NaiveBayes => "nb",
            ModelKind::LogisticRegression => "lr",
            ModelKind::Svm => "svm",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "nb" | "naive-bayes" => Some(ModelKind::NaiveBayes),
            "lr" | "logistic-regression" | "maxent" => Some(ModelKind::LogisticRegression),
            "svm" => Some(ModelKind::Svm),
            _ => None,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            ModelKind::NaiveBayes => 0,
            ModelKind::LogisticRegression => 1,
            ModelKind::Svm => 2,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.code() == c)
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Hyperparameters of one model, kept in `f64` regardless of the training
/// precision so reports compare across precisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum Hyperparameters {
    NaiveBayes {
        alpha: f64,
    },
    LogisticRegression {
        l2: f64,
        epochs: u32,
        learning_rate: f64,
        schedule: LrSchedule,
        solver: LrSolver,
    },
    Svm {
        c: f64,
        /// `None` means the `1/(|V|·Var(X))` rule.
        gamma: Option<f64>,
        tol: f64,
        max_passes: u32,
        cache_mb: usize,
    },
}

impl Hyperparameters {
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::NaiveBayes => Hyperparameters::NaiveBayes { alpha: 1.0 },
            ModelKind::LogisticRegression => {
                let p = LrParams::<f64>::default();
                Hyperparameters::LogisticRegression {
                    l2: p.l2,
                    epochs: p.epochs,
                    learning_rate: p.learning_rate,
                    schedule: p.schedule,
                    solver: p.solver,
                }
            }
            ModelKind::Svm => {
                let p = SvmParams::<f64>::default();
                Hyperparameters::Svm {
                    c: p.c,
                    gamma: p.gamma,
                    tol: p.tol,
                    max_passes: p.max_passes,
                    cache_mb: p.cache_mb,
                }
            }
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Hyperparameters::NaiveBayes { .. } => ModelKind::NaiveBayes,
            Hyperparameters::LogisticRegression { .. } => ModelKind::LogisticRegression,
            Hyperparameters::Svm { .. } => ModelKind::Svm,
        }
    }
}

/// A trained classifier of any of the three kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum Model<F> {
    NaiveBayes(NaiveBayes<F>),
    LogisticRegression(LogisticRegression<F>),
    Svm(Svm<F>),
}

impl<F: Scalar> Model<F> {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::NaiveBayes(_) => ModelKind::NaiveBayes,
            Model::LogisticRegression(_) => ModelKind::LogisticRegression,
            Model::Svm(_) => ModelKind::Svm,
        }
    }

    /// Whether the solver met its stopping criterion (always true for NB and LR).
    pub fn converged(&self) -> bool {
        match self {
            Model::Svm(m) => m.converged,
            _ => true,
        }
    }
}

impl<F: Scalar> Classifier<F> for Model<F> {
    fn decision(&self, x: &SparseFeatureVector) -> F {
        match self {
            Model::NaiveBayes(m) => m.decision(x),
            Model::LogisticRegression(m) => m.decision(x),
            Model::Svm(m) => m.decision(x),
        }
    }

    fn predict(&self, x: &SparseFeatureVector) -> Sentiment {
        match self {
            Model::NaiveBayes(m) => m.predict(x),
            Model::LogisticRegression(m) => m.predict(x),
            Model::Svm(m) => m.predict(x),
        }
    }
}

/// Trains a model of the kind named by `hyper`.
pub fn train<F: Scalar>(
    hyper: &Hyperparameters,
    x: &[SparseFeatureVector],
    y: &[Sentiment],
    dim: usize,
    seed: u64,
) -> Result<Model<F>> {
    Ok(match *hyper {
        Hyperparameters::NaiveBayes { alpha } => Model::NaiveBayes(NaiveBayes::train(x, y, dim, F::of(alpha))?),
        Hyperparameters::LogisticRegression {
            l2,
            epochs,
            learning_rate,
            schedule,
            solver,
        } => {
            let params = LrParams {
                l2: F::of(l2),
                epochs,
                learning_rate: F::of(learning_rate),
                schedule,
                solver,
            };
            Model::LogisticRegression(LogisticRegression::train(x, y, dim, params, seed)?)
        }
        Hyperparameters::Svm {
            c,
            gamma,
            tol,
            max_passes,
            cache_mb,
        } => {
            let params = SvmParams {
                c: F::of(c),
                gamma: gamma.map(F::of),
                tol: F::of(tol),
                max_passes,
                cache_mb,
            };
            Model::Svm(Svm::train(x, y, dim, params, seed)?)
        }
    })
}

/// Metadata recorded next to a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    pub model: ModelKind,
    /// Time spent inside the fit call only; excludes loading, preprocessing
    /// and vectorization.
    pub wall_clock_seconds: f64,
    pub n_train: usize,
    pub vocab_size: usize,
    pub feature_kind: FeatureKind,
    pub hyperparameters: Hyperparameters,
    pub subjectivity_threshold_used: f64,
    pub seed: u64,
    /// `"f32"` or `"f64"`.
    pub precision: String,
    pub converged: bool,
    /// Gamma actually used by an SVM, after resolving the default rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolved_gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_vectors: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objective_history: Vec<f64>,
}

impl TrainingReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// SHA-256 of the compact JSON form.
    pub fn digest(&self) -> [u8; 32] {
        Sha256::digest(serde_json::to_vec(self).expect("report serializes")).into()
    }
}

pub fn precision_name<F: Scalar>() -> &'static str {
    if F::TAG == 4 {
        "f32"
    } else {
        "f64"
    }
}

/// Model, vocabulary and report, the unit that is saved and loaded.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel<F> {
    pub model: Model<F>,
    pub vocabulary: Vocabulary,
    pub report: TrainingReport,
}

impl<F: Scalar> TrainedModel<F> {
    pub fn predict(&self, x: &SparseFeatureVector) -> Sentiment {
        self.model.predict(x)
    }
}

/// Trains and times the fit. Only the call into the solver is timed.
pub fn fit<F: Scalar>(
    hyper: &Hyperparameters,
    x: &[SparseFeatureVector],
    y: &[Sentiment],
    vocabulary: &Vocabulary,
    subjectivity_threshold: f64,
    seed: u64,
) -> Result<TrainedModel<F>> {
    let start = Instant::now();
    let model = train::<F>(hyper, x, y, vocabulary.len(), seed)?;
    // Clamped to one nanosecond so the report is always strictly positive
    // on clocks with coarse resolution.
    let seconds = start.elapsed().as_secs_f64().max(1e-9);
    let (resolved_gamma, support_vectors, objective_history) = match &model {
        Model::Svm(m) => (Some(m.gamma.f64()), Some(m.n_support()), Vec::new()),
        Model::LogisticRegression(m) => (None, None, m.objective_history.iter().map(|v| v.f64()).collect()),
        Model::NaiveBayes(_) => (None, None, Vec::new()),
    };
    let report = TrainingReport {
        model: model.kind(),
        wall_clock_seconds: seconds,
        n_train: x.len(),
        vocab_size: vocabulary.len(),
        feature_kind: vocabulary.kind(),
        hyperparameters: *hyper,
        subjectivity_threshold_used: subjectivity_threshold,
        seed,
        precision: precision_name::<F>().to_string(),
        converged: model.converged(),
        resolved_gamma,
        support_vectors,
        objective_history,
    };
    Ok(TrainedModel {
        model,
        vocabulary: vocabulary.clone(),
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Sentiment::{Negative, Positive};

    #[test]
    fn kind_names_round_trip() {
        for k in ModelKind::ALL {
            assert_eq!(ModelKind::from_name(k.name()), Some(k));
            assert_eq!(ModelKind::from_code(k.code()), Some(k));
            assert_eq!(Hyperparameters::default_for(k).kind(), k);
        }
    }

    #[test]
    fn report_is_stable_json() {
        let vocab = Vocabulary::from_features(FeatureKind::Unigram, 1, vec!["a".into(), "b".into()]).unwrap();
        let x = vec![
            SparseFeatureVector::new(vec![(0, 1)]).unwrap(),
            SparseFeatureVector::new(vec![(1, 1)]).unwrap(),
        ];
        let y = [Positive, Negative];
        for kind in ModelKind::ALL {
            let m = fit::<f64>(&Hyperparameters::default_for(kind), &x, &y, &vocab, 0.5, 1).unwrap();
            assert!(m.report.wall_clock_seconds > 0.0);
            assert_eq!(m.report.n_train, 2);
            let back: TrainingReport = serde_json::from_str(&m.report.to_json()).unwrap();
            assert_eq!(back, m.report);
            assert_eq!(back.digest(), m.report.digest());
        }
    }

    #[test]
    fn out_of_range_ids_are_rejected() {
        let x = vec![SparseFeatureVector::new(vec![(5, 1)]).unwrap(), SparseFeatureVector::default()];
        assert!(matches!(
            check_training_set(&x, &[Positive, Negative], 3),
            Err(Error::InvalidArgument(_))
        ));
    }
}
