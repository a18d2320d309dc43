//! Tweet sentiment classification with subjectivity-filtered distant
//! supervision.
//!
//! Emoticon-labeled tweets are normalized, the training side is filtered by a
//! subjectivity score, an abstaining lexicon heuristic (EFWS) labels the test
//! tweets it is confident about, and naive Bayes, logistic regression or an
//! RBF SVM labels the rest. [`eval`] runs the whole protocol.
//!
//! Models are generic over the float type; the aliases below fix it.

pub mod assets;
pub mod corpus;
pub mod efws;
pub mod error;
pub mod eval;
pub mod features;
pub mod models;
pub mod preprocess;
pub mod scalar;
pub mod seed;
pub mod subjectivity;

pub use error::{Error, ErrorKind, Result};

pub type NaiveBayes = models::NaiveBayes<f64>;
pub type LogisticRegression = models::LogisticRegression<f64>;
pub type Svm = models::Svm<f64>;
pub type Model = models::Model<f64>;
pub type TrainedModel = models::TrainedModel<f64>;

pub type NaiveBayesF32 = models::NaiveBayes<f32>;
pub type LogisticRegressionF32 = models::LogisticRegression<f32>;
pub type SvmF32 = models::Svm<f32>;
pub type ModelF32 = models::Model<f32>;
pub type TrainedModelF32 = models::TrainedModel<f32>;
