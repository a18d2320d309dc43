use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use subjsent::eval::ExperimentConfig;
use subjsent::features::FeatureKind;
use subjsent::models::{Hyperparameters, LrSchedule, LrSolver, ModelKind};

/// Sentiment classification of tweets with subjectivity-filtered training data.
///
/// Every subcommand accepts `--config FILE` with `key=value` lines naming long
/// flags (`train-size=10000`, `efws=true`); flags on the command line win.
#[derive(Parser, Debug)]
#[command(name = "subjsent", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Label tweets by the polarity code and strip emoticons; writes `id,label,text` CSV.
    Ingest(IngestArgs),
    /// Run the preprocessing pipeline; writes `id<TAB>tokens` lines.
    Preprocess(PreprocessArgs),
    /// Keep tweets whose subjectivity reaches a threshold; writes `id<TAB>score` lines.
    Filter(FilterArgs),
    /// Label tweets with the EFWS heuristic; writes `id,label,source` CSV.
    Efws(EfwsArgs),
    /// Train a classifier on filtered data and save it.
    Train(TrainArgs),
    /// Label tweets with a saved model; writes `id,label,source` CSV.
    Predict(PredictArgs),
    /// Run the experiment protocol and print the result as JSON.
    Evaluate(EvaluateArgs),
    /// Accuracy against subjectivity threshold; writes `threshold,accuracy` CSV.
    Sweep(SweepArgs),
    /// Write the figure CSVs (retention, sweep, unigram and bigram timings).
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// `key=value` file of defaults for the flags of this subcommand.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads for data-parallel stages; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Output path; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Sentiment140 CSV (polarity,id,date,query,user,text).
    #[arg(long, value_name = "CSV")]
    pub input: PathBuf,
    /// Read at most this many rows.
    #[arg(long)]
    pub limit: Option<usize>,
    /// Skip malformed rows and unknown polarity codes instead of failing.
    #[arg(long)]
    pub lenient: bool,
    /// Emoticon list replacing the bundled one.
    #[arg(long, value_name = "FILE")]
    pub emoticons: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Lexicons {
    /// Stopword list replacing the bundled one.
    #[arg(long, value_name = "FILE")]
    pub stopwords: Option<PathBuf>,
    /// `acronym<TAB>expansion` file replacing the bundled one.
    #[arg(long, value_name = "FILE")]
    pub acronyms: Option<PathBuf>,
    /// `word<TAB>subjectivity` lexicon replacing the bundled one.
    #[arg(long, value_name = "FILE")]
    pub subjectivity_lexicon: Option<PathBuf>,
    /// `word<TAB>integer` polarity lexicon replacing the bundled one.
    #[arg(long, value_name = "FILE")]
    pub polarity_lexicon: Option<PathBuf>,
    /// `word<TAB>synonyms` file used with --polarity-lexicon.
    #[arg(long, value_name = "FILE", requires = "polarity_lexicon")]
    pub synonyms: Option<PathBuf>,
    /// `word<TAB>TAG` lexicon for unigram-pos features.
    #[arg(long, value_name = "FILE")]
    pub pos_lexicon: Option<PathBuf>,
    /// Precomputed `id<TAB>score` subjectivity scores, e.g. from another tool.
    #[arg(long, value_name = "FILE")]
    pub scores: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Features {
    Unigram,
    UnigramBigram,
    UnigramPos,
}

impl From<Features> for FeatureKind {
    fn from(f: Features) -> Self {
        match f {
            Features::Unigram => FeatureKind::Unigram,
            Features::UnigramBigram => FeatureKind::UnigramBigram,
            Features::UnigramPos => FeatureKind::UnigramPos,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelArg {
    Nb,
    Lr,
    Svm,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Nb => ModelKind::NaiveBayes,
            ModelArg::Lr => ModelKind::LogisticRegression,
            ModelArg::Svm => ModelKind::Svm,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Sgd,
    Gd,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    InvSqrt,
    Constant,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    F32,
    F64,
}

/// Model choice and hyperparameters.
#[derive(Args, Debug, Clone)]
pub struct ModelOpts {
    #[arg(long, value_enum, default_value_t = ModelArg::Nb)]
    pub model: ModelArg,
    /// Naive Bayes additive smoothing.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Logistic regression L2 strength.
    #[arg(long, default_value_t = 1e-4)]
    pub l2: f64,
    /// Logistic regression passes over the data.
    #[arg(long, default_value_t = 10)]
    pub epochs: u32,
    /// Logistic regression base step size.
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    #[arg(long, value_enum, default_value_t = Schedule::InvSqrt)]
    pub schedule: Schedule,
    /// `sgd` or full-batch `gd`.
    #[arg(long, value_enum, default_value_t = Solver::Sgd)]
    pub solver: Solver,
    /// SVM box constraint.
    #[arg(long = "c", default_value_t = 1.0)]
    pub c: f64,
    /// SVM RBF width; the default is 1/(|V|·Var(X)).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// SVM KKT tolerance.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    /// SVM full sweeps without change before stopping.
    #[arg(long, default_value_t = 10)]
    pub max_passes: u32,
    /// SVM kernel row cache in MiB.
    #[arg(long, default_value_t = 256)]
    pub cache_mb: usize,
    /// Refuse SVM training sets larger than this.
    #[arg(long, default_value_t = 50_000)]
    pub svm_max_train: usize,
    #[arg(long, value_enum, default_value_t = Precision::F64)]
    pub precision: Precision,
}

impl ModelOpts {
    pub fn hyperparameters(&self, kind: ModelKind) -> Hyperparameters {
        match kind {
            ModelKind::NaiveBayes => Hyperparameters::NaiveBayes { alpha: self.alpha },
            ModelKind::LogisticRegression => Hyperparameters::LogisticRegression {
                l2: self.l2,
                epochs: self.epochs,
                learning_rate: self.learning_rate,
                schedule: match self.schedule {
                    Schedule::InvSqrt => LrSchedule::InvSqrt,
                    Schedule::Constant => LrSchedule::Constant,
                },
                solver: match self.solver {
                    Solver::Sgd => LrSolver::Sgd,
                    Solver::Gd => LrSolver::GradientDescent,
                },
            },
            ModelKind::Svm => Hyperparameters::Svm {
                c: self.c,
                gamma: self.gamma,
                tol: self.tol,
                max_passes: self.max_passes,
                cache_mb: self.cache_mb,
            },
        }
    }
}

/// Settings shared by train and the experiment subcommands.
#[derive(Args, Debug, Clone)]
pub struct Training {
    /// Minimum subjectivity of training tweets, in [0, 1].
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    #[arg(long, default_value_t = 100_000)]
    pub train_size: usize,
    #[arg(long, value_enum, default_value_t = Features::Unigram)]
    pub features: Features,
    /// Drop features seen fewer times than this in the training sample.
    #[arg(long, default_value_t = 1)]
    pub min_count: u32,
    /// Drop tweets the EFWS heuristic labels from the training pool.
    #[arg(long)]
    pub prune_efws: bool,
    /// Master seed; every stage derives its own from it.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub model: ModelOpts,
}

#[derive(Args, Debug, Clone)]
pub struct Experiment {
    #[command(flatten)]
    pub training: Training,
    /// Size of the fixed test set, drawn before filtering.
    #[arg(long, default_value_t = 5_000)]
    pub test_size: usize,
    /// Label the test set with the EFWS heuristic first, the model for the rest.
    #[arg(long)]
    pub efws: bool,
    /// Repetitions with derived seeds; the mean is reported.
    #[arg(long, default_value_t = 3)]
    pub iterations: usize,
}

impl Experiment {
    pub fn config(&self, folds: usize) -> ExperimentConfig {
        let t = &self.training;
        ExperimentConfig {
            subjectivity_threshold: t.threshold,
            train_size: t.train_size,
            test_size: self.test_size,
            feature_kind: t.features.into(),
            hyperparameters: t.model.hyperparameters(t.model.model.into()),
            use_efws: self.efws,
            efws_prune_training: t.prune_efws,
            folds,
            seed: t.seed,
            iterations: self.iterations,
            min_count: t.min_count,
            svm_max_train: t.model.svm_max_train,
            compare_on_covered: true,
        }
    }
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub input: Input,
}

#[derive(Args, Debug)]
pub struct PreprocessArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub lexicons: Lexicons,
}

#[derive(Args, Debug)]
pub struct FilterArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub lexicons: Lexicons,
    /// Minimum subjectivity, in [0, 1].
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Write the `threshold,count` retention curve over 0.0, 0.1, ..., 0.9 instead.
    #[arg(long)]
    pub curve: bool,
}

#[derive(Args, Debug)]
pub struct EfwsArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub lexicons: Lexicons,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub lexicons: Lexicons,
    #[command(flatten)]
    pub training: Training,
    /// Where to save the model.
    #[arg(long, value_name = "PATH")]
    pub model_file: PathBuf,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub lexicons: Lexicons,
    #[arg(long, value_name = "PATH")]
    pub model_file: PathBuf,
    /// Let the EFWS heuristic label what it can before the model.
    #[arg(long)]
    pub efws: bool,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub lexicons: Lexicons,
    #[command(flatten)]
    pub experiment: Experiment,
    /// Keep wall-clock fields in the JSON output (they are zeroed otherwise
    /// so identical runs give identical bytes).
    #[arg(long)]
    pub timings: bool,
    /// Run stratified K-fold cross validation on the filtered pool instead.
    #[arg(long)]
    pub cv: bool,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub output: Output,
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub lexicons: Lexicons,
    #[command(flatten)]
    pub experiment: Experiment,
    /// Ascending thresholds.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    pub thresholds: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub lexicons: Lexicons,
    #[command(flatten)]
    pub experiment: Experiment,
    /// Figures to write, from 1 to 4.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    pub figures: Vec<u8>,
    /// Directory for figure1.csv .. figure4.csv.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// Thresholds of the figure 2 sweep.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    pub thresholds: Vec<f64>,
    /// Unfiltered training size timed against the filtered settings.
    #[arg(long, default_value_t = 200_000)]
    pub baseline_train_size: usize,
    /// Thresholds of the filtered timing settings.
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.8")]
    pub timing_thresholds: Vec<f64>,
    /// Classifiers to time.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "nb,lr,svm")]
    pub timing_models: Vec<ModelArg>,
    /// Fits per timing setting; the median is reported.
    #[arg(long, default_value_t = 3)]
    pub repetitions: usize,
}
