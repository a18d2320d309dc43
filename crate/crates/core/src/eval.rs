//! Experiment protocol: freeze a test set, filter the rest by subjectivity,
//! sample, train, label the test set (EFWS first when enabled, the model for
//! abstentions) and report accuracy, coverage and timings.
//!
//! The test set is drawn once per master seed, before any filtering, and is
//! shared by every threshold, training size and iteration. Filtering only
//! ever touches training data.

use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{self, LabeledTweet, Sentiment};
use crate::efws::{self, HeuristicVerdict, PolarityLexicon};
use crate::error::{ensure_arg, Error, Result};
use crate::features::{self, FeatureKind, Featurizer, PosTagger, SparseFeatureVector};
use crate::models::{self, Classifier, Hyperparameters, ModelKind, TrainedModel, TrainingReport};
use crate::preprocess::{Pipeline, TokenSequence};
use crate::scalar::Scalar;
use crate::seed::{self, derive_seed};
use crate::subjectivity::{self, RetentionPoint, SubjectivityLexicon, SubjectivityScore};

/// Lexicons and tools shared by every stage.
pub struct Resources {
    pub pipeline: Pipeline,
    pub subjectivity: SubjectivityLexicon,
    pub polarity: PolarityLexicon,
    tagger: OnceLock<PosTagger>,
}

impl Resources {
    /// `tagger` is only needed for unigram-pos features; the bundled one is
    /// loaded on first use when it is absent.
    pub fn new(
        pipeline: Pipeline,
        subjectivity: SubjectivityLexicon,
        polarity: PolarityLexicon,
        tagger: Option<PosTagger>,
    ) -> Self {
        let cell = OnceLock::new();
        if let Some(t) = tagger {
            let _ = cell.set(t);
        }
        Resources {
            pipeline,
            subjectivity,
            polarity,
            tagger: cell,
        }
    }

    pub fn bundled() -> Self {
        let pipeline = Pipeline::bundled();
        let subjectivity = SubjectivityLexicon::bundled(&pipeline);
        let polarity = PolarityLexicon::bundled(&pipeline);
        Resources::new(pipeline, subjectivity, polarity, None)
    }

    pub fn featurizer(&self, kind: FeatureKind) -> Featurizer {
        let tagger = (kind == FeatureKind::UnigramPos)
            .then(|| self.tagger.get_or_init(|| PosTagger::bundled(&self.pipeline)).clone());
        Featurizer::new(kind, tagger).expect("tagger present for pos features")
    }
}

/// A corpus with everything that does not depend on the experiment computed
/// once: tokens, subjectivity scores, heuristic verdicts and, lazily, the
/// features of each kind.
pub struct Dataset {
    resources: Resources,
    tweets: Vec<LabeledTweet>,
    tokens: Vec<TokenSequence>,
    scores: Vec<SubjectivityScore>,
    verdicts: Vec<HeuristicVerdict>,
    features: [OnceLock<Vec<Vec<String>>>; 3],
    preprocess_seconds: f64,
}

impl Dataset {
    /// Preprocesses and scores every tweet, in parallel.
    pub fn prepare(tweets: Vec<LabeledTweet>, resources: Resources) -> Dataset {
        let start = Instant::now();
        let tokens: Vec<TokenSequence> = tweets
            .par_iter()
            .map(|t| resources.pipeline.run(&t.id, &t.text))
            .collect();
        let preprocess_seconds = start.elapsed().as_secs_f64();
        let scores = tokens
            .par_iter()
            .map(|t| subjectivity::score_lexicon_mean(t, &resources.subjectivity))
            .collect();
        let verdicts = tokens
            .par_iter()
            .map(|t| efws::classify(&efws::score_words(t, &resources.polarity)))
            .collect();
        Dataset {
            resources,
            tweets,
            tokens,
            scores,
            verdicts,
            features: Default::default(),
            preprocess_seconds,
        }
    }

    /// Replaces the lexicon scores, e.g. with clause-ratio or precomputed ones.
    pub fn with_scores(mut self, scores: Vec<SubjectivityScore>) -> Result<Dataset> {
        ensure_arg!(
            scores.len() == self.tweets.len(),
            "{} subjectivity scores for {} tweets",
            scores.len(),
            self.tweets.len()
        );
        self.scores = scores;
        Ok(self)
    }

    /// Looks every tweet up in an `id -> score` table.
    pub fn with_external_scores(
        self,
        table: &std::collections::BTreeMap<String, SubjectivityScore>,
    ) -> Result<Dataset> {
        let mut scores = Vec::with_capacity(self.tweets.len());
        for t in &self.tweets {
            match table.get(&t.id) {
                Some(s) => scores.push(*s),
                None => {
                    return Err(Error::Config(format!(
                        "no external subjectivity score for tweet {:?}",
                        t.id
                    )))
                }
            }
        }
        self.with_scores(scores)
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    pub fn resources(&self) -> &Resources {
        &self.resources
    }

    pub fn tweets(&self) -> &[LabeledTweet] {
        &self.tweets
    }

    pub fn tokens(&self) -> &[TokenSequence] {
        &self.tokens
    }

    pub fn scores(&self) -> &[SubjectivityScore] {
        &self.scores
    }

    pub fn verdicts(&self) -> &[HeuristicVerdict] {
        &self.verdicts
    }

    pub fn preprocess_seconds(&self) -> f64 {
        self.preprocess_seconds
    }

    /// Feature strings of every tweet, extracted on first use.
    pub fn features(&self, kind: FeatureKind) -> &[Vec<String>] {
        self.features[kind.code() as usize].get_or_init(|| {
            let featurizer = self.resources.featurizer(kind);
            self.tokens.par_iter().map(|t| featurizer.features(t)).collect()
        })
    }

    /// Retention curve over the whole corpus (figure 1).
    pub fn retention(&self, thresholds: &[f64]) -> Result<Vec<RetentionPoint>> {
        subjectivity::retention_curve(&self.scores, thresholds)
    }

    /// Frozen test positions for a master seed, sorted.
    pub fn test_indices(&self, test_size: usize, seed: u64) -> Result<Vec<usize>> {
        ensure_arg!(test_size > 0, "test size must be positive, accuracy is undefined on an empty test set");
        ensure_arg!(
            test_size < self.len(),
            "test size {test_size} leaves no training data in a corpus of {} tweets",
            self.len()
        );
        let mut idx = corpus::sample_indices(self.len(), test_size, derive_seed(seed, "test-set", 0))?;
        idx.sort_unstable();
        Ok(idx)
    }

    /// Non-test positions scoring at least `threshold`, ascending.
    pub fn training_pool(&self, test: &[usize], threshold: f64, prune_heuristic: bool) -> Result<Vec<usize>> {
        let passing = subjectivity::filter_indices(&self.scores, threshold)?;
        let mut in_test = vec![false; self.len()];
        for &i in test {
            in_test[i] = true;
        }
        Ok(passing
            .into_iter()
            .filter(|&i| !in_test[i])
            .filter(|&i| !prune_heuristic || self.verdicts[i] == HeuristicVerdict::Abstain)
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub subjectivity_threshold: f64,
    pub train_size: usize,
    pub test_size: usize,
    pub feature_kind: FeatureKind,
    /// Classifier kind and its settings.
    pub hyperparameters: Hyperparameters,
    pub use_efws: bool,
    /// Drop heuristically labeled tweets from the training pool.
    pub efws_prune_training: bool,
    pub folds: usize,
    pub seed: u64,
    pub iterations: usize,
    pub min_count: u32,
    /// Largest SVM training set accepted; SMO cost grows quadratically.
    pub svm_max_train: usize,
    /// Also run the model on heuristically labeled tweets to report its
    /// accuracy there. These predictions never feed into `accuracy`.
    pub compare_on_covered: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            subjectivity_threshold: 0.5,
            train_size: 100_000,
            test_size: 5_000,
            feature_kind: FeatureKind::Unigram,
            hyperparameters: Hyperparameters::default_for(ModelKind::NaiveBayes),
            use_efws: false,
            efws_prune_training: false,
            folds: 5,
            seed: 1,
            iterations: 3,
            min_count: 1,
            svm_max_train: 50_000,
            compare_on_covered: true,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        ensure_arg!(
            (0.0..=1.0).contains(&self.subjectivity_threshold),
            "subjectivity threshold {} outside [0, 1]",
            self.subjectivity_threshold
        );
        ensure_arg!(self.train_size > 0, "train size must be positive");
        ensure_arg!(self.test_size > 0, "test size must be positive, accuracy is undefined on an empty test set");
        ensure_arg!(self.iterations > 0, "at least one iteration is required");
        if self.hyperparameters.kind() == ModelKind::Svm {
            ensure_arg!(
                self.train_size <= self.svm_max_train,
                "SVM training on {} tweets exceeds the limit of {}; raise the SVM limit or lower the train size",
                self.train_size,
                self.svm_max_train
            );
        }
        Ok(())
    }

    pub fn model(&self) -> ModelKind {
        self.hyperparameters.kind()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    /// `None` when the class was never predicted.
    pub precision: Option<f64>,
    /// `None` when the class does not occur in the test set.
    pub recall: Option<f64>,
    pub support: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PerClass {
    pub negative: ClassMetrics,
    pub positive: ClassMetrics,
}

/// `confusion[actual][predicted]`, classes indexed negative 0, positive 1.
pub type Confusion = [[usize; 2]; 2];

pub fn per_class(confusion: &Confusion) -> PerClass {
    let metrics = |c: usize| {
        let tp = confusion[c][c];
        let predicted = confusion[0][c] + confusion[1][c];
        let actual = confusion[c][0] + confusion[c][1];
        ClassMetrics {
            precision: (predicted > 0).then(|| tp as f64 / predicted as f64),
            recall: (actual > 0).then(|| tp as f64 / actual as f64),
            support: actual,
        }
    };
    PerClass {
        negative: metrics(0),
        positive: metrics(1),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationResult {
    pub seed: u64,
    pub pool_size: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub efws_labeled: usize,
    pub efws_correct: usize,
    /// Model predictions that count towards accuracy.
    pub model_predictions: usize,
    pub model_correct: usize,
    /// Model hits on the heuristically labeled tweets, when compared.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_correct_on_covered: Option<usize>,
    pub confusion: Confusion,
    pub vectorize_seconds: f64,
    pub training_report: TrainingReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    /// Mean of the per-iteration accuracies.
    pub accuracy: f64,
    pub accuracy_stddev: f64,
    pub efws_coverage: f64,
    /// Heuristic accuracy on the tweets it labeled; `None` without coverage.
    pub efws_accuracy: Option<f64>,
    /// Model accuracy on those same tweets.
    pub model_accuracy_on_covered: Option<f64>,
    /// Model accuracy on the tweets it had to label.
    pub model_accuracy_on_abstained: Option<f64>,
    pub per_class: PerClass,
    /// Report of the first iteration.
    pub training_report: TrainingReport,
    pub iterations: Vec<IterationResult>,
    pub preprocess_seconds: f64,
}

impl ExperimentResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    /// Sets every wall-clock field to 0 so that results of identical runs
    /// compare byte for byte.
    pub fn without_timings(mut self) -> Self {
        self.preprocess_seconds = 0.0;
        self.training_report.wall_clock_seconds = 0.0;
        for it in &mut self.iterations {
            it.vectorize_seconds = 0.0;
            it.training_report.wall_clock_seconds = 0.0;
        }
        self
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation; 0 for a single value.
fn stddev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Vectorizes `train` and fits a model on it.
pub fn train_on<F: Scalar>(
    dataset: &Dataset,
    train: &[usize],
    kind: FeatureKind,
    hyper: &Hyperparameters,
    min_count: u32,
    threshold: f64,
    seed: u64,
) -> Result<(TrainedModel<F>, f64)> {
    ensure_arg!(!train.is_empty(), "empty training set");
    let start = Instant::now();
    let all = dataset.features(kind);
    let rows: Vec<&[String]> = train.iter().map(|&i| all[i].as_slice()).collect();
    let vocab = features::build_vocab_from_features(&rows, kind, min_count)?;
    let x: Vec<SparseFeatureVector> = rows.iter().map(|f| features::vectorize_features(f, &vocab)).collect();
    let y: Vec<Sentiment> = train.iter().map(|&i| dataset.tweets[i].label).collect();
    let vectorize_seconds = start.elapsed().as_secs_f64();
    let model = models::fit::<F>(hyper, &x, &y, &vocab, threshold, seed)?;
    Ok((model, vectorize_seconds))
}

/// Outcome counts of labeling `test` with the heuristic then the model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Labeling {
    pub correct: usize,
    pub efws_labeled: usize,
    pub efws_correct: usize,
    pub model_predictions: usize,
    pub model_correct: usize,
    pub model_correct_on_covered: Option<usize>,
    pub confusion: Confusion,
}

pub fn label_test_set<F: Scalar>(
    dataset: &Dataset,
    model: &TrainedModel<F>,
    test: &[usize],
    use_efws: bool,
    compare_on_covered: bool,
) -> Labeling {
    let all = dataset.features(model.vocabulary.kind());
    let predict = |i: usize| model.model.predict(&features::vectorize_features(&all[i], &model.vocabulary));
    let mut out = Labeling::default();
    let mut covered_hits = 0;
    for &i in test {
        let actual = dataset.tweets[i].label;
        let heuristic = if use_efws { dataset.verdicts[i].label() } else { None };
        let predicted = match heuristic {
            Some(label) => {
                out.efws_labeled += 1;
                out.efws_correct += usize::from(label == actual);
                if compare_on_covered {
                    covered_hits += usize::from(predict(i) == actual);
                }
                label
            }
            None => {
                let label = predict(i);
                out.model_predictions += 1;
                out.model_correct += usize::from(label == actual);
                label
            }
        };
        out.correct += usize::from(predicted == actual);
        out.confusion[actual.index()][predicted.index()] += 1;
    }
    if use_efws && compare_on_covered {
        out.model_correct_on_covered = Some(covered_hits);
    }
    out
}

fn sample_pool(pool: &[usize], n: usize, seed: u64) -> Result<Vec<usize>> {
    let mut picked: Vec<usize> = corpus::sample_indices(pool.len(), n, seed)?
        .into_iter()
        .map(|j| pool[j])
        .collect();
    picked.sort_unstable();
    Ok(picked)
}

fn insufficient(pool: usize, config: &ExperimentConfig) -> Error {
    Error::InvalidArgument(format!(
        "only {pool} training tweets score at least {} in subjectivity, fewer than the requested train size {}; \
         lower the threshold or the train size",
        config.subjectivity_threshold, config.train_size
    ))
}

/// Runs `config.iterations` independent train/test rounds on a shared,
/// frozen test set and averages them.
pub fn run_experiment<F: Scalar>(dataset: &Dataset, config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let test = dataset.test_indices(config.test_size, config.seed)?;
    let pool = dataset.training_pool(&test, config.subjectivity_threshold, config.efws_prune_training)?;
    if pool.len() < config.train_size {
        return Err(insufficient(pool.len(), config));
    }
    let iterations: Vec<IterationResult> = (0..config.iterations)
        .into_par_iter()
        .map(|k| {
            let iter_seed = derive_seed(config.seed, "iteration", k as u64);
            let train = sample_pool(&pool, config.train_size, derive_seed(iter_seed, "train-sample", 0))?;
            let (model, vectorize_seconds) = train_on::<F>(
                dataset,
                &train,
                config.feature_kind,
                &config.hyperparameters,
                config.min_count,
                config.subjectivity_threshold,
                derive_seed(iter_seed, "fit", 0),
            )?;
            let l = label_test_set(dataset, &model, &test, config.use_efws, config.compare_on_covered);
            Ok(IterationResult {
                seed: iter_seed,
                pool_size: pool.len(),
                n_train: train.len(),
                n_test: test.len(),
                correct: l.correct,
                accuracy: l.correct as f64 / test.len() as f64,
                efws_labeled: l.efws_labeled,
                efws_correct: l.efws_correct,
                model_predictions: l.model_predictions,
                model_correct: l.model_correct,
                model_correct_on_covered: l.model_correct_on_covered,
                confusion: l.confusion,
                vectorize_seconds,
                training_report: model.report,
            })
        })
        .collect::<Result<_>>()?;
    let accuracies: Vec<f64> = iterations.iter().map(|r| r.accuracy).collect();
    let sum = |f: fn(&IterationResult) -> usize| iterations.iter().map(f).sum::<usize>();
    let labeled = sum(|r| r.efws_labeled);
    let tested = sum(|r| r.n_test);
    let mut confusion = [[0usize; 2]; 2];
    for r in &iterations {
        for a in 0..2 {
            for p in 0..2 {
                confusion[a][p] += r.confusion[a][p];
            }
        }
    }
    let model_on_covered = iterations
        .iter()
        .map(|r| r.model_correct_on_covered)
        .sum::<Option<usize>>()
        .and_then(|hits| ratio(hits, labeled));
    Ok(ExperimentResult {
        config: config.clone(),
        accuracy: mean(&accuracies),
        accuracy_stddev: stddev(&accuracies),
        efws_coverage: labeled as f64 / tested as f64,
        efws_accuracy: ratio(sum(|r| r.efws_correct), labeled),
        model_accuracy_on_covered: model_on_covered,
        model_accuracy_on_abstained: ratio(sum(|r| r.model_correct), sum(|r| r.model_predictions)),
        per_class: per_class(&confusion),
        training_report: iterations[0].training_report.clone(),
        iterations,
        preprocess_seconds: dataset.preprocess_seconds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub folds: usize,
    pub n: usize,
    pub mean: f64,
    pub stddev: f64,
    pub fold_accuracies: Vec<f64>,
}

/// Stratified fold of each position. Each class is shuffled on its own and
/// dealt round-robin, continuing where the previous class stopped, so fold
/// sizes differ by at most one and class ratios are kept.
pub fn fold_assignment(labels: &[Sentiment], folds: usize, seed: u64) -> Result<Vec<usize>> {
    ensure_arg!(folds >= 2, "cross validation needs at least 2 folds, got {folds}");
    ensure_arg!(
        folds <= labels.len(),
        "{folds} folds for {} tweets; use more data or fewer folds",
        labels.len()
    );
    let mut assignment = vec![0usize; labels.len()];
    let mut next = 0usize;
    for class in Sentiment::ALL {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        ensure_arg!(
            members.len() >= 2,
            "only {} {class} tweet(s): every fold needs both classes to train on; use more data or fewer folds",
            members.len()
        );
        use rand::seq::SliceRandom;
        members.shuffle(&mut seed::stage_rng(seed, "folds", class.index() as u64));
        for i in members {
            assignment[i] = next % folds;
            next += 1;
        }
    }
    Ok(assignment)
}

/// Accuracy of fold `fold`: train on the other folds, test on this one.
pub fn evaluate_fold<F: Scalar>(
    dataset: &Dataset,
    config: &ExperimentConfig,
    positions: &[usize],
    assignment: &[usize],
    fold: usize,
) -> Result<f64> {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (&p, &a) in positions.iter().zip(assignment) {
        if a == fold {
            test.push(p);
        } else {
            train.push(p);
        }
    }
    let (model, _) = train_on::<F>(
        dataset,
        &train,
        config.feature_kind,
        &config.hyperparameters,
        config.min_count,
        config.subjectivity_threshold,
        derive_seed(config.seed, "fold-fit", fold as u64),
    )?;
    let l = label_test_set(dataset, &model, &test, config.use_efws, false);
    Ok(l.correct as f64 / test.len() as f64)
}

/// K-fold cross validation over `train_size` tweets drawn from the filtered
/// corpus (no held-out test set is reserved).
pub fn cross_validate<F: Scalar>(dataset: &Dataset, config: &ExperimentConfig) -> Result<CrossValidation> {
    ensure_arg!(
        (0.0..=1.0).contains(&config.subjectivity_threshold),
        "subjectivity threshold {} outside [0, 1]",
        config.subjectivity_threshold
    );
    ensure_arg!(config.train_size > 0, "train size must be positive");
    let pool = dataset.training_pool(&[], config.subjectivity_threshold, config.efws_prune_training)?;
    if pool.len() < config.train_size {
        return Err(insufficient(pool.len(), config));
    }
    let positions = sample_pool(&pool, config.train_size, derive_seed(config.seed, "cv-sample", 0))?;
    let labels: Vec<Sentiment> = positions.iter().map(|&i| dataset.tweets[i].label).collect();
    let assignment = fold_assignment(&labels, config.folds, derive_seed(config.seed, "cv-folds", 0))?;
    let fold_accuracies: Vec<f64> = (0..config.folds)
        .into_par_iter()
        .map(|k| evaluate_fold::<F>(dataset, config, &positions, &assignment, k))
        .collect::<Result<_>>()?;
    Ok(CrossValidation {
        folds: config.folds,
        n: positions.len(),
        mean: mean(&fold_accuracies),
        stddev: stddev(&fold_accuracies),
        fold_accuracies,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub threshold: f64,
    pub accuracy: f64,
    pub accuracy_stddev: f64,
    pub pool_size: usize,
}

/// One experiment per threshold at a fixed train size (figure 2).
pub fn threshold_sweep<F: Scalar>(
    dataset: &Dataset,
    config: &ExperimentConfig,
    thresholds: &[f64],
) -> Result<Vec<SweepPoint>> {
    ensure_arg!(!thresholds.is_empty(), "no thresholds to sweep");
    ensure_arg!(
        thresholds.windows(2).all(|w| w[0] < w[1]),
        "sweep thresholds must be strictly ascending"
    );
    thresholds
        .iter()
        .map(|&t| {
            let c = ExperimentConfig {
                subjectivity_threshold: t,
                ..config.clone()
            };
            let r = run_experiment::<F>(dataset, &c)?;
            Ok(SweepPoint {
                threshold: t,
                accuracy: r.accuracy,
                accuracy_stddev: r.accuracy_stddev,
                pool_size: r.iterations[0].pool_size,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(mut out: W, points: &[SweepPoint]) -> std::io::Result<()> {
    writeln!(out, "threshold,accuracy")?;
    for p in points {
        writeln!(out, "{},{}", p.threshold, p.accuracy)?;
    }
    Ok(())
}

/// What to time in [`timing_comparison`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingPlan {
    /// Size of the unfiltered baseline training set.
    pub baseline_train_size: usize,
    pub thresholds: Vec<f64>,
    pub classifiers: Vec<Hyperparameters>,
    /// Fits per setting; the median is reported.
    pub repetitions: usize,
}

impl Default for TimingPlan {
    fn default() -> Self {
        TimingPlan {
            baseline_train_size: 200_000,
            thresholds: vec![0.5, 0.8],
            classifiers: ModelKind::ALL.iter().map(|&k| Hyperparameters::default_for(k)).collect(),
            repetitions: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    /// `baseline` or `subjectivity=<threshold>`.
    pub setting: String,
    pub classifier: ModelKind,
    /// Median fit time.
    pub seconds: f64,
    pub samples: Vec<f64>,
    pub n_train: usize,
    pub vocab_size: usize,
    /// Vocabulary building and vectorization, timed apart from the fit.
    pub vectorize_seconds: f64,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Fit times of an unfiltered baseline sample against filtered samples
/// (figures 3 and 4).
///
/// The baseline draws `baseline_train_size` tweets from the whole training
/// side; each filtered setting draws `min(config.train_size, pool)` tweets
/// from its pool. All fits run one after another on a single thread.
pub fn timing_comparison<F: Scalar>(
    dataset: &Dataset,
    config: &ExperimentConfig,
    plan: &TimingPlan,
) -> Result<Vec<TimingRow>> {
    ensure_arg!(plan.repetitions > 0, "at least one timing repetition is required");
    ensure_arg!(!plan.classifiers.is_empty(), "no classifiers to time");
    ensure_arg!(plan.baseline_train_size > 0 && config.train_size > 0, "train sizes must be positive");
    let test = dataset.test_indices(config.test_size, config.seed)?;
    let mut settings: Vec<(String, f64, Vec<usize>)> = Vec::new();
    let everything = dataset.training_pool(&test, 0.0, false)?;
    ensure_arg!(
        everything.len() >= plan.baseline_train_size,
        "baseline train size {} exceeds the {} available training tweets",
        plan.baseline_train_size,
        everything.len()
    );
    settings.push((
        "baseline".to_string(),
        0.0,
        sample_pool(&everything, plan.baseline_train_size, derive_seed(config.seed, "timing-sample", 0))?,
    ));
    for (k, &t) in plan.thresholds.iter().enumerate() {
        let pool = dataset.training_pool(&test, t, config.efws_prune_training)?;
        let n = config.train_size.min(pool.len());
        ensure_arg!(n > 0, "no training tweets score at least {t} in subjectivity");
        settings.push((
            format!("subjectivity={t}"),
            t,
            sample_pool(&pool, n, derive_seed(config.seed, "timing-sample", k as u64 + 1))?,
        ));
    }
    for hyper in &plan.classifiers {
        if hyper.kind() == ModelKind::Svm {
            for (name, _, train) in &settings {
                ensure_arg!(
                    train.len() <= config.svm_max_train,
                    "SVM setting {name} has {} training tweets, over the limit of {}",
                    train.len(),
                    config.svm_max_train
                );
            }
        }
    }
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::Config(format!("cannot build the timing thread pool: {e}")))?;
    single.install(|| {
        let mut rows = Vec::new();
        for hyper in &plan.classifiers {
            for (name, threshold, train) in &settings {
                let mut samples = Vec::with_capacity(plan.repetitions);
                let mut last = None;
                for _ in 0..plan.repetitions {
                    let (model, vec_s) = train_on::<F>(
                        dataset,
                        train,
                        config.feature_kind,
                        hyper,
                        config.min_count,
                        *threshold,
                        derive_seed(config.seed, "timing-fit", 0),
                    )?;
                    samples.push(model.report.wall_clock_seconds);
                    last = Some((model.report, vec_s));
                }
                let (report, vectorize_seconds) = last.expect("at least one repetition");
                rows.push(TimingRow {
                    setting: name.clone(),
                    classifier: hyper.kind(),
                    seconds: median(&samples),
                    samples,
                    n_train: report.n_train,
                    vocab_size: report.vocab_size,
                    vectorize_seconds,
                });
            }
        }
        Ok(rows)
    })
}

pub fn write_timing_csv<W: Write>(mut out: W, rows: &[TimingRow]) -> std::io::Result<()> {
    writeln!(out, "setting,classifier,seconds")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.setting, r.classifier.name(), r.seconds)?;
    }
    Ok(())
}

/// Thresholds 0.0, 0.1, ..., 0.9 as exact decimals.
pub fn decile_thresholds() -> Vec<f64> {
    (0..10).map(|i| i as f64 / 10.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Sentiment::{Negative, Positive};
    use crate::models::NaiveBayes;
    use proptest::prelude::*;

    fn tweet(id: usize, text: &str, label: Sentiment) -> LabeledTweet {
        LabeledTweet {
            id: id.to_string(),
            text: text.to_string(),
            label,
        }
    }

    /// Small corpus where subjective tweets carry clean labels and the
    /// objective ones are mislabeled half the time.
    fn toy(n: usize) -> Vec<LabeledTweet> {
        let pos = ["great happy day", "awesome fun party hope", "love this wonderful song", "happy good news"];
        let neg = ["awful sad day", "damn boring party sad", "hate this horrible song", "sad bad news"];
        let obj = ["bus station monday", "office report tuesday", "train platform ticket"];
        (0..n)
            .map(|i| {
                let label = if i % 2 == 0 { Positive } else { Negative };
                match i % 5 {
                    0 | 1 => {
                        let flip = (i / 5) % 2 == 0;
                        let l = if flip { label.flipped() } else { label };
                        tweet(i, obj[i % 3], l)
                    }
                    _ => {
                        let text = if label == Positive { pos[i % 4] } else { neg[i % 4] };
                        tweet(i, text, label)
                    }
                }
            })
            .collect()
    }

    fn dataset(n: usize) -> Dataset {
        Dataset::prepare(toy(n), Resources::bundled())
    }

    fn config() -> ExperimentConfig {
        ExperimentConfig {
            subjectivity_threshold: 0.0,
            train_size: 60,
            test_size: 30,
            iterations: 3,
            seed: 7,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn accuracy_decomposes_and_averages() {
        let d = dataset(200);
        for use_efws in [false, true] {
            let r = run_experiment::<f64>(&d, &ExperimentConfig { use_efws, ..config() }).unwrap();
            for it in &r.iterations {
                assert_eq!(it.correct, it.efws_correct + it.model_correct);
                assert_eq!(it.model_predictions + it.efws_labeled, it.n_test);
                assert!((it.accuracy * it.n_test as f64 - it.correct as f64).abs() < 1e-9);
            }
            let m = r.iterations.iter().map(|i| i.accuracy).sum::<f64>() / 3.0;
            assert!((r.accuracy - m).abs() < 1e-12);
            if !use_efws {
                assert_eq!(r.efws_coverage, 0.0);
                assert!(r.efws_accuracy.is_none());
            }
        }
    }

    #[test]
    fn heuristic_short_circuits_the_model() {
        let d = dataset(200);
        let c = ExperimentConfig {
            use_efws: true,
            compare_on_covered: false,
            ..config()
        };
        let test = d.test_indices(c.test_size, c.seed).unwrap();
        let abstained = test.iter().filter(|&&i| d.verdicts()[i] == HeuristicVerdict::Abstain).count();
        let r = run_experiment::<f64>(&d, &c).unwrap();
        assert!(abstained < test.len(), "toy corpus should trigger the heuristic");
        for it in &r.iterations {
            assert_eq!(it.model_predictions, abstained);
        }
    }

    #[test]
    fn test_set_is_frozen() {
        let d = dataset(200);
        let a = d.test_indices(30, 7).unwrap();
        assert_eq!(a, d.test_indices(30, 7).unwrap());
        let pool_low = d.training_pool(&a, 0.0, false).unwrap();
        let pool_high = d.training_pool(&a, 0.5, false).unwrap();
        assert!(pool_high.iter().all(|i| pool_low.contains(i)));
        assert!(pool_low.iter().all(|i| !a.contains(i)));
    }

    #[test]
    fn errors_are_explicit() {
        let d = dataset(100);
        let small = run_experiment::<f64>(&d, &ExperimentConfig { test_size: 0, ..config() });
        assert!(matches!(small, Err(Error::InvalidArgument(m)) if m.contains("test size")));
        let big = run_experiment::<f64>(&d, &ExperimentConfig { train_size: 95, ..config() });
        assert!(matches!(big, Err(Error::InvalidArgument(m)) if m.contains("lower the threshold")));
        let threshold = run_experiment::<f64>(
            &d,
            &ExperimentConfig {
                subjectivity_threshold: 1.5,
                ..config()
            },
        );
        assert!(matches!(threshold, Err(Error::InvalidArgument(_))));
        let svm = ExperimentConfig {
            hyperparameters: Hyperparameters::default_for(ModelKind::Svm),
            svm_max_train: 10,
            ..config()
        };
        assert!(matches!(run_experiment::<f64>(&d, &svm), Err(Error::InvalidArgument(m)) if m.contains("SVM")));
    }

    #[test]
    fn deterministic_results() {
        let d = dataset(150);
        let a = run_experiment::<f64>(&d, &config()).unwrap().without_timings();
        let b = run_experiment::<f64>(&d, &config()).unwrap().without_timings();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn per_class_metrics() {
        let m = per_class(&[[3, 1], [2, 4]]);
        assert_eq!(m.negative.precision, Some(0.6));
        assert_eq!(m.negative.recall, Some(0.75));
        assert_eq!(m.positive.precision, Some(0.8));
        assert_eq!(m.positive.support, 6);
        let empty = per_class(&[[2, 0], [0, 0]]);
        assert_eq!(empty.positive.precision, None);
        assert_eq!(empty.positive.recall, None);
    }

    #[test]
    fn folds_are_stratified_and_seeded() {
        let labels: Vec<Sentiment> = (0..23).map(|i| if i % 3 == 0 { Negative } else { Positive }).collect();
        let a = fold_assignment(&labels, 4, 9).unwrap();
        assert_eq!(a, fold_assignment(&labels, 4, 9).unwrap());
        let mut sizes = [0usize; 4];
        let mut negatives = [0usize; 4];
        for (f, l) in a.iter().zip(&labels) {
            sizes[*f] += 1;
            negatives[*f] += usize::from(*l == Negative);
        }
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        assert!(negatives.iter().max().unwrap() - negatives.iter().min().unwrap() <= 1);
        assert!(fold_assignment(&labels, 1, 0).is_err());
        assert!(fold_assignment(&[Positive, Positive, Negative], 2, 0).is_err());
    }

    /// Leave-one-out against a direct loop that trains naive Bayes on every
    /// other tweet and checks the held-out one.
    #[test]
    fn leave_one_out_matches_brute_force() {
        let d = dataset(10);
        let c = ExperimentConfig {
            train_size: 10,
            folds: 10,
            ..config()
        };
        let cv = cross_validate::<f64>(&d, &c).unwrap();
        let r = d.resources();
        let featurizer = r.featurizer(FeatureKind::Unigram);
        let mut hits = 0;
        for held in 0..10 {
            let train: Vec<usize> = (0..10).filter(|&i| i != held).collect();
            let feats: Vec<Vec<String>> = train.iter().map(|&i| featurizer.features(&d.tokens()[i])).collect();
            let vocab = features::build_vocab_from_features(&feats, FeatureKind::Unigram, 1).unwrap();
            let x: Vec<_> = feats.iter().map(|f| features::vectorize_features(f, &vocab)).collect();
            let y: Vec<_> = train.iter().map(|&i| d.tweets()[i].label).collect();
            let nb = NaiveBayes::<f64>::train(&x, &y, vocab.len(), 1.0).unwrap();
            let probe = features::vectorize(&d.tokens()[held], &vocab, &featurizer);
            hits += usize::from(nb.predict(&probe) == d.tweets()[held].label);
        }
        assert!((cv.mean - hits as f64 / 10.0).abs() < 1e-12, "{} vs {hits}/10", cv.mean);
        assert_eq!(cv.fold_accuracies.len(), 10);
    }

    #[test]
    fn fold_order_does_not_matter() {
        let d = dataset(60);
        let c = ExperimentConfig {
            train_size: 60,
            folds: 4,
            ..config()
        };
        let cv = cross_validate::<f64>(&d, &c).unwrap();
        let positions = sample_pool(
            &d.training_pool(&[], 0.0, false).unwrap(),
            60,
            derive_seed(c.seed, "cv-sample", 0),
        )
        .unwrap();
        let labels: Vec<_> = positions.iter().map(|&i| d.tweets()[i].label).collect();
        let assignment = fold_assignment(&labels, 4, derive_seed(c.seed, "cv-folds", 0)).unwrap();
        let mut reversed: Vec<f64> = (0..4)
            .rev()
            .map(|k| evaluate_fold::<f64>(&d, &c, &positions, &assignment, k).unwrap())
            .collect();
        reversed.reverse();
        assert_eq!(reversed, cv.fold_accuracies);
    }

    #[test]
    fn sweep_rows_match_direct_runs() {
        let d = dataset(200);
        let c = ExperimentConfig {
            train_size: 40,
            ..config()
        };
        let points = threshold_sweep::<f64>(&d, &c, &[0.0, 0.3]).unwrap();
        assert_eq!(points.len(), 2);
        let direct = run_experiment::<f64>(&d, &ExperimentConfig { subjectivity_threshold: 0.3, ..c.clone() }).unwrap();
        assert_eq!(points[1].accuracy, direct.accuracy);
        assert!(threshold_sweep::<f64>(&d, &c, &[0.3, 0.1]).is_err());
        let mut csv = Vec::new();
        write_sweep_csv(&mut csv, &points).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("threshold,accuracy\n0,"));
    }

    #[test]
    fn timing_has_one_row_per_pair() {
        let d = dataset(200);
        let plan = TimingPlan {
            baseline_train_size: 100,
            repetitions: 2,
            ..TimingPlan::default()
        };
        let rows = timing_comparison::<f64>(&d, &ExperimentConfig { train_size: 50, ..config() }, &plan).unwrap();
        assert_eq!(rows.len(), 9);
        for r in &rows {
            assert_eq!(r.samples.len(), 2);
            assert!(r.seconds > 0.0);
        }
        assert_eq!(rows[0].setting, "baseline");
        assert_eq!(rows[1].setting, "subjectivity=0.5");
        let mut csv = Vec::new();
        write_timing_csv(&mut csv, &rows).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 10);
    }

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    proptest! {
        #[test]
        fn fold_sizes_stay_balanced(n_pos in 2usize..30, n_neg in 2usize..30, k in 2usize..6, seed in any::<u64>()) {
            let labels: Vec<Sentiment> = (0..n_pos).map(|_| Positive).chain((0..n_neg).map(|_| Negative)).collect();
            prop_assume!(k <= labels.len());
            let a = fold_assignment(&labels, k, seed).unwrap();
            let mut sizes = vec![0usize; k];
            for f in a {
                sizes[f] += 1;
            }
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
    }
}
