use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use subjsent::corpus::{self, EmoticonSet, LabeledTweet, LoadOptions, RawRecord, Sentiment};
use subjsent::efws::{self, PolarityLexicon};
use subjsent::eval::{self, Dataset, ExperimentConfig, Resources, TimingPlan};
use subjsent::features::{self, FeatureKind, PosTagger};
use subjsent::models::{self, TrainedModel};
use subjsent::preprocess::{Pipeline, PipelineConfig, TokenSequence};
use subjsent::scalar::Scalar;
use subjsent::seed::derive_seed;
use subjsent::subjectivity::{self, SubjectivityLexicon};
use subjsent::{Error, ErrorKind};

use crate::args::*;

/// A failed run: the stage that failed, what went wrong and the exit code.
#[derive(Debug)]
pub struct Failure {
    pub stage: &'static str,
    pub message: String,
    pub code: u8,
}

impl Failure {
    fn usage(stage: &'static str, message: impl Into<String>) -> Self {
        Failure {
            stage,
            message: message.into(),
            code: 1,
        }
    }

    fn data(stage: &'static str, message: impl Into<String>) -> Self {
        Failure {
            stage,
            message: message.into(),
            code: 2,
        }
    }
}

trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure>;
}

impl<T> Stage<T> for subjsent::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure> {
        self.map_err(|e: Error| Failure {
            stage,
            message: e.to_string(),
            code: match e.kind() {
                ErrorKind::Usage => 1,
                ErrorKind::Data => 2,
                ErrorKind::Training => 3,
            },
        })
    }
}

impl<T> Stage<T> for std::io::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure> {
        self.map_err(|e| Failure::data(stage, e.to_string()))
    }
}

type Run = Result<(), Failure>;

fn log(stage: &str, message: impl std::fmt::Display) {
    eprintln!("[{stage}] {message}");
}

pub fn run(command: Command) -> Run {
    match command {
        Command::Ingest(a) => {
            threads(&a.common)?;
            ingest(a)
        }
        Command::Preprocess(a) => {
            threads(&a.common)?;
            preprocess(a)
        }
        Command::Filter(a) => {
            threads(&a.common)?;
            filter(a)
        }
        Command::Efws(a) => {
            threads(&a.common)?;
            efws_labels(a)
        }
        Command::Train(a) => {
            threads(&a.common)?;
            match a.training.model.precision {
                Precision::F32 => train::<f32>(a),
                Precision::F64 => train::<f64>(a),
            }
        }
        Command::Predict(a) => {
            threads(&a.common)?;
            predict(a)
        }
        Command::Evaluate(a) => {
            threads(&a.common)?;
            match a.experiment.training.model.precision {
                Precision::F32 => evaluate::<f32>(a),
                Precision::F64 => evaluate::<f64>(a),
            }
        }
        Command::Sweep(a) => {
            threads(&a.common)?;
            match a.experiment.training.model.precision {
                Precision::F32 => sweep::<f32>(a),
                Precision::F64 => sweep::<f64>(a),
            }
        }
        Command::Bench(a) => {
            threads(&a.common)?;
            match a.experiment.training.model.precision {
                Precision::F32 => bench::<f32>(a),
                Precision::F64 => bench::<f64>(a),
            }
        }
    }
}

fn threads(common: &Common) -> Run {
    if common.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(common.threads)
            .build_global()
            .map_err(|e| Failure::usage("threads", e.to_string()))?;
    }
    Ok(())
}

fn sink(output: &Output) -> Result<Box<dyn Write>, Failure> {
    Ok(match &output.out {
        Some(path) => Box::new(BufWriter::new(create(path)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn create(path: &Path) -> Result<File, Failure> {
    File::create(path).map_err(|e| Failure::data("output", format!("{}: {e}", path.display())))
}

fn emoticons(input: &Input) -> Result<EmoticonSet, Failure> {
    match &input.emoticons {
        Some(p) => EmoticonSet::load(p).stage("assets"),
        None => Ok(EmoticonSet::bundled()),
    }
}

fn records(input: &Input) -> Result<Vec<RawRecord>, Failure> {
    let options = LoadOptions {
        limit: input.limit,
        lenient: input.lenient,
    };
    let loaded = corpus::load_csv(&input.input, &options).stage("load")?;
    if !loaded.skipped.is_empty() {
        log(
            "load",
            format!("skipped {} malformed row(s), first: {}", loaded.skipped.len(), loaded.skipped[0]),
        );
    }
    log("load", format!("{} rows from {}", loaded.records.len(), input.input.display()));
    Ok(loaded.records)
}

fn tweets(input: &Input) -> Result<Vec<LabeledTweet>, Failure> {
    let records = records(input)?;
    let ingested = corpus::ingest(&records, &emoticons(input)?, input.lenient).stage("ingest")?;
    log(
        "ingest",
        format!(
            "{} tweets, {} rejected polarity codes, {} duplicate ids",
            ingested.tweets.len(),
            ingested.rejected.len(),
            ingested.duplicates
        ),
    );
    Ok(ingested.tweets)
}

fn pipeline(lexicons: &Lexicons, input: &Input) -> Result<Pipeline, Failure> {
    Pipeline::new(PipelineConfig {
        stopword_path: lexicons.stopwords.clone(),
        acronym_path: lexicons.acronyms.clone(),
        emoticon_path: input.emoticons.clone(),
        ..PipelineConfig::default()
    })
    .stage("assets")
}

fn resources(lexicons: &Lexicons, input: &Input) -> Result<Resources, Failure> {
    let pipeline = pipeline(lexicons, input)?;
    let subjectivity = match &lexicons.subjectivity_lexicon {
        Some(p) => SubjectivityLexicon::load(p, &pipeline).stage("assets")?,
        None => SubjectivityLexicon::bundled(&pipeline),
    };
    let polarity = match &lexicons.polarity_lexicon {
        Some(p) => PolarityLexicon::load(p, lexicons.synonyms.as_deref(), &pipeline).stage("assets")?,
        None => PolarityLexicon::bundled(&pipeline),
    };
    let tagger = match &lexicons.pos_lexicon {
        Some(p) => Some(PosTagger::load(p, &pipeline).stage("assets")?),
        None => None,
    };
    Ok(Resources::new(pipeline, subjectivity, polarity, tagger))
}

fn dataset(lexicons: &Lexicons, input: &Input) -> Result<Dataset, Failure> {
    let tweets = tweets(input)?;
    let resources = resources(lexicons, input)?;
    let mut dataset = Dataset::prepare(tweets, resources);
    log("preprocess", format!("{} tweets", dataset.len()));
    if let Some(path) = &lexicons.scores {
        let table = subjectivity::load_external_scores(path).stage("subjectivity")?;
        dataset = dataset.with_external_scores(&table).stage("subjectivity")?;
        log("subjectivity", format!("scores from {}", path.display()));
    }
    Ok(dataset)
}

fn check_threshold(stage: &'static str, t: f64) -> Run {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Failure::usage(stage, format!("threshold {t} is outside [0, 1]")))
    }
}

fn ingest(a: IngestArgs) -> Run {
    let tweets = tweets(&a.input)?;
    let mut w = csv::Writer::from_writer(sink(&a.output)?);
    let io = |e: csv::Error| Failure::data("output", e.to_string());
    w.write_record(["id", "label", "text"]).map_err(io)?;
    for t in &tweets {
        w.write_record([t.id.as_str(), t.label.as_str(), t.text.as_str()]).map_err(io)?;
    }
    w.flush().stage("output")
}

fn preprocess(a: PreprocessArgs) -> Run {
    let tweets = tweets(&a.input)?;
    let pipeline = pipeline(&a.lexicons, &a.input)?;
    let tokens: Vec<TokenSequence> = tweets.par_iter().map(|t| pipeline.run(&t.id, &t.text)).collect();
    log("preprocess", format!("{} tweets", tokens.len()));
    let mut out = sink(&a.output)?;
    for t in &tokens {
        writeln!(out, "{}\t{}", t.source_id, t.tokens.join(" ")).stage("output")?;
    }
    out.flush().stage("output")
}

fn filter(a: FilterArgs) -> Run {
    check_threshold("filter", a.threshold)?;
    let dataset = dataset(&a.lexicons, &a.input)?;
    let mut out = sink(&a.output)?;
    if a.curve {
        let curve = dataset.retention(&eval::decile_thresholds()).stage("filter")?;
        subjectivity::write_retention_csv(&mut out, &curve).stage("output")?;
    } else {
        let kept = subjectivity::filter_indices(dataset.scores(), a.threshold).stage("filter")?;
        log("filter", format!("kept {} of {} at threshold {}", kept.len(), dataset.len(), a.threshold));
        for i in kept {
            writeln!(out, "{}\t{}", dataset.tweets()[i].id, dataset.scores()[i].value).stage("output")?;
        }
    }
    out.flush().stage("output")
}

fn efws_labels(a: EfwsArgs) -> Run {
    let dataset = dataset(&a.lexicons, &a.input)?;
    let labels = efws::label_batch(dataset.tokens(), &dataset.resources().polarity);
    let correct = dataset
        .tweets()
        .iter()
        .zip(dataset.verdicts())
        .filter(|(t, v)| v.label() == Some(t.label))
        .count();
    let n = labels.labeled.len();
    log(
        "efws",
        format!(
            "labeled {n} of {} ({:.1}%), {correct} agree with the emoticon label",
            dataset.len(),
            100.0 * n as f64 / dataset.len().max(1) as f64
        ),
    );
    let mut out = sink(&a.output)?;
    efws::write_labels_csv(&mut out, &labels).stage("output")?;
    out.flush().stage("output")
}

fn train<F: Scalar>(a: TrainArgs) -> Run {
    let t = &a.training;
    check_threshold("config", t.threshold)?;
    if t.train_size == 0 {
        return Err(Failure::usage("config", "train size must be positive"));
    }
    let kind: models::ModelKind = t.model.model.into();
    if kind == models::ModelKind::Svm && t.train_size > t.model.svm_max_train {
        return Err(Failure::usage(
            "config",
            format!(
                "SVM train size {} is over the limit of {}; raise --svm-max-train to allow it",
                t.train_size, t.model.svm_max_train
            ),
        ));
    }
    let dataset = dataset(&a.lexicons, &a.input)?;
    let pool = dataset.training_pool(&[], t.threshold, t.prune_efws).stage("filter")?;
    if pool.len() < t.train_size {
        return Err(Failure::usage(
            "filter",
            format!(
                "only {} tweets reach subjectivity {} but {} are needed; lower the threshold or the train size",
                pool.len(),
                t.threshold,
                t.train_size
            ),
        ));
    }
    let mut sample: Vec<usize> = corpus::sample_indices(pool.len(), t.train_size, derive_seed(t.seed, "train-sample", 0))
        .stage("sample")?
        .into_iter()
        .map(|i| pool[i])
        .collect();
    sample.sort_unstable();
    let hyper = t.model.hyperparameters(kind);
    let (model, _) = eval::train_on::<F>(
        &dataset,
        &sample,
        t.features.into(),
        &hyper,
        t.min_count,
        t.threshold,
        derive_seed(t.seed, "fit", 0),
    )
    .stage("train")?;
    log(
        "train",
        format!(
            "{} on {} tweets, {} features, {:.3}s",
            kind,
            model.report.n_train,
            model.report.vocab_size,
            model.report.wall_clock_seconds
        ),
    );
    model.save(&a.model_file).stage("save")?;
    log("save", a.model_file.display());
    let mut out = sink(&a.output)?;
    writeln!(out, "{}", model.report.to_json()).stage("output")?;
    out.flush().stage("output")
}

fn predict(a: PredictArgs) -> Run {
    let bytes = std::fs::read(&a.model_file)
        .map_err(|e| Failure::data("model", format!("{}: {e}", a.model_file.display())))?;
    match models::stored_precision(&bytes).stage("model")? {
        4 => predict_with(a, TrainedModel::<f32>::from_bytes(&bytes).stage("model")?),
        _ => predict_with(a, TrainedModel::<f64>::from_bytes(&bytes).stage("model")?),
    }
}

fn predict_with<F: Scalar>(a: PredictArgs, model: TrainedModel<F>) -> Run {
    log(
        "model",
        format!(
            "{} on {} features, trained on {} tweets",
            model.report.model, model.report.feature_kind, model.report.n_train
        ),
    );
    let records = records(&a.input)?;
    let emoticons = emoticons(&a.input)?;
    let resources = resources(&a.lexicons, &a.input)?;
    let featurizer = resources.featurizer(model.report.feature_kind);
    let predictions: Vec<(Sentiment, &str)> = records
        .par_iter()
        .map(|r| {
            let tokens = resources.pipeline.run(&r.id, &emoticons.strip(&r.text));
            let heuristic = a
                .efws
                .then(|| efws::classify(&efws::score_words(&tokens, &resources.polarity)).label())
                .flatten();
            match heuristic {
                Some(label) => (label, "heuristic"),
                None => {
                    let x = features::vectorize_features(&featurizer.features(&tokens), &model.vocabulary);
                    (model.predict(&x), "model")
                }
            }
        })
        .collect();
    let known: Vec<(Sentiment, Sentiment)> = records
        .iter()
        .zip(&predictions)
        .filter_map(|(r, (p, _))| match r.polarity {
            0 => Some((Sentiment::Negative, *p)),
            4 => Some((Sentiment::Positive, *p)),
            _ => None,
        })
        .collect();
    if !known.is_empty() {
        let correct = known.iter().filter(|(l, p)| l == p).count();
        log(
            "predict",
            format!(
                "{correct} of {} labeled rows correct ({:.4})",
                known.len(),
                correct as f64 / known.len() as f64
            ),
        );
    }
    let mut w = csv::Writer::from_writer(sink(&a.output)?);
    let io = |e: csv::Error| Failure::data("output", e.to_string());
    w.write_record(["id", "label", "source"]).map_err(io)?;
    for (r, (label, source)) in records.iter().zip(&predictions) {
        w.write_record([r.id.as_str(), label.as_str(), source]).map_err(io)?;
    }
    w.flush().stage("output")
}

fn experiment_config(e: &Experiment, folds: usize) -> Result<ExperimentConfig, Failure> {
    let config = e.config(folds);
    config.validate().stage("config")?;
    Ok(config)
}

fn evaluate<F: Scalar>(a: EvaluateArgs) -> Run {
    let config = experiment_config(&a.experiment, a.folds)?;
    if a.cv && a.folds < 2 {
        return Err(Failure::usage("config", "cross validation needs at least 2 folds"));
    }
    let dataset = dataset(&a.lexicons, &a.input)?;
    let json = if a.cv {
        let cv = eval::cross_validate::<F>(&dataset, &config).stage("cross-validate")?;
        log("cross-validate", format!("{} folds, mean {:.4} ± {:.4}", cv.folds, cv.mean, cv.stddev));
        serde_json::to_string_pretty(&cv).map_err(|e| Failure::data("output", e.to_string()))?
    } else {
        let result = eval::run_experiment::<F>(&dataset, &config).stage("evaluate")?;
        log(
            "evaluate",
            format!(
                "accuracy {:.4} ± {:.4} over {} iteration(s), efws coverage {:.3}",
                result.accuracy,
                result.accuracy_stddev,
                result.iterations.len(),
                result.efws_coverage
            ),
        );
        if a.timings { result } else { result.without_timings() }.to_json()
    };
    let mut out = sink(&a.output)?;
    writeln!(out, "{json}").stage("output")?;
    out.flush().stage("output")
}

fn sweep<F: Scalar>(a: SweepArgs) -> Run {
    let config = experiment_config(&a.experiment, 5)?;
    for &t in &a.thresholds {
        check_threshold("config", t)?;
    }
    let dataset = dataset(&a.lexicons, &a.input)?;
    let points = eval::threshold_sweep::<F>(&dataset, &config, &a.thresholds).stage("sweep")?;
    for p in &points {
        log("sweep", format!("threshold {} accuracy {:.4} pool {}", p.threshold, p.accuracy, p.pool_size));
    }
    let mut out = sink(&a.output)?;
    eval::write_sweep_csv(&mut out, &points).stage("output")?;
    out.flush().stage("output")
}

fn bench<F: Scalar>(a: BenchArgs) -> Run {
    let config = experiment_config(&a.experiment, 5)?;
    let mut figures = a.figures.clone();
    figures.sort_unstable();
    figures.dedup();
    if let Some(bad) = figures.iter().find(|f| !(1..=4).contains(*f)) {
        return Err(Failure::usage("config", format!("there is no figure {bad}; choose from 1,2,3,4")));
    }
    for &t in a.thresholds.iter().chain(&a.timing_thresholds) {
        check_threshold("config", t)?;
    }
    let dataset = dataset(&a.lexicons, &a.input)?;
    std::fs::create_dir_all(&a.out_dir).map_err(|e| Failure::data("output", format!("{}: {e}", a.out_dir.display())))?;
    let plan = TimingPlan {
        baseline_train_size: a.baseline_train_size,
        thresholds: a.timing_thresholds.clone(),
        classifiers: a
            .timing_models
            .iter()
            .map(|&m| a.experiment.training.model.hyperparameters(m.into()))
            .collect(),
        repetitions: a.repetitions,
    };
    for figure in figures {
        let path: PathBuf = a.out_dir.join(format!("figure{figure}.csv"));
        let mut out = BufWriter::new(create(&path)?);
        match figure {
            1 => {
                let curve = dataset.retention(&eval::decile_thresholds()).stage("figure1")?;
                subjectivity::write_retention_csv(&mut out, &curve).stage("output")?;
            }
            2 => {
                let points = eval::threshold_sweep::<F>(&dataset, &config, &a.thresholds).stage("figure2")?;
                eval::write_sweep_csv(&mut out, &points).stage("output")?;
            }
            _ => {
                let (stage, kind) = if figure == 3 {
                    ("figure3", FeatureKind::Unigram)
                } else {
                    ("figure4", FeatureKind::UnigramBigram)
                };
                let c = ExperimentConfig {
                    feature_kind: kind,
                    ..config.clone()
                };
                let rows = eval::timing_comparison::<F>(&dataset, &c, &plan).stage(stage)?;
                for r in &rows {
                    log(
                        stage,
                        format!("{} {} n={} {:.4}s", r.setting, r.classifier, r.n_train, r.seconds),
                    );
                }
                eval::write_timing_csv(&mut out, &rows).stage("output")?;
            }
        }
        out.flush().stage("output")?;
        log("bench", format!("wrote {}", path.display()));
        println!("{}", path.display());
    }
    Ok(())
}
