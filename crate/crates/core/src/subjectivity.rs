//! Subjectivity scoring and threshold filtering of training tweets.
//!
//! Three score sources are supported:
//!
//! * [`ScorerKind::LexiconMean`]: mean subjectivity of the tweet tokens found in
//!   a `word<TAB>subjectivity` lexicon. A tweet with no lexicon word scores 0,
//!   so tweets made only of unknown vocabulary are treated as objective and
//!   are the first to go as the threshold rises.
//! * [`ScorerKind::ClauseRatio`]: total length of the subjective clauses over
//!   the total text length, from externally produced clause annotations.
//! * [`ScorerKind::External`]: precomputed `id<TAB>score` files, for scores
//!   produced by other tools.
//!
//! Filtering keeps tweets with `score >= threshold`.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::assets;
use crate::corpus::LabeledTweet;
use crate::error::{ensure_arg, Error, RecordError, Result};
use crate::preprocess::{Pipeline, TokenSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScorerKind {
    LexiconMean,
    ClauseRatio,
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubjectivityScore {
    pub value: f64,
    pub scorer: ScorerKind,
}

impl SubjectivityScore {
    pub fn new(value: f64, scorer: ScorerKind) -> Result<Self> {
        ensure_arg!(
            (0.0..=1.0).contains(&value),
            "subjectivity {value} outside [0, 1]"
        );
        Ok(SubjectivityScore { value, scorer })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectivityLexiconEntry {
    pub word: String,
    pub subjectivity: f64,
}

#[derive(Debug, Clone)]
pub struct SubjectivityLexicon {
    scores: HashMap<String, f64>,
}

impl SubjectivityLexicon {
    pub fn from_entries(entries: impl IntoIterator<Item = SubjectivityLexiconEntry>) -> Result<Self> {
        let mut scores = HashMap::new();
        for e in entries {
            ensure_arg!(
                (0.0..=1.0).contains(&e.subjectivity),
                "lexicon entry {:?}: subjectivity {} outside [0, 1]",
                e.word,
                e.subjectivity
            );
            ensure_arg!(
                scores.insert(e.word.clone(), e.subjectivity).is_none(),
                "duplicate lexicon word {:?}",
                e.word
            );
        }
        ensure_arg!(!scores.is_empty(), "subjectivity lexicon is empty");
        Ok(SubjectivityLexicon { scores })
    }

    /// Parses `word<TAB>subjectivity` rows and normalizes each word through
    /// `pipeline`, averaging entries that collapse onto the same stem.
    pub fn parse(origin: &str, text: &str, pipeline: &Pipeline) -> Result<Self> {
        let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
        let mut errors = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (line, word, value) in assets::tab_rows(origin, text)? {
            match value.parse::<f64>() {
                Ok(v) if (0.0..=1.0).contains(&v) => {
                    if !seen.insert(word.to_lowercase()) {
                        errors.push(RecordError {
                            line,
                            message: format!("duplicate word {word:?}"),
                        });
                        continue;
                    }
                    if let Some(key) = pipeline.normalize_word(word) {
                        let slot = sums.entry(key).or_insert((0.0, 0));
                        slot.0 += v;
                        slot.1 += 1;
                    }
                }
                _ => errors.push(RecordError {
                    line,
                    message: format!("subjectivity {value:?} is not a number in [0, 1]"),
                }),
            }
        }
        if !errors.is_empty() {
            return Err(Error::malformed(origin, errors));
        }
        Self::from_entries(sums.into_iter().map(|(word, (sum, n))| SubjectivityLexiconEntry {
            word,
            subjectivity: sum / n as f64,
        }))
    }

    pub fn load(path: impl AsRef<Path>, pipeline: &Pipeline) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&path.display().to_string(), &assets::read_text(path)?, pipeline)
    }

    pub fn bundled(pipeline: &Pipeline) -> Self {
        Self::parse("bundled subjectivity lexicon", assets::SUBJECTIVITY, pipeline)
            .expect("bundled lexicon is valid")
    }

    pub fn get(&self, word: &str) -> Option<f64> {
        self.scores.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

pub fn score_lexicon_mean(tokens: &TokenSequence, lexicon: &SubjectivityLexicon) -> SubjectivityScore {
    let (sum, n) = tokens
        .tokens
        .iter()
        .filter_map(|t| lexicon.get(t))
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    let value = if n == 0 { 0.0 } else { (sum / n as f64).clamp(0.0, 1.0) };
    SubjectivityScore {
        value,
        scorer: ScorerKind::LexiconMean,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClauseKind {
    Subjective,
    Objective,
}

/// Half-open `[start, end)` character offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseSpan {
    pub start: usize,
    pub end: usize,
    pub kind: ClauseKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseAnnotation {
    pub spans: Vec<ClauseSpan>,
}

impl ClauseAnnotation {
    /// Checks that spans are well formed, inside `text_len` characters and
    /// pairwise disjoint.
    pub fn validate(&self, text_len: usize) -> Result<()> {
        let mut sorted: Vec<_> = self.spans.iter().collect();
        sorted.sort_by_key(|s| s.start);
        let mut last_end = 0;
        for (i, span) in sorted.iter().enumerate() {
            ensure_arg!(span.start <= span.end, "clause span {}..{} is reversed", span.start, span.end);
            ensure_arg!(
                span.end <= text_len,
                "clause span {}..{} exceeds text length {text_len}",
                span.start,
                span.end
            );
            ensure_arg!(
                i == 0 || span.start >= last_end,
                "clause span {}..{} overlaps a previous span",
                span.start,
                span.end
            );
            last_end = span.end;
        }
        Ok(())
    }
}

pub fn score_clause_ratio(text: &str, annotation: &ClauseAnnotation) -> Result<SubjectivityScore> {
    let len = text.chars().count();
    ensure_arg!(len > 0, "clause-ratio subjectivity is undefined for empty text");
    annotation.validate(len)?;
    let subjective: usize = annotation
        .spans
        .iter()
        .filter(|s| s.kind == ClauseKind::Subjective)
        .map(|s| s.end - s.start)
        .sum();
    Ok(SubjectivityScore {
        value: (subjective as f64 / len as f64).clamp(0.0, 1.0),
        scorer: ScorerKind::ClauseRatio,
    })
}

fn check_threshold(threshold: f64) -> Result<()> {
    ensure_arg!(
        (0.0..=1.0).contains(&threshold),
        "subjectivity threshold {threshold} outside [0, 1]"
    );
    Ok(())
}

fn check_single_scorer<'a>(mut scores: impl Iterator<Item = &'a SubjectivityScore>) -> Result<()> {
    if let Some(first) = scores.next() {
        for s in scores {
            ensure_arg!(
                s.scorer == first.scorer,
                "scores from {:?} and {:?} cannot be mixed in one filter run",
                first.scorer,
                s.scorer
            );
        }
    }
    Ok(())
}

/// Keeps tweets scoring at least `threshold`, in input order.
pub fn filter(tweets: &[(LabeledTweet, SubjectivityScore)], threshold: f64) -> Result<Vec<LabeledTweet>> {
    check_threshold(threshold)?;
    check_single_scorer(tweets.iter().map(|(_, s)| s))?;
    Ok(tweets
        .iter()
        .filter(|(_, s)| s.value >= threshold)
        .map(|(t, _)| t.clone())
        .collect())
}

/// Positions of the scores passing `threshold`; the index form of [`filter`].
pub fn filter_indices(scores: &[SubjectivityScore], threshold: f64) -> Result<Vec<usize>> {
    check_threshold(threshold)?;
    check_single_scorer(scores.iter())?;
    Ok(scores
        .iter()
        .enumerate()
        .filter(|(_, s)| s.value >= threshold)
        .map(|(i, _)| i)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetentionPoint {
    pub threshold: f64,
    pub count: usize,
}

/// Number of tweets retained at each threshold.
pub fn retention_curve(scores: &[SubjectivityScore], thresholds: &[f64]) -> Result<Vec<RetentionPoint>> {
    ensure_arg!(
        thresholds.windows(2).all(|w| w[0] <= w[1]),
        "thresholds must be sorted ascending"
    );
    thresholds
        .iter()
        .map(|&threshold| {
            Ok(RetentionPoint {
                threshold,
                count: filter_indices(scores, threshold)?.len(),
            })
        })
        .collect()
}

pub fn write_retention_csv<W: Write>(mut out: W, curve: &[RetentionPoint]) -> std::io::Result<()> {
    writeln!(out, "threshold,count")?;
    for p in curve {
        writeln!(out, "{},{}", p.threshold, p.count)?;
    }
    Ok(())
}

/// Parses `id<TAB>score` rows. Every bad row is reported with its line number.
pub fn parse_external_scores(origin: &str, text: &str) -> Result<BTreeMap<String, SubjectivityScore>> {
    let mut map = BTreeMap::new();
    let mut errors = Vec::new();
    for (line, id, value) in assets::tab_rows(origin, text)? {
        match value.parse::<f64>() {
            Ok(v) if (0.0..=1.0).contains(&v) => {
                if map
                    .insert(
                        id.to_string(),
                        SubjectivityScore {
                            value: v,
                            scorer: ScorerKind::External,
                        },
                    )
                    .is_some()
                {
                    errors.push(RecordError {
                        line,
                        message: format!("duplicate id {id:?}"),
                    });
                }
            }
            Ok(v) => errors.push(RecordError {
                line,
                message: format!("score {v} outside [0, 1]"),
            }),
            Err(_) => errors.push(RecordError {
                line,
                message: format!("score {value:?} is not a number"),
            }),
        }
    }
    if errors.is_empty() {
        Ok(map)
    } else {
        Err(Error::malformed(origin, errors))
    }
}

pub fn load_external_scores(path: impl AsRef<Path>) -> Result<BTreeMap<String, SubjectivityScore>> {
    let path = path.as_ref();
    parse_external_scores(&path.display().to_string(), &assets::read_text(path)?)
}

pub fn write_external_scores<W: Write>(
    mut out: W,
    scores: &BTreeMap<String, SubjectivityScore>,
) -> std::io::Result<()> {
    for (id, s) in scores {
        // `{}` on f64 prints the shortest representation that parses back exactly.
        writeln!(out, "{id}\t{}", s.value)?;
    }
    Ok(())
}
