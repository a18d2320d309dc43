//! Sentiment140 ingestion, emoticon stripping and deterministic splits.
//!
//! The Sentiment140 training file is a headerless CSV with six quoted fields:
//! `polarity,id,date,query,user,text`, where polarity `0` is negative and `4`
//! is positive. Labels come from the emoticons the tweets originally carried,
//! so the emoticons themselves are removed before any model sees the text.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use rand::seq::index;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::assets;
use crate::error::{ensure_arg, Error, RecordError, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sentiment {
    Negative,
    Positive,
}

impl Sentiment {
    pub const ALL: [Sentiment; 2] = [Sentiment::Negative, Sentiment::Positive];

    /// Class index used by the models: negative is 0, positive is 1.
    pub fn index(self) -> usize {
        match self {
            Sentiment::Negative => 0,
            Sentiment::Positive => 1,
        }
    }

    pub fn from_index(index: usize) -> Self {
        if index == 0 {
            Sentiment::Negative
        } else {
            Sentiment::Positive
        }
    }

    /// `+1` for positive, `-1` for negative.
    pub fn sign(self) -> i8 {
        match self {
            Sentiment::Negative => -1,
            Sentiment::Positive => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sentiment::Negative => Sentiment::Positive,
            Sentiment::Positive => Sentiment::Negative,
        }
    }

    pub fn polarity_code(self) -> i64 {
        match self {
            Sentiment::Negative => 0,
            Sentiment::Positive => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sentiment::Negative => "negative",
            Sentiment::Positive => "positive",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "negative" | "neg" | "0" | "-1" => Some(Sentiment::Negative),
            "positive" | "pos" | "4" | "1" | "+1" => Some(Sentiment::Positive),
            _ => None,
        }
    }
}

impl std::fmt::Display for Sentiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One row of a Sentiment140 file, as read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRecord {
    pub polarity: i64,
    pub id: String,
    pub date: String,
    pub query: String,
    pub user: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledTweet {
    pub id: String,
    pub text: String,
    pub label: Sentiment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSplit {
    pub train: Vec<LabeledTweet>,
    pub test: Vec<LabeledTweet>,
    pub seed: u64,
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub limit: Option<usize>,
    /// Skip malformed rows (collecting them) instead of aborting.
    pub lenient: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Loaded {
    pub records: Vec<RawRecord>,
    pub skipped: Vec<RecordError>,
}

pub fn load_csv(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Loaded> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(std::io::BufReader::new(file), &path.display().to_string(), options)
}

/// Parses Sentiment140 rows from any reader. `origin` names the source in errors.
pub fn read_csv<R: Read>(reader: R, origin: &str, options: &LoadOptions) -> Result<Loaded> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut loaded = Loaded::default();
    let mut record = csv::ByteRecord::new();
    let limit = options.limit.unwrap_or(usize::MAX);
    while loaded.records.len() < limit {
        let line = csv.position().line();
        let outcome = match csv.read_byte_record(&mut record) {
            Ok(false) => break,
            Ok(true) => parse_row(&record).map_err(|message| RecordError {
                line: record.position().map_or(line, |p| p.line()),
                message,
            }),
            Err(e) => Err(RecordError {
                line: e.position().map_or(line, |p| p.line()),
                message: e.to_string(),
            }),
        };
        match outcome {
            Ok(raw) => loaded.records.push(raw),
            Err(bad) if options.lenient => loaded.skipped.push(bad),
            Err(bad) => return Err(Error::malformed(origin, vec![bad])),
        }
        // A hard CSV error leaves the reader positioned after the bad row.
    }
    Ok(loaded)
}

fn parse_row(record: &csv::ByteRecord) -> std::result::Result<RawRecord, String> {
    if record.len() < 6 {
        return Err(format!("expected 6 fields, found {}", record.len()));
    }
    let field = |i: usize| String::from_utf8_lossy(&record[i]).into_owned();
    let polarity_text = field(0);
    let polarity = polarity_text
        .trim()
        .parse::<i64>()
        .map_err(|_| format!("polarity {polarity_text:?} is not an integer"))?;
    // Unquoted commas inside the text split it into extra fields; rejoin them.
    let text = if record.len() == 6 {
        field(5)
    } else {
        (5..record.len()).map(field).collect::<Vec<_>>().join(",")
    };
    if text.trim().is_empty() {
        return Err("empty tweet text".into());
    }
    Ok(RawRecord {
        polarity,
        id: field(1),
        date: field(2),
        query: field(3),
        user: field(4),
        text,
    })
}

/// Writes records back out in Sentiment140 layout with every field quoted.
pub fn write_csv<W: std::io::Write>(writer: W, records: &[RawRecord]) -> Result<()> {
    let mut out = csv::WriterBuilder::new()
        .has_headers(false)
        .quote_style(csv::QuoteStyle::Always)
        .from_writer(writer);
    for r in records {
        out.write_record([
            r.polarity.to_string().as_str(),
            &r.id,
            &r.date,
            &r.query,
            &r.user,
            &r.text,
        ])
        .map_err(|e| Error::Config(format!("writing csv: {e}")))?;
    }
    out.flush()
        .map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

/// Literal emoticon patterns, matched longest first.
#[derive(Debug, Clone)]
pub struct EmoticonSet {
    patterns: Vec<String>,
    matcher: Option<Regex>,
}

impl EmoticonSet {
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_patterns(
            assets::content_lines(text)
                .map(|(_, l)| l.trim().to_string())
                .collect(),
        )
    }

    pub fn from_patterns(mut patterns: Vec<String>) -> Result<Self> {
        patterns.retain(|p| !p.is_empty());
        patterns.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        patterns.dedup();
        if patterns.iter().any(|p| p.chars().any(char::is_whitespace)) {
            return Err(Error::Config("emoticon patterns may not contain whitespace".into()));
        }
        let matcher = if patterns.is_empty() {
            None
        } else {
            let alternation = patterns
                .iter()
                .map(|p| regex::escape(p))
                .collect::<Vec<_>>()
                .join("|");
            Some(Regex::new(&alternation).map_err(|e| Error::Config(e.to_string()))?)
        };
        Ok(EmoticonSet { patterns, matcher })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&assets::read_text(path)?)
    }

    pub fn bundled() -> Self {
        Self::parse(assets::EMOTICONS).expect("bundled emoticon list parses")
    }

    pub fn patterns(&self) -> &[String] {
        &self.patterns
    }

    pub fn contains_any(&self, text: &str) -> bool {
        self.matcher.as_ref().is_some_and(|m| m.is_match(text))
    }

    /// Replaces each emoticon with a space, then collapses whitespace.
    pub fn strip(&self, text: &str) -> String {
        match &self.matcher {
            Some(m) => collapse_whitespace(&m.replace_all(text, " ")),
            None => collapse_whitespace(text),
        }
    }
}

pub(crate) fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn to_labeled(record: &RawRecord, emoticons: &EmoticonSet) -> Result<LabeledTweet> {
    let label = match record.polarity {
        0 => Sentiment::Negative,
        4 => Sentiment::Positive,
        other => {
            return Err(Error::InvalidPolarity {
                id: record.id.clone(),
                polarity: other,
            })
        }
    };
    Ok(LabeledTweet {
        id: record.id.clone(),
        text: emoticons.strip(&record.text),
        label,
    })
}

#[derive(Debug, Clone, Default)]
pub struct Ingested {
    pub tweets: Vec<LabeledTweet>,
    /// Ids of records rejected in lenient mode (bad polarity).
    pub rejected: Vec<String>,
    /// Records whose id had already been seen; the first occurrence is kept.
    pub duplicates: usize,
}

/// Labels a batch of records, keeping the first record for each id.
pub fn ingest(records: &[RawRecord], emoticons: &EmoticonSet, lenient: bool) -> Result<Ingested> {
    let mut out = Ingested::default();
    let mut seen = HashSet::with_capacity(records.len());
    for record in records {
        match to_labeled(record, emoticons) {
            Ok(tweet) => {
                if seen.insert(tweet.id.clone()) {
                    out.tweets.push(tweet);
                } else {
                    out.duplicates += 1;
                }
            }
            Err(Error::InvalidPolarity { id, .. }) if lenient => out.rejected.push(id),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn ensure_unique_ids(tweets: &[LabeledTweet]) -> Result<()> {
    let mut seen = HashSet::with_capacity(tweets.len());
    for t in tweets {
        ensure_arg!(seen.insert(t.id.as_str()), "duplicate tweet id {:?}", t.id);
    }
    Ok(())
}

/// Random test/train split. Both halves keep input order.
pub fn split(tweets: &[LabeledTweet], test_size: usize, seed: u64) -> Result<CorpusSplit> {
    ensure_arg!(
        test_size < tweets.len() || (test_size == 0 && tweets.is_empty()),
        "test size {test_size} must be smaller than the corpus ({} tweets)",
        tweets.len()
    );
    ensure_unique_ids(tweets)?;
    let mut rng = seed::stage_rng(seed, "split", 0);
    let mut in_test = vec![false; tweets.len()];
    for i in index::sample(&mut rng, tweets.len(), test_size) {
        in_test[i] = true;
    }
    Ok(partition(tweets, &in_test, seed))
}

/// Like [`split`], but draws the test set per class so that both halves keep
/// the input label ratio to within one tweet.
pub fn split_stratified(tweets: &[LabeledTweet], test_size: usize, seed: u64) -> Result<CorpusSplit> {
    ensure_arg!(
        test_size < tweets.len() || (test_size == 0 && tweets.is_empty()),
        "test size {test_size} must be smaller than the corpus ({} tweets)",
        tweets.len()
    );
    ensure_unique_ids(tweets)?;
    let by_class: [Vec<usize>; 2] = {
        let mut classes = [Vec::new(), Vec::new()];
        for (i, t) in tweets.iter().enumerate() {
            classes[t.label.index()].push(i);
        }
        classes
    };
    let n = tweets.len() as f64;
    let positive_quota = ((test_size as f64) * by_class[1].len() as f64 / n).round() as usize;
    let positive_quota = positive_quota.min(by_class[1].len());
    let negative_quota = (test_size - positive_quota).min(by_class[0].len());
    let mut in_test = vec![false; tweets.len()];
    for (class, quota) in [(0usize, negative_quota), (1, positive_quota)] {
        let mut rng = seed::stage_rng(seed, "split-stratified", class as u64);
        for j in index::sample(&mut rng, by_class[class].len(), quota) {
            in_test[by_class[class][j]] = true;
        }
    }
    Ok(partition(tweets, &in_test, seed))
}

fn partition(tweets: &[LabeledTweet], in_test: &[bool], seed: u64) -> CorpusSplit {
    let mut train = Vec::with_capacity(tweets.len());
    let mut test = Vec::new();
    for (t, &is_test) in tweets.iter().zip(in_test) {
        if is_test {
            test.push(t.clone());
        } else {
            train.push(t.clone());
        }
    }
    CorpusSplit { train, test, seed }
}

/// Uniform sample of `n` distinct positions out of `len`, in sampled order.
pub fn sample_indices(len: usize, n: usize, seed: u64) -> Result<Vec<usize>> {
    ensure_arg!(n <= len, "cannot sample {n} tweets from {len}");
    let mut rng = seed::stage_rng(seed, "sample", 0);
    Ok(index::sample(&mut rng, len, n).into_vec())
}

/// Uniform sample without replacement.
pub fn sample<T: Clone>(items: &[T], n: usize, seed: u64) -> Result<Vec<T>> {
    Ok(sample_indices(items.len(), n, seed)?
        .into_iter()
        .map(|i| items[i].clone())
        .collect())
}
