//! Tweet normalization.
//!
//! Raw tweet text goes through a fixed sequence of steps (see [`Step::ORDER`])
//! and comes out as a [`TokenSequence`] of lowercase, stemmed tokens. Each step
//! is available as a standalone function and can be switched off in
//! [`PipelineConfig`] without changing the position of the others.
//!
//! Hashtag splitting runs before lowercasing because it needs the capitals.
//! Stopwords are dropped before stemming; tokens whose stem is itself a
//! stopword are dropped as well.

pub mod porter;

use std::borrow::Cow;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::PathBuf;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::assets;
use crate::corpus::{collapse_whitespace, EmoticonSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TokenSequence {
    pub source_id: String,
    pub tokens: Vec<String>,
}

impl TokenSequence {
    pub fn new(source_id: impl Into<String>, tokens: Vec<String>) -> Self {
        TokenSequence {
            source_id: source_id.into(),
            tokens,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Space-joined tokens.
    pub fn detokenize(&self) -> String {
        self.tokens.join(" ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Step {
    StripEmoticons,
    StripEntities,
    SplitHashtags,
    NormalizeStops,
    StripPunctuation,
    CollapseWhitespace,
    CollapseRepeats,
    Lowercase,
    ExpandAcronyms,
    FoldNegations,
    RemoveStopwords,
    Stem,
}

impl Step {
    /// Execution order. Tokenization on whitespace sits between `Lowercase`
    /// and `ExpandAcronyms` and is always performed.
    pub const ORDER: [Step; 12] = [
        Step::StripEmoticons,
        Step::StripEntities,
        Step::SplitHashtags,
        Step::NormalizeStops,
        Step::StripPunctuation,
        Step::CollapseWhitespace,
        Step::CollapseRepeats,
        Step::Lowercase,
        Step::ExpandAcronyms,
        Step::FoldNegations,
        Step::RemoveStopwords,
        Step::Stem,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Step::StripEmoticons => "strip-emoticons",
            Step::StripEntities => "strip-entities",
            Step::SplitHashtags => "split-hashtags",
            Step::NormalizeStops => "normalize-stops",
            Step::StripPunctuation => "strip-punctuation",
            Step::CollapseWhitespace => "collapse-whitespace",
            Step::CollapseRepeats => "collapse-repeats",
            Step::Lowercase => "lowercase",
            Step::ExpandAcronyms => "expand-acronyms",
            Step::FoldNegations => "fold-negations",
            Step::RemoveStopwords => "remove-stopwords",
            Step::Stem => "stem",
        }
    }

    pub fn from_name(name: &str) -> Option<Step> {
        Step::ORDER.into_iter().find(|s| s.name() == name.trim())
    }
}

/// Negation forms that fold to `not`, with and without apostrophes.
pub const DEFAULT_NEGATIONS: &[&str] = &[
    "cannot", "cant", "can't", "wont", "won't", "dont", "don't", "didnt", "didn't", "doesnt",
    "doesn't", "isnt", "isn't", "arent", "aren't", "wasnt", "wasn't", "werent", "weren't",
    "shouldnt", "shouldn't", "wouldnt", "wouldn't", "couldnt", "couldn't", "havent", "haven't",
    "hasnt", "hasn't", "hadnt", "hadn't", "aint", "ain't", "mustnt", "mustn't", "neednt",
    "needn't",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub steps: BTreeSet<Step>,
    pub stopword_path: Option<PathBuf>,
    pub acronym_path: Option<PathBuf>,
    pub emoticon_path: Option<PathBuf>,
    /// Extra negation forms on top of [`DEFAULT_NEGATIONS`].
    pub extra_negations: Vec<String>,
    pub stemming: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            steps: Step::ORDER.into_iter().collect(),
            stopword_path: None,
            acronym_path: None,
            emoticon_path: None,
            extra_negations: Vec::new(),
            stemming: true,
        }
    }
}

impl PipelineConfig {
    pub fn without(mut self, step: Step) -> Self {
        self.steps.remove(&step);
        if step == Step::Stem {
            self.stemming = false;
        }
        self
    }

    pub fn is_enabled(&self, step: Step) -> bool {
        self.steps.contains(&step) && (step != Step::Stem || self.stemming)
    }
}

/// Loaded dictionaries plus the enabled step set.
#[derive(Debug, Clone)]
pub struct Pipeline {
    config: PipelineConfig,
    emoticons: EmoticonSet,
    stopwords: HashSet<String>,
    acronyms: HashMap<String, Vec<String>>,
    negations: HashSet<String>,
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Result<Self> {
        let emoticons = match &config.emoticon_path {
            Some(p) => EmoticonSet::load(p)?,
            None => EmoticonSet::bundled(),
        };
        let stopword_text = load_or(&config.stopword_path, assets::STOPWORDS)?;
        let stopwords = parse_stopwords(&stopword_text);
        let acronym_text = load_or(&config.acronym_path, assets::ACRONYMS)?;
        let origin = config
            .acronym_path
            .as_ref()
            .map_or("bundled acronyms".to_string(), |p| p.display().to_string());
        let acronyms = parse_acronyms(&origin, &acronym_text)?;
        let negations = DEFAULT_NEGATIONS
            .iter()
            .map(|s| s.to_string())
            .chain(config.extra_negations.iter().map(|s| s.to_lowercase()))
            .collect();
        Ok(Pipeline {
            config,
            emoticons,
            stopwords,
            acronyms,
            negations,
        })
    }

    pub fn bundled() -> Self {
        Self::new(PipelineConfig::default()).expect("bundled assets are valid")
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn stopwords(&self) -> &HashSet<String> {
        &self.stopwords
    }

    pub fn acronyms(&self) -> &HashMap<String, Vec<String>> {
        &self.acronyms
    }

    /// Largest number of tokens a single acronym expands to.
    pub fn max_expansion(&self) -> usize {
        self.acronyms.values().map(Vec::len).max().unwrap_or(1).max(1)
    }

    fn on(&self, step: Step) -> bool {
        self.config.is_enabled(step)
    }

    pub fn run(&self, source_id: &str, text: &str) -> TokenSequence {
        let mut text: Cow<'_, str> = Cow::Borrowed(text);
        if self.on(Step::StripEmoticons) {
            text = Cow::Owned(self.emoticons.strip(&text));
        }
        if self.on(Step::StripEntities) {
            text = Cow::Owned(strip_entities(&text));
        }
        if self.on(Step::SplitHashtags) {
            text = Cow::Owned(split_hashtags(&text));
        }
        if self.on(Step::NormalizeStops) {
            text = Cow::Owned(normalize_stops(&text));
        }
        if self.on(Step::StripPunctuation) {
            text = Cow::Owned(strip_punctuation(&text));
        }
        if self.on(Step::CollapseWhitespace) {
            text = Cow::Owned(collapse_whitespace(&text));
        }
        if self.on(Step::CollapseRepeats) {
            text = Cow::Owned(collapse_repeats(&text));
        }
        if self.on(Step::Lowercase) {
            text = Cow::Owned(text.to_lowercase());
        }
        let mut tokens = tokenize(&text);
        if self.on(Step::ExpandAcronyms) {
            tokens = expand_acronyms(tokens, &self.acronyms);
        }
        if self.on(Step::FoldNegations) {
            tokens = fold_negations(tokens, &self.negations);
        }
        if self.on(Step::RemoveStopwords) {
            tokens = remove_stopwords(tokens, &self.stopwords);
        }
        if self.on(Step::Stem) {
            tokens = tokens
                .into_iter()
                .map(|t| {
                    let s = porter::stem(&t);
                    if self.on(Step::CollapseRepeats) {
                        collapse_repeats(&s)
                    } else {
                        s
                    }
                })
                .collect();
            if self.on(Step::RemoveStopwords) {
                tokens = remove_stopwords(tokens, &self.stopwords);
            }
        }
        TokenSequence::new(source_id, tokens)
    }

    /// Normalizes a single dictionary word the same way tweet tokens are, so
    /// lexicon lookups line up with pipeline output. Returns `None` when the
    /// word does not survive as exactly one token.
    pub fn normalize_word(&self, word: &str) -> Option<String> {
        let mut w = strip_punctuation(word);
        if self.on(Step::CollapseRepeats) {
            w = collapse_repeats(&w);
        }
        if self.on(Step::Lowercase) {
            w = w.to_lowercase();
        }
        let mut parts = w.split_whitespace();
        let token = parts.next()?;
        if parts.next().is_some() {
            return None;
        }
        let token = if self.on(Step::Stem) {
            porter::stem(token)
        } else {
            token.to_string()
        };
        Some(token)
    }
}

fn load_or(path: &Option<PathBuf>, bundled: &str) -> Result<String> {
    match path {
        Some(p) => assets::read_text(p).map_err(|e| Error::Config(format!("dictionary {}: {e}", p.display()))),
        None => Ok(bundled.to_string()),
    }
}

pub fn parse_stopwords(text: &str) -> HashSet<String> {
    assets::content_lines(text)
        .map(|(_, l)| l.trim().to_lowercase())
        .collect()
}

/// Parses `acronym<TAB>expansion words`. Expansions are normalized with the
/// punctuation and repeat rules so they obey the token invariants.
pub fn parse_acronyms(origin: &str, text: &str) -> Result<HashMap<String, Vec<String>>> {
    let mut map = HashMap::new();
    for (_, key, value) in assets::tab_rows(origin, text)? {
        let expansion = tokenize(&collapse_repeats(&strip_punctuation(value)).to_lowercase());
        if !expansion.is_empty() {
            map.entry(key.to_lowercase()).or_insert(expansion);
        }
    }
    Ok(map)
}

static URL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)(?:https?://|www\.)\S+\s*").unwrap());
static HANDLE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@\w+\s*").unwrap());
static HASHTAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"#(\w+)").unwrap());
static STOP_RUNS: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\.{2,}|-{2,}|…").unwrap());

/// Replaces each URL and `@handle`, together with the whitespace after it,
/// by one space, and trims trailing whitespace. Any `@word` counts as a handle.
pub fn strip_entities(text: &str) -> String {
    let without_urls = URL.replace_all(text, " ");
    HANDLE.replace_all(&without_urls, " ").trim_end().to_string()
}

/// `#CamelCase` becomes `Camel Case`; `#word` becomes `word`.
pub fn split_hashtags(text: &str) -> String {
    HASHTAG
        .replace_all(text, |caps: &regex::Captures<'_>| split_camel(&caps[1]))
        .into_owned()
}

fn split_camel(word: &str) -> String {
    let chars: Vec<char> = word.chars().collect();
    let mut out = String::with_capacity(word.len() + 4);
    for (i, &c) in chars.iter().enumerate() {
        if i > 0 && c.is_uppercase() {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            if prev.is_lowercase() || prev.is_numeric() || (prev.is_uppercase() && next_lower) {
                out.push(' ');
            }
        }
        out.push(c);
    }
    out
}

/// Runs of two or more `.` or `-` become a space, then any single `.` does.
/// A single `-` is kept.
pub fn normalize_stops(text: &str) -> String {
    STOP_RUNS.replace_all(text, " ").replace('.', " ")
}

/// Drops apostrophes and replaces every other symbol with a space. Hyphens
/// between two alphanumerics survive.
pub fn strip_punctuation(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() || c.is_whitespace() {
            out.push(c);
        } else if matches!(c, '\'' | '\u{2019}' | '\u{2018}' | '`') {
        } else if c == '-'
            && i > 0
            && chars[i - 1].is_alphanumeric()
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())
        {
            out.push(c);
        } else {
            out.push(' ');
        }
    }
    out
}

/// Any letter repeated three or more times in a row (ignoring case) is
/// reduced to its first two occurrences.
pub fn collapse_repeats(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut prev: Option<char> = None;
    let mut run = 0usize;
    for c in text.chars() {
        let key = c.to_lowercase().next().unwrap_or(c);
        if c.is_alphabetic() && prev == Some(key) {
            run += 1;
        } else {
            run = 1;
        }
        prev = if c.is_alphabetic() { Some(key) } else { None };
        if run <= 2 {
            out.push(c);
        }
    }
    out
}

pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

pub fn expand_acronyms(tokens: Vec<String>, dictionary: &HashMap<String, Vec<String>>) -> Vec<String> {
    let mut out = Vec::with_capacity(tokens.len());
    for t in tokens {
        match dictionary.get(&t) {
            Some(expansion) => out.extend(expansion.iter().cloned()),
            None => out.push(t),
        }
    }
    out
}

pub fn fold_negations(tokens: Vec<String>, negations: &HashSet<String>) -> Vec<String> {
    tokens
        .into_iter()
        .map(|t| if negations.contains(&t) { "not".to_string() } else { t })
        .collect()
}

pub fn default_negations() -> HashSet<String> {
    DEFAULT_NEGATIONS.iter().map(|s| s.to_string()).collect()
}

pub fn remove_stopwords(tokens: Vec<String>, stopwords: &HashSet<String>) -> Vec<String> {
    tokens.into_iter().filter(|t| !stopwords.contains(t)).collect()
}
