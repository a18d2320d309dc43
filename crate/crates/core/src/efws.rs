//! Effective Word Score heuristic.
//!
//! Every tweet token is looked up in an integer polarity lexicon (scores in
//! [-5, 5]), falling back to a synonym table whose words inherit the score of
//! their source word. For magnitude `x`, `EFWS(x) = N(+x) - N(-x)`. A tweet is
//! labeled Positive when `(EFWS(5) >= 1 or EFWS(4) >= 1) and EFWS(2) >= 1`,
//! Negative under the mirrored rule, and left to the learned model otherwise.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::assets;
use crate::corpus::Sentiment;
use crate::error::{ensure_arg, Error, RecordError, Result};
use crate::preprocess::{Pipeline, TokenSequence};

#[derive(Debug, Clone, Default)]
pub struct PolarityLexicon {
    entries: HashMap<String, i8>,
    /// synonym -> source word, only for words that are not entries themselves
    synonyms: HashMap<String, String>,
}

impl PolarityLexicon {
    pub fn new(entries: HashMap<String, i8>, synonyms: HashMap<String, Vec<String>>) -> Result<Self> {
        for (word, &score) in &entries {
            ensure_arg!(
                (-5..=5).contains(&score),
                "polarity of {word:?} is {score}, outside [-5, 5]"
            );
        }
        let mut syn_map = HashMap::new();
        let mut sources: Vec<_> = synonyms.into_iter().collect();
        sources.sort();
        for (source, syns) in sources {
            if !entries.contains_key(&source) {
                continue;
            }
            for s in syns {
                if !entries.contains_key(&s) {
                    syn_map.entry(s).or_insert_with(|| source.clone());
                }
            }
        }
        Ok(PolarityLexicon {
            entries,
            synonyms: syn_map,
        })
    }

    /// Parses the lexicon and synonym tables and normalizes every word with
    /// `pipeline` so that lookups match pipeline tokens.
    ///
    /// When several words normalize to one stem, the word that is its own stem
    /// keeps its score; otherwise the first in file order wins. Synonyms
    /// follow the same first-wins rule, and a direct entry always beats a
    /// synonym.
    pub fn parse(
        lexicon_origin: &str,
        lexicon_text: &str,
        synonym_origin: &str,
        synonym_text: &str,
        pipeline: &Pipeline,
    ) -> Result<Self> {
        let mut errors = Vec::new();
        let mut raw_seen = std::collections::HashSet::new();
        // stem -> (score, was the raw word identical to the stem)
        let mut entries: HashMap<String, (i8, bool)> = HashMap::new();
        let mut raw_to_stem: HashMap<String, String> = HashMap::new();
        for (line, word, value) in assets::tab_rows(lexicon_origin, lexicon_text)? {
            let score = match value.parse::<i8>() {
                Ok(s) if (-5..=5).contains(&s) => s,
                _ => {
                    errors.push(RecordError {
                        line,
                        message: format!("polarity {value:?} is not an integer in [-5, 5]"),
                    });
                    continue;
                }
            };
            if !raw_seen.insert(word.to_lowercase()) {
                errors.push(RecordError {
                    line,
                    message: format!("duplicate word {word:?}"),
                });
                continue;
            }
            let Some(stem) = pipeline.normalize_word(word) else { continue };
            raw_to_stem.insert(word.to_lowercase(), stem.clone());
            let exact = stem == word.to_lowercase();
            match entries.get_mut(&stem) {
                None => {
                    entries.insert(stem, (score, exact));
                }
                Some(slot) if exact && !slot.1 => *slot = (score, true),
                Some(_) => {}
            }
        }
        if !errors.is_empty() {
            return Err(Error::malformed(lexicon_origin, errors));
        }
        let entries: HashMap<String, i8> = entries.into_iter().map(|(k, (s, _))| (k, s)).collect();

        let mut synonyms: HashMap<String, String> = HashMap::new();
        for (_, word, list) in assets::tab_rows(synonym_origin, synonym_text)? {
            let Some(source) = raw_to_stem
                .get(&word.to_lowercase())
                .cloned()
                .or_else(|| pipeline.normalize_word(word).filter(|s| entries.contains_key(s)))
            else {
                continue;
            };
            for syn in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                if let Some(stem) = pipeline.normalize_word(syn) {
                    if !entries.contains_key(&stem) && !pipeline.stopwords().contains(&stem) {
                        synonyms.entry(stem).or_insert_with(|| source.clone());
                    }
                }
            }
        }
        Ok(PolarityLexicon { entries, synonyms })
    }

    pub fn load(lexicon: impl AsRef<Path>, synonyms: Option<&Path>, pipeline: &Pipeline) -> Result<Self> {
        let lexicon = lexicon.as_ref();
        let (syn_origin, syn_text) = match synonyms {
            Some(p) => (p.display().to_string(), assets::read_text(p)?),
            None => (String::new(), String::new()),
        };
        Self::parse(
            &lexicon.display().to_string(),
            &assets::read_text(lexicon)?,
            &syn_origin,
            &syn_text,
            pipeline,
        )
    }

    pub fn bundled(pipeline: &Pipeline) -> Self {
        Self::parse(
            "bundled polarity lexicon",
            assets::POLARITY,
            "bundled synonyms",
            assets::SYNONYMS,
            pipeline,
        )
        .expect("bundled lexicon is valid")
    }

    /// Score of a token: its own entry first, then the score of the word it
    /// is a synonym of.
    pub fn score(&self, token: &str) -> Option<i8> {
        self.entries
            .get(token)
            .or_else(|| self.synonyms.get(token).and_then(|src| self.entries.get(src)))
            .copied()
    }

    pub fn entry(&self, word: &str) -> Option<i8> {
        self.entries.get(word).copied()
    }

    pub fn synonym_source(&self, word: &str) -> Option<&str> {
        self.synonyms.get(word).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn synonym_count(&self) -> usize {
        self.synonyms.len()
    }

    /// The same lexicon with every score negated.
    pub fn negated(&self) -> Self {
        PolarityLexicon {
            entries: self.entries.iter().map(|(w, &s)| (w.clone(), -s)).collect(),
            synonyms: self.synonyms.clone(),
        }
    }
}

/// Counts of matched words per polarity score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EfwsProfile {
    /// `negative[x - 1]` is N(-x), `positive[x - 1]` is N(+x).
    negative: [u32; 5],
    positive: [u32; 5],
}

impl EfwsProfile {
    /// Builds a profile from `(score, count)` pairs. Score 0 is ignored.
    pub fn from_counts(counts: impl IntoIterator<Item = (i8, u32)>) -> Result<Self> {
        let mut p = EfwsProfile::default();
        for (score, n) in counts {
            ensure_arg!((-5..=5).contains(&score), "polarity score {score} outside [-5, 5]");
            for _ in 0..n {
                p.add(score);
            }
        }
        Ok(p)
    }

    fn add(&mut self, score: i8) {
        match score {
            1..=5 => self.positive[score as usize - 1] += 1,
            -5..=-1 => self.negative[(-score) as usize - 1] += 1,
            _ => {}
        }
    }

    /// N(x) for `x` in -5..=5; zero for 0 and out-of-range scores.
    pub fn count(&self, score: i8) -> u32 {
        match score {
            1..=5 => self.positive[score as usize - 1],
            -5..=-1 => self.negative[(-score) as usize - 1],
            _ => 0,
        }
    }

    /// EFWS(x) = N(+x) - N(-x) for magnitude `x` in 1..=5.
    pub fn efws(&self, magnitude: u8) -> i64 {
        assert!((1..=5).contains(&magnitude), "EFWS magnitude {magnitude} outside 1..=5");
        let i = magnitude as usize - 1;
        self.positive[i] as i64 - self.negative[i] as i64
    }

    pub fn efws_all(&self) -> [i64; 5] {
        std::array::from_fn(|i| self.efws(i as u8 + 1))
    }

    pub fn matched(&self) -> u32 {
        self.positive.iter().chain(&self.negative).sum()
    }

    pub fn mirrored(&self) -> Self {
        EfwsProfile {
            negative: self.positive,
            positive: self.negative,
        }
    }
}

pub fn score_words(tokens: &TokenSequence, lexicon: &PolarityLexicon) -> EfwsProfile {
    let mut p = EfwsProfile::default();
    for score in tokens.tokens.iter().filter_map(|t| lexicon.score(t)) {
        p.add(score);
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeuristicVerdict {
    Positive,
    Negative,
    Abstain,
}

impl HeuristicVerdict {
    pub fn label(self) -> Option<Sentiment> {
        match self {
            HeuristicVerdict::Positive => Some(Sentiment::Positive),
            HeuristicVerdict::Negative => Some(Sentiment::Negative),
            HeuristicVerdict::Abstain => None,
        }
    }
}

pub fn classify(profile: &EfwsProfile) -> HeuristicVerdict {
    let (e5, e4, e2) = (profile.efws(5), profile.efws(4), profile.efws(2));
    if (e5 >= 1 || e4 >= 1) && e2 >= 1 {
        HeuristicVerdict::Positive
    } else if (e5 <= -1 || e4 <= -1) && e2 <= -1 {
        HeuristicVerdict::Negative
    } else {
        HeuristicVerdict::Abstain
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BatchLabels {
    /// Heuristically labeled tweets, in input order.
    pub labeled: Vec<(String, Sentiment)>,
    pub abstained: Vec<String>,
}

pub fn label_batch(tweets: &[TokenSequence], lexicon: &PolarityLexicon) -> BatchLabels {
    let mut out = BatchLabels::default();
    for t in tweets {
        match classify(&score_words(t, lexicon)).label() {
            Some(label) => out.labeled.push((t.source_id.clone(), label)),
            None => out.abstained.push(t.source_id.clone()),
        }
    }
    out
}

/// Writes `id,label,source` rows for the labeled tweets.
pub fn write_labels_csv<W: Write>(out: W, labels: &BatchLabels) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidArgument(format!("writing labels: {e}"));
    w.write_record(["id", "label", "source"]).map_err(io)?;
    for (id, label) in &labels.labeled {
        w.write_record([id.as_str(), label.as_str(), "heuristic"]).map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("writing labels: {e}")))?;
    Ok(())
}
