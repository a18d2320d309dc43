//! Vocabularies and sparse count vectors for the unigram, unigram+bigram and
//! unigram+POS feature sets.
//!
//! Feature strings: a unigram is the token itself, a bigram joins two adjacent
//! tokens with `_`, and the POS set adds `token|TAG` pairs plus one `|TAG`
//! count feature per tag. Punctuation stripping removes `_` and `|` from
//! tokens, so these never collide with natural tokens.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::assets;
use crate::error::{ensure_arg, Error, RecordError, Result};
use crate::preprocess::{Pipeline, TokenSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureKind {
    Unigram,
    UnigramBigram,
    UnigramPos,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 3] = [FeatureKind::Unigram, FeatureKind::UnigramBigram, FeatureKind::UnigramPos];

    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::Unigram => "unigram",
            FeatureKind::UnigramBigram => "unigram-bigram",
            FeatureKind::UnigramPos => "unigram-pos",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn code(self) -> u8 {
        match self {
            FeatureKind::Unigram => 0,
            FeatureKind::UnigramBigram => 1,
            FeatureKind::UnigramPos => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.code() == code)
    }
}

impl std::fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PosTag {
    Noun,
    Verb,
    Adj,
    Adv,
    Pron,
    Det,
    Prep,
    Conj,
    Num,
    Intj,
    Other,
}

impl PosTag {
    pub const ALL: [PosTag; 11] = [
        PosTag::Noun,
        PosTag::Verb,
        PosTag::Adj,
        PosTag::Adv,
        PosTag::Pron,
        PosTag::Det,
        PosTag::Prep,
        PosTag::Conj,
        PosTag::Num,
        PosTag::Intj,
        PosTag::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PosTag::Noun => "NOUN",
            PosTag::Verb => "VERB",
            PosTag::Adj => "ADJ",
            PosTag::Adv => "ADV",
            PosTag::Pron => "PRON",
            PosTag::Det => "DET",
            PosTag::Prep => "PREP",
            PosTag::Conj => "CONJ",
            PosTag::Num => "NUM",
            PosTag::Intj => "INTJ",
            PosTag::Other => "OTHER",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

/// Suffix rules for words missing from the tag lexicon; the first match
/// wins. Both surface and Porter-stemmed endings are listed because tagging
/// runs on pipeline output.
const SUFFIX_RULES: &[(&str, PosTag)] = &[
    ("iveness", PosTag::Noun),
    ("fulness", PosTag::Noun),
    ("ation", PosTag::Noun),
    ("ness", PosTag::Noun),
    ("ment", PosTag::Noun),
    ("tion", PosTag::Noun),
    ("sion", PosTag::Noun),
    ("ship", PosTag::Noun),
    ("hood", PosTag::Noun),
    ("ism", PosTag::Noun),
    ("ist", PosTag::Noun),
    ("ity", PosTag::Noun),
    ("iti", PosTag::Noun),
    ("less", PosTag::Adj),
    ("able", PosTag::Adj),
    ("ible", PosTag::Adj),
    ("ous", PosTag::Adj),
    ("ful", PosTag::Adj),
    ("ish", PosTag::Adj),
    ("ive", PosTag::Adj),
    ("abl", PosTag::Adj),
    ("ibl", PosTag::Adj),
    ("est", PosTag::Adj),
    ("ic", PosTag::Adj),
    ("al", PosTag::Adj),
    ("ing", PosTag::Verb),
    ("ize", PosTag::Verb),
    ("ise", PosTag::Verb),
    ("ate", PosTag::Verb),
    ("ed", PosTag::Verb),
    ("ly", PosTag::Adv),
    ("li", PosTag::Adv),
];

/// Lexicon lookup plus suffix rules, defaulting to NOUN.
#[derive(Debug, Clone)]
pub struct PosTagger {
    lexicon: HashMap<String, PosTag>,
}

impl PosTagger {
    /// Parses `word<TAB>TAG` rows. Each word is indexed both as written and in
    /// pipeline-normalized form; for a normalized form shared by several
    /// words the first in file order wins.
    pub fn parse(origin: &str, text: &str, pipeline: &Pipeline) -> Result<Self> {
        let mut lexicon = HashMap::new();
        let mut normalized = Vec::new();
        let mut errors = Vec::new();
        for (line, word, tag) in assets::tab_rows(origin, text)? {
            match PosTag::parse(tag) {
                Some(t) => {
                    lexicon.entry(word.to_lowercase()).or_insert(t);
                    if let Some(w) = pipeline.normalize_word(word) {
                        normalized.push((w, t));
                    }
                }
                None => errors.push(RecordError {
                    line,
                    message: format!("unknown tag {tag:?}"),
                }),
            }
        }
        if !errors.is_empty() {
            return Err(Error::malformed(origin, errors));
        }
        for (w, t) in normalized {
            lexicon.entry(w).or_insert(t);
        }
        Ok(PosTagger { lexicon })
    }

    pub fn load(path: impl AsRef<Path>, pipeline: &Pipeline) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&path.display().to_string(), &assets::read_text(path)?, pipeline)
    }

    pub fn bundled(pipeline: &Pipeline) -> Self {
        Self::parse("bundled tag lexicon", assets::POS_LEXICON, pipeline).expect("bundled tag lexicon is valid")
    }

    pub fn tag_word(&self, token: &str) -> PosTag {
        if let Some(&t) = self.lexicon.get(token) {
            return t;
        }
        if !token.is_empty() && token.chars().all(|c| c.is_ascii_digit()) {
            return PosTag::Num;
        }
        SUFFIX_RULES
            .iter()
            .find(|(suffix, _)| token.len() > suffix.len() + 1 && token.ends_with(suffix))
            .map_or(PosTag::Noun, |&(_, t)| t)
    }

    pub fn tag(&self, tokens: &TokenSequence) -> Vec<PosTag> {
        tokens.tokens.iter().map(|t| self.tag_word(t)).collect()
    }
}

/// Parses `id<TAB>space-separated tags` rows of externally produced tags.
pub fn parse_external_tags(origin: &str, text: &str) -> Result<HashMap<String, Vec<PosTag>>> {
    let mut out = HashMap::new();
    let mut errors = Vec::new();
    for (line, id, tags) in assets::tab_rows(origin, text)? {
        let parsed: Option<Vec<_>> = tags.split_whitespace().map(PosTag::parse).collect();
        match parsed {
            Some(t) => {
                if out.insert(id.to_string(), t).is_some() {
                    errors.push(RecordError {
                        line,
                        message: format!("duplicate id {id:?}"),
                    });
                }
            }
            None => errors.push(RecordError {
                line,
                message: format!("unknown tag in {tags:?}"),
            }),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(Error::malformed(origin, errors))
    }
}

pub fn load_external_tags(path: impl AsRef<Path>) -> Result<HashMap<String, Vec<PosTag>>> {
    let path = path.as_ref();
    parse_external_tags(&path.display().to_string(), &assets::read_text(path)?)
}

/// Feature strings of one tweet, in occurrence order, with repeats.
pub fn extract(tokens: &[String], kind: FeatureKind, tags: Option<&[PosTag]>) -> Result<Vec<String>> {
    let mut out: Vec<String> = tokens.to_vec();
    match kind {
        FeatureKind::Unigram => {}
        FeatureKind::UnigramBigram => {
            out.extend(tokens.windows(2).map(|w| format!("{}_{}", w[0], w[1])));
        }
        FeatureKind::UnigramPos => {
            let tags = tags.ok_or_else(|| Error::InvalidArgument("unigram-pos features need POS tags".into()))?;
            ensure_arg!(
                tags.len() == tokens.len(),
                "{} POS tags for {} tokens",
                tags.len(),
                tokens.len()
            );
            for (t, tag) in tokens.iter().zip(tags) {
                out.push(format!("{t}|{}", tag.as_str()));
                out.push(format!("|{}", tag.as_str()));
            }
        }
    }
    Ok(out)
}

/// Turns token sequences into feature strings, tagging with the bundled or a
/// supplied tagger when the kind needs POS tags.
#[derive(Debug, Clone)]
pub struct Featurizer {
    kind: FeatureKind,
    tagger: Option<PosTagger>,
}

impl Featurizer {
    pub fn new(kind: FeatureKind, tagger: Option<PosTagger>) -> Result<Self> {
        ensure_arg!(
            kind != FeatureKind::UnigramPos || tagger.is_some(),
            "unigram-pos features need a POS tagger"
        );
        Ok(Featurizer { kind, tagger })
    }

    /// Featurizer for `kind` using the bundled tag lexicon when needed.
    pub fn bundled(kind: FeatureKind, pipeline: &Pipeline) -> Self {
        let tagger = (kind == FeatureKind::UnigramPos).then(|| PosTagger::bundled(pipeline));
        Featurizer { kind, tagger }
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn features(&self, tokens: &TokenSequence) -> Vec<String> {
        let tags = self.tagger.as_ref().map(|t| t.tag(tokens));
        extract(&tokens.tokens, self.kind, tags.as_deref()).expect("tagger output matches token count")
    }

    pub fn features_with_tags(&self, tokens: &TokenSequence, tags: &[PosTag]) -> Result<Vec<String>> {
        extract(&tokens.tokens, self.kind, Some(tags))
    }
}

/// Frozen feature-to-id map. Ids follow lexicographic feature order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    kind: FeatureKind,
    min_count: u32,
    features: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn from_features(kind: FeatureKind, min_count: u32, mut features: Vec<String>) -> Result<Self> {
        features.sort();
        let before = features.len();
        features.dedup();
        ensure_arg!(features.len() == before, "vocabulary features must be unique");
        ensure_arg!(
            features.len() <= u32::MAX as usize,
            "vocabulary of {} features is too large",
            features.len()
        );
        let ids = features
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i as u32))
            .collect();
        Ok(Vocabulary {
            kind,
            min_count,
            features,
            ids,
        })
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn min_count(&self) -> u32 {
        self.min_count
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn id(&self, feature: &str) -> Option<u32> {
        self.ids.get(feature).copied()
    }

    pub fn feature(&self, id: u32) -> Option<&str> {
        self.features.get(id as usize).map(String::as_str)
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    /// `feature<TAB>id` lines after a `#` header carrying kind and min_count.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# kind={} min_count={}", self.kind.name(), self.min_count)?;
        for (i, f) in self.features.iter().enumerate() {
            writeln!(out, "{f}\t{i}")?;
        }
        Ok(())
    }

    pub fn dump_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_dump(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("features are UTF-8")
    }

    pub fn parse_dump(origin: &str, text: &str) -> Result<Self> {
        let header = text
            .lines()
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .ok_or_else(|| Error::malformed(origin, vec![RecordError { line: 1, message: "missing header".into() }]))?;
        let mut kind = None;
        let mut min_count = None;
        for part in header.split_whitespace() {
            match part.split_once('=') {
                Some(("kind", v)) => kind = FeatureKind::from_name(v),
                Some(("min_count", v)) => min_count = v.parse().ok(),
                _ => {}
            }
        }
        let (Some(kind), Some(min_count)) = (kind, min_count) else {
            return Err(Error::malformed(
                origin,
                vec![RecordError {
                    line: 1,
                    message: format!("bad header {header:?}"),
                }],
            ));
        };
        let mut features = Vec::new();
        let mut errors = Vec::new();
        for (line, feature, id) in assets::tab_rows(origin, text)? {
            if id.parse::<usize>().ok() != Some(features.len()) {
                errors.push(RecordError {
                    line,
                    message: format!("expected id {}, found {id:?}", features.len()),
                });
            }
            features.push(feature.to_string());
        }
        if !errors.is_empty() {
            return Err(Error::malformed(origin, errors));
        }
        let vocab = Self::from_features(kind, min_count, features.clone())?;
        ensure_arg!(vocab.features == features, "vocabulary dump is not in lexicographic order");
        Ok(vocab)
    }

    /// SHA-256 of the dump, used to tie saved models to their vocabulary.
    pub fn hash(&self) -> [u8; 32] {
        Sha256::digest(self.dump_string().as_bytes()).into()
    }
}

/// Builds a vocabulary of every feature occurring at least `min_count` times.
pub fn build_vocab(corpus: &[TokenSequence], featurizer: &Featurizer, min_count: u32) -> Result<Vocabulary> {
    let rows: Vec<Vec<String>> = corpus.iter().map(|t| featurizer.features(t)).collect();
    build_vocab_from_features(&rows, featurizer.kind(), min_count)
}

/// [`build_vocab`] over already extracted feature lists.
pub fn build_vocab_from_features<S: AsRef<[String]>>(rows: &[S], kind: FeatureKind, min_count: u32) -> Result<Vocabulary> {
    ensure_arg!(!rows.is_empty(), "cannot build a vocabulary from an empty corpus");
    let mut counts: HashMap<&str, u32> = HashMap::new();
    for row in rows {
        for f in row.as_ref() {
            *counts.entry(f.as_str()).or_default() += 1;
        }
    }
    let features = counts
        .into_iter()
        .filter(|&(_, c)| c >= min_count.max(1))
        .map(|(f, _)| f.to_string())
        .collect();
    Vocabulary::from_features(kind, min_count, features)
}

/// `(id, count)` pairs with strictly increasing ids and counts of at least 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SparseFeatureVector {
    pairs: Vec<(u32, u32)>,
}

impl SparseFeatureVector {
    pub fn new(mut pairs: Vec<(u32, u32)>) -> Result<Self> {
        pairs.sort_unstable();
        ensure_arg!(pairs.windows(2).all(|w| w[0].0 < w[1].0), "duplicate feature id");
        ensure_arg!(pairs.iter().all(|&(_, c)| c >= 1), "feature counts must be at least 1");
        Ok(SparseFeatureVector { pairs })
    }

    /// Counts occurrences of each id.
    pub fn from_ids(mut ids: Vec<u32>) -> Self {
        ids.sort_unstable();
        let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(ids.len());
        for id in ids {
            match pairs.last_mut() {
                Some((last, c)) if *last == id => *c += 1,
                _ => pairs.push((id, 1)),
            }
        }
        SparseFeatureVector { pairs }
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.pairs.len()
    }

    pub fn total(&self) -> u64 {
        self.pairs.iter().map(|&(_, c)| c as u64).sum()
    }

    pub fn max_id(&self) -> Option<u32> {
        self.pairs.last().map(|&(i, _)| i)
    }

    pub fn norm_sq(&self) -> f64 {
        self.pairs.iter().map(|&(_, c)| (c as f64) * (c as f64)).sum()
    }

    pub fn dot(&self, other: &SparseFeatureVector) -> f64 {
        let (mut i, mut j, mut s) = (0, 0, 0u64);
        let (a, b) = (&self.pairs, &other.pairs);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    s += a[i].1 as u64 * b[j].1 as u64;
                    i += 1;
                    j += 1;
                }
            }
        }
        s as f64
    }

    /// ‖self − other‖², computed exactly in integers.
    pub fn squared_distance(&self, other: &SparseFeatureVector) -> f64 {
        let (mut i, mut j, mut s) = (0, 0, 0u64);
        let (a, b) = (&self.pairs, &other.pairs);
        let sq = |c: u32| c as u64 * c as u64;
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                s += sq(a[i].1);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                s += sq(b[j].1);
                j += 1;
            } else {
                let d = (a[i].1 as i64 - b[j].1 as i64).unsigned_abs();
                s += d * d;
                i += 1;
                j += 1;
            }
        }
        s as f64
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        for &(i, c) in &self.pairs {
            v[i as usize] = c as f64;
        }
        v
    }
}

/// Counts of in-vocabulary features; unknown features are dropped.
pub fn vectorize(tokens: &TokenSequence, vocab: &Vocabulary, featurizer: &Featurizer) -> SparseFeatureVector {
    vectorize_features(&featurizer.features(tokens), vocab)
}

pub fn vectorize_features(features: &[String], vocab: &Vocabulary) -> SparseFeatureVector {
    SparseFeatureVector::from_ids(features.iter().filter_map(|f| vocab.id(f)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(words: &[&str]) -> TokenSequence {
        TokenSequence::new("t", words.iter().map(|w| w.to_string()).collect())
    }

    fn unigram() -> Featurizer {
        Featurizer::new(FeatureKind::Unigram, None).unwrap()
    }

    #[test]
    fn lexicographic_ids() {
        let v = build_vocab(&[seq(&["good", "day"])], &unigram(), 1).unwrap();
        assert_eq!(v.id("day"), Some(0));
        assert_eq!(v.id("good"), Some(1));
        assert_eq!(v.len(), 2);
        let bi = Featurizer::new(FeatureKind::UnigramBigram, None).unwrap();
        let v = build_vocab(&[seq(&["good", "day"])], &bi, 1).unwrap();
        assert_eq!(v.features(), &["day", "good", "good_day"]);
        assert!(build_vocab(&[], &unigram(), 1).is_err());
    }

    #[test]
    fn counting_and_oov() {
        let v = build_vocab(&[seq(&["good", "day"])], &unigram(), 1).unwrap();
        let x = vectorize(&seq(&["good", "good", "day"]), &v, &unigram());
        assert_eq!(x.pairs(), &[(0, 1), (1, 2)]);
        assert!(vectorize(&seq(&["moon"]), &v, &unigram()).is_empty());
    }

    #[test]
    fn pos_features() {
        let p = Pipeline::bundled();
        let tagger = PosTagger::bundled(&p);
        assert_eq!(tagger.tag_word("happy"), PosTag::Adj);
        assert_eq!(tagger.tag_word("happi"), PosTag::Adj);
        assert_eq!(tagger.tag_word("zorbly"), PosTag::Adv);
        assert_eq!(tagger.tag_word("qwzx"), PosTag::Noun);
        assert_eq!(tagger.tag_word("2009"), PosTag::Num);
        let f = Featurizer::new(FeatureKind::UnigramPos, Some(tagger)).unwrap();
        let feats = f.features(&seq(&["happi", "qwzx"]));
        assert_eq!(feats, vec!["happi", "qwzx", "happi|ADJ", "|ADJ", "qwzx|NOUN", "|NOUN"]);
        assert!(Featurizer::new(FeatureKind::UnigramPos, None).is_err());
        assert!(f.features_with_tags(&seq(&["a", "b"]), &[PosTag::Noun]).is_err());
    }

    #[test]
    fn external_tags() {
        assert!(parse_external_tags("x", "1\tNOUN\n1\tVERB\n").is_err());
        let m = parse_external_tags("x", "1\tNOUN VERB\n").unwrap();
        assert_eq!(m["1"], vec![PosTag::Noun, PosTag::Verb]);
        assert!(parse_external_tags("x", "1\tNOUN FOO\n").is_err());
    }

    #[test]
    fn dump_round_trip() {
        let bi = Featurizer::new(FeatureKind::UnigramBigram, None).unwrap();
        let v = build_vocab(&[seq(&["a", "b", "c"]), seq(&["b", "a"])], &bi, 1).unwrap();
        let back = Vocabulary::parse_dump("d", &v.dump_string()).unwrap();
        assert_eq!(back, v);
        assert_eq!(back.hash(), v.hash());
        assert!(Vocabulary::parse_dump("d", "a\t0\n").is_err());
        assert!(Vocabulary::parse_dump("d", "# kind=unigram min_count=1\nb\t0\na\t1\n").is_err());
    }

    #[test]
    fn distances_match_dense() {
        let a = SparseFeatureVector::new(vec![(0, 2), (3, 1), (5, 4)]).unwrap();
        let b = SparseFeatureVector::new(vec![(3, 3), (4, 1)]).unwrap();
        assert_eq!(a.dot(&b), 3.0);
        assert_eq!(a.squared_distance(&b), 4.0 + 4.0 + 1.0 + 16.0);
        assert!(SparseFeatureVector::new(vec![(1, 1), (1, 2)]).is_err());
        assert!(SparseFeatureVector::new(vec![(1, 0)]).is_err());
    }

    fn arb_vec(dim: u32) -> impl Strategy<Value = SparseFeatureVector> {
        proptest::collection::btree_map(0..dim, 1u32..5, 0..12)
            .prop_map(|m| SparseFeatureVector::new(m.into_iter().collect()).unwrap())
    }

    fn arb_corpus() -> impl Strategy<Value = Vec<TokenSequence>> {
        let word = proptest::sample::select(vec!["a", "b", "c", "d", "e", "f"]);
        proptest::collection::vec(proptest::collection::vec(word, 0..8), 1..10)
            .prop_map(|docs| docs.iter().map(|d| seq(d)).collect())
    }

    proptest! {
        #[test]
        fn sparse_distance_matches_dense(a in arb_vec(30), b in arb_vec(30)) {
            let (da, db) = (a.to_dense(30), b.to_dense(30));
            let dense: f64 = da.iter().zip(&db).map(|(x, y)| (x - y) * (x - y)).sum();
            prop_assert_eq!(a.squared_distance(&b), dense);
            let dot: f64 = da.iter().zip(&db).map(|(x, y)| x * y).sum();
            prop_assert_eq!(a.dot(&b), dot);
        }

        #[test]
        fn vocab_shrinks_with_min_count(corpus in arb_corpus()) {
            let f = Featurizer::new(FeatureKind::UnigramBigram, None).unwrap();
            let sizes: Vec<usize> = (1..5)
                .map(|m| build_vocab(&corpus, &f, m).unwrap().len())
                .collect();
            prop_assert!(sizes.windows(2).all(|w| w[0] >= w[1]));
            prop_assert_eq!(build_vocab(&corpus, &f, 1).unwrap(), build_vocab(&corpus, &f, 1).unwrap());
        }

        #[test]
        fn unigram_is_bag_of_words(corpus in arb_corpus(), doc in proptest::collection::vec(proptest::sample::select(vec!["a", "b", "c", "z"]), 0..10), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            let f = unigram();
            let v = build_vocab(&corpus, &f, 1).unwrap();
            let x = vectorize(&seq(&doc), &v, &f);
            let mut shuffled = doc.clone();
            shuffled.shuffle(&mut crate::seed::rng(seed));
            prop_assert_eq!(&vectorize(&seq(&shuffled), &v, &f), &x);
            let in_vocab = doc.iter().filter(|w| v.id(w).is_some()).count() as u64;
            prop_assert_eq!(x.total(), in_vocab);
            prop_assert!(x.max_id().is_none_or(|m| (m as usize) < v.len()));
        }

        #[test]
        fn bigrams_come_from_adjacent_tokens(doc in proptest::collection::vec(proptest::sample::select(vec!["a", "b", "c"]), 0..10)) {
            let feats = extract(&doc.iter().map(|s| s.to_string()).collect::<Vec<_>>(), FeatureKind::UnigramBigram, None).unwrap();
            for f in feats.iter().filter(|f| f.contains('_')) {
                let (l, r) = f.split_once('_').unwrap();
                prop_assert!(doc.windows(2).any(|w| w[0] == l && w[1] == r));
            }
        }
    }
}
