//! Synthetic Sentiment140-style corpus.
//!
//! Tweets are built from the lexicons bundled with `subjsent`, so the
//! preprocessing, subjectivity and EFWS stages see realistic vocabulary. Each
//! tweet has a latent sentiment and a latent subjectivity `u`:
//!
//! * objective tweets (`u = 0`) are made of topic nouns, some of which lean
//!   towards one class, plus the occasional polar event word;
//! * subjective tweets add opinion words whose lexicon subjectivity is close
//!   to `u`, and polar words mostly aligned with the sentiment.
//!
//! The emoticon label agrees with the latent sentiment with probability
//! `1 - max_noise * (1 - u)^1.5` for subjective tweets and
//! `1 - objective_noise` for objective ones, so labels get cleaner as
//! subjectivity rises. That is the assumption subjectivity filtering relies on.
//!
//! Tweet `i` depends only on the seed and `i`, so a smaller corpus is always
//! a prefix of a larger one with the same seed.

use std::collections::HashSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use subjsent::assets;
use subjsent::corpus::{RawRecord, Sentiment};
use subjsent::efws::PolarityLexicon;
use subjsent::preprocess::Pipeline;
use subjsent::seed;
use subjsent::subjectivity::SubjectivityLexicon;

/// Strong words drawn for the |score| >= 4 slots.
const STRONG_POSITIVE: &[&str] = &[
    "awesome", "brilliant", "breathtaking", "ecstatic", "fabulous", "fantastic", "fun", "funny",
    "heavenly", "lifesaver", "masterpiece", "miracle", "outstanding", "overjoyed", "superb",
    "terrific", "thrilled", "triumph", "winner", "wonderful", "wow",
];
const STRONG_NEGATIVE: &[&str] = &[
    "damn", "damnit", "fraud", "fraudulent", "hell", "pissed", "scumbag", "torture", "tortured",
    "wtf",
];

/// Substrings that keep slurs and profanity out of the derived word pools.
const BLOCKED: &[&str] = &[
    "fuck", "shit", "bitch", "nigg", "cunt", "dick", "cock", "ass", "rape", "piss", "bastard", "whore", "slut", "fag",
    "retard", "twat", "prick", "porn", "suck",
];

const FILLERS: &[&str] = &[
    "i", "the", "is", "so", "my", "a", "to", "and", "it", "this", "at", "on", "just", "was", "for", "with", "today",
];
const ACRONYMS: &[&str] = &["lol", "omg", "idk", "btw", "tbh", "imo", "smh", "thx"];
const POSITIVE_EMOTICONS: &[&str] = &[":)", ":-)", ":D", "=)", ";)"];
const NEGATIVE_EMOTICONS: &[&str] = &[":(", ":-(", "=(", ":'("];
const DAYS: &[&str] = &["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"];
const MONTHS: &[&str] = &["Apr", "May", "Jun"];

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_tweets: usize,
    pub seed: u64,
    /// Share of tweets with no opinion words at all.
    pub objective_fraction: f64,
    /// Label flip rate of a subjective tweet at `u = 0`.
    pub max_noise: f64,
    pub objective_noise: f64,
    /// Number of topic nouns in the vocabulary.
    pub topics: usize,
    pub positive_fraction: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_tweets: 10_000,
            seed: 1,
            objective_fraction: 0.3,
            max_noise: 0.5,
            objective_noise: 0.2,
            topics: 4000,
            positive_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthTweet {
    pub record: RawRecord,
    pub sentiment: Sentiment,
    /// Latent subjectivity, 0 for objective tweets.
    pub subjectivity: f64,
    /// Whether the emoticon label disagrees with the latent sentiment.
    pub flipped: bool,
}

struct Pool {
    words: Vec<String>,
    weights: WeightedIndex<f64>,
}

impl Pool {
    /// Zipf-weighted pool; earlier words are more frequent.
    fn zipf(words: Vec<String>, exponent: f64) -> Pool {
        assert!(!words.is_empty(), "empty word pool");
        let weights = WeightedIndex::new((0..words.len()).map(|r| 1.0 / ((r + 2) as f64).powf(exponent))).unwrap();
        Pool { words, weights }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> &str {
        &self.words[self.weights.sample(rng)]
    }
}

/// Polar words by sign (index 0 negative) and magnitude band.
struct Polar {
    strong: [Pool; 2],
    moderate: [Pool; 2],
    mild: [Pool; 2],
    /// Score 3 words; never completes the EFWS rule on their own.
    three: [Pool; 2],
    /// Polar words without a subjectivity entry, for objective tweets.
    events: [Pool; 2],
}

/// Topic nouns with a per-class sampling distribution.
struct Topics {
    words: Vec<String>,
    by_class: [WeightedIndex<f64>; 2],
}

/// Opinion words bucketed by subjectivity, ten buckets of width 0.1.
struct Opinions {
    buckets: Vec<Vec<String>>,
}

impl Opinions {
    fn draw(&self, u: f64, rng: &mut ChaCha8Rng) -> &str {
        let b = ((u * 10.0) as usize).min(9);
        let mut offsets = vec![0i64, -1, 1, -2, 2];
        offsets.retain(|o| (0..10).contains(&(b as i64 + o)));
        for o in offsets {
            let bucket = &self.buckets[(b as i64 + o) as usize];
            if let Some(w) = bucket.choose(rng) {
                return w;
            }
        }
        unreachable!("opinion buckets are never all empty")
    }
}

pub struct Generator {
    config: SynthConfig,
    polar: Polar,
    topics: Topics,
    opinions: Opinions,
}

fn clean(word: &str) -> bool {
    word.len() >= 3
        && word.len() <= 12
        && word.bytes().all(|b| b.is_ascii_lowercase())
        && !BLOCKED.iter().any(|b| word.contains(b))
}

fn data_rows(text: &str) -> impl Iterator<Item = (&str, &str)> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .filter_map(|l| l.split_once('\t'))
}

impl Generator {
    pub fn new(config: SynthConfig) -> Generator {
        assert!((0.0..=1.0).contains(&config.objective_fraction));
        assert!((0.0..=0.5).contains(&config.max_noise) && (0.0..=0.5).contains(&config.objective_noise));
        assert!(config.topics > 0);
        // Word pools are chosen by how the normalized word scores in the
        // bundled lexicons, since stemming merges entries.
        let pipeline = Pipeline::bundled();
        let polarity_lexicon = PolarityLexicon::bundled(&pipeline);
        let subjectivity_lexicon = SubjectivityLexicon::bundled(&pipeline);
        let stem = |w: &str| pipeline.normalize_word(w);
        let polar_score = |w: &str| stem(w).and_then(|s| polarity_lexicon.score(&s));
        let subjective = |w: &str| stem(w).and_then(|s| subjectivity_lexicon.get(&s));
        let polarity: Vec<(String, i8)> = data_rows(assets::POLARITY)
            .filter_map(|(w, _)| Some((w.to_string(), polar_score(w)?)))
            .collect();
        let subjectivity: Vec<(String, f64)> = data_rows(assets::SUBJECTIVITY)
            .filter_map(|(w, _)| Some((w.to_string(), subjective(w)?)))
            .collect();
        let stopwords = pipeline.stopwords();

        let mut vocab_rng = seed::stage_rng(config.seed, "synth-vocabulary", 0);
        let band = |lo: i8, hi: i8, sign: i8, rng: &mut ChaCha8Rng| {
            let mut words: Vec<String> = polarity
                .iter()
                .filter(|(w, s)| clean(w) && *s * sign >= lo && *s * sign <= hi)
                .map(|(w, _)| w.clone())
                .collect();
            shuffle(&mut words, rng);
            Pool::zipf(words, 1.0)
        };
        let strong = |list: &[&str], rng: &mut ChaCha8Rng| {
            let mut words: Vec<String> = list.iter().map(|w| w.to_string()).collect();
            shuffle(&mut words, rng);
            Pool::zipf(words, 0.8)
        };
        let events = |sign: i8, rng: &mut ChaCha8Rng| {
            let mut words: Vec<String> = polarity
                .iter()
                .filter(|(w, s)| clean(w) && *s * sign >= 2 && *s * sign <= 3 && subjective(w).is_none())
                .map(|(w, _)| w.clone())
                .collect();
            shuffle(&mut words, rng);
            Pool::zipf(words, 1.0)
        };
        let polar = Polar {
            strong: [strong(STRONG_NEGATIVE, &mut vocab_rng), strong(STRONG_POSITIVE, &mut vocab_rng)],
            moderate: [band(2, 2, -1, &mut vocab_rng), band(2, 2, 1, &mut vocab_rng)],
            three: [band(3, 3, -1, &mut vocab_rng), band(3, 3, 1, &mut vocab_rng)],
            mild: [band(1, 1, -1, &mut vocab_rng), band(1, 1, 1, &mut vocab_rng)],
            events: [events(-1, &mut vocab_rng), events(1, &mut vocab_rng)],
        };

        let mut opinions = Opinions {
            buckets: vec![Vec::new(); 10],
        };
        for (w, s) in &subjectivity {
            if clean(w) && polar_score(w).is_none() && !stopwords.contains(w.as_str()) {
                opinions.buckets[((s * 10.0) as usize).min(9)].push(w.clone());
            }
        }

        let mut seen = HashSet::new();
        let mut nouns: Vec<String> = data_rows(assets::POS_LEXICON)
            .filter(|(w, t)| *t == "NOUN" && clean(w) && w.len() >= 4)
            .filter(|(w, _)| match stem(w) {
                Some(s) => {
                    polarity_lexicon.score(&s).is_none()
                        && subjectivity_lexicon.get(&s).is_none()
                        && !stopwords.contains(&s)
                        && !pipeline.acronyms().contains_key(*w)
                        && seen.insert(s)
                }
                None => false,
            })
            .map(|(w, _)| w.to_string())
            .collect();
        shuffle(&mut nouns, &mut vocab_rng);
        nouns.truncate(config.topics);
        // A topic leans positive or negative with probability 0.15 each; a
        // leaning word is sampled 2.5 times as often in tweets of its class
        // and 0.4 times as often in the other.
        let leans: Vec<i8> = (0..nouns.len())
            .map(|_| {
                let r: f64 = vocab_rng.random();
                if r < 0.2 {
                    -1
                } else if r < 0.4 {
                    1
                } else {
                    0
                }
            })
            .collect();
        let by_class = [-1i8, 1].map(|sign| {
            WeightedIndex::new(leans.iter().enumerate().map(|(r, &lean)| {
                let base = 1.0 / ((r + 2) as f64).powf(0.9);
                base * match lean * sign {
                    1 => 3.0,
                    -1 => 0.33,
                    _ => 1.0,
                }
            }))
            .unwrap()
        });
        Generator {
            config,
            polar,
            topics: Topics { words: nouns, by_class },
            opinions,
        }
    }

    pub fn config(&self) -> &SynthConfig {
        &self.config
    }

    pub fn tweet(&self, i: usize) -> SynthTweet {
        let cfg = &self.config;
        let mut rng = seed::stage_rng(cfg.seed, "synth-tweet", i as u64);
        let sentiment = if rng.random_bool(cfg.positive_fraction) {
            Sentiment::Positive
        } else {
            Sentiment::Negative
        };
        let class = sentiment.index();
        let objective = rng.random_bool(cfg.objective_fraction);
        let subjectivity = if objective { 0.0 } else { rng.random_range(0.02..1.0) };

        let mut words: Vec<String> = Vec::new();
        let topic = |rng: &mut ChaCha8Rng| self.topics.words[self.topics.by_class[class].sample(rng)].clone();
        if objective {
            for _ in 0..rng.random_range(3..=7) {
                words.push(topic(&mut rng));
            }
            if rng.random_bool(0.35) {
                let side = if rng.random_bool(0.85) { class } else { 1 - class };
                words.push(self.polar.events[side].draw(&mut rng).to_string());
            }
        } else {
            for _ in 0..rng.random_range(1..=2) {
                words.push(self.opinions.draw(subjectivity, &mut rng).to_string());
            }
            // Strong and moderate words always follow the sentiment; weaker
            // ones are mixed in either direction ("bad traffic but an
            // awesome show").
            for _ in 0..rng.random_range(2..=3) {
                let r: f64 = rng.random();
                let (pool, reliable) = if r < 0.2 {
                    (&self.polar.strong, true)
                } else if r < 0.55 {
                    (&self.polar.moderate, true)
                } else if r < 0.85 {
                    (&self.polar.three, false)
                } else {
                    (&self.polar.mild, false)
                };
                let side = if reliable || rng.random_bool(0.65) { class } else { 1 - class };
                if !reliable && rng.random_bool(0.1) {
                    // "not bad" in a positive tweet.
                    words.push("not".into());
                    words.push(pool[1 - side].draw(&mut rng).to_string());
                } else {
                    words.push(pool[side].draw(&mut rng).to_string());
                }
            }
            for _ in 0..rng.random_range(0..=3) {
                words.push(topic(&mut rng));
            }
        }
        shuffle(&mut words, &mut rng);
        for _ in 0..rng.random_range(1..=4) {
            let at = rng.random_range(0..=words.len());
            words.insert(at, FILLERS.choose(&mut rng).unwrap().to_string());
        }
        if rng.random_bool(0.1) {
            let at = rng.random_range(0..words.len());
            words[at] = elongate(&words[at], &mut rng);
        }
        if rng.random_bool(0.08) {
            let at = rng.random_range(0..=words.len());
            words.insert(at, ACRONYMS.choose(&mut rng).unwrap().to_string());
        }
        if rng.random_bool(0.06) {
            let at = rng.random_range(0..words.len());
            words[at] = words[at].to_uppercase();
        }

        let mut text = String::new();
        if rng.random_bool(0.15) {
            text.push_str(&format!("@{} ", handle(&mut rng)));
        }
        text.push_str(&words.join(" "));
        if rng.random_bool(0.08) {
            let tag: String = (0..2).map(|_| capitalize(&topic(&mut rng))).collect();
            text.push_str(&format!(" #{tag}"));
        }
        if rng.random_bool(0.1) {
            text.push_str(&format!(" http://bit.ly/{}", handle(&mut rng)));
        }
        match rng.random_range(0..4) {
            0 => text.push('!'),
            1 => text.push_str("..."),
            _ => {}
        }

        let flip_rate = if objective {
            cfg.objective_noise
        } else {
            cfg.max_noise * (1.0 - subjectivity).powf(1.5)
        };
        let flipped = rng.random_bool(flip_rate);
        let label = if flipped { sentiment.flipped() } else { sentiment };
        let emoticons = match label {
            Sentiment::Positive => POSITIVE_EMOTICONS,
            Sentiment::Negative => NEGATIVE_EMOTICONS,
        };
        let emoticon = emoticons.choose(&mut rng).unwrap();
        if rng.random_bool(0.8) {
            text = format!("{text} {emoticon}");
        } else {
            text = format!("{emoticon} {text}");
        }

        let record = RawRecord {
            polarity: label.polarity_code(),
            id: (1_467_810_369 + i as u64).to_string(),
            date: format!(
                "{} {} {:02} {:02}:{:02}:{:02} PDT 2009",
                DAYS.choose(&mut rng).unwrap(),
                MONTHS.choose(&mut rng).unwrap(),
                rng.random_range(1..=28),
                rng.random_range(0..24),
                rng.random_range(0..60),
                rng.random_range(0..60)
            ),
            query: "NO_QUERY".into(),
            user: handle(&mut rng),
            text,
        };
        SynthTweet {
            record,
            sentiment,
            subjectivity,
            flipped,
        }
    }

    pub fn generate(&self) -> Vec<SynthTweet> {
        (0..self.config.n_tweets).map(|i| self.tweet(i)).collect()
    }
}

pub fn generate(config: SynthConfig) -> Vec<SynthTweet> {
    Generator::new(config).generate()
}

pub fn generate_records(config: SynthConfig) -> Vec<RawRecord> {
    generate(config).into_iter().map(|t| t.record).collect()
}

fn shuffle<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    use rand::seq::SliceRandom;
    items.shuffle(rng);
}

fn elongate(word: &str, rng: &mut ChaCha8Rng) -> String {
    match word.char_indices().rev().find(|(_, c)| "aeiouy".contains(*c)) {
        Some((at, c)) => {
            let n = rng.random_range(3..=5);
            format!("{}{}{}", &word[..at], c.to_string().repeat(n), &word[at + c.len_utf8()..])
        }
        None => word.to_string(),
    }
}

fn capitalize(word: &str) -> String {
    let mut c = word.chars();
    match c.next() {
        Some(first) => first.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn handle(rng: &mut ChaCha8Rng) -> String {
    const ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789_";
    let len = rng.random_range(5..=12);
    (0..len)
        .map(|_| ALPHABET[rng.random_range(0..ALPHABET.len())] as char)
        .collect()
}
