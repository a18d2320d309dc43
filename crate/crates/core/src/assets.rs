//! Bundled lexicon assets and the line-oriented text format they share.
//!
//! Every asset is UTF-8, one entry per line; blank lines and lines starting
//! with `#` are ignored. Tabular assets separate the key from the value with a
//! single tab. See `assets/NOTICE.md` for provenance.

use std::path::Path;

use crate::error::{Error, RecordError, Result};

pub const EMOTICONS: &str = include_str!("../assets/emoticons.txt");
pub const STOPWORDS: &str = include_str!("../assets/stopwords.txt");
pub const ACRONYMS: &str = include_str!("../assets/acronyms.tsv");
pub const POLARITY: &str = include_str!("../assets/afinn.tsv");
pub const SYNONYMS: &str = include_str!("../assets/synonyms.tsv");
pub const SUBJECTIVITY: &str = include_str!("../assets/subjectivity.tsv");
pub const POS_LEXICON: &str = include_str!("../assets/pos_lexicon.tsv");

/// Reads a text asset, replacing invalid UTF-8 sequences.
pub fn read_text(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

/// Content lines with 1-based line numbers.
pub fn content_lines(text: &str) -> impl Iterator<Item = (u64, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim_end_matches('\r');
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some((i as u64 + 1, line))
        }
    })
}

/// Splits every content line at its first tab. Rows without a tab are
/// collected and reported together.
pub fn tab_rows<'a>(origin: &str, text: &'a str) -> Result<Vec<(u64, &'a str, &'a str)>> {
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (line, content) in content_lines(text) {
        match content.split_once('\t') {
            Some((key, value)) if !key.trim().is_empty() => {
                rows.push((line, key.trim(), value.trim()))
            }
            _ => errors.push(RecordError {
                line,
                message: "expected `key<TAB>value`".into(),
            }),
        }
    }
    if errors.is_empty() {
        Ok(rows)
    } else {
        Err(Error::malformed(origin, errors))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skips_comments_and_blank_lines() {
        let text = "# header\n\nfoo\n  # indented comment\nbar\r\n";
        let lines: Vec<_> = content_lines(text).collect();
        assert_eq!(lines, vec![(3, "foo"), (5, "bar")]);
    }

    #[test]
    fn tab_rows_reports_line_numbers() {
        let err = tab_rows("test.tsv", "a\t1\nbroken\nc\t3\n").unwrap_err();
        match err {
            Error::Malformed { first, count, .. } => {
                assert_eq!(count, 1);
                assert_eq!(first.line, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bundled_assets_have_expected_sizes() {
        assert_eq!(content_lines(STOPWORDS).count(), 400);
        assert!(content_lines(ACRONYMS).count() > 5000);
        let polarity = content_lines(POLARITY).count();
        assert!((2400..=2500).contains(&polarity), "{polarity}");
        for asset in [ACRONYMS, POLARITY, SYNONYMS, SUBJECTIVITY, POS_LEXICON] {
            tab_rows("bundled", asset).unwrap();
        }
    }
}
