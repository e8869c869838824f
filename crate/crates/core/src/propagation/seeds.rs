use std::collections::HashSet;
use std::io::BufRead;

use log::warn;
use sha2::{Digest, Sha256};

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

/// Positive and negative paradigm words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSet {
    positive: Vec<String>,
    negative: Vec<String>,
}

impl SeedSet {
    pub fn new<S: Into<String>>(
        positive: impl IntoIterator<Item = S>,
        negative: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let positive: Vec<String> = positive.into_iter().map(Into::into).collect();
        let negative: Vec<String> = negative.into_iter().map(Into::into).collect();
        if positive.is_empty() || negative.is_empty() {
            return Err(Error::DegenerateSeeds("both seed sides must be non-empty".into()));
        }
        for side in [&positive, &negative] {
            let mut seen = HashSet::new();
            if let Some(dup) = side.iter().find(|w| !seen.insert(w.as_str())) {
                return Err(Error::DegenerateSeeds(format!("seed {dup:?} listed twice")));
            }
        }
        let pos: HashSet<&str> = positive.iter().map(String::as_str).collect();
        if let Some(both) = negative.iter().find(|w| pos.contains(w.as_str())) {
            return Err(Error::DegenerateSeeds(format!("seed {both:?} is both positive and negative")));
        }
        Ok(Self { positive, negative })
    }

    pub fn positive(&self) -> &[String] {
        &self.positive
    }

    pub fn negative(&self) -> &[String] {
        &self.negative
    }

    /// Same words with the two sides exchanged.
    pub fn swapped(&self) -> Self {
        Self { positive: self.negative.clone(), negative: self.positive.clone() }
    }

    pub fn checksum(&self) -> String {
        let mut h = Sha256::new();
        for w in &self.positive {
            h.update(b"+");
            h.update(w.as_bytes());
            h.update(b"\n");
        }
        for w in &self.negative {
            h.update(b"-");
            h.update(w.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }

    /// Maps both sides to vocabulary indices, dropping (with a warning) words
    /// the vocabulary lacks or that `keep` rejects.
    pub fn resolve(&self, vocab: &Vocabulary, keep: impl Fn(usize) -> bool) -> Result<(Vec<usize>, Vec<usize>)> {
        Ok((
            resolve_side(&self.positive, vocab, &keep, "positive")?,
            resolve_side(&self.negative, vocab, &keep, "negative")?,
        ))
    }

    /// One word per line prefixed by `+` or `-` (whitespace after the sign
    /// optional). Blank lines and `#` comments are ignored.
    pub fn read_signed<R: BufRead>(reader: R) -> Result<Self> {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (k, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut chars = line.chars();
            let sign = chars.next().expect("non-empty line");
            let word = chars.as_str().trim();
            if word.is_empty() {
                return Err(Error::parse(k + 1, "missing seed word after sign"));
            }
            match sign {
                '+' => pos.push(word.to_string()),
                '-' | '\u{2212}' => neg.push(word.to_string()),
                _ => return Err(Error::parse(k + 1, "seed line must start with '+' or '-'")),
            }
        }
        Self::new(pos, neg)
    }

    /// Two plain word lists, one word per line.
    pub fn read_pair<R1: BufRead, R2: BufRead>(positive: R1, negative: R2) -> Result<Self> {
        Self::new(read_words(positive)?, read_words(negative)?)
    }

    /// Bundled seed sets: `standard_english`, `finance`, `twitter`.
    pub fn builtin(name: &str) -> Result<Self> {
        let text = match name {
            "standard_english" | "english" => include_str!("../../data/seeds/standard_english.txt"),
            "finance" => include_str!("../../data/seeds/finance.txt"),
            "twitter" => include_str!("../../data/seeds/twitter.txt"),
            other => return Err(Error::invalid(format!("unknown builtin seed set {other:?}"))),
        };
        Self::read_signed(text.as_bytes())
    }
}

fn read_words<R: BufRead>(reader: R) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let w = line.trim();
        if !w.is_empty() && !w.starts_with('#') {
            out.push(w.to_string());
        }
    }
    Ok(out)
}

fn resolve_side(words: &[String], vocab: &Vocabulary, keep: &impl Fn(usize) -> bool, side: &str) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(words.len());
    for w in words {
        match vocab.get(w) {
            Some(i) if keep(i) => out.push(i),
            Some(_) => warn!("{side} seed {w:?} is isolated in the graph; dropped"),
            None => warn!("{side} seed {w:?} is not in the vocabulary; dropped"),
        }
    }
    if out.is_empty() {
        return Err(Error::DegenerateSeeds(format!("no usable {side} seeds")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_sets_match_published_lists() {
        let en = SeedSet::builtin("standard_english").unwrap();
        assert_eq!(en.positive().len(), 10);
        assert_eq!(en.negative().len(), 10);
        assert_eq!(en.positive()[0], "good");
        assert_eq!(en.negative()[9], "unhappy");
        let fin = SeedSet::builtin("finance").unwrap();
        assert_eq!((fin.positive().len(), fin.negative().len()), (9, 11));
        let tw = SeedSet::builtin("twitter").unwrap();
        assert!(tw.negative().contains(&"worst".to_string()));
        assert!(SeedSet::builtin("klingon").is_err());
    }

    #[test]
    fn invariants_enforced() {
        assert!(SeedSet::new(["a"], Vec::<&str>::new()).is_err());
        assert!(SeedSet::new(["a"], ["a"]).is_err());
        assert!(SeedSet::new(["a", "a"], ["b"]).is_err());
    }

    #[test]
    fn signed_and_paired_files() {
        let s = SeedSet::read_signed("+ good\n-bad\n# note\n\n\u{2212} awful\n".as_bytes()).unwrap();
        assert_eq!(s.positive(), &["good"]);
        assert_eq!(s.negative(), &["bad", "awful"]);
        assert!(SeedSet::read_signed("good\n".as_bytes()).is_err());
        let p = SeedSet::read_pair("good\nnice\n".as_bytes(), "bad\n".as_bytes()).unwrap();
        assert_eq!(p.positive().len(), 2);
    }

    #[test]
    fn resolution_drops_unknown_and_errors_when_empty() {
        let vocab = Vocabulary::from_words(["good", "bad", "meh"]).unwrap();
        let s = SeedSet::new(["good", "great"], ["bad"]).unwrap();
        let (p, n) = s.resolve(&vocab, |_| true).unwrap();
        assert_eq!((p, n), (vec![0], vec![1]));
        assert!(s.resolve(&vocab, |i| i != 1).is_err());
    }

    #[test]
    fn checksum_depends_on_side() {
        let s = SeedSet::new(["a"], ["b"]).unwrap();
        assert_ne!(s.checksum(), s.swapped().checksum());
    }
}
