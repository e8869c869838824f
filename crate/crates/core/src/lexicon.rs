//! Induced lexicons: per-word score, optional bootstrap std and label, plus
//! provenance metadata. Stored as TSV with `#`-prefixed metadata lines.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::format::parse_field;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Positive,
    Neutral,
    Negative,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Positive, Label::Neutral, Label::Negative];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Positive => "positive",
            Label::Neutral => "neutral",
            Label::Negative => "negative",
        }
    }

    pub fn is_polar(self) -> bool {
        self != Label::Neutral
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" | "pos" | "+" => Ok(Label::Positive),
            "neutral" | "neu" | "0" => Ok(Label::Neutral),
            "negative" | "neg" | "-" => Ok(Label::Negative),
            other => Err(Error::invalid(format!("unknown label {other:?}"))),
        }
    }
}

/// Word scores with optional bootstrap deviations and ternary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon<T> {
    words: Vec<String>,
    scores: Vec<T>,
    std: Option<Vec<T>>,
    labels: Option<Vec<Label>>,
    unreachable: Vec<String>,
    metadata: BTreeMap<String, String>,
    index: HashMap<String, usize>,
}

impl<T: Scalar> Lexicon<T> {
    pub fn new(words: Vec<String>, scores: Vec<T>) -> Result<Self> {
        if words.len() != scores.len() {
            return Err(Error::invalid("lexicon words and scores differ in length"));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if w.is_empty() || w.contains(['\t', '\n']) {
                return Err(Error::invalid(format!("invalid lexicon word {w:?}")));
            }
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate lexicon word {w:?}")));
            }
        }
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::invalid("lexicon scores must be finite"));
        }
        Ok(Self { words, scores, std: None, labels: None, unreachable: Vec::new(), metadata: BTreeMap::new(), index })
    }

    pub fn with_std(mut self, std: Vec<T>) -> Result<Self> {
        if std.len() != self.len() || std.iter().any(|s| !(s.is_finite() && *s >= T::zero())) {
            return Err(Error::invalid("std column must be finite, non-negative and cover every word"));
        }
        self.std = Some(std);
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::invalid("label column must cover every word"));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_unreachable(mut self, words: Vec<String>) -> Self {
        self.unreachable = words;
        self
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.metadata.insert(key.into(), value.to_string());
        self
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.insert(key.into(), value.to_string());
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn scores(&self) -> &[T] {
        &self.scores
    }

    pub fn std(&self) -> Option<&[T]> {
        self.std.as_deref()
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn unreachable(&self) -> &[String] {
        &self.unreachable
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.get(key).map(String::as_str)
    }

    pub fn position(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn score(&self, word: &str) -> Option<T> {
        self.position(word).map(|i| self.scores[i])
    }

    pub fn label(&self, word: &str) -> Option<Label> {
        let i = self.position(word)?;
        self.labels.as_ref().map(|l| l[i])
    }

    /// Copy with every score negated; std and metadata are kept, labels dropped.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.scores.iter_mut().for_each(|s| *s = -*s);
        out.labels = None;
        out
    }

    /// Writes the lexicon TSV. Metadata lines come first in key order, then
    /// the `word score std label` header and one row per word.
    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}={v}")?;
        }
        if !self.unreachable.is_empty() {
            writeln!(out, "# unreachable={}", self.unreachable.join(","))?;
        }
        writeln!(out, "word\tscore\tstd\tlabel")?;
        for i in 0..self.len() {
            write!(out, "{}\t{}\t", self.words[i], self.scores[i])?;
            if let Some(std) = &self.std {
                write!(out, "{}", std[i])?;
            }
            write!(out, "\t")?;
            if let Some(labels) = &self.labels {
                write!(out, "{}", labels[i])?;
            }
            writeln!(out)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut metadata = BTreeMap::new();
        let mut unreachable = Vec::new();
        let mut words = Vec::new();
        let mut scores = Vec::new();
        let mut std: Vec<Option<T>> = Vec::new();
        let mut labels: Vec<Option<Label>> = Vec::new();
        let mut saw_header = false;
        for (k, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = k + 1;
            if let Some(meta) = line.strip_prefix('#') {
                let (key, value) = meta
                    .trim_start()
                    .split_once('=')
                    .ok_or_else(|| Error::parse(lineno, "metadata line must be \"# key=value\""))?;
                if key == "unreachable" {
                    unreachable = value.split(',').filter(|s| !s.is_empty()).map(str::to_string).collect();
                } else {
                    metadata.insert(key.to_string(), value.to_string());
                }
                continue;
            }
            if !saw_header {
                if !line.starts_with("word\tscore") {
                    return Err(Error::parse(lineno, "expected header \"word\\tscore\\tstd\\tlabel\""));
                }
                saw_header = true;
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() < 2 || cols.len() > 4 {
                return Err(Error::parse(lineno, "expected word, score, std, label columns"));
            }
            words.push(cols[0].to_string());
            scores.push(parse_field::<T>(cols[1], lineno, "score")?);
            std.push(match cols.get(2) {
                Some(s) if !s.is_empty() => Some(parse_field::<T>(s, lineno, "std")?),
                _ => None,
            });
            labels.push(match cols.get(3) {
                Some(s) if !s.is_empty() => Some(s.parse::<Label>().map_err(|e| Error::parse(lineno, e.to_string()))?),
                _ => None,
            });
        }
        if !saw_header {
            return Err(Error::parse(1, "missing lexicon header"));
        }
        let mut lex = Lexicon::new(words, scores)?.with_unreachable(unreachable);
        lex.metadata = metadata;
        if std.iter().all(Option::is_some) && !std.is_empty() {
            lex = lex.with_std(std.into_iter().flatten().collect())?;
        } else if std.iter().any(Option::is_some) {
            return Err(Error::invalid("std column is only partially filled"));
        }
        if labels.iter().all(Option::is_some) && !labels.is_empty() {
            lex = lex.with_labels(labels.into_iter().flatten().collect())?;
        } else if labels.iter().any(Option::is_some) {
            return Err(Error::invalid("label column is only partially filled"));
        }
        Ok(lex)
    }
}

/// Shifts and scales to zero mean and unit population variance. A constant
/// input maps to all zeros.
pub fn standardize<T: Scalar>(values: &[T]) -> Vec<T> {
    if values.is_empty() {
        return Vec::new();
    }
    let n = T::from_usize_lossy(values.len());
    let mean = values.iter().copied().sum::<T>() / n;
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
    let sd = var.sqrt();
    if sd > T::zero() {
        values.iter().map(|&v| (v - mean) / sd).collect()
    } else {
        vec![T::zero(); values.len()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standardize_moments() {
        let z = standardize(&[1.0, 2.0, 3.0, 10.0]);
        let mean: f64 = z.iter().sum::<f64>() / 4.0;
        let var: f64 = z.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
        assert!(mean.abs() < 1e-12 && (var - 1.0).abs() < 1e-12);
        assert_eq!(standardize(&[5.0, 5.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn tsv_round_trip() {
        let lex = Lexicon::new(vec!["good".into(), "bad".into()], vec![1.0, -1.0])
            .unwrap()
            .with_std(vec![0.5, 0.25])
            .unwrap()
            .with_labels(vec![Label::Positive, Label::Negative])
            .unwrap()
            .with_unreachable(vec!["zzz".into()])
            .with_meta("method", "sentprop")
            .with_meta("beta", 0.9);
        let mut buf = Vec::new();
        lex.write(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# beta=0.9\n# method=sentprop\n# unreachable=zzz\nword\tscore\tstd\tlabel\n"));
        assert_eq!(Lexicon::<f64>::read(buf.as_slice()).unwrap(), lex);
    }

    #[test]
    fn empty_optional_columns() {
        let lex = Lexicon::new(vec!["a".into()], vec![0.5f64]).unwrap();
        let mut buf = Vec::new();
        lex.write(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "word\tscore\tstd\tlabel\na\t0.5\t\t\n");
        let back = Lexicon::<f64>::read(buf.as_slice()).unwrap();
        assert!(back.std().is_none() && back.labels().is_none());
    }

    #[test]
    fn rejects_duplicates_and_bad_rows() {
        assert!(Lexicon::new(vec!["a".into(), "a".into()], vec![0.0, 1.0f64]).is_err());
        assert!(Lexicon::<f64>::read("word\tscore\tstd\tlabel\na\tx\t\t\n".as_bytes()).is_err());
        assert!(Lexicon::<f64>::read("a\t1\n".as_bytes()).is_err());
    }
}
