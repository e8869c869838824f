//! Corpus ingestion, vocabulary construction and sliding-window
//! co-occurrence counting.
//!
//! A corpus is pre-tokenized text: one document per line, tokens separated
//! by whitespace. Windows never cross a line boundary. Out-of-vocabulary
//! tokens keep their position (they widen the gap between in-vocabulary
//! neighbours) but produce no counts.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Write};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::format::{parse_field, read_triples, write_triples};
use crate::linalg::CsrMatrix;

pub const DEFAULT_WINDOW_SIZE: usize = 4;

/// Pre-tokenized documents.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    docs: Vec<Vec<String>>,
}

impl Corpus {
    pub fn from_docs(docs: Vec<Vec<String>>) -> Self {
        Self { docs }
    }

    pub fn parse(text: &str, lowercase: bool) -> Self {
        Self { docs: text.lines().map(|l| tokenize(l, lowercase)).collect() }
    }

    pub fn read<R: BufRead>(reader: R, lowercase: bool) -> Result<Self> {
        let mut docs = Vec::new();
        for line in reader.lines() {
            docs.push(tokenize(&line?, lowercase));
        }
        Ok(Self { docs })
    }

    pub fn docs(&self) -> &[Vec<String>] {
        &self.docs
    }

    pub fn num_tokens(&self) -> usize {
        self.docs.iter().map(Vec::len).sum()
    }
}

fn tokenize(line: &str, lowercase: bool) -> Vec<String> {
    line.split_whitespace().map(|t| if lowercase { t.to_lowercase() } else { t.to_string() }).collect()
}

/// Reads a stopword list, one word per line; blank lines are ignored.
pub fn read_stopwords<R: BufRead>(reader: R, lowercase: bool) -> Result<HashSet<String>> {
    let mut out = HashSet::new();
    for line in reader.lines() {
        let line = line?;
        let w = line.trim();
        if !w.is_empty() {
            out.insert(if lowercase { w.to_lowercase() } else { w.to_string() });
        }
    }
    Ok(out)
}

/// Bidirectional word ↔ index map with occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Builds from `(word, count)` pairs in the given order.
    pub fn from_counts(entries: Vec<(String, u64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let mut words = Vec::with_capacity(entries.len());
        let mut counts = Vec::with_capacity(entries.len());
        let mut index = HashMap::with_capacity(entries.len());
        for (w, c) in entries {
            if c == 0 {
                return Err(Error::invalid(format!("word {w:?} has zero count")));
            }
            if w.is_empty() || w.chars().any(char::is_whitespace) {
                return Err(Error::invalid(format!("invalid vocabulary token {w:?}")));
            }
            if index.insert(w.clone(), words.len()).is_some() {
                return Err(Error::invalid(format!("duplicate word {w:?}")));
            }
            words.push(w);
            counts.push(c);
        }
        Ok(Self { words, counts, index })
    }

    /// Vocabulary over the given words, each with count 1.
    pub fn from_words<S: Into<String>>(words: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::from_counts(words.into_iter().map(|w| (w.into(), 1)).collect())
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

    pub fn word(&self, i: usize) -> &str {
        &self.words[i]
    }

    pub fn count(&self, i: usize) -> u64 {
        self.counts[i]
    }

    pub fn get(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    /// Restricts to the listed indices, preserving their order.
    pub fn subset(&self, keep: &[usize]) -> Result<Self> {
        Self::from_counts(keep.iter().map(|&i| (self.words[i].clone(), self.counts[i])).collect())
    }

    /// Hex SHA-256 over the serialized vocabulary; binds derived artifacts
    /// to the vocabulary they were built from.
    pub fn checksum(&self) -> String {
        let mut h = Sha256::new();
        for (w, c) in self.words.iter().zip(&self.counts) {
            h.update(w.as_bytes());
            h.update(b"\t");
            h.update(c.to_string().as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }

    /// Writes `word<TAB>count` lines in index order.
    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        for (w, c) in self.words.iter().zip(&self.counts) {
            writeln!(out, "{w}\t{c}")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut entries = Vec::new();
        for (k, line) in reader.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let (w, c) = line.split_once('\t').ok_or_else(|| Error::parse(k + 1, "expected word<TAB>count"))?;
            entries.push((w.to_string(), parse_field::<u64>(c, k + 1, "count")?));
        }
        Self::from_counts(entries)
    }
}

/// Counts tokens and keeps those with `count ≥ min_count` that are not
/// stopwords, ordered by descending frequency (ties lexicographic), then
/// truncated to `top_n`.
pub fn build_vocabulary(
    corpus: &Corpus,
    min_count: u64,
    top_n: Option<usize>,
    stopwords: Option<&HashSet<String>>,
) -> Result<Vocabulary> {
    if min_count < 1 {
        return Err(Error::invalid("min_count must be at least 1"));
    }
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for doc in corpus.docs() {
        for tok in doc {
            *counts.entry(tok.as_str()).or_default() += 1;
        }
    }
    let mut kept: Vec<(&str, u64)> =
        counts.into_iter().filter(|&(w, c)| c >= min_count && !stopwords.is_some_and(|s| s.contains(w))).collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    if let Some(n) = top_n {
        kept.truncate(n);
    }
    if kept.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    Vocabulary::from_counts(kept.into_iter().map(|(w, c)| (w.to_string(), c)).collect())
}

/// Symmetric word-word co-occurrence counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCountMatrix {
    counts: CsrMatrix<f64>,
    window_size: usize,
    vocab_hash: Option<String>,
}

impl SparseCountMatrix {
    /// Builds from upper-triangle entries `(i, j, value)` with `i ≤ j`;
    /// the lower triangle is mirrored.
    pub fn from_upper_entries(
        dim: usize,
        window_size: usize,
        entries: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, j, v) in entries {
            if i > j {
                return Err(Error::invalid(format!("entry ({i},{j}) is below the diagonal")));
            }
            if i >= dim || j >= dim {
                return Err(Error::invalid(format!("entry ({i},{j}) out of range for dim {dim}")));
            }
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!("count at ({i},{j}) must be finite and non-negative")));
            }
            if v == 0.0 {
                continue;
            }
            if map.insert((i, j), v).is_some() {
                return Err(Error::invalid(format!("duplicate entry ({i},{j})")));
            }
            map.insert((j, i), v);
        }
        Ok(Self { counts: CsrMatrix::from_sorted_map(dim, dim, &map), window_size, vocab_hash: None })
    }

    pub fn with_vocab_hash(mut self, hash: impl Into<String>) -> Self {
        self.vocab_hash = Some(hash.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.counts.nrows()
    }

    pub fn window_size(&self) -> usize {
        self.window_size
    }

    pub fn vocab_hash(&self) -> Option<&str> {
        self.vocab_hash.as_deref()
    }

    pub fn matrix(&self) -> &CsrMatrix<f64> {
        &self.counts
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.counts.get(i, j).unwrap_or(0.0)
    }

    pub fn nnz(&self) -> usize {
        self.counts.nnz()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.nnz() == 0
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().map(|(_, _, v)| v).sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.counts.row(i).1.iter().sum()).collect()
    }

    /// Writes the `COOC` triple format; only `i ≤ j` entries are stored.
    pub fn write<W: Write>(&self, out: W) -> Result<()> {
        let upper: Vec<(usize, usize, f64)> = self.counts.iter().filter(|&(i, j, _)| i <= j).collect();
        write_triples(out, "COOC", self.dim(), &self.window_size.to_string(), &upper)
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let (header, entries) = read_triples::<_, f64>(reader, "COOC")?;
        let window = parse_field::<usize>(&header.extra, 1, "window_size")?;
        Self::from_upper_entries(header.dim, window, entries)
    }
}

/// Counts in-vocabulary token pairs at distance `1..=window_size` within
/// each line. Each pair increments both `(a, b)` and `(b, a)`; a word
/// co-occurring with itself adds 2 to the diagonal.
pub fn count_cooccurrences(corpus: &Corpus, vocab: &Vocabulary, window_size: usize) -> Result<SparseCountMatrix> {
    if window_size < 1 {
        return Err(Error::invalid("window_size must be at least 1"));
    }
    // Shards are merged by integer-valued addition, so the result does not
    // depend on how rayon splits the documents.
    let pairs: HashMap<(usize, usize), u64> = corpus
        .docs()
        .par_iter()
        .fold(HashMap::new, |mut acc: HashMap<(usize, usize), u64>, doc| {
            let ids: Vec<Option<usize>> = doc.iter().map(|t| vocab.get(t)).collect();
            for (t, a) in ids.iter().enumerate() {
                let Some(a) = *a else { continue };
                for b in ids.iter().skip(t + 1).take(window_size).flatten() {
                    let key = if a <= *b { (a, *b) } else { (*b, a) };
                    *acc.entry(key).or_default() += 1;
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });

    let upper = pairs.into_iter().map(|((i, j), n)| {
        let v = if i == j { 2 * n } else { n };
        (i, j, v as f64)
    });
    Ok(SparseCountMatrix::from_upper_entries(vocab.len(), window_size, upper)?.with_vocab_hash(vocab.checksum()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vocab_of(corpus: &Corpus) -> Vocabulary {
        build_vocabulary(corpus, 1, None, None).unwrap()
    }

    #[test]
    fn vocabulary_counts_and_order() {
        let c = Corpus::parse("a b a", true);
        let v = vocab_of(&c);
        assert_eq!(v.words(), &["a", "b"]);
        assert_eq!((v.count(0), v.count(1)), (2, 1));

        let v2 = build_vocabulary(&c, 2, None, None).unwrap();
        assert_eq!(v2.words(), &["a"]);
    }

    #[test]
    fn vocabulary_ties_are_lexicographic_and_stopwords_removed() {
        let c = Corpus::parse("c b a the the\nthe", true);
        let stop: HashSet<String> = ["the".to_string()].into();
        let v = build_vocabulary(&c, 1, None, Some(&stop)).unwrap();
        assert_eq!(v.words(), &["a", "b", "c"]);
        let v = build_vocabulary(&c, 1, Some(2), Some(&stop)).unwrap();
        assert_eq!(v.words(), &["a", "b"]);
    }

    #[test]
    fn lowercasing_is_optional() {
        let c = Corpus::parse("Good good", false);
        assert_eq!(vocab_of(&c).len(), 2);
        let c = Corpus::parse("Good good", true);
        assert_eq!(vocab_of(&c).len(), 1);
    }

    #[test]
    fn empty_vocabulary_is_an_error() {
        let c = Corpus::parse("a b", true);
        assert!(matches!(build_vocabulary(&c, 5, None, None), Err(Error::EmptyVocabulary)));
        assert!(matches!(build_vocabulary(&Corpus::parse("", true), 1, None, None), Err(Error::EmptyVocabulary)));
    }

    #[test]
    fn cooccurrence_examples() {
        let v = Vocabulary::from_words(["a", "b"]).unwrap();
        let m = count_cooccurrences(&Corpus::parse("", true), &v, 4).unwrap();
        assert!(m.is_empty());

        let m = count_cooccurrences(&Corpus::parse("a b", true), &v, 1).unwrap();
        assert_eq!((m.get(0, 1), m.get(1, 0), m.get(0, 0)), (1.0, 1.0, 0.0));

        let m = count_cooccurrences(&Corpus::parse("a b a", true), &v, 2).unwrap();
        assert_eq!((m.get(0, 1), m.get(1, 0), m.get(0, 0)), (2.0, 2.0, 2.0));
        assert_eq!(m.get(1, 1), 0.0);
    }

    #[test]
    fn windows_respect_lines_and_oov_gaps() {
        let v = Vocabulary::from_words(["a", "b"]).unwrap();
        // "x" is out of vocabulary but still occupies a position.
        let m = count_cooccurrences(&Corpus::parse("a x b", true), &v, 1).unwrap();
        assert!(m.is_empty());
        let m = count_cooccurrences(&Corpus::parse("a x b", true), &v, 2).unwrap();
        assert_eq!(m.get(0, 1), 1.0);
        let m = count_cooccurrences(&Corpus::parse("a\nb", true), &v, 4).unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn zero_window_rejected() {
        let v = Vocabulary::from_words(["a"]).unwrap();
        assert!(count_cooccurrences(&Corpus::parse("a a", true), &v, 0).is_err());
    }

    #[test]
    fn count_file_round_trip() {
        let c = Corpus::parse("a b a c\nc a", true);
        let v = vocab_of(&c);
        let m = count_cooccurrences(&c, &v, 2).unwrap();
        let mut buf = Vec::new();
        m.write(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&format!("COOC 3 {} 2\n", m.matrix().iter().filter(|e| e.0 <= e.1).count())));
        let back = SparseCountMatrix::read(buf.as_slice()).unwrap();
        assert_eq!(back.matrix(), m.matrix());
        assert_eq!(back.window_size(), 2);
    }

    #[test]
    fn vocab_file_round_trip() {
        let v = Vocabulary::from_counts(vec![("x".into(), 3), ("y".into(), 1)]).unwrap();
        let mut buf = Vec::new();
        v.write(&mut buf).unwrap();
        let back = Vocabulary::read(buf.as_slice()).unwrap();
        assert_eq!(back, v);
        assert_eq!(back.checksum(), v.checksum());
    }

    /// Brute-force count over every same-line position pair.
    fn pair_oracle(corpus: &Corpus, vocab: &Vocabulary, window: usize) -> BTreeMap<(usize, usize), f64> {
        let mut out = BTreeMap::new();
        for doc in corpus.docs() {
            for s in 0..doc.len() {
                for t in 0..doc.len() {
                    if s == t || s.abs_diff(t) > window {
                        continue;
                    }
                    if let (Some(a), Some(b)) = (vocab.get(&doc[s]), vocab.get(&doc[t])) {
                        *out.entry((a, b)).or_insert(0.0) += 1.0;
                    }
                }
            }
        }
        out
    }

    fn corpus_strategy() -> impl Strategy<Value = Corpus> {
        prop::collection::vec(prop::collection::vec(0u8..8, 0..30), 0..12).prop_map(|docs| {
            Corpus::from_docs(docs.into_iter().map(|d| d.into_iter().map(|t| format!("w{t}")).collect()).collect())
        })
    }

    proptest! {
        #[test]
        fn counts_match_pair_enumeration(corpus in corpus_strategy(), window in 1usize..5) {
            let vocab = Vocabulary::from_words((0..6).map(|t| format!("w{t}"))).unwrap();
            let m = count_cooccurrences(&corpus, &vocab, window).unwrap();
            let oracle = pair_oracle(&corpus, &vocab, window);
            let got: BTreeMap<(usize, usize), f64> = m.matrix().iter().map(|(i, j, v)| ((i, j), v)).collect();
            prop_assert_eq!(&got, &oracle);
            prop_assert!(m.matrix().is_symmetric());
            let pairs: f64 = oracle.values().sum::<f64>() / 2.0;
            prop_assert_eq!(m.total(), 2.0 * pairs);
        }

        #[test]
        fn counting_is_deterministic(corpus in corpus_strategy()) {
            let vocab = Vocabulary::from_words((0..8).map(|t| format!("w{t}"))).unwrap();
            let a = count_cooccurrences(&corpus, &vocab, 3).unwrap();
            let b = count_cooccurrences(&corpus, &vocab, 3).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
