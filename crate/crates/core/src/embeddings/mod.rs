//! Word embeddings: smoothed PPMI, truncated-SVD vectors, the plain-text
//! embedding format and cosine nearest-neighbour queries.

mod ppmi;
mod svd;

use std::collections::HashMap;
use std::io::{BufRead, Write};

pub use ppmi::{ppmi, PmiModel, PpmiMatrix, DEFAULT_SMOOTHING};
pub use svd::{truncated_svd, SvdParams, TruncatedSvd};

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::format::parse_field;
use crate::linalg::DenseMatrix;
use crate::scalar::{dot, norm, Scalar};

pub const DEFAULT_DIM: usize = 300;

/// Dense |V| × d matrix with one row per vocabulary word.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet<T> {
    vocab: Vocabulary,
    matrix: DenseMatrix<T>,
}

impl<T: Scalar> EmbeddingSet<T> {
    pub fn new(vocab: Vocabulary, matrix: DenseMatrix<T>) -> Result<Self> {
        if matrix.rows() != vocab.len() {
            return Err(Error::invalid(format!(
                "embedding matrix has {} rows for {} words",
                matrix.rows(),
                vocab.len()
            )));
        }
        if matrix.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("embedding entries must be finite"));
        }
        Ok(Self { vocab, matrix })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn row(&self, i: usize) -> &[T] {
        self.matrix.row(i)
    }

    pub fn vector(&self, word: &str) -> Option<&[T]> {
        self.vocab.get(word).map(|i| self.row(i))
    }

    /// Rows whose norm is negligible next to the largest row norm. Cosine is
    /// undefined on them, so graph construction leaves them isolated.
    pub fn zero_rows(&self) -> Vec<usize> {
        let norms: Vec<T> = (0..self.len()).map(|i| norm(self.row(i))).collect();
        let max = norms.iter().copied().fold(T::zero(), T::max);
        let cutoff = max * T::epsilon().sqrt();
        norms.iter().enumerate().filter(|&(_, &n)| n <= cutoff).map(|(i, _)| i).collect()
    }

    /// Writes the text format: header `"<N> <d>"`, then `word v1 … vd`.
    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.len(), self.dim())?;
        for i in 0..self.len() {
            write!(out, "{}", self.vocab.word(i))?;
            for v in self.row(i) {
                write!(out, " {v}")?;
            }
            writeln!(out)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Result of [`load_embeddings`].
#[derive(Debug, Clone)]
pub struct LoadedEmbeddings<T> {
    pub embeddings: EmbeddingSet<T>,
    /// Words present in the file but not in the expected vocabulary.
    pub dropped: Vec<String>,
    /// Words of the expected vocabulary that the file does not contain.
    pub missing: Vec<String>,
}

/// Reads embeddings in the text format. With `expected_vocab`, the result is
/// restricted to (and ordered by) that vocabulary; otherwise rows follow file
/// order and every word gets count 1.
pub fn load_embeddings<T: Scalar, R: BufRead>(
    reader: R,
    expected_vocab: Option<&Vocabulary>,
) -> Result<LoadedEmbeddings<T>> {
    let mut lines = reader.lines();
    let header = lines.next().ok_or_else(|| Error::parse(1, "missing header"))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(Error::parse(1, format!("expected \"<N> <d>\" header, got {header:?}")));
    }
    let count = parse_field::<usize>(fields[0], 1, "row count")?;
    let d = parse_field::<usize>(fields[1], 1, "dimension")?;

    let mut words: Vec<String> = Vec::with_capacity(count);
    let mut rows: Vec<T> = Vec::with_capacity(count * d);
    let mut seen: HashMap<String, usize> = HashMap::with_capacity(count);
    for (k, line) in lines.enumerate() {
        let line = line?;
        let lineno = k + 2;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let word = parts.next().expect("non-empty line has a first field").to_string();
        let start = rows.len();
        for p in parts {
            rows.push(parse_field::<T>(p, lineno, "vector component")?);
        }
        if rows.len() - start != d {
            return Err(Error::parse(
                lineno,
                format!("dimension mismatch: header says {d}, row has {}", rows.len() - start),
            ));
        }
        if seen.insert(word.clone(), words.len()).is_some() {
            return Err(Error::parse(lineno, format!("duplicate word {word:?}")));
        }
        words.push(word);
    }
    if words.len() != count {
        return Err(Error::parse(
            words.len() + 1,
            format!("header declares {count} rows but file has {}", words.len()),
        ));
    }

    let Some(expected) = expected_vocab else {
        let vocab = Vocabulary::from_words(words)?;
        return Ok(LoadedEmbeddings {
            embeddings: EmbeddingSet::new(vocab, DenseMatrix::from_row_major(count, d, rows))?,
            dropped: Vec::new(),
            missing: Vec::new(),
        });
    };

    let full = DenseMatrix::from_row_major(count, d, rows);
    let mut keep_rows = Vec::new();
    let mut keep_words = Vec::new();
    let mut missing = Vec::new();
    for (i, w) in expected.words().iter().enumerate() {
        match seen.get(w) {
            Some(&r) => {
                keep_rows.push(r);
                keep_words.push(i);
            }
            None => missing.push(w.clone()),
        }
    }
    let dropped = words.iter().filter(|w| !expected.contains(w)).cloned().collect();
    Ok(LoadedEmbeddings {
        embeddings: EmbeddingSet::new(expected.subset(&keep_words)?, full.select_rows(&keep_rows))?,
        dropped,
        missing,
    })
}

/// Embeds words as the leading `d` left-singular vectors of the PPMI
/// matrix; singular values are discarded.
pub fn svd_embed<T: Scalar>(
    ppmi: &PpmiMatrix<T>,
    vocab: &Vocabulary,
    d: usize,
    seed: u64,
    params: &SvdParams<T>,
) -> Result<EmbeddingSet<T>> {
    if vocab.len() != ppmi.dim() {
        return Err(Error::invalid(format!(
            "vocabulary has {} words but PPMI matrix has dimension {}",
            vocab.len(),
            ppmi.dim()
        )));
    }
    let svd = truncated_svd(ppmi.matrix(), d, seed, params)?;
    EmbeddingSet::new(vocab.clone(), svd.u)
}

/// Cosine similarity clamped to [-1, 1].
pub fn cosine_similarity<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::invalid("vectors differ in length"));
    }
    let (na, nb) = (norm(a), norm(b));
    if na == T::zero() || nb == T::zero() {
        return Err(Error::ZeroVector);
    }
    Ok((dot(a, b) / (na * nb)).max(-T::one()).min(T::one()))
}

/// The `k` other words most cosine-similar to `word`, best first; ties go to
/// the earlier vocabulary entry. Zero rows are skipped.
pub fn nearest_neighbors<T: Scalar>(emb: &EmbeddingSet<T>, word: &str, k: usize) -> Result<Vec<(String, T)>> {
    let q = emb.vocab().get(word).ok_or_else(|| Error::UnknownWord(word.to_string()))?;
    if k == 0 || k >= emb.len() {
        return Err(Error::invalid(format!("k must lie in 1..{}, got {k}", emb.len())));
    }
    let query = emb.row(q);
    if norm(query) == T::zero() {
        return Err(Error::ZeroVector);
    }
    let mut scored: Vec<(usize, T)> = (0..emb.len())
        .filter(|&j| j != q)
        .filter_map(|j| cosine_similarity(query, emb.row(j)).ok().map(|s| (j, s)))
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    scored.truncate(k);
    Ok(scored.into_iter().map(|(j, s)| (emb.vocab().word(j).to_string(), s)).collect())
}
