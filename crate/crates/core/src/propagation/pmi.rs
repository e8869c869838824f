use log::warn;

use super::SeedSet;
use crate::corpus::{SparseCountMatrix, Vocabulary};
use crate::embeddings::PmiModel;
use crate::error::{Error, Result};
use crate::lexicon::{standardize, Lexicon};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmiBaselineParams<T> {
    /// Context-distribution smoothing exponent.
    pub smoothing: T,
    /// Pseudo-count used in place of zero for pairs that never co-occur,
    /// which sets the PMI floor.
    pub absent_count: T,
}

impl<T: Scalar> Default for PmiBaselineParams<T> {
    fn default() -> Self {
        Self { smoothing: T::from_f64_lossy(0.75), absent_count: T::from_f64_lossy(0.01) }
    }
}

/// Unstandardized `Σ_{s⁺} PMI(w, s) − Σ_{s⁻} PMI(w, s)` for every word with
/// non-zero co-occurrence mass, as `(index, score)` in vocabulary order.
pub fn pmi_raw_scores<T: Scalar>(
    counts: &SparseCountMatrix,
    positive: &[usize],
    negative: &[usize],
    params: &PmiBaselineParams<T>,
) -> Result<Vec<(usize, T)>> {
    if !(params.absent_count > T::zero()) {
        return Err(Error::invalid("absent_count must be positive"));
    }
    let model = PmiModel::new(counts, params.smoothing)?;
    let usable = |side: &[usize], name: &str| -> Result<Vec<usize>> {
        let kept: Vec<usize> = side
            .iter()
            .copied()
            .filter(|&s| {
                let ok = model.context_prob[s] > T::zero();
                if !ok {
                    warn!("{name} seed #{s} never co-occurs; dropped");
                }
                ok
            })
            .collect();
        if kept.is_empty() {
            return Err(Error::DegenerateSeeds(format!("no {name} seed has co-occurrence mass")));
        }
        Ok(kept)
    };
    let positive = usable(positive, "positive")?;
    let negative = usable(negative, "negative")?;

    let pmi = |w: usize, s: usize| {
        let c = counts.get(w, s);
        let c = if c > 0.0 { T::from_f64_lossy(c) } else { params.absent_count };
        model.pmi(w, s, c)
    };
    Ok((0..counts.dim())
        .filter(|&w| model.row_prob[w] > T::zero())
        .map(|w| {
            let pos: T = positive.iter().map(|&s| pmi(w, s)).sum();
            let neg: T = negative.iter().map(|&s| pmi(w, s)).sum();
            (w, pos - neg)
        })
        .collect())
}

/// PMI-with-seeds baseline (no propagation), standardized. Words that never
/// co-occur with anything are left out with a warning.
pub fn pmi_baseline<T: Scalar>(
    counts: &SparseCountMatrix,
    vocab: &Vocabulary,
    seeds: &SeedSet,
    params: &PmiBaselineParams<T>,
) -> Result<Lexicon<T>> {
    if vocab.len() != counts.dim() {
        return Err(Error::invalid("vocabulary and count matrix dimension differ"));
    }
    let (pos, neg) = seeds.resolve(vocab, |_| true)?;
    let raw = pmi_raw_scores(counts, &pos, &neg, params)?;
    let excluded = vocab.len() - raw.len();
    if excluded > 0 {
        warn!("{excluded} words have zero co-occurrence mass and were excluded");
    }
    let scores: Vec<T> = raw.iter().map(|&(_, s)| s).collect();
    let words = raw.iter().map(|&(w, _)| vocab.word(w).to_string()).collect();
    Ok(Lexicon::new(words, standardize(&scores))?
        .with_meta("method", "pmi")
        .with_meta("smoothing", params.smoothing)
        .with_meta("absent_count", params.absent_count)
        .with_meta("seed_checksum", seeds.checksum()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_positive_neighbour_scores_positive() {
        // vocab: p, n, w, x. w co-occurs only with p.
        let counts = SparseCountMatrix::from_upper_entries(4, 2, [(0, 2, 3.0), (1, 3, 2.0), (0, 3, 1.0)]).unwrap();
        let raw = pmi_raw_scores::<f64>(&counts, &[0], &[1], &PmiBaselineParams::default()).unwrap();
        let w = raw.iter().find(|e| e.0 == 2).unwrap().1;
        assert!(w > 0.0);
    }

    #[test]
    fn symmetric_profile_cancels() {
        // w (2) co-occurs equally with p (0) and n (1), which are otherwise alike.
        let counts =
            SparseCountMatrix::from_upper_entries(4, 2, [(0, 2, 2.0), (1, 2, 2.0), (0, 3, 1.0), (1, 3, 1.0)]).unwrap();
        let raw = pmi_raw_scores::<f64>(&counts, &[0], &[1], &PmiBaselineParams::default()).unwrap();
        let w = raw.iter().find(|e| e.0 == 2).unwrap().1;
        assert!(w.abs() < 1e-12);
    }

    #[test]
    fn zero_mass_words_excluded() {
        let counts = SparseCountMatrix::from_upper_entries(4, 2, [(0, 1, 2.0), (1, 2, 1.0)]).unwrap();
        let vocab = Vocabulary::from_words(["p", "n", "w", "lonely"]).unwrap();
        let seeds = SeedSet::new(["p"], ["n"]).unwrap();
        let lex = pmi_baseline::<f64>(&counts, &vocab, &seeds, &PmiBaselineParams::default()).unwrap();
        assert_eq!(lex.len(), 3);
        assert!(lex.score("lonely").is_none());
        assert_eq!(lex.meta("method"), Some("pmi"));
    }
}
