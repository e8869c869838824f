//! Best-path propagation over a graph of raw co-occurrence context vectors.
//!
//! A word's polarity from one seed side is the largest product of edge
//! weights along any path of at most `max_hops` edges from a seed of that
//! side. The negative side is rescaled by `λ = Σ pol⁺ / Σ pol⁻` before
//! being subtracted.

use super::{graph_metadata, SeedSet};
use crate::corpus::Vocabulary;
use crate::embeddings::PpmiMatrix;
use crate::error::{Error, Result};
use crate::graph::{knn_union, LexicalGraph};
use crate::lexicon::{standardize, Lexicon};
use crate::scalar::Scalar;

/// Max-product path weight from any source, over paths of `≤ max_hops`
/// edges. Sources score 1; unreachable nodes score 0. Edge weights are
/// expected in [0, 1].
pub fn max_product_paths<T: Scalar>(graph: &LexicalGraph<T>, sources: &[usize], max_hops: usize) -> Vec<T> {
    let n = graph.len();
    let mut best = vec![T::zero(); n];
    for &s in sources {
        best[s] = T::one();
    }
    for _ in 0..max_hops {
        let mut next = best.clone();
        let mut changed = false;
        for u in 0..n {
            if best[u] == T::zero() {
                continue;
            }
            let (cols, w) = graph.neighbors(u);
            for (&v, &wv) in cols.iter().zip(w) {
                let cand = best[u] * wv;
                if cand > next[v] {
                    next[v] = cand;
                    changed = true;
                }
            }
        }
        best = next;
        if !changed {
            break;
        }
    }
    best
}

/// kNN graph over the rows of the PPMI matrix; edges weigh the cosine of
/// the two sparse context vectors (never negative, since PPMI is).
pub fn cooccurrence_graph<T: Scalar>(ppmi: &PpmiMatrix<T>, vocab: &Vocabulary, k: usize) -> Result<LexicalGraph<T>> {
    let n = ppmi.dim();
    if vocab.len() != n {
        return Err(Error::invalid("vocabulary and PPMI dimension differ"));
    }
    if k == 0 || k >= n {
        return Err(Error::invalid(format!("k must lie in 1..{n}, got {k}")));
    }
    let m = ppmi.matrix();
    let norms: Vec<T> = (0..n).map(|i| m.row_norm(i)).collect();
    let active: Vec<usize> = (0..n).filter(|&i| norms[i] > T::zero()).collect();
    let k_eff = k.min(active.len().saturating_sub(1));
    let cosine = |i: usize, j: usize| {
        let (ci, vi) = m.row(i);
        let (cj, vj) = m.row(j);
        let (mut a, mut b, mut acc) = (0, 0, T::zero());
        while a < ci.len() && b < cj.len() {
            match ci[a].cmp(&cj[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += vi[a] * vj[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        (acc / (norms[i] * norms[j])).min(T::one()).max(T::zero())
    };
    let edges = if k_eff == 0 { Vec::new() } else { knn_union(&active, k_eff, cosine) };
    LexicalGraph::from_edges(vocab.clone(), k, edges)
}

/// Raw best-path scores `pol⁺ − λ·pol⁻` on an existing graph.
pub fn bestpath_on_graph<T: Scalar>(
    graph: &LexicalGraph<T>,
    positive: &[usize],
    negative: &[usize],
    max_hops: usize,
) -> Result<Vec<T>> {
    if max_hops == 0 {
        return Err(Error::invalid("max_hops must be at least 1"));
    }
    if positive.is_empty() || negative.is_empty() {
        return Err(Error::DegenerateSeeds("both seed sides must be non-empty".into()));
    }
    let pol_pos = max_product_paths(graph, positive, max_hops);
    let pol_neg = max_product_paths(graph, negative, max_hops);
    let sum_pos: T = pol_pos.iter().copied().sum();
    let sum_neg: T = pol_neg.iter().copied().sum();
    let lambda = sum_pos / sum_neg;
    Ok(pol_pos.iter().zip(&pol_neg).map(|(&p, &q)| p - lambda * q).collect())
}

/// Best-path baseline on raw co-occurrence vectors, standardized.
pub fn bestpath_scores<T: Scalar>(
    ppmi: &PpmiMatrix<T>,
    vocab: &Vocabulary,
    seeds: &SeedSet,
    k: usize,
    max_hops: usize,
) -> Result<Lexicon<T>> {
    let graph = cooccurrence_graph(ppmi, vocab, k)?;
    let (pos, neg) = seeds.resolve(vocab, |_| true)?;
    let raw = bestpath_on_graph(&graph, &pos, &neg, max_hops)?;
    let lex = Lexicon::new(vocab.words().to_vec(), standardize(&raw))?.with_meta("max_hops", max_hops);
    Ok(graph_metadata(lex, "bestpath", &graph, seeds))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> LexicalGraph<f64> {
        LexicalGraph::from_edges(
            Vocabulary::from_words((0..n).map(|i| format!("w{i}"))).unwrap(),
            1,
            edges.iter().copied(),
        )
        .unwrap()
    }

    #[test]
    fn single_hop() {
        let g = graph(2, &[(0, 1, 0.8)]);
        assert_eq!(max_product_paths(&g, &[0], 1), vec![1.0, 0.8]);
        assert_eq!(max_product_paths(&g, &[0], 5), vec![1.0, 0.8]);
    }

    #[test]
    fn two_hop_path_beats_weak_direct_edge() {
        // s=0, a=1, w=2.
        let g = graph(3, &[(0, 1, 0.9), (1, 2, 0.9), (0, 2, 0.5)]);
        let pol = max_product_paths(&g, &[0], 2);
        assert!((pol[2] - 0.81).abs() < 1e-15);
        assert_eq!(max_product_paths(&g, &[0], 1)[2], 0.5);
    }

    #[test]
    fn disconnected_words_score_zero() {
        let g = graph(4, &[(0, 1, 0.5), (2, 1, 0.5)]);
        let raw = bestpath_on_graph(&g, &[0], &[2], 3).unwrap();
        assert_eq!(raw[3], 0.0);
        assert!(bestpath_on_graph(&g, &[0], &[2], 0).is_err());
    }

    #[test]
    fn cooccurrence_graph_uses_context_cosine() {
        use crate::corpus::SparseCountMatrix;
        use crate::embeddings::ppmi;
        let counts = SparseCountMatrix::from_upper_entries(
            4,
            2,
            [(0, 2, 3.0), (1, 2, 3.0), (0, 3, 1.0), (1, 3, 1.0), (2, 3, 1.0)],
        )
        .unwrap();
        let p = ppmi::<f64>(&counts, 1.0).unwrap();
        let vocab = Vocabulary::from_words(["a", "b", "c", "d"]).unwrap();
        let g = cooccurrence_graph(&p, &vocab, 1).unwrap();
        // a and b share their whole context profile.
        assert!((g.weight(0, 1) - 1.0).abs() < 1e-12);
        assert!(g.edges().iter().all(|&(_, _, w)| (0.0..=1.0).contains(&w)));
    }
}
