//! Weighted k-nearest-neighbour lexical graph.
//!
//! Each word is linked to its `k` most cosine-similar words; the directed
//! lists are symmetrized by union. An edge between `w_i` and `w_j` weighs
//! `arccos(−cos(w_i, w_j))`, which grows with similarity and lies in [0, π].

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use log::warn;
use rayon::prelude::*;

use crate::corpus::Vocabulary;
use crate::embeddings::EmbeddingSet;
use crate::error::{Error, Result};
use crate::format::{parse_field, read_triples, write_triples};
use crate::linalg::CsrMatrix;
use crate::scalar::{dot, norm, Scalar};

pub const DEFAULT_K: usize = 25;

/// Sparse symmetric weighted adjacency over a vocabulary, without self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct LexicalGraph<T> {
    vocab: Vocabulary,
    k: usize,
    adjacency: CsrMatrix<T>,
}

impl<T: Scalar> LexicalGraph<T> {
    /// Builds from undirected edges `(i, j, weight)`; each pair may appear
    /// once in either orientation. Zero-weight edges are dropped.
    pub fn from_edges(vocab: Vocabulary, k: usize, edges: impl IntoIterator<Item = (usize, usize, T)>) -> Result<Self> {
        let n = vocab.len();
        let mut map = BTreeMap::new();
        for (i, j, w) in edges {
            if i == j {
                return Err(Error::invalid(format!("self-loop at node {i}")));
            }
            if i >= n || j >= n {
                return Err(Error::invalid(format!("edge ({i},{j}) out of range for {n} nodes")));
            }
            if !(w.is_finite() && w >= T::zero()) {
                return Err(Error::invalid(format!("edge ({i},{j}) has invalid weight {w}")));
            }
            if w == T::zero() {
                continue;
            }
            if map.insert((i, j), w).is_some() || map.insert((j, i), w).is_some() {
                return Err(Error::invalid(format!("duplicate edge ({i},{j})")));
            }
        }
        Ok(Self { vocab, k, adjacency: CsrMatrix::from_sorted_map(n, n, &map) })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn adjacency(&self) -> &CsrMatrix<T> {
        &self.adjacency
    }

    pub fn weight(&self, i: usize, j: usize) -> T {
        self.adjacency.get(i, j).unwrap_or_else(T::zero)
    }

    pub fn neighbors(&self, i: usize) -> (&[usize], &[T]) {
        self.adjacency.row(i)
    }

    /// Weighted degrees (row sums of the adjacency matrix).
    pub fn degrees(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.adjacency.row(i).1.iter().copied().sum()).collect()
    }

    pub fn is_isolated(&self, i: usize) -> bool {
        self.adjacency.row(i).0.is_empty()
    }

    pub fn isolated_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_isolated(i)).collect()
    }

    /// Undirected edges with `i < j`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize, T)> {
        self.adjacency.iter().filter(|&(i, j, _)| i < j).collect()
    }

    /// Multiplies every edge weight by `factor > 0`.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        Self::from_edges(self.vocab.clone(), self.k, self.edges().into_iter().map(|(i, j, w)| (i, j, w * factor)))
    }

    /// Writes the `GRAPH` triple format (`i < j`).
    pub fn write<W: Write>(&self, out: W) -> Result<()> {
        write_triples(out, "GRAPH", self.len(), &self.k.to_string(), &self.edges())
    }

    pub fn read<R: BufRead>(reader: R, vocab: Vocabulary) -> Result<Self> {
        let (header, entries) = read_triples::<_, T>(reader, "GRAPH")?;
        if header.dim != vocab.len() {
            return Err(Error::invalid(format!(
                "graph has {} nodes but vocabulary has {} words",
                header.dim,
                vocab.len()
            )));
        }
        let k = parse_field::<usize>(&header.extra, 1, "k")?;
        Self::from_edges(vocab, k, entries)
    }
}

/// Union-symmetrized kNN edge list over `active` nodes. `similarity(i, j)`
/// must be symmetric. Returns `(i, j, similarity)` with `i < j`, sorted.
pub(crate) fn knn_union<T, F>(active: &[usize], k: usize, similarity: F) -> Vec<(usize, usize, T)>
where
    T: Scalar,
    F: Fn(usize, usize) -> T + Sync,
{
    let lists: Vec<Vec<(usize, T)>> = active
        .par_iter()
        .map(|&i| {
            let mut cands: Vec<(usize, T)> =
                active.iter().filter(|&&j| j != i).map(|&j| (j, similarity(i, j))).collect();
            let by_rank = |a: &(usize, T), b: &(usize, T)| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0));
            if cands.len() > k {
                cands.select_nth_unstable_by(k - 1, by_rank);
                cands.truncate(k);
            }
            cands.sort_by(by_rank);
            cands
        })
        .collect();

    let mut edges = BTreeSet::new();
    for (&i, list) in active.iter().zip(&lists) {
        for &(j, _) in list {
            edges.insert((i.min(j), i.max(j)));
        }
    }
    edges.into_iter().map(|(i, j)| (i, j, similarity(i, j))).collect()
}

/// Edge weight for a cosine similarity: `arccos(−cos)`.
#[inline]
pub fn edge_weight<T: Scalar>(cosine: T) -> T {
    (-cosine).max(-T::one()).min(T::one()).acos()
}

/// Builds the kNN lexical graph. Zero rows of `emb` are left isolated with
/// a warning; ties in the neighbour cut go to the earlier vocabulary entry.
pub fn build_knn_graph<T: Scalar>(emb: &EmbeddingSet<T>, k: usize) -> Result<LexicalGraph<T>> {
    let n = emb.len();
    if k == 0 || k >= n {
        return Err(Error::invalid(format!("k must lie in 1..{n}, got {k}")));
    }
    let zero: BTreeSet<usize> = emb.zero_rows().into_iter().collect();
    if !zero.is_empty() {
        warn!("{} words have zero embedding rows and stay isolated", zero.len());
    }
    let active: Vec<usize> = (0..n).filter(|i| !zero.contains(i)).collect();
    let mut k_eff = k;
    if active.len() <= k {
        k_eff = active.len().saturating_sub(1);
        warn!("only {} usable rows; k reduced from {k} to {k_eff}", active.len());
    }

    let unit: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let row = emb.row(i);
            let len = norm(row);
            if zero.contains(&i) {
                vec![T::zero(); row.len()]
            } else {
                row.iter().map(|&x| x / len).collect()
            }
        })
        .collect();
    let cosine = |i: usize, j: usize| dot(&unit[i], &unit[j]).max(-T::one()).min(T::one());
    let edges = if k_eff == 0 { Vec::new() } else { knn_union(&active, k_eff, cosine) };
    let graph =
        LexicalGraph::from_edges(emb.vocab().clone(), k, edges.into_iter().map(|(i, j, c)| (i, j, edge_weight(c))))?;
    let isolated = graph.isolated_nodes().len();
    if isolated > zero.len() {
        warn!("{} words are isolated after dropping zero-weight edges", isolated - zero.len());
    }
    Ok(graph)
}
