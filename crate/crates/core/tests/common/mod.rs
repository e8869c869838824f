#![allow(dead_code)]

use std::collections::BTreeMap;

use lexinduce::linalg::{CsrMatrix, DenseMatrix};
use lexinduce::{EmbeddingSet, LexicalGraph, Vocabulary};

pub fn words(n: usize) -> Vocabulary {
    Vocabulary::from_words((0..n).map(|i| format!("w{i}"))).unwrap()
}

pub fn csr(n: usize, entries: &[(usize, usize, f64)]) -> CsrMatrix<f64> {
    let map: BTreeMap<(usize, usize), f64> = entries.iter().map(|&(i, j, v)| ((i, j), v)).collect();
    CsrMatrix::from_sorted_map(n, n, &map)
}

pub fn graph(n: usize, edges: &[(usize, usize, f64)]) -> LexicalGraph<f64> {
    LexicalGraph::from_edges(words(n), 1, edges.iter().copied()).unwrap()
}

pub fn embeddings(rows: &[Vec<f64>]) -> EmbeddingSet<f64> {
    let d = rows[0].len();
    let flat = rows.iter().flatten().copied().collect();
    EmbeddingSet::new(words(rows.len()), DenseMatrix::from_row_major(rows.len(), d, flat)).unwrap()
}

pub fn columns(m: &DenseMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.cols()).map(|j| m.column(j)).collect()
}
