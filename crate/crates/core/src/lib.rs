//! Domain-specific sentiment lexicon induction.
//!
//! The pipeline runs corpus → vocabulary → co-occurrence counts → PPMI →
//! truncated-SVD embeddings → kNN lexical graph → seeded propagation →
//! lexicon, and [`evaluation`] scores lexicons against gold data.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64` and
//! `*32` aliases below name the concrete instantiations.

pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod evaluation;
mod format;
pub mod graph;
pub mod lexicon;
pub mod linalg;
pub mod propagation;
pub mod scalar;

pub use corpus::{build_vocabulary, count_cooccurrences, Corpus, SparseCountMatrix, Vocabulary};
pub use embeddings::{load_embeddings, ppmi, svd_embed, EmbeddingSet, PpmiMatrix, SvdParams};
pub use error::{Error, Result};
pub use graph::{build_knn_graph, LexicalGraph};
pub use lexicon::{Label, Lexicon};
pub use propagation::{bootstrap, sentprop_scores, BootstrapParams, SeedSet, WalkParams};
pub use scalar::Scalar;

pub type EmbeddingSet64 = EmbeddingSet<f64>;
pub type EmbeddingSet32 = EmbeddingSet<f32>;
pub type PpmiMatrix64 = PpmiMatrix<f64>;
pub type PpmiMatrix32 = PpmiMatrix<f32>;
pub type LexicalGraph64 = LexicalGraph<f64>;
pub type LexicalGraph32 = LexicalGraph<f32>;
pub type Lexicon64 = Lexicon<f64>;
pub type Lexicon32 = Lexicon<f32>;
pub type WalkParams64 = WalkParams<f64>;
pub type WalkParams32 = WalkParams<f32>;
