//! Sentiment propagation from seed words over a lexical graph, plus the
//! clamped, best-path and PMI scorers used as variants and baselines.

mod bestpath;
mod bootstrap;
mod clamped;
mod pmi;
mod seeds;
mod walk;

pub use bestpath::{bestpath_on_graph, bestpath_scores, cooccurrence_graph, max_product_paths};
pub use bootstrap::{bootstrap, bootstrap_with_subsets, sample_subsets, BootstrapParams};
pub use clamped::{clamped_labels, clamped_propagation};
pub use pmi::{pmi_baseline, pmi_raw_scores, PmiBaselineParams};
pub use seeds::SeedSet;
pub use walk::{
    combine_polarities, random_walk, random_walk_indices, random_walk_trace, sentprop_raw, sentprop_scores,
    SymmetricTransition, WalkTrace,
};

use crate::error::{Error, Result};
use crate::graph::LexicalGraph;
use crate::lexicon::Lexicon;
use crate::scalar::Scalar;

/// Parameters of the seeded random walk and of the clamped iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkParams<T> {
    /// Weight on neighbour propagation versus restart at the seeds, in (0, 1).
    pub beta: T,
    /// Stop once the max-norm change between iterates drops below this.
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Scalar> Default for WalkParams<T> {
    fn default() -> Self {
        Self { beta: T::from_f64_lossy(0.9), tol: T::from_f64_lossy(1e-6), max_iter: 500 }
    }
}

impl<T: Scalar> WalkParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > T::zero() && self.beta < T::one()) {
            return Err(Error::invalid(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        if !(self.tol > T::zero()) {
            return Err(Error::invalid("tol must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be positive"));
        }
        Ok(())
    }
}

fn graph_metadata<T: Scalar>(lex: Lexicon<T>, method: &str, graph: &LexicalGraph<T>, seeds: &SeedSet) -> Lexicon<T> {
    lex.with_meta("method", method).with_meta("k", graph.k()).with_meta("seed_checksum", seeds.checksum())
}

fn walk_metadata<T: Scalar>(lex: Lexicon<T>, params: &WalkParams<T>) -> Lexicon<T> {
    lex.with_meta("beta", params.beta).with_meta("tol", params.tol).with_meta("max_iter", params.max_iter)
}
