//! Seed-subset bootstrap. Each run propagates from random equally sized
//! subsets of the two seed sides; the final score is the mean of the runs'
//! standardized scores and the confidence is their sample standard deviation.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::walk::sentprop_raw;
use super::{graph_metadata, walk_metadata, SeedSet, WalkParams};
use crate::error::{Error, Result};
use crate::graph::LexicalGraph;
use crate::lexicon::{standardize, Lexicon};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapParams {
    pub runs: usize,
    pub subset_size: usize,
    pub rng_seed: u64,
}

impl Default for BootstrapParams {
    fn default() -> Self {
        Self { runs: 50, subset_size: 7, rng_seed: 0 }
    }
}

/// Draws `runs` pairs of seed subsets without replacement. Run `r` uses its
/// own ChaCha stream `r` under `rng_seed`, so subsets depend only on the run
/// index.
pub fn sample_subsets(seeds: &SeedSet, runs: usize, subset_size: usize, rng_seed: u64) -> Result<Vec<SeedSet>> {
    let (pos, neg) = (seeds.positive(), seeds.negative());
    if subset_size == 0 || subset_size > pos.len().min(neg.len()) {
        return Err(Error::invalid(format!(
            "subset_size {subset_size} must lie in 1..={} (smaller seed side)",
            pos.len().min(neg.len())
        )));
    }
    (0..runs)
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            rng.set_stream(r as u64);
            let p: Vec<&str> = sample(&mut rng, pos.len(), subset_size).into_iter().map(|i| pos[i].as_str()).collect();
            let n: Vec<&str> = sample(&mut rng, neg.len(), subset_size).into_iter().map(|i| neg[i].as_str()).collect();
            SeedSet::new(p, n)
        })
        .collect()
}

/// Bootstrap over explicitly given seed subsets.
pub fn bootstrap_with_subsets<T: Scalar>(
    graph: &LexicalGraph<T>,
    subsets: &[SeedSet],
    params: &WalkParams<T>,
) -> Result<Lexicon<T>> {
    if subsets.len() < 2 {
        return Err(Error::invalid("bootstrap needs at least 2 runs"));
    }
    let runs: Vec<(Vec<T>, Vec<bool>)> = subsets
        .par_iter()
        .map(|s| {
            let (pos, neg) = s.resolve(graph.vocab(), |i| !graph.is_isolated(i))?;
            let (raw, unreachable) = sentprop_raw(graph, &pos, &neg, params)?;
            Ok((standardize(&raw), unreachable))
        })
        .collect::<Result<_>>()?;

    // Welford update in run order, whatever order the runs finished in;
    // identical runs give their common value and a std of exactly 0.
    let n = graph.len();
    let mut mean = vec![T::zero(); n];
    let mut m2 = vec![T::zero(); n];
    for (k, (scores, _)) in runs.iter().enumerate() {
        let count = T::from_usize_lossy(k + 1);
        for ((m, q), &s) in mean.iter_mut().zip(m2.iter_mut()).zip(scores) {
            let delta = s - *m;
            *m += delta / count;
            *q += delta * (s - *m);
        }
    }
    let b = T::from_usize_lossy(runs.len());
    let std: Vec<T> = m2.into_iter().map(|q| (q / (b - T::one())).sqrt()).collect();

    let words = graph.vocab().words().to_vec();
    let unreachable = (0..n).filter(|&i| runs.iter().all(|(_, u)| u[i])).map(|i| words[i].clone()).collect();
    Ok(Lexicon::new(words, mean)?.with_std(std)?.with_unreachable(unreachable))
}

/// Bootstrapped SentProp: `runs` propagations from sampled seed subsets.
pub fn bootstrap<T: Scalar>(
    graph: &LexicalGraph<T>,
    seeds: &SeedSet,
    params: &WalkParams<T>,
    boot: &BootstrapParams,
) -> Result<Lexicon<T>> {
    if boot.runs < 2 {
        return Err(Error::invalid("bootstrap needs at least 2 runs"));
    }
    // Sample among seeds that can actually start a walk.
    let (pos, neg) = seeds.resolve(graph.vocab(), |i| !graph.is_isolated(i))?;
    let vocab = graph.vocab();
    let usable = SeedSet::new(pos.iter().map(|&i| vocab.word(i)), neg.iter().map(|&i| vocab.word(i)))?;
    let subsets = sample_subsets(&usable, boot.runs, boot.subset_size, boot.rng_seed)?;
    let lex = bootstrap_with_subsets(graph, &subsets, params)?
        .with_meta("bootstrap_runs", boot.runs)
        .with_meta("subset_size", boot.subset_size)
        .with_meta("rng_seed", boot.rng_seed);
    Ok(walk_metadata(graph_metadata(lex, "sentprop", graph, seeds), params))
}
