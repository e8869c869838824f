use log::warn;
use rayon::prelude::*;

use super::{graph_metadata, walk_metadata, SeedSet, WalkParams};
use crate::error::{Error, Result};
use crate::graph::LexicalGraph;
use crate::lexicon::{standardize, Lexicon};
use crate::linalg::CsrMatrix;
use crate::scalar::Scalar;

/// `D^(-1/2)·E·D^(-1/2)` with `D` the weighted degrees of `E`. Isolated
/// nodes get empty rows.
#[derive(Debug, Clone)]
pub struct SymmetricTransition<T> {
    matrix: CsrMatrix<T>,
}

impl<T: Scalar> SymmetricTransition<T> {
    pub fn new(graph: &LexicalGraph<T>) -> Self {
        let inv_sqrt: Vec<T> =
            graph.degrees().into_iter().map(|d| if d > T::zero() { d.sqrt().recip() } else { T::zero() }).collect();
        let n = graph.len();
        let entries = graph.adjacency().iter().map(|(i, j, w)| ((i, j), w * inv_sqrt[i] * inv_sqrt[j]));
        Self { matrix: CsrMatrix::from_sorted_entries(n, n, entries) }
    }

    pub fn matrix(&self) -> &CsrMatrix<T> {
        &self.matrix
    }

    /// One step `β·T·p + (1−β)·s`. Each row is reduced sequentially, so the
    /// result does not depend on the thread count.
    fn step(&self, p: &[T], restart: &[T], beta: T) -> Vec<T> {
        let keep = T::one() - beta;
        (0..self.matrix.nrows())
            .into_par_iter()
            .map(|i| {
                let (cols, vals) = self.matrix.row(i);
                let tp = cols.iter().zip(vals).fold(T::zero(), |acc, (&j, &v)| acc + v * p[j]);
                beta * tp + keep * restart[i]
            })
            .collect()
    }
}

/// Fixed point of the walk plus its convergence history.
#[derive(Debug, Clone)]
pub struct WalkTrace<T> {
    pub scores: Vec<T>,
    pub iterations: usize,
    /// Max-norm change per iteration.
    pub residuals: Vec<T>,
}

fn usable_seeds<T: Scalar>(graph: &LexicalGraph<T>, seeds: &[usize]) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(seeds.len());
    for &s in seeds {
        if s >= graph.len() {
            return Err(Error::invalid(format!("seed index {s} out of range")));
        }
        if graph.is_isolated(s) {
            warn!("seed {:?} is isolated in the graph; dropped", graph.vocab().word(s));
            continue;
        }
        if !out.contains(&s) {
            out.push(s);
        }
    }
    if out.is_empty() {
        return Err(Error::DegenerateSeeds("no resolvable seeds".into()));
    }
    Ok(out)
}

fn reachable<T: Scalar>(matrix: &CsrMatrix<T>, seeds: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; matrix.nrows()];
    let mut stack = seeds.to_vec();
    for &s in seeds {
        seen[s] = true;
    }
    while let Some(u) = stack.pop() {
        for &v in matrix.row(u).0 {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

fn walk<T: Scalar>(
    transition: &SymmetricTransition<T>,
    seeds: &[usize],
    params: &WalkParams<T>,
) -> Result<WalkTrace<T>> {
    params.validate()?;
    let n = transition.matrix.nrows();
    let mut restart = vec![T::zero(); n];
    let mass = T::from_usize_lossy(seeds.len()).recip();
    for &s in seeds {
        restart[s] = mass;
    }
    let mut p = vec![T::from_usize_lossy(n).recip(); n];
    let mut residuals = Vec::new();
    for it in 1..=params.max_iter {
        let next = transition.step(&p, &restart, params.beta);
        let delta = next.iter().zip(&p).map(|(&a, &b)| (a - b).abs()).fold(T::zero(), T::max);
        p = next;
        residuals.push(delta);
        if delta < params.tol {
            // Components without a seed decay geometrically towards 0; their
            // fixed-point value is exactly 0.
            let reached = reachable(&transition.matrix, seeds);
            p.iter_mut().zip(&reached).filter(|(_, &r)| !r).for_each(|(v, _)| *v = T::zero());
            return Ok(WalkTrace { scores: p, iterations: it, residuals });
        }
    }
    Err(Error::NotConverged {
        iterations: params.max_iter,
        residual: residuals.last().map_or(f64::NAN, |r| r.to_f64_lossy()),
    })
}

/// Seeded random walk with restart from seed indices, with its history.
pub fn random_walk_trace<T: Scalar>(
    graph: &LexicalGraph<T>,
    seeds: &[usize],
    params: &WalkParams<T>,
) -> Result<WalkTrace<T>> {
    let seeds = usable_seeds(graph, seeds)?;
    walk(&SymmetricTransition::new(graph), &seeds, params)
}

pub fn random_walk_indices<T: Scalar>(
    graph: &LexicalGraph<T>,
    seeds: &[usize],
    params: &WalkParams<T>,
) -> Result<Vec<T>> {
    random_walk_trace(graph, seeds, params).map(|t| t.scores)
}

/// Iterates `p ← β·T·p + (1−β)·s` from the uniform vector until the
/// max-norm change falls below `tol`. `s` spreads unit mass over the seeds
/// that are in the vocabulary and not isolated; isolated words score 0.
pub fn random_walk<T: Scalar, S: AsRef<str>>(
    graph: &LexicalGraph<T>,
    seeds: &[S],
    params: &WalkParams<T>,
) -> Result<Vec<T>> {
    let mut idx = Vec::with_capacity(seeds.len());
    for s in seeds {
        match graph.vocab().get(s.as_ref()) {
            Some(i) => idx.push(i),
            None => warn!("seed {:?} is not in the vocabulary; dropped", s.as_ref()),
        }
    }
    if idx.is_empty() {
        return Err(Error::DegenerateSeeds("no resolvable seeds".into()));
    }
    random_walk_indices(graph, &idx, params)
}

/// `p⁺ / (p⁺ + p⁻)` per word; words neither walk reaches get 0.5 and are
/// flagged.
pub fn combine_polarities<T: Scalar>(positive: &[T], negative: &[T]) -> (Vec<T>, Vec<bool>) {
    let half = T::from_f64_lossy(0.5);
    positive
        .iter()
        .zip(negative)
        .map(|(&p, &n)| {
            let total = p + n;
            if total > T::zero() {
                (p / total, false)
            } else {
                (half, true)
            }
        })
        .unzip()
}

/// Raw (unstandardized) positive-polarity scores and unreachable flags.
pub fn sentprop_raw<T: Scalar>(
    graph: &LexicalGraph<T>,
    positive: &[usize],
    negative: &[usize],
    params: &WalkParams<T>,
) -> Result<(Vec<T>, Vec<bool>)> {
    let positive = usable_seeds(graph, positive)?;
    let negative = usable_seeds(graph, negative)?;
    let transition = SymmetricTransition::new(graph);
    let pos = walk(&transition, &positive, params)?;
    let neg = walk(&transition, &negative, params)?;
    Ok(combine_polarities(&pos.scores, &neg.scores))
}

/// Runs the walk from each seed side, combines the two visit scores into a
/// positive-polarity score and standardizes over the vocabulary.
pub fn sentprop_scores<T: Scalar>(
    graph: &LexicalGraph<T>,
    seeds: &SeedSet,
    params: &WalkParams<T>,
) -> Result<Lexicon<T>> {
    let (pos, neg) = seeds.resolve(graph.vocab(), |i| !graph.is_isolated(i))?;
    let (raw, unreachable) = sentprop_raw(graph, &pos, &neg, params)?;
    let words = graph.vocab().words().to_vec();
    let unreachable_words = words.iter().zip(&unreachable).filter(|(_, &u)| u).map(|(w, _)| w.clone()).collect();
    let lex = Lexicon::new(words, standardize(&raw))?.with_unreachable(unreachable_words);
    Ok(walk_metadata(graph_metadata(lex, "sentprop", graph, seeds), params))
}
