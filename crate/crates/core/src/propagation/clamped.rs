use super::{graph_metadata, walk_metadata, SeedSet, WalkParams};
use crate::error::{Error, Result};
use crate::graph::LexicalGraph;
use crate::lexicon::{standardize, Lexicon};
use crate::scalar::Scalar;

/// Label propagation with seeds clamped to ±1: `y ← D⁻¹·E·y`, then reset
/// the seeds, until the max-norm change is below `tol`. Unseeded components
/// and isolated words stay at 0. Returns the unstandardized labels.
pub fn clamped_labels<T: Scalar>(
    graph: &LexicalGraph<T>,
    positive: &[usize],
    negative: &[usize],
    params: &WalkParams<T>,
) -> Result<Vec<T>> {
    params.validate()?;
    let n = graph.len();
    if positive.is_empty() || negative.is_empty() {
        return Err(Error::DegenerateSeeds("both seed sides must be non-empty".into()));
    }
    let mut clamp: Vec<Option<T>> = vec![None; n];
    for (side, value) in [(positive, T::one()), (negative, -T::one())] {
        for &s in side {
            if s >= n {
                return Err(Error::invalid(format!("seed index {s} out of range")));
            }
            if clamp[s].is_some_and(|v| v != value) {
                return Err(Error::DegenerateSeeds(format!("node {s} is seeded on both sides")));
            }
            clamp[s] = Some(value);
        }
    }
    let degrees = graph.degrees();
    let mut y: Vec<T> = clamp.iter().map(|c| c.unwrap_or_else(T::zero)).collect();
    let mut last = T::infinity();
    for _ in 0..params.max_iter {
        let next: Vec<T> = (0..n)
            .map(|u| {
                if let Some(v) = clamp[u] {
                    return v;
                }
                if degrees[u] <= T::zero() {
                    return T::zero();
                }
                let (cols, w) = graph.neighbors(u);
                cols.iter().zip(w).fold(T::zero(), |acc, (&v, &wv)| acc + wv * y[v]) / degrees[u]
            })
            .collect();
        last = next.iter().zip(&y).map(|(&a, &b)| (a - b).abs()).fold(T::zero(), T::max);
        y = next;
        if last < params.tol {
            return Ok(y);
        }
    }
    Err(Error::NotConverged { iterations: params.max_iter, residual: last.to_f64_lossy() })
}

/// Clamped label propagation, standardized over the vocabulary.
pub fn clamped_propagation<T: Scalar>(
    graph: &LexicalGraph<T>,
    seeds: &SeedSet,
    params: &WalkParams<T>,
) -> Result<Lexicon<T>> {
    let (pos, neg) = seeds.resolve(graph.vocab(), |i| !graph.is_isolated(i))?;
    let labels = clamped_labels(graph, &pos, &neg, params)?;
    let lex = Lexicon::new(graph.vocab().words().to_vec(), standardize(&labels))?;
    Ok(walk_metadata(graph_metadata(lex, "clamped", graph, seeds), params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Vocabulary;

    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> LexicalGraph<f64> {
        LexicalGraph::from_edges(
            Vocabulary::from_words((0..n).map(|i| format!("w{i}"))).unwrap(),
            1,
            edges.iter().copied(),
        )
        .unwrap()
    }

    fn params() -> WalkParams<f64> {
        WalkParams { beta: 0.5, tol: 1e-12, max_iter: 100_000 }
    }

    #[test]
    fn leaf_absorbs_its_seed() {
        // w2 hangs off the positive seed w0 only.
        let g = graph(3, &[(0, 1, 1.0), (0, 2, 0.7)]);
        let y = clamped_labels(&g, &[0], &[1], &params()).unwrap();
        assert!((y[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn path_midpoint_is_zero() {
        let g = graph(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
        let y = clamped_labels(&g, &[0], &[2], &params()).unwrap();
        assert!(y[1].abs() < 1e-12);
        assert_eq!((y[0], y[2]), (1.0, -1.0));
    }

    #[test]
    fn unseeded_component_stays_zero() {
        let g = graph(5, &[(0, 1, 1.0), (1, 2, 1.0), (3, 4, 1.0)]);
        let y = clamped_labels(&g, &[0], &[2], &params()).unwrap();
        assert_eq!((y[3], y[4]), (0.0, 0.0));
    }

    #[test]
    fn lexicon_is_standardized() {
        let g = graph(4, &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0)]);
        let seeds = SeedSet::new(["w0"], ["w3"]).unwrap();
        let lex = clamped_propagation(&g, &seeds, &params()).unwrap();
        let mean: f64 = lex.scores().iter().sum::<f64>() / 4.0;
        assert!(mean.abs() < 1e-12);
        assert_eq!(lex.meta("method"), Some("clamped"));
    }
}
