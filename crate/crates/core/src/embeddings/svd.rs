//! Truncated SVD by randomized subspace iteration.
//!
//! A Gaussian test block of width `d + oversampling` is pushed through
//! `power_iterations` rounds of `Q ← orth(M·orth(Mᵀ·Q))`. Iteration then
//! continues until every one of the leading `d` Ritz triplets satisfies
//! `‖M·v − σ·u‖ ≤ tolerance·σ₁`, or `max_iterations` is reached.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{jacobi_svd, orthonormalize_columns, CsrMatrix, DenseMatrix};
use crate::scalar::{norm, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdParams<T> {
    pub oversampling: usize,
    pub power_iterations: usize,
    pub max_iterations: usize,
    /// Relative residual bound; defaults to `Scalar::solver_tolerance()`.
    pub tolerance: Option<T>,
}

impl<T> Default for SvdParams<T> {
    fn default() -> Self {
        Self { oversampling: 10, power_iterations: 4, max_iterations: 500, tolerance: None }
    }
}

/// Rank-`d` factorization `M ≈ U·diag(σ)·Vᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSvd<T> {
    /// n × d, orthonormal columns.
    pub u: DenseMatrix<T>,
    pub singular_values: Vec<T>,
    /// n × d, orthonormal columns.
    pub v: DenseMatrix<T>,
    pub iterations: usize,
    /// Largest relative Ritz residual at exit.
    pub residual: T,
}

pub fn truncated_svd<T: Scalar>(
    m: &CsrMatrix<T>,
    d: usize,
    seed: u64,
    params: &SvdParams<T>,
) -> Result<TruncatedSvd<T>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::invalid("truncated_svd expects a square matrix"));
    }
    if d == 0 || d > n {
        return Err(Error::invalid(format!("rank {d} must lie in 1..={n}")));
    }
    if m.nnz() == 0 {
        return Err(Error::invalid("cannot factorize an empty matrix"));
    }
    let tol = params.tolerance.unwrap_or_else(T::solver_tolerance);
    let width = (d + params.oversampling).min(n);
    let mt = m.transpose();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gaussian = move || -> Vec<T> {
        (0..n)
            .map(|_| {
                let x: f64 = StandardNormal.sample(&mut rng);
                T::from_f64_lossy(x)
            })
            .collect()
    };

    let omega: Vec<Vec<T>> = (0..width).map(|_| gaussian()).collect();
    let mut q = m.mul_columns(&omega);
    orthonormalize_columns(&mut q, &mut gaussian);

    let mut iterations = 0;
    loop {
        // Rows of B = Qᵀ·M, stored as columns of Bᵀ = Mᵀ·Q.
        let mut bt = mt.mul_columns(&q);
        if iterations >= params.power_iterations {
            let (sigma, w, v) = jacobi_svd(bt.clone());
            let u = combine(&q, &w, d);
            let residual = ritz_residual(m, &u, &sigma, &v, d);
            if residual <= tol {
                return Ok(finish(n, u, sigma, v, d, iterations, residual));
            }
            if iterations >= params.max_iterations {
                return Err(Error::NotConverged { iterations, residual: residual.to_f64_lossy() });
            }
        }
        orthonormalize_columns(&mut bt, &mut gaussian);
        q = m.mul_columns(&bt);
        orthonormalize_columns(&mut q, &mut gaussian);
        iterations += 1;
    }
}

/// Left singular vectors of M: `u_k = Q·w_k` for the leading `d` pairs.
fn combine<T: Scalar>(q: &[Vec<T>], w: &[Vec<T>], d: usize) -> Vec<Vec<T>> {
    let n = q[0].len();
    w.iter()
        .take(d)
        .map(|wk| {
            let mut u = vec![T::zero(); n];
            for (qj, &c) in q.iter().zip(wk) {
                for (ui, &qi) in u.iter_mut().zip(qj) {
                    *ui += c * qi;
                }
            }
            u
        })
        .collect()
}

fn ritz_residual<T: Scalar>(m: &CsrMatrix<T>, u: &[Vec<T>], sigma: &[T], v: &[Vec<T>], d: usize) -> T {
    let scale = sigma[0];
    if scale <= T::zero() {
        return T::zero();
    }
    (0..d)
        .map(|k| {
            let mv = m.mul_vec(&v[k]);
            let r: Vec<T> = mv.iter().zip(&u[k]).map(|(&a, &b)| a - sigma[k] * b).collect();
            norm(&r) / scale
        })
        .fold(T::zero(), |a, b| if b > a { b } else { a })
}

fn finish<T: Scalar>(
    n: usize,
    mut u: Vec<Vec<T>>,
    sigma: Vec<T>,
    mut v: Vec<Vec<T>>,
    d: usize,
    iterations: usize,
    residual: T,
) -> TruncatedSvd<T> {
    v.truncate(d);
    // Each singular pair is flipped so the largest-magnitude entry of u is positive.
    for (uk, vk) in u.iter_mut().zip(v.iter_mut()) {
        let mut best = 0;
        for (i, x) in uk.iter().enumerate() {
            if x.abs() > uk[best].abs() {
                best = i;
            }
        }
        if uk[best] < T::zero() {
            uk.iter_mut().for_each(|x| *x = -*x);
            vk.iter_mut().for_each(|x| *x = -*x);
        }
    }
    TruncatedSvd {
        u: DenseMatrix::from_columns(n, &u),
        singular_values: sigma.into_iter().take(d).collect(),
        v: DenseMatrix::from_columns(n, &v),
        iterations,
        residual,
    }
}
