//! Small dense and sparse containers plus the two factorization kernels the
//! SVD embedder needs (column orthonormalization and one-sided Jacobi SVD).

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::scalar::{dot, norm, Scalar};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major buffer has wrong length");
        Self { rows, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Self {
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &v) in c.iter().enumerate() {
                m.data[i * cols + j] = v;
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Keeps only the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Self::from_row_major(rows.len(), self.cols, data)
    }
}

/// Compressed sparse row matrix with sorted column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: Copy + PartialEq + Default> CsrMatrix<T> {
    pub fn empty(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), values: Vec::new() }
    }

    /// Builds from an ordered `(row, col) -> value` map. Entries equal to
    /// `T::default()` (zero) are dropped.
    pub fn from_sorted_map(nrows: usize, ncols: usize, map: &BTreeMap<(usize, usize), T>) -> Self {
        Self::from_sorted_entries(nrows, ncols, map.iter().map(|(&k, &v)| (k, v)))
    }

    /// Builds from entries sorted by `(row, col)` without duplicates.
    pub fn from_sorted_entries(
        nrows: usize,
        ncols: usize,
        entries: impl IntoIterator<Item = ((usize, usize), T)>,
    ) -> Self {
        let zero = T::default();
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for ((i, j), v) in entries {
            assert!(i < nrows && j < ncols, "entry ({i},{j}) out of bounds");
            if let Some(prev) = last {
                assert!((i, j) > prev, "entries must be strictly sorted");
            }
            last = Some((i, j));
            if v == zero {
                continue;
            }
            indptr[i + 1] += 1;
            indices.push(j);
            values.push(v);
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        Self { nrows, ncols, indptr, indices, values }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).ok().map(|p| vals[p])
    }

    /// Iterates stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &j in &self.indices {
            counts[j + 1] += 1;
        }
        for c in 0..self.ncols {
            counts[c + 1] += counts[c];
        }
        let indptr = counts.clone();
        let mut next = counts;
        let mut indices = vec![0usize; self.nnz()];
        let mut values = vec![T::default(); self.nnz()];
        for (i, j, v) in self.iter() {
            let p = next[j];
            indices[p] = i;
            values[p] = v;
            next[j] += 1;
        }
        Self { nrows: self.ncols, ncols: self.nrows, indptr, indices, values }
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols && self.iter().all(|(i, j, v)| self.get(j, i) == Some(v))
    }
}

impl<T: Scalar> CsrMatrix<T> {
    /// Computes `A·x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .into_par_iter()
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).fold(T::zero(), |acc, (&j, &v)| acc + v * x[j])
            })
            .collect()
    }

    /// Multiplies by each column of a tall dense block.
    pub fn mul_columns(&self, columns: &[Vec<T>]) -> Vec<Vec<T>> {
        columns.iter().map(|c| self.mul_vec(c)).collect()
    }

    pub fn frobenius_norm(&self) -> T {
        self.values.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn row_norm(&self, i: usize) -> T {
        norm(self.row(i).1)
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut m = DenseMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.iter() {
            m.set(i, j, v);
        }
        m
    }
}

/// Orthonormalizes `columns` in place by modified Gram-Schmidt with one
/// re-orthogonalization pass. Columns that collapse numerically are replaced
/// by fresh vectors from `fresh`, orthogonalized against their predecessors.
pub fn orthonormalize_columns<T: Scalar>(columns: &mut [Vec<T>], mut fresh: impl FnMut() -> Vec<T>) {
    let collapse = T::epsilon().sqrt();
    for j in 0..columns.len() {
        let mut attempts = 0;
        loop {
            let before = norm(&columns[j]);
            let (done, rest) = columns.split_at_mut(j);
            let col = &mut rest[0];
            for _ in 0..2 {
                for q in done.iter() {
                    let r = dot(q, col);
                    for (c, &qv) in col.iter_mut().zip(q) {
                        *c -= r * qv;
                    }
                }
            }
            let after = norm(col);
            if after > T::zero() && after > collapse * before && after.is_finite() {
                for c in col.iter_mut() {
                    *c /= after;
                }
                break;
            }
            attempts += 1;
            assert!(attempts < 64, "could not complete an orthonormal basis");
            *col = fresh();
        }
    }
}

/// Thin SVD of a short, wide matrix `B` (l × n, l ≤ n) given as its
/// transpose's columns: `bt_columns[k]` is row `k` of `B`, length `n`.
///
/// Returns `(sigma, w, v)` with `B = W·diag(σ)·Vᵀ`, σ descending, `w` the
/// l left-singular vectors (each of length l) and `v` the l right-singular
/// vectors (each of length n). Uses one-sided Jacobi rotations on `Bᵀ`.
pub fn jacobi_svd<T: Scalar>(bt_columns: Vec<Vec<T>>) -> (Vec<T>, Vec<Vec<T>>, Vec<Vec<T>>) {
    let l = bt_columns.len();
    let mut c = bt_columns;
    let mut w: Vec<Vec<T>> = (0..l)
        .map(|k| {
            let mut e = vec![T::zero(); l];
            e[k] = T::one();
            e
        })
        .collect();
    let eps = T::epsilon();
    let two = T::from_f64_lossy(2.0);
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..l {
            for q in (p + 1)..l {
                let alpha = dot(&c[p], &c[p]);
                let beta = dot(&c[q], &c[q]);
                let gamma = dot(&c[p], &c[q]);
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (two * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = cs * t;
                rotate(&mut c, p, q, cs, sn);
                rotate(&mut w, p, q, cs, sn);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigma: Vec<T> = c.iter().map(|col| norm(col)).collect();
    let mut order: Vec<usize> = (0..l).collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap().then(a.cmp(&b)));
    let v: Vec<Vec<T>> = order
        .iter()
        .map(|&k| {
            let s = sigma[k];
            if s > T::zero() {
                c[k].iter().map(|&x| x / s).collect()
            } else {
                vec![T::zero(); c[k].len()]
            }
        })
        .collect();
    let w_sorted: Vec<Vec<T>> = order.iter().map(|&k| w[k].clone()).collect();
    sigma = order.iter().map(|&k| sigma[k]).collect();
    (sigma, w_sorted, v)
}

fn rotate<T: Scalar>(cols: &mut [Vec<T>], p: usize, q: usize, cs: T, sn: T) {
    let (head, tail) = cols.split_at_mut(q);
    let a = &mut head[p];
    let b = &mut tail[0];
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = cs * xp - sn * yq;
        *y = sn * xp + cs * yq;
    }
}
