use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::corpus::SparseCountMatrix;
use crate::error::{Error, Result};
use crate::format::{parse_field, read_triples, write_triples};
use crate::linalg::CsrMatrix;
use crate::scalar::Scalar;

pub const DEFAULT_SMOOTHING: f64 = 0.75;

/// Marginal probabilities of a count matrix, with the context (column)
/// distribution raised to the smoothing exponent `c` and renormalized.
#[derive(Debug, Clone)]
pub struct PmiModel<T> {
    pub total: T,
    pub row_prob: Vec<T>,
    pub context_prob: Vec<T>,
}

impl<T: Scalar> PmiModel<T> {
    pub fn new(counts: &SparseCountMatrix, smoothing: T) -> Result<Self> {
        check_smoothing(smoothing)?;
        let m = counts.matrix();
        let n = counts.dim();
        let mut row_sum = vec![T::zero(); n];
        let mut col_sum = vec![T::zero(); n];
        for (i, j, v) in m.iter() {
            let v = T::from_f64_lossy(v);
            row_sum[i] += v;
            col_sum[j] += v;
        }
        let total: T = row_sum.iter().copied().sum();
        if total <= T::zero() {
            return Err(Error::NoCooccurrenceMass);
        }
        let smoothed: Vec<T> = col_sum.iter().map(|&s| s.powf(smoothing)).collect();
        let smoothed_total: T = smoothed.iter().copied().sum();
        Ok(Self {
            total,
            row_prob: row_sum.iter().map(|&r| r / total).collect(),
            context_prob: smoothed.iter().map(|&s| s / smoothed_total).collect(),
        })
    }

    /// Unclamped smoothed PMI for a pair observed `count` times.
    #[inline]
    pub fn pmi(&self, i: usize, j: usize, count: T) -> T {
        (count / self.total / (self.row_prob[i] * self.context_prob[j])).ln()
    }
}

fn check_smoothing<T: Scalar>(c: T) -> Result<()> {
    if !(c > T::zero() && c <= T::one()) {
        return Err(Error::invalid(format!("smoothing exponent must lie in (0, 1], got {c}")));
    }
    Ok(())
}

/// Positive PMI matrix. Only strictly positive entries are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct PpmiMatrix<T> {
    matrix: CsrMatrix<T>,
    smoothing: T,
}

impl<T: Scalar> PpmiMatrix<T> {
    pub fn from_matrix(matrix: CsrMatrix<T>, smoothing: T) -> Result<Self> {
        check_smoothing(smoothing)?;
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::invalid("PPMI matrix must be square"));
        }
        if matrix.iter().any(|(_, _, v)| !(v > T::zero() && v.is_finite())) {
            return Err(Error::invalid("PPMI entries must be finite and positive"));
        }
        Ok(Self { matrix, smoothing })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn smoothing(&self) -> T {
        self.smoothing
    }

    pub fn matrix(&self) -> &CsrMatrix<T> {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.matrix.get(i, j).unwrap_or_else(T::zero)
    }

    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }

    /// Writes the `PPMI` triple format. All stored entries are written since
    /// the matrix is asymmetric when the smoothing exponent is below one.
    pub fn write<W: Write>(&self, out: W) -> Result<()> {
        let entries: Vec<_> = self.matrix.iter().collect();
        write_triples(out, "PPMI", self.dim(), &self.smoothing.to_string(), &entries)
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let (header, entries) = read_triples::<_, T>(reader, "PPMI")?;
        let smoothing = parse_field::<T>(&header.extra, 1, "smoothing")?;
        let mut map = BTreeMap::new();
        for (i, j, v) in entries {
            if map.insert((i, j), v).is_some() {
                return Err(Error::invalid(format!("duplicate PPMI entry ({i},{j})")));
            }
        }
        Self::from_matrix(CsrMatrix::from_sorted_map(header.dim, header.dim, &map), smoothing)
    }
}

/// `max{ln[p̂(i,j) / (p̂(i)·p̂_c(j))], 0}` over the stored count pairs, with
/// context-distribution smoothing applied to the second argument only.
pub fn ppmi<T: Scalar>(counts: &SparseCountMatrix, smoothing: T) -> Result<PpmiMatrix<T>> {
    let model = PmiModel::new(counts, smoothing)?;
    let n = counts.dim();
    let entries = counts.matrix().iter().filter_map(|(i, j, v)| {
        let pmi = model.pmi(i, j, T::from_f64_lossy(v));
        (pmi > T::zero()).then_some(((i, j), pmi))
    });
    Ok(PpmiMatrix { matrix: CsrMatrix::from_sorted_entries(n, n, entries), smoothing })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_counts_give_empty_ppmi() {
        let counts = SparseCountMatrix::from_upper_entries(2, 1, [(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0)]).unwrap();
        let p = ppmi::<f64>(&counts, 1.0).unwrap();
        assert_eq!(p.nnz(), 0);
    }

    #[test]
    fn off_diagonal_pair_gives_log_two() {
        let counts = SparseCountMatrix::from_upper_entries(2, 1, [(0, 1, 2.0)]).unwrap();
        let p = ppmi::<f64>(&counts, 1.0).unwrap();
        assert!((p.get(0, 1) - 2f64.ln()).abs() < 1e-15);
        assert!((p.get(1, 0) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(p.nnz(), 2);
    }

    #[test]
    fn empty_counts_rejected() {
        let counts = SparseCountMatrix::from_upper_entries(3, 1, []).unwrap();
        assert!(matches!(ppmi::<f64>(&counts, 0.75), Err(Error::NoCooccurrenceMass)));
    }

    #[test]
    fn smoothing_range_checked() {
        let counts = SparseCountMatrix::from_upper_entries(2, 1, [(0, 1, 2.0)]).unwrap();
        assert!(ppmi::<f64>(&counts, 0.0).is_err());
        assert!(ppmi::<f64>(&counts, 1.5).is_err());
    }

    #[test]
    fn smoothing_breaks_symmetry() {
        let counts = SparseCountMatrix::from_upper_entries(4, 1, [(0, 0, 2.0), (0, 1, 10.0), (2, 3, 3.0)]).unwrap();
        let sym = ppmi::<f64>(&counts, 1.0).unwrap();
        assert!(sym.matrix().is_symmetric());
        let smoothed = ppmi::<f64>(&counts, 0.75).unwrap();
        assert!(!smoothed.matrix().is_symmetric());
        assert!(smoothed.matrix().iter().all(|(_, _, v)| v > 0.0));
    }

    #[test]
    fn ppmi_file_round_trip() {
        let counts = SparseCountMatrix::from_upper_entries(4, 1, [(0, 0, 2.0), (0, 1, 10.0), (2, 3, 3.0)]).unwrap();
        let p = ppmi::<f64>(&counts, 0.75).unwrap();
        let mut buf = Vec::new();
        p.write(&mut buf).unwrap();
        assert!(buf.starts_with(b"PPMI 4 "));
        assert_eq!(PpmiMatrix::<f64>::read(buf.as_slice()).unwrap(), p);
    }
}
