use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

use super::vector::check_len;
use super::{DenseMatrix, DenseVector};
use crate::{Error, Result};

/// Complex sparse matrix in canonical compressed-row form.
///
/// Column indices are strictly increasing within each row, so two matrices
/// built from the same entries compare equal bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets<I>(nrows: usize, ncols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut entries: Vec<(usize, usize, Complex64)> = Vec::new();
        for (row, col, z) in triplets {
            if row >= nrows || col >= ncols {
                return Err(Error::IndexOutOfRange {
                    row,
                    col,
                    nrows,
                    ncols,
                });
            }
            if !z.is_finite() {
                return Err(Error::NonFinite {
                    index: row * ncols + col,
                });
            }
            entries.push((row, col, z));
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, z) in entries {
            if last == Some((r, c)) {
                *values.last_mut().expect("duplicate follows an entry") += z;
            } else {
                col_idx.push(c);
                values.push(z);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Sparse copy of a dense matrix, dropping entries with `|z| <= drop_tol`.
    pub fn from_dense(m: &DenseMatrix, drop_tol: f64) -> Self {
        let mut row_ptr = Vec::with_capacity(m.nrows() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                if z.norm() > drop_tol {
                    col_idx.push(j);
                    values.push(z);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            nrows: m.nrows(),
            ncols: m.ncols(),
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Assembles a matrix row by row. Each row must list strictly increasing columns.
    pub(crate) fn from_sorted_rows(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<Complex64>,
    ) -> Self {
        debug_assert_eq!(row_ptr.len(), nrows + 1);
        debug_assert!((0..nrows).all(|i| {
            col_idx[row_ptr[i]..row_ptr[i + 1]]
                .windows(2)
                .all(|w| w[0] < w[1])
        }));
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    /// Number of stored entries (including explicit zeros).
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[Complex64]) {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn max_row_nnz(&self) -> usize {
        (0..self.nrows).map(|i| self.row_nnz(i)).max().unwrap_or(0)
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => Complex64::zero(),
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &z)| (i, j, z))
        })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.nrows, self.ncols);
        for (i, j, z) in self.triplets() {
            m[(i, j)] = z;
        }
        m
    }

    /// Exact product `A x`.
    pub fn spmv(&self, x: &[Complex64]) -> Result<DenseVector> {
        check_len("spmv", self.ncols, x.len())?;
        let mut out = vec![Complex64::zero(); self.nrows];
        self.mul_vec_into(x, &mut out, &mut 0);
        Ok(out.into())
    }

    /// `out = A x`, adding one multiplication per stored entry to `work`.
    pub(crate) fn mul_vec_into(&self, x: &[Complex64], out: &mut [Complex64], work: &mut u64) {
        for (i, o) in out.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let mut acc = Complex64::zero();
            for (&j, &a) in cols.iter().zip(vals) {
                acc += a * x[j];
            }
            *o = acc;
        }
        *work += self.nnz() as u64;
    }

    /// Exact sparse product `A B`, keeping every computed entry.
    pub fn spmm(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.spmm_with_drop(other, 0.0)
    }

    /// Sparse product dropping computed entries with `|z| < drop_tol`.
    pub fn spmm_with_drop(&self, other: &SparseMatrix, drop_tol: f64) -> Result<SparseMatrix> {
        check_len("spmm", self.ncols, other.nrows)?;
        let rows: Vec<usize> = (0..self.nrows).collect();
        let cols: Vec<Option<usize>> = (0..other.ncols).map(Some).collect();
        let mut work = 0;
        let mut m = restricted_product(self, other, &rows, &cols, other.ncols, &mut work);
        if drop_tol > 0.0 {
            m.retain(|z| z.norm() >= drop_tol);
        }
        Ok(m)
    }

    /// `(i, j, z) ↦ (j, i, conj z)`.
    pub fn conj_transpose(&self) -> SparseMatrix {
        self.transpose_with(|z| z.conj())
    }

    pub fn transpose(&self) -> SparseMatrix {
        self.transpose_with(|z| z)
    }

    fn transpose_with(&self, f: impl Fn(Complex64) -> Complex64) -> SparseMatrix {
        let mut counts = vec![0usize; self.ncols + 1];
        for &j in &self.col_idx {
            counts[j + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![Complex64::zero(); self.nnz()];
        // rows are visited in increasing order, so each output row stays sorted
        for (i, j, z) in self.triplets() {
            let slot = next[j];
            col_idx[slot] = i;
            values[slot] = f(z);
            next[j] += 1;
        }
        SparseMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn scale(&self, alpha: Complex64) -> SparseMatrix {
        self.map_values(|z| z * alpha)
    }

    pub fn map_values(&self, f: impl Fn(Complex64) -> Complex64) -> SparseMatrix {
        SparseMatrix {
            values: self.values.iter().map(|&z| f(z)).collect(),
            ..self.clone()
        }
    }

    /// Applies `f(i, j, z)` to every stored entry.
    pub(crate) fn map_indexed(
        &self,
        f: impl Fn(usize, usize, Complex64) -> Complex64,
    ) -> SparseMatrix {
        let mut out = self.clone();
        for i in 0..self.nrows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out.values[k] = f(i, self.col_idx[k], self.values[k]);
            }
        }
        out
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.combine(other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.combine(other, Complex64::new(-1.0, 0.0))
    }

    fn combine(&self, other: &SparseMatrix, beta: Complex64) -> Result<SparseMatrix> {
        check_len("add (rows)", self.nrows, other.nrows)?;
        check_len("add (cols)", self.ncols, other.ncols)?;
        SparseMatrix::from_triplets(
            self.nrows,
            self.ncols,
            self.triplets()
                .chain(other.triplets().map(|(i, j, z)| (i, j, beta * z))),
        )
    }

    /// Removes stored entries with `|z| < drop_tol`, and exact zeros.
    pub fn canonicalize(&self, drop_tol: f64) -> SparseMatrix {
        let mut m = self.clone();
        m.retain(|z| !z.is_zero() && z.norm() >= drop_tol);
        m
    }

    fn retain(&mut self, keep: impl Fn(Complex64) -> bool) {
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        let mut col_idx = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        row_ptr.push(0);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &z) in cols.iter().zip(vals) {
                if keep(z) {
                    col_idx.push(j);
                    values.push(z);
                }
            }
            row_ptr.push(col_idx.len());
        }
        self.row_ptr = row_ptr;
        self.col_idx = col_idx;
        self.values = values;
    }

    pub fn frobenius_norm(&self) -> f64 {
        super::vector::norm_l2(&self.values)
    }

    pub fn max_abs(&self) -> f64 {
        super::vector::norm_linf(&self.values)
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i))
            .collect()
    }

    /// True when every off-diagonal entry has magnitude below `tol`.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.triplets().all(|(i, j, z)| i == j || z.norm() < tol)
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.canonicalize(0.0) == self.conj_transpose().canonicalize(0.0)
    }
}

/// Rows `rows` of `left · right`, keeping only the columns `j` with
/// `col_map[j] = Some(k)` (renumbered to `k`). One multiplication per
/// contributing pair of entries is added to `work`.
pub(crate) fn restricted_product(
    left: &SparseMatrix,
    right: &SparseMatrix,
    rows: &[usize],
    col_map: &[Option<usize>],
    out_cols: usize,
    work: &mut u64,
) -> SparseMatrix {
    debug_assert_eq!(left.ncols, right.nrows);
    debug_assert_eq!(col_map.len(), right.ncols);
    let mut acc = vec![Complex64::zero(); out_cols];
    let mut seen = vec![false; out_cols];
    let mut touched: Vec<usize> = Vec::new();

    let mut row_ptr = Vec::with_capacity(rows.len() + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);
    for &i in rows {
        let (lcols, lvals) = left.row(i);
        for (&k, &a) in lcols.iter().zip(lvals) {
            let (rcols, rvals) = right.row(k);
            for (&j, &b) in rcols.iter().zip(rvals) {
                if let Some(jj) = col_map[j] {
                    if !seen[jj] {
                        seen[jj] = true;
                        touched.push(jj);
                    }
                    acc[jj] += a * b;
                    *work += 1;
                }
            }
        }
        touched.sort_unstable();
        for &jj in &touched {
            col_idx.push(jj);
            values.push(acc[jj]);
            acc[jj] = Complex64::zero();
            seen[jj] = false;
        }
        touched.clear();
        row_ptr.push(col_idx.len());
    }
    SparseMatrix::from_sorted_rows(rows.len(), out_cols, row_ptr, col_idx, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use core::f64::consts::PI;

    pub(crate) fn ring_stencil(n: usize, k: f64) -> SparseMatrix {
        let d = c64(2.0 - k * k, 0.0);
        let m1 = c64(-1.0, 0.0);
        SparseMatrix::from_triplets(
            n,
            n,
            (0..n).flat_map(|i| [(i, i, d), (i, (i + 1) % n, m1), (i, (i + n - 1) % n, m1)]),
        )
        .unwrap()
    }

    #[test]
    fn identity_times_vector() {
        let x: Vec<Complex64> = (0..4).map(|i| c64(i as f64, -(i as f64))).collect();
        assert_eq!(&*SparseMatrix::identity(4).spmv(&x).unwrap(), &x[..]);
    }

    #[test]
    fn zero_matrix_times_vector() {
        let y = SparseMatrix::zeros(3, 3).spmv(&[c64(1.0, 2.0); 3]).unwrap();
        assert!(y.iter().all(|z| z.is_zero()));
    }

    #[test]
    fn ring_stencil_row_sums() {
        // oracle: every row holds -1, 2-k², -1
        let k = PI / 3.0;
        let expected = -1.0 + (2.0 - k * k) - 1.0;
        let y = ring_stencil(8, k).spmv(&[c64(1.0, 0.0); 8]).unwrap();
        for z in y.iter() {
            assert!((z.re - expected).abs() < 1e-15 && z.im == 0.0);
        }
        assert!((expected - (-k * k)).abs() < 1e-15);
    }

    #[test]
    fn spmv_dimension_mismatch() {
        let err = SparseMatrix::identity(3)
            .spmv(&[c64(1.0, 0.0); 2])
            .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn duplicates_are_summed_and_sorted() {
        let m = SparseMatrix::from_triplets(
            2,
            3,
            [
                (1, 2, c64(1.0, 0.0)),
                (0, 1, c64(2.0, 0.0)),
                (1, 2, c64(3.0, 1.0)),
                (1, 0, c64(5.0, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.row(1).0, &[0, 2]);
        assert_eq!(m.get(1, 2), c64(4.0, 1.0));
    }

    #[test]
    fn out_of_range_triplet() {
        let err = SparseMatrix::from_triplets(2, 2, [(2, 0, c64(1.0, 0.0))]).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { .. }));
    }

    #[test]
    fn times_identity_and_permutations() {
        let a = ring_stencil(6, 0.7);
        assert_eq!(a.spmm(&SparseMatrix::identity(6)).unwrap(), a);
        let perm = [2usize, 0, 3, 5, 1, 4];
        let one = c64(1.0, 0.0);
        let p =
            SparseMatrix::from_triplets(6, 6, perm.iter().enumerate().map(|(i, &j)| (i, j, one)))
                .unwrap();
        assert_eq!(p.spmm(&p.transpose()).unwrap(), SparseMatrix::identity(6));
    }

    #[test]
    fn conj_transpose_of_hermitian_and_involution() {
        let h = SparseMatrix::from_triplets(
            2,
            2,
            [
                (0, 0, c64(2.0, 0.0)),
                (0, 1, c64(1.0, 3.0)),
                (1, 0, c64(1.0, -3.0)),
                (1, 1, c64(-1.0, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(h.conj_transpose(), h);
        let s = ring_stencil(5, 1.0);
        assert_eq!(s.conj_transpose(), s);
        let r = SparseMatrix::from_triplets(
            3,
            3,
            [
                (0, 2, c64(1.0, 2.0)),
                (1, 0, c64(-3.0, 0.5)),
                (2, 2, c64(0.0, 1.0)),
            ],
        )
        .unwrap();
        assert_eq!(r.conj_transpose().conj_transpose(), r);
        assert_eq!(r.conj_transpose().get(2, 0), c64(1.0, -2.0));
    }

    #[test]
    fn drop_tolerance_and_canonicalize() {
        let a = SparseMatrix::from_triplets(2, 2, [(0, 0, c64(1.0, 0.0)), (0, 1, c64(1e-20, 0.0))])
            .unwrap();
        let b = SparseMatrix::identity(2);
        assert_eq!(a.spmm(&b).unwrap().nnz(), 2);
        assert_eq!(a.spmm_with_drop(&b, 1e-12).unwrap().nnz(), 1);
        let z = SparseMatrix::from_triplets(2, 2, [(0, 0, c64(0.0, 0.0)), (1, 1, c64(1.0, 0.0))])
            .unwrap();
        assert_eq!(z.canonicalize(0.0).nnz(), 1);
    }
}
