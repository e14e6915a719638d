use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::vector::check_len;
use super::DenseVector;
use crate::{Error, Result};

/// Pivots below this multiple of the largest entry mark a matrix singular.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-13;

/// Row-major dense complex matrix. Used for verification and coarse solves.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![Complex64::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::one();
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                data.push(f(i, j));
            }
        }
        Self { nrows, ncols, data }
    }

    pub fn from_row_major(nrows: usize, ncols: usize, data: Vec<Complex64>) -> Result<Self> {
        check_len("from_row_major", nrows * ncols, data.len())?;
        Ok(Self { nrows, ncols, data })
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.nrows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self[(i, i)])
            .collect()
    }

    /// Rows `rows` (in the given order) as a new matrix.
    pub fn select_rows(&self, rows: &[usize]) -> DenseMatrix {
        DenseMatrix::from_fn(rows.len(), self.ncols, |i, j| self[(rows[i], j)])
    }

    /// Columns `cols` (in the given order) as a new matrix.
    pub fn select_cols(&self, cols: &[usize]) -> DenseMatrix {
        DenseMatrix::from_fn(self.nrows, cols.len(), |i, j| self[(i, cols[j])])
    }

    pub fn conj_transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_len("matmul", self.ncols, other.nrows)?;
        let mut out = DenseMatrix::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            let orow = &mut out.data[i * other.ncols..(i + 1) * other.ncols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (o, &b) in orow.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Result<DenseVector> {
        check_len("mul_vec", self.ncols, x.len())?;
        Ok((0..self.nrows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &DenseMatrix,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<DenseMatrix> {
        check_len("elementwise (rows)", self.nrows, other.nrows)?;
        check_len("elementwise (cols)", self.ncols, other.ncols)?;
        Ok(DenseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, alpha: Complex64) -> DenseMatrix {
        DenseMatrix {
            data: self.data.iter().map(|&z| z * alpha).collect(),
            ..self.clone()
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        super::vector::norm_l2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        super::vector::norm_linf(&self.data)
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<LuFactors> {
        let mut work = 0;
        self.lu_counted(&mut work)
    }

    /// Like [`DenseMatrix::lu`], adding the number of complex
    /// multiplications and divisions performed to `work`.
    pub fn lu_counted(&self, work: &mut u64) -> Result<LuFactors> {
        check_len("lu (square)", self.nrows, self.ncols)?;
        let n = self.nrows;
        let threshold = SINGULAR_PIVOT_RATIO * self.max_abs();
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut pivot_nz: Vec<usize> = Vec::with_capacity(n);

        for i in 0..n {
            let (p, pmag) =
                (i..n)
                    .map(|r| (r, a[r * n + i].norm()))
                    .fold(
                        (i, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pmag <= threshold || pmag == 0.0 {
                return Err(Error::SingularMatrix { pivot: i });
            }
            if p != i {
                for k in 0..n {
                    a.swap(i * n + k, p * n + k);
                }
                perm.swap(i, p);
            }
            let pivot = a[i * n + i];
            // structural zeros of the pivot row are skipped; the arithmetic is unchanged
            pivot_nz.clear();
            pivot_nz.extend((i + 1..n).filter(|&k| !a[i * n + k].is_zero()));
            let (head, tail) = a.split_at_mut((i + 1) * n);
            let prow = &head[i * n..];
            for r in 0..n - i - 1 {
                let row = &mut tail[r * n..(r + 1) * n];
                if row[i].is_zero() {
                    continue;
                }
                let l = row[i] / pivot;
                row[i] = l;
                for &k in &pivot_nz {
                    row[k] -= l * prow[k];
                }
                *work += 1 + pivot_nz.len() as u64;
            }
        }
        Ok(LuFactors { n, lu: a, perm })
    }

    pub fn inverse(&self) -> Result<DenseMatrix> {
        let lu = self.lu()?;
        let n = self.nrows;
        let mut inv = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let col = lu.solve(&DenseVector::unit(n, j))?;
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.ncols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.ncols + j]
    }
}

/// Packed `P A = L U` factors; `L` has a unit diagonal.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, f: &[Complex64]) -> Result<DenseVector> {
        let mut work = 0;
        self.solve_counted(f, &mut work)
    }

    pub fn solve_counted(&self, f: &[Complex64], work: &mut u64) -> Result<DenseVector> {
        check_len("lu solve", self.n, f.len())?;
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| f[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let mut acc = x[i];
            for (l, xk) in row.iter().zip(&x[..i]) {
                if !l.is_zero() {
                    acc -= l * xk;
                    *work += 1;
                }
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let mut acc = x[i];
            for k in i + 1..n {
                if !row[k].is_zero() {
                    acc -= row[k] * x[k];
                    *work += 1;
                }
            }
            x[i] = acc / row[i];
            *work += 1;
        }
        Ok(x.into())
    }
}

/// Solves `A x = f` by LU with partial pivoting.
///
/// Fails with [`Error::SingularMatrix`] when a pivot falls below
/// [`SINGULAR_PIVOT_RATIO`] times the largest entry of `A`.
pub fn dense_lu_solve(a: &DenseMatrix, f: &[Complex64]) -> Result<DenseVector> {
    check_len("dense_lu_solve", a.nrows(), f.len())?;
    a.lu()?.solve(f)
}
