//! Complex sparse and dense linear algebra.
//!
//! Everything is complex: real problems are embedded with zero imaginary
//! parts. [`dense_lu_solve`] is the reference solver every other solver in
//! the crate is checked against.

mod dense;
mod sparse;
mod vector;

pub use dense::{dense_lu_solve, DenseMatrix, LuFactors, SINGULAR_PIVOT_RATIO};
pub use sparse::SparseMatrix;
pub use vector::{norm_l2, norm_linf, relative_error, DenseVector};

pub(crate) use sparse::restricted_product;
pub(crate) use vector::check_len;

/// Relative residual `‖f − A x‖₂ / ‖f‖₂` (absolute when `f = 0`).
pub fn relative_residual(
    a: &SparseMatrix,
    x: &[num_complex::Complex64],
    f: &[num_complex::Complex64],
) -> crate::Result<f64> {
    let ax = a.spmv(x)?;
    check_len("relative_residual", f.len(), ax.len())?;
    Ok(relative_error(&ax, f))
}
