//! Direct multigrid solvers for linear systems `A u = f` whose eigenvectors
//! show red–black harmonic aliasing patterns.
//!
//! The solvers in [`multigrid`] compute the exact solution (up to roundoff)
//! by recursively splitting the grid into red and black halves and using the
//! mirror of the system matrix as interpolation filter. No smoothing steps
//! and no iterations are involved.
//!
//! The remaining modules build the pieces and the numerical checks that
//! license the solvers on a given problem:
//!
//! * [`linalg`]: complex sparse/dense kernels and the dense LU oracle.
//! * [`partition`]: red–black partitions, down/up-sampling and mirror matrices.
//! * [`aliasing`]: biorthogonal bases and harmonic aliasing checks.
//! * [`filterbank`]: finite two-channel filter banks and mirror-filter banks.
//! * [`twogrid`]: Galerkin coarse operators, coarse grid correction matrices
//!   and the direct two-grid solvers.
//! * [`problems`]: periodic Helmholtz and Dirichlet Laplacian families.
//!
//! The crate is `no_std` (it needs `alloc`). The `std` feature, on by
//! default, runs the independent additive branches on the rayon pool and
//! records wall-clock times.
#![no_std]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod aliasing;
mod error;
pub mod filterbank;
pub mod linalg;
pub mod multigrid;
pub mod partition;
pub mod problems;
pub mod twogrid;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, DenseVector, SparseMatrix};
pub use num_complex::Complex64;
pub use partition::{Color, RedBlackPartition};

/// Shorthand constructor for a complex scalar.
#[inline]
pub const fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
