//! Reference solvers written independently of the library's linear algebra.
#![allow(dead_code)]

use std::f64::consts::PI;

use dmg_core::{c64, Complex64, DenseMatrix, SparseMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type C = Complex64;

/// Row-major copy of a sparse matrix.
pub fn dense_rows(a: &SparseMatrix) -> Vec<C> {
    let n = a.ncols();
    let mut out = vec![C::new(0.0, 0.0); a.nrows() * n];
    for (i, j, z) in a.triplets() {
        out[i * n + j] += z;
    }
    out
}

/// Gaussian elimination with partial pivoting on a row-major square
/// matrix; zero multipliers and zero pivot-row entries are skipped.
pub fn gauss_solve_many(mut m: Vec<C>, n: usize, mut rhs: Vec<Vec<C>>) -> Vec<Vec<C>> {
    assert_eq!(m.len(), n * n);
    for col in 0..n {
        let p = (col..n)
            .max_by(|&x, &y| m[x * n + col].norm().total_cmp(&m[y * n + col].norm()))
            .unwrap();
        assert!(
            m[p * n + col].norm() > 0.0,
            "oracle: singular at column {col}"
        );
        if p != col {
            for k in 0..n {
                m.swap(col * n + k, p * n + k);
            }
            for b in rhs.iter_mut() {
                b.swap(col, p);
            }
        }
        let pivot = m[col * n + col];
        let nz: Vec<usize> = (col + 1..n)
            .filter(|&k| m[col * n + k].norm() != 0.0)
            .collect();
        for r in col + 1..n {
            let x = m[r * n + col];
            if x.norm() == 0.0 {
                continue;
            }
            let l = x / pivot;
            for &k in &nz {
                let t = m[col * n + k];
                m[r * n + k] -= l * t;
            }
            for b in rhs.iter_mut() {
                let t = b[col];
                b[r] -= l * t;
            }
        }
    }
    for b in rhs.iter_mut() {
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= m[i * n + k] * b[k];
            }
            b[i] = s / m[i * n + i];
        }
    }
    rhs
}

pub fn gauss_solve(a: &SparseMatrix, f: &[C]) -> Vec<C> {
    gauss_solve_many(dense_rows(a), a.nrows(), vec![f.to_vec()])
        .pop()
        .unwrap()
}

pub fn gauss_inverse_dense(a: &DenseMatrix) -> DenseMatrix {
    let n = a.nrows();
    let rows = a.as_slice().to_vec();
    let units = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| if i == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) })
                .collect()
        })
        .collect();
    let cols = gauss_solve_many(rows, n, units);
    DenseMatrix::from_fn(n, n, |i, j| cols[j][i])
}

pub fn gauss_inverse(a: &SparseMatrix) -> DenseMatrix {
    gauss_inverse_dense(&a.to_dense())
}

fn dft(x: &[C], sign: f64) -> Vec<C> {
    let n = x.len();
    let tw: Vec<C> = (0..n)
        .map(|k| C::from_polar(1.0, sign * 2.0 * PI * k as f64 / n as f64))
        .collect();
    (0..n)
        .map(|j| {
            x.iter()
                .enumerate()
                .map(|(m, &v)| v * tw[(j * m) % n])
                .sum()
        })
        .collect()
}

/// Solves the periodic ring `−u_{i−1} + (2 − k²) u_i − u_{i+1} = f_i` by
/// diagonalization in Fourier space.
pub fn spectral_ring(k: f64, f: &[C]) -> Vec<C> {
    let n = f.len();
    let fh = dft(f, -1.0);
    let uh: Vec<C> = fh
        .iter()
        .enumerate()
        .map(|(j, z)| z / (2.0 - 2.0 * (2.0 * PI * j as f64 / n as f64).cos() - k * k))
        .collect();
    dft(&uh, 1.0).into_iter().map(|z| z / n as f64).collect()
}

fn dft_2d(x: &[C], side: usize, sign: f64) -> Vec<C> {
    let mut rows: Vec<C> = Vec::with_capacity(x.len());
    for r in 0..side {
        rows.extend(dft(&x[r * side..(r + 1) * side], sign));
    }
    let mut out = vec![C::new(0.0, 0.0); x.len()];
    for c in 0..side {
        let col: Vec<C> = (0..side).map(|r| rows[r * side + c]).collect();
        for (r, z) in dft(&col, sign).into_iter().enumerate() {
            out[r * side + c] = z;
        }
    }
    out
}

/// Spectral solve of the periodic 5-point Helmholtz problem on a torus.
pub fn spectral_torus(side: usize, k: f64, f: &[C]) -> Vec<C> {
    let mut fh = dft_2d(f, side, -1.0);
    let t = 2.0 * PI / side as f64;
    for p in 0..side {
        for q in 0..side {
            fh[p * side + q] /=
                4.0 - k * k - 2.0 * (t * p as f64).cos() - 2.0 * (t * q as f64).cos();
        }
    }
    let n = (side * side) as f64;
    dft_2d(&fh, side, 1.0).into_iter().map(|z| z / n).collect()
}

/// Thomas algorithm for the Dirichlet second difference `(−1, 2, −1)`.
pub fn thomas_dirichlet(f: &[C]) -> Vec<C> {
    let n = f.len();
    let mut c = vec![0.0; n];
    let mut d = vec![C::new(0.0, 0.0); n];
    for i in 0..n {
        let denom = 2.0 + if i > 0 { c[i - 1] } else { 0.0 };
        c[i] = -1.0 / denom;
        d[i] = (f[i] + if i > 0 { d[i - 1] } else { C::new(0.0, 0.0) }) / denom;
    }
    let mut u = d.clone();
    for i in (0..n.saturating_sub(1)).rev() {
        u[i] = d[i] - c[i] * u[i + 1];
    }
    u
}

fn norm(x: &[C]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn rel_err(x: &[C], y: &[C]) -> f64 {
    let d: Vec<C> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    norm(&d) / norm(y)
}

/// `‖f − A u‖ / ‖f‖` from the stored triplets.
pub fn rel_residual(a: &SparseMatrix, u: &[C], f: &[C]) -> f64 {
    let mut r = f.to_vec();
    for (i, j, z) in a.triplets() {
        r[i] -= z * u[j];
    }
    norm(&r) / norm(f)
}

pub fn frobenius(m: &DenseMatrix) -> f64 {
    m.as_slice()
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<C> {
    (0..n)
        .map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}
