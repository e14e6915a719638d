//! Finite two-channel filter banks on a red–black partition.
//!
//! A bank restricts a signal to the red and black grids (filter, then
//! down-sample) and rebuilds it (up-sample, then filter). Filters are
//! matrices sharing the eigenvectors of a [`BiorthogonalBasis`]; their
//! eigenvalues ("symbols") decide whether the bank reconstructs exactly.
//!
//! With 0/1 down-sampling each channel carries half of the signal energy,
//! so perfect reconstruction asks `Π̄_I Π̄_R + Π̃_I Π̃_R = 2` on both halves of
//! the spectrum, and the mirror-filter bank uses symbols `√2 cos θ`, `√2 sin θ`.

use alloc::vec::Vec;
use core::f64::consts::SQRT_2;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use num_complex::Complex64;

use crate::aliasing::{check_rbhap, BiorthogonalBasis, DEFAULT_TOL};
use crate::linalg::{check_len, DenseMatrix, DenseVector, SparseMatrix};
use crate::partition::{Color, RedBlackPartition};
use crate::{Error, Result};

/// Off-diagonal leakage of `vᴴ F w`, relative to `‖F‖_F`, above which `F`
/// is not treated as a filter of the basis.
pub const FILTER_LEAKAGE_TOL: f64 = 1e-8;

/// Restriction and interpolation filters of both channels.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterQuad {
    pub restrict_red: SparseMatrix,
    pub interp_red: SparseMatrix,
    pub restrict_black: SparseMatrix,
    pub interp_black: SparseMatrix,
    pub partition: RedBlackPartition,
}

impl FilterQuad {
    pub fn new(
        restrict_red: SparseMatrix,
        interp_red: SparseMatrix,
        restrict_black: SparseMatrix,
        interp_black: SparseMatrix,
        partition: RedBlackPartition,
    ) -> Result<Self> {
        let n = partition.n();
        for m in [&restrict_red, &interp_red, &restrict_black, &interp_black] {
            check_len("filter (rows)", n, m.nrows())?;
            check_len("filter (cols)", n, m.ncols())?;
        }
        Ok(Self {
            restrict_red,
            interp_red,
            restrict_black,
            interp_black,
            partition,
        })
    }

    /// All four filters equal to `alpha·I`.
    pub fn scaled_identity(partition: RedBlackPartition, alpha: f64) -> Self {
        let m = SparseMatrix::identity(partition.n()).scale(Complex64::new(alpha, 0.0));
        Self {
            restrict_red: m.clone(),
            interp_red: m.clone(),
            restrict_black: m.clone(),
            interp_black: m,
            partition,
        }
    }
}

/// Signals produced by [`run_bank`].
#[derive(Debug, Clone, PartialEq)]
pub struct BankOutput {
    pub t: DenseVector,
    pub s_red: DenseVector,
    pub s_black: DenseVector,
}

/// Analysis `s_c = D_c F_{R,c} s`, synthesis `t = Σ_c F_{I,c} U_c s_c`.
pub fn run_bank(quad: &FilterQuad, s: &[Complex64]) -> Result<BankOutput> {
    let p = &quad.partition;
    check_len("run_bank (signal)", p.n(), s.len())?;
    let s_red = p.downsample(Color::Red, &quad.restrict_red.spmv(s)?)?;
    let s_black = p.downsample(Color::Black, &quad.restrict_black.spmv(s)?)?;
    let t_red = quad.interp_red.spmv(&p.upsample(Color::Red, &s_red)?)?;
    let t_black = quad
        .interp_black
        .spmv(&p.upsample(Color::Black, &s_black)?)?;
    let t = t_red
        .iter()
        .zip(t_black.iter())
        .map(|(a, b)| a + b)
        .collect();
    Ok(BankOutput { t, s_red, s_black })
}

/// Eigenvalues of a filter on the low and high halves of the spectrum,
/// ordered by the basis pairing.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FilterSymbols {
    pub low: Vec<Complex64>,
    pub high: Vec<Complex64>,
}

impl FilterSymbols {
    pub fn constant(half: usize, z: Complex64) -> Self {
        Self {
            low: alloc::vec![z; half],
            high: alloc::vec![z; half],
        }
    }

    /// Low and high halves exchanged: the symbols of the mirror filter.
    pub fn swapped(&self) -> Self {
        Self {
            low: self.high.clone(),
            high: self.low.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.low.len()
    }

    pub fn is_empty(&self) -> bool {
        self.low.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SymbolQuad {
    pub restrict_red: FilterSymbols,
    pub interp_red: FilterSymbols,
    pub restrict_black: FilterSymbols,
    pub interp_black: FilterSymbols,
}

/// Reads the symbols of `f` off the diagonal of `vᴴ F w`.
///
/// Fails with [`Error::NotAFilter`] when the off-diagonal part exceeds
/// [`FILTER_LEAKAGE_TOL`]` · ‖F‖_F`.
pub fn filter_symbols(f: &SparseMatrix, basis: &BiorthogonalBasis) -> Result<FilterSymbols> {
    let n = basis.n();
    check_len("filter symbols (rows)", n, f.nrows())?;
    check_len("filter symbols (cols)", n, f.ncols())?;
    let fw = sparse_times_dense(f, basis.w())?;
    let g = basis.v().conj_transpose().matmul(&fw)?;
    let mut leakage: f64 = 0.0;
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            leakage = leakage.max(g[(i, j)].norm());
        }
    }
    let scale = f.frobenius_norm();
    if leakage > FILTER_LEAKAGE_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotAFilter {
            leakage: if scale > 0.0 {
                leakage / scale
            } else {
                leakage
            },
        });
    }
    Ok(FilterSymbols {
        low: basis.low().iter().map(|&c| g[(c, c)]).collect(),
        high: basis.high().iter().map(|&c| g[(c, c)]).collect(),
    })
}

pub fn extract_symbols(quad: &FilterQuad, basis: &BiorthogonalBasis) -> Result<SymbolQuad> {
    Ok(SymbolQuad {
        restrict_red: filter_symbols(&quad.restrict_red, basis)?,
        interp_red: filter_symbols(&quad.interp_red, basis)?,
        restrict_black: filter_symbols(&quad.restrict_black, basis)?,
        interp_black: filter_symbols(&quad.interp_black, basis)?,
    })
}

fn sparse_times_dense(a: &SparseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    check_len("sparse x dense", a.ncols(), b.nrows())?;
    let mut out = DenseMatrix::zeros(a.nrows(), b.ncols());
    for i in 0..a.nrows() {
        let (cols, vals) = a.row(i);
        for (&k, &z) in cols.iter().zip(vals) {
            for j in 0..b.ncols() {
                out[(i, j)] += z * b[(k, j)];
            }
        }
    }
    Ok(out)
}

/// `W diag(symbols) Vᴴ`, assembled densely.
pub fn filter_from_symbols(
    basis: &BiorthogonalBasis,
    symbols: &FilterSymbols,
) -> Result<SparseMatrix> {
    let n = basis.n();
    check_len("filter from symbols", n / 2, symbols.len())?;
    check_len("filter from symbols", n / 2, symbols.high.len())?;
    let mut lam = alloc::vec![Complex64::new(0.0, 0.0); n];
    for (j, (&l, &h)) in basis.low().iter().zip(basis.high()).enumerate() {
        lam[l] = symbols.low[j];
        lam[h] = symbols.high[j];
    }
    let wl = DenseMatrix::from_fn(n, n, |i, j| basis.w()[(i, j)] * lam[j]);
    let f = wl.matmul(&basis.v().conj_transpose())?;
    Ok(SparseMatrix::from_dense(&f, 0.0))
}

/// Residuals of the perfect-reconstruction conditions.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VetterliReport {
    /// `max |Π̄_I Π̄_R + Π̃_I Π̃_R − 2|` over both halves.
    pub reconstruction: f64,
    /// `max |Π̄_{I,L} Π̄_{R,H} − Π̃_{I,L} Π̃_{R,H}|`.
    pub aliasing_low: f64,
    /// `max |Π̄_{I,H} Π̄_{R,L} − Π̃_{I,H} Π̃_{R,L}|`.
    pub aliasing_high: f64,
    pub tol: f64,
    pub passes: bool,
}

impl VetterliReport {
    pub fn max_residual(&self) -> f64 {
        self.reconstruction
            .max(self.aliasing_low)
            .max(self.aliasing_high)
    }
}

pub fn check_vetterli(symbols: &SymbolQuad, tol: f64) -> Result<VetterliReport> {
    let SymbolQuad {
        restrict_red: rr,
        interp_red: ir,
        restrict_black: rb,
        interp_black: ib,
    } = symbols;
    let h = rr.len();
    for s in [rr, ir, rb, ib] {
        check_len("vetterli (low)", h, s.low.len())?;
        check_len("vetterli (high)", h, s.high.len())?;
    }
    let two = Complex64::new(2.0, 0.0);
    let mut reconstruction: f64 = 0.0;
    let mut aliasing_low: f64 = 0.0;
    let mut aliasing_high: f64 = 0.0;
    for j in 0..h {
        reconstruction = reconstruction
            .max((ir.low[j] * rr.low[j] + ib.low[j] * rb.low[j] - two).norm())
            .max((ir.high[j] * rr.high[j] + ib.high[j] * rb.high[j] - two).norm());
        aliasing_low = aliasing_low.max((ir.low[j] * rr.high[j] - ib.low[j] * rb.high[j]).norm());
        aliasing_high = aliasing_high.max((ir.high[j] * rr.low[j] - ib.high[j] * rb.low[j]).norm());
    }
    Ok(VetterliReport {
        passes: reconstruction <= tol && aliasing_low <= tol && aliasing_high <= tol,
        reconstruction,
        aliasing_low,
        aliasing_high,
        tol,
    })
}

/// Mirror-filter bank: `F̄_I = F̄_R = W diag(√2 cos θ, √2 sin θ) Vᴴ` and
/// `F̃_I = F̃_R = F̄_I*`.
pub fn make_qmf_bank(
    basis: &BiorthogonalBasis,
    partition: &RedBlackPartition,
    theta: &[f64],
) -> Result<FilterQuad> {
    qmf_from_symbols(
        basis,
        partition,
        FilterSymbols {
            low: theta
                .iter()
                .map(|t| Complex64::new(SQRT_2 * t.cos(), 0.0))
                .collect(),
            high: theta
                .iter()
                .map(|t| Complex64::new(SQRT_2 * t.sin(), 0.0))
                .collect(),
        },
    )
}

/// Mirror-filter bank built on an arbitrary red interpolation symbol.
pub fn qmf_from_symbols(
    basis: &BiorthogonalBasis,
    partition: &RedBlackPartition,
    red: FilterSymbols,
) -> Result<FilterQuad> {
    check_len("qmf (angles)", basis.n() / 2, red.len())?;
    let report = check_rbhap(basis, partition, DEFAULT_TOL)?;
    if !report.passes {
        return Err(Error::NoAliasingPattern {
            deviation: report.max_deviation_red.max(report.max_deviation_black),
        });
    }
    let f = filter_from_symbols(basis, &red)?;
    let m = partition.mirror(&f)?;
    FilterQuad::new(f.clone(), f, m.clone(), m, partition.clone())
}
