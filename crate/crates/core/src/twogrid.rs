//! Red–black two-grid configurations.
//!
//! A configuration fixes a partition and four inter-grid filters. It yields
//! Galerkin coarse operators `A_c = D_c F_{R,c} A F_{I,c} U_c`, coarse grid
//! correction (CGC) matrices `K_c = I − F_{I,c} U_c A_c⁻¹ D_c F_{R,c} A`,
//! and the two direct two-grid solvers.
//!
//! The symbol side works with eigenvalues only: `Λ` for `A`, `Π` for the
//! filters, and `Δ_c = Π_{R,L} Λ_L Π_{I,L} + Π_{R,H} Λ_H Π_{I,H}` for the
//! coarse matrices, with all sequences indexed by the basis pairing.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::aliasing::BiorthogonalBasis;
use crate::filterbank::{filter_symbols, FilterSymbols, SymbolQuad};
use crate::linalg::{check_len, DenseMatrix, DenseVector, SparseMatrix};
use crate::multigrid::{mirrored_coarse, solve_subgrid, Method, PartitionHierarchy, Trace};
use crate::partition::{Color, RedBlackPartition};
use crate::{Error, Result};

/// Coarse systems above this size are solved recursively when a hierarchy
/// is available.
pub const DEFAULT_CROSSOVER: usize = 512;

/// `Δ` entries below this magnitude mark a coarse matrix singular.
pub const SINGULAR_SYMBOL_TOL: f64 = 1e-13;

/// An inter-grid filter, kept symbolic where possible.
#[derive(Debug, Clone, PartialEq)]
pub enum Filter {
    Identity,
    /// The mirror `A*` of the system matrix under the configuration's partition.
    MirrorOfA,
    Explicit(SparseMatrix),
}

impl Filter {
    fn resolve(&self, a: &SparseMatrix, p: &RedBlackPartition) -> Result<SparseMatrix> {
        match self {
            Filter::Identity => Ok(SparseMatrix::identity(a.nrows())),
            Filter::MirrorOfA => p.mirror(a),
            Filter::Explicit(m) => Ok(m.clone()),
        }
    }

    /// Symbols in `basis`, given those of `A`.
    pub fn symbols(
        &self,
        lambdas: &FilterSymbols,
        basis: &BiorthogonalBasis,
    ) -> Result<FilterSymbols> {
        match self {
            Filter::Identity => Ok(FilterSymbols::constant(lambdas.len(), Complex64::one())),
            Filter::MirrorOfA => Ok(lambdas.swapped()),
            Filter::Explicit(m) => filter_symbols(m, basis),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoGridConfig {
    pub partition: RedBlackPartition,
    pub restrict_red: Filter,
    pub interp_red: Filter,
    pub restrict_black: Filter,
    pub interp_black: Filter,
}

impl TwoGridConfig {
    /// Identity filters except the black interpolation, which is `A*`.
    pub fn multiplicative_standard(partition: RedBlackPartition) -> Self {
        Self {
            partition,
            restrict_red: Filter::Identity,
            interp_red: Filter::Identity,
            restrict_black: Filter::Identity,
            interp_black: Filter::MirrorOfA,
        }
    }

    /// `A*` interpolation on both grids, identity restrictions.
    pub fn additive_standard(partition: RedBlackPartition) -> Self {
        Self {
            partition,
            restrict_red: Filter::Identity,
            interp_red: Filter::MirrorOfA,
            restrict_black: Filter::Identity,
            interp_black: Filter::MirrorOfA,
        }
    }

    pub fn restriction_filter(&self, color: Color) -> &Filter {
        match color {
            Color::Red => &self.restrict_red,
            Color::Black => &self.restrict_black,
        }
    }

    pub fn interpolation_filter(&self, color: Color) -> &Filter {
        match color {
            Color::Red => &self.interp_red,
            Color::Black => &self.interp_black,
        }
    }

    /// Symbols of the four filters and of `A` in `basis`.
    pub fn symbols(
        &self,
        a: &SparseMatrix,
        basis: &BiorthogonalBasis,
    ) -> Result<(SymbolQuad, FilterSymbols)> {
        let lambdas = filter_symbols(a, basis)?;
        let quad = SymbolQuad {
            restrict_red: self.restrict_red.symbols(&lambdas, basis)?,
            interp_red: self.interp_red.symbols(&lambdas, basis)?,
            restrict_black: self.restrict_black.symbols(&lambdas, basis)?,
            interp_black: self.interp_black.symbols(&lambdas, basis)?,
        };
        Ok((quad, lambdas))
    }
}

/// Restriction `D F_R` (`n/2 × n`), interpolation `F_I U` (`n × n/2`) and
/// the Galerkin coarse matrix of one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseOperators {
    pub color: Color,
    pub restriction: SparseMatrix,
    pub interpolation: SparseMatrix,
    pub coarse_matrix: SparseMatrix,
}

fn select_rows(m: &SparseMatrix, rows: &[usize]) -> SparseMatrix {
    SparseMatrix::from_triplets(
        rows.len(),
        m.ncols(),
        rows.iter().enumerate().flat_map(|(k, &i)| {
            let (cols, vals) = m.row(i);
            cols.iter().zip(vals).map(move |(&j, &z)| (k, j, z))
        }),
    )
    .expect("rows in range")
}

fn select_cols(m: &SparseMatrix, p: &RedBlackPartition, color: Color) -> SparseMatrix {
    let cmap = p.column_map(color);
    SparseMatrix::from_triplets(
        m.nrows(),
        p.half(),
        m.triplets()
            .filter_map(|(i, j, z)| cmap[j].map(|jj| (i, jj, z))),
    )
    .expect("columns in range")
}

pub fn build_coarse(
    a: &SparseMatrix,
    config: &TwoGridConfig,
    color: Color,
) -> Result<CoarseOperators> {
    let p = &config.partition;
    check_len("two-grid (rows)", p.n(), a.nrows())?;
    check_len("two-grid (cols)", p.n(), a.ncols())?;
    let fr = config.restriction_filter(color);
    let fi = config.interpolation_filter(color);
    let restriction = select_rows(&fr.resolve(a, p)?, p.indices(color));
    let interpolation = select_cols(&fi.resolve(a, p)?, p, color);
    let coarse_matrix = match (fr, fi) {
        (Filter::Identity, Filter::Identity) => p.submatrix(color, color, a)?,
        (Filter::Identity, Filter::MirrorOfA) => {
            let mut work = 0;
            mirrored_coarse(a, &p.mirror(a)?, p, color, &mut work)
        }
        _ => restriction.spmm(a)?.spmm(&interpolation)?,
    };
    Ok(CoarseOperators {
        color,
        restriction,
        interpolation,
        coarse_matrix,
    })
}

fn coarse_singular(color: Color) -> Error {
    let mut path = String::new();
    path.push(color.letter());
    Error::SingularCoarseMatrix { level: 1, path }
}

fn coarse_inverse(ops: &CoarseOperators) -> Result<DenseMatrix> {
    ops.coarse_matrix.to_dense().inverse().map_err(|e| match e {
        Error::SingularMatrix { .. } => coarse_singular(ops.color),
        other => other,
    })
}

fn sparse_dense(a: &SparseMatrix) -> DenseMatrix {
    a.to_dense()
}

/// `I_I A_c⁻¹ I_R`, dense.
fn coarse_term(ops: &CoarseOperators) -> Result<DenseMatrix> {
    sparse_dense(&ops.interpolation)
        .matmul(&coarse_inverse(ops)?)?
        .matmul(&sparse_dense(&ops.restriction))
}

/// `K = I − I_I A_c⁻¹ I_R A`, dense (verification scale).
pub fn cgc_matrix(a: &SparseMatrix, ops: &CoarseOperators) -> Result<DenseMatrix> {
    let t = coarse_term(ops)?.matmul(&a.to_dense())?;
    DenseMatrix::identity(a.nrows()).sub(&t)
}

/// Diagonal blocks of `Vᴴ K W` in the basis pairing: `high_to_low[j]` is the
/// entry in row `low[j]`, column `high[j]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CgcSymbols {
    pub low_to_low: Vec<Complex64>,
    pub high_to_low: Vec<Complex64>,
    pub low_to_high: Vec<Complex64>,
    pub high_to_high: Vec<Complex64>,
}

impl CgcSymbols {
    /// The full `Vᴴ K W` these symbols describe, in natural column order.
    pub fn to_matrix(&self, basis: &BiorthogonalBasis) -> DenseMatrix {
        let mut g = DenseMatrix::zeros(basis.n(), basis.n());
        for (j, (&l, &h)) in basis.low().iter().zip(basis.high()).enumerate() {
            g[(l, l)] = self.low_to_low[j];
            g[(l, h)] = self.high_to_low[j];
            g[(h, l)] = self.low_to_high[j];
            g[(h, h)] = self.high_to_high[j];
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DeltaSymbols {
    pub delta_red: Vec<Complex64>,
    pub delta_black: Vec<Complex64>,
}

fn delta(r: &FilterSymbols, i: &FilterSymbols, lam: &FilterSymbols) -> Result<Vec<Complex64>> {
    let h = lam.len();
    for s in [r, i] {
        check_len("delta (low)", h, s.low.len())?;
        check_len("delta (high)", h, s.high.len())?;
    }
    Ok((0..h)
        .map(|j| r.low[j] * lam.low[j] * i.low[j] + r.high[j] * lam.high[j] * i.high[j])
        .collect())
}

pub fn delta_symbols(symbols: &SymbolQuad, lambdas: &FilterSymbols) -> Result<DeltaSymbols> {
    Ok(DeltaSymbols {
        delta_red: delta(&symbols.restrict_red, &symbols.interp_red, lambdas)?,
        delta_black: delta(&symbols.restrict_black, &symbols.interp_black, lambdas)?,
    })
}

fn invert_delta(d: &[Complex64]) -> Result<Vec<Complex64>> {
    d.iter()
        .enumerate()
        .map(|(index, z)| {
            if z.norm() < SINGULAR_SYMBOL_TOL {
                Err(Error::SingularSymbol {
                    index,
                    magnitude: z.norm(),
                })
            } else {
                Ok(z.inv())
            }
        })
        .collect()
}

/// CGC symbols of one grid, from filter and matrix symbols alone.
pub fn cgc_symbols_from(
    symbols: &SymbolQuad,
    lambdas: &FilterSymbols,
    color: Color,
) -> Result<CgcSymbols> {
    let (r, i) = match color {
        Color::Red => (&symbols.restrict_red, &symbols.interp_red),
        Color::Black => (&symbols.restrict_black, &symbols.interp_black),
    };
    let dinv = invert_delta(&delta(r, i, lambdas)?)?;
    let cross = match color {
        Color::Red => -Complex64::one(),
        Color::Black => Complex64::one(),
    };
    let h = lambdas.len();
    let one = Complex64::one();
    Ok(CgcSymbols {
        low_to_low: (0..h)
            .map(|j| one - i.low[j] * dinv[j] * r.low[j] * lambdas.low[j])
            .collect(),
        high_to_low: (0..h)
            .map(|j| cross * i.low[j] * dinv[j] * r.high[j] * lambdas.high[j])
            .collect(),
        low_to_high: (0..h)
            .map(|j| cross * i.high[j] * dinv[j] * r.low[j] * lambdas.low[j])
            .collect(),
        high_to_high: (0..h)
            .map(|j| one - i.high[j] * dinv[j] * r.high[j] * lambdas.high[j])
            .collect(),
    })
}

pub fn cgc_symbols(
    a: &SparseMatrix,
    config: &TwoGridConfig,
    color: Color,
    basis: &BiorthogonalBasis,
) -> Result<CgcSymbols> {
    let (quad, lambdas) = config.symbols(a, basis)?;
    cgc_symbols_from(&quad, &lambdas, color)
}

/// `max |Vᴴ K W − symbols|` over the whole matrix.
pub fn cgc_symbol_deviation(
    k: &DenseMatrix,
    symbols: &CgcSymbols,
    basis: &BiorthogonalBasis,
) -> Result<f64> {
    let g = basis.v().conj_transpose().matmul(&k.matmul(basis.w())?)?;
    Ok(g.sub(&symbols.to_matrix(basis))?.max_abs())
}

/// Compares `4 (D W_L) Δ⁻¹ (D V_L)ᴴ` with the dense inverse of the Galerkin
/// coarse matrix; returns the Frobenius-relative deviation.
pub fn galerkin_inverse_deviation(
    a: &SparseMatrix,
    config: &TwoGridConfig,
    color: Color,
    basis: &BiorthogonalBasis,
) -> Result<f64> {
    let (quad, lambdas) = config.symbols(a, basis)?;
    let d = delta_symbols(&quad, &lambdas)?;
    let dinv = invert_delta(match color {
        Color::Red => &d.delta_red,
        Color::Black => &d.delta_black,
    })?;
    let rows = config.partition.indices(color);
    let wl = basis.w().select_rows(rows).select_cols(basis.low());
    let vl = basis.v().select_rows(rows).select_cols(basis.low());
    let scaled = DenseMatrix::from_fn(wl.nrows(), wl.ncols(), |i, j| wl[(i, j)] * dinv[j] * 4.0);
    let formula = scaled.matmul(&vl.conj_transpose())?;
    let ops = build_coarse(a, config, color)?;
    let exact = coarse_inverse(&ops)?;
    Ok(formula.sub(&exact)?.frobenius_norm() / exact.frobenius_norm())
}

pub fn galerkin_inverse_check(
    a: &SparseMatrix,
    config: &TwoGridConfig,
    color: Color,
    basis: &BiorthogonalBasis,
    tol: f64,
) -> Result<bool> {
    Ok(galerkin_inverse_deviation(a, config, color, basis)? <= tol)
}

/// Which two-grid arrangement a direct-solver check refers to.
pub type Mode = Method;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DirectConditionReport {
    pub mode: Mode,
    /// Named residuals that must vanish.
    pub residuals: Vec<(String, f64)>,
    /// Residual of the necessary condition
    /// `Π̄_{R,L}Π̃_{R,L}Λ_L²Π̄_{I,L}Π̃_{I,L} = Π̄_{R,H}Π̃_{R,H}Λ_H²Π̄_{I,H}Π̃_{I,H}`
    /// (additive mode only).
    pub product_condition: Option<f64>,
    /// `min |Λ_L + Λ_H|`; zero means the multiplicative red grid is singular
    /// for the standard configuration.
    pub min_lambda_sum: f64,
    pub tol: f64,
    pub passes: bool,
}

impl DirectConditionReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }
}

fn max_dev(a: impl Iterator<Item = Complex64>) -> f64 {
    a.map(|z| z.norm()).fold(0.0, f64::max)
}

/// Evaluates the symbol conditions under which a two-grid arrangement is a
/// direct solver.
///
/// Multiplicative: `Π̄_{R,L} Λ_L Π̃_{I,L} = Π̄_{R,H} Λ_H Π̃_{I,H}`.
/// Additive: the four blocks of `K̄ + K̃ − I` in symbol form.
pub fn check_direct_conditions(
    symbols: &SymbolQuad,
    lambdas: &FilterSymbols,
    mode: Mode,
    tol: f64,
) -> Result<DirectConditionReport> {
    let h = lambdas.len();
    let SymbolQuad {
        restrict_red: rr,
        interp_red: ir,
        restrict_black: rb,
        interp_black: ib,
    } = symbols;
    for s in [rr, ir, rb, ib] {
        check_len("direct conditions (low)", h, s.low.len())?;
        check_len("direct conditions (high)", h, s.high.len())?;
    }
    let lam = lambdas;
    let min_lambda_sum = (0..h)
        .map(|j| (lam.low[j] + lam.high[j]).norm())
        .fold(f64::INFINITY, f64::min);
    let (residuals, product_condition) = match mode {
        Method::Multiplicative => {
            let r = max_dev((0..h).map(|j| {
                rr.low[j] * lam.low[j] * ib.low[j] - rr.high[j] * lam.high[j] * ib.high[j]
            }));
            (alloc::vec![(String::from("multiplicative"), r)], None)
        }
        Method::Additive => {
            let red = cgc_symbols_from(symbols, lambdas, Color::Red)?;
            let black = cgc_symbols_from(symbols, lambdas, Color::Black)?;
            let one = Complex64::one();
            let blocks = [
                (
                    "low_to_low",
                    max_dev((0..h).map(|j| red.low_to_low[j] + black.low_to_low[j] - one)),
                ),
                (
                    "high_to_high",
                    max_dev((0..h).map(|j| red.high_to_high[j] + black.high_to_high[j] - one)),
                ),
                (
                    "high_to_low",
                    max_dev((0..h).map(|j| red.high_to_low[j] + black.high_to_low[j])),
                ),
                (
                    "low_to_high",
                    max_dev((0..h).map(|j| red.low_to_high[j] + black.low_to_high[j])),
                ),
            ];
            let product = max_dev((0..h).map(|j| {
                rr.low[j] * rb.low[j] * lam.low[j] * lam.low[j] * ir.low[j] * ib.low[j]
                    - rr.high[j] * rb.high[j] * lam.high[j] * lam.high[j] * ir.high[j] * ib.high[j]
            }));
            (
                blocks.iter().map(|(n, r)| (String::from(*n), *r)).collect(),
                Some(product),
            )
        }
    };
    let passes = residuals.iter().all(|r| r.1 <= tol);
    Ok(DirectConditionReport {
        mode,
        residuals,
        product_condition,
        min_lambda_sum,
        tol,
        passes,
    })
}

/// `Ī_IĀ⁻¹Ī_R + Ĩ_IÃ⁻¹Ĩ_R − Ĩ_IÃ⁻¹(Ĩ_R A Ī_I)Ā⁻¹Ī_R`, dense.
pub fn multiplicative_factorization(
    a: &SparseMatrix,
    config: &TwoGridConfig,
) -> Result<DenseMatrix> {
    let red = build_coarse(a, config, Color::Red)?;
    let black = build_coarse(a, config, Color::Black)?;
    let ri_r = coarse_inverse(&red)?.matmul(&sparse_dense(&red.restriction))?;
    let pi_b = sparse_dense(&black.interpolation).matmul(&coarse_inverse(&black)?)?;
    let first = sparse_dense(&red.interpolation).matmul(&ri_r)?;
    let second = pi_b.matmul(&sparse_dense(&black.restriction))?;
    let coupling = black
        .restriction
        .spmm(a)?
        .spmm(&red.interpolation)?
        .to_dense();
    let third = pi_b.matmul(&coupling)?.matmul(&ri_r)?;
    first.add(&second)?.sub(&third)
}

/// `Ī_IĀ⁻¹Ī_R + Ĩ_IÃ⁻¹Ĩ_R`, dense.
pub fn additive_factorization(a: &SparseMatrix, config: &TwoGridConfig) -> Result<DenseMatrix> {
    let red = coarse_term(&build_coarse(a, config, Color::Red)?)?;
    let black = coarse_term(&build_coarse(a, config, Color::Black)?)?;
    red.add(&black)
}

/// `‖M − A⁻¹‖_F / ‖A⁻¹‖_F` with `A⁻¹` from dense LU.
pub fn inverse_deviation(m: &DenseMatrix, a: &SparseMatrix) -> Result<f64> {
    let inv = a.to_dense().inverse()?;
    Ok(m.sub(&inv)?.frobenius_norm() / inv.frobenius_norm())
}

/// How the two-grid solvers treat their coarse systems.
#[derive(Clone, Copy)]
pub struct CoarseSolve<'a> {
    /// Largest coarse size solved by dense LU when a hierarchy is given.
    pub crossover: usize,
    /// Hierarchy whose level-1 grids are the configuration's coarse grids.
    pub hierarchy: Option<&'a dyn PartitionHierarchy>,
}

impl Default for CoarseSolve<'_> {
    fn default() -> Self {
        Self {
            crossover: DEFAULT_CROSSOVER,
            hierarchy: None,
        }
    }
}

impl core::fmt::Debug for CoarseSolve<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("CoarseSolve")
            .field("crossover", &self.crossover)
            .field("hierarchy", &self.hierarchy.is_some())
            .finish()
    }
}

fn solve_coarse(
    ops: &CoarseOperators,
    rhs: &[Complex64],
    p: &RedBlackPartition,
    method: Method,
    how: &CoarseSolve<'_>,
) -> Result<Vec<Complex64>> {
    let m = &ops.coarse_matrix;
    let singular = |e: Error| match e {
        Error::SingularMatrix { .. } => coarse_singular(ops.color),
        other => other,
    };
    match how.hierarchy {
        Some(h) if m.nrows() > how.crossover => {
            let mut trace = Trace::default();
            let mut path = String::new();
            path.push(ops.color.letter());
            solve_subgrid(
                method,
                m,
                rhs,
                p.indices(ops.color),
                1,
                &path,
                h,
                &mut trace,
            )
        }
        _ => Ok(m
            .to_dense()
            .lu()
            .map_err(singular)?
            .solve(rhs)?
            .into_inner()),
    }
}

fn add(a: &[Complex64], b: &[Complex64]) -> DenseVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicativeTwoGrid {
    pub v: DenseVector,
    /// Nested-iteration result from the red grid.
    pub v0: DenseVector,
    pub r: DenseVector,
    /// Correction from the black grid.
    pub e0: DenseVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveTwoGrid {
    pub v: DenseVector,
    pub v_red: DenseVector,
    pub v_black: DenseVector,
}

/// Nested iteration on the red grid, then a correction from the black grid.
pub fn solve_multiplicative_2g(
    a: &SparseMatrix,
    config: &TwoGridConfig,
    f: &[Complex64],
    how: &CoarseSolve<'_>,
) -> Result<MultiplicativeTwoGrid> {
    check_len("two-grid (rhs)", a.nrows(), f.len())?;
    let p = &config.partition;
    let red = build_coarse(a, config, Color::Red)?;
    let v_red = solve_coarse(
        &red,
        &red.restriction.spmv(f)?,
        p,
        Method::Multiplicative,
        how,
    )?;
    let v0 = red.interpolation.spmv(&v_red)?;
    let av0 = a.spmv(&v0)?;
    let r: DenseVector = f.iter().zip(av0.iter()).map(|(x, y)| x - y).collect();
    let black = build_coarse(a, config, Color::Black)?;
    let v_black = solve_coarse(
        &black,
        &black.restriction.spmv(&r)?,
        p,
        Method::Multiplicative,
        how,
    )?;
    let e0 = black.interpolation.spmv(&v_black)?;
    Ok(MultiplicativeTwoGrid {
        v: add(&v0, &e0),
        v0,
        r,
        e0,
    })
}

/// Independent red and black nested iterations, summed.
pub fn solve_additive_2g(
    a: &SparseMatrix,
    config: &TwoGridConfig,
    f: &[Complex64],
    how: &CoarseSolve<'_>,
) -> Result<AdditiveTwoGrid> {
    check_len("two-grid (rhs)", a.nrows(), f.len())?;
    let p = &config.partition;
    let channel = |color: Color| -> Result<DenseVector> {
        let ops = build_coarse(a, config, color)?;
        let v = solve_coarse(&ops, &ops.restriction.spmv(f)?, p, Method::Additive, how)?;
        ops.interpolation.spmv(&v)
    };
    let v_red = channel(Color::Red)?;
    let v_black = channel(Color::Black)?;
    Ok(AdditiveTwoGrid {
        v: add(&v_red, &v_black),
        v_red,
        v_black,
    })
}

/// Zero-symbol sequence of length `h`; handy when building symbol quads.
pub fn zero_symbols(h: usize) -> FilterSymbols {
    FilterSymbols::constant(h, Complex64::zero())
}
