//! Biorthogonal bases and red–black harmonic aliasing checks.
//!
//! Everything here is verification: the solvers never look at eigenvectors.
//! Bases are stored densely, so the checks are meant for desk-scale sizes.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use num_complex::Complex64;
use num_traits::Zero;

use crate::linalg::{check_len, DenseMatrix};
use crate::multigrid::PartitionHierarchy;
use crate::partition::{Color, RedBlackPartition};
use crate::{Error, Result};

/// Default tolerance of the aliasing checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Right eigenvectors `w` and left eigenvectors `v` (as columns) with
/// `vᴴ w = I`, plus a pairing of columns `low[j] ↔ high[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiorthogonalBasis {
    w: DenseMatrix,
    v: DenseMatrix,
    low: Vec<usize>,
    high: Vec<usize>,
}

impl BiorthogonalBasis {
    /// Checks shapes and that `low`/`high` split the columns into disjoint
    /// halves. Biorthogonality itself is checked by [`check_rbhap`].
    pub fn new(w: DenseMatrix, v: DenseMatrix, low: Vec<usize>, high: Vec<usize>) -> Result<Self> {
        let n = w.nrows();
        check_len("basis (W columns)", n, w.ncols())?;
        check_len("basis (V rows)", n, v.nrows())?;
        check_len("basis (V columns)", n, v.ncols())?;
        if n == 0 || n % 2 != 0 {
            return Err(Error::InvalidPartition(format!(
                "basis size {n} must be even and positive"
            )));
        }
        check_len("basis (low half)", n / 2, low.len())?;
        check_len("basis (high half)", n / 2, high.len())?;
        let mut seen = vec![false; n];
        for &c in low.iter().chain(&high) {
            if c >= n || seen[c] {
                return Err(Error::InvalidPartition(format!(
                    "column {c} repeated or out of range in pairing"
                )));
            }
            seen[c] = true;
        }
        Ok(Self { w, v, low, high })
    }

    /// Pairs the columns by reading off the red aliasing pattern: column `j`
    /// is paired with the other column `k` maximizing `|(vᴴ U̅D̅ w)_{kj}|`.
    /// The smaller index of each pair is taken as the low member.
    pub fn with_discovered_pairing(
        w: DenseMatrix,
        v: DenseMatrix,
        partition: &RedBlackPartition,
    ) -> Result<Self> {
        let n = w.nrows();
        check_len("basis/partition", partition.n(), n)?;
        let pattern = raw_pattern(&w, &v, partition, Color::Red)?;
        let mut partner = vec![usize::MAX; n];
        for j in 0..n {
            let (mut best, mut mag) = (usize::MAX, -1.0);
            for k in (0..n).filter(|&k| k != j) {
                let m = pattern[(k, j)].norm();
                if m > mag {
                    best = k;
                    mag = m;
                }
            }
            partner[j] = best;
        }
        let mut low = Vec::with_capacity(n / 2);
        let mut high = Vec::with_capacity(n / 2);
        for j in 0..n {
            let k = partner[j];
            if k == usize::MAX || partner[k] != j {
                return Err(Error::NoAliasingPattern {
                    deviation: f64::INFINITY,
                });
            }
            if j < k {
                low.push(j);
                high.push(k);
            }
        }
        Self::new(w, v, low, high)
    }

    pub fn n(&self) -> usize {
        self.w.nrows()
    }

    pub fn w(&self) -> &DenseMatrix {
        &self.w
    }

    pub fn v(&self) -> &DenseMatrix {
        &self.v
    }

    pub fn low(&self) -> &[usize] {
        &self.low
    }

    pub fn high(&self) -> &[usize] {
        &self.high
    }

    /// Column order `low ++ high`.
    pub fn ordering(&self) -> Vec<usize> {
        self.low.iter().chain(&self.high).copied().collect()
    }

    /// Same vectors with the pairing replaced.
    pub fn with_pairing(&self, low: Vec<usize>, high: Vec<usize>) -> Result<Self> {
        Self::new(self.w.clone(), self.v.clone(), low, high)
    }

    /// `max |vᴴ w − I|`.
    pub fn biorthogonality_deviation(&self) -> f64 {
        let g = self
            .v
            .conj_transpose()
            .matmul(&self.w)
            .expect("square bases");
        g.sub(&DenseMatrix::identity(self.n()))
            .expect("same shape")
            .max_abs()
    }

    /// Basis of the red coarse grid: `w' = D̅ w_L`, `v' = 2 D̅ v_L`, with the
    /// pairing rediscovered on `coarse` (a partition of the red nodes).
    pub fn red_coarsening(
        &self,
        partition: &RedBlackPartition,
        coarse: &RedBlackPartition,
    ) -> Result<Self> {
        let red = partition.indices(Color::Red);
        let w = self.w.select_rows(red).select_cols(&self.low);
        let v = self
            .v
            .select_rows(red)
            .select_cols(&self.low)
            .scale(Complex64::new(2.0, 0.0));
        Self::with_discovered_pairing(w, v, coarse)
    }
}

/// Result of [`check_rbhap`]. Patterns are in the `low ++ high` column order.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasCheckReport {
    pub pattern_red: DenseMatrix,
    pub pattern_black: DenseMatrix,
    pub max_deviation_red: f64,
    pub max_deviation_black: f64,
    /// `max |red pattern + black pattern − I|`.
    pub complement_deviation: f64,
    pub tol: f64,
    pub passes: bool,
}

/// `vᴴ U D w` for one color, in natural column order.
fn raw_pattern(
    w: &DenseMatrix,
    v: &DenseMatrix,
    partition: &RedBlackPartition,
    color: Color,
) -> Result<DenseMatrix> {
    check_len("pattern (partition)", partition.n(), w.nrows())?;
    let idx = partition.indices(color);
    v.select_rows(idx)
        .conj_transpose()
        .matmul(&w.select_rows(idx))
}

/// `½[[I, ±I], [±I, I]]` of size `n`.
fn aliasing_pattern(n: usize, color: Color) -> DenseMatrix {
    let h = n / 2;
    let off = match color {
        Color::Red => 0.5,
        Color::Black => -0.5,
    };
    DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(0.5, 0.0)
        } else if i % h == j % h {
            Complex64::new(off, 0.0)
        } else {
            Complex64::zero()
        }
    })
}

/// Checks `vᴴ U̅D̅ w = N̅` and `vᴴ ŨD̃ w = Ñ` in the basis' pairing order.
pub fn check_rbhap(
    basis: &BiorthogonalBasis,
    partition: &RedBlackPartition,
    tol: f64,
) -> Result<AliasCheckReport> {
    let n = basis.n();
    check_len("rbhap (partition)", n, partition.n())?;
    let order = basis.ordering();
    let w = basis.w.select_cols(&order);
    let v = basis.v.select_cols(&order);
    let red = raw_pattern(&w, &v, partition, Color::Red)?;
    let black = raw_pattern(&w, &v, partition, Color::Black)?;
    let complement_deviation = red.add(&black)?.sub(&DenseMatrix::identity(n))?.max_abs();
    if complement_deviation > tol {
        return Err(Error::NotBiorthogonal {
            deviation: complement_deviation,
        });
    }
    let max_deviation_red = red.sub(&aliasing_pattern(n, Color::Red))?.max_abs();
    let max_deviation_black = black.sub(&aliasing_pattern(n, Color::Black))?.max_abs();
    Ok(AliasCheckReport {
        passes: max_deviation_red <= tol && max_deviation_black <= tol,
        pattern_red: red,
        pattern_black: black,
        max_deviation_red,
        max_deviation_black,
        complement_deviation,
        tol,
    })
}

/// Largest violation of `D̅x_L = D̅x_H` and `D̃x_L = −D̃x_H`, for `x = w, v`, columnwise.
pub fn surjective_form_deviation(
    basis: &BiorthogonalBasis,
    partition: &RedBlackPartition,
) -> Result<f64> {
    check_len("surjective form (partition)", basis.n(), partition.n())?;
    let mut dev: f64 = 0.0;
    for m in [&basis.w, &basis.v] {
        for (&l, &h) in basis.low.iter().zip(&basis.high) {
            for i in 0..basis.n() {
                let (a, b) = (m[(i, l)], m[(i, h)]);
                let d = match partition.color_of(i) {
                    Color::Red => a - b,
                    Color::Black => a + b,
                };
                dev = dev.max(d.norm());
            }
        }
    }
    Ok(dev)
}

pub fn check_surjective_form(
    basis: &BiorthogonalBasis,
    partition: &RedBlackPartition,
    tol: f64,
) -> Result<bool> {
    Ok(surjective_form_deviation(basis, partition)? <= tol)
}

/// Largest violation of the cross relations `(D v_a)ᴴ (D w_b) = ±½ I` for
/// `a, b ∈ {L, H}` and both colors (the sign is `−` only for black with `a ≠ b`).
pub fn biorthogonal_relations_deviation(
    basis: &BiorthogonalBasis,
    partition: &RedBlackPartition,
) -> Result<f64> {
    check_len("relations (partition)", basis.n(), partition.n())?;
    let h = basis.n() / 2;
    let mut dev: f64 = 0.0;
    for color in Color::BOTH {
        let rows = partition.indices(color);
        let w = basis.w.select_rows(rows);
        let v = basis.v.select_rows(rows);
        for (a, va) in [(0, &basis.low), (1, &basis.high)] {
            for (b, wb) in [(0, &basis.low), (1, &basis.high)] {
                let g = v
                    .select_cols(va)
                    .conj_transpose()
                    .matmul(&w.select_cols(wb))?;
                let s = if color == Color::Black && a != b {
                    -0.5
                } else {
                    0.5
                };
                let target = DenseMatrix::identity(h).scale(Complex64::new(s, 0.0));
                dev = dev.max(g.sub(&target)?.max_abs());
            }
        }
    }
    Ok(dev)
}

/// `W_{ij} = exp(2πi·ij/n)`, `V = W/n`, pairing `j ↔ j + n/2`.
pub fn build_dft_basis_1d(n: usize) -> Result<BiorthogonalBasis> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidProblem(format!(
            "1D DFT basis needs an even size, got {n}"
        )));
    }
    let w = DenseMatrix::from_fn(n, n, |i, j| root_of_unity(i * j, n));
    let v = w.scale(Complex64::new(1.0 / n as f64, 0.0));
    let h = n / 2;
    BiorthogonalBasis::new(w, v, (0..h).collect(), (h..n).collect())
}

/// 2D DFT on the `side × side` torus (node and column ids `i·side + j`),
/// `V = W/side²`, pairing `(p, q) ↔ (p + side/2, q + side/2)`.
///
/// The low member of a pair is the one with smaller wrap-aware frequency
/// `min(p, side−p) + min(q, side−q)`, ties going to the smaller id.
pub fn build_dft_basis_2d(side: usize) -> Result<BiorthogonalBasis> {
    if side == 0 || side % 2 != 0 {
        return Err(Error::InvalidProblem(format!(
            "2D DFT basis needs an even side, got {side}"
        )));
    }
    let n = side * side;
    let w = DenseMatrix::from_fn(n, n, |a, b| {
        let (i, j) = (a / side, a % side);
        let (p, q) = (b / side, b % side);
        root_of_unity((i * p + j * q) % side, side)
    });
    let v = w.scale(Complex64::new(1.0 / n as f64, 0.0));
    let h = side / 2;
    let dist = |c: usize| {
        let (p, q) = (c / side, c % side);
        p.min(side - p) + q.min(side - q)
    };
    let mut low = Vec::with_capacity(n / 2);
    let mut high = Vec::with_capacity(n / 2);
    for c in 0..n {
        let (p, q) = (c / side, c % side);
        let partner = ((p + h) % side) * side + (q + h) % side;
        let c_is_low = (dist(c), c) < (dist(partner), partner);
        if c_is_low {
            low.push(c);
            high.push(partner);
        }
    }
    BiorthogonalBasis::new(w, v, low, high)
}

/// Eigenvectors of the Dirichlet `{−1, 2, −1}` matrix:
/// `(w_j)_i = (2/(n+1)) sin(ijπ/(n+1))`, dual `v = ((n+1)/2) w`, pairing `k ↔ n+1−k`.
pub fn build_sine_basis(n: usize) -> Result<BiorthogonalBasis> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidProblem(format!(
            "sine basis needs an even size, got {n}"
        )));
    }
    let m = (n + 1) as f64;
    let w = DenseMatrix::from_fn(n, n, |i, j| {
        Complex64::new(2.0 / m * (((i + 1) * (j + 1)) as f64 * PI / m).sin(), 0.0)
    });
    let v = w.scale(Complex64::new(m / 2.0, 0.0));
    BiorthogonalBasis::new(
        w,
        v,
        (0..n / 2).collect(),
        (0..n / 2).map(|c| n - 1 - c).collect(),
    )
}

fn root_of_unity(k: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k % n) as f64 / n as f64)
}

/// Outcome of one level of [`check_multigrid_harmonic_basis`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LevelAliasReport {
    pub level: usize,
    pub size: usize,
    pub max_deviation_red: f64,
    pub max_deviation_black: f64,
    pub surjective_deviation: f64,
    pub passes: bool,
}

/// Runs [`check_rbhap`] down the red path of `hierarchy` for `levels` levels,
/// re-deriving the coarse basis `(D̅w_L, 2D̅v_L)` at each step.
///
/// Stops early (without failing) once the grid reaches the hierarchy's base size.
pub fn check_multigrid_harmonic_basis<H: PartitionHierarchy + ?Sized>(
    basis: &BiorthogonalBasis,
    hierarchy: &H,
    levels: usize,
    tol: f64,
) -> Result<Vec<LevelAliasReport>> {
    let mut out = Vec::new();
    let mut basis = basis.clone();
    let mut nodes: Vec<usize> = (0..basis.n()).collect();
    let mut partition = hierarchy.partition(0, &nodes)?;
    for level in 0..levels {
        if nodes.len() <= hierarchy.n0() && level > 0 {
            break;
        }
        let report = check_rbhap(&basis, &partition, tol)?;
        let surj = surjective_form_deviation(&basis, &partition)?;
        out.push(LevelAliasReport {
            level,
            size: nodes.len(),
            max_deviation_red: report.max_deviation_red,
            max_deviation_black: report.max_deviation_black,
            surjective_deviation: surj,
            passes: report.passes && surj <= tol,
        });
        if level + 1 == levels || nodes.len() / 2 <= hierarchy.n0() || nodes.len() < 4 {
            break;
        }
        let coarse_nodes = partition.select(Color::Red, &nodes);
        let coarse = hierarchy.partition(level + 1, &coarse_nodes)?;
        basis = basis.red_coarsening(&partition, &coarse)?;
        nodes = coarse_nodes;
        partition = coarse;
    }
    Ok(out)
}

/// `(W, V)` from any invertible `W`, with `V = (W⁻¹)ᴴ`.
pub fn dual_of(w: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(w.inverse()?.conj_transpose())
}
