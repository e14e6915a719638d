//! Red–black partitions of a grid and the operators they induce.
//!
//! Down/up-sampling are index operations; the 0/1 matrices `D` and
//! `U = Dᵀ` are only materialized on request for verification.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::linalg::{check_len, DenseVector, SparseMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Color {
    Red,
    Black,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::Red => Color::Black,
            Color::Black => Color::Red,
        }
    }

    /// `'r'` or `'b'`, as used in channel paths.
    pub fn letter(self) -> char {
        match self {
            Color::Red => 'r',
            Color::Black => 'b',
        }
    }

    pub const BOTH: [Color; 2] = [Color::Red, Color::Black];
}

/// Disjoint split of `0..n` into two equal halves.
///
/// Both index lists are strictly increasing. The order of a color's list is
/// the order of the coarse-grid unknowns of that color.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(try_from = "PartitionRepr", into = "PartitionRepr")
)]
pub struct RedBlackPartition {
    n: usize,
    red: Vec<usize>,
    black: Vec<usize>,
    colors: Vec<Color>,
    local: Vec<usize>,
}

impl RedBlackPartition {
    /// Builds the partition whose red nodes are `red`; every other node is black.
    pub fn new(n: usize, red: Vec<usize>) -> Result<Self> {
        if n == 0 || n % 2 != 0 {
            return Err(Error::InvalidPartition(format!(
                "node count {n} must be even and positive"
            )));
        }
        if red.len() != n / 2 {
            return Err(Error::InvalidPartition(format!(
                "red half has {} nodes, expected {}",
                red.len(),
                n / 2
            )));
        }
        if red.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPartition(
                "red indices must be strictly increasing".into(),
            ));
        }
        if let Some(&bad) = red.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidPartition(format!(
                "red index {bad} out of range 0..{n}"
            )));
        }
        let mut colors = vec![Color::Black; n];
        for &i in &red {
            colors[i] = Color::Red;
        }
        let black: Vec<usize> = (0..n).filter(|&i| colors[i] == Color::Black).collect();
        let mut local = vec![0; n];
        for (k, &i) in red.iter().enumerate() {
            local[i] = k;
        }
        for (k, &i) in black.iter().enumerate() {
            local[i] = k;
        }
        Ok(Self {
            n,
            red,
            black,
            colors,
            local,
        })
    }

    /// Partition whose red nodes are those where `is_red` holds.
    pub fn from_predicate(n: usize, is_red: impl Fn(usize) -> bool) -> Result<Self> {
        Self::new(n, (0..n).filter(|&i| is_red(i)).collect())
    }

    /// Even indices red, odd indices black.
    pub fn evens(n: usize) -> Result<Self> {
        Self::from_predicate(n, |i| i % 2 == 0)
    }

    /// Odd indices red, even indices black.
    pub fn odds(n: usize) -> Result<Self> {
        Self::from_predicate(n, |i| i % 2 == 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Size of each coarse grid, `n / 2`.
    pub fn half(&self) -> usize {
        self.n / 2
    }

    pub fn indices(&self, color: Color) -> &[usize] {
        match color {
            Color::Red => &self.red,
            Color::Black => &self.black,
        }
    }

    pub fn color_of(&self, i: usize) -> Color {
        self.colors[i]
    }

    /// Position of node `i` within its color's list.
    pub fn local_index(&self, i: usize) -> usize {
        self.local[i]
    }

    /// For each fine node, its coarse index if it has color `color`.
    pub fn column_map(&self, color: Color) -> Vec<Option<usize>> {
        (0..self.n)
            .map(|i| (self.colors[i] == color).then(|| self.local[i]))
            .collect()
    }

    /// `+1` on red nodes, `−1` on black nodes.
    pub fn sign_vector(&self) -> SignVector {
        SignVector(
            self.colors
                .iter()
                .map(|&c| if c == Color::Red { 1 } else { -1 })
                .collect(),
        )
    }

    /// `D x`: the entries of `x` on the nodes of `color`.
    pub fn downsample(&self, color: Color, x: &[Complex64]) -> Result<DenseVector> {
        check_len("downsample", self.n, x.len())?;
        Ok(self.indices(color).iter().map(|&i| x[i]).collect())
    }

    /// `U y`: scatters `y` onto the nodes of `color`, zero elsewhere.
    pub fn upsample(&self, color: Color, y: &[Complex64]) -> Result<DenseVector> {
        check_len("upsample", self.half(), y.len())?;
        let mut out = DenseVector::zeros(self.n);
        for (&i, &z) in self.indices(color).iter().zip(y) {
            out[i] = z;
        }
        Ok(out)
    }

    /// Mirror `M* = S M S`, with `S` the diagonal sign matrix; done as sign flips.
    pub fn mirror(&self, m: &SparseMatrix) -> Result<SparseMatrix> {
        check_len("mirror (rows)", self.n, m.nrows())?;
        check_len("mirror (cols)", self.n, m.ncols())?;
        Ok(m.map_indexed(|i, j, z| {
            if self.colors[i] == self.colors[j] {
                z
            } else {
                -z
            }
        }))
    }

    /// The `(row_color × col_color)` block of `m`, i.e. `D_row M U_col`.
    pub fn submatrix(
        &self,
        row_color: Color,
        col_color: Color,
        m: &SparseMatrix,
    ) -> Result<SparseMatrix> {
        check_len("submatrix (rows)", self.n, m.nrows())?;
        check_len("submatrix (cols)", self.n, m.ncols())?;
        let cmap = self.column_map(col_color);
        let rows = self.indices(row_color);
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for &i in rows {
            let (cols, vals) = m.row(i);
            for (&j, &z) in cols.iter().zip(vals) {
                if let Some(jj) = cmap[j] {
                    // local indices grow with global ones, so rows stay sorted
                    col_idx.push(jj);
                    values.push(z);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(SparseMatrix::from_sorted_rows(
            rows.len(),
            self.half(),
            row_ptr,
            col_idx,
            values,
        ))
    }

    /// Materialized down-sampling matrix `D` (`n/2 × n`). Verification only.
    pub fn down_matrix(&self, color: Color) -> SparseMatrix {
        let one = Complex64::new(1.0, 0.0);
        SparseMatrix::from_triplets(
            self.half(),
            self.n,
            self.indices(color)
                .iter()
                .enumerate()
                .map(|(k, &i)| (k, i, one)),
        )
        .expect("indices are in range")
    }

    /// Materialized up-sampling matrix `U = Dᵀ`. Verification only.
    pub fn up_matrix(&self, color: Color) -> SparseMatrix {
        self.down_matrix(color).transpose()
    }

    /// The node ids of `color`, mapped through `nodes` (ids of this grid's unknowns).
    pub fn select<T: Copy>(&self, color: Color, nodes: &[T]) -> Vec<T> {
        self.indices(color).iter().map(|&i| nodes[i]).collect()
    }
}

/// Diagonal of `U̅D̅ − ŨD̃`: `+1` on red nodes and `−1` on black nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn to_diagonal_matrix(&self) -> SparseMatrix {
        let d: Vec<Complex64> = self
            .0
            .iter()
            .map(|&s| Complex64::new(s as f64, 0.0))
            .collect();
        SparseMatrix::from_diagonal(&d)
    }
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
struct PartitionRepr {
    n: usize,
    red: Vec<usize>,
}

#[cfg(feature = "serde")]
impl TryFrom<PartitionRepr> for RedBlackPartition {
    type Error = Error;
    fn try_from(r: PartitionRepr) -> Result<Self> {
        RedBlackPartition::new(r.n, r.red)
    }
}

#[cfg(feature = "serde")]
impl From<RedBlackPartition> for PartitionRepr {
    fn from(p: RedBlackPartition) -> Self {
        PartitionRepr { n: p.n, red: p.red }
    }
}
