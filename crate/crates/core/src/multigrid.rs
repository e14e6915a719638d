//! Recursive direct multigrid drivers.
//!
//! [`dmg_multiplicative`] runs the nested-iteration / correction pair on the
//! red and black grids (a W-cycle that degenerates towards a V-cycle when
//! red coarse matrices are diagonal). [`dmg_additive`] solves both coarse
//! systems independently and sums the interpolated results.
//! [`dmg_additive_multichannel`] flattens the additive tree into channels.
//!
//! Multiplications are counted as one per complex product (divisions
//! included); index operations and additions are free.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

use num_complex::Complex64;
use num_traits::Zero;

use crate::linalg::{relative_residual, restricted_product, SparseMatrix};
use crate::partition::{Color, RedBlackPartition};
use crate::{Error, Result};

/// Default base-case size.
pub const DEFAULT_N0: usize = 16;

/// Off-diagonal magnitude, relative to the largest entry, below which a
/// coarse matrix is solved as a diagonal one.
pub const DIAGONAL_TOL: f64 = 1e-14;

/// Supplies the red–black partition of every grid in a recursion.
///
/// A grid is described by its depth `level` and by the ids of the original
/// unknowns it carries, in ascending order.
pub trait PartitionHierarchy: Sync {
    fn partition(&self, level: usize, nodes: &[usize]) -> Result<RedBlackPartition>;

    /// Grids of at most this size are solved by dense LU.
    fn n0(&self) -> usize;

    /// Deepest level the hierarchy can partition.
    fn max_levels(&self) -> usize {
        usize::MAX
    }
}

/// Red = even local positions, at every level. The 1D ring hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalEvensHierarchy {
    n0: usize,
}

impl LocalEvensHierarchy {
    pub fn new(n0: usize) -> Self {
        Self { n0: n0.max(1) }
    }
}

impl PartitionHierarchy for LocalEvensHierarchy {
    fn partition(&self, _level: usize, nodes: &[usize]) -> Result<RedBlackPartition> {
        RedBlackPartition::evens(nodes.len())
    }

    fn n0(&self) -> usize {
        self.n0
    }
}

/// Hierarchy of the `side × side` torus (node id `i·side + j`).
///
/// Even levels `2m` colour the lattice of spacing `s = 2^m` as a chessboard;
/// odd levels `2m+1` split the rotated lattice by row parity at spacing `2^m`.
/// Coordinates are taken relative to the first node of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusHierarchy {
    side: usize,
    n0: usize,
}

impl TorusHierarchy {
    pub fn new(side: usize, n0: usize) -> Self {
        Self {
            side,
            n0: n0.max(1),
        }
    }

    pub fn side(&self) -> usize {
        self.side
    }
}

impl PartitionHierarchy for TorusHierarchy {
    fn partition(&self, level: usize, nodes: &[usize]) -> Result<RedBlackPartition> {
        let side = self.side;
        let s = 1usize << (level / 2);
        if side % (2 * s) != 0 {
            return Err(Error::HierarchyExhausted {
                level,
                size: nodes.len(),
            });
        }
        let (oi, oj) = match nodes.first() {
            Some(&o) => (o / side, o % side),
            None => return Err(Error::HierarchyExhausted { level, size: 0 }),
        };
        let rel = |c: usize, o: usize| (c + side - o) % side;
        RedBlackPartition::from_predicate(nodes.len(), |k| {
            let (i, j) = (nodes[k] / side, nodes[k] % side);
            let (di, dj) = (rel(i, oi), rel(j, oj));
            if level % 2 == 0 {
                (di / s + dj / s) % 2 == 0
            } else {
                (di / s) % 2 == 0
            }
        })
        .map_err(|_| Error::HierarchyExhausted {
            level,
            size: nodes.len(),
        })
    }

    fn n0(&self) -> usize {
        self.n0
    }

    fn max_levels(&self) -> usize {
        2 * self.side.trailing_zeros() as usize
    }
}

/// A single red–black split of the top grid; every coarse grid is a base case.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleLevelHierarchy {
    partition: RedBlackPartition,
}

impl SingleLevelHierarchy {
    pub fn new(partition: RedBlackPartition) -> Self {
        Self { partition }
    }
}

impl PartitionHierarchy for SingleLevelHierarchy {
    fn partition(&self, level: usize, nodes: &[usize]) -> Result<RedBlackPartition> {
        if level == 0 && nodes.len() == self.partition.n() {
            Ok(self.partition.clone())
        } else {
            Err(Error::HierarchyExhausted {
                level,
                size: nodes.len(),
            })
        }
    }

    fn n0(&self) -> usize {
        self.partition.half()
    }

    fn max_levels(&self) -> usize {
        1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Method {
    Multiplicative,
    Additive,
}

/// One grid visited by a solve.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LevelVisit {
    pub level: usize,
    /// Colours taken from the top grid, e.g. `"rb"`; empty for the top grid.
    pub path: String,
    pub size: usize,
    pub was_diagonal: bool,
    /// Largest number of stored entries in a row of this grid's matrix.
    pub max_row_nnz: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveReport {
    pub method: Method,
    pub solution: crate::DenseVector,
    pub multiplications: u64,
    pub levels_visited: Vec<LevelVisit>,
    /// `‖f − A v‖₂ / ‖f‖₂` on the original system.
    pub relative_residual: f64,
    /// Zero when built without `std`.
    pub wall_time: Duration,
}

impl SolveReport {
    /// Share of visited grids that were solved by the diagonal shortcut.
    pub fn diagonal_fraction(&self) -> f64 {
        if self.levels_visited.is_empty() {
            return 0.0;
        }
        let d = self
            .levels_visited
            .iter()
            .filter(|v| v.was_diagonal)
            .count();
        d as f64 / self.levels_visited.len() as f64
    }

    pub fn max_level(&self) -> usize {
        self.levels_visited
            .iter()
            .map(|v| v.level)
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Default)]
pub(crate) struct Trace {
    pub(crate) multiplications: u64,
    pub(crate) visits: Vec<LevelVisit>,
}

impl Trace {
    fn merge(&mut self, other: Trace) {
        self.multiplications += other.multiplications;
        self.visits.extend(other.visits);
    }
}

struct Stopwatch {
    #[cfg(feature = "std")]
    start: std::time::Instant,
}

impl Stopwatch {
    fn start() -> Self {
        Self {
            #[cfg(feature = "std")]
            start: std::time::Instant::now(),
        }
    }

    fn elapsed(&self) -> Duration {
        #[cfg(feature = "std")]
        {
            self.start.elapsed()
        }
        #[cfg(not(feature = "std"))]
        {
            Duration::ZERO
        }
    }
}

fn check_system(a: &SparseMatrix, f: &[Complex64]) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            op: "solve (square)",
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    crate::linalg::check_len("solve (rhs)", a.nrows(), f.len())?;
    if f.is_empty() {
        return Err(Error::EmptyVector);
    }
    if let Some(index) = f.iter().position(|z| !z.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(())
}

fn finish(
    method: Method,
    a: &SparseMatrix,
    f: &[Complex64],
    u: Vec<Complex64>,
    trace: Trace,
    clock: Stopwatch,
) -> Result<SolveReport> {
    let wall_time = clock.elapsed();
    let relative_residual = relative_residual(a, &u, f)?;
    Ok(SolveReport {
        method,
        solution: u.into(),
        multiplications: trace.multiplications,
        levels_visited: trace.visits,
        relative_residual,
        wall_time,
    })
}

/// Multiplicative direct multigrid: `v̄` from the red grid, then the black
/// grid corrects the residual through the mirror interpolation `A*Ũ`.
pub fn dmg_multiplicative<H: PartitionHierarchy + ?Sized>(
    a: &SparseMatrix,
    f: &[Complex64],
    hierarchy: &H,
) -> Result<SolveReport> {
    check_system(a, f)?;
    let clock = Stopwatch::start();
    let nodes: Vec<usize> = (0..a.nrows()).collect();
    let mut trace = Trace::default();
    let u = solve_grid(
        Method::Multiplicative,
        a,
        f,
        &nodes,
        0,
        "",
        hierarchy,
        &mut trace,
    )?;
    finish(Method::Multiplicative, a, f, u, trace, clock)
}

/// Additive direct multigrid: both grids use the mirror interpolation and are
/// solved independently (concurrently under `std`).
pub fn dmg_additive<H: PartitionHierarchy + ?Sized>(
    a: &SparseMatrix,
    f: &[Complex64],
    hierarchy: &H,
) -> Result<SolveReport> {
    check_system(a, f)?;
    let clock = Stopwatch::start();
    let nodes: Vec<usize> = (0..a.nrows()).collect();
    let mut trace = Trace::default();
    let u = solve_grid(Method::Additive, a, f, &nodes, 0, "", hierarchy, &mut trace)?;
    finish(Method::Additive, a, f, u, trace, clock)
}

pub fn dmg_solve<H: PartitionHierarchy + ?Sized>(
    method: Method,
    a: &SparseMatrix,
    f: &[Complex64],
    hierarchy: &H,
) -> Result<SolveReport> {
    match method {
        Method::Multiplicative => dmg_multiplicative(a, f, hierarchy),
        Method::Additive => dmg_additive(a, f, hierarchy),
    }
}

/// Solves the system of a grid below the top of a recursion.
#[allow(clippy::too_many_arguments)]
pub(crate) fn solve_subgrid<H: PartitionHierarchy + ?Sized>(
    method: Method,
    a: &SparseMatrix,
    f: &[Complex64],
    nodes: &[usize],
    level: usize,
    path: &str,
    hierarchy: &H,
    trace: &mut Trace,
) -> Result<Vec<Complex64>> {
    solve_grid(method, a, f, nodes, level, path, hierarchy, trace)
}

fn child_path(path: &str, c: Color) -> String {
    let mut p = String::with_capacity(path.len() + 1);
    p.push_str(path);
    p.push(c.letter());
    p
}

/// `D_color A A* U_color` without forming `A*` products outside the grid.
pub(crate) fn mirrored_coarse(
    a: &SparseMatrix,
    mirror: &SparseMatrix,
    p: &RedBlackPartition,
    color: Color,
    work: &mut u64,
) -> SparseMatrix {
    restricted_product(
        a,
        mirror,
        p.indices(color),
        &p.column_map(color),
        p.half(),
        work,
    )
    .canonicalize(0.0)
}

/// `y += A* U_color x`, touching only the columns of `color`.
fn add_mirror_interpolation(
    mirror: &SparseMatrix,
    p: &RedBlackPartition,
    color: Color,
    x: &[Complex64],
    y: &mut [Complex64],
    work: &mut u64,
) {
    let cmap = p.column_map(color);
    for (i, yi) in y.iter_mut().enumerate() {
        let (cols, vals) = mirror.row(i);
        for (&j, &z) in cols.iter().zip(vals) {
            if let Some(jj) = cmap[j] {
                *yi += z * x[jj];
                *work += 1;
            }
        }
    }
}

fn is_effectively_diagonal(a: &SparseMatrix) -> bool {
    a.is_diagonal(DIAGONAL_TOL * a.max_abs())
}

fn singular(level: usize, path: &str) -> Error {
    Error::SingularCoarseMatrix {
        level,
        path: String::from(path),
    }
}

fn base_solve(
    a: &SparseMatrix,
    f: &[Complex64],
    level: usize,
    path: &str,
    work: &mut u64,
) -> Result<Vec<Complex64>> {
    let lu = a.to_dense().lu_counted(work).map_err(|e| match e {
        Error::SingularMatrix { pivot } if level == 0 => Error::SingularMatrix { pivot },
        Error::SingularMatrix { .. } => singular(level, path),
        other => other,
    })?;
    Ok(lu.solve_counted(f, work)?.into_inner())
}

fn diagonal_solve(
    a: &SparseMatrix,
    f: &[Complex64],
    level: usize,
    path: &str,
    work: &mut u64,
) -> Result<Vec<Complex64>> {
    let d = a.diagonal();
    let threshold = crate::linalg::SINGULAR_PIVOT_RATIO * a.max_abs();
    let mut u = Vec::with_capacity(d.len());
    for (i, (&di, &fi)) in d.iter().zip(f).enumerate() {
        if di.norm() <= threshold || di.is_zero() {
            return Err(if level == 0 {
                Error::SingularMatrix { pivot: i }
            } else {
                singular(level, path)
            });
        }
        u.push(fi / di);
    }
    *work += d.len() as u64;
    Ok(u)
}

#[allow(clippy::too_many_arguments)]
fn solve_grid<H: PartitionHierarchy + ?Sized>(
    method: Method,
    a: &SparseMatrix,
    f: &[Complex64],
    nodes: &[usize],
    level: usize,
    path: &str,
    hierarchy: &H,
    trace: &mut Trace,
) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    let diagonal = is_effectively_diagonal(a);
    trace.visits.push(LevelVisit {
        level,
        path: String::from(path),
        size: n,
        was_diagonal: diagonal,
        max_row_nnz: a.max_row_nnz(),
    });
    if diagonal {
        return diagonal_solve(a, f, level, path, &mut trace.multiplications);
    }
    if n <= hierarchy.n0() || level >= hierarchy.max_levels() {
        return base_solve(a, f, level, path, &mut trace.multiplications);
    }
    let p = hierarchy
        .partition(level, nodes)
        .map_err(|_| Error::HierarchyExhausted { level, size: n })?;
    if p.n() != n {
        return Err(Error::HierarchyExhausted { level, size: n });
    }
    let mirror = p.mirror(a)?;
    let red_nodes = p.select(Color::Red, nodes);
    let black_nodes = p.select(Color::Black, nodes);
    let red_path = child_path(path, Color::Red);
    let black_path = child_path(path, Color::Black);

    match method {
        Method::Multiplicative => {
            let f_red = p.downsample(Color::Red, f)?;
            let a_red = p.submatrix(Color::Red, Color::Red, a)?;
            let v_red = solve_grid(
                method,
                &a_red,
                &f_red,
                &red_nodes,
                level + 1,
                &red_path,
                hierarchy,
                trace,
            )?;

            // r̃ = D̃f − (D̃AŪ) v̄
            let a_br = p.submatrix(Color::Black, Color::Red, a)?;
            let mut r_black = p.downsample(Color::Black, f)?.into_inner();
            let mut av = vec![Complex64::zero(); p.half()];
            a_br.mul_vec_into(&v_red, &mut av, &mut trace.multiplications);
            for (r, x) in r_black.iter_mut().zip(&av) {
                *r -= x;
            }
            let a_black = mirrored_coarse(a, &mirror, &p, Color::Black, &mut trace.multiplications);
            let v_black = solve_grid(
                method,
                &a_black,
                &r_black,
                &black_nodes,
                level + 1,
                &black_path,
                hierarchy,
                trace,
            )?;

            let mut u = p.upsample(Color::Red, &v_red)?.into_inner();
            add_mirror_interpolation(
                &mirror,
                &p,
                Color::Black,
                &v_black,
                &mut u,
                &mut trace.multiplications,
            );
            Ok(u)
        }
        Method::Additive => {
            let branch =
                |color: Color, nodes: &[usize], cpath: &str| -> Result<(Vec<Complex64>, Trace)> {
                    let mut t = Trace::default();
                    let fc = p.downsample(color, f)?;
                    let ac = mirrored_coarse(a, &mirror, &p, color, &mut t.multiplications);
                    let v =
                        solve_grid(method, &ac, &fc, nodes, level + 1, cpath, hierarchy, &mut t)?;
                    Ok((v, t))
                };
            let (red, black) = join(
                || branch(Color::Red, &red_nodes, &red_path),
                || branch(Color::Black, &black_nodes, &black_path),
            );
            let (v_red, t_red) = red?;
            let (v_black, t_black) = black?;
            trace.merge(t_red);
            trace.merge(t_black);
            // A*(Ūv̄ + Ũṽ) in one product
            let mut both = p.upsample(Color::Red, &v_red)?;
            for (&i, &z) in p.indices(Color::Black).iter().zip(&v_black) {
                both[i] = z;
            }
            let mut u = vec![Complex64::zero(); n];
            mirror.mul_vec_into(&both, &mut u, &mut trace.multiplications);
            Ok(u)
        }
    }
}

#[cfg(feature = "std")]
fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    rayon::join(a, b)
}

#[cfg(not(feature = "std"))]
fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA,
    B: FnOnce() -> RB,
{
    (a(), b())
}

/// One channel of [`dmg_additive_multichannel`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChannelField {
    /// Colours taken from the top grid, e.g. `"rbr"`.
    pub path: String,
    /// Original unknowns carried by the channel's coarse grid.
    pub nodes: Vec<usize>,
    /// True when the restricted source vanishes, so the solve was skipped.
    pub source_is_zero: bool,
    /// The channel's contribution, interpolated to the top grid.
    pub field: crate::DenseVector,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultichannelReport {
    pub report: SolveReport,
    pub channels: Vec<ChannelField>,
}

impl MultichannelReport {
    pub fn zero_channels(&self) -> usize {
        self.channels.iter().filter(|c| c.source_is_zero).count()
    }
}

/// Additive scheme with the source taken straight to the grids at `depth`.
///
/// Each channel `c ∈ {r, b}^depth` restricts `f` by plain down-sampling,
/// solves its coarse system (by [`dmg_additive`] recursion) and is brought
/// back by the composed mirror interpolations. Channels are summed in
/// lexicographic path order, red first.
pub fn dmg_additive_multichannel<H: PartitionHierarchy + ?Sized>(
    a: &SparseMatrix,
    f: &[Complex64],
    hierarchy: &H,
    depth: usize,
) -> Result<MultichannelReport> {
    check_system(a, f)?;
    if depth > hierarchy.max_levels() {
        return Err(Error::HierarchyExhausted {
            level: depth,
            size: a.nrows(),
        });
    }
    let clock = Stopwatch::start();
    let nodes: Vec<usize> = (0..a.nrows()).collect();
    let mut trace = Trace::default();
    let channels = expand_channels(a, f, &nodes, 0, String::new(), depth, hierarchy, &mut trace)?;
    let mut u = vec![Complex64::zero(); a.nrows()];
    for c in &channels {
        for (x, y) in u.iter_mut().zip(c.field.iter()) {
            *x += y;
        }
    }
    let report = finish(Method::Additive, a, f, u, trace, clock)?;
    Ok(MultichannelReport { report, channels })
}

#[allow(clippy::too_many_arguments)]
fn expand_channels<H: PartitionHierarchy + ?Sized>(
    a: &SparseMatrix,
    f: &[Complex64],
    nodes: &[usize],
    level: usize,
    path: String,
    depth: usize,
    hierarchy: &H,
    trace: &mut Trace,
) -> Result<Vec<ChannelField>> {
    let n = a.nrows();
    if level == depth || n <= hierarchy.n0() {
        let source_is_zero = f.iter().all(|z| z.is_zero());
        let field = if source_is_zero {
            trace.visits.push(LevelVisit {
                level,
                path: path.clone(),
                size: n,
                was_diagonal: false,
                max_row_nnz: a.max_row_nnz(),
            });
            vec![Complex64::zero(); n]
        } else {
            solve_grid(
                Method::Additive,
                a,
                f,
                nodes,
                level,
                &path,
                hierarchy,
                trace,
            )?
        };
        return Ok(vec![ChannelField {
            path,
            nodes: nodes.to_vec(),
            source_is_zero,
            field: field.into(),
        }]);
    }
    trace.visits.push(LevelVisit {
        level,
        path: path.clone(),
        size: n,
        was_diagonal: false,
        max_row_nnz: a.max_row_nnz(),
    });
    let p = hierarchy
        .partition(level, nodes)
        .map_err(|_| Error::HierarchyExhausted { level, size: n })?;
    let mirror = p.mirror(a)?;
    let mut out = Vec::new();
    for color in Color::BOTH {
        let fc = p.downsample(color, f)?;
        let ac = mirrored_coarse(a, &mirror, &p, color, &mut trace.multiplications);
        let cnodes = p.select(color, nodes);
        let children = expand_channels(
            &ac,
            &fc,
            &cnodes,
            level + 1,
            child_path(&path, color),
            depth,
            hierarchy,
            trace,
        )?;
        for mut ch in children {
            let mut lifted = vec![Complex64::zero(); n];
            if !ch.source_is_zero {
                add_mirror_interpolation(
                    &mirror,
                    &p,
                    color,
                    &ch.field,
                    &mut lifted,
                    &mut trace.multiplications,
                );
            }
            ch.field = lifted.into();
            out.push(ch);
        }
    }
    Ok(out)
}

/// One row of [`count_complexity`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComplexityRow {
    pub n: usize,
    pub multiplications: u64,
    pub wall_time: Duration,
    pub diagonal_fraction: f64,
    pub relative_residual: f64,
}

/// Solves the family member of each size with a unit impulse source and
/// records the operation counts.
pub fn count_complexity<F>(sizes: &[usize], method: Method, family: F) -> Result<Vec<ComplexityRow>>
where
    F: Fn(usize) -> Result<crate::problems::ProblemInstance>,
{
    sizes
        .iter()
        .map(|&n| {
            let problem = family(n)?;
            let f =
                crate::problems::make_source(&crate::problems::SourceSpec::UnitImpulse, &problem)?;
            let r = dmg_solve(method, problem.matrix(), &f, problem.hierarchy())?;
            Ok(ComplexityRow {
                n: problem.size(),
                multiplications: r.multiplications,
                wall_time: r.wall_time,
                diagonal_fraction: r.diagonal_fraction(),
                relative_residual: r.relative_residual,
            })
        })
        .collect()
}

/// `m(2n)/m(n)` for consecutive rows whose sizes double.
pub fn doubling_ratios(rows: &[ComplexityRow]) -> Vec<(usize, f64)> {
    rows.windows(2)
        .filter(|w| w[1].n == 2 * w[0].n && w[0].multiplications > 0)
        .map(|w| {
            (
                w[1].n,
                w[1].multiplications as f64 / w[0].multiplications as f64,
            )
        })
        .collect()
}
