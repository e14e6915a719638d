//! Built-in problem families: periodic Helmholtz in 1D and 2D, and the 1D
//! Dirichlet Laplacian, each with its partition hierarchy and eigenbasis.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use num_complex::Complex64;

use crate::aliasing::{
    build_dft_basis_1d, build_dft_basis_2d, build_sine_basis, BiorthogonalBasis,
};
use crate::multigrid::{
    LocalEvensHierarchy, PartitionHierarchy, SingleLevelHierarchy, TorusHierarchy, DEFAULT_N0,
};
use crate::partition::RedBlackPartition;
use crate::{DenseVector, Error, Result, SparseMatrix};

/// The wavenumber `π/3` used throughout the examples.
pub const K_PI_OVER_3: f64 = PI / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Geometry {
    /// Periodic 1D grid of `n` nodes.
    Ring { n: usize },
    /// Periodic `side × side` grid, node id `i·side + j`.
    Torus { side: usize },
    /// 1D grid of `n` interior nodes with zero boundary values.
    Segment { n: usize },
    /// No geometry attached (user-supplied matrix).
    General { n: usize },
}

impl Geometry {
    pub fn size(&self) -> usize {
        match *self {
            Geometry::Ring { n } | Geometry::Segment { n } | Geometry::General { n } => n,
            Geometry::Torus { side } => side * side,
        }
    }
}

/// Hierarchies shipped with the built-in families.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinHierarchy {
    LocalEvens(LocalEvensHierarchy),
    Torus(TorusHierarchy),
    SingleLevel(SingleLevelHierarchy),
}

impl PartitionHierarchy for BuiltinHierarchy {
    fn partition(&self, level: usize, nodes: &[usize]) -> Result<RedBlackPartition> {
        match self {
            Self::LocalEvens(h) => h.partition(level, nodes),
            Self::Torus(h) => h.partition(level, nodes),
            Self::SingleLevel(h) => h.partition(level, nodes),
        }
    }

    fn n0(&self) -> usize {
        match self {
            Self::LocalEvens(h) => h.n0(),
            Self::Torus(h) => h.n0(),
            Self::SingleLevel(h) => h.n0(),
        }
    }

    fn max_levels(&self) -> usize {
        match self {
            Self::LocalEvens(h) => h.max_levels(),
            Self::Torus(h) => h.max_levels(),
            Self::SingleLevel(h) => h.max_levels(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Family {
    Helmholtz1d { k: f64 },
    Helmholtz2d { k: f64 },
    Dirichlet1d,
    Custom,
}

/// A system matrix on a known geometry, with the hierarchy used to solve it.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    matrix: SparseMatrix,
    geometry: Geometry,
    hierarchy: BuiltinHierarchy,
    family: Family,
}

impl ProblemInstance {
    /// A user-supplied square matrix solved with the local-evens hierarchy.
    pub fn custom(matrix: SparseMatrix, n0: usize) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidProblem(format!(
                "matrix is {}x{}, expected square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let n = matrix.nrows();
        Ok(Self {
            matrix,
            geometry: Geometry::General { n },
            hierarchy: BuiltinHierarchy::LocalEvens(LocalEvensHierarchy::new(n0)),
            family: Family::Custom,
        })
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn hierarchy(&self) -> &BuiltinHierarchy {
        &self.hierarchy
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    /// Same problem with a different base-case size. Has no effect on the
    /// single-level Dirichlet hierarchy.
    pub fn with_n0(mut self, n0: usize) -> Self {
        self.hierarchy = match self.hierarchy {
            BuiltinHierarchy::LocalEvens(_) => {
                BuiltinHierarchy::LocalEvens(LocalEvensHierarchy::new(n0))
            }
            BuiltinHierarchy::Torus(h) => {
                BuiltinHierarchy::Torus(TorusHierarchy::new(h.side(), n0))
            }
            h @ BuiltinHierarchy::SingleLevel(_) => h,
        };
        self
    }

    /// Analytic eigenvalues, ordered like the columns of [`Self::eigenbasis`].
    pub fn eigenvalues(&self) -> Option<Vec<Complex64>> {
        let c = |x: f64| Complex64::new(x, 0.0);
        match (self.family, self.geometry) {
            (Family::Helmholtz1d { k }, Geometry::Ring { n }) => Some(
                (0..n)
                    .map(|j| c(2.0 - 2.0 * (2.0 * PI * j as f64 / n as f64).cos() - k * k))
                    .collect(),
            ),
            (Family::Helmholtz2d { k }, Geometry::Torus { side }) => Some(
                (0..side * side)
                    .map(|b| {
                        let (p, q) = ((b / side) as f64, (b % side) as f64);
                        let t = 2.0 * PI / side as f64;
                        c(4.0 - k * k - 2.0 * (t * p).cos() - 2.0 * (t * q).cos())
                    })
                    .collect(),
            ),
            (Family::Dirichlet1d, Geometry::Segment { n }) => Some(
                (1..=n)
                    .map(|j| c(2.0 - 2.0 * (j as f64 * PI / (n + 1) as f64).cos()))
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Smallest eigenvalue magnitude; zero means the matrix is singular.
    pub fn min_abs_eigenvalue(&self) -> Option<f64> {
        self.eigenvalues()
            .map(|l| l.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min))
    }

    /// The analytic eigenbasis, built densely (verification scale).
    pub fn eigenbasis(&self) -> Option<Result<BiorthogonalBasis>> {
        match self.geometry {
            _ if self.family == Family::Custom => None,
            Geometry::Ring { n } => Some(build_dft_basis_1d(n)),
            Geometry::Torus { side } => Some(build_dft_basis_2d(side)),
            Geometry::Segment { n } => Some(build_sine_basis(n)),
            Geometry::General { .. } => None,
        }
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `[−1, 2−k², −1]` on a ring of `n` nodes.
pub fn helmholtz_periodic_1d(n: usize, k: f64) -> Result<ProblemInstance> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidProblem(format!(
            "ring size must be even and at least 2, got {n}"
        )));
    }
    let d = real(2.0 - k * k);
    let m1 = real(-1.0);
    let matrix = SparseMatrix::from_triplets(
        n,
        n,
        (0..n).flat_map(|i| [(i, i, d), (i, (i + 1) % n, m1), (i, (i + n - 1) % n, m1)]),
    )?;
    Ok(ProblemInstance {
        matrix,
        geometry: Geometry::Ring { n },
        hierarchy: BuiltinHierarchy::LocalEvens(LocalEvensHierarchy::new(DEFAULT_N0)),
        family: Family::Helmholtz1d { k },
    })
}

/// 5-point stencil `[−1; −1, 4−k², −1; −1]` on the `side × side` torus.
pub fn helmholtz_periodic_2d(side: usize, k: f64) -> Result<ProblemInstance> {
    if side < 2 || side % 2 != 0 {
        return Err(Error::InvalidProblem(format!(
            "torus side must be even and at least 2, got {side}"
        )));
    }
    let d = real(4.0 - k * k);
    let m1 = real(-1.0);
    let id = |i: usize, j: usize| (i % side) * side + j % side;
    let matrix = SparseMatrix::from_triplets(
        side * side,
        side * side,
        (0..side).flat_map(|i| {
            (0..side).flat_map(move |j| {
                let me = id(i, j);
                [
                    (me, me, d),
                    (me, id(i + 1, j), m1),
                    (me, id(i + side - 1, j), m1),
                    (me, id(i, j + 1), m1),
                    (me, id(i, j + side - 1), m1),
                ]
            })
        }),
    )?;
    Ok(ProblemInstance {
        matrix,
        geometry: Geometry::Torus { side },
        hierarchy: BuiltinHierarchy::Torus(TorusHierarchy::new(side, DEFAULT_N0)),
        family: Family::Helmholtz2d { k },
    })
}

/// Tridiagonal `{−1, 2, −1}` with zero boundary values, split once into
/// even (red) and odd (black) positions.
pub fn dirichlet_laplacian_1d(n: usize) -> Result<ProblemInstance> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidProblem(format!(
            "segment size must be even and at least 2, got {n}"
        )));
    }
    let matrix = SparseMatrix::from_triplets(
        n,
        n,
        (0..n).flat_map(|i| {
            let mut t = Vec::with_capacity(3);
            t.push((i, i, real(2.0)));
            if i > 0 {
                t.push((i, i - 1, real(-1.0)));
            }
            if i + 1 < n {
                t.push((i, i + 1, real(-1.0)));
            }
            t
        }),
    )?;
    Ok(ProblemInstance {
        matrix,
        geometry: Geometry::Segment { n },
        hierarchy: BuiltinHierarchy::SingleLevel(SingleLevelHierarchy::new(
            RedBlackPartition::evens(n)?,
        )),
        family: Family::Dirichlet1d,
    })
}

/// Right-hand sides of the examples.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum SourceSpec {
    /// `f(i,j) = sin(iπ/16) sin(jπ/16) + sin(iπ/2) sin(jπ/2)` on a torus.
    TwoFrequency,
    /// `1` on the four nodes `(side/2−1 .. side/2)²` of a torus, `0` elsewhere.
    PointPatch,
    /// `e₀`.
    UnitImpulse,
    /// Explicit values, e.g. loaded from a file.
    Values { values: Vec<Complex64> },
}

pub fn make_source(spec: &SourceSpec, problem: &ProblemInstance) -> Result<DenseVector> {
    let n = problem.size();
    let torus = |what: &str| match problem.geometry() {
        Geometry::Torus { side } => Ok(side),
        g => Err(Error::InvalidProblem(format!(
            "{what} source needs a torus, got {g:?}"
        ))),
    };
    match spec {
        SourceSpec::TwoFrequency => {
            let side = torus("two-frequency")?;
            Ok((0..n)
                .map(|a| {
                    let (i, j) = ((a / side) as f64, (a % side) as f64);
                    real(
                        (i * PI / 16.0).sin() * (j * PI / 16.0).sin()
                            + (i * PI / 2.0).sin() * (j * PI / 2.0).sin(),
                    )
                })
                .collect())
        }
        SourceSpec::PointPatch => {
            let side = torus("point-patch")?;
            let mut f = DenseVector::zeros(n);
            for i in side / 2 - 1..=side / 2 {
                for j in side / 2 - 1..=side / 2 {
                    f[i * side + j] = real(1.0);
                }
            }
            Ok(f)
        }
        SourceSpec::UnitImpulse => Ok(DenseVector::unit(n, 0)),
        SourceSpec::Values { values } => {
            crate::linalg::check_len("source values", n, values.len())?;
            DenseVector::new(values.clone())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aliasing::{check_multigrid_harmonic_basis, check_rbhap};
    use crate::c64;
    use crate::DenseMatrix;
    use alloc::vec;

    #[test]
    fn two_node_ring_doubles_the_neighbour() {
        let p = helmholtz_periodic_1d(2, 0.0).unwrap();
        assert_eq!(
            p.matrix().to_dense(),
            DenseMatrix::from_row_major(
                2,
                2,
                vec![c64(2.0, 0.0), c64(-2.0, 0.0), c64(-2.0, 0.0), c64(2.0, 0.0)]
            )
            .unwrap()
        );
        assert!(helmholtz_periodic_1d(7, 0.0).is_err());
    }

    #[test]
    fn row_sums_are_minus_k_squared() {
        let k = K_PI_OVER_3;
        for p in [
            helmholtz_periodic_1d(16, k).unwrap(),
            helmholtz_periodic_2d(8, k).unwrap(),
        ] {
            let s = p.matrix().spmv(&DenseVector::ones(p.size())).unwrap();
            assert!(s.iter().all(|z| (z - c64(-k * k, 0.0)).norm() < 1e-14));
            assert!(p.matrix().is_hermitian());
        }
    }

    /// `W Λ V^H` assembled densely against the stored matrix.
    fn eigen_residual(p: &ProblemInstance) -> f64 {
        let b = p.eigenbasis().unwrap().unwrap();
        let lam = p.eigenvalues().unwrap();
        let wl = DenseMatrix::from_fn(p.size(), p.size(), |i, j| b.w()[(i, j)] * lam[j]);
        let a = wl.matmul(&b.v().conj_transpose()).unwrap();
        a.sub(&p.matrix().to_dense()).unwrap().max_abs()
    }

    #[test]
    fn analytic_eigenvalues_reassemble_the_matrix() {
        assert!(eigen_residual(&helmholtz_periodic_1d(8, K_PI_OVER_3).unwrap()) < 1e-12);
        assert!(eigen_residual(&helmholtz_periodic_2d(4, K_PI_OVER_3).unwrap()) < 1e-12);
        assert!(eigen_residual(&dirichlet_laplacian_1d(8).unwrap()) < 1e-12);
    }

    #[test]
    fn dirichlet_small_and_pattern() {
        let p = dirichlet_laplacian_1d(2).unwrap();
        assert_eq!(
            p.matrix().to_dense(),
            DenseMatrix::from_row_major(
                2,
                2,
                vec![c64(2.0, 0.0), c64(-1.0, 0.0), c64(-1.0, 0.0), c64(2.0, 0.0)]
            )
            .unwrap()
        );
        let p = dirichlet_laplacian_1d(8).unwrap();
        let b = p.eigenbasis().unwrap().unwrap();
        let part = RedBlackPartition::evens(8).unwrap();
        assert!(check_rbhap(&b, &part, 1e-12).unwrap().passes);
    }

    #[test]
    fn torus_system_and_mirror() {
        let p = helmholtz_periodic_2d(32, K_PI_OVER_3).unwrap();
        assert_eq!(p.size(), 1024);
        assert!(p
            .matrix()
            .diagonal()
            .iter()
            .all(|&d| (d - c64(4.0 - PI * PI / 9.0, 0.0)).norm() < 1e-14));
        assert!(p.min_abs_eigenvalue().unwrap() > 1e-3);
        let chess = p
            .hierarchy()
            .partition(0, &(0..1024).collect::<Vec<_>>())
            .unwrap();
        let m = chess.mirror(p.matrix()).unwrap();
        assert!(m.triplets().all(|(i, j, z)| i == j || z == c64(1.0, 0.0)));
    }

    #[test]
    fn laplacian_nullvector() {
        let p = helmholtz_periodic_2d(8, 0.0).unwrap();
        let r = p.matrix().spmv(&DenseVector::ones(64)).unwrap();
        assert!(r.norm_linf() == 0.0);
        assert_eq!(p.min_abs_eigenvalue(), Some(0.0));
    }

    #[test]
    fn sources() {
        let p = helmholtz_periodic_2d(32, K_PI_OVER_3).unwrap();
        let f = make_source(&SourceSpec::PointPatch, &p).unwrap();
        let nz: Vec<usize> = (0..1024).filter(|&i| f[i] != c64(0.0, 0.0)).collect();
        assert_eq!(
            nz,
            vec![15 * 32 + 15, 15 * 32 + 16, 16 * 32 + 15, 16 * 32 + 16]
        );
        assert!(nz.iter().all(|&i| f[i] == c64(1.0, 0.0)));
        let f = make_source(&SourceSpec::TwoFrequency, &p).unwrap();
        let expect =
            (3.0 * PI / 16.0).sin() * (5.0 * PI / 16.0).sin() + (1.5 * PI).sin() * (2.5 * PI).sin();
        assert!((f[3 * 32 + 5].re - expect).abs() < 1e-15);
        assert_eq!(
            make_source(&SourceSpec::UnitImpulse, &p).unwrap(),
            DenseVector::unit(1024, 0)
        );
        let ring = helmholtz_periodic_1d(16, 1.0).unwrap();
        assert!(make_source(&SourceSpec::PointPatch, &ring).is_err());
        assert!(make_source(
            &SourceSpec::Values {
                values: vec![c64(1.0, 0.0); 3]
            },
            &ring
        )
        .is_err());
    }

    #[test]
    fn eigenbases_pass_the_multilevel_gate() {
        let p = helmholtz_periodic_1d(64, K_PI_OVER_3).unwrap();
        let b = p.eigenbasis().unwrap().unwrap();
        let r = check_multigrid_harmonic_basis(&b, p.hierarchy(), 8, 1e-10).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|l| l.passes));

        let p = helmholtz_periodic_2d(8, K_PI_OVER_3).unwrap().with_n0(2);
        let b = p.eigenbasis().unwrap().unwrap();
        let r = check_multigrid_harmonic_basis(&b, p.hierarchy(), 8, 1e-10).unwrap();
        assert!(r.len() >= 4);
        assert!(r.iter().all(|l| l.passes));

        let p = dirichlet_laplacian_1d(8).unwrap();
        let b = p.eigenbasis().unwrap().unwrap();
        let r = check_multigrid_harmonic_basis(&b, p.hierarchy(), 8, 1e-10).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].passes);
    }
}
