use dmg_core::aliasing::{
    biorthogonal_relations_deviation, build_dft_basis_1d, build_dft_basis_2d, build_sine_basis,
    check_multigrid_harmonic_basis, check_rbhap, surjective_form_deviation, BiorthogonalBasis,
};
use dmg_core::filterbank::{check_vetterli, extract_symbols, make_qmf_bank, run_bank, FilterQuad};
use dmg_core::linalg::{dense_lu_solve, relative_error};
use dmg_core::multigrid::{
    dmg_additive, dmg_additive_multichannel, dmg_multiplicative, PartitionHierarchy,
};
use dmg_core::problems::{
    dirichlet_laplacian_1d, helmholtz_periodic_1d, helmholtz_periodic_2d, ProblemInstance,
    K_PI_OVER_3,
};
use dmg_core::twogrid::{
    additive_factorization, build_coarse, cgc_matrix, cgc_symbol_deviation, cgc_symbols_from,
    check_direct_conditions, galerkin_inverse_deviation, inverse_deviation,
    multiplicative_factorization, TwoGridConfig,
};
use dmg_core::{Color, Complex64, DenseMatrix, Error, RedBlackPartition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{create_dir, write_json};
use crate::config::{BasisChoice, RunConfig, Suite, OUTPUT_DIR_ENV};
use crate::error::{CliError, CliResult};

const DEFAULT_N: usize = 16;
const DEFAULT_SIDE: usize = 8;
const DEFAULT_SEED: u64 = 0x5eed;

/// One numerical check: passes when `value <= tol`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
}

type SuiteFn = fn(&mut Battery) -> CliResult<()>;

struct Battery<'a> {
    cfg: &'a RunConfig,
    checks: Vec<Check>,
}

impl Battery<'_> {
    fn tol(&self, default: f64) -> f64 {
        self.cfg.tolerance.unwrap_or(default)
    }

    fn push(&mut self, suite: &'static str, name: impl Into<String>, value: f64, default_tol: f64) {
        let tol = self.tol(default_tol);
        self.push_fixed(suite, name, value, tol);
    }

    /// A check whose tolerance is structural and not overridable.
    fn push_fixed(&mut self, suite: &'static str, name: impl Into<String>, value: f64, tol: f64) {
        self.checks.push(Check {
            suite,
            name: name.into(),
            value,
            tol,
            passed: value <= tol,
        });
    }

    fn n(&self) -> usize {
        self.cfg.n.unwrap_or(DEFAULT_N)
    }

    fn side(&self) -> usize {
        self.cfg.side.unwrap_or(DEFAULT_SIDE)
    }

    fn k(&self) -> f64 {
        self.cfg.k.unwrap_or(K_PI_OVER_3)
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed.unwrap_or(DEFAULT_SEED))
    }
}

fn chessboard(side: usize) -> CliResult<RedBlackPartition> {
    Ok(RedBlackPartition::from_predicate(side * side, |a| {
        (a / side + a % side) % 2 == 0
    })?)
}

fn basis_for(
    choice: BasisChoice,
    n: usize,
    side: usize,
) -> CliResult<(String, BiorthogonalBasis, RedBlackPartition)> {
    Ok(match choice {
        BasisChoice::Dft1d => (
            format!("dft1d-{n}"),
            build_dft_basis_1d(n)?,
            RedBlackPartition::evens(n)?,
        ),
        BasisChoice::Dft2d => (
            format!("dft2d-{side}"),
            build_dft_basis_2d(side)?,
            chessboard(side)?,
        ),
        BasisChoice::Sine(m) => {
            let m = m.unwrap_or(n);
            (
                format!("sine-{m}"),
                build_sine_basis(m)?,
                RedBlackPartition::evens(m)?,
            )
        }
    })
}

fn aliasing(b: &mut Battery) -> CliResult<()> {
    let (n, side) = (b.n(), b.side());
    let choices = match b.cfg.basis {
        Some(c) => vec![c],
        None => vec![
            BasisChoice::Dft1d,
            BasisChoice::Dft2d,
            BasisChoice::Sine(None),
        ],
    };
    let tol = b.tol(1e-10);
    for choice in choices {
        let (label, basis, p) = basis_for(choice, n, side)?;
        let dev = match check_rbhap(&basis, &p, tol) {
            Ok(r) => r.max_deviation_red.max(r.max_deviation_black),
            Err(Error::NotBiorthogonal { deviation }) => deviation,
            Err(e) => return Err(e.into()),
        };
        b.push("aliasing", format!("rbhap/{label}"), dev, 1e-10);
        b.push(
            "aliasing",
            format!("surjective-form/{label}"),
            surjective_form_deviation(&basis, &p)?,
            1e-10,
        );
        b.push(
            "aliasing",
            format!("biorthogonal-relations/{label}"),
            biorthogonal_relations_deviation(&basis, &p)?,
            1e-10,
        );
    }
    if matches!(b.cfg.basis, None | Some(BasisChoice::Dft1d)) {
        let problem = helmholtz_periodic_1d(n, b.k())?.with_n0(2);
        let basis = build_dft_basis_1d(n)?;
        let levels = check_multigrid_harmonic_basis(&basis, problem.hierarchy(), usize::MAX, tol)?;
        let worst = levels
            .iter()
            .map(|l| {
                l.max_deviation_red
                    .max(l.max_deviation_black)
                    .max(l.surjective_deviation)
            })
            .fold(0.0, f64::max);
        b.push(
            "aliasing",
            format!("multilevel/dft1d-{n} ({} levels)", levels.len()),
            worst,
            1e-10,
        );
    }
    Ok(())
}

fn filterbank(b: &mut Battery) -> CliResult<()> {
    let n = b.n();
    let basis = build_dft_basis_1d(n)?;
    let p = RedBlackPartition::evens(n)?;
    let mut rng = b.rng();
    let theta: Vec<f64> = (0..n / 2)
        .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
        .collect();
    let bank = make_qmf_bank(&basis, &p, &theta)?;
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let s: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        worst = worst.max(relative_error(&run_bank(&bank, &s)?.t, &s));
    }
    b.push("filterbank", "qmf-reconstruction", worst, 1e-12);

    for (label, quad) in [
        ("qmf", bank),
        ("identity-bank", FilterQuad::scaled_identity(p.clone(), 1.0)),
    ] {
        let mut symbols = extract_symbols(&quad, &basis)?;
        if let Some(eps) = b.cfg.break_symbol {
            symbols.interp_black.high[0] += Complex64::new(eps, 0.0);
        }
        let r = check_vetterli(&symbols, b.tol(1e-10))?;
        b.push(
            "filterbank",
            format!("vetterli/{label}"),
            r.max_residual(),
            1e-10,
        );
    }
    Ok(())
}

fn frobenius(m: &DenseMatrix) -> f64 {
    m.frobenius_norm()
}

fn twogrid(b: &mut Battery) -> CliResult<()> {
    let n = b.n();
    let a = helmholtz_periodic_1d(n, b.k())?.matrix().clone();
    let basis = build_dft_basis_1d(n)?;
    let p = RedBlackPartition::evens(n)?;
    let configs = [
        (
            "multiplicative",
            TwoGridConfig::multiplicative_standard(p.clone()),
            dmg_core::multigrid::Method::Multiplicative,
        ),
        (
            "additive",
            TwoGridConfig::additive_standard(p.clone()),
            dmg_core::multigrid::Method::Additive,
        ),
    ];
    for (label, cfg, mode) in configs {
        let (mut quad, lambdas) = cfg.symbols(&a, &basis)?;
        let mut ks = Vec::new();
        for color in Color::BOTH {
            let c = if color == Color::Red { "red" } else { "black" };
            let k = cgc_matrix(&a, &build_coarse(&a, &cfg, color)?)?;
            let s = cgc_symbols_from(&quad, &lambdas, color)?;
            b.push(
                "twogrid",
                format!("cgc-symbols/{label}/{c}"),
                cgc_symbol_deviation(&k, &s, &basis)?,
                1e-9,
            );
            b.push(
                "twogrid",
                format!("galerkin-inverse/{label}/{c}"),
                galerkin_inverse_deviation(&a, &cfg, color, &basis)?,
                1e-10,
            );
            let idem = frobenius(&k.matmul(&k)?.sub(&k)?) / frobenius(&k).max(1.0);
            b.push("twogrid", format!("idempotent/{label}/{c}"), idem, 1e-10);
            ks.push(k);
        }
        let (kr, kb) = (&ks[0], &ks[1]);
        let (name, value, factor) = match mode {
            dmg_core::multigrid::Method::Multiplicative => (
                "black-after-red-vanishes",
                frobenius(&kb.matmul(kr)?) / (frobenius(kb) * frobenius(kr)),
                multiplicative_factorization(&a, &cfg)?,
            ),
            dmg_core::multigrid::Method::Additive => (
                "corrections-sum-to-identity",
                frobenius(&kr.add(kb)?.sub(&DenseMatrix::identity(n))?),
                additive_factorization(&a, &cfg)?,
            ),
        };
        b.push("twogrid", format!("{name}/{label}"), value, 1e-10);
        b.push(
            "twogrid",
            format!("factorization/{label}"),
            inverse_deviation(&factor, &a)?,
            1e-9,
        );
        if let Some(eps) = b.cfg.break_symbol {
            quad.interp_black.low[0] += Complex64::new(eps, 0.0);
        }
        let r = check_direct_conditions(&quad, &lambdas, mode, b.tol(1e-10))?;
        b.push(
            "twogrid",
            format!("direct-conditions/{label}"),
            r.max_residual(),
            1e-10,
        );
    }
    Ok(())
}

fn equivalence(
    b: &mut Battery,
    label: &str,
    p: &ProblemInstance,
    f: &[Complex64],
) -> CliResult<()> {
    let u = dense_lu_solve(&p.matrix().to_dense(), f)?;
    let h = p.hierarchy();
    let depth = 3.min(h.max_levels());
    let runs = [
        (
            "multiplicative",
            dmg_multiplicative(p.matrix(), f, h)?.solution,
        ),
        ("additive", dmg_additive(p.matrix(), f, h)?.solution),
        (
            "multichannel",
            dmg_additive_multichannel(p.matrix(), f, h, depth)?
                .report
                .solution,
        ),
    ];
    for (m, x) in runs {
        b.push(
            "multigrid",
            format!("matches-lu/{label}/{m}"),
            relative_error(&x, &u),
            1e-9,
        );
    }
    Ok(())
}

fn multigrid(b: &mut Battery) -> CliResult<()> {
    let (n, side, k) = (b.n(), b.side(), b.k());
    let mut rng = b.rng();
    let mut random = |len: usize| -> Vec<Complex64> {
        (0..len)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    };
    let ring = helmholtz_periodic_1d(n, k)?;
    equivalence(b, &format!("helmholtz1d-{n}"), &ring, &random(n))?;
    let torus = helmholtz_periodic_2d(side, k)?;
    equivalence(
        b,
        &format!("helmholtz2d-{side}"),
        &torus,
        &random(side * side),
    )?;
    let segment = dirichlet_laplacian_1d(n)?;
    equivalence(b, &format!("dirichlet1d-{n}"), &segment, &random(n))?;

    let f = random(n);
    let r = dmg_multiplicative(ring.matrix(), &f, ring.hierarchy())?;
    let dense_red = r
        .levels_visited
        .iter()
        .filter(|v| v.level > 0 && v.path.ends_with('r') && !v.was_diagonal)
        .count();
    b.push_fixed(
        "multigrid",
        format!("red-grids-diagonal/helmholtz1d-{n}"),
        dense_red as f64,
        0.0,
    );
    Ok(())
}

fn explicit_output_dir(cfg: &RunConfig) -> Option<std::path::PathBuf> {
    cfg.output_dir.clone().or_else(|| {
        std::env::var_os(OUTPUT_DIR_ENV)
            .filter(|v| !v.is_empty())
            .map(Into::into)
    })
}

pub fn run_verify(cfg: &RunConfig) -> CliResult<()> {
    let suite = cfg.suite.unwrap_or(Suite::All);
    let mut b = Battery {
        cfg,
        checks: Vec::new(),
    };
    let suites: [(Suite, SuiteFn); 4] = [
        (Suite::Aliasing, aliasing),
        (Suite::Filterbank, filterbank),
        (Suite::Twogrid, twogrid),
        (Suite::Multigrid, multigrid),
    ];
    for (s, run) in suites {
        if suite.includes(s) {
            run(&mut b)?;
        }
    }
    for c in &b.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!(
            "{tag} {:<10} {:<48} {:.3e} (tol {:.0e})",
            c.suite, c.name, c.value, c.tol
        );
    }
    let failed = b.checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", b.checks.len());
    if let Some(dir) = explicit_output_dir(cfg) {
        create_dir(&dir)?;
        write_json(&dir.join("verify.json"), &b.checks)?;
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!(
            "{failed} of {} checks failed",
            b.checks.len()
        )))
    }
}
