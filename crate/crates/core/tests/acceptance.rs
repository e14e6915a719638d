//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails unexpectedly.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use dmg_core::aliasing::*;
use dmg_core::filterbank::*;
use dmg_core::multigrid::*;
use dmg_core::problems::*;
use dmg_core::twogrid::*;
use dmg_core::{c64, Color, Complex64, DenseMatrix, RedBlackPartition, SparseMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn chessboard(side: usize) -> RedBlackPartition {
    RedBlackPartition::from_predicate(side * side, |a| (a / side + a % side) % 2 == 0).unwrap()
}

fn torus_bounds(source: SourceSpec) -> (bool, String, Option<MultichannelReport>) {
    let p = helmholtz_periodic_2d(32, K_PI_OVER_3).unwrap();
    let f = make_source(&source, &p).unwrap();
    let lu = gauss_solve(p.matrix(), &f);
    let spectral = spectral_torus(32, K_PI_OVER_3, &f);
    let mut pass = rel_err(&lu, &spectral) < 1e-10;
    let mut detail = String::new();
    for method in [Method::Multiplicative, Method::Additive] {
        let t = Instant::now();
        let r = dmg_solve(method, p.matrix(), &f, p.hierarchy()).unwrap();
        let secs = t.elapsed().as_secs_f64();
        let res = rel_residual(p.matrix(), &r.solution, &f);
        let err = rel_err(&r.solution, &lu);
        pass &= res <= 1e-9 && err <= 1e-8;
        detail += &format!("{method:?}: residual {res:.1e}, error {err:.1e}, {secs:.3}s; ");
    }
    let mc = dmg_additive_multichannel(p.matrix(), &f, p.hierarchy(), 3).ok();
    (pass, detail, mc)
}

fn criterion_1() -> Outcome {
    let (pass, detail, _) = torus_bounds(SourceSpec::TwoFrequency);
    outcome(pass, detail)
}

fn criterion_2() -> Outcome {
    let (mut pass, mut detail, mc) = torus_bounds(SourceSpec::PointPatch);
    match mc {
        Some(mc) => {
            let zeros = mc.zero_channels();
            pass &= mc.channels.len() == 8 && zeros >= 4;
            detail += &format!("depth-3 zero channels {zeros}/{}", mc.channels.len());
        }
        None => {
            pass = false;
            detail += "multichannel solve failed";
        }
    }
    outcome(pass, detail)
}

/// `I − P A_c⁻¹ R A`, inverting `A_c` with the reference elimination.
fn cgc(a: &SparseMatrix, cfg: &TwoGridConfig, color: Color) -> DenseMatrix {
    let ops = build_coarse(a, cfg, color).unwrap();
    let inv = gauss_inverse(&ops.coarse_matrix);
    let t = ops.interpolation.to_dense().matmul(&inv).unwrap();
    let t = t
        .matmul(&ops.restriction.to_dense())
        .unwrap()
        .matmul(&a.to_dense())
        .unwrap();
    DenseMatrix::identity(a.nrows()).sub(&t).unwrap()
}

fn helmholtz_1d(n: usize) -> SparseMatrix {
    helmholtz_periodic_1d(n, K_PI_OVER_3)
        .unwrap()
        .matrix()
        .clone()
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut detail = String::new();
    for n in [8, 16, 32] {
        let a = helmholtz_1d(n);
        let cfg = TwoGridConfig::multiplicative_standard(RedBlackPartition::evens(n).unwrap());
        let kr = cgc(&a, &cfg, Color::Red);
        let kb = cgc(&a, &cfg, Color::Black);
        let scaled = frobenius(&kb.matmul(&kr).unwrap()) / (frobenius(&kb) * frobenius(&kr));
        pass &= scaled <= 1e-10;
        detail += &format!("n={n} |K~K-|={scaled:.1e}; ");
    }
    let a = helmholtz_1d(16);
    let cfg = TwoGridConfig::multiplicative_standard(RedBlackPartition::evens(16).unwrap());
    let inv = gauss_inverse(&a);
    let dev = frobenius(
        &multiplicative_factorization(&a, &cfg)
            .unwrap()
            .sub(&inv)
            .unwrap(),
    ) / frobenius(&inv);
    pass &= dev <= 1e-9;
    detail += &format!("factorization {dev:.1e}");
    outcome(pass, detail)
}

fn criterion_4() -> Outcome {
    let mut pass = true;
    let mut detail = String::new();
    for n in [8, 16, 32] {
        let a = helmholtz_1d(n);
        let cfg = TwoGridConfig::additive_standard(RedBlackPartition::evens(n).unwrap());
        let sum = cgc(&a, &cfg, Color::Red)
            .add(&cgc(&a, &cfg, Color::Black))
            .unwrap();
        let dev = frobenius(&sum.sub(&DenseMatrix::identity(n)).unwrap());
        pass &= dev <= 1e-10;
        detail += &format!("n={n} |K-+K~-I|={dev:.1e}; ");
    }
    let a = helmholtz_1d(16);
    let cfg = TwoGridConfig::additive_standard(RedBlackPartition::evens(16).unwrap());
    let inv = gauss_inverse(&a);
    let dev =
        frobenius(&additive_factorization(&a, &cfg).unwrap().sub(&inv).unwrap()) / frobenius(&inv);
    pass &= dev <= 1e-9;
    detail += &format!("factorization {dev:.1e}");
    outcome(pass, detail)
}

fn criterion_5() -> Outcome {
    let cases = [
        (
            "1D n=8",
            helmholtz_1d(8),
            build_dft_basis_1d(8).unwrap(),
            RedBlackPartition::evens(8).unwrap(),
        ),
        (
            "2D N=4",
            helmholtz_periodic_2d(4, K_PI_OVER_3)
                .unwrap()
                .matrix()
                .clone(),
            build_dft_basis_2d(4).unwrap(),
            chessboard(4),
        ),
    ];
    let mut worst_symbol: f64 = 0.0;
    let mut worst_inverse: f64 = 0.0;
    for (_, a, basis, p) in &cases {
        for cfg in [
            TwoGridConfig::multiplicative_standard(p.clone()),
            TwoGridConfig::additive_standard(p.clone()),
        ] {
            let (quad, lambdas) = cfg.symbols(a, basis).unwrap();
            let deltas = delta_symbols(&quad, &lambdas).unwrap();
            for color in Color::BOTH {
                let k = cgc(a, &cfg, color);
                let g = basis
                    .v()
                    .conj_transpose()
                    .matmul(&k.matmul(basis.w()).unwrap())
                    .unwrap();
                let s = cgc_symbols(a, &cfg, color, basis).unwrap();
                let mut expect = DenseMatrix::zeros(basis.n(), basis.n());
                for (j, (&l, &h)) in basis.low().iter().zip(basis.high()).enumerate() {
                    expect[(l, l)] = s.low_to_low[j];
                    expect[(l, h)] = s.high_to_low[j];
                    expect[(h, l)] = s.low_to_high[j];
                    expect[(h, h)] = s.high_to_high[j];
                }
                worst_symbol = worst_symbol.max(g.sub(&expect).unwrap().max_abs());

                let delta = match color {
                    Color::Red => &deltas.delta_red,
                    Color::Black => &deltas.delta_black,
                };
                let rows = p.indices(color);
                let wl = basis.w().select_rows(rows).select_cols(basis.low());
                let vl = basis.v().select_rows(rows).select_cols(basis.low());
                let scaled = DenseMatrix::from_fn(wl.nrows(), wl.ncols(), |i, j| {
                    wl[(i, j)] * 4.0 / delta[j]
                });
                let formula = scaled.matmul(&vl.conj_transpose()).unwrap();
                let exact = gauss_inverse(&build_coarse(a, &cfg, color).unwrap().coarse_matrix);
                worst_inverse =
                    worst_inverse.max(frobenius(&formula.sub(&exact).unwrap()) / frobenius(&exact));
            }
        }
    }
    outcome(
        worst_symbol <= 1e-9 && worst_inverse <= 1e-10,
        format!("symbol deviation {worst_symbol:.1e}, inverse formula {worst_inverse:.1e}"),
    )
}

fn criterion_6() -> Outcome {
    let tol = 1e-10;
    let good = [
        (
            "DFT 1D n=16",
            build_dft_basis_1d(16).unwrap(),
            RedBlackPartition::evens(16).unwrap(),
        ),
        ("DFT 2D N=8", build_dft_basis_2d(8).unwrap(), chessboard(8)),
        (
            "sine n=8",
            build_sine_basis(8).unwrap(),
            RedBlackPartition::evens(8).unwrap(),
        ),
    ];
    let mut pass = true;
    for (_, b, p) in &good {
        pass &= check_rbhap(b, p, tol).map(|r| r.passes).unwrap_or(false);
        pass &= check_surjective_form(b, p, tol).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 16;
    let p = RedBlackPartition::evens(n).unwrap();
    let mut both_fail = 0;
    let mut disagree = 0;
    for _ in 0..20 {
        let w = DenseMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c64(n as f64, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        })
        .add(&DenseMatrix::from_row_major(n, n, random_vector(n * n, &mut rng)).unwrap())
        .unwrap();
        let v = gauss_inverse_dense(&w).conj_transpose();
        let b = BiorthogonalBasis::new(w, v, (0..n / 2).collect(), (n / 2..n).collect()).unwrap();
        let alias = check_rbhap(&b, &p, tol).map(|r| r.passes).unwrap_or(false);
        let surj = check_surjective_form(&b, &p, tol).unwrap();
        if !alias && !surj {
            both_fail += 1;
        }
        if alias != surj {
            disagree += 1;
        }
    }
    pass &= both_fail == 20 && disagree == 0;
    outcome(
        pass,
        format!("structured bases pass; random bases failing both checks: {both_fail}/20"),
    )
}

fn criterion_7() -> Outcome {
    let n = 8;
    let basis = build_dft_basis_1d(n).unwrap();
    let p = RedBlackPartition::evens(n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let theta: Vec<f64> = (0..n / 2).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    let bank = make_qmf_bank(&basis, &p, &theta).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let s = random_vector(n, &mut rng);
        let out = run_bank(&bank, &s).unwrap();
        worst = worst.max(rel_err(&out.t, &s));
    }
    let mut broken = extract_symbols(&bank, &basis).unwrap();
    broken.interp_black.high[1] += Complex64::new(1e-3, 0.0);
    let report = check_vetterli(&broken, 1e-10).unwrap();
    let pass = worst <= 1e-12 && !report.passes && report.max_residual() >= 1e-4;
    outcome(
        pass,
        format!(
            "reconstruction {worst:.1e}; broken residual {:.1e}",
            report.max_residual()
        ),
    )
}

fn random_filter(a: &SparseMatrix, rng: &mut ChaCha8Rng) -> Filter {
    let n = a.nrows();
    match rng.gen_range(0..3) {
        0 => Filter::Identity,
        1 => Filter::MirrorOfA,
        _ => {
            let mut t: Vec<(usize, usize, Complex64)> =
                (0..n).map(|i| (i, i, c64(1.0, 0.0))).collect();
            for _ in 0..2 * n {
                t.push((
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    c64(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
                ));
            }
            Filter::Explicit(SparseMatrix::from_triplets(n, n, t).unwrap())
        }
    }
}

fn criterion_8() -> Outcome {
    let n = 16;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut configs = 0;
    let mut attempts = 0;
    while configs < 12 && attempts < 200 {
        attempts += 1;
        let k = rng.gen_range(0.2..1.3);
        let a = helmholtz_periodic_1d(n, k).unwrap().matrix().clone();
        let mut red: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            red.swap(i, rng.gen_range(0..=i));
        }
        red.truncate(n / 2);
        red.sort_unstable();
        let cfg = TwoGridConfig {
            partition: RedBlackPartition::new(n, red).unwrap(),
            restrict_red: random_filter(&a, &mut rng),
            interp_red: random_filter(&a, &mut rng),
            restrict_black: random_filter(&a, &mut rng),
            interp_black: random_filter(&a, &mut rng),
        };
        let color = if rng.gen_bool(0.5) {
            Color::Red
        } else {
            Color::Black
        };
        let ops = build_coarse(&a, &cfg, color).unwrap();
        if ops.coarse_matrix.to_dense().lu().is_err() {
            continue;
        }
        let k = cgc(&a, &cfg, color);
        let dev = frobenius(&k.matmul(&k).unwrap().sub(&k).unwrap()) / frobenius(&k).max(1.0);
        worst = worst.max(dev);
        configs += 1;
    }
    outcome(
        configs == 12 && worst <= 1e-10,
        format!("{configs} configurations, max |K²-K| {worst:.1e}"),
    )
}

fn criterion_9() -> Outcome {
    let sizes: Vec<usize> = (6..=11).map(|e| 1 << e).collect();
    let family = |n| helmholtz_periodic_1d(n, K_PI_OVER_3);
    let mut pass = true;
    let mut detail = String::new();
    for method in [Method::Multiplicative, Method::Additive] {
        let rows = count_complexity(&sizes, method, family).unwrap();
        let ratios = doubling_ratios(&rows);
        let worst = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
        pass &= ratios.len() == sizes.len() - 1 && worst <= 2.5;
        let list: Vec<String> = ratios.iter().map(|(n, r)| format!("{n}:{r:.2}")).collect();
        detail += &format!("{method:?} ratios [{}]; ", list.join(" "));
    }
    for &n in &sizes {
        let p = helmholtz_periodic_1d(n, K_PI_OVER_3).unwrap();
        let f = make_source(&SourceSpec::UnitImpulse, &p).unwrap();
        let r = dmg_multiplicative(p.matrix(), &f, p.hierarchy()).unwrap();
        let red_ok = r
            .levels_visited
            .iter()
            .filter(|v| v.level > 0 && v.path.ends_with('r'))
            .all(|v| v.was_diagonal);
        pass &= red_ok;
        if !red_ok {
            detail += &format!("n={n} has a non-diagonal red grid; ");
        }
    }
    detail += "red coarse matrices diagonal";
    outcome(pass, detail)
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut cases: Vec<(String, ProblemInstance, Vec<Complex64>, Vec<Complex64>)> = Vec::new();
    for e in 3..=12 {
        let n = 1 << e;
        let p = helmholtz_periodic_1d(n, K_PI_OVER_3).unwrap();
        for (tag, f) in [
            (
                "impulse",
                make_source(&SourceSpec::UnitImpulse, &p)
                    .unwrap()
                    .into_inner(),
            ),
            ("random", random_vector(n, &mut rng)),
        ] {
            let u = spectral_ring(K_PI_OVER_3, &f);
            cases.push((format!("ring n={n} {tag}"), p.clone(), f, u));
        }
        let p = dirichlet_laplacian_1d(n).unwrap();
        let f = random_vector(n, &mut rng);
        let u = thomas_dirichlet(&f);
        cases.push((format!("dirichlet n={n}"), p, f, u));
    }
    for side in [4, 8, 16, 32, 64] {
        let p = helmholtz_periodic_2d(side, K_PI_OVER_3).unwrap();
        let mut sources = vec![("random", random_vector(side * side, &mut rng))];
        if side >= 4 {
            sources.push((
                "two-frequency",
                make_source(&SourceSpec::TwoFrequency, &p)
                    .unwrap()
                    .into_inner(),
            ));
            sources.push((
                "point-patch",
                make_source(&SourceSpec::PointPatch, &p)
                    .unwrap()
                    .into_inner(),
            ));
        }
        for (tag, f) in sources {
            let u = spectral_torus(side, K_PI_OVER_3, &f);
            cases.push((format!("torus N={side} {tag}"), p.clone(), f, u));
        }
    }
    // the direct elimination agrees with the spectral references where it is cheap
    let mut pass = true;
    let mut failures = Vec::new();
    for (name, p, f, u) in cases.iter().filter(|c| c.1.size() <= 256) {
        let lu = gauss_solve(p.matrix(), f);
        if rel_err(&lu, u) > 1e-10 {
            pass = false;
            failures.push(format!("{name} (reference)"));
        }
    }
    let mut worst: f64 = 0.0;
    for (name, p, f, u) in &cases {
        let depth = 3.min(p.hierarchy().max_levels());
        let mc = dmg_additive_multichannel(p.matrix(), f, p.hierarchy(), depth)
            .map(|r| r.report.solution);
        let sols = [
            dmg_multiplicative(p.matrix(), f, p.hierarchy()).map(|r| r.solution),
            dmg_additive(p.matrix(), f, p.hierarchy()).map(|r| r.solution),
            mc,
        ];
        for s in sols {
            match s {
                Ok(s) => {
                    let e = rel_err(&s, u);
                    worst = worst.max(e);
                    if e > 1e-9 {
                        pass = false;
                        failures.push(format!("{name} ({e:.1e})"));
                    }
                }
                Err(e) => {
                    pass = false;
                    failures.push(format!("{name} ({e})"));
                }
            }
        }
    }
    let mut detail = format!("{} systems, max error {worst:.1e}", cases.len());
    if !failures.is_empty() {
        detail += &format!("; failing: {}", failures.join(", "));
    }
    outcome(pass, detail)
}

/// Criteria that are known not to hold; see the decisions ledger.
const EXPECTED_FAILURES: &[usize] = &[9];

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut unexpected = 0;
    for (id, run) in criteria {
        let t = Instant::now();
        let o = run();
        let expected_fail = EXPECTED_FAILURES.contains(&id);
        let tag = match (o.pass, expected_fail) {
            (true, false) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "FAIL (expected)",
            (true, true) => "XPASS",
        };
        if o.pass == expected_fail {
            unexpected += 1;
        }
        println!(
            "criterion {id:>2}: {tag} [{:.2}s] {}",
            t.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria differ from their expected outcome");
        ExitCode::FAILURE
    }
}
