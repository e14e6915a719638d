use std::time::Instant;

use dmg_core::linalg::relative_residual;
use dmg_core::multigrid::{
    dmg_additive_multichannel, dmg_solve, LevelVisit, Method, PartitionHierarchy,
};
use dmg_core::problems::{Geometry, ProblemInstance};
use dmg_core::twogrid::{solve_additive_2g, solve_multiplicative_2g, CoarseSolve, TwoGridConfig};
use dmg_core::Complex64;
use serde::Serialize;

use super::{build_problem, build_source, create_dir, write_json};
use crate::config::{MethodChoice, RunConfig};
use crate::error::{CliError, CliResult};
use crate::fields::write_field;

pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-9;
pub const DEFAULT_DEPTH: usize = 3;

#[derive(Debug, Serialize)]
struct SolveSummary {
    problem: String,
    geometry: Geometry,
    unknowns: usize,
    method: MethodChoice,
    multiplications: u64,
    relative_residual: f64,
    residual_threshold: f64,
    passed: bool,
    wall_time_seconds: f64,
    diagonal_fraction: Option<f64>,
    levels_visited: Vec<LevelVisit>,
    zero_channels: Option<usize>,
    files: Vec<String>,
}

struct Solved {
    solution: Vec<Complex64>,
    multiplications: u64,
    wall_time: f64,
    levels: Vec<LevelVisit>,
    zero_channels: Option<usize>,
    fields: Vec<(String, Vec<Complex64>)>,
}

fn describe(cfg: &RunConfig, p: &ProblemInstance) -> String {
    match (&cfg.matrix, p.geometry()) {
        (Some(path), _) => format!("matrix {}", path.display()),
        (None, Geometry::Torus { side }) => format!(
            "helmholtz2d N={side} k={}",
            cfg.k.unwrap_or(dmg_core::problems::K_PI_OVER_3)
        ),
        (None, Geometry::Ring { n }) => format!(
            "helmholtz1d n={n} k={}",
            cfg.k.unwrap_or(dmg_core::problems::K_PI_OVER_3)
        ),
        (None, g) => format!("dirichlet1d n={}", g.size()),
    }
}

fn method_of(m: MethodChoice) -> Method {
    match m {
        MethodChoice::Multiplicative => Method::Multiplicative,
        _ => Method::Additive,
    }
}

/// Two-grid split of the top grid, for the field dumps.
fn two_grid_fields(
    p: &ProblemInstance,
    f: &[Complex64],
    method: Method,
) -> CliResult<Vec<(String, Vec<Complex64>)>> {
    let h = p.hierarchy();
    if p.size() <= h.n0() {
        return Ok(Vec::new());
    }
    let nodes: Vec<usize> = (0..p.size()).collect();
    let top = h.partition(0, &nodes)?;
    let how = CoarseSolve {
        hierarchy: Some(h),
        ..CoarseSolve::default()
    };
    Ok(match method {
        Method::Multiplicative => {
            let r = solve_multiplicative_2g(
                p.matrix(),
                &TwoGridConfig::multiplicative_standard(top),
                f,
                &how,
            )?;
            vec![
                ("v0".into(), r.v0.into_inner()),
                ("e0".into(), r.e0.into_inner()),
            ]
        }
        Method::Additive => {
            let r = solve_additive_2g(p.matrix(), &TwoGridConfig::additive_standard(top), f, &how)?;
            vec![
                ("v_red".into(), r.v_red.into_inner()),
                ("v_black".into(), r.v_black.into_inner()),
            ]
        }
    })
}

fn solve(
    cfg: &RunConfig,
    p: &ProblemInstance,
    f: &[Complex64],
    method: MethodChoice,
    dump: bool,
) -> CliResult<Solved> {
    let a = p.matrix();
    match method {
        MethodChoice::Dense => {
            let clock = Instant::now();
            let mut work = 0;
            let solution = a
                .to_dense()
                .lu_counted(&mut work)?
                .solve_counted(f, &mut work)?
                .into_inner();
            Ok(Solved {
                solution,
                multiplications: work,
                wall_time: clock.elapsed().as_secs_f64(),
                levels: Vec::new(),
                zero_channels: None,
                fields: Vec::new(),
            })
        }
        MethodChoice::AdditiveMultichannel => {
            let depth = cfg.depth.unwrap_or(DEFAULT_DEPTH);
            let r = dmg_additive_multichannel(a, f, p.hierarchy(), depth)?;
            let zero_channels = Some(r.zero_channels());
            let fields = if dump {
                r.channels
                    .iter()
                    .map(|c| (format!("channel_{}", c.path), c.field.as_slice().to_vec()))
                    .collect()
            } else {
                Vec::new()
            };
            Ok(Solved {
                multiplications: r.report.multiplications,
                wall_time: r.report.wall_time.as_secs_f64(),
                levels: r.report.levels_visited,
                solution: r.report.solution.into_inner(),
                zero_channels,
                fields,
            })
        }
        m => {
            let r = dmg_solve(method_of(m), a, f, p.hierarchy())?;
            let fields = if dump {
                two_grid_fields(p, f, method_of(m))?
            } else {
                Vec::new()
            };
            Ok(Solved {
                multiplications: r.multiplications,
                wall_time: r.wall_time.as_secs_f64(),
                levels: r.levels_visited,
                solution: r.solution.into_inner(),
                zero_channels: None,
                fields,
            })
        }
    }
}

pub fn run_solve(cfg: &RunConfig) -> CliResult<()> {
    let problem = build_problem(cfg, None)?;
    let f = build_source(cfg, &problem)?;
    let method = cfg.method.unwrap_or(MethodChoice::Multiplicative);
    let tol = cfg.tolerance.unwrap_or(DEFAULT_RESIDUAL_TOL);
    let dump = cfg.dump_fields.unwrap_or(false);
    let out = cfg.output_dir();

    let solved = solve(cfg, &problem, &f, method, dump)?;
    let residual = relative_residual(problem.matrix(), &solved.solution, &f)?;
    let passed = residual <= tol;

    create_dir(&out)?;
    let g = problem.geometry();
    let mut files = vec!["solution.csv".to_string()];
    write_field(&out.join("solution.csv"), g, &solved.solution)?;
    if dump {
        write_field(&out.join("source.csv"), g, &f)?;
        files.push("source.csv".into());
        for (name, values) in &solved.fields {
            let file = format!("{name}.csv");
            write_field(&out.join(&file), g, values)?;
            files.push(file);
        }
    }
    let diagonal_fraction = (!solved.levels.is_empty()).then(|| {
        solved.levels.iter().filter(|v| v.was_diagonal).count() as f64 / solved.levels.len() as f64
    });
    let summary = SolveSummary {
        problem: describe(cfg, &problem),
        geometry: g,
        unknowns: problem.size(),
        method,
        multiplications: solved.multiplications,
        relative_residual: residual,
        residual_threshold: tol,
        passed,
        wall_time_seconds: solved.wall_time,
        diagonal_fraction,
        levels_visited: solved.levels,
        zero_channels: solved.zero_channels,
        files,
    };
    write_json(&out.join("report.json"), &summary)?;

    println!(
        "{}: {} unknowns, method {:?}, residual {:.3e}, {} multiplications, {:.3}s",
        summary.problem,
        summary.unknowns,
        method,
        residual,
        summary.multiplications,
        summary.wall_time_seconds
    );
    if let Some(z) = summary.zero_channels {
        println!("channels with zero source: {z}");
    }
    println!("report written to {}", out.join("report.json").display());
    if passed {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!(
            "relative residual {residual:.3e} exceeds {tol:.1e}"
        )))
    }
}
