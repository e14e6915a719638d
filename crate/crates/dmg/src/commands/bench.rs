use std::fs::File;
use std::io::Write;

use dmg_core::multigrid::{count_complexity, doubling_ratios, ComplexityRow, Method};
use dmg_core::Error;

use super::build_problem;
use crate::config::{MethodChoice, ProblemName, RunConfig};
use crate::error::{CliError, CliResult};

fn default_sizes(problem: ProblemName) -> Vec<usize> {
    match problem {
        ProblemName::Helmholtz2d => vec![16, 32, 64],
        _ => (6..=11).map(|e| 1 << e).collect(),
    }
}

fn write_rows<W: Write>(w: W, rows: &[(Method, ComplexityRow)]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "method",
        "n",
        "multiplications",
        "wall_time",
        "was_vcycle_fraction",
    ])?;
    for (m, r) in rows {
        let name = match m {
            Method::Multiplicative => "multiplicative",
            Method::Additive => "additive",
        };
        out.write_record([
            name.to_string(),
            r.n.to_string(),
            r.multiplications.to_string(),
            r.wall_time.as_secs_f64().to_string(),
            r.diagonal_fraction.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn run_bench(cfg: &RunConfig) -> CliResult<()> {
    if cfg.matrix.is_some() {
        return Err(CliError::Config(
            "bench sweeps built-in problems only".into(),
        ));
    }
    if cfg.n.is_some() || cfg.side.is_some() {
        return Err(CliError::Config(
            "bench takes --sizes instead of --n/--N".into(),
        ));
    }
    let methods = match cfg.method {
        None => vec![Method::Multiplicative, Method::Additive],
        Some(MethodChoice::Multiplicative) => vec![Method::Multiplicative],
        Some(MethodChoice::Additive) => vec![Method::Additive],
        Some(other) => {
            return Err(CliError::Config(format!(
                "bench does not support method {other:?}"
            )))
        }
    };
    let problem = cfg.problem.unwrap_or(ProblemName::Helmholtz1d);
    let cfg = RunConfig {
        problem: Some(problem),
        ..cfg.clone()
    };
    let sizes = cfg.sizes.clone().unwrap_or_else(|| default_sizes(problem));

    let family = |n: usize| {
        build_problem(&cfg, Some(n)).map_err(|e| match e {
            CliError::Solver(e) => e,
            other => Error::InvalidProblem(other.to_string()),
        })
    };
    let mut rows = Vec::new();
    for &m in &methods {
        let measured = count_complexity(&sizes, m, family)?;
        let ratios: Vec<String> = doubling_ratios(&measured)
            .iter()
            .map(|(n, r)| format!("{n}:{r:.3}"))
            .collect();
        if !ratios.is_empty() {
            eprintln!("{m:?} doubling ratios {}", ratios.join(" "));
        }
        rows.extend(measured.into_iter().map(|r| (m, r)));
    }
    match &cfg.output {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(path, e))?;
            write_rows(file, &rows)
                .map_err(|e| CliError::io(path, std::io::Error::other(e.to_string())))
        }
        None => write_rows(std::io::stdout().lock(), &rows)
            .map_err(|e| CliError::io("<stdout>", std::io::Error::other(e.to_string()))),
    }
}
