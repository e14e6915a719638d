mod bench;
mod solve;
mod verify;

use std::path::Path;

use dmg_core::multigrid::DEFAULT_N0;
use dmg_core::problems::{
    dirichlet_laplacian_1d, helmholtz_periodic_1d, helmholtz_periodic_2d, make_source,
    ProblemInstance, SourceSpec, K_PI_OVER_3,
};
use dmg_core::Complex64;

use crate::config::{CommandKind, ProblemName, RunConfig, SourceChoice};
use crate::error::{CliError, CliResult};
use crate::{fields, mtx};

pub use bench::run_bench;
pub use solve::run_solve;
pub use verify::{run_verify, Check};

/// Runs the command named by the configuration.
pub fn run(cfg: &RunConfig) -> CliResult<()> {
    cfg.validate()?;
    if let Some(t) = cfg.threads {
        // a pool may already exist when called more than once in-process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    match cfg.command {
        Some(CommandKind::Solve) => run_solve(cfg),
        Some(CommandKind::Verify) => run_verify(cfg),
        Some(CommandKind::Bench) => run_bench(cfg),
        None => Err(CliError::Config(
            "no command given (solve, verify or bench)".into(),
        )),
    }
}

pub(crate) const DEFAULT_N_1D: usize = 64;
pub(crate) const DEFAULT_SIDE: usize = 32;

/// Builds the configured problem. `size` overrides `n`/`N` (used by sweeps).
pub(crate) fn build_problem(cfg: &RunConfig, size: Option<usize>) -> CliResult<ProblemInstance> {
    let n0 = cfg.n0;
    if let Some(path) = &cfg.matrix {
        return Ok(ProblemInstance::custom(
            mtx::load(path)?,
            n0.unwrap_or(DEFAULT_N0),
        )?);
    }
    let k = cfg.k.unwrap_or(K_PI_OVER_3);
    let name = cfg.problem.unwrap_or(ProblemName::Helmholtz2d);
    let p = match name {
        ProblemName::Helmholtz2d => {
            if cfg.n.is_some() {
                return Err(CliError::Config(
                    "2D problems take --N (side), not --n".into(),
                ));
            }
            helmholtz_periodic_2d(size.or(cfg.side).unwrap_or(DEFAULT_SIDE), k)?
        }
        one_d => {
            if cfg.side.is_some() {
                return Err(CliError::Config("1D problems take --n, not --N".into()));
            }
            let n = size.or(cfg.n).unwrap_or(DEFAULT_N_1D);
            if one_d == ProblemName::Helmholtz1d {
                helmholtz_periodic_1d(n, k)?
            } else {
                if cfg.k.is_some() {
                    return Err(CliError::Config(
                        "the Dirichlet Laplacian has no wavenumber".into(),
                    ));
                }
                dirichlet_laplacian_1d(n)?
            }
        }
    };
    Ok(match n0 {
        Some(n0) => p.with_n0(n0),
        None => p,
    })
}

pub(crate) fn build_source(
    cfg: &RunConfig,
    problem: &ProblemInstance,
) -> CliResult<Vec<Complex64>> {
    if let Some(path) = &cfg.source_file {
        return fields::read_vector(path, problem.geometry());
    }
    let spec = match cfg.source {
        Some(SourceChoice::TwoFrequency) => SourceSpec::TwoFrequency,
        Some(SourceChoice::PointPatch) => SourceSpec::PointPatch,
        Some(SourceChoice::UnitImpulse) => SourceSpec::UnitImpulse,
        None if cfg.matrix.is_none()
            && cfg.problem.unwrap_or(ProblemName::Helmholtz2d) == ProblemName::Helmholtz2d =>
        {
            SourceSpec::TwoFrequency
        }
        None => SourceSpec::UnitImpulse,
    };
    Ok(make_source(&spec, problem)?.into_inner())
}

pub(crate) fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub(crate) fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}
