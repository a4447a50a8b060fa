//! Scenario-driven front end for the `relframes` library.

// `!(x > tol)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod output;
pub mod run;
pub mod scenario;

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{exit, CliError};
use crate::output::{write_artifacts, Written};
use crate::run::Report;
use crate::scenario::{parse_scenario, Overrides};

/// Result of one scenario in a batch.
#[derive(Debug)]
pub struct Outcome {
    pub path: PathBuf,
    pub result: Result<(Report, Written), CliError>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match &self.result {
            Ok((report, _)) if report.passed => exit::OK,
            Ok(_) => exit::INVARIANT_FAILED,
            Err(e) => e.exit_code(),
        }
    }
}

fn run_one(kind: &str, path: &Path, out: &Path, overrides: &Overrides) -> Result<(Report, Written), CliError> {
    let scenario = parse_scenario(path)?;
    if scenario.body.kind() != kind {
        return Err(CliError::validation(
            path,
            "KindMismatch",
            format!(
                "scenario is `{}` but the `{kind}` subcommand was used",
                scenario.body.kind()
            ),
        ));
    }
    log::info!("running {} scenario {}", kind, path.display());
    let artifacts = run::run(&scenario, overrides)?;
    let written = write_artifacts(out, &scenario.stem(), &artifacts)?;
    Ok((artifacts.report, written))
}

/// Runs each scenario of subcommand `kind`, at most `jobs` at a time, with
/// outputs named after each scenario file. Outcomes keep the input order.
pub fn run_batch(kind: &str, paths: &[PathBuf], out: &Path, overrides: &Overrides, jobs: usize) -> Vec<Outcome> {
    let mut seen = HashSet::new();
    let clash: Vec<bool> = paths
        .iter()
        .map(|p| !seen.insert(p.file_stem().map(|s| s.to_os_string())))
        .collect();
    let task = |(path, clashes): (&PathBuf, &bool)| Outcome {
        path: path.clone(),
        result: if *clashes {
            Err(CliError::validation(
                path,
                "DuplicateOutput",
                "another scenario in this batch has the same file name",
            ))
        } else {
            run_one(kind, path, out, overrides)
        },
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build();
    match pool {
        Ok(pool) => pool.install(|| paths.par_iter().zip(clash.par_iter()).map(task).collect()),
        Err(e) => {
            log::warn!("thread pool unavailable ({e}); running serially");
            paths.iter().zip(clash.iter()).map(task).collect()
        }
    }
}

/// Exit status for a batch: the largest code among its outcomes.
pub fn batch_exit_code(outcomes: &[Outcome]) -> i32 {
    outcomes.iter().map(Outcome::exit_code).max().unwrap_or(exit::OK)
}
