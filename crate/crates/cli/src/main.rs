use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use relframes::selftest;
use relframes_cli::error::exit;
use relframes_cli::scenario::{MethodName, Overrides, RenormName};
use relframes_cli::{batch_exit_code, run_batch};

#[derive(Parser, Debug)]
#[command(
    name = "relframes",
    version,
    about = "Relativistic frames, spin transport and observer charts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (JSON); repeat for a batch.
    #[arg(long, global = true)]
    scenario: Vec<PathBuf>,

    /// Directory for CSV samples and JSON reports.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Integrator step (overrides the scenario).
    #[arg(long, global = true)]
    step: Option<f64>,

    #[arg(long, global = true, value_enum)]
    method: Option<MethodName>,

    /// What to do when a constraint drifts past its threshold.
    #[arg(long, global = true, value_enum)]
    renorm: Option<RenormName>,

    /// Scenarios (or selftest criteria) run concurrently.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Pure boost between two four-velocities.
    Boost,
    /// Closed cycle of boosts and its Wigner rotation.
    Cycle,
    /// Relativistic rotation transformation samples.
    Rrt,
    /// Thomas precession per circular orbit.
    Thomas,
    /// BMT spin integration in a constant field.
    Bmt,
    /// Frenet-Serret frames along a constant-field worldline.
    Frenet,
    /// Observer charts, transfer maps and holonomy.
    Observer,
    /// Run the full invariant suite and print a summary table.
    Selftest,
}

impl Command {
    fn kind(self) -> &'static str {
        match self {
            Command::Boost => "boost",
            Command::Cycle => "cycle",
            Command::Rrt => "rrt",
            Command::Thomas => "thomas",
            Command::Bmt => "bmt",
            Command::Frenet => "frenet",
            Command::Observer => "observer",
            Command::Selftest => "selftest",
        }
    }
}

fn run_selftest(jobs: usize) -> i32 {
    let outcomes: Vec<_> = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(|| {
            use rayon::prelude::*;
            selftest::CRITERIA.par_iter().map(|c| c()).collect()
        }),
        Err(_) => selftest::run_all(),
    };
    println!(
        "{:<4} {:<22} {:<6} {:>8}  checks",
        "id", "criterion", "status", "seconds"
    );
    for o in &outcomes {
        let failing: Vec<_> = o.checks.iter().filter(|c| !c.passed()).map(|c| c.label).collect();
        let detail = match (&o.error, failing.is_empty()) {
            (Some(e), _) => format!("error: {e}"),
            (None, true) => format!("{} ok", o.checks.len()),
            (None, false) => format!("failed: {}", failing.join(", ")),
        };
        let status = if o.passed() { "PASS" } else { "FAIL" };
        println!("{:<4} {:<22} {:<6} {:>8.3}  {detail}", o.id, o.name, status, o.seconds);
    }
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    println!("{passed}/{} criteria passed", outcomes.len());
    if passed == outcomes.len() {
        exit::OK
    } else {
        exit::INVARIANT_FAILED
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = if cli.command == Command::Selftest {
        if !cli.scenario.is_empty() {
            log::warn!("selftest ignores --scenario");
        }
        run_selftest(cli.jobs)
    } else if cli.scenario.is_empty() {
        eprintln!("error: `{}` needs at least one --scenario", cli.command.kind());
        exit::PARSE
    } else {
        let overrides = Overrides {
            step: cli.step,
            method: cli.method,
            renorm: cli.renorm,
        };
        let outcomes = run_batch(cli.command.kind(), &cli.scenario, &cli.out, &overrides, cli.jobs);
        for o in &outcomes {
            match &o.result {
                Ok((report, written)) => {
                    let status = if report.passed { "PASS" } else { "FAIL" };
                    println!(
                        "{status} {} -> {}, {}",
                        o.path.display(),
                        written.csv.display(),
                        written.report.display()
                    );
                    for c in report.checks.iter().filter(|c| !c.passed) {
                        println!("  {} = {:e} violates {:?}", c.name, c.value, c.limit);
                    }
                }
                Err(e) => eprintln!("error: {e}"),
            }
        }
        batch_exit_code(&outcomes)
    };
    ExitCode::from(code as u8)
}
