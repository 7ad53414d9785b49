use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use loopsim_cli::output::{render_mc, render_scan, render_stage, Format, McMeta};
use loopsim_cli::parallel::{pw_monte_carlo_par, scan_rows};
use loopsim_cli::{checks, resolve_seed};
use loopsim_core::{Angle, Model, StageSpec};

#[derive(Parser)]
#[command(
    name = "loopsim",
    version,
    about = "Analyzer-loop polarization-entanglement simulator",
    long_about = "Simulates conditional detection fractions of a five-analyzer-loop \
polarization-entanglement arrangement under exact quantum rules and under an explicit \
pilot-wave model, and audits the inequality chain built from those fractions."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quantum and pilot-wave fractions for the three stages at one angle pair
    Stage {
        /// Analyzer angle theta in degrees
        #[arg(long)]
        theta_deg: f64,
        /// Analyzer angle phi in degrees
        #[arg(long)]
        phi_deg: f64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Write to this file instead of standard output
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Inequality reports for every pair on the half-open angle grid
    Scan {
        /// Grid step in degrees, in (0, 90]
        #[arg(long, default_value_t = 1.0)]
        step_deg: f64,
        /// Use sampled frequencies instead of closed forms
        #[arg(long)]
        mc: bool,
        /// Trials per stage per grid point in --mc mode
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        /// Base seed for --mc mode (default: LOOPSIM_SEED or 42)
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: one per core)
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run every built-in invariant suite; exit 1 if any fails
    Check {
        /// Grid step in degrees for the sweep suites, in (0, 90]
        #[arg(long, default_value_t = 1.0)]
        step_deg: f64,
        /// Trials for the Monte Carlo suites
        #[arg(long, default_value_t = 1_000_000)]
        mc_n: u64,
        /// Worker threads (default: one per core)
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Monte Carlo trajectory tallies for the three stages at one angle pair
    Mc {
        /// Analyzer angle theta in degrees
        #[arg(long)]
        theta_deg: f64,
        /// Analyzer angle phi in degrees
        #[arg(long)]
        phi_deg: f64,
        /// Source emissions to simulate per stage
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        /// Seed (default: LOOPSIM_SEED or 42)
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: one per core)
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

enum CliError {
    /// Exit 2: bad configuration; nothing was computed or written.
    Usage(String),
    /// Exit 1: an invariant suite failed or a runtime operation failed.
    Failure(String),
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Stage { theta_deg, phi_deg, format, output } => {
            validate_angle("theta-deg", theta_deg)?;
            validate_angle("phi-deg", phi_deg)?;
            emit(&render_stage(theta_deg, phi_deg, format), output.as_deref())
        }
        Command::Scan { step_deg, mc, n, seed, threads, format, output } => {
            validate_step(step_deg)?;
            let mc_meta = if mc {
                validate_trials(n)?;
                let (seed, seed_source) =
                    resolve_seed(seed).map_err(CliError::Usage)?;
                Some(McMeta { n, seed, seed_source })
            } else {
                None
            };
            let model = match mc_meta {
                Some(meta) => Model::MonteCarlo { n: meta.n, seed: meta.seed },
                None => Model::ClosedForm,
            };
            let rows = with_pool(threads, || scan_rows(step_deg, &model))?
                .map_err(|e| CliError::Failure(e.to_string()))?;
            emit(&render_scan(step_deg, &rows, mc_meta, format), output.as_deref())
        }
        Command::Check { step_deg, mc_n, threads } => {
            validate_step(step_deg)?;
            validate_trials(mc_n)?;
            let outcomes = with_pool(threads, || checks::run_all(step_deg, mc_n))?;
            let mut failed = 0usize;
            for outcome in &outcomes {
                let verdict = if outcome.passed { "ok  " } else { "FAIL" };
                println!("{verdict} {:<48} {}", outcome.name, outcome.detail);
                if !outcome.passed {
                    failed += 1;
                }
            }
            if failed == 0 {
                println!("all {} suites passed", outcomes.len());
                Ok(())
            } else {
                println!("{failed} of {} suites failed", outcomes.len());
                Err(CliError::Failure(format!("{failed} invariant suite(s) failed")))
            }
        }
        Command::Mc { theta_deg, phi_deg, n, seed, threads, format, output } => {
            validate_angle("theta-deg", theta_deg)?;
            validate_angle("phi-deg", phi_deg)?;
            validate_trials(n)?;
            let (seed, seed_source) = resolve_seed(seed).map_err(CliError::Usage)?;
            let theta = Angle::from_degrees(theta_deg);
            let phi = Angle::from_degrees(phi_deg);
            let stages = [
                StageSpec::stage1(theta, phi),
                StageSpec::stage2(theta, phi),
                StageSpec::stage3(theta, phi),
            ];
            let results = with_pool(threads, || {
                stages
                    .iter()
                    .map(|stage| {
                        pw_monte_carlo_par(stage, n, seed)
                            .map(|result| (stage.label.name(), result))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })?
            .map_err(|e| CliError::Failure(e.to_string()))?;
            let meta = McMeta { n, seed, seed_source };
            emit(&render_mc(theta_deg, phi_deg, &results, meta, format), output.as_deref())
        }
    }
}

fn validate_angle(flag: &str, value: f64) -> Result<(), CliError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--{flag} must be finite, got {value}")))
    }
}

fn validate_step(step_deg: f64) -> Result<(), CliError> {
    if step_deg.is_finite() && step_deg > 0.0 && step_deg <= 90.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--step-deg must lie in (0, 90], got {step_deg}")))
    }
}

fn validate_trials(n: u64) -> Result<(), CliError> {
    if n >= 1 {
        Ok(())
    } else {
        Err(CliError::Usage("--n must be at least 1".into()))
    }
}

/// Runs `work` on a pool with the requested thread count, or on the global
/// pool when unset. Output never depends on the choice.
fn with_pool<T: Send>(
    threads: Option<usize>,
    work: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match threads {
        None => Ok(work()),
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::Failure(format!("failed to build thread pool: {e}")))?;
            Ok(pool.install(work))
        }
    }
}

fn emit(text: &str, output: Option<&std::path::Path>) -> Result<(), CliError> {
    match output {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display()))),
    }
}
