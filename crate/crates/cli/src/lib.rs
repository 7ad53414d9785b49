//! Library half of the `loopsim` binary: deterministic CSV/JSON rendering,
//! order-preserving parallel drivers, and the built-in invariant suites.

pub mod checks;
pub mod output;
pub mod parallel;

/// Seed used when neither `--seed` nor `LOOPSIM_SEED` is given.
pub const DEFAULT_SEED: u64 = 42;

/// Environment variable that overrides the default seed. Its value is
/// echoed into output metadata as `seed_source = "env"`.
pub const SEED_ENV_VAR: &str = "LOOPSIM_SEED";

/// Where a run's seed came from; echoed into output metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedSource {
    Cli,
    Env,
    Default,
}

impl SeedSource {
    pub fn label(self) -> &'static str {
        match self {
            SeedSource::Cli => "cli",
            SeedSource::Env => "env",
            SeedSource::Default => "default",
        }
    }
}

/// Resolves the effective seed from an optional `--seed` argument and the
/// environment. A malformed environment value is a usage error.
pub fn resolve_seed(cli_seed: Option<u64>) -> Result<(u64, SeedSource), String> {
    if let Some(seed) = cli_seed {
        return Ok((seed, SeedSource::Cli));
    }
    match std::env::var(SEED_ENV_VAR) {
        Ok(raw) => raw
            .trim()
            .parse::<u64>()
            .map(|seed| (seed, SeedSource::Env))
            .map_err(|_| format!("{SEED_ENV_VAR} must be a 64-bit unsigned integer, got {raw:?}")),
        Err(_) => Ok((DEFAULT_SEED, SeedSource::Default)),
    }
}
