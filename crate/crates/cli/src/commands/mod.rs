//! Subcommand implementations. Each `run` returns the process exit code
//! for success paths; hard failures travel as `confound::Error` and are
//! rendered by [`report_error`].

pub mod analyze;
pub mod evalue;
pub mod plot;
pub mod sweep;
pub mod verify;

use clap::Subcommand;
use confound::model::Engine;
use confound::Error;

/// Seed fallback consulted when `--seed` is absent; 0 when neither is set.
pub const SEED_ENV: &str = "CONFOUND_PROB_SEED";

#[derive(Subcommand)]
pub enum Command {
    /// Compute the E-value of a ratio estimate (and of its CI limit)
    Evalue(evalue::EvalueArgs),
    /// Run the full pipeline over a case file
    Analyze(analyze::AnalyzeArgs),
    /// Re-evaluate cases across a grid of bias-prior scales
    Sweep(sweep::SweepArgs),
    /// Render a figure from analyze or sweep output
    Plot(plot::PlotArgs),
    /// Cross-check the closed form against quadrature and Monte Carlo
    Verify(verify::VerifyArgs),
}

impl Command {
    pub fn run(self) -> confound::Result<u8> {
        match self {
            Command::Evalue(args) => args.run(),
            Command::Analyze(args) => args.run(),
            Command::Sweep(args) => args.run(),
            Command::Plot(args) => args.run(),
            Command::Verify(args) => args.run(),
        }
    }
}

/// Prints an error to stderr; validation failures additionally emit the
/// row-issue report as a JSON array for machine consumption.
pub fn report_error(err: &Error) {
    eprintln!("error: {err}");
    if let Error::Validation { issues } = err {
        if let Ok(json) = serde_json::to_string(issues) {
            eprintln!("{json}");
        }
    }
    if let Error::AllCasesFailed(failures) = err {
        for f in failures {
            eprintln!("  {}", f.error);
        }
    }
}

/// Flag beats environment beats the 0 default; a malformed environment
/// value is an error rather than a silent fallback.
pub fn resolve_seed(flag: Option<u64>) -> confound::Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(raw) => raw.trim().parse::<u64>().map_err(|_| Error::InvalidParameter {
            name: "CONFOUND_PROB_SEED",
            value: f64::NAN,
            reason: "environment seed must be an unsigned 64-bit integer",
        }),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(std::env::VarError::NotUnicode(_)) => Err(Error::InvalidParameter {
            name: "CONFOUND_PROB_SEED",
            value: f64::NAN,
            reason: "environment seed must be valid UTF-8",
        }),
    }
}

/// clap value parser for `--engine`.
pub fn parse_engine(raw: &str) -> Result<Engine, String> {
    Engine::parse(raw).map_err(|e| e.to_string())
}
