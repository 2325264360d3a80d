//! `confound sweep` — prior-sensitivity grids.
//!
//! Emits the long-format CSV `case_id,sigma_gamma,p_exceed` (grid rows
//! grouped per case, cases in input order) plus per-case stability spans
//! on stderr and, optionally, as a `--summary` CSV.

use std::path::PathBuf;

use clap::Args;
use confound::analysis::{sweep_prior, AnalysisConfig, SweepResult};
use confound::error::CaseFailure;
use confound::ingest::read_cases;
use confound::model::{Engine, PriorSpec};
use confound::Error;

use crate::commands::{parse_engine, resolve_seed};
use crate::output;

#[derive(Args)]
pub struct SweepArgs {
    /// Case CSV (header: case_id,domain,measure,point,ci_lower,ci_upper,se_log,evalue)
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Comma-separated, strictly increasing bias-prior scales
    #[arg(long, default_value = "0.25,0.5,1.0", value_name = "G1,G2,...")]
    sigma_gamma_grid: String,
    /// True-effect prior scale
    #[arg(long, default_value_t = 1.0, value_name = "SD")]
    sigma_theta: f64,
    /// Fallback log-scale SE for rows with neither se_log nor a CI
    #[arg(long, default_value_t = 0.2, value_name = "SE")]
    default_s: f64,
    /// Posterior engine: closed | quad | mc
    #[arg(long, default_value = "closed", value_parser = parse_engine)]
    engine: Engine,
    /// RNG seed for the mc engine (falls back to $CONFOUND_PROB_SEED, then 0)
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Monte Carlo draws per grid point
    #[arg(long, default_value_t = 1_000_000, value_name = "N")]
    mc_draws: usize,
    /// Keep valid rows when some fail validation instead of failing atomically
    #[arg(long)]
    skip_invalid: bool,
    /// Long-format CSV path; stdout when absent
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Optional per-case stability-span CSV (case_id,stability_span)
    #[arg(long, value_name = "FILE")]
    summary: Option<PathBuf>,
}

fn parse_grid(raw: &str) -> confound::Result<Vec<f64>> {
    let mut grid = Vec::new();
    for part in raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let value: f64 = part.parse().map_err(|_| Error::InvalidParameter {
            name: "sigma_gamma_grid",
            value: f64::NAN,
            reason: "grid entries must be numbers",
        })?;
        grid.push(value);
    }
    if grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "sigma_gamma_grid",
            value: 0.0,
            reason: "grid must contain at least one scale",
        });
    }
    for pair in grid.windows(2) {
        if !(pair[0] < pair[1]) {
            return Err(Error::InvalidParameter {
                name: "sigma_gamma_grid",
                value: pair[1],
                reason: "grid must be strictly increasing",
            });
        }
    }
    if grid[0] <= 0.0 || !grid.iter().all(|g| g.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "sigma_gamma_grid",
            value: grid[0],
            reason: "grid scales must be positive and finite",
        });
    }
    Ok(grid)
}

impl SweepArgs {
    pub fn run(self) -> confound::Result<u8> {
        let seed = resolve_seed(self.seed)?;
        let grid = parse_grid(&self.sigma_gamma_grid)?;
        let prior_base = PriorSpec::new(self.sigma_theta, grid[0])?;
        let config = AnalysisConfig {
            default_s: self.default_s,
            engine: self.engine,
            seed,
            mc_draws: self.mc_draws,
        };

        let report = read_cases(&self.input, self.skip_invalid)?;
        if report.records.is_empty() && !report.issues.is_empty() {
            return Err(Error::Validation { issues: report.issues });
        }
        if !report.issues.is_empty() {
            eprintln!("warning: skipped {} invalid row(s)", report.issues.len());
            eprintln!(
                "{}",
                serde_json::to_string(&report.issues).expect("row issues serialize")
            );
        }

        let mut sweeps: Vec<SweepResult> = Vec::new();
        let mut failures: Vec<CaseFailure> = Vec::new();
        for rec in &report.records {
            match sweep_prior(rec, &grid, &prior_base, &config) {
                Ok(s) => sweeps.push(s),
                Err(error) => failures.push(CaseFailure {
                    case_id: rec.case_id.clone(),
                    error,
                }),
            }
        }
        if sweeps.is_empty() && !report.records.is_empty() {
            return Err(Error::AllCasesFailed(failures));
        }
        for failure in &failures {
            eprintln!("warning: {}", failure.error);
        }

        output::write_sweep_csv(output::sink(self.out.as_deref())?, &sweeps)?;
        if let Some(summary_path) = &self.summary {
            output::write_span_summary_csv(output::sink(Some(summary_path))?, &sweeps)?;
        }
        eprintln!(
            "# config: grid={} sigma_theta={} default_s={} engine={} seed={} mc_draws={}",
            self.sigma_gamma_grid,
            prior_base.sigma_theta,
            config.default_s,
            config.engine,
            config.seed,
            config.mc_draws
        );
        for sweep in &sweeps {
            eprintln!(
                "# span {} stability_span={}",
                sweep.case_id,
                output::fmt(sweep.stability_span)
            );
        }

        let partial = !report.issues.is_empty() || !failures.is_empty();
        Ok(if partial { 2 } else { 0 })
    }
}
