//! `confound analyze` — the per-case pipeline over a case CSV.
//!
//! Results go to `--out` (or stdout) in the fixed 13-column schema; the
//! optional `--json` mirror also records the run configuration. Validation
//! problems are reported as a JSON array on stderr. Exit 0 on full
//! success, 2 when rows were skipped or cases failed but results exist.

use std::path::PathBuf;

use clap::Args;
use confound::analysis::{analyze_batch, AnalysisConfig};
use confound::ingest::read_cases;
use confound::model::{Engine, PriorSpec};
use confound::Error;

use crate::commands::{parse_engine, resolve_seed};
use crate::output;

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Case CSV (header: case_id,domain,measure,point,ci_lower,ci_upper,se_log,evalue)
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Bias prior scale
    #[arg(long, default_value_t = 0.5, value_name = "SD")]
    sigma_gamma: f64,
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
    /// Monte Carlo draws per case
    #[arg(long, default_value_t = 1_000_000, value_name = "N")]
    mc_draws: usize,
    /// Keep valid rows when some fail validation instead of failing atomically
    #[arg(long)]
    skip_invalid: bool,
    /// Results CSV path; stdout when absent
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Also write a JSON mirror (results + configuration) here
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

impl AnalyzeArgs {
    pub fn run(self) -> confound::Result<u8> {
        let seed = resolve_seed(self.seed)?;
        let prior = PriorSpec::new(self.sigma_theta, self.sigma_gamma)?;
        let config = AnalysisConfig {
            default_s: self.default_s,
            engine: self.engine,
            seed,
            mc_draws: self.mc_draws,
        };

        let report = read_cases(&self.input, self.skip_invalid)?;
        if report.records.is_empty() && !report.issues.is_empty() {
            // nothing survived; partial success would be misleading
            return Err(Error::Validation { issues: report.issues });
        }
        if !report.issues.is_empty() {
            eprintln!("warning: skipped {} invalid row(s)", report.issues.len());
            eprintln!(
                "{}",
                serde_json::to_string(&report.issues).expect("row issues serialize")
            );
        }

        let outcome = analyze_batch(&report.records, &prior, &config)?;
        for failure in &outcome.failures {
            eprintln!("warning: {}", failure.error);
        }

        output::write_results_csv(output::sink(self.out.as_deref())?, &outcome.results)?;
        if let Some(json_path) = &self.json {
            let doc = output::results_json(&prior, &config, &outcome.results, &outcome.failures);
            std::fs::write(json_path, format!("{:#}\n", doc))?;
        }
        eprintln!(
            "# config: sigma_gamma={} sigma_theta={} default_s={} engine={} seed={} mc_draws={} | {} case(s), {} failure(s)",
            prior.sigma_gamma,
            prior.sigma_theta,
            config.default_s,
            config.engine,
            config.seed,
            config.mc_draws,
            outcome.results.len(),
            outcome.failures.len()
        );

        let partial = !report.issues.is_empty() || !outcome.failures.is_empty();
        Ok(if partial { 2 } else { 0 })
    }
}
