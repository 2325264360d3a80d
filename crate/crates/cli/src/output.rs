//! Shared writers: results/sweep CSVs with 10-significant-digit numbers
//! and `\n` line endings, plus the JSON mirror builder.

use std::io::Write;
use std::path::Path;

use confound::analysis::{AnalysisConfig, CaseResult, SweepResult};
use confound::error::CaseFailure;
use confound::model::PriorSpec;
use confound::numfmt::{format_sig, round_sig};

pub const SIG_DIGITS: usize = 10;

pub const RESULTS_HEADER: [&str; 13] = [
    "case_id",
    "domain",
    "rr_normalized",
    "theta_obs",
    "s",
    "evalue",
    "gamma_star",
    "p_exceed",
    "mean_theta_true",
    "theta_ci_lo",
    "theta_ci_hi",
    "mean_log_gamma",
    "flags",
];

pub const SWEEP_HEADER: [&str; 3] = ["case_id", "sigma_gamma", "p_exceed"];

pub fn fmt(x: f64) -> String {
    format_sig(x, SIG_DIGITS)
}

/// File sink or stdout when no path was given.
pub fn sink(path: Option<&Path>) -> confound::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn csv_writer(inner: Box<dyn Write>) -> csv::Writer<Box<dyn Write>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(inner)
}

pub fn write_results_csv(inner: Box<dyn Write>, results: &[CaseResult]) -> confound::Result<()> {
    let mut w = csv_writer(inner);
    w.write_record(RESULTS_HEADER)?;
    for r in results {
        w.write_record([
            r.case_id.as_str(),
            r.domain.as_str(),
            &fmt(r.rr_normalized),
            &fmt(r.theta_obs),
            &fmt(r.s),
            &fmt(r.evalue.value()),
            &fmt(r.gamma_star.value()),
            &fmt(r.p_exceed),
            &fmt(r.mean_theta_true),
            &fmt(r.theta_true_ci.0),
            &fmt(r.theta_true_ci.1),
            &fmt(r.mean_log_gamma),
            &r.flags.render(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv(inner: Box<dyn Write>, sweeps: &[SweepResult]) -> confound::Result<()> {
    let mut w = csv_writer(inner);
    w.write_record(SWEEP_HEADER)?;
    for sweep in sweeps {
        for &(sigma_gamma, p) in &sweep.grid {
            w.write_record([sweep.case_id.as_str(), &fmt(sigma_gamma), &fmt(p)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_span_summary_csv(
    inner: Box<dyn Write>,
    sweeps: &[SweepResult],
) -> confound::Result<()> {
    let mut w = csv_writer(inner);
    w.write_record(["case_id", "stability_span"])?;
    for sweep in sweeps {
        w.write_record([sweep.case_id.as_str(), &fmt(sweep.stability_span)])?;
    }
    w.flush()?;
    Ok(())
}

fn num(x: f64) -> serde_json::Value {
    serde_json::json!(round_sig(x, SIG_DIGITS))
}

/// The run configuration block embedded in every JSON mirror, so defaulted
/// knobs like `default_s` are always on the record.
pub fn config_json(prior: &PriorSpec, config: &AnalysisConfig) -> serde_json::Value {
    serde_json::json!({
        "sigma_gamma": prior.sigma_gamma,
        "sigma_theta": prior.sigma_theta,
        "default_s": config.default_s,
        "engine": config.engine.code(),
        "seed": config.seed,
        "mc_draws": config.mc_draws,
    })
}

pub fn results_json(
    prior: &PriorSpec,
    config: &AnalysisConfig,
    results: &[CaseResult],
    failures: &[CaseFailure],
) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = results
        .iter()
        .map(|r| {
            serde_json::json!({
                "case_id": r.case_id,
                "domain": r.domain,
                "rr_normalized": num(r.rr_normalized),
                "theta_obs": num(r.theta_obs),
                "s": num(r.s),
                "evalue": num(r.evalue.value()),
                "gamma_star": num(r.gamma_star.value()),
                "p_exceed": num(r.p_exceed),
                "mean_theta_true": num(r.mean_theta_true),
                "theta_ci_lo": num(r.theta_true_ci.0),
                "theta_ci_hi": num(r.theta_true_ci.1),
                "mean_log_gamma": num(r.mean_log_gamma),
                "flags": r.flags.render(),
            })
        })
        .collect();
    let fails: Vec<serde_json::Value> = failures
        .iter()
        .map(|f| serde_json::json!({ "case_id": f.case_id, "error": f.error.to_string() }))
        .collect();
    serde_json::json!({
        "config": config_json(prior, config),
        "results": rows,
        "failures": fails,
    })
}
