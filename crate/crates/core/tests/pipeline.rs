//! The shipped 11-case dataset, end to end: ingest, batch analysis,
//! ranking, prior sweeps, and the writer round-trip.

mod common;

use std::fs;
use std::path::Path;

use common::spearman;
use confound::analysis::{
    analyze_batch, analyze_case, rank_by_robustness, summarize_by_domain, sweep_prior,
    AnalysisConfig,
};
use confound::ingest::{read_cases, write_cases, CaseRecord};
use confound::model::{Engine, PriorSpec};
use confound::Error;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/cases.csv");

/// Closed-form exceedance probabilities for the fixture at
/// default_s = 0.15, sigma_theta = 1.0, sigma_gamma = 0.5; frozen from
/// high-precision reference arithmetic.
const EXPECTED_P: [(&str, f64); 11] = [
    ("env_pm25", 0.0034377532177),
    ("smk_current", 0.00787016827798),
    ("smk_maternal", 0.171404048853),
    ("smk_household", 0.188933493684),
    ("bp_lift", 0.155586254265),
    ("bp_vibration", 0.212496339051),
    ("bp_sitting", 0.297498616652),
    ("bp_obesity", 0.393522388818),
    ("bp_sedentary", 0.520631688213),
    ("alz_hyper", 0.471179051689),
    ("alz_diab", 0.541781626786),
];

const RANKED_IDS: [&str; 11] = [
    "alz_diab",
    "bp_sedentary",
    "alz_hyper",
    "bp_obesity",
    "bp_sitting",
    "bp_vibration",
    "smk_household",
    "smk_maternal",
    "bp_lift",
    "smk_current",
    "env_pm25",
];

fn fixture_records() -> Vec<CaseRecord> {
    let report = read_cases(Path::new(FIXTURE), false).unwrap();
    assert!(report.issues.is_empty());
    report.records
}

fn fixture_config() -> (PriorSpec, AnalysisConfig) {
    let prior = PriorSpec::new(1.0, 0.5).unwrap();
    let config = AnalysisConfig { default_s: 0.15, ..AnalysisConfig::default() };
    (prior, config)
}

#[test]
fn fixture_ingests_cleanly_with_reconstructed_points() {
    let records = fixture_records();
    assert_eq!(records.len(), 11);
    for rec in &records {
        assert!(rec.point_reconstructed, "{} should have a derived point", rec.case_id);
        assert!(rec.evalue.is_some());
        assert!(rec.se_log.is_none() && rec.ci.is_none());
        assert!(rec.point > 1.0);
    }
    // E = 2 + sqrt(2) inverts to ratio 2; the PM2.5 row inverts likewise
    let env = &records[0];
    assert_eq!(env.case_id, "env_pm25");
    assert!((env.point - 2.4083333333333333).abs() < 1e-12, "point = {}", env.point);
}

#[test]
fn closed_form_batch_reproduces_frozen_probabilities() {
    let (prior, config) = fixture_config();
    let outcome = analyze_batch(&fixture_records(), &prior, &config).unwrap();
    assert!(outcome.failures.is_empty());
    assert_eq!(outcome.results.len(), 11);
    for (result, (id, p)) in outcome.results.iter().zip(EXPECTED_P) {
        assert_eq!(result.case_id, id, "input order must be preserved");
        assert!(
            (result.p_exceed - p).abs() < 1e-9,
            "{id}: p_exceed = {}, frozen {p}",
            result.p_exceed
        );
        assert!((result.s - 0.15).abs() < 1e-15);
        assert!(result.flags.se_defaulted && result.flags.point_reconstructed);
    }
    let evalues: Vec<f64> = outcome.results.iter().map(|r| r.evalue.value()).collect();
    let ps: Vec<f64> = outcome.results.iter().map(|r| r.p_exceed).collect();
    assert_eq!(spearman(&evalues, &ps), -1.0, "p must fall monotonically as E rises");
}

#[test]
fn ranking_is_least_robust_first() {
    let (prior, config) = fixture_config();
    let outcome = analyze_batch(&fixture_records(), &prior, &config).unwrap();
    let ranked = rank_by_robustness(outcome.results);
    let ids: Vec<&str> = ranked.iter().map(|r| r.case_id.as_str()).collect();
    assert_eq!(ids, RANKED_IDS);
    for pair in ranked.windows(2) {
        assert!(pair[0].p_exceed >= pair[1].p_exceed);
    }
}

#[test]
fn quadrature_batch_equals_per_case_calls() {
    let (prior, mut config) = fixture_config();
    config.engine = Engine::Quadrature;
    let records = fixture_records();
    let outcome = analyze_batch(&records, &prior, &config).unwrap();
    for (rec, from_batch) in records.iter().zip(&outcome.results) {
        let alone = analyze_case(rec, &prior, &config).unwrap();
        assert_eq!(&alone, from_batch, "{}", rec.case_id);
    }
}

#[test]
fn quadrature_results_match_the_closed_form_on_the_fixture() {
    let (prior, mut config) = fixture_config();
    config.engine = Engine::Quadrature;
    let outcome = analyze_batch(&fixture_records(), &prior, &config).unwrap();
    for (result, (id, p)) in outcome.results.iter().zip(EXPECTED_P) {
        assert!(
            (result.p_exceed - p).abs() < 1e-6,
            "{id}: quadrature {}, frozen closed form {p}",
            result.p_exceed
        );
    }
}

#[test]
fn prior_sweep_reproduces_frozen_stability_spans() {
    let (prior, config) = fixture_config();
    let grid = [0.25, 0.5, 1.0];
    let records = fixture_records();
    let mut spans = Vec::new();
    for rec in &records {
        let sweep = sweep_prior(rec, &grid, &prior, &config).unwrap();
        assert_eq!(sweep.grid.len(), 3);
        for (pair, g) in sweep.grid.iter().zip(grid) {
            assert_eq!(pair.0, g);
        }
        // a wider bias prior can only raise the exceedance probability
        // for a harmful observed effect
        for pair in sweep.grid.windows(2) {
            assert!(pair[0].1 <= pair[1].1, "{}: sweep not monotone", rec.case_id);
        }
        spans.push((rec.case_id.clone(), sweep.stability_span));
    }
    let span_of = |id: &str| spans.iter().find(|(i, _)| i == id).unwrap().1;
    assert!((span_of("env_pm25") - 0.1059088402).abs() < 1e-8);
    assert!((span_of("alz_diab") - 0.4482141368).abs() < 1e-8);
    // stronger associations are the stable ones
    assert!(span_of("env_pm25") < span_of("alz_diab"));
}

#[test]
fn study_summary_groups_domains_in_first_appearance_order() {
    let (prior, config) = fixture_config();
    let outcome = analyze_batch(&fixture_records(), &prior, &config).unwrap();
    let summaries = summarize_by_domain(&outcome.results);
    let domains: Vec<&str> = summaries.iter().map(|s| s.domain.as_str()).collect();
    assert_eq!(domains, ["environmental health", "smoking", "back pain", "Alzheimer"]);
    let smoking = &summaries[1];
    assert_eq!(smoking.cases, 3);
    let ps = [0.00787016827798, 0.171404048853, 0.188933493684];
    assert!((smoking.mean_p - ps.iter().sum::<f64>() / 3.0).abs() < 1e-9);
    assert!((smoking.min_p - ps[0]).abs() < 1e-9);
    assert!((smoking.max_p - ps[2]).abs() < 1e-9);
}

#[test]
fn write_then_read_is_the_identity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("roundtrip.csv");
    let records = fixture_records();
    write_cases(&records, &path).unwrap();
    let reread = read_cases(&path, false).unwrap();
    assert!(reread.issues.is_empty());
    assert_eq!(reread.records, records);
}

#[test]
fn corrupt_rows_fail_atomically_or_are_skipped_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("augmented.csv");
    let mut text = fs::read_to_string(FIXTURE).unwrap();
    text.push_str("bad_measure,misc,XX,1.5,,,0.1,\n");
    text.push_str("bad_evalue,misc,RR,,,,,0.8\n");
    fs::write(&path, text).unwrap();

    // strict mode: nothing is salvaged, the report names the lines
    let err = read_cases(&path, false).unwrap_err();
    match err {
        Error::Validation { issues } => {
            let lines: Vec<u64> = issues.iter().map(|i| i.line).collect();
            assert_eq!(lines, [13, 14]);
            assert_eq!(issues[0].field, "measure");
            assert_eq!(issues[1].field, "evalue");
        }
        other => panic!("expected a validation report, got {other}"),
    }

    // skip-invalid mode: good rows pass through, issues still reported
    let report = read_cases(&path, true).unwrap();
    assert_eq!(report.records.len(), 11);
    assert_eq!(report.issues.len(), 2);
    assert_eq!(report.records, fixture_records());
}
