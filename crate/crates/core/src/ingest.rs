//! CSV case ingestion with per-row validation reports.
//!
//! The canonical schema is the exact header
//! `case_id,domain,measure,point,ci_lower,ci_upper,se_log,evalue`, UTF-8,
//! `.` decimal separator, empty string meaning absent. Fields are trimmed
//! of surrounding whitespace before parsing.
//!
//! Rows must supply a point estimate or an E-value; when only the E-value
//! is present the point is reconstructed from it on the way in and the
//! record carries `point_reconstructed = true`. [`write_cases`] emits an
//! empty point column for such records, so a write-then-read round trip
//! reproduces every record exactly, flag included.
//!
//! By default any invalid row fails the whole read (silently dropping rows
//! would corrupt study-level summaries); passing `skip_invalid` keeps the
//! valid rows and returns the problems alongside them.

use std::collections::HashSet;
use std::path::Path;

use crate::effect::Measure;
use crate::error::{Error, Result, RowIssue};
use crate::evalue::{evalue_from_ratio, ratio_from_evalue, EValue};

/// The only header accepted on input, and the one written on output.
pub const CSV_HEADER: [&str; 8] = [
    "case_id", "domain", "measure", "point", "ci_lower", "ci_upper", "se_log", "evalue",
];

/// How far a supplied E-value may drift from the one implied by the point
/// estimate before the row is rejected; generous enough for published
/// two-decimal rounding.
const EVALUE_CONSISTENCY_RTOL: f64 = 0.01;

/// One validated input case, fields as supplied except for `point`, which
/// is reconstructed from `evalue` when the file leaves it blank.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseRecord {
    pub case_id: String,
    pub domain: String,
    pub measure: Measure,
    pub point: f64,
    /// True when `point` was derived from `evalue` rather than supplied.
    pub point_reconstructed: bool,
    pub ci: Option<(f64, f64)>,
    pub se_log: Option<f64>,
    pub evalue: Option<f64>,
}

/// Outcome of reading a file: the surviving records plus every problem
/// found. `issues` is empty unless the read ran with `skip_invalid`.
#[derive(Debug)]
pub struct IngestReport {
    pub records: Vec<CaseRecord>,
    pub issues: Vec<RowIssue>,
}

fn issue(line: u64, field: &str, message: String) -> RowIssue {
    RowIssue { line, field: field.to_string(), message }
}

/// Parses an optional positive real; pushes an issue and returns None on
/// any problem.
fn parse_positive(
    raw: &str,
    line: u64,
    field: &str,
    issues: &mut Vec<RowIssue>,
) -> Option<f64> {
    let raw = raw.trim();
    if raw.is_empty() {
        return None;
    }
    match raw.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Some(x),
        Ok(x) => {
            issues.push(issue(line, field, format!("must be a positive finite number, got {x}")));
            None
        }
        Err(_) => {
            issues.push(issue(line, field, format!("not a number: '{raw}'")));
            None
        }
    }
}

/// Reconstructs a point estimate from an E-value, taking the protective
/// side when the record's interval sits wholly below the null.
fn point_from_evalue(evalue: f64, ci: Option<(f64, f64)>) -> f64 {
    let ev = EValue::new(evalue).expect("evalue validated upstream");
    let r = ratio_from_evalue(ev);
    match ci {
        Some((_, hi)) if hi < 1.0 => 1.0 / r,
        _ => r,
    }
}

struct RowOutcome {
    record: Option<CaseRecord>,
    issues: Vec<RowIssue>,
}

fn validate_row(fields: &csv::StringRecord, line: u64, seen: &mut HashSet<String>) -> RowOutcome {
    let mut issues = Vec::new();
    if fields.len() != CSV_HEADER.len() {
        issues.push(issue(
            line,
            "row",
            format!("expected {} fields, found {}", CSV_HEADER.len(), fields.len()),
        ));
        return RowOutcome { record: None, issues };
    }

    let case_id = fields[0].trim().to_string();
    if case_id.is_empty() {
        issues.push(issue(line, "case_id", "must not be empty".to_string()));
    } else if !seen.insert(case_id.clone()) {
        issues.push(issue(line, "case_id", format!("duplicate case_id '{case_id}'")));
    }
    let domain = fields[1].trim().to_string();
    let measure = match Measure::parse(&fields[2]) {
        Ok(m) => Some(m),
        Err(e) => {
            issues.push(issue(line, "measure", e.to_string()));
            None
        }
    };

    let point = parse_positive(&fields[3], line, "point", &mut issues);
    let ci_lower = parse_positive(&fields[4], line, "ci_lower", &mut issues);
    let ci_upper = parse_positive(&fields[5], line, "ci_upper", &mut issues);
    let se_log = parse_positive(&fields[6], line, "se_log", &mut issues);

    let evalue = {
        let raw = fields[7].trim();
        if raw.is_empty() {
            None
        } else {
            match raw.parse::<f64>() {
                Ok(x) if x.is_finite() && x >= 1.0 => Some(x),
                Ok(x) => {
                    issues.push(issue(line, "evalue", format!("must be >= 1, got {x}")));
                    None
                }
                Err(_) => {
                    issues.push(issue(line, "evalue", format!("not a number: '{raw}'")));
                    None
                }
            }
        }
    };

    if !issues.is_empty() {
        return RowOutcome { record: None, issues };
    }

    // cross-field checks only once every field parsed cleanly
    let ci = match (ci_lower, ci_upper) {
        (Some(lo), Some(hi)) => {
            if lo >= hi {
                issues.push(issue(
                    line,
                    "ci_lower",
                    format!("interval is empty or inverted: [{lo}, {hi}]"),
                ));
            }
            Some((lo, hi))
        }
        (Some(_), None) => {
            issues.push(issue(
                line,
                "ci_upper",
                "ci_lower and ci_upper must be supplied together".to_string(),
            ));
            None
        }
        (None, Some(_)) => {
            issues.push(issue(
                line,
                "ci_lower",
                "ci_lower and ci_upper must be supplied together".to_string(),
            ));
            None
        }
        (None, None) => None,
    };

    let (point, point_reconstructed) = match (point, evalue) {
        (Some(p), Some(ev)) => {
            let implied = evalue_from_ratio(p)
                .expect("point validated positive and finite")
                .value();
            if (ev - implied).abs() > EVALUE_CONSISTENCY_RTOL * implied {
                issues.push(issue(
                    line,
                    "evalue",
                    format!("supplied E-value {ev} disagrees with {implied} implied by the point estimate"),
                ));
            }
            (Some(p), false)
        }
        (Some(p), None) => (Some(p), false),
        (None, Some(ev)) => (Some(point_from_evalue(ev, ci)), true),
        (None, None) => {
            issues.push(issue(
                line,
                "point",
                "row supplies neither a point estimate nor an E-value".to_string(),
            ));
            (None, false)
        }
    };

    if let (Some(p), Some((lo, hi))) = (point, ci) {
        if lo < hi && !(lo <= p && p <= hi) {
            issues.push(issue(
                line,
                "point",
                format!("point {p} lies outside its confidence interval [{lo}, {hi}]"),
            ));
        }
    }

    if !issues.is_empty() {
        return RowOutcome { record: None, issues };
    }
    RowOutcome {
        record: Some(CaseRecord {
            case_id,
            domain,
            measure: measure.expect("checked above"),
            point: point.expect("checked above"),
            point_reconstructed,
            ci,
            se_log,
            evalue,
        }),
        issues,
    }
}

/// Reads and validates a case file.
///
/// With `skip_invalid = false` (the default stance) any invalid row turns
/// the whole read into [`Error::Validation`]; with `skip_invalid = true`
/// the valid rows are returned and the issues travel alongside them. A
/// wrong header is fatal either way.
pub fn read_cases(path: &Path, skip_invalid: bool) -> Result<IngestReport> {
    if !path.is_file() {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("{}: no such input file", path.display()),
        )));
    }
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)?;

    let header = reader.headers()?.clone();
    let found: Vec<&str> = header.iter().map(str::trim).collect();
    if found != CSV_HEADER {
        return Err(Error::SchemaMismatch {
            expected: CSV_HEADER.join(","),
            found: found.join(","),
        });
    }

    let mut records = Vec::new();
    let mut issues = Vec::new();
    let mut seen = HashSet::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let outcome = validate_row(&row, line, &mut seen);
        issues.extend(outcome.issues);
        if let Some(rec) = outcome.record {
            records.push(rec);
        }
    }

    if !issues.is_empty() && !skip_invalid {
        return Err(Error::Validation { issues });
    }
    Ok(IngestReport { records, issues })
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes records in the canonical schema. Reconstructed points are
/// written as blanks so that reading the file back reproduces the records
/// exactly, reconstruction flag included.
pub fn write_cases(records: &[CaseRecord], path: &Path) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    writer.write_record(CSV_HEADER)?;
    for rec in records {
        let point = if rec.point_reconstructed {
            String::new()
        } else {
            rec.point.to_string()
        };
        writer.write_record([
            rec.case_id.as_str(),
            rec.domain.as_str(),
            rec.measure.code(),
            point.as_str(),
            fmt_opt(rec.ci.map(|c| c.0)).as_str(),
            fmt_opt(rec.ci.map(|c| c.1)).as_str(),
            fmt_opt(rec.se_log).as_str(),
            fmt_opt(rec.evalue).as_str(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    const HEADER: &str = "case_id,domain,measure,point,ci_lower,ci_upper,se_log,evalue\n";

    #[test]
    fn reads_a_fully_specified_row() {
        let f = write_temp(&format!(
            "{HEADER}alpha,smoking,RR,2.0,1.4,2.86,,\n"
        ));
        let report = read_cases(f.path(), false).unwrap();
        assert_eq!(report.records.len(), 1);
        let rec = &report.records[0];
        assert_eq!(rec.case_id, "alpha");
        assert_eq!(rec.domain, "smoking");
        assert_eq!(rec.measure, Measure::RiskRatio);
        assert_eq!(rec.point, 2.0);
        assert!(!rec.point_reconstructed);
        assert_eq!(rec.ci, Some((1.4, 2.86)));
        assert_eq!(rec.se_log, None);
        assert_eq!(rec.evalue, None);
    }

    #[test]
    fn reconstructs_the_point_from_an_evalue_only_row() {
        let f = write_temp(&format!("{HEADER}env,environmental health,HR,,,,,4.25\n"));
        let report = read_cases(f.path(), false).unwrap();
        let rec = &report.records[0];
        assert!(rec.point_reconstructed);
        assert!((rec.point - 2.4083333333333333).abs() < 1e-12 * 2.41);
        assert_eq!(rec.evalue, Some(4.25));
    }

    #[test]
    fn protective_interval_steers_reconstruction_below_one() {
        let f = write_temp(&format!("{HEADER}prot,smoking,RR,,0.35,0.714,,2.15\n"));
        let report = read_cases(f.path(), false).unwrap();
        let rec = &report.records[0];
        assert!(rec.point_reconstructed);
        assert!(rec.point < 1.0, "point = {}", rec.point);
        assert!(rec.ci.unwrap().0 <= rec.point && rec.point <= rec.ci.unwrap().1);
    }

    #[test]
    fn empty_file_with_header_yields_no_records() {
        let f = write_temp(HEADER);
        let report = read_cases(f.path(), false).unwrap();
        assert!(report.records.is_empty());
        assert!(report.issues.is_empty());
    }

    #[test]
    fn wrong_header_is_a_schema_error() {
        let f = write_temp("id,domain,measure,point\nx,y,RR,2.0\n");
        match read_cases(f.path(), false).unwrap_err() {
            Error::SchemaMismatch { expected, found } => {
                assert!(expected.starts_with("case_id,"));
                assert!(found.starts_with("id,"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn invalid_rows_fail_atomically_by_default() {
        let f = write_temp(&format!(
            "{HEADER}good,smoking,RR,2.0,,,0.2,\nbad,smoking,RR,-1.0,,,0.2,\n"
        ));
        match read_cases(f.path(), false).unwrap_err() {
            Error::Validation { issues } => {
                assert_eq!(issues.len(), 1);
                assert_eq!(issues[0].line, 3);
                assert_eq!(issues[0].field, "point");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn skip_invalid_keeps_good_rows_and_reports_the_rest() {
        let f = write_temp(&format!(
            "{HEADER}a,smoking,RR,2.0,,,0.2,\nb,smoking,XX,2.0,,,0.2,\nc,smoking,RR,1.5,,,0.1,\n"
        ));
        let report = read_cases(f.path(), true).unwrap();
        assert_eq!(report.records.len(), 2);
        assert_eq!(report.records[0].case_id, "a");
        assert_eq!(report.records[1].case_id, "c");
        assert_eq!(report.issues.len(), 1);
        assert_eq!(report.issues[0].field, "measure");
    }

    #[test]
    fn duplicate_case_ids_are_flagged_on_the_later_row() {
        let f = write_temp(&format!(
            "{HEADER}a,smoking,RR,2.0,,,0.2,\na,smoking,RR,1.5,,,0.1,\n"
        ));
        match read_cases(f.path(), false).unwrap_err() {
            Error::Validation { issues } => {
                assert_eq!(issues.len(), 1);
                assert_eq!(issues[0].line, 3);
                assert!(issues[0].message.contains("duplicate"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rows_need_a_point_or_an_evalue() {
        let f = write_temp(&format!("{HEADER}a,smoking,RR,,1.4,2.86,,\n"));
        // a CI alone cannot anchor the effect size
        match read_cases(f.path(), false).unwrap_err() {
            Error::Validation { issues } => {
                assert_eq!(issues[0].field, "point");
                assert!(issues[0].message.contains("neither"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn lone_ci_bounds_are_rejected() {
        let f = write_temp(&format!("{HEADER}a,smoking,RR,2.0,1.4,,,\n"));
        match read_cases(f.path(), false).unwrap_err() {
            Error::Validation { issues } => {
                assert_eq!(issues[0].field, "ci_upper");
                assert!(issues[0].message.contains("together"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn non_bracketing_interval_is_rejected() {
        let f = write_temp(&format!("{HEADER}a,smoking,RR,3.0,1.4,2.86,,\n"));
        match read_cases(f.path(), false).unwrap_err() {
            Error::Validation { issues } => {
                assert_eq!(issues[0].field, "point");
                assert!(issues[0].message.contains("outside"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn sub_unit_evalue_is_rejected() {
        let f = write_temp(&format!("{HEADER}a,smoking,RR,,,,,0.9\n"));
        match read_cases(f.path(), false).unwrap_err() {
            Error::Validation { issues } => assert_eq!(issues[0].field, "evalue"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn inconsistent_supplied_evalue_is_rejected() {
        // point 2.0 implies E = 3.414..., far from the claimed 5.0
        let f = write_temp(&format!("{HEADER}a,smoking,RR,2.0,,,0.2,5.0\n"));
        match read_cases(f.path(), false).unwrap_err() {
            Error::Validation { issues } => {
                assert_eq!(issues[0].field, "evalue");
                assert!(issues[0].message.contains("disagrees"));
            }
            other => panic!("unexpected error {other:?}"),
        }
        // within rounding distance passes
        let f = write_temp(&format!("{HEADER}a,smoking,RR,2.0,,,0.2,3.41\n"));
        assert!(read_cases(f.path(), false).is_ok());
    }

    #[test]
    fn ragged_rows_are_reported_not_fatal() {
        let f = write_temp(&format!("{HEADER}a,smoking,RR,2.0\nb,smoking,RR,1.5,,,0.1,\n"));
        let report = read_cases(f.path(), true).unwrap();
        assert_eq!(report.records.len(), 1);
        assert_eq!(report.issues[0].field, "row");
        assert!(report.issues[0].message.contains("expected 8 fields"));
    }

    #[test]
    fn write_then_read_is_the_identity() {
        let records = vec![
            CaseRecord {
                case_id: "full".into(),
                domain: "smoking".into(),
                measure: Measure::RiskRatio,
                point: 1.9,
                point_reconstructed: false,
                ci: Some((1.3, 2.78)),
                se_log: Some(0.194),
                evalue: None,
            },
            CaseRecord {
                case_id: "recon".into(),
                domain: "environmental health".into(),
                measure: Measure::HazardRatio,
                point: ratio_from_evalue(EValue::new(4.25).unwrap()),
                point_reconstructed: true,
                ci: None,
                se_log: None,
                evalue: Some(4.25),
            },
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cases.csv");
        write_cases(&records, &path).unwrap();
        let report = read_cases(&path, false).unwrap();
        assert_eq!(report.records, records);
    }

    #[test]
    fn permuting_valid_rows_permutes_records() {
        let a = "a,smoking,RR,2.0,,,0.2,\n";
        let b = "b,back pain,OR,1.5,,,0.1,\n";
        let fwd = write_temp(&format!("{HEADER}{a}{b}"));
        let rev = write_temp(&format!("{HEADER}{b}{a}"));
        let fwd = read_cases(fwd.path(), false).unwrap().records;
        let mut rev = read_cases(rev.path(), false).unwrap().records;
        rev.reverse();
        assert_eq!(fwd, rev);
    }
}
