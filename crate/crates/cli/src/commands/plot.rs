//! `confound plot` — renders one of the three figures from a results CSV
//! (`e-vs-p`, `case-bars`) or a sweep CSV (`prior-sensitivity`).

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use confound::Error;

use crate::figures::{self, EvpPoint, SweepVertex};
use crate::output::{RESULTS_HEADER, SWEEP_HEADER};

#[derive(Clone, Copy, ValueEnum)]
pub enum FigureKind {
    /// Scatter of (E-value, p_exceed) with a moving-median trend
    #[value(name = "e-vs-p")]
    EVsP,
    /// Horizontal bars, most explainable case first
    #[value(name = "case-bars")]
    CaseBars,
    /// One polyline per case across the sigma_gamma grid
    #[value(name = "prior-sensitivity")]
    PriorSensitivity,
}

#[derive(Args)]
pub struct PlotArgs {
    /// Results CSV from `analyze` (e-vs-p, case-bars) or `sweep`
    /// (prior-sensitivity)
    #[arg(long, value_name = "FILE")]
    results: PathBuf,
    /// Which figure to render
    #[arg(long, value_enum)]
    figure: FigureKind,
    /// Output SVG path
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

fn open_checked(path: &Path, expected: &[&str]) -> confound::Result<csv::Reader<std::fs::File>> {
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.clone();
    let found: Vec<&str> = header.iter().map(str::trim).collect();
    if found != expected {
        return Err(Error::SchemaMismatch {
            expected: expected.join(","),
            found: found.join(","),
        });
    }
    Ok(reader)
}

fn parse_field(raw: &str) -> confound::Result<f64> {
    raw.trim().parse::<f64>().map_err(|_| Error::InvalidParameter {
        name: "results",
        value: f64::NAN,
        reason: "numeric field in the results file could not be parsed",
    })
}

fn read_results(path: &Path) -> confound::Result<Vec<EvpPoint>> {
    let mut reader = open_checked(path, &RESULTS_HEADER)?;
    let mut points = Vec::new();
    for row in reader.records() {
        let row = row?;
        points.push(EvpPoint {
            case_id: row[0].trim().to_string(),
            domain: row[1].trim().to_string(),
            evalue: parse_field(&row[5])?,
            p: parse_field(&row[7])?,
        });
    }
    Ok(points)
}

fn read_sweep(path: &Path) -> confound::Result<Vec<SweepVertex>> {
    let mut reader = open_checked(path, &SWEEP_HEADER)?;
    let mut rows = Vec::new();
    for row in reader.records() {
        let row = row?;
        rows.push(SweepVertex {
            case_id: row[0].trim().to_string(),
            sigma_gamma: parse_field(&row[1])?,
            p: parse_field(&row[2])?,
        });
    }
    Ok(rows)
}

fn require_rows<T>(rows: Vec<T>) -> confound::Result<Vec<T>> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter {
            name: "results",
            value: 0.0,
            reason: "no data rows to plot",
        });
    }
    Ok(rows)
}

impl PlotArgs {
    pub fn run(self) -> confound::Result<u8> {
        let svg = match self.figure {
            FigureKind::EVsP => figures::e_vs_p(&require_rows(read_results(&self.results)?)?),
            FigureKind::CaseBars => {
                figures::case_bars(&require_rows(read_results(&self.results)?)?)
            }
            FigureKind::PriorSensitivity => {
                figures::prior_sensitivity(&require_rows(read_sweep(&self.results)?)?)
            }
        };
        std::fs::write(&self.out, svg)?;
        Ok(0)
    }
}
