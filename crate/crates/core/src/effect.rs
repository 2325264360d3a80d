//! Reported associations on the ratio scale and their log-scale form.
//!
//! Estimates arrive as risk ratios, odds ratios, or hazard ratios with a
//! point value and, when available, a 95% confidence interval or a log-scale
//! standard error. The model works with `theta_obs = ln(ratio)` and its
//! standard error `s`, with protective associations (ratio < 1) mapped to
//! their reciprocals first so both directions share one analysis path.

use crate::error::{Error, Result};

/// The 97.5% standard normal quantile used for CI-width conversions, at the
/// precision of the quantile function itself rather than the textbook 1.96.
pub const Z_975: f64 = 1.959964;

/// Ratio-scale effect measure kinds accepted on input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    RiskRatio,
    OddsRatio,
    HazardRatio,
}

impl Measure {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "RR" => Ok(Measure::RiskRatio),
            "OR" => Ok(Measure::OddsRatio),
            "HR" => Ok(Measure::HazardRatio),
            other => Err(Error::UnknownMeasure(other.to_string())),
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Measure::RiskRatio => "RR",
            Measure::OddsRatio => "OR",
            Measure::HazardRatio => "HR",
        }
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::parse(s)
    }
}

/// A reported association: point estimate with optional CI and/or log-scale
/// standard error.
///
/// When both a CI and `se_log` are present, `se_log` wins; this lets a
/// dataset pin the exact `s` used regardless of interval rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectEstimate {
    pub measure: Measure,
    /// Ratio-scale point estimate, > 0.
    pub point: f64,
    /// Ratio-scale 95% interval, present as a pair or not at all.
    pub ci: Option<(f64, f64)>,
    /// Standard error of ln(point), if reported directly.
    pub se_log: Option<f64>,
}

impl EffectEstimate {
    pub fn new(measure: Measure, point: f64, ci: Option<(f64, f64)>, se_log: Option<f64>) -> Result<Self> {
        let e = EffectEstimate { measure, point, ci, se_log };
        e.validate()?;
        Ok(e)
    }

    /// Checks `point > 0`, CI bounds positive and bracketing the point, and
    /// `se_log > 0` where present. A zero-width CI is deferred to
    /// [`to_log_estimate`], which reports it as a degenerate interval.
    pub fn validate(&self) -> Result<()> {
        if !(self.point > 0.0 && self.point.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "point",
                value: self.point,
                reason: "ratio-scale point estimate must be positive and finite",
            });
        }
        if let Some((lo, hi)) = self.ci {
            if !(lo > 0.0 && lo.is_finite() && hi > 0.0 && hi.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "ci",
                    value: if lo > 0.0 { hi } else { lo },
                    reason: "confidence bounds must be positive and finite",
                });
            }
            if lo > self.point || hi < self.point {
                return Err(Error::InvalidParameter {
                    name: "ci",
                    value: self.point,
                    reason: "confidence interval must contain the point estimate",
                });
            }
        }
        if let Some(se) = self.se_log {
            if !(se > 0.0 && se.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "se_log",
                    value: se,
                    reason: "log-scale standard error must be positive and finite",
                });
            }
        }
        Ok(())
    }
}

/// The association on the log scale, after direction normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEstimate {
    /// ln of the normalized ratio; >= 0 by construction.
    pub theta_obs: f64,
    /// Standard error of `theta_obs`, > 0.
    pub s: f64,
    /// Whether the reciprocal transform was applied (original ratio < 1).
    pub inverted: bool,
}

/// Re-tags an odds or hazard ratio as a risk ratio with identical numerics.
///
/// The second return value is true when an approximation is actually in
/// force (the measure was not already a risk ratio); downstream provenance
/// reporting surfaces it.
pub fn measure_as_rr(e: EffectEstimate) -> (EffectEstimate, bool) {
    let approximated = e.measure != Measure::RiskRatio;
    (EffectEstimate { measure: Measure::RiskRatio, ..e }, approximated)
}

/// Converts to the log scale: direction-normalizes the ratio (reciprocal
/// plus CI swap when point < 1), then resolves the standard error with
/// precedence `se_log`, then CI width over `2 * Z_975`, then `default_s`.
///
/// Fails when no uncertainty source is available, when the CI has zero
/// width, or when the estimate itself is invalid.
pub fn to_log_estimate(e: &EffectEstimate, default_s: Option<f64>) -> Result<LogEstimate> {
    e.validate()?;
    let inverted = e.point < 1.0;
    let (point, ci) = if inverted {
        (1.0 / e.point, e.ci.map(|(lo, hi)| (1.0 / hi, 1.0 / lo)))
    } else {
        (e.point, e.ci)
    };
    let s = match (e.se_log, ci) {
        (Some(se), _) => se,
        (None, Some((lo, hi))) => {
            if lo == hi {
                return Err(Error::DegenerateInterval(lo));
            }
            (hi.ln() - lo.ln()) / (2.0 * Z_975)
        }
        (None, None) => match default_s {
            Some(s) if s > 0.0 && s.is_finite() => s,
            Some(s) => {
                return Err(Error::InvalidParameter {
                    name: "default_s",
                    value: s,
                    reason: "fallback standard error must be positive and finite",
                })
            }
            None => return Err(Error::MissingUncertainty),
        },
    };
    Ok(LogEstimate { theta_obs: point.ln(), s, inverted })
}
