//! E-values: the minimum confounding strength able to explain away an
//! observed ratio, and the inverse map back to ratios.
//!
//! The E-value of a risk ratio `r >= 1` is `r + sqrt(r (r - 1))`
//! (VanderWeele & Ding's formulation); ratios below 1 are reciprocated
//! first. The inverse, `r = E^2 / (2E - 1)`, reconstructs point estimates
//! for datasets that report only E-values.

use crate::effect::EffectEstimate;
use crate::error::{Error, Result};

/// A confounding-strength threshold; at least 1 by construction, exactly 1
/// only for null associations.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EValue(f64);

impl EValue {
    pub fn new(value: f64) -> Result<Self> {
        if value >= 1.0 && value.is_finite() {
            Ok(EValue(value))
        } else {
            Err(Error::InvalidParameter {
                name: "evalue",
                value,
                reason: "an E-value is at least 1 and finite",
            })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for EValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// E-value of a ratio-scale estimate; reciprocal-symmetric, exactly 1 at
/// the null.
pub fn evalue_from_ratio(rr: f64) -> Result<EValue> {
    if !(rr > 0.0 && rr.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "rr",
            value: rr,
            reason: "ratio must be positive and finite",
        });
    }
    let r = if rr >= 1.0 { rr } else { 1.0 / rr };
    Ok(EValue(r + (r * (r - 1.0)).sqrt()))
}

/// The unique ratio `r >= 1` whose E-value is `ev`: `E^2 / (2E - 1)`.
pub fn ratio_from_evalue(ev: EValue) -> f64 {
    let e = ev.value();
    e * e / (2.0 * e - 1.0)
}

/// E-value of the confidence limit closer to the null, after direction
/// normalization; exactly 1 when the interval crosses or touches 1.
///
/// This is the conventional companion to the point E-value: it asks how
/// much confounding would move the interval, rather than the estimate, to
/// the null.
pub fn evalue_for_ci_limit(e: &EffectEstimate) -> Result<EValue> {
    e.validate()?;
    let (lo, hi) = e.ci.ok_or(Error::MissingCi)?;
    let near_null = if e.point >= 1.0 { lo } else { 1.0 / hi };
    if near_null <= 1.0 {
        Ok(EValue(1.0))
    } else {
        evalue_from_ratio(near_null)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effect::Measure;

    #[test]
    fn null_ratio_needs_no_confounding() {
        assert_eq!(evalue_from_ratio(1.0).unwrap().value(), 1.0);
    }

    #[test]
    fn reference_values() {
        // 2 + sqrt(2), verified by root-solving E - (r + sqrt(r^2 - r)) = 0
        let e = evalue_from_ratio(2.0).unwrap().value();
        assert!((e - 3.414213562373095).abs() < 1e-12, "got {e}");
        let e = evalue_from_ratio(0.5).unwrap().value();
        assert!((e - 3.414213562373095).abs() < 1e-12, "reciprocal case, got {e}");
        let e = evalue_from_ratio(1.4).unwrap().value();
        assert!((e - 2.1483314773547883).abs() < 1e-12, "got {e}");
    }

    #[test]
    fn inverse_reference_values() {
        let r = ratio_from_evalue(EValue::new(4.25).unwrap());
        assert!((r - 2.4083333333333333).abs() < 1e-12, "18.0625/7.5, got {r}");
        let r = ratio_from_evalue(EValue::new(3.686).unwrap());
        assert!((r - 2.1322341494036409).abs() < 1e-12, "got {r}");
        assert_eq!(ratio_from_evalue(EValue::new(1.0).unwrap()), 1.0);
    }

    #[test]
    fn round_trip_inverse_then_forward() {
        for ev in [1.0, 1.32, 1.39, 1.9, 3.686, 4.25, 10.0, 500.0] {
            let r = ratio_from_evalue(EValue::new(ev).unwrap());
            let back = evalue_from_ratio(r).unwrap().value();
            assert!((back - ev).abs() < 1e-10 * ev.max(1.0), "ev = {ev}, back = {back}");
        }
    }

    #[test]
    fn round_trip_forward_then_inverse() {
        let mut r = 1.0;
        while r <= 1000.0 {
            let e = evalue_from_ratio(r).unwrap();
            let back = ratio_from_evalue(e);
            assert!((back - r).abs() < 1e-10 * r, "r = {r}, back = {back}");
            r *= 1.37;
        }
    }

    #[test]
    fn reciprocal_symmetry() {
        for r in [1.1, 2.0, 5.0, 0.5, 0.2] {
            let a = evalue_from_ratio(r).unwrap().value();
            let b = evalue_from_ratio(1.0 / r).unwrap().value();
            assert!((a - b).abs() < 1e-12, "r = {r}");
        }
    }

    #[test]
    fn evalue_dominates_ratio_and_grows_with_it() {
        let mut last = 1.0;
        for i in 0..200 {
            let r = 1.0 + 0.1 * i as f64;
            let e = evalue_from_ratio(r).unwrap().value();
            assert!(e >= r, "E({r}) = {e} below the ratio");
            if i > 0 {
                assert!(e > last, "not increasing at r = {r}");
            }
            last = e;
        }
    }

    #[test]
    fn domain_errors() {
        assert!(evalue_from_ratio(0.0).is_err());
        assert!(evalue_from_ratio(-1.0).is_err());
        assert!(evalue_from_ratio(f64::INFINITY).is_err());
        assert!(EValue::new(0.999).is_err());
        assert!(EValue::new(f64::NAN).is_err());
    }

    fn with_ci(point: f64, lo: f64, hi: f64) -> EffectEstimate {
        EffectEstimate { measure: Measure::RiskRatio, point, ci: Some((lo, hi)), se_log: None }
    }

    #[test]
    fn ci_limit_evalue() {
        // interval touching the null
        assert_eq!(evalue_for_ci_limit(&with_ci(2.0, 1.0, 4.0)).unwrap().value(), 1.0);
        // causal direction: lower limit 1.4
        let e = evalue_for_ci_limit(&with_ci(2.0, 1.4, 2.86)).unwrap().value();
        assert!((e - 2.1483314773547883).abs() < 1e-12, "got {e}");
        // protective direction: reciprocal of the upper limit
        let e = evalue_for_ci_limit(&with_ci(0.5, 0.35, 0.714)).unwrap().value();
        assert!((e - 2.1495653757490721).abs() < 1e-12, "got {e}");
        // interval crossing the null from the protective side
        assert_eq!(evalue_for_ci_limit(&with_ci(0.8, 0.6, 1.1)).unwrap().value(), 1.0);
    }

    #[test]
    fn ci_limit_requires_a_ci() {
        let e = EffectEstimate {
            measure: Measure::RiskRatio,
            point: 2.0,
            ci: None,
            se_log: Some(0.1),
        };
        assert!(matches!(evalue_for_ci_limit(&e), Err(Error::MissingCi)));
    }
}
