//! Tail probabilities and means of a normal truncated to `[lower, inf)`.
//!
//! Both functions stay accurate when the truncation point sits far in the
//! upper tail of the untruncated normal, where naive evaluation degenerates:
//! the tail probability switches to log space with an asymptotic series for
//! `ln Phi_c`, and the mean switches to the Mills-ratio continued fraction
//! in a telescoped form that has no cancellation.

use super::consts::SQRT_2PI;
use super::normal::{std_normal_cdf_complement, std_normal_pdf};
use crate::error::{Error, Result};

/// Standardized distance beyond which direct `erfc` evaluation is replaced
/// by asymptotics. `erfc` keeps full precision well past this point, so
/// both branches agree to ~1e-13 relative at the switch.
const DEEP_TAIL: f64 = 36.0;

/// `ln P(Z >= z)` for standard normal `Z`, valid for any `z`.
fn log_std_normal_cdf_complement(z: f64) -> f64 {
    if z <= DEEP_TAIL {
        std_normal_cdf_complement(z).ln()
    } else {
        // ln Phi_c(z) = -z^2/2 - ln(z sqrt(2 pi))
        //               + ln(1 - u + 3u^2 - 15u^3 + 105u^4),   u = 1/z^2;
        // the omitted 945 u^5 term is below 1e-15 for z > 36. The series is
        // fed to ln_1p as the O(u) correction to keep full precision.
        let u = 1.0 / (z * z);
        let correction = -u * (1.0 - u * (3.0 - u * (15.0 - 105.0 * u)));
        -0.5 * z * z - (z * SQRT_2PI).ln() + correction.ln_1p()
    }
}

/// Above this standardized distance the truncated mean switches to the
/// Mills continued fraction; below it, direct evaluation already has
/// relative error under 3e-12.
const MILLS_CF_SWITCH: f64 = 12.0;

/// Truncation depth of the Mills continued fraction; at `z >= 12` the
/// depth-24 tail is converged to machine precision.
const MILLS_CF_DEPTH: usize = 24;

/// The tail `t(z)` of the Laplace continued fraction for the inverse Mills
/// ratio: `phi(z)/Phi_c(z) = z + t(z)` with
/// `t(z) = 1/(z + 2/(z + 3/(z + ...)))`, convergent for `z > 0` and rapid
/// for large `z`.
fn mills_cf_tail(z: f64) -> f64 {
    let mut acc = 0.0;
    for k in (2..=MILLS_CF_DEPTH).rev() {
        acc = k as f64 / (z + acc);
    }
    1.0 / (z + acc)
}

fn check_scale(sd: f64) -> Result<()> {
    if sd > 0.0 && sd.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "sigma",
            value: sd,
            reason: "scale must be positive and finite",
        })
    }
}

/// P(X >= threshold | X >= lower) for X ~ N(mean, sd^2).
///
/// Exactly 1 when `threshold == lower` (the event is implied by the
/// conditioning); `threshold < lower` is rejected. The result is clamped to
/// `[0, 1]` to absorb the last-ulp excursions of the ratio.
pub fn trunc_normal_tail(mean: f64, sd: f64, lower: f64, threshold: f64) -> Result<f64> {
    check_scale(sd)?;
    if threshold < lower {
        return Err(Error::InvalidParameter {
            name: "threshold",
            value: threshold,
            reason: "threshold must not lie below the truncation point",
        });
    }
    if threshold == lower {
        return Ok(1.0);
    }
    let a = (threshold - mean) / sd;
    let b = (lower - mean) / sd;
    // once either tail is deep the direct ratio risks 0/0 or 0/finite
    // underflow; the log path is valid everywhere and exact where it matters
    let p = if a > DEEP_TAIL || b > DEEP_TAIL {
        (log_std_normal_cdf_complement(a) - log_std_normal_cdf_complement(b)).exp()
    } else {
        std_normal_cdf_complement(a) / std_normal_cdf_complement(b)
    };
    Ok(p.clamp(0.0, 1.0))
}

/// E[X | X >= lower] for X ~ N(mean, sd^2).
pub fn trunc_normal_mean(mean: f64, sd: f64, lower: f64) -> Result<f64> {
    check_scale(sd)?;
    let alpha = (lower - mean) / sd;
    if alpha > MILLS_CF_SWITCH {
        // mean + sd * (alpha + t) telescopes to lower + sd * t, which
        // avoids the huge cancellation of the direct form when the
        // truncation point is far above the mean
        Ok(lower + sd * mills_cf_tail(alpha))
    } else {
        Ok(mean + sd * std_normal_pdf(alpha) / std_normal_cdf_complement(alpha))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // reference values computed by 50-digit arbitrary-precision evaluation
    // of erfc ratios and the exact Mills-ratio formula

    #[test]
    fn tail_reference_values() {
        let p = trunc_normal_tail(0.0, 1.0, 0.0, 1.0).unwrap();
        assert!((p - 0.3173105078629141).abs() < 1e-14, "got {p}");
        let p = trunc_normal_tail(0.13752, 0.44766, 0.0, 1.22795).unwrap();
        assert!((p - 0.011968904319821937).abs() < 1e-14, "got {p}");
    }

    #[test]
    fn mean_reference_values() {
        let m = trunc_normal_mean(0.0, 1.0, 0.0).unwrap();
        assert!((m - 0.7978845608028654).abs() < 1e-14, "got {m}"); // sqrt(2/pi)
        let m = trunc_normal_mean(0.13752, 0.44766, 0.0).unwrap();
        assert!((m - 0.4120039421624915).abs() < 1e-14, "got {m}");
    }

    #[test]
    fn untruncated_limit_recovers_the_plain_mean() {
        let m = trunc_normal_mean(0.0, 1.0, -1e9).unwrap();
        assert!(m.abs() < 1e-12, "got {m}");
    }

    #[test]
    fn invalid_arguments_are_rejected() {
        assert!(trunc_normal_tail(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(trunc_normal_tail(0.0, -1.0, 0.0, 1.0).is_err());
        assert!(trunc_normal_tail(0.0, f64::NAN, 0.0, 1.0).is_err());
        assert!(trunc_normal_tail(0.3, 0.7, 0.0, -2.0).is_err(), "threshold below lower");
        assert!(trunc_normal_mean(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn deep_truncation_keeps_relative_accuracy() {
        // direct evaluation of these is 0/0; the log-space branch must agree
        // with arbitrary-precision references to ~1e-12 relative
        let cases = [
            (-40.0, 1.0, 0.0, 0.5, 1.7965328386866524e-9),
            (-60.0, 1.0, 0.0, 1.0, 5.2240722871505193e-27),
            (-37.0, 1.0, 0.0, 0.25, 9.2530309623696727e-5),
        ];
        for (mean, sd, lower, thr, want) in cases {
            let got = trunc_normal_tail(mean, sd, lower, thr).unwrap();
            let rel = ((got - want) / want).abs();
            assert!(rel < 1e-12, "tail({mean},{sd},{lower},{thr}) = {got}, want {want}");
        }
    }

    #[test]
    fn deep_truncation_mean_keeps_relative_accuracy() {
        let cases = [
            (-40.0, 1.0, 0.0, 0.024968847207263723),
            (-60.0, 1.0, 0.0, 0.01665742024112493),
            (-37.0, 1.0, 0.0, 0.026987686126990096),
            (-35.5, 1.0, 0.0, 0.028124486560967863),
            (-12.5, 1.0, 0.0, 0.07900730440697609), // continued-fraction branch
            (-11.5, 1.0, 0.0, 0.08568860976797245), // direct branch, below switch
        ];
        for (mean, sd, lower, want) in cases {
            let got = trunc_normal_mean(mean, sd, lower).unwrap();
            let rel = ((got - want) / want).abs();
            assert!(rel < 1e-11, "mean({mean},{sd},{lower}) = {got}, want {want}");
        }
    }

    #[test]
    fn branches_agree_at_the_switch_point() {
        // tail with denominator standardized distance just each side of 36
        let below = trunc_normal_tail(-35.9, 1.0, 0.0, 0.25).unwrap();
        let above = trunc_normal_tail(-36.1, 1.0, 0.0, 0.25).unwrap();
        // not equal (different means), but each must be finite and positive
        assert!(below > 0.0 && below.is_finite());
        assert!(above > 0.0 && above.is_finite());
        // continuity sanity: the two straddle the reference at -36
        let mid = trunc_normal_tail(-36.0, 1.0, 0.0, 0.25).unwrap();
        assert!(above < mid && mid < below);
    }

    #[test]
    fn threshold_at_lower_is_certain() {
        assert_eq!(trunc_normal_tail(0.3, 0.7, 0.0, 0.0).unwrap(), 1.0);
        assert_eq!(trunc_normal_tail(-5.0, 2.0, 1.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn tail_is_monotone_in_threshold() {
        let mut last = 1.0;
        for i in 0..=50 {
            let thr = 0.1 * i as f64;
            let p = trunc_normal_tail(0.4, 0.8, 0.0, thr).unwrap();
            assert!(p <= last + 1e-15, "not monotone at thr = {thr}");
            assert!((0.0..=1.0).contains(&p));
            last = p;
        }
    }

    #[test]
    fn mean_never_falls_below_truncation_point() {
        for i in -30..=30 {
            let mean = i as f64 * 0.5;
            let m = trunc_normal_mean(mean, 1.3, 0.0).unwrap();
            assert!(m >= 0.0, "mean({mean}) = {m}");
            assert!(m >= mean, "truncation must raise the mean");
        }
    }
}
