//! Standard normal density, distribution function, and quantile.
//!
//! The CDF is evaluated through the complementary error function so that
//! both tails keep full relative accuracy; `1 - cdf(z)` for large `z` is
//! exposed separately as [`std_normal_cdf_complement`] and never computed
//! by subtraction.

use super::consts::{FRAC_1_SQRT_2PI, SQRT_2};
use super::erf::erfc;
use crate::error::{Error, Result};

/// Density of the standard normal at `z`.
#[inline]
pub fn std_normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

/// P(Z <= z) for standard normal Z.
#[inline]
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// P(Z >= z) for standard normal Z, accurate in the upper tail.
#[inline]
pub fn std_normal_cdf_complement(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

/// Bisection stops once the bracket is this narrow.
const QUANTILE_BRACKET_TOL: f64 = 1e-13;

/// The quantile search bracket; the CDF saturates to 0 or 1 in f64 well
/// inside +-40.
const QUANTILE_RANGE: f64 = 40.0;

/// Inverse of [`std_normal_cdf`], solved by bisection.
///
/// Bisection is slower than a rational approximation but is exact with
/// respect to the CDF actually used everywhere else: the returned `z`
/// satisfies `|std_normal_cdf(z) - p| < 1e-10` by construction, with no
/// second set of polynomial coefficients to keep consistent.
///
/// Errors if `p` is not strictly inside (0, 1).
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !p.is_finite() || p <= 0.0 || p >= 1.0 {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "probability must lie strictly between 0 and 1",
        });
    }
    let mut lo = -QUANTILE_RANGE;
    let mut hi = QUANTILE_RANGE;
    while hi - lo > QUANTILE_BRACKET_TOL {
        let mid = 0.5 * (lo + hi);
        if std_normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
