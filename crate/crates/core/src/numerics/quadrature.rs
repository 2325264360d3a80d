//! Composite Simpson integration with panel-doubling refinement.
//!
//! Every integrand evaluation is checked: a NaN or infinity anywhere in the
//! domain aborts the integration instead of silently poisoning the sum.

use crate::error::{Error, Result};

/// A finite, nonempty integration range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    /// `lo < hi`, both finite.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter {
                name: "interval",
                value: hi - lo,
                reason: "bounds must be finite with lo < hi",
            });
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Result of an adaptive integration: the value plus how hard it was to get.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    /// Panels in use when the estimate stabilized.
    pub panels: usize,
    /// Relative change between the last two refinement levels.
    pub last_change: f64,
}

#[inline]
fn check(fx: f64, x: f64) -> Result<f64> {
    if fx.is_finite() {
        Ok(fx)
    } else {
        Err(Error::NonFiniteIntegrand(x))
    }
}

/// Composite Simpson rule over `panels` equal panels (`panels` even, >= 2).
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, bounds: Interval, panels: usize) -> Result<f64> {
    if panels < 2 || panels % 2 != 0 {
        return Err(Error::InvalidParameter {
            name: "panels",
            value: panels as f64,
            reason: "Simpson's rule needs an even panel count of at least 2",
        });
    }
    let (a, b) = (bounds.lo, bounds.hi);
    let h = bounds.width() / panels as f64;
    let mut sum = check(f(a), a)? + check(f(b), b)?;
    for i in 1..panels {
        let x = a + h * i as f64;
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * check(f(x), x)?;
    }
    Ok(sum * h / 3.0)
}

/// Simpson integration refined by panel doubling until the estimate moves by
/// less than `rel_tol` relative to its magnitude.
///
/// Function values from coarser levels are reused: each doubling only
/// evaluates the new midpoints, so reaching `n` panels costs `n + 1`
/// evaluations total. Fails with [`Error::IntegrationDidNotConverge`] if the
/// cap is reached first.
pub fn integrate_with_tolerance<F: Fn(f64) -> f64>(
    f: F,
    bounds: Interval,
    rel_tol: f64,
    start_panels: usize,
    max_panels: usize,
) -> Result<Quadrature> {
    if !(rel_tol > 0.0 && rel_tol.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "rel_tol",
            value: rel_tol,
            reason: "relative tolerance must be positive and finite",
        });
    }
    if start_panels < 2 || start_panels % 2 != 0 || max_panels < start_panels {
        return Err(Error::InvalidParameter {
            name: "start_panels",
            value: start_panels as f64,
            reason: "panel counts must be even, >= 2, and start <= max",
        });
    }

    let (a, b) = (bounds.lo, bounds.hi);
    let ends = check(f(a), a)? + check(f(b), b)?;
    let mut panels = start_panels;
    let mut h = bounds.width() / panels as f64;

    // running sums over interior nodes: `odd` holds the nodes unique to the
    // current level, `interior` all interior nodes of every level so far
    let mut odd = 0.0;
    for i in (1..panels).step_by(2) {
        let x = a + h * i as f64;
        odd += check(f(x), x)?;
    }
    let mut even = 0.0;
    for i in (2..panels).step_by(2) {
        let x = a + h * i as f64;
        even += check(f(x), x)?;
    }
    let mut interior = odd + even;
    let mut estimate = (ends + 4.0 * odd + 2.0 * even) * h / 3.0;

    loop {
        if panels >= max_panels {
            // one unconverged level is reported with the change that remained
            return Err(Error::IntegrationDidNotConverge {
                panels,
                last_change: f64::NAN,
            });
        }
        panels *= 2;
        h *= 0.5;
        // new midpoints are the odd nodes of the doubled grid
        let mut new_odd = 0.0;
        for i in (1..panels).step_by(2) {
            let x = a + h * i as f64;
            new_odd += check(f(x), x)?;
        }
        let next = (ends + 4.0 * new_odd + 2.0 * interior) * h / 3.0;
        interior += new_odd;

        let change = (next - estimate).abs();
        let scale = next.abs().max(f64::MIN_POSITIVE);
        if change <= rel_tol * scale {
            return Ok(Quadrature { value: next, panels, last_change: change / scale });
        }
        if panels >= max_panels {
            return Err(Error::IntegrationDidNotConverge {
                panels,
                last_change: change / scale,
            });
        }
        estimate = next;
    }
}
