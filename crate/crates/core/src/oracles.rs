//! Independent slow engines that cross-check the closed-form posterior.
//!
//! Both engines work from the joint density exactly as the model states it
//! — `Normal(theta_obs; theta_true + g, s^2) * Normal(theta_true; 0,
//! sigma_theta^2) * HalfNormal(g; sigma_gamma)` — without using the
//! truncated-normal derivation, so agreement with the closed form tests the
//! derivation itself, not just its implementation:
//!
//! - [`p_exceed_quadrature`] integrates the joint over both variables with
//!   nested adaptive Simpson rules. The inner integral over `theta_true` at
//!   fixed `g` is windowed to the exact product-Gaussian support (center
//!   `(theta_obs - g) sigma_theta^2 / v`, scale `s sigma_theta / sqrt(v)`)
//!   so the narrow likelihood ridge is always resolved.
//! - [`p_exceed_monte_carlo`] is self-normalized importance sampling with
//!   the priors as proposal and the likelihood as weight — deliberately
//!   the most naive faithful scheme, guarded by an effective-sample-size
//!   check.
//!
//! The quadrature path also produces what the closed form cannot: quantiles
//! of the `theta_true` marginal, which is a truncated-normal mixture with
//! no elementary inverse CDF.

use crate::effect::LogEstimate;
use crate::error::{Error, Result};
use crate::evalue::EValue;
use crate::model::{posterior_params, PriorSpec};
use crate::numerics::consts::SQRT_2PI;
use crate::numerics::interp::MonotoneCubic;
use crate::numerics::quadrature::{integrate_with_tolerance, Interval};
use crate::numerics::rng::RandomSource;

/// Relative tolerance of the outer (and single-variable) integrations.
const OUTER_REL_TOL: f64 = 1e-8;
/// Relative tolerance of inner integrals; tighter than the outer tolerance
/// so refinement noise cannot stall outer convergence.
const INNER_REL_TOL: f64 = 1e-10;
/// Half-width of integration windows in conditional SDs; the truncated
/// Gaussian mass beyond 12 SDs is ~1e-32 of the total.
const WINDOW_SDS: f64 = 12.0;
/// Prior-tail cutoff in prior SDs for the `g` range.
const PRIOR_RANGE_SDS: f64 = 10.0;
const INNER_START_PANELS: usize = 16;
const INNER_MAX_PANELS: usize = 1 << 16;
const OUTER_START_PANELS: usize = 32;
const OUTER_MAX_PANELS: usize = 1 << 20;

/// Minimum draw count accepted by the Monte Carlo engine.
const MC_MIN_DRAWS: usize = 10_000;
/// Below this effective sample size the weights are too concentrated for
/// the estimate or its standard error to be trusted.
const MC_MIN_ESS: f64 = 100.0;

#[inline]
fn normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * SQRT_2PI)
}

#[inline]
fn half_normal_pdf(x: f64, scale: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        2.0 * normal_pdf(x, 0.0, scale)
    }
}

/// Integrates the joint density over `g` in `[region lo, region hi]` and
/// all of `theta_true`, by nested adaptive Simpson.
fn joint_mass_over_g(le: &LogEstimate, prior: &PriorSpec, g_range: Interval) -> Result<f64> {
    let v = le.s * le.s + prior.sigma_theta * prior.sigma_theta;
    let st2 = prior.sigma_theta * prior.sigma_theta;
    // conditional on g, the theta integrand is exactly a Gaussian with
    // these parameters; the window captures all but ~1e-32 of it
    let sigma_c = le.s * prior.sigma_theta / v.sqrt();
    let span = WINDOW_SDS * sigma_c;

    let inner_error: std::cell::RefCell<Option<Error>> = std::cell::RefCell::new(None);
    let weight = |g: f64| -> f64 {
        let center = (le.theta_obs - g) * st2 / v;
        let bounds = match Interval::new(center - span, center + span) {
            Ok(b) => b,
            Err(e) => {
                inner_error.borrow_mut().get_or_insert(e);
                return f64::NAN;
            }
        };
        let inner = integrate_with_tolerance(
            |t| normal_pdf(le.theta_obs, t + g, le.s) * normal_pdf(t, 0.0, prior.sigma_theta),
            bounds,
            INNER_REL_TOL,
            INNER_START_PANELS,
            INNER_MAX_PANELS,
        );
        match inner {
            Ok(q) => q.value * half_normal_pdf(g, prior.sigma_gamma),
            Err(e) => {
                inner_error.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };

    let outer = integrate_with_tolerance(
        &weight,
        g_range,
        OUTER_REL_TOL,
        OUTER_START_PANELS,
        OUTER_MAX_PANELS,
    );
    match outer {
        Ok(q) => Ok(q.value),
        // a NaN propagated from an inner failure surfaces as a non-finite
        // integrand outside; report the original cause instead
        Err(e) => Err(inner_error.into_inner().unwrap_or(e)),
    }
}

/// P(confounding strength >= gamma_star | data) by direct 2-D integration
/// of the joint density; exactly 1 at `gamma_star = 1`.
///
/// The numerator integrates `g` over `[ln gamma_star, g_max]` and the
/// denominator adds the `[0, ln gamma_star]` piece, so numerator <=
/// denominator holds structurally and the ratio lands in `[0, 1]`.
pub fn p_exceed_quadrature(le: &LogEstimate, prior: &PriorSpec, gamma_star: EValue) -> Result<f64> {
    let pp = posterior_params(le, prior)?;
    let ln_gs = gamma_star.value().ln();
    if ln_gs == 0.0 {
        return Ok(1.0);
    }
    let g_max = pp.m.max(ln_gs) + PRIOR_RANGE_SDS * prior.sigma_gamma;
    let hi = joint_mass_over_g(le, prior, Interval::new(ln_gs, g_max)?)?;
    let lo = joint_mass_over_g(le, prior, Interval::new(0.0, ln_gs)?)?;
    let total = lo + hi;
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "posterior_mass",
            value: total,
            reason: "joint density mass vanished or overflowed on the integration region",
        });
    }
    Ok((hi / total).clamp(0.0, 1.0))
}

/// The `theta_true` marginal density tabulated on a uniform grid fine
/// enough to resolve its narrowest mixture component.
fn marginal_grid(le: &LogEstimate, prior: &PriorSpec) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let pp = posterior_params(le, prior)?;
    let s = le.s;
    let sg = prior.sigma_gamma;
    let st2 = prior.sigma_theta * prior.sigma_theta;
    let (s2, sg2) = (s * s, sg * sg);

    // g beyond this carries no posterior mass: prior tail plus the
    // likelihood's reach
    let g_hi = pp.m.max(0.0) + PRIOR_RANGE_SDS * sg + WINDOW_SDS * s;
    // mixture component centers run from c(g_hi) to c(0) with common scale
    // sigma_c as g sweeps its range
    let sigma_c = s * prior.sigma_theta / pp.v.sqrt();
    let c_at = |g: f64| (le.theta_obs - g) * st2 / pp.v;
    let t_lo = c_at(g_hi) - WINDOW_SDS * sigma_c;
    let t_hi = c_at(0.0) + WINDOW_SDS * sigma_c;

    // four nodes per conditional SD keeps Simpson error far below the
    // inversion tolerances; capped to keep worst-case cost bounded
    let mut panels = (((t_hi - t_lo) / (sigma_c / 4.0)).ceil() as usize).clamp(512, 16384);
    if panels % 2 == 1 {
        panels += 1;
    }
    let h = (t_hi - t_lo) / panels as f64;

    // conditional on t, the g integrand is a Gaussian (center, g_sd)
    // restricted to g >= 0
    let g_sd = (s2 * sg2 / (s2 + sg2)).sqrt();
    let mut ts = Vec::with_capacity(panels + 1);
    let mut fs = Vec::with_capacity(panels + 1);
    for i in 0..=panels {
        let t = t_lo + h * i as f64;
        let center = (le.theta_obs - t) * sg2 / (s2 + sg2);
        let lo = (center - WINDOW_SDS * g_sd).max(0.0);
        let hi = (center + WINDOW_SDS * g_sd).min(g_hi);
        let f = if lo < hi {
            let q = integrate_with_tolerance(
                |g| normal_pdf(le.theta_obs, t + g, s) * half_normal_pdf(g, sg),
                Interval::new(lo, hi)?,
                INNER_REL_TOL,
                INNER_START_PANELS,
                INNER_MAX_PANELS,
            )?;
            q.value * normal_pdf(t, 0.0, prior.sigma_theta)
        } else {
            0.0 // the likelihood window lies entirely outside g >= 0
        };
        ts.push(t);
        fs.push(f);
    }
    Ok((ts, fs, h))
}

fn simpson_tabulated(values: &[f64], h: f64) -> f64 {
    debug_assert!(values.len() >= 3 && values.len() % 2 == 1);
    let mut sum = values[0] + values[values.len() - 1];
    for (i, &f) in values.iter().enumerate().skip(1).take(values.len() - 2) {
        sum += if i % 2 == 1 { 4.0 * f } else { 2.0 * f };
    }
    sum * h / 3.0
}

/// Quantiles of the `theta_true` marginal, by integrating `g` out on a
/// grid, accumulating the CDF with Simpson partial sums, and inverting
/// through a shape-preserving interpolant.
///
/// Output order matches `probs`; monotone inputs give monotone outputs.
pub fn theta_true_quantiles(le: &LogEstimate, prior: &PriorSpec, probs: &[f64]) -> Result<Vec<f64>> {
    for &p in probs {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter {
                name: "prob",
                value: p,
                reason: "quantile probabilities must lie strictly between 0 and 1",
            });
        }
    }
    let (ts, fs, h) = marginal_grid(le, prior)?;

    // CDF knots at every second grid node (one Simpson pair each)
    let mut raw_t = vec![ts[0]];
    let mut raw_c = vec![0.0];
    let mut acc = 0.0;
    let mut k = 0;
    while k + 2 < ts.len() {
        acc += (fs[k] + 4.0 * fs[k + 1] + fs[k + 2]) * h / 3.0;
        raw_t.push(ts[k + 2]);
        raw_c.push(acc);
        k += 2;
    }
    if !(acc > 0.0 && acc.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "posterior_mass",
            value: acc,
            reason: "marginal density mass vanished or overflowed on the grid",
        });
    }

    // normalize and drop plateau knots (sub-ulp tail increments) so the
    // inverse stays well defined
    let mut knot_t = Vec::with_capacity(raw_t.len());
    let mut knot_c: Vec<f64> = Vec::with_capacity(raw_c.len());
    for (t, c) in raw_t.iter().zip(&raw_c) {
        let cdf = c / acc;
        if knot_c.last().map_or(true, |&last| cdf > last) {
            knot_t.push(*t);
            knot_c.push(cdf);
        }
    }
    let inverse = MonotoneCubic::new(knot_t, knot_c)?;
    probs.iter().map(|&p| inverse.solve(p)).collect()
}

/// Mean of the `theta_true` marginal from the same grid; the independent
/// check on the closed form's tower-property mean.
pub fn theta_true_marginal_mean(le: &LogEstimate, prior: &PriorSpec) -> Result<f64> {
    let (ts, fs, h) = marginal_grid(le, prior)?;
    let weighted: Vec<f64> = ts.iter().zip(&fs).map(|(t, f)| t * f).collect();
    Ok(simpson_tabulated(&weighted, h) / simpson_tabulated(&fs, h))
}

/// A Monte Carlo estimate with its uncertainty and weight diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    /// Delta-method standard error of the self-normalized ratio.
    pub std_error: f64,
    /// Effective sample size of the importance weights.
    pub ess: f64,
}

/// P(confounding strength >= gamma_star | data) by self-normalized
/// importance sampling: `(theta_true, g)` drawn from the priors, weighted
/// by the likelihood. Deterministic given the state of `rng` and `n`.
///
/// Weights are the unnormalized likelihood `exp(-z^2/2)`; the constant
/// factor cancels in the ratio, the standard error, and the effective
/// sample size alike.
pub fn p_exceed_monte_carlo(
    le: &LogEstimate,
    prior: &PriorSpec,
    gamma_star: EValue,
    n: usize,
    rng: &mut RandomSource,
) -> Result<McEstimate> {
    posterior_params(le, prior)?; // input validation only
    if n < MC_MIN_DRAWS {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            reason: "Monte Carlo needs at least 10000 draws",
        });
    }
    let ln_gs = gamma_star.value().ln();
    let mut sum_w = 0.0;
    let mut sum_w_hit = 0.0;
    let mut sum_w2 = 0.0;
    let mut sum_w2_hit = 0.0;
    for _ in 0..n {
        let theta = prior.sigma_theta * rng.next_normal();
        let g = prior.sigma_gamma * rng.next_normal().abs();
        let z = (le.theta_obs - theta - g) / le.s;
        let w = (-0.5 * z * z).exp();
        sum_w += w;
        sum_w2 += w * w;
        if g >= ln_gs {
            sum_w_hit += w;
            sum_w2_hit += w * w;
        }
    }
    let ess = if sum_w2 > 0.0 { sum_w * sum_w / sum_w2 } else { 0.0 };
    if !(ess >= MC_MIN_ESS) {
        return Err(Error::LowEffectiveSampleSize { ess, min: MC_MIN_ESS });
    }
    let estimate = sum_w_hit / sum_w;
    // delta method: Var(A/B) ~ sum w_i^2 (hit_i - p)^2 / B^2, expanded so
    // one pass suffices
    let var_num = sum_w2_hit * (1.0 - 2.0 * estimate) + estimate * estimate * sum_w2;
    let std_error = (var_num.max(0.0)).sqrt() / sum_w;
    Ok(McEstimate { estimate, std_error, ess })
}
