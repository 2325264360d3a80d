//! The generative model and its closed-form posterior.
//!
//! Observed log effect: `theta_obs ~ Normal(theta_true + g, s^2)`, where
//! `g = ln(confounding strength) >= 0`. Priors: `theta_true ~ Normal(0,
//! sigma_theta^2)` and `g ~ HalfNormal(sigma_gamma)` (the distribution of
//! `|X|` for `X ~ Normal(0, sigma_gamma^2)`).
//!
//! Integrating `theta_true` out analytically gives `theta_obs | g ~
//! Normal(g, v)` with `v = s^2 + sigma_theta^2`; completing the square
//! against the half-normal prior then yields the posterior of `g` as a
//! normal with location `m = theta_obs sigma_gamma^2 / (v + sigma_gamma^2)`
//! and variance `v sigma_gamma^2 / (v + sigma_gamma^2)`, truncated to
//! `[0, inf)`. Everything downstream — the exceedance probability, the
//! posterior mean bias, the bias-adjusted effect — reads off that
//! truncated normal. Two slower engines that integrate the written joint
//! density directly (see the oracle module) exist to keep this derivation
//! honest.

use crate::effect::LogEstimate;
use crate::error::{Error, Result};
use crate::evalue::EValue;
use crate::numerics::truncnorm::{trunc_normal_mean, trunc_normal_tail};

/// Prior scales for the model's two free parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorSpec {
    /// SD of the true log effect around zero.
    pub sigma_theta: f64,
    /// Half-normal scale of the log confounding strength.
    pub sigma_gamma: f64,
}

impl PriorSpec {
    pub fn new(sigma_theta: f64, sigma_gamma: f64) -> Result<Self> {
        let p = PriorSpec { sigma_theta, sigma_gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("sigma_theta", self.sigma_theta), ("sigma_gamma", self.sigma_gamma)]
        {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "prior scale must be positive and finite",
                });
            }
        }
        Ok(())
    }
}

impl Default for PriorSpec {
    /// Weakly-informative defaults: unit scale on the log effect (large
    /// effects possible but not favored) and 0.5 on the log bias (bias
    /// ratios much above 2-3 increasingly unlikely a priori).
    fn default() -> Self {
        PriorSpec { sigma_theta: 1.0, sigma_gamma: 0.5 }
    }
}

/// Which inference engine produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl Engine {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "closed" => Ok(Engine::ClosedForm),
            "quad" => Ok(Engine::Quadrature),
            "mc" => Ok(Engine::MonteCarlo),
            other => Err(Error::UnknownEngine(other.to_string())),
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Engine::ClosedForm => "closed",
            Engine::Quadrature => "quad",
            Engine::MonteCarlo => "mc",
        }
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Engine::parse(s)
    }
}

/// The derived posterior of `g`: `Normal(m, sigma_post^2)` truncated to
/// `[lower, inf)` with `lower` always 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorParams {
    /// Marginal variance of `theta_obs` given `g`: `s^2 + sigma_theta^2`.
    pub v: f64,
    /// Location of the untruncated posterior normal.
    pub m: f64,
    /// Scale of the posterior normal.
    pub sigma_post: f64,
    /// Truncation bound enforcing `g >= 0`; always 0.
    pub lower: f64,
}

/// Posterior means that have closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorMeans {
    /// `E[g | data]`; nonnegative because `g` is.
    pub mean_log_gamma: f64,
    /// `E[theta_true | data]`, the bias-adjusted log effect.
    pub mean_theta_true: f64,
}

/// Full posterior output for one case. Assembled by the analysis layer:
/// the credible interval comes from the quadrature engine because the
/// marginal of `theta_true` is a truncated-normal mixture with no
/// elementary quantile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasePosterior {
    pub p_exceed: f64,
    pub gamma_star: EValue,
    pub mean_log_gamma: f64,
    pub mean_theta_true: f64,
    /// Equal-tail 95% credible bounds for `theta_true`.
    pub theta_true_ci: (f64, f64),
    pub engine: Engine,
}

/// Derives the truncated-normal posterior of `g` from a log estimate and
/// priors.
pub fn posterior_params(le: &LogEstimate, prior: &PriorSpec) -> Result<PosteriorParams> {
    prior.validate()?;
    if !(le.s > 0.0 && le.s.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "s",
            value: le.s,
            reason: "standard error must be positive and finite",
        });
    }
    if !le.theta_obs.is_finite() {
        return Err(Error::InvalidParameter {
            name: "theta_obs",
            value: le.theta_obs,
            reason: "log effect must be finite",
        });
    }
    let v = le.s * le.s + prior.sigma_theta * prior.sigma_theta;
    let sg2 = prior.sigma_gamma * prior.sigma_gamma;
    let m = le.theta_obs * sg2 / (v + sg2);
    let sigma_post = (v * sg2 / (v + sg2)).sqrt();
    Ok(PosteriorParams { v, m, sigma_post, lower: 0.0 })
}

/// P(confounding strength >= gamma_star | data) from the truncated-normal
/// posterior; exactly 1 at `gamma_star = 1`.
pub fn p_exceed_closed_form(pp: &PosteriorParams, gamma_star: EValue) -> Result<f64> {
    trunc_normal_tail(pp.m, pp.sigma_post, pp.lower, gamma_star.value().ln())
}

/// Posterior means of the log bias and the true log effect.
///
/// `mean_theta_true` uses the tower property: conditional on `g`, the
/// posterior mean of `theta_true` is `(theta_obs - g) sigma_theta^2 / v`,
/// which is linear in `g`, so substituting `E[g | data]` is exact.
pub fn posterior_summaries(
    le: &LogEstimate,
    prior: &PriorSpec,
    pp: &PosteriorParams,
) -> Result<PosteriorMeans> {
    let mean_log_gamma = trunc_normal_mean(pp.m, pp.sigma_post, pp.lower)?;
    let st2 = prior.sigma_theta * prior.sigma_theta;
    let mean_theta_true = (le.theta_obs - mean_log_gamma) * st2 / pp.v;
    Ok(PosteriorMeans { mean_log_gamma, mean_theta_true })
}
