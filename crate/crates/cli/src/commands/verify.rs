//! `confound verify` — cross-validates the closed-form posterior against
//! the quadrature and Monte Carlo engines on a seeded random grid and
//! reports the largest discrepancies. Exits 0 only when every comparison
//! is within tolerance.
//!
//! The environment variable `CONFOUND_PROB_TEST_BIAS` (a number, default
//! absent) is a testing hook: its value is added to every closed-form
//! probability before comparison, so the failure path can be exercised
//! deterministically.

use clap::Args;
use confound::effect::LogEstimate;
use confound::evalue::EValue;
use confound::model::{p_exceed_closed_form, posterior_params, PriorSpec};
use confound::numerics::rng::RandomSource;
use confound::oracles::{p_exceed_monte_carlo, p_exceed_quadrature};
use confound::Error;

use crate::commands::resolve_seed;

pub const BIAS_ENV: &str = "CONFOUND_PROB_TEST_BIAS";

/// Closed form and quadrature must agree to this absolute tolerance.
const QUAD_TOL: f64 = 1e-6;
/// Monte Carlo must agree within this many standard errors.
const MC_SIGMAS: f64 = 6.0;

#[derive(Args)]
pub struct VerifyArgs {
    /// Tuples in the closed-vs-quadrature grid (the Monte Carlo phase
    /// checks a quarter of them, capped at 25)
    #[arg(long, default_value_t = 100, value_name = "N")]
    grid_size: usize,
    /// Grid seed (falls back to $CONFOUND_PROB_SEED, then 0)
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Monte Carlo draws per checked tuple
    #[arg(long, default_value_t = 1_000_000, value_name = "N")]
    mc_draws: usize,
}

#[derive(Clone, Copy)]
struct Tuple {
    theta_obs: f64,
    s: f64,
    sigma_theta: f64,
    sigma_gamma: f64,
    gamma_star: f64,
}

impl std::fmt::Display for Tuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "(theta_obs={:.6}, s={:.6}, sigma_theta={:.6}, sigma_gamma={:.6}, gamma_star={:.6})",
            self.theta_obs, self.s, self.sigma_theta, self.sigma_gamma, self.gamma_star
        )
    }
}

fn sample_tuples(seed: u64, n: usize) -> Vec<Tuple> {
    let mut rng = RandomSource::from_seed(seed);
    (0..n)
        .map(|_| Tuple {
            theta_obs: 3.0 * rng.next_f64(),
            s: 0.05 + 0.95 * rng.next_f64(),
            sigma_theta: 0.25 + 1.75 * rng.next_f64(),
            sigma_gamma: 0.1 + 1.9 * rng.next_f64(),
            gamma_star: 1.0 + 9.0 * rng.next_f64(),
        })
        .collect()
}

fn closed_p(t: &Tuple) -> confound::Result<f64> {
    let le = LogEstimate { theta_obs: t.theta_obs, s: t.s, inverted: false };
    let prior = PriorSpec::new(t.sigma_theta, t.sigma_gamma)?;
    let pp = posterior_params(&le, &prior)?;
    p_exceed_closed_form(&pp, EValue::new(t.gamma_star)?)
}

fn test_bias() -> confound::Result<f64> {
    match std::env::var(BIAS_ENV) {
        Ok(raw) => raw.trim().parse::<f64>().map_err(|_| Error::InvalidParameter {
            name: "CONFOUND_PROB_TEST_BIAS",
            value: f64::NAN,
            reason: "test bias must be a number",
        }),
        Err(std::env::VarError::NotPresent) => Ok(0.0),
        Err(std::env::VarError::NotUnicode(_)) => Err(Error::InvalidParameter {
            name: "CONFOUND_PROB_TEST_BIAS",
            value: f64::NAN,
            reason: "test bias must be valid UTF-8",
        }),
    }
}

impl VerifyArgs {
    pub fn run(self) -> confound::Result<u8> {
        if self.grid_size == 0 {
            return Err(Error::InvalidParameter {
                name: "grid_size",
                value: 0.0,
                reason: "grid must contain at least one tuple",
            });
        }
        let seed = resolve_seed(self.seed)?;
        let bias = test_bias()?;
        let tuples = sample_tuples(seed, self.grid_size);
        let mut breaches: Vec<String> = Vec::new();

        let mut max_quad = 0.0_f64;
        let mut max_quad_at = tuples[0];
        for t in &tuples {
            let le = LogEstimate { theta_obs: t.theta_obs, s: t.s, inverted: false };
            let prior = PriorSpec::new(t.sigma_theta, t.sigma_gamma)?;
            let closed = closed_p(t)? + bias;
            let quad = p_exceed_quadrature(&le, &prior, EValue::new(t.gamma_star)?)?;
            let diff = (closed - quad).abs();
            if diff > max_quad {
                max_quad = diff;
                max_quad_at = *t;
            }
            if diff > QUAD_TOL {
                breaches.push(format!(
                    "closed vs quadrature at {t}: |diff| = {diff:.3e} exceeds {QUAD_TOL:.0e}"
                ));
            }
        }
        println!(
            "closed vs quadrature: max |diff| = {max_quad:.3e} over {} tuples at {max_quad_at} [tolerance {QUAD_TOL:.0e}]",
            tuples.len()
        );

        let mc_count = (self.grid_size.div_ceil(4)).min(25);
        let mut max_z = 0.0_f64;
        let mut max_z_at = tuples[0];
        // an estimator from n draws cannot resolve probabilities below
        // ~1/n; differences under that floor count as agreement even when
        // the estimated standard error is zero
        let floor = MC_SIGMAS / self.mc_draws as f64;
        for (i, t) in tuples.iter().take(mc_count).enumerate() {
            let le = LogEstimate { theta_obs: t.theta_obs, s: t.s, inverted: false };
            let prior = PriorSpec::new(t.sigma_theta, t.sigma_gamma)?;
            let closed = closed_p(t)? + bias;
            let mut rng = RandomSource::derive(seed, i as u64);
            match p_exceed_monte_carlo(&le, &prior, EValue::new(t.gamma_star)?, self.mc_draws, &mut rng)
            {
                Ok(mc) => {
                    let diff = (closed - mc.estimate).abs();
                    let z = if mc.std_error > 0.0 { diff / mc.std_error } else { 0.0 };
                    if z > max_z {
                        max_z = z;
                        max_z_at = *t;
                    }
                    if diff > MC_SIGMAS * mc.std_error && diff > floor {
                        breaches.push(format!(
                            "closed vs monte-carlo at {t}: |diff| = {diff:.3e} exceeds {MC_SIGMAS} standard errors ({:.3e})",
                            mc.std_error
                        ));
                    }
                }
                Err(e) => breaches.push(format!("monte-carlo failed at {t}: {e}")),
            }
        }
        println!(
            "closed vs monte-carlo: max |diff|/SE = {max_z:.2} over {mc_count} tuples x {} draws at {max_z_at} [tolerance {MC_SIGMAS} SE]",
            self.mc_draws
        );

        if breaches.is_empty() {
            println!("verify: PASS");
            Ok(0)
        } else {
            for b in &breaches {
                println!("FAIL {b}");
            }
            println!("verify: FAIL ({} breach(es))", breaches.len());
            Ok(1)
        }
    }
}
