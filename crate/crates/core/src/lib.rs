//! Posterior probabilities that unmeasured confounding is strong enough to
//! explain away an observed epidemiological association.
//!
//! The classical question "how strong would an unmeasured confounder have
//! to be to nullify this result?" is answered by a threshold (an E-value).
//! This crate answers the follow-up question the threshold leaves open:
//! *how likely is confounding of at least that strength?* It places a prior
//! on the log confounding bias, updates it with the observed log effect,
//! and reports the posterior probability that the bias clears the
//! explain-away threshold, together with the bias-adjusted effect estimate.
//!
//! # Layout
//!
//! - [`effect`]: observed estimates on the ratio scale, direction
//!   normalization, and log-scale standard errors.
//! - [`evalue`]: the threshold itself — E-values from ratios and back.
//! - [`model`]: prior configuration and the closed-form posterior.
//! - [`oracles`]: independent slow engines (adaptive quadrature and
//!   importance sampling) used to cross-check the closed form.
//! - [`ingest`]: CSV input with strict row validation.
//! - [`analysis`]: the batch pipeline tying everything together, plus
//!   sensitivity sweeps over the prior scale.
//! - [`numerics`]: the self-contained kernels everything above rests on.

pub mod effect;
pub mod evalue;
pub mod model;
pub mod error;
pub mod analysis;
pub mod ingest;
pub mod numerics;
pub mod numfmt;
pub mod oracles;

pub use error::{Error, Result, RowIssue};
