//! `confound evalue` — E-value of a ratio estimate and, when a CI is
//! given, of the CI limit closer to the null.

use clap::Args;
use confound::effect::{EffectEstimate, Measure};
use confound::evalue::{evalue_for_ci_limit, evalue_from_ratio};

use crate::output::fmt;

#[derive(Args)]
pub struct EvalueArgs {
    /// Observed ratio (RR; an OR or HR is treated on the same scale)
    #[arg(long, value_name = "RATIO")]
    rr: f64,
    /// Lower confidence limit (needs --ucl)
    #[arg(long, requires = "ucl", value_name = "RATIO")]
    lcl: Option<f64>,
    /// Upper confidence limit (needs --lcl)
    #[arg(long, requires = "lcl", value_name = "RATIO")]
    ucl: Option<f64>,
    /// Emit one JSON object instead of text
    #[arg(long)]
    json: bool,
}

impl EvalueArgs {
    pub fn run(self) -> confound::Result<u8> {
        let point = evalue_from_ratio(self.rr)?;
        let ci_limit = match (self.lcl, self.ucl) {
            (Some(lo), Some(hi)) => {
                let est =
                    EffectEstimate::new(Measure::RiskRatio, self.rr, Some((lo, hi)), None)?;
                Some(evalue_for_ci_limit(&est)?)
            }
            _ => None,
        };

        if self.json {
            let mut obj = serde_json::json!({
                "rr": self.rr,
                "evalue": confound::numfmt::round_sig(point.value(), crate::output::SIG_DIGITS),
            });
            if let Some(ev) = ci_limit {
                obj["evalue_ci_limit"] = serde_json::json!(confound::numfmt::round_sig(
                    ev.value(),
                    crate::output::SIG_DIGITS
                ));
            }
            println!("{obj}");
        } else {
            println!("rr: {}", fmt(self.rr));
            println!("evalue: {}", fmt(point.value()));
            if let Some(ev) = ci_limit {
                println!("evalue_ci_limit: {}", fmt(ev.value()));
            }
        }
        Ok(0)
    }
}
