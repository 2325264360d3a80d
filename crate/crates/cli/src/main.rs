//! `confound` — posterior probability that unmeasured confounding explains
//! away observed associations, from summary-level effect estimates.
//!
//! Subcommands: `evalue` (threshold computation), `analyze` (per-case
//! pipeline), `sweep` (prior-sensitivity grids), `plot` (figure emission),
//! `verify` (engine cross-validation).
//!
//! Exit codes: 0 success, 1 hard failure (including usage errors), 2
//! partial success (some rows or cases failed but results were produced).

mod commands;
mod figures;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

#[derive(Parser)]
#[command(
    name = "confound",
    version,
    about = "Probability that unmeasured confounding explains away an observed association",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: commands::Command,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap would exit 2 on usage errors; the published contract
            // reserves 2 for partial success, so remap to 1
            let code = match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
                | ErrorKind::DisplayVersion => 0u8,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command.run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            commands::report_error(&err);
            ExitCode::from(1)
        }
    }
}
