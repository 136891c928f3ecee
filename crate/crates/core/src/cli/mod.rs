//! The `econ-complexity` command line.
//!
//! Exit codes: 0 success, 2 bad arguments, 3 unreadable input, 4 malformed
//! input, 5 unusable data, 6 collinear variables, 7 disconnected matrix,
//! 8 no convergence, 9 numerical failure, 10 output failure, 11 failed
//! validation.

mod commands;
mod config;
mod output;
mod pipeline;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::Path;

use clap::{Parser, Subcommand};

pub use commands::VALIDATION_FAILED;
pub use config::{Flags, Method, OrdinationChoice, RunConfig};
pub use output::RunReport;

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "econ-complexity", version, about = "CA and CCA ordinations of trade specialization data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Correspondence analysis: ECI, PCI and higher axes.
    Ca(Flags),
    /// Canonical correspondence analysis constrained by country variables.
    Cca(Flags),
    /// Type-1 scaled biplot as SVG plus coordinate tables.
    Biplot(Flags),
    /// Check orthogonality and solver agreement; exits 11 on failure.
    Validate(Flags),
    /// Write a planted-gradient fixture.
    Synth(Flags),
}

pub(crate) fn io_error(path: &Path, e: io::Error) -> Error {
    Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Ca(f) => commands::cmd_ca(&RunConfig::resolve(f)?, out),
        Command::Cca(f) => commands::cmd_cca(&RunConfig::resolve(f)?, out),
        Command::Biplot(f) => commands::cmd_biplot(&RunConfig::resolve(f)?, out),
        Command::Validate(f) => commands::cmd_validate(&RunConfig::resolve(f)?, out),
        Command::Synth(f) => commands::cmd_synth(&RunConfig::resolve(f)?, out),
    }
}

/// Parse `args`, run the command, report errors on stderr and return the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match dispatch(cli.command, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            if let Error::Disconnected { components } = &e {
                for (i, c) in components.iter().enumerate() {
                    eprintln!("  component {}: {}", i + 1, c.join(" "));
                }
                eprintln!("  rerun with --largest-component to keep the largest one");
            }
            e.exit_code()
        }
    }
}
