//! Command-line front end for `meanrefine-core`.
//!
//! Every subcommand prints one JSON envelope
//! `{command, inputs, result, version, elapsed_ms}` with sorted keys and
//! floats at 17 significant digits (`gamma-table` and `complexify curve`
//! print CSV instead). Exit status: 0 when every verdict holds, 2 when a
//! checked inequality fails, 1 on usage or domain errors.

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{CommandFactory, Parser};

pub mod args;
pub mod commands;
pub mod io;
pub mod output;
#[cfg(feature = "high-precision")]
pub mod precision;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Core(#[from] meanrefine_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// What a subcommand produced.
pub struct Outcome {
    pub inputs: serde_json::Value,
    pub result: serde_json::Value,
    /// False when a checked inequality failed.
    pub verdict: bool,
    /// Text printed verbatim instead of the JSON envelope.
    pub raw: Option<String>,
}

/// Runs the binary on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match args::Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => return report_parse_error(e, &argv, out, err),
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start thread pool: {e}");
            return EXIT_ERROR;
        }
    };
    let name = commands::name(&cli.command);
    let start = Instant::now();
    let outcome = pool.install(|| commands::dispatch(&cli));
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok(o) => {
            let text = match o.raw {
                Some(raw) => raw,
                None => {
                    let env = output::envelope(&name, o.inputs, o.result, elapsed_ms);
                    let mut s = output::render(&env);
                    s.push('\n');
                    s
                }
            };
            if let Err(e) = out.write_all(text.as_bytes()) {
                let _ = writeln!(err, "error: {e}");
                return EXIT_ERROR;
            }
            if o.verdict {
                EXIT_OK
            } else {
                let _ = writeln!(err, "{name}: inequality violated");
                EXIT_VIOLATION
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let CliError::Usage(_) = e {
                let _ = write_help(&argv, err);
            }
            EXIT_ERROR
        }
    }
}

fn report_parse_error(e: clap::Error, argv: &[OsString], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    use clap::error::ErrorKind;
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            let _ = write!(out, "{}", e.render());
            EXIT_OK
        }
        ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = write!(err, "{}", e.render());
            EXIT_ERROR
        }
        _ => {
            let _ = writeln!(err, "{}", e.render());
            let _ = write_help(argv, err);
            EXIT_ERROR
        }
    }
}

/// Help of the deepest subcommand named in `argv`.
fn write_help(argv: &[OsString], err: &mut dyn Write) -> std::io::Result<()> {
    let mut cmd = args::Cli::command();
    cmd.build();
    let mut current = &mut cmd;
    for arg in argv.iter().skip(1) {
        let Some(word) = arg.to_str() else { break };
        if word.starts_with('-') {
            continue;
        }
        if current.find_subcommand(word).is_none() {
            break;
        }
        current = current.find_subcommand_mut(word).expect("checked above");
    }
    write!(err, "{}", current.render_help())
}
