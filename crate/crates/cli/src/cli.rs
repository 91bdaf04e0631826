use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Params, RunConfig, Scenario};
use crate::{report, run, CliError};

#[derive(Debug, Parser)]
#[command(
    name = "warpcheck",
    version,
    about = "Verification reports for warped-product metrics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Non-negative Ricci metric asymptotic to a cone over a positive-Ricci factor.
    ShaYang(RunArgs),
    /// Neck family certified by one positive Ricci lower bound.
    Neck(RunArgs),
    /// Collar slope search on a round convex core boundary.
    Closability(RunArgs),
    /// Doubled region with the flat step and the worst-case cross section.
    Gn(RunArgs),
    /// Ambient sphere built from the docking profile.
    Docking(RunArgs),
    /// Volume, Ricci and closability hypotheses on a family of cross sections.
    LimitSpace(RunArgs),
    /// Gluing of two round boundaries, or of a hemisphere to itself.
    Glue(RunArgs),
    /// Writes one profile as CSV.
    Export(RunArgs),
}

impl Command {
    fn split(self) -> (Scenario, RunArgs) {
        match self {
            Command::ShaYang(a) => (Scenario::ShaYang, a),
            Command::Neck(a) => (Scenario::Neck, a),
            Command::Closability(a) => (Scenario::Closability, a),
            Command::Gn(a) => (Scenario::Gn, a),
            Command::Docking(a) => (Scenario::Docking, a),
            Command::LimitSpace(a) => (Scenario::LimitSpace, a),
            Command::Glue(a) => (Scenario::Glue, a),
            Command::Export(a) => (Scenario::Export, a),
        }
    }
}

pub fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
    let (scenario, args) = cli.command.split();
    let file = args.config.as_deref().map(Params::load).transpose()?;
    RunConfig::resolve(scenario, file, args.params)
}

/// Parses `args`, runs, prints to `out`/`err` and returns the exit code.
pub fn execute<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let outcome = resolve(cli).and_then(|config| {
        let json = config.params.json.unwrap_or(false);
        run(&config).map(|o| (o, json))
    });
    match outcome {
        Ok((o, json)) => {
            let printed = match (&o.report, json) {
                (Some(r), true) => report::render(r).map(|s| write!(out, "{s}")),
                _ => Ok(o.summary.iter().try_for_each(|l| writeln!(out, "{l}"))),
            };
            if let Err(e) = printed {
                let _ = writeln!(err, "error: {e}");
                return 2;
            }
            o.exit_code()
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> i32 {
    execute(
        std::env::args_os(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    )
}
