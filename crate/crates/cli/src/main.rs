/// `println!` that goes quiet once stdout is closed, e.g. by `| head`.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

mod args;
mod config;
mod converge;
mod eigen;
mod error;
mod output;
mod region;
mod simulate;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;

/// Parses the command line, then reparses with the config-file flags placed
/// before the user's own so that the latter win.
fn parse(argv: Vec<OsString>) -> Result<Cli, CliError> {
    let cli = Cli::try_parse_from(&argv).unwrap_or_else(|e| e.exit());
    let Some(path) = cli.command.common().config.clone() else {
        return Ok(cli);
    };
    let name = match &cli.command {
        Command::Eigen(_) => "eigen",
        Command::Region(_) => "region",
        Command::Simulate(_) => "simulate",
        Command::Converge(_) => "converge",
    };
    let mut merged = argv[..2].to_vec();
    merged.extend(
        config::flags_for(&path, name)?
            .into_iter()
            .map(OsString::from),
    );
    merged.extend_from_slice(&argv[2..]);
    Ok(Cli::try_parse_from(merged).unwrap_or_else(|e| e.exit()))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Eigen(a) => eigen::run(a),
        Command::Region(a) => region::run(a),
        Command::Simulate(a) => simulate::run(a),
        Command::Converge(a) => converge::run(a),
    }
}

fn main() -> ExitCode {
    let result = parse(std::env::args_os().collect()).and_then(dispatch);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
