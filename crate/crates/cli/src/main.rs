use std::process::ExitCode;

use clap::Parser;
use ladder_cli::args::{Cli, Command};
use ladder_cli::{compare_representations, dump_matrix, exit, run, write_comparison, RunError};
use ladder_core::Representation;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn dispatch(command: Command) -> Result<i32, RunError> {
    match command {
        Command::Run(args) => {
            let config = args.resolve()?;
            let report = run(&config)?;
            log::info!(
                "stopped at n = {} ({})",
                report.trajectory.final_dim(),
                report.trajectory.termination.as_str()
            );
            Ok(report.exit_code())
        }
        Command::Compare(args) => {
            let base = args.resolve()?;
            let su2 = ladder_cli::RunConfig {
                representation: Representation::Su2,
                ..base.clone()
            };
            let so4 = ladder_cli::RunConfig {
                representation: Representation::So4,
                ..base.clone()
            };
            let comparison = compare_representations(&su2, &so4)?;
            write_comparison(&comparison, base.out.as_deref())?;
            eprint!("{}", comparison.summary());
            Ok(exit::OK)
        }
        Command::DumpMatrix(args) => {
            dump_matrix(&args.resolve()?)?;
            Ok(exit::OK)
        }
    }
}
