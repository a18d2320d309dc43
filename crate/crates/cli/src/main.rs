use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};

mod args;
mod commands;
mod config;

use args::Cli;

fn main() -> ExitCode {
    let command = Cli::command();
    let argv = match config::expand(std::env::args_os().collect(), &command) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: config: {e}");
            return ExitCode::from(1);
        }
    };
    let matches = match command.clone().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    if let Some((name, sub)) = matches.subcommand() {
        let sub_cmd = command.find_subcommand(name).expect("parsed subcommand exists");
        eprint!("# effective config: {name}\n{}", config::effective(sub_cmd, sub));
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}: {}", f.stage, f.message);
            ExitCode::from(f.code)
        }
    }
}
