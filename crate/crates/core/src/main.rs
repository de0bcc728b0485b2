use std::process::ExitCode;

use clap::Parser;
use spherelab::cli::{run, Cli};
use spherelab::Error;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli, std::env::vars()) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e @ Error::Scenario { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
