use std::io::{self, Write};
use std::process::ExitCode;

use bell_cli::{configure_threads, run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads(cli.threads).and_then(|()| {
        let mut out = io::stdout().lock();
        run(&cli, &mut out)?;
        out.flush()?;
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bellkit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
