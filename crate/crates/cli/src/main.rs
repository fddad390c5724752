use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use ecdim_cli::commands::{run, Cli};
use ecdim_cli::init_threads;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let result = init_threads().and_then(|()| run(&cli, &mut out));
    let flushed = out.flush();
    match result {
        Ok(()) if flushed.is_ok() => ExitCode::SUCCESS,
        Ok(()) => ExitCode::from(ecdim_cli::ExitCode::Io as u8),
        Err(e) => {
            eprintln!("ecdim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
