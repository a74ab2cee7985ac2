use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use tropcount_cli::{run, Cli, EXIT_IO, EXIT_VALIDATION};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let status = match run(&cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    };
    if out.flush().is_err() {
        return ExitCode::from(EXIT_IO);
    }
    ExitCode::from(status)
}
