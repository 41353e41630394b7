mod args;
mod doc;
mod run;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Format};
use doc::{asciify, CliError};

fn emit(cli: &Cli, body: &str) -> Result<(), CliError> {
    match &cli.global.output {
        Some(path) => std::fs::write(path, body).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if cli.global.threads > 0 {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.global.threads).build_global();
    }
    let result = run::run(&cli).and_then(|outcome| {
        let body = match cli.global.format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&outcome.doc).expect("documents serialize");
                s.push('\n');
                s
            }
            _ => {
                let mut lines = outcome.text.join("\n");
                lines.push('\n');
                if cli.global.ascii {
                    asciify(&lines)
                } else {
                    lines
                }
            }
        };
        emit(&cli, &body)?;
        Ok(outcome.exit)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
