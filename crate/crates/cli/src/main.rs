use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use conespec_cli::args::{Cli, Format, RunConfig};
use conespec_cli::error::CliError;
use conespec_cli::{commands, output};

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => {
            // write beside the target, then rename, so readers never see a partial file
            let mut tmp = path.clone().into_os_string();
            tmp.push(".partial");
            std::fs::write(&tmp, text)?;
            std::fs::rename(&tmp, path)?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = RunConfig::from_cli(cli);
    let report = commands::run(&cfg)?;
    let text = match cfg.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&output::payload(&cfg, &report))
                .map_err(|e| CliError::Usage(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => report.table.render(),
    };
    emit(cli, &text)
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Usage(e.render().to_string().trim().to_string())),
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
