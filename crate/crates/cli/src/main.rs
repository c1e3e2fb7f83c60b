use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use thodge::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            // library errors already include their causes
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn write(path: &Path, text: String) -> anyhow::Result<()> {
    std::fs::write(path, text).map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display()))
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let report = thodge::run(cli)?;
    match &cli.out {
        Some(path) => write(path, report.to_json())?,
        None => print!("{}", report.to_json()),
    }
    if let Some(path) = &cli.csv {
        write(path, report.to_csv())?;
    }
    Ok(report.pass)
}
