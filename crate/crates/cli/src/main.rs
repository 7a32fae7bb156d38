mod commands;
mod config;
mod report;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command, ConfigError, RunConfig};

fn configure_threads() -> Result<(), ConfigError> {
    let Ok(raw) = std::env::var("LIOUVILLE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| ConfigError(format!("LIOUVILLE_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError(e.to_string()))
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    configure_threads()?;
    let cfg = RunConfig::from_cli(cli)?;
    let report = match &cli.command {
        Command::Solve { dump_ode } => commands::solve(&cfg, dump_ode.as_deref())?,
        Command::Verify => commands::verify(&cfg)?,
        Command::Roundtrip => commands::roundtrip(&cfg)?,
        Command::Converge => commands::converge(&cfg)?,
        Command::Fdb { .. } => commands::fdb(&cfg)?,
        Command::Oracle => commands::oracle(&cfg)?,
    };
    report.emit(&cfg)?;
    if !report.pass {
        eprintln!("{}: checks failed", cfg.command);
    }
    Ok(report.pass)
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        let io = c.downcast_ref::<std::io::Error>().map(|e| e.kind())
            .or_else(|| c.downcast_ref::<csv::Error>().and_then(|e| match e.kind() {
                csv::ErrorKind::Io(e) => Some(e.kind()),
                _ => None,
            }));
        io == Some(std::io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
