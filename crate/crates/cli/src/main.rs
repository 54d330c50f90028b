use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tmtool::{render, run, Command, Format, RunConfig, EXIT_INPUT};

/// Verification reports for twisted Poisson structures.
#[derive(Parser, Debug)]
#[command(name = "tmtool", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Degree bound for polynomial coboundary searches (default 2·maxdeg + 4).
    #[arg(long)]
    degree_bound: Option<u32>,
    /// Random trials for the identity suite.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_INPUT as u8);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let cfg = RunConfig {
        command: cli.command,
        input: cli.input,
        out: cli.out,
        format: cli.format,
        degree_bound: cli.degree_bound,
        trials: cli.trials,
        seed: cli.seed,
    };
    let outcome = run(&cfg);
    if let Some(err) = outcome.report.get("error") {
        eprintln!("tmtool: {}", err.as_str().unwrap_or_default());
    }
    let text = render(&outcome.report, cfg.format);
    match &cfg.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                eprintln!("tmtool: {}: {e}", p.display());
                return ExitCode::from(EXIT_INPUT as u8);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(outcome.code as u8)
}
