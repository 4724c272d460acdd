use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use drinfeld_cli::{run, JobConfig, COMMANDS};

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Drinfeld module periods, t-motive trivializations and certificates.
#[derive(Parser)]
#[command(version, about)]
struct Args {
    /// One of: exp, log, period, agf, quasiperiod, period-matrix, verify-triv,
    /// ext, endos, galois-dim, relations, full-report. Defaults to the
    /// config's `command`.
    command: Option<String>,
    /// Job or module descriptor JSON.
    #[arg(long)]
    config: PathBuf,
    /// Target precision (valuation in theta^-1).
    #[arg(long)]
    precision: Option<i64>,
    /// Truncation order in t.
    #[arg(long)]
    t_trunc: Option<usize>,
    /// Cap B on endomorphism tau-degree.
    #[arg(long)]
    deg_cap: Option<usize>,
    /// Torsion branch for period towers.
    #[arg(long)]
    branch: Option<usize>,
    /// Input value for exp, log, agf and ext.
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    /// Write the report to this file instead of stdout.
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut cfg = match JobConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    cfg.set_precision(args.precision, args.t_trunc);
    if let Some(b) = args.deg_cap {
        cfg.hom_degree = b;
    }
    if let Some(b) = args.branch {
        cfg.branch = b;
    }
    if args.input.is_some() {
        cfg.input = args.input;
    }
    let Some(command) = args.command.or_else(|| cfg.command.clone()) else {
        eprintln!("error: no command given; expected one of {}", COMMANDS.join(", "));
        return ExitCode::from(2);
    };
    let report = match run(&cfg, &command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = match args.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    let written = match &args.out {
        Some(p) => std::fs::write(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
