use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use conic_census::cli::{exit_code, render, run_report, Format, RunConfig, Task};
use conic_census::exec::Exec;

/// Conic bundle census: classify fibers, evaluate constants, enumerate sections.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    /// JSON run config
    #[arg(long)]
    config: PathBuf,
    /// Override the configured task
    #[arg(long, value_enum)]
    task: Option<Task>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Enumeration step budget
    #[arg(long)]
    budget: Option<u64>,
    /// Decimal digits in reports
    #[arg(long)]
    precision: Option<u32>,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Include wall-clock timings (makes reports non-reproducible)
    #[arg(long)]
    timings: bool,
    /// Run the enumeration core on one thread
    #[arg(long)]
    sequential: bool,
    /// Worker threads for the parallel core (0 = all cores)
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let mut cfg = match RunConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    if let Some(t) = args.task {
        cfg.task = t;
    }
    if let Some(f) = args.format {
        cfg.params.format = Some(f);
    }
    if let Some(b) = args.budget {
        cfg.params.budget = Some(b);
    }
    if let Some(p) = args.precision {
        cfg.params.precision = Some(p);
    }
    if let Some(o) = &args.output {
        cfg.params.output_path = Some(o.display().to_string());
    }
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(exit_code(&e) as u8);
    }

    #[cfg(feature = "parallel")]
    if args.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build_global()
            .ok();
    }
    let exec = if args.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };

    let outcome = run_report(&cfg, exec, args.timings);
    let text = match render(&cfg, &outcome) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match &cfg.params.output_path {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {path}: {e}");
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    if let Some(e) = &outcome.error {
        eprintln!("error: {e}");
    }
    ExitCode::from(outcome.exit_code() as u8)
}
