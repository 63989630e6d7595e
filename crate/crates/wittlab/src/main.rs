//! Command-line driver for the verification suites.
//!
//! Exit codes: 0 when no check failed, 1 when some check failed, 2 for
//! usage errors (including unknown suites), 3 for I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use wittlab::report::{self, Config, HomologyCache, ReportError, SUITES};

#[derive(Debug, Parser)]
#[command(name = "wittlab", version, about = "Exact verification suites for the dg Witt algebra and its cocycles")]
struct Cli {
    /// Suite to run (repeatable); all suites when omitted.
    #[arg(long = "suite", value_name = "ID")]
    suites: Vec<String>,
    /// Largest weight used by homology computations.
    #[arg(long, default_value_t = 5, value_name = "N")]
    max_weight: i64,
    /// Also run the expensive optional checks.
    #[arg(long)]
    stretch: bool,
    /// Write the JSON report to this path.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Directory for cached homology dimensions (overridden by WITTLAB_CACHE).
    #[arg(long, value_name = "PATH")]
    cache_dir: Option<PathBuf>,
    /// List the suite identifiers and exit.
    #[arg(long)]
    list: bool,
}

fn exit_code(e: &ReportError) -> u8 {
    match e {
        ReportError::UnknownSuite(_) => 2,
        ReportError::Io { .. } | ReportError::Json(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        for s in SUITES {
            println!("{s}");
        }
        return ExitCode::SUCCESS;
    }
    match run(cli) {
        Ok(true) => ExitCode::from(1),
        Ok(false) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Run the selected suites; returns whether any check failed.
fn run(cli: Cli) -> Result<bool, ReportError> {
    let ids: Vec<String> =
        if cli.suites.is_empty() { SUITES.iter().map(|s| s.to_string()).collect() } else { cli.suites };
    let cache_dir = std::env::var_os("WITTLAB_CACHE").map(PathBuf::from).or(cli.cache_dir);
    let cache = cache_dir.map(HomologyCache::new).transpose()?;
    let cfg = Config { max_weight: cli.max_weight, stretch: cli.stretch, cache };

    let start = Instant::now();
    let results = report::run_all(&ids, &cfg)?;
    print!("{}", report::render_text(&results));
    for r in &results {
        eprintln!("{}: {} ms", r.id, r.elapsed_ms);
    }
    eprintln!("total: {} ms", start.elapsed().as_millis());
    if let Some(path) = &cli.json {
        report::write_json(path, &results)?;
    }
    Ok(results.iter().any(|r| r.has_fail()))
}
