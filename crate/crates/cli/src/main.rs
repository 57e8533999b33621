//! `tqm` — run a named experiment and write CSV or JSON results.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical-validity error
//! (paraxial or grid-resolution guard).

mod config;
mod experiments;
mod output;

use clap::{Parser, ValueEnum};
use config::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(
    name = "tqm",
    about = "Temporal quantum mechanics laboratory: closed-form wave-packet \
             observables with numerical cross-checks",
    version
)]
struct Cli {
    /// Experiment to run: evolve, toa, slit-sweep, double-gate, emit,
    /// absorb, exchange, loop, wavelet-roundtrip, maxent, classical.
    experiment: String,

    /// JSON config file: a flat object of numeric parameters.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Parameter override, repeatable: --param key=value.
    #[arg(long = "param", value_parser = config::parse_key_value)]
    params: Vec<(String, f64)>,

    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Seed for randomized sweeps.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Ok(threads) = std::env::var("TQM_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }

    let result = experiments::run(
        &cli.experiment,
        cli.config.as_deref(),
        &cli.params,
        cli.seed,
        cli.out.as_deref(),
    );
    let output = match result {
        Ok(output) => output,
        Err(e) => {
            eprintln!("tqm: {e}");
            return match e {
                CliError::Config(_) => ExitCode::from(2),
                CliError::Numerical(_) => ExitCode::from(3),
                CliError::Io(_) => ExitCode::from(1),
            };
        }
    };

    let written = match (&cli.out, cli.format) {
        (Some(path), Format::Csv) => std::fs::File::create(path)
            .and_then(|f| output.write_csv(std::io::BufWriter::new(f))),
        (Some(path), Format::Json) => std::fs::File::create(path)
            .and_then(|f| output.write_json(std::io::BufWriter::new(f))),
        (None, Format::Csv) => output.write_csv(std::io::stdout().lock()),
        (None, Format::Json) => output.write_json(std::io::stdout().lock()),
    };
    if let Err(e) = written {
        eprintln!("tqm: failed to write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
