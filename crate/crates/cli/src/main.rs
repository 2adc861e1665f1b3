use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use smero::{run, Command, JobConfig};

/// Indefinite spectral numerics for Schrödinger operators with
/// s-meromorphic potentials.
#[derive(Parser, Debug)]
#[command(name = "smero", version)]
struct Args {
    command: Command,
    /// JSON input document.
    #[arg(long)]
    input: PathBuf,
    /// Output prefix; writes `<out>.json`, `<out>_<table>.csv`, `<out>.gp`.
    #[arg(long)]
    out: PathBuf,
    /// Also write a gnuplot script.
    #[arg(long)]
    plot: bool,
    /// Quadrature (ip, count, bloch) or obstruction (basis) tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Sample count (check, ip) or contour grid (spectrum, bloch).
    #[arg(long)]
    resolution: Option<usize>,
    /// Seed for random elements (ip, count).
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = JobConfig {
        command: args.command,
        input: args.input,
        out: args.out,
        plot: args.plot,
        tol: args.tol,
        resolution: args.resolution,
        seed: args.seed,
    };
    match run(&cfg) {
        Ok(report) => {
            if let Some(f) = &report.failure {
                eprintln!("smero {}: {}: {}", cfg.command, f.name, f.message);
            }
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("smero {}: cannot write results: {e}", cfg.command);
            ExitCode::from(1)
        }
    }
}
