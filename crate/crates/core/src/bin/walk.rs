use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use walk_core::cli::{emit_plot, run_config_file, run_preset, CliError, RunSummary};

/// Continuous-time quantum walk experiments.
#[derive(Parser)]
#[command(name = "walk", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run { config: PathBuf },
    /// Run a built-in preset (konno, trivial, asym).
    Preset {
        name: String,
        #[arg(long, default_value = "walk_out")]
        outdir: PathBuf,
    },
    /// Draw the CDF overlay (cdf.svg) for a finished run directory.
    Plot { dir: PathBuf },
}

fn init_threads() {
    // WALK_THREADS caps the worker pool; 0 or unset leaves rayon's default.
    let Ok(raw) = std::env::var("WALK_THREADS") else {
        return;
    };
    match raw.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(n) => {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
        Err(_) => eprintln!("[walk] ignoring WALK_THREADS={raw:?}"),
    }
}

fn report(summary: &RunSummary) {
    let outdir = summary.config.outdir.as_deref().unwrap_or(".");
    for row in &summary.report {
        println!(
            "[walk] t = {:>8}  ks = {:.3e}  phi_err = {:.3e}  claim = {:.3e}",
            row.t, row.ks, row.phi_err_max, row.claim_residual
        );
    }
    println!(
        "[walk] limit mass = {:.12}, mean = {:.6}; outputs in {outdir}",
        summary.limit.mass, summary.limit.mean
    );
}

fn main() -> ExitCode {
    let args = Args::parse();
    init_threads();
    let result: Result<(), CliError> = match args.command {
        Command::Run { config } => run_config_file(&config).map(|s| report(&s)),
        Command::Preset { name, outdir } => run_preset(&name, &outdir).map(|s| report(&s)),
        Command::Plot { dir } => emit_plot(&dir).map(|p| println!("[walk] wrote {}", p.display())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("walk: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
