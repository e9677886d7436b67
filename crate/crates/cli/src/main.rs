use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rumor_cli::{parse_config, run_experiment, write_report, Command, Format};

#[derive(Parser)]
#[command(name = "rumor", version, about = "Rumor percolation analytics, simulation and cross-validation")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate analytic criteria, bounds and fixed points.
    Analyze(Opts),
    /// Monte Carlo survival estimates.
    Simulate(Opts),
    /// Run one sub-command over a parameter grid.
    Sweep(Opts),
    /// Compare analytic values with simulation under a noise-plus-bias budget.
    Xval(Opts),
}

#[derive(Args)]
struct Opts {
    #[arg(long)]
    config: PathBuf,
    /// Worker threads for trial parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    /// Overrides `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
}

fn run(command: Command, opts: Opts) -> Result<i32, String> {
    let text = std::fs::read_to_string(&opts.config).map_err(|e| format!("{}: {e}", opts.config.display()))?;
    let mut cfg = parse_config(&text, Some(command)).map_err(|e| e.to_string())?;
    if let Some(seed) = opts.seed {
        cfg.master_seed = seed;
    }
    let format = opts.format.unwrap_or(cfg.format);
    let workers = opts
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let report = run_experiment(&cfg, workers).map_err(|e| e.to_string())?;
    let out: Box<dyn Write> = match &opts.out {
        Some(p) => Box::new(File::create(p).map_err(|e| format!("{}: {e}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = BufWriter::new(out);
    write_report(&report, format, &mut out).map_err(|e| e.to_string())?;
    out.flush().map_err(|e| e.to_string())?;
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, opts) = match cli.command {
        Cmd::Analyze(o) => (Command::Analyze, o),
        Cmd::Simulate(o) => (Command::Simulate, o),
        Cmd::Sweep(o) => (Command::Sweep, o),
        Cmd::Xval(o) => (Command::Xval, o),
    };
    match run(command, opts) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
