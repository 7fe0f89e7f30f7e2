mod config;
mod log;
mod run;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use config::load_config;
use log::RunLog;
use run::{output_dir, Failure, Runner};

/// Weighted analytic regularity experiments for radial eigenvalue systems.
///
/// Exit status: 0 when every check passes, 1 on usage, config or IO errors,
/// 2 when a numerical method fails or a check does not pass.
#[derive(Parser)]
#[command(name = "wanalytic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// experiment config (JSON); may also follow the subcommand
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory (overrides `out` in the config)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// worker threads for the suites
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// overrides scf.tolerance
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// print nothing on success
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, PartialEq, Eq)]
enum Command {
    /// SCF solve: orbitals.csv, potentials.csv, summary.json
    Solve(Positional),
    /// seminorm sequences, analytic envelopes and the main envelope study
    Envelope(Positional),
    /// inequality suites and the sequence calculus: reports.json
    Verify(Positional),
    /// hp approximation demo: hp_geometric.csv, hp_uniform.csv
    Hp(Positional),
    /// solve, envelope, verify and hp in sequence
    All(Positional),
}

#[derive(clap::Args, Clone, PartialEq, Eq)]
struct Positional {
    /// experiment config (JSON), same as --config
    path: Option<PathBuf>,
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (name, positional) = match &cli.command {
        Command::Solve(a) => ("solve", a.path.clone()),
        Command::Envelope(a) => ("envelope", a.path.clone()),
        Command::Verify(a) => ("verify", a.path.clone()),
        Command::Hp(a) => ("hp", a.path.clone()),
        Command::All(a) => ("all", a.path.clone()),
    };
    let path = match (cli.config.clone(), positional) {
        (Some(_), Some(_)) => return usage("config given both positionally and with --config"),
        (Some(p), None) | (None, Some(p)) => p,
        (None, None) => return usage("no config given (use --config <path>)"),
    };
    let mut config = match load_config(&path) {
        Ok(c) => c,
        Err(e) => return usage(&e),
    };
    if let Some(t) = cli.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return usage(&format!("--tolerance must be positive, got {t}"));
        }
        config.scf.tolerance = t;
    }
    if let Some(n) = cli.jobs {
        if n == 0 {
            return usage("--jobs must be at least 1");
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            return usage(&format!("cannot start {n} workers: {e}"));
        }
    }
    let out = output_dir(cli.out.as_deref(), &config);
    let mut log = RunLog::open(&out);
    log.line(&format!("{name} with config {}", path.display()));
    let mut runner = Runner {
        config,
        out,
        log,
        quiet: cli.quiet,
    };
    let outcome = match cli.command {
        Command::Solve(_) => runner.solve(),
        Command::Envelope(_) => runner.envelope(),
        Command::Verify(_) => runner.verify(),
        Command::Hp(_) => runner.hp(),
        Command::All(_) => runner.all(),
    };
    let code = match outcome {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("{name}: a check did not pass");
            2
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            2
        }
    };
    runner
        .log
        .line(&format!("{name} finished with exit status {code}"));
    ExitCode::from(code)
}
