use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use latlab::config::{ExperimentConfig, Format, Mode};
use latlab::emit::emit;
use latlab::exec::RayonExecutor;
use latlab::{run, RunError};

/// Runs a lattice-discretization experiment described by a JSON config.
///
/// Exit status: 0 success, 1 bound check failed under --strict, 2 config
/// error, 3 I/O error, 4 internal error.
#[derive(Debug, Parser)]
#[command(name = "latlab", version)]
struct Cli {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's mode.
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    format: Option<Format>,
    /// Exit with status 1 when any bound check fails.
    #[arg(long)]
    strict: bool,
}

fn execute(cli: Cli) -> Result<bool, RunError> {
    let mut config = ExperimentConfig::load(&cli.config)?;
    if let Some(m) = cli.mode {
        config.mode = m;
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(n) = cli.samples {
        config.n_samples = n;
    }
    if let Some(dir) = cli.out {
        config.output.dir = dir;
    }
    if let Some(f) = cli.format {
        config.output.format = f;
    }
    config.validate()?;
    let exec = RayonExecutor::from_env().map_err(|e| RunError::Internal(e.to_string()))?;
    let output = run(&config, &exec)?;
    for path in emit(&output, config.output.dir.as_ref(), config.output.format)? {
        println!("{}", path.display());
    }
    eprintln!("{} finished in {:.3} s on {} threads", config.mode, output.wall_time_s, exec.threads());
    Ok(!output.report.has_failed_checks())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let strict = cli.strict;
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) if strict => {
            eprintln!("bound check failed");
            ExitCode::from(1)
        }
        Ok(false) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("latlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
