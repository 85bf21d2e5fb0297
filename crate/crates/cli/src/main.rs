//! `vilenkin-lab`: runs the toolkit's experiments from a TOML config and
//! writes a JSON summary plus CSV tables.
//!
//! Exit codes: 0 success, 1 a hard invariant failed, 2 usage or config error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vilenkin::lab::Family;

use commands::Suite;
use config::ExperimentConfig;
use output::Artifacts;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Output(String),
}

#[derive(Parser)]
#[command(name = "vilenkin-lab", version, about = "Fourier-analysis experiments on bounded Vilenkin groups")]
struct Cli {
    /// Experiment config (TOML). Built-in defaults when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    spec: Option<PathBuf>,
    /// Output directory; overrides `out` in the config.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the parallel paths.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Tolerance override `key=value` with key in identity, weight_sum, nullity, domination.
    #[arg(long, global = true, value_name = "KEY=VALUE")]
    tolerance: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fast transform of a signal (JSON `[re, im]` pairs) or of a seeded random one.
    Transform {
        #[arg(long, value_name = "FILE")]
        input: Option<PathBuf>,
    },
    /// L1 norms and sup norms of each family's kernel.
    Kernel {
        /// Largest `n` tabulated (default min(1024, M_N)).
        #[arg(long)]
        n_max: Option<usize>,
        /// Also dump the kernel values at this `n`.
        #[arg(long)]
        at: Option<usize>,
    },
    /// Per-n error of each family's means against the signal.
    Means {
        #[arg(long, value_name = "FILE")]
        input: Option<PathBuf>,
    },
    /// Runs one verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Exact versus weakened weights for each configured family.
    Sharpness {
        /// Weakening applied at every p (default depends on p).
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Sequential versus parallel transform timings on Walsh groups.
    Bench {
        #[arg(long, default_value_t = 10)]
        from: usize,
        #[arg(long, default_value_t = 16)]
        to: usize,
    },
}

fn setup_threads(n: usize) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Usage("--threads must be >= 1".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    if n > 1 {
        eprintln!("warning: built without the `parallel` feature, --threads ignored");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<commands::Failures, CliError> {
    let mut cfg = match &cli.spec {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    for t in &cli.tolerance {
        cfg.tolerances.set(t)?;
    }
    cfg.validate()?;
    if let Some(n) = cli.threads {
        setup_threads(n)?;
    }
    let mut art = Artifacts::new(&cfg.out);
    let failures = match &cli.command {
        Command::Transform { input } => commands::transform(&cfg, input.as_deref(), &mut art)?,
        Command::Kernel { n_max, at } => commands::kernel(&cfg, *n_max, *at, &mut art)?,
        Command::Means { input } => commands::means(&cfg, input.as_deref(), &mut art)?,
        Command::Verify { suite } => commands::verify(&cfg, *suite, &mut art)?,
        Command::Sharpness { eps } => {
            let fams: Vec<Family> = cfg.families.iter().map(|k| Family::natural(*k)).collect();
            commands::sharpness(&cfg, &fams, *eps, &mut art)?
        }
        Command::Bench { from, to } => commands::bench(&cfg, *from, *to, &mut art)?,
    };
    for path in art.write()? {
        println!("{}", path.display());
    }
    Ok(failures)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            for f in &failures {
                eprintln!("invariant failed: {f}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
