use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use irs_secrecy::experiment::{
    oracle_check, parse_config, run_experiment, trace_command, write_csv, write_oracle_csv, write_trace_csv,
    ExperimentConfig, OracleCheck,
};
use irs_secrecy::{selftest, Error, Result};

#[derive(Parser)]
#[command(version, about = "Secrecy-rate optimization for IRS-assisted wiretap channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Config file (`key = value` lines); paper defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV; overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo sweep over every configured scheme.
    Run(Common),
    /// Per-iteration secrecy rate of the proposed scheme on one realization.
    Trace(Common),
    /// Compare the phase optimizer against an exhaustive phase grid.
    OracleCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 4)]
        n_irs: usize,
        #[arg(long, default_value_t = 16)]
        levels: usize,
        /// Pass when at least this fraction reaches 98% of the grid best.
        #[arg(long, default_value_t = 0.95)]
        min_fraction: f64,
    },
    /// Run the built-in invariant checks.
    Selftest {
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            parse_config(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    if let Some(t) = common.threads {
        cfg.threads = t;
    }
    Ok(cfg)
}

fn out_path(cfg: &ExperimentConfig) -> Result<&Path> {
    cfg.out.as_deref().ok_or(Error::Config {
        line: 0,
        key: "out".into(),
        message: "no output path; pass --out or set `out` in the config".into(),
    })
}

fn global_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run(common) => {
            let cfg = load(&common)?;
            let path = out_path(&cfg)?;
            let out = run_experiment(&cfg)?;
            for f in &out.failures {
                eprintln!(
                    "warning: sweep point {}, realization {}, {}: {}",
                    f.sweep_index,
                    f.realization,
                    f.scheme.name(),
                    f.message
                );
            }
            write_csv(&out.rows, path)?;
            eprintln!(
                "{} rows written to {} ({} runs, {} failed)",
                out.rows.len(),
                path.display(),
                out.runs.len(),
                out.failures.len()
            );
            Ok(true)
        }
        Command::Trace(common) => {
            let mut cfg = load(&common)?;
            // the trace follows realization 0 whatever count a sweep config asks for
            cfg.realizations = 1;
            let path = out_path(&cfg)?;
            let trace = trace_command(&cfg)?;
            write_trace_csv(&trace, path)?;
            eprintln!(
                "{} AO iterations, final secrecy rate {:.6} bit/s/Hz",
                trace.len() - 1,
                trace.last().copied().unwrap_or(0.0)
            );
            Ok(true)
        }
        Command::OracleCheck {
            common,
            instances,
            n_irs,
            levels,
            min_fraction,
        } => {
            let cfg = load(&common)?;
            global_threads(common.threads)?;
            let check = OracleCheck {
                seed: cfg.seed,
                instances,
                n_irs,
                levels,
                m_bs: cfg.geometry.m_bs,
                m_eve: cfg.geometry.m_eve,
            };
            let results = oracle_check(&check, &cfg.ao.fp)?;
            if let Some(path) = &cfg.out {
                write_oracle_csv(&results, path)?;
            }
            let good = results.iter().filter(|r| r.ratio() >= 0.98).count();
            let worst = results.iter().map(|r| r.ratio()).fold(f64::INFINITY, f64::min);
            eprintln!("{good}/{instances} instances within 2% of the grid best (worst ratio {worst:.4})");
            Ok(good as f64 >= min_fraction * instances as f64)
        }
        Command::Selftest { threads } => {
            global_threads(threads)?;
            let outcomes = selftest::run_all();
            for o in &outcomes {
                eprintln!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
            }
            Ok(outcomes.iter().all(|o| o.passed))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
