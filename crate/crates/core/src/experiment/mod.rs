//! Config parsing, Monte-Carlo sweeps and CSV output for the command-line tool.

pub mod config;
pub mod oracle;
pub mod output;
pub mod run;

pub use config::{parse_config, ExperimentConfig, Scheme, Sweep, SweepAxis};
pub use oracle::{oracle_check, OracleCheck, OracleInstance};
pub use output::{format_sig, write_csv, write_oracle_csv, write_trace_csv};
pub use run::{realization_seed, run_experiment, trace_command, ExperimentOutput, ResultRow, RunFailure, RunRecord};
