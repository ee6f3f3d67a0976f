//! Monte-Carlo runner: sweep points × realizations × schemes.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, Scheme, SweepAxis};
use crate::ao::{maximize_secrecy, AoResult};
use crate::baselines::{heuristic_mrt, random_phases, without_irs};
use crate::channel::{dbm_to_watts, generate_channels, ChannelSet};
use crate::error::{Error, Result};
use crate::metrics::NoisePowers;

/// Aggregate over the successful realizations of one (sweep point, scheme).
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub scheme: String,
    pub mean_sr: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std_sr: f64,
    pub mean_iters: f64,
    pub mean_wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub sweep_index: usize,
    pub realization: usize,
    pub scheme: Scheme,
    pub secrecy_rate: f64,
    pub iterations: usize,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub sweep_index: usize,
    pub realization: usize,
    pub scheme: Scheme,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    /// Ordered by (sweep index, realization, scheme position in the config).
    pub runs: Vec<RunRecord>,
    pub failures: Vec<RunFailure>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Channel seed for one realization. Depends only on its own indices, so
/// adding realizations or sweep points leaves existing ones unchanged.
pub fn realization_seed(base: u64, sweep_index: usize, realization: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ sweep_index as u64) ^ realization as u64)
}

fn scheme_seed(channel_seed: u64, scheme: Scheme) -> u64 {
    splitmix64(channel_seed ^ (0xA5A5_0000 | scheme as u64))
}

pub(crate) fn noise_powers(cfg: &ExperimentConfig) -> Result<NoisePowers> {
    NoisePowers::new(dbm_to_watts(cfg.sigma2_b_dbm), dbm_to_watts(cfg.sigma2_e_dbm))
}

pub(crate) fn channels_for(cfg: &ExperimentConfig, sweep_index: usize, realization: usize) -> Result<ChannelSet> {
    let geom = cfg.sweep.apply(&cfg.geometry, sweep_index);
    generate_channels(
        &geom,
        &cfg.path_loss,
        &cfg.rician,
        realization_seed(cfg.seed, sweep_index, realization),
    )
}

fn run_scheme(
    cfg: &ExperimentConfig,
    scheme: Scheme,
    ch: &ChannelSet,
    channel_seed: u64,
    noise: &NoisePowers,
) -> Result<AoResult> {
    let p_max = dbm_to_watts(cfg.p_max_dbm);
    match scheme {
        Scheme::Proposed => maximize_secrecy(ch, p_max, noise, &cfg.ao),
        Scheme::Heuristic => heuristic_mrt(ch, p_max, noise, &cfg.ao.fp),
        Scheme::WithoutIrs => without_irs(ch, p_max, noise),
        Scheme::RandomPhases => {
            let mut rng = ChaCha8Rng::seed_from_u64(scheme_seed(channel_seed, scheme));
            random_phases(ch, p_max, noise, &mut rng, cfg.random_trials)
        }
    }
}

type TaskOutcome = Vec<std::result::Result<RunRecord, RunFailure>>;

fn run_task(cfg: &ExperimentConfig, noise: &NoisePowers, sweep_index: usize, realization: usize) -> TaskOutcome {
    let fail = |scheme, message: String| RunFailure {
        sweep_index,
        realization,
        scheme,
        message,
    };
    let ch = match channels_for(cfg, sweep_index, realization) {
        Ok(ch) => ch,
        Err(e) => {
            let msg = e.to_string();
            return cfg
                .schemes
                .iter()
                .map(|&s| Err(fail(s, msg.clone())))
                .collect();
        }
    };
    let seed = realization_seed(cfg.seed, sweep_index, realization);
    cfg.schemes
        .iter()
        .map(|&scheme| {
            let start = Instant::now();
            let res = run_scheme(cfg, scheme, &ch, seed, noise);
            let wall_ms = if cfg.timing {
                start.elapsed().as_secs_f64() * 1e3
            } else {
                0.0
            };
            match res {
                Ok(r) if r.secrecy_rate.is_finite() => Ok(RunRecord {
                    sweep_index,
                    realization,
                    scheme,
                    secrecy_rate: r.secrecy_rate,
                    iterations: r.iterations,
                    wall_ms,
                }),
                Ok(_) => Err(fail(scheme, Error::NonFinite("secrecy rate").to_string())),
                Err(e) => Err(fail(scheme, e.to_string())),
            }
        })
        .collect()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

fn aggregate(cfg: &ExperimentConfig, runs: &[RunRecord]) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for (idx, &value) in cfg.sweep.values.iter().enumerate() {
        for &scheme in &cfg.schemes {
            let mine: Vec<&RunRecord> = runs
                .iter()
                .filter(|r| r.sweep_index == idx && r.scheme == scheme)
                .collect();
            if mine.is_empty() {
                continue;
            }
            let sr: Vec<f64> = mine.iter().map(|r| r.secrecy_rate).collect();
            let iters: Vec<f64> = mine.iter().map(|r| r.iterations as f64).collect();
            let wall: Vec<f64> = mine.iter().map(|r| r.wall_ms).collect();
            rows.push(ResultRow {
                sweep_value: if cfg.sweep.axis == SweepAxis::None { 0.0 } else { value },
                scheme: scheme.name().to_string(),
                mean_sr: mean(&sr),
                std_sr: sample_std(&sr),
                mean_iters: mean(&iters),
                mean_wall_ms: mean(&wall),
            });
        }
    }
    rows.sort_by(|a, b| a.sweep_value.total_cmp(&b.sweep_value).then_with(|| a.scheme.cmp(&b.scheme)));
    rows
}

/// Runs every scheme on every realization of every sweep point.
///
/// Results are gathered by index before reduction, so the output does not
/// depend on `cfg.threads`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let noise = noise_powers(cfg)?;
    let tasks: Vec<(usize, usize)> = (0..cfg.sweep.values.len())
        .flat_map(|s| (0..cfg.realizations).map(move |r| (s, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    let outcomes: Vec<TaskOutcome> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(s, r)| run_task(cfg, &noise, s, r))
            .collect()
    });

    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes.into_iter().flatten() {
        match outcome {
            Ok(r) => runs.push(r),
            Err(f) => failures.push(f),
        }
    }
    Ok(ExperimentOutput {
        rows: aggregate(cfg, &runs),
        runs,
        failures,
    })
}

/// Secrecy-rate trace of the proposed scheme on the single configured realization.
pub fn trace_command(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if cfg.realizations != 1 {
        return Err(Error::invalid("realizations", "trace needs exactly one realization"));
    }
    if cfg.sweep.values.len() != 1 {
        return Err(Error::invalid("sweep", "trace needs a single sweep point"));
    }
    let noise = noise_powers(cfg)?;
    let ch = channels_for(cfg, 0, 0)?;
    Ok(maximize_secrecy(&ch, dbm_to_watts(cfg.p_max_dbm), &noise, &cfg.ao)?.sr_trace)
}
