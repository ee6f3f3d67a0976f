//! Phase optimizer against the exhaustive grid on small random instances.

use rayon::prelude::*;

use super::run::realization_seed;
use crate::ao::beamformer_step;
use crate::baselines::grid_oracle_phases;
use crate::channel::rayleigh_channels;
use crate::error::Result;
use crate::fp::{optimize_phases, FpOptions};
use crate::metrics::NoisePowers;
use crate::phase::PhaseVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleInstance {
    pub fp_value: f64,
    pub grid_value: f64,
}

impl OracleInstance {
    pub fn ratio(&self) -> f64 {
        self.fp_value / self.grid_value
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCheck {
    pub seed: u64,
    pub instances: usize,
    pub n_irs: usize,
    pub levels: usize,
    pub m_bs: usize,
    pub m_eve: usize,
}

impl Default for OracleCheck {
    fn default() -> Self {
        Self {
            seed: 1,
            instances: 100,
            n_irs: 4,
            levels: 16,
            m_bs: 4,
            m_eve: 4,
        }
    }
}

/// Unit-noise Rayleigh instances with `w` fixed at the optimal beam for
/// `θ = 1`. FP starts from `θ = 1`; the grid sees the same `w`.
pub fn oracle_check(check: &OracleCheck, fp: &FpOptions) -> Result<Vec<OracleInstance>> {
    let noise = NoisePowers::new(1.0, 1.0)?;
    (0..check.instances)
        .into_par_iter()
        .map(|i| {
            let ch = rayleigh_channels(check.m_bs, check.m_eve, check.n_irs, realization_seed(check.seed, 0, i))?;
            let ones = PhaseVector::ones(check.n_irs);
            let w = beamformer_step(&ch, &ones, 1.0, &noise)?;
            let fp_value = optimize_phases(&ch, &w, &noise, &ones, fp)?.objective();
            let (_, grid_value) = grid_oracle_phases(&ch, &w, &noise, check.levels)?;
            Ok(OracleInstance { fp_value, grid_value })
        })
        .collect()
}
