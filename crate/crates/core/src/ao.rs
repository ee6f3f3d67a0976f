//! Alternating optimization of the beamformer and the IRS phases.
//!
//! Each round solves the beamformer exactly for the current phases, then runs
//! the fractional-programming phase optimizer for the new beamformer. Both
//! steps are ascent steps for `R_B − R_E`, so the secrecy-rate trace never
//! decreases.

use nalgebra::SymmetricEigen;

use crate::beamforming::optimal_beamformer;
use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::fp::{optimize_phases, FpOptions};
use crate::linalg::{c, normalize_phase, CVector};
use crate::metrics::{build_xb, build_xe, secrecy_rate, Beamformer, NoisePowers};
use crate::phase::PhaseVector;

/// Below this the secrecy rate is treated as zero and the stopping rule becomes absolute.
pub const ZERO_SR: f64 = 1e-12;

/// How the starting beamformer is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMode {
    /// Dominant right-singular direction of `H_TI`.
    #[default]
    TiPrincipal,
    /// Conjugate of the first row of `H_TI`.
    TiFirstRow,
    /// MRT on the direct BS-Bob channel.
    TbDirect,
}

impl InitMode {
    pub fn name(&self) -> &'static str {
        match self {
            InitMode::TiPrincipal => "ti_principal",
            InitMode::TiFirstRow => "ti_first_row",
            InitMode::TbDirect => "tb_direct",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ti_principal" => Some(InitMode::TiPrincipal),
            "ti_first_row" => Some(InitMode::TiFirstRow),
            "tb_direct" => Some(InitMode::TbDirect),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoOptions {
    /// Relative secrecy-rate change that ends the loop.
    pub eps_sr: f64,
    pub max_ao: usize,
    pub fp: FpOptions,
    pub init: InitMode,
}

impl Default for AoOptions {
    fn default() -> Self {
        Self {
            eps_sr: 1e-3,
            max_ao: 20,
            fp: FpOptions::default(),
            init: InitMode::default(),
        }
    }
}

impl AoOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_sr.is_finite() && self.eps_sr > 0.0) {
            return Err(Error::invalid("eps_sr", "must be > 0"));
        }
        if self.max_ao == 0 {
            return Err(Error::invalid("max_ao", "must be at least 1"));
        }
        self.fp.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AoResult {
    pub w_star: Beamformer,
    pub theta_star: PhaseVector,
    pub secrecy_rate: f64,
    /// Secrecy rate at the start point and after every round.
    pub sr_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn unit_or_first_axis(mut v: CVector) -> CVector {
    let n = v.norm();
    if n > 0.0 && n.is_finite() {
        v /= c(n, 0.0);
    } else {
        v = CVector::zeros(v.len());
        v[0] = c(1.0, 0.0);
    }
    v
}

/// Starting point: `θ = 1_N` and a full-power beamformer.
pub fn init_state(ch: &ChannelSet, p_max: f64) -> Result<(Beamformer, PhaseVector)> {
    init_state_with(ch, p_max, InitMode::default())
}

pub fn init_state_with(ch: &ChannelSet, p_max: f64, mode: InitMode) -> Result<(Beamformer, PhaseVector)> {
    if !(p_max.is_finite() && p_max > 0.0) {
        return Err(Error::invalid("p_max", format!("must be > 0, got {p_max}")));
    }
    let dir = match mode {
        InitMode::TiPrincipal => {
            let gram = ch.h_ti.ad_mul(&ch.h_ti);
            let eig = SymmetricEigen::try_new(gram, f64::EPSILON, 0)
                .ok_or_else(|| Error::Numerical("eigensolver did not converge".into()))?;
            let k = eig.eigenvalues.imax();
            eig.eigenvectors.column(k).into_owned()
        }
        InitMode::TiFirstRow => ch.h_ti.row(0).adjoint(),
        InitMode::TbDirect => ch.h_tb.clone(),
    };
    let mut w = unit_or_first_axis(dir);
    normalize_phase(&mut w);
    w *= c(p_max.sqrt(), 0.0);
    Ok((Beamformer { w, p_max }, PhaseVector::ones(ch.n_irs())))
}

/// `|R^(i) − R^(i−1)| / R^(i) ≤ ε`, or an absolute test when the rate is zero.
pub fn sr_converged(current: f64, previous: f64, eps: f64) -> bool {
    if current < ZERO_SR {
        (current - previous).abs() <= ZERO_SR
    } else {
        ((current - previous) / current).abs() <= eps
    }
}

/// The exact beamformer step at fixed phases.
pub fn beamformer_step(
    ch: &ChannelSet,
    theta: &PhaseVector,
    p_max: f64,
    noise: &NoisePowers,
) -> Result<Beamformer> {
    let xb = build_xb(ch, theta, noise)?;
    let xe = build_xe(ch, theta, noise)?;
    Ok(optimal_beamformer(&xb, &xe, p_max)?.beamformer)
}

pub fn maximize_secrecy(ch: &ChannelSet, p_max: f64, noise: &NoisePowers, opts: &AoOptions) -> Result<AoResult> {
    opts.validate()?;
    let (mut w, mut theta) = init_state_with(ch, p_max, opts.init)?;
    let mut sr_prev = secrecy_rate(ch, &theta, &w, noise)?;
    let mut sr_trace = vec![sr_prev];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_ao {
        iterations += 1;
        w = beamformer_step(ch, &theta, p_max, noise)?;
        theta = optimize_phases(ch, &w, noise, &theta, &opts.fp)?.theta;
        let sr = secrecy_rate(ch, &theta, &w, noise)?;
        sr_trace.push(sr);
        if sr_converged(sr, sr_prev, opts.eps_sr) {
            converged = true;
            break;
        }
        sr_prev = sr;
    }

    Ok(AoResult {
        secrecy_rate: *sr_trace.last().expect("trace holds the start value"),
        w_star: w,
        theta_star: theta,
        sr_trace,
        iterations,
        converged,
    })
}
