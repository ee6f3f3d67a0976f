//! Comparison schemes and the exhaustive phase-grid oracle.

use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;

use crate::ao::{beamformer_step, AoResult};
use crate::beamforming::optimal_beamformer;
use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::fp::{optimize_phases, FpOptions};
use crate::linalg::{c, CVector, C64};
use crate::metrics::{build_alphas, build_xb, build_xe, objective_f, secrecy_rate, Beamformer, NoisePowers};
use crate::phase::PhaseVector;

/// Largest grid the oracle will enumerate.
pub const GRID_BUDGET: f64 = 1e8;

const GRID_CHUNK: usize = 4096;

/// MRT on the direct BS-Bob link, then phase optimization for that fixed beam.
pub fn heuristic_mrt(ch: &ChannelSet, p_max: f64, noise: &NoisePowers, fp_opts: &FpOptions) -> Result<AoResult> {
    let norm = ch.h_tb.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::invalid("h_tb", "MRT needs a nonzero direct channel"));
    }
    let w = Beamformer::new(&ch.h_tb * c(p_max.sqrt() / norm, 0.0), p_max)?;
    let theta0 = PhaseVector::ones(ch.n_irs());
    let sr0 = secrecy_rate(ch, &theta0, &w, noise)?;
    let fp = optimize_phases(ch, &w, noise, &theta0, fp_opts)?;
    let sr = secrecy_rate(ch, &fp.theta, &w, noise)?;
    Ok(AoResult {
        w_star: w,
        theta_star: fp.theta,
        secrecy_rate: sr,
        sr_trace: vec![sr0, sr],
        iterations: 1,
        converged: true,
    })
}

/// Optimal beamformer on the direct links alone.
pub fn without_irs(ch: &ChannelSet, p_max: f64, noise: &NoisePowers) -> Result<AoResult> {
    let direct = ch.without_reflection();
    let theta = PhaseVector::ones(ch.n_irs());
    let xb = build_xb(&direct, &theta, noise)?;
    let xe = build_xe(&direct, &theta, noise)?;
    let w = optimal_beamformer(&xb, &xe, p_max)?.beamformer;
    let sr = secrecy_rate(&direct, &theta, &w, noise)?;
    Ok(AoResult {
        w_star: w,
        theta_star: theta,
        secrecy_rate: sr,
        sr_trace: vec![sr],
        iterations: 1,
        converged: true,
    })
}

/// Best secrecy rate over candidate phase vectors, each with its optimal beamformer.
/// Ties keep the earliest candidate.
pub fn best_over_phases<I>(ch: &ChannelSet, p_max: f64, noise: &NoisePowers, candidates: I) -> Result<AoResult>
where
    I: IntoIterator<Item = PhaseVector>,
{
    let mut best: Option<AoResult> = None;
    let mut count = 0;
    for theta in candidates {
        count += 1;
        let w = beamformer_step(ch, &theta, p_max, noise)?;
        let sr = secrecy_rate(ch, &theta, &w, noise)?;
        if best.as_ref().is_none_or(|b| sr > b.secrecy_rate) {
            best = Some(AoResult {
                w_star: w,
                theta_star: theta,
                secrecy_rate: sr,
                sr_trace: Vec::new(),
                iterations: 0,
                converged: true,
            });
        }
    }
    let mut best = best.ok_or_else(|| Error::invalid("trials", "need at least one candidate"))?;
    best.iterations = count;
    best.sr_trace = vec![best.secrecy_rate];
    Ok(best)
}

/// Uniformly random phases, best of `trials`.
pub fn random_phases<R: Rng + ?Sized>(
    ch: &ChannelSet,
    p_max: f64,
    noise: &NoisePowers,
    rng: &mut R,
    trials: usize,
) -> Result<AoResult> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    let n = ch.n_irs();
    let candidates: Vec<PhaseVector> = (0..trials)
        .map(|_| {
            let psi: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
            PhaseVector::from_phase_shifts(&psi)
        })
        .collect();
    best_over_phases(ch, p_max, noise, candidates)
}

/// Grid point `index` in base `levels`, least significant digit first.
fn grid_digits(mut index: usize, levels: usize, n: usize, out: &mut [usize]) {
    for d in out.iter_mut().take(n) {
        *d = index % levels;
        index /= levels;
    }
}

fn grid_theta(index: usize, levels: usize, n: usize) -> PhaseVector {
    let mut digits = vec![0; n];
    grid_digits(index, levels, n, &mut digits);
    let v = CVector::from_iterator(
        n,
        digits.iter().map(|&k| {
            let (s, co) = (TAU * k as f64 / levels as f64).sin_cos();
            c(co, s)
        }),
    );
    PhaseVector::new_unchecked(v)
}

/// Exhaustive search of `f` over `θ_i ∈ {e^{j2πk/levels}}`.
///
/// The max-reduction breaks ties toward the lowest grid index, so the result
/// does not depend on how the grid is chunked across threads.
pub fn grid_oracle_phases(
    ch: &ChannelSet,
    w: &Beamformer,
    noise: &NoisePowers,
    levels: usize,
) -> Result<(PhaseVector, f64)> {
    if levels == 0 {
        return Err(Error::invalid("levels", "must be at least 1"));
    }
    let n = ch.n_irs();
    let points = (levels as f64).powi(n as i32);
    if points > GRID_BUDGET {
        return Err(Error::BudgetExceeded {
            levels,
            n,
            budget: GRID_BUDGET,
        });
    }
    let total = levels.pow(n as u32);
    let alphas = build_alphas(ch, w)?;

    // conj(θ_i) for each level, so θᴴα = Σ conj(θ_i) α_i
    let conj_levels: Vec<C64> = (0..levels)
        .map(|k| {
            let (s, co) = (TAU * k as f64 / levels as f64).sin_cos();
            c(co, -s)
        })
        .collect();

    let evaluate = |digits: &[usize]| -> f64 {
        let mut amp = alphas.alpha_b_tilde;
        for (i, &k) in digits.iter().enumerate() {
            amp += conj_levels[k] * alphas.alpha_b[i];
        }
        let mut eve = noise.sigma2_e;
        for (a, at) in alphas.alpha_e.iter().zip(&alphas.alpha_e_tilde) {
            let mut z = *at;
            for (i, &k) in digits.iter().enumerate() {
                z += conj_levels[k] * a[i];
            }
            eve += z.norm_sqr();
        }
        (amp.norm_sqr() + noise.sigma2_b) / eve
    };

    let chunks = total.div_ceil(GRID_CHUNK);
    let (best_idx, _) = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * GRID_CHUNK;
            let end = (start + GRID_CHUNK).min(total);
            let mut digits = vec![0usize; n];
            let mut best = (start, f64::NEG_INFINITY);
            for idx in start..end {
                grid_digits(idx, levels, n, &mut digits);
                let f = evaluate(&digits);
                if f > best.1 {
                    best = (idx, f);
                }
            }
            best
        })
        .reduce(
            || (usize::MAX, f64::NEG_INFINITY),
            |a, b| {
                if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        );

    let theta = grid_theta(best_idx, levels, n);
    let f_best = objective_f(&alphas, &theta, noise);
    Ok((theta, f_best))
}
