//! Phase optimization for fixed `w` by the quadratic transform.
//!
//! The objective `f(θ) = (|a(θ)|² + σ_B²)/D(θ)` is the sum of two ratios with a
//! shared denominator. With auxiliary `y = (y1, y2)` it is lower-bounded by
//! `f1(θ, y) = 2Re[y1*·a(θ) + y2*·σ_B] − (|y1|² + |y2|²)·D(θ)`, tight at
//! `y1 = a/D, y2 = σ_B/D`. For fixed `y`, `f1` is the concave quadratic
//! `−f3(θ) + C` handed to the manifold solver.

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector, C64};
use crate::manifold::{minimize_qcqp, CgOptions, QuadraticForm};
use crate::metrics::{build_alphas, objective_f, AlphaSet, Beamformer, NoisePowers};
use crate::phase::PhaseVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpAux {
    pub y1: C64,
    pub y2: C64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpOptions {
    /// Relative change of `f` that ends the outer loop.
    pub eps_outer: f64,
    pub max_outer: usize,
    pub cg: CgOptions,
}

impl Default for FpOptions {
    fn default() -> Self {
        Self {
            eps_outer: 1e-3,
            max_outer: 50,
            cg: CgOptions::default(),
        }
    }
}

impl FpOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_outer.is_finite() && self.eps_outer > 0.0) {
            return Err(Error::invalid("eps_outer", "must be > 0"));
        }
        self.cg.validate()
    }
}

fn denominator(alphas: &AlphaSet, theta: &PhaseVector, noise: &NoisePowers) -> f64 {
    alphas.eve_power(theta) + noise.sigma2_e
}

/// Closed-form maximizers of `f1` in `y` for fixed `θ`.
pub fn update_aux(alphas: &AlphaSet, theta: &PhaseVector, noise: &NoisePowers) -> FpAux {
    let d = denominator(alphas, theta, noise);
    FpAux {
        y1: alphas.bob_amplitude(theta) / d,
        y2: c(noise.sigma2_b.sqrt() / d, 0.0),
    }
}

pub fn f1_value(alphas: &AlphaSet, theta: &PhaseVector, aux: &FpAux, noise: &NoisePowers) -> f64 {
    let sigma_b = noise.sigma2_b.sqrt();
    let linear = 2.0 * (aux.y1.conj() * alphas.bob_amplitude(theta) + aux.y2.conj() * sigma_b).re;
    let weight = aux.y1.norm_sqr() + aux.y2.norm_sqr();
    linear - weight * denominator(alphas, theta, noise)
}

/// `(U, γ, C)` with `f1(θ, aux) = −f3(θ) + C`.
pub fn build_quadratic(alphas: &AlphaSet, aux: &FpAux, noise: &NoisePowers) -> QuadraticForm {
    let n = alphas.n_irs();
    let weight = aux.y1.norm_sqr() + aux.y2.norm_sqr();
    let mut u = CMatrix::zeros(n, n);
    let mut gamma: CVector = &alphas.alpha_b * aux.y1.conj();
    let mut eve_const = noise.sigma2_e;
    for (a, at) in alphas.alpha_e.iter().zip(&alphas.alpha_e_tilde) {
        u.gerc(c(weight, 0.0), a, a, c(1.0, 0.0));
        gamma -= a * (at.conj() * weight);
        eve_const += at.norm_sqr();
    }
    let c_term = 2.0 * (aux.y1.conj() * alphas.alpha_b_tilde + aux.y2.conj() * noise.sigma2_b.sqrt()).re
        - weight * eve_const;
    QuadraticForm { u, gamma, c: c_term }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FpOutcome {
    pub theta: PhaseVector,
    /// `f` at the start point and after each outer iteration.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub inner_iterations: usize,
}

impl FpOutcome {
    pub fn objective(&self) -> f64 {
        *self.trace.last().expect("trace holds the start value")
    }
}

/// Outer loop: refresh `y`, rebuild the quadratic, warm-start CG from the current `θ`.
pub fn optimize_phases_with_alphas(
    alphas: &AlphaSet,
    noise: &NoisePowers,
    theta0: &PhaseVector,
    opts: &FpOptions,
) -> Result<FpOutcome> {
    opts.validate()?;
    if theta0.len() != alphas.n_irs() {
        return Err(Error::DimensionMismatch {
            context: "theta0 vs IRS size",
            expected: alphas.n_irs(),
            actual: theta0.len(),
        });
    }
    let mut theta = theta0.clone();
    let mut f_prev = objective_f(alphas, &theta, noise);
    let mut trace = vec![f_prev];
    let mut iterations = 0;
    let mut inner_iterations = 0;

    while iterations < opts.max_outer {
        let aux = update_aux(alphas, &theta, noise);
        let quad = build_quadratic(alphas, &aux, noise);
        let inner = minimize_qcqp(&quad, &theta, &opts.cg)?;
        inner_iterations += inner.iterations;
        iterations += 1;

        let f_new = objective_f(alphas, &inner.theta, noise);
        if f_new < f_prev {
            // only reachable through rounding; keep the better point
            trace.push(f_prev);
            break;
        }
        theta = inner.theta;
        trace.push(f_new);
        let done = (f_new - f_prev).abs() <= opts.eps_outer * f_new.abs();
        f_prev = f_new;
        if done {
            break;
        }
    }

    Ok(FpOutcome {
        theta,
        trace,
        iterations,
        inner_iterations,
    })
}

pub fn optimize_phases(
    ch: &ChannelSet,
    w: &Beamformer,
    noise: &NoisePowers,
    theta0: &PhaseVector,
    opts: &FpOptions,
) -> Result<FpOutcome> {
    let alphas = build_alphas(ch, w)?;
    optimize_phases_with_alphas(&alphas, noise, theta0, opts)
}
