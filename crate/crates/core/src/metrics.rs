//! Effective channels, achievable rates and the secrecy rate, plus the
//! quadratic matrices and α-coefficients the two optimizers consume.

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::{c, norm_sq, CMatrix, CVector, C64};
use crate::phase::PhaseVector;

/// Noise powers below this are rejected.
pub const MIN_NOISE_POWER: f64 = 1e-30;

/// Transmit beamformer with its power budget.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    pub w: CVector,
    pub p_max: f64,
}

impl Beamformer {
    pub fn new(w: CVector, p_max: f64) -> Result<Self> {
        if !(p_max.is_finite() && p_max > 0.0) {
            return Err(Error::invalid("p_max", format!("must be > 0, got {p_max}")));
        }
        let power = norm_sq(&w);
        if !power.is_finite() {
            return Err(Error::NonFinite("beamformer"));
        }
        if power > p_max * (1.0 + 1e-9) {
            return Err(Error::invalid(
                "w",
                format!("power {power} exceeds budget {p_max}"),
            ));
        }
        Ok(Self { w, p_max })
    }

    pub fn zero(m: usize, p_max: f64) -> Self {
        Self {
            w: CVector::zeros(m),
            p_max,
        }
    }

    pub fn power(&self) -> f64 {
        norm_sq(&self.w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisePowers {
    pub sigma2_b: f64,
    pub sigma2_e: f64,
}

impl NoisePowers {
    pub fn new(sigma2_b: f64, sigma2_e: f64) -> Result<Self> {
        for (name, v) in [("sigma2_b", sigma2_b), ("sigma2_e", sigma2_e)] {
            if !(v.is_finite() && v >= MIN_NOISE_POWER) {
                return Err(Error::invalid(
                    name,
                    format!("noise power must be >= {MIN_NOISE_POWER:e} W, got {v:e}"),
                ));
            }
        }
        Ok(Self { sigma2_b, sigma2_e })
    }
}

/// Coefficients writing Bob's and Eve's received amplitudes as affine functions of `θ`:
/// `h_Bᴴw = θᴴα_B + α̃_B` and `h_E,iᴴw = θᴴα_E,i + α̃_E,i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSet {
    pub alpha_b: CVector,
    pub alpha_b_tilde: C64,
    pub alpha_e: Vec<CVector>,
    pub alpha_e_tilde: Vec<C64>,
}

impl AlphaSet {
    pub fn n_irs(&self) -> usize {
        self.alpha_b.len()
    }

    /// `θᴴα_B + α̃_B`.
    pub fn bob_amplitude(&self, theta: &PhaseVector) -> C64 {
        theta.as_vector().dotc(&self.alpha_b) + self.alpha_b_tilde
    }

    /// `Σ_i |θᴴα_E,i + α̃_E,i|²`.
    pub fn eve_power(&self, theta: &PhaseVector) -> f64 {
        self.alpha_e
            .iter()
            .zip(&self.alpha_e_tilde)
            .map(|(a, at)| (theta.as_vector().dotc(a) + at).norm_sqr())
            .sum()
    }
}

fn check_theta(ch: &ChannelSet, theta: &PhaseVector) -> Result<()> {
    if theta.len() != ch.n_irs() {
        return Err(Error::DimensionMismatch {
            context: "theta length vs IRS size",
            expected: ch.n_irs(),
            actual: theta.len(),
        });
    }
    Ok(())
}

fn check_w(ch: &ChannelSet, w: &Beamformer) -> Result<()> {
    if w.w.len() != ch.m_bs() {
        return Err(Error::DimensionMismatch {
            context: "beamformer length vs BS antennas",
            expected: ch.m_bs(),
            actual: w.w.len(),
        });
    }
    Ok(())
}

/// `h_B` with `h_Bᴴ = h_IBᴴ Φ H_TI + h_TBᴴ`, i.e. `h_B = H_TIᴴ Φᴴ h_IB + h_TB`.
pub fn effective_bob(ch: &ChannelSet, theta: &PhaseVector) -> Result<CVector> {
    check_theta(ch, theta)?;
    // Φᴴ h_IB = θ ⊙ h_IB
    let reflected = theta.as_vector().component_mul(&ch.h_ib);
    Ok(ch.h_ti.ad_mul(&reflected) + &ch.h_tb)
}

/// `H_E` (M × M′) with `H_Eᴴ = H_IEᴴ Φ H_TI + H_TEᴴ`.
pub fn effective_eve(ch: &ChannelSet, theta: &PhaseVector) -> Result<CMatrix> {
    check_theta(ch, theta)?;
    let mut scaled = ch.h_ie.clone();
    for (mut row, t) in scaled.row_iter_mut().zip(theta.as_vector().iter()) {
        row *= *t;
    }
    Ok(ch.h_ti.ad_mul(&scaled) + &ch.h_te)
}

fn bob_snr(ch: &ChannelSet, theta: &PhaseVector, w: &Beamformer, noise: &NoisePowers) -> Result<f64> {
    check_w(ch, w)?;
    let h_b = effective_bob(ch, theta)?;
    Ok(h_b.dotc(&w.w).norm_sqr() / noise.sigma2_b)
}

fn eve_snr(ch: &ChannelSet, theta: &PhaseVector, w: &Beamformer, noise: &NoisePowers) -> Result<f64> {
    check_w(ch, w)?;
    let h_e = effective_eve(ch, theta)?;
    Ok(h_e.ad_mul(&w.w).iter().map(|z| z.norm_sqr()).sum::<f64>() / noise.sigma2_e)
}

/// `log2(1 + |h_Bᴴw|²/σ_B²)`.
pub fn rate_bob(ch: &ChannelSet, theta: &PhaseVector, w: &Beamformer, noise: &NoisePowers) -> Result<f64> {
    Ok(bob_snr(ch, theta, w, noise)?.ln_1p() / std::f64::consts::LN_2)
}

/// `log2 det(I + H_Eᴴ w wᴴ H_E / σ_E²)`. Reference form, used for cross-checks.
pub fn rate_eve_det(ch: &ChannelSet, theta: &PhaseVector, w: &Beamformer, noise: &NoisePowers) -> Result<f64> {
    check_w(ch, w)?;
    let h_e = effective_eve(ch, theta)?;
    let v = h_e.ad_mul(&w.w);
    let m_eve = v.len();
    let gram = CMatrix::identity(m_eve, m_eve) + (&v * v.adjoint()) * c(1.0 / noise.sigma2_e, 0.0);
    let det = gram.determinant();
    if !(det.re.is_finite() && det.re > 0.0) {
        return Err(Error::Numerical(format!("non-positive determinant {det}")));
    }
    Ok(det.re.log2().max(0.0))
}

/// `log2(1 + Σ_i |h_E,iᴴw|² / σ_E²)`, the canonical Eve rate.
pub fn rate_eve_sum(ch: &ChannelSet, theta: &PhaseVector, w: &Beamformer, noise: &NoisePowers) -> Result<f64> {
    Ok(eve_snr(ch, theta, w, noise)?.ln_1p() / std::f64::consts::LN_2)
}

/// `max(0, R_B − R_E)`.
pub fn secrecy_rate(ch: &ChannelSet, theta: &PhaseVector, w: &Beamformer, noise: &NoisePowers) -> Result<f64> {
    let rb = rate_bob(ch, theta, w, noise)?;
    let re = rate_eve_sum(ch, theta, w, noise)?;
    Ok((rb - re).max(0.0))
}

/// `X_B = h_B h_Bᴴ / σ_B²`.
pub fn build_xb(ch: &ChannelSet, theta: &PhaseVector, noise: &NoisePowers) -> Result<CMatrix> {
    let h_b = effective_bob(ch, theta)?;
    Ok((&h_b * h_b.adjoint()) * c(1.0 / noise.sigma2_b, 0.0))
}

/// `X_E = Σ_i h_E,i h_E,iᴴ / σ_E² = H_E H_Eᴴ / σ_E²`.
pub fn build_xe(ch: &ChannelSet, theta: &PhaseVector, noise: &NoisePowers) -> Result<CMatrix> {
    let h_e = effective_eve(ch, theta)?;
    Ok((&h_e * h_e.adjoint()) * c(1.0 / noise.sigma2_e, 0.0))
}

/// `α_B = diag(h_IBᴴ) H_TI w`, `α̃_B = h_TBᴴ w`, and the per-antenna Eve analogues.
pub fn build_alphas(ch: &ChannelSet, w: &Beamformer) -> Result<AlphaSet> {
    check_w(ch, w)?;
    let incident = &ch.h_ti * &w.w;
    let alpha_b = ch.h_ib.map(|z| z.conj()).component_mul(&incident);
    let alpha_b_tilde = ch.h_tb.dotc(&w.w);
    let alpha_e = ch
        .h_ie
        .column_iter()
        .map(|col| col.map(|z| z.conj()).component_mul(&incident))
        .collect();
    let alpha_e_tilde = ch.h_te.column_iter().map(|col| col.dotc(&w.w)).collect();
    Ok(AlphaSet {
        alpha_b,
        alpha_b_tilde,
        alpha_e,
        alpha_e_tilde,
    })
}

/// Phase objective `(|θᴴα_B + α̃_B|² + σ_B²) / (Σ_i|θᴴα_E,i + α̃_E,i|² + σ_E²)`.
///
/// `R_B − R_E = log2 f(θ) + log2(σ_E²/σ_B²)`, so maximizing `f` maximizes the
/// secrecy rate for fixed `w`.
pub fn objective_f(alphas: &AlphaSet, theta: &PhaseVector, noise: &NoisePowers) -> f64 {
    let num = alphas.bob_amplitude(theta).norm_sqr() + noise.sigma2_b;
    let den = alphas.eve_power(theta) + noise.sigma2_e;
    num / den
}
