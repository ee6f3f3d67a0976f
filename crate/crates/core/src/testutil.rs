//! Random instance builders shared by unit tests.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::ChannelSet;
use crate::linalg::{c, CMatrix, CVector, C64};
use crate::phase::PhaseVector;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(r: &mut impl Rng) -> C64 {
    let re: f64 = r.sample(StandardNormal);
    let im: f64 = r.sample(StandardNormal);
    c(re, im)
}

pub fn random_vector(r: &mut impl Rng, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| gaussian(r))
}

pub fn random_matrix(r: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(r))
}

pub fn random_phase(r: &mut impl Rng, n: usize) -> PhaseVector {
    let psi: Vec<f64> = (0..n).map(|_| r.random_range(0.0..std::f64::consts::TAU)).collect();
    PhaseVector::from_phase_shifts(&psi)
}

/// Unit-variance channel blocks, no path loss.
pub fn random_channels(r: &mut impl Rng, m: usize, m_eve: usize, n: usize) -> ChannelSet {
    ChannelSet::new(
        random_matrix(r, n, m),
        random_vector(r, m),
        random_matrix(r, m, m_eve),
        random_vector(r, n),
        random_matrix(r, n, m_eve),
    )
    .unwrap()
}
