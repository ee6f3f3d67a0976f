use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};

/// Tolerance on `|θ_i| = 1`.
pub const UNIT_MODULUS_TOL: f64 = 1e-12;

/// IRS phase variable `θ` with unit-modulus entries.
///
/// Entry `i` is `e^{−jψ_i}` for reflector phase shift `ψ_i`; the reflection
/// matrix is always derived through [`PhaseVector::phi`] and never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector(CVector);

impl PhaseVector {
    pub fn new(theta: CVector) -> Result<Self> {
        for (i, z) in theta.iter().enumerate() {
            if !((z.norm() - 1.0).abs() <= UNIT_MODULUS_TOL) {
                return Err(Error::invalid(
                    "theta",
                    format!("entry {i} has modulus {} (must be 1)", z.norm()),
                ));
            }
        }
        Ok(Self(theta))
    }

    pub(crate) fn new_unchecked(theta: CVector) -> Self {
        Self(theta)
    }

    /// All-ones: zero phase shift on every reflector.
    pub fn ones(n: usize) -> Self {
        Self(CVector::from_element(n, c(1.0, 0.0)))
    }

    /// `θ_i = e^{−jψ_i}` from reflector phase shifts `ψ`.
    pub fn from_phase_shifts(psi: &[f64]) -> Self {
        Self(CVector::from_iterator(
            psi.len(),
            psi.iter().map(|&p| {
                let (s, co) = p.sin_cos();
                c(co, -s)
            }),
        ))
    }

    /// Reflector phase shifts `ψ_i ∈ [0, 2π)`.
    pub fn phase_shifts(&self) -> Vec<f64> {
        self.0.iter().map(|z| (-z.arg()).rem_euclid(TAU)).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_vector(&self) -> &CVector {
        &self.0
    }

    pub fn into_vector(self) -> CVector {
        self.0
    }

    /// `Φ = diag(conj(θ))`.
    pub fn phi(&self) -> CMatrix {
        CMatrix::from_diagonal(&self.0.map(|z| z.conj()))
    }

    /// Largest `| |θ_i| − 1 |`.
    pub fn modulus_defect(&self) -> f64 {
        self.0
            .iter()
            .map(|z| (z.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Free-function form of [`PhaseVector::phi`].
pub fn phi_from_theta(theta: &PhaseVector) -> CMatrix {
    theta.phi()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ones_gives_identity() {
        let phi = phi_from_theta(&PhaseVector::ones(5));
        assert_eq!(phi, CMatrix::identity(5, 5));
    }

    #[test]
    fn phi_conjugates() {
        let theta = PhaseVector::new(CVector::from_element(1, c(0.0, -1.0))).unwrap();
        assert_eq!(phi_from_theta(&theta)[(0, 0)], c(0.0, 1.0));
    }

    #[test]
    fn phi_diagonal_is_unit_modulus() {
        let theta = PhaseVector::from_phase_shifts(&[0.1, 2.0, 4.5, 6.0]);
        let phi = theta.phi();
        for i in 0..4 {
            assert!((phi[(i, i)].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_shift_round_trip() {
        let psi = [0.0, 1.0, 3.0, 6.2];
        let back = PhaseVector::from_phase_shifts(&psi).phase_shifts();
        for (a, b) in psi.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_unit_entries() {
        assert!(PhaseVector::new(CVector::from_element(2, c(0.9, 0.0))).is_err());
    }
}
