//! Closed-form transmit beamformer for fixed IRS phases.
//!
//! Maximizes `(wᴴX_Bw + 1)/(wᴴX_Ew + 1)` over `‖w‖² ≤ P_max`. On the sphere the
//! ratio equals the Rayleigh quotient of the regularized pair
//! `X̄_i = X_i + I/P_max`, so the optimum is the top generalized eigenvector of
//! `(X̄_B, X̄_E)` scaled to full power. The pencil is reduced to a Hermitian
//! standard problem through the Cholesky factor of `X̄_E`.

use std::cmp::Ordering;

use nalgebra::{Cholesky, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_form, is_finite_matrix, normalize_phase, CMatrix, CVector};
use crate::metrics::Beamformer;

/// Relative gap under which two top eigenvalues are treated as tied.
pub const EIGEN_TIE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedPair {
    pub xb_bar: CMatrix,
    pub xe_bar: CMatrix,
}

impl RegularizedPair {
    pub fn new(xb: &CMatrix, xe: &CMatrix, p_max: f64) -> Result<Self> {
        Ok(Self {
            xb_bar: regularize(xb, p_max)?,
            xe_bar: regularize(xe, p_max)?,
        })
    }
}

/// `x + (1/p_max)·I`.
pub fn regularize(x: &CMatrix, p_max: f64) -> Result<CMatrix> {
    if !(p_max.is_finite() && p_max > 0.0) {
        return Err(Error::invalid("p_max", format!("must be > 0, got {p_max}")));
    }
    if !x.is_square() {
        return Err(Error::DimensionMismatch {
            context: "regularize (square matrix)",
            expected: x.nrows(),
            actual: x.ncols(),
        });
    }
    let m = x.nrows();
    Ok(x + CMatrix::identity(m, m) * c(1.0 / p_max, 0.0))
}

fn hermitize(x: &CMatrix) -> CMatrix {
    (x + x.adjoint()) * c(0.5, 0.0)
}

/// The full-power beamformer together with its generalized eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerSolution {
    pub beamformer: Beamformer,
    /// Top generalized eigenvalue of `(X̄_B, X̄_E)`, equal to the optimal ratio.
    pub eigenvalue: f64,
    pub pair: RegularizedPair,
}

impl BeamformerSolution {
    /// `‖X̄_B w − λ X̄_E w‖ / ‖w‖`.
    pub fn residual(&self) -> f64 {
        let w = &self.beamformer.w;
        let r = &self.pair.xb_bar * w - (&self.pair.xe_bar * w) * c(self.eigenvalue, 0.0);
        r.norm() / w.norm()
    }
}

/// Objective of the beamforming subproblem, `(wᴴX_Bw + 1)/(wᴴX_Ew + 1)`.
pub fn beam_objective(xb: &CMatrix, xe: &CMatrix, w: &CVector) -> f64 {
    (hermitian_form(xb, w) + 1.0) / (hermitian_form(xe, w) + 1.0)
}

fn lexicographic_real(a: &CVector, b: &CVector) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.re.total_cmp(&y.re) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// `w* = √P_max · v`, `v` the unit top generalized eigenvector of `(X̄_B, X̄_E)`.
///
/// The result is phase-normalized so its largest-magnitude entry is real
/// positive. Within a tied top eigenspace the candidate with the
/// lexicographically largest real parts wins.
pub fn optimal_beamformer(xb: &CMatrix, xe: &CMatrix, p_max: f64) -> Result<BeamformerSolution> {
    if !(is_finite_matrix(xb) && is_finite_matrix(xe)) {
        return Err(Error::NonFinite("beamformer quadratic matrices"));
    }
    if xb.shape() != xe.shape() {
        return Err(Error::DimensionMismatch {
            context: "optimal_beamformer X_B vs X_E",
            expected: xb.nrows(),
            actual: xe.nrows(),
        });
    }
    let pair = RegularizedPair::new(&hermitize(xb), &hermitize(xe), p_max)?;
    let m = xb.nrows();

    let chol = Cholesky::new(pair.xe_bar.clone())
        .ok_or_else(|| Error::Numerical("regularized X_E not positive definite".into()))?;
    let l = chol.l();
    // A = L⁻¹ X̄_B L⁻ᴴ = L⁻¹ (L⁻¹ X̄_B)ᴴ
    let y = l
        .solve_lower_triangular(&pair.xb_bar)
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let a = l
        .solve_lower_triangular(&y.adjoint())
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let a = hermitize(&a);

    let eig = SymmetricEigen::try_new(a, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
    let top = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);

    let scale = p_max.sqrt();
    let mut best: Option<CVector> = None;
    for k in 0..m {
        let lambda = eig.eigenvalues[k];
        if top - lambda > EIGEN_TIE_TOL * top.abs() {
            continue;
        }
        let v = eig.eigenvectors.column(k).into_owned();
        let mut w = l
            .ad_solve_lower_triangular(&v)
            .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
        let norm = w.norm();
        w /= c(norm, 0.0);
        normalize_phase(&mut w);
        w *= c(scale, 0.0);
        best = match best {
            Some(prev) if lexicographic_real(&prev, &w) != Ordering::Less => Some(prev),
            _ => Some(w),
        };
    }
    let w = best.ok_or_else(|| Error::Numerical("no eigenvector selected".into()))?;
    Ok(BeamformerSolution {
        beamformer: Beamformer { w, p_max },
        eigenvalue: top,
        pair,
    })
}
