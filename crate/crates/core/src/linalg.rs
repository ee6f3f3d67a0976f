//! Complex dense linear-algebra aliases and the few helpers shared across modules.
//!
//! All inner products on complex vectors follow the real metric `Re[aᴴb]`
//! when used for optimization, and the ordinary Hermitian product otherwise.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CVector = DVector<C64>;
pub type CMatrix = DMatrix<C64>;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// `Re[aᴴb]`, the real inner product induced on `ℂᴺ ≅ ℝ²ᴺ`.
pub fn real_inner(a: &CVector, b: &CVector) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

/// Squared Euclidean norm `‖v‖²`.
pub fn norm_sq(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn is_finite_vector(v: &CVector) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn is_finite_matrix(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Largest entrywise deviation `max |A - Aᴴ|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `wᴴ A w`, real part only (A Hermitian).
pub fn hermitian_form(a: &CMatrix, w: &CVector) -> f64 {
    w.dotc(&(a * w)).re
}

/// Rotates `w` by a global phase so its largest-magnitude entry is real positive.
/// Ties go to the lowest index.
pub fn normalize_phase(w: &mut CVector) {
    let mut best = 0usize;
    let mut best_mag = -1.0;
    for (i, z) in w.iter().enumerate() {
        let m = z.norm();
        if m > best_mag {
            best_mag = m;
            best = i;
        }
    }
    if best_mag > 0.0 {
        let rot = w[best].conj() / best_mag;
        for z in w.iter_mut() {
            *z *= rot;
        }
        w[best] = c(w[best].re, 0.0);
    }
}
