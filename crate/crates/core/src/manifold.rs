//! Conjugate-gradient minimization of `f3(θ) = θᴴUθ − θᴴγ − γᴴθ` over the
//! complex circle manifold `{θ ∈ ℂᴺ : |θ_i| = 1}`.
//!
//! Tangent vectors at `θ` satisfy `Re[ζ_i* θ_i] = 0`. The metric is the real
//! inner product `⟨a, b⟩ = Re[aᴴb]`; retraction is entrywise normalization and
//! vector transport is orthogonal projection onto the target tangent space.

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_defect, norm_sq, real_inner, CMatrix, CVector};
use crate::phase::PhaseVector;

/// A point of the complex circle manifold.
pub type CcmPoint = PhaseVector;

/// Entries smaller than this cannot be retracted.
pub const MIN_RETRACT_MODULUS: f64 = 1e-300;

/// `f3(θ) = θᴴUθ − θᴴγ − γᴴθ`, with the constant `C` carried alongside so
/// that the fractional-programming surrogate is `−f3(θ) + C`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub u: CMatrix,
    pub gamma: CVector,
    pub c: f64,
}

impl QuadraticForm {
    pub fn new(u: CMatrix, gamma: CVector, c: f64) -> Result<Self> {
        if !u.is_square() || u.nrows() != gamma.len() {
            return Err(Error::DimensionMismatch {
                context: "QuadraticForm U vs gamma",
                expected: gamma.len(),
                actual: u.nrows(),
            });
        }
        let scale = u.norm().max(1.0);
        if hermitian_defect(&u) > 1e-12 * scale {
            return Err(Error::invalid("u", "matrix is not Hermitian"));
        }
        Ok(Self { u, gamma, c })
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// The surrogate `f2(θ) = −f3(θ) + C`.
    pub fn surrogate_value(&self, p: &CcmPoint) -> f64 {
        -f3_value(self, p) + self.c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub zeta: CVector,
    pub at: CcmPoint,
}

impl TangentVector {
    /// Largest `|Re[ζ_i* θ_i]|`.
    pub fn tangency_defect(&self) -> f64 {
        self.zeta
            .iter()
            .zip(self.at.as_vector().iter())
            .map(|(z, t)| (z.conj() * t).re.abs())
            .fold(0.0, f64::max)
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.zeta)
    }

    pub fn inner(&self, other: &TangentVector) -> f64 {
        real_inner(&self.zeta, &other.zeta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    /// Initial trial step `τ`.
    pub tau: f64,
    /// Armijo slope fraction `ϖ`.
    pub varpi: f64,
    /// Backtracking shrink factor `α`.
    pub alpha_bt: f64,
    /// Threshold on `‖grad‖²`.
    pub eps_grad: f64,
    /// Multiply `eps_grad` by `N` before comparing. Off by default: the
    /// surrogate's gradient scales with `f`, and at small `f` the scaled
    /// threshold already holds at the starting point.
    pub scale_eps_by_n: bool,
    pub max_iters: usize,
    pub max_backtracks: usize,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self {
            tau: 1.0,
            varpi: 2f64.powi(-13),
            alpha_bt: 0.5,
            eps_grad: 1e-3,
            scale_eps_by_n: false,
            max_iters: 500,
            max_backtracks: 50,
        }
    }
}

impl CgOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::invalid("tau", "must be > 0"));
        }
        if !(self.varpi > 0.0 && self.varpi < 1.0) {
            return Err(Error::invalid("varpi", "must lie in (0, 1)"));
        }
        if !(self.alpha_bt > 0.0 && self.alpha_bt < 1.0) {
            return Err(Error::invalid("alpha_bt", "must lie in (0, 1)"));
        }
        if !(self.eps_grad.is_finite() && self.eps_grad > 0.0) {
            return Err(Error::invalid("eps_grad", "must be > 0"));
        }
        Ok(())
    }

    pub fn grad_threshold(&self, n: usize) -> f64 {
        if self.scale_eps_by_n {
            self.eps_grad * n as f64
        } else {
            self.eps_grad
        }
    }
}

fn check_dim(q: &QuadraticForm, p: &CcmPoint) -> Result<()> {
    if q.dim() != p.len() {
        return Err(Error::DimensionMismatch {
            context: "quadratic form vs manifold point",
            expected: q.dim(),
            actual: p.len(),
        });
    }
    Ok(())
}

/// `θᴴUθ − 2 Re[θᴴγ]`; the imaginary residue of `θᴴUθ` is discarded.
pub fn f3_value(q: &QuadraticForm, p: &CcmPoint) -> f64 {
    let t = p.as_vector();
    t.dotc(&(&q.u * t)).re - 2.0 * t.dotc(&q.gamma).re
}

/// `2(Uθ − γ)`.
pub fn euclidean_grad(q: &QuadraticForm, p: &CcmPoint) -> CVector {
    (&q.u * p.as_vector() - &q.gamma) * c(2.0, 0.0)
}

/// `v − Re[v* ⊙ θ] ⊙ θ`.
pub fn project_tangent(v: &CVector, p: &CcmPoint) -> TangentVector {
    let t = p.as_vector();
    let zeta = CVector::from_iterator(
        v.len(),
        v.iter().zip(t.iter()).map(|(vi, ti)| {
            let radial = (vi.conj() * ti).re;
            vi - ti * radial
        }),
    );
    TangentVector {
        zeta,
        at: p.clone(),
    }
}

pub fn riemannian_grad(q: &QuadraticForm, p: &CcmPoint) -> TangentVector {
    project_tangent(&euclidean_grad(q, p), p)
}

/// Moves `zeta` into the tangent space at `to` by projection.
pub fn transport(zeta: &TangentVector, to: &CcmPoint) -> TangentVector {
    project_tangent(&zeta.zeta, to)
}

/// `θ_i = x_i / |x_i|`.
pub fn retract(x: &CVector) -> Result<CcmPoint> {
    let mut out = x.clone();
    for (i, z) in out.iter_mut().enumerate() {
        let m = z.norm();
        if !(m >= MIN_RETRACT_MODULUS && m.is_finite()) {
            return Err(Error::DegenerateRetraction { index: i, modulus: m });
        }
        *z /= m;
    }
    Ok(PhaseVector::new_unchecked(out))
}

/// Polak-Ribière+ coefficient `max(0, ⟨g_new, g_new − T(g_old)⟩ / ⟨g_old, g_old⟩)`.
pub fn pr_beta(g_new: &TangentVector, g_old_transported: &TangentVector, g_old: &TangentVector) -> f64 {
    let denom = g_old.norm_sq();
    if denom < 1e-30 {
        return 0.0;
    }
    let raw = (g_new.norm_sq() - g_new.inner(g_old_transported)) / denom;
    raw.max(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmijoStep {
    /// Accepted step `τα^t`.
    pub step: f64,
    pub next: CcmPoint,
    pub value: f64,
    /// Number of shrinks `t`.
    pub backtracks: usize,
}

/// Finds the smallest `t ≥ 0` with
/// `f3(R(θ + τα^t ζ)) − f3(θ) ≤ ϖ τα^t Re[ζᴴ grad]`.
///
/// `zeta` must be a descent direction. Trial points whose retraction is
/// undefined count as rejected.
pub fn armijo_search(
    q: &QuadraticForm,
    p: &CcmPoint,
    zeta: &TangentVector,
    grad: &TangentVector,
    opts: &CgOptions,
) -> Result<ArmijoStep> {
    check_dim(q, p)?;
    let slope = zeta.inner(grad);
    if !(slope < 0.0) {
        return Err(Error::invalid("zeta", "not a descent direction"));
    }
    let f0 = f3_value(q, p);
    let mut step = opts.tau;
    for t in 0..=opts.max_backtracks {
        let trial = p.as_vector() + &zeta.zeta * c(step, 0.0);
        if let Ok(next) = retract(&trial) {
            let value = f3_value(q, &next);
            if value - f0 <= opts.varpi * step * slope {
                return Ok(ArmijoStep {
                    step,
                    next,
                    value,
                    backtracks: t,
                });
            }
        }
        step *= opts.alpha_bt;
    }
    Err(Error::LineSearchFailed {
        backtracks: opts.max_backtracks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// `‖grad‖²` fell below the threshold.
    Converged,
    MaxIterations,
    /// Line search failed even along steepest descent.
    LineSearchFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgOutcome {
    pub theta: CcmPoint,
    /// `f3` at the start point and after every accepted step.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub grad_norm_sq: f64,
    pub termination: Termination,
}

/// Riemannian conjugate gradient with Armijo backtracking.
pub fn minimize_qcqp(q: &QuadraticForm, theta0: &CcmPoint, opts: &CgOptions) -> Result<CgOutcome> {
    opts.validate()?;
    check_dim(q, theta0)?;
    let threshold = opts.grad_threshold(q.dim());

    let mut theta = theta0.clone();
    let mut grad = riemannian_grad(q, &theta);
    let mut zeta = TangentVector {
        zeta: -&grad.zeta,
        at: theta.clone(),
    };
    let mut trace = vec![f3_value(q, &theta)];
    let mut iterations = 0;

    let termination = loop {
        if grad.norm_sq() <= threshold {
            break Termination::Converged;
        }
        if iterations >= opts.max_iters {
            break Termination::MaxIterations;
        }
        if zeta.inner(&grad) >= 0.0 {
            zeta.zeta = -&grad.zeta;
        }
        let accepted = match armijo_search(q, &theta, &zeta, &grad, opts) {
            Ok(s) => s,
            Err(Error::LineSearchFailed { .. }) => {
                let steepest = TangentVector {
                    zeta: -&grad.zeta,
                    at: theta.clone(),
                };
                match armijo_search(q, &theta, &steepest, &grad, opts) {
                    Ok(s) => s,
                    Err(Error::LineSearchFailed { .. }) => break Termination::LineSearchFailure,
                    Err(e) => return Err(e),
                }
            }
            Err(e) => return Err(e),
        };

        let next = accepted.next;
        let grad_next = riemannian_grad(q, &next);
        let beta = pr_beta(&grad_next, &transport(&grad, &next), &grad);
        let carried = transport(&zeta, &next);
        zeta = TangentVector {
            zeta: -&grad_next.zeta + carried.zeta * c(beta, 0.0),
            at: next.clone(),
        };
        theta = next;
        grad = grad_next;
        trace.push(accepted.value);
        iterations += 1;
    };

    Ok(CgOutcome {
        grad_norm_sq: grad.norm_sq(),
        theta,
        trace,
        iterations,
        termination,
    })
}
