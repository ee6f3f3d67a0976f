//! Quick invariant checks behind the `selftest` command.
//!
//! Smaller versions of the unit-test oracles, runnable from a release build.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ao::{maximize_secrecy, AoOptions};
use crate::beamforming::{beam_objective, optimal_beamformer};
use crate::channel::{dbm_to_watts, generate_channels, rayleigh_channels, PathLossParams, RicianParams, ScenarioGeometry};
use crate::error::Result;
use crate::fp::{build_quadratic, f1_value, update_aux, FpOptions};
use crate::linalg::{c, real_inner, CVector};
use crate::manifold::{euclidean_grad, f3_value, project_tangent, retract, riemannian_grad};
use crate::metrics::{build_alphas, build_xb, build_xe, objective_f, rate_eve_det, rate_eve_sum, Beamformer, NoisePowers};
use crate::phase::PhaseVector;

use crate::experiment::{oracle_check, OracleCheck};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn random_theta(rng: &mut ChaCha8Rng, n: usize) -> PhaseVector {
    let psi: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    PhaseVector::from_phase_shifts(&psi)
}

fn random_beam(rng: &mut ChaCha8Rng, m: usize, p_max: f64) -> Result<Beamformer> {
    let v = CVector::from_iterator(m, (0..m).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)));
    let scale = p_max.sqrt() / v.norm();
    Beamformer::new(v * c(scale, 0.0), p_max)
}

fn paper_noise() -> Result<NoisePowers> {
    let s = dbm_to_watts(-75.0);
    NoisePowers::new(s, s)
}

fn det_identity() -> Result<CheckOutcome> {
    let geom = ScenarioGeometry {
        n_irs: 16,
        ..Default::default()
    };
    let noise = paper_noise()?;
    let p_max = dbm_to_watts(15.0);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let ch = generate_channels(&geom, &PathLossParams::default(), &RicianParams::default(), seed)?;
        let theta = random_theta(&mut rng, 16);
        let w = random_beam(&mut rng, 4, p_max)?;
        let gap = (rate_eve_det(&ch, &theta, &w, &noise)? - rate_eve_sum(&ch, &theta, &w, &noise)?).abs();
        worst = worst.max(gap);
    }
    Ok(CheckOutcome {
        name: "eve rate determinant identity",
        passed: worst <= 1e-9,
        detail: format!("max gap {worst:.3e}"),
    })
}

fn beamformer_optimality() -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let noise = NoisePowers::new(1.0, 1.0)?;
    let mut violations = 0;
    let mut worst_residual: f64 = 0.0;
    for seed in 0..10 {
        let ch = rayleigh_channels(4, 4, 8, seed)?;
        let theta = random_theta(&mut rng, 8);
        let xb = build_xb(&ch, &theta, &noise)?;
        let xe = build_xe(&ch, &theta, &noise)?;
        let sol = optimal_beamformer(&xb, &xe, 1.0)?;
        worst_residual = worst_residual.max(sol.residual());
        let best = beam_objective(&xb, &xe, &sol.beamformer.w);
        for _ in 0..1000 {
            let v = random_beam(&mut rng, 4, 1.0)?;
            if beam_objective(&xb, &xe, &v.w) > best * (1.0 + 1e-12) {
                violations += 1;
            }
        }
    }
    Ok(CheckOutcome {
        name: "beamformer beats random feasible beams",
        passed: violations == 0 && worst_residual <= 1e-8,
        detail: format!("{violations} violations, max residual {worst_residual:.3e}"),
    })
}

fn fp_identities() -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let noise = NoisePowers::new(0.7, 1.3)?;
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let ch = rayleigh_channels(3, 2, 8, seed)?;
        let w = random_beam(&mut rng, 3, 1.0)?;
        let alphas = build_alphas(&ch, &w)?;
        for _ in 0..10 {
            let theta = random_theta(&mut rng, 8);
            let aux = update_aux(&alphas, &theta, &noise);
            let f = objective_f(&alphas, &theta, &noise);
            let f1 = f1_value(&alphas, &theta, &aux, &noise);
            let q = build_quadratic(&alphas, &aux, &noise);
            let other = random_theta(&mut rng, 8);
            let lhs = f1_value(&alphas, &other, &aux, &noise);
            let rhs = -f3_value(&q, &other) + q.c;
            worst = worst
                .max((f1 - f).abs() / f.abs())
                .max((lhs - rhs).abs() / lhs.abs().max(1.0));
        }
    }
    Ok(CheckOutcome {
        name: "FP tightness and surrogate identity",
        passed: worst <= 1e-10,
        detail: format!("max relative gap {worst:.3e}"),
    })
}

fn manifold_gradient() -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let noise = NoisePowers::new(1.0, 1.0)?;
    let h = 1e-6;
    let (mut worst_fd, mut worst_tangent): (f64, f64) = (0.0, 0.0);
    for seed in 0..20 {
        let ch = rayleigh_channels(3, 2, 16, seed)?;
        let w = random_beam(&mut rng, 3, 1.0)?;
        let alphas = build_alphas(&ch, &w)?;
        let theta = random_theta(&mut rng, 16);
        let q = build_quadratic(&alphas, &update_aux(&alphas, &PhaseVector::ones(16), &noise), &noise);
        let g = riemannian_grad(&q, &theta);
        worst_tangent = worst_tangent.max(g.tangency_defect());
        let raw = CVector::from_iterator(16, (0..16).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)));
        let xi = project_tangent(&raw, &theta);
        let fwd = retract(&(theta.as_vector() + &xi.zeta * c(h, 0.0)))?;
        let back = retract(&(theta.as_vector() - &xi.zeta * c(h, 0.0)))?;
        let fd = (f3_value(&q, &fwd) - f3_value(&q, &back)) / (2.0 * h);
        let exact = real_inner(&xi.zeta, &euclidean_grad(&q, &theta));
        worst_fd = worst_fd.max((fd - exact).abs() / exact.abs());
    }
    Ok(CheckOutcome {
        name: "manifold gradient",
        passed: worst_fd <= 1e-5 && worst_tangent <= 1e-10,
        detail: format!("finite-difference error {worst_fd:.3e}, tangency {worst_tangent:.3e}"),
    })
}

fn grid_oracle() -> Result<CheckOutcome> {
    let check = OracleCheck {
        instances: 20,
        n_irs: 3,
        ..Default::default()
    };
    let results = oracle_check(&check, &FpOptions::default())?;
    let good = results.iter().filter(|r| r.ratio() >= 0.98).count();
    Ok(CheckOutcome {
        name: "phase optimizer vs 16-level grid",
        passed: good >= 19,
        detail: format!("{good}/{} within 2% of the grid best", results.len()),
    })
}

fn ao_monotone() -> Result<CheckOutcome> {
    let noise = paper_noise()?;
    let mut worst_drop: f64 = 0.0;
    let mut converged = 0;
    for seed in 0..5 {
        let ch = generate_channels(
            &ScenarioGeometry::default(),
            &PathLossParams::default(),
            &RicianParams::default(),
            seed,
        )?;
        let res = maximize_secrecy(&ch, dbm_to_watts(15.0), &noise, &AoOptions::default())?;
        for w in res.sr_trace.windows(2) {
            worst_drop = worst_drop.max(w[0] - w[1]);
        }
        converged += usize::from(res.converged);
    }
    Ok(CheckOutcome {
        name: "AO trace monotone",
        passed: worst_drop <= 1e-9 && converged == 5,
        detail: format!("largest drop {worst_drop:.3e}, {converged}/5 converged"),
    })
}

type Check = fn() -> Result<CheckOutcome>;

/// Runs every check. An error inside a check counts as a failure of that check.
pub fn run_all() -> Vec<CheckOutcome> {
    let checks: [(&'static str, Check); 6] = [
        ("eve rate determinant identity", det_identity),
        ("beamformer beats random feasible beams", beamformer_optimality),
        ("FP tightness and surrogate identity", fp_identities),
        ("manifold gradient", manifold_gradient),
        ("phase optimizer vs 16-level grid", grid_oracle),
        ("AO trace monotone", ao_monotone),
    ];
    checks
        .iter()
        .map(|(name, f)| {
            f().unwrap_or_else(|e| CheckOutcome {
                name,
                passed: false,
                detail: format!("error: {e}"),
            })
        })
        .collect()
}
