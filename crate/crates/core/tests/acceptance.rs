//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use irs_secrecy::ao::{maximize_secrecy, AoOptions};
use irs_secrecy::beamforming::{beam_objective, optimal_beamformer};
use irs_secrecy::channel::{dbm_to_watts, generate_channels, PathLossParams, PerLink, RicianParams, ScenarioGeometry};
use irs_secrecy::experiment::{
    oracle_check, parse_config, run_experiment, write_csv, ExperimentConfig, OracleCheck, ResultRow,
};
use irs_secrecy::fp::{build_quadratic, f1_value, update_aux, FpAux, FpOptions};
use irs_secrecy::linalg::{c, real_inner, CMatrix, CVector, C64};
use irs_secrecy::manifold::{euclidean_grad, f3_value, project_tangent, retract, riemannian_grad, QuadraticForm};
use irs_secrecy::metrics::{build_alphas, build_xb, build_xe, objective_f, rate_eve_det, rate_eve_sum, Beamformer, NoisePowers};
use irs_secrecy::phase::PhaseVector;

type Check<'a> = dyn Fn() -> Verdict + 'a;

struct Verdict {
    passed: bool,
    detail: String,
}

fn gaussian(r: &mut ChaCha8Rng) -> C64 {
    let re: f64 = r.sample(StandardNormal);
    let im: f64 = r.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn gaussian_vector(r: &mut ChaCha8Rng, n: usize) -> CVector {
    CVector::from_iterator(n, (0..n).map(|_| gaussian(r)))
}

fn random_theta(r: &mut ChaCha8Rng, n: usize) -> PhaseVector {
    let psi: Vec<f64> = (0..n).map(|_| r.random_range(0.0..TAU)).collect();
    PhaseVector::from_phase_shifts(&psi)
}

/// Uniform on the power sphere, then shrunk by a uniform radius factor: a
/// feasible point anywhere in the ball.
fn random_feasible(r: &mut ChaCha8Rng, m: usize, p_max: f64) -> CVector {
    let v = gaussian_vector(r, m);
    let radius = r.random_range(0.0..=1.0f64).sqrt() * p_max.sqrt();
    &v * c(radius / v.norm(), 0.0)
}

fn on_sphere(r: &mut ChaCha8Rng, m: usize, p_max: f64) -> Beamformer {
    let v = gaussian_vector(r, m);
    Beamformer::new(&v * c(p_max.sqrt() / v.norm(), 0.0), p_max).unwrap()
}

fn paper_noise() -> NoisePowers {
    let s = dbm_to_watts(-75.0);
    NoisePowers::new(s, s).unwrap()
}

fn paper_channels(n_irs: usize, seed: u64) -> irs_secrecy::channel::ChannelSet {
    let geom = ScenarioGeometry {
        n_irs,
        ..Default::default()
    };
    generate_channels(&geom, &PathLossParams::default(), &RicianParams::default(), seed).unwrap()
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut r = ChaCha8Rng::seed_from_u64(101);
    let noise = paper_noise();
    let p_max = dbm_to_watts(15.0);
    let mut worst: f64 = 0.0;
    for seed in 0..200 {
        let ch = paper_channels(16, seed);
        let theta = random_theta(&mut r, 16);
        let w = on_sphere(&mut r, 4, p_max);
        let det = rate_eve_det(&ch, &theta, &w, &noise).unwrap();
        let sum = rate_eve_sum(&ch, &theta, &w, &noise).unwrap();
        worst = worst.max((det - sum).abs());
    }
    let t = start.elapsed();
    Verdict {
        passed: worst <= 1e-9 && within(t, 5.0),
        detail: format!("max |det - sum| = {worst:.2e} over 200 instances, {:.2} s", t.as_secs_f64()),
    }
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let mut r = ChaCha8Rng::seed_from_u64(102);
    let noise = paper_noise();
    let p_max = dbm_to_watts(15.0);
    let (mut beaten, mut worst_residual): (usize, f64) = (0, 0.0);
    let (mut below_one, mut beaten_above_one) = (0, 0);
    for seed in 0..100 {
        let ch = paper_channels(32, 1000 + seed);
        let theta = random_theta(&mut r, 32);
        let xb = build_xb(&ch, &theta, &noise).unwrap();
        let xe = build_xe(&ch, &theta, &noise).unwrap();
        let sol = optimal_beamformer(&xb, &xe, p_max).unwrap();
        worst_residual = worst_residual.max(sol.residual());
        let best = beam_objective(&xb, &xe, &sol.beamformer.w);
        // with λ < 1 Eve out-gains Bob in every direction and w = 0 maximizes the ratio
        below_one += usize::from(sol.eigenvalue < 1.0);
        for _ in 0..10_000 {
            let v = random_feasible(&mut r, 4, p_max);
            if beam_objective(&xb, &xe, &v) > best * (1.0 + 1e-12) {
                beaten += 1;
                beaten_above_one += usize::from(sol.eigenvalue >= 1.0);
            }
        }
    }
    let t = start.elapsed();
    Verdict {
        passed: beaten == 0 && worst_residual <= 1e-8 && within(t, 30.0),
        detail: format!(
            "{beaten} of 1e6 random feasible beams beat w* ({beaten_above_one} on the {} instances with λ >= 1, \
             the rest on the {below_one} with λ < 1), max eigen residual {worst_residual:.2e}, {:.2} s",
            100 - below_one,
            t.as_secs_f64()
        ),
    }
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let mut r = ChaCha8Rng::seed_from_u64(103);
    let noise = paper_noise();
    let p_max = dbm_to_watts(15.0);
    let (mut tight, mut ident): (f64, f64) = (0.0, 0.0);
    for seed in 0..100 {
        let ch = paper_channels(32, 2000 + seed);
        let w = on_sphere(&mut r, 4, p_max);
        let alphas = build_alphas(&ch, &w).unwrap();
        for _ in 0..20 {
            let theta = random_theta(&mut r, 32);
            let aux = update_aux(&alphas, &theta, &noise);
            let f = objective_f(&alphas, &theta, &noise);
            tight = tight.max((f1_value(&alphas, &theta, &aux, &noise) - f).abs() / f);
            // identity for an arbitrary y, not only the tight one
            let y = FpAux {
                y1: aux.y1 * c(r.random_range(0.5..1.5), r.random_range(-0.5..0.5)),
                y2: aux.y2 * r.random_range(0.5..1.5),
            };
            let q = build_quadratic(&alphas, &y, &noise);
            let lhs = f1_value(&alphas, &theta, &y, &noise);
            let f3 = f3_value(&q, &theta);
            let scale = lhs.abs().max(f3.abs()).max(q.c.abs());
            ident = ident.max((lhs - (q.c - f3)).abs() / scale);
        }
    }
    let t = start.elapsed();
    Verdict {
        passed: tight <= 1e-10 && ident <= 1e-10 && within(t, 5.0),
        detail: format!(
            "max tightness gap {tight:.2e}, max surrogate-identity gap {ident:.2e} (relative), {:.2} s",
            t.as_secs_f64()
        ),
    }
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let mut r = ChaCha8Rng::seed_from_u64(104);
    let n = 16;
    let h = 1e-6;
    let (mut fd_err, mut tangency): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let a = CMatrix::from_fn(n, 4, |_, _| gaussian(&mut r));
        let u = &a * a.adjoint();
        let q = QuadraticForm::new(u, gaussian_vector(&mut r, n), 0.0).unwrap();
        let theta = random_theta(&mut r, n);
        let xi = project_tangent(&gaussian_vector(&mut r, n), &theta);
        tangency = tangency.max(riemannian_grad(&q, &theta).tangency_defect());
        let fwd = retract(&(theta.as_vector() + &xi.zeta * c(h, 0.0))).unwrap();
        let back = retract(&(theta.as_vector() - &xi.zeta * c(h, 0.0))).unwrap();
        let fd = (f3_value(&q, &fwd) - f3_value(&q, &back)) / (2.0 * h);
        let exact = real_inner(&xi.zeta, &euclidean_grad(&q, &theta));
        fd_err = fd_err.max((fd - exact).abs() / exact.abs());
    }
    let t = start.elapsed();
    Verdict {
        passed: fd_err <= 1e-5 && tangency <= 1e-10 && within(t, 5.0),
        detail: format!(
            "max finite-difference error {fd_err:.2e} (h = 1e-6), max tangency defect {tangency:.2e}, {:.2} s",
            t.as_secs_f64()
        ),
    }
}

fn criterion_5() -> Verdict {
    let start = Instant::now();
    let results = oracle_check(&OracleCheck::default(), &FpOptions::default()).unwrap();
    let good = results.iter().filter(|x| x.ratio() >= 0.98).count();
    let worst = results.iter().map(|x| x.ratio()).fold(f64::INFINITY, f64::min);
    let t = start.elapsed();
    Verdict {
        passed: good >= 95 && within(t, 120.0),
        detail: format!(
            "{good}/100 instances reach 0.98 of the 16-level grid best (worst ratio {worst:.3}), {:.2} s",
            t.as_secs_f64()
        ),
    }
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let noise = paper_noise();
    let p_max = dbm_to_watts(15.0);
    let (mut monotone, mut fast) = (0, 0);
    let mut iters = Vec::new();
    for seed in 0..100 {
        let ch = paper_channels(32, 3000 + seed);
        let res = maximize_secrecy(&ch, p_max, &noise, &AoOptions::default()).unwrap();
        if res.sr_trace.windows(2).all(|w| w[1] >= w[0] - 1e-9) {
            monotone += 1;
        }
        if res.converged && res.iterations <= 5 {
            fast += 1;
        }
        iters.push(res.iterations);
    }
    iters.sort_unstable();
    let t = start.elapsed();
    Verdict {
        passed: monotone == 100 && fast >= 90 && within(t, 300.0),
        detail: format!(
            "{monotone}/100 traces monotone, {fast}/100 converged within 5 AO iterations (median {}, max {}), {:.2} s",
            iters[50],
            iters[99],
            t.as_secs_f64()
        ),
    }
}

const CRITERION_7_CONFIG: &str = "\
d = 49
d_tilde = 44
schemes = proposed, heuristic, without_irs
realizations = 100
seed = 7
sweep = n_irs
sweep_values = 10, 20, 32
";

fn row<'a>(rows: &'a [ResultRow], value: f64, scheme: &str) -> &'a ResultRow {
    rows.iter()
        .find(|r| r.sweep_value == value && r.scheme == scheme)
        .expect("row present")
}

fn se(r: &ResultRow, n: usize) -> f64 {
    r.std_sr / (n as f64).sqrt()
}

/// Mean gap of `a` over `b` in units of the unpaired standard error of the difference.
fn gap_in_se(a: &ResultRow, b: &ResultRow, n: usize) -> f64 {
    (a.mean_sr - b.mean_sr) / (se(a, n).powi(2) + se(b, n).powi(2)).sqrt()
}

fn criterion_7(csv_out: &std::path::Path) -> Verdict {
    let start = Instant::now();
    let cfg = parse_config(CRITERION_7_CONFIG).unwrap();
    let out = run_experiment(&cfg).unwrap();
    write_csv(&out.rows, csv_out).unwrap();
    let n = cfg.realizations;
    let p = row(&out.rows, 32.0, "proposed");
    let h = row(&out.rows, 32.0, "heuristic");
    let w = row(&out.rows, 32.0, "without_irs");
    let (g1, g2) = (gap_in_se(p, h, n), gap_in_se(h, w, n));
    let trend: Vec<f64> = [10.0, 20.0, 32.0].iter().map(|&v| row(&out.rows, v, "proposed").mean_sr).collect();
    let increasing = trend.windows(2).all(|x| x[1] > x[0]);
    let t = start.elapsed();
    Verdict {
        passed: g1 > 2.0 && g2 > 2.0 && increasing && out.failures.is_empty() && within(t, 600.0),
        detail: format!(
            "N = 32: proposed {:.3} > heuristic {:.3} ({g1:.1} SE) > without-IRS {:.3} ({g2:.1} SE); \
             proposed over N = 10, 20, 32: {:.3}, {:.3}, {:.3}; {} failed runs, {:.2} s",
            p.mean_sr,
            h.mean_sr,
            w.mean_sr,
            trend[0],
            trend[1],
            trend[2],
            out.failures.len(),
            t.as_secs_f64()
        ),
    }
}

fn criterion_8() -> Verdict {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        rician: RicianParams {
            k_factor: PerLink {
                ti: 10.0,
                tb: 1.0,
                te: 1.0,
                ib: 5.0,
                ie: 5.0,
            },
        },
        ..parse_config(
            "d_tilde = 44\nschemes = proposed\nrealizations = 100\nseed = 8\nsweep = d\nsweep_values = 44, 48",
        )
        .unwrap()
    };
    let out = run_experiment(&cfg).unwrap();
    let near = row(&out.rows, 48.0, "proposed");
    let far = row(&out.rows, 44.0, "proposed");
    let gap = gap_in_se(near, far, cfg.realizations);
    let t = start.elapsed();
    Verdict {
        passed: gap > 2.0 && out.failures.is_empty() && within(t, 300.0),
        detail: format!(
            "mean SR at d = 48: {:.3}, at d = 44: {:.3} ({gap:.1} SE), {:.2} s",
            near.mean_sr,
            far.mean_sr,
            t.as_secs_f64()
        ),
    }
}

fn criterion_9(first_csv: &std::path::Path, dir: &std::path::Path) -> Verdict {
    let start = Instant::now();
    let mut single = parse_config(CRITERION_7_CONFIG).unwrap();
    single.threads = 1;
    let mut quad = single.clone();
    quad.threads = 4;
    let p1 = dir.join("one_thread.csv");
    let p4 = dir.join("four_threads.csv");
    write_csv(&run_experiment(&single).unwrap().rows, &p1).unwrap();
    write_csv(&run_experiment(&quad).unwrap().rows, &p4).unwrap();
    let base = std::fs::read(first_csv).unwrap();
    let a = std::fs::read(&p1).unwrap();
    let b = std::fs::read(&p4).unwrap();
    let t = start.elapsed();
    Verdict {
        passed: base == a && a == b && within(t, 600.0),
        detail: format!(
            "CSVs from the default pool, 1 thread and 4 threads are {} ({} bytes), {:.2} s",
            if base == a && a == b { "byte-identical" } else { "different" },
            a.len(),
            t.as_secs_f64()
        ),
    }
}

fn main() {
    // cargo passes harness flags such as --nocapture; a name filter that
    // matches nothing here skips the suite
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !filters.is_empty() && !filters.iter().any(|f| "acceptance".contains(f.as_str())) {
        return;
    }

    let dir = tempfile::tempdir().unwrap();
    let c7_csv = dir.path().join("criterion7.csv");
    let checks: Vec<(&str, Box<Check>)> = vec![
        ("determinant identity", Box::new(criterion_1)),
        ("beamformer optimality", Box::new(criterion_2)),
        ("FP tightness and surrogate identity", Box::new(criterion_3)),
        ("manifold gradient check", Box::new(criterion_4)),
        ("inner solver vs grid oracle", Box::new(criterion_5)),
        ("AO monotonicity and convergence", Box::new(criterion_6)),
        ("scheme ordering and N trend", Box::new(|| criterion_7(&c7_csv))),
        ("distance trend", Box::new(criterion_8)),
        ("determinism across thread counts", Box::new(|| criterion_9(&c7_csv, dir.path()))),
    ];

    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let v = check();
        failed += usize::from(!v.passed);
        println!(
            "criterion {} ({name}): {}: {}",
            i + 1,
            if v.passed { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!("{}/{} acceptance criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
