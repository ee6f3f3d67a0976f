//! Flat `key = value` experiment configuration.
//!
//! One pair per line, `#` starts a comment. Several pairs may share a line
//! when separated by commas (`sweep = d, from = 10, to = 50, step = 2`); a
//! comma-separated piece without `=` continues the previous value as a list
//! (`schemes = proposed, heuristic`).

use std::collections::HashMap;
use std::path::PathBuf;

use crate::ao::{AoOptions, InitMode};
use crate::channel::{PathLossParams, RicianParams, ScenarioGeometry};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    Proposed,
    Heuristic,
    WithoutIrs,
    RandomPhases,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Proposed,
        Scheme::Heuristic,
        Scheme::WithoutIrs,
        Scheme::RandomPhases,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::Heuristic => "heuristic",
            Scheme::WithoutIrs => "without_irs",
            Scheme::RandomPhases => "random_phases",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Scheme::ALL.into_iter().find(|sch| sch.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    None,
    /// Horizontal BS-Bob distance `d`.
    D,
    NIrs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: SweepAxis,
    /// Strictly increasing. A single 0 when the axis is `None`.
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn none() -> Self {
        Sweep {
            axis: SweepAxis::None,
            values: vec![0.0],
        }
    }

    /// Geometry for sweep point `idx`.
    pub fn apply(&self, base: &ScenarioGeometry, idx: usize) -> ScenarioGeometry {
        let mut g = *base;
        match self.axis {
            SweepAxis::None => {}
            SweepAxis::D => g.d = self.values[idx],
            SweepAxis::NIrs => g.n_irs = self.values[idx] as usize,
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub geometry: ScenarioGeometry,
    pub path_loss: PathLossParams,
    pub rician: RicianParams,
    pub p_max_dbm: f64,
    pub sigma2_b_dbm: f64,
    pub sigma2_e_dbm: f64,
    pub schemes: Vec<Scheme>,
    pub random_trials: usize,
    pub seed: u64,
    pub realizations: usize,
    pub sweep: Sweep,
    pub out: Option<PathBuf>,
    pub ao: AoOptions,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    /// Record wall time per run. Off keeps the CSV reproducible byte for byte.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            geometry: ScenarioGeometry::default(),
            path_loss: PathLossParams::default(),
            rician: RicianParams::default(),
            p_max_dbm: 15.0,
            sigma2_b_dbm: -75.0,
            sigma2_e_dbm: -75.0,
            schemes: vec![Scheme::Proposed, Scheme::Heuristic, Scheme::WithoutIrs],
            random_trials: 16,
            seed: 1,
            realizations: 100,
            sweep: Sweep::none(),
            out: None,
            ao: AoOptions::default(),
            threads: 0,
            timing: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::invalid("realizations", "must be at least 1"));
        }
        if self.schemes.is_empty() {
            return Err(Error::invalid("schemes", "need at least one scheme"));
        }
        if self.random_trials == 0 {
            return Err(Error::invalid("random_trials", "must be at least 1"));
        }
        for (name, v) in [
            ("p_max_dbm", self.p_max_dbm),
            ("sigma2_b_dbm", self.sigma2_b_dbm),
            ("sigma2_e_dbm", self.sigma2_e_dbm),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        if self.sweep.values.is_empty() || self.sweep.values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("sweep", "values must be nonempty and strictly increasing"));
        }
        self.path_loss.validate()?;
        self.rician.validate()?;
        self.ao.validate()?;
        for idx in 0..self.sweep.values.len() {
            self.sweep.apply(&self.geometry, idx).validate()?;
        }
        Ok(())
    }
}

struct Pair {
    line: usize,
    key: String,
    value: String,
}

fn split_pairs(text: &str) -> Result<Vec<Pair>> {
    let mut pairs: Vec<Pair> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut opened_here = false;
        for piece in content.split(',') {
            if let Some((k, v)) = piece.split_once('=') {
                let key = k.trim();
                if key.is_empty() {
                    return Err(Error::Config {
                        line,
                        key: String::new(),
                        message: "missing key before `=`".into(),
                    });
                }
                pairs.push(Pair {
                    line,
                    key: key.to_string(),
                    value: v.trim().to_string(),
                });
                opened_here = true;
            } else {
                match pairs.last_mut() {
                    Some(last) if opened_here => {
                        last.value.push(',');
                        last.value.push_str(piece.trim());
                    }
                    _ => {
                        return Err(Error::Config {
                            line,
                            key: piece.trim().to_string(),
                            message: "expected `key = value`".into(),
                        })
                    }
                }
            }
        }
    }
    Ok(pairs)
}

fn err(p: &Pair, message: impl Into<String>) -> Error {
    Error::Config {
        line: p.line,
        key: p.key.clone(),
        message: message.into(),
    }
}

fn num(p: &Pair) -> Result<f64> {
    let v: f64 = p
        .value
        .parse()
        .map_err(|_| err(p, format!("expected a number, got `{}`", p.value)))?;
    if !v.is_finite() {
        return Err(err(p, "must be finite"));
    }
    Ok(v)
}

fn count(p: &Pair) -> Result<usize> {
    p.value
        .parse()
        .map_err(|_| err(p, format!("expected a nonnegative integer, got `{}`", p.value)))
}

fn positive_count(p: &Pair) -> Result<usize> {
    match count(p)? {
        0 => Err(err(p, "must be at least 1")),
        n => Ok(n),
    }
}

fn flag(p: &Pair) -> Result<bool> {
    match p.value.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(err(p, format!("expected true or false, got `{other}`"))),
    }
}

fn positive(p: &Pair) -> Result<f64> {
    let v = num(p)?;
    if v <= 0.0 {
        return Err(err(p, "must be > 0"));
    }
    Ok(v)
}

fn unit_interval(p: &Pair) -> Result<f64> {
    let v = num(p)?;
    if !(v > 0.0 && v < 1.0) {
        return Err(err(p, "must lie in (0, 1)"));
    }
    Ok(v)
}

fn nonnegative(p: &Pair) -> Result<f64> {
    let v = num(p)?;
    if v < 0.0 {
        return Err(err(p, "must be >= 0"));
    }
    Ok(v)
}

fn sweep_points(from: f64, to: f64, step: f64) -> Vec<f64> {
    let steps = ((to - from) / step + 1e-9).floor() as usize;
    (0..=steps).map(|k| from + k as f64 * step).collect()
}

/// Parses a config document. Omitted keys keep their defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut axis: Option<(SweepAxis, usize)> = None;
    let mut range = [None::<(f64, usize)>; 3];
    let mut values: Option<(Vec<f64>, usize)> = None;

    for p in split_pairs(text)? {
        if seen.insert(p.key.clone(), p.line).is_some() {
            return Err(err(&p, "duplicate key"));
        }
        let g = &mut cfg.geometry;
        let pl = &mut cfg.path_loss.exponent;
        let k = &mut cfg.rician.k_factor;
        let cg = &mut cfg.ao.fp.cg;
        match p.key.as_str() {
            "d_bi" => g.d_bi = num(&p)?,
            "d" => g.d = num(&p)?,
            "d_tilde" => g.d_tilde = num(&p)?,
            "d_v" => g.d_v = num(&p)?,
            "m_bs" => g.m_bs = positive_count(&p)?,
            "m_eve" => g.m_eve = positive_count(&p)?,
            "n_irs" => g.n_irs = positive_count(&p)?,
            "l0_db" => cfg.path_loss.l0_db = num(&p)?,
            "zeta_ti" => pl.ti = num(&p)?,
            "zeta_tb" => pl.tb = num(&p)?,
            "zeta_te" => pl.te = num(&p)?,
            "zeta_ib" => pl.ib = num(&p)?,
            "zeta_ie" => pl.ie = num(&p)?,
            "k_ti" => k.ti = nonnegative(&p)?,
            "k_tb" => k.tb = nonnegative(&p)?,
            "k_te" => k.te = nonnegative(&p)?,
            "k_ib" => k.ib = nonnegative(&p)?,
            "k_ie" => k.ie = nonnegative(&p)?,
            "p_max_dbm" => cfg.p_max_dbm = num(&p)?,
            "sigma2_dbm" => {
                cfg.sigma2_b_dbm = num(&p)?;
                cfg.sigma2_e_dbm = cfg.sigma2_b_dbm;
            }
            "sigma2_b_dbm" => cfg.sigma2_b_dbm = num(&p)?,
            "sigma2_e_dbm" => cfg.sigma2_e_dbm = num(&p)?,
            "schemes" => {
                let mut list = Vec::new();
                for name in p.value.split(',').map(str::trim) {
                    let s = Scheme::parse(name).ok_or_else(|| err(&p, format!("unknown scheme `{name}`")))?;
                    if list.contains(&s) {
                        return Err(err(&p, format!("scheme `{name}` listed twice")));
                    }
                    list.push(s);
                }
                cfg.schemes = list;
            }
            "random_trials" => cfg.random_trials = positive_count(&p)?,
            "seed" => {
                cfg.seed = p
                    .value
                    .parse()
                    .map_err(|_| err(&p, format!("expected an unsigned integer, got `{}`", p.value)))?
            }
            "realizations" => cfg.realizations = positive_count(&p)?,
            "sweep" => {
                let a = match p.value.as_str() {
                    "none" => SweepAxis::None,
                    "d" => SweepAxis::D,
                    "n_irs" => SweepAxis::NIrs,
                    other => return Err(err(&p, format!("unknown sweep axis `{other}`"))),
                };
                axis = Some((a, p.line));
            }
            "from" => range[0] = Some((num(&p)?, p.line)),
            "to" => range[1] = Some((num(&p)?, p.line)),
            "step" => range[2] = Some((positive(&p)?, p.line)),
            "sweep_values" => {
                let mut list = Vec::new();
                for v in p.value.split(',').map(str::trim) {
                    let x: f64 = v
                        .parse()
                        .ok()
                        .filter(|x: &f64| x.is_finite())
                        .ok_or_else(|| err(&p, format!("expected a number, got `{v}`")))?;
                    list.push(x);
                }
                values = Some((list, p.line));
            }
            "out" => cfg.out = Some(PathBuf::from(&p.value)),
            "tau" => cg.tau = positive(&p)?,
            "varpi" => cg.varpi = unit_interval(&p)?,
            "alpha" => cg.alpha_bt = unit_interval(&p)?,
            "eps_grad" => cg.eps_grad = positive(&p)?,
            "scale_eps_by_n" => cg.scale_eps_by_n = flag(&p)?,
            "cg_max_iters" => cg.max_iters = positive_count(&p)?,
            "max_backtracks" => cg.max_backtracks = positive_count(&p)?,
            "eps_outer" => cfg.ao.fp.eps_outer = positive(&p)?,
            "max_outer" => cfg.ao.fp.max_outer = positive_count(&p)?,
            "eps" | "eps_sr" => cfg.ao.eps_sr = positive(&p)?,
            "max_ao" => cfg.ao.max_ao = positive_count(&p)?,
            "init" => {
                cfg.ao.init = InitMode::parse(&p.value)
                    .ok_or_else(|| err(&p, format!("unknown init mode `{}`", p.value)))?
            }
            "threads" => cfg.threads = count(&p)?,
            "timing" => cfg.timing = flag(&p)?,
            _ => return Err(err(&p, "unknown key")),
        }
    }

    cfg.sweep = build_sweep(axis, range, values)?;
    cfg.validate().map_err(|e| match e {
        Error::InvalidParameter { name, reason } => Error::Config {
            line: seen.get(name).copied().unwrap_or(0),
            key: name.to_string(),
            message: reason,
        },
        other => other,
    })?;
    Ok(cfg)
}

fn build_sweep(
    axis: Option<(SweepAxis, usize)>,
    range: [Option<(f64, usize)>; 3],
    values: Option<(Vec<f64>, usize)>,
) -> Result<Sweep> {
    let sweep_err = |line: usize, key: &str, message: &str| Error::Config {
        line,
        key: key.to_string(),
        message: message.to_string(),
    };
    let (axis, axis_line) = match axis {
        None | Some((SweepAxis::None, _)) => {
            if let Some((_, line)) = range.iter().flatten().next() {
                return Err(sweep_err(*line, "sweep", "range given without a sweep axis"));
            }
            if let Some((_, line)) = values {
                return Err(sweep_err(line, "sweep_values", "values given without a sweep axis"));
            }
            return Ok(Sweep::none());
        }
        Some(a) => a,
    };

    let points = match (values, range) {
        (Some(_), [Some((_, line)), ..] | [_, Some((_, line)), _] | [.., Some((_, line))]) => {
            return Err(sweep_err(line, "sweep_values", "give either a range or a value list, not both"));
        }
        (Some((list, line)), _) => {
            if list.is_empty() || list.windows(2).any(|w| w[1] <= w[0]) {
                return Err(sweep_err(line, "sweep_values", "must be nonempty and strictly increasing"));
            }
            (list, line)
        }
        (None, [Some((from, _)), Some((to, line)), step]) => {
            let step = step.map(|s| s.0).unwrap_or(1.0);
            if to < from {
                return Err(sweep_err(line, "to", "must not be below `from`"));
            }
            (sweep_points(from, to, step), line)
        }
        (None, _) => {
            return Err(sweep_err(axis_line, "sweep", "needs `from` and `to`, or `sweep_values`"));
        }
    };

    let (values, line) = points;
    if axis == SweepAxis::NIrs {
        for v in &values {
            if v.fract() != 0.0 || *v < 1.0 {
                return Err(sweep_err(line, "n_irs", "sweep values must be integers >= 1"));
            }
        }
    }
    Ok(Sweep { axis, values })
}
