//! Seeded Rician-fading channel realizations for the BS / IRS / Bob / Eve layout.
//!
//! The base station sits at the origin, the IRS at `(d_bi, 0)`, Bob at
//! `(d, d_v)` and Eve at `(d_tilde, d_v)`. Every array (BS, IRS, Eve) is a
//! half-wavelength ULA laid along the x-axis, so the spatial frequency toward a
//! peer is `π · dx / distance` with `dx` the x-component of the direction.
//!
//! Each of the five blocks draws from its own ChaCha stream of the same seed,
//! so resizing one block never perturbs the others.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{c, is_finite_matrix, is_finite_vector, CMatrix, CVector};

/// Links shorter than this are rejected; the path-loss law is far-field.
pub const MIN_LINK_DISTANCE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioGeometry {
    /// BS to IRS distance (m).
    pub d_bi: f64,
    /// BS to Bob horizontal distance (m).
    pub d: f64,
    /// BS to Eve horizontal distance (m).
    pub d_tilde: f64,
    /// Vertical offset of the user line (m).
    pub d_v: f64,
    /// BS antennas `M`.
    pub m_bs: usize,
    /// Eve antennas `M′`.
    pub m_eve: usize,
    /// IRS reflectors `N`.
    pub n_irs: usize,
}

impl Default for ScenarioGeometry {
    fn default() -> Self {
        Self {
            d_bi: 50.0,
            d: 48.0,
            d_tilde: 42.0,
            d_v: 2.0,
            m_bs: 4,
            m_eve: 4,
            n_irs: 32,
        }
    }
}

type Point = (f64, f64);

/// Planar link distances derived from a [`ScenarioGeometry`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkDistances {
    pub ti: f64,
    pub tb: f64,
    pub te: f64,
    pub ib: f64,
    pub ie: f64,
}

impl ScenarioGeometry {
    pub fn bs(&self) -> Point {
        (0.0, 0.0)
    }

    pub fn irs(&self) -> Point {
        (self.d_bi, 0.0)
    }

    pub fn bob(&self) -> Point {
        (self.d, self.d_v)
    }

    pub fn eve(&self) -> Point {
        (self.d_tilde, self.d_v)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("d_bi", self.d_bi),
            ("d", self.d),
            ("d_tilde", self.d_tilde),
            ("d_v", self.d_v),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        for (name, n) in [("m_bs", self.m_bs), ("m_eve", self.m_eve), ("n_irs", self.n_irs)] {
            if n == 0 {
                return Err(Error::invalid(name, "must be at least 1"));
            }
        }
        let dist = self.link_distances();
        for (link, v) in [
            ("BS-IRS", dist.ti),
            ("BS-Bob", dist.tb),
            ("BS-Eve", dist.te),
            ("IRS-Bob", dist.ib),
            ("IRS-Eve", dist.ie),
        ] {
            if v < MIN_LINK_DISTANCE {
                return Err(Error::DegenerateGeometry {
                    link,
                    distance: v,
                    min: MIN_LINK_DISTANCE,
                });
            }
        }
        Ok(())
    }

    pub fn link_distances(&self) -> LinkDistances {
        LinkDistances {
            ti: distance(self.bs(), self.irs()),
            tb: distance(self.bs(), self.bob()),
            te: distance(self.bs(), self.eve()),
            ib: distance(self.irs(), self.bob()),
            ie: distance(self.irs(), self.eve()),
        }
    }
}

fn distance(a: Point, b: Point) -> f64 {
    (b.0 - a.0).hypot(b.1 - a.1)
}

/// Spatial frequency of an x-axis ULA at `from` looking toward `to`.
fn spatial_freq(from: Point, to: Point) -> f64 {
    let dist = distance(from, to);
    PI * (to.0 - from.0) / dist
}

/// Per-link values for the five channel blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerLink {
    pub ti: f64,
    pub tb: f64,
    pub te: f64,
    pub ib: f64,
    pub ie: f64,
}

impl PerLink {
    pub fn uniform(v: f64) -> Self {
        Self {
            ti: v,
            tb: v,
            te: v,
            ib: v,
            ie: v,
        }
    }

    fn named(&self) -> [(&'static str, f64); 5] {
        [
            ("ti", self.ti),
            ("tb", self.tb),
            ("te", self.te),
            ("ib", self.ib),
            ("ie", self.ie),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossParams {
    /// Reference gain at 1 m (dB).
    pub l0_db: f64,
    /// Path-loss exponents ζ per link.
    pub exponent: PerLink,
}

impl Default for PathLossParams {
    fn default() -> Self {
        Self {
            l0_db: -30.0,
            exponent: PerLink {
                ti: 2.2,
                tb: 3.5,
                te: 3.5,
                ib: 2.5,
                ie: 2.5,
            },
        }
    }
}

impl PathLossParams {
    pub fn validate(&self) -> Result<()> {
        if !self.l0_db.is_finite() {
            return Err(Error::invalid("l0_db", "must be finite"));
        }
        for (_, z) in self.exponent.named() {
            if !(1.5..=6.0).contains(&z) {
                return Err(Error::invalid(
                    "exponent",
                    format!("path-loss exponent {z} outside [1.5, 6]"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianParams {
    pub k_factor: PerLink,
}

impl Default for RicianParams {
    /// Convergence-study factors: no LoS on the direct links, K = 10 elsewhere.
    fn default() -> Self {
        Self {
            k_factor: PerLink {
                ti: 10.0,
                tb: 0.0,
                te: 0.0,
                ib: 10.0,
                ie: 10.0,
            },
        }
    }
}

impl RicianParams {
    pub fn validate(&self) -> Result<()> {
        for (_, k) in self.k_factor.named() {
            if !(k.is_finite() && k >= 0.0) {
                return Err(Error::invalid("k_factor", format!("must be finite and >= 0, got {k}")));
            }
        }
        Ok(())
    }
}

/// The five baseband blocks of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// BS → IRS, `N × M`.
    pub h_ti: CMatrix,
    /// BS → Bob, length `M`.
    pub h_tb: CVector,
    /// BS → Eve, `M × M′`, column `i` is Eve antenna `i`.
    pub h_te: CMatrix,
    /// IRS → Bob, length `N`.
    pub h_ib: CVector,
    /// IRS → Eve, `N × M′`.
    pub h_ie: CMatrix,
}

impl ChannelSet {
    /// Builds a channel set after checking block shapes agree and entries are finite.
    pub fn new(
        h_ti: CMatrix,
        h_tb: CVector,
        h_te: CMatrix,
        h_ib: CVector,
        h_ie: CMatrix,
    ) -> Result<Self> {
        let set = Self {
            h_ti,
            h_tb,
            h_te,
            h_ib,
            h_ie,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        let (n, m) = self.h_ti.shape();
        let m_eve = self.h_te.ncols();
        let checks = [
            ("h_tb length", m, self.h_tb.len()),
            ("h_te rows", m, self.h_te.nrows()),
            ("h_ib length", n, self.h_ib.len()),
            ("h_ie rows", n, self.h_ie.nrows()),
            ("h_ie cols", m_eve, self.h_ie.ncols()),
        ];
        for (context, expected, actual) in checks {
            if expected != actual {
                return Err(Error::DimensionMismatch {
                    context,
                    expected,
                    actual,
                });
            }
        }
        if !(is_finite_matrix(&self.h_ti)
            && is_finite_vector(&self.h_tb)
            && is_finite_matrix(&self.h_te)
            && is_finite_vector(&self.h_ib)
            && is_finite_matrix(&self.h_ie))
        {
            return Err(Error::NonFinite("channel set"));
        }
        Ok(())
    }

    pub fn n_irs(&self) -> usize {
        self.h_ti.nrows()
    }

    pub fn m_bs(&self) -> usize {
        self.h_ti.ncols()
    }

    pub fn m_eve(&self) -> usize {
        self.h_te.ncols()
    }

    /// Same set with both reflected links zeroed, i.e. the IRS removed.
    pub fn without_reflection(&self) -> Self {
        Self {
            h_ti: self.h_ti.clone(),
            h_tb: self.h_tb.clone(),
            h_te: self.h_te.clone(),
            h_ib: CVector::zeros(self.n_irs()),
            h_ie: CMatrix::zeros(self.n_irs(), self.m_eve()),
        }
    }
}

pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

/// dBm to watts.
pub fn dbm_to_watts(x_dbm: f64) -> f64 {
    db_to_linear(x_dbm - 30.0)
}

/// Large-scale power gain `L0 · d^(−ζ)`. Its square root scales the small-scale fading.
pub fn path_gain(l0_db: f64, distance: f64, exponent: f64) -> Result<f64> {
    if !(distance > 0.0 && distance.is_finite()) {
        return Err(Error::invalid("distance", format!("must be > 0, got {distance}")));
    }
    Ok(db_to_linear(l0_db) * distance.powf(-exponent))
}

/// ULA response `[1, e^{jω}, …, e^{j(n−1)ω}]`.
pub fn ula_steering(n_elements: usize, spatial_freq: f64) -> CVector {
    CVector::from_iterator(
        n_elements,
        (0..n_elements).map(|k| {
            let (s, co) = (k as f64 * spatial_freq).sin_cos();
            c(co, s)
        }),
    )
}

/// Standard circularly-symmetric complex Gaussian sample, `E|z|² = 1`.
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> nalgebra::Complex<f64> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `√gain · (√(K/(K+1)) · a_rx a_txᴴ + √(1/(K+1)) · G)`, G i.i.d. CN(0, 1).
///
/// The NLoS samples are drawn column-major so the draw order is fixed.
pub fn rician_matrix<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    k: f64,
    gain: f64,
    los_rx: &CVector,
    los_tx: &CVector,
    rng: &mut R,
) -> Result<CMatrix> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::invalid("k", format!("Rician factor must be >= 0, got {k}")));
    }
    if !(gain.is_finite() && gain >= 0.0) {
        return Err(Error::invalid("gain", format!("must be >= 0, got {gain}")));
    }
    if los_rx.len() != rows {
        return Err(Error::DimensionMismatch {
            context: "rician_matrix los_rx",
            expected: rows,
            actual: los_rx.len(),
        });
    }
    if los_tx.len() != cols {
        return Err(Error::DimensionMismatch {
            context: "rician_matrix los_tx",
            expected: cols,
            actual: los_tx.len(),
        });
    }
    let los_w = (k / (k + 1.0)).sqrt();
    let nlos_w = (1.0 / (k + 1.0)).sqrt();
    let amp = gain.sqrt();
    let nlos = CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng));
    let los = los_rx * los_tx.adjoint();
    Ok((los * c(los_w, 0.0) + nlos * c(nlos_w, 0.0)) * c(amp, 0.0))
}

/// Stream indices of the per-block generators.
const STREAM_TI: u64 = 0;
const STREAM_TB: u64 = 1;
const STREAM_TE: u64 = 2;
const STREAM_IB: u64 = 3;
const STREAM_IE: u64 = 4;

fn block_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Unit-gain i.i.d. Rayleigh blocks with no geometry, for unit-noise stress tests.
pub fn rayleigh_channels(m_bs: usize, m_eve: usize, n_irs: usize, seed: u64) -> Result<ChannelSet> {
    let block = |rows: usize, cols: usize, stream: u64| {
        rician_matrix(
            rows,
            cols,
            0.0,
            1.0,
            &CVector::zeros(rows),
            &CVector::zeros(cols),
            &mut block_rng(seed, stream),
        )
    };
    ChannelSet::new(
        block(n_irs, m_bs, STREAM_TI)?,
        block(m_bs, 1, STREAM_TB)?.column(0).into_owned(),
        block(m_bs, m_eve, STREAM_TE)?,
        block(n_irs, 1, STREAM_IB)?.column(0).into_owned(),
        block(n_irs, m_eve, STREAM_IE)?,
    )
}

/// Generates one realization deterministically from `seed`.
pub fn generate_channels(
    geom: &ScenarioGeometry,
    pl: &PathLossParams,
    ric: &RicianParams,
    seed: u64,
) -> Result<ChannelSet> {
    geom.validate()?;
    pl.validate()?;
    ric.validate()?;

    let dist = geom.link_distances();
    let (bs, irs, bob, eve) = (geom.bs(), geom.irs(), geom.bob(), geom.eve());
    let (m, m_eve, n) = (geom.m_bs, geom.m_eve, geom.n_irs);
    let one = CVector::from_element(1, c(1.0, 0.0));
    let k = &ric.k_factor;
    let z = &pl.exponent;

    let h_ti = rician_matrix(
        n,
        m,
        k.ti,
        path_gain(pl.l0_db, dist.ti, z.ti)?,
        &ula_steering(n, spatial_freq(irs, bs)),
        &ula_steering(m, spatial_freq(bs, irs)),
        &mut block_rng(seed, STREAM_TI),
    )?;
    let h_tb = rician_matrix(
        m,
        1,
        k.tb,
        path_gain(pl.l0_db, dist.tb, z.tb)?,
        &ula_steering(m, spatial_freq(bs, bob)),
        &one,
        &mut block_rng(seed, STREAM_TB),
    )?
    .column(0)
    .into_owned();
    let h_te = rician_matrix(
        m,
        m_eve,
        k.te,
        path_gain(pl.l0_db, dist.te, z.te)?,
        &ula_steering(m, spatial_freq(bs, eve)),
        &ula_steering(m_eve, spatial_freq(eve, bs)),
        &mut block_rng(seed, STREAM_TE),
    )?;
    let h_ib = rician_matrix(
        n,
        1,
        k.ib,
        path_gain(pl.l0_db, dist.ib, z.ib)?,
        &ula_steering(n, spatial_freq(irs, bob)),
        &one,
        &mut block_rng(seed, STREAM_IB),
    )?
    .column(0)
    .into_owned();
    let h_ie = rician_matrix(
        n,
        m_eve,
        k.ie,
        path_gain(pl.l0_db, dist.ie, z.ie)?,
        &ula_steering(n, spatial_freq(irs, eve)),
        &ula_steering(m_eve, spatial_freq(eve, irs)),
        &mut block_rng(seed, STREAM_IE),
    )?;

    ChannelSet::new(h_ti, h_tb, h_te, h_ib, h_ie)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn frob_sq(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm_sqr()).sum()
    }

    #[test]
    fn db_conversions() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert_abs_diff_eq!(db_to_linear(-30.0), 1.0e-3, epsilon = 1e-18);
        assert_abs_diff_eq!(dbm_to_watts(15.0), 0.031_622_776_6, epsilon = 1e-11);
    }

    #[test]
    fn path_gain_examples() {
        assert_abs_diff_eq!(path_gain(-30.0, 1.0, 3.5).unwrap(), 1.0e-3, epsilon = 1e-18);
        let expected = 1.0e-3 * (-(50f64.ln()) * 2.2).exp();
        assert_abs_diff_eq!(path_gain(-30.0, 50.0, 2.2).unwrap(), expected, epsilon = 1e-20);
        assert!((path_gain(-30.0, 50.0, 2.2).unwrap() - 1.8292e-7).abs() < 1e-11);
        assert_abs_diff_eq!(path_gain(0.0, 2.0, 2.0).unwrap(), 0.25, epsilon = 1e-15);
        assert!(path_gain(0.0, 0.0, 2.0).is_err());
        assert!(path_gain(0.0, -1.0, 2.0).is_err());
    }

    #[test]
    fn steering_examples() {
        let a = ula_steering(4, 0.0);
        assert!(a.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-15));
        let b = ula_steering(2, PI);
        assert!((b[1] - c(-1.0, 0.0)).norm() < 1e-15);
        let s = ula_steering(3, PI / 2.0);
        assert!((s[1] - c(0.0, 1.0)).norm() < 1e-15);
        assert!((s[2] - c(-1.0, 0.0)).norm() < 1e-15);
        for z in ula_steering(64, 1.234).iter() {
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rician_k_zero_has_no_los() {
        let rx = ula_steering(3, 0.4);
        let tx = ula_steering(2, -0.9);
        let a = rician_matrix(3, 2, 0.0, 4.0, &rx, &tx, &mut block_rng(9, 0)).unwrap();
        let mut rng = block_rng(9, 0);
        let g = CMatrix::from_fn(3, 2, |_, _| complex_gaussian(&mut rng));
        assert!((a - g * c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rician_large_k_is_los_dyad() {
        let rx = ula_steering(4, 0.7);
        let tx = ula_steering(3, 2.1);
        let gain = 2.5e-6;
        let a = rician_matrix(4, 3, 1e12, gain, &rx, &tx, &mut block_rng(3, 0)).unwrap();
        let los = (&rx * tx.adjoint()) * c(gain.sqrt(), 0.0);
        let rel = (&a - &los).norm() / los.norm();
        assert!(rel <= 1e-5, "relative error {rel}");
    }

    #[test]
    fn rician_rejects_negative_k() {
        let v = ula_steering(2, 0.0);
        assert!(rician_matrix(2, 2, -0.1, 1.0, &v, &v, &mut block_rng(0, 0)).is_err());
    }

    #[test]
    fn rician_mean_energy_matches_dimensions() {
        let rx = ula_steering(2, 0.3);
        let tx = ula_steering(2, 1.1);
        let mut rng = block_rng(2024, 0);
        let draws = 10_000;
        let mean: f64 = (0..draws)
            .map(|_| frob_sq(&rician_matrix(2, 2, 10.0, 1.0, &rx, &tx, &mut rng).unwrap()))
            .sum::<f64>()
            / draws as f64;
        assert!((mean - 4.0).abs() / 4.0 < 0.03, "mean energy {mean}");
    }

    #[test]
    fn generated_shapes() {
        let geom = ScenarioGeometry {
            m_bs: 4,
            m_eve: 4,
            n_irs: 32,
            ..Default::default()
        };
        let ch = generate_channels(&geom, &Default::default(), &Default::default(), 1).unwrap();
        assert_eq!(ch.h_ti.shape(), (32, 4));
        assert_eq!(ch.h_tb.len(), 4);
        assert_eq!(ch.h_te.shape(), (4, 4));
        assert_eq!(ch.h_ib.len(), 32);
        assert_eq!(ch.h_ie.shape(), (32, 4));
    }

    #[test]
    fn generation_is_deterministic() {
        let geom = ScenarioGeometry::default();
        let ric = RicianParams {
            k_factor: PerLink::uniform(0.0),
        };
        let a = generate_channels(&geom, &Default::default(), &ric, 77).unwrap();
        let b = generate_channels(&geom, &Default::default(), &ric, 77).unwrap();
        assert_eq!(a, b);
        let other = generate_channels(&geom, &Default::default(), &ric, 78).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn co_located_bob_and_irs_rejected() {
        let geom = ScenarioGeometry {
            d: 50.0,
            d_v: 1e-9,
            ..Default::default()
        };
        match generate_channels(&geom, &Default::default(), &Default::default(), 0) {
            Err(Error::DegenerateGeometry { link, .. }) => assert_eq!(link, "IRS-Bob"),
            other => panic!("expected degenerate geometry, got {other:?}"),
        }
        // a literal zero offset is caught by the positivity check
        let zero = ScenarioGeometry {
            d: 50.0,
            d_v: 0.0,
            ..Default::default()
        };
        assert!(generate_channels(&zero, &Default::default(), &Default::default(), 0).is_err());
    }

    #[test]
    fn extra_eve_antennas_leave_bob_untouched() {
        let geom = ScenarioGeometry::default();
        let bigger = ScenarioGeometry { m_eve: 6, ..geom };
        let a = generate_channels(&geom, &Default::default(), &Default::default(), 5).unwrap();
        let b = generate_channels(&bigger, &Default::default(), &Default::default(), 5).unwrap();
        assert_eq!(a.h_ti, b.h_ti);
        assert_eq!(a.h_tb, b.h_tb);
        assert_eq!(a.h_ib, b.h_ib);
    }

    #[test]
    fn l0_offset_scales_magnitudes_by_sqrt10() {
        let geom = ScenarioGeometry::default();
        let base = PathLossParams::default();
        let louder = PathLossParams {
            l0_db: base.l0_db + 10.0,
            ..base
        };
        let ric = RicianParams::default();
        let (mut s0, mut s1) = (0.0, 0.0);
        for seed in 0..200 {
            let a = generate_channels(&geom, &base, &ric, seed).unwrap();
            let b = generate_channels(&geom, &louder, &ric, seed + 10_000).unwrap();
            s0 += a.h_ti.norm() + a.h_te.norm() + a.h_ie.norm();
            s1 += b.h_ti.norm() + b.h_te.norm() + b.h_ie.norm();
        }
        let ratio = s1 / s0;
        assert!((ratio - 10f64.sqrt()).abs() / 10f64.sqrt() < 0.03, "ratio {ratio}");
    }

    #[test]
    fn parameter_validation() {
        let mut pl = PathLossParams::default();
        pl.exponent.te = 7.0;
        assert!(pl.validate().is_err());
        let mut ric = RicianParams::default();
        ric.k_factor.ib = -1.0;
        assert!(ric.validate().is_err());
        let geom = ScenarioGeometry {
            n_irs: 0,
            ..Default::default()
        };
        assert!(geom.validate().is_err());
    }
}
