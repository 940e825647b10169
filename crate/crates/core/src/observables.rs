//! Survival, first-passage density, and the stationary scattering picture.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagator::{cone_sites, SeriesConfig, TimePoint, TimeSlice};
use crate::resolvent::WalkParams;

/// Gauss–Legendre order used on each panel of the absorption integral.
const PANEL_ORDER: usize = 16;

/// One momentum component of the stationary scattering problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringMode {
    pub k: f64,
    /// `Ω (1 - cos k)`
    pub energy: f64,
    pub reflection: Complex64,
    pub absorbed_fraction: f64,
    /// `sin²(s0 k) / π`
    pub incoming_weight: f64,
}

impl ScatteringMode {
    pub fn new(k: f64, s0: usize, params: &WalkParams) -> Result<Self> {
        let reflection = reflection_amplitude(k, params.eta())?;
        let absorbed_fraction = absorption_fraction(k, params.eta())?;
        Ok(ScatteringMode {
            k,
            energy: params.omega() * (1.0 - k.cos()),
            reflection,
            absorbed_fraction,
            incoming_weight: (s0 as f64 * k).sin().powi(2) / PI,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub base_nodes: usize,
    pub max_refinements: usize,
    pub abs_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            base_nodes: 64,
            max_refinements: 20,
            abs_tol: 1e-12,
        }
    }
}

impl QuadratureConfig {
    fn validate(&self) -> Result<()> {
        if self.base_nodes < 2 {
            return Err(Error::invalid(format!("base_nodes must be >= 2, got {}", self.base_nodes)));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::invalid(format!("abs_tol must be > 0, got {}", self.abs_tol)));
        }
        Ok(())
    }
}

fn check_s0(s0: usize) -> Result<u32> {
    if s0 == 0 {
        return Err(Error::invalid("sites start at 1"));
    }
    u32::try_from(s0).map_err(|_| Error::invalid(format!("site {s0} out of range")))
}

/// Survival `S` and first-passage density `F` at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalSample {
    pub t: f64,
    pub survival: f64,
    pub first_passage: f64,
}

fn sample(s0: u32, tp: TimePoint, params: &WalkParams, cfg: &SeriesConfig) -> Result<SurvivalSample> {
    let s_max = cone_sites(s0 as usize, tp.x());
    let slice = TimeSlice::new(params, cfg, tp, s_max + s0 as usize)?;
    let column = slice.column(s0, s_max as u32)?;
    let survival: f64 = column.iter().map(|a| a.norm_sqr()).sum();
    if !(survival <= 1.0 + 1e-10) {
        return Err(Error::InternalConsistency(format!(
            "survival {survival} exceeds 1 at t = {}",
            tp.t()
        )));
    }
    Ok(SurvivalSample {
        t: tp.t(),
        survival,
        first_passage: params.kappa() * column[0].norm_sqr(),
    })
}

/// `S(t|s0) = Σ_s |K(s, s0; t)|²`, summed over `s <= s0 + ceil(x) + 20`.
pub fn survival(s0: usize, tp: TimePoint, params: &WalkParams, cfg: &SeriesConfig) -> Result<f64> {
    Ok(sample(check_s0(s0)?, tp, params, cfg)?.survival)
}

/// `F(t|s0) = κ |K(1, s0; t)|²`
pub fn first_passage_density(
    s0: usize,
    tp: TimePoint,
    params: &WalkParams,
    cfg: &SeriesConfig,
) -> Result<f64> {
    let s0 = check_s0(s0)?;
    let slice = TimeSlice::new(params, cfg, tp, s0 as usize + 2)?;
    Ok(params.kappa() * slice.amplitude(1, s0)?.norm_sqr())
}

/// `S` and `F` together on a time grid, sharing one Bessel row per time.
pub fn survival_series(
    s0: usize,
    times: &[TimePoint],
    params: &WalkParams,
    cfg: &SeriesConfig,
) -> Result<Vec<SurvivalSample>> {
    let s0 = check_s0(s0)?;
    times.iter().map(|&tp| sample(s0, tp, params, cfg)).collect()
}

fn check_momentum(k: f64) -> Result<()> {
    if !(k > 0.0 && k < PI) {
        return Err(Error::invalid(format!("momentum must lie in (0, pi), got {k}")));
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::invalid(format!("eta must be finite and >= 0, got {eta}")));
    }
    Ok(())
}

/// `R(k) = -(e^{ik} - iη) / (e^{-ik} - iη)`
pub fn reflection_amplitude(k: f64, eta: f64) -> Result<Complex64> {
    check_momentum(k)?;
    check_eta(eta)?;
    let i_eta = Complex64::new(0.0, eta);
    Ok(-(Complex64::from_polar(1.0, k) - i_eta) / (Complex64::from_polar(1.0, -k) - i_eta))
}

/// `A(k) = 4η sin k / (1 + η² + 2η sin k)`
pub fn absorption_fraction(k: f64, eta: f64) -> Result<f64> {
    check_momentum(k)?;
    check_eta(eta)?;
    Ok(fraction_unchecked(k, eta))
}

fn fraction_unchecked(k: f64, eta: f64) -> f64 {
    let sin_k = k.sin();
    4.0 * eta * sin_k / (1.0 + eta * eta + 2.0 * eta * sin_k)
}

/// Composite Gauss–Legendre on `[a, b]`, doubling the panel count until two
/// successive estimates agree to `abs_tol`.
fn refined_integral(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    start_panels: usize,
    qcfg: &QuadratureConfig,
    what: &'static str,
) -> Result<f64> {
    let rule = GaussLegendre::new(PANEL_ORDER)
        .map_err(|e| Error::InternalConsistency(format!("Gauss-Legendre rule: {e}")))?;
    let composite = |panels: usize| {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|j| rule.integrate(a + j as f64 * h, a + (j + 1) as f64 * h, &f))
            .sum::<f64>()
    };
    let mut panels = start_panels.max(qcfg.base_nodes.div_ceil(PANEL_ORDER)).max(1);
    let mut previous = composite(panels);
    let mut change = f64::INFINITY;
    for _ in 0..qcfg.max_refinements {
        panels *= 2;
        let current = composite(panels);
        change = (current - previous).abs();
        if change <= qcfg.abs_tol {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::NotConverged {
        what,
        iterations: qcfg.max_refinements,
        achieved: change,
    })
}

/// `P_abs(s0) = (1/π) ∫_0^π sin²(s0 k) A(k) dk`.
///
/// Starts with at least four panels per oscillation of `sin²(s0 k)`.
/// This weighting of `A(k)` is symmetric under `η -> 1/η` and tends to the
/// long-time absorbed probability for large `s0`. At small `s0` it differs
/// from it; see [`absorption_probability_exact`].
pub fn absorption_probability(s0: usize, eta: f64, qcfg: &QuadratureConfig) -> Result<f64> {
    check_s0(s0)?;
    check_eta(eta)?;
    qcfg.validate()?;
    if eta == 0.0 {
        return Ok(0.0);
    }
    let s = s0 as f64;
    let integrand = |k: f64| (s * k).sin().powi(2) * fraction_unchecked(k, eta) / PI;
    refined_integral(integrand, 0.0, PI, 4 * s0, qcfg, "absorption probability quadrature")
}

/// Long-time absorbed probability `κ ∫_0^∞ |K(1, s0; t)|² dt`.
///
/// By Parseval this is `(κ/2π) ∫ |G(1, s0; E + i0)|² dE` over the whole real
/// axis. With `G = -(2/Ω) q^{s0} / (1 - iηq)` the band contributes
/// `(1/2π) ∫_0^π A(k) dk` and the two gaps together contribute
/// `(2η/π) ∫_0^1 q^{2 s0 - 2} (1 - q²) / (1 + η² q²) dq`.
pub fn absorption_probability_exact(s0: usize, eta: f64, qcfg: &QuadratureConfig) -> Result<f64> {
    check_s0(s0)?;
    check_eta(eta)?;
    qcfg.validate()?;
    if eta == 0.0 {
        return Ok(0.0);
    }
    let band = refined_integral(
        |k| fraction_unchecked(k, eta) / (2.0 * PI),
        0.0,
        PI,
        4,
        qcfg,
        "band absorption quadrature",
    )?;
    let power = 2 * s0 as i32 - 2;
    let gaps = refined_integral(
        |q| 2.0 * eta / PI * q.powi(power) * (1.0 - q * q) / (1.0 + eta * eta * q * q),
        0.0,
        1.0,
        4 + s0 / 4,
        qcfg,
        "gap absorption quadrature",
    )?;
    Ok(band + gaps)
}

/// `1 - S(T_max|s0)`, the probability absorbed by `T_max`.
///
/// Approaches [`absorption_probability_exact`] from below; the gap is the
/// probability still to be absorbed after `T_max`, which decays as a power law.
pub fn absorption_probability_timedomain(
    s0: usize,
    params: &WalkParams,
    t_max: f64,
    cfg: &SeriesConfig,
) -> Result<f64> {
    if !(t_max * params.omega() >= 1.0) {
        return Err(Error::invalid(format!(
            "time-domain absorption needs omega * t_max >= 1, got {}",
            t_max * params.omega()
        )));
    }
    let tp = TimePoint::new(t_max, params.omega())?;
    Ok(1.0 - survival(s0, tp, params, cfg)?)
}
