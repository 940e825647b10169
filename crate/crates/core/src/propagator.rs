//! Time-domain propagator `K_κ(s, s0; t) = <s| exp(-i H_eff t) |s0>`.
//!
//! For `η <= 1` the absorber adds a Bessel series resumming returns to the sink.
//! For `η > 1` the amplitude splits into a continuum series and the residue of
//! the boundary pole. All Bessel factors for one time come from one
//! [`BesselRow`], held by a [`TimeSlice`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resolvent::WalkParams;
use crate::special_functions::{bessel_j_row, BesselRow};

/// Below this `x = Ωt` the series use `J_{m-1} + J_{m+1}` instead of `(2m/x) J_m`.
pub const SMALL_X: f64 = 1e-8;

/// Extra Bessel orders held beyond `max(N) + x`.
const ROW_MARGIN: usize = 64;

/// A time and its dimensionless counterpart `x = Ωt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimePoint {
    t: f64,
    x: f64,
}

impl TimePoint {
    pub fn new(t: f64, omega: f64) -> Result<Self> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::invalid(format!("time must be finite and >= 0, got {t}")));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid(format!("omega must be finite and > 0, got {omega}")));
        }
        Ok(TimePoint { t, x: omega * t })
    }

    pub fn from_x(x: f64, omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid(format!("omega must be finite and > 0, got {omega}")));
        }
        let mut tp = Self::new(x / omega, omega)?;
        tp.x = x;
        Ok(tp)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    fn check_against(&self, params: &WalkParams) -> Result<()> {
        let expected = params.omega() * self.t;
        if (expected - self.x).abs() > 1e-12 * self.x.max(1.0) {
            return Err(Error::invalid(format!(
                "time point x = {} does not match omega * t = {expected}",
                self.x
            )));
        }
        Ok(())
    }
}

/// Truncation control for the infinite Bessel series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    /// Relative tail tolerance.
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            tol: 1e-12,
            max_terms: 10_000,
        }
    }
}

impl SeriesConfig {
    pub fn new(tol: f64, max_terms: usize) -> Result<Self> {
        let cfg = SeriesConfig { tol, max_terms };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::invalid(format!("series tolerance must lie in (0, 1), got {}", self.tol)));
        }
        if self.max_terms == 0 {
            return Err(Error::invalid("max_terms must be >= 1"));
        }
        Ok(())
    }
}

/// Complex amplitudes on sites `1..=L` of the half-line.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector {
    amplitudes: Vec<Complex64>,
    params: WalkParams,
}

impl AmplitudeVector {
    /// `amplitudes[0]` is site 1.
    pub fn new(amplitudes: Vec<Complex64>, params: WalkParams) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::invalid("amplitude vector needs at least one site"));
        }
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::invalid("amplitudes must be finite"));
        }
        Ok(AmplitudeVector { amplitudes, params })
    }

    /// `|s0>`
    pub fn localized(s0: usize, params: &WalkParams) -> Result<Self> {
        if s0 == 0 {
            return Err(Error::invalid("sites start at 1"));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); s0];
        amplitudes[s0 - 1] = Complex64::new(1.0, 0.0);
        Self::new(amplitudes, *params)
    }

    pub fn params(&self) -> &WalkParams {
        &self.params
    }

    /// Truncation site `L`.
    pub fn sites(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `ψ_s`, zero outside `1..=L`.
    pub fn amplitude(&self, s: usize) -> Complex64 {
        if s == 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.amplitudes
            .get(s - 1)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Largest site carrying a nonzero amplitude.
    pub fn support_max(&self) -> Option<usize> {
        self.amplitudes
            .iter()
            .rposition(|a| *a != Complex64::new(0.0, 0.0))
            .map(|i| i + 1)
    }
}

/// `i^n` by table lookup.
pub fn i_pow(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn delta(s: u32, s0: u32) -> Complex64 {
    Complex64::new(if s == s0 { 1.0 } else { 0.0 }, 0.0)
}

fn check_sites(s: u32, s0: u32) -> Result<()> {
    if s == 0 || s0 == 0 {
        return Err(Error::invalid(format!("sites start at 1, got s = {s}, s0 = {s0}")));
    }
    Ok(())
}

/// Propagator evaluation at one time point.
///
/// Holds the Bessel row for `x = Ωt`, sized for every pair with `s + s0` up to
/// the capacity given at construction.
#[derive(Debug, Clone)]
pub struct TimeSlice {
    params: WalkParams,
    cfg: SeriesConfig,
    tp: TimePoint,
    row: BesselRow,
    /// `e^{-iΩt}`
    phase: Complex64,
}

impl TimeSlice {
    /// Slice able to evaluate every pair with `s + s0 <= max_site_sum`.
    pub fn new(
        params: &WalkParams,
        cfg: &SeriesConfig,
        tp: TimePoint,
        max_site_sum: usize,
    ) -> Result<Self> {
        let n_max = max_site_sum + tp.x.ceil() as usize + ROW_MARGIN;
        let row = bessel_j_row(tp.x, n_max)?;
        Self::with_row(params, cfg, tp, row)
    }

    /// Slice backed by a caller-supplied Bessel row for the same `x`.
    pub fn with_row(
        params: &WalkParams,
        cfg: &SeriesConfig,
        tp: TimePoint,
        row: BesselRow,
    ) -> Result<Self> {
        cfg.validate()?;
        tp.check_against(params)?;
        if row.x() != tp.x {
            return Err(Error::invalid(format!(
                "Bessel row built for x = {}, slice needs x = {}",
                row.x(),
                tp.x
            )));
        }
        Ok(TimeSlice {
            params: *params,
            cfg: *cfg,
            tp,
            row,
            phase: Complex64::from_polar(1.0, -tp.x),
        })
    }

    pub fn params(&self) -> &WalkParams {
        &self.params
    }

    pub fn time(&self) -> TimePoint {
        self.tp
    }

    /// `e^{-iΩt}`
    pub fn phase(&self) -> Complex64 {
        self.phase
    }

    fn j(&self, n: i64) -> Result<f64> {
        self.row.get(n).ok_or(Error::NotConverged {
            what: "Bessel row capacity",
            iterations: self.row.n_max(),
            achieved: f64::NAN,
        })
    }

    /// `J_{m-1}(x) + J_{m+1}(x) = (2m/x) J_m(x)`.
    fn bessel_pair(&self, m: i64) -> Result<f64> {
        if self.tp.x < SMALL_X {
            Ok(self.j(m - 1)? + self.j(m + 1)?)
        } else {
            Ok(2.0 * m as f64 / self.tp.x * self.j(m)?)
        }
    }

    /// Hard-wall amplitude without the common phase,
    /// `Φ^D_s = i^{s-s0} J_{s-s0}(x) - i^{s+s0} J_{s+s0}(x)`.
    pub fn hard_wall_phi(&self, s: u32, s0: u32) -> Result<Complex64> {
        check_sites(s, s0)?;
        let diff = s as i64 - s0 as i64;
        let sum = s as i64 + s0 as i64;
        Ok(i_pow(diff) * self.j(diff)? - i_pow(sum) * self.j(sum)?)
    }

    /// `K_D(s, s0; t)`
    pub fn hard_wall(&self, s: u32, s0: u32) -> Result<Complex64> {
        Ok(self.phase * self.hard_wall_phi(s, s0)?)
    }

    /// Boundary-return amplitude of the weak regime without the common phase,
    /// `Φ^B_s = η i^N Σ_{r>=0} (-η)^r [J_{N+r-1}(x) + J_{N+r+1}(x)]`, `N = s + s0`.
    pub fn boundary_phi(&self, s: u32, s0: u32) -> Result<Complex64> {
        check_sites(s, s0)?;
        let eta = self.params.eta();
        if eta > 1.0 {
            return Err(Error::WrongRegime {
                operation: "weak propagator",
                requirement: "eta <= 1",
                eta,
            });
        }
        if eta == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let n = s as i64 + s0 as i64;
        let x = self.tp.x;
        let mut weight = 1.0;
        let mut sum = 0.0;
        for r in 0..self.cfg.max_terms {
            let m = n + r as i64;
            let term = weight * self.bessel_pair(m)?;
            sum += term;
            let past_turning_point = m as f64 > x + 10.0;
            if weight == 0.0 || (past_turning_point && term.abs() <= self.cfg.tol * sum.abs()) {
                return Ok(eta * i_pow(n) * sum);
            }
            weight *= -eta;
        }
        Err(Error::NotConverged {
            what: "weak boundary series",
            iterations: self.cfg.max_terms,
            achieved: f64::NAN,
        })
    }

    /// Weak-regime propagator `K_D + e^{-iΩt} Φ^B`.
    pub fn weak(&self, s: u32, s0: u32) -> Result<Complex64> {
        let b = self.boundary_phi(s, s0)?;
        Ok(self.phase * (self.hard_wall_phi(s, s0)? + b))
    }

    /// Continuum part of the strong-regime absorber term without the common phase,
    /// `i^N Σ_{r>=1} (-1)^{r+1} η^{1-r} [J_{N-r-1}(x) + J_{N-r+1}(x)]`.
    pub fn continuum_phi(&self, s: u32, s0: u32) -> Result<Complex64> {
        check_sites(s, s0)?;
        let eta = self.params.eta();
        if eta <= 1.0 {
            return Err(Error::WrongRegime {
                operation: "strong continuum",
                requirement: "eta > 1",
                eta,
            });
        }
        let n = s as i64 + s0 as i64;
        let x = self.tp.x;
        // Tail after term r is at most 2 η^{-r} η/(η-1), since |J_{m-1} + J_{m+1}| <= 2.
        let tail_factor = 2.0 * eta / (eta - 1.0);
        let mut weight = 1.0;
        let mut sum = 0.0;
        for r in 1..=self.cfg.max_terms as i64 {
            let m = n - r;
            let term = weight * self.bessel_pair(m)?;
            sum += term;
            weight /= -eta;
            let tail_bound = tail_factor * weight.abs();
            let past_turning_point = (r - n) as f64 > x + 10.0;
            if weight == 0.0
                || tail_bound < self.cfg.tol * sum.abs()
                || (past_turning_point && term.abs() <= self.cfg.tol * sum.abs())
            {
                return Ok(i_pow(n) * sum);
            }
        }
        Err(Error::NotConverged {
            what: "strong continuum series",
            iterations: self.cfg.max_terms,
            achieved: f64::NAN,
        })
    }

    /// `K_cont = K_D + e^{-iΩt} (continuum series)`.
    pub fn continuum(&self, s: u32, s0: u32) -> Result<Complex64> {
        let c = self.continuum_phi(s, s0)?;
        Ok(self.phase * (self.hard_wall_phi(s, s0)? + c))
    }

    /// Residue of the boundary pole, `(1 - q_p^2) q_p^{s+s0-2} e^{-i z_p t}`.
    pub fn pole(&self, s: u32, s0: u32) -> Result<Complex64> {
        check_sites(s, s0)?;
        pole_residue(s, s0, self.tp, &self.params)
    }

    /// Full propagator with regime dispatch; exactly `δ_{s,s0}` at `t = 0`.
    pub fn amplitude(&self, s: u32, s0: u32) -> Result<Complex64> {
        check_sites(s, s0)?;
        if self.tp.t == 0.0 {
            return Ok(delta(s, s0));
        }
        if self.params.is_strong() {
            Ok(self.continuum(s, s0)? + self.pole(s, s0)?)
        } else {
            self.weak(s, s0)
        }
    }

    /// `K(s, s0; t)` for `s = 1..=s_max`.
    pub fn column(&self, s0: u32, s_max: u32) -> Result<Vec<Complex64>> {
        (1..=s_max).map(|s| self.amplitude(s, s0)).collect()
    }
}

fn pole_residue(s: u32, s0: u32, tp: TimePoint, params: &WalkParams) -> Result<Complex64> {
    let eta = params.eta();
    if eta <= 1.0 {
        return Err(Error::NoPole { eta });
    }
    let n = s as i64 + s0 as i64;
    let gamma_p = params.kappa() - params.omega() * params.omega() / params.kappa();
    let prefactor = 1.0 + 1.0 / (eta * eta);
    // q_p^{N-2} = (-i)^{N-2} η^{2-N}
    let q_power = i_pow(2 - n) * eta.powi((2 - n) as i32);
    let time = Complex64::from_polar((-0.5 * gamma_p * tp.t()).exp(), -tp.x());
    Ok(prefactor * q_power * time)
}

/// Site count `s0 + ceil(x) + 20` covering the ballistic cone.
pub fn cone_sites(s0: usize, x: f64) -> usize {
    s0 + x.ceil() as usize + 20
}

fn slice_for(s: u32, s0: u32, tp: TimePoint, params: &WalkParams, cfg: &SeriesConfig) -> Result<TimeSlice> {
    check_sites(s, s0)?;
    TimeSlice::new(params, cfg, tp, (s + s0) as usize + 1)
}

/// `K_D(s, s0; t) = e^{-iΩt} [i^{s-s0} J_{s-s0}(x) - i^{s+s0} J_{s+s0}(x)]`.
pub fn hard_wall_propagator(s: u32, s0: u32, tp: TimePoint) -> Result<Complex64> {
    check_sites(s, s0)?;
    let row = bessel_j_row(tp.x(), (s + s0) as usize)?;
    let diff = s as i64 - s0 as i64;
    let sum = s as i64 + s0 as i64;
    let phi = i_pow(diff) * row.get(diff).unwrap() - i_pow(sum) * row.get(sum).unwrap();
    Ok(Complex64::from_polar(1.0, -tp.x()) * phi)
}

pub fn weak_propagator(
    s: u32,
    s0: u32,
    tp: TimePoint,
    params: &WalkParams,
    cfg: &SeriesConfig,
) -> Result<Complex64> {
    let slice = slice_for(s, s0, tp, params, cfg)?;
    if tp.t() == 0.0 && params.eta() <= 1.0 {
        return Ok(delta(s, s0));
    }
    slice.weak(s, s0)
}

/// `K_cont(s, s0; t)` for `η > 1`. At `t = 0` this is the limit `δ_{s,s0} - K_pole(s, s0; 0)`.
pub fn strong_continuum(
    s: u32,
    s0: u32,
    tp: TimePoint,
    params: &WalkParams,
    cfg: &SeriesConfig,
) -> Result<Complex64> {
    slice_for(s, s0, tp, params, cfg)?.continuum(s, s0)
}

pub fn pole_propagator(s: u32, s0: u32, tp: TimePoint, params: &WalkParams) -> Result<Complex64> {
    check_sites(s, s0)?;
    tp.check_against(params)?;
    pole_residue(s, s0, tp, params)
}

pub fn propagator(
    s: u32,
    s0: u32,
    tp: TimePoint,
    params: &WalkParams,
    cfg: &SeriesConfig,
) -> Result<Complex64> {
    slice_for(s, s0, tp, params, cfg)?.amplitude(s, s0)
}

/// `ψ_s(t) = Σ_u K(s, u; t) ψ_u(0)` on sites `1..=support + ceil(x) + 20`.
pub fn propagate_state(
    initial: &AmplitudeVector,
    tp: TimePoint,
    cfg: &SeriesConfig,
) -> Result<AmplitudeVector> {
    let support = initial
        .support_max()
        .ok_or_else(|| Error::invalid("initial state has empty support"))?;
    let norm = initial.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(format!("initial state must be normalized, norm^2 = {norm}")));
    }
    let params = initial.params();
    if tp.t() == 0.0 {
        return AmplitudeVector::new(initial.amplitudes()[..support].to_vec(), *params);
    }
    let out_sites = cone_sites(support, tp.x());
    let slice = TimeSlice::new(params, cfg, tp, out_sites + support)?;
    let sources: Vec<(u32, Complex64)> = (1..=support)
        .map(|u| (u as u32, initial.amplitude(u)))
        .filter(|(_, a)| *a != Complex64::new(0.0, 0.0))
        .collect();
    let mut out = Vec::with_capacity(out_sites);
    for s in 1..=out_sites as u32 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(u, a) in &sources {
            acc += slice.amplitude(s, u)? * a;
        }
        out.push(acc);
    }
    AmplitudeVector::new(out, *params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{default_oracle_sites, evolve_oracle};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(eta: f64) -> WalkParams {
        WalkParams::new(1.0, eta).unwrap()
    }

    fn oracle_amp(s: usize, s0: usize, x: f64, p: &WalkParams) -> Complex64 {
        let tp = TimePoint::new(x / p.omega(), p.omega()).unwrap();
        let init = AmplitudeVector::localized(s0, p).unwrap();
        evolve_oracle(&init, tp, default_oracle_sites(s0, x), 1e-12)
            .unwrap()
            .amplitude(s)
    }

    #[test]
    fn i_powers() {
        assert_eq!(i_pow(0), c(1.0, 0.0));
        assert_eq!(i_pow(5), c(0.0, 1.0));
        assert_eq!(i_pow(-1), c(0.0, -1.0));
        assert_eq!(i_pow(-6), c(-1.0, 0.0));
    }

    #[test]
    fn time_point_validation() {
        assert!(TimePoint::new(-1.0, 1.0).is_err());
        assert!(TimePoint::new(f64::NAN, 1.0).is_err());
        let tp = TimePoint::new(2.0, 1.5).unwrap();
        assert_eq!(tp.x(), 3.0);
        let slice = TimeSlice::new(&WalkParams::new(1.0, 0.5).unwrap(), &SeriesConfig::default(), tp, 4);
        assert!(slice.is_err(), "omega mismatch must be rejected");
    }

    #[test]
    fn series_config_validation() {
        assert!(SeriesConfig::new(0.0, 10).is_err());
        assert!(SeriesConfig::new(1.0, 10).is_err());
        assert!(SeriesConfig::new(1e-10, 0).is_err());
    }

    #[test]
    fn hard_wall_initial_condition() {
        let tp = TimePoint::new(0.0, 1.0).unwrap();
        assert_eq!(hard_wall_propagator(4, 4, tp).unwrap(), c(1.0, 0.0));
        assert_eq!(hard_wall_propagator(3, 4, tp).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn hard_wall_boundary_value() {
        let tp = TimePoint::new(1.0, 1.0).unwrap();
        let k = hard_wall_propagator(1, 1, tp).unwrap();
        let expected = Complex64::from_polar(1.0, -1.0) * 0.8801011714898671;
        assert!((k - expected).norm() < 1e-13);
        assert!((k - oracle_amp(1, 1, 1.0, &params(0.0))).norm() < 1e-12);
    }

    #[test]
    fn weak_reduces_to_hard_wall() {
        let p = params(0.0);
        let cfg = SeriesConfig::default();
        for &x in &[0.5, 3.0, 11.0] {
            let tp = TimePoint::new(x, 1.0).unwrap();
            for (s, s0) in [(1, 1), (2, 5), (9, 3)] {
                let weak = weak_propagator(s, s0, tp, &p, &cfg).unwrap();
                let wall = hard_wall_propagator(s, s0, tp).unwrap();
                assert!((weak - wall).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn weak_matches_oracle() {
        let p = params(0.5);
        let tp = TimePoint::new(5.0, 1.0).unwrap();
        let k = weak_propagator(2, 3, tp, &p, &SeriesConfig::default()).unwrap();
        assert!((k - oracle_amp(2, 3, 5.0, &p)).norm() < 1e-10);
    }

    #[test]
    fn zero_time_is_delta() {
        let cfg = SeriesConfig::default();
        let tp = TimePoint::new(0.0, 1.0).unwrap();
        for eta in [0.0, 0.3, 1.0, 2.5] {
            let p = params(eta);
            assert_eq!(propagator(1, 1, tp, &p, &cfg).unwrap(), c(1.0, 0.0));
            assert_eq!(propagator(2, 1, tp, &p, &cfg).unwrap(), c(0.0, 0.0));
        }
        assert_eq!(weak_propagator(1, 1, tp, &params(0.7), &cfg).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn continuum_limit_at_zero_time() {
        let p = params(2.0);
        let cfg = SeriesConfig::default();
        let tp = TimePoint::new(0.0, 1.0).unwrap();
        for (s, s0) in [(1, 1), (1, 3), (4, 2)] {
            let total = strong_continuum(s, s0, tp, &p, &cfg).unwrap()
                + pole_propagator(s, s0, tp, &p).unwrap();
            assert!((total - delta(s, s0)).norm() < 1e-15);
        }
    }

    #[test]
    fn small_x_branch_is_continuous() {
        let cfg = SeriesConfig::default();
        for eta in [0.6, 3.0] {
            let p = params(eta);
            let below = TimePoint::new(0.9 * SMALL_X, 1.0).unwrap();
            let above = TimePoint::new(1.1 * SMALL_X, 1.0).unwrap();
            for (s, s0) in [(1, 1), (2, 1), (1, 2)] {
                let a = propagator(s, s0, below, &p, &cfg).unwrap();
                let b = propagator(s, s0, above, &p, &cfg).unwrap();
                assert!((a - b).norm() < 1e-7, "eta={eta} ({s},{s0})");
            }
        }
    }

    #[test]
    fn regime_errors() {
        let cfg = SeriesConfig::default();
        let tp = TimePoint::new(1.0, 1.0).unwrap();
        assert!(matches!(
            weak_propagator(1, 1, tp, &params(1.5), &cfg),
            Err(Error::WrongRegime { .. })
        ));
        assert!(matches!(
            strong_continuum(1, 1, tp, &params(1.0), &cfg),
            Err(Error::WrongRegime { .. })
        ));
        assert!(matches!(pole_propagator(1, 1, tp, &params(0.9)), Err(Error::NoPole { .. })));
        assert!(propagator(0, 1, tp, &params(0.5), &cfg).is_err());
    }

    #[test]
    fn strong_leading_term_at_large_eta() {
        // As η grows only r = 1 survives: 2 i^N e^{-ix} ((N-1)/x) J_{N-1}(x).
        let x = 3.0;
        let tp = TimePoint::new(x, 1.0).unwrap();
        let cfg = SeriesConfig::default();
        let p = params(1e9);
        let (s, s0) = (2u32, 3u32);
        let n = (s + s0) as i64;
        let slice = TimeSlice::new(&p, &cfg, tp, 8).unwrap();
        let series = slice.continuum_phi(s, s0).unwrap();
        let leading = i_pow(n) * 2.0 * (n - 1) as f64 / x * crate::special_functions::bessel_j(n - 1, x).unwrap();
        assert!((series - leading).norm() < 1e-8);
    }

    #[test]
    fn strong_matches_oracle_at_boundary() {
        let p = params(4.0);
        let tp = TimePoint::new(4.0, 1.0).unwrap();
        let cfg = SeriesConfig::default();
        let k = strong_continuum(1, 1, tp, &p, &cfg).unwrap() + pole_propagator(1, 1, tp, &p).unwrap();
        assert!((k - oracle_amp(1, 1, 4.0, &p)).norm() < 1e-9);
    }

    #[test]
    fn pole_geometry() {
        let p = WalkParams::new(1.0, 2.0).unwrap();
        let tp0 = TimePoint::new(0.0, 1.0).unwrap();
        assert!((pole_propagator(1, 1, tp0, &p).unwrap() - c(1.25, 0.0)).norm() < 1e-15);

        let p = params(3.0);
        let gamma = 3.0 - 1.0 / 3.0;
        let t1 = TimePoint::new(1.0, 1.0).unwrap();
        let t2 = TimePoint::new(2.5, 1.0).unwrap();
        for s in 1..6 {
            let a = pole_propagator(s, 2, t1, &p).unwrap().norm();
            let b = pole_propagator(s + 1, 2, t1, &p).unwrap().norm();
            assert!((b / a - 1.0 / 3.0).abs() < 1e-15);
            let later = pole_propagator(s, 2, t2, &p).unwrap().norm();
            assert!((later / a - (-0.5 * gamma * 1.5f64).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn oracle_points() {
        let cfg = SeriesConfig::default();
        let weak = params(0.25);
        let tp = TimePoint::new(12.0, 1.0).unwrap();
        let k = propagator(5, 8, tp, &weak, &cfg).unwrap();
        assert!((k - oracle_amp(5, 8, 12.0, &weak)).norm() < 1e-10);

        let strong = params(4.0);
        let k = propagator(1, 8, tp, &strong, &cfg).unwrap();
        assert!((k - oracle_amp(1, 8, 12.0, &strong)).norm() < 1e-9);
    }

    #[test]
    fn continuum_term_count() {
        // With η = 4 the geometric tail bound closes the sum within 25 terms.
        let p = params(4.0);
        let cfg = SeriesConfig::default();
        for &x in &[1.0, 10.0, 30.0] {
            let tp = TimePoint::new(x, 1.0).unwrap();
            let slice = TimeSlice::new(&p, &cfg, tp, 4).unwrap();
            let full = slice.continuum_phi(1, 1).unwrap();
            let capped = TimeSlice::new(&p, &SeriesConfig::new(1e-12, 25).unwrap(), tp, 4)
                .unwrap()
                .continuum_phi(1, 1);
            assert_eq!(capped.unwrap(), full, "x = {x}");
        }
    }

    #[test]
    fn crossover_continuity() {
        let cfg = SeriesConfig::default();
        let tp = TimePoint::new(6.0, 1.0).unwrap();
        let below = propagator(2, 2, tp, &params(1.0 - 1e-6), &cfg).unwrap();
        let above = propagator(2, 2, tp, &params(1.0 + 1e-6), &cfg).unwrap();
        assert!((below - above).norm() < 1e-4);
    }

    #[test]
    fn propagate_localized_and_superposition() {
        let cfg = SeriesConfig::default();
        let p = params(0.5);
        let tp = TimePoint::new(8.0, 1.0).unwrap();

        let init = AmplitudeVector::localized(4, &p).unwrap();
        let out = propagate_state(&init, tp, &cfg).unwrap();
        assert_eq!(out.sites(), 4 + 8 + 20);
        for s in 1..=out.sites() {
            let column = propagator(s as u32, 4, tp, &p, &cfg).unwrap();
            assert!((out.amplitude(s) - column).norm() < 1e-15);
        }

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![c(0.0, 0.0); 5];
        amps[2] = c(h, 0.0);
        amps[4] = c(h, 0.0);
        let init = AmplitudeVector::new(amps, p).unwrap();
        let exact = propagate_state(&init, tp, &cfg).unwrap();
        let oracle = evolve_oracle(&init, tp, default_oracle_sites(5, 8.0), 1e-12).unwrap();
        let err = (1..=exact.sites())
            .map(|s| (exact.amplitude(s) - oracle.amplitude(s)).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "superposition error {err:e}");
        assert!(exact.norm_sqr() <= 1.0);

        let same = propagate_state(&init, TimePoint::new(0.0, 1.0).unwrap(), &cfg).unwrap();
        assert_eq!(same.amplitudes(), &init.amplitudes()[..5]);
    }

    #[test]
    fn propagate_rejects_bad_initial() {
        let p = params(0.5);
        let tp = TimePoint::new(1.0, 1.0).unwrap();
        let cfg = SeriesConfig::default();
        let zero = AmplitudeVector::new(vec![c(0.0, 0.0); 3], p).unwrap();
        assert!(propagate_state(&zero, tp, &cfg).is_err());
        let unnormalized = AmplitudeVector::new(vec![c(2.0, 0.0)], p).unwrap();
        assert!(propagate_state(&unnormalized, tp, &cfg).is_err());
    }
}
