//! Doubled-lattice Wigner function of the surviving sector.
//!
//! `W(m, k) = (1/2π) Σ_{n=1}^{m-1} ψ_n ψ*_{m-n} e^{-i(2n-m)k}` with `m = s + s'`.
//! The momentum grid is `k_j = -π + 2πj/K`, `j = 0..K`, without the duplicate
//! endpoint, so that `Δk Σ_j e^{-ipk_j}` is an exact Kronecker delta for `|p| < K`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagator::{AmplitudeVector, SeriesConfig, TimePoint, TimeSlice};
use crate::resolvent::WalkParams;

/// Imaginary residue that flags a corrupted state.
pub const IMAGINARY_REJECT: f64 = 1e-9;

/// A real grid over `m = 2..=m_max` and the periodic momentum grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    /// `rows[m - 2][j]`
    rows: Vec<Vec<f64>>,
}

impl WignerGrid {
    pub fn value(&self, m: usize, j: usize) -> f64 {
        self.rows[m - 2][j]
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.rows[m - 2]
    }

    pub fn max_abs_difference(&self, other: &WignerGrid) -> f64 {
        self.rows
            .iter()
            .flatten()
            .zip(other.rows.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub name: String,
    pub grid: WignerGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerField {
    m_max: usize,
    k_grid: Vec<f64>,
    total: WignerGrid,
    channels: Vec<Channel>,
    time: TimePoint,
    max_imaginary_residue: f64,
}

impl WignerField {
    pub fn m_values(&self) -> std::ops::RangeInclusive<usize> {
        2..=self.m_max
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn k_grid(&self) -> &[f64] {
        &self.k_grid
    }

    pub fn dk(&self) -> f64 {
        2.0 * PI / self.k_grid.len() as f64
    }

    pub fn total(&self) -> &WignerGrid {
        &self.total
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn channel(&self, name: &str) -> Option<&WignerGrid> {
        self.channels.iter().find(|c| c.name == name).map(|c| &c.grid)
    }

    pub fn time(&self) -> TimePoint {
        self.time
    }

    /// Largest `|Im W|` discarded when the field was made real, over the total and every channel.
    pub fn max_imaginary_residue(&self) -> f64 {
        self.max_imaginary_residue
    }

    /// `Δk Σ_j W(m, k_j)`; equals `|ψ_{m/2}|²` for even `m` and 0 for odd `m`.
    pub fn k_marginal(&self, m: usize) -> f64 {
        self.dk() * self.total.row(m).iter().sum::<f64>()
    }

    /// `Σ_m Δk Σ_j W(m, k_j)`
    pub fn trace(&self) -> f64 {
        self.m_values().map(|m| self.k_marginal(m)).sum()
    }

    /// `max |W_total - Σ channels|`, zero when no channels are present.
    pub fn channel_sum_residual(&self) -> f64 {
        if self.channels.is_empty() {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for m in self.m_values() {
            for j in 0..self.k_grid.len() {
                let sum: f64 = self.channels.iter().map(|c| c.grid.value(m, j)).sum();
                worst = worst.max((self.total.value(m, j) - sum).abs());
            }
        }
        worst
    }
}

fn check_grid(m_max: usize, k_nodes: usize) -> Result<()> {
    if m_max < 2 {
        return Err(Error::invalid(format!("m_max must be >= 2, got {m_max}")));
    }
    if k_nodes < 4 {
        return Err(Error::invalid(format!("k_nodes must be >= 4, got {k_nodes}")));
    }
    Ok(())
}

pub fn k_grid(k_nodes: usize) -> Vec<f64> {
    (0..k_nodes)
        .map(|j| -PI + 2.0 * PI * j as f64 / k_nodes as f64)
        .collect()
}

/// `e^{-ipk_j}` for `p = -m_max..=m_max`.
struct PhaseTable {
    m_max: usize,
    table: Vec<Vec<Complex64>>,
}

impl PhaseTable {
    fn new(m_max: usize, ks: &[f64]) -> Self {
        let table = (-(m_max as i64)..=m_max as i64)
            .map(|p| ks.iter().map(|&k| Complex64::from_polar(1.0, -(p as f64) * k)).collect())
            .collect();
        PhaseTable { m_max, table }
    }

    fn get(&self, p: i64) -> &[Complex64] {
        &self.table[(p + self.m_max as i64) as usize]
    }
}

/// `(1/2π) Σ_n a_n b*_{m-n} e^{-i(2n-m)k}` on the grid; `a[0]` is site 1.
/// Returns the real grid and the largest imaginary residue.
fn bilinear(a: &[Complex64], b: &[Complex64], m_max: usize, phases: &PhaseTable) -> (WignerGrid, f64) {
    let k_nodes = phases.table[0].len();
    let site = |v: &[Complex64], s: usize| v.get(s - 1).copied().unwrap_or_default();
    let mut rows = Vec::with_capacity(m_max - 1);
    let mut residue = 0.0f64;
    for m in 2..=m_max {
        let mut row = vec![Complex64::new(0.0, 0.0); k_nodes];
        for n in 1..m {
            let c = site(a, n) * site(b, m - n).conj();
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (w, e) in row.iter_mut().zip(phases.get(2 * n as i64 - m as i64)) {
                *w += c * e;
            }
        }
        rows.push(
            row.into_iter()
                .map(|w| {
                    let w = w / (2.0 * PI);
                    residue = residue.max(w.im.abs());
                    w.re
                })
                .collect(),
        );
    }
    (WignerGrid { rows }, residue)
}

fn reject_residue(residue: f64) -> Result<()> {
    if !(residue <= IMAGINARY_REJECT) {
        return Err(Error::InternalConsistency(format!(
            "Wigner field has imaginary residue {residue:e}"
        )));
    }
    Ok(())
}

fn assemble(
    psi: &[Complex64],
    parts: &[(&str, &[Complex64], &[Complex64], bool)],
    m_max: usize,
    k_nodes: usize,
    time: TimePoint,
) -> Result<WignerField> {
    check_grid(m_max, k_nodes)?;
    let ks = k_grid(k_nodes);
    let phases = PhaseTable::new(m_max, &ks);
    let (total, mut residue) = bilinear(psi, psi, m_max, &phases);
    let mut channels = Vec::with_capacity(parts.len());
    for &(name, a, b, symmetrize) in parts {
        let (mut grid, r) = bilinear(a, b, m_max, &phases);
        if symmetrize {
            // The (b, a) term is the complex conjugate, so its real part is the same.
            for v in grid.rows.iter_mut().flatten() {
                *v *= 2.0;
            }
        } else {
            residue = residue.max(r);
        }
        channels.push(Channel {
            name: name.to_string(),
            grid,
        });
    }
    reject_residue(residue)?;
    Ok(WignerField {
        m_max,
        k_grid: ks,
        total,
        channels,
        time,
        max_imaginary_residue: residue,
    })
}

/// Wigner field of an arbitrary state.
pub fn wigner_field(state: &AmplitudeVector, m_max: usize, k_nodes: usize, tp: TimePoint) -> Result<WignerField> {
    assemble(state.amplitudes(), &[], m_max, k_nodes, tp)
}

fn check_s0(s0: usize) -> Result<u32> {
    if s0 == 0 {
        return Err(Error::invalid("sites start at 1"));
    }
    u32::try_from(s0).map_err(|_| Error::invalid(format!("site {s0} out of range")))
}

/// Weak-regime field of `|s0>` with channels `DD`, `DBplusBD`, `BB`.
///
/// Built from `Φ^D` and `Φ^B`; the common phase `e^{-iΩt}` cancels in every bilinear.
pub fn wigner_weak_decomposition(
    s0: usize,
    m_max: usize,
    k_nodes: usize,
    tp: TimePoint,
    params: &WalkParams,
    cfg: &SeriesConfig,
) -> Result<WignerField> {
    let s0 = check_s0(s0)?;
    if params.is_strong() {
        return Err(Error::WrongRegime {
            operation: "weak Wigner decomposition",
            requirement: "eta <= 1",
            eta: params.eta(),
        });
    }
    check_grid(m_max, k_nodes)?;
    let slice = TimeSlice::new(params, cfg, tp, m_max + s0 as usize)?;
    let sites = 1..m_max as u32;
    let d: Vec<Complex64> = sites.clone().map(|s| slice.hard_wall_phi(s, s0)).collect::<Result<_>>()?;
    let b: Vec<Complex64> = sites.map(|s| slice.boundary_phi(s, s0)).collect::<Result<_>>()?;
    let psi: Vec<Complex64> = d.iter().zip(&b).map(|(x, y)| x + y).collect();
    assemble(
        &psi,
        &[("DD", &d, &d, false), ("DBplusBD", &d, &b, true), ("BB", &b, &b, false)],
        m_max,
        k_nodes,
        tp,
    )
}

/// Strong-regime field of `|s0>` with channels `cc`, `cpPluspc`, `pp`.
pub fn wigner_strong_decomposition(
    s0: usize,
    m_max: usize,
    k_nodes: usize,
    tp: TimePoint,
    params: &WalkParams,
    cfg: &SeriesConfig,
) -> Result<WignerField> {
    let s0 = check_s0(s0)?;
    if !params.is_strong() {
        return Err(Error::WrongRegime {
            operation: "strong Wigner decomposition",
            requirement: "eta > 1",
            eta: params.eta(),
        });
    }
    check_grid(m_max, k_nodes)?;
    let slice = TimeSlice::new(params, cfg, tp, m_max + s0 as usize)?;
    let sites = 1..m_max as u32;
    let c: Vec<Complex64> = sites.clone().map(|s| slice.continuum(s, s0)).collect::<Result<_>>()?;
    let p: Vec<Complex64> = sites.map(|s| slice.pole(s, s0)).collect::<Result<_>>()?;
    let psi: Vec<Complex64> = c.iter().zip(&p).map(|(x, y)| x + y).collect();
    assemble(
        &psi,
        &[("cc", &c, &c, false), ("cpPluspc", &c, &p, true), ("pp", &p, &p, false)],
        m_max,
        k_nodes,
        tp,
    )
}

fn pole_checks(m: usize, tp: TimePoint, s0: usize, params: &WalkParams) -> Result<()> {
    check_s0(s0)?;
    if m < 2 {
        return Err(Error::invalid(format!("m must be >= 2, got {m}")));
    }
    if !params.is_strong() {
        return Err(Error::NoPole { eta: params.eta() });
    }
    let expected = params.omega() * tp.t();
    if (expected - tp.x()).abs() > 1e-12 * tp.x().max(1.0) {
        return Err(Error::invalid("time point does not match omega"));
    }
    Ok(())
}

fn gamma_p(params: &WalkParams) -> f64 {
    params.kappa() - params.omega() * params.omega() / params.kappa()
}

/// Pole channel in geometric-sum form,
/// `|1-q_p²|²/(2π) e^{-Γ_p t} q_p^{s0-2} q_p*^{m+s0-2} e^{imk} (α - α^m)/(1 - α)`, `α = -e^{-2ik}`.
pub fn wigner_pole_closed_form(m: usize, k: f64, tp: TimePoint, s0: usize, params: &WalkParams) -> Result<f64> {
    pole_checks(m, tp, s0, params)?;
    let eta = params.eta();
    let q_p = Complex64::new(0.0, -1.0 / eta);
    let prefactor = (1.0 - q_p * q_p).norm_sqr() / (2.0 * PI) * (-gamma_p(params) * tp.t()).exp();
    let alpha = -Complex64::from_polar(1.0, -2.0 * k);
    let geometric = if (1.0 - alpha).norm() < 1e-8 {
        Complex64::new((m - 1) as f64, 0.0)
    } else {
        (alpha - alpha.powu(m as u32)) / (1.0 - alpha)
    };
    let powers = q_p.powi(s0 as i32 - 2) * q_p.conj().powi((m + s0) as i32 - 2);
    let w = prefactor * powers * Complex64::from_polar(1.0, m as f64 * k) * geometric;
    Ok(w.re)
}

/// Pole channel in cosine-sum form,
/// `(1+η⁻²)²/(2π) e^{-Γ_p t} η^{-(m+2s0-4)} Σ_n cos(πm/2 + πn + (m-2n)k)`.
pub fn wigner_pole_cosine_form(m: usize, k: f64, tp: TimePoint, s0: usize, params: &WalkParams) -> Result<f64> {
    pole_checks(m, tp, s0, params)?;
    let eta = params.eta();
    let prefactor = (1.0 + eta.powi(-2)).powi(2) / (2.0 * PI)
        * (-gamma_p(params) * tp.t()).exp()
        * eta.powi(-((m + 2 * s0) as i32 - 4));
    let mf = m as f64;
    let sum: f64 = (1..m)
        .map(|n| {
            let nf = n as f64;
            (PI * mf / 2.0 + PI * nf + (mf - 2.0 * nf) * k).cos()
        })
        .sum();
    Ok(prefactor * sum)
}

/// `ξ_loc = 1/ln η` of the boundary mode.
pub fn localization_length(eta: f64) -> Result<f64> {
    if !(eta > 1.0) {
        return Err(Error::NoPole { eta });
    }
    Ok(1.0 / eta.ln())
}
