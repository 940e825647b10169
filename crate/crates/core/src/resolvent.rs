//! Green functions of the half-line walk with a boundary sink.
//!
//! Energies are mapped to the unit disk through `z = Ω (1 - (q + 1/q)/2)`, with
//! the root `|q| < 1` selected off the band `[0, 2Ω]`. The free-line, hard-wall
//! and absorbing resolvents are then closed-form rational functions of `q`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Hopping rate `omega`, absorption rate `kappa`, and their ratio `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    omega: f64,
    kappa: f64,
    eta: f64,
}

impl WalkParams {
    pub fn new(omega: f64, kappa: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid(format!("omega must be finite and > 0, got {omega}")));
        }
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::invalid(format!("kappa must be finite and >= 0, got {kappa}")));
        }
        Ok(WalkParams {
            omega,
            kappa,
            eta: kappa / omega,
        })
    }

    /// Parameters with unit hopping rate and absorption strength `eta`.
    pub fn from_eta(eta: f64) -> Result<Self> {
        Self::new(1.0, eta)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Strong regime: an isolated boundary mode exists.
    pub fn is_strong(&self) -> bool {
        self.eta > 1.0
    }
}

/// Which limit to take when `z` lies on the open band `(0, 2Ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutSide {
    OffCut,
    /// `z + i0`
    AbovePlus,
    /// `z - i0`
    BelowMinus,
}

/// An energy together with its branch-resolved image `q(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralVariable {
    pub z: Complex64,
    pub q: Complex64,
    pub side: CutSide,
}

impl SpectralVariable {
    /// `|z - Ω (1 - (q + 1/q)/2)|`
    pub fn round_trip_residual(&self, omega: f64) -> f64 {
        (self.z - omega * (1.0 - 0.5 * (self.q + self.q.inv()))).norm()
    }
}

/// Maps `z` to `q` on the physical sheet (`q -> 0` as `|z| -> ∞`).
pub fn q_of_z(z: Complex64, omega: f64, side: CutSide) -> Result<SpectralVariable> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::invalid(format!("energy must be finite, got {z}")));
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid(format!("omega must be finite and > 0, got {omega}")));
    }
    if z.im == 0.0 && (z.re == 0.0 || z.re == 2.0 * omega) {
        return Err(Error::DegenerateBranch { z });
    }

    // q solves q^2 - 2 b q + 1 = 0 with b = 1 - z/Ω.
    let b = 1.0 - z / omega;
    let on_cut = z.im == 0.0 && z.re > 0.0 && z.re < 2.0 * omega;
    if on_cut {
        // b = cos θ; the +i0 side continues to q = e^{+iθ}, the -i0 side to e^{-iθ}.
        let sin_theta = (1.0 - b.re * b.re).sqrt();
        let q = match side {
            CutSide::AbovePlus => Complex64::new(b.re, sin_theta),
            CutSide::BelowMinus => Complex64::new(b.re, -sin_theta),
            CutSide::OffCut => {
                return Err(Error::invalid(format!(
                    "z = {z} lies on the band (0, 2Ω); choose a side of the cut"
                )))
            }
        };
        return Ok(SpectralVariable { z, q, side });
    }

    // Take the large root without cancellation, then invert (the roots multiply to 1).
    let disc = (b * b - 1.0).sqrt();
    let big = if (b + disc).norm() >= (b - disc).norm() {
        b + disc
    } else {
        b - disc
    };
    let q = big.inv();
    if q.norm() >= 1.0 {
        return Err(Error::DegenerateBranch { z });
    }
    Ok(SpectralVariable {
        z,
        q,
        side: CutSide::OffCut,
    })
}

fn one_minus_q2(sv: &SpectralVariable) -> Result<Complex64> {
    let d = 1.0 - sv.q * sv.q;
    if d.norm() < 1e-14 {
        return Err(Error::DegenerateBranch { z: sv.z });
    }
    Ok(d)
}

/// Free-line lattice Green function `g_n(z) = -(2/Ω) q^{|n|+1} / (1 - q^2)`.
pub fn g_line(n: i64, sv: &SpectralVariable, omega: f64) -> Result<Complex64> {
    let d = one_minus_q2(sv)?;
    let power = (n.unsigned_abs() + 1) as i32;
    Ok(-2.0 / omega * sv.q.powi(power) / d)
}

/// Hard-wall Green function by images, `G_D(s, s0) = g_{s-s0} - g_{s+s0}`.
pub fn green_hard_wall(s: u32, s0: u32, sv: &SpectralVariable, omega: f64) -> Result<Complex64> {
    check_sites(s, s0)?;
    hard_wall_unchecked(s as i64, s0 as i64, sv, omega)
}

/// Image formula without the `s >= 1` guard; `s = 0` is the image node.
pub(crate) fn hard_wall_unchecked(
    s: i64,
    s0: i64,
    sv: &SpectralVariable,
    omega: f64,
) -> Result<Complex64> {
    let d = one_minus_q2(sv)?;
    let direct = sv.q.powi(((s - s0).abs() + 1) as i32);
    let image = sv.q.powi((s + s0 + 1) as i32);
    Ok(-2.0 / (omega * d) * (direct - image))
}

/// Exact resolvent of the absorbing walk,
/// `G_κ(s, s0) = G_D(s, s0) - (2iη/Ω) q^{s+s0} / (1 - iηq)`.
pub fn green_absorbing(
    s: u32,
    s0: u32,
    sv: &SpectralVariable,
    params: &WalkParams,
) -> Result<Complex64> {
    check_sites(s, s0)?;
    let g_d = hard_wall_unchecked(s as i64, s0 as i64, sv, params.omega)?;
    if params.kappa == 0.0 {
        return Ok(g_d);
    }
    let denom = 1.0 - I * params.eta * sv.q;
    if denom.norm() < 1e-10 {
        let z_p = boundary_pole(params)
            .map(|p| p.z_p)
            .unwrap_or_else(|| pole_energy(params));
        return Err(Error::PoleEvaluation { z_p });
    }
    let defect = 2.0 * I * params.eta / params.omega * sv.q.powi((s + s0) as i32) / denom;
    Ok(g_d - defect)
}

fn check_sites(s: u32, s0: u32) -> Result<()> {
    if s == 0 || s0 == 0 {
        return Err(Error::invalid(format!("sites start at 1, got s = {s}, s0 = {s0}")));
    }
    Ok(())
}

/// The isolated boundary mode, present only for `eta > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleData {
    pub q_p: Complex64,
    pub z_p: Complex64,
    /// `Γ_p = κ - Ω²/κ`, the decay rate of the mode's probability.
    pub gamma_p: f64,
    /// `1 - q_p^2`
    pub residue_prefactor: Complex64,
}

fn pole_energy(params: &WalkParams) -> Complex64 {
    let gamma = params.kappa - params.omega * params.omega / params.kappa;
    Complex64::new(params.omega, -0.5 * gamma)
}

pub fn boundary_pole(params: &WalkParams) -> Option<PoleData> {
    if !params.is_strong() {
        return None;
    }
    let q_p = Complex64::new(0.0, -1.0 / params.eta);
    let gamma_p = params.kappa - params.omega * params.omega / params.kappa;
    Some(PoleData {
        q_p,
        z_p: pole_energy(params),
        gamma_p,
        residue_prefactor: 1.0 - q_p * q_p,
    })
}
