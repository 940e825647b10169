//! Brute-force references for the closed forms.
//!
//! Everything here works on an explicitly truncated lattice: time evolution by
//! Taylor stepping or by a dense Padé exponential, resolvents by direct LU
//! solves, and Bessel values by trapezoidal quadrature of the integral
//! representation. Nothing in this module calls into the series code it checks.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::propagator::{AmplitudeVector, TimePoint};
use crate::resolvent::WalkParams;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Edge amplitude above which a truncated evolution is rejected.
pub const EDGE_TOLERANCE: f64 = 1e-12;

/// `H_eff = H_+ - (iκ/2)|1><1|` on sites `1..=L` with an open end at `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedHamiltonian {
    pub diag: Vec<Complex64>,
    /// Couplings between sites `s` and `s + 1`, both directions.
    pub offdiag: Vec<f64>,
    pub params: WalkParams,
}

impl TruncatedHamiltonian {
    pub fn build(sites: usize, params: &WalkParams) -> Result<Self> {
        if sites < 2 {
            return Err(Error::invalid(format!("truncated lattice needs >= 2 sites, got {sites}")));
        }
        let omega = params.omega();
        let mut diag = vec![Complex64::new(omega, 0.0); sites];
        diag[0] -= I * (0.5 * params.kappa());
        Ok(TruncatedHamiltonian {
            diag,
            offdiag: vec![-0.5 * omega; sites - 1],
            params: *params,
        })
    }

    pub fn sites(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let n = self.sites();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = self.diag[i] * psi[i];
            if i > 0 {
                acc += self.offdiag[i - 1] * psi[i - 1];
            }
            if i + 1 < n {
                acc += self.offdiag[i] * psi[i + 1];
            }
            out[i] = acc;
        }
        out
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.sites();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
                self.diag[i].norm() + left + right
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.sites();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = Complex64::new(self.offdiag[i], 0.0);
                m[(i + 1, i)] = Complex64::new(self.offdiag[i], 0.0);
            }
        }
        m
    }
}

/// Default oracle lattice: twice the library's 20-site buffer beyond the light cone.
pub fn default_oracle_sites(support_max: usize, x: f64) -> usize {
    support_max + x.ceil() as usize + 40
}

fn sup_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

fn prepare_initial(initial: &AmplitudeVector, sites: usize, x_final: f64) -> Result<Vec<Complex64>> {
    let support = initial
        .support_max()
        .ok_or_else(|| Error::invalid("initial state has empty support"))?;
    let needed = support + x_final.ceil() as usize + 20;
    if sites < needed {
        return Err(Error::InadequateTruncation {
            sites,
            edge_amplitude: f64::NAN,
            suggested: default_oracle_sites(support, x_final),
        });
    }
    let mut psi = vec![Complex64::new(0.0, 0.0); sites];
    psi[..support].copy_from_slice(&initial.amplitudes()[..support]);
    Ok(psi)
}

fn check_edge(psi: &[Complex64], support: usize, x: f64) -> Result<()> {
    let edge = psi[psi.len() - 1].norm();
    if edge > EDGE_TOLERANCE {
        return Err(Error::InadequateTruncation {
            sites: psi.len(),
            edge_amplitude: edge,
            suggested: default_oracle_sites(support, x) + psi.len() / 2,
        });
    }
    Ok(())
}

/// One Taylor step `psi <- exp(-i H h) psi`, summed until the terms reach round-off.
fn taylor_step(h_eff: &TruncatedHamiltonian, psi: &[Complex64], h: f64) -> Option<Vec<Complex64>> {
    const MAX_ORDER: usize = 60;
    let mut term = psi.to_vec();
    let mut sum = psi.to_vec();
    for k in 1..=MAX_ORDER {
        let factor = -I * (h / k as f64);
        term = h_eff.apply(&term).into_iter().map(|v| factor * v).collect();
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
        if sup_norm(&term) <= 1e-18 * sup_norm(&sum).max(1e-300) {
            return Some(sum);
        }
    }
    None
}

/// Evolves `dψ/dt = -i H_eff ψ` on `sites` sites and records the state at each time.
///
/// `times` must be nondecreasing. Every accepted step is checked for norm
/// non-increase, and every recorded state for a negligible amplitude at the
/// artificial edge.
pub fn evolve_oracle_grid(
    initial: &AmplitudeVector,
    times: &[TimePoint],
    sites: usize,
    tol: f64,
) -> Result<Vec<AmplitudeVector>> {
    if !(tol > 0.0 && tol <= 1e-10) {
        return Err(Error::invalid(format!("oracle tolerance must lie in (0, 1e-10], got {tol}")));
    }
    if times.windows(2).any(|w| w[1].t() < w[0].t()) {
        return Err(Error::invalid("oracle time grid must be nondecreasing"));
    }
    let params = *initial.params();
    let x_final = times.last().map(|tp| tp.x()).unwrap_or(0.0);
    let support = initial
        .support_max()
        .ok_or_else(|| Error::invalid("initial state has empty support"))?;
    let mut psi = prepare_initial(initial, sites, x_final)?;
    let h_eff = TruncatedHamiltonian::build(sites, &params)?;
    let h_max = 1.0 / h_eff.norm_inf();

    let mut out = Vec::with_capacity(times.len());
    let mut now = 0.0;
    for tp in times {
        while now < tp.t() {
            let mut h = h_max.min(tp.t() - now);
            let next = loop {
                match taylor_step(&h_eff, &psi, h) {
                    Some(next) => break next,
                    None => {
                        h *= 0.5;
                        if h < 1e-14 * tp.t().max(1.0) {
                            return Err(Error::StepUnderflow { t: now, step: h });
                        }
                    }
                }
            };
            let before = norm_sqr(&psi);
            let after = norm_sqr(&next);
            if after > before * (1.0 + 1e-13) + 1e-15 {
                return Err(Error::InternalConsistency(format!(
                    "oracle norm grew from {before} to {after} at t = {now}"
                )));
            }
            psi = next;
            now += h;
            if tp.t() - now < 1e-15 * tp.t().max(1.0) {
                now = tp.t();
            }
        }
        check_edge(&psi, support, tp.x())?;
        out.push(AmplitudeVector::new(psi.clone(), params)?);
    }
    Ok(out)
}

/// Evolves a state to a single time point by Taylor stepping.
pub fn evolve_oracle(
    initial: &AmplitudeVector,
    tp: TimePoint,
    sites: usize,
    tol: f64,
) -> Result<AmplitudeVector> {
    Ok(evolve_oracle_grid(initial, &[tp], sites, tol)?.remove(0))
}

/// Dense `exp(A)` by Padé(13) scaling and squaring.
pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA_13: f64 = 5.371920351148152;

    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > THETA_13 {
        (norm1 / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.scale(0.5f64.powi(squarings));

    let ident = DMatrix::<Complex64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let c = |k: usize| Complex64::new(B[k], 0.0);

    let u_inner = &a6 * (&a6 * c(13) + &a4 * c(11) + &a2 * c(9))
        + &a6 * c(7)
        + &a4 * c(5)
        + &a2 * c(3)
        + &ident * c(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * c(12) + &a4 * c(10) + &a2 * c(8))
        + &a6 * c(6)
        + &a4 * c(4)
        + &a2 * c(2)
        + &ident * c(0);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is nonsingular");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// Evolves a state with the dense matrix exponential of `-i H_eff t`.
pub fn evolve_oracle_expm(
    initial: &AmplitudeVector,
    tp: TimePoint,
    sites: usize,
) -> Result<AmplitudeVector> {
    let params = *initial.params();
    let support = initial
        .support_max()
        .ok_or_else(|| Error::invalid("initial state has empty support"))?;
    let psi0 = prepare_initial(initial, sites, tp.x())?;
    let h_eff = TruncatedHamiltonian::build(sites, &params)?;
    let generator = h_eff.to_dense() * (-I * tp.t());
    let propagator = expm(&generator);
    let psi = propagator * DVector::from_vec(psi0);
    let psi: Vec<Complex64> = psi.iter().copied().collect();
    check_edge(&psi, support, tp.x())?;
    AmplitudeVector::new(psi, params)
}

/// Solves `(z - H_eff) g = e_{s0}` on `sites` sites and returns `g_s`.
pub fn oracle_resolvent(
    s: u32,
    s0: u32,
    z: Complex64,
    params: &WalkParams,
    sites: usize,
) -> Result<Complex64> {
    if s == 0 || s0 == 0 || s as usize > sites || s0 as usize > sites {
        return Err(Error::invalid(format!(
            "sites must lie in 1..={sites}, got s = {s}, s0 = {s0}"
        )));
    }
    let h_eff = TruncatedHamiltonian::build(sites, params)?;
    let h = h_eff.to_dense();
    let a = DMatrix::<Complex64>::identity(sites, sites) * z - &h;
    let mut rhs = DVector::<Complex64>::zeros(sites);
    rhs[s0 as usize - 1] = Complex64::new(1.0, 0.0);

    let singular = |h: &DMatrix<Complex64>| {
        let distance = nalgebra::Schur::new(h.clone())
            .eigenvalues()
            .map(|ev| ev.iter().map(|e| (z - e).norm()).fold(f64::INFINITY, f64::min))
            .unwrap_or(0.0);
        Error::SingularSystem { distance }
    };
    let g = a.clone().lu().solve(&rhs).ok_or_else(|| singular(&h))?;
    let residual = (&a * &g - &rhs).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let size = g.iter().map(|v| v.norm()).fold(0.0, f64::max);
    // LU residuals stay small near an eigenvalue; the solution norm does not.
    if !residual.is_finite() || residual > 1e-12 || size > 1e12 {
        return Err(singular(&h));
    }
    Ok(g[s as usize - 1])
}

/// `J_n(x) = (1/π) ∫_0^π cos(nθ - x sin θ) dθ` by refined trapezoidal sums.
///
/// The integrand extends to a smooth periodic function, so the trapezoidal rule
/// converges geometrically once the node count exceeds `n + x`.
pub fn bessel_oracle(n: u32, x: f64) -> Result<f64> {
    if n > 60 || !(0.0..=100.0).contains(&x) {
        return Err(Error::invalid(format!(
            "bessel_oracle covers n <= 60, 0 <= x <= 100; got n = {n}, x = {x}"
        )));
    }
    let nf = n as f64;
    let f = |theta: f64| (nf * theta - x * theta.sin()).cos();
    let trapezoid = |intervals: usize| {
        let h = PI / intervals as f64;
        let interior: f64 = (1..intervals).map(|j| f(j as f64 * h)).sum();
        (0.5 * (f(0.0) + f(PI)) + interior) * h / PI
    };
    let min_intervals = (nf + x) as usize + 32;
    let mut intervals = 16;
    let mut previous = trapezoid(intervals);
    for _ in 0..20 {
        intervals *= 2;
        let current = trapezoid(intervals);
        if intervals >= min_intervals && (current - previous).abs() < 1e-15 {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::NotConverged {
        what: "Bessel quadrature oracle",
        iterations: 20,
        achieved: f64::NAN,
    })
}
