//! Integer-order Bessel functions of the first kind.
//!
//! Rows `J_0(x) .. J_{n_max}(x)` are produced by Miller's downward recurrence,
//! normalized with `J_0 + 2 Σ_k J_{2k} = 1`. Every propagator series in this
//! crate draws its Bessel factors from a single row per time point.

use crate::error::{Error, Result};

/// Rescale threshold for the unnormalized downward recurrence.
const RESCALE_ABOVE: f64 = 1e250;

/// `J_0(x) .. J_{n_max}(x)` for one argument.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselRow {
    x: f64,
    values: Vec<f64>,
}

impl BesselRow {
    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `J_n(x)` for any integer order inside the row, using `J_{-n} = (-1)^n J_n`.
    pub fn get(&self, n: i64) -> Option<f64> {
        let v = *self.values.get(n.unsigned_abs() as usize)?;
        Some(if n < 0 && n % 2 != 0 { -v } else { v })
    }

    /// Overwrite one stored order. Used by mutation tests of the verification suite.
    pub fn perturb(&mut self, n: usize, delta: f64) {
        if let Some(v) = self.values.get_mut(n) {
            *v += delta;
        }
    }
}

/// Starting order of the downward recurrence.
///
/// The margin follows `n_max + max(16, ceil(10 sqrt(n_max + x)))`, measured from
/// `max(n_max, x)` so that the start stays above the turning point when `x > n_max`.
fn start_order(x: f64, n_max: usize) -> usize {
    let margin = (10.0 * (n_max as f64 + x).sqrt()).ceil() as usize;
    n_max.max(x.ceil() as usize) + margin.max(16)
}

pub fn bessel_j_row(x: f64, n_max: usize) -> Result<BesselRow> {
    if !x.is_finite() {
        return Err(Error::invalid(format!("Bessel argument must be finite, got {x}")));
    }
    if x < 0.0 {
        return Err(Error::invalid(format!("Bessel argument must be nonnegative, got {x}")));
    }

    let mut values = vec![0.0; n_max + 1];
    if x == 0.0 {
        values[0] = 1.0;
        return Ok(BesselRow { x, values });
    }

    let start = start_order(x, n_max);
    let two_over_x = 2.0 / x;

    // j_above = J_{n+1}, j_here = J_n, both unnormalized.
    let mut j_above = 0.0;
    let mut j_here = 1e-30;
    let mut even_sum = 0.0;
    for n in (1..=start).rev() {
        if n <= n_max {
            values[n] = j_here;
        }
        if n % 2 == 0 {
            even_sum += 2.0 * j_here;
        }
        let j_below = n as f64 * two_over_x * j_here - j_above;
        j_above = j_here;
        j_here = j_below;

        if j_here.abs() > RESCALE_ABOVE {
            let scale = 1.0 / RESCALE_ABOVE;
            j_here *= scale;
            j_above *= scale;
            even_sum *= scale;
            for v in values.iter_mut().skip(n) {
                *v *= scale;
            }
        }
    }
    values[0] = j_here;
    even_sum += j_here;

    let norm = 1.0 / even_sum;
    for v in &mut values {
        *v *= norm;
    }
    Ok(BesselRow { x, values })
}

/// `J_n(x)` for a single (possibly negative) order.
pub fn bessel_j(n: i64, x: f64) -> Result<f64> {
    let row = bessel_j_row(x, n.unsigned_abs() as usize)?;
    Ok(row.get(n).expect("row covers |n|"))
}
