//! Survival and first-passage density for a walker starting at site 8.
//!
//! `cargo run --example first_passage -- 1.5` picks the sink rate κ.

use absorbing_walk::{survival_series, SeriesConfig, TimePoint, WalkParams};

fn main() -> absorbing_walk::Result<()> {
    let kappa: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1.0);
    let params = WalkParams::new(1.0, kappa)?;
    let s0 = 8;

    let times = (0..=300)
        .map(|i| TimePoint::new(0.1 * i as f64, params.omega()))
        .collect::<absorbing_walk::Result<Vec<_>>>()?;
    let samples = survival_series(s0, &times, &params, &SeriesConfig::default())?;

    // F = -dS/dt, so the trapezoid integral of F should match the survival loss.
    let absorbed: f64 = samples
        .windows(2)
        .map(|w| 0.5 * (w[0].first_passage + w[1].first_passage) * (w[1].t - w[0].t))
        .sum();
    let last = samples.last().unwrap();
    let peak = samples.iter().max_by(|a, b| a.first_passage.total_cmp(&b.first_passage)).unwrap();

    for s in samples.iter().step_by(30) {
        println!("t = {:5.1}  S = {:.6}  F = {:.3e}", s.t, s.survival, s.first_passage);
    }
    println!("eta = {:.3}", params.eta());
    println!("first-passage peak at t = {:.2} (ballistic arrival ~ {})", peak.t, s0 - 1);
    println!("1 - S(T) = {:.6}, integral of F = {:.6}", 1.0 - last.survival, absorbed);
    Ok(())
}
