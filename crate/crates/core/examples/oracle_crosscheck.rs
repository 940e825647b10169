//! Cross-checks the closed-form propagator and resolvent against brute-force
//! evolution and a dense linear solve on a truncated lattice.

use absorbing_walk::oracle::{default_oracle_sites, evolve_oracle, oracle_resolvent};
use absorbing_walk::{
    green_absorbing, propagate_state, q_of_z, AmplitudeVector, CutSide, SeriesConfig, TimePoint, WalkParams,
};
use num_complex::Complex64;

fn main() -> absorbing_walk::Result<()> {
    let cfg = SeriesConfig::default();
    for kappa in [0.4, 1.0, 2.5] {
        let params = WalkParams::new(1.0, kappa)?;
        let start = AmplitudeVector::localized(5, &params)?;
        let tp = TimePoint::new(9.0, params.omega())?;
        let exact = propagate_state(&start, tp, &cfg)?;
        let brute = evolve_oracle(&start, tp, default_oracle_sites(5, tp.x()), 1e-12)?;
        let err = (1..=exact.sites())
            .map(|s| (exact.amplitude(s) - brute.amplitude(s)).norm())
            .fold(0.0, f64::max);
        println!("kappa = {kappa:3.1}  max |K - K_oracle| = {err:.2e}");
    }

    println!();
    let params = WalkParams::new(1.0, 1.5)?;
    let z = Complex64::new(0.8, 0.4);
    let sv = q_of_z(z, params.omega(), CutSide::OffCut)?;
    // |q|^n must drop below 1e-14 before the truncation edge.
    let sites = (1e-14f64.ln() / sv.q.norm().ln()).ceil() as usize + 24;
    for (s, s0) in [(1, 1), (1, 4), (3, 6)] {
        let g = green_absorbing(s, s0, &sv, &params)?;
        let dense = oracle_resolvent(s, s0, z, &params, sites)?;
        println!("G({s},{s0}) = {g:.10}  dense = {dense:.10}  diff = {:.1e}", (g - dense).norm());
    }
    Ok(())
}
