//! Scattering off the sink: the absorbed fraction `A(k)` is unchanged under
//! `η -> 1/η`, and so is the momentum-weighted absorption probability.
//!
//! The exact long-time absorption of `|s0>` also counts the evanescent part of
//! the spectrum, which breaks the duality at small `s0`. Both are printed, along
//! with `1 - S(T)` from direct evolution.

use absorbing_walk::{
    absorption_fraction, absorption_probability, absorption_probability_exact,
    absorption_probability_timedomain, QuadratureConfig, SeriesConfig, WalkParams,
};

fn main() -> absorbing_walk::Result<()> {
    let k = 0.7;
    for eta in [0.25_f64, 0.5, 1.0, 2.0, 4.0] {
        println!("A(k={k}, eta={eta:<4}) = {:.12}", absorption_fraction(k, eta)?);
    }

    let qcfg = QuadratureConfig::default();
    let cfg = SeriesConfig::default();
    println!();
    println!("{:>4} {:>6} {:>10} {:>10} {:>10} {:>10}", "s0", "eta", "weighted", "dual", "exact", "1-S(60)");
    for s0 in [1usize, 3, 10] {
        for eta in [0.25_f64, 4.0] {
            let weighted = absorption_probability(s0, eta, &qcfg)?;
            let dual = absorption_probability(s0, 1.0 / eta, &qcfg)?;
            let exact = absorption_probability_exact(s0, eta, &qcfg)?;
            let params = WalkParams::from_eta(eta)?;
            let evolved = absorption_probability_timedomain(s0, &params, 60.0, &cfg)?;
            println!("{s0:>4} {eta:>6} {weighted:>10.6} {dual:>10.6} {exact:>10.6} {evolved:>10.6}");
        }
    }
    Ok(())
}
