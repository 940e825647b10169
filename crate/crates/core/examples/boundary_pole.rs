//! Above `η = 1` a mode bound to the sink splits off the band. Its amplitude
//! falls as `η^{-s}` away from the boundary and its weight decays at `Γ_p`.

use absorbing_walk::{
    boundary_pole, localization_length, pole_propagator, propagator, strong_continuum, SeriesConfig,
    TimePoint, WalkParams,
};

fn main() -> absorbing_walk::Result<()> {
    let params = WalkParams::new(1.0, 3.0)?;
    let pole = boundary_pole(&params).expect("eta > 1");
    println!("eta   = {}", params.eta());
    println!("q_p   = {}", pole.q_p);
    println!("z_p   = {}", pole.z_p);
    println!("Gamma = {}", pole.gamma_p);
    println!("xi    = {:.6}", localization_length(params.eta())?);

    let tp = TimePoint::new(2.0, params.omega())?;
    let cfg = SeriesConfig::default();
    let s0 = 2;
    println!();
    println!("{:>3} {:>12} {:>12} {:>12}", "s", "|K|", "|K_pole|", "|K_cont|");
    for s in 1..=8 {
        let k = propagator(s, s0, tp, &params, &cfg)?;
        let kp = pole_propagator(s, s0, tp, &params)?;
        let kc = strong_continuum(s, s0, tp, &params, &cfg)?;
        println!("{s:>3} {:>12.4e} {:>12.4e} {:>12.4e}", k.norm(), kp.norm(), kc.norm());
    }

    // Pole weight on a fixed site against the predicted exponential.
    println!();
    let k0 = pole_propagator(1, s0, TimePoint::new(0.0, 1.0)?, &params)?.norm_sqr();
    for t in [0.0, 0.5, 1.0, 2.0] {
        let w = pole_propagator(1, s0, TimePoint::new(t, 1.0)?, &params)?.norm_sqr();
        println!("t = {t:3.1}  |K_pole(1)|^2 = {w:.6e}  predicted = {:.6e}", k0 * (-pole.gamma_p * t).exp());
    }
    Ok(())
}
