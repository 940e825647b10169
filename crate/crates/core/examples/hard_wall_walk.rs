//! Spreading from site 8 with no sink: probability stays on the lattice and
//! the front moves out ballistically at speed Ω.

use absorbing_walk::{propagate_state, AmplitudeVector, SeriesConfig, TimePoint, WalkParams};

fn main() -> absorbing_walk::Result<()> {
    let params = WalkParams::new(1.0, 0.0)?;
    let start = AmplitudeVector::localized(8, &params)?;
    let cfg = SeriesConfig::default();

    println!("{:>6} {:>12} {:>10} {:>10}", "t", "norm", "<s>", "spread");
    for t in [0.0, 2.0, 5.0, 10.0, 20.0] {
        let psi = propagate_state(&start, TimePoint::new(t, params.omega())?, &cfg)?;
        let p: Vec<f64> = psi.amplitudes().iter().map(|a| a.norm_sqr()).collect();
        let norm: f64 = p.iter().sum();
        let mean = p.iter().enumerate().map(|(i, w)| (i + 1) as f64 * w).sum::<f64>() / norm;
        let var = p.iter().enumerate().map(|(i, w)| ((i + 1) as f64 - mean).powi(2) * w).sum::<f64>() / norm;
        println!("{t:>6.1} {norm:>12.10} {mean:>10.4} {:>10.4}", var.sqrt());
    }
    Ok(())
}
