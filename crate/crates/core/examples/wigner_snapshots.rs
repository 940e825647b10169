//! Wigner snapshots of `|s0 = 3>` in the strong regime, split into continuum,
//! interference and pole channels.

use absorbing_walk::{wigner_pole_closed_form, wigner_strong_decomposition, SeriesConfig, TimePoint, WalkParams};

fn main() -> absorbing_walk::Result<()> {
    let params = WalkParams::new(1.0, 1.5)?;
    let cfg = SeriesConfig::default();
    let s0 = 3;

    for x in [1.0, 3.0, 6.0, 12.0] {
        let tp = TimePoint::from_x(x, params.omega())?;
        let m_max = 2 * (s0 + x.ceil() as usize + 10);
        let field = wigner_strong_decomposition(s0, m_max, 128, tp, &params, &cfg)?;
        print!("x = {x:4.1}  trace = {:.8}", field.trace());
        for ch in field.channels() {
            let weight: f64 = field.m_values().map(|m| field.dk() * ch.grid.row(m).iter().sum::<f64>()).sum();
            print!("  {} = {weight:+.6}", ch.name);
        }
        println!("  closure = {:.1e}", field.channel_sum_residual());
    }

    // The pole channel from the dense field agrees with its closed form.
    let tp = TimePoint::from_x(6.0, params.omega())?;
    let field = wigner_strong_decomposition(s0, 12, 16, tp, &params, &cfg)?;
    let pp = field.channel("pp").unwrap();
    let j = 5;
    let k = field.k_grid()[j];
    println!();
    for m in [2, 4, 6, 8] {
        let closed = wigner_pole_closed_form(m, k, tp, s0, &params)?;
        println!("m = {m}  k = {k:+.4}  W_pp = {:+.6e}  closed form = {closed:+.6e}", pp.value(m, j));
    }
    Ok(())
}
