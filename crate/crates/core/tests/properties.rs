use std::f64::consts::PI;

use absorbing_walk::oracle::{default_oracle_sites, evolve_oracle};
use absorbing_walk::{
    absorption_fraction, propagate_state, propagator, reflection_amplitude, survival_series, wigner_field,
    AmplitudeVector, SeriesConfig, TimePoint, WalkParams,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn momentum() -> impl Strategy<Value = f64> {
    (1e-3..PI - 1e-3).prop_map(|k: f64| k)
}

fn coupling() -> impl Strategy<Value = f64> {
    prop_oneof![0.0..1.0, 1.0..8.0]
}

fn state(max_sites: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0, -1.0..1.0), 1..=max_sites).prop_filter_map("zero state", |raw| {
        let v: Vec<Complex64> = raw.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        (n > 1e-3).then(|| v.into_iter().map(|c| c / n).collect())
    })
}

proptest! {
    #[test]
    fn absorbed_fraction_is_bounded_and_dual(k in momentum(), eta in 1e-3..1e3f64) {
        let a = absorption_fraction(k, eta).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!((a - absorption_fraction(k, 1.0 / eta).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn flux_balance(k in momentum(), eta in 0.0..50.0f64) {
        let r = reflection_amplitude(k, eta).unwrap();
        let a = absorption_fraction(k, eta).unwrap();
        prop_assert!((1.0 - r.norm_sqr() - a).abs() < 1e-12);
    }

    #[test]
    fn survival_decreases(s0 in 1usize..12, kappa in coupling(), t_max in 0.5..20.0f64) {
        let params = WalkParams::new(1.0, kappa).unwrap();
        let times: Vec<TimePoint> = (0..=8)
            .map(|i| TimePoint::new(t_max * i as f64 / 8.0, 1.0).unwrap())
            .collect();
        let samples = survival_series(s0, &times, &params, &SeriesConfig::default()).unwrap();
        prop_assert!((samples[0].survival - 1.0).abs() < 1e-12);
        for w in samples.windows(2) {
            prop_assert!(w[1].survival <= w[0].survival + 1e-12);
        }
        for s in &samples {
            prop_assert!(s.survival >= -1e-12 && s.survival <= 1.0 + 1e-10);
            prop_assert!(s.first_passage >= 0.0);
        }
    }

    #[test]
    fn wigner_is_real_and_traces_to_norm(psi in state(6), m_extra in 0usize..4) {
        let params = WalkParams::new(1.0, 0.5).unwrap();
        let support = psi.len();
        let v = AmplitudeVector::new(psi, params).unwrap();
        let field = wigner_field(&v, 2 * support + m_extra, 33, TimePoint::new(0.0, 1.0).unwrap()).unwrap();
        prop_assert!(field.max_imaginary_residue() < 1e-12);
        prop_assert!((field.trace() - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn propagator_matches_oracle(s0 in 1u32..8, kappa in coupling(), x in 0.1..15.0f64) {
        let params = WalkParams::new(1.0, kappa).unwrap();
        let tp = TimePoint::from_x(x, 1.0).unwrap();
        let cfg = SeriesConfig::default();
        let start = AmplitudeVector::localized(s0 as usize, &params).unwrap();
        let sites = default_oracle_sites(s0 as usize, x);
        let reference = evolve_oracle(&start, tp, sites, 1e-12).unwrap();
        for s in 1..=(s0 + 12) {
            let k = propagator(s, s0, tp, &params, &cfg).unwrap();
            prop_assert!((k - reference.amplitude(s as usize)).norm() < 1e-9, "s = {}", s);
        }
    }

    #[test]
    fn superposition_matches_oracle(psi in state(4), kappa in coupling(), x in 0.5..8.0f64) {
        let params = WalkParams::new(1.0, kappa).unwrap();
        let tp = TimePoint::from_x(x, 1.0).unwrap();
        let support = psi.len();
        let v = AmplitudeVector::new(psi, params).unwrap();
        let exact = propagate_state(&v, tp, &SeriesConfig::default()).unwrap();
        let reference = evolve_oracle(&v, tp, default_oracle_sites(support, x), 1e-12).unwrap();
        for s in 1..=exact.sites() {
            prop_assert!((exact.amplitude(s) - reference.amplitude(s)).norm() < 1e-9);
        }
        prop_assert!(exact.norm_sqr() <= 1.0 + 1e-10);
    }
}
