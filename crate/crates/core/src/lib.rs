//! Exact propagators, first-passage statistics and Wigner fields for a
//! continuous-time quantum walk on the half-line `s = 1, 2, ...` with a
//! Lindblad sink of rate `κ` on site 1 and hopping rate `Ω`.
//!
//! Everything is parametrized by `η = κ/Ω` and `x = Ωt`. For `η <= 1` the
//! propagator is the hard-wall image solution plus a Bessel series of boundary
//! returns; for `η > 1` a localized boundary mode with decay rate
//! `Γ_p = κ - Ω²/κ` splits off.
//!
//! ```
//! use absorbing_walk::{propagator, SeriesConfig, TimePoint, WalkParams};
//!
//! let params = WalkParams::new(1.0, 0.5).unwrap();
//! let tp = TimePoint::new(4.0, params.omega()).unwrap();
//! let k = propagator(2, 3, tp, &params, &SeriesConfig::default()).unwrap();
//! assert!(k.norm() < 1.0);
//! ```

pub mod cli;
pub mod error;
pub mod observables;
pub mod oracle;
pub mod propagator;
pub mod resolvent;
pub mod special_functions;
pub mod verify;
pub mod wigner;

pub use error::{Error, Result};
pub use observables::{
    absorption_fraction, absorption_probability, absorption_probability_exact,
    absorption_probability_timedomain, first_passage_density, reflection_amplitude, survival,
    survival_series, QuadratureConfig, ScatteringMode, SurvivalSample,
};
pub use propagator::{
    hard_wall_propagator, pole_propagator, propagate_state, propagator, strong_continuum,
    weak_propagator, AmplitudeVector, SeriesConfig, TimePoint, TimeSlice,
};
pub use resolvent::{boundary_pole, green_absorbing, green_hard_wall, q_of_z, CutSide, PoleData, WalkParams};
pub use special_functions::{bessel_j, bessel_j_row, BesselRow};
pub use wigner::{
    localization_length, wigner_field, wigner_pole_closed_form, wigner_pole_cosine_form,
    wigner_strong_decomposition, wigner_weak_decomposition, WignerField,
};
