//! Entangled two-particle Gaussian wave packets and Popper's slit experiment.
//!
//! A pair of particles with opposite horizontal momenta carries an entangled
//! Gaussian state in the vertical momenta (k₁, k₂), characterized by the
//! widths σ₊ of k₁ + k₂ and σ₋ of k₁ − k₂, evolving freely with mass m. A
//! slit of half-width a on the left selects y₁; this crate computes the
//! coincidence spreads (Δk₂)² and (Δy₂)² of the right particle:
//!
//! * [`closed_form`]: narrow-, small- and wide-slit closed forms.
//! * [`oracle`]: brute-force quadrature for any a, built on the
//!   [`wavepacket`] amplitudes and the complex error function in [`special`].
//! * [`montecarlo`]: independent sampling estimates.
//! * [`scenarios`]: the two experimental cases and parameter sweeps.
//! * [`cli`]: the batch front end of the `popper` binary.
//!
//! Units have ħ = 1. The `examples/` directory has one runnable program per
//! capability.
//!
//! ```
//! use popper_core::{dk2sq_narrow, dk2sq_quadrature, PacketParams, QuadratureSpec};
//!
//! let p = PacketParams::new(1.0, 3.0, 1.0, 0.0)?;
//! let narrow = dk2sq_narrow(&p).value;
//! let finite = dk2sq_quadrature(0.3, &p, &QuadratureSpec::default())?.value;
//! assert!((narrow - 2.5).abs() < 1e-12);
//! assert!(finite < narrow);
//! # Ok::<(), popper_core::Error>(())
//! ```

pub mod cli;
pub mod closed_form;
pub mod error;
pub mod montecarlo;
pub mod oracle;
pub mod params;
pub mod quadrature;
pub mod scenarios;
pub mod special;
pub mod wavepacket;

pub use closed_form::{
    delta_coeff, dk2sq_narrow, dk2sq_small_a, dk2sq_wide, dy1sq_narrow, dy2sq_narrow,
    dy2sq_small_a, from_qureshi, to_qureshi, ExpansionCoefficients, Method, SlitHalfWidth,
    SpreadEstimate, Warning,
};
pub use error::{Error, Result};
pub use montecarlo::{mc_estimate, mc_incoherent_position_spread, McMode, McSpec};
pub use oracle::{
    dk2sq_quadrature, dk2sq_quadrature_band, dy2sq_quadrature, position_window_amplitude,
    slit_amplitude,
};
pub use params::{complex_width_sq, ComplexWidthSq, PacketParams};
pub use quadrature::QuadratureSpec;
pub use scenarios::{
    post_slit_k2_spread, run_case_i, run_case_ii, sweep, DetectorBand, SlitConfig, SweepGrid,
    SweepPlan, SweepRow,
};
pub use special::complex_erf;
pub use wavepacket::{
    joint_position_density, psi_mixed, psi_momentum, psi_position, ComplexAmplitude,
};
