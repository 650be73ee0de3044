//! Long-time photoelectron ionization spectra of a laser-driven autoionizing
//! system coupled to a neighbor two-level atom.
//!
//! The crate computes conditional and total photoelectron spectra from the
//! closed-form amplitude solution, locates the persistent (Fano), weak-pump
//! (Fano-like) and dynamical spectral zeros, sweeps zero trajectories against
//! the pump strength, and cross-validates everything with a brute-force
//! integration of the same dynamics over a discretized continuum.
//!
//! ```
//! use autoion::spectra::{decompose, EnergyGrid};
//! use autoion::zeros::dynamical_zeros;
//! use autoion::{PreparedModel, ReducedParams};
//!
//! let params = ReducedParams {
//!     q_a: 1.0,
//!     q_b: 1.0,
//!     gamma_a: 1.0,
//!     gamma_b: 1.0,
//!     omega: 1.0,
//!     de_a: 0.0,
//!     de_b: 0.0,
//! }
//! .realize(1.0)?;
//! let model = PreparedModel::new(&params)?;
//! let spectrum = decompose(&model, &EnergyGrid::default_for(&params));
//! assert!((spectrum.grid.trapezoid(&spectrum.i_lt) - 1.0).abs() < 1e-6);
//! let zeros = dynamical_zeros(&model)?;
//! assert!(!zeros.is_empty());
//! # Ok::<(), autoion::Error>(())
//! ```

pub mod error;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod params;
pub mod spectra;
pub mod zeros;

pub use error::{Error, Result};
pub use model::{build, pole_set, projections, ModelMatrices, PoleSet, PreparedModel};
pub use params::{derive_reduced, rabi, realize_couplings, RabiSpec, ReducedParams, SystemParams};
pub use spectra::{amplitude, decompose, reduced_amplitudes, EnergyGrid, SpectrumDecomposition};
pub use zeros::{
    dynamical_zeros, effective_dipole, fano_zeros, sweep, weak_pump_zeros, DynamicalZero, FanoZero,
    FanoZeroKind, ZeroTrajectory,
};
