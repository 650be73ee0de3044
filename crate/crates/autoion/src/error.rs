//! Error types shared across the crate.
//!
//! Display strings start with the variant name so that front ends can report
//! the typed error verbatim.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A Fano asymmetry parameter was requested with a vanishing coupling in
    /// its denominator while the numerator is nonzero.
    #[error("DegenerateCoupling: {0}")]
    DegenerateCoupling(String),

    /// The simultaneous root iteration did not settle within the iteration cap.
    #[error("NoConvergence: root iteration stalled after {iterations} iterations (best residual {best_residual:.3e})")]
    NoConvergence {
        iterations: usize,
        best_residual: f64,
    },

    /// An eigenvalue's geometric multiplicity is deficient, or the eigenvector
    /// matrix is numerically singular.
    #[error("DefectiveMatrix: {0}")]
    DefectiveMatrix(String),

    /// The Rabi splitting is below the degeneracy tolerance, so the dressed
    /// projection matrices are singular. Perturb the pump (|Omega| >= 1e-8)
    /// or detune the neighbor atom to lift the degeneracy.
    #[error("DegenerateRabi: Rabi splitting {delta_xi:.3e} below tolerance {tolerance:.3e}; perturb the pump (e.g. |Omega| >= 1e-8) to lift the degeneracy")]
    DegenerateRabi { delta_xi: f64, tolerance: f64 },

    /// The canonical-transformation determinant vanishes at the requested
    /// energy (a dressed bound state sits inside the continuum there).
    #[error("SingularDeterminant: |D({energy})| = {value:.3e} below {tolerance:.3e}")]
    SingularDeterminant {
        energy: f64,
        value: f64,
        tolerance: f64,
    },

    /// The adaptive integrator could not meet the local error tolerance.
    #[error("StepFailure: step size underflow at t = {t:.6e} (h = {h:.3e})")]
    StepFailure { t: f64, h: f64 },

    /// Invalid input outside the numeric domain (bad grid, non-finite field).
    #[error("InvalidInput: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
