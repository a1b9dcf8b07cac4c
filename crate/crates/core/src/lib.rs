//! Lindblad Liouvillians, their peripheral spectra and dynamical symmetries,
//! and diagnostics for stable, metastable and robust quantum synchronization.
//!
//! Conventions used everywhere:
//! * the generator is `L[ρ] = -i[H,ρ] + Σ (2 L ρ L† - {L†L, ρ})`, jump
//!   amplitudes folded into the jump operators;
//! * superoperators act on column-stacked operators, `vec(AXB) = (Bᵀ⊗A) vec(X)`;
//! * site 0 is the leftmost tensor factor;
//! * for qubits, basis index 0 is spin up (`σᶻ = +1`) and `σ⁻` lowers index 0 to 1.

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod liouvillian;
pub mod models;
pub mod operator;
pub mod perturbation;
pub mod random;
pub mod spectral;
pub mod sync;

pub use error::{Error, Result};
pub use linalg::{CMat, CVec, C64};
pub use liouvillian::{EigenSystem, LindbladModel, Superoperator};
pub use operator::{DensityMatrix, HilbertSpace, Operator, SitePermutation};

/// Numerical cutoffs. `scale` is `max(‖H‖₂, max ‖L‖₂², 1)` for the model at hand.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    /// Structural residuals (commutators, stationarity), relative to scale.
    pub structural: f64,
    /// Eigenvalue classification (peripheral vs decaying), relative to scale.
    pub eigenvalue: f64,
    /// Rank decisions at singular value `rank * d`.
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { structural: 1e-10, eigenvalue: 1e-9, rank: 1e-10 }
    }
}
