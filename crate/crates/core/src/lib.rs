//! Retarded-time fields of admissible point-mass trajectories.
//!
//! The crate is organised bottom-up:
//!
//! * [`trajectory`]: admissible trajectories, velocity/acceleration bounds,
//!   proper time and Lorentz boosts.
//! * [`retarded`]: certified solver for the retarded time `τ = t − |r₁ − r₂(τ)|`.
//! * [`fields`]: the fundamental fields `(τ, T, r₁₂, e, v, a, u, z)` and their
//!   closed-form first partial derivatives.
//! * [`electrodynamics`]: `E`, `B` and the Liénard-Wiechert potentials from three
//!   independent formulations.
//! * [`diffeo`]: the map `(r, t) ↦ (τ, T, e)` onto `ℝ × (0,∞) × S²` and its inverse.
//! * [`verify`]: finite-difference oracles, Maxwell/wave residuals and the
//!   verification suite.
//! * [`cli`]: grid sampling, verification and boost front ends used by the binary.
//!
//! Units are natural throughout: the speed of light is 1 and the charge and
//! field normalisation constants are 1.

// `!(x > 0.0)` rejects NaN as well; kept deliberately.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diffeo;
pub mod electrodynamics;
pub mod error;
pub mod fields;
pub mod retarded;
pub mod trajectory;
pub mod verify;

#[cfg(test)]
mod test_support;

pub use error::{Error, Result};

/// Three-vector used for positions, velocities and field values.
pub type Vec3 = nalgebra::Vector3<f64>;

/// Standard basis vectors `δ₁, δ₂, δ₃`.
pub const BASIS: [Vec3; 3] = [
    Vec3::new(1.0, 0.0, 0.0),
    Vec3::new(0.0, 1.0, 0.0),
    Vec3::new(0.0, 0.0, 1.0),
];

pub use diffeo::{Chart, ChartAxis, ManifoldPoint};
pub use electrodynamics::{EmState, Formulation};
pub use fields::{FieldJet, FieldPoint, FundamentalFields};
pub use retarded::{RetardedSolution, SolverOptions};
pub use trajectory::{AdmissibilityReport, Boost, Trajectory};
