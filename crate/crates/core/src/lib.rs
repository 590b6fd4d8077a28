//! Numerical toolkit for the spectral picture of a pair of interacting
//! particles on the half-line.
//!
//! For an interaction potential `v` on `(0, ∞)` the two-particle operator
//! `H = -Δ + v(|x₁ - x₂|/√2)` on `L²(ℝ₊²)` splits, after rotating to
//! relative/center-of-mass coordinates and folding by exchange parity, into
//! operators `Q₊`/`Q₋` on the triangle `{0 < x₁ < x₂}`. The crate computes
//! and cross-checks the three statements that make up the spectral picture:
//!
//! * the essential spectrum of `Q₊` starts at the ground energy `ε₀` of the
//!   one-particle operator `h = -d²/dx² + v` ([`oned`], [`twod::weyl_residual`]);
//! * there is at least one eigenvalue strictly below `ε₀`, witnessed by an
//!   explicit variational trial function built from the cumulative mass of
//!   the one-particle ground state ([`certificate`]);
//! * only finitely many such eigenvalues exist, controlled by a localized
//!   effective one-dimensional potential and its Bargmann integral
//!   ([`counting`]).
//!
//! Everything is deterministic: fixed seeds, fixed sweep orders, fixed float
//! formatting in reports.

pub mod certificate;
pub mod counting;
pub mod cutoff;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod oned;
pub mod potentials;
pub mod quad;
pub mod report;
pub mod twod;

pub use error::Error;
pub use grid::{Bc, Grid1D, Grid2D, Symmetry};
pub use oned::EigResult1D;
pub use potentials::{AssumptionReport, PotentialSpec, TailValue};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
