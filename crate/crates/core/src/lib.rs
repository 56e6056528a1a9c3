//! Numerical laboratory for the Chern–Simons–Dirac system on the line.
//!
//! The system is evolved in null coordinates `u± = ψ1 ± ψ2`, `A± = A0 ∓ A1`,
//! where every field is transported along one of the characteristic families
//! `x ± t`. On a periodic lattice with `dt = dx` those characteristics pass
//! through lattice nodes, so the principal part is an exact shift and all
//! discretization error comes from the source terms.
//!
//! Modules:
//! - [`lattice`]: grid, field state, initial data, physical/null variables.
//! - [`solver`]: characteristic predictor–corrector stepping, exact-phase
//!   integrator, Delgado split, Picard iteration and diagnostics.
//! - [`spaces`]: Sobolev, Besov, Littlewood–Paley and windowed `Z`/`Y`
//!   space-time norms.
//! - [`probes`]: randomized ratio probes for the product, dilation and
//!   bilinear estimates.
//! - [`experiments`]: config-driven scenarios behind the `csd` CLI.

pub mod error;
pub mod experiments;
pub mod lattice;
pub mod par;
pub mod probes;
pub mod solver;
pub mod spaces;

pub use error::{Error, Result};
pub use lattice::{DataSpec, FieldState, GridSpec};
pub use num_complex::Complex64;
