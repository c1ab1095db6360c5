//! Simulation and analysis toolkit for ordinary (OQW) and split-step (SSQW)
//! discrete-time quantum walks on periodic lattices.
//!
//! The crate is organized in layers:
//!
//! * [`core`] — Hilbert-space primitives: lattice geometry, walker states,
//!   dense unitary propagators, distances and distributions.
//! * [`operators`] — constructors for every propagator used by the walks:
//!   coins, conditional shifts, 1D/2D step operators, q-plates, and
//!   position-dependent coin profiles.
//! * [`decomposition`] — machine-precision verification of the operator
//!   identities relating split-step walks to products of ordinary walks.
//! * [`spectral`] — momentum-space analysis: Bloch blocks, closed-form
//!   effective Hamiltonians, matrix-logarithm oracle, BCH truncations,
//!   dispersion, gaps, and winding numbers.
//! * [`toposim`] — real-space simulation of inhomogeneous walks: boundary
//!   profiles, bound-state detection, localization metrics, and 2D
//!   edge-state dynamics.
//!
//! Conventions fixed throughout: basis index is site-major coin-minor
//! (`index = 2*site + coin`), coin basis `|up> = (1,0)`, `|down> = (0,1)`,
//! coin angles normalized to `(-pi, pi]`, and quasienergies to `(-pi, pi]`
//! with the `-1` eigenvalue branch mapped to `+pi`.

pub mod core;
pub mod decomposition;
mod error;
pub(crate) mod linalg;
pub mod operators;
pub mod spectral;
pub mod toposim;

pub use error::Error;
pub use linalg::{c, cr, wrap_quasienergy, Mat2, C64};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Unitarity and normalization tolerance used by every constructor check.
pub const UNITARITY_TOL: f64 = 1e-12;
