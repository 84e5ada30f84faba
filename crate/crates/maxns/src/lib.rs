//! Numerical toolkit for the one-dimensional linearized compressible Navier-Stokes
//! system with Maxwell's law on `(0, pi)`:
//!
//! ```text
//! rho_t + rho_s u_x        = f
//! u_t   + b rho_x - S_x/rho_s = 0
//! S_t   + S/kappa - (mu/kappa) u_x = 0,      u(t,0) = u(t,pi) = 0
//! ```
//!
//! The crate computes the modal spectrum and the biorthogonal eigenfamilies,
//! synthesizes minimum-energy null controls mode by mode through 3x3 Gramians,
//! evolves states exactly (modal) and by finite differences, builds Gaussian-beam
//! solutions of the adjoint system showing that localized observability fails,
//! and checks Ingham-type Gram bounds for the hyperbolic frequency family.

pub mod basis;
pub mod beam;
pub mod control;
pub mod dynamics;
pub mod error;
pub mod ingham;
pub mod io;
pub mod params;
pub mod quad;
pub mod spectrum;
pub mod state;

mod par;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use params::{derive_constants, PhysicalParams, RawParams};
