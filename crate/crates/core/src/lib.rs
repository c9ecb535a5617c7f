//! Chernoff's distribution and the first-passage machinery of Brownian
//! motion minus a parabola.
//!
//! * [`airy`]: complex Airy and Scorer functions.
//! * [`quadrature`]: adaptive and truncated quadrature with honest error bounds.
//! * [`chernoff`]: h_x, hitting and survival probabilities, phi, psi, densities.
//! * [`verify`]: named numerical checks of the identities linking all of these.
//! * [`mcsim`]: an independent Monte Carlo oracle.

pub mod airy;
pub mod chernoff;
pub mod mcsim;
mod dd;
pub mod quadrature;
pub mod verify;

pub use num_complex::Complex64;
