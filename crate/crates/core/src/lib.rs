//! Physical bounds on the spectral efficiency of MIMO antennas confined to a
//! conducting surface.
//!
//! The pipeline runs from geometry to bound:
//!
//! 1. [`geometry`] meshes a canonical surface (plate, disc, sphere, cylinder).
//! 2. [`mom`] builds RWG basis functions and assembles the EFIE impedance
//!    matrix `Z`, the Gram matrix `Psi` and the loss matrix `R_omega`.
//! 3. [`spherical`] projects the basis onto regular spherical vector waves,
//!    giving `S` with `R_r = S^H S`.
//! 4. [`modes`] extracts radiation modes, the eigenvalues `rho_n` of the
//!    pencil `(R_r, R_omega)`.
//! 5. [`bound`] turns the `rho_n` into channel gains, water-fills, and
//!    minimizes over the dual parameter `nu` to obtain the bound.
//!
//! [`subregion`] eliminates induced currents so that only a small controlled
//! region is optimized, and [`operators`] bundles everything with the
//! on-disk matrix format.

pub mod bound;
pub mod config;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod modes;
pub mod mom;
pub mod operators;
pub mod quadrature;
pub mod spherical;
pub mod subregion;

pub use error::{Error, Result};

/// Free-space wave impedance in ohms.
pub const Z0: f64 = 376.730_313_668;
