//! Shared numerical kernels: sampled-grid quadrature, Gauss–Legendre rules,
//! special functions, finite-difference stencils, power-law fitting and
//! oscillatory (Filon-type) integration.

pub mod fd;
pub mod fit;
pub mod gauss;
pub mod interp;
pub mod oscillatory;
pub mod quad;
pub mod special;
