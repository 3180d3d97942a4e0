//! Quadrature and Monte Carlo checks of integral-geometric identities, and
//! the exact area law of the typical planar Poisson-Delaunay triangle.

pub mod bp;
pub mod rathie;

pub use bp::{subsphere_constant, verify_bp_linear, verify_bp_spherical, verify_bp_subsphere, BpReport, BpTestFunction};
pub use rathie::{bessel_k16, bessel_k_scaled, rathie_density, rathie_mean, rathie_quantile, rathie_survival};
