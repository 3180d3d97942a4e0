//! Poisson point processes and their exceedance center processes.
//!
//! The crate simulates Poisson processes, builds the thinned processes of
//! points whose k-nearest-neighbor ball, Voronoi cell or Delaunay cell is
//! unusually large, calibrates the thresholds that make the expected number
//! of exceedances constant, and checks the Poisson and Gumbel limits of these
//! processes with computable diagnostics. Monte Carlo checks of the Mecke
//! formula and Blaschke-Petkantschin type identities live in [`integral`] and
//! [`sampling::mecke`].
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod diag;
pub mod error;
pub mod experiment;
pub mod geom;
pub mod integral;
pub mod knn;
pub mod mosaic;
pub mod quad;
pub mod sampling;

pub use error::{Error, Result};
