//! Seeded Poisson sampling on boxes and balls, bucket-grid point
//! configurations and Mecke-equation checks.

pub mod config;
pub mod intensity;
pub mod mecke;
pub mod poisson;
pub mod seed;
pub mod window;

pub use config::{GridIndex, PointConfiguration};
pub use intensity::{Density, IntensitySpec};
pub use mecke::{verify_mecke, MeckeReport, MeckeTestFn};
pub use poisson::{poisson_count, sample_homogeneous, sample_poisson, sample_poisson_with};
pub use seed::SeedSpec;
pub use window::{Region, Window};
