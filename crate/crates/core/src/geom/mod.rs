//! Low-level geometry: points, the total order on `R^d`, spheres through
//! point tuples, simplex volumes, convex cells and their functionals.

pub mod constants;
pub mod functionals;
pub(crate) mod linalg;
pub mod order;
pub mod point;
pub mod polygon;
pub mod sphere;

pub use constants::{delaunay_center_intensity, grassmann_constant, kappa, omega, DimConstants};
pub use functionals::{
    deviation_delaunay, deviation_voronoi, recentre_simplex, size_functional, Matching,
    SizeFunctional,
};
pub use order::{compare_total_order, TotalOrderKey};
pub use point::{Point, Point2, Point3};
pub use polygon::{cell_functionals, CellFunctionals, CellKind, ConvexCell, N_PHI};
pub use sphere::{circumsphere, simplex_volume, tol_geom_at, SphereThrough, TOL_GEOM};
