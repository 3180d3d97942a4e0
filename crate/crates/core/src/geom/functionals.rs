//! Size and deviation functionals of cells.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::point::Point2;
use super::polygon::{CellKind, ConvexCell};
use super::sphere::circumsphere;
use crate::error::{Error, Result};

/// Size functionals used for exceedances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeFunctional {
    /// Area.
    Volume,
    /// Largest disk centered at the origin contained in the cell.
    CenteredInradius,
    /// Inradius of a triangle.
    Inradius,
    /// Circumradius of a triangle, or the centered circumradius of a polygon.
    Circumradius,
    /// First intrinsic volume, half the perimeter in the plane.
    #[serde(rename = "intrinsic_v1")]
    IntrinsicV1,
}

impl SizeFunctional {
    /// Homogeneity degree `k` in `R^2`.
    pub fn degree(self) -> u32 {
        match self {
            SizeFunctional::Volume => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SizeFunctional::Volume => "volume",
            SizeFunctional::CenteredInradius => "centered_inradius",
            SizeFunctional::Inradius => "inradius",
            SizeFunctional::Circumradius => "circumradius",
            SizeFunctional::IntrinsicV1 => "intrinsic_v1",
        }
    }

    pub fn evaluate(self, cell: &ConvexCell) -> Result<f64> {
        size_functional(self, cell)
    }
}

pub fn size_functional(kind: SizeFunctional, cell: &ConvexCell) -> Result<f64> {
    match kind {
        SizeFunctional::Volume => Ok(cell.area()),
        SizeFunctional::CenteredInradius => {
            let rho = cell.centered_inradius();
            if rho > 0.0 {
                Ok(rho)
            } else {
                Err(Error::OriginNotInterior(rho))
            }
        }
        SizeFunctional::Inradius => {
            if cell.len() != 3 {
                return Err(Error::Domain("inradius is defined here for triangles only".into()));
            }
            let perimeter = cell.perimeter();
            if perimeter == 0.0 {
                return Err(Error::DegenerateSimplex);
            }
            Ok(2.0 * cell.area() / perimeter)
        }
        SizeFunctional::Circumradius => {
            if cell.kind == CellKind::DelaunaySimplex && cell.len() == 3 {
                let s = circumsphere(&cell.vertices);
                if s.degenerate {
                    return Err(Error::DegenerateSimplex);
                }
                Ok(s.radius)
            } else {
                Ok(cell.centered_circumradius())
            }
        }
        SizeFunctional::IntrinsicV1 => Ok(cell.perimeter() / 2.0),
    }
}

/// `(r_o - rho_o) / (r_o + rho_o)` for a cell containing the origin.
pub fn deviation_voronoi(cell: &ConvexCell) -> Result<f64> {
    let rho = cell.centered_inradius();
    if !(rho > 0.0) {
        return Err(Error::OriginNotInterior(rho));
    }
    let r = cell.centered_circumradius();
    Ok((r - rho) / (r + rho))
}

/// Which vertex correspondences are admissible when matching a triangle to
/// the reference regular triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Matching {
    #[default]
    Cyclic,
    AllPermutations,
}

/// Coarse rotation grid for the deviation minimization.
pub const N_ROT: usize = 720;

/// Shape deviation of a triangle from the regular triangle.
///
/// The triangle is moved so its circumcircle is the unit circle; the result
/// is the smallest `alpha` such that some rotation (optionally composed with
/// a reflection) brings each vertex within chord distance `alpha` of its
/// matched vertex of the regular triangle with vertices at angles `2 pi i / 3`.
pub fn deviation_delaunay(cell: &ConvexCell, matching: Matching) -> Result<f64> {
    let angles = normalized_angles(cell)?;
    let perms: &[[usize; 3]] = match matching {
        Matching::Cyclic => &[[0, 1, 2], [1, 2, 0], [2, 0, 1]],
        Matching::AllPermutations => &[
            [0, 1, 2],
            [1, 2, 0],
            [2, 0, 1],
            [0, 2, 1],
            [2, 1, 0],
            [1, 0, 2],
        ],
    };
    let step = 2.0 * PI / N_ROT as f64;
    let mut best = f64::INFINITY;
    for reflect in [false, true] {
        let phi: Vec<f64> = angles.iter().map(|&a| if reflect { -a } else { a }).collect();
        for perm in perms {
            let offsets: [f64; 3] =
                std::array::from_fn(|i| phi[perm[i]] - 2.0 * PI * i as f64 / 3.0);
            let cost = |alpha: f64| matching_cost(alpha, &offsets);
            let (grid_best, _) = (0..N_ROT)
                .map(|j| {
                    let a = j as f64 * step;
                    (a, cost(a))
                })
                .fold((0.0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
            let refined = golden_section(cost, grid_best - step, grid_best + step, 1e-12);
            best = best.min(cost(refined)).min(cost(grid_best));
        }
    }
    Ok(best)
}

/// Max chord distance between `e^{i(alpha + offset)}` and 1 over matched pairs.
pub(crate) fn matching_cost(alpha: f64, offsets: &[f64; 3]) -> f64 {
    offsets
        .iter()
        .map(|o| 2.0 * ((alpha + o) / 2.0).sin().abs())
        .fold(0.0, f64::max)
}

/// Vertex angles after recentring at the circumcenter.
pub(crate) fn normalized_angles(cell: &ConvexCell) -> Result<[f64; 3]> {
    if cell.len() != 3 {
        return Err(Error::DegenerateSimplex);
    }
    let s = circumsphere(&cell.vertices);
    if s.degenerate || s.radius == 0.0 {
        return Err(Error::DegenerateSimplex);
    }
    Ok(std::array::from_fn(|i| (cell.vertices[i] - s.center).angle()))
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    (lo + hi) / 2.0
}

/// Recentred copy of a triangle with its circumcenter at the origin.
pub fn recentre_simplex(cell: &ConvexCell) -> Result<(ConvexCell, Point2)> {
    let s = circumsphere(&cell.vertices);
    if s.degenerate {
        return Err(Error::DegenerateSimplex);
    }
    Ok((cell.translate(-s.center), s.center))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equilateral(rotation: f64, scale: f64, shift: Point2) -> ConvexCell {
        let v = |i: usize| Point2::from_angle(rotation + 2.0 * PI * i as f64 / 3.0) * scale + shift;
        ConvexCell::simplex(v(0), v(1), v(2))
    }

    #[test]
    fn size_functionals_on_simple_cells() {
        let sq = ConvexCell::square(1.0);
        assert_eq!(size_functional(SizeFunctional::Volume, &sq).unwrap(), 4.0);
        assert_eq!(size_functional(SizeFunctional::IntrinsicV1, &sq).unwrap(), 4.0);
        let disk = ConvexCell::regular(4096, 3.0);
        let rho = size_functional(SizeFunctional::CenteredInradius, &disk).unwrap();
        assert!((rho - 3.0).abs() < 1e-5);
        let tri = ConvexCell::simplex(Point2::xy(0.0, 0.0), Point2::xy(3.0, 0.0), Point2::xy(0.0, 4.0));
        assert!((size_functional(SizeFunctional::Inradius, &tri).unwrap() - 1.0).abs() < 1e-15);
        assert!((size_functional(SizeFunctional::Circumradius, &tri).unwrap() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn size_homogeneity() {
        let tri = ConvexCell::simplex(Point2::xy(0.3, -0.2), Point2::xy(1.7, 0.4), Point2::xy(-0.5, 1.1));
        for kind in [
            SizeFunctional::Volume,
            SizeFunctional::Inradius,
            SizeFunctional::Circumradius,
            SizeFunctional::IntrinsicV1,
        ] {
            let base = size_functional(kind, &tri).unwrap();
            let scaled = size_functional(kind, &tri.scale(2.5)).unwrap();
            let expect = base * 2.5f64.powi(kind.degree() as i32);
            assert!((scaled - expect).abs() < 1e-12 * expect, "{kind:?}");
        }
    }

    /// `V_1 = (A(K + eps B) - A(K)) / (2 eps)` with the quadratic term
    /// removed by Richardson extrapolation; `K + eps B` is computed as a
    /// Minkowski sum with a fine polygonal disk.
    #[test]
    fn intrinsic_v1_matches_steiner_extrapolation() {
        let sq = ConvexCell::square(1.0);
        let area_dilated = |eps: f64| {
            let disk = ConvexCell::regular(4096, eps);
            minkowski_area(&sq, &disk)
        };
        let a0 = sq.area();
        let eps = 1e-2;
        let d1 = (area_dilated(eps) - a0) / eps;
        let d2 = (area_dilated(2.0 * eps) - a0) / (2.0 * eps);
        let two_v1 = 2.0 * d1 - d2;
        let v1 = size_functional(SizeFunctional::IntrinsicV1, &sq).unwrap();
        assert!((two_v1 / 2.0 - v1).abs() < 1e-4, "{} vs {v1}", two_v1 / 2.0);
    }

    fn minkowski_area(a: &ConvexCell, b: &ConvexCell) -> f64 {
        // Edge-merge of two CCW convex polygons starting at their lowest vertices.
        let start = |p: &ConvexCell| {
            (0..p.len())
                .min_by(|&i, &j| {
                    let (u, v) = (p.vertices[i], p.vertices[j]);
                    u.y().total_cmp(&v.y()).then(u.x().total_cmp(&v.x()))
                })
                .unwrap()
        };
        let (ia, ib) = (start(a), start(b));
        let (na, nb) = (a.len(), b.len());
        let edge = |p: &ConvexCell, s: usize, i: usize, n: usize| {
            p.vertices[(s + i + 1) % n] - p.vertices[(s + i) % n]
        };
        let mut cur = a.vertices[ia] + b.vertices[ib];
        let mut verts = vec![cur];
        let (mut i, mut j) = (0, 0);
        while i < na || j < nb {
            let step = if i == na {
                j += 1;
                edge(b, ib, j - 1, nb)
            } else if j == nb {
                i += 1;
                edge(a, ia, i - 1, na)
            } else {
                let (ea, eb) = (edge(a, ia, i, na), edge(b, ib, j, nb));
                if ea.cross(&eb) >= 0.0 {
                    i += 1;
                    ea
                } else {
                    j += 1;
                    eb
                }
            };
            cur = cur + step;
            verts.push(cur);
        }
        verts.pop();
        ConvexCell::polygon(verts).area()
    }

    #[test]
    fn deviation_voronoi_values() {
        let disk = ConvexCell::regular(4096, 1.0);
        assert!(deviation_voronoi(&disk).unwrap() < 1e-6);
        let sq = ConvexCell::square(1.0);
        let expect = (2f64.sqrt() - 1.0) / (2f64.sqrt() + 1.0);
        assert!((deviation_voronoi(&sq).unwrap() - expect).abs() < 1e-15);
        assert!((expect - 0.17157).abs() < 1e-5);
    }

    #[test]
    fn deviation_voronoi_of_elongated_triangle() {
        // vertices (2,0), (-1,1), (-1,-1); the origin is interior.
        let tri = ConvexCell::polygon(vec![Point2::xy(2.0, 0.0), Point2::xy(-1.0, 1.0), Point2::xy(-1.0, -1.0)]);
        // nearest edge line is the one through (2,0) and (-1,1)
        let rho = 2.0 / 10f64.sqrt();
        let r = 2.0;
        let expect = (r - rho) / (r + rho);
        let value = deviation_voronoi(&tri).unwrap();
        assert!((value - expect).abs() < 1e-14);
        assert!(value > 0.3);
    }

    #[test]
    fn deviation_functionals_are_scale_invariant() {
        let tri = ConvexCell::polygon(vec![Point2::xy(2.0, 0.1), Point2::xy(-1.0, 1.0), Point2::xy(-0.9, -1.3)]);
        let a = deviation_voronoi(&tri).unwrap();
        let b = deviation_voronoi(&tri.scale(7.0)).unwrap();
        assert!((a - b).abs() < 1e-15);
        let s = ConvexCell::simplex(Point2::xy(1.0, 0.0), Point2::xy(-1.0, 0.0), Point2::xy(0.2, 1.0));
        let c = deviation_delaunay(&s, Matching::Cyclic).unwrap();
        let d = deviation_delaunay(&s.scale(0.01), Matching::Cyclic).unwrap();
        assert!((c - d).abs() < 1e-9);
    }

    #[test]
    fn regular_triangle_has_zero_deviation() {
        for (rot, scale) in [(0.0, 1.0), (0.37, 5.0), (2.0, 0.01)] {
            let tri = equilateral(rot, scale, Point2::xy(3.0, -2.0));
            assert!(deviation_delaunay(&tri, Matching::Cyclic).unwrap() < 1e-6);
            let reflected = ConvexCell::simplex(
                Point2::xy(tri.vertices[0].x(), -tri.vertices[0].y()),
                Point2::xy(tri.vertices[1].x(), -tri.vertices[1].y()),
                Point2::xy(tri.vertices[2].x(), -tri.vertices[2].y()),
            );
            assert!(deviation_delaunay(&reflected, Matching::Cyclic).unwrap() < 1e-6);
        }
    }

    #[test]
    fn right_isoceles_matches_brute_force() {
        let tri = ConvexCell::simplex(Point2::xy(1.0, 0.0), Point2::xy(-1.0, 0.0), Point2::xy(0.0, 1.0));
        let value = deviation_delaunay(&tri, Matching::Cyclic).unwrap();
        assert!(value > 0.1);

        // Brute force: 10^5 rotation angles, both orientations, all cyclic matchings.
        let angles = normalized_angles(&tri).unwrap();
        let mut brute = f64::INFINITY;
        for reflect in [false, true] {
            for shift in 0..3 {
                let offsets: [f64; 3] = std::array::from_fn(|i| {
                    let a = angles[(i + shift) % 3];
                    (if reflect { -a } else { a }) - 2.0 * PI * i as f64 / 3.0
                });
                for j in 0..100_000 {
                    let alpha = 2.0 * PI * j as f64 / 100_000.0;
                    brute = brute.min(matching_cost(alpha, &offsets));
                }
            }
        }
        assert!(value <= brute + 1e-12);
        assert!(brute - value < 1e-4, "{value} vs {brute}");

        let all = deviation_delaunay(&tri, Matching::AllPermutations).unwrap();
        assert!(all <= value + 1e-12);
    }

    #[test]
    fn degenerate_triangle_errors() {
        let flat = ConvexCell::simplex(Point2::xy(0.0, 0.0), Point2::xy(1.0, 0.0), Point2::xy(2.0, 0.0));
        assert_eq!(deviation_delaunay(&flat, Matching::Cyclic), Err(Error::DegenerateSimplex));
    }
}
