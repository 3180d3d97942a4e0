//! Convex planar cells and their functionals.

use std::f64::consts::PI;

use super::point::Point2;
use crate::error::{Error, Result};

/// Number of angular nodes for the support-function quadrature of `Phi`.
pub const N_PHI: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellKind {
    VoronoiPolytope,
    DelaunaySimplex,
}

/// A convex polygon with counter-clockwise vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexCell {
    pub vertices: Vec<Point2>,
    pub kind: CellKind,
}

/// Exact and quadrature functionals of a cell containing the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellFunctionals {
    pub area: f64,
    pub perimeter: f64,
    /// Centered inradius: distance from the origin to the nearest edge line.
    pub rho_o: f64,
    /// Centered circumradius: largest vertex norm.
    pub r_o: f64,
    /// `(1/d) * mean over the circle of h_K(u)^d`.
    pub phi: f64,
}

impl ConvexCell {
    pub fn new(vertices: Vec<Point2>, kind: CellKind) -> Self {
        let mut cell = Self { vertices, kind };
        if cell.signed_area() < 0.0 {
            cell.vertices.reverse();
        }
        cell
    }

    pub fn polygon(vertices: Vec<Point2>) -> Self {
        Self::new(vertices, CellKind::VoronoiPolytope)
    }

    pub fn simplex(a: Point2, b: Point2, c: Point2) -> Self {
        Self::new(vec![a, b, c], CellKind::DelaunaySimplex)
    }

    /// Regular `n`-gon with circumradius `radius` centered at the origin.
    pub fn regular(n: usize, radius: f64) -> Self {
        let vertices = (0..n)
            .map(|i| Point2::from_angle(2.0 * PI * i as f64 / n as f64) * radius)
            .collect();
        Self::polygon(vertices)
    }

    /// Axis-aligned square `[-h, h]^2`.
    pub fn square(h: f64) -> Self {
        Self::polygon(vec![
            Point2::xy(-h, -h),
            Point2::xy(h, -h),
            Point2::xy(h, h),
            Point2::xy(-h, h),
        ])
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    fn signed_area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| a.cross(&b)).sum::<f64>()
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(&b)).sum()
    }

    /// Signed distance from the origin to the nearest edge line; positive
    /// iff the origin is interior.
    pub fn centered_inradius(&self) -> f64 {
        self.edges()
            .map(|(a, b)| {
                let e = b - a;
                let len = e.norm();
                if len == 0.0 {
                    f64::INFINITY
                } else {
                    // CCW order: interior lies to the left of each edge.
                    e.cross(&(Point2::ORIGIN - a)) / len
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn centered_circumradius(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Support function `h_K(u) = max_v <v, u>`.
    pub fn support(&self, u: &Point2) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Phi(K)` by the angular trapezoid rule with `n` nodes.
    pub fn phi(&self, n: usize) -> f64 {
        let sum: f64 = (0..n)
            .map(|i| {
                let h = self.support(&Point2::from_angle(2.0 * PI * i as f64 / n as f64));
                h * h
            })
            .sum();
        0.5 * sum / n as f64
    }

    pub fn translate(&self, by: Point2) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| *v + by).collect(),
            kind: self.kind,
        }
    }

    pub fn scale(&self, lambda: f64) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| *v * lambda).collect(),
            kind: self.kind,
        }
    }

    /// Intersection with the half-plane `{z : <normal, z> <= offset}`.
    ///
    /// Vertices on the boundary line are kept; a half-plane containing the
    /// whole polygon returns it unchanged.
    pub fn clip(&self, normal: Point2, offset: f64) -> Self {
        let n = self.vertices.len();
        let side: Vec<f64> = self
            .vertices
            .iter()
            .map(|v| normal.dot(v) - offset)
            .collect();
        if side.iter().all(|&s| s <= 0.0) {
            return self.clone();
        }
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (a, b) = (self.vertices[i], self.vertices[j]);
            let (sa, sb) = (side[i], side[j]);
            if sa <= 0.0 {
                out.push(a);
            }
            if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
                let t = sa / (sa - sb);
                out.push(a + (b - a) * t);
            }
        }
        Self {
            vertices: out,
            kind: self.kind,
        }
    }

    pub fn functionals(&self) -> Result<CellFunctionals> {
        cell_functionals(self)
    }
}

/// Area, perimeter, centered in/circumradius and `Phi` of a cell.
pub fn cell_functionals(cell: &ConvexCell) -> Result<CellFunctionals> {
    let rho_o = cell.centered_inradius();
    if !(rho_o > 0.0) {
        return Err(Error::OriginNotInterior(rho_o));
    }
    Ok(CellFunctionals {
        area: cell.area(),
        perimeter: cell.perimeter(),
        rho_o,
        r_o: cell.centered_circumradius(),
        phi: cell.phi(N_PHI),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn square_functionals() {
        let f = cell_functionals(&ConvexCell::square(1.0)).unwrap();
        assert_eq!(f.area, 4.0);
        assert_eq!(f.perimeter, 8.0);
        assert_eq!(f.rho_o, 1.0);
        assert!((f.r_o - 2f64.sqrt()).abs() < 1e-15);
        // h(u) = |cos| + |sin| gives Phi = (1 + 2/pi) / 2.
        assert!((f.phi - (1.0 + 2.0 / PI) / 2.0).abs() < 1e-6);
    }

    #[test]
    fn phi_of_disk_is_one_over_d() {
        let disk = ConvexCell::regular(4096, 1.0);
        assert!((disk.phi(N_PHI) - 0.5).abs() < 1e-4);
    }

    #[test]
    fn origin_outside_is_rejected() {
        let shifted = ConvexCell::square(1.0).translate(Point2::xy(3.0, 0.0));
        assert!(matches!(cell_functionals(&shifted), Err(Error::OriginNotInterior(_))));
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let cw = ConvexCell::polygon(vec![
            Point2::xy(-1.0, -1.0),
            Point2::xy(-1.0, 1.0),
            Point2::xy(1.0, 1.0),
            Point2::xy(1.0, -1.0),
        ]);
        assert_eq!(cw.centered_inradius(), 1.0);
    }

    #[test]
    fn phi_is_d_homogeneous() {
        let cell = ConvexCell::polygon(vec![
            Point2::xy(2.0, 0.1),
            Point2::xy(-1.0, 1.3),
            Point2::xy(-0.7, -1.1),
        ]);
        let base = cell.phi(N_PHI);
        for lambda in [0.5, 2.0] {
            let scaled = cell.scale(lambda).phi(N_PHI);
            assert!((scaled - lambda * lambda * base).abs() < 1e-12 * scaled.max(1.0));
        }
    }

    #[test]
    fn clipping_square_by_diagonal() {
        let half = ConvexCell::square(1.0).clip(Point2::xy(1.0, 1.0), 0.0);
        assert!((half.area() - 2.0).abs() < 1e-15);
        let untouched = ConvexCell::square(1.0).clip(Point2::xy(1.0, 0.0), 5.0);
        assert_eq!(untouched, ConvexCell::square(1.0));
    }

    /// Monte Carlo area of `{y : H_{2y} meets K}`, where `H_{2y}` is the
    /// bisector of `o` and `2y`. For `o` in `K` this is `|y|^2 <= max_v <v, y>`.
    fn mc_area_of_hyperplane_set(cell: &ConvexCell, n: usize, seed: u64) -> (f64, f64) {
        let r = cell.centered_circumradius();
        let box_area = (2.0 * r) * (2.0 * r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hits = (0..n)
            .filter(|_| {
                let y = Point2::xy(rng.random_range(-r..r), rng.random_range(-r..r));
                let reach = cell.vertices.iter().map(|v| v.dot(&y)).fold(f64::NEG_INFINITY, f64::max);
                y.norm_sq() <= reach
            })
            .count();
        let p = hits as f64 / n as f64;
        (box_area * p, box_area * (p * (1.0 - p) / n as f64).sqrt())
    }

    #[test]
    fn phi_matches_hyperplane_set_area() {
        let square = ConvexCell::square(1.0);
        let (mc, se) = mc_area_of_hyperplane_set(&square, 400_000, 3);
        let lhs = 2.0 * PI * square.phi(N_PHI);
        assert!((lhs - mc).abs() <= 3.0 * se, "{lhs} vs {mc} ± {se}");

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..5 {
            // random convex polygon around the origin: sorted random angles
            let mut angles: Vec<f64> = (0..7).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
            angles.sort_by(f64::total_cmp);
            let verts: Vec<Point2> = angles
                .iter()
                .map(|&a| Point2::from_angle(a) * rng.random_range(0.5..2.0))
                .collect();
            let poly = ConvexCell::polygon(hull(verts));
            if poly.centered_inradius() <= 0.0 {
                continue;
            }
            let (mc, se) = mc_area_of_hyperplane_set(&poly, 200_000, 100 + trial);
            let lhs = 2.0 * PI * poly.phi(N_PHI);
            assert!((lhs - mc).abs() <= 3.0 * se + 1e-6, "{lhs} vs {mc} ± {se}");
        }
    }

    fn hull(mut pts: Vec<Point2>) -> Vec<Point2> {
        pts.sort_by(|a, b| a.x().total_cmp(&b.x()).then(a.y().total_cmp(&b.y())));
        let mut lower: Vec<Point2> = Vec::new();
        for p in &pts {
            while lower.len() >= 2
                && (lower[lower.len() - 1] - lower[lower.len() - 2]).cross(&(*p - lower[lower.len() - 2])) <= 0.0
            {
                lower.pop();
            }
            lower.push(*p);
        }
        let mut upper: Vec<Point2> = Vec::new();
        for p in pts.iter().rev() {
            while upper.len() >= 2
                && (upper[upper.len() - 1] - upper[upper.len() - 2]).cross(&(*p - upper[upper.len() - 2])) <= 0.0
            {
                upper.pop();
            }
            upper.push(*p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        lower
    }
}
