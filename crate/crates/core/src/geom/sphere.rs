//! Spheres through point tuples and simplex volumes.

use super::linalg;
use super::point::Point;

/// Relative tolerance for general-position and equidistance tests.
pub const TOL_GEOM: f64 = 1e-9;

/// Absolute equidistance tolerance at the scale of the given points.
pub fn tol_geom_at<const D: usize>(points: &[Point<D>]) -> f64 {
    let scale = points.iter().fold(0.0f64, |m, p| m.max(p.max_abs()));
    TOL_GEOM * (1.0 + scale)
}

/// The unique `(m-1)`-sphere through `m` points in general position.
///
/// When the points are affinely dependent the result is flagged
/// `degenerate` and carries the origin as center with radius zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereThrough<const D: usize> {
    pub center: Point<D>,
    pub radius: f64,
    pub degenerate: bool,
}

impl<const D: usize> SphereThrough<D> {
    fn degenerate() -> Self {
        Self {
            center: Point::ORIGIN,
            radius: 0.0,
            degenerate: true,
        }
    }
}

/// Center and radius of the sphere through `points` (`1 <= m <= D+1`).
pub fn circumsphere<const D: usize>(points: &[Point<D>]) -> SphereThrough<D> {
    let m = points.len();
    if m == 0 || m > D + 1 {
        return SphereThrough::degenerate();
    }
    let base = points[0];
    if m == 1 {
        return SphereThrough {
            center: base,
            radius: 0.0,
            degenerate: false,
        };
    }
    let n = m - 1;
    let mut edges = [[0.0; D]; 3];
    for (j, p) in points[1..].iter().enumerate() {
        edges[j] = (*p - base).0;
    }
    let dot = |a: &[f64; D], b: &[f64; D]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut gram = [[0.0; 3]; 3];
    for i in 0..n {
        for j in 0..n {
            gram[i][j] = dot(&edges[i], &edges[j]);
        }
    }
    let diag_product: f64 = (0..n).map(|i| gram[i][i]).product();
    if diag_product == 0.0 {
        return SphereThrough::degenerate();
    }
    // Normalized Gram determinant: squared sine of the spanned "angle".
    let ratio = linalg::det(gram, n) / diag_product;
    if ratio <= TOL_GEOM * TOL_GEOM {
        return SphereThrough::degenerate();
    }
    let mut system = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for i in 0..n {
        for j in 0..n {
            system[i][j] = 2.0 * gram[i][j];
        }
        rhs[i] = gram[i][i];
    }
    let Some(lambda) = linalg::solve(system, rhs, n, 1e-14) else {
        return SphereThrough::degenerate();
    };
    let mut offset = Point::<D>::ORIGIN;
    for j in 0..n {
        offset = offset + Point(edges[j]) * lambda[j];
    }
    SphereThrough {
        center: base + offset,
        radius: offset.norm(),
        degenerate: false,
    }
}

/// `k`-dimensional volume of the convex hull of `k+1` points (`k <= D`).
pub fn simplex_volume<const D: usize>(points: &[Point<D>]) -> f64 {
    let k = points.len().saturating_sub(1);
    if k == 0 || k > D {
        return 0.0;
    }
    let base = points[0];
    let mut gram = [[0.0; 3]; 3];
    let edges: Vec<Point<D>> = points[1..].iter().map(|p| *p - base).collect();
    for i in 0..k {
        for j in 0..k {
            gram[i][j] = edges[i].dot(&edges[j]);
        }
    }
    let det = linalg::det(gram, k).max(0.0);
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    det.sqrt() / factorial
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Point2, Point3};
    use proptest::prelude::*;

    #[test]
    fn right_triangle_circumcenter() {
        let s = circumsphere(&[Point2::xy(0.0, 0.0), Point2::xy(1.0, 0.0), Point2::xy(0.0, 1.0)]);
        assert!(!s.degenerate);
        assert!((s.center.x() - 0.5).abs() < 1e-15 && (s.center.y() - 0.5).abs() < 1e-15);
        assert!((s.radius - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn single_point_is_its_own_center() {
        let s = circumsphere(&[Point2::xy(3.0, 4.0)]);
        assert_eq!(s.center, Point2::xy(3.0, 4.0));
        assert_eq!(s.radius, 0.0);
        assert!(!s.degenerate);
    }

    #[test]
    fn collinear_is_flagged_with_origin_center() {
        let s = circumsphere(&[Point2::xy(0.0, 0.0), Point2::xy(1.0, 0.0), Point2::xy(2.0, 0.0)]);
        assert!(s.degenerate);
        assert_eq!(s.center, Point2::ORIGIN);
    }

    #[test]
    fn two_points_give_midpoint() {
        let s = circumsphere(&[Point3::new([0.0, 0.0, 0.0]), Point3::new([2.0, 0.0, 0.0])]);
        assert_eq!(s.center, Point3::new([1.0, 0.0, 0.0]));
        assert_eq!(s.radius, 1.0);
    }

    #[test]
    fn tetrahedron_circumsphere() {
        let pts = [
            Point3::new([1.0, 0.0, 0.0]),
            Point3::new([0.0, 1.0, 0.0]),
            Point3::new([0.0, 0.0, 1.0]),
            Point3::new([0.0, 0.0, 0.0]),
        ];
        let s = circumsphere(&pts);
        for p in pts {
            assert!((p.dist(&s.center) - s.radius).abs() < 1e-14);
        }
        assert!((s.radius - 0.75f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn triangle_in_three_space() {
        let pts = [
            Point3::new([1.0, 0.0, 2.0]),
            Point3::new([0.0, 1.0, 2.0]),
            Point3::new([-1.0, 0.0, 2.0]),
        ];
        let s = circumsphere(&pts);
        assert!(s.center.dist(&Point3::new([0.0, 0.0, 2.0])) < 1e-14);
        assert!((s.radius - 1.0).abs() < 1e-14);
    }

    #[test]
    fn simplex_volumes() {
        let tri = [Point2::xy(0.0, 0.0), Point2::xy(1.0, 0.0), Point2::xy(0.0, 1.0)];
        assert_eq!(simplex_volume(&tri), 0.5);
        assert_eq!(simplex_volume(&[Point2::xy(0.0, 0.0), Point2::xy(2.0, 0.0)]), 2.0);
        let line = [Point2::xy(0.0, 0.0), Point2::xy(1.0, 0.0), Point2::xy(2.0, 0.0)];
        assert_eq!(simplex_volume(&line), 0.0);
        let tet = [
            Point3::new([0.0, 0.0, 0.0]),
            Point3::new([1.0, 0.0, 0.0]),
            Point3::new([0.0, 1.0, 0.0]),
            Point3::new([0.0, 0.0, 1.0]),
        ];
        assert!((simplex_volume(&tet) - 1.0 / 6.0).abs() < 1e-15);
    }

    fn pt() -> impl Strategy<Value = Point2> {
        (-50.0..50.0f64, -50.0..50.0f64).prop_map(|(x, y)| Point2::xy(x, y))
    }

    proptest! {
        #[test]
        fn circumcenter_equidistant_and_translation_equivariant(
            a in pt(), b in pt(), c in pt(), shift in pt()
        ) {
            let s = circumsphere(&[a, b, c]);
            prop_assume!(!s.degenerate);
            let area = simplex_volume(&[a, b, c]);
            // Keep away from near-collinear triples whose circumcenters blow up.
            prop_assume!(area > 1e-3 * a.dist(&b).max(b.dist(&c)).max(a.dist(&c)).powi(2));
            let tol = tol_geom_at(&[a, b, c, s.center]) * (1.0 + s.radius);
            for p in [a, b, c] {
                prop_assert!((p.dist(&s.center) - s.radius).abs() <= tol * 10.0);
            }
            let t = circumsphere(&[a + shift, b + shift, c + shift]);
            prop_assert!((t.center - shift).dist(&s.center) <= 1e-7 * (1.0 + s.radius));
        }

        #[test]
        fn simplex_volume_permutation_and_scaling(a in pt(), b in pt(), c in pt(), lambda in 0.1..10.0f64) {
            let v = simplex_volume(&[a, b, c]);
            let w = simplex_volume(&[c, a, b]);
            prop_assert!((v - w).abs() <= 1e-9 * (1.0 + v));
            let scaled = simplex_volume(&[a * lambda, b * lambda, c * lambda]);
            prop_assert!((scaled - lambda * lambda * v).abs() <= 1e-8 * (1.0 + scaled));
            // rigid motion: rotation by a fixed angle
            let rot = |p: Point2| Point2::xy(0.6 * p.x() - 0.8 * p.y(), 0.8 * p.x() + 0.6 * p.y());
            let r = simplex_volume(&[rot(a), rot(b), rot(c)]);
            prop_assert!((r - v).abs() <= 1e-8 * (1.0 + v));
        }
    }
}
