//! Voronoi cells by incremental half-plane clipping, and cone-based
//! stabilization radii.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::{ConvexCell, Point2};
use crate::sampling::{sample_homogeneous, PointConfiguration, Region, SeedSpec};

/// Number of cones around a nucleus for the stabilization radius.
pub const N_CONES: usize = 6;

/// A convex polygon relative to its nucleus whose edges remember the
/// neighbor that cut them (`None` for edges of the initial bounding box).
#[derive(Clone, Debug, PartialEq)]
pub struct TaggedPolygon {
    pub vertices: Vec<Point2>,
    /// `tags[j]` labels the edge from `vertices[j]` to `vertices[j + 1]`.
    pub tags: Vec<Option<usize>>,
}

impl TaggedPolygon {
    fn rectangle(lo: Point2, hi: Point2) -> Self {
        Self {
            vertices: vec![lo, Point2::xy(hi.x(), lo.y()), hi, Point2::xy(lo.x(), hi.y())],
            tags: vec![None; 4],
        }
    }

    /// Keeps `{z : <p, z> <= |p|^2 / 2}`, the side of the bisector of `o`
    /// and `p` containing `o`. Returns whether anything was cut.
    fn clip(&mut self, p: Point2, tag: usize) -> bool {
        let offset = 0.5 * p.norm_sq();
        let side: Vec<f64> = self.vertices.iter().map(|v| p.dot(v) - offset).collect();
        if side.iter().all(|&s| s <= 0.0) {
            return false;
        }
        let n = self.vertices.len();
        let mut verts = Vec::with_capacity(n + 1);
        let mut tags = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (a, b) = (self.vertices[i], self.vertices[j]);
            let (sa, sb) = (side[i], side[j]);
            if sa <= 0.0 {
                verts.push(a);
                tags.push(if sa == 0.0 && sb > 0.0 { Some(tag) } else { self.tags[i] });
            }
            if sa < 0.0 && sb > 0.0 {
                verts.push(a + (b - a) * (sa / (sa - sb)));
                tags.push(Some(tag));
            } else if sa > 0.0 && sb < 0.0 {
                verts.push(a + (b - a) * (sa / (sa - sb)));
                tags.push(self.tags[i]);
            }
        }
        self.vertices = verts;
        self.tags = tags;
        true
    }

    /// Recomputes every vertex between two neighbor edges as the
    /// circumcenter of `o` and the two neighbors, and starts the vertex list
    /// at the smallest vertex. The result depends only on the set of
    /// neighbors that cut the cell, not on the clipping history.
    fn canonicalize(&mut self, rel: impl Fn(usize) -> Point2) {
        let n = self.vertices.len();
        for j in 0..n {
            let prev = self.tags[(j + n - 1) % n];
            if let (Some(a), Some(b)) = (prev, self.tags[j]) {
                if a != b {
                    if let Some(z) = bisector_meet(rel(a), rel(b)) {
                        self.vertices[j] = z;
                    }
                }
            }
        }
        if let Some(start) = (0..n).min_by(|&a, &b| {
            let (u, v) = (self.vertices[a], self.vertices[b]);
            u.x().total_cmp(&v.x()).then(u.y().total_cmp(&v.y()))
        }) {
            self.vertices.rotate_left(start);
            self.tags.rotate_left(start);
        }
    }

    fn max_norm(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// The polygon as a cell, with repeated vertices merged.
    pub fn to_cell(&self) -> ConvexCell {
        let mut verts: Vec<Point2> = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            if verts.last() != Some(v) {
                verts.push(*v);
            }
        }
        while verts.len() > 1 && verts.first() == verts.last() {
            verts.pop();
        }
        ConvexCell::polygon(verts)
    }
}

/// Intersection of the bisectors of `o, p` and `o, q`.
fn bisector_meet(p: Point2, q: Point2) -> Option<Point2> {
    let det = 2.0 * p.cross(&q);
    if det == 0.0 {
        return None;
    }
    let (pp, qq) = (p.norm_sq(), q.norm_sq());
    Some(Point2::xy((q.y() * pp - p.y() * qq) / det, (p.x() * qq - q.x() * pp) / det))
}

/// The Voronoi cell of one nucleus, recentred at the nucleus.
#[derive(Clone, Debug, PartialEq)]
pub struct VoronoiCell {
    pub nucleus: Point2,
    pub nucleus_index: usize,
    pub polygon: TaggedPolygon,
    /// Largest distance from the nucleus to a vertex.
    pub r_max: f64,
}

impl VoronoiCell {
    pub fn cell(&self) -> ConvexCell {
        self.polygon.to_cell()
    }

    /// Indices of the neighbors sharing an edge with the cell.
    pub fn neighbors(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.polygon.tags.iter().flatten().copied().collect();
        out.dedup();
        if out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        out
    }
}

/// Clips the bounding box of the configuration's region by bisectors in
/// order of distance, stopping once every unprocessed point is farther than
/// twice the current cell radius. The result is the exact cell of the
/// finite configuration intersected with that box.
pub fn voronoi_cell_clipped(config: &PointConfiguration<2>, i: usize) -> VoronoiCell {
    let x = config.points()[i];
    let (lo, hi) = bounding_box(config);
    let mut poly = TaggedPolygon::rectangle(lo - x, hi - x);
    let h = config.index().cell_width();
    let reach = (hi - lo).norm() + (x - lo).norm();
    let mut done = 0.0;
    let mut radius = 2.0 * h;
    loop {
        let mut ring: Vec<(f64, usize)> = config
            .query_ball_indices(&x, radius)
            .into_iter()
            .filter(|&j| j != i)
            .map(|j| (config.points()[j].dist_sq(&x), j))
            .filter(|&(d2, _)| d2 > done * done)
            .collect();
        ring.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (_, j) in ring {
            let p = config.points()[j] - x;
            if p.norm_sq() == 0.0 {
                continue;
            }
            poly.clip(p, j);
        }
        done = radius;
        if 2.0 * poly.max_norm() <= done || done > reach {
            break;
        }
        radius *= 2.0;
    }
    poly.canonicalize(|j| config.points()[j] - x);
    let r_max = poly.max_norm();
    VoronoiCell {
        nucleus: x,
        nucleus_index: i,
        polygon: poly,
        r_max,
    }
}

/// The Voronoi cell of point `i`, certified to be unaffected by points
/// outside the configuration's region: the flower ball `B(x, 2 r_max)` must
/// lie inside the region.
pub fn voronoi_cell(config: &PointConfiguration<2>, i: usize) -> Result<VoronoiCell> {
    let vc = voronoi_cell_clipped(config, i);
    let bounded = vc.polygon.tags.iter().all(|t| t.is_some());
    if !bounded || !config.region().contains_ball(&vc.nucleus, 2.0 * vc.r_max) {
        return Err(Error::UnboundedCell { nucleus: vc.nucleus.0.to_vec() });
    }
    Ok(vc)
}

fn bounding_box(config: &PointConfiguration<2>) -> (Point2, Point2) {
    let (mut lo, mut hi) = config.region().bounding_box();
    for p in config.points() {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    // keep the box strictly larger than the hull so box edges never pass
    // through a point
    let pad = 1e-9 * (1.0 + (hi - lo).max_abs());
    (lo - Point2::xy(pad, pad), hi + Point2::xy(pad, pad))
}

/// Index of the cone of half-angle `π/6` around direction `k π/3` that
/// contains the direction of `v`.
pub fn cone_index(v: &Point2) -> usize {
    let a = v.angle().rem_euclid(2.0 * PI);
    ((a / (PI / 3.0)).round() as usize) % N_CONES
}

/// `R = 2 max_i R_i`, where `R_i` is the distance from `x` to the nearest
/// other point of the configuration in cone `i`. `+∞` if a cone is empty.
///
/// The cell of `x` lies in `B(x, R/2)`, so it is determined by the points
/// in `B(x, R)`.
pub fn stabilization_radius_voronoi(config: &PointConfiguration<2>, x: &Point2) -> f64 {
    let mut best = [f64::INFINITY; N_CONES];
    let (lo, hi) = bounding_box(config);
    let reach = (hi - lo).norm() + (*x - lo).norm();
    let mut radius = 2.0 * config.index().cell_width();
    loop {
        for j in config.query_ball_indices(x, radius) {
            let v = config.points()[j] - *x;
            let d = v.norm();
            if d > 0.0 {
                let c = cone_index(&v);
                best[c] = best[c].min(d);
            }
        }
        if best.iter().all(|&b| b <= radius) {
            return 2.0 * best.iter().fold(0.0f64, |m, &b| m.max(b));
        }
        if radius > reach {
            return f64::INFINITY;
        }
        radius *= 2.0;
    }
}

/// `P(R > r)` for the cone stabilization radius at a typical point of a
/// planar Poisson process of intensity `gamma`.
pub fn stabilization_tail(gamma: f64, r: f64) -> f64 {
    let p_cone_empty = (-gamma * PI * (r / 2.0).powi(2) / N_CONES as f64).exp();
    1.0 - (1.0 - p_cone_empty).powi(N_CONES as i32)
}

/// Voronoi cell of point `i` computed by clipping with every other point.
pub fn voronoi_cell_bruteforce(config: &PointConfiguration<2>, i: usize) -> ConvexCell {
    let x = config.points()[i];
    let (lo, hi) = bounding_box(config);
    let mut poly = TaggedPolygon::rectangle(lo - x, hi - x);
    for (j, y) in config.points().iter().enumerate() {
        if j != i {
            poly.clip(*y - x, j);
        }
    }
    poly.canonicalize(|j| config.points()[j] - x);
    poly.to_cell()
}

/// Outcome of resampling a Poisson configuration outside the stopping ball
/// `B(x, 2R)` of a nucleus.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StabilizationReport {
    pub trials: usize,
    /// Trials in which the cell of `x` differed in any vertex bit.
    pub changed_cells: usize,
    /// Trials in which the cone radius of `x` changed.
    pub changed_radius: usize,
    /// Whether the radius recomputed from the points in `B(x, 2R)` alone
    /// equals `R`.
    pub stopping_set: bool,
}

/// Samples `η` of intensity `gamma` on `[-half, half]^2`, takes the nucleus
/// `x` nearest the origin and resamples everything outside `B(x, 2R)`
/// `trials` times.
pub fn stabilization_trials_voronoi(gamma: f64, half: f64, trials: usize, seed: SeedSpec) -> Result<StabilizationReport> {
    let region = Region::Box { lo: Point2::xy(-half, -half), hi: Point2::xy(half, half) };
    let mut rng = seed.rng();
    let pts = sample_homogeneous(gamma, &region, &mut rng);
    let Some(x) = pts.iter().copied().min_by(|a, b| a.norm_sq().total_cmp(&b.norm_sq())) else {
        return Err(Error::InsufficientPoints { needed: 1, available: 0 });
    };
    let cfg = PointConfiguration::new(pts.clone(), region);
    let r = stabilization_radius_voronoi(&cfg, &x);
    if !r.is_finite() || !region.contains_ball(&x, 2.0 * r) {
        return Err(Error::UnboundedCell { nucleus: x.0.to_vec() });
    }
    // nucleus first
    let inner: Vec<Point2> = std::iter::once(x)
        .chain(pts.iter().copied().filter(|p| *p != x && p.dist(&x) <= 2.0 * r))
        .collect();
    let cell_of = |points: Vec<Point2>| -> Result<(Vec<Point2>, f64)> {
        let cfg = PointConfiguration::new(points, region);
        let vc = voronoi_cell(&cfg, 0)?;
        Ok((vc.polygon.vertices, stabilization_radius_voronoi(&cfg, &x)))
    };
    let (reference, _) = cell_of(inner.clone())?;
    let restricted = PointConfiguration::new(inner.clone(), Region::Ball { center: x, radius: 2.0 * r });
    let mut report = StabilizationReport {
        trials,
        stopping_set: stabilization_radius_voronoi(&restricted, &x) == r,
        ..Default::default()
    };
    let (full, _) = cell_of(std::iter::once(x).chain(pts.iter().copied().filter(|p| *p != x)).collect())?;
    if full != reference {
        report.changed_cells += 1;
    }
    for _ in 0..trials {
        let mut all = inner.clone();
        all.extend(sample_homogeneous(gamma, &region, &mut rng).into_iter().filter(|p| p.dist(&x) > 2.0 * r));
        let (verts, r2) = cell_of(all)?;
        if verts != reference {
            report.changed_cells += 1;
        }
        if r2 != r {
            report.changed_radius += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{sample_poisson, IntensitySpec, SeedSpec};

    fn square_region(side: f64) -> Region<2> {
        Region::Box { lo: Point2::xy(-side, -side), hi: Point2::xy(side, side) }
    }

    #[test]
    fn axis_neighbors_give_square() {
        let pts = vec![
            Point2::ORIGIN,
            Point2::xy(2.0, 0.0),
            Point2::xy(-2.0, 0.0),
            Point2::xy(0.0, 2.0),
            Point2::xy(0.0, -2.0),
        ];
        let cfg = PointConfiguration::new(pts, square_region(10.0));
        let vc = voronoi_cell_clipped(&cfg, 0);
        let cell = vc.cell();
        assert_eq!(cell.len(), 4);
        assert!((cell.area() - 4.0).abs() < 1e-12);
        assert!((cell.centered_inradius() - 1.0).abs() < 1e-12);
        let mut nb = vc.neighbors();
        nb.sort_unstable();
        assert_eq!(nb, vec![1, 2, 3, 4]);
    }

    #[test]
    fn hexagonal_neighbors_give_regular_hexagon() {
        let mut pts = vec![Point2::ORIGIN];
        pts.extend((0..6).map(|k| Point2::from_angle(k as f64 * PI / 3.0) * 2.0));
        let cfg = PointConfiguration::new(pts, square_region(10.0));
        let cell = voronoi_cell_clipped(&cfg, 0).cell();
        assert_eq!(cell.len(), 6);
        assert!((cell.centered_inradius() - 1.0).abs() < 1e-12);
        assert!((cell.area() - 2.0 * 3f64.sqrt()).abs() < 1e-12);
        assert!((stabilization_radius_voronoi(&cfg, &Point2::ORIGIN) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn incremental_matches_bruteforce() {
        let region = Region::Box { lo: Point2::xy(0.0, 0.0), hi: Point2::xy(30.0, 30.0) };
        let cfg = sample_poisson(&IntensitySpec::constant(1.0), &region, SeedSpec::new(1, 0)).unwrap();
        let mut checked = 0;
        for i in (0..cfg.len()).step_by(cfg.len() / 150) {
            let Ok(a) = voronoi_cell(&cfg, i) else { continue };
            let a = a.cell();
            let b = voronoi_cell_bruteforce(&cfg, i);
            assert_eq!(a.vertices, b.vertices, "cell {i}");
            checked += 1;
        }
        assert!(checked >= 100, "{checked}");
    }

    #[test]
    fn torus_cells_tile() {
        let side = 12.0;
        let base = sample_poisson(
            &IntensitySpec::constant(1.0),
            &Region::Box { lo: Point2::xy(0.0, 0.0), hi: Point2::xy(side, side) },
            SeedSpec::new(2, 0),
        )
        .unwrap();
        let n = base.len();
        let mut pts = base.points().to_vec();
        for dx in [-1.0, 0.0, 1.0] {
            for dy in [-1.0, 0.0, 1.0] {
                if dx != 0.0 || dy != 0.0 {
                    pts.extend(base.points().iter().map(|p| *p + Point2::xy(dx * side, dy * side)));
                }
            }
        }
        let cfg = PointConfiguration::new(
            pts,
            Region::Box { lo: Point2::xy(-side, -side), hi: Point2::xy(2.0 * side, 2.0 * side) },
        );
        let total: f64 = (0..n).map(|i| voronoi_cell(&cfg, i).unwrap().cell().area()).sum();
        assert!((total - side * side).abs() < 1e-6 * side * side, "{total}");
    }

    #[test]
    fn cell_lies_in_half_stabilization_ball() {
        let region = Region::Box { lo: Point2::xy(0.0, 0.0), hi: Point2::xy(40.0, 40.0) };
        let cfg = sample_poisson(&IntensitySpec::constant(1.0), &region, SeedSpec::new(3, 0)).unwrap();
        for i in 0..cfg.len() {
            let x = cfg.points()[i];
            if !region.contains_ball(&x, 10.0) {
                continue;
            }
            let r = stabilization_radius_voronoi(&cfg, &x);
            let vc = voronoi_cell(&cfg, i).unwrap();
            assert!(vc.r_max <= r / 2.0 + 1e-12);
        }
    }

    #[test]
    fn boundary_cell_is_rejected() {
        let region = Region::Box { lo: Point2::xy(0.0, 0.0), hi: Point2::xy(10.0, 10.0) };
        let cfg = sample_poisson(&IntensitySpec::constant(1.0), &region, SeedSpec::new(4, 0)).unwrap();
        let corner = (0..cfg.len())
            .min_by(|&a, &b| cfg.points()[a].norm().total_cmp(&cfg.points()[b].norm()))
            .unwrap();
        assert!(matches!(voronoi_cell(&cfg, corner), Err(Error::UnboundedCell { .. })));
    }

    #[test]
    fn tail_formula_limits() {
        assert!((stabilization_tail(1.0, 0.0) - 1.0).abs() < 1e-15);
        assert!(stabilization_tail(1.0, 20.0) < 1e-12);
    }

    #[test]
    fn resampling_outside_stopping_ball_keeps_cell() {
        for m in 0..3 {
            let rep = stabilization_trials_voronoi(1.0, 12.0, 30, SeedSpec::new(40 + m, 0)).unwrap();
            assert_eq!(rep.changed_cells, 0);
            assert_eq!(rep.changed_radius, 0);
            assert!(rep.stopping_set);
        }
    }
}
