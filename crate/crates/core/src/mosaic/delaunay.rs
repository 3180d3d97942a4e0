//! Delaunay triangles of a planar configuration, read off Voronoi vertices
//! and validated with exact incircle tests under symbolic perturbation.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};

use robust::Coord;

use super::voronoi::voronoi_cell_clipped;
use crate::error::{Error, Result};
use crate::geom::{circumsphere, ConvexCell, Point2};
use crate::sampling::{PointConfiguration, Region};

/// A Delaunay triangle with its circumcircle.
#[derive(Clone, Debug, PartialEq)]
pub struct DelaunayCell {
    /// Indices into the configuration, increasing.
    pub indices: [usize; 3],
    /// The vertices in counter-clockwise order.
    pub points: [Point2; 3],
    pub center: Point2,
    pub radius: f64,
}

impl DelaunayCell {
    pub fn simplex(&self) -> ConvexCell {
        ConvexCell::simplex(self.points[0], self.points[1], self.points[2])
    }

    /// The triangle translated so its circumcenter is the origin.
    pub fn recentred(&self) -> ConvexCell {
        self.simplex().translate(Point2::ORIGIN - self.center)
    }
}

fn coord(p: &Point2) -> Coord<f64> {
    Coord { x: p.x(), y: p.y() }
}

pub(crate) fn orient(a: &Point2, b: &Point2, c: &Point2) -> f64 {
    robust::orient2d(coord(a), coord(b), coord(c))
}

fn lex(a: &Point2, b: &Point2) -> Ordering {
    a.x().total_cmp(&b.x()).then(a.y().total_cmp(&b.y()))
}

/// Sign of the incircle determinant of `d` against the counter-clockwise
/// triangle `abc` (positive: strictly inside), with cocircular ties broken
/// by lifting each point by an infinitesimal that is larger for
/// lexicographically smaller points.
pub fn incircle_sos(a: &Point2, b: &Point2, c: &Point2, d: &Point2) -> f64 {
    let det = robust::incircle(coord(a), coord(b), coord(c), coord(d));
    if det != 0.0 {
        return det.signum();
    }
    // coefficient of each point's lift in the 4x4 determinant
    let mut terms = [
        (a, orient(b, c, d)),
        (b, -orient(a, c, d)),
        (c, orient(a, b, d)),
        (d, -orient(a, b, c)),
    ];
    terms.sort_by(|x, y| lex(x.0, y.0));
    terms
        .iter()
        .map(|t| t.1)
        .find(|v| *v != 0.0)
        .map_or(0.0, f64::signum)
}

/// Builds the cell for a triple, or `None` if it is collinear.
fn make_cell(config: &PointConfiguration<2>, mut idx: [usize; 3]) -> Option<DelaunayCell> {
    idx.sort_unstable();
    let pts = config.points();
    let (a, mut b, mut c) = (pts[idx[0]], pts[idx[1]], pts[idx[2]]);
    let o = orient(&a, &b, &c);
    if o == 0.0 {
        return None;
    }
    if o < 0.0 {
        std::mem::swap(&mut b, &mut c);
    }
    let sphere = circumsphere(&[a, b, c]);
    if sphere.degenerate {
        return None;
    }
    Some(DelaunayCell {
        indices: idx,
        points: [a, b, c],
        center: sphere.center,
        radius: sphere.radius,
    })
}

/// Checks the empty-circle property; returns `(valid, cocircular points)`.
fn validate(config: &PointConfiguration<2>, cell: &DelaunayCell) -> (bool, Vec<usize>) {
    let [a, b, c] = cell.points;
    let mut cocircular = Vec::new();
    let reach = cell.radius * (1.0 + 1e-7) + 1e-12;
    for j in config.query_ball_indices(&cell.center, reach) {
        if cell.indices.contains(&j) {
            continue;
        }
        let d = config.points()[j];
        if robust::incircle(coord(&a), coord(&b), coord(&c), coord(&d)) == 0.0 {
            cocircular.push(j);
        }
        if incircle_sos(&a, &b, &c, &d) > 0.0 {
            return (false, cocircular);
        }
    }
    (true, cocircular)
}

fn in_box(region: &Region<2>, p: &Point2) -> bool {
    region.contains(p)
}

/// All Delaunay triangles of the finite configuration whose circumcenter
/// lies in `core`, sorted by index triple.
pub fn delaunay_cells(config: &PointConfiguration<2>, core: &Region<2>) -> Vec<DelaunayCell> {
    let all: Vec<usize> = (0..config.len()).collect();
    cells_from_generators(config, core, &all)
}

/// Delaunay triangles with circumcenter in `core` that are Delaunay cells of
/// any configuration agreeing with this one on its region.
///
/// Certifies that every disk centered in `core` of radius `m` (the distance
/// from `core` to the region boundary) holds a point; otherwise a large
/// empty disk could hide triangles, and [`Error::UnboundedCell`] is
/// returned.
pub fn delaunay_cells_certified(config: &PointConfiguration<2>, core: &Region<2>) -> Result<Vec<DelaunayCell>> {
    let (Region::Box { lo: clo, hi: chi }, Region::Box { lo: rlo, hi: rhi }) = (core, config.region()) else {
        return Err(Error::Domain("certified Delaunay cells need box regions".into()));
    };
    let m = (0..2)
        .map(|k| (clo[k] - rlo[k]).min(rhi[k] - chi[k]))
        .fold(f64::INFINITY, f64::min);
    if !(m > 0.0) {
        return Err(Error::Domain("core must lie strictly inside the sampling region".into()));
    }
    // grid of squares of side g; a point within m - g/√2 of every square
    // center puts a point within m of every core point
    let g = m / 4.0;
    let probe = m - g / 2f64.sqrt();
    let nx = ((chi[0] - clo[0]) / g).ceil().max(1.0) as usize;
    let ny = ((chi[1] - clo[1]) / g).ceil().max(1.0) as usize;
    for i in 0..nx {
        for j in 0..ny {
            let q = Point2::xy(
                (clo[0] + (i as f64 + 0.5) * g).min(chi[0]),
                (clo[1] + (j as f64 + 0.5) * g).min(chi[1]),
            );
            if config.count_ball(&q, probe, None) == 0 {
                return Err(Error::UnboundedCell { nucleus: q.0.to_vec() });
            }
        }
    }
    let near: Vec<usize> = (0..config.len())
        .filter(|&i| {
            let p = config.points()[i];
            let dx = (clo[0] - p.x()).max(p.x() - chi[0]).max(0.0);
            let dy = (clo[1] - p.y()).max(p.y() - chi[1]).max(0.0);
            dx * dx + dy * dy <= m * m
        })
        .collect();
    Ok(cells_from_generators(config, core, &near))
}

fn cells_from_generators(config: &PointConfiguration<2>, core: &Region<2>, generators: &[usize]) -> Vec<DelaunayCell> {
    let mut seen: HashSet<[usize; 3]> = HashSet::new();
    let mut queue: Vec<[usize; 3]> = Vec::new();
    for &i in generators {
        let vc = voronoi_cell_clipped(config, i);
        let tags = &vc.polygon.tags;
        let n = tags.len();
        for j in 0..n {
            if let (Some(a), Some(b)) = (tags[(j + n - 1) % n], tags[j]) {
                if a != b && a != i && b != i {
                    let mut t = [i, a, b];
                    t.sort_unstable();
                    if seen.insert(t) {
                        queue.push(t);
                    }
                }
            }
        }
    }
    let mut out: BTreeSet<[usize; 3]> = BTreeSet::new();
    let mut cells = Vec::new();
    let mut checked: HashSet<[usize; 3]> = HashSet::new();
    while let Some(t) = queue.pop() {
        if !checked.insert(t) {
            continue;
        }
        let Some(cell) = make_cell(config, t) else { continue };
        if !in_box(core, &cell.center) {
            continue;
        }
        let (valid, cocircular) = validate(config, &cell);
        if !cocircular.is_empty() {
            // every triangle on a shared circle is a candidate
            let mut group: Vec<usize> = t.to_vec();
            group.extend(cocircular);
            group.sort_unstable();
            group.dedup();
            for x in 0..group.len() {
                for y in x + 1..group.len() {
                    for z in y + 1..group.len() {
                        let u = [group[x], group[y], group[z]];
                        if !checked.contains(&u) {
                            queue.push(u);
                        }
                    }
                }
            }
        }
        if valid && out.insert(t) {
            cells.push(cell);
        }
    }
    cells.sort_by(|a, b| a.indices.cmp(&b.indices));
    cells
}

/// All-triples oracle: `O(n^4)`.
pub fn delaunay_cells_bruteforce(config: &PointConfiguration<2>, core: &Region<2>) -> Vec<DelaunayCell> {
    let n = config.len();
    let pts = config.points();
    let mut cells = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let Some(cell) = make_cell(config, [i, j, k]) else { continue };
                if !in_box(core, &cell.center) {
                    continue;
                }
                let [a, b, c] = cell.points;
                let empty = (0..n)
                    .filter(|l| ![i, j, k].contains(l))
                    .all(|l| incircle_sos(&a, &b, &c, &pts[l]) < 0.0);
                if empty {
                    cells.push(cell);
                }
            }
        }
    }
    cells
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{sample_poisson, IntensitySpec, SeedSpec};

    fn boxed(lo: f64, hi: f64) -> Region<2> {
        Region::Box { lo: Point2::xy(lo, lo), hi: Point2::xy(hi, hi) }
    }

    #[test]
    fn single_triangle() {
        let pts = vec![Point2::xy(0.0, 0.0), Point2::xy(1.0, 0.0), Point2::xy(0.0, 1.0)];
        let cfg = PointConfiguration::new(pts, boxed(-5.0, 5.0));
        let cells = delaunay_cells(&cfg, &boxed(-5.0, 5.0));
        assert_eq!(cells.len(), 1);
        assert!((cells[0].center - Point2::xy(0.5, 0.5)).norm() < 1e-15);
        assert!((cells[0].radius - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn square_corners_give_two_triangles() {
        let pts = vec![
            Point2::xy(0.0, 0.0),
            Point2::xy(1.0, 0.0),
            Point2::xy(1.0, 1.0),
            Point2::xy(0.0, 1.0),
        ];
        let cfg = PointConfiguration::new(pts, boxed(-5.0, 5.0));
        let cells = delaunay_cells(&cfg, &boxed(-5.0, 5.0));
        assert_eq!(cells.len(), 2);
        let area: f64 = cells.iter().map(|c| c.simplex().area()).sum();
        assert!((area - 1.0).abs() < 1e-15);
        // the two triangles share a diagonal
        let shared: Vec<usize> = cells[0].indices.iter().filter(|i| cells[1].indices.contains(i)).copied().collect();
        assert_eq!(shared.len(), 2);
        assert_eq!(cells, delaunay_cells_bruteforce(&cfg, &boxed(-5.0, 5.0)));
    }

    #[test]
    fn lattice_is_triangulated_consistently() {
        // a grid is maximally cocircular
        let mut pts = Vec::new();
        for i in 0..6 {
            for j in 0..6 {
                pts.push(Point2::xy(i as f64, j as f64));
            }
        }
        let cfg = PointConfiguration::new(pts, boxed(-1.0, 6.0));
        let core = boxed(-1.0, 6.0);
        let cells = delaunay_cells(&cfg, &core);
        assert_eq!(cells, delaunay_cells_bruteforce(&cfg, &core));
        let area: f64 = cells.iter().map(|c| c.simplex().area()).sum();
        assert!((area - 25.0).abs() < 1e-12);
    }

    #[test]
    fn random_configuration_matches_bruteforce() {
        for seed in 0..3 {
            let region = boxed(0.0, 10.0);
            let cfg = sample_poisson(&IntensitySpec::constant(1.5), &region, SeedSpec::new(20, seed)).unwrap();
            let core = boxed(2.5, 7.5);
            let fast = delaunay_cells(&cfg, &core);
            assert_eq!(fast, delaunay_cells_bruteforce(&cfg, &core));
            for c in &fast {
                let [a, b, cc] = c.points;
                for p in cfg.points() {
                    assert!(robust::incircle(coord(&a), coord(&b), coord(&cc), coord(p)) <= 0.0);
                }
            }
        }
    }

    #[test]
    fn certified_cells_agree_with_full_triangulation() {
        let region = boxed(0.0, 30.0);
        let cfg = sample_poisson(&IntensitySpec::constant(1.0), &region, SeedSpec::new(21, 0)).unwrap();
        let core = boxed(6.0, 24.0);
        assert_eq!(delaunay_cells_certified(&cfg, &core).unwrap(), delaunay_cells(&cfg, &core));
        // a nearly empty region cannot be certified
        let sparse = PointConfiguration::new(vec![Point2::xy(15.0, 15.0)], region);
        assert!(matches!(delaunay_cells_certified(&sparse, &core), Err(Error::UnboundedCell { .. })));
    }
}
