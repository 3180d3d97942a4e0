use std::cmp::Ordering;
use std::io::{BufRead, Write};
use std::path::Path;

use super::window::Region;
use crate::error::{Error, Result};
use crate::geom::{compare_total_order, Point};

const MAX_GRID_CELLS: usize = 1 << 22;

/// Uniform bucket grid over a bounding box.
#[derive(Clone, Debug)]
pub struct GridIndex<const D: usize> {
    lo: [f64; D],
    width: f64,
    /// Diagonal of the indexed box.
    span: f64,
    dims: [usize; D],
    /// `starts[c]..starts[c+1]` indexes `order` for cell `c`.
    starts: Vec<u32>,
    order: Vec<u32>,
}

impl<const D: usize> GridIndex<D> {
    /// Builds the index with cells of width about `h`, enlarged if the grid
    /// would otherwise be too fine for the bounding box.
    pub fn build(points: &[Point<D>], lo: Point<D>, hi: Point<D>, h: f64) -> Self {
        let extent: [f64; D] = std::array::from_fn(|i| (hi[i] - lo[i]).max(0.0));
        let vol: f64 = extent.iter().map(|e| e.max(f64::MIN_POSITIVE)).product();
        let min_width = (vol / MAX_GRID_CELLS as f64).powf(1.0 / D as f64);
        let mut width = if h.is_finite() && h > 0.0 { h } else { extent.iter().fold(1.0f64, |m, e| m.max(*e)) };
        width = width.max(min_width);
        let dims: [usize; D] = std::array::from_fn(|i| ((extent[i] / width).ceil() as usize).clamp(1, MAX_GRID_CELLS));
        let mut index = Self {
            lo: lo.0,
            width,
            span: extent.iter().map(|e| e * e).sum::<f64>().sqrt(),
            dims,
            starts: Vec::new(),
            order: Vec::new(),
        };
        let ncells: usize = dims.iter().product();
        let cells: Vec<usize> = points.iter().map(|p| index.cell_of(p)).collect();
        let mut counts = vec![0u32; ncells + 1];
        for &c in &cells {
            counts[c + 1] += 1;
        }
        for c in 0..ncells {
            counts[c + 1] += counts[c];
        }
        let mut fill = counts.clone();
        let mut order = vec![0u32; points.len()];
        for (i, &c) in cells.iter().enumerate() {
            order[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        index.starts = counts;
        index.order = order;
        index
    }

    pub fn cell_width(&self) -> f64 {
        self.width
    }

    fn coord(&self, v: f64, i: usize) -> usize {
        let j = ((v - self.lo[i]) / self.width).floor();
        if j <= 0.0 {
            0
        } else {
            (j as usize).min(self.dims[i] - 1)
        }
    }

    fn cell_of(&self, p: &Point<D>) -> usize {
        (0..D).fold(0, |acc, i| acc * self.dims[i] + self.coord(p[i], i))
    }

    /// Calls `visit` with the index of every point whose bucket meets the
    /// axis box `[c - r, c + r]`.
    fn for_each_candidate(&self, c: &Point<D>, r: f64, mut visit: impl FnMut(usize)) {
        let from: [usize; D] = std::array::from_fn(|i| self.coord(c[i] - r, i));
        let to: [usize; D] = std::array::from_fn(|i| self.coord(c[i] + r, i));
        let mut cur = from;
        loop {
            let cell = (0..D).fold(0, |acc, i| acc * self.dims[i] + cur[i]);
            for &k in &self.order[self.starts[cell] as usize..self.starts[cell + 1] as usize] {
                visit(k as usize);
            }
            // odometer over the cell range, last axis fastest
            let mut axis = D;
            loop {
                if axis == 0 {
                    return;
                }
                axis -= 1;
                if cur[axis] < to[axis] {
                    cur[axis] += 1;
                    break;
                }
                cur[axis] = from[axis];
            }
        }
    }
}

/// A finite simple point configuration with a bucket-grid index.
#[derive(Clone, Debug)]
pub struct PointConfiguration<const D: usize> {
    points: Vec<Point<D>>,
    index: GridIndex<D>,
    region: Region<D>,
}

impl<const D: usize> PointConfiguration<D> {
    /// Indexes `points` with cells of width about `h`.
    pub fn with_cell_width(points: Vec<Point<D>>, region: Region<D>, h: f64) -> Self {
        let (mut lo, mut hi) = region.bounding_box();
        for p in &points {
            for i in 0..D {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        let index = GridIndex::build(&points, lo, hi, h);
        Self { points, index, region }
    }

    /// Indexes `points` with the mean spacing as cell width.
    pub fn new(points: Vec<Point<D>>, region: Region<D>) -> Self {
        let n = points.len().max(1) as f64;
        let h = (region.volume() / n).powf(1.0 / D as f64);
        Self::with_cell_width(points, region, h)
    }

    pub fn points(&self) -> &[Point<D>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn region(&self) -> &Region<D> {
        &self.region
    }

    pub fn index(&self) -> &GridIndex<D> {
        &self.index
    }

    /// Indices of the points in the closed ball `B(center, radius)`.
    pub fn query_ball_indices(&self, center: &Point<D>, radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if radius < 0.0 || self.points.is_empty() {
            return out;
        }
        let r2 = radius * radius;
        self.index.for_each_candidate(center, radius, |k| {
            if self.points[k].dist_sq(center) <= r2 {
                out.push(k);
            }
        });
        out
    }

    /// Points in the closed ball `B(center, radius)`.
    pub fn query_ball(&self, center: &Point<D>, radius: f64) -> Vec<Point<D>> {
        self.query_ball_indices(center, radius)
            .into_iter()
            .map(|k| self.points[k])
            .collect()
    }

    /// Number of points in the closed ball, skipping index `skip`.
    pub fn count_ball(&self, center: &Point<D>, radius: f64, skip: Option<usize>) -> usize {
        if radius < 0.0 || self.points.is_empty() {
            return 0;
        }
        let r2 = radius * radius;
        let mut n = 0;
        self.index.for_each_candidate(center, radius, |k| {
            if Some(k) != skip && self.points[k].dist_sq(center) <= r2 {
                n += 1;
            }
        });
        n
    }

    /// The `k` nearest points to `x` among those different from `x`, as
    /// indices sorted by the total order applied to `y - x`.
    pub fn k_nearest(&self, x: &Point<D>, k: usize) -> Result<Vec<usize>> {
        if k == 0 {
            return Ok(Vec::new());
        }
        let mut r = self.index.width * (k as f64).powf(1.0 / D as f64);
        // once the ball around x covers the whole box, every point was seen
        let reach = self.index.span + self.index.lo.iter().zip(x.0.iter()).map(|(a, b)| (a - b).abs()).sum::<f64>();
        loop {
            let mut found: Vec<usize> = self
                .query_ball_indices(x, r)
                .into_iter()
                .filter(|&j| self.points[j] != *x)
                .collect();
            if found.len() >= k {
                found.sort_by(|&a, &b| order_from(x, &self.points[a], &self.points[b]));
                found.truncate(k);
                return Ok(found);
            }
            if r > reach {
                return Err(Error::InsufficientPoints { needed: k, available: found.len() });
            }
            r *= 2.0;
        }
    }

    /// The `k`-th nearest point of the configuration without `x`.
    pub fn knn_query(&self, x: &Point<D>, k: usize) -> Result<Point<D>> {
        if k == 0 {
            return Err(Error::Domain("k must be at least 1".into()));
        }
        let nearest = self.k_nearest(x, k)?;
        Ok(self.points[nearest[k - 1]])
    }

    /// No two points coincide.
    pub fn is_simple(&self) -> bool {
        let mut sorted = self.points.clone();
        sorted.sort_by(|a, b| {
            a.0.iter()
                .zip(b.0.iter())
                .map(|(u, v)| u.total_cmp(v))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        });
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    /// Writes one point per row, coordinates comma separated.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let header = ["x", "y", "z"][..D.min(3)].join(",");
        writeln!(out, "{header}")?;
        for p in &self.points {
            let row: Vec<String> = p.0.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a dump written by [`PointConfiguration::write_csv`].
    pub fn read_csv(path: &Path, region: Region<D>) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut points = Vec::new();
        for (n, line) in file.lines().enumerate().skip(1) {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Io(format!("line {}: {e}", n + 1)))?;
            if vals.len() != D {
                return Err(Error::Io(format!("line {}: expected {D} columns", n + 1)));
            }
            points.push(Point(std::array::from_fn(|i| vals[i])));
        }
        Ok(Self::new(points, region))
    }
}

fn order_from<const D: usize>(x: &Point<D>, a: &Point<D>, b: &Point<D>) -> Ordering {
    compare_total_order(&(*a - *x), &(*b - *x))
}
