//! Samplers for the typical cell of planar Poisson-Voronoi and
//! Poisson-Delaunay mosaics.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;

use super::delaunay::delaunay_cells_certified;
use super::spec::{MosaicKind, MosaicSpec};
use super::voronoi::{stabilization_radius_voronoi, voronoi_cell};
use crate::error::{Error, Result};
use crate::geom::{deviation_delaunay, deviation_voronoi, ConvexCell, Matching, Point2};
use crate::sampling::{poisson_count, sample_homogeneous, PointConfiguration, Region, SeedSpec};

const TAG_VORONOI: u64 = 0x766f_726f;
const TAG_DELAUNAY: u64 = 0x6465_6c61;

/// Independent draws of the typical cell, recentred at the nucleus
/// (Voronoi) or at the circumcenter (Delaunay).
#[derive(Clone, Debug, Default)]
pub struct TypicalCellSample {
    pub cells: Vec<ConvexCell>,
    pub sigma_values: Vec<f64>,
    /// Empty until [`TypicalCellSample::compute_deviations`] runs, except for
    /// Voronoi samples where it is filled on construction.
    pub deviation_values: Vec<f64>,
    /// Delaunay only: cells per unit area of the simulated windows.
    pub center_intensity: Option<f64>,
    /// Sizes of the consecutive runs of cells drawn from one window. Cells of
    /// different runs are independent; empty means all cells are.
    pub clusters: Vec<usize>,
}

impl TypicalCellSample {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn compute_deviations(&mut self, kind: MosaicKind) -> Result<()> {
        if self.deviation_values.len() == self.cells.len() {
            return Ok(());
        }
        self.deviation_values = self
            .cells
            .par_iter()
            .map(|c| match kind {
                MosaicKind::Voronoi => deviation_voronoi(c),
                MosaicKind::Delaunay => deviation_delaunay(c, Matching::Cyclic),
            })
            .collect::<Result<_>>()?;
        Ok(())
    }

    /// Fraction of cells with `Σ > v` and its standard error.
    pub fn survival(&self, v: f64) -> (f64, f64) {
        let hits: Vec<f64> = self.sigma_values.iter().map(|&s| if s > v { 1.0 } else { 0.0 }).collect();
        self.mean_with_se(&hits)
    }

    pub fn mean_area(&self) -> (f64, f64) {
        let areas: Vec<f64> = self.cells.iter().map(ConvexCell::area).collect();
        self.mean_with_se(&areas)
    }

    /// Mean of per-cell values; with clusters the standard error is that of
    /// the ratio of window totals to window counts.
    pub fn mean_with_se(&self, values: &[f64]) -> (f64, f64) {
        if self.clusters.is_empty() {
            return mean_se(values.iter().copied());
        }
        cluster_mean_se(values, &self.clusters)
    }

    /// One row `sigma,deviation,rho_o,r_o,area` per cell; `deviation` is
    /// empty when not computed.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "sigma,deviation,rho_o,r_o,area")?;
        for (i, cell) in self.cells.iter().enumerate() {
            let dev = self.deviation_values.get(i).map(|d| format!("{d:.16e}")).unwrap_or_default();
            writeln!(
                out,
                "{:.16e},{},{:.16e},{:.16e},{:.16e}",
                self.sigma_values[i],
                dev,
                cell.centered_inradius(),
                cell.centered_circumradius(),
                cell.area()
            )?;
        }
        out.flush()?;
        Ok(())
    }
}

pub(crate) fn mean_se(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut n, mut s, mut s2) = (0.0, 0.0, 0.0);
    for v in values {
        n += 1.0;
        s += v;
        s2 += v * v;
    }
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Ratio estimator `Σ y_j / Σ n_j` over clusters of sizes `n_j` with totals
/// `y_j`, with its delta-method standard error.
pub(crate) fn cluster_mean_se(values: &[f64], clusters: &[usize]) -> (f64, f64) {
    let mut totals = Vec::with_capacity(clusters.len());
    let mut at = 0;
    for &n in clusters {
        totals.push((values[at..at + n].iter().sum::<f64>(), n as f64));
        at += n;
    }
    let n: f64 = totals.iter().map(|t| t.1).sum();
    let mean = totals.iter().map(|t| t.0).sum::<f64>() / n;
    let j = totals.len() as f64;
    let ss: f64 = totals.iter().map(|&(y, m)| (y - mean * m).powi(2)).sum();
    (mean, (ss * j / (j - 1.0).max(1.0)).sqrt() / n)
}

/// Poisson points of intensity `gamma` in the annulus `r0 < |x - center| <= r1`.
fn sample_annulus<R: Rng + ?Sized>(center: Point2, r0: f64, r1: f64, gamma: f64, rng: &mut R, out: &mut Vec<Point2>) {
    let n = poisson_count(gamma * PI * (r1 * r1 - r0 * r0), rng);
    for _ in 0..n {
        let r = (r0 * r0 + rng.random::<f64>() * (r1 * r1 - r0 * r0)).sqrt();
        let theta = 2.0 * PI * rng.random::<f64>();
        out.push(center + Point2::from_angle(theta) * r);
    }
}

/// Samples `fixed ∪ η ∩ B(center, ρ)` for growing `ρ = ρ_0, 2ρ_0, …` until
/// `eval` accepts the configuration. The first `fixed.len()` indices of the
/// configuration are the fixed points. Points already drawn are kept when
/// the ball grows, so the restriction of `η` stays exact.
pub(crate) fn grow_ball<T, R: Rng + ?Sized>(
    center: Point2,
    rho0: f64,
    gamma: f64,
    fixed: &[Point2],
    rng: &mut R,
    mut eval: impl FnMut(&PointConfiguration<2>, f64) -> Option<T>,
) -> T {
    let mut pts = fixed.to_vec();
    let mut inner = 0.0;
    let mut rho = rho0;
    loop {
        sample_annulus(center, inner, rho, gamma, rng, &mut pts);
        let cfg = PointConfiguration::new(pts.clone(), Region::Ball { center, radius: rho });
        if let Some(v) = eval(&cfg, rho) {
            return v;
        }
        inner = rho;
        rho *= 2.0;
    }
}

/// Voronoi cell of the origin in `η + δ_o` together with its cone
/// stabilization radius.
pub fn typical_voronoi_cell<R: Rng + ?Sized>(gamma: f64, rng: &mut R) -> (ConvexCell, f64) {
    let rho0 = 8.0 / gamma.sqrt();
    grow_ball(Point2::ORIGIN, rho0, gamma, &[Point2::ORIGIN], rng, |cfg, rho| {
        let r = stabilization_radius_voronoi(cfg, &Point2::ORIGIN);
        if r.is_finite() && 2.0 * r <= rho {
            voronoi_cell(cfg, 0).ok().map(|vc| (vc.cell(), r))
        } else {
            None
        }
    })
}

/// `n` independent typical Voronoi cells.
pub fn sample_typical_voronoi(spec: &MosaicSpec, n: usize, seed: SeedSpec) -> Result<TypicalCellSample> {
    spec.validate()?;
    let base = seed.substream(TAG_VORONOI);
    let draws: Vec<(ConvexCell, f64, f64)> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = base.replicate(i).rng();
            let (cell, _) = typical_voronoi_cell(spec.gamma, &mut rng);
            let sigma = spec.sigma(&cell)?;
            let dev = deviation_voronoi(&cell)?;
            Ok((cell, sigma, dev))
        })
        .collect::<Result<_>>()?;
    let mut out = TypicalCellSample::default();
    for (cell, sigma, dev) in draws {
        out.cells.push(cell);
        out.sigma_values.push(sigma);
        out.deviation_values.push(dev);
    }
    Ok(out)
}

/// Side of the core and width of the margin of the windows used for
/// typical Delaunay cells, in units of `γ^{-1/2}`. Cells of one window tile
/// its core, so small cores keep the pooled sample close to independent.
const DELAUNAY_CORE: f64 = 4.0;
const DELAUNAY_MARGIN: f64 = 5.0;

struct DelaunayWindow {
    cells: Vec<ConvexCell>,
    area: f64,
}

fn delaunay_window(gamma: f64, seed: SeedSpec) -> Option<DelaunayWindow> {
    let side = DELAUNAY_CORE / gamma.sqrt();
    let margin = DELAUNAY_MARGIN / gamma.sqrt();
    let core = Region::Box { lo: Point2::xy(0.0, 0.0), hi: Point2::xy(side, side) };
    let region = Region::Box { lo: Point2::xy(-margin, -margin), hi: Point2::xy(side + margin, side + margin) };
    let mut rng = seed.rng();
    let pts = sample_homogeneous(gamma, &region, &mut rng);
    let cfg = PointConfiguration::new(pts, region);
    let cells = delaunay_cells_certified(&cfg, &core).ok()?;
    Some(DelaunayWindow {
        cells: cells.iter().map(|c| c.recentred()).collect(),
        area: side * side,
    })
}

/// At least `n` typical Delaunay cells collected from independent windows,
/// truncated to exactly `n`. Windows failing coverage certification are
/// discarded.
pub fn sample_typical_delaunay(spec: &MosaicSpec, n: usize, seed: SeedSpec) -> Result<TypicalCellSample> {
    spec.validate()?;
    let base = seed.substream(TAG_DELAUNAY);
    let per_window = 2.0 * DELAUNAY_CORE * DELAUNAY_CORE;
    let mut windows: Vec<DelaunayWindow> = Vec::new();
    let mut next = 0u64;
    let mut have = 0usize;
    let mut failures = 0usize;
    while have < n {
        let batch = (((n - have) as f64 / per_window).ceil() as u64).max(1);
        let got: Vec<Option<DelaunayWindow>> = (next..next + batch)
            .into_par_iter()
            .map(|w| delaunay_window(spec.gamma, base.replicate(w)))
            .collect();
        next += batch;
        for w in got {
            match w {
                Some(w) => {
                    have += w.cells.len();
                    windows.push(w);
                }
                None => failures += 1,
            }
        }
        if failures > 100 + next as usize / 2 {
            return Err(Error::Resources("Delaunay windows keep failing certification".into()));
        }
    }
    let total_cells: usize = windows.iter().map(|w| w.cells.len()).sum();
    let total_area: f64 = windows.iter().map(|w| w.area).sum();
    let mut clusters = Vec::new();
    let mut cells: Vec<ConvexCell> = Vec::with_capacity(n);
    for w in windows {
        if cells.len() == n {
            break;
        }
        let take = w.cells.len().min(n - cells.len());
        if take == 0 {
            continue;
        }
        clusters.push(take);
        cells.extend(w.cells.into_iter().take(take));
    }
    let sigma_values = cells.iter().map(|c| spec.sigma(c)).collect::<Result<_>>()?;
    Ok(TypicalCellSample {
        cells,
        sigma_values,
        deviation_values: Vec::new(),
        center_intensity: Some(total_cells as f64 / total_area),
        clusters,
    })
}

pub fn sample_typical(spec: &MosaicSpec, n: usize, seed: SeedSpec) -> Result<TypicalCellSample> {
    match spec.kind {
        MosaicKind::Voronoi => sample_typical_voronoi(spec, n, seed),
        MosaicKind::Delaunay => sample_typical_delaunay(spec, n, seed),
    }
}

/// `P(ϑ(Z) ≥ ε | Σ(Z) ≥ a)` estimated from a sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeviationTailPoint {
    pub a: f64,
    pub conditioned: usize,
    pub p: f64,
    pub se: f64,
}

pub fn deviation_tail_profile(sample: &TypicalCellSample, eps: f64, a_grid: &[f64]) -> Result<Vec<DeviationTailPoint>> {
    if sample.deviation_values.len() != sample.sigma_values.len() {
        return Err(Error::Domain("deviations have not been computed".into()));
    }
    Ok(a_grid
        .iter()
        .map(|&a| {
            let (mut m, mut hits) = (0usize, 0usize);
            for (s, dev) in sample.sigma_values.iter().zip(&sample.deviation_values) {
                if *s >= a {
                    m += 1;
                    if *dev >= eps {
                        hits += 1;
                    }
                }
            }
            let p = if m > 0 { hits as f64 / m as f64 } else { f64::NAN };
            let se = if m > 0 { (p * (1.0 - p) / m as f64).sqrt() } else { f64::NAN };
            DeviationTailPoint { a, conditioned: m, p, se }
        })
        .collect())
}
