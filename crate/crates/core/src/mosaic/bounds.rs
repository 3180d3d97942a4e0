//! Monte Carlo checks of the pair bound for Voronoi exceedances and the
//! circumdisk overlap bound for Delaunay simplices.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::calibrate::CalibratedThreshold;
use super::spec::{MosaicKind, MosaicSpec};
use super::typical::grow_ball;
use super::voronoi::voronoi_cell;
use crate::error::{Error, Result};
use crate::geom::{circumsphere, deviation_voronoi, Point2, SizeFunctional};
use crate::sampling::SeedSpec;

const TAG_PAIR: u64 = 0x7061_6972;
const TAG_OVERLAP: u64 = 0x6f76_6572;

/// Area of the intersection of two disks with radii `r1`, `r2` and centers
/// at distance `d`.
pub fn lens_area(r1: f64, r2: f64, d: f64) -> f64 {
    if d >= r1 + r2 {
        return 0.0;
    }
    let (small, big) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    if d <= big - small {
        return PI * small * small;
    }
    let part = |r: f64, other: f64| {
        let c = ((d * d + r * r - other * other) / (2.0 * d * r)).clamp(-1.0, 1.0);
        r * r * c.acos()
    };
    let k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    part(r1, r2) + part(r2, r1) - 0.5 * k.max(0.0).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairBoundRow {
    pub distance: f64,
    pub samples: usize,
    pub hits: usize,
    pub lhs: f64,
    pub se: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairBoundReport {
    pub v: f64,
    pub eps: f64,
    pub a: f64,
    pub tau: f64,
    pub rows: Vec<PairBoundRow>,
    /// Rows with `lhs - 3 se > rhs`.
    pub violations: usize,
}

/// Shape tolerance and distance grid of the pair-bound sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct PairBoundConfig {
    pub eps: f64,
    pub distances: Vec<f64>,
}

impl Default for PairBoundConfig {
    fn default() -> Self {
        Self {
            eps: 0.3,
            distances: vec![0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0],
        }
    }
}

/// `P(ρ_o(Z) > v) exp(-γ a^2 τ (1 - arccos(√(1-a^2))/π) v^2)` with
/// `a = (1-ε)/(1+ε)` and `τ = 1/2`, the bound for the centered inradius.
pub fn pair_bound_rhs(gamma: f64, v: f64, eps: f64) -> f64 {
    let a = (1.0 - eps) / (1.0 + eps);
    let tau = 0.5;
    let tail = (-gamma * PI * 4.0 * v * v).exp();
    tail * (-gamma * a * a * tau * (1.0 - (1.0 - a * a).sqrt().acos() / PI) * v * v).exp()
}

/// Estimates `P(Σ(x) > v, Σ(y) > v, ϑ(x) < ε, ϑ(y) < ε)` for the cells of
/// `x` and `y` in `η + δ_x + δ_y` at each distance `|x - y|` of the grid, with
/// `v = threshold.v_t`. Only the centered inradius is supported.
pub fn check_pair_bound_voronoi(
    spec: &MosaicSpec,
    threshold: &CalibratedThreshold,
    pairs: usize,
    seed: SeedSpec,
    config: &PairBoundConfig,
) -> Result<PairBoundReport> {
    spec.validate()?;
    if spec.kind != MosaicKind::Voronoi || spec.functional != SizeFunctional::CenteredInradius {
        return Err(Error::Domain("the pair bound is configured for the Voronoi centered inradius".into()));
    }
    if !(config.eps > 0.0 && config.eps < 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0, 1), got {}", config.eps)));
    }
    let v = threshold.v_t;
    let gamma = spec.gamma;
    let rho0 = 8.0 / gamma.sqrt();
    let base = seed.substream(TAG_PAIR);
    let mut rows = Vec::with_capacity(config.distances.len());
    for (k, &dist) in config.distances.iter().enumerate() {
        let stream = base.substream(k as u64);
        let x = Point2::xy(-dist / 2.0, 0.0);
        let y = Point2::xy(dist / 2.0, 0.0);
        let hits: usize = (0..pairs as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream.replicate(i).rng();
                let hit = grow_ball(Point2::ORIGIN, dist / 2.0 + rho0, gamma, &[x, y], &mut rng, |cfg, _| {
                    let cx = voronoi_cell(cfg, 0).ok()?.cell();
                    let cy = voronoi_cell(cfg, 1).ok()?.cell();
                    let ok = |c: &crate::geom::ConvexCell| {
                        c.centered_inradius() > v && deviation_voronoi(c).map(|t| t < config.eps).unwrap_or(false)
                    };
                    Some(ok(&cx) && ok(&cy))
                });
                usize::from(hit)
            })
            .sum();
        let n = pairs as f64;
        let lhs = hits as f64 / n;
        rows.push(PairBoundRow {
            distance: dist,
            samples: pairs,
            hits,
            lhs,
            se: (lhs * (1.0 - lhs) / n).sqrt(),
            rhs: pair_bound_rhs(gamma, v, config.eps),
        });
    }
    let violations = rows.iter().filter(|r| r.lhs - 3.0 * r.se > r.rhs).count();
    let a = (1.0 - config.eps) / (1.0 + config.eps);
    Ok(PairBoundReport { v, eps: config.eps, a, tau: 0.5, rows, violations })
}

/// Largest shape deviation `ε` for which every triangle with `ϑ < ε` has
/// each circumdisk segment cut off by an edge, away from the opposite
/// vertex, of area at most `π r^2 / 3`.
///
/// A segment over an edge whose opposite angle is `A` has area
/// `r^2 (2A - sin 2A) / 2`, so all angles must satisfy `2A - sin 2A ≤ 2π/3`.
/// Moving each vertex by chord distance below `ε = 2 sin(δ/2)` changes every
/// central angle by less than `2δ`.
pub fn delaunay_shape_eps() -> f64 {
    let f = |th: f64| th - th.sin() - 2.0 * PI / 3.0;
    let (mut lo, mut hi) = (2.0 * PI / 3.0, PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let delta = (lo - 2.0 * PI / 3.0) / 2.0;
    2.0 * (delta / 2.0).sin()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OverlapBoundReport {
    pub samples: usize,
    pub admissible: usize,
    pub generation_failures: usize,
    pub violations: usize,
    /// Largest `L_2(B(x,u) ∩ B(y,u)) / r(y,u)^2` seen.
    pub max_ratio: f64,
    pub bound_ratio: f64,
}

const MAX_ATTEMPTS: usize = 1000;

struct OverlapCase {
    lens: f64,
    r_y: f64,
}

fn overlap_case<R: Rng + ?Sized>(rng: &mut R, eps: f64) -> Option<OverlapCase> {
    let ell = rng.random_range(1..=3usize);
    let delta = 2.0 * (eps / 2.0).asin();
    let cx = Point2::xy(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let r_x = rng.random_range(0.5..2.0);
    let phase = rng.random_range(0.0..2.0 * PI);
    // vertex i within angle δ of the regular position keeps ϑ below ε
    let tri: Vec<Point2> = (0..3)
        .map(|i| {
            let a = phase + 2.0 * PI * i as f64 / 3.0 + 0.999 * delta * rng.random_range(-1.0..1.0);
            cx + Point2::from_angle(a) * r_x
        })
        .collect();
    let (u, x) = tri.split_at(3 - ell);
    for _ in 0..MAX_ATTEMPTS {
        let mut yu: Vec<Point2> = u.to_vec();
        for _ in 0..ell {
            let r = 3.0 * r_x * rng.random::<f64>().sqrt();
            yu.push(cx + Point2::from_angle(rng.random_range(0.0..2.0 * PI)) * r);
        }
        let s = circumsphere(&yu);
        if s.degenerate || s.radius < r_x {
            continue;
        }
        if x.iter().any(|p| p.dist(&s.center) < s.radius) {
            continue;
        }
        if yu.iter().zip(u.iter().chain(x)).all(|(a, b)| a == b) {
            continue;
        }
        let lens = lens_area(r_x, s.radius, cx.dist(&s.center));
        return Some(OverlapCase { lens, r_y: s.radius });
    }
    None
}

/// Draws random `(x, u)` with `ϑ(x, u) < ε` and `y` with `r(x,u) ≤ r(y,u)` and
/// `x` outside `B(y, u)`, and compares the exact lens area of the two
/// circumdisks with `(2π/3) r(y,u)^2`.
pub fn check_overlap_bound_delaunay(samples: usize, seed: SeedSpec) -> OverlapBoundReport {
    let eps = delaunay_shape_eps();
    let bound_ratio = 2.0 * PI / 3.0;
    let base = seed.substream(TAG_OVERLAP);
    let cases: Vec<Option<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = base.replicate(i).rng();
            overlap_case(&mut rng, eps).map(|c| c.lens / (c.r_y * c.r_y))
        })
        .collect();
    let ratios: Vec<f64> = cases.iter().flatten().copied().collect();
    OverlapBoundReport {
        samples,
        admissible: ratios.len(),
        generation_failures: samples - ratios.len(),
        violations: ratios.iter().filter(|&&q| q > bound_ratio * (1.0 + 1e-12)).count(),
        max_ratio: ratios.iter().copied().fold(0.0, f64::max),
        bound_ratio,
    }
}
