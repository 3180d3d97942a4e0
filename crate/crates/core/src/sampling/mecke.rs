//! Monte Carlo check of the multivariate Mecke equation
//! `E Σ_{x ∈ η^{(k)}} f(x, η − δ_x) = ∫ E f(x, η) λ^k(dx)`
//! for a homogeneous process on the plane, with test functions acting on the
//! configuration with the tuple `x` removed.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::poisson::sample_homogeneous;
use super::seed::SeedSpec;
use super::window::Region;
use crate::error::{Error, Result};
use crate::geom::Point2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeckeTestFn {
    /// `f(x, μ) = 1{x ∈ [0,1]^2}`.
    UnitSquare,
    /// `f(x, μ) = 1{x ∈ [0,1]^2, μ(B(x, radius)) = 0}`.
    IsolatedInUnitSquare { radius: f64 },
    /// `f(x, y, μ) = 1{|x − y| ≤ radius, x, y ∈ [0,1]^2}`.
    PairWithin { radius: f64 },
}

impl MeckeTestFn {
    /// Order of the factorial measure the function integrates against.
    pub fn order(&self) -> usize {
        match self {
            MeckeTestFn::PairWithin { .. } => 2,
            _ => 1,
        }
    }

    /// Margin around the unit square where points can affect `f`.
    fn reach(&self) -> f64 {
        match self {
            MeckeTestFn::IsolatedInUnitSquare { radius } => *radius,
            _ => 0.0,
        }
    }

    /// `∫ E f(x, η) λ^k(dx)` in closed form for intensity `gamma`.
    pub fn exact_rhs(&self, gamma: f64) -> f64 {
        match *self {
            MeckeTestFn::UnitSquare => gamma,
            MeckeTestFn::IsolatedInUnitSquare { radius } => gamma * (-gamma * PI * radius * radius).exp(),
            MeckeTestFn::PairWithin { radius: r } => {
                let r = r.min(2f64.sqrt());
                gamma * gamma * pair_integral(r)
            }
        }
    }
}

/// `∫∫ 1{|x − y| ≤ r} dx dy` over the unit square, for `r ≤ 1`; the general
/// formula is only used below that bound.
fn pair_integral(r: f64) -> f64 {
    if r <= 1.0 {
        PI * r * r - 8.0 * r.powi(3) / 3.0 + r.powi(4) / 2.0
    } else {
        f64::NAN
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeckeReport {
    pub lhs: f64,
    pub lhs_se: f64,
    pub rhs: f64,
    pub rhs_se: f64,
    pub exact_rhs: f64,
    /// `|lhs − rhs|` in units of the pooled standard error.
    pub z: f64,
}

/// Estimates both sides of the Mecke equation from `replicates` independent
/// draws each, with the two sides on independent streams.
pub fn verify_mecke(gamma: f64, test_fn: MeckeTestFn, replicates: usize, seed: SeedSpec) -> Result<MeckeReport> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("intensity {gamma} must be positive")));
    }
    if replicates < 2 {
        return Err(Error::InsufficientSample { needed: 2, have: replicates });
    }
    if let MeckeTestFn::PairWithin { radius } | MeckeTestFn::IsolatedInUnitSquare { radius } = test_fn {
        if !(radius >= 0.0 && radius <= 1.0) {
            return Err(Error::Domain(format!("radius {radius} outside [0, 1]")));
        }
    }
    let m = test_fn.reach();
    let region = Region::Box {
        lo: Point2::xy(-m, -m),
        hi: Point2::xy(1.0 + m, 1.0 + m),
    };

    let mut lhs_rng = seed.substream(1).rng();
    let lhs: Vec<f64> = (0..replicates)
        .map(|_| {
            let pts = sample_homogeneous(gamma, &region, &mut lhs_rng);
            lhs_sum(test_fn, &pts)
        })
        .collect();

    let mut rhs_rng = seed.substream(2).rng();
    let rhs: Vec<f64> = (0..replicates)
        .map(|_| rhs_draw(test_fn, gamma, &region, &mut rhs_rng))
        .collect();

    let (lhs_mean, lhs_se) = mean_se(&lhs);
    let (rhs_mean, rhs_se) = mean_se(&rhs);
    let pooled = (lhs_se * lhs_se + rhs_se * rhs_se).sqrt();
    let diff = (lhs_mean - rhs_mean).abs();
    Ok(MeckeReport {
        lhs: lhs_mean,
        lhs_se,
        rhs: rhs_mean,
        rhs_se,
        exact_rhs: test_fn.exact_rhs(gamma),
        z: if pooled > 0.0 { diff / pooled } else if diff == 0.0 { 0.0 } else { f64::INFINITY },
    })
}

fn in_unit(p: &Point2) -> bool {
    (0.0..=1.0).contains(&p.x()) && (0.0..=1.0).contains(&p.y())
}

fn lhs_sum(test_fn: MeckeTestFn, pts: &[Point2]) -> f64 {
    match test_fn {
        MeckeTestFn::UnitSquare => pts.iter().filter(|p| in_unit(p)).count() as f64,
        MeckeTestFn::IsolatedInUnitSquare { radius } => {
            let r2 = radius * radius;
            (0..pts.len())
                .filter(|&i| {
                    in_unit(&pts[i])
                        && pts
                            .iter()
                            .enumerate()
                            .all(|(j, q)| j == i || q.dist_sq(&pts[i]) > r2)
                })
                .count() as f64
        }
        MeckeTestFn::PairWithin { radius } => {
            let r2 = radius * radius;
            let inside: Vec<&Point2> = pts.iter().filter(|p| in_unit(p)).collect();
            let mut pairs = 0usize;
            for i in 0..inside.len() {
                for j in i + 1..inside.len() {
                    if inside[i].dist_sq(inside[j]) <= r2 {
                        pairs += 1;
                    }
                }
            }
            // ordered pairs
            2.0 * pairs as f64
        }
    }
}

/// One unbiased draw of `∫ E f(x, η) λ^k(dx)`: `x` uniform on the unit
/// square (weight `γ^k`) and an independent `η`.
fn rhs_draw<R: Rng + ?Sized>(test_fn: MeckeTestFn, gamma: f64, region: &Region<2>, rng: &mut R) -> f64 {
    let unit = Region::<2>::unit_cube();
    match test_fn {
        MeckeTestFn::UnitSquare => gamma,
        MeckeTestFn::IsolatedInUnitSquare { radius } => {
            let x = unit.sample_uniform(rng);
            let eta = sample_homogeneous(gamma, region, rng);
            let empty = eta.iter().all(|q| q.dist(&x) > radius);
            if empty {
                gamma
            } else {
                0.0
            }
        }
        MeckeTestFn::PairWithin { radius } => {
            let x = unit.sample_uniform(rng);
            let y = unit.sample_uniform(rng);
            if x.dist(&y) <= radius {
                gamma * gamma
            } else {
                0.0
            }
        }
    }
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}
