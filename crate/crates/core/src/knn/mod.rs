//! Exceedances of k-nearest-neighbor balls: thresholds `a_s`, radii
//! `r_s(x)`, the thinned process of points whose `(k+1)`-th neighbor is far,
//! and the Gumbel statistic of the largest neighbor-ball content.

pub mod content;
mod lemma;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{DiscreteCDF, Poisson};

use crate::error::{Error, Result};
use crate::geom::{kappa, Point};
use crate::sampling::{sample_poisson, Density, IntensitySpec, PointConfiguration, Region, SeedSpec};

pub use content::{ball_box_volume, density_ball_content, disk_rect_area};
pub use lemma::{lemma_lower_bound, unit_ball_difference, verify_lemma_xa, LemmaReport};

/// Relative tolerance of the `r_s` bisection.
pub const RADIUS_REL_TOL: f64 = 1e-10;

/// Parameters of the intensity `λ_s = c s f` on `[0,1]^d` and the neighbor
/// order `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnnSpec {
    pub d: usize,
    pub k: usize,
    pub c: f64,
    pub s: f64,
    pub density: Density,
}

impl KnnSpec {
    pub fn uniform(d: usize, k: usize, s: f64) -> Self {
        Self {
            d,
            k,
            c: 1.0,
            s,
            density: Density::Uniform,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.d) {
            return Err(Error::Domain(format!("d = {} is not supported (2 or 3)", self.d)));
        }
        if self.s <= std::f64::consts::E {
            return Err(Error::Domain(format!("s = {} must exceed e", self.s)));
        }
        self.intensity().validate(self.d)
    }

    fn check_dim<const D: usize>(&self) -> Result<()> {
        self.validate()?;
        if self.d != D {
            return Err(Error::Domain(format!("spec has d = {} but points have d = {D}", self.d)));
        }
        Ok(())
    }

    pub fn intensity(&self) -> IntensitySpec {
        IntensitySpec::scaled(self.c, self.s, self.density.clone())
    }

    pub fn threshold(&self) -> Result<f64> {
        threshold_a(self.k, self.s)
    }

    /// `λ_s(B(x, r))`, with the intensity vanishing outside the unit cube.
    pub fn ball_content<const D: usize>(&self, x: &Point<D>, r: f64) -> f64 {
        self.c * self.s * density_ball_content(&self.density, x, r)
    }

    /// `λ_s([0,1]^d)`.
    pub fn total_mass(&self) -> f64 {
        self.c * self.s * self.density.total()
    }
}

/// `a_s = log s + k log log s − log k!`.
pub fn threshold_a(k: usize, s: f64) -> Result<f64> {
    if !(s > std::f64::consts::E) {
        return Err(Error::Domain(format!("s = {s} must exceed e")));
    }
    let log_fact: f64 = (2..=k).map(|i| (i as f64).ln()).sum();
    Ok(s.ln() + k as f64 * s.ln().ln() - log_fact)
}

/// `r_s(x) = inf{r > 0 : λ_s(B(x, r)) ≥ a_s}`; `+∞` when the whole cube
/// carries less than `a_s`.
pub fn radius_r_s<const D: usize>(spec: &KnnSpec, x: &Point<D>) -> Result<f64> {
    spec.check_dim::<D>()?;
    let a = spec.threshold()?;
    if spec.total_mass() < a {
        return Ok(f64::INFINITY);
    }
    if matches!(spec.density, Density::Uniform | Density::Ramp { .. }) && x.0.iter().all(|c| (0.0..=1.0).contains(c)) {
        let rate = spec.c * spec.s * spec.density.value(&x.0);
        let r0 = (a / (rate * kappa(D))).powf(1.0 / D as f64);
        if x.0.iter().all(|&c| c - r0 >= 0.0 && c + r0 <= 1.0) {
            return Ok(r0);
        }
    }
    // content is continuous and nondecreasing in r; B(x, √d + dist) covers the cube
    let far = x.0.iter().map(|c| c.abs().max((1.0 - c).abs())).map(|c| c * c).sum::<f64>().sqrt();
    let (mut lo, mut hi) = (0.0, far.max((D as f64).sqrt()));
    for _ in 0..200 {
        if hi - lo <= RADIUS_REL_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if spec.ball_content(x, mid) >= a {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Retained centers of the thinning and the neighbor-ball contents.
#[derive(Clone, Debug, PartialEq)]
pub struct ExceedanceOutput<const D: usize> {
    pub retained_centers: Vec<Point<D>>,
    /// `λ_s(B(x, T_k(x, η_s − δ_x)))` for each retained center.
    pub retained_contents: Vec<f64>,
    pub count: usize,
    /// Largest neighbor-ball content over all points of `η_s`.
    pub max_content: f64,
    pub n_points: usize,
}

/// Samples `η_s` on the unit cube and thins it.
pub fn build_knn_exceedance<const D: usize>(spec: &KnnSpec, seed: SeedSpec) -> Result<ExceedanceOutput<D>> {
    spec.check_dim::<D>()?;
    let config = sample_poisson(&spec.intensity(), &Region::<D>::unit_cube(), seed)?;
    exceedance_from_configuration(spec, &config)
}

/// Distance from point `i` to its `(k+1)`-th nearest other point, `+∞` if
/// there are at most `k` others.
pub fn neighbor_radius<const D: usize>(config: &PointConfiguration<D>, i: usize, k: usize) -> f64 {
    let x = config.points()[i];
    match config.k_nearest(&x, k + 1) {
        Ok(near) => config.points()[near[k]].dist(&x),
        Err(_) => f64::INFINITY,
    }
}

/// Thins a given configuration: `x` is kept iff the ball `B(x, r_s(x))`
/// holds at most `k` other points, evaluated as `λ_s(B(x, T_k)) > a_s`.
pub fn exceedance_from_configuration<const D: usize>(
    spec: &KnnSpec,
    config: &PointConfiguration<D>,
) -> Result<ExceedanceOutput<D>> {
    spec.check_dim::<D>()?;
    let a = spec.threshold()?;
    let mut out = ExceedanceOutput {
        retained_centers: Vec::new(),
        retained_contents: Vec::new(),
        count: 0,
        max_content: f64::NEG_INFINITY,
        n_points: config.len(),
    };
    for (i, x) in config.points().iter().enumerate() {
        if !x.0.iter().all(|c| (0.0..=1.0).contains(c)) {
            continue;
        }
        let t = neighbor_radius(config, i, spec.k);
        let content = spec.ball_content(x, t);
        out.max_content = out.max_content.max(content);
        if content > a || t.is_infinite() {
            out.retained_centers.push(*x);
            out.retained_contents.push(content);
        }
    }
    out.count = out.retained_centers.len();
    Ok(out)
}

/// The thinning predicate evaluated directly: count the other points in
/// `B(x_i, r_s(x_i))`.
pub fn retained_by_radius<const D: usize>(spec: &KnnSpec, config: &PointConfiguration<D>, i: usize) -> Result<bool> {
    let x = config.points()[i];
    let r = radius_r_s(spec, &x)?;
    let others = if r.is_infinite() {
        config.len() - 1
    } else {
        config.count_ball(&x, r, Some(i))
    };
    Ok(others <= spec.k)
}

/// `c (∫ f) s Σ_{i ≤ k} e^{−a_s} a_s^i / i!`, the mean number of retained
/// points. It is exact up to the boundary as well, since `λ_s(B(x, r_s(x)))
/// = a_s` for every `x` by continuity.
pub fn exact_mean_count(spec: &KnnSpec) -> Result<f64> {
    spec.validate()?;
    let a = spec.threshold()?;
    Ok(spec.c * spec.density.total() * spec.s * poisson_cdf(spec.k, a))
}

/// `P(Poisson(mean) ≤ k)`.
pub fn poisson_cdf(k: usize, mean: f64) -> f64 {
    if mean <= 0.0 {
        return 1.0;
    }
    Poisson::new(mean).map(|p| p.cdf(k as u64)).unwrap_or(f64::NAN)
}

/// Monte Carlo version of the mean count that integrates the void
/// probability with the position-dependent radius: returns `(mean, se)`.
pub fn mean_count_mc<const D: usize>(spec: &KnnSpec, samples: usize, seed: SeedSpec) -> Result<(f64, f64)> {
    spec.check_dim::<D>()?;
    if samples < 2 {
        return Err(Error::InsufficientSample { needed: 2, have: samples });
    }
    let mut rng = seed.rng();
    let region = Region::<D>::unit_cube();
    let vals: Vec<f64> = (0..samples)
        .map(|_| {
            let x = region.sample_uniform(&mut rng);
            let r = radius_r_s(spec, &x)?;
            let content = spec.ball_content(&x, r);
            Ok(spec.c * spec.s * spec.density.value(&x.0) * poisson_cdf(spec.k, content))
        })
        .collect::<Result<_>>()?;
    let n = samples as f64;
    let m = vals.iter().sum::<f64>() / n;
    let v = vals.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((m, (v / n).sqrt()))
}

/// `s̃ · max (f L_d)(B(x, T_k)) − log s̃ − k log log s̃ + log k! − log ∫ f`
/// with `s̃ = c s`, i.e. `max λ_s-content − a_{cs} − log ∫ f`; standard
/// Gumbel in the limit. An empty configuration gives `−∞`.
pub fn gumbel_statistic_knn<const D: usize>(output: &ExceedanceOutput<D>, spec: &KnnSpec) -> Result<f64> {
    if output.max_content == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let a = threshold_a(spec.k, spec.c * spec.s)?;
    Ok(output.max_content - a - spec.density.total().ln())
}

/// Resamples `η_s` outside `B(x, r_s(x))` around a planted point `x` and
/// reports whether the thinning decision at `x` ever changed; it never
/// should, since `r_s(x)` is a stabilization radius.
pub fn stabilization_trials<const D: usize>(
    spec: &KnnSpec,
    x: Point<D>,
    trials: usize,
    seed: SeedSpec,
) -> Result<usize> {
    spec.check_dim::<D>()?;
    let r = radius_r_s(spec, &x)?;
    let base = sample_poisson(&spec.intensity(), &Region::<D>::unit_cube(), seed)?;
    let inner: Vec<Point<D>> = base.points().iter().copied().filter(|p| p.dist(&x) <= r).collect();
    let decide = |pts: Vec<Point<D>>| -> Result<bool> {
        let mut all = vec![x];
        all.extend(pts);
        let cfg = PointConfiguration::new(all, Region::unit_cube());
        let out = exceedance_from_configuration(spec, &cfg)?;
        Ok(out.retained_centers.contains(&x))
    };
    let reference = decide(base.points().to_vec())?;
    let mut changed = 0;
    let mut rng = seed.substream(1).rng();
    for _ in 0..trials {
        let fresh = sample_poisson(&spec.intensity(), &Region::<D>::unit_cube(), SeedSpec::new(rng.random(), 0))?;
        let mut pts = inner.clone();
        pts.extend(fresh.points().iter().copied().filter(|p| p.dist(&x) > r));
        if decide(pts)? != reference {
            changed += 1;
        }
    }
    Ok(changed)
}
