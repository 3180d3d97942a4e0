//! Diagnostics comparing exceedance processes with their Poisson limits.

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Poisson};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::mosaic::{build_center_process, CalibratedThreshold, MosaicSpec};
use crate::sampling::SeedSpec;

/// Minimum replicates for a count-law comparison.
pub const MIN_REPLICATES: usize = 100;
/// Minimum pooled centers for the uniformity test.
pub const MIN_CENTERS: usize = 200;
/// Minimum statistics for the Gumbel fit.
pub const MIN_MAXIMA: usize = 200;

/// Exceedance counts over replicates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountSample {
    pub counts: Vec<usize>,
    pub target_mean: f64,
}

/// Standardized maxima; `-∞` marks replicates without any candidate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaximaSample {
    pub statistics: Vec<f64>,
}

fn poisson_law(mean: f64) -> Result<Poisson> {
    Poisson::new(mean).map_err(|e| Error::Domain(format!("Poisson mean {mean}: {e}")))
}

/// `½ Σ_k |p̂(k) - P(N = k)|` for `N ~ Poisson(target_mean)`, with the
/// Poisson mass beyond the largest observed count added in full.
pub fn tv_counts_vs_poisson(sample: &CountSample) -> Result<f64> {
    let n = sample.counts.len();
    if n < MIN_REPLICATES {
        return Err(Error::InsufficientSample { needed: MIN_REPLICATES, have: n });
    }
    let law = poisson_law(sample.target_mean)?;
    let max = *sample.counts.iter().max().unwrap_or(&0);
    let mut freq = vec![0usize; max + 1];
    for &c in &sample.counts {
        freq[c] += 1;
    }
    let mut tv = 0.0;
    for (k, &f) in freq.iter().enumerate() {
        tv += (f as f64 / n as f64 - law.pmf(k as u64)).abs();
    }
    tv += law.sf(max as u64);
    Ok((0.5 * tv).clamp(0.0, 1.0))
}

/// Empirical count frequencies `p̂(k)` for `k = 0..=max`.
pub fn count_pmf(counts: &[usize]) -> Vec<f64> {
    let max = counts.iter().copied().max().unwrap_or(0);
    let mut freq = vec![0.0; max + 1];
    for &c in counts {
        freq[c] += 1.0;
    }
    let n = counts.len().max(1) as f64;
    freq.iter().map(|f| f / n).collect()
}

/// Chi-square test of uniformity on `[0,1]^d` over `g^d` equal bins.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UniformityReport {
    pub n: usize,
    pub g: usize,
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pools scaled centers and bins them with the largest `g` giving at
/// least 5 expected points per bin.
pub fn spatial_uniformity<const D: usize>(centers: &[Point<D>]) -> Result<UniformityReport> {
    let n = centers.len();
    if n < MIN_CENTERS {
        return Err(Error::InsufficientCenters { needed: MIN_CENTERS, have: n });
    }
    let g = ((n as f64 / 5.0).powf(1.0 / D as f64).floor() as usize).max(2);
    let bins = g.pow(D as u32);
    let mut count = vec![0usize; bins];
    for p in centers {
        let mut idx = 0;
        for i in 0..D {
            let c = ((p[i] * g as f64).floor() as isize).clamp(0, g as isize - 1) as usize;
            idx = idx * g + c;
        }
        count[idx] += 1;
    }
    let expected = n as f64 / bins as f64;
    let statistic: f64 = count.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dof = bins - 1;
    let chi = ChiSquared::new(dof as f64).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(UniformityReport { n, g, statistic, dof, p_value: chi.sf(statistic) })
}

/// Kolmogorov-Smirnov distance between the sample and `F(λ) = exp(-e^{-λ})`.
pub fn gumbel_ks(sample: &MaximaSample) -> Result<f64> {
    let finite = sample.statistics.iter().filter(|s| s.is_finite()).count();
    if finite < MIN_MAXIMA {
        return Err(Error::InsufficientSample { needed: MIN_MAXIMA, have: finite });
    }
    if sample.statistics.iter().any(|s| s.is_nan()) {
        return Err(Error::Domain("NaN among the maxima".into()));
    }
    let mut xs = sample.statistics.clone();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let cdf = |x: f64| (-(-x).exp()).exp();
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d.clamp(0.0, 1.0))
}

/// A mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    fn from_values(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self { value: 0.0, se: 0.0 };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        Self { value: mean, se: (var / n).sqrt() }
    }
}

/// Empirical analogues of the terms of the Poisson approximation bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundTermEstimates {
    /// Fraction of retained centers whose stabilization radius exceeds `b_t`.
    pub stab_tail: Estimate,
    /// Number of pairs `(w, z)` with `w` from one replicate, `z` from an
    /// independent one and `|w - z| ≤ 2 b_t`; estimates
    /// `∫∫ 1{|w - z| ≤ 2 b_t} dEξ_t(w) dEξ_t(z)`.
    pub pair_close_mass: Estimate,
    /// Number of unordered retained pairs within `2 b_t` in one realization.
    pub c2_like: Estimate,
    pub b_t: f64,
    pub replicates: usize,
}

fn close_pairs(a: &[Point<2>], b: &[Point<2>], r: f64) -> usize {
    a.iter().map(|w| b.iter().filter(|z| w.dist(z) <= r).count()).sum()
}

/// Runs `replicates` realizations of the center process. Cross-replicate
/// pairs use disjoint replicate pairs `(2i, 2i+1)`, so their terms are
/// independent.
pub fn estimate_bound_terms(
    spec: &MosaicSpec,
    threshold: &CalibratedThreshold,
    replicates: usize,
    seed: SeedSpec,
) -> Result<BoundTermEstimates> {
    let b_t = spec.b_t();
    let outs = (0..replicates as u64)
        .into_par_iter()
        .map(|i| build_center_process(spec, threshold, seed.replicate(i)))
        .collect::<Result<Vec<_>>>()?;
    let stab: Vec<f64> = outs
        .iter()
        .flat_map(|o| o.stab_radii.iter().map(|&r| f64::from(u8::from(r > b_t))))
        .collect();
    let cross: Vec<f64> = outs
        .chunks_exact(2)
        .map(|p| close_pairs(&p[0].centers, &p[1].centers, 2.0 * b_t) as f64)
        .collect();
    let within: Vec<f64> = outs
        .iter()
        .map(|o| {
            let pts = &o.centers;
            let mut n = 0usize;
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    if pts[i].dist(&pts[j]) <= 2.0 * b_t {
                        n += 1;
                    }
                }
            }
            n as f64
        })
        .collect();
    Ok(BoundTermEstimates {
        stab_tail: Estimate::from_values(&stab),
        pair_close_mass: Estimate::from_values(&cross),
        c2_like: Estimate::from_values(&within),
        b_t,
        replicates,
    })
}

/// Whether `values` is nonincreasing up to `k` pooled standard errors at
/// each step.
pub fn nonincreasing_within(values: &[Estimate], k: f64) -> bool {
    values.windows(2).all(|w| w[1].value <= w[0].value + k * (w[0].se.powi(2) + w[1].se.powi(2)).sqrt())
}
