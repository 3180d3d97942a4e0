use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::config::PointConfiguration;
use super::intensity::IntensitySpec;
use super::seed::SeedSpec;
use super::window::Region;
use crate::error::{Error, Result};
use crate::geom::Point;

/// Samples a Poisson process with the given intensity on `region`.
///
/// Inhomogeneous intensities are obtained by thinning a homogeneous process
/// at the envelope rate.
pub fn sample_poisson<const D: usize>(
    intensity: &IntensitySpec,
    region: &Region<D>,
    seed: SeedSpec,
) -> Result<PointConfiguration<D>> {
    sample_poisson_with(intensity, region, &mut seed.rng())
}

pub fn sample_poisson_with<const D: usize, R: Rng + ?Sized>(
    intensity: &IntensitySpec,
    region: &Region<D>,
    rng: &mut R,
) -> Result<PointConfiguration<D>> {
    intensity.validate(D)?;
    let envelope = intensity.envelope();
    let points = sample_points(intensity, envelope, region, rng)?;
    let h = if envelope > 0.0 { envelope.powf(-1.0 / D as f64) } else { f64::INFINITY };
    Ok(PointConfiguration::with_cell_width(points, *region, h))
}

/// Raw point list of a homogeneous process of rate `gamma` on `region`.
pub fn sample_homogeneous<const D: usize, R: Rng + ?Sized>(
    gamma: f64,
    region: &Region<D>,
    rng: &mut R,
) -> Vec<Point<D>> {
    let n = poisson_count(gamma * region.volume(), rng);
    (0..n).map(|_| region.sample_uniform(rng)).collect()
}

fn sample_points<const D: usize, R: Rng + ?Sized>(
    intensity: &IntensitySpec,
    envelope: f64,
    region: &Region<D>,
    rng: &mut R,
) -> Result<Vec<Point<D>>> {
    let mean = envelope * region.volume();
    if !mean.is_finite() {
        return Err(Error::Domain(format!("expected count {mean} is not finite")));
    }
    match intensity {
        IntensitySpec::Constant { gamma } => Ok(sample_homogeneous(*gamma, region, rng)),
        IntensitySpec::ScaledDensity { .. } => {
            let n = poisson_count(mean, rng);
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                let x = region.sample_uniform(rng);
                let rate = intensity.rate_at(&x);
                if rate > envelope * (1.0 + 1e-12) {
                    return Err(Error::EnvelopeViolation {
                        value: rate,
                        bound: envelope,
                        at: x.0.to_vec(),
                    });
                }
                if rng.random::<f64>() * envelope < rate {
                    out.push(x);
                }
            }
            Ok(out)
        }
    }
}

pub fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if !(mean > 0.0) {
        return 0;
    }
    Poisson::new(mean).map(|p| p.sample(rng) as usize).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::intensity::Density;
    use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson as PoissonPmf};

    fn square(side: f64) -> Region<2> {
        Region::Box { lo: Point([0.0, 0.0]), hi: Point([side, side]) }
    }

    fn counts(intensity: &IntensitySpec, region: &Region<2>, reps: u64, master: u64) -> Vec<usize> {
        (0..reps)
            .map(|r| sample_poisson(intensity, region, SeedSpec::new(master, r)).unwrap().len())
            .collect()
    }

    fn mean_and_se(xs: &[usize]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<usize>() as f64 / n;
        let v = xs.iter().map(|&x| (x as f64 - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (v / n).sqrt())
    }

    /// Chi-square p-value of counts against Poisson(mean), pooling tails so
    /// every bin expects at least 5.
    fn poisson_gof(xs: &[usize], mean: f64) -> f64 {
        let pmf = PoissonPmf::new(mean).unwrap();
        let n = xs.len() as f64;
        let max = *xs.iter().max().unwrap() + 1;
        let mut bins: Vec<(usize, usize, f64)> = Vec::new(); // (lo, hi, expected)
        let mut lo = 0;
        let mut acc = 0.0;
        for k in 0..=max {
            acc += pmf.pmf(k as u64) * n;
            if acc >= 5.0 {
                bins.push((lo, k, acc));
                lo = k + 1;
                acc = 0.0;
            }
        }
        // fold the remainder, including the unbounded upper tail, into the last bin
        let head: f64 = bins[..bins.len() - 1].iter().map(|b| b.2).sum();
        let last = bins.last_mut().unwrap();
        last.1 = usize::MAX;
        last.2 = n - head;
        let stat: f64 = bins
            .iter()
            .map(|&(a, b, e)| {
                let o = xs.iter().filter(|&&x| x >= a && x <= b).count() as f64;
                (o - e).powi(2) / e
            })
            .sum();
        ChiSquared::new((bins.len() - 1) as f64).unwrap().sf(stat)
    }

    #[test]
    fn homogeneous_mean_count() {
        let xs = counts(&IntensitySpec::constant(1.0), &square(10.0), 10_000, 7);
        let (m, _) = mean_and_se(&xs);
        assert!((m - 100.0).abs() <= 3.0 * 10.0 / 100.0, "mean {m}");
    }

    #[test]
    fn zero_measure_region_is_empty() {
        let cfg = sample_poisson(&IntensitySpec::constant(5.0), &square(0.0), SeedSpec::new(1, 0)).unwrap();
        assert!(cfg.is_empty());
    }

    #[test]
    fn scaled_density_mean_count() {
        let lam = IntensitySpec::scaled(1.0, 50.0, Density::Uniform);
        let xs = counts(&lam, &Region::unit_cube(), 10_000, 8);
        let (m, se) = mean_and_se(&xs);
        assert!((m - 50.0).abs() <= 3.0 * se, "mean {m} ± {se}");
    }

    #[test]
    fn count_law_is_poisson() {
        let settings = [
            (IntensitySpec::constant(2.0), square(3.0), 18.0),
            (IntensitySpec::scaled(1.0, 40.0, Density::Ramp { amplitude: 1.0 }), Region::unit_cube(), 40.0),
            (IntensitySpec::constant(0.5), square(2.0), 2.0),
        ];
        for (i, (lam, region, mean)) in settings.iter().enumerate() {
            let xs = counts(lam, region, 4000, 100 + i as u64);
            let p = poisson_gof(&xs, *mean);
            assert!(p > 1e-3, "setting {i}: p = {p}");
        }
    }

    #[test]
    fn thinning_follows_the_density() {
        let lam = IntensitySpec::scaled(1.0, 2000.0, Density::Ramp { amplitude: 1.5 });
        let mut left = 0usize;
        let mut total = 0usize;
        for r in 0..50 {
            let cfg = sample_poisson(&lam, &Region::<2>::unit_cube(), SeedSpec::new(9, r)).unwrap();
            left += cfg.points().iter().filter(|p| p[0] < 0.5).count();
            total += cfg.len();
        }
        // mass of {x_1 < 1/2} under 1 + 1.5 (x_1 - 1/2) is 0.5 - 1.5/8
        let p = 0.5 - 1.5 / 8.0;
        let frac = left as f64 / total as f64;
        assert!((frac - p).abs() < 4.0 * (p * (1.0 - p) / total as f64).sqrt(), "{frac}");
    }

    #[test]
    fn identical_seeds_reproduce_bitwise() {
        let lam = IntensitySpec::scaled(1.0, 300.0, Density::Ramp { amplitude: 0.5 });
        let a = sample_poisson(&lam, &Region::<2>::unit_cube(), SeedSpec::new(42, 3)).unwrap();
        let b = sample_poisson(&lam, &Region::<2>::unit_cube(), SeedSpec::new(42, 3)).unwrap();
        let bits = |c: &PointConfiguration<2>| c.points().iter().flat_map(|p| p.0.map(f64::to_bits)).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        let c = sample_poisson(&lam, &Region::<2>::unit_cube(), SeedSpec::new(42, 4)).unwrap();
        assert_ne!(bits(&a), bits(&c));
    }

    #[test]
    fn sampled_configurations_are_simple_and_inside() {
        let region = square(10.0);
        for r in 0..1000 {
            let cfg = sample_poisson(&IntensitySpec::constant(1.0), &region, SeedSpec::new(11, r)).unwrap();
            assert!(cfg.is_simple());
            assert!(cfg.points().iter().all(|p| region.contains(p)));
        }
    }

    #[test]
    fn ball_region_sampling() {
        let ball = Region::Ball { center: Point([1.0, 1.0, 1.0]), radius: 2.0 };
        let xs: Vec<usize> = (0..2000)
            .map(|r| {
                let cfg: PointConfiguration<3> = sample_poisson(&IntensitySpec::constant(1.0), &ball, SeedSpec::new(12, r)).unwrap();
                assert!(cfg.points().iter().all(|p| ball.contains(p)));
                cfg.len()
            })
            .collect();
        let (m, se) = mean_and_se(&xs);
        assert!((m - ball.volume()).abs() <= 3.5 * se, "{m} vs {}", ball.volume());
    }
}
