use serde::{Deserialize, Serialize};

use super::window::Region;
use crate::error::{Error, Result};
use crate::geom::Point;

/// A probability-scale density on `[0,1]^d`, bounded away from 0 and infinity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Density {
    Uniform,
    /// `1 + amplitude * (x_1 - 1/2)`, with `|amplitude| < 2`.
    Ramp { amplitude: f64 },
    /// Piecewise constant on a regular grid; `values` in row-major order
    /// with the last coordinate varying fastest.
    Grid { shape: Vec<usize>, values: Vec<f64> },
}

impl Density {
    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            Density::Uniform => Ok(()),
            Density::Ramp { amplitude } => {
                if amplitude.is_finite() && amplitude.abs() < 2.0 {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("ramp amplitude {amplitude} outside (-2, 2)")))
                }
            }
            Density::Grid { shape, values } => {
                if shape.len() != d || shape.iter().any(|&n| n == 0) {
                    return Err(Error::Domain(format!("grid shape {shape:?} does not fit d = {d}")));
                }
                if values.len() != shape.iter().product::<usize>() {
                    return Err(Error::Domain("grid value count does not match shape".into()));
                }
                if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                    return Err(Error::Domain("grid values must be finite and positive".into()));
                }
                Ok(())
            }
        }
    }

    /// Value at `x`, which must lie in `[0,1]^d`.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Density::Uniform => 1.0,
            Density::Ramp { amplitude } => 1.0 + amplitude * (x[0] - 0.5),
            Density::Grid { shape, values } => values[grid_cell(shape, x)],
        }
    }

    /// `(f_-, f_+)`.
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            Density::Uniform => (1.0, 1.0),
            Density::Ramp { amplitude } => (1.0 - amplitude.abs() / 2.0, 1.0 + amplitude.abs() / 2.0),
            Density::Grid { values, .. } => (
                values.iter().copied().fold(f64::INFINITY, f64::min),
                values.iter().copied().fold(0.0, f64::max),
            ),
        }
    }

    /// `∫_{[0,1]^d} f`.
    pub fn total(&self) -> f64 {
        match self {
            Density::Uniform | Density::Ramp { .. } => 1.0,
            Density::Grid { values, .. } => values.iter().sum::<f64>() / values.len() as f64,
        }
    }

    /// `∫ f` over the box `[lo, hi] ∩ [0,1]^d`.
    pub fn box_integral(&self, lo: &[f64], hi: &[f64]) -> f64 {
        let d = lo.len();
        let clo: Vec<f64> = lo.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        let chi: Vec<f64> = hi.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        let vol: f64 = (0..d).map(|i| (chi[i] - clo[i]).max(0.0)).product();
        if vol == 0.0 {
            return 0.0;
        }
        match self {
            Density::Uniform => vol,
            Density::Ramp { amplitude } => vol * (1.0 + amplitude * (0.5 * (clo[0] + chi[0]) - 0.5)),
            Density::Grid { shape, values } => {
                let mut total = 0.0;
                for (flat, v) in values.iter().enumerate() {
                    let mut rem = flat;
                    let mut overlap = *v;
                    for i in (0..d).rev() {
                        let n = shape[i] as f64;
                        let j = (rem % shape[i]) as f64;
                        rem /= shape[i];
                        let (a, b) = (j / n, (j + 1.0) / n);
                        overlap *= (chi[i].min(b) - clo[i].max(a)).max(0.0);
                        if overlap == 0.0 {
                            break;
                        }
                    }
                    total += overlap;
                }
                total
            }
        }
    }
}

fn grid_cell(shape: &[usize], x: &[f64]) -> usize {
    shape.iter().zip(x.iter()).fold(0, |acc, (&n, &c)| {
        let j = ((c * n as f64).floor().max(0.0) as usize).min(n - 1);
        acc * n + j
    })
}

/// Intensity of a Poisson process: constant, or `c s f` on `[0,1]^d` and
/// zero outside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntensitySpec {
    Constant { gamma: f64 },
    ScaledDensity { c: f64, s: f64, density: Density },
}

impl IntensitySpec {
    pub fn constant(gamma: f64) -> Self {
        IntensitySpec::Constant { gamma }
    }

    pub fn scaled(c: f64, s: f64, density: Density) -> Self {
        IntensitySpec::ScaledDensity { c, s, density }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            IntensitySpec::Constant { gamma } if gamma.is_finite() && *gamma >= 0.0 => Ok(()),
            IntensitySpec::Constant { gamma } => Err(Error::Domain(format!("intensity {gamma} is not a finite nonnegative number"))),
            IntensitySpec::ScaledDensity { c, s, density } => {
                if !(c.is_finite() && *c > 0.0 && s.is_finite() && *s > 0.0) {
                    return Err(Error::Domain(format!("c = {c} and s = {s} must be positive")));
                }
                density.validate(d)
            }
        }
    }

    pub fn rate_at<const D: usize>(&self, x: &Point<D>) -> f64 {
        match self {
            IntensitySpec::Constant { gamma } => *gamma,
            IntensitySpec::ScaledDensity { c, s, density } => {
                if x.0.iter().all(|v| (0.0..=1.0).contains(v)) {
                    c * s * density.value(&x.0)
                } else {
                    0.0
                }
            }
        }
    }

    /// Upper bound of the rate, used as the thinning envelope.
    pub fn envelope(&self) -> f64 {
        match self {
            IntensitySpec::Constant { gamma } => *gamma,
            IntensitySpec::ScaledDensity { c, s, density } => c * s * density.bounds().1,
        }
    }

    /// Mean number of points in a box region; for balls only the constant
    /// case is closed form.
    pub fn measure<const D: usize>(&self, region: &Region<D>) -> Result<f64> {
        match (self, region) {
            (IntensitySpec::Constant { gamma }, r) => Ok(gamma * r.volume()),
            (IntensitySpec::ScaledDensity { c, s, density }, Region::Box { lo, hi }) => {
                Ok(c * s * density.box_integral(&lo.0, &hi.0))
            }
            (IntensitySpec::ScaledDensity { .. }, Region::Ball { .. }) => Err(Error::Domain(
                "ball measure of a density intensity has no closed form here".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_integrates_to_one() {
        let f = Density::Ramp { amplitude: 0.8 };
        assert!((f.box_integral(&[0.0, 0.0], &[1.0, 1.0]) - 1.0).abs() < 1e-15);
        assert!((f.box_integral(&[-1.0, -1.0], &[0.5, 2.0]) - 0.5 * 0.8).abs() < 1e-15);
        assert_eq!(f.bounds(), (0.6, 1.4));
    }

    #[test]
    fn grid_density_lookup_and_integral() {
        let f = Density::Grid { shape: vec![2, 2], values: vec![1.0, 2.0, 3.0, 4.0] };
        f.validate(2).unwrap();
        assert_eq!(f.value(&[0.1, 0.9]), 2.0);
        assert_eq!(f.value(&[0.9, 0.1]), 3.0);
        assert_eq!(f.value(&[1.0, 1.0]), 4.0);
        assert!((f.total() - 2.5).abs() < 1e-15);
        assert!((f.box_integral(&[0.25, 0.0], &[0.75, 0.5]) - 0.25 * (1.0 + 3.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn scaled_intensity_vanishes_outside_unit_cube() {
        let lam = IntensitySpec::scaled(2.0, 50.0, Density::Uniform);
        assert_eq!(lam.rate_at(&Point([0.5, 0.5])), 100.0);
        assert_eq!(lam.rate_at(&Point([1.5, 0.5])), 0.0);
        let big = Region::Box { lo: Point([-1.0, -1.0]), hi: Point([2.0, 2.0]) };
        assert_eq!(lam.measure(&big).unwrap(), 100.0);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(IntensitySpec::constant(-1.0).validate(2).is_err());
        assert!(IntensitySpec::scaled(1.0, 10.0, Density::Ramp { amplitude: 2.5 }).validate(2).is_err());
        assert!(Density::Grid { shape: vec![2], values: vec![1.0, 1.0] }.validate(2).is_err());
    }
}
