//! Thresholds `v_t` with `P(Σ(Z) > v_t) = c / (β t)`.

use serde::{Deserialize, Serialize};

use super::spec::{MosaicKind, MosaicSpec};
use super::typical::TypicalCellSample;
use crate::error::{Error, Result};
use crate::geom::SizeFunctional;
use crate::integral::rathie_quantile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationMode {
    /// Empirical quantile of a typical-cell sample.
    Empirical,
    /// Inversion of the exact survival function.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibratedThreshold {
    pub v_t: f64,
    pub target_level: f64,
    /// Size of the calibration sample; 0 in exact mode.
    pub n_typical: usize,
    pub se: f64,
    pub mode: CalibrationMode,
}

impl CalibratedThreshold {
    /// A fixed threshold, e.g. `0` or `+∞`.
    pub fn fixed(v_t: f64) -> Self {
        Self {
            v_t,
            target_level: f64::NAN,
            n_typical: 0,
            se: 0.0,
            mode: CalibrationMode::Exact,
        }
    }
}

/// Empirical `(1 - p)`-quantile: the `⌈n(1-p)⌉`-th smallest value.
pub fn upper_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let rank = (n as f64 * (1.0 - p)).ceil() as isize - 1;
    sorted[rank.clamp(0, n as isize - 1) as usize]
}

/// Half the spread of the order statistics at ranks `n(1-p) ± √(np(1-p))`.
pub fn quantile_se(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len() as f64;
    let centre = n * (1.0 - p);
    let w = (n * p * (1.0 - p)).sqrt();
    let at = |r: f64| sorted[(r.round() as isize - 1).clamp(0, sorted.len() as isize - 1) as usize];
    0.5 * (at(centre + w) - at(centre - w))
}

/// Empirical calibration from a typical-cell sample. Requires at least
/// `50 / target_level` cells.
pub fn calibrate_v_t(spec: &MosaicSpec, typical: &TypicalCellSample) -> Result<CalibratedThreshold> {
    spec.validate()?;
    let p = spec.target_level();
    calibrate_at_level(p, typical)
}

/// Smallest typical sample accepted for calibration at level `p`.
pub fn min_calibration_sample(p: f64) -> usize {
    (50.0 / p).ceil() as usize
}

pub fn calibrate_at_level(p: f64, typical: &TypicalCellSample) -> Result<CalibratedThreshold> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("target level {p} outside (0, 1]")));
    }
    let n = typical.sigma_values.len();
    let needed = min_calibration_sample(p);
    if n < needed {
        return Err(Error::InsufficientSample { needed, have: n });
    }
    let mut sorted = typical.sigma_values.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(CalibratedThreshold {
        v_t: upper_quantile(&sorted, p),
        target_level: p,
        n_typical: n,
        se: quantile_se(&sorted, p),
        mode: CalibrationMode::Empirical,
    })
}

/// Exact calibration where the typical law is known in closed form:
/// Delaunay areas (Rathie law) and Voronoi centered inradii
/// (`P(ρ_o > r) = e^{-γπ(2r)^2}`).
pub fn calibrate_v_t_exact(spec: &MosaicSpec) -> Result<CalibratedThreshold> {
    spec.validate()?;
    let p = spec.target_level();
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("target level {p} outside (0, 1)")));
    }
    let v_t = match (spec.kind, spec.functional) {
        (MosaicKind::Delaunay, SizeFunctional::Volume) => rathie_quantile(p, spec.gamma)?,
        (MosaicKind::Voronoi, SizeFunctional::CenteredInradius) => {
            (-p.ln() / (4.0 * std::f64::consts::PI * spec.gamma)).sqrt()
        }
        _ => {
            return Err(Error::Domain(format!(
                "no exact typical law for {} on the {} mosaic",
                spec.functional.name(),
                spec.kind.name()
            )))
        }
    };
    Ok(CalibratedThreshold {
        v_t,
        target_level: p,
        n_typical: 0,
        se: 0.0,
        mode: CalibrationMode::Exact,
    })
}

/// Exact typical survival `P(Σ(Z) > v)` where available.
pub fn exact_survival(spec: &MosaicSpec, v: f64) -> Option<f64> {
    match (spec.kind, spec.functional) {
        (MosaicKind::Delaunay, SizeFunctional::Volume) => Some(crate::integral::rathie_survival(v.max(0.0), spec.gamma)),
        (MosaicKind::Voronoi, SizeFunctional::CenteredInradius) => {
            let r = v.max(0.0);
            Some((-spec.gamma * std::f64::consts::PI * 4.0 * r * r).exp())
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mosaic::typical::{sample_typical_delaunay, sample_typical_voronoi};
    use crate::sampling::SeedSpec;

    fn sample_of(values: Vec<f64>) -> TypicalCellSample {
        TypicalCellSample { sigma_values: values, ..Default::default() }
    }

    #[test]
    fn level_one_gives_minimum() {
        let s = sample_of((0..100).map(|i| (i as f64 * 0.37).sin() + 2.0).collect());
        let th = calibrate_at_level(1.0, &s).unwrap();
        let min = s.sigma_values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(th.v_t, min);
    }

    #[test]
    fn quantile_rank_convention() {
        let sorted: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(upper_quantile(&sorted, 0.05), 950.0);
        assert_eq!(upper_quantile(&sorted, 0.0505), 950.0);
        let s = sample_of(sorted);
        assert!(matches!(calibrate_at_level(0.01, &s), Err(Error::InsufficientSample { needed: 5000, have: 1000 })));
    }

    #[test]
    fn exact_delaunay_threshold() {
        let spec = MosaicSpec::new(MosaicKind::Delaunay, 1.0, 100.0, 1.0, SizeFunctional::Volume);
        let th = calibrate_v_t_exact(&spec).unwrap();
        assert!((th.target_level - 0.005).abs() < 1e-12);
        let s = crate::integral::rathie_survival(th.v_t, 1.0);
        assert!((s - 0.005).abs() < 1e-10);
    }

    #[test]
    fn empirical_and_exact_agree() {
        let spec = MosaicSpec::new(MosaicKind::Delaunay, 1.0, 100.0, 1.0, SizeFunctional::Volume);
        let typ = sample_typical_delaunay(&spec, 20_000, SeedSpec::new(11, 0)).unwrap();
        let emp = calibrate_v_t(&spec, &typ).unwrap();
        let exact = calibrate_v_t_exact(&spec).unwrap();
        assert!((emp.v_t - exact.v_t).abs() <= 2.0 * emp.se, "{emp:?} vs {exact:?}");

        let spec = MosaicSpec::new(MosaicKind::Voronoi, 1.0, 100.0, 1.0, SizeFunctional::CenteredInradius);
        let typ = sample_typical_voronoi(&spec, 10_000, SeedSpec::new(12, 0)).unwrap();
        let emp = calibrate_v_t(&spec, &typ).unwrap();
        let exact = calibrate_v_t_exact(&spec).unwrap();
        assert!((emp.v_t - exact.v_t).abs() <= 3.0 * emp.se, "{emp:?} vs {exact:?}");
    }
}
