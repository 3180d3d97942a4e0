//! Exceedance center processes of a mosaic observed on `W_t = [0, √t]^2`.

use super::calibrate::{exact_survival, CalibratedThreshold};
use super::delaunay::delaunay_cells_certified;
use super::spec::{MosaicKind, MosaicSpec};
use super::typical::TypicalCellSample;
use super::voronoi::{stabilization_radius_voronoi, voronoi_cell};
use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::sampling::{sample_homogeneous, PointConfiguration, SeedSpec};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CenterProcessOutput {
    /// Nuclei (Voronoi) or circumcenters (Delaunay) in `W_t` whose cell
    /// exceeds the threshold.
    pub centers: Vec<Point2>,
    pub sigmas: Vec<f64>,
    /// Radius of a ball around each retained center determining its cell:
    /// the cone radius for Voronoi, the circumradius for Delaunay.
    pub stab_radii: Vec<f64>,
    pub count: usize,
    /// Largest `Σ` over all cells with center in `W_t`; `-∞` if there are none.
    pub max_sigma: f64,
    /// `t^{-1/2}` times the centers, in `[0,1]^2`.
    pub scaled_centers: Vec<Point2>,
    /// Number of cells with center in `W_t`.
    pub n_cells: usize,
}

impl CenterProcessOutput {
    fn push(&mut self, center: Point2, sigma: f64, stab: f64, side: f64) {
        self.centers.push(center);
        self.sigmas.push(sigma);
        self.stab_radii.push(stab);
        self.scaled_centers.push(center.scale(1.0 / side));
        self.count += 1;
    }
}

/// One realization of the exceedance center process. `Σ > v_t` is strict.
pub fn build_center_process(spec: &MosaicSpec, threshold: &CalibratedThreshold, seed: SeedSpec) -> Result<CenterProcessOutput> {
    spec.validate()?;
    let window = spec.window();
    let side = window.side();
    let region = window.sampling::<2>();
    let core = window.core::<2>();
    let mut rng = seed.rng();
    let pts = sample_homogeneous(spec.gamma, &region, &mut rng);
    let cfg = PointConfiguration::new(pts, region);
    let v_t = threshold.v_t;
    let mut out = CenterProcessOutput {
        max_sigma: f64::NEG_INFINITY,
        ..Default::default()
    };
    match spec.kind {
        MosaicKind::Voronoi => {
            for (i, x) in cfg.points().iter().enumerate() {
                if !window.in_core(x) {
                    continue;
                }
                let vc = voronoi_cell(&cfg, i)?;
                let sigma = spec.sigma(&vc.cell())?;
                out.n_cells += 1;
                out.max_sigma = out.max_sigma.max(sigma);
                if sigma > v_t {
                    let r = stabilization_radius_voronoi(&cfg, x);
                    out.push(*x, sigma, r, side);
                }
            }
        }
        MosaicKind::Delaunay => {
            for cell in delaunay_cells_certified(&cfg, &core)? {
                let sigma = spec.sigma(&cell.recentred())?;
                out.n_cells += 1;
                out.max_sigma = out.max_sigma.max(sigma);
                if sigma > v_t {
                    out.push(cell.center, sigma, cell.radius, side);
                }
            }
        }
    }
    Ok(out)
}

/// `λ = -log(β t S(M))` for the maximum `M` over `W_t`, using the exact
/// typical survival `S` where known and otherwise the empirical survival
/// of `typical`. Asymptotically standard Gumbel.
pub fn gumbel_statistic_mosaic(spec: &MosaicSpec, max_sigma: f64, typical: Option<&TypicalCellSample>) -> Result<f64> {
    let s = match exact_survival(spec, max_sigma) {
        Some(s) => s,
        None => {
            let Some(typ) = typical else {
                return Err(Error::Domain(format!(
                    "no exact law for {} on the {} mosaic and no typical sample",
                    spec.functional.name(),
                    spec.kind.name()
                )));
            };
            if max_sigma == f64::NEG_INFINITY {
                1.0
            } else {
                typ.survival(max_sigma).0
            }
        }
    };
    Ok(-(spec.center_intensity() * spec.t * s).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::SizeFunctional;

    fn spec(kind: MosaicKind, f: SizeFunctional) -> MosaicSpec {
        MosaicSpec::new(kind, 1.0, 100.0, 1.0, f)
    }

    #[test]
    fn trivial_thresholds() {
        let s = spec(MosaicKind::Voronoi, SizeFunctional::CenteredInradius);
        let seed = SeedSpec::new(1, 0);
        let none = build_center_process(&s, &CalibratedThreshold::fixed(f64::INFINITY), seed).unwrap();
        assert_eq!(none.count, 0);
        assert!(none.max_sigma > 0.0);
        let all = build_center_process(&s, &CalibratedThreshold::fixed(0.0), seed).unwrap();
        assert_eq!(all.count, all.n_cells);
        assert_eq!(none.n_cells, all.n_cells);
        assert!(all.scaled_centers.iter().all(|p| (0.0..=1.0).contains(&p.x()) && (0.0..=1.0).contains(&p.y())));
        assert!(all.stab_radii.iter().all(|r| r.is_finite()));
        assert_eq!(all.centers[3].scale(0.1), all.scaled_centers[3]);
    }

    #[test]
    fn delaunay_center_process() {
        let s = spec(MosaicKind::Delaunay, SizeFunctional::Volume);
        let all = build_center_process(&s, &CalibratedThreshold::fixed(0.0), SeedSpec::new(2, 0)).unwrap();
        // about 2γt circumcenters
        assert!((all.n_cells as f64 - 200.0).abs() < 60.0, "{}", all.n_cells);
        assert_eq!(all.count, all.n_cells);
    }

    #[test]
    fn counts_are_roughly_poisson_mean_c() {
        let s = spec(MosaicKind::Voronoi, SizeFunctional::CenteredInradius);
        let th = crate::mosaic::calibrate::calibrate_v_t_exact(&s).unwrap();
        let n = 200;
        let total: usize = (0..n).map(|i| build_center_process(&s, &th, SeedSpec::new(3, i)).unwrap().count).sum();
        let mean = total as f64 / n as f64;
        assert!((mean - 1.0).abs() < 0.25, "{mean}");
    }

    #[test]
    fn gumbel_statistic_uses_exact_laws() {
        let s = spec(MosaicKind::Voronoi, SizeFunctional::CenteredInradius);
        let th = crate::mosaic::calibrate::calibrate_v_t_exact(&s).unwrap();
        let lam = gumbel_statistic_mosaic(&s, th.v_t, None).unwrap();
        assert!(lam.abs() < 1e-9);
        let vol = spec(MosaicKind::Voronoi, SizeFunctional::Volume);
        assert!(gumbel_statistic_mosaic(&vol, 1.0, None).is_err());
    }
}
