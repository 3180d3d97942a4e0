//! Parameters of a mosaic exceedance pipeline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{delaunay_center_intensity, ConvexCell, SizeFunctional};
use crate::mosaic::N_CONES;
use crate::sampling::Window;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MosaicKind {
    Voronoi,
    Delaunay,
}

impl MosaicKind {
    pub fn name(self) -> &'static str {
        match self {
            MosaicKind::Voronoi => "voronoi",
            MosaicKind::Delaunay => "delaunay",
        }
    }
}

fn default_buffer_factor() -> f64 {
    3.0
}

/// A planar Poisson mosaic of intensity `gamma` observed on `[0, √t]^2`, with
/// threshold level `c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MosaicSpec {
    pub kind: MosaicKind,
    pub gamma: f64,
    pub t: f64,
    pub c: f64,
    pub functional: SizeFunctional,
    /// Sampling margin in units of `b_t`.
    #[serde(default = "default_buffer_factor")]
    pub buffer_factor: f64,
}

impl MosaicSpec {
    pub fn new(kind: MosaicKind, gamma: f64, t: f64, c: f64, functional: SizeFunctional) -> Self {
        Self {
            kind,
            gamma,
            t,
            c,
            functional,
            buffer_factor: default_buffer_factor(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        use SizeFunctional::*;
        let supported = match self.kind {
            MosaicKind::Voronoi => matches!(self.functional, Volume | CenteredInradius | IntrinsicV1),
            MosaicKind::Delaunay => matches!(self.functional, Volume | Inradius | Circumradius),
        };
        if !supported {
            return Err(Error::Domain(format!(
                "functional {} is not supported on the {} mosaic",
                self.functional.name(),
                self.kind.name()
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::Domain(format!("gamma must be positive, got {}", self.gamma)));
        }
        if !(self.t > 1.0 && self.t.is_finite()) {
            return Err(Error::Domain(format!("t must exceed 1, got {}", self.t)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Domain(format!("c must be positive, got {}", self.c)));
        }
        if !(self.buffer_factor > 0.0 && self.buffer_factor.is_finite()) {
            return Err(Error::Domain(format!("buffer factor must be positive, got {}", self.buffer_factor)));
        }
        Ok(())
    }

    pub fn degree(&self) -> u32 {
        self.functional.degree()
    }

    /// Intensity of the points carrying the marks: nuclei for Voronoi,
    /// circumcenters (`2γ`) for Delaunay.
    pub fn center_intensity(&self) -> f64 {
        match self.kind {
            MosaicKind::Voronoi => self.gamma,
            MosaicKind::Delaunay => delaunay_center_intensity(2, self.gamma),
        }
    }

    /// Stabilization scale: `2(3 I log t / γ)^{1/2}` with `I = 6` cones for
    /// Voronoi, `(3 log t / (γπ))^{1/2}` for Delaunay.
    pub fn b_t(&self) -> f64 {
        let log_t = self.t.ln();
        match self.kind {
            MosaicKind::Voronoi => 2.0 * (3.0 * N_CONES as f64 * log_t / self.gamma).sqrt(),
            MosaicKind::Delaunay => (3.0 * log_t / (self.gamma * std::f64::consts::PI)).sqrt(),
        }
    }

    pub fn buffer(&self) -> f64 {
        self.buffer_factor * self.b_t()
    }

    pub fn window(&self) -> Window {
        Window::new(self.t, 2, self.buffer())
    }

    /// `P(Σ(Z) > v_t)` required so that the expected number of exceedances
    /// in the window is `c`.
    pub fn target_level(&self) -> f64 {
        self.c / (self.center_intensity() * self.t)
    }

    /// The size functional of a recentred cell.
    pub fn sigma(&self, cell: &ConvexCell) -> Result<f64> {
        self.functional.evaluate(cell)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supported_pairs() {
        use SizeFunctional::*;
        let ok = |kind, f| MosaicSpec::new(kind, 1.0, 100.0, 1.0, f).validate().is_ok();
        assert!(ok(MosaicKind::Voronoi, CenteredInradius));
        assert!(ok(MosaicKind::Voronoi, Volume));
        assert!(ok(MosaicKind::Voronoi, IntrinsicV1));
        assert!(!ok(MosaicKind::Voronoi, Inradius));
        assert!(ok(MosaicKind::Delaunay, Volume));
        assert!(ok(MosaicKind::Delaunay, Circumradius));
        assert!(!ok(MosaicKind::Delaunay, CenteredInradius));
        assert!(MosaicSpec::new(MosaicKind::Voronoi, 0.0, 100.0, 1.0, Volume).validate().is_err());
    }

    #[test]
    fn scales_and_levels() {
        let v = MosaicSpec::new(MosaicKind::Voronoi, 1.0, 400.0, 1.0, SizeFunctional::CenteredInradius);
        assert!((v.b_t() - 2.0 * (18.0 * 400f64.ln()).sqrt()).abs() < 1e-12);
        assert_eq!(v.target_level(), 1.0 / 400.0);
        let d = MosaicSpec::new(MosaicKind::Delaunay, 1.0, 100.0, 1.0, SizeFunctional::Volume);
        assert!((d.target_level() - 0.005).abs() < 1e-12);
        assert!((d.buffer() - 3.0 * (3.0 * 100f64.ln() / std::f64::consts::PI).sqrt()).abs() < 1e-12);
        assert_eq!(d.window().side(), 10.0);
    }

    #[test]
    fn serde_round_trip() {
        let d = MosaicSpec::new(MosaicKind::Delaunay, 2.0, 100.0, 1.5, SizeFunctional::Inradius);
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains("\"delaunay\"") && s.contains("\"inradius\""));
        assert_eq!(serde_json::from_str::<MosaicSpec>(&s).unwrap(), d);
    }
}
