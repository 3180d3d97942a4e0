//! Experiment configs: one flat TOML table per experiment.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::SizeFunctional;
use crate::integral::BpTestFunction;
use crate::knn::KnnSpec;
use crate::mosaic::{CalibrationMode, MosaicKind, MosaicSpec};
use crate::sampling::Density;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Knn,
    Voronoi,
    Delaunay,
    BpCheck,
    MeckeCheck,
    LemmaCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Knn => "knn",
            ExperimentKind::Voronoi => "voronoi",
            ExperimentKind::Delaunay => "delaunay",
            ExperimentKind::BpCheck => "bp-check",
            ExperimentKind::MeckeCheck => "mecke-check",
            ExperimentKind::LemmaCheck => "lemma-check",
        }
    }

    /// Kinds producing one exceedance process per replicate.
    pub fn is_pipeline(self) -> bool {
        matches!(self, ExperimentKind::Knn | ExperimentKind::Voronoi | ExperimentKind::Delaunay)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// About a twentieth of the configured work.
    Smoke,
    /// About a quarter.
    Desk,
    #[default]
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityName {
    Uniform,
    Ramp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BpIdentity {
    Spherical,
    Linear,
    Subsphere,
    /// The planar cases of all three formulas plus the spatial linear ones.
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeckeCase {
    UnitSquare,
    Isolated,
    Pair,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaCase {
    /// Lens bound `L_d(B(o,1) \ B(x,1))`.
    Xa,
    /// Circumdisk overlap bound for near-regular Delaunay triangles.
    Overlap,
    /// Two-point bound for large near-round Voronoi cells.
    Pair,
}

/// A declarative experiment. Unset keys take the defaults of the accessor
/// methods; keys irrelevant to `kind` are rejected by [`validate`].
///
/// For the check kinds `replicates` is the Monte Carlo sample size.
///
/// [`validate`]: ExperimentSpec::validate
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: Option<ExperimentKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,

    // knn; `k` is also the subspace dimension of bp-check
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<DensityName>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ramp_amplitude: Option<f64>,

    // voronoi, delaunay; `gamma` also for mecke-check
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub functional: Option<SizeFunctional>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub buffer_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_typical: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_terms: Option<bool>,

    // bp-check
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity: Option<BpIdentity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_function: Option<BpTestFunction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,

    // mecke-check
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mecke_fn: Option<MeckeCase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,

    // lemma-check
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma: Option<LemmaCase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat table of scalars serializes")
    }

    pub fn kind(&self) -> ExperimentKind {
        self.kind.expect("validated spec has a kind")
    }

    pub fn replicates(&self) -> usize {
        self.replicates.unwrap_or(100)
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed.unwrap_or(1)
    }

    pub fn label(&self) -> String {
        self.id.clone().unwrap_or_else(|| self.kind().name().to_string())
    }

    pub fn knn_spec(&self) -> Result<KnnSpec> {
        let density = match self.density.unwrap_or(DensityName::Uniform) {
            DensityName::Uniform => Density::Uniform,
            DensityName::Ramp => Density::Ramp {
                amplitude: self.ramp_amplitude.unwrap_or(0.5),
            },
        };
        let spec = KnnSpec {
            d: self.d.unwrap_or(2),
            k: self.k.unwrap_or(0),
            c: self.c.unwrap_or(1.0),
            s: self.s.unwrap_or(1e4),
            density,
        };
        spec.validate().map_err(|e| config_err(e.to_string()))?;
        Ok(spec)
    }

    pub fn mosaic_spec(&self) -> Result<MosaicSpec> {
        let kind = match self.kind() {
            ExperimentKind::Voronoi => MosaicKind::Voronoi,
            ExperimentKind::Delaunay => MosaicKind::Delaunay,
            other => return Err(config_err(format!("{} is not a mosaic experiment", other.name()))),
        };
        let default_functional = match kind {
            MosaicKind::Voronoi => SizeFunctional::CenteredInradius,
            MosaicKind::Delaunay => SizeFunctional::Volume,
        };
        let mut spec = MosaicSpec::new(
            kind,
            self.gamma.unwrap_or(1.0),
            self.t.unwrap_or(400.0),
            self.c.unwrap_or(1.0),
            self.functional.unwrap_or(default_functional),
        );
        if let Some(b) = self.buffer_factor {
            spec.buffer_factor = b;
        }
        spec.validate().map_err(|e| config_err(e.to_string()))?;
        Ok(spec)
    }

    pub fn calibration(&self) -> CalibrationMode {
        self.calibration.unwrap_or(CalibrationMode::Exact)
    }

    pub fn n_typical(&self) -> usize {
        self.n_typical.unwrap_or(20_000)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma.unwrap_or(1.0)
    }

    /// Checks every parameter domain and rejects keys that `kind` ignores.
    pub fn validate(&self) -> Result<()> {
        let Some(kind) = self.kind else {
            return Err(config_err("missing `kind`"));
        };
        let set = |present: bool, key: &str, allowed: &[ExperimentKind]| -> Result<()> {
            if present && !allowed.contains(&kind) {
                return Err(config_err(format!("key `{key}` does not apply to kind {}", kind.name())));
            }
            Ok(())
        };
        use ExperimentKind::*;
        set(self.d.is_some(), "d", &[Knn, BpCheck, LemmaCheck])?;
        set(self.k.is_some(), "k", &[Knn, BpCheck])?;
        set(self.c.is_some(), "c", &[Knn, Voronoi, Delaunay, LemmaCheck])?;
        set(self.s.is_some(), "s", &[Knn])?;
        set(self.density.is_some(), "density", &[Knn])?;
        set(self.ramp_amplitude.is_some(), "ramp_amplitude", &[Knn])?;
        set(self.gamma.is_some(), "gamma", &[Voronoi, Delaunay, MeckeCheck, LemmaCheck])?;
        set(self.t.is_some(), "t", &[Voronoi, Delaunay, LemmaCheck])?;
        set(self.functional.is_some(), "functional", &[Voronoi, Delaunay])?;
        set(self.buffer_factor.is_some(), "buffer_factor", &[Voronoi, Delaunay])?;
        set(self.calibration.is_some(), "calibration", &[Voronoi, Delaunay])?;
        set(self.n_typical.is_some(), "n_typical", &[Voronoi, Delaunay])?;
        set(self.bound_terms.is_some(), "bound_terms", &[Voronoi])?;
        set(self.identity.is_some(), "identity", &[BpCheck])?;
        set(self.test_function.is_some(), "test_function", &[BpCheck])?;
        set(self.m.is_some(), "m", &[BpCheck])?;
        set(self.r0.is_some(), "r0", &[BpCheck])?;
        set(self.mecke_fn.is_some(), "mecke_fn", &[MeckeCheck])?;
        set(self.radius.is_some(), "radius", &[MeckeCheck])?;
        set(self.lemma.is_some(), "lemma", &[LemmaCheck])?;
        set(self.eps.is_some(), "eps", &[LemmaCheck])?;

        match kind {
            Knn => {
                self.knn_spec()?;
            }
            Voronoi | Delaunay => {
                let spec = self.mosaic_spec()?;
                let needed = crate::mosaic::min_calibration_sample(spec.target_level());
                if self.calibration() == CalibrationMode::Empirical && self.n_typical() < needed {
                    return Err(config_err(format!(
                        "empirical calibration needs n_typical >= {needed}, got {}",
                        self.n_typical()
                    )));
                }
                if self.calibration() == CalibrationMode::Exact && crate::mosaic::calibrate_v_t_exact(&spec).is_err() {
                    return Err(config_err(format!(
                        "no exact calibration for {} on the {} mosaic; use calibration = \"empirical\"",
                        spec.functional.name(),
                        spec.kind.name()
                    )));
                }
            }
            BpCheck => {
                let d = self.d.unwrap_or(2);
                if !(2..=3).contains(&d) {
                    return Err(config_err(format!("d = {d} is not supported (2 or 3)")));
                }
                if let Some(r0) = self.r0 {
                    if !(r0 >= 0.0 && r0.is_finite()) {
                        return Err(config_err(format!("r0 = {r0} must be finite and nonnegative")));
                    }
                }
            }
            MeckeCheck => {
                let g = self.gamma();
                if !(g > 0.0 && g.is_finite()) {
                    return Err(config_err(format!("gamma = {g} must be positive")));
                }
                if let Some(r) = self.radius {
                    if !(0.0..=1.0).contains(&r) {
                        return Err(config_err(format!("radius = {r} outside [0, 1]")));
                    }
                }
            }
            LemmaCheck => {
                let lemma = self.lemma.unwrap_or(LemmaCase::Xa);
                if lemma == LemmaCase::Xa && !(2..=3).contains(&self.d.unwrap_or(2)) {
                    return Err(config_err("lemma xa needs d = 2 or 3"));
                }
                if let Some(e) = self.eps {
                    if !(e > 0.0 && e < 1.0) {
                        return Err(config_err(format!("eps = {e} outside (0, 1)")));
                    }
                }
                if lemma == LemmaCase::Pair {
                    MosaicSpec::new(MosaicKind::Voronoi, self.gamma(), self.t.unwrap_or(400.0), self.c.unwrap_or(1.0), SizeFunctional::CenteredInradius)
                        .validate()
                        .map_err(|e| config_err(e.to_string()))?;
                }
            }
        }
        Ok(())
    }

    /// Shrinks the Monte Carlo effort for the smaller scales. Count-law
    /// diagnostics need 100 replicates, so pipelines keep at least that
    /// many, and empirical calibrations keep the sample size they require.
    pub fn scaled(&self, scale: Scale) -> Self {
        let div = match scale {
            Scale::Full => return self.clone(),
            Scale::Desk => 4,
            Scale::Smoke => 20,
        };
        let mut out = self.clone();
        let reps = self.replicates();
        let floor = if self.kind().is_pipeline() { 100 } else { 1000 };
        out.replicates = Some((reps / div).max(floor.min(reps)));
        if let Some(n) = self.n_typical {
            let mut needed = 0;
            if self.calibration() == CalibrationMode::Empirical {
                if let Ok(spec) = self.mosaic_spec() {
                    needed = crate::mosaic::min_calibration_sample(spec.target_level());
                }
            }
            out.n_typical = Some((n / div).max(needed.min(n)).max(1000.min(n)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_knn_and_defaults() {
        let spec = ExperimentSpec::parse("kind = \"knn\"\nreplicates = 20\ns = 1e3\n").unwrap();
        assert_eq!(spec.kind(), ExperimentKind::Knn);
        let knn = spec.knn_spec().unwrap();
        assert_eq!((knn.d, knn.k, knn.c, knn.s), (2, 0, 1.0, 1e3));
        assert_eq!(spec.master_seed(), 1);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "replicates = 3",
            "kind = \"knn\"\nt = 400",
            "kind = \"knn\"\ns = 2.0",
            "kind = \"voronoi\"\nt = 0.5",
            "kind = \"voronoi\"\nfunctional = \"circumradius\"\ncalibration = \"exact\"",
            "kind = \"knn\"\nfoo = 1",
            "kind = \"teapot\"",
            "kind = \"mecke-check\"\nradius = 2.0",
        ] {
            assert!(matches!(ExperimentSpec::parse(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn toml_round_trip() {
        let spec = ExperimentSpec::parse(
            "kind = \"delaunay\"\nid = \"x\"\nreplicates = 7\nt = 100.0\ncalibration = \"empirical\"\nn_typical = 50000\n",
        )
        .unwrap();
        assert_eq!(ExperimentSpec::parse(&spec.to_toml()).unwrap(), spec);
    }

    #[test]
    fn scaling_keeps_minimums() {
        let spec = ExperimentSpec::parse("kind = \"voronoi\"\nreplicates = 1000\nn_typical = 100000\n").unwrap();
        let smoke = spec.scaled(Scale::Smoke);
        assert_eq!(smoke.replicates, Some(100));
        assert_eq!(smoke.n_typical, Some(5000));
        assert_eq!(spec.scaled(Scale::Desk).replicates, Some(250));
        assert_eq!(spec.scaled(Scale::Full), spec);
        let few = ExperimentSpec::parse("kind = \"knn\"\nreplicates = 30\n").unwrap();
        assert_eq!(few.scaled(Scale::Smoke).replicates, Some(30));
        let emp = ExperimentSpec::parse("kind = \"delaunay\"\ncalibration = \"empirical\"\nn_typical = 100000\n").unwrap();
        let needed = crate::mosaic::min_calibration_sample(emp.mosaic_spec().unwrap().target_level());
        assert!((40_000..40_002).contains(&needed));
        assert_eq!(emp.scaled(Scale::Smoke).n_typical, Some(needed));
    }
}
