//! Built-in experiment configs.

use super::spec::ExperimentSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub description: &'static str,
    pub config: &'static str,
}

impl CatalogEntry {
    pub fn spec(&self) -> ExperimentSpec {
        ExperimentSpec::parse(self.config).expect("catalog configs are valid")
    }
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        id: "knn-gumbel-2d",
        description: "nearest-neighbor exceedances in the unit square, s = 10^4, Poisson(1) counts and Gumbel maxima",
        config: r#"kind = "knn"
id = "knn-gumbel-2d"
replicates = 2000
master_seed = 11
d = 2
k = 0
c = 1.0
s = 10000.0
"#,
    },
    CatalogEntry {
        id: "voronoi-inradius-gumbel",
        description: "Voronoi cells with large centered inradius, t = 400, exact calibration",
        config: r#"kind = "voronoi"
id = "voronoi-inradius-gumbel"
replicates = 1000
master_seed = 12
gamma = 1.0
t = 400.0
c = 1.0
functional = "centered_inradius"
calibration = "exact"
n_typical = 20000
"#,
    },
    CatalogEntry {
        id: "delaunay-rathie",
        description: "Delaunay triangles with large area, t = 400, calibrated by the Rathie law",
        config: r#"kind = "delaunay"
id = "delaunay-rathie"
replicates = 1000
master_seed = 13
gamma = 1.0
t = 400.0
c = 1.0
functional = "volume"
calibration = "exact"
n_typical = 100000
"#,
    },
    CatalogEntry {
        id: "bp-spherical",
        description: "spherical Blaschke-Petkantschin formula in the plane, Gaussian and cube test functions",
        config: r#"kind = "bp-check"
id = "bp-spherical"
replicates = 1000000
master_seed = 14
identity = "spherical"
d = 2
"#,
    },
    CatalogEntry {
        id: "bp-all",
        description: "all implemented Blaschke-Petkantschin cases",
        config: r#"kind = "bp-check"
id = "bp-all"
replicates = 1000000
master_seed = 15
identity = "all"
"#,
    },
    CatalogEntry {
        id: "mecke",
        description: "Mecke equation for three test functions at unit intensity",
        config: r#"kind = "mecke-check"
id = "mecke"
replicates = 100000
master_seed = 16
gamma = 1.0
mecke_fn = "all"
radius = 0.1
"#,
    },
    CatalogEntry {
        id: "lemma-xA",
        description: "lens bound for the difference of two unit disks",
        config: r#"kind = "lemma-check"
id = "lemma-xA"
replicates = 10000
master_seed = 17
lemma = "xa"
d = 2
"#,
    },
    CatalogEntry {
        id: "lemma-overlap",
        description: "circumdisk overlap bound for near-regular Delaunay triangles",
        config: r#"kind = "lemma-check"
id = "lemma-overlap"
replicates = 100000
master_seed = 18
lemma = "overlap"
"#,
    },
    CatalogEntry {
        id: "lemma-pair",
        description: "two-point bound for pairs of large, nearly round Voronoi cells",
        config: r#"kind = "lemma-check"
id = "lemma-pair"
replicates = 20000
master_seed = 19
lemma = "pair"
gamma = 1.0
t = 400.0
eps = 0.3
"#,
    },
];

pub fn list_experiments() -> &'static [CatalogEntry] {
    CATALOG
}

pub fn find(id: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn required_ids_present_and_parse() {
        for id in ["knn-gumbel-2d", "voronoi-inradius-gumbel", "delaunay-rathie", "bp-spherical", "mecke", "lemma-xA", "lemma-overlap"] {
            assert!(find(id).is_some(), "{id}");
        }
        for e in CATALOG {
            let spec = e.spec();
            assert_eq!(spec.id.as_deref(), Some(e.id));
            assert_eq!(ExperimentSpec::parse(&spec.to_toml()).unwrap(), spec);
        }
    }
}
