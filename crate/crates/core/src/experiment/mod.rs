//! Declarative experiments: configs, the runner writing result bundles,
//! the built-in catalog and the acceptance suite.

pub mod acceptance;
pub mod catalog;
pub mod run;
pub mod spec;

pub use acceptance::{run_acceptance, run_criterion, CriterionOutcome, CRITERIA};
pub use catalog::{find, list_experiments, CatalogEntry, CATALOG};
pub use run::{exit_code, fmt_f64, run_experiment, BpCase, ResultBundle, SCHEMA};
pub use spec::{BpIdentity, DensityName, ExperimentKind, ExperimentSpec, LemmaCase, MeckeCase, Scale};
