//! Runs a catalog experiment at smoke scale and prints its summary.

use geoextremes::experiment::{find, run_experiment, Scale};

fn main() -> geoextremes::Result<()> {
    let spec = find("knn-gumbel-2d").expect("catalog entry").spec().scaled(Scale::Smoke);
    let dir = std::env::temp_dir().join("geoextremes-example-bundle");
    let bundle = run_experiment(&spec, &dir, None)?;
    println!("wrote {} rows to {}", bundle.rows, bundle.results_csv.display());
    for key in ["tv_counts", "ks_gumbel", "mean_count", "p0_empirical", "p0_poisson", "results_sha256"] {
        println!("{key}: {}", bundle.summary[key]);
    }
    Ok(())
}
