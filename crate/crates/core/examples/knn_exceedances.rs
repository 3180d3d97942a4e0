//! Points whose nearest-neighbor ball is unusually large: thresholds, radii,
//! the thinned process and its Gumbel-standardized maximum.

use geoextremes::diag::{gumbel_ks, tv_counts_vs_poisson, CountSample, MaximaSample};
use geoextremes::geom::Point;
use geoextremes::knn::{build_knn_exceedance, exact_mean_count, gumbel_statistic_knn, radius_r_s, threshold_a, KnnSpec};
use geoextremes::sampling::SeedSpec;

fn main() -> geoextremes::Result<()> {
    let spec = KnnSpec::uniform(2, 0, 1e4);
    println!("a_s for k = 0, s = 1e4: {:.6}", threshold_a(0, 1e4)?);
    println!("a_s for k = 2, s = 1e4: {:.6}", threshold_a(2, 1e4)?);
    for x in [[0.5, 0.5], [0.0, 0.5], [0.0, 0.0]] {
        println!("r_s at {:?}: {:.6}", x, radius_r_s(&spec, &Point(x))?);
    }
    for s in [1e3, 1e6, 1e9] {
        println!("mean retained count, k = 1, s = {s:e}: {:.6}", exact_mean_count(&KnnSpec::uniform(2, 1, s))?);
    }

    let seed = SeedSpec::new(3, 0);
    let mut counts = Vec::new();
    let mut stats = Vec::new();
    for i in 0..400 {
        let out = build_knn_exceedance::<2>(&spec, seed.replicate(i))?;
        stats.push(gumbel_statistic_knn(&out, &spec)?);
        counts.push(out.count);
    }
    let tv = tv_counts_vs_poisson(&CountSample { counts: counts.clone(), target_mean: 1.0 })?;
    let ks = gumbel_ks(&MaximaSample { statistics: stats })?;
    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    println!("400 replicates: mean count {mean:.3}, count TV to Poisson(1) {tv:.4}, Gumbel KS {ks:.4}");
    Ok(())
}
