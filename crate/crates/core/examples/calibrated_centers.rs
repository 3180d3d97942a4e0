//! Calibrated thresholds and the exceedance center processes of large
//! Voronoi and Delaunay cells, with their Gumbel statistics.

use geoextremes::diag::{gumbel_ks, spatial_uniformity, tv_counts_vs_poisson, CountSample, MaximaSample};
use geoextremes::geom::SizeFunctional;
use geoextremes::mosaic::{
    build_center_process, calibrate_v_t, calibrate_v_t_exact, gumbel_statistic_mosaic, sample_typical, MosaicKind, MosaicSpec,
};
use geoextremes::sampling::SeedSpec;

fn main() -> geoextremes::Result<()> {
    for (kind, functional) in [(MosaicKind::Voronoi, SizeFunctional::CenteredInradius), (MosaicKind::Delaunay, SizeFunctional::Volume)] {
        let spec = MosaicSpec::new(kind, 1.0, 400.0, 1.0, functional);
        let exact = calibrate_v_t_exact(&spec)?;
        let typical = sample_typical(&spec, 50_000, SeedSpec::new(10, 0))?;
        let empirical = calibrate_v_t(&spec, &typical)?;
        println!(
            "{}: b_t {:.2}, v_t exact {:.4}, empirical {:.4} ± {:.4}",
            kind.name(),
            spec.b_t(),
            exact.v_t,
            empirical.v_t,
            empirical.se
        );
        let (mut counts, mut stats, mut centers) = (Vec::new(), Vec::new(), Vec::new());
        for i in 0..300 {
            let out = build_center_process(&spec, &exact, SeedSpec::new(11, i))?;
            stats.push(gumbel_statistic_mosaic(&spec, out.max_sigma, None)?);
            counts.push(out.count);
            centers.extend(out.scaled_centers);
        }
        let tv = tv_counts_vs_poisson(&CountSample { counts, target_mean: 1.0 })?;
        let ks = gumbel_ks(&MaximaSample { statistics: stats })?;
        let uni = spatial_uniformity(&centers).map(|r| format!("{:.3}", r.p_value)).unwrap_or_else(|e| e.to_string());
        println!("  300 replicates: count TV {tv:.4}, Gumbel KS {ks:.4}, uniformity p {uni}");
    }
    Ok(())
}
