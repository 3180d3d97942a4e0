//! The geometric lemmas behind the limit theorems: the lens bound, the
//! two-point bound for large round Voronoi cells, the circumdisk overlap
//! bound for near-regular Delaunay triangles and the bound-term estimates.

use geoextremes::diag::estimate_bound_terms;
use geoextremes::geom::SizeFunctional;
use geoextremes::knn::verify_lemma_xa;
use geoextremes::mosaic::{
    calibrate_v_t_exact, check_overlap_bound_delaunay, check_pair_bound_voronoi, delaunay_shape_eps, MosaicKind, MosaicSpec,
    PairBoundConfig,
};
use geoextremes::sampling::SeedSpec;

fn main() -> geoextremes::Result<()> {
    let seed = SeedSpec::new(13, 0);
    let lens = verify_lemma_xa(2, 10_000, seed)?;
    println!("lens bound: {} samples, {} violations, min slack {:.3e}", lens.samples, lens.violations, lens.min_slack);

    let spec = MosaicSpec::new(MosaicKind::Voronoi, 1.0, 400.0, 1.0, SizeFunctional::CenteredInradius);
    let th = calibrate_v_t_exact(&spec)?;
    let pair = check_pair_bound_voronoi(&spec, &th, 2000, seed, &PairBoundConfig::default())?;
    println!("pair bound at v = {:.4}, eps = {}:", pair.v, pair.eps);
    for row in &pair.rows {
        println!("  |x - y| = {:>4}: P = {:.2e} ± {:.1e}, bound {:.2e}", row.distance, row.lhs, row.se, row.rhs);
    }

    let overlap = check_overlap_bound_delaunay(20_000, seed);
    println!(
        "overlap bound, eps = {:.4}: {} admissible, {} violations, max ratio {:.4} <= {:.4}",
        delaunay_shape_eps(),
        overlap.admissible,
        overlap.violations,
        overlap.max_ratio,
        overlap.bound_ratio
    );

    for t in [100.0, 400.0] {
        let spec = MosaicSpec::new(MosaicKind::Voronoi, 1.0, t, 1.0, SizeFunctional::CenteredInradius);
        let est = estimate_bound_terms(&spec, &calibrate_v_t_exact(&spec)?, 60, seed)?;
        println!(
            "bound terms at t = {t}: stab_tail {:.3}, pair_close_mass {:.3} ± {:.3}, c2_like {:.3} ± {:.3}",
            est.stab_tail.value, est.pair_close_mass.value, est.pair_close_mass.se, est.c2_like.value, est.c2_like.se
        );
    }
    Ok(())
}
