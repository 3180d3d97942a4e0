//! Voronoi cells of a Poisson process: construction, functionals, the cone
//! stabilization radius and the typical cell.

use geoextremes::geom::{deviation_voronoi, Point2, SizeFunctional};
use geoextremes::mosaic::{
    sample_typical_voronoi, stabilization_radius_voronoi, stabilization_trials_voronoi, voronoi_cell, MosaicKind, MosaicSpec,
};
use geoextremes::sampling::{sample_poisson, IntensitySpec, Region, SeedSpec};

fn main() -> geoextremes::Result<()> {
    let region = Region::Box { lo: Point2::xy(-12.0, -12.0), hi: Point2::xy(12.0, 12.0) };
    let cfg = sample_poisson(&IntensitySpec::constant(1.0), &region, SeedSpec::new(5, 0))?;
    let i = (0..cfg.len())
        .min_by(|&a, &b| cfg.points()[a].norm_sq().total_cmp(&cfg.points()[b].norm_sq()))
        .expect("nonempty");
    let vc = voronoi_cell(&cfg, i)?;
    let cell = vc.cell();
    let f = cell.functionals()?;
    println!("cell of the nucleus nearest the origin: {} vertices, {} neighbors", cell.len(), vc.neighbors().len());
    println!(
        "area {:.4}, perimeter {:.4}, centered inradius {:.4}, centered circumradius {:.4}, deviation {:.4}",
        f.area,
        f.perimeter,
        f.rho_o,
        f.r_o,
        deviation_voronoi(&cell)?
    );
    println!("cone stabilization radius: {:.4}", stabilization_radius_voronoi(&cfg, &vc.nucleus));

    let rep = stabilization_trials_voronoi(1.0, 15.0, 50, SeedSpec::new(6, 0))?;
    println!(
        "50 resamplings outside B(x, 2R): {} changed cells, {} changed radii, stopping set {}",
        rep.changed_cells, rep.changed_radius, rep.stopping_set
    );

    let spec = MosaicSpec::new(MosaicKind::Voronoi, 1.0, 400.0, 1.0, SizeFunctional::CenteredInradius);
    let typical = sample_typical_voronoi(&spec, 5000, SeedSpec::new(7, 0))?;
    let (mean, se) = typical.mean_area();
    println!("typical cell, 5000 samples: mean area {mean:.4} ± {se:.4} (exact 1)");
    for r in [0.2, 0.4] {
        let (p, se) = typical.survival(r);
        println!("P(rho_o > {r}) = {p:.4} ± {se:.4}, exact {:.4}", (-std::f64::consts::PI * 4.0 * r * r).exp());
    }
    Ok(())
}
