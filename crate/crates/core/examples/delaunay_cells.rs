//! Delaunay triangulation of a Poisson sample, shape deviations and the
//! typical Delaunay triangle against the Rathie law.

use geoextremes::geom::{deviation_delaunay, Matching, Point2, SizeFunctional};
use geoextremes::integral::rathie_survival;
use geoextremes::mosaic::{delaunay_cells_certified, sample_typical_delaunay, MosaicKind, MosaicSpec};
use geoextremes::sampling::{sample_poisson, IntensitySpec, Region, SeedSpec};

fn main() -> geoextremes::Result<()> {
    let region = Region::Box { lo: Point2::xy(0.0, 0.0), hi: Point2::xy(30.0, 30.0) };
    let core = Region::Box { lo: Point2::xy(10.0, 10.0), hi: Point2::xy(20.0, 20.0) };
    let cfg = sample_poisson(&IntensitySpec::constant(1.0), &region, SeedSpec::new(8, 0))?;
    let cells = delaunay_cells_certified(&cfg, &core)?;
    println!("{} triangles with circumcenter in a 10 x 10 core (about 200 expected)", cells.len());
    let largest = cells
        .iter()
        .max_by(|a, b| a.simplex().area().total_cmp(&b.simplex().area()))
        .expect("nonempty");
    let tri = largest.simplex();
    println!(
        "largest triangle: area {:.4}, deviation from regular {:.4}",
        tri.area(),
        deviation_delaunay(&largest.recentred(), Matching::Cyclic)?
    );

    let spec = MosaicSpec::new(MosaicKind::Delaunay, 1.0, 400.0, 1.0, SizeFunctional::Volume);
    let typical = sample_typical_delaunay(&spec, 20_000, SeedSpec::new(9, 0))?;
    println!(
        "center intensity estimate {:.4} (exact 2), mean area {:.4} (exact 0.5)",
        typical.center_intensity.unwrap_or(f64::NAN),
        typical.mean_area().0
    );
    for v in [0.5, 1.0, 2.0] {
        let (p, se) = typical.survival(v);
        println!("P(area > {v}) = {p:.4} ± {se:.4}, Rathie {:.4}", rathie_survival(v, 1.0));
    }
    Ok(())
}
