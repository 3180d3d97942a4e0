//! Seeded Poisson sampling on boxes, neighbor queries and the Mecke equation.

use geoextremes::geom::Point2;
use geoextremes::sampling::{sample_poisson, verify_mecke, Density, IntensitySpec, MeckeTestFn, Region, SeedSpec};

fn main() -> geoextremes::Result<()> {
    let region = Region::Box { lo: Point2::xy(0.0, 0.0), hi: Point2::xy(10.0, 10.0) };
    let seed = SeedSpec::new(42, 0);

    let homogeneous = sample_poisson(&IntensitySpec::constant(1.0), &region, seed)?;
    println!("homogeneous, intensity 1 on [0,10]^2: {} points (mean 100)", homogeneous.len());

    let x = Point2::xy(5.0, 5.0);
    let nearest = homogeneous.knn_query(&x, 1)?;
    println!("nearest point to (5, 5): ({:.3}, {:.3}) at distance {:.3}", nearest.x(), nearest.y(), nearest.dist(&x));
    println!("points within 2 of (5, 5): {}", homogeneous.count_ball(&x, 2.0, None));

    let ramp = IntensitySpec::scaled(1.0, 1000.0, Density::Ramp { amplitude: 1.5 });
    let unit = Region::<2>::unit_cube();
    let cfg = sample_poisson(&ramp, &unit, seed.replicate(1))?;
    let left = cfg.points().iter().filter(|p| p.x() < 0.5).count();
    println!("ramp density 1 + 1.5(x - 1/2), s = 1000: {} points, {} in the left half (mean 312.5)", cfg.len(), left);

    for f in [
        MeckeTestFn::UnitSquare,
        MeckeTestFn::IsolatedInUnitSquare { radius: 0.1 },
        MeckeTestFn::PairWithin { radius: 0.2 },
    ] {
        let rep = verify_mecke(5.0, f, 20_000, seed.substream(7))?;
        println!(
            "Mecke {:?}: lhs {:.4} ± {:.4}, rhs {:.4} ± {:.4}, exact {:.4}, z {:.2}",
            f, rep.lhs, rep.lhs_se, rep.rhs, rep.rhs_se, rep.exact_rhs, rep.z
        );
    }
    Ok(())
}
