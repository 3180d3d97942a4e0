//! Monte Carlo checks of the spherical, affine and subsphere
//! Blaschke-Petkantschin formulas against exact integrals.

use geoextremes::integral::{verify_bp_linear, verify_bp_spherical, verify_bp_subsphere, BpTestFunction};
use geoextremes::sampling::SeedSpec;

fn main() -> geoextremes::Result<()> {
    let n = 100_000;
    let seed = SeedSpec::new(12, 0);
    for f in [BpTestFunction::Gaussian, BpTestFunction::Cube] {
        let r = verify_bp_spherical(2, f, n, seed)?;
        println!("spherical d=2 {:<8} lhs {:.5} rhs {:.5} ± {:.5} exact {:.5} z {:+.2}", f.name(), r.lhs, r.rhs, r.rhs_se, r.exact_lhs, r.z_score);
        for (d, k) in [(2, 1), (3, 2)] {
            let r = verify_bp_linear(d, k, f, n, seed)?;
            println!("linear d={d} k={k} {:<8} lhs {:.5} rhs {:.5} ± {:.5} exact {:.5} z {:+.2}", f.name(), r.lhs, r.rhs, r.rhs_se, r.exact_lhs, r.z_score);
        }
        let r = verify_bp_subsphere(2, 1, 1, &[[0.0, 1.0, 0.0]], 0.7, f, n, seed)?;
        println!("subsphere d=2 k=1 m=1 r0=0.7 {:<8} lhs {:.5} rhs {:.5} ± {:.5} z {:+.2}", f.name(), r.lhs, r.rhs, r.rhs_se, r.z_score);
    }
    Ok(())
}
