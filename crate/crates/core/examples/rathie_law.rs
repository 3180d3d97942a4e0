//! The modified Bessel function K_{1/6} and the exact law of the area of the
//! typical Poisson-Delaunay triangle.

use geoextremes::integral::{bessel_k16, rathie_density, rathie_mean, rathie_quantile, rathie_survival};

fn main() -> geoextremes::Result<()> {
    for x in [0.1, 1.0, 5.0] {
        println!("K_1/6({x}) = {:.10}", bessel_k16(x));
    }
    println!("{:>6} {:>12} {:>12}", "v", "density", "survival");
    for v in [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0] {
        println!("{v:>6} {:>12.8} {:>12.8}", rathie_density(v), rathie_survival(v, 1.0));
    }
    println!("mean area at unit intensity {:.8}, at intensity 3 {:.8}", rathie_mean(1.0), rathie_mean(3.0));
    for p in [0.1, 0.01, 1.0 / 800.0] {
        println!("upper {p:.5}-quantile: {:.6}", rathie_quantile(p, 1.0)?);
    }
    Ok(())
}
