use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

/// Volume of the unit ball in `R^j` (`kappa_0 = 1`).
pub fn kappa(j: usize) -> f64 {
    match j {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / j as f64 * kappa(j - 2),
    }
}

/// Surface area of the unit sphere `S^{j-1}`, i.e. `j * kappa_j`.
pub fn omega(j: usize) -> f64 {
    j as f64 * kappa(j)
}

/// Dimension-dependent ball volumes.
#[derive(Clone, Debug, PartialEq)]
pub struct DimConstants {
    pub d: usize,
    pub kappa_d: f64,
    /// `kappa_1, ..., kappa_d`.
    pub kappa_list: Vec<f64>,
}

impl DimConstants {
    pub fn new(d: usize) -> Self {
        Self {
            d,
            kappa_d: kappa(d),
            kappa_list: (1..=d).map(kappa).collect(),
        }
    }
}

/// Intensity of Delaunay cell circumcenters for a Poisson process of
/// intensity `gamma` in `R^d`.
pub fn delaunay_center_intensity(d: usize, gamma: f64) -> f64 {
    let df = d as f64;
    let log_ratio = ln_gamma((df * df + 1.0) / 2.0) - ln_gamma(df * df / 2.0)
        + df * (ln_gamma(1.0 + df / 2.0) - ln_gamma((df + 1.0) / 2.0));
    2f64.powf(df + 1.0) * PI.powf((df - 1.0) / 2.0) / (df * df * (df + 1.0))
        * log_ratio.exp()
        * gamma
}

/// Affine Blaschke-Petkantschin constant
/// `omega_{d-k+1} ... omega_d / (omega_1 ... omega_k)`
/// for the Haar probability measure on the Grassmannian `G(d,k)`.
pub fn grassmann_constant(d: usize, k: usize) -> f64 {
    let num: f64 = (d - k + 1..=d).map(omega).product();
    let den: f64 = (1..=k).map(omega).product();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_ball_volumes() {
        let c = DimConstants::new(3);
        assert_eq!(c.kappa_list[0], 2.0);
        assert!((c.kappa_list[1] - PI).abs() < 1e-15);
        assert!((c.kappa_d - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((omega(3) - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn delaunay_intensity_is_two_gamma_in_the_plane() {
        assert!((delaunay_center_intensity(2, 1.0) - 2.0).abs() < 1e-12);
        assert!((delaunay_center_intensity(2, 3.5) - 7.0).abs() < 1e-11);
        // 24 pi^2 / 35 in three dimensions
        assert!((delaunay_center_intensity(3, 1.0) - 24.0 * PI * PI / 35.0).abs() < 1e-10);
    }

    #[test]
    fn grassmann_constants() {
        assert_eq!(grassmann_constant(2, 2), 1.0);
        assert!((grassmann_constant(2, 1) - PI).abs() < 1e-14);
        assert!((grassmann_constant(3, 1) - 2.0 * PI).abs() < 1e-14);
        assert!((grassmann_constant(3, 2) - 2.0 * PI).abs() < 1e-14);
    }
}
