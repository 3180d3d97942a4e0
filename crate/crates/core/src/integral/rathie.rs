//! The modified Bessel function `K_{1/6}` and the area law of the typical
//! planar Poisson-Delaunay triangle.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_with_breaks};

const NU: f64 = 1.0 / 6.0;

/// Truncation point of `∫_0^∞ e^{-x cosh t} cosh(νt) dt` beyond which the
/// integrand is below `e^{-x} e^{-60}`.
fn truncation(x: f64) -> f64 {
    (1.0 + 60.0 / x).acosh() + 1.0
}

/// `e^x K_ν(x)` for `x > 0`, by quadrature of the scaled integral
/// representation.
pub fn bessel_k_scaled(nu: f64, x: f64) -> f64 {
    bessel_k_scaled_to(nu, x, truncation(x))
}

fn bessel_k_scaled_to(nu: f64, x: f64, upper: f64) -> f64 {
    let f = |t: f64| (-x * (t.cosh() - 1.0)).exp() * (nu * t).cosh();
    // the integrand falls off on the scale acosh(1 + 1/x)
    let knee = (1.0 + 1.0 / x).acosh().min(upper);
    let mut g = f;
    integrate_with_breaks(&mut g, &[0.0, knee, upper], 0.0, 1e-13).value
}

/// `K_{1/6}(x)`.
pub fn bessel_k16(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::INFINITY;
    }
    bessel_k_scaled(NU, x) * (-x).exp()
}

/// `u K_{1/6}(αu)^2` with `α = 2π/(3√3)`.
fn density_kernel(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    let alpha = 2.0 * PI / (3.0 * 3f64.sqrt());
    let k = bessel_k_scaled(NU, alpha * u);
    u * k * k * (-2.0 * alpha * u).exp()
}

const PREFACTOR: f64 = 8.0 * PI / 9.0;

/// `P(L_2(Z) > v)` for the typical cell of the Delaunay mosaic of a
/// Poisson process with intensity `gamma`: the unit-intensity law
/// `(8π/9) ∫_v^∞ u K_{1/6}(2πu/(3√3))^2 du` evaluated at `γ v`.
pub fn rathie_survival(v: f64, gamma: f64) -> f64 {
    let w = v * gamma;
    if w <= 0.0 {
        return 1.0;
    }
    // tail beyond w + 20 is below e^{-48}
    let upper = w + 20.0;
    let breaks: Vec<f64> = [w, w + 0.5, w + 2.0, w + 5.0, upper].to_vec();
    let mut f = density_kernel;
    let tail = integrate_with_breaks(&mut f, &breaks, 1e-14, 1e-10).value;
    (PREFACTOR * tail).clamp(0.0, 1.0)
}

/// The density `−dS/dv` at unit intensity.
pub fn rathie_density(v: f64) -> f64 {
    PREFACTOR * density_kernel(v)
}

/// Solves `rathie_survival(v, gamma) = p` for `p ∈ (0, 1)`.
pub fn rathie_quantile(p: f64, gamma: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("survival level {p} outside (0, 1)")));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while rathie_survival(hi, 1.0) > p {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::Domain(format!("survival level {p} too small")));
        }
    }
    for _ in 0..200 {
        if hi - lo <= 1e-13 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if rathie_survival(mid, 1.0) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi) / gamma)
}

/// `∫_0^∞ S(v) dv` at intensity `gamma`, which should equal `1/(2γ)`.
pub fn rathie_mean(gamma: f64) -> f64 {
    // ∫ S = ∫ u ρ(u) du
    let mut f = |u: f64| u * rathie_density(u);
    let m = integrate_with_breaks(&mut f, &[0.0, 0.5, 2.0, 6.0, 25.0], 1e-14, 1e-11).value;
    m / gamma
}

/// Integral of the density over `[0, ∞)`; should be 1.
pub fn rathie_total_mass() -> f64 {
    integrate(rathie_density, 0.0, 25.0, 1e-14, 1e-11).value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_reference_values() {
        // K_{1/2}(x) = sqrt(π/(2x)) e^{-x} checks the quadrature
        for x in [0.05, 0.7, 3.0, 40.0] {
            let want = (PI / (2.0 * x)).sqrt();
            assert!((bessel_k_scaled(0.5, x) - want).abs() < 1e-11 * want, "x = {x}");
        }
        // asymptotic ratio for K_{1/6}
        for x in [20.0, 50.0] {
            let ratio = bessel_k16(x) / ((PI / (2.0 * x)).sqrt() * (-x).exp());
            assert!((ratio - 1.0).abs() < 0.01);
        }
        let vals: Vec<f64> = [0.1, 0.5, 1.0, 2.0, 5.0].iter().map(|&x| bessel_k16(x)).collect();
        assert!(vals.windows(2).all(|w| w[0] > w[1] && w[1] > 0.0));
    }

    #[test]
    fn bessel_truncation_is_certified() {
        for x in [0.01, 0.3, 2.0, 30.0] {
            let t = truncation(x);
            let a = bessel_k_scaled_to(NU, x, t);
            let b = bessel_k_scaled_to(NU, x, 2.0 * t);
            assert!((a - b).abs() < 1e-10 * a, "x = {x}");
        }
    }

    #[test]
    fn survival_values() {
        assert_eq!(rathie_survival(0.0, 1.0), 1.0);
        assert!((rathie_total_mass() - 1.0).abs() < 1e-7);
        assert!((rathie_mean(1.0) - 0.5).abs() < 1e-6);
        assert!((rathie_mean(3.0) - 1.0 / 6.0).abs() < 1e-6);
        assert!((rathie_survival(0.5, 1.0) - 0.38020).abs() < 1e-4);
        assert!((rathie_survival(1.0, 1.0) - 0.11973).abs() < 1e-4);
        assert!((rathie_survival(2.0, 1.0) - 0.011122).abs() < 1e-5);
        assert!(rathie_survival(10.0, 1.0) < 1e-6);
        // scaling: area of cells at intensity γ is area at intensity 1 over γ
        assert!((rathie_survival(0.25, 2.0) - rathie_survival(0.5, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn survival_is_monotone_with_matching_derivative() {
        let grid: Vec<f64> = (0..60).map(|i| 0.05 + i as f64 * 0.1).collect();
        let s: Vec<f64> = grid.iter().map(|&v| rathie_survival(v, 1.0)).collect();
        assert!(s.windows(2).all(|w| w[1] < w[0]));
        for v in [0.3, 1.0, 2.5] {
            let h = 1e-4;
            let fd = (rathie_survival(v + h, 1.0) - rathie_survival(v - h, 1.0)) / (2.0 * h);
            let exact = -rathie_density(v);
            assert!((fd - exact).abs() < 1e-5 * exact.abs(), "v = {v}: {fd} vs {exact}");
        }
    }

    #[test]
    fn quantile_inverts_survival() {
        for p in [0.5, 0.05, 0.005, 1e-4] {
            let v = rathie_quantile(p, 1.0).unwrap();
            assert!((rathie_survival(v, 1.0) - p).abs() < 1e-9 * p.max(1e-3));
        }
        let v2 = rathie_quantile(0.005, 2.0).unwrap();
        assert!((v2 - rathie_quantile(0.005, 1.0).unwrap() / 2.0).abs() < 1e-12);
    }
}
