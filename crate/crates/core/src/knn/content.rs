//! Volumes of balls clipped to boxes, and density content of balls clipped
//! to the unit cube.

use std::f64::consts::PI;

use crate::geom::{kappa, Point};
use crate::quad::integrate_with_breaks;
use crate::sampling::Density;

/// `∫_0^u sqrt(r² − v²) dv` for `|u| ≤ r`.
fn half_chord_primitive(u: f64, r: f64) -> f64 {
    let u = u.clamp(-r, r);
    0.5 * (u * (r * r - u * u).max(0.0).sqrt() + r * r * (u / r).asin())
}

/// Area of the disk of radius `r` at the origin intersected with the
/// quadrant `{x ≤ qx, y ≤ qy}`.
fn quadrant_area(qx: f64, qy: f64, r: f64) -> f64 {
    if qy <= -r || qx <= -r {
        return 0.0;
    }
    let g = |u: f64| half_chord_primitive(u, r);
    let xc = qx.min(r);
    // integrand over u: length of {y : -h(u) ≤ y ≤ min(qy, h(u))}
    let full = |a: f64, b: f64| if b > a { 2.0 * (g(b) - g(a)) } else { 0.0 };
    if qy >= r {
        return full(-r, xc);
    }
    let w = (r * r - qy * qy).sqrt();
    let capped = |a: f64, b: f64| if b > a { qy * (b - a) + g(b) - g(a) } else { 0.0 };
    if qy >= 0.0 {
        full(-r, xc.min(-w)) + capped(-w, xc.min(w)) + full(w, xc)
    } else {
        capped(-w, xc.min(w))
    }
}

/// Area of `B(center, r) ∩ [lo, hi]` in the plane.
pub fn disk_rect_area(center: [f64; 2], r: f64, lo: [f64; 2], hi: [f64; 2]) -> f64 {
    if r <= 0.0 || hi[0] <= lo[0] || hi[1] <= lo[1] {
        return 0.0;
    }
    let (x0, x1) = (lo[0] - center[0], hi[0] - center[0]);
    let (y0, y1) = (lo[1] - center[1], hi[1] - center[1]);
    if x0 <= -r && x1 >= r && y0 <= -r && y1 >= r {
        return PI * r * r;
    }
    let q = |x: f64, y: f64| quadrant_area(x, y, r);
    (q(x1, y1) - q(x0, y1) - q(x1, y0) + q(x0, y0)).max(0.0)
}

/// Volume of `B(center, r) ∩ [lo, hi]` in `R^3`, by quadrature of exact
/// slice areas.
pub fn ball_box_volume(center: [f64; 3], r: f64, lo: [f64; 3], hi: [f64; 3]) -> f64 {
    if r <= 0.0 || (0..3).any(|i| hi[i] <= lo[i]) {
        return 0.0;
    }
    if (0..3).all(|i| lo[i] <= center[i] - r && hi[i] >= center[i] + r) {
        return kappa(3) * r.powi(3);
    }
    let a = lo[0].max(center[0] - r);
    let b = hi[0].min(center[0] + r);
    if b <= a {
        return 0.0;
    }
    let slice = |u: f64| {
        let rho2 = r * r - (u - center[0]).powi(2);
        if rho2 <= 0.0 {
            0.0
        } else {
            disk_rect_area([center[1], center[2]], rho2.sqrt(), [lo[1], lo[2]], [hi[1], hi[2]])
        }
    };
    integrate_slices(slice, center, r, lo, hi, a, b)
}

/// Integrates a slice function over `[a, b]`, breaking where the slice disk
/// starts touching a face or corner of the box cross-section.
fn integrate_slices(
    mut slice: impl FnMut(f64) -> f64,
    center: [f64; 3],
    r: f64,
    lo: [f64; 3],
    hi: [f64; 3],
    a: f64,
    b: f64,
) -> f64 {
    let dy = [center[1] - lo[1], hi[1] - center[1]];
    let dz = [center[2] - lo[2], hi[2] - center[2]];
    let mut dists: Vec<f64> = dy.iter().chain(dz.iter()).map(|v| v.abs()).collect();
    for y in dy {
        for z in dz {
            dists.push((y * y + z * z).sqrt());
        }
    }
    let mut breaks = vec![a, b];
    for delta in dists {
        if delta < r {
            let w = (r * r - delta * delta).sqrt();
            for u in [center[0] - w, center[0] + w] {
                if u > a && u < b {
                    breaks.push(u);
                }
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let scale = PI * r * r * (b - a);
    integrate_with_breaks(&mut slice, &breaks, 1e-13 * scale, 1e-12).value
}

/// `(f L_d)(B(x, r) ∩ [0,1]^d)` for the catalog densities.
pub fn density_ball_content<const D: usize>(density: &Density, x: &Point<D>, r: f64) -> f64 {
    if !(r > 0.0) {
        return 0.0;
    }
    if r.is_infinite() {
        return density.total();
    }
    let inside = x.0.iter().all(|&c| c - r >= 0.0 && c + r <= 1.0);
    match density {
        Density::Uniform if inside => kappa(D) * r.powi(D as i32),
        // a linear density averages to its center value over a ball
        Density::Ramp { .. } if inside => density.value(&x.0) * kappa(D) * r.powi(D as i32),
        Density::Uniform => clipped_volume(x, r, [0.0; D], [1.0; D]),
        Density::Ramp { amplitude } => ramp_content(*amplitude, x, r),
        Density::Grid { shape, values } => {
            let mut total = 0.0;
            for (flat, v) in values.iter().enumerate() {
                let mut rem = flat;
                let mut lo = [0.0; D];
                let mut hi = [0.0; D];
                for i in (0..D).rev() {
                    let n = shape[i];
                    let j = rem % n;
                    rem /= n;
                    lo[i] = j as f64 / n as f64;
                    hi[i] = (j + 1) as f64 / n as f64;
                }
                let near = (0..D).all(|i| x[i] + r > lo[i] && x[i] - r < hi[i]);
                if near {
                    total += v * clipped_volume(x, r, lo, hi);
                }
            }
            total
        }
    }
}

fn clipped_volume<const D: usize>(x: &Point<D>, r: f64, lo: [f64; D], hi: [f64; D]) -> f64 {
    match D {
        2 => disk_rect_area([x[0], x[1]], r, [lo[0], lo[1]], [hi[0], hi[1]]),
        3 => ball_box_volume([x[0], x[1], x[2]], r, [lo[0], lo[1], lo[2]], [hi[0], hi[1], hi[2]]),
        _ => unimplemented!("clipped volumes are implemented for d = 2, 3"),
    }
}

/// Content of the clipped ball under `1 + a (u_1 − 1/2)`: integrate the
/// linear factor against the exact cross-section measure along `u_1`.
fn ramp_content<const D: usize>(amplitude: f64, x: &Point<D>, r: f64) -> f64 {
    let a = (x[0] - r).max(0.0);
    let b = (x[0] + r).min(1.0);
    if b <= a {
        return 0.0;
    }
    match D {
        2 => {
            let section = |u: f64| {
                let h2 = r * r - (u - x[0]).powi(2);
                if h2 <= 0.0 {
                    return 0.0;
                }
                let h = h2.sqrt();
                let len = ((x[1] + h).min(1.0) - (x[1] - h).max(0.0)).max(0.0);
                (1.0 + amplitude * (u - 0.5)) * len
            };
            let mut breaks = vec![a, b];
            for delta in [x[1], 1.0 - x[1]] {
                if delta.abs() < r {
                    let w = (r * r - delta * delta).sqrt();
                    breaks.extend([x[0] - w, x[0] + w].into_iter().filter(|&u| u > a && u < b));
                }
            }
            breaks.sort_by(f64::total_cmp);
            let mut section = section;
            integrate_with_breaks(&mut section, &breaks, 1e-13 * r * (b - a), 1e-12).value
        }
        3 => {
            let c = [x[0], x[1], x[2]];
            let section = |u: f64| {
                let rho2 = r * r - (u - c[0]).powi(2);
                if rho2 <= 0.0 {
                    return 0.0;
                }
                (1.0 + amplitude * (u - 0.5)) * disk_rect_area([c[1], c[2]], rho2.sqrt(), [0.0, 0.0], [1.0, 1.0])
            };
            integrate_slices(section, c, r, [0.0; 3], [1.0; 3], a, b)
        }
        _ => unimplemented!("clipped volumes are implemented for d = 2, 3"),
    }
}
