//! Monte Carlo checks of the Blaschke-Petkantschin formulas: spherical,
//! affine (linear subspaces) and the subsphere variant.
//!
//! The left side `∫ f` is estimated by importance sampling from a product
//! of Gaussians. On the right side the integrals over the center `z ∈ R^d`
//! and the radius are done in closed form where possible and by
//! quadrature otherwise; the remaining integral over directions is Monte
//! Carlo. Directions are drawn from a defensive mixture of the uniform law
//! and a law clustered around one direction, because the integrand blows
//! up where all directions coincide.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::geom::{grassmann_constant, kappa, omega};
use crate::quad::integrate_with_breaks;
use crate::sampling::SeedSpec;

type V = [f64; 3];

const TAG_LHS: u64 = 0x6c68_73;
const TAG_RHS: u64 = 0x7268_73;
const CHUNK: u64 = 4096;

/// Fixed catalog of test functions on `(R^d)^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BpTestFunction {
    /// `exp(-Σ |x_i|^2)`.
    Gaussian,
    /// All points in `[0,1]^d`.
    Cube,
    Zero,
}

impl BpTestFunction {
    pub fn name(self) -> &'static str {
        match self {
            BpTestFunction::Gaussian => "gaussian",
            BpTestFunction::Cube => "cube",
            BpTestFunction::Zero => "zero",
        }
    }

    pub fn eval(self, d: usize, pts: &[V]) -> f64 {
        match self {
            BpTestFunction::Gaussian => (-pts.iter().map(norm_sq).sum::<f64>()).exp(),
            BpTestFunction::Cube => {
                let inside = pts.iter().all(|p| p[..d].iter().all(|&c| (0.0..=1.0).contains(&c)));
                f64::from(u8::from(inside))
            }
            BpTestFunction::Zero => 0.0,
        }
    }

    /// `∫_{(R^d)^n} f`.
    pub fn exact_integral(self, d: usize, n: usize) -> f64 {
        match self {
            BpTestFunction::Gaussian => PI.powf((d * n) as f64 / 2.0),
            BpTestFunction::Cube => 1.0,
            BpTestFunction::Zero => 0.0,
        }
    }
}

/// Both sides of an identity with standard errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BpReport {
    pub lhs: f64,
    pub lhs_se: f64,
    pub rhs: f64,
    pub rhs_se: f64,
    pub exact_lhs: f64,
    /// `(lhs - rhs) / sqrt(lhs_se^2 + rhs_se^2)`, 0 when both sides vanish.
    pub z_score: f64,
    pub n_mc: usize,
}

impl BpReport {
    fn new(lhs: (f64, f64), rhs: (f64, f64), exact_lhs: f64, n_mc: usize) -> Self {
        let pooled = (lhs.1 * lhs.1 + rhs.1 * rhs.1).sqrt();
        let diff = lhs.0 - rhs.0;
        let z_score = if diff == 0.0 {
            0.0
        } else if pooled == 0.0 {
            diff.signum() * f64::INFINITY
        } else {
            diff / pooled
        };
        Self {
            lhs: lhs.0,
            lhs_se: lhs.1,
            rhs: rhs.0,
            rhs_se: rhs.1,
            exact_lhs,
            z_score,
            n_mc,
        }
    }

    /// Discrepancy of the right side from the exact left side, in units of
    /// its own standard error.
    pub fn z_exact(&self) -> f64 {
        let diff = self.exact_lhs - self.rhs;
        if diff == 0.0 {
            0.0
        } else {
            diff / self.rhs_se
        }
    }
}

fn dot(a: &V, b: &V) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm_sq(a: &V) -> f64 {
    dot(a, a)
}

fn axpy(alpha: f64, x: &V, y: &V) -> V {
    [alpha * x[0] + y[0], alpha * x[1] + y[1], alpha * x[2] + y[2]]
}

fn scale(alpha: f64, x: &V) -> V {
    [alpha * x[0], alpha * x[1], alpha * x[2]]
}

fn normalize(x: &V) -> V {
    scale(1.0 / norm_sq(x).sqrt(), x)
}

fn gaussian_in<R: Rng + ?Sized>(basis: &[V], rng: &mut R) -> V {
    basis.iter().fold([0.0; 3], |acc, b| axpy(rng.sample::<f64, _>(StandardNormal), b, &acc))
}

fn coordinate_basis(d: usize) -> Vec<V> {
    (0..d)
        .map(|i| {
            let mut e = [0.0; 3];
            e[i] = 1.0;
            e
        })
        .collect()
}

/// Gram-Schmidt; drops vectors that are (numerically) dependent.
fn orthonormalize(vs: &[V]) -> Vec<V> {
    let mut out: Vec<V> = Vec::new();
    for v in vs {
        let mut w = *v;
        for _ in 0..2 {
            for b in &out {
                w = axpy(-dot(&w, b), b, &w);
            }
        }
        let n = norm_sq(&w).sqrt();
        if n > 1e-10 * norm_sq(v).sqrt().max(1e-300) {
            out.push(scale(1.0 / n, &w));
        }
    }
    out
}

/// Haar-random `k`-dimensional subspace of `span(ambient)`.
fn random_subspace<R: Rng + ?Sized>(ambient: &[V], k: usize, rng: &mut R) -> Vec<V> {
    loop {
        let vs: Vec<V> = (0..k).map(|_| gaussian_in(ambient, rng)).collect();
        let b = orthonormalize(&vs);
        if b.len() == k {
            return b;
        }
    }
}

fn uniform_on_sphere<R: Rng + ?Sized>(basis: &[V], rng: &mut R) -> V {
    if basis.len() == 1 {
        return if rng.random::<bool>() { basis[0] } else { scale(-1.0, &basis[0]) };
    }
    loop {
        let g = gaussian_in(basis, rng);
        if norm_sq(&g) > 0.0 {
            return normalize(&g);
        }
    }
}

/// `k! Δ_k` for `k + 1` points: the square root of the Gram determinant of
/// the edge vectors from the first point.
fn simplex_measure(pts: &[V]) -> f64 {
    let k = pts.len() - 1;
    if k == 1 {
        return norm_sq(&axpy(-1.0, &pts[0], &pts[1])).sqrt();
    }
    let mut edges = [[0.0; 3]; 3];
    for (e, p) in edges.iter_mut().zip(&pts[1..]) {
        *e = axpy(-1.0, &pts[0], p);
    }
    let mut g = [[0.0; 3]; 3];
    for i in 0..k {
        for j in 0..k {
            g[i][j] = dot(&edges[i], &edges[j]);
        }
    }
    crate::geom::linalg::det(g, k).max(0.0).sqrt()
}

/// Power-law cluster on the unit sphere of an `n`-dimensional subspace:
/// the angle `θ` to the anchor has density `φ(θ) = θ^{-α} I_n / Z_n` with
/// respect to the uniform law, `α = n - 1 - 1/n`.
struct Cluster {
    n: usize,
    alpha: f64,
    /// Normalizes `θ^{-α}` to a density relative to the uniform law.
    norm: f64,
}

impl Cluster {
    fn new(n: usize) -> Self {
        let nf = n as f64;
        let alpha = nf - 1.0 - 1.0 / nf;
        let p = 1.0 / (nf - 1.0 - alpha);
        // θ = π v^p turns θ^{n-2-α} dθ into a constant times dv
        let mut f = |v: f64| {
            let th = PI * v.powf(p);
            if th == 0.0 {
                1.0
            } else {
                (th.sin() / th).powi(n as i32 - 2)
            }
        };
        let z = PI.powf(nf - 1.0 - alpha) * p * integrate_with_breaks(&mut f, &[0.0, 0.5, 1.0], 1e-15, 1e-13).value;
        let i_n = match n {
            2 => PI,
            3 => 2.0,
            _ => unreachable!("spheres of dimension at most 2"),
        };
        Self { n, alpha, norm: i_n / z }
    }

    fn density(&self, theta: f64) -> f64 {
        self.norm * theta.powf(-self.alpha)
    }

    fn density_at(&self, anchor: &V, u: &V) -> f64 {
        self.density(dot(anchor, u).clamp(-1.0, 1.0).acos())
    }

    fn sample<R: Rng + ?Sized>(&self, anchor: &V, basis: &[V], rng: &mut R) -> V {
        let nf = self.n as f64;
        let p = 1.0 / (nf - 1.0 - self.alpha);
        let theta = loop {
            let th = PI * rng.random::<f64>().powf(p);
            let accept = if th == 0.0 { 1.0 } else { (th.sin() / th).powi(self.n as i32 - 2) };
            if rng.random::<f64>() < accept {
                break th;
            }
        };
        let t = loop {
            let g = gaussian_in(basis, rng);
            let g = axpy(-dot(&g, anchor), anchor, &g);
            if norm_sq(&g) > 1e-20 {
                break normalize(&g);
            }
        };
        axpy(theta.cos(), anchor, &scale(theta.sin(), &t))
    }
}

/// Mean and standard error over `n` draws of `draw`, in fixed chunks so the
/// result does not depend on the thread schedule.
fn mc_mean(n: usize, seed: SeedSpec, draw: impl Fn(&mut rand_chacha::ChaCha8Rng) -> f64 + Sync) -> (f64, f64) {
    let chunks = (n as u64).div_ceil(CHUNK);
    let sums: Vec<(f64, f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seed.replicate(c).rng();
            let len = CHUNK.min(n as u64 - c * CHUNK);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                let v = draw(&mut rng);
                s += v;
                s2 += v * v;
            }
            (len as f64, s, s2)
        })
        .collect();
    let (m, s, s2) = sums.iter().fold((0.0, 0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    if m == 0.0 {
        return (0.0, 0.0);
    }
    let mean = s / m;
    let var = (s2 / m - mean * mean).max(0.0) * m / (m - 1.0).max(1.0);
    (mean, (var / m).sqrt())
}

/// Importance sampling of `∫ f` from i.i.d. `N(1/4, 0.64 I)` points.
fn lhs_mc(d: usize, n_points: usize, f: BpTestFunction, n_mc: usize, seed: SeedSpec) -> (f64, f64) {
    const MU: f64 = 0.25;
    const SIGMA: f64 = 0.8;
    let log_norm = -(d as f64) / 2.0 * (2.0 * PI * SIGMA * SIGMA).ln();
    mc_mean(n_mc, seed.substream(TAG_LHS), |rng| {
        let mut pts = [[0.0; 3]; 4];
        let mut log_q = 0.0;
        for p in pts.iter_mut().take(n_points) {
            for c in p.iter_mut().take(d) {
                let g: f64 = rng.sample(StandardNormal);
                *c = MU + SIGMA * g;
                log_q += -g * g / 2.0;
            }
            log_q += log_norm;
        }
        let v = f.eval(d, &pts[..n_points]);
        if v == 0.0 {
            0.0
        } else {
            v * (-log_q).exp()
        }
    })
}

/// `∫_{R^d} ∫_0^∞ f(z + r u) r^{dk-1} dr dz` for unit vectors `u`.
fn center_radius_integral(d: usize, k: usize, f: BpTestFunction, u: &[V]) -> f64 {
    let n = u.len() as f64;
    let q = (d * k) as f64;
    match f {
        BpTestFunction::Zero => 0.0,
        BpTestFunction::Gaussian => {
            let s = u.iter().fold([0.0; 3], |acc, v| axpy(1.0, v, &acc));
            let a = u.iter().map(norm_sq).sum::<f64>() - norm_sq(&s) / n;
            (PI / n).powf(d as f64 / 2.0) * gamma(q / 2.0) / (2.0 * a.powf(q / 2.0))
        }
        BpTestFunction::Cube => {
            // the z-integral is Π_i (1 - r w_i)_+ with w_i the spread of
            // coordinate i
            let w: Vec<f64> = (0..d)
                .map(|i| {
                    let (lo, hi) = u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v[i]), hi.max(v[i])));
                    hi - lo
                })
                .collect();
            let wmax = w.iter().cloned().fold(0.0, f64::max);
            let big_r = 1.0 / wmax;
            let mut total = 0.0;
            for mask in 0u32..(1 << d) {
                let mut term = 1.0;
                let mut size = 0;
                for (i, wi) in w.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        term *= -wi * big_r;
                        size += 1;
                    }
                }
                total += term / (q + size as f64);
            }
            total * big_r.powf(q)
        }
    }
}

/// `E_L E_u [(k! Δ_k(u))^{d-k+1} ∫∫ f(z + r u) r^{dk-1} dr dz]`, `L` Haar on
/// `G(d,k)` (or the whole space when `rotate` is false).
fn linear_rhs_mean(d: usize, k: usize, f: BpTestFunction, rotate: bool, n_mc: usize, seed: SeedSpec) -> (f64, f64) {
    let full = coordinate_basis(d);
    let cluster = (k >= 2).then(|| Cluster::new(k));
    let power = (d - k + 1) as i32;
    mc_mean(n_mc, seed.substream(TAG_RHS), |rng| {
        let basis = if rotate { random_subspace(&full, k, rng) } else { full.clone() };
        let mut u = [[0.0; 3]; 4];
        let weight = match &cluster {
            None => {
                for v in u.iter_mut().take(k + 1) {
                    *v = uniform_on_sphere(&basis, rng);
                }
                1.0
            }
            Some(cl) => {
                u[0] = uniform_on_sphere(&basis, rng);
                let clustered = rng.random::<bool>();
                for j in 1..=k {
                    u[j] = if clustered { cl.sample(&u[0], &basis, rng) } else { uniform_on_sphere(&basis, rng) };
                }
                let qc: f64 = (1..=k).map(|j| cl.density_at(&u[0], &u[j])).product();
                1.0 / (0.5 + 0.5 * qc)
            }
        };
        let vol = simplex_measure(&u[..=k]);
        if vol == 0.0 || f == BpTestFunction::Zero {
            return 0.0;
        }
        weight * vol.powi(power) * center_radius_integral(d, k, f, &u[..=k])
    })
}

fn check_dims(d: usize) -> Result<()> {
    if !(2..=3).contains(&d) {
        return Err(Error::Domain(format!("dimension {d} outside 2..=3")));
    }
    Ok(())
}

/// `∫_{(R^d)^{d+1}} f = d! (dκ_d)^{d+1} ∫∫∫ f(z + r u) r^{d^2-1} Δ_d(u) σ^{d+1}(du) dr dz`.
pub fn verify_bp_spherical(d: usize, f: BpTestFunction, n_mc: usize, seed: SeedSpec) -> Result<BpReport> {
    check_dims(d)?;
    let c = (d as f64 * kappa(d)).powi(d as i32 + 1);
    let lhs = lhs_mc(d, d + 1, f, n_mc, seed);
    let (m, se) = linear_rhs_mean(d, d, f, false, n_mc, seed);
    Ok(BpReport::new(lhs, (c * m, c * se), f.exact_integral(d, d + 1), n_mc))
}

/// The affine formula for `k + 1` points: constant `b_{d,k} (kκ_k)^{k+1}`
/// with `b_{d,k} = ω_{d-k+1}⋯ω_d / (ω_1⋯ω_k)` for the Haar probability
/// measure on `G(d,k)`, kernel `r^{dk-1} [k! Δ_k(u)]^{d-k+1}`.
pub fn verify_bp_linear(d: usize, k: usize, f: BpTestFunction, n_mc: usize, seed: SeedSpec) -> Result<BpReport> {
    check_dims(d)?;
    if !(1..=d).contains(&k) {
        return Err(Error::Domain(format!("k = {k} outside 1..={d}")));
    }
    let c = grassmann_constant(d, k) * (k as f64 * kappa(k)).powi(k as i32 + 1);
    let lhs = lhs_mc(d, k + 1, f, n_mc, seed);
    let (m, se) = linear_rhs_mean(d, k, f, true, n_mc, seed);
    Ok(BpReport::new(lhs, (c * m, c * se), f.exact_integral(d, k + 1), n_mc))
}

/// Constant of the subsphere formula for Haar probability measures:
/// `ω_m ω_{d-k+m}^m b_{k,m}`, with `L` ranging over `G(Q^⊥, m)`.
pub fn subsphere_constant(d: usize, k: usize, m: usize) -> f64 {
    omega(m) * omega(d - k + m).powi(m as i32) * grassmann_constant(k, m)
}

/// Geometry of one draw of `(L, z, u)` in the subsphere formula.
struct SubsphereDraw {
    z: V,
    u: [V; 3],
    u_l: [V; 3],
    m: usize,
}

impl SubsphereDraw {
    /// `x_j(s) = s z + √(r0² + s²) u_j`.
    fn point(&self, j: usize, s: f64, r: f64) -> V {
        axpy(s, &self.z, &scale(r, &self.u[j]))
    }

    /// `r^{m(d-1)} s^{m-1} [m! Δ_m(-(s/r) z, u^L)]^{k-m+1}`, the radial
    /// kernel after substituting `r = √(r0² + s²)`.
    fn kernel(&self, d: usize, k: usize, s: f64, r: f64) -> f64 {
        let m = self.m;
        let mut pts = [[0.0; 3]; 4];
        pts[0] = scale(-s / r, &self.z);
        pts[1..=m].copy_from_slice(&self.u_l[..m]);
        let vol = simplex_measure(&pts[..=m]);
        r.powi((m * (d - 1)) as i32) * s.powi(m as i32 - 1) * vol.powi((k - m + 1) as i32)
    }
}

/// For one point the kernel has a kink where `r u·z + s = 0`.
fn kink_of(u: &V, z: &V, r0: f64) -> Option<f64> {
    let uz = dot(u, z);
    (uz < 0.0 && uz * uz < 1.0).then(|| (r0 * r0 * uz * uz / (1.0 - uz * uz)).sqrt())
}

fn gaussian_radial(draw: &SubsphereDraw, d: usize, k: usize, r0: f64) -> f64 {
    let m = draw.m;
    let radius = |s: f64| (r0 * r0 + s * s).sqrt();
    let exponent = |s: f64| (0..m).map(|j| norm_sq(&draw.point(j, s, radius(s)))).sum::<f64>();
    let mut s_max = 4.0;
    while exponent(s_max) < 80.0 && s_max < 1e7 {
        s_max *= 2.0;
    }
    let mut g = |s: f64| {
        if s <= 0.0 && m >= 2 {
            return 0.0;
        }
        let r = radius(s);
        if r == 0.0 {
            return 0.0;
        }
        (-exponent(s)).exp() * draw.kernel(d, k, s, r)
    };
    let mut breaks = vec![0.0];
    let mut b = s_max / 1024.0;
    while b < s_max {
        if b > 0.25 {
            breaks.push(b);
        }
        b *= 4.0;
    }
    breaks.push(s_max);
    if m == 1 {
        if let Some(kink) = kink_of(&draw.u[0], &draw.z, r0).filter(|&x| x < s_max) {
            breaks.push(kink);
        }
        breaks.sort_by(f64::total_cmp);
    }
    integrate_with_breaks(&mut g, &breaks, 1e-12, 1e-7).value
}

/// Cube indicator for one point in the plane: integrate the kernel over the
/// `s` where `x(s) ∈ [0,1]^2`, found from the roots of the coordinate
/// equations.
fn cube_radial(draw: &SubsphereDraw, d: usize, k: usize, r0: f64) -> f64 {
    let (z, u) = (draw.z, draw.u[0]);
    let radius = |s: f64| (r0 * r0 + s * s).sqrt();
    let mut roots = vec![0.0];
    let mut push_quadratic = |a: f64, b: f64, c: f64| {
        if a.abs() < 1e-300 {
            if b != 0.0 {
                roots.push(-c / b);
            }
            return;
        }
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            roots.push((-b + sq) / (2.0 * a));
            roots.push((-b - sq) / (2.0 * a));
        }
    };
    for i in 0..2 {
        for bnd in [0.0, 1.0] {
            // s z_i + r u_i = bnd, squared
            push_quadratic(u[i] * u[i] - z[i] * z[i], 2.0 * bnd * z[i], r0 * r0 * u[i] * u[i] - bnd * bnd);
        }
    }
    roots.extend(kink_of(&u, &z, r0));
    roots.retain(|s| s.is_finite() && *s >= 0.0);
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    let inside = |s: f64| {
        let x = draw.point(0, s, radius(s));
        x[..d].iter().all(|&c| (0.0..=1.0).contains(&c))
    };
    let uz = dot(&u, &z);
    // antiderivative of the kernel r^{1-k} (r u·z + s)^k, up to the sign
    // of r u·z + s for k = 1
    let antiderivative = |s: f64| match k {
        1 => {
            let arc = if r0 > 0.0 { r0 * r0 * (s / r0).asinh() } else { 0.0 };
            0.5 * uz * (s * radius(s) + arc) + 0.5 * s * s
        }
        _ => 0.5 * (1.0 + uz) * (1.0 + uz) * s * s,
    };
    let mut total = 0.0;
    for w in roots.windows(2) {
        if w[1] > w[0] && inside(0.5 * (w[0] + w[1])) {
            total += (antiderivative(w[1]) - antiderivative(w[0])).abs();
        }
    }
    total
}

/// The subsphere formula: for `m ≤ k` points and a fixed `Q ∈ G(d, d-k)`,
/// `∫ f = C ∫_{G(Q^⊥,m)} ∫_{r0}^∞ ∫_{S_L} ∫_{S^m_{L⊕Q}} f(√(r²-r0²) z + r u)
/// r^{m(d-1)+1} (r²-r0²)^{(m-2)/2} [m! Δ_m(-(√(r²-r0²)/r) z, u^L)]^{k-m+1}`
/// with [`subsphere_constant`] `C`. `q_basis` spans `Q`; the cube function
/// is supported for `d = 2`, `m = 1`.
pub fn verify_bp_subsphere(
    d: usize,
    k: usize,
    m: usize,
    q_basis: &[V],
    r0: f64,
    f: BpTestFunction,
    n_mc: usize,
    seed: SeedSpec,
) -> Result<BpReport> {
    check_dims(d)?;
    if !(1..=d).contains(&k) || !(1..=k).contains(&m) {
        return Err(Error::Domain(format!("need 1 <= m <= k <= d, got m = {m}, k = {k}, d = {d}")));
    }
    if !(r0 >= 0.0 && r0.is_finite()) {
        return Err(Error::Domain(format!("r0 must be finite and nonnegative, got {r0}")));
    }
    if k == d && r0 != 0.0 {
        return Err(Error::Domain("with k = d the fixed subsphere is a point, so r0 must be 0".into()));
    }
    let q = orthonormalize(q_basis);
    if q.len() != d - k || q.len() != q_basis.len() || q.iter().any(|v| v[d..].iter().any(|&c| c != 0.0)) {
        return Err(Error::Domain(format!("Q must be spanned by {} independent vectors of R^{d}", d - k)));
    }
    if f == BpTestFunction::Cube && !(d == 2 && m == 1) {
        return Err(Error::UnsupportedTestFunction {
            function: f.name().into(),
            identity: format!("subsphere formula with d = {d}, m = {m}"),
        });
    }
    let mut all = q.clone();
    all.extend(coordinate_basis(d));
    let q_perp: Vec<V> = orthonormalize(&all)[q.len()..].to_vec();
    let n_sphere = m + d - k;
    let cluster = (n_sphere >= 2).then(|| Cluster::new(n_sphere));
    let lhs = lhs_mc(d, m, f, n_mc, seed);
    let (mean, se) = mc_mean(n_mc, seed.substream(TAG_RHS), |rng| {
        let l = random_subspace(&q_perp, m, rng);
        let z = uniform_on_sphere(&l, rng);
        let mut lq = l.clone();
        lq.extend(q.iter().copied());
        let anchor = scale(-1.0, &z);
        let mut u = [[0.0; 3]; 3];
        let weight = match &cluster {
            None => {
                for v in u.iter_mut().take(m) {
                    *v = uniform_on_sphere(&lq, rng);
                }
                1.0
            }
            Some(cl) => {
                let clustered = rng.random::<bool>();
                for v in u.iter_mut().take(m) {
                    *v = if clustered { cl.sample(&anchor, &lq, rng) } else { uniform_on_sphere(&lq, rng) };
                }
                let qc: f64 = u[..m].iter().map(|v| cl.density_at(&anchor, v)).product();
                1.0 / (0.5 + 0.5 * qc)
            }
        };
        let mut u_l = [[0.0; 3]; 3];
        for j in 0..m {
            u_l[j] = l.iter().fold([0.0; 3], |acc, b| axpy(dot(&u[j], b), b, &acc));
        }
        let draw = SubsphereDraw { z, u, u_l, m };
        let radial = match f {
            BpTestFunction::Zero => 0.0,
            BpTestFunction::Gaussian => gaussian_radial(&draw, d, k, r0),
            BpTestFunction::Cube => cube_radial(&draw, d, k, r0),
        };
        weight * radial
    });
    let c = subsphere_constant(d, k, m);
    Ok(BpReport::new(lhs, (c * mean, c * se), f.exact_integral(d, m), n_mc))
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: usize = 200_000;

    fn assert_close(rep: &BpReport, what: &str) {
        assert!(rep.z_score.abs() <= 3.5, "{what}: {rep:?}");
        assert!(rep.z_exact().abs() <= 3.5, "{what}: {rep:?}");
    }

    #[test]
    fn cluster_density_is_normalized() {
        for n in [2usize, 3] {
            let cl = Cluster::new(n);
            // E_uniform[φ] = 1
            let s = |th: f64| if n == 2 { 1.0 / PI } else { th.sin() / 2.0 };
            let p = 8.0;
            let mut g = |v: f64| {
                let th = PI * v.powf(p);
                cl.density(th) * s(th) * PI * p * v.powf(p - 1.0)
            };
            let total = integrate_with_breaks(&mut g, &[0.0, 0.5, 1.0], 1e-12, 1e-10).value;
            assert!((total - 1.0).abs() < 1e-6, "n = {n}: {total}");
        }
    }

    #[test]
    fn cube_center_radius_integral_matches_quadrature() {
        let u = [[1.0, 0.0, 0.0], [0.6, 0.8, 0.0], [-0.28, 0.96, 0.0]];
        let closed = center_radius_integral(2, 2, BpTestFunction::Cube, &u);
        let mut g = |r: f64| r.powi(3) * (1.0 - r * 1.28).max(0.0) * (1.0 - r * 0.96).max(0.0);
        let q = integrate_with_breaks(&mut g, &[0.0, 1.0 / 1.28], 1e-15, 1e-12).value;
        assert!((closed - q).abs() < 1e-12, "{closed} vs {q}");
    }

    #[test]
    fn simplex_measure_values() {
        let tri = [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 3.0, 0.0]];
        assert!((simplex_measure(&tri) - 6.0).abs() < 1e-12);
        let seg = [[1.0, 1.0, 0.0], [4.0, 5.0, 0.0]];
        assert!((simplex_measure(&seg) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn zero_function_gives_zero() {
        let seed = SeedSpec::new(1, 0);
        let a = verify_bp_spherical(2, BpTestFunction::Zero, 1000, seed).unwrap();
        let b = verify_bp_linear(3, 2, BpTestFunction::Zero, 1000, seed).unwrap();
        let c = verify_bp_subsphere(2, 1, 1, &[[1.0, 0.0, 0.0]], 0.5, BpTestFunction::Zero, 1000, seed).unwrap();
        for r in [a, b, c] {
            assert_eq!((r.lhs, r.rhs, r.z_score), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn spherical_planar() {
        let seed = SeedSpec::new(2, 0);
        assert_close(&verify_bp_spherical(2, BpTestFunction::Gaussian, N, seed).unwrap(), "gaussian");
        assert_close(&verify_bp_spherical(2, BpTestFunction::Cube, N, seed).unwrap(), "cube");
    }

    #[test]
    fn linear_planar_and_spatial() {
        let seed = SeedSpec::new(3, 0);
        for (d, k) in [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3)] {
            for f in [BpTestFunction::Gaussian, BpTestFunction::Cube] {
                let rep = verify_bp_linear(d, k, f, N, seed).unwrap();
                assert_close(&rep, &format!("d = {d}, k = {k}, {}", f.name()));
            }
        }
    }

    #[test]
    fn subsphere_planar() {
        let seed = SeedSpec::new(4, 0);
        let q1 = [[0.6, 0.8, 0.0]];
        for f in [BpTestFunction::Gaussian, BpTestFunction::Cube] {
            for r0 in [0.0, 0.7] {
                let rep = verify_bp_subsphere(2, 1, 1, &q1, r0, f, N, seed).unwrap();
                assert_close(&rep, &format!("k = 1, m = 1, r0 = {r0}, {}", f.name()));
            }
            let rep = verify_bp_subsphere(2, 2, 1, &[], 0.0, f, N, seed).unwrap();
            assert_close(&rep, &format!("k = 2, m = 1, {}", f.name()));
        }
        let rep = verify_bp_subsphere(2, 2, 2, &[], 0.0, BpTestFunction::Gaussian, N, seed).unwrap();
        assert_close(&rep, "k = 2, m = 2");
        assert!(matches!(
            verify_bp_subsphere(2, 2, 2, &[], 0.0, BpTestFunction::Cube, 10, seed),
            Err(Error::UnsupportedTestFunction { .. })
        ));
    }

    #[test]
    fn subsphere_spatial_gaussian() {
        let seed = SeedSpec::new(5, 0);
        let rep = verify_bp_subsphere(3, 2, 1, &[[0.0, 0.0, 1.0]], 0.5, BpTestFunction::Gaussian, N / 2, seed).unwrap();
        assert_close(&rep, "d = 3, k = 2, m = 1");
        let rep = verify_bp_subsphere(3, 2, 2, &[[0.0, 0.0, 1.0]], 0.5, BpTestFunction::Gaussian, N / 2, seed).unwrap();
        assert_close(&rep, "d = 3, k = 2, m = 2");
    }

    #[test]
    fn cube_radial_matches_riemann_sum() {
        let mut rng = SeedSpec::new(6, 0).rng();
        let plane = coordinate_basis(2);
        for case in 0..40 {
            let (k, r0) = if case % 2 == 0 { (1, 0.4) } else { (2, 0.0) };
            let z = uniform_on_sphere(&plane, &mut rng);
            let u0 = if k == 1 {
                uniform_on_sphere(&plane, &mut rng)
            } else if rng.random::<bool>() {
                z
            } else {
                scale(-1.0, &z)
            };
            if norm_sq(&axpy(1.0, &z, &u0)) < 0.25 && k == 1 {
                // the path stays near the origin beyond the summation range
                continue;
            }
            let l = [z];
            let u_l = [l.iter().fold([0.0; 3], |acc, b| axpy(dot(&u0, b), b, &acc)), [0.0; 3], [0.0; 3]];
            let draw = SubsphereDraw { z, u: [u0, [0.0; 3], [0.0; 3]], u_l, m: 1 };
            let closed = cube_radial(&draw, 2, k, r0);
            let h = 2e-5;
            let mut sum = 0.0;
            let mut sv = h / 2.0;
            while sv < 4.0 {
                let r = (r0 * r0 + sv * sv).sqrt();
                let x = draw.point(0, sv, r);
                if (0.0..=1.0).contains(&x[0]) && (0.0..=1.0).contains(&x[1]) {
                    sum += draw.kernel(2, k, sv, r) * h;
                }
                sv += h;
            }
            assert!((closed - sum).abs() < 2e-4, "case {case}: {closed} vs {sum}");
        }
    }
}
