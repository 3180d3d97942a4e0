use rand::Rng;

use crate::geom::{kappa, Point};

/// The observation window `[0, t^{1/d}]^d` plus a sampling margin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub scale_t: f64,
    pub d: usize,
    pub buffer: f64,
}

impl Window {
    pub fn new(scale_t: f64, d: usize, buffer: f64) -> Self {
        Self { scale_t, d, buffer }
    }

    pub fn side(&self) -> f64 {
        self.scale_t.powf(1.0 / self.d as f64)
    }

    pub fn core<const D: usize>(&self) -> Region<D> {
        Region::Box {
            lo: Point([0.0; D]),
            hi: Point([self.side(); D]),
        }
    }

    pub fn sampling<const D: usize>(&self) -> Region<D> {
        Region::Box {
            lo: Point([-self.buffer; D]),
            hi: Point([self.side() + self.buffer; D]),
        }
    }

    pub fn in_core<const D: usize>(&self, p: &Point<D>) -> bool {
        let side = self.side();
        p.0.iter().all(|&c| (0.0..=side).contains(&c))
    }

    /// Maps a core point into `[0,1]^d`.
    pub fn to_unit<const D: usize>(&self, p: &Point<D>) -> Point<D> {
        p.scale(1.0 / self.side())
    }
}

/// A bounded sampling region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region<const D: usize> {
    Box { lo: Point<D>, hi: Point<D> },
    Ball { center: Point<D>, radius: f64 },
}

impl<const D: usize> Region<D> {
    pub fn unit_cube() -> Self {
        Region::Box {
            lo: Point([0.0; D]),
            hi: Point([1.0; D]),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Region::Box { lo, hi } => lo.0.iter().zip(hi.0.iter()).map(|(a, b)| (b - a).max(0.0)).product(),
            Region::Ball { radius, .. } => kappa(D) * radius.max(0.0).powi(D as i32),
        }
    }

    pub fn contains(&self, p: &Point<D>) -> bool {
        match self {
            Region::Box { lo, hi } => (0..D).all(|i| p[i] >= lo[i] && p[i] <= hi[i]),
            Region::Ball { center, radius } => p.dist_sq(center) <= radius * radius,
        }
    }

    pub fn bounding_box(&self) -> (Point<D>, Point<D>) {
        match *self {
            Region::Box { lo, hi } => (lo, hi),
            Region::Ball { center, radius } => (
                Point(std::array::from_fn(|i| center[i] - radius)),
                Point(std::array::from_fn(|i| center[i] + radius)),
            ),
        }
    }

    /// Whether the closed ball `B(c, r)` lies inside the region.
    pub fn contains_ball(&self, c: &Point<D>, r: f64) -> bool {
        match self {
            Region::Box { lo, hi } => (0..D).all(|i| c[i] - r >= lo[i] && c[i] + r <= hi[i]),
            Region::Ball { center, radius } => c.dist(center) + r <= *radius,
        }
    }

    /// Uniform point in the region.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point<D> {
        match self {
            Region::Box { lo, hi } => {
                Point(std::array::from_fn(|i| lo[i] + (hi[i] - lo[i]) * rng.random::<f64>()))
            }
            Region::Ball { center, radius } => loop {
                let u: Point<D> = Point(std::array::from_fn(|_| 2.0 * rng.random::<f64>() - 1.0));
                if u.norm_sq() <= 1.0 {
                    break *center + u * *radius;
                }
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_geometry() {
        let w = Window::new(400.0, 2, 3.0);
        assert_eq!(w.side(), 20.0);
        assert_eq!(w.core::<2>().volume(), 400.0);
        assert_eq!(w.sampling::<2>().volume(), 26.0 * 26.0);
        assert!(w.in_core(&Point([0.0, 20.0])));
        assert!(!w.in_core(&Point([-0.1, 1.0])));
    }

    #[test]
    fn ball_volume_and_containment() {
        let b = Region::Ball { center: Point([0.0, 0.0, 0.0]), radius: 2.0 };
        assert!((b.volume() - 32.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
        assert!(b.contains_ball(&Point([1.0, 0.0, 0.0]), 1.0));
        assert!(!b.contains_ball(&Point([1.0, 0.0, 0.0]), 1.1));
    }
}
