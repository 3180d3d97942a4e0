use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// A point (or vector) in `R^D`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point<const D: usize>(pub [f64; D]);

pub type Point2 = Point<2>;
pub type Point3 = Point<3>;

impl<const D: usize> Point<D> {
    pub const ORIGIN: Self = Point([0.0; D]);

    pub fn new(coords: [f64; D]) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[f64; D] {
        &self.0
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist_sq(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.0;
        out.iter_mut().for_each(|c| *c *= s);
        Point(out)
    }
}

impl Point2 {
    pub fn xy(x: f64, y: f64) -> Self {
        Point([x, y])
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    /// z-component of the planar cross product.
    pub fn cross(&self, other: &Self) -> f64 {
        self.0[0] * other.0[1] - self.0[1] * other.0[0]
    }

    pub fn angle(&self) -> f64 {
        self.0[1].atan2(self.0[0])
    }

    pub fn from_angle(theta: f64) -> Self {
        Point([theta.cos(), theta.sin()])
    }
}

impl<const D: usize> Default for Point<D> {
    fn default() -> Self {
        Self::ORIGIN
    }
}

impl<const D: usize> Index<usize> for Point<D> {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<const D: usize> IndexMut<usize> for Point<D> {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl<const D: usize> Add for Point<D> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self.0;
        out.iter_mut().zip(rhs.0.iter()).for_each(|(a, b)| *a += b);
        Point(out)
    }
}

impl<const D: usize> Sub for Point<D> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self.0;
        out.iter_mut().zip(rhs.0.iter()).for_each(|(a, b)| *a -= b);
        Point(out)
    }
}

impl<const D: usize> Neg for Point<D> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl<const D: usize> Mul<f64> for Point<D> {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}
