//! The norm-then-lexicographic total order on `R^d`.
//!
//! Points are compared by Euclidean norm first; points of equal norm are
//! compared lexicographically by their coordinates. This breaks ties in
//! nearest-neighbor ranks deterministically.

use std::cmp::Ordering;

use super::point::Point;

/// Compares `a` and `b` under the total order.
///
/// Norms are compared through their squares so that exactly tied norms
/// (e.g. `(0,1)` and `(1,0)`) stay tied.
pub fn compare_total_order<const D: usize>(a: &Point<D>, b: &Point<D>) -> Ordering {
    a.norm_sq()
        .total_cmp(&b.norm_sq())
        .then_with(|| lexicographic(a, b))
}

fn lexicographic<const D: usize>(a: &Point<D>, b: &Point<D>) -> Ordering {
    a.0.iter()
        .zip(b.0.iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Sort key realizing [`compare_total_order`].
#[derive(Clone, Copy, Debug)]
pub struct TotalOrderKey<const D: usize> {
    pub norm: f64,
    pub coords: Point<D>,
}

impl<const D: usize> TotalOrderKey<D> {
    pub fn new(p: Point<D>) -> Self {
        Self {
            norm: p.norm(),
            coords: p,
        }
    }
}

impl<const D: usize> PartialEq for TotalOrderKey<D> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<const D: usize> Eq for TotalOrderKey<D> {}

impl<const D: usize> PartialOrd for TotalOrderKey<D> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<const D: usize> Ord for TotalOrderKey<D> {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_total_order(&self.coords, &other.coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tie_on_norm_uses_lexicographic_order() {
        let a = Point2::xy(0.0, 1.0);
        let b = Point2::xy(1.0, 0.0);
        assert_eq!(compare_total_order(&a, &b), Ordering::Less);
        assert_eq!(compare_total_order(&b, &a), Ordering::Greater);
    }

    #[test]
    fn smaller_norm_first() {
        let a = Point2::xy(0.5, 0.0);
        let b = Point2::xy(0.0, 1.0);
        assert_eq!(compare_total_order(&a, &b), Ordering::Less);
    }

    #[test]
    fn reflexive() {
        let a = Point2::xy(2.0, 3.0);
        assert_eq!(compare_total_order(&a, &a), Ordering::Equal);
    }

    #[test]
    fn antisymmetric_and_transitive_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // Coordinates on a coarse lattice so norm ties actually occur.
        let mut draw = || Point2::xy(rng.random_range(-3..=3) as f64, rng.random_range(-3..=3) as f64);
        for _ in 0..10_000 {
            let (a, b, c) = (draw(), draw(), draw());
            let ab = compare_total_order(&a, &b);
            assert_eq!(ab.reverse(), compare_total_order(&b, &a));
            if ab == Ordering::Equal {
                assert_eq!(a, b);
            }
            let bc = compare_total_order(&b, &c);
            if ab != Ordering::Greater && bc != Ordering::Greater {
                assert_ne!(compare_total_order(&a, &c), Ordering::Greater);
            }
        }
    }

    #[test]
    fn key_sorts_like_comparator() {
        let mut pts = vec![
            Point2::xy(1.0, 0.0),
            Point2::xy(0.0, 1.0),
            Point2::xy(-1.0, 0.0),
            Point2::xy(0.2, 0.1),
        ];
        let mut keys: Vec<_> = pts.iter().copied().map(TotalOrderKey::new).collect();
        keys.sort();
        pts.sort_by(compare_total_order);
        let from_keys: Vec<_> = keys.iter().map(|k| k.coords).collect();
        assert_eq!(from_keys, pts);
        assert_eq!(pts[1], Point2::xy(-1.0, 0.0));
    }
}
