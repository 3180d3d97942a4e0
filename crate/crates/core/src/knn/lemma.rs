use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::kappa;
use crate::sampling::SeedSpec;
use rand::Rng;

/// Outcome of the sweep of `L_d(B(o,1) \ B(x,1)) ≥ 2κ_{d−1}/(d+1) |x|^{(d+1)/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub samples: usize,
    pub violations: usize,
    /// Smallest `lhs − rhs` seen.
    pub min_slack: f64,
}

/// `L_d(B(o,1) \ B(x,1))` for `|x| = t ≤ 2`.
pub fn unit_ball_difference(d: usize, t: f64) -> f64 {
    let t = t.clamp(0.0, 2.0);
    match d {
        2 => PI - (2.0 * (t / 2.0).acos() - 0.5 * t * (4.0 - t * t).sqrt()),
        3 => 4.0 * PI / 3.0 - PI * (4.0 + t) * (2.0 - t).powi(2) / 12.0,
        _ => f64::NAN,
    }
}

pub fn lemma_lower_bound(d: usize, t: f64) -> f64 {
    2.0 * kappa(d - 1) / (d as f64 + 1.0) * t.powf((d as f64 + 1.0) / 2.0)
}

/// Checks the lens bound at `samples` uniform points of the unit ball.
pub fn verify_lemma_xa(d: usize, samples: usize, seed: SeedSpec) -> Result<LemmaReport> {
    if !(2..=3).contains(&d) {
        return Err(Error::Domain(format!("d = {d} is not supported (2 or 3)")));
    }
    let mut rng = seed.rng();
    let mut report = LemmaReport {
        samples,
        violations: 0,
        min_slack: f64::INFINITY,
    };
    for _ in 0..samples {
        // |x| of a uniform point in the unit ball has density d t^{d-1}
        let t = rng.random::<f64>().powf(1.0 / d as f64);
        let slack = unit_ball_difference(d, t) - lemma_lower_bound(d, t);
        if slack < 0.0 {
            report.violations += 1;
        }
        report.min_slack = report.min_slack.min(slack);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(unit_ball_difference(2, 0.0), 0.0);
        assert!(unit_ball_difference(3, 0.0).abs() < 1e-15);
        assert_eq!(lemma_lower_bound(2, 0.0), 0.0);
        assert!((unit_ball_difference(2, 1.0) - (PI / 3.0 + 3f64.sqrt() / 2.0)).abs() < 1e-14);
        assert!((unit_ball_difference(2, 1.0) - 1.91322).abs() < 1e-5);
        assert!((lemma_lower_bound(2, 1.0) - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn lens_matches_grid_oracle() {
        for d in [2usize, 3] {
            let t = 0.6;
            let n = if d == 2 { 1500 } else { 150 };
            let w = 2.0 / n as f64;
            let mut vol = 0.0;
            let idx: Vec<usize> = (0..n).collect();
            let cells = if d == 2 { vec![0] } else { idx.clone() };
            for &i in &idx {
                for &j in &idx {
                    for &l in &cells {
                        let p = [
                            -1.0 + (i as f64 + 0.5) * w,
                            -1.0 + (j as f64 + 0.5) * w,
                            if d == 3 { -1.0 + (l as f64 + 0.5) * w } else { 0.0 },
                        ];
                        let r0 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
                        let r1 = (p[0] - t).powi(2) + p[1] * p[1] + p[2] * p[2];
                        if r0 <= 1.0 && r1 > 1.0 {
                            vol += w.powi(d as i32);
                        }
                    }
                }
            }
            assert!((vol - unit_ball_difference(d, t)).abs() < 2e-2 * vol, "d={d}: {vol}");
        }
    }

    #[test]
    fn sweep_has_no_violations() {
        for d in [2, 3] {
            let rep = verify_lemma_xa(d, 10_000, SeedSpec::new(4, 0)).unwrap();
            assert_eq!(rep.violations, 0);
            assert!(rep.min_slack >= 0.0);
        }
    }
}
