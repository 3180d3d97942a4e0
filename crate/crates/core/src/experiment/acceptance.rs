//! The acceptance suite: each criterion runs its experiment at the stated
//! size and tolerance and reports pass or fail with the measured values.

use std::f64::consts::PI;
use std::time::Instant;

use serde::Serialize;

use super::run::{bp_cases, knn_replicates, mecke_cases, mosaic_replicates};
use super::spec::{BpIdentity, ExperimentSpec, Scale};
use crate::diag::{estimate_bound_terms, gumbel_ks, nonincreasing_within, spatial_uniformity, tv_counts_vs_poisson, CountSample, MaximaSample};
use crate::error::Result;
use crate::geom::{Point2, SizeFunctional};
use crate::integral::rathie_survival;
use crate::knn::{exact_mean_count, lemma_lower_bound, stabilization_trials, unit_ball_difference, verify_lemma_xa, KnnSpec};
use crate::mosaic::{
    calibrate_v_t, calibrate_v_t_exact, check_overlap_bound_delaunay, min_calibration_sample, sample_typical_delaunay,
    sample_typical_voronoi, stabilization_trials_voronoi, MosaicKind, MosaicSpec,
};
use crate::quad::integrate_with_breaks;
use crate::sampling::{verify_mecke, SeedSpec};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<40} {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.seconds
        )
    }
}

pub const CRITERIA: &[(u8, &str)] = &[
    (1, "knn Poisson limit"),
    (2, "knn mean-count identity"),
    (3, "lens lemma"),
    (4, "Mecke equation"),
    (5, "Blaschke-Petkantschin formulas"),
    (6, "Delaunay constants"),
    (7, "Rathie law"),
    (8, "Voronoi inradius void identity"),
    (9, "Voronoi Gumbel limit"),
    (10, "Delaunay Gumbel limit"),
    (11, "stabilization"),
    (12, "bound-term trend"),
    (13, "Delaunay overlap bound"),
];

/// Sample sizes shrink by the scale divisor, but never below `floor`.
fn size(n: usize, scale: Scale, floor: usize) -> usize {
    let div = match scale {
        Scale::Full => 1,
        Scale::Desk => 4,
        Scale::Smoke => 20,
    };
    (n / div).max(floor.min(n))
}

fn seed(id: u8) -> SeedSpec {
    SeedSpec::new(0x6163_6365_7074 + id as u64, 0)
}

type Check = (bool, String);

fn knn_poisson(scale: Scale) -> Result<Check> {
    let spec = KnnSpec::uniform(2, 0, 1e4);
    let n = size(2000, scale, 100);
    let reps = knn_replicates(&spec, n, seed(1))?;
    let counts: Vec<usize> = reps.iter().map(|r| r.count).collect();
    let tv = tv_counts_vs_poisson(&CountSample { counts: counts.clone(), target_mean: 1.0 })?;
    let p0 = counts.iter().filter(|&&c| c == 0).count() as f64 / n as f64;
    let gap = (p0 - (-1f64).exp()).abs();
    Ok((tv <= 0.08 && gap <= 0.03, format!("n={n} tv={tv:.4} (<=0.08) |p0-1/e|={gap:.4} (<=0.03)")))
}

fn knn_mean(_: Scale) -> Result<Check> {
    let mut errs = Vec::new();
    for s in [1e3, 1e6, 1e9] {
        errs.push((exact_mean_count(&KnnSpec::uniform(2, 1, s))? - 1.0).abs());
    }
    let ok = errs.windows(2).all(|w| w[1] < w[0]);
    Ok((ok, format!("|mean-1| at s=1e3,1e6,1e9: {:.3e} {:.3e} {:.3e}", errs[0], errs[1], errs[2])))
}

fn lens_lemma(scale: Scale) -> Result<Check> {
    let n = size(10_000, scale, 1000);
    let rep = verify_lemma_xa(2, n, seed(3))?;
    let slack0 = unit_ball_difference(2, 0.0) - lemma_lower_bound(2, 0.0);
    let lhs1 = unit_ball_difference(2, 1.0);
    let rhs1 = lemma_lower_bound(2, 1.0);
    let ok = rep.violations == 0 && slack0 == 0.0 && (lhs1 - 1.91322).abs() < 1e-5 && lhs1 >= rhs1;
    Ok((ok, format!("n={n} violations={} slack(o)={slack0} lhs(|x|=1)={lhs1:.5} >= {rhs1:.5}", rep.violations)))
}

fn mecke(scale: Scale) -> Result<Check> {
    let n = size(100_000, scale, 1000);
    let spec = ExperimentSpec::parse("kind = \"mecke-check\"\nradius = 0.1\n")?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (name, f)) in mecke_cases(&spec).into_iter().enumerate() {
        let rep = verify_mecke(1.0, f, n, seed(4).substream(i as u64))?;
        ok &= rep.z <= 3.0;
        parts.push(format!("{name} z={:.2}", rep.z));
    }
    Ok((ok, format!("n_mc={n} {} (<=3)", parts.join(" "))))
}

fn bp(scale: Scale) -> Result<Check> {
    let n = size(1_000_000, scale, 10_000);
    let spec = ExperimentSpec {
        identity: Some(BpIdentity::All),
        ..ExperimentSpec::parse("kind = \"bp-check\"")?
    };
    let mut worst = (0.0f64, String::new());
    let cases = bp_cases(&spec);
    for (i, case) in cases.iter().enumerate() {
        let rep = case.run(n, seed(5).replicate(1).substream(i as u64))?;
        if rep.z_score.abs() >= worst.0 {
            worst = (rep.z_score.abs(), case.name());
        }
    }
    Ok((worst.0 <= 3.0, format!("n_mc={n} cases={} max|z|={:.2} at {} (<=3)", cases.len(), worst.0, worst.1)))
}

fn delaunay_sample(scale: Scale) -> Result<crate::mosaic::TypicalCellSample> {
    let spec = MosaicSpec::new(MosaicKind::Delaunay, 1.0, 400.0, 1.0, SizeFunctional::Volume);
    sample_typical_delaunay(&spec, size(100_000, scale, 5000), seed(6))
}

fn delaunay_constants(scale: Scale) -> Result<Check> {
    let typ = delaunay_sample(scale)?;
    let beta = typ.center_intensity.unwrap_or(f64::NAN);
    let rel = (beta - 2.0).abs() / 2.0;
    let (mean, se) = typ.mean_area();
    let z = (mean - 0.5).abs() / se;
    Ok((rel <= 0.02 && z <= 3.0, format!("n={} beta={beta:.4} (2%: {rel:.4}) mean area={mean:.5} z={z:.2} (<=3)", typ.len())))
}

fn rathie(scale: Scale) -> Result<Check> {
    let typ = delaunay_sample(scale)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for v in [0.5, 1.0, 2.0] {
        let gap = (typ.survival(v).0 - rathie_survival(v, 1.0)).abs();
        ok &= gap <= 0.02;
        parts.push(format!("v={v}: {gap:.4}"));
    }
    let integral = integrate_with_breaks(&mut |v| rathie_survival(v, 1.0), &[0.0, 0.5, 2.0, 6.0, 25.0], 1e-12, 1e-10).value;
    ok &= (integral - 0.5).abs() <= 1e-3;
    Ok((ok, format!("n={} |S-S_R| {} (<=0.02) int S={integral:.6}", typ.len(), parts.join(" "))))
}

fn voronoi_void(scale: Scale) -> Result<Check> {
    let spec = MosaicSpec::new(MosaicKind::Voronoi, 1.0, 400.0, 1.0, SizeFunctional::CenteredInradius);
    let typ = sample_typical_voronoi(&spec, size(100_000, scale, 5000), seed(8))?;
    let mut ok = true;
    let mut parts = Vec::new();
    for r in [0.2, 0.4, 0.6] {
        let (p, se) = typ.survival(r);
        let z = (p - (-PI * 4.0 * r * r).exp()).abs() / se;
        ok &= z <= 3.0;
        parts.push(format!("r={r}: z={z:.2}"));
    }
    Ok((ok, format!("n={} {} (<=3)", typ.len(), parts.join(" "))))
}

fn voronoi_gumbel(scale: Scale) -> Result<Check> {
    let spec = MosaicSpec::new(MosaicKind::Voronoi, 1.0, 400.0, 1.0, SizeFunctional::CenteredInradius);
    let th = calibrate_v_t_exact(&spec)?;
    let n = size(1000, scale, 250);
    let reps = mosaic_replicates(&spec, &th, n, seed(9), None)?;
    let counts: Vec<usize> = reps.iter().map(|r| r.count).collect();
    let tv = tv_counts_vs_poisson(&CountSample { counts, target_mean: 1.0 })?;
    let pts: Vec<Point2> = reps.iter().flat_map(|r| r.scaled_centers.iter().copied()).collect();
    let p = spatial_uniformity(&pts)?.p_value;
    let ks = gumbel_ks(&MaximaSample { statistics: reps.iter().map(|r| r.gumbel_statistic).collect() })?;
    Ok((
        tv <= 0.12 && p >= 1e-3 && ks <= 0.1,
        format!("n={n} tv={tv:.4} (<=0.12) chi2 p={p:.4} (>=1e-3) ks={ks:.4} (<=0.1)"),
    ))
}

fn delaunay_gumbel(scale: Scale) -> Result<Check> {
    let spec = MosaicSpec::new(MosaicKind::Delaunay, 1.0, 400.0, 1.0, SizeFunctional::Volume);
    let exact = calibrate_v_t_exact(&spec)?;
    let needed = min_calibration_sample(spec.target_level());
    let typ = sample_typical_delaunay(&spec, size(100_000, scale, needed).max(needed), seed(10).substream(1))?;
    let emp = calibrate_v_t(&spec, &typ)?;
    let gap = (exact.v_t - emp.v_t).abs() / emp.se;
    let n = size(1000, scale, 250);
    let reps = mosaic_replicates(&spec, &exact, n, seed(10), None)?;
    let counts: Vec<usize> = reps.iter().map(|r| r.count).collect();
    let tv = tv_counts_vs_poisson(&CountSample { counts, target_mean: 1.0 })?;
    let ks = gumbel_ks(&MaximaSample { statistics: reps.iter().map(|r| r.gumbel_statistic).collect() })?;
    Ok((
        tv <= 0.12 && ks <= 0.1 && gap <= 2.0,
        format!(
            "n={n} tv={tv:.4} (<=0.12) ks={ks:.4} (<=0.1) v_t exact={:.4} empirical={:.4} gap={gap:.2} se (<=2)",
            exact.v_t, emp.v_t
        ),
    ))
}

fn stabilization(scale: Scale) -> Result<Check> {
    let n = size(100, scale, 20);
    let vor = stabilization_trials_voronoi(1.0, 15.0, n, seed(11))?;
    let knn = stabilization_trials(&KnnSpec::uniform(2, 0, 1e4), Point2::xy(0.5, 0.5), n, seed(11).substream(1))?;
    let ok = vor.changed_cells == 0 && vor.changed_radius == 0 && vor.stopping_set && knn == 0;
    Ok((
        ok,
        format!(
            "voronoi trials={n} changed cells={} radii={} stopping set={}; knn trials={n} changed={knn}",
            vor.changed_cells, vor.changed_radius, vor.stopping_set
        ),
    ))
}

fn bound_trend(scale: Scale) -> Result<Check> {
    let n = size(200, scale, 40);
    let mut terms = Vec::new();
    for (i, t) in [100.0, 400.0, 1600.0].into_iter().enumerate() {
        let spec = MosaicSpec::new(MosaicKind::Voronoi, 1.0, t, 1.0, SizeFunctional::CenteredInradius);
        let th = calibrate_v_t_exact(&spec)?;
        terms.push(estimate_bound_terms(&spec, &th, n, seed(12).substream(i as u64))?);
    }
    let stab: Vec<_> = terms.iter().map(|e| e.stab_tail).collect();
    let pair: Vec<_> = terms.iter().map(|e| e.pair_close_mass).collect();
    let c2: Vec<_> = terms.iter().map(|e| e.c2_like).collect();
    let ok = nonincreasing_within(&stab, 2.0) && nonincreasing_within(&pair, 2.0) && nonincreasing_within(&c2, 2.0);
    let show = |v: &[crate::diag::Estimate]| v.iter().map(|e| format!("{:.3}±{:.3}", e.value, e.se)).collect::<Vec<_>>().join(" ");
    Ok((ok, format!("reps={n} stab_tail {} | pair {} | c2 {}", show(&stab), show(&pair), show(&c2))))
}

fn overlap(scale: Scale) -> Result<Check> {
    let n = size(100_000, scale, 1000);
    let rep = check_overlap_bound_delaunay(n, seed(13));
    Ok((
        rep.violations == 0 && rep.admissible == n,
        format!(
            "admissible={} of {n} violations={} max ratio={:.4} bound={:.4}",
            rep.admissible, rep.violations, rep.max_ratio, rep.bound_ratio
        ),
    ))
}

/// Runs criterion `id` (1 to 13). Errors count as failures.
pub fn run_criterion(id: u8, scale: Scale) -> CriterionOutcome {
    let title = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
    let start = Instant::now();
    let res = match id {
        1 => knn_poisson(scale),
        2 => knn_mean(scale),
        3 => lens_lemma(scale),
        4 => mecke(scale),
        5 => bp(scale),
        6 => delaunay_constants(scale),
        7 => rathie(scale),
        8 => voronoi_void(scale),
        9 => voronoi_gumbel(scale),
        10 => delaunay_gumbel(scale),
        11 => stabilization(scale),
        12 => bound_trend(scale),
        13 => overlap(scale),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (passed, detail) = res.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionOutcome {
        id,
        title,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Runs every criterion in order, calling `report` after each.
pub fn run_acceptance(scale: Scale, mut report: impl FnMut(&CriterionOutcome)) -> Vec<CriterionOutcome> {
    CRITERIA
        .iter()
        .map(|&(id, _)| {
            let out = run_criterion(id, scale);
            report(&out);
            out
        })
        .collect()
}
