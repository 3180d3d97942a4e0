//! Runs an [`ExperimentSpec`] and writes `results.csv`, `summary.json` and
//! `spec.echo` into the output directory.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use statrs::distribution::{Discrete, Poisson};

use super::spec::{BpIdentity, ExperimentKind, ExperimentSpec, LemmaCase, MeckeCase};
use crate::diag::{count_pmf, estimate_bound_terms, gumbel_ks, spatial_uniformity, tv_counts_vs_poisson, CountSample, MaximaSample};
use crate::error::{Error, Result};
use crate::geom::{Point, Point2, SizeFunctional};
use crate::integral::{verify_bp_linear, verify_bp_spherical, verify_bp_subsphere, BpReport, BpTestFunction};
use crate::knn::{build_knn_exceedance, exact_mean_count, gumbel_statistic_knn, lemma_lower_bound, unit_ball_difference, verify_lemma_xa, KnnSpec};
use crate::mosaic::{
    build_center_process, calibrate_v_t, calibrate_v_t_exact, check_overlap_bound_delaunay, check_pair_bound_voronoi,
    exact_survival, gumbel_statistic_mosaic, sample_typical, CalibratedThreshold, CalibrationMode, MosaicKind, MosaicSpec,
    PairBoundConfig, TypicalCellSample,
};
use crate::sampling::{verify_mecke, MeckeTestFn, SeedSpec};

pub const SCHEMA: u32 = 1;

const TAG_TYPICAL: u64 = 0x7479_7069;
const TAG_BOUND: u64 = 0x626f_756e;
const TAG_CHECK: u64 = 0x6368_6563;

/// Files written by [`run_experiment`] and the parsed summary.
#[derive(Clone, Debug)]
pub struct ResultBundle {
    pub dir: PathBuf,
    pub results_csv: PathBuf,
    pub summary_json: PathBuf,
    pub spec_echo: PathBuf,
    /// Data rows in `results.csv`.
    pub rows: usize,
    pub summary: Value,
}

/// Process exit code for an error: 2 for configs, 4 for resource limits,
/// 3 for everything raised by the pipelines.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => 2,
        Error::Resources(_) => 4,
        _ => 3,
    }
}

/// Floats with 17 significant digits, so values round-trip exactly.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.16e}")
    }
}

/// Finite floats as JSON numbers, everything else as `null`.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

/// One knn replicate.
#[derive(Clone, Debug, PartialEq)]
pub struct KnnReplicate {
    pub count: usize,
    pub max_content: f64,
    pub gumbel_statistic: f64,
    pub n_points: usize,
    /// Retained centers in `[0,1]^d`.
    pub centers: Vec<Vec<f64>>,
}

fn knn_one<const D: usize>(spec: &KnnSpec, seed: SeedSpec) -> Result<KnnReplicate> {
    let out = build_knn_exceedance::<D>(spec, seed)?;
    Ok(KnnReplicate {
        count: out.count,
        max_content: out.max_content,
        gumbel_statistic: gumbel_statistic_knn(&out, spec)?,
        n_points: out.n_points,
        centers: out.retained_centers.iter().map(|p| p.0.to_vec()).collect(),
    })
}

/// Replicate `i` uses stream `i` of `seed`, whatever the thread schedule.
pub fn knn_replicates(spec: &KnnSpec, replicates: usize, seed: SeedSpec) -> Result<Vec<KnnReplicate>> {
    (0..replicates as u64)
        .into_par_iter()
        .map(|i| match spec.d {
            2 => knn_one::<2>(spec, seed.replicate(i)),
            3 => knn_one::<3>(spec, seed.replicate(i)),
            d => Err(Error::Domain(format!("d = {d} is not supported"))),
        })
        .collect()
}

/// One mosaic replicate.
#[derive(Clone, Debug, PartialEq)]
pub struct MosaicReplicate {
    pub count: usize,
    pub max_sigma: f64,
    pub gumbel_statistic: f64,
    pub n_cells: usize,
    pub scaled_centers: Vec<Point2>,
}

pub fn mosaic_replicates(
    spec: &MosaicSpec,
    threshold: &CalibratedThreshold,
    replicates: usize,
    seed: SeedSpec,
    typical: Option<&TypicalCellSample>,
) -> Result<Vec<MosaicReplicate>> {
    (0..replicates as u64)
        .into_par_iter()
        .map(|i| {
            let out = build_center_process(spec, threshold, seed.replicate(i))?;
            Ok(MosaicReplicate {
                count: out.count,
                max_sigma: out.max_sigma,
                gumbel_statistic: gumbel_statistic_mosaic(spec, out.max_sigma, typical)?,
                n_cells: out.n_cells,
                scaled_centers: out.scaled_centers,
            })
        })
        .collect()
}

/// Count-law, Gumbel and uniformity diagnostics shared by the pipelines.
/// Diagnostics whose sample-size requirement fails are `null`, with a note.
pub fn process_diagnostics<const D: usize>(
    counts: &[usize],
    target_mean: f64,
    statistics: &[f64],
    centers: &[Point<D>],
    notes: &mut Vec<String>,
) -> Value {
    let n = counts.len();
    let tv = match tv_counts_vs_poisson(&CountSample { counts: counts.to_vec(), target_mean }) {
        Ok(tv) => num(tv),
        Err(e) => {
            notes.push(format!("tv_counts: {e}"));
            Value::Null
        }
    };
    let ks = match gumbel_ks(&MaximaSample { statistics: statistics.to_vec() }) {
        Ok(ks) => num(ks),
        Err(e) => {
            notes.push(format!("ks_gumbel: {e}"));
            Value::Null
        }
    };
    let uniformity = match spatial_uniformity(centers) {
        Ok(rep) => to_value(&rep),
        Err(e) => {
            notes.push(format!("uniformity: {e}"));
            Value::Null
        }
    };
    let empirical = count_pmf(counts);
    let law = Poisson::new(target_mean).ok();
    let kmax = empirical.len().max(1) + 3;
    let reference: Vec<Value> = (0..kmax).map(|k| num(law.as_ref().map_or(f64::NAN, |l| l.pmf(k as u64)))).collect();
    let mean_count = counts.iter().sum::<usize>() as f64 / n.max(1) as f64;
    let p0 = counts.iter().filter(|&&c| c == 0).count() as f64 / n.max(1) as f64;
    json!({
        "tv_counts": tv,
        "ks_gumbel": ks,
        "uniformity": uniformity,
        "target_mean": num(target_mean),
        "mean_count": num(mean_count),
        "p0_empirical": num(p0),
        "p0_poisson": num((-target_mean).exp()),
        "count_pmf": {
            "k": (0..kmax).collect::<Vec<_>>(),
            "empirical": (0..kmax).map(|k| empirical.get(k).copied().unwrap_or(0.0)).collect::<Vec<_>>(),
            "poisson": reference,
        },
        "gumbel_reference": gumbel_reference(),
    })
}

fn gumbel_reference() -> Value {
    let x: Vec<f64> = (0..=110).map(|i| -3.0 + 0.1 * i as f64).collect();
    let cdf: Vec<f64> = x.iter().map(|&l| (-(-l).exp()).exp()).collect();
    json!({ "x": x, "cdf": cdf })
}

struct Output {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    extra: Vec<(&'static str, Vec<&'static str>, Vec<Vec<String>>)>,
    summary: Value,
}

/// Runs `spec` with at most `workers` threads (all cores if `None`) and
/// writes the bundle into `out_dir`.
pub fn run_experiment(spec: &ExperimentSpec, out_dir: &Path, workers: Option<usize>) -> Result<ResultBundle> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Resources(format!("thread pool: {e}")))?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Resources(format!("{}: {e}", out_dir.display())))?;
    let start = Instant::now();
    let mut notes = Vec::new();
    let out = pool.install(|| match spec.kind() {
        ExperimentKind::Knn => run_knn(spec, &mut notes),
        ExperimentKind::Voronoi | ExperimentKind::Delaunay => run_mosaic(spec, &mut notes),
        ExperimentKind::BpCheck => run_bp(spec, &mut notes),
        ExperimentKind::MeckeCheck => run_mecke(spec, &mut notes),
        ExperimentKind::LemmaCheck => run_lemma(spec, &mut notes),
    })?;
    let wall = start.elapsed().as_secs_f64();

    let results_csv = out_dir.join("results.csv");
    write_csv(&results_csv, &out.header, &out.rows)?;
    for (name, header, rows) in &out.extra {
        write_csv(&out_dir.join(name), header, rows)?;
    }
    let spec_echo = out_dir.join("spec.echo");
    std::fs::write(&spec_echo, spec.to_toml())?;
    let digest = Sha256::digest(std::fs::read(&results_csv)?);
    let digest: String = digest.iter().map(|b| format!("{b:02x}")).collect();

    let mut summary = json!({
        "schema": SCHEMA,
        "id": spec.label(),
        "kind": spec.kind().name(),
        "status": if out.rows.is_empty() { "no data" } else { "ok" },
        "replicates": spec.replicates(),
        "master_seed": spec.master_seed(),
        "seeds": {
            "master_seed": spec.master_seed(),
            "replicate_streams": "replicate i draws from stream i of the master seed",
            "typical_substream": TAG_TYPICAL,
            "check_substream": TAG_CHECK,
        },
        "workers": pool.current_num_threads(),
        "wall_time_s": wall,
        "results_sha256": digest,
        "files": std::iter::once("results.csv").chain(out.extra.iter().map(|e| e.0)).collect::<Vec<_>>(),
    });
    if let (Value::Object(map), Value::Object(extra)) = (&mut summary, out.summary) {
        map.extend(extra);
    }
    summary["notes"] = json!(notes);
    let summary_json = out_dir.join("summary.json");
    std::fs::write(&summary_json, serde_json::to_string_pretty(&summary).expect("json") + "\n")?;
    Ok(ResultBundle {
        dir: out_dir.to_path_buf(),
        results_csv,
        summary_json,
        spec_echo,
        rows: out.rows.len(),
        summary,
    })
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    w.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn base_seed(spec: &ExperimentSpec) -> SeedSpec {
    SeedSpec::new(spec.master_seed(), 0)
}

fn run_knn(spec: &ExperimentSpec, notes: &mut Vec<String>) -> Result<Output> {
    let knn = spec.knn_spec()?;
    let reps = knn_replicates(&knn, spec.replicates(), base_seed(spec))?;
    let rows = reps
        .iter()
        .enumerate()
        .map(|(i, r)| vec![i.to_string(), r.count.to_string(), fmt_f64(r.max_content), fmt_f64(r.gumbel_statistic), r.n_points.to_string()])
        .collect();
    let coords: &[&'static str] = if knn.d == 2 { &["x", "y"] } else { &["x", "y", "z"] };
    let mut center_header = vec!["replicate_id"];
    center_header.extend_from_slice(coords);
    let center_rows = reps
        .iter()
        .enumerate()
        .flat_map(|(i, r)| {
            r.centers.iter().map(move |c| std::iter::once(i.to_string()).chain(c.iter().map(|&v| fmt_f64(v))).collect())
        })
        .collect();
    let counts: Vec<usize> = reps.iter().map(|r| r.count).collect();
    let stats: Vec<f64> = reps.iter().map(|r| r.gumbel_statistic).collect();
    let mut diag = if knn.d == 2 {
        let pts: Vec<Point<2>> = reps.iter().flat_map(|r| r.centers.iter().map(|c| Point([c[0], c[1]]))).collect();
        process_diagnostics(&counts, knn.c, &stats, &pts, notes)
    } else {
        let pts: Vec<Point<3>> = reps.iter().flat_map(|r| r.centers.iter().map(|c| Point([c[0], c[1], c[2]]))).collect();
        process_diagnostics(&counts, knn.c, &stats, &pts, notes)
    };
    diag["a_s"] = num(knn.threshold()?);
    diag["exact_mean_count"] = num(exact_mean_count(&knn)?);
    diag["knn"] = to_value(&knn);
    if reps.is_empty() {
        notes.push("no data".into());
    }
    Ok(Output {
        header: vec!["replicate_id", "count", "max_content", "gumbel_statistic", "n_points"],
        rows,
        extra: vec![("centers.csv", center_header, center_rows)],
        summary: diag,
    })
}

/// Survival curves of the typical size on a grid up to `1.5 v_t`.
fn survival_reference(ms: &MosaicSpec, v_t: f64, typical: Option<&TypicalCellSample>) -> Value {
    let top = if v_t.is_finite() && v_t > 0.0 { 1.5 * v_t } else { 1.0 };
    let v: Vec<f64> = (0..=150).map(|i| top * i as f64 / 150.0).collect();
    let law = match (ms.kind, ms.functional) {
        (MosaicKind::Delaunay, SizeFunctional::Volume) => Some("rathie"),
        (MosaicKind::Voronoi, SizeFunctional::CenteredInradius) => Some("void_probability"),
        _ => None,
    };
    let exact: Option<Vec<Value>> = law.map(|_| v.iter().map(|&x| num(exact_survival(ms, x).unwrap_or(f64::NAN))).collect());
    let empirical: Option<Vec<f64>> = typical.filter(|t| !t.is_empty()).map(|t| v.iter().map(|&x| t.survival(x).0).collect());
    json!({ "v": v, "law": law, "exact": exact, "empirical": empirical })
}

fn run_mosaic(spec: &ExperimentSpec, notes: &mut Vec<String>) -> Result<Output> {
    let ms = spec.mosaic_spec()?;
    let seed = base_seed(spec);
    let n_typical = spec.n_typical();
    let typical = if n_typical > 0 {
        Some(sample_typical(&ms, n_typical, seed.substream(TAG_TYPICAL))?)
    } else {
        None
    };
    let exact = calibrate_v_t_exact(&ms).ok();
    let empirical = typical.as_ref().and_then(|t| calibrate_v_t(&ms, t).ok());
    let threshold = match spec.calibration() {
        CalibrationMode::Exact => exact.ok_or_else(|| Error::Config("no exact calibration available".into()))?,
        CalibrationMode::Empirical => match &typical {
            Some(t) => calibrate_v_t(&ms, t)?,
            None => return Err(Error::Config("empirical calibration needs n_typical > 0".into())),
        },
    };
    let reps = mosaic_replicates(&ms, &threshold, spec.replicates(), seed, typical.as_ref())?;
    let rows = reps
        .iter()
        .enumerate()
        .map(|(i, r)| vec![i.to_string(), r.count.to_string(), fmt_f64(r.max_sigma), fmt_f64(r.gumbel_statistic), r.n_cells.to_string()])
        .collect();
    let center_rows = reps
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.scaled_centers.iter().map(move |p| vec![i.to_string(), fmt_f64(p.x()), fmt_f64(p.y())]))
        .collect();
    let counts: Vec<usize> = reps.iter().map(|r| r.count).collect();
    let stats: Vec<f64> = reps.iter().map(|r| r.gumbel_statistic).collect();
    let pts: Vec<Point2> = reps.iter().flat_map(|r| r.scaled_centers.iter().copied()).collect();
    let mut diag = process_diagnostics(&counts, ms.c, &stats, &pts, notes);
    diag["mosaic"] = to_value(&ms);
    diag["b_t"] = num(ms.b_t());
    diag["center_intensity"] = num(ms.center_intensity());
    diag["threshold"] = to_value(&threshold);
    diag["threshold_exact"] = exact.map_or(Value::Null, |t| to_value(&t));
    diag["threshold_empirical"] = empirical.map_or(Value::Null, |t| to_value(&t));
    if let (Some(e), Some(m)) = (exact, empirical) {
        diag["calibration_gap_se"] = num((e.v_t - m.v_t).abs() / m.se);
    }
    if let Some(t) = &typical {
        let (mean, se) = t.mean_area();
        diag["typical"] = json!({
            "n": t.len(),
            "mean_area": num(mean),
            "mean_area_se": num(se),
            "center_intensity_estimate": t.center_intensity.map_or(Value::Null, num),
        });
    }
    diag["typical_survival"] = survival_reference(&ms, threshold.v_t, typical.as_ref());
    if spec.bound_terms.unwrap_or(false) {
        let est = estimate_bound_terms(&ms, &threshold, spec.replicates(), seed.substream(TAG_BOUND))?;
        diag["bound_terms"] = to_value(&est);
    }
    if reps.is_empty() {
        notes.push("no data".into());
    }
    let mut extra = vec![("centers.csv", vec!["replicate_id", "x", "y"], center_rows)];
    if let Some(t) = &typical {
        let rows = t
            .cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let dev = t.deviation_values.get(i).copied().unwrap_or(f64::NAN);
                vec![fmt_f64(t.sigma_values[i]), fmt_f64(dev), fmt_f64(c.centered_inradius()), fmt_f64(c.centered_circumradius()), fmt_f64(c.area())]
            })
            .collect();
        extra.push(("typical.csv", vec!["sigma", "deviation", "rho_o", "r_o", "area"], rows));
    }
    Ok(Output {
        header: vec!["replicate_id", "count", "max_sigma", "gumbel_statistic", "n_cells"],
        rows,
        extra,
        summary: diag,
    })
}

/// Long-format rows `case, quantity, value` plus one summary object per case.
#[derive(Default)]
struct Checks {
    rows: Vec<Vec<String>>,
    cases: Vec<Value>,
}

impl Checks {
    fn push(&mut self, case: &str, fields: &[(&str, f64)], pass: bool, extra: Value) {
        let mut obj = json!({ "case": case, "pass": pass });
        for (q, v) in fields {
            self.rows.push(vec![case.to_string(), q.to_string(), fmt_f64(*v)]);
            obj[*q] = num(*v);
        }
        if let Value::Object(e) = extra {
            obj.as_object_mut().expect("object").extend(e);
        }
        self.cases.push(obj);
    }

    fn finish(self) -> Output {
        let all = self.cases.iter().all(|c| c["pass"] == json!(true));
        Output {
            header: vec!["case", "quantity", "value"],
            rows: self.rows,
            extra: vec![],
            summary: json!({ "checks": self.cases, "all_pass": all && !self.cases.is_empty() }),
        }
    }
}

/// A single case of a Blaschke-Petkantschin check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BpCase {
    pub identity: BpIdentity,
    pub d: usize,
    pub k: usize,
    pub m: usize,
    pub r0: f64,
    pub f: BpTestFunction,
}

impl BpCase {
    pub fn name(&self) -> String {
        match self.identity {
            BpIdentity::Spherical => format!("spherical_d{}_{}", self.d, self.f.name()),
            BpIdentity::Linear => format!("linear_d{}_k{}_{}", self.d, self.k, self.f.name()),
            _ => format!("subsphere_d{}_k{}_m{}_r{}_{}", self.d, self.k, self.m, self.r0, self.f.name()),
        }
    }

    pub fn run(&self, n_mc: usize, seed: SeedSpec) -> Result<BpReport> {
        match self.identity {
            BpIdentity::Spherical => verify_bp_spherical(self.d, self.f, n_mc, seed),
            BpIdentity::Linear => verify_bp_linear(self.d, self.k, self.f, n_mc, seed),
            _ => {
                // Q spanned by the last d - k coordinate axes
                let q: Vec<[f64; 3]> = (self.k..self.d)
                    .map(|i| {
                        let mut v = [0.0; 3];
                        v[i] = 1.0;
                        v
                    })
                    .collect();
                verify_bp_subsphere(self.d, self.k, self.m, &q, self.r0, self.f, n_mc, seed)
            }
        }
    }

    fn supported(&self) -> bool {
        self.identity != BpIdentity::Subsphere || self.f != BpTestFunction::Cube || (self.d == 2 && self.m == 1)
    }
}

/// Cases selected by a bp-check spec; `identity = "all"` gives the planar
/// cases of the three formulas and the spatial linear ones.
pub fn bp_cases(spec: &ExperimentSpec) -> Vec<BpCase> {
    let fs: Vec<BpTestFunction> = match spec.test_function {
        Some(f) => vec![f],
        None => vec![BpTestFunction::Gaussian, BpTestFunction::Cube],
    };
    let d = spec.d.unwrap_or(2);
    let mut shapes = Vec::new();
    let mut add = |identity, d, k, m, r0| shapes.push((identity, d, k, m, r0));
    match spec.identity.unwrap_or(BpIdentity::All) {
        BpIdentity::Spherical => add(BpIdentity::Spherical, d, d, d, 0.0),
        BpIdentity::Linear => match spec.k {
            Some(k) => add(BpIdentity::Linear, d, k, k, 0.0),
            None => (1..=d).for_each(|k| add(BpIdentity::Linear, d, k, k, 0.0)),
        },
        BpIdentity::Subsphere => {
            let k = spec.k.unwrap_or(1);
            add(BpIdentity::Subsphere, d, k, spec.m.unwrap_or(1), spec.r0.unwrap_or(0.0));
        }
        BpIdentity::All => {
            add(BpIdentity::Spherical, 2, 2, 2, 0.0);
            for (d, k) in [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3)] {
                add(BpIdentity::Linear, d, k, k, 0.0);
            }
            for (k, m, r0) in [(1, 1, 0.0), (1, 1, 0.7), (2, 1, 0.0), (2, 2, 0.0)] {
                add(BpIdentity::Subsphere, 2, k, m, r0);
            }
        }
    }
    let mut cases = Vec::new();
    for (identity, d, k, m, r0) in shapes {
        for &f in &fs {
            let c = BpCase { identity, d, k, m, r0, f };
            if c.supported() {
                cases.push(c);
            }
        }
    }
    cases
}

fn run_bp(spec: &ExperimentSpec, notes: &mut Vec<String>) -> Result<Output> {
    let n = spec.replicates();
    let mut checks = Checks::default();
    if n == 0 {
        notes.push("no data".into());
        return Ok(checks.finish());
    }
    let base = base_seed(spec).substream(TAG_CHECK);
    for (i, case) in bp_cases(spec).iter().enumerate() {
        let rep = case.run(n, base.substream(i as u64))?;
        checks.push(
            &case.name(),
            &[
                ("lhs", rep.lhs),
                ("lhs_se", rep.lhs_se),
                ("rhs", rep.rhs),
                ("rhs_se", rep.rhs_se),
                ("exact_lhs", rep.exact_lhs),
                ("z_score", rep.z_score),
                ("z_exact", rep.z_exact()),
            ],
            rep.z_score.abs() <= 3.0,
            to_value(case),
        );
    }
    Ok(checks.finish())
}

/// Mecke test functions of a mecke-check spec.
pub fn mecke_cases(spec: &ExperimentSpec) -> Vec<(&'static str, MeckeTestFn)> {
    let r = spec.radius.unwrap_or(0.1);
    let all = [
        ("unit_square", MeckeTestFn::UnitSquare),
        ("isolated", MeckeTestFn::IsolatedInUnitSquare { radius: r }),
        ("pair", MeckeTestFn::PairWithin { radius: r }),
    ];
    match spec.mecke_fn.unwrap_or(MeckeCase::All) {
        MeckeCase::All => all.to_vec(),
        MeckeCase::UnitSquare => vec![all[0]],
        MeckeCase::Isolated => vec![all[1]],
        MeckeCase::Pair => vec![all[2]],
    }
}

fn run_mecke(spec: &ExperimentSpec, notes: &mut Vec<String>) -> Result<Output> {
    let n = spec.replicates();
    let mut checks = Checks::default();
    if n == 0 {
        notes.push("no data".into());
        return Ok(checks.finish());
    }
    let base = base_seed(spec).substream(TAG_CHECK);
    for (i, (name, f)) in mecke_cases(spec).into_iter().enumerate() {
        let rep = verify_mecke(spec.gamma(), f, n, base.substream(i as u64))?;
        checks.push(
            name,
            &[
                ("lhs", rep.lhs),
                ("lhs_se", rep.lhs_se),
                ("rhs", rep.rhs),
                ("rhs_se", rep.rhs_se),
                ("exact_rhs", rep.exact_rhs),
                ("z", rep.z),
            ],
            rep.z <= 3.0,
            json!({ "test_fn": to_value(&f) }),
        );
    }
    Ok(checks.finish())
}

fn run_lemma(spec: &ExperimentSpec, notes: &mut Vec<String>) -> Result<Output> {
    let n = spec.replicates();
    let mut checks = Checks::default();
    if n == 0 {
        notes.push("no data".into());
        return Ok(checks.finish());
    }
    let seed = base_seed(spec).substream(TAG_CHECK);
    match spec.lemma.unwrap_or(LemmaCase::Xa) {
        LemmaCase::Xa => {
            let d = spec.d.unwrap_or(2);
            let rep = verify_lemma_xa(d, n, seed)?;
            checks.push(
                &format!("xa_d{d}"),
                &[
                    ("samples", rep.samples as f64),
                    ("violations", rep.violations as f64),
                    ("min_slack", rep.min_slack),
                    ("slack_at_origin", unit_ball_difference(d, 0.0) - lemma_lower_bound(d, 0.0)),
                    ("lhs_at_unit", unit_ball_difference(d, 1.0)),
                    ("rhs_at_unit", lemma_lower_bound(d, 1.0)),
                ],
                rep.violations == 0,
                Value::Null,
            );
        }
        LemmaCase::Overlap => {
            let rep = check_overlap_bound_delaunay(n, seed);
            checks.push(
                "overlap",
                &[
                    ("samples", rep.samples as f64),
                    ("admissible", rep.admissible as f64),
                    ("generation_failures", rep.generation_failures as f64),
                    ("violations", rep.violations as f64),
                    ("max_ratio", rep.max_ratio),
                    ("bound_ratio", rep.bound_ratio),
                ],
                rep.violations == 0,
                Value::Null,
            );
        }
        LemmaCase::Pair => {
            let ms = MosaicSpec::new(
                MosaicKind::Voronoi,
                spec.gamma(),
                spec.t.unwrap_or(400.0),
                spec.c.unwrap_or(1.0),
                SizeFunctional::CenteredInradius,
            );
            let threshold = calibrate_v_t_exact(&ms)?;
            let config = PairBoundConfig { eps: spec.eps.unwrap_or(0.3), ..PairBoundConfig::default() };
            let rep = check_pair_bound_voronoi(&ms, &threshold, n, seed, &config)?;
            for row in &rep.rows {
                checks.push(
                    &format!("pair_distance_{}", row.distance),
                    &[
                        ("distance", row.distance),
                        ("samples", row.samples as f64),
                        ("hits", row.hits as f64),
                        ("lhs", row.lhs),
                        ("se", row.se),
                        ("rhs", row.rhs),
                    ],
                    row.lhs - 3.0 * row.se <= row.rhs,
                    json!({ "v": rep.v, "eps": rep.eps, "a": rep.a, "tau": rep.tau }),
                );
            }
        }
    }
    Ok(checks.finish())
}
