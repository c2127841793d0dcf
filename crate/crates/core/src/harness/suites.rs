use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::report::{digest_values, CaseRecord, Check, Summary};
use crate::commutator::{
    antisymmetric_paraproduct, atomic_decompose, bilinear_decomposition, commutator_apply,
    fractional_commutator_decomposition, h1b_characterizations, make_qb_atom, molecule_norm, subbilinear_envelope,
    SANDWICH_SLACK,
};
use crate::czo::{
    fit_envelope, k_class_term, operator_by_name, p_delta, pdelta_composition_check, wavelet_matrix, AreaIntegral,
    MultiplierOperator, Operator,
};
use crate::dyadic_wavelet::{analyze, synthesize, wavelet_square_function, CoefficientTree, DyadicCube, WaveletBasis};
use crate::error::Result;
use crate::grid::SampledFunction;
use crate::paraproduct::{paraproducts_of, s_operator};
use crate::sampling::{derive_seed, random_bmo, random_classical_atom, random_psi_atom, rng_for, truncated_log, two_sided_atom};
use crate::spaces::{bmo_norm, h1_square};

pub(crate) struct Outcome {
    pub cases: Vec<CaseRecord>,
    pub summary: Summary,
}

/// Independent stream for `(purpose, sample)`; the resolution never enters,
/// so the same sample index draws the same object at every `N`.
fn stream(cfg: &ExperimentConfig, purpose: u64, sample: usize) -> ChaCha8Rng {
    rng_for(derive_seed(cfg.root_seed, purpose), sample as u64)
}

fn noise(dim: usize, level: u32, rng: &mut ChaCha8Rng) -> SampledFunction {
    let n = 1usize << (level as usize * dim);
    let v = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    SampledFunction::new(dim, level, v).expect("sized to the grid")
}

fn finite(v: f64) -> bool {
    v.is_finite()
}

fn record(
    label: &str,
    f_like: &SampledFunction,
    sample: usize,
    inputs: &[&[f64]],
    values: Vec<(&str, f64)>,
    pass: bool,
) -> CaseRecord {
    let resolution = f_like.side();
    CaseRecord {
        case_id: format!("{label}/N{resolution}/s{sample}"),
        resolution,
        sample,
        label: label.to_string(),
        inputs_digest: digest_values(inputs),
        values: values.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        pass,
    }
}

/// `(dim, level)` pairs from both resolution lists.
fn grids(cfg: &ExperimentConfig) -> Vec<(usize, u32)> {
    let mut g: Vec<(usize, u32)> = cfg.levels().into_iter().map(|l| (1, l)).collect();
    g.extend(cfg.levels_2d().into_iter().map(|l| (2, l)));
    g
}

fn run_jobs<J: Sync, F>(jobs: &[J], f: F) -> Result<Vec<CaseRecord>>
where
    F: Fn(&J) -> Result<CaseRecord> + Sync + Send,
{
    jobs.par_iter().map(f).collect()
}

fn max_value(cases: &[CaseRecord], key: &str) -> f64 {
    let mut m = f64::NAN;
    for c in cases {
        if let Some(&v) = c.values.get(key) {
            if v.is_nan() {
                return f64::NAN;
            }
            m = if m.is_nan() { v } else { m.max(v) };
        }
    }
    m
}

/// Per-resolution aggregate of `key` over cases with `label`, ascending `N`.
fn per_resolution(cases: &[CaseRecord], label: &str, key: &str, agg: impl Fn(&[f64]) -> f64) -> Vec<(usize, f64)> {
    let mut by: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for c in cases.iter().filter(|c| c.label == label) {
        by.entry(c.resolution).or_default().push(c.value(key));
    }
    by.into_iter().map(|(n, v)| (n, agg(&v))).collect()
}

fn sup(v: &[f64]) -> f64 {
    if v.iter().any(|x| x.is_nan()) {
        return f64::NAN;
    }
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `max/min` of a sample; NaN when any entry is missing or non-positive.
fn band_width(v: &[f64]) -> f64 {
    if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return f64::NAN;
    }
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

fn drift_ratio(a: f64, b: f64) -> f64 {
    if a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() {
        (a / b).max(b / a)
    } else if a == 0.0 && b == 0.0 {
        1.0
    } else {
        f64::NAN
    }
}

/// Records the fitted values and asserts finiteness and drift `< limit`
/// between consecutive entries.
fn drift_checks(summary: &mut Summary, name: &str, fitted: &[(String, f64)], limit: f64) {
    for (tag, v) in fitted {
        summary.fitted.insert(format!("{name}@{tag}"), *v);
        summary.checks.push(Check::holds(format!("{name}@{tag}:finite"), v.is_finite()));
    }
    if fitted.len() < 2 {
        summary.checks.push(Check::holds(format!("{name}:two_points"), false));
        summary.notes.push(format!("{name}: drift needs at least two resolutions or ranges"));
        return;
    }
    for w in fitted.windows(2) {
        let d = drift_ratio(w[0].1, w[1].1);
        let key = format!("{name}@{}->{}", w[0].0, w[1].0);
        summary.drift.insert(key.clone(), d);
        summary.checks.push(Check::new(key, d, "<", limit));
    }
}

fn drift_by_resolution(summary: &mut Summary, cases: &[CaseRecord], label: &str, key: &str, limit: f64) {
    let fitted: Vec<(String, f64)> =
        per_resolution(cases, label, key, sup).into_iter().map(|(n, v)| (format!("N{n}"), v)).collect();
    drift_checks(summary, &format!("{label}:{key}"), &fitted, limit);
}

fn outcome(cases: Vec<CaseRecord>, summary: Summary) -> Outcome {
    Outcome { cases, summary }
}

fn base_summary(cases: &[CaseRecord]) -> Summary {
    Summary { max_residual: max_value(cases, "residual"), ..Summary::default() }
}

fn psi_function(dim: usize, j0: u32, level: u32, basis: &WaveletBasis, rng: &mut ChaCha8Rng) -> Result<SampledFunction> {
    let (tree, _) = random_psi_atom(dim, j0, level, rng)?;
    synthesize(&tree, basis)
}

pub(crate) fn reconstruction(cfg: &ExperimentConfig) -> Result<Outcome> {
    let tol = cfg.tolerance("reconstruction", 1e-10);
    let mut jobs = Vec::new();
    for b in cfg.all_bases() {
        let basis = b.build()?;
        for &(dim, level) in &grids(cfg) {
            for s in 0..cfg.sample_count {
                jobs.push((b.label(), basis.clone(), dim, level, s));
            }
        }
    }
    let cases = run_jobs(&jobs, |(name, basis, dim, level, s)| {
        let f = noise(*dim, *level, &mut stream(cfg, 1, *s));
        let back = synthesize(&analyze(&f, basis, cfg.coarse_level)?, basis)?;
        let err = back.sub(&f).sup_norm();
        let rel = err / f.sup_norm();
        let label = format!("{name}:{dim}d");
        Ok(record(&label, &f, *s, &[f.values()], vec![("residual", rel), ("err_inf", err), ("f_inf", f.sup_norm())], rel <= tol))
    })?;
    let summary = base_summary(&cases);
    Ok(outcome(cases, summary))
}

pub(crate) fn product_identity(cfg: &ExperimentConfig) -> Result<Outcome> {
    let basis = cfg.basis.build()?;
    let tol = cfg.tolerance("product", 1e-8);
    let jobs: Vec<(usize, u32, usize)> =
        grids(cfg).into_iter().flat_map(|(d, l)| (0..cfg.sample_count).map(move |s| (d, l, s))).collect();
    let cases = run_jobs(&jobs, |&(dim, level, s)| {
        let f = noise(dim, level, &mut stream(cfg, 2, s));
        let g = random_bmo(dim, level, &mut stream(cfg, 3, s));
        let d = paraproducts_of(&f, &g, &basis, cfg.coarse_level)?;
        let fg_inf = f.mul(&g).sup_norm();
        let rel = d.residual_inf / (1.0 + fg_inf);
        let s_sum = d.summary();
        Ok(record(
            &format!("{dim}d"),
            &f,
            s,
            &[f.values(), g.values()],
            vec![
                ("residual", rel),
                ("residual_inf", d.residual_inf),
                ("fg_inf", fg_inf),
                ("pi1_l1", s_sum.pi1_l1),
                ("pi2_l1", s_sum.pi2_l1),
                ("pi3_l1", s_sum.pi3_l1),
                ("pi4_l1", s_sum.pi4_l1),
                ("coarse_l1", s_sum.coarse_l1),
            ],
            rel <= tol,
        ))
    })?;
    let summary = base_summary(&cases);
    Ok(outcome(cases, summary))
}

/// Operators exercised by the bilinear identity in each dimension.
pub const IDENTITY_OPERATORS_1D: &[&str] = &["hilbert", "fractional:0.5"];
pub const IDENTITY_OPERATORS_2D: &[&str] = &["riesz1"];

pub(crate) fn commutator_identity(cfg: &ExperimentConfig) -> Result<Outcome> {
    let basis = cfg.basis.build()?;
    let tol = cfg.tolerance("identity", 1e-8);
    let mut jobs = Vec::new();
    for (dim, level) in grids(cfg) {
        let ops = if dim == 1 { IDENTITY_OPERATORS_1D } else { IDENTITY_OPERATORS_2D };
        for name in ops {
            for s in 0..cfg.sample_count {
                jobs.push((*name, dim, level, s));
            }
        }
    }
    let cases = run_jobs(&jobs, |&(name, dim, level, s)| {
        let op = operator_by_name(name, dim)?;
        let f = psi_function(dim, cfg.coarse_level, level, &basis, &mut stream(cfg, 4, s))?;
        let b = random_bmo(dim, level, &mut stream(cfg, 5, s));
        let d = bilinear_decomposition(&b, &op, &f, &basis, cfg.coarse_level)?;
        let rel = d.relative_residual();
        let sm = d.summary();
        Ok(record(
            &format!("{name}:{dim}d"),
            &f,
            s,
            &[f.values(), b.values()],
            vec![
                ("residual", rel),
                ("residual_inf", sm.residual_inf),
                ("commutator_inf", sm.commutator_inf),
                ("commutator_l1", sm.commutator_l1),
                ("r_part_l1", sm.r_part_l1),
                ("s_image_l1", sm.s_image_l1),
            ],
            rel <= tol,
        ))
    })?;
    let summary = base_summary(&cases);
    Ok(outcome(cases, summary))
}

pub const SANDWICH_OPERATORS: &[&str] = &["maximal", "area"];

pub(crate) fn sandwich(cfg: &ExperimentConfig) -> Result<Outcome> {
    let basis = cfg.basis.build()?;
    let rel_slack = cfg.tolerance("sandwich", SANDWICH_SLACK);
    let mut jobs = Vec::new();
    for (dim, level) in grids(cfg) {
        for name in SANDWICH_OPERATORS {
            for s in 0..cfg.sample_count {
                jobs.push((*name, dim, level, s));
            }
        }
    }
    // Each case already parallelizes over grid points.
    let cases = jobs
        .iter()
        .map(|&(name, dim, level, s)| {
            let op = operator_by_name(name, dim)?;
            let f = psi_function(dim, cfg.coarse_level, level, &basis, &mut stream(cfg, 4, s))?;
            let b = random_bmo(dim, level, &mut stream(cfg, 5, s));
            let env = subbilinear_envelope(&b, &op, &f, &basis, cfg.coarse_level)?;
            let slack = env.slack / SANDWICH_SLACK * rel_slack;
            let base = h1_square(&f, &basis, cfg.coarse_level)? * bmo_norm(&b);
            let pass = env.lower_gap <= slack && env.upper_gap <= slack;
            Ok(record(
                &format!("{name}:{dim}d"),
                &f,
                s,
                &[f.values(), b.values()],
                vec![
                    ("lower_gap", env.lower_gap),
                    ("upper_gap", env.upper_gap),
                    ("slack", slack),
                    ("r_env_ratio", env.r_env.l1_norm() / base),
                    ("commutator_l1", env.commutator.l1_norm()),
                    ("s_image_l1", env.s_image.l1_norm()),
                ],
                pass,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut summary = base_summary(&cases);
    let mut dims: Vec<usize> = grids(cfg).iter().map(|g| g.0).collect();
    dims.dedup();
    for name in SANDWICH_OPERATORS {
        for &dim in &dims {
            let label = format!("{name}:{dim}d");
            for (n, v) in per_resolution(&cases, &label, "r_env_ratio", sup) {
                summary.fitted.insert(format!("{label}:r_env_ratio@N{n}"), v);
            }
        }
    }
    Ok(outcome(cases, summary))
}

/// Fixed BMO functions against which every class-𝒦 atom is tested.
pub const KCLASS_B_COUNT: usize = 8;

pub const BOUNDEDNESS_KEYS: &[&str] = &["s_ratio", "r_ratio", "kclass_hilbert", "kclass_area", "pi4_ratio", "anti_ratio"];

pub(crate) fn boundedness_sweep(cfg: &ExperimentConfig) -> Result<Outcome> {
    let basis = cfg.basis.build()?;
    let j0 = cfg.coarse_level;
    let limit = cfg.tolerance("drift", 2.0);
    let mut cases = Vec::new();
    for (dim, level) in grids(cfg) {
        let bs: Vec<SampledFunction> =
            (0..KCLASS_B_COUNT).map(|j| random_bmo(dim, level, &mut stream(cfg, 7, j))).collect();
        let cz = if dim == 1 { MultiplierOperator::hilbert() } else { MultiplierOperator::riesz(0) };
        let area = AreaIntegral::default();
        let samples: Vec<usize> = (0..cfg.sample_count).collect();
        let mut part = run_jobs(&samples, |&s| {
            let f = psi_function(dim, j0, level, &basis, &mut stream(cfg, 4, s))?;
            let b = random_bmo(dim, level, &mut stream(cfg, 5, s));
            let base = h1_square(&f, &basis, j0)? * bmo_norm(&b);
            let (tf, tb) = (analyze(&f, &basis, j0)?, analyze(&b, &basis, j0)?);
            let s_part = s_operator(&tf, &tb, &basis)?;
            let dec = bilinear_decomposition(&b, &cz, &f, &basis, j0)?;
            let pi4 = crate::paraproduct::pi4(&tf, &tb, &basis)?;
            let anti = antisymmetric_paraproduct(&f, &b, &cz, &basis, j0)?;
            let (a, q) = random_classical_atom(dim, level, &mut stream(cfg, 6, s));
            let cells = q.cells(level);
            let (ha, sa) = (cz.apply(&a)?, area.apply(&a)?);
            let kh = bs.iter().map(|b| k_class_term(&ha, b, &cells)).fold(0.0, f64::max);
            let ks = bs.iter().map(|b| k_class_term(&sa, b, &cells)).fold(0.0, f64::max);
            let values = vec![
                ("s_ratio", s_part.l1_norm() / base),
                ("r_ratio", dec.r_part.l1_norm() / base),
                ("kclass_hilbert", kh),
                ("kclass_area", ks),
                ("pi4_ratio", h1_square(&pi4, &basis, j0)? / base),
                ("anti_ratio", anti.h1_square / base),
                ("base", base),
            ];
            let pass = values.iter().all(|(_, v)| finite(*v));
            Ok(record(&format!("{dim}d"), &f, s, &[f.values(), b.values(), a.values()], values, pass))
        })?;
        cases.append(&mut part);
    }
    let mut summary = base_summary(&cases);
    let labels: Vec<String> = {
        let mut l: Vec<String> = grids(cfg).iter().map(|(d, _)| format!("{d}d")).collect();
        l.dedup();
        l
    };
    for label in &labels {
        for key in BOUNDEDNESS_KEYS {
            drift_by_resolution(&mut summary, &cases, label, key, limit);
        }
    }
    Ok(outcome(cases, summary))
}

pub const H1B_RATIOS: &[&str] = &["ratio_square_riesz", "ratio_square_t", "ratio_riesz_t"];
/// Atoms per combination in the equivalence suite.
pub const H1B_ATOMS: usize = 3;

fn random_cube(dim: usize, rng: &mut ChaCha8Rng) -> Result<DyadicCube> {
    let level = rng.random_range(2..=4u32);
    let side = 1u32 << level;
    let off: Vec<u32> = (0..dim).map(|_| rng.random_range(0..side)).collect();
    DyadicCube::new(dim, level, &off)
}

pub(crate) fn h1b_equivalence(cfg: &ExperimentConfig) -> Result<Outcome> {
    let basis = cfg.basis.build()?;
    let j0 = cfg.coarse_level;
    let limit = cfg.tolerance("drift", 2.0);
    let q = cfg.tolerance("atom_q", 2.0);
    let area = AreaIntegral::default();
    let mut jobs = Vec::new();
    for (dim, level) in grids(cfg) {
        for s in 0..cfg.sample_count {
            for single in [false, true] {
                jobs.push((dim, level, s, single));
            }
        }
    }
    let cases = jobs
        .iter()
        .map(|&(dim, level, s, single)| {
            let b = random_bmo(dim, level, &mut stream(cfg, 8, s));
            let mut rng = stream(cfg, 9, s);
            let count = if single { 1 } else { H1B_ATOMS };
            let mut f = SampledFunction::zeros(dim, level);
            for i in 0..count {
                let cube = random_cube(dim, &mut rng)?;
                let c: f64 = if single { 1.0 } else { rng.random_range(-1.0..1.0) };
                let a = make_qb_atom(&cube, &b, q, derive_seed(cfg.root_seed ^ s as u64, i as u64))?;
                f.add_assign(&a.scale(c));
            }
            let r = h1b_characterizations(&f, &b, &basis, j0, Some(&area))?;
            let bmo = bmo_norm(&b);
            let nan = f64::NAN;
            let values = vec![
                ("v_maximal", r.v_maximal),
                ("v_square", r.v_square),
                ("v_riesz", r.v_riesz),
                ("v_t", r.v_t),
                ("base", r.base),
                ("norm", r.norm),
                ("norm_over_bmo", r.norm / bmo),
                ("ratio_square_riesz", r.ratio_square_riesz.unwrap_or(nan)),
                ("ratio_square_t", r.ratio_square_t.unwrap_or(nan)),
                ("ratio_riesz_t", r.ratio_riesz_t.unwrap_or(nan)),
            ];
            let pass = values.iter().all(|(_, v)| finite(*v));
            let label = format!("{}:{dim}d", if single { "single" } else { "combination" });
            Ok(record(&label, &f, s, &[f.values(), b.values()], values, pass))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut summary = base_summary(&cases);
    let mut dims: Vec<usize> = grids(cfg).iter().map(|g| g.0).collect();
    dims.dedup();
    for dim in dims {
        let label = format!("combination:{dim}d");
        for key in H1B_RATIOS {
            let widths: Vec<(String, f64)> = per_resolution(&cases, &label, key, band_width)
                .into_iter()
                .map(|(n, v)| (format!("N{n}"), v))
                .collect();
            drift_checks(&mut summary, &format!("{label}:{key}:band_width"), &widths, limit);
        }
        drift_by_resolution(&mut summary, &cases, &format!("single:{dim}d"), "norm_over_bmo", limit);
    }
    Ok(outcome(cases, summary))
}

/// Atom widths `2^{-k}` of the unboundedness probe.
pub const PROBE_EXPONENTS: std::ops::RangeInclusive<i32> = 3..=7;

pub(crate) fn unboundedness_probe(cfg: &ExperimentConfig) -> Result<Outcome> {
    let basis = cfg.basis.build()?;
    let j0 = cfg.coarse_level;
    let tau = cfg.tolerance("log_truncation", 2f64.powi(-12));
    let h = MultiplierOperator::hilbert();
    let mut jobs = Vec::new();
    for level in cfg.levels() {
        for k in PROBE_EXPONENTS {
            jobs.push((level, k));
        }
    }
    let cases = run_jobs(&jobs, |&(level, k)| {
        let b = truncated_log(1, level, [0.0, 0.0], tau);
        let r = 2f64.powi(-k);
        let a = two_sided_atom(level, r);
        let comm = commutator_apply(&b, &h, &a, false)?;
        let h1 = h1_square(&a, &basis, j0)?;
        let ratio = comm.l1_norm() / h1;
        Ok(record(
            "probe",
            &a,
            k as usize,
            &[b.values(), a.values()],
            vec![("r", r), ("commutator_l1", comm.l1_norm()), ("h1", h1), ("ratio", ratio)],
            finite(ratio),
        ))
    })?;
    let mut summary = base_summary(&cases);
    for level in cfg.levels() {
        let n = 1usize << level;
        let mut row: Vec<&CaseRecord> = cases.iter().filter(|c| c.resolution == n).collect();
        row.sort_by(|a, b| b.value("r").total_cmp(&a.value("r")));
        for w in row.windows(2) {
            summary.checks.push(Check::new(
                format!("ratio@N{n}:r={}>r={}", w[1].value("r"), w[0].value("r")),
                w[1].value("ratio") - w[0].value("ratio"),
                ">",
                0.0,
            ));
        }
        if let (Some(first), Some(last)) = (row.first(), row.last()) {
            summary.fitted.insert(format!("growth@N{n}"), last.value("ratio") / first.value("ratio"));
        }
    }
    summary.notes.push("ratio = ‖[b,H]a_r‖_1 / H1_square(a_r); growth as r decreases is the pass condition".into());
    Ok(outcome(cases, summary))
}

/// Random `p_δ` pairs checked against the closed form.
pub const PDELTA_PAIRS: usize = 1000;
pub const COMPOSITION_SAMPLES: usize = 200;

/// `p_δ` written out from coordinates, without the cube helpers.
fn p_delta_closed_form(dim: usize, j: u32, k: &[u32], jp: u32, kp: &[u32], delta: f64) -> f64 {
    let n = dim as f64;
    let (h, hp) = (0.5f64.powi(j as i32), 0.5f64.powi(jp as i32));
    let mut d2 = 0.0;
    for a in 0..dim {
        let x = (k[a] as f64 + 0.5) * h;
        let y = (kp[a] as f64 + 0.5) * hp;
        let mut t = (x - y).abs();
        t = t.min(1.0 - t);
        d2 += t * t;
    }
    let dj = j.abs_diff(jp) as f64;
    let decay = (-(dj * (delta + n) / 2.0) * std::f64::consts::LN_2).exp() / (1.0 + dj * dj);
    let s = h + hp;
    decay * ((n + delta / 2.0) * (s / (s + d2.sqrt())).ln()).exp()
}

pub(crate) fn almost_diagonal(cfg: &ExperimentConfig) -> Result<Outcome> {
    let basis = cfg.basis.build()?;
    let j0 = cfg.coarse_level;
    let limit = cfg.tolerance("drift", 2.0);
    let tol = cfg.tolerance("pdelta", 1e-14);
    let delta = cfg.tolerance("delta", 1.0);
    let pairs: Vec<usize> = (0..PDELTA_PAIRS).collect();
    let unit = SampledFunction::zeros(1, 0);
    let mut cases = run_jobs(&pairs, |&s| {
        let mut rng = stream(cfg, 20, s);
        let dim = rng.random_range(1..=2usize);
        let d: f64 = 1.0 - rng.random::<f64>();
        let draw = |rng: &mut ChaCha8Rng| {
            let j = rng.random_range(0..=8u32);
            let k: Vec<u32> = (0..dim).map(|_| rng.random_range(0..1u32 << j)).collect();
            (j, k)
        };
        let ((j, k), (jp, kp)) = (draw(&mut rng), draw(&mut rng));
        let got = p_delta(&DyadicCube::new(dim, j, &k)?, &DyadicCube::new(dim, jp, &kp)?, d)?;
        let want = p_delta_closed_form(dim, j, &k, jp, &kp, d);
        let rel = (got - want).abs() / want;
        let coords: Vec<f64> = [dim as u32, j, jp].iter().chain(&k).chain(&kp).map(|&v| v as f64).collect();
        let mut c = record("pdelta", &unit, s, &[&coords, &[d]], vec![("residual", rel), ("p_delta", got), ("delta", d)], rel <= tol);
        c.resolution = 0;
        c.case_id = format!("pdelta/s{s}");
        Ok(c)
    })?;
    let mut summary = base_summary(&cases);

    let big_j = cfg.levels().into_iter().max().expect("validated");
    let ranges_1d = [(j0, big_j - 2), (j0, big_j - 1)];
    let ranges_2d = [(j0, 4), (j0, 5)];
    let mut comp = Vec::new();
    for (dim, ranges) in [(1usize, ranges_1d), (2, ranges_2d)] {
        let mut fitted = Vec::new();
        for (lo, hi) in ranges {
            let v = pdelta_composition_check(dim, (lo, hi), delta, COMPOSITION_SAMPLES, derive_seed(cfg.root_seed, 21))?;
            fitted.push((format!("{lo}-{hi}"), v));
            let mut c = record(&format!("composition:{dim}d"), &unit, hi as usize, &[&[lo as f64, hi as f64, delta]], vec![("max_ratio", v)], finite(v));
            c.resolution = 0;
            c.case_id = format!("composition:{dim}d/{lo}-{hi}");
            comp.push(c);
        }
        drift_checks(&mut summary, &format!("composition:{dim}d"), &fitted, limit);
    }

    let h = MultiplierOperator::hilbert();
    let mut fitted = Vec::new();
    for (lo, hi) in ranges_1d {
        let m = wavelet_matrix(&h, &basis, 1, big_j, (lo, hi))?;
        let env = fit_envelope(&m, delta)?;
        fitted.push((format!("{lo}-{hi}"), env.fitted_c));
        let mut c = record(
            "hilbert_envelope",
            &unit,
            hi as usize,
            &[&[lo as f64, hi as f64, delta, big_j as f64]],
            vec![("fitted_c", env.fitted_c), ("entries", m.entries().len() as f64)],
            finite(env.fitted_c),
        );
        c.resolution = 1 << big_j;
        c.case_id = format!("hilbert_envelope/N{}/{lo}-{hi}", 1usize << big_j);
        if let Some((r, col)) = env.worst_pair {
            summary.notes.push(format!("hilbert envelope {lo}-{hi}: worst pair {r} / {col}"));
        }
        comp.push(c);
    }
    drift_checks(&mut summary, "hilbert_envelope", &fitted, limit);
    cases.append(&mut comp);
    Ok(outcome(cases, summary))
}

pub const MOLECULE_EPSILON: f64 = 0.25;

pub(crate) fn molecule(cfg: &ExperimentConfig) -> Result<Outcome> {
    let limit = cfg.tolerance("drift", 2.0);
    let eps = cfg.tolerance("epsilon", MOLECULE_EPSILON);
    let h = MultiplierOperator::hilbert();
    let commutator_samples = cfg.sample_count.div_ceil(2);
    let mut jobs = Vec::new();
    for level in cfg.levels() {
        jobs.extend((0..cfg.sample_count).map(|s| (level, s, false)));
        jobs.extend((0..commutator_samples).map(|s| (level, s, true)));
    }
    let cases = run_jobs(&jobs, |&(level, s, with_b)| {
        if !with_b {
            let (a, q) = random_classical_atom(1, level, &mut stream(cfg, 10, s));
            let m = molecule_norm(&a, eps, q.center())?;
            Ok(record("atom", &a, s, &[a.values()], vec![("molecule", m), ("q_level", q.level() as f64)], finite(m)))
        } else {
            let (a, q) = random_classical_atom(1, level, &mut stream(cfg, 11, s));
            let b = random_bmo(1, level, &mut stream(cfg, 12, s));
            let cells = q.cells(level);
            let bq = cells.iter().map(|&i| b.values()[i]).sum::<f64>() / cells.len() as f64;
            let mut g = b.map(|v| v - bq).mul(&h.apply(&a)?);
            let mean = g.integral();
            g = g.map(|v| v - mean);
            let m = molecule_norm(&g, eps, q.center())? / bmo_norm(&b);
            Ok(record("commutator", &a, s, &[a.values(), b.values()], vec![("molecule", m), ("removed_mean", mean)], finite(m)))
        }
    })?;
    let mut summary = base_summary(&cases);
    for label in ["atom", "commutator"] {
        drift_by_resolution(&mut summary, &cases, label, "molecule", limit);
    }
    Ok(outcome(cases, summary))
}

pub const FRACTIONAL_ALPHA: f64 = 0.5;

pub(crate) fn fractional(cfg: &ExperimentConfig) -> Result<Outcome> {
    let basis = cfg.basis.build()?;
    let j0 = cfg.coarse_level;
    let tol = cfg.tolerance("identity", 1e-8);
    let limit = cfg.tolerance("drift", 2.0);
    let alpha = cfg.tolerance("alpha", FRACTIONAL_ALPHA);
    let jobs: Vec<(usize, u32, usize)> =
        grids(cfg).into_iter().flat_map(|(d, l)| (0..cfg.sample_count).map(move |s| (d, l, s))).collect();
    let cases = run_jobs(&jobs, |&(dim, level, s)| {
        let f = psi_function(dim, j0, level, &basis, &mut stream(cfg, 4, s))?;
        let b = random_bmo(dim, level, &mut stream(cfg, 5, s));
        let rep = fractional_commutator_decomposition(&b, &f, alpha, &basis, j0)?;
        let base = h1_square(&f, &basis, j0)? * bmo_norm(&b);
        let rel = rep.decomposition.relative_residual();
        Ok(record(
            &format!("{dim}d"),
            &f,
            s,
            &[f.values(), b.values()],
            vec![
                ("residual", rel),
                ("p", rep.p),
                ("r_ratio", rep.r_part_lp / base),
                ("weak_ratio", rep.commutator_weak / base),
            ],
            rel <= tol && finite(rep.r_part_lp),
        ))
    })?;
    let mut summary = base_summary(&cases);
    let mut labels: Vec<String> = grids(cfg).iter().map(|(d, _)| format!("{d}d")).collect();
    labels.dedup();
    for label in labels {
        drift_by_resolution(&mut summary, &cases, &label, "r_ratio", limit);
        drift_by_resolution(&mut summary, &cases, &label, "weak_ratio", limit);
    }
    Ok(outcome(cases, summary))
}

/// Bound on `Σ|λ| / ‖𝒲f‖_1`.
pub const LAMBDA_BAND: f64 = 4.0;

fn random_atom_sum(dim: usize, j0: u32, level: u32, rng: &mut ChaCha8Rng) -> Result<CoefficientTree> {
    let mut tree = CoefficientTree::zeros(dim, j0, level)?;
    for _ in 0..rng.random_range(1..=3) {
        let c: f64 = rng.random_range(-1.0..1.0);
        let (a, _) = random_psi_atom(dim, j0, level, rng)?;
        tree.axpy(c, &a)?;
    }
    Ok(tree)
}

pub(crate) fn atomic_decomposition(cfg: &ExperimentConfig) -> Result<Outcome> {
    let basis = cfg.basis.build()?;
    let j0 = cfg.coarse_level;
    let tol = cfg.tolerance("reconstruction_atomic", 1e-8);
    let band = cfg.tolerance("lambda_band", LAMBDA_BAND);
    let jobs: Vec<(usize, u32, usize)> =
        grids(cfg).into_iter().flat_map(|(d, l)| (0..cfg.sample_count).map(move |s| (d, l, s))).collect();
    let cases = run_jobs(&jobs, |&(dim, level, s)| {
        let mut rng = stream(cfg, 13, s);
        // Even samples: sums of ψ-atoms; odd samples: the detail part of white noise.
        let tree = if s % 2 == 0 {
            random_atom_sum(dim, j0, level, &mut rng)?
        } else {
            analyze(&noise(dim, level, &mut rng), &basis, j0)?.details_only()
        };
        let f = synthesize(&tree, &basis)?;
        let dec = atomic_decompose(&tree, &basis)?;
        let err = dec.reconstruct(&tree, &basis)?.sub(&f).sup_norm() / f.sup_norm();
        let w1 = wavelet_square_function(&tree).l1_norm();
        let ratio = dec.sum_abs_lambda / w1;
        let valid = dec.all_valid();
        Ok(record(
            &format!("{}:{dim}d", if s % 2 == 0 { "atoms" } else { "noise" }),
            &f,
            s,
            &[f.values()],
            vec![
                ("residual", err),
                ("lambda_ratio", ratio),
                ("atoms", dec.atoms.len() as f64),
                ("valid", if valid { 1.0 } else { 0.0 }),
                ("coarse_flagged", if dec.coarse_flagged { 1.0 } else { 0.0 }),
            ],
            err <= tol && valid && ratio <= band,
        ))
    })?;
    let mut summary = base_summary(&cases);
    summary.fitted.insert("lambda_ratio".into(), max_value(&cases, "lambda_ratio"));
    Ok(outcome(cases, summary))
}
