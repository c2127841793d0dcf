//! Norm and quasinorm estimators for Lebesgue, BMO-type, Orlicz and Hardy
//! spaces on the torus, plus the `(q,b)`-atom validator.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::czo::maximal_function;
use crate::dyadic_wavelet::{analyze, synthesize, wavelet_square_function, DyadicCube, WaveletBasis};
use crate::error::{Error, Result};
use crate::grid::{torus_distance, SampledFunction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Space {
    Lp(f64),
    WeakLp(f64),
    Bmo,
    BmoPlus,
    BmoLocal,
    BmoLog,
    LLog,
    H1,
    H1Local,
    HLog,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Lp(p) if p.is_infinite() => write!(f, "Lp(inf)"),
            Space::Lp(p) => write!(f, "Lp({p})"),
            Space::WeakLp(p) => write!(f, "weakLp({p})"),
            Space::Bmo => write!(f, "BMO"),
            Space::BmoPlus => write!(f, "BMOplus"),
            Space::BmoLocal => write!(f, "bmo"),
            Space::BmoLog => write!(f, "BMOlog"),
            Space::LLog => write!(f, "Llog"),
            Space::H1 => write!(f, "H1"),
            Space::H1Local => write!(f, "h1"),
            Space::HLog => write!(f, "Hlog"),
        }
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let param = |prefix: &str| -> Option<Result<f64>> {
            let rest = s.strip_prefix(prefix)?.strip_suffix(')')?;
            Some(if rest == "inf" {
                Ok(f64::INFINITY)
            } else {
                rest.parse::<f64>().map_err(|_| Error::Config(format!("bad exponent in '{s}'")))
            })
        };
        if let Some(p) = param("Lp(") {
            return Ok(Space::Lp(p?));
        }
        if let Some(p) = param("weakLp(") {
            return Ok(Space::WeakLp(p?));
        }
        Ok(match s {
            "BMO" => Space::Bmo,
            "BMOplus" => Space::BmoPlus,
            "bmo" => Space::BmoLocal,
            "BMOlog" => Space::BmoLog,
            "Llog" => Space::LLog,
            "H1" | "H1_square" => Space::H1,
            "h1" => Space::H1Local,
            "Hlog" => Space::HLog,
            _ => {
                return Err(Error::Config(format!(
                    "unknown space '{s}'; valid: Lp(p), weakLp(p), BMO, BMOplus, bmo, BMOlog, Llog, H1, h1, Hlog"
                )))
            }
        })
    }
}

impl Serialize for Space {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Space {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub space: Space,
    pub value: f64,
    pub method: String,
    pub resolution: usize,
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("exponent p = {p} below 1")))
    }
}

pub fn lp_norm(f: &SampledFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    if p.is_infinite() {
        return Ok(f.sup_norm());
    }
    if p == 1.0 {
        return Ok(f.l1_norm());
    }
    // scale out the sup to avoid overflow for large p
    let m = f.sup_norm();
    if m == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = f.values().iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>() * f.cell_measure();
    Ok(m * s.powf(1.0 / p))
}

/// `sup_λ λ·|{|f| > λ}|^{1/p}`, attained as `λ ↑ v` at a sample value `v`.
pub fn weak_lp_quasinorm(f: &SampledFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    let mut v: Vec<f64> = f.values().iter().map(|x| x.abs()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    let h = f.cell_measure();
    let mut best: f64 = 0.0;
    let mut i = 0;
    while i < v.len() {
        // |{|f| ≥ v_i}| counts ties
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[i] {
            j += 1;
        }
        let measure = (j + 1) as f64 * h;
        let term = if p.is_infinite() { v[i] } else { v[i] * measure.powf(1.0 / p) };
        best = best.max(term);
        i = j + 1;
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OscillationMode {
    Bmo,
    BmoPlus,
    BmoLocal,
    BmoLog,
}

/// Cubes over which oscillation sups are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CubeFamily {
    /// Dyadic cubes at every level from the torus down to single cells.
    #[default]
    Dyadic,
    /// Every grid-aligned cube of dyadic side length, at any cell offset.
    Translated,
}

/// Per-level sup of mean oscillation; entry `j` is for side `2^{-j}`.
/// For [`OscillationMode::BmoLog`] each cube's oscillation carries its weight.
fn level_sups(f: &SampledFunction, family: CubeFamily, log_weight: bool) -> Vec<f64> {
    let dim = f.dim();
    let n = f.side();
    let levels = f.level();
    let v = f.values();
    let mut sups = Vec::with_capacity(levels as usize + 1);
    for j in 0..=levels {
        let side = n >> j;
        let starts: Vec<[usize; 2]> = match family {
            CubeFamily::Dyadic => (0..DyadicCube::count_at(dim, j))
                .map(|idx| {
                    let c = DyadicCube::from_index(dim, j, idx);
                    let o = c.offset();
                    if dim == 1 { [0, o[0] as usize * side] } else { [o[0] as usize * side, o[1] as usize * side] }
                })
                .collect(),
            CubeFamily::Translated => {
                if dim == 1 {
                    (0..n).map(|s| [0, s]).collect()
                } else {
                    (0..n * n).map(|s| [s / n, s % n]).collect()
                }
            }
        };
        let cells = |start: [usize; 2]| -> Vec<usize> {
            if dim == 1 {
                (0..side).map(|k| (start[1] + k) % n).collect()
            } else {
                let mut out = Vec::with_capacity(side * side);
                for a in 0..side {
                    for b in 0..side {
                        out.push(((start[0] + a) % n) * n + (start[1] + b) % n);
                    }
                }
                out
            }
        };
        let mut best: f64 = 0.0;
        for start in starts {
            let idx = cells(start);
            let m = idx.iter().map(|&i| v[i]).sum::<f64>() / idx.len() as f64;
            let osc = idx.iter().map(|&i| (v[i] - m).abs()).sum::<f64>() / idx.len() as f64;
            let w = if log_weight {
                let h = 1.0 / n as f64;
                let half = side as f64 * h / 2.0;
                let centre = if dim == 1 {
                    [start[1] as f64 * h + half, 0.0]
                } else {
                    [start[0] as f64 * h + half, start[1] as f64 * h + half]
                };
                j as f64 * std::f64::consts::LN_2 + (std::f64::consts::E + torus_distance(dim, &centre, &[0.0, 0.0])).ln()
            } else {
                1.0
            };
            best = best.max(w * osc);
        }
        sups.push(best);
    }
    sups
}

pub fn oscillation_norm(f: &SampledFunction, mode: OscillationMode) -> f64 {
    oscillation_norm_over(f, mode, CubeFamily::Dyadic)
}

pub fn oscillation_norm_over(f: &SampledFunction, mode: OscillationMode, family: CubeFamily) -> f64 {
    let log_weight = mode == OscillationMode::BmoLog;
    let sup = level_sups(f, family, log_weight).into_iter().fold(0.0, f64::max);
    match mode {
        OscillationMode::Bmo | OscillationMode::BmoLog => sup,
        OscillationMode::BmoPlus => sup + f.mean().abs(),
        // the only cube of measure ≥ 1 on the unit torus is the torus itself
        OscillationMode::BmoLocal => sup + f.l1_norm(),
    }
}

pub fn bmo_norm(f: &SampledFunction) -> f64 {
    oscillation_norm(f, OscillationMode::Bmo)
}

pub fn oscillation_report(f: &SampledFunction, mode: OscillationMode) -> NormReport {
    let (space, method) = match mode {
        OscillationMode::Bmo => (Space::Bmo, "sup over dyadic cubes of mean oscillation"),
        OscillationMode::BmoPlus => (Space::BmoPlus, "dyadic BMO sup + |mean over [0,1)^n|"),
        OscillationMode::BmoLocal => {
            (Space::BmoLocal, "dyadic BMO sup + mean of |f| over the torus (the only cube with |B| >= 1)")
        }
        OscillationMode::BmoLog => (Space::BmoLog, "dyadic sup of (j log 2 + log(e + |x_B|)) x mean oscillation"),
    };
    NormReport { space, value: oscillation_norm(f, mode), method: method.into(), resolution: f.side() }
}

fn llog_integral(f: &SampledFunction, lambda: f64) -> f64 {
    let dim = f.dim();
    let e = std::f64::consts::E;
    f.values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let u = v.abs() / lambda;
            if u == 0.0 {
                0.0
            } else {
                let x = f.point(i);
                u / ((e + torus_distance(dim, &x, &[0.0, 0.0])).ln() + (e + u).ln())
            }
        })
        .sum::<f64>()
        * f.cell_measure()
}

/// Luxemburg-type `L^log` quasinorm, by bisection in `log λ`.
pub fn llog_quasinorm(f: &SampledFunction) -> f64 {
    let m = f.sup_norm();
    if m == 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (m.ln() - 5.0, m.ln() + 5.0);
    while llog_integral(f, lo.exp()) < 1.0 {
        lo -= 5.0;
    }
    while llog_integral(f, hi.exp()) > 1.0 {
        hi += 5.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = llog_integral(f, mid.exp());
        if (v - 1.0).abs() < 1e-10 {
            return mid.exp();
        }
        if v > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

/// Defining integral of the `L^log` quasinorm at `λ`.
pub fn llog_defining_integral(f: &SampledFunction, lambda: f64) -> f64 {
    llog_integral(f, lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HardyMode {
    H1Square,
    H1Maximal,
    H1Local,
    HLog,
}

/// Hardy-type norm estimate.  `H1Square` needs a basis; its value adds the
/// `L¹` mass of the coarse scaling part, which is reported in `method`.
pub fn hardy_norm(f: &SampledFunction, mode: HardyMode, basis: Option<&WaveletBasis>, coarse_level: u32) -> Result<NormReport> {
    let resolution = f.side();
    Ok(match mode {
        HardyMode::H1Square => {
            let basis = basis.ok_or_else(|| Error::Config("H1_square needs a wavelet basis".into()))?;
            let tree = analyze(f, basis, coarse_level)?;
            let square = wavelet_square_function(&tree).l1_norm();
            let coarse = if tree.scaling().iter().all(|&v| v == 0.0) {
                0.0
            } else {
                synthesize(&tree.scaling_only(), basis)?.l1_norm()
            };
            NormReport {
                space: Space::H1,
                value: square + coarse,
                method: format!("wavelet square function L1 = {square:.6e}; coarse scaling part L1 = {coarse:.6e} (added)"),
                resolution,
            }
        }
        HardyMode::H1Maximal => NormReport {
            space: Space::H1,
            value: maximal_function(f, false)?.l1_norm(),
            method: "L1 norm of the grand maximal function".into(),
            resolution,
        },
        HardyMode::H1Local => NormReport {
            space: Space::H1Local,
            value: maximal_function(f, true)?.l1_norm(),
            method: "L1 norm of the local maximal function (t < 1)".into(),
            resolution,
        },
        HardyMode::HLog => NormReport {
            space: Space::HLog,
            value: llog_quasinorm(&maximal_function(f, false)?),
            method: "Llog quasinorm of the grand maximal function".into(),
            resolution,
        },
    })
}

/// `‖𝒲_ψ f‖_{L¹}` plus the coarse part mass.
pub fn h1_square(f: &SampledFunction, basis: &WaveletBasis, coarse_level: u32) -> Result<f64> {
    Ok(hardy_norm(f, HardyMode::H1Square, Some(basis), coarse_level)?.value)
}

/// Norm report for any [`Space`].
pub fn norm_report(f: &SampledFunction, space: Space, basis: &WaveletBasis, coarse_level: u32) -> Result<NormReport> {
    let r = |value: f64, method: &str| NormReport { space, value, method: method.into(), resolution: f.side() };
    Ok(match space {
        Space::Lp(p) => r(lp_norm(f, p)?, "Riemann sum"),
        Space::WeakLp(p) => r(weak_lp_quasinorm(f, p)?, "sup over the sorted-value lattice"),
        Space::Bmo => oscillation_report(f, OscillationMode::Bmo),
        Space::BmoPlus => oscillation_report(f, OscillationMode::BmoPlus),
        Space::BmoLocal => oscillation_report(f, OscillationMode::BmoLocal),
        Space::BmoLog => oscillation_report(f, OscillationMode::BmoLog),
        Space::LLog => r(llog_quasinorm(f), "bisection on the defining integral"),
        Space::H1 => hardy_norm(f, HardyMode::H1Square, Some(basis), coarse_level)?,
        Space::H1Local => hardy_norm(f, HardyMode::H1Local, None, coarse_level)?,
        Space::HLog => hardy_norm(f, HardyMode::HLog, None, coarse_level)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomDiagnostic {
    pub valid: bool,
    /// First failed clause: "support", "size" or "cancellation".
    pub failed_clause: Option<String>,
    pub outside_max: f64,
    pub lq_norm: f64,
    pub budget: f64,
    pub integral: f64,
    pub b_integral: Option<f64>,
}

pub const SUPPORT_TOL: f64 = 1e-12;
pub const CANCELLATION_TOL: f64 = 1e-10;

/// `L^q` norm of `f` restricted to the cells of `q_cube`.
pub(crate) fn lq_on(f: &SampledFunction, cells: &[usize], q: f64) -> f64 {
    let v = f.values();
    if q.is_infinite() {
        cells.iter().map(|&i| v[i].abs()).fold(0.0, f64::max)
    } else {
        (cells.iter().map(|&i| v[i].abs().powf(q)).sum::<f64>() * f.cell_measure()).powf(1.0 / q)
    }
}

/// Checks support in `Q`, `‖a‖_q ≤ |Q|^{1/q−1}`, `∫a = 0` and, if `b` is
/// given, `∫ab = 0`.
pub fn validate_atom(a: &SampledFunction, q_cube: &DyadicCube, q: f64, b: Option<&SampledFunction>) -> Result<AtomDiagnostic> {
    if !(q > 1.0) {
        return Err(Error::Domain(format!("atom exponent q = {q} must exceed 1")));
    }
    if q_cube.dim() != a.dim() || q_cube.level() > a.level() {
        return Err(Error::Shape(format!("cube {q_cube} not representable on the grid")));
    }
    if let Some(b) = b {
        a.check_shape(b)?;
    }
    let cells = q_cube.cells(a.level());
    let mut inside = vec![false; a.len()];
    cells.iter().for_each(|&i| inside[i] = true);
    let outside_max = a
        .values()
        .iter()
        .zip(&inside)
        .filter(|(_, &ins)| !ins)
        .map(|(v, _)| v.abs())
        .fold(0.0, f64::max);
    let lq_norm = lq_on(a, &cells, q);
    let budget = q_cube.measure().powf(1.0 / q - 1.0);
    let integral = a.integral();
    let b_integral = b.map(|b| a.inner(b));
    let failed_clause = if outside_max > SUPPORT_TOL {
        Some("support".to_string())
    } else if lq_norm > budget * (1.0 + 1e-10) {
        Some("size".to_string())
    } else if integral.abs() > CANCELLATION_TOL || b_integral.is_some_and(|v| v.abs() > CANCELLATION_TOL) {
        Some("cancellation".to_string())
    } else {
        None
    };
    Ok(AtomDiagnostic { valid: failed_clause.is_none(), failed_clause, outside_max, lq_norm, budget, integral, b_integral })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(dim: usize, level: u32, seed: u64) -> SampledFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = 1usize << (level as usize * dim);
        SampledFunction::new(dim, level, (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
    }

    #[test]
    fn lp_examples() {
        assert!((lp_norm(&SampledFunction::constant(1, 6, 1.0), 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(lp_norm(&SampledFunction::zeros(1, 2), 0.5), Err(Error::Domain(_))));
        let quarter = SampledFunction::from_fn(1, 8, |x| if x[0] < 0.25 { 1.0 } else { 0.0 });
        assert!((weak_lp_quasinorm(&quarter, 1.0).unwrap() - 0.25).abs() < 1e-15);
        for seed in 0..50 {
            let f = random(1, 7, seed);
            assert!(weak_lp_quasinorm(&f, 1.0).unwrap() <= lp_norm(&f, 1.0).unwrap() + 1e-15);
        }
    }

    #[test]
    fn oscillation_examples() {
        let c = SampledFunction::constant(1, 6, -2.5);
        assert_eq!(bmo_norm(&c), 0.0);
        assert!((oscillation_norm(&c, OscillationMode::BmoPlus) - 2.5).abs() < 1e-15);
        for seed in 0..50 {
            let f = random(1, 6, seed);
            assert!(bmo_norm(&f) <= oscillation_norm(&f, OscillationMode::BmoPlus));
        }
        // Haar step: oscillation 1 on the torus
        let step = SampledFunction::from_fn(1, 5, |x| if x[0] < 0.5 { 1.0 } else { -1.0 });
        assert!((bmo_norm(&step) - 1.0).abs() < 1e-15);
        assert!((oscillation_norm(&step, OscillationMode::BmoLocal) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bmo_of_log_is_resolution_stable() {
        let vals: Vec<f64> = [9u32, 10, 11]
            .iter()
            .map(|&j| {
                // cell midpoints keep the singular point off the grid
                let h = 2f64.powi(-(j as i32));
                bmo_norm(&SampledFunction::from_fn(1, j, |x| (torus_distance(1, &[x[0] + h / 2.0], &[0.0]) + 1e-4).ln()))
            })
            .collect();
        for w in vals.windows(2) {
            assert!((w[1] / w[0] - 1.0).abs() < 0.1, "{vals:?}");
        }
    }

    #[test]
    fn bmo_dilation_and_translation() {
        let f = random(1, 6, 42);
        // periodic dilation x ↦ 2x mod 1 onto the next level
        let dilated = SampledFunction::new(1, 7, (0..128).map(|i| f.values()[i % 64]).collect()).unwrap();
        assert!((bmo_norm(&dilated) - bmo_norm(&f)).abs() < 1e-10);
        let half = f.shifted([32, 0]);
        assert!((bmo_norm(&half) - bmo_norm(&f)).abs() < 1e-12);
        let g = random(2, 3, 7);
        for mode in [OscillationMode::Bmo, OscillationMode::BmoPlus, OscillationMode::BmoLocal] {
            let base = oscillation_norm_over(&g, mode, CubeFamily::Translated);
            let moved = oscillation_norm_over(&g.shifted([3, -2]), mode, CubeFamily::Translated);
            assert!((base - moved).abs() < 1e-12);
        }
    }

    #[test]
    fn bmolog_weights_whole_torus() {
        // a Haar step has osc 1 only at level 0, centre 1/2
        let step = SampledFunction::from_fn(1, 4, |x| if x[0] < 0.5 { 1.0 } else { -1.0 });
        let expected = (std::f64::consts::E + 0.5).ln();
        assert!((oscillation_norm(&step, OscillationMode::BmoLog) - expected).abs() < 1e-14);
    }

    #[test]
    fn llog_properties() {
        assert_eq!(llog_quasinorm(&SampledFunction::zeros(1, 5)), 0.0);
        for seed in 0..20 {
            let f = random(1, 7, seed).scale(1.0 + seed as f64);
            let lam = llog_quasinorm(&f);
            assert!((llog_defining_integral(&f, lam) - 1.0).abs() <= 1e-6);
            assert!(llog_quasinorm(&f.scale(2.0)) >= lam);
        }
    }

    #[test]
    fn hardy_modes() {
        let basis = WaveletBasis::daubechies(2).unwrap();
        for mode in [HardyMode::H1Square, HardyMode::H1Maximal, HardyMode::H1Local, HardyMode::HLog] {
            let r = hardy_norm(&SampledFunction::zeros(1, 6), mode, Some(&basis), 2).unwrap();
            assert_eq!(r.value, 0.0);
        }
        assert!(matches!(hardy_norm(&SampledFunction::zeros(1, 6), HardyMode::H1Square, None, 2), Err(Error::Config(_))));
        let f = random(1, 8, 3);
        let big = hardy_norm(&f, HardyMode::H1Maximal, None, 2).unwrap().value;
        assert!(hardy_norm(&f, HardyMode::H1Local, None, 2).unwrap().value <= big);
        assert!(hardy_norm(&f, HardyMode::HLog, None, 2).unwrap().value <= big);
    }

    #[test]
    fn atom_clauses() {
        let q_cube = DyadicCube::new(1, 2, &[1]).unwrap();
        let flat = SampledFunction::from_fn(1, 7, |x| if (0.25..0.5).contains(&x[0]) { 4.0 } else { 0.0 });
        let d = validate_atom(&flat, &q_cube, 2.0, None).unwrap();
        assert_eq!(d.failed_clause.as_deref(), Some("cancellation"));
        // Haar function on Q with ‖a‖_2 = |Q|^{-1/2}
        let haar = SampledFunction::from_fn(1, 7, |x| {
            if (0.25..0.375).contains(&x[0]) {
                4.0
            } else if (0.375..0.5).contains(&x[0]) {
                -4.0
            } else {
                0.0
            }
        });
        let d = validate_atom(&haar, &q_cube, 2.0, Some(&SampledFunction::zeros(1, 7))).unwrap();
        assert!(d.valid, "{d:?}");
        assert!((d.lq_norm - d.budget).abs() < 1e-12);
        let d = validate_atom(&haar.scale(1.01), &q_cube, 2.0, None).unwrap();
        assert_eq!(d.failed_clause.as_deref(), Some("size"));
        let d = validate_atom(&haar.shifted([1, 0]), &q_cube, 2.0, None).unwrap();
        assert_eq!(d.failed_clause.as_deref(), Some("support"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn homogeneity(seed in any::<u64>(), c in -4.0f64..4.0) {
            let f = random(1, 6, seed);
            let g = f.scale(c);
            for p in [1.0, 1.5, 2.0, f64::INFINITY] {
                prop_assert!((lp_norm(&g, p).unwrap() - c.abs() * lp_norm(&f, p).unwrap()).abs() < 1e-10);
                prop_assert!((weak_lp_quasinorm(&g, p).unwrap() - c.abs() * weak_lp_quasinorm(&f, p).unwrap()).abs() < 1e-10);
            }
            for mode in [OscillationMode::Bmo, OscillationMode::BmoPlus, OscillationMode::BmoLocal, OscillationMode::BmoLog] {
                prop_assert!((oscillation_norm(&g, mode) - c.abs() * oscillation_norm(&f, mode)).abs() < 1e-10);
            }
            let basis = WaveletBasis::haar();
            let h = h1_square(&g, &basis, 2).unwrap();
            prop_assert!((h - c.abs() * h1_square(&f, &basis, 2).unwrap()).abs() < 1e-10);
        }

        #[test]
        fn oscillation_vanishes_on_constants(c in -10.0f64..10.0, dim in 1usize..=2) {
            let f = SampledFunction::constant(dim, 3, c);
            for mode in [OscillationMode::Bmo, OscillationMode::BmoLog] {
                prop_assert!(oscillation_norm(&f, mode) < 1e-12);
            }
        }

        #[test]
        fn llog_monotone_in_scale(seed in any::<u64>(), c in 1.0f64..5.0) {
            let f = random(1, 6, seed);
            prop_assert!(llog_quasinorm(&f.scale(c)) >= llog_quasinorm(&f) * (1.0 - 1e-9));
        }

        #[test]
        fn translated_family_is_shift_invariant(seed in any::<u64>(), s in 0isize..64) {
            let f = random(1, 6, seed);
            let a = oscillation_norm_over(&f, OscillationMode::Bmo, CubeFamily::Translated);
            let b = oscillation_norm_over(&f.shifted([s, 0]), OscillationMode::Bmo, CubeFamily::Translated);
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
