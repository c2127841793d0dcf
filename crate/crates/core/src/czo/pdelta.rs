use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::WaveletMatrix;
use super::multiplier::{OperatorKind, OperatorSpec};
use crate::dyadic_wavelet::{CoeffKey, DyadicCube};
use crate::error::{Error, Result};
use crate::grid::torus_distance;

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("δ = {delta} outside (0,1]")))
    }
}

/// Almost-diagonal profile `p_δ(I, I')` with torus distance between centres.
pub fn p_delta(a: &DyadicCube, b: &DyadicCube, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if a.dim() != b.dim() {
        return Err(Error::Shape("cubes of different dimension".into()));
    }
    Ok(p_delta_unchecked(a, b, delta))
}

pub(crate) fn p_delta_unchecked(a: &DyadicCube, b: &DyadicCube, delta: f64) -> f64 {
    let n = a.dim() as f64;
    let dj = (a.level() as f64 - b.level() as f64).abs();
    let scale = a.side() + b.side();
    let dist = torus_distance(a.dim(), &a.center(), &b.center());
    2f64.powf(-dj * (delta / 2.0 + n / 2.0)) / (1.0 + dj * dj) * (scale / (scale + dist)).powf(n + delta / 2.0)
}

/// Smallest `C` with `|entry| ≤ C·p_δ` over the stored entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeltaEnvelope {
    pub delta: f64,
    pub fitted_c: f64,
    /// `(row, col)` attaining `fitted_c`; `None` when every entry is zero.
    pub worst_pair: Option<(CoeffKey, CoeffKey)>,
}

pub fn fit_envelope(matrix: &WaveletMatrix, delta: f64) -> Result<PdeltaEnvelope> {
    check_delta(delta)?;
    if matrix.keys().is_empty() {
        return Err(Error::Domain("matrix has no keys".into()));
    }
    let mut best = PdeltaEnvelope { delta, fitted_c: 0.0, worst_pair: None };
    for (&(r, c), &v) in matrix.entries() {
        let ratio = v.abs() / p_delta_unchecked(&r.cube, &c.cube, delta);
        if ratio > best.fitted_c {
            best.fitted_c = ratio;
            best.worst_pair = Some((r, c));
        }
    }
    Ok(best)
}

/// Envelope fit for an operator given in wavelet-matrix form.
pub fn almost_diagonal_envelope_fit(op: &OperatorSpec, delta: f64) -> Result<PdeltaEnvelope> {
    match &op.kind {
        OperatorKind::WaveletMatrix(m) => fit_envelope(m, delta),
        OperatorKind::Multiplier { .. } => {
            Err(Error::Contract(format!("operator '{}' is not in wavelet-matrix form", op.name)))
        }
    }
}

/// All cubes with level in `[lo, hi]`.
pub fn cubes_in_levels(dim: usize, lo: u32, hi: u32) -> Vec<DyadicCube> {
    (lo..=hi)
        .flat_map(|j| (0..DyadicCube::count_at(dim, j)).map(move |i| DyadicCube::from_index(dim, j, i)))
        .collect()
}

/// Max over `samples` random pairs `(I, I')` of
/// `Σ_{I''} p_δ(I,I'') p_δ(I',I'') / p_δ(I,I')`, `I''` ranging over the level range.
pub fn pdelta_composition_check(dim: usize, levels: (u32, u32), delta: f64, samples: usize, seed: u64) -> Result<f64> {
    check_delta(delta)?;
    if levels.0 > levels.1 {
        return Err(Error::Domain(format!("empty level range {}..={}", levels.0, levels.1)));
    }
    let cubes = cubes_in_levels(dim, levels.0, levels.1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples.max(1) {
        let a = cubes[rng.random_range(0..cubes.len())];
        let b = cubes[rng.random_range(0..cubes.len())];
        let sum: f64 = cubes
            .iter()
            .map(|c| p_delta_unchecked(&a, c, delta) * p_delta_unchecked(&b, c, delta))
            .sum();
        worst = worst.max(sum / p_delta_unchecked(&a, &b, delta));
    }
    Ok(worst)
}
