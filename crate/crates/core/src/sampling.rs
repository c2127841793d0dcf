//! Seeded random generators for ψ-atoms, classical atoms and BMO samples.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dyadic_wavelet::{CoefficientTree, DyadicCube};
use crate::error::Result;
use crate::grid::{torus_distance, SampledFunction};
use crate::spaces::bmo_norm;

/// SplitMix64 step; derives independent per-sample seeds from a root seed.
pub fn derive_seed(root: u64, index: u64) -> u64 {
    let mut z = root.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn rng_for(root: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, index))
}

fn random_cube(dim: usize, level: u32, rng: &mut ChaCha8Rng) -> DyadicCube {
    let idx = rng.random_range(0..DyadicCube::count_at(dim, level));
    DyadicCube::from_index(dim, level, idx)
}

/// Random ψ-atom: a cube `R` at level 2..=4 and Gaussian coefficients on the
/// cubes `I ⊆ R` of the next four levels, scaled to `ℓ²` norm
/// `u·|R|^{−1/2}` with `u ∈ [1/2, 1]`.  Choices depend only on the RNG and
/// not on `finest`, so the same seed gives the same atom at every resolution
/// that can hold it.
pub fn random_psi_atom(dim: usize, coarse: u32, finest: u32, rng: &mut ChaCha8Rng) -> Result<(CoefficientTree, DyadicCube)> {
    let r_level = rng.random_range(2..=4u32).max(coarse).min(finest.saturating_sub(1));
    let r = random_cube(dim, r_level, rng);
    let scale: f64 = rng.random_range(0.5..=1.0);
    let mut tree = CoefficientTree::zeros(dim, coarse, finest)?;
    let mut entries = Vec::new();
    for level in r_level..r_level + 4 {
        let count = DyadicCube::count_at(dim, level - r_level);
        for sub in 0..count {
            let rel = DyadicCube::from_index(dim, level - r_level, sub);
            for sigma in 1..=crate::dyadic_wavelet::sigma_count(dim) as u8 {
                let v: f64 = rng.sample(StandardNormal);
                if level < finest {
                    let mut off = [0u32; 2];
                    for (a, o) in off.iter_mut().enumerate().take(dim) {
                        *o = (r.offset()[a] << (level - r_level)) + rel.offset()[a];
                    }
                    entries.push((DyadicCube::new(dim, level, &off[..dim])?, sigma, v));
                }
            }
        }
    }
    let norm = entries.iter().map(|e| e.2 * e.2).sum::<f64>().sqrt();
    let target = scale * r.measure().powf(-0.5);
    for (cube, sigma, v) in entries {
        tree.set_detail(&cube, sigma, v * target / norm)?;
    }
    Ok((tree, r))
}

/// Smooth random profile on `Q` (zero outside): a few low sine modes in the
/// local coordinates of `Q`, plus a random constant.
pub fn smooth_profile(q: &DyadicCube, level: u32, rng: &mut ChaCha8Rng) -> SampledFunction {
    let dim = q.dim();
    let coeffs: Vec<[f64; 3]> = (0..4)
        .map(|_| [rng.sample(StandardNormal), rng.random_range(1.0..4.0f64).floor(), rng.random_range(1.0..4.0f64).floor()])
        .collect();
    let offset: f64 = rng.sample(StandardNormal);
    let side = q.side();
    let origin = q.offset().iter().map(|&k| k as f64 * side).collect::<Vec<_>>();
    let mut f = SampledFunction::zeros(dim, level);
    for idx in q.cells(level) {
        let x = f.point(idx);
        let u: Vec<f64> = (0..dim).map(|a| ((x[a] - origin[a]).rem_euclid(1.0)) / side).collect();
        let mut v = offset;
        for c in &coeffs {
            let mut term = c[0] * (PI * c[1] * u[0]).sin();
            if dim == 2 {
                term *= (PI * c[2] * u[1]).cos();
            }
            v += term;
        }
        f.values_mut()[idx] = v;
    }
    f
}

/// Classical `L^∞`-atom: mean zero on a random cube `Q`, `‖a‖_∞ = |Q|^{−1}`.
pub fn random_classical_atom(dim: usize, level: u32, rng: &mut ChaCha8Rng) -> (SampledFunction, DyadicCube) {
    let max_q = level.saturating_sub(3).clamp(1, 5);
    let q_level = rng.random_range(1..=max_q);
    let q = random_cube(dim, q_level, rng);
    loop {
        let mut a = smooth_profile(&q, level, rng);
        let cells = q.cells(level);
        let mean = cells.iter().map(|&i| a.values()[i]).sum::<f64>() / cells.len() as f64;
        for &i in &cells {
            a.values_mut()[i] -= mean;
        }
        let sup = a.sup_norm();
        if sup > 1e-8 {
            return (a.scale(1.0 / (q.measure() * sup)), q);
        }
    }
}

/// `log(max(|x − x0|, τ))`, torus distance.
pub fn truncated_log(dim: usize, level: u32, centre: [f64; 2], tau: f64) -> SampledFunction {
    SampledFunction::from_fn(dim, level, |x| torus_distance(dim, x, &centre).max(tau).ln())
}

/// Truncation radius of the logarithmic part of random BMO samples.
pub const BMO_LOG_TRUNCATION: f64 = 1e-3;

/// Random BMO function with `‖b‖_BMO = 1`: lacunary cosines at frequencies
/// `2^m`, `m = 1..=6`, with Gaussian coefficients divided by `|k|`, plus a
/// random multiple of a truncated logarithm at a random centre.
pub fn random_bmo(dim: usize, level: u32, rng: &mut ChaCha8Rng) -> SampledFunction {
    loop {
        let terms: Vec<(f64, [f64; 2], f64)> = (1..=6)
            .map(|m| {
                let k = 2f64.powi(m);
                let c: f64 = rng.sample(StandardNormal);
                let dir = match (dim, rng.random_range(0..3)) {
                    (1, _) => [k, 0.0],
                    (_, 0) => [k, 0.0],
                    (_, 1) => [0.0, k],
                    _ => [k, k],
                };
                let norm = (dir[0] * dir[0] + dir[1] * dir[1]).sqrt();
                (c / norm, dir, rng.random_range(0.0..2.0 * PI))
            })
            .collect();
        let weight: f64 = rng.random_range(0.25..1.5);
        let centre = [rng.random_range(0.0..1.0), if dim == 2 { rng.random_range(0.0..1.0) } else { 0.0 }];
        let log = truncated_log(dim, level, centre, BMO_LOG_TRUNCATION);
        let mut b = SampledFunction::from_fn(dim, level, |x| {
            terms
                .iter()
                .map(|(c, k, phase)| c * (2.0 * PI * (k[0] * x[0] + if dim == 2 { k[1] * x[1] } else { 0.0 }) + phase).cos())
                .sum()
        });
        b.add_assign(&log.scale(weight));
        let n = bmo_norm(&b);
        if n > 1e-9 {
            return b.scale(1.0 / n);
        }
    }
}

/// `a_r = r^{−1}(χ_{[0,r)} − χ_{[r,2r)})` on the 1D torus.
pub fn two_sided_atom(level: u32, r: f64) -> SampledFunction {
    SampledFunction::from_fn(1, level, |x| {
        if x[0] < r {
            1.0 / r
        } else if x[0] < 2.0 * r {
            -1.0 / r
        } else {
            0.0
        }
    })
}
