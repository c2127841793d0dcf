//! Periodized fast wavelet transform between grid samples and coefficient trees.
//!
//! Grid samples `f_i` are identified with level-`J` scaling coefficients
//! `f_i · N^{-n/2}`, so that the transform is orthogonal for the grid inner
//! product `∫ f g ≈ N^{-n} Σ f_i g_i`.

use super::basis::WaveletBasis;
use super::cube::DyadicCube;
use super::tree::{sigma_count, CoeffKey, CoefficientTree, Sigma};
use crate::error::{Error, Result};
use crate::grid::SampledFunction;

fn analyze_line(input: &[f64], h: &[f64], g: &[f64], lo: &mut [f64], hi: &mut [f64]) {
    let m = input.len();
    for k in 0..m / 2 {
        let (mut a, mut d) = (0.0, 0.0);
        for (t, (&hh, &gg)) in h.iter().zip(g).enumerate() {
            let x = input[(2 * k + t) % m];
            a += hh * x;
            d += gg * x;
        }
        lo[k] = a;
        hi[k] = d;
    }
}

/// Inverse of [`analyze_line`]; an empty `hi` stands for zeros.
fn synth_line(lo: &[f64], hi: &[f64], h: &[f64], g: &[f64], out: &mut [f64]) {
    let m = out.len();
    out.iter_mut().for_each(|v| *v = 0.0);
    for k in 0..m / 2 {
        let a = lo[k];
        let d = if hi.is_empty() { 0.0 } else { hi[k] };
        if a == 0.0 && d == 0.0 {
            continue;
        }
        for (t, (&hh, &gg)) in h.iter().zip(g).enumerate() {
            out[(2 * k + t) % m] += hh * a + gg * d;
        }
    }
}

/// One analysis step from side `m` to side `m/2`; returns the coarse block and
/// the `2^n − 1` detail bands.
pub(crate) fn analysis_step(fine: &[f64], dim: usize, m: usize, basis: &WaveletBasis) -> (Vec<f64>, Vec<Vec<f64>>) {
    let h = &basis.scaling_filter;
    let g = &basis.detail_filter;
    let half = m / 2;
    if dim == 1 {
        let mut lo = vec![0.0; half];
        let mut hi = vec![0.0; half];
        analyze_line(fine, h, g, &mut lo, &mut hi);
        return (lo, vec![hi]);
    }
    // rows (last axis) first
    let mut lr = vec![0.0; m * half];
    let mut hr = vec![0.0; m * half];
    for i in 0..m {
        let (lo, hi) = (&mut lr[i * half..(i + 1) * half], &mut hr[i * half..(i + 1) * half]);
        analyze_line(&fine[i * m..(i + 1) * m], h, g, lo, hi);
    }
    let mut coarse = vec![0.0; half * half];
    let mut bands = vec![vec![0.0; half * half]; 3];
    let mut col = vec![0.0; m];
    let mut lo = vec![0.0; half];
    let mut hi = vec![0.0; half];
    for c in 0..half {
        for i in 0..m {
            col[i] = lr[i * half + c];
        }
        analyze_line(&col, h, g, &mut lo, &mut hi);
        for k in 0..half {
            coarse[k * half + c] = lo[k];
            bands[1][k * half + c] = hi[k]; // σ = (1,0)
        }
        for i in 0..m {
            col[i] = hr[i * half + c];
        }
        analyze_line(&col, h, g, &mut lo, &mut hi);
        for k in 0..half {
            bands[0][k * half + c] = lo[k]; // σ = (0,1)
            bands[2][k * half + c] = hi[k]; // σ = (1,1)
        }
    }
    (coarse, bands)
}

/// One synthesis step from side `m/2` to side `m`.  Empty bands are zeros.
pub(crate) fn synthesis_step(coarse: &[f64], bands: &[&[f64]], dim: usize, m: usize, basis: &WaveletBasis) -> Vec<f64> {
    let h = &basis.scaling_filter;
    let g = &basis.detail_filter;
    let half = m / 2;
    let band = |s: usize| -> &[f64] { bands.get(s).copied().unwrap_or(&[]) };
    if dim == 1 {
        let mut out = vec![0.0; m];
        synth_line(coarse, band(0), h, g, &mut out);
        return out;
    }
    let mut lr = vec![0.0; m * half];
    let mut hr = vec![0.0; m * half];
    let mut lo = vec![0.0; half];
    let mut hi = vec![0.0; half];
    let mut col = vec![0.0; m];
    let column = |src: &[f64], c: usize, dst: &mut [f64]| {
        if src.is_empty() {
            return false;
        }
        for k in 0..half {
            dst[k] = src[k * half + c];
        }
        true
    };
    for c in 0..half {
        let has_lo = column(coarse, c, &mut lo);
        let has_hi = column(band(1), c, &mut hi);
        if has_lo || has_hi {
            if !has_lo {
                lo.iter_mut().for_each(|v| *v = 0.0);
            }
            synth_line(&lo, if has_hi { &hi } else { &[] }, h, g, &mut col);
            for i in 0..m {
                lr[i * half + c] = col[i];
            }
        }
        let has_lo = column(band(0), c, &mut lo);
        let has_hi = column(band(2), c, &mut hi);
        if has_lo || has_hi {
            if !has_lo {
                lo.iter_mut().for_each(|v| *v = 0.0);
            }
            synth_line(&lo, if has_hi { &hi } else { &[] }, h, g, &mut col);
            for i in 0..m {
                hr[i * half + c] = col[i];
            }
        }
    }
    let mut out = vec![0.0; m * m];
    for i in 0..m {
        synth_line(&lr[i * half..(i + 1) * half], &hr[i * half..(i + 1) * half], h, g, &mut out[i * m..(i + 1) * m]);
    }
    out
}

fn check_filter(basis: &WaveletBasis, coarse_level: u32, finest: u32) -> Result<()> {
    if coarse_level >= finest {
        return Err(Error::Resolution(format!("coarse level {coarse_level} must be below J = {finest}")));
    }
    let cells = 1usize << (finest - coarse_level);
    if basis.filter_len() > cells {
        return Err(Error::Resolution(format!(
            "{} filter of length {} exceeds the {} samples per coarse cube at j0 = {coarse_level}, N = {}",
            basis.family,
            basis.filter_len(),
            cells,
            1usize << finest
        )));
    }
    Ok(())
}

/// Wavelet coefficients of `f` down to `coarse_level`.
pub fn analyze(f: &SampledFunction, basis: &WaveletBasis, coarse_level: u32) -> Result<CoefficientTree> {
    let finest = f.level();
    check_filter(basis, coarse_level, finest)?;
    let dim = f.dim();
    let mut tree = CoefficientTree::zeros(dim, coarse_level, finest)?;
    let norm = f.cell_measure().sqrt();
    let mut approx: Vec<f64> = f.values().iter().map(|v| v * norm).collect();
    for level in (coarse_level..finest).rev() {
        let m = 1usize << (level + 1);
        let (coarse, bands) = analysis_step(&approx, dim, m, basis);
        for (s, band) in bands.into_iter().enumerate() {
            tree.band_mut(level, s as Sigma + 1).copy_from_slice(&band);
        }
        approx = coarse;
    }
    tree.scaling_mut().copy_from_slice(&approx);
    Ok(tree)
}

/// Grid samples of `Σ ⟨f,φ_I⟩φ_I + Σ ⟨f,ψ_I^σ⟩ψ_I^σ`.
pub fn synthesize(tree: &CoefficientTree, basis: &WaveletBasis) -> Result<SampledFunction> {
    check_filter(basis, tree.coarse_level(), tree.finest_level())?;
    let dim = tree.dim();
    let mut approx = tree.scaling().to_vec();
    for level in tree.coarse_level()..tree.finest_level() {
        let m = 1usize << (level + 1);
        let bands: Vec<&[f64]> = tree.level_bands(level).iter().map(|b| b.as_slice()).collect();
        approx = synthesis_step(&approx, &bands, dim, m, basis);
    }
    Ok(to_grid(approx, dim, tree.finest_level()))
}

/// Like [`synthesize`], failing unless the tree matches `resolution`.
pub fn synthesize_to(tree: &CoefficientTree, basis: &WaveletBasis, resolution: usize) -> Result<SampledFunction> {
    if resolution != 1usize << tree.finest_level() {
        return Err(Error::Resolution(format!(
            "tree has J = {} (N = {}), requested N = {resolution}",
            tree.finest_level(),
            1usize << tree.finest_level()
        )));
    }
    synthesize(tree, basis)
}

fn to_grid(approx: Vec<f64>, dim: usize, finest: u32) -> SampledFunction {
    let scale = (1usize << (finest as usize * dim)) as f64;
    let scale = scale.sqrt();
    SampledFunction::new(dim, finest, approx.into_iter().map(|v| v * scale).collect()).expect("layout")
}

/// Grid samples of `Σ_I c_I φ_I` for scaling coefficients at `level`.
pub(crate) fn scaling_projection(
    coeffs: &[f64],
    level: u32,
    finest: u32,
    dim: usize,
    basis: &WaveletBasis,
) -> SampledFunction {
    let mut approx = coeffs.to_vec();
    for l in level..finest {
        approx = synthesis_step(&approx, &[], dim, 1usize << (l + 1), basis);
    }
    to_grid(approx, dim, finest)
}

/// Grid samples of `Σ_{I at level, σ} c_{I,σ} ψ_I^σ` for one level of bands.
pub(crate) fn detail_projection(
    bands: &[Vec<f64>],
    level: u32,
    finest: u32,
    dim: usize,
    basis: &WaveletBasis,
) -> SampledFunction {
    let zeros = vec![0.0; DyadicCube::count_at(dim, level)];
    let refs: Vec<&[f64]> = bands.iter().map(|b| b.as_slice()).collect();
    let approx = synthesis_step(&zeros, &refs, dim, 1usize << (level + 1), basis);
    scaling_projection(&approx, level + 1, finest, dim, basis)
}

/// Grid samples of the basis function `ψ_I^σ`, built by synthesizing a unit tree.
pub fn wavelet_function(
    key: CoeffKey,
    coarse_level: u32,
    finest: u32,
    basis: &WaveletBasis,
) -> Result<SampledFunction> {
    let mut tree = CoefficientTree::zeros(key.cube.dim(), coarse_level, finest)?;
    tree.set_detail(&key.cube, key.sigma, 1.0)?;
    synthesize(&tree, basis)
}

/// Grid samples of `φ_I` for a cube at `coarse_level`.
pub fn scaling_function(cube: DyadicCube, finest: u32, basis: &WaveletBasis) -> Result<SampledFunction> {
    let mut tree = CoefficientTree::zeros(cube.dim(), cube.level(), finest)?;
    tree.set_scaling(&cube, 1.0)?;
    synthesize(&tree, basis)
}

/// All `(I, σ)` keys of a tree layout at levels in `[lo, hi]`.
pub fn keys_in_levels(dim: usize, lo: u32, hi: u32) -> Vec<CoeffKey> {
    let mut keys = Vec::new();
    for level in lo..=hi {
        for sigma in 1..=sigma_count(dim) as Sigma {
            for idx in 0..DyadicCube::count_at(dim, level) {
                keys.push(CoeffKey { cube: DyadicCube::from_index(dim, level, idx), sigma });
            }
        }
    }
    keys
}
