//! The four wavelet paraproducts `Π₁ … Π₄`, the diagonal operator `𝔖 = −Π₃`,
//! and the exact product decomposition
//! `fg = Π₁(f,g) + Π₂(f,g) + Π₃(f,g) + Π₄(f,g) + P_{j₀}f·P_{j₀}g`.
//!
//! With `P_j` the projection onto scaling functions at level `j` and
//! `Q_j = P_{j+1} − P_j`:
//!
//! * `Π₁ = Σ_j P_j f · Q_j g`
//! * `Π₂ = Σ_j Q_j f · P_j g`
//! * `Π₃ = Σ_{I,σ} ⟨f,ψ_I^σ⟩⟨g,ψ_I^σ⟩ (ψ_I^σ)²`
//! * `Π₄ = Σ_j Q_j f · Q_j g − Π₃` (same-level pairs with `(I,σ) ≠ (I',σ')`)

use serde::{Deserialize, Serialize};

use crate::dyadic_wavelet::transform::{detail_projection, scaling_projection};
use crate::dyadic_wavelet::{analyze, sigma_count, synthesize, CoefficientTree, DyadicCube, WaveletBasis};
use crate::error::Result;
use crate::grid::SampledFunction;

#[derive(Debug, Clone, PartialEq)]
pub struct ProductDecomposition {
    pub pi1: SampledFunction,
    pub pi2: SampledFunction,
    pub pi3: SampledFunction,
    pub pi4: SampledFunction,
    pub coarse: SampledFunction,
    pub residual_inf: f64,
}

impl ProductDecomposition {
    /// `Π₁ + Π₂ + Π₃ + Π₄ + coarse`.
    pub fn total(&self) -> SampledFunction {
        let mut t = self.pi1.add(&self.pi2);
        t.add_assign(&self.pi3);
        t.add_assign(&self.pi4);
        t.add_assign(&self.coarse);
        t
    }

    pub fn summary(&self) -> ProductSummary {
        ProductSummary {
            residual_inf: self.residual_inf,
            pi1_l1: self.pi1.l1_norm(),
            pi2_l1: self.pi2.l1_norm(),
            pi3_l1: self.pi3.l1_norm(),
            pi4_l1: self.pi4.l1_norm(),
            coarse_l1: self.coarse.l1_norm(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductSummary {
    pub residual_inf: f64,
    pub pi1_l1: f64,
    pub pi2_l1: f64,
    pub pi3_l1: f64,
    pub pi4_l1: f64,
    pub coarse_l1: f64,
}

/// Per-level grid projections `P_j f` (j₀ ≤ j ≤ J) and `Q_j f` (j₀ ≤ j < J).
struct LevelProjections {
    p: Vec<SampledFunction>,
    q: Vec<SampledFunction>,
}

impl LevelProjections {
    fn new(tree: &CoefficientTree, basis: &WaveletBasis) -> Self {
        let dim = tree.dim();
        let (j0, big_j) = (tree.coarse_level(), tree.finest_level());
        let mut p = vec![scaling_projection(tree.scaling(), j0, big_j, dim, basis)];
        let mut q = Vec::with_capacity((big_j - j0) as usize);
        for level in j0..big_j {
            let qj = detail_projection(tree.level_bands(level), level, big_j, dim, basis);
            let next = p.last().unwrap().add(&qj);
            q.push(qj);
            p.push(next);
        }
        Self { p, q }
    }
}

/// Sparse samples of `(ψ_{I₀}^σ)²` for the cube with zero offset at `level`.
fn squared_wavelet_at_origin(dim: usize, level: u32, sigma: usize, finest: u32, basis: &WaveletBasis) -> Vec<(usize, f64)> {
    let count = DyadicCube::count_at(dim, level);
    let mut bands = vec![vec![0.0; count]; sigma_count(dim)];
    bands[sigma][0] = 1.0;
    let psi = detail_projection(&bands, level, finest, dim, basis);
    psi.values().iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, v)| (i, v * v)).collect()
}

/// `Σ_{I at level, σ} a_{I,σ} b_{I,σ} (ψ_I^σ)²`, using that `ψ_{j,k}` is the
/// grid shift of `ψ_{j,0}` by `k·2^{J−j}` cells.
fn diagonal_level(f: &CoefficientTree, g: &CoefficientTree, level: u32, basis: &WaveletBasis, out: &mut [f64]) {
    let dim = f.dim();
    let finest = f.finest_level();
    let n = 1usize << finest;
    let stride = 1usize << (finest - level);
    let side = 1usize << level;
    for s in 0..sigma_count(dim) {
        let fb = &f.level_bands(level)[s];
        let gb = &g.level_bands(level)[s];
        if fb.iter().zip(gb).all(|(a, b)| a * b == 0.0) {
            continue;
        }
        let sq = squared_wavelet_at_origin(dim, level, s, finest, basis);
        for idx in 0..fb.len() {
            let c = fb[idx] * gb[idx];
            if c == 0.0 {
                continue;
            }
            match dim {
                1 => {
                    let shift = idx * stride;
                    for &(i, v) in &sq {
                        out[(i + shift) % n] += c * v;
                    }
                }
                _ => {
                    let (s0, s1) = ((idx / side) * stride, (idx % side) * stride);
                    for &(i, v) in &sq {
                        let (i0, i1) = (i / n, i % n);
                        out[((i0 + s0) % n) * n + (i1 + s1) % n] += c * v;
                    }
                }
            }
        }
    }
}

fn pi3_raw(f: &CoefficientTree, g: &CoefficientTree, basis: &WaveletBasis) -> SampledFunction {
    let mut out = SampledFunction::zeros(f.dim(), f.finest_level());
    for level in f.coarse_level()..f.finest_level() {
        diagonal_level(f, g, level, basis, out.values_mut());
    }
    out
}

/// Full decomposition of the pointwise product of the synthesized `f` and `g`.
pub fn paraproducts(f: &CoefficientTree, g: &CoefficientTree, basis: &WaveletBasis) -> Result<ProductDecomposition> {
    f.check_layout(g)?;
    let dim = f.dim();
    let finest = f.finest_level();
    let pf = LevelProjections::new(f, basis);
    let pg = LevelProjections::new(g, basis);
    let mut pi1 = SampledFunction::zeros(dim, finest);
    let mut pi2 = SampledFunction::zeros(dim, finest);
    let mut same_level = SampledFunction::zeros(dim, finest);
    for l in 0..pf.q.len() {
        pi1.add_assign(&pf.p[l].mul(&pg.q[l]));
        pi2.add_assign(&pf.q[l].mul(&pg.p[l]));
        same_level.add_assign(&pf.q[l].mul(&pg.q[l]));
    }
    let pi3 = pi3_raw(f, g, basis);
    let pi4 = same_level.sub(&pi3);
    let coarse = pf.p[0].mul(&pg.p[0]);
    let fg = pf.p.last().unwrap().mul(pg.p.last().unwrap());
    let mut parts = pi1.add(&pi2);
    parts.add_assign(&pi3);
    parts.add_assign(&pi4);
    parts.add_assign(&coarse);
    let residual_inf = fg.sub(&parts).sup_norm();
    Ok(ProductDecomposition { pi1, pi2, pi3, pi4, coarse, residual_inf })
}

/// Convenience wrapper analyzing `f` and `g` first.
pub fn paraproducts_of(
    f: &SampledFunction,
    g: &SampledFunction,
    basis: &WaveletBasis,
    coarse_level: u32,
) -> Result<ProductDecomposition> {
    f.check_shape(g)?;
    paraproducts(&analyze(f, basis, coarse_level)?, &analyze(g, basis, coarse_level)?, basis)
}

/// `Π₁(f,g) = Σ_j P_j f · Q_j g`.
pub fn pi1(f: &CoefficientTree, g: &CoefficientTree, basis: &WaveletBasis) -> Result<SampledFunction> {
    f.check_layout(g)?;
    let pf = LevelProjections::new(f, basis);
    let pg = LevelProjections::new(g, basis);
    let mut out = SampledFunction::zeros(f.dim(), f.finest_level());
    for l in 0..pf.q.len() {
        out.add_assign(&pf.p[l].mul(&pg.q[l]));
    }
    Ok(out)
}

/// `Π₂(f,g) = Σ_j Q_j f · P_j g`.
pub fn pi2(f: &CoefficientTree, g: &CoefficientTree, basis: &WaveletBasis) -> Result<SampledFunction> {
    pi1(g, f, basis)
}

/// `Π₃(f,g)`, the diagonal detail×detail part.
pub fn pi3(f: &CoefficientTree, g: &CoefficientTree, basis: &WaveletBasis) -> Result<SampledFunction> {
    f.check_layout(g)?;
    Ok(pi3_raw(f, g, basis))
}

/// `Π₄(f,g)`, same-level detail×detail pairs off the diagonal.
pub fn pi4(f: &CoefficientTree, g: &CoefficientTree, basis: &WaveletBasis) -> Result<SampledFunction> {
    f.check_layout(g)?;
    let pf = LevelProjections::new(f, basis);
    let pg = LevelProjections::new(g, basis);
    let mut out = SampledFunction::zeros(f.dim(), f.finest_level());
    for l in 0..pf.q.len() {
        out.add_assign(&pf.q[l].mul(&pg.q[l]));
    }
    Ok(out.sub(&pi3_raw(f, g, basis)))
}

/// `𝔖(f,g) = −Σ_I Σ_σ ⟨f,ψ_I^σ⟩⟨g,ψ_I^σ⟩ (ψ_I^σ)²`.
pub fn s_operator(f: &CoefficientTree, g: &CoefficientTree, basis: &WaveletBasis) -> Result<SampledFunction> {
    Ok(pi3(f, g, basis)?.scale(-1.0))
}

/// `Σ_{I,σ} ⟨f,ψ_I^σ⟩⟨g,ψ_I^σ⟩`.
pub fn detail_pairing(f: &CoefficientTree, g: &CoefficientTree) -> f64 {
    let mut s = 0.0;
    for level in f.coarse_level()..f.finest_level() {
        for (a, b) in f.level_bands(level).iter().zip(g.level_bands(level)) {
            s += a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        }
    }
    s
}

/// `max_{i ∈ {1,3,4}} ‖Π_i(f,g) − Π_i(f,g+c)‖_∞`.
pub fn shift_invariance_check(
    f: &SampledFunction,
    g: &SampledFunction,
    c: f64,
    basis: &WaveletBasis,
    coarse_level: u32,
) -> Result<f64> {
    f.check_shape(g)?;
    let tf = analyze(f, basis, coarse_level)?;
    let tg = analyze(g, basis, coarse_level)?;
    let tgc = analyze(&g.map(|v| v + c), basis, coarse_level)?;
    let mut dev: f64 = 0.0;
    dev = dev.max(pi1(&tf, &tg, basis)?.sub(&pi1(&tf, &tgc, basis)?).sup_norm());
    dev = dev.max(pi3(&tf, &tg, basis)?.sub(&pi3(&tf, &tgc, basis)?).sup_norm());
    dev = dev.max(pi4(&tf, &tg, basis)?.sub(&pi4(&tf, &tgc, basis)?).sup_norm());
    Ok(dev)
}

/// Synthesized pointwise product, for residual checks.
pub fn direct_product(f: &CoefficientTree, g: &CoefficientTree, basis: &WaveletBasis) -> Result<SampledFunction> {
    Ok(synthesize(f, basis)?.mul(&synthesize(g, basis)?))
}
