use serde::{Deserialize, Serialize};

use super::cube::DyadicCube;
use super::tree::{CoeffKey, CoefficientTree};
use crate::grid::SampledFunction;

/// `𝒲_ψ f = (Σ_I Σ_σ |⟨f,ψ_I^σ⟩|² |I|^{-1} χ_I)^{1/2}` on the finest grid.
pub fn wavelet_square_function(tree: &CoefficientTree) -> SampledFunction {
    let dim = tree.dim();
    let finest = tree.finest_level();
    let mut sq = vec![0.0; 1usize << (finest as usize * dim)];
    for level in tree.coarse_level()..finest {
        let bands = tree.level_bands(level);
        let weight = ((level as usize * dim) as f64).exp2();
        for idx in 0..DyadicCube::count_at(dim, level) {
            let e: f64 = bands.iter().map(|b| b[idx] * b[idx]).sum();
            if e == 0.0 {
                continue;
            }
            for cell in DyadicCube::from_index(dim, level, idx).cells(finest) {
                sq[cell] += e * weight;
            }
        }
    }
    SampledFunction::new(dim, finest, sq.into_iter().map(f64::sqrt).collect()).expect("layout")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiAtomDiagnostic {
    pub valid: bool,
    /// Nonzero coefficients on cubes not contained in `R`.
    pub outside: Vec<CoeffKey>,
    pub scaling_nonzero: bool,
    pub coefficient_l2: f64,
    /// `|R|^{-1/2}`.
    pub budget: f64,
    pub message: String,
}

/// Checks that `tree` is a ψ-atom related to `r`: coefficients only on cubes
/// `I ⊆ R`, no scaling part, and `ℓ²` norm at most `|R|^{-1/2}`.
pub fn validate_psi_atom(tree: &CoefficientTree, r: &DyadicCube) -> PsiAtomDiagnostic {
    let budget = r.measure().powf(-0.5);
    let mut outside = Vec::new();
    let mut energy = 0.0;
    for (key, v) in tree.nonzero_details() {
        energy += v * v;
        if !r.contains(&key.cube) {
            outside.push(key);
        }
    }
    let coefficient_l2 = energy.sqrt();
    let scaling_nonzero = tree.scaling().iter().any(|&v| v != 0.0);
    let mut problems = Vec::new();
    if r.level() < tree.coarse_level() || r.dim() != tree.dim() {
        problems.push(format!("cube {r} is coarser than j0 = {}", tree.coarse_level()));
    }
    if scaling_nonzero {
        problems.push("scaling coefficients do not vanish".to_string());
    }
    if !outside.is_empty() {
        let names: Vec<String> = outside.iter().take(8).map(|k| k.to_string()).collect();
        problems.push(format!("{} coefficients outside {r}: {}", outside.len(), names.join(", ")));
    }
    if coefficient_l2 > budget * (1.0 + 1e-10) {
        problems.push(format!("ℓ² norm {coefficient_l2:.6e} exceeds |R|^-1/2 = {budget:.6e}"));
    }
    PsiAtomDiagnostic {
        valid: problems.is_empty(),
        outside,
        scaling_nonzero,
        coefficient_l2,
        budget,
        message: if problems.is_empty() { "ok".into() } else { problems.join("; ") },
    }
}
