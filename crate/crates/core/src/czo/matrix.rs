use std::collections::BTreeMap;

use rayon::prelude::*;

use super::Operator;
use crate::dyadic_wavelet::{
    analyze, keys_in_levels, synthesize, CoeffKey, CoefficientTree, WaveletBasis,
};
use crate::error::{Error, Result};
use crate::grid::SampledFunction;

/// Entries below this magnitude are dropped during assembly.
pub const TRUNCATION: f64 = 1e-14;

/// Operator restricted to the span of `ψ_I^σ` with `lo ≤ level(I) ≤ hi`,
/// stored sparsely as `(row, col) → ⟨T ψ_col, ψ_row⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletMatrix {
    pub(crate) dim: usize,
    pub(crate) coarse_level: u32,
    pub(crate) finest_level: u32,
    pub(crate) lo: u32,
    pub(crate) hi: u32,
    pub(crate) basis: WaveletBasis,
    pub(crate) entries: BTreeMap<(CoeffKey, CoeffKey), f64>,
}

impl WaveletMatrix {
    /// Builds a matrix from explicit entries; keys outside the level range are rejected.
    pub fn from_entries(
        dim: usize,
        coarse_level: u32,
        finest_level: u32,
        levels: (u32, u32),
        basis: WaveletBasis,
        entries: BTreeMap<(CoeffKey, CoeffKey), f64>,
    ) -> Result<Self> {
        check_levels(coarse_level, finest_level, levels)?;
        for ((r, c), v) in &entries {
            for key in [r, c] {
                if key.cube.dim() != dim || key.cube.level() < levels.0 || key.cube.level() > levels.1 {
                    return Err(Error::Domain(format!("key {key} outside the matrix level range")));
                }
            }
            if !v.is_finite() {
                return Err(Error::Domain(format!("entry ({r}, {c}) is not finite")));
            }
        }
        Ok(Self { dim, coarse_level, finest_level, lo: levels.0, hi: levels.1, basis, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> (u32, u32) {
        (self.lo, self.hi)
    }

    pub fn finest_level(&self) -> u32 {
        self.finest_level
    }

    pub fn entries(&self) -> &BTreeMap<(CoeffKey, CoeffKey), f64> {
        &self.entries
    }

    pub fn get(&self, row: &CoeffKey, col: &CoeffKey) -> f64 {
        self.entries.get(&(*row, *col)).copied().unwrap_or(0.0)
    }

    pub fn keys(&self) -> Vec<CoeffKey> {
        keys_in_levels(self.dim, self.lo, self.hi)
    }

    pub fn transpose(&self) -> Self {
        let entries = self.entries.iter().map(|(&(r, c), &v)| ((c, r), v)).collect();
        Self { entries, basis: self.basis.clone(), ..*self }
    }

    /// Max over entry pairs of `|M(r,c) − s·M(c,r)|`; `s = −1` tests antisymmetry.
    pub fn symmetry_defect(&self, sign: f64) -> f64 {
        self.entries
            .iter()
            .map(|(&(r, c), &v)| (v - sign * self.get(&c, &r)).abs())
            .fold(0.0, f64::max)
    }

    /// Matrix-vector product on detail coefficients in the level range; all
    /// other coefficients of the result are zero.
    pub fn apply_to_tree(&self, tree: &CoefficientTree) -> Result<CoefficientTree> {
        if tree.dim() != self.dim || tree.finest_level() != self.finest_level || tree.coarse_level() > self.lo {
            return Err(Error::Shape(format!(
                "tree layout (dim {}, j0 {}, J {}) incompatible with matrix (dim {}, levels {}..={}, J {})",
                tree.dim(),
                tree.coarse_level(),
                tree.finest_level(),
                self.dim,
                self.lo,
                self.hi,
                self.finest_level
            )));
        }
        let mut out = CoefficientTree::zeros(self.dim, tree.coarse_level(), self.finest_level)?;
        for (&(r, c), &v) in &self.entries {
            let x = tree.detail(&c.cube, c.sigma);
            if x != 0.0 {
                let cur = out.detail(&r.cube, r.sigma);
                out.set_detail(&r.cube, r.sigma, cur + v * x)?;
            }
        }
        Ok(out)
    }

    /// Keeps only detail coefficients in the matrix level range.
    pub fn restrict(&self, tree: &CoefficientTree) -> Result<CoefficientTree> {
        let mut out = CoefficientTree::zeros(tree.dim(), tree.coarse_level(), tree.finest_level())?;
        for key in self.keys() {
            out.set_detail(&key.cube, key.sigma, tree.detail(&key.cube, key.sigma))?;
        }
        Ok(out)
    }

    /// One `row col value` line per stored entry, in sorted key order.
    pub fn to_triplet_text(&self) -> String {
        let mut s = String::new();
        for ((r, c), v) in &self.entries {
            s.push_str(&format!("{r} {c} {v:.17e}\n"));
        }
        s
    }
}

impl Operator for WaveletMatrix {
    fn name(&self) -> String {
        format!("wavelet_matrix[{}..={}]", self.lo, self.hi)
    }

    fn is_linear(&self) -> bool {
        true
    }

    fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        if f.level() != self.finest_level || f.dim() != self.dim {
            return Err(Error::Shape("function resolution does not match the matrix".into()));
        }
        let tree = analyze(f, &self.basis, self.coarse_level)?;
        synthesize(&self.apply_to_tree(&tree)?, &self.basis)
    }
}

fn check_levels(coarse_level: u32, finest: u32, (lo, hi): (u32, u32)) -> Result<()> {
    if lo > hi || lo < coarse_level || hi >= finest {
        return Err(Error::Resolution(format!(
            "level range {lo}..={hi} must lie within [{coarse_level}, {finest})"
        )));
    }
    Ok(())
}

/// Assembles `⟨T ψ_I^σ, ψ_{I'}^{σ'}⟩` for all keys with levels in `levels`
/// (inclusive) at grid level `finest`, with coarse level `levels.0`.
pub fn wavelet_matrix(
    op: &dyn Operator,
    basis: &WaveletBasis,
    dim: usize,
    finest: u32,
    levels: (u32, u32),
) -> Result<WaveletMatrix> {
    if !op.is_linear() {
        return Err(Error::Contract(format!("operator '{}' is not linear", op.name())));
    }
    let coarse_level = levels.0;
    check_levels(coarse_level, finest, levels)?;
    // surfaces filter/resolution incompatibility before the parallel loop
    CoefficientTree::zeros(dim, coarse_level, finest)?;
    analyze(&SampledFunction::zeros(dim, finest), basis, coarse_level)?;

    let keys = keys_in_levels(dim, levels.0, levels.1);
    let columns: Vec<Result<Vec<((CoeffKey, CoeffKey), f64)>>> = keys
        .par_iter()
        .map(|&col| {
            let mut unit = CoefficientTree::zeros(dim, coarse_level, finest)?;
            unit.set_detail(&col.cube, col.sigma, 1.0)?;
            let psi = synthesize(&unit, basis)?;
            let image = analyze(&op.apply(&psi)?, basis, coarse_level)?;
            Ok(keys
                .iter()
                .filter_map(|&row| {
                    let v = image.detail(&row.cube, row.sigma);
                    (v.abs() >= TRUNCATION).then_some(((row, col), v))
                })
                .collect())
        })
        .collect();
    let mut entries = BTreeMap::new();
    for column in columns {
        entries.extend(column?);
    }
    Ok(WaveletMatrix { dim, coarse_level, finest_level: finest, lo: levels.0, hi: levels.1, basis: basis.clone(), entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::czo::MultiplierOperator;
    use crate::dyadic_wavelet::{build_basis_named, DyadicCube};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_matrix() {
        let basis = WaveletBasis::haar();
        let m = wavelet_matrix(&MultiplierOperator::identity(), &basis, 1, 6, (2, 5)).unwrap();
        for key in m.keys() {
            assert!((m.get(&key, &key) - 1.0).abs() < 1e-10);
        }
        let off: f64 = m.entries.iter().filter(|((r, c), _)| r != c).map(|(_, v)| v.abs()).fold(0.0, f64::max);
        assert!(off < 1e-10);
    }

    #[test]
    fn hilbert_haar_is_antisymmetric() {
        let m = wavelet_matrix(&MultiplierOperator::hilbert(), &WaveletBasis::haar(), 1, 7, (2, 6)).unwrap();
        assert!(m.symmetry_defect(-1.0) < 1e-10);
        assert!(!m.entries.is_empty());
    }

    #[test]
    fn matrix_apply_matches_apply_then_analyze() {
        let basis = build_basis_named("daubechies", 4).unwrap();
        let op = MultiplierOperator::hilbert();
        let (finest, levels) = (8, (3, 7));
        let m = wavelet_matrix(&op, &basis, 1, finest, levels).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mut tree = CoefficientTree::zeros(1, levels.0, finest).unwrap();
            for key in m.keys() {
                tree.set_detail(&key.cube, key.sigma, rng.random_range(-1.0..1.0)).unwrap();
            }
            let f = synthesize(&tree, &basis).unwrap();
            let direct = m.restrict(&analyze(&op.apply(&f).unwrap(), &basis, levels.0).unwrap()).unwrap();
            let via = m.apply_to_tree(&tree).unwrap();
            let scale = direct.energy().sqrt();
            assert!(direct.max_abs_diff(&via) < 1e-6 * scale);
        }
    }

    #[test]
    fn level_range_errors_and_triplets() {
        let basis = WaveletBasis::haar();
        let op = MultiplierOperator::identity();
        assert!(matches!(wavelet_matrix(&op, &basis, 1, 5, (2, 5)), Err(Error::Resolution(_))));
        assert!(matches!(wavelet_matrix(&op, &basis, 1, 5, (3, 2)), Err(Error::Resolution(_))));
        let m = wavelet_matrix(&op, &basis, 1, 4, (2, 3)).unwrap();
        let text = m.to_triplet_text();
        assert_eq!(text.lines().count(), 12);
        assert!(text.starts_with("2:0/1 2:0/1 1.0"));
        let k = CoeffKey { cube: DyadicCube::new(1, 1, &[0]).unwrap(), sigma: 1 };
        let bad = BTreeMap::from([((k, k), 1.0)]);
        assert!(WaveletMatrix::from_entries(1, 2, 4, (2, 3), basis, bad).is_err());
    }

    #[test]
    fn transpose_twice_is_identity() {
        let m = wavelet_matrix(&MultiplierOperator::hilbert(), &WaveletBasis::haar(), 1, 6, (2, 4)).unwrap();
        assert_eq!(m.transpose().transpose(), m);
        assert!(m.transpose().symmetry_defect(-1.0) < 1e-10);
    }
}
