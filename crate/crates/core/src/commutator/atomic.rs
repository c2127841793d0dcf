use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::dyadic_wavelet::{synthesize, validate_psi_atom, wavelet_square_function, CoeffKey, CoefficientTree, DyadicCube, WaveletBasis};
use crate::error::Result;
use crate::grid::SampledFunction;

#[derive(Debug, Clone, PartialEq)]
pub struct PsiAtom {
    pub lambda: f64,
    pub tree: CoefficientTree,
    pub cube: DyadicCube,
    /// Level-set index `k` of the group.
    pub k: i32,
}

/// Level set `Ω_k = {𝒲f > 2^k}` with the maximal cubes of its groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSet {
    pub k: i32,
    pub measure: f64,
    pub cubes: Vec<DyadicCube>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomicDecomposition {
    pub atoms: Vec<PsiAtom>,
    pub level_sets: Vec<LevelSet>,
    pub sum_abs_lambda: f64,
    /// `ℓ²` norm of the scaling coefficients, which the atoms do not carry.
    pub coarse_l2: f64,
    pub coarse_flagged: bool,
}

/// Scaling coefficients above this `ℓ²` size are flagged.
pub const COARSE_FLAG: f64 = 1e-10;

impl AtomicDecomposition {
    /// `Σ λ_j a_j` as a coefficient tree.
    pub fn combined_tree(&self, like: &CoefficientTree) -> Result<CoefficientTree> {
        let mut out = CoefficientTree::zeros(like.dim(), like.coarse_level(), like.finest_level())?;
        for atom in &self.atoms {
            out.axpy(atom.lambda, &atom.tree)?;
        }
        Ok(out)
    }

    /// Synthesized `Σ λ_j a_j`.
    pub fn reconstruct(&self, like: &CoefficientTree, basis: &WaveletBasis) -> Result<SampledFunction> {
        synthesize(&self.combined_tree(like)?, basis)
    }

    /// Every atom passes `validate_psi_atom` against its cube.
    pub fn all_valid(&self) -> bool {
        self.atoms.iter().all(|a| validate_psi_atom(&a.tree, &a.cube).valid)
    }

    /// `cube λ` header per atom followed by its coefficient triplets.
    pub fn to_triplet_text(&self) -> String {
        let mut s = String::new();
        for a in &self.atoms {
            s.push_str(&format!("# atom {} k={} lambda={:.17e}\n", a.cube, a.k, a.lambda));
            s.push_str(&a.tree.to_triplet_text());
        }
        s
    }
}

/// Largest `k` with `2^k < m`.
fn level_index(m: f64) -> i32 {
    let mut k = m.log2().ceil() as i32 - 1;
    while 2f64.powi(k + 1) < m {
        k += 1;
    }
    while 2f64.powi(k) >= m {
        k -= 1;
    }
    k
}

struct Counter<'a> {
    w: &'a [f64],
    finest: u32,
    cache: HashMap<(DyadicCube, i32), bool>,
}

impl Counter<'_> {
    /// `|J ∩ Ω_k| > |J|/2`
    fn majority(&mut self, cube: &DyadicCube, k: i32) -> bool {
        if let Some(&v) = self.cache.get(&(*cube, k)) {
            return v;
        }
        let cells = cube.cells(self.finest);
        let thr = 2f64.powi(k);
        let above = cells.iter().filter(|&&i| self.w[i] > thr).count();
        let v = 2 * above > cells.len();
        self.cache.insert((*cube, k), v);
        v
    }
}

/// Finite atomic decomposition of a coefficient tree driven by the level
/// sets of its wavelet square function.  Each detail coefficient `(I,σ)`
/// goes to the largest `k` with `|I ∩ Ω_k| > |I|/2` and to the coarsest
/// ancestor `Ĩ ⊇ I` (level ≥ j₀) with `|Ĩ ∩ Ω_k| > |Ĩ|/2`; each group
/// `(k, Ĩ)` becomes one ψ-atom on `Ĩ`.
pub fn atomic_decompose(f: &CoefficientTree, _basis: &WaveletBasis) -> Result<AtomicDecomposition> {
    let w = wavelet_square_function(f);
    let j0 = f.coarse_level();
    let finest = f.finest_level();
    let mut counter = Counter { w: w.values(), finest, cache: HashMap::new() };
    let mut groups: BTreeMap<(i32, DyadicCube), Vec<(CoeffKey, f64)>> = BTreeMap::new();
    for (key, v) in f.nonzero_details() {
        let cells = key.cube.cells(finest);
        let mut vals: Vec<f64> = cells.iter().map(|&i| w.values()[i]).collect();
        vals.sort_by(|a, b| b.total_cmp(a));
        // more than half of the cells exceed 2^k iff the (m/2+1)-th largest does
        let median = vals[vals.len() / 2];
        let k = level_index(median);
        let mut top = key.cube;
        for level in j0..key.cube.level() {
            let anc = key.cube.ancestor(level);
            if counter.majority(&anc, k) {
                top = anc;
                break;
            }
        }
        groups.entry((k, top)).or_default().push((key, v));
    }
    let mut atoms = Vec::with_capacity(groups.len());
    let mut by_k: BTreeMap<i32, Vec<DyadicCube>> = BTreeMap::new();
    for ((k, cube), entries) in groups {
        let l2 = entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
        let lambda = l2 * cube.measure().sqrt();
        let mut tree = CoefficientTree::zeros(f.dim(), j0, finest)?;
        for (key, v) in entries {
            tree.set_detail(&key.cube, key.sigma, v / lambda)?;
        }
        by_k.entry(k).or_default().push(cube);
        atoms.push(PsiAtom { lambda, tree, cube, k });
    }
    let level_sets = by_k
        .into_iter()
        .map(|(k, cubes)| {
            let thr = 2f64.powi(k);
            let measure = w.values().iter().filter(|&&v| v > thr).count() as f64 * w.cell_measure();
            LevelSet { k, measure, cubes }
        })
        .collect();
    let sum_abs_lambda = atoms.iter().map(|a| a.lambda.abs()).sum();
    let coarse_l2 = f.scaling_energy().sqrt();
    Ok(AtomicDecomposition { atoms, level_sets, sum_abs_lambda, coarse_l2, coarse_flagged: coarse_l2 > COARSE_FLAG })
}
