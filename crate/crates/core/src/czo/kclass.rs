use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Operator;
use crate::error::Result;
use crate::grid::SampledFunction;
use crate::sampling::{random_bmo, random_classical_atom, rng_for};
use crate::spaces::bmo_norm;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KClassReport {
    pub operator: String,
    pub resolution: usize,
    pub atoms: usize,
    pub b_samples: usize,
    /// `sup ‖(b − b_Q)·Ta‖_{L¹} / ‖b‖_BMO`.
    pub sup_ratio: f64,
}

/// `(b − b_Q)·Ta` in `L¹`, normalized by `‖b‖_BMO`; zero for constant `b`.
pub fn k_class_term(ta: &SampledFunction, b: &SampledFunction, q_cells: &[usize]) -> f64 {
    let bmo = bmo_norm(b);
    if bmo <= 1e-14 {
        return 0.0;
    }
    let bq = q_cells.iter().map(|&i| b.values()[i]).sum::<f64>() / q_cells.len() as f64;
    let l1: f64 = ta.values().iter().zip(b.values()).map(|(t, bv)| ((bv - bq) * t).abs()).sum::<f64>() * ta.cell_measure();
    l1 / bmo
}

/// Sup of the class-𝒦 ratio over random classical atoms and random
/// normalized BMO functions; atom `i` and sample `j` use seeds derived
/// from `seed`, so any resolution sees the same draws.
pub fn k_class_ratio(op: &dyn Operator, dim: usize, level: u32, atoms: usize, b_samples: usize, seed: u64) -> Result<KClassReport> {
    let bs: Vec<SampledFunction> =
        (0..b_samples).into_par_iter().map(|j| random_bmo(dim, level, &mut rng_for(seed ^ 0xb0b0, j as u64))).collect();
    let per_atom: Vec<Result<f64>> = (0..atoms)
        .into_par_iter()
        .map(|i| {
            let (a, q) = random_classical_atom(dim, level, &mut rng_for(seed, i as u64));
            let ta = op.apply(&a)?;
            let cells = q.cells(level);
            Ok(bs.iter().map(|b| k_class_term(&ta, b, &cells)).fold(0.0, f64::max))
        })
        .collect();
    let mut sup: f64 = 0.0;
    for r in per_atom {
        sup = sup.max(r?);
    }
    Ok(KClassReport { operator: op.name(), resolution: 1 << level, atoms, b_samples, sup_ratio: sup })
}
