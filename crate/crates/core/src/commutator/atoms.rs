use crate::dyadic_wavelet::DyadicCube;
use crate::error::{Error, Result};
use crate::grid::SampledFunction;
use crate::sampling::{rng_for, smooth_profile};
use crate::spaces::lq_on;

const MAX_ATTEMPTS: u64 = 10;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn remove(v: &mut [f64], e: &[f64]) {
    let c = dot(v, e);
    v.iter_mut().zip(e).for_each(|(x, y)| *x -= c * y);
}

/// Random `(q,b)`-atom on `Q`: a smooth profile orthogonalized against
/// `{1, b}` in `L²(Q)` and scaled to `‖a‖_q = |Q|^{1/q−1}`.
pub fn make_qb_atom(q_cube: &DyadicCube, b: &SampledFunction, q: f64, seed: u64) -> Result<SampledFunction> {
    if !(q > 1.0) {
        return Err(Error::Domain(format!("atom exponent q = {q} must exceed 1")));
    }
    if q_cube.dim() != b.dim() || q_cube.level() > b.level() {
        return Err(Error::Shape(format!("cube {q_cube} not representable on the grid of b")));
    }
    let level = b.level();
    let cells = q_cube.cells(level);
    let m = cells.len();
    // orthonormal basis of span{1, b} on Q, in the plain ℓ² of the cells
    let mut basis: Vec<Vec<f64>> = vec![vec![1.0 / (m as f64).sqrt(); m]];
    let mut bq: Vec<f64> = cells.iter().map(|&i| b.values()[i]).collect();
    let bnorm = dot(&bq, &bq).sqrt();
    for _ in 0..2 {
        remove(&mut bq, &basis[0]);
    }
    let rest = dot(&bq, &bq).sqrt();
    if rest > 1e-10 * bnorm.max(1e-300) {
        bq.iter_mut().for_each(|x| *x /= rest);
        basis.push(bq);
    }
    for attempt in 0..MAX_ATTEMPTS {
        let profile = smooth_profile(q_cube, level, &mut rng_for(seed, attempt));
        let mut v: Vec<f64> = cells.iter().map(|&i| profile.values()[i]).collect();
        let pnorm = dot(&v, &v).sqrt();
        for _ in 0..2 {
            for e in &basis {
                remove(&mut v, e);
            }
        }
        if dot(&v, &v).sqrt() <= 1e-8 * pnorm {
            continue;
        }
        let mut a = SampledFunction::zeros(b.dim(), level);
        for (&i, x) in cells.iter().zip(&v) {
            a.values_mut()[i] = *x;
        }
        let scale = q_cube.measure().powf(1.0 / q - 1.0) / lq_on(&a, &cells, q);
        return Ok(a.scale(scale));
    }
    Err(Error::Degeneracy(format!("no admissible profile on {q_cube} after {MAX_ATTEMPTS} draws")))
}
