use serde::{Deserialize, Serialize};

use super::decomposition::commutator_apply;
use crate::czo::{MaximalOperator, MultiplierOperator, Operator};
use crate::dyadic_wavelet::{analyze, WaveletBasis};
use crate::error::{Error, Result};
use crate::grid::SampledFunction;
use crate::paraproduct::s_operator;
use crate::spaces::{bmo_norm, h1_square};

/// The four equivalent `H¹_b` quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H1bReport {
    /// `‖[b,𝔐]f‖_{L¹}`
    pub v_maximal: f64,
    /// `‖𝔖(f,b)‖_{H¹}` estimate
    pub v_square: f64,
    /// `Σ_j ‖[b,ℛ_j]f‖_{L¹}` (the Hilbert transform in 1D)
    pub v_riesz: f64,
    /// `‖[b,T]f‖_{L¹}` for the chosen `T`
    pub v_t: f64,
    pub t_name: String,
    /// `‖f‖_{H¹}·‖b‖_{BMO}`
    pub base: f64,
    /// `base + v_maximal`
    pub norm: f64,
    pub ratio_square_riesz: Option<f64>,
    pub ratio_square_t: Option<f64>,
    pub ratio_riesz_t: Option<f64>,
}

fn ratio(a: f64, b: f64) -> Option<f64> {
    (b > 0.0).then(|| a / b)
}

/// `H¹_b` characterizations for `(f, b)`; `T` defaults to `𝔐`.
pub fn h1b_characterizations(
    f: &SampledFunction,
    b: &SampledFunction,
    basis: &WaveletBasis,
    coarse_level: u32,
    op: Option<&dyn Operator>,
) -> Result<H1bReport> {
    f.check_shape(b)?;
    let bmo = bmo_norm(b);
    if bmo <= 1e-12 {
        return Err(Error::Domain("b is constant (BMO norm below 1e-12)".into()));
    }
    let dim = f.dim();
    let maximal = MaximalOperator::new(dim, false);
    let sublinear = |t: &dyn Operator| -> Result<f64> { Ok(commutator_apply(b, t, f, !t.is_linear())?.l1_norm()) };
    let v_maximal = sublinear(&maximal)?;
    let s = s_operator(&analyze(f, basis, coarse_level)?, &analyze(b, basis, coarse_level)?, basis)?;
    let v_square = h1_square(&s, basis, coarse_level)?;
    let v_riesz = if dim == 1 {
        sublinear(&MultiplierOperator::hilbert())?
    } else {
        (0..dim).map(|j| sublinear(&MultiplierOperator::riesz(j))).sum::<Result<f64>>()?
    };
    let (v_t, t_name) = match op {
        Some(t) => (sublinear(t)?, t.name()),
        None => (v_maximal, maximal.name()),
    };
    let base = h1_square(f, basis, coarse_level)? * bmo;
    Ok(H1bReport {
        v_maximal,
        v_square,
        v_riesz,
        v_t,
        t_name,
        base,
        norm: base + v_maximal,
        ratio_square_riesz: ratio(v_square, v_riesz),
        ratio_square_t: ratio(v_square, v_t),
        ratio_riesz_t: ratio(v_riesz, v_t),
    })
}
