use serde::{Deserialize, Serialize};

use crate::czo::{MultiplierOperator, Operator};
use crate::dyadic_wavelet::{analyze, WaveletBasis};
use crate::error::{Error, Result};
use crate::grid::{torus_distance, SampledFunction};
use crate::paraproduct::s_operator;
use crate::spaces::{h1_square, lp_norm};

/// `𝔑(g) = ‖g‖_q^{1/2}·‖g·|·−y₀|^{2nε}‖_q^{1/2}` with `q = 1/(1−ε)`.
pub fn molecule_norm(g: &SampledFunction, epsilon: f64, y0: [f64; 2]) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Domain(format!("ε = {epsilon} outside (0, 1/2)")));
    }
    let mean = g.integral();
    if mean.abs() > 1e-8 * g.l1_norm().max(1.0) {
        return Err(Error::Cancellation(format!("∫g = {mean:.3e} ≠ 0; molecules need cancellation")));
    }
    let dim = g.dim();
    let q = 1.0 / (1.0 - epsilon);
    let power = 2.0 * dim as f64 * epsilon;
    let mut weighted = g.clone();
    for (i, v) in weighted.values_mut().iter_mut().enumerate() {
        *v *= torus_distance(dim, &g.point(i), &y0).powf(power);
    }
    Ok((lp_norm(g, q)? * lp_norm(&weighted, q)?).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AntisymmetricParaproduct {
    pub value: SampledFunction,
    pub h1_square: f64,
    /// `∫ (Tf·g − f·T*g)`
    pub hypothesis_integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntisymmetricSummary {
    pub h1_square: f64,
    pub hypothesis_integral: f64,
}

/// Tolerance of the `T1 = T*1 = 0` and zero-sum checks.
pub const HYPOTHESIS_TOL: f64 = 1e-10;

/// `𝔓(f,g) = 𝔖(Tf, g) − 𝔖(f, T*g)` and its `H¹` estimate.
pub fn antisymmetric_paraproduct(
    f: &SampledFunction,
    g: &SampledFunction,
    op: &MultiplierOperator,
    basis: &WaveletBasis,
    coarse_level: u32,
) -> Result<AntisymmetricParaproduct> {
    f.check_shape(g)?;
    let adj = op.adjoint();
    let one = SampledFunction::constant(f.dim(), f.level(), 1.0);
    for (t, label) in [(op, "T1"), (&adj, "T*1")] {
        let r = t.apply(&one)?.sup_norm();
        if r >= HYPOTHESIS_TOL {
            return Err(Error::Hypothesis(format!("{label} has sup norm {r:.3e} for '{}'", op.name())));
        }
    }
    let tf = op.apply(f)?;
    let tsg = adj.apply(g)?;
    let hypothesis_integral = tf.inner(g) - f.inner(&tsg);
    let scale = 1.0 + f.l2_norm() * g.l2_norm();
    if hypothesis_integral.abs() > HYPOTHESIS_TOL * scale {
        return Err(Error::Hypothesis(format!("∫(Tf·g − f·T*g) = {hypothesis_integral:.3e}")));
    }
    let an = |h: &SampledFunction| analyze(h, basis, coarse_level);
    let value = s_operator(&an(&tf)?, &an(g)?, basis)?.sub(&s_operator(&an(f)?, &an(&tsg)?, basis)?);
    let h1 = h1_square(&value, basis, coarse_level)?;
    Ok(AntisymmetricParaproduct { value, h1_square: h1, hypothesis_integral })
}
