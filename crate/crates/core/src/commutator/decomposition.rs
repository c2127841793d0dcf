use serde::{Deserialize, Serialize};

use crate::czo::{MultiplierOperator, Operator};
use crate::dyadic_wavelet::{analyze, WaveletBasis};
use crate::error::{Error, Result};
use crate::grid::SampledFunction;
use crate::paraproduct::paraproducts;
use crate::spaces::{lp_norm, weak_lp_quasinorm};

/// Largest grids on which sublinear commutators are evaluated.
pub const SUBLINEAR_CAP_1D: usize = 4096;
pub const SUBLINEAR_CAP_2D: usize = 256;

fn check_sublinear_cap(f: &SampledFunction) -> Result<()> {
    let cap = if f.dim() == 1 { SUBLINEAR_CAP_1D } else { SUBLINEAR_CAP_2D };
    if f.side() > cap {
        return Err(Error::Resolution(format!(
            "sublinear commutator capped at N = {cap} in dimension {}, got N = {}",
            f.dim(),
            f.side()
        )));
    }
    Ok(())
}

/// `[b,T]f`: `bTf − T(bf)` for linear `T`, or `x ↦ T((b(x) − b)f)(x)` when
/// `sublinear` is set.
pub fn commutator_apply(b: &SampledFunction, op: &dyn Operator, f: &SampledFunction, sublinear: bool) -> Result<SampledFunction> {
    b.check_shape(f)?;
    let bf = b.mul(f);
    if sublinear {
        if !op.is_linear() {
            check_sublinear_cap(f)?;
        }
        op.apply_frozen(b, f, &bf)
    } else if op.is_linear() {
        Ok(b.mul(&op.apply(f)?).sub(&op.apply(&bf)?))
    } else {
        Err(Error::Contract(format!("operator '{}' is sublinear; use the sublinear form", op.name())))
    }
}

/// `[b,T]f = R + T(𝔖(f,b))`, all parts on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorDecomposition {
    pub commutator: SampledFunction,
    pub r_part: SampledFunction,
    pub s_image: SampledFunction,
    pub residual_inf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSummary {
    pub residual_inf: f64,
    pub commutator_inf: f64,
    pub commutator_l1: f64,
    pub r_part_l1: f64,
    pub s_image_l1: f64,
}

impl CommutatorDecomposition {
    pub fn relative_residual(&self) -> f64 {
        self.residual_inf / (1.0 + self.commutator.sup_norm())
    }

    pub fn summary(&self) -> DecompositionSummary {
        DecompositionSummary {
            residual_inf: self.residual_inf,
            commutator_inf: self.commutator.sup_norm(),
            commutator_l1: self.commutator.l1_norm(),
            r_part_l1: self.r_part.l1_norm(),
            s_image_l1: self.s_image.l1_norm(),
        }
    }
}

/// Remainder `R = bTf − T(Π₂(f,b)) − T(Π₁(f,b) + Π₄(f,b)) − T(P_{j₀}f·P_{j₀}b)`
/// and `T(𝔖(f,b))` for linear `T`.
pub fn bilinear_decomposition(
    b: &SampledFunction,
    op: &dyn Operator,
    f: &SampledFunction,
    basis: &WaveletBasis,
    coarse_level: u32,
) -> Result<CommutatorDecomposition> {
    if !op.is_linear() {
        return Err(Error::Contract(format!(
            "operator '{}' is sublinear; use subbilinear_envelope",
            op.name()
        )));
    }
    b.check_shape(f)?;
    let tf = analyze(f, basis, coarse_level)?;
    let tb = analyze(b, basis, coarse_level)?;
    let parts = paraproducts(&tf, &tb, basis)?;
    let s = parts.pi3.scale(-1.0);
    let mut r_part = b.mul(&op.apply(f)?);
    r_part = r_part.sub(&op.apply(&parts.pi2)?);
    r_part = r_part.sub(&op.apply(&parts.pi1.add(&parts.pi4))?);
    r_part = r_part.sub(&op.apply(&parts.coarse)?);
    let s_image = op.apply(&s)?;
    let commutator = commutator_apply(b, op, f, false)?;
    let residual_inf = commutator.sub(&r_part).sub(&s_image).sup_norm();
    Ok(CommutatorDecomposition { commutator, r_part, s_image, residual_inf })
}

/// Pointwise envelope for sublinear `T` and the two-sided bound check.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbilinearEnvelope {
    pub r_env: SampledFunction,
    pub commutator: SampledFunction,
    pub s_image: SampledFunction,
    /// `max_x (|T𝔖| − R − |[b,T]f|)` and `max_x (|[b,T]f| − R − |T𝔖|)`.
    pub lower_gap: f64,
    pub upper_gap: f64,
    pub slack: f64,
    pub sandwich_ok: bool,
}

/// Relative slack of the pointwise sandwich inequalities.
pub const SANDWICH_SLACK: f64 = 1e-9;

/// `R(x) = |T(b(x)f − Π₂(f,b) − P_{j₀}f·P_{j₀}b)(x)| + |TΠ₁(f,b)(x)| + |TΠ₄(f,b)(x)|`
/// and the check `|T𝔖| − R ≤ |[b,T]f| ≤ R + |T𝔖|` at every grid point.
pub fn subbilinear_envelope(
    b: &SampledFunction,
    op: &dyn Operator,
    f: &SampledFunction,
    basis: &WaveletBasis,
    coarse_level: u32,
) -> Result<SubbilinearEnvelope> {
    b.check_shape(f)?;
    let tf = analyze(f, basis, coarse_level)?;
    let tb = analyze(b, basis, coarse_level)?;
    let parts = paraproducts(&tf, &tb, basis)?;
    let first = op.apply_frozen(b, f, &parts.pi2.add(&parts.coarse))?.abs();
    let r_env = first.add(&op.apply(&parts.pi1)?.abs()).add(&op.apply(&parts.pi4)?.abs());
    let s_image = op.apply(&parts.pi3.scale(-1.0))?;
    let commutator = commutator_apply(b, op, f, true)?;
    let scale = 1.0 + r_env.sup_norm().max(s_image.sup_norm()).max(commutator.sup_norm());
    let slack = SANDWICH_SLACK * scale;
    let (mut lower_gap, mut upper_gap) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for ((r, s), c) in r_env.values().iter().zip(s_image.values()).zip(commutator.values()) {
        lower_gap = lower_gap.max(s.abs() - r - c.abs());
        upper_gap = upper_gap.max(c.abs() - r - s.abs());
    }
    let sandwich_ok = lower_gap <= slack && upper_gap <= slack;
    Ok(SubbilinearEnvelope { r_env, commutator, s_image, lower_gap, upper_gap, slack, sandwich_ok })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionalReport {
    pub decomposition: CommutatorDecomposition,
    pub alpha: f64,
    /// `n/(n − α)`
    pub p: f64,
    pub commutator_weak: f64,
    pub r_part_lp: f64,
}

/// The bilinear decomposition with `T = I_α`, plus weak and strong
/// `L^{n/(n−α)}` sizes.
pub fn fractional_commutator_decomposition(
    b: &SampledFunction,
    f: &SampledFunction,
    alpha: f64,
    basis: &WaveletBasis,
    coarse_level: u32,
) -> Result<FractionalReport> {
    let n = f.dim() as f64;
    if !(alpha > 0.0 && alpha < n) {
        return Err(Error::Domain(format!("α = {alpha} outside (0, {n})")));
    }
    let op = MultiplierOperator::fractional(alpha);
    let decomposition = bilinear_decomposition(b, &op, f, basis, coarse_level)?;
    let p = n / (n - alpha);
    let commutator_weak = weak_lp_quasinorm(&decomposition.commutator, p)?;
    let r_part_lp = lp_norm(&decomposition.r_part, p)?;
    Ok(FractionalReport { decomposition, alpha, p, commutator_weak, r_part_lp })
}
