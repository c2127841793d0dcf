//! Calderón–Zygmund type operators: Fourier multipliers, wavelet matrices
//! with almost-diagonal envelopes, maximal functions and the area integral.

mod area;
mod kclass;
mod matrix;
mod maximal;
mod multiplier;
mod pdelta;
mod window;

pub use area::{lusin_area_integral, AreaIntegral, ScaleGrid};
pub use kclass::{k_class_ratio, k_class_term, KClassReport};
pub use matrix::{wavelet_matrix, WaveletMatrix, TRUNCATION};
pub use maximal::{default_dictionary, dyadic_scales, maximal_function, Bump, BumpShape, MaximalOperator, DEFAULT_SCALE_COUNT};
pub use multiplier::{
    apply_multiplier_operator, load_operator_specs, parse_operator_specs, MultiplierOperator, OperatorConfig,
    OperatorKind, OperatorSpec, Symbol, SymbolConfig, SymbolFn,
};
pub use pdelta::{almost_diagonal_envelope_fit, cubes_in_levels, fit_envelope, p_delta, pdelta_composition_check, PdeltaEnvelope};

use crate::dyadic_wavelet::WaveletBasis;
use crate::error::{Error, Result};
use crate::grid::SampledFunction;

/// An operator acting on sampled functions; either linear or sublinear.
pub trait Operator: Send + Sync {
    fn name(&self) -> String;

    fn is_linear(&self) -> bool;

    fn apply(&self, f: &SampledFunction) -> Result<SampledFunction>;

    /// `x ↦ T(b(x)·f − g)(x)`.  For linear `T` this is `b·Tf − Tg`.
    fn apply_frozen(&self, b: &SampledFunction, f: &SampledFunction, g: &SampledFunction) -> Result<SampledFunction> {
        f.check_shape(b)?;
        f.check_shape(g)?;
        if self.is_linear() {
            Ok(b.mul(&self.apply(f)?).sub(&self.apply(g)?))
        } else {
            frozen_by_definition(self, b, f, g)
        }
    }
}

impl<T: Operator + ?Sized> Operator for Box<T> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn is_linear(&self) -> bool {
        (**self).is_linear()
    }

    fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        (**self).apply(f)
    }

    fn apply_frozen(&self, b: &SampledFunction, f: &SampledFunction, g: &SampledFunction) -> Result<SampledFunction> {
        (**self).apply_frozen(b, f, g)
    }
}

/// One full application of `T` per grid point.
pub fn frozen_by_definition<T: Operator + ?Sized>(
    op: &T,
    b: &SampledFunction,
    f: &SampledFunction,
    g: &SampledFunction,
) -> Result<SampledFunction> {
    f.check_shape(b)?;
    f.check_shape(g)?;
    let mut out = Vec::with_capacity(f.len());
    for (x, &beta) in b.values().iter().enumerate() {
        let h = f.scale(beta).sub(g);
        out.push(op.apply(&h)?.values()[x]);
    }
    SampledFunction::new(f.dim(), f.level(), out)
}

/// Operator names accepted by [`operator_by_name`].
pub const OPERATOR_NAMES: &[&str] =
    &["identity", "hilbert", "riesz1", "riesz2", "fractional:<alpha>", "maximal", "local_maximal", "area"];

/// Builds a named operator for inputs of dimension `dim`.
pub fn operator_by_name(name: &str, dim: usize) -> Result<Box<dyn Operator>> {
    let op: Box<dyn Operator> = match name {
        "identity" => Box::new(MultiplierOperator::identity()),
        "hilbert" if dim == 1 => Box::new(MultiplierOperator::hilbert()),
        "hilbert" => return Err(Error::Config("hilbert is one-dimensional; use riesz1/riesz2".into())),
        "riesz1" => Box::new(MultiplierOperator::riesz(0)),
        "riesz2" if dim == 2 => Box::new(MultiplierOperator::riesz(1)),
        "maximal" => Box::new(MaximalOperator::new(dim, false)),
        "local_maximal" => Box::new(MaximalOperator::new(dim, true)),
        "area" => Box::new(AreaIntegral::default()),
        other => {
            if let Some(alpha) = other.strip_prefix("fractional:") {
                let alpha: f64 = alpha
                    .parse()
                    .map_err(|_| Error::Config(format!("bad fractional order in '{other}'")))?;
                Box::new(MultiplierOperator::fractional(alpha))
            } else {
                return Err(Error::Config(format!(
                    "unknown operator '{other}' for dim {dim}; valid: {}",
                    OPERATOR_NAMES.join(", ")
                )));
            }
        }
    };
    Ok(op)
}

/// Wavelet-matrix form of a multiplier operator.
pub fn wavelet_matrix_spec(
    op: &OperatorSpec,
    basis: &WaveletBasis,
    dim: usize,
    finest: u32,
    levels: (u32, u32),
) -> Result<OperatorSpec> {
    let handle = MultiplierOperator::new(op.clone())?;
    let m = wavelet_matrix(&handle, basis, dim, finest, levels)?;
    Ok(OperatorSpec {
        name: format!("{}[wavelet]", op.name),
        kind: OperatorKind::WaveletMatrix(m),
        delta: op.delta,
        unbounded_at_zero: op.unbounded_at_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random(dim: usize, level: u32, seed: u64) -> SampledFunction {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let len = 1usize << (level as usize * dim);
        SampledFunction::new(dim, level, (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
    }

    fn multipliers(dim: usize) -> Vec<MultiplierOperator> {
        let mut v = vec![MultiplierOperator::identity(), MultiplierOperator::riesz(0), MultiplierOperator::fractional(0.5)];
        if dim == 1 {
            v.push(MultiplierOperator::hilbert());
        } else {
            v.push(MultiplierOperator::riesz(1));
        }
        v
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn multipliers_are_linear_and_adjoint_consistent(seed in any::<u64>(), a in -3.0f64..3.0, dim in 1usize..=2) {
            let level = if dim == 1 { 7 } else { 4 };
            let f = random(dim, level, seed);
            let g = random(dim, level, seed ^ 0x9e37);
            for op in multipliers(dim) {
                let lhs = op.apply(&f.scale(a).add(&g)).unwrap();
                let rhs = op.apply(&f).unwrap().scale(a).add(&op.apply(&g).unwrap());
                prop_assert!(lhs.sub(&rhs).sup_norm() < 1e-10);
                let tf_g = op.apply(&f).unwrap().inner(&g);
                let f_tsg = f.inner(&op.adjoint().apply(&g).unwrap());
                prop_assert!((tf_g - f_tsg).abs() < 1e-10);
            }
        }

        #[test]
        fn local_maximal_below_maximal(seed in any::<u64>()) {
            let f = random(1, 7, seed);
            let big = maximal_function(&f, false).unwrap();
            let small = maximal_function(&f, true).unwrap();
            prop_assert!(small.values().iter().zip(big.values()).all(|(s, b)| s <= b));
        }
    }

    #[test]
    fn hilbert_annihilates_constants_both_sides() {
        let one = SampledFunction::constant(1, 9, 1.0);
        let h = MultiplierOperator::hilbert();
        assert!(h.apply(&one).unwrap().sup_norm() < 1e-15);
        assert!(h.adjoint().apply(&one).unwrap().sup_norm() < 1e-15);
    }

    #[test]
    fn linear_frozen_default_matches_definition() {
        let (b, f, g) = (random(1, 5, 1), random(1, 5, 2), random(1, 5, 3));
        let op = MultiplierOperator::hilbert();
        let fast = op.apply_frozen(&b, &f, &g).unwrap();
        let slow = frozen_by_definition(&op, &b, &f, &g).unwrap();
        assert!(fast.sub(&slow).sup_norm() < 1e-12);
    }

    #[test]
    fn named_operators() {
        for name in ["identity", "hilbert", "riesz1", "fractional:0.5", "maximal", "local_maximal", "area"] {
            assert!(operator_by_name(name, 1).is_ok(), "{name}");
        }
        assert!(operator_by_name("riesz2", 2).is_ok());
        assert!(operator_by_name("hilbert", 2).is_err());
        assert!(operator_by_name("bochner", 1).is_err());
    }

    #[test]
    fn spec_wavelet_matrix_and_envelope() {
        let basis = WaveletBasis::haar();
        let spec = wavelet_matrix_spec(&OperatorSpec::identity(), &basis, 1, 6, (2, 5)).unwrap();
        let env = almost_diagonal_envelope_fit(&spec, 1.0).unwrap();
        assert!((env.fitted_c - 1.0).abs() < 1e-10);
        assert!(almost_diagonal_envelope_fit(&OperatorSpec::hilbert(), 1.0).is_err());
    }
}
