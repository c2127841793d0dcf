//! Periodized compactly supported orthonormal wavelets on the torus.

mod basis;
mod cube;
mod square;
pub(crate) mod transform;
mod tree;

pub use basis::{build_basis, build_basis_named, Family, WaveletBasis};
pub use cube::DyadicCube;
pub use square::{validate_psi_atom, wavelet_square_function, PsiAtomDiagnostic};
pub use transform::{analyze, keys_in_levels, scaling_function, synthesize, synthesize_to, wavelet_function};
pub use tree::{sigma_count, CoeffKey, CoefficientTree, Sigma};

/// Coarse level used when none is specified.
pub const DEFAULT_COARSE_LEVEL: u32 = 2;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SampledFunction;
    use crate::error::Error;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bases() -> Vec<WaveletBasis> {
        vec![
            WaveletBasis::haar(),
            WaveletBasis::daubechies(2).unwrap(),
            WaveletBasis::daubechies(4).unwrap(),
            WaveletBasis::daubechies(8).unwrap(),
        ]
    }

    fn random_function(dim: usize, level: u32, rng: &mut ChaCha8Rng) -> SampledFunction {
        let len = 1usize << (level as usize * dim);
        SampledFunction::new(dim, level, (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
    }

    #[test]
    fn perfect_reconstruction_and_parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for basis in bases() {
            for (dim, level) in [(1, 8), (2, 6)] {
                let f = random_function(dim, level, &mut rng);
                let tree = analyze(&f, &basis, 2).unwrap();
                let back = synthesize(&tree, &basis).unwrap();
                let err = f.sub(&back).sup_norm();
                assert!(err <= 1e-10 * f.sup_norm(), "{}: {err}", basis.family);
                let l2 = f.l2_norm().powi(2);
                assert!((tree.energy() - l2).abs() <= 1e-10 * l2);
            }
        }
    }

    #[test]
    fn unit_tree_gives_normalized_single_coefficient() {
        let basis = WaveletBasis::daubechies(4).unwrap();
        for dim in 1..=2 {
            let level = if dim == 1 { 8 } else { 5 };
            let cube = DyadicCube::from_index(dim, 3, 5);
            let key = CoeffKey { cube, sigma: sigma_count(dim) as Sigma };
            let psi = wavelet_function(key, 2, level, &basis).unwrap();
            assert!((psi.l2_norm() - 1.0).abs() < 1e-10);
            assert!(psi.integral().abs() < 1e-10);
            let tree = analyze(&psi, &basis, 2).unwrap();
            for (k, v) in tree.nonzero_details() {
                if k == key {
                    assert!((v - 1.0).abs() < 1e-10);
                } else {
                    assert!(v.abs() < 1e-10);
                }
            }
            assert!(tree.scaling().iter().all(|v| v.abs() < 1e-10));
        }
    }

    #[test]
    fn zero_function_has_zero_tree() {
        let tree = analyze(&SampledFunction::zeros(1, 8), &WaveletBasis::haar(), 2).unwrap();
        assert_eq!(tree.energy(), 0.0);
        assert!(wavelet_square_function(&tree).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn haar_scaling_part_is_constant() {
        let c = 2.5;
        let mut tree = CoefficientTree::zeros(1, 2, 6).unwrap();
        tree.scaling_mut().iter_mut().for_each(|v| *v = c * (-(2.0f64) / 2.0).exp2());
        let f = synthesize(&tree, &WaveletBasis::haar()).unwrap();
        assert!(f.values().iter().all(|v| (v - c).abs() < 1e-14));
    }

    #[test]
    fn round_trip_from_tree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let basis = WaveletBasis::daubechies(2).unwrap();
        let mut tree = CoefficientTree::zeros(2, 2, 5).unwrap();
        tree.scaling_mut().iter_mut().for_each(|v| *v = rng.random_range(-1.0..1.0));
        for level in 2..5 {
            for s in 1..=3 {
                tree.band_mut(level, s).iter_mut().for_each(|v| *v = rng.random_range(-1.0..1.0));
            }
        }
        let again = analyze(&synthesize(&tree, &basis).unwrap(), &basis, 2).unwrap();
        assert!(again.max_abs_diff(&tree) < 1e-10);
    }

    #[test]
    fn orthonormality_of_random_pairs() {
        let basis = WaveletBasis::daubechies(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let keys = keys_in_levels(1, 2, 7);
        for _ in 0..100 {
            let a = keys[rng.random_range(0..keys.len())];
            let b = keys[rng.random_range(0..keys.len())];
            let fa = wavelet_function(a, 2, 8, &basis).unwrap();
            let fb = wavelet_function(b, 2, 8, &basis).unwrap();
            let ip = fa.inner(&fb);
            if a == b {
                assert!((ip - 1.0).abs() < 1e-8);
            } else {
                assert!(ip.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn square_function_of_single_coefficient() {
        let mut tree = CoefficientTree::zeros(1, 2, 8).unwrap();
        let cube = DyadicCube::new(1, 4, &[3]).unwrap();
        tree.set_detail(&cube, 1, 1.0).unwrap();
        let w = wavelet_square_function(&tree);
        assert!((w.l1_norm() - cube.measure().sqrt()).abs() < 1e-14);
        assert!(w.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn psi_atom_validation() {
        let r = DyadicCube::new(1, 3, &[2]).unwrap();
        let mut tree = CoefficientTree::zeros(1, 2, 8).unwrap();
        tree.set_detail(&r, 1, r.measure().powf(-0.5)).unwrap();
        assert!(validate_psi_atom(&tree, &r).valid);
        let outside = DyadicCube::new(1, 5, &[0]).unwrap();
        tree.set_detail(&outside, 1, 1e-3).unwrap();
        let d = validate_psi_atom(&tree, &r);
        assert!(!d.valid);
        assert_eq!(d.outside, vec![CoeffKey { cube: outside, sigma: 1 }]);
        assert!(d.message.contains("5:0"));
    }

    #[test]
    fn restricted_random_tree_is_atom_after_rescale() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = DyadicCube::new(1, 3, &[5]).unwrap();
        let mut tree = CoefficientTree::zeros(1, 2, 9).unwrap();
        for key in keys_in_levels(1, 3, 8) {
            if r.contains(&key.cube) {
                tree.set_detail(&key.cube, key.sigma, rng.random_range(-1.0..1.0)).unwrap();
            }
        }
        let scale = r.measure().powf(-0.5) / tree.detail_energy().sqrt();
        let atom = tree.scaled(scale);
        // independent re-summation of the coefficient norm
        let mut sum = 0.0;
        for level in 3..9 {
            for v in atom.band(level, 1) {
                sum += v * v;
            }
        }
        assert!((sum.sqrt() - r.measure().powf(-0.5)).abs() < 1e-10 * sum.sqrt());
        assert!(validate_psi_atom(&atom, &r).valid);
        // 𝒲 of an atom has L¹ norm ≤ 1
        let basis = WaveletBasis::daubechies(2).unwrap();
        let f = synthesize(&atom, &basis).unwrap();
        let w = wavelet_square_function(&analyze(&f, &basis, 2).unwrap());
        assert!(w.l1_norm() <= 1.0 + 1e-8);
    }

    #[test]
    fn filter_longer_than_coarse_cube_is_rejected() {
        let f = SampledFunction::zeros(1, 6);
        let basis = WaveletBasis::daubechies(10).unwrap();
        assert!(matches!(analyze(&f, &basis, 2), Err(Error::Resolution(_))));
        assert!(analyze(&SampledFunction::zeros(1, 8), &basis, 2).is_ok());
    }

    #[test]
    fn synthesize_to_checks_resolution() {
        let tree = CoefficientTree::zeros(1, 2, 8).unwrap();
        assert!(matches!(synthesize_to(&tree, &WaveletBasis::haar(), 512), Err(Error::Resolution(_))));
        assert!(synthesize_to(&tree, &WaveletBasis::haar(), 256).is_ok());
    }
}
