use std::f64::consts::PI;

use num_complex::Complex64;

use super::*;
use crate::czo::{AreaIntegral, MaximalOperator, MultiplierOperator, Operator};
use crate::dyadic_wavelet::{analyze, synthesize, wavelet_square_function, CoefficientTree, DyadicCube, WaveletBasis};
use crate::error::Error;
use crate::grid::SampledFunction;
use crate::sampling::{random_bmo, random_classical_atom, random_psi_atom, rng_for};
use crate::spaces::{bmo_norm, validate_atom};

fn db4() -> WaveletBasis {
    WaveletBasis::daubechies(4).unwrap()
}

fn psi_atom_fn(level: u32, seed: u64, basis: &WaveletBasis) -> SampledFunction {
    let (tree, _) = random_psi_atom(1, 2, level, &mut rng_for(seed, 0)).unwrap();
    synthesize(&tree, basis).unwrap()
}

/// Hilbert transform by a naive DFT.
fn naive_hilbert(f: &SampledFunction) -> Vec<f64> {
    let n = f.side();
    let v = f.values();
    let spec: Vec<Complex64> = (0..n)
        .map(|k| (0..n).map(|j| v[j] * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / n as f64)).sum())
        .collect();
    (0..n)
        .map(|j| {
            let s: Complex64 = (0..n)
                .map(|k| {
                    let kk = if k <= n / 2 { k as i64 } else { k as i64 - n as i64 };
                    let m = if kk == 0 || k == n / 2 { 0.0 } else { -(kk.signum() as f64) };
                    spec[k] * Complex64::new(0.0, m) * Complex64::from_polar(1.0, 2.0 * PI * (j * k) as f64 / n as f64)
                })
                .sum();
            s.re / n as f64
        })
        .collect()
}

#[test]
fn constant_b_kills_the_commutator() {
    let f = psi_atom_fn(8, 1, &db4());
    let b = SampledFunction::constant(1, 8, 3.5);
    let ops: Vec<Box<dyn Operator>> =
        vec![Box::new(MultiplierOperator::hilbert()), Box::new(MaximalOperator::new(1, false)), Box::new(AreaIntegral::default())];
    for op in &ops {
        let c = commutator_apply(&b, op.as_ref(), &f, true).unwrap();
        assert!(c.sup_norm() < 1e-9 * (1.0 + f.sup_norm()), "{}", op.name());
    }
    let c = commutator_apply(&b, &MultiplierOperator::hilbert(), &f, false).unwrap();
    assert!(c.sup_norm() < 1e-10 * (1.0 + f.sup_norm()));
}

#[test]
fn linear_commutator_is_homogeneous_and_matches_naive_dft() {
    let level = 8;
    let h = MultiplierOperator::hilbert();
    let cos = SampledFunction::from_fn(1, level, |x| (2.0 * PI * x[0]).cos());
    // H(cos²) = sin(4πx)/2 = cos·H(cos)
    let c = commutator_apply(&cos, &h, &cos, false).unwrap();
    assert!(c.sup_norm() < 1e-12);
    let b = random_bmo(1, level, &mut rng_for(5, 0));
    let f = psi_atom_fn(level, 6, &db4());
    let c = commutator_apply(&b, &h, &f, false).unwrap();
    let naive: Vec<f64> = {
        let hf = naive_hilbert(&f);
        let hbf = naive_hilbert(&b.mul(&f));
        (0..f.len()).map(|i| b.values()[i] * hf[i] - hbf[i]).collect()
    };
    let err = c.values().iter().zip(&naive).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-9 * (1.0 + c.sup_norm()));
    let c3 = commutator_apply(&b, &h, &f.scale(-2.5), false).unwrap();
    assert!(c3.sub(&c.scale(-2.5)).sup_norm() < 1e-10 * (1.0 + c.sup_norm()));
    assert!(matches!(commutator_apply(&b, &MaximalOperator::new(1, false), &f, false), Err(Error::Contract(_))));
    assert!(matches!(commutator_apply(&b, &h, &SampledFunction::zeros(1, 7), false), Err(Error::Shape(_))));
}

#[test]
fn sublinear_cap() {
    let b = SampledFunction::zeros(2, 9);
    assert!(matches!(commutator_apply(&b, &MaximalOperator::new(2, false), &b, true), Err(Error::Resolution(_))));
}

#[test]
fn bilinear_identity_for_hilbert() {
    let basis = db4();
    let level = 9;
    for i in 0..50 {
        let f = psi_atom_fn(level, 100 + i, &basis);
        let b = random_bmo(1, level, &mut rng_for(200, i));
        let d = bilinear_decomposition(&b, &MultiplierOperator::hilbert(), &f, &basis, 2).unwrap();
        assert!(d.relative_residual() < 1e-8, "sample {i}: {}", d.residual_inf);
    }
    assert!(matches!(
        bilinear_decomposition(&SampledFunction::zeros(1, level), &AreaIntegral::default(), &SampledFunction::zeros(1, level), &basis, 2),
        Err(Error::Contract(_))
    ));
}

#[test]
fn bilinear_with_constant_b() {
    let basis = db4();
    let f = psi_atom_fn(8, 3, &basis);
    let b = SampledFunction::constant(1, 8, -1.25);
    let d = bilinear_decomposition(&b, &MultiplierOperator::hilbert(), &f, &basis, 2).unwrap();
    assert!(d.r_part.sup_norm() < 1e-10 * (1.0 + f.sup_norm()));
    assert!(d.s_image.sup_norm() < 1e-10 * (1.0 + f.sup_norm()));
}

#[test]
fn sandwich_for_maximal_and_area() {
    let basis = db4();
    let level = 8;
    for i in 0..4 {
        let f = psi_atom_fn(level, 300 + i, &basis);
        let b = random_bmo(1, level, &mut rng_for(400, i));
        for op in [&MaximalOperator::new(1, false) as &dyn Operator, &AreaIntegral::default()] {
            let env = subbilinear_envelope(&b, op, &f, &basis, 2).unwrap();
            assert!(env.sandwich_ok, "{} lower {} upper {}", op.name(), env.lower_gap, env.upper_gap);
        }
    }
    let f = psi_atom_fn(level, 1, &basis);
    let env = subbilinear_envelope(&SampledFunction::constant(1, level, 2.0), &MaximalOperator::new(1, false), &f, &basis, 2).unwrap();
    assert!(env.r_env.sup_norm() < 1e-9 * (1.0 + f.sup_norm()));
    assert!(env.commutator.sup_norm() < 1e-9 * (1.0 + f.sup_norm()));
}

#[test]
fn qb_atoms_validate() {
    let level = 9;
    for i in 0..20 {
        let b = random_bmo(1, level, &mut rng_for(7, i));
        let q_cube = DyadicCube::from_index(1, 3, (i % 8) as usize);
        for q in [1.5, 2.0, f64::INFINITY] {
            let a = make_qb_atom(&q_cube, &b, q, i).unwrap();
            let d = validate_atom(&a, &q_cube, q, Some(&b)).unwrap();
            assert!(d.valid, "{d:?}");
            assert!((d.lq_norm - d.budget).abs() < 1e-9 * d.budget);
        }
    }
}

#[test]
fn qb_atom_with_linear_b() {
    let level = 8;
    let q_cube = DyadicCube::new(1, 2, &[0]).unwrap();
    let b = SampledFunction::from_fn(1, level, |x| if x[0] < 0.25 { x[0] } else { 0.0 });
    let a = make_qb_atom(&q_cube, &b, 2.0, 42).unwrap();
    assert!(a.integral().abs() < 1e-12);
    assert!(a.inner(&b).abs() < 1e-12);
    // b constant on Q: a classical atom
    let c = SampledFunction::constant(1, level, 3.0);
    let a = make_qb_atom(&q_cube, &c, 2.0, 1).unwrap();
    assert!(validate_atom(&a, &q_cube, 2.0, Some(&c)).unwrap().valid);
    assert!(matches!(make_qb_atom(&q_cube, &c, 1.0, 1), Err(Error::Domain(_))));
}

#[test]
fn qb_atom_gram_schmidt_by_hand() {
    // the construction must equal p − (projection of p on span{1, b}) on Q
    let level = 6;
    let q_cube = DyadicCube::new(1, 1, &[1]).unwrap();
    let b = SampledFunction::from_fn(1, level, |x| (x[0] * 9.0).sin());
    let a = make_qb_atom(&q_cube, &b, 2.0, 3).unwrap();
    let cells = q_cube.cells(level);
    let p = crate::sampling::smooth_profile(&q_cube, level, &mut rng_for(3, 0));
    // solve the 2x2 normal equations for p ≈ α + β b on Q
    let (mut s11, mut s12, mut s22, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &i in &cells {
        let (bv, pv) = (b.values()[i], p.values()[i]);
        s11 += 1.0;
        s12 += bv;
        s22 += bv * bv;
        t1 += pv;
        t2 += pv * bv;
    }
    let det = s11 * s22 - s12 * s12;
    let alpha = (t1 * s22 - t2 * s12) / det;
    let beta = (s11 * t2 - s12 * t1) / det;
    let resid: Vec<f64> = cells.iter().map(|&i| p.values()[i] - alpha - beta * b.values()[i]).collect();
    let ratio = a.values()[cells[0]] / resid[0];
    for (k, &i) in cells.iter().enumerate() {
        assert!((a.values()[i] - ratio * resid[k]).abs() < 1e-9 * a.sup_norm());
    }
}

#[test]
fn h1b_report_properties() {
    let basis = db4();
    let level = 8;
    let b = random_bmo(1, level, &mut rng_for(9, 0));
    let zero = h1b_characterizations(&SampledFunction::zeros(1, level), &b, &basis, 2, None).unwrap();
    assert_eq!((zero.v_maximal, zero.v_square, zero.v_riesz, zero.v_t, zero.base), (0.0, 0.0, 0.0, 0.0, 0.0));
    let q_cube = DyadicCube::new(1, 3, &[2]).unwrap();
    let a = make_qb_atom(&q_cube, &b, 2.0, 5).unwrap();
    let r = h1b_characterizations(&a, &b, &basis, 2, Some(&AreaIntegral::default())).unwrap();
    assert!(r.norm >= r.base && r.v_square > 0.0 && r.v_riesz > 0.0 && r.v_t > 0.0);
    assert_eq!(r.t_name, "area");
    let c = SampledFunction::constant(1, level, 1.0);
    assert!(matches!(h1b_characterizations(&a, &c, &basis, 2, None), Err(Error::Domain(_))));
}

#[test]
fn atomic_decomposition_examples() {
    let basis = db4();
    let empty = atomic_decompose(&CoefficientTree::zeros(1, 2, 8).unwrap(), &basis).unwrap();
    assert!(empty.atoms.is_empty() && empty.sum_abs_lambda == 0.0);
    for (dim, level) in [(1, 9), (2, 6)] {
        for i in 0..10 {
            let (tree, r) = random_psi_atom(dim, 2, level, &mut rng_for(11, i)).unwrap();
            let dec = atomic_decompose(&tree, &basis).unwrap();
            assert!(dec.all_valid());
            assert!(!dec.coarse_flagged);
            let w = wavelet_square_function(&tree).l1_norm();
            assert!(dec.sum_abs_lambda <= 4.0 * w, "{} vs {w}", dec.sum_abs_lambda);
            let f = synthesize(&tree, &basis).unwrap();
            let rec = dec.reconstruct(&tree, &basis).unwrap();
            assert!(rec.sub(&f).sup_norm() < 1e-8 * (1.0 + f.sup_norm()));
            assert!(dec.atoms.iter().all(|a| a.cube.contains(&r) || r.contains(&a.cube)));
        }
    }
}

#[test]
fn atomic_decomposition_of_sums() {
    let basis = db4();
    let level = 9;
    for i in 0..10 {
        let mut tree = CoefficientTree::zeros(1, 2, level).unwrap();
        for j in 0..5 {
            let (t, _) = random_psi_atom(1, 2, level, &mut rng_for(12 + i, j)).unwrap();
            tree.axpy(1.0 + j as f64, &t).unwrap();
        }
        let dec = atomic_decompose(&tree, &basis).unwrap();
        assert!(dec.all_valid());
        let f = synthesize(&tree, &basis).unwrap();
        assert!(dec.reconstruct(&tree, &basis).unwrap().sub(&f).sup_norm() < 1e-8 * (1.0 + f.sup_norm()));
        assert!(dec.sum_abs_lambda <= 4.0 * wavelet_square_function(&tree).l1_norm());
        assert!(dec.to_triplet_text().lines().count() > dec.atoms.len());
    }
    // a non-negligible scaling part is flagged, not fatal
    let f = SampledFunction::from_fn(1, 8, |x| 1.0 + (2.0 * PI * x[0]).sin());
    let dec = atomic_decompose(&analyze(&f, &basis, 2).unwrap(), &basis).unwrap();
    assert!(dec.coarse_flagged);
}

#[test]
fn molecule_examples() {
    let level = 10;
    let g = SampledFunction::constant(1, level, 1.0);
    assert!(matches!(molecule_norm(&g, 0.25, [0.0, 0.0]), Err(Error::Cancellation(_))));
    assert!(matches!(molecule_norm(&g.scale(0.0), 0.6, [0.0, 0.0]), Err(Error::Domain(_))));
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let (a, q) = random_classical_atom(1, level, &mut rng_for(13, i));
        worst = worst.max(molecule_norm(&a, 0.25, q.center()).unwrap());
    }
    // ‖a‖_q ≤ |Q|^{-ε} and the weighted factor ≤ (|Q|/2)^{2ε}|Q|^{-ε}
    assert!(worst <= 1.0, "{worst}");
}

#[test]
fn antisymmetric_paraproduct_examples() {
    let basis = db4();
    let level = 8;
    let h = MultiplierOperator::hilbert();
    for i in 0..20 {
        let f = psi_atom_fn(level, 500 + i, &basis);
        let g = random_bmo(1, level, &mut rng_for(600, i));
        let p = antisymmetric_paraproduct(&f, &g, &h, &basis, 2).unwrap();
        assert!(p.hypothesis_integral.abs() < 1e-10);
        assert!(p.h1_square.is_finite());
    }
    let f = psi_atom_fn(level, 1, &basis);
    let p = antisymmetric_paraproduct(&f, &SampledFunction::constant(1, level, 2.0), &h, &basis, 2).unwrap();
    assert!(p.value.sup_norm() < 1e-10 * (1.0 + f.sup_norm()));
    let err = antisymmetric_paraproduct(&f, &f, &MultiplierOperator::identity(), &basis, 2).unwrap_err();
    assert!(matches!(err, Error::Hypothesis(_)));
}

#[test]
fn fractional_examples() {
    let basis = db4();
    let level = 9;
    for i in 0..10 {
        let f = psi_atom_fn(level, 700 + i, &basis);
        let b = random_bmo(1, level, &mut rng_for(800, i));
        let r = fractional_commutator_decomposition(&b, &f, 0.5, &basis, 2).unwrap();
        assert!(r.decomposition.relative_residual() < 1e-8);
        assert!((r.p - 2.0).abs() < 1e-15);
        assert!(r.commutator_weak.is_finite() && r.r_part_lp.is_finite());
    }
    let f = psi_atom_fn(level, 1, &basis);
    let c = SampledFunction::constant(1, level, 4.0);
    let r = fractional_commutator_decomposition(&c, &f, 0.5, &basis, 2).unwrap();
    assert!(r.decomposition.commutator.sup_norm() < 1e-10 * (1.0 + f.sup_norm()));
    assert!(r.decomposition.r_part.sup_norm() < 1e-10 * (1.0 + f.sup_norm()));
    assert!(matches!(fractional_commutator_decomposition(&c, &f, 1.0, &basis, 2), Err(Error::Domain(_))));
    assert!(bmo_norm(&c) == 0.0);
}
