use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use waveleton::operator::{
    compare_compression, derivative_operator, multiplication_operator, project_operator, DenseOperator, PolynomialPotential,
};
use waveleton::wavelet::{build_filter_pair, Family, FilterPair};
use waveleton::Error;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_matrix(n: usize, r: &mut ChaCha8Rng) -> Array2<f64> {
    Array2::from_shape_fn((n, n), |_| r.random_range(-1.0..1.0))
}

fn random_vec(n: usize, r: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| r.random_range(-1.0..1.0)).collect()
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (d / b.iter().map(|y| y * y).sum::<f64>()).sqrt()
}

/// Dense product through nalgebra, independent of the crate's own kernels.
fn oracle_apply(m: &Array2<f64>, v: &[f64]) -> Vec<f64> {
    let n = m.nrows();
    let a = DMatrix::from_row_slice(n, n, m.as_slice().unwrap());
    (a * DVector::from_column_slice(v)).iter().copied().collect()
}

fn sym8() -> Arc<FilterPair> {
    build_filter_pair(Family::Symmlet, 8).unwrap()
}

#[test]
fn ns_apply_matches_dense_on_random_trials() {
    let f = build_filter_pair(Family::Daubechies, 3).unwrap();
    let mut r = rng(11);
    for m in 4..=8 {
        let n = 1usize << m;
        for trial in 0..100 {
            let op = DenseOperator::new(random_matrix(n, &mut r)).unwrap();
            let levels = 1 + trial % (m - 1);
            let ns = project_operator(&op, &f, levels).unwrap();
            let v = random_vec(n, &mut r);
            let err = rel(&ns.apply(&v).unwrap(), &oracle_apply(&op.matrix, &v));
            assert!(err <= 1e-10, "n={n} trial {trial}: {err:e}");
        }
    }
}

#[test]
fn reassembly_round_trip() {
    let mut r = rng(5);
    for n in [16, 64, 256] {
        let m = random_matrix(n, &mut r);
        let sym = &m + &m.t();
        let op = DenseOperator::new(sym.clone()).unwrap();
        let ns = project_operator(&op, &sym8(), n.trailing_zeros() as usize - 1).unwrap();
        let back = ns.to_dense();
        let worst = back.iter().zip(sym.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-10, "n={n}: {worst:e}");
    }
}

#[test]
fn identity_and_block_shapes() {
    let n = 64;
    let ns = project_operator(&DenseOperator::new(Array2::eye(n)).unwrap(), &sym8(), 4).unwrap();
    for (j, l) in ns.levels.iter().enumerate() {
        let h = n >> (j + 1);
        for b in [&l.a, &l.b, &l.gamma] {
            assert_eq!((b.rows, b.cols), (h, h));
        }
    }
    assert_eq!((ns.coarse.rows, ns.coarse.cols), (4, 4));
    let c = ns.coarse.to_dense();
    assert!((&c - &Array2::<f64>::eye(4)).iter().all(|v| v.abs() < 1e-12));
    let v: Vec<f64> = (0..n).map(|i| (i as f64).sqrt()).collect();
    assert!(rel(&ns.apply(&v).unwrap(), &v) < 1e-13);
}

#[test]
fn threshold_zero_is_identity_and_infinite_clears() {
    let k = DenseOperator::regularized_kernel(64, 0.05).unwrap();
    let ns = project_operator(&k, &sym8(), 3).unwrap();
    assert_eq!(ns.threshold(0.0).retained(), ns.retained());
    assert_eq!(ns.threshold(0.0).levels, ns.levels);
    assert_eq!(ns.threshold(1e300).retained(), 0);
}

#[test]
fn thresholded_kernel_error_constant_is_moderate() {
    // C = (relative apply error) / ε, measured on a 256-grid
    let n = 256;
    let eps = 1e-6;
    let k = DenseOperator::regularized_kernel(n, 0.01).unwrap();
    let ns = project_operator(&k, &sym8(), 5).unwrap().threshold(eps);
    let mut r = rng(3);
    let worst = (0..10)
        .map(|_| {
            let v = random_vec(n, &mut r);
            rel(&ns.apply(&v).unwrap(), &oracle_apply(&k.matrix, &v))
        })
        .fold(0.0, f64::max);
    let c = worst / eps;
    assert!(c <= 100.0, "C = {c}");
    assert!(ns.sparsity() < 1.0);
}

#[test]
fn ns_form_beats_standard_form_at_matched_error() {
    let n = 256;
    let k = DenseOperator::regularized_kernel(n, 0.01).unwrap();
    let mut r = rng(17);
    let probes: Vec<Vec<f64>> = (0..4).map(|_| random_vec(n, &mut r)).collect();
    let rep = compare_compression(&k, &sym8(), 5, 1e-6, &probes).unwrap();
    assert!(rep.ns_error <= 1e-6 && rep.standard_error <= 1e-6);
    assert!(rep.ns_retained < rep.standard_retained, "{rep:?}");
}

#[test]
fn derivative_of_constants_and_sines() {
    let f = build_filter_pair(Family::Daubechies, 3).unwrap();
    let lbox = 10.0;
    let d = derivative_operator(&f, 256, 1, lbox / 256.0).unwrap();
    assert!(d.apply(&[2.5; 256]).unwrap().iter().all(|v| v.abs() <= 1e-12));
    let err = |n: usize| {
        let h = lbox / n as f64;
        let d = derivative_operator(&f, n, 1, h).unwrap();
        let x: Vec<f64> = (0..n).map(|i| (2.0 * PI * i as f64 * h / lbox).sin()).collect();
        let exact: Vec<f64> = (0..n).map(|i| 2.0 * PI / lbox * (2.0 * PI * i as f64 * h / lbox).cos()).collect();
        rel(&d.apply(&x).unwrap(), &exact)
    };
    let (e64, e128, e256) = (err(64), err(128), err(256));
    assert!(e256 <= 1e-3);
    assert!(e128 < e64 && e256 < e128);
}

#[test]
fn derivative_composition_is_bit_identical() {
    let f = build_filter_pair(Family::Daubechies, 3).unwrap();
    let mut r = rng(2);
    let v = random_vec(64, &mut r);
    let d1 = derivative_operator(&f, 64, 1, 0.1).unwrap();
    let d3 = derivative_operator(&f, 64, 3, 0.1).unwrap();
    let thrice = d1.apply(&d1.apply(&d1.apply(&v).unwrap()).unwrap()).unwrap();
    assert_eq!(d3.apply(&v).unwrap(), thrice);
    let dense = d1.to_dense();
    assert!(rel(&dense.apply(&v).unwrap(), &d1.apply(&v).unwrap()) < 1e-14);
    assert!(matches!(
        derivative_operator(&build_filter_pair(Family::Haar, 1).unwrap(), 64, 1, 0.1),
        Err(Error::InsufficientSmoothness { .. })
    ));
    assert_eq!(derivative_operator(&f, 48, 1, 0.1).unwrap_err(), Error::NonDyadicSize(48));
}

#[test]
fn multiplication_operators() {
    let q: Vec<f64> = (0..32).map(|i| -2.0 + i as f64 / 8.0).collect();
    assert!(multiplication_operator(&PolynomialPotential::new(vec![0.0, 0.0, 0.5]), 3, &q).is_zero());
    let quartic = PolynomialPotential::new(vec![0.0, 0.0, 0.0, 0.0, 0.25]);
    let m = multiplication_operator(&quartic, 3, &q);
    assert!(m.diagonal.iter().zip(&q).all(|(d, x)| (d - 6.0 * x).abs() <= 1e-12));
    let double_well = PolynomialPotential::new(vec![0.0, 0.0, -0.5, 0.0, 0.25]);
    let m1 = multiplication_operator(&double_well, 1, &q);
    for h in [1e-2, 5e-3] {
        let worst = q
            .iter()
            .zip(&m1.diagonal)
            .map(|(&x, d)| ((double_well.eval(x + h) - double_well.eval(x - h)) / (2.0 * h) - d).abs())
            .fold(0.0, f64::max);
        // the centred difference error is h² U'''/6, at most 2.2 h² on [−2, 2]
        assert!(worst <= 2.5 * h * h, "h={h}: {worst:e}");
    }
    assert!(m1.diagonal.iter().zip(&q).all(|(d, x)| (d - (x * x * x - x)).abs() <= 1e-12));
}

#[test]
fn potential_derivatives_vanish_above_degree() {
    let u = PolynomialPotential::new(vec![1.0, -2.0, 0.5, 3.0]);
    assert!(u.derivative(4).is_zero());
    assert_eq!(u.derivative(3).coefficients, vec![18.0]);
    assert_eq!(u.moyal_termination(), 1);
}

#[test]
fn export_and_report() {
    let ns = project_operator(&DenseOperator::new(Array2::eye(8)).unwrap(), &sym8(), 2).unwrap();
    let csv = ns.export_csv();
    assert_eq!(csv.lines().next(), Some("level,block,row,col,value"));
    assert_eq!(csv.lines().count() - 1, ns.retained());
    assert!(ns.sparsity_report().contains("retained = "));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn retained_count_is_monotone_in_epsilon(seed in any::<u64>(), e1 in 1e-8f64..1e-1, e2 in 1e-8f64..1e-1) {
        let mut r = rng(seed);
        let op = DenseOperator::new(random_matrix(32, &mut r)).unwrap();
        let ns = project_operator(&op, &sym8(), 3).unwrap();
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(ns.threshold(hi).retained() <= ns.threshold(lo).retained());
    }
}
