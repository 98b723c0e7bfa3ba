use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use waveleton::linalg::{matvec, norm1, Lu};

fn random_system(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    // diagonal shift keeps the system well conditioned
    for i in 0..n {
        a[i * n + i] += n as f64 / 4.0;
    }
    let b = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    (a, b)
}

#[test]
fn lu_matches_independent_dense_solver() {
    for seed in 0..4 {
        let n = 64;
        let (a, b) = random_system(n, seed);
        let x = Lu::factor(a.clone(), n).unwrap().solve(&b);
        let oracle = DMatrix::from_row_slice(n, n, &a).lu().solve(&DVector::from_column_slice(&b)).unwrap();
        let diff = x.iter().zip(oracle.iter()).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        assert!(diff <= 1e-12, "seed {seed}: max difference {diff:e}");
        let r = matvec(&a, n, n, &x);
        let res = r.iter().zip(&b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        assert!(res <= 1e-10, "seed {seed}: residual {res:e}");
    }
}

#[test]
fn blocked_path_matches_oracle_beyond_one_panel() {
    let n = 200;
    let (a, b) = random_system(n, 99);
    let lu = Lu::factor(a.clone(), n).unwrap();
    let oracle = DMatrix::from_row_slice(n, n, &a).lu().solve(&DVector::from_column_slice(&b)).unwrap();
    let diff = lu.solve(&b).iter().zip(oracle.iter()).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    assert!(diff <= 1e-11, "max difference {diff:e}");
    let bt = DMatrix::from_row_slice(n, n, &a).transpose().lu().solve(&DVector::from_column_slice(&b)).unwrap();
    let diff_t = lu.solve_transpose(&b).iter().zip(bt.iter()).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    assert!(diff_t <= 1e-11, "transpose difference {diff_t:e}");
}

#[test]
fn condition_estimate_is_a_lower_bound_within_a_small_factor() {
    let n = 64;
    let (a, _) = random_system(n, 7);
    let lu = Lu::factor(a.clone(), n).unwrap();
    let inv = DMatrix::from_row_slice(n, n, &a).try_inverse().unwrap();
    let exact = (0..n).map(|j| inv.column(j).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let est = lu.inverse_norm1_estimate();
    assert!(est <= exact * (1.0 + 1e-10) && est >= exact / 3.0, "estimate {est}, exact {exact}");
    assert!(norm1(&a, n) * est < 1e3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn lu_solution_has_small_backward_error(n in 1usize..80, seed in any::<u64>()) {
        let (a, b) = random_system(n, seed);
        let x = Lu::factor(a.clone(), n).unwrap().solve(&b);
        let r = matvec(&a, n, n, &x);
        let res = r.iter().zip(&b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        prop_assert!(res <= 1e-11 * n as f64);
    }
}
