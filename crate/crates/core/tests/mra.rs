use std::sync::Arc;

use ndarray::Array2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use waveleton::mra::{
    coefficients_2d_csv, coefficients_csv, dwt_1d, dwt_2d, fock_norm, idwt_1d, idwt_2d, packet_best_basis, scale_truncate,
    scale_truncate_2d, MraCoefficients, NodeId, PacketTree, ScaleSelection,
};
use waveleton::wavelet::{build_filter_pair, Family, FilterPair};
use waveleton::Error;

// Single-level periodised coefficients of x_i = sin(0.37 i) + 0.05 (i mod 5), i < 32, from
// PyWavelets 1.8.0 `pywt.dwt(x, name, mode="periodization")`. Its filter phase equals ours
// applied to the input advanced by 1 − L/2 samples.
const PYWT_DB3_A: [f64; 16] = [
    -1.0931810147747452, 0.4787103198110871, 1.471175264187472, 1.4507436884766978, 0.9543085776026965,
    0.0218923797092464, -1.0291794786235806, -1.167489474876767, -0.9385084067433407, 0.06419821426935614,
    1.0965074406872017, 1.448069755248757, 1.4166368068486401, 0.4008343810663432, -0.5418029911386807,
    -1.1645583106605186,
];
const PYWT_DB3_D: [f64; 16] = [
    -0.019166562166452905, 0.09489639288113577, -0.01141949663586717, -0.014491965125562126, -0.14513208171299546,
    0.014213104204523664, 0.08618174032528554, 0.01681956292601193, 0.0359300026593681, -0.09890106551798024,
    0.03207144021586725, 0.06632636344148264, -0.030363916186161632, -0.0139016520884578, -0.12531580692728153,
    0.29501442781482445,
];
const PYWT_SYM8_A: [f64; 16] = [
    0.5273515006752353, 1.4517258529065564, 1.447680356096542, 0.9616408175126324, -0.0007572110627587131,
    -1.046040986526994, -1.1588929726934807, -0.939846644015316, 0.09723898575495912, 1.0978729679893813,
    1.442249807559218, 1.4175258810722748, 0.37516297091657524, -0.5185212525556716, -1.2119554990616348,
    -1.0740774234779262,
];
const PYWT_SYM8_D: [f64; 16] = [
    -0.2464363629511864, 0.08488467038789685, -0.10710602958283924, -0.005700880803309881, 0.007810645352867372,
    0.10037692737341943, -0.014960402220740595, -0.08501387813356928, -0.007862869759630324, 0.007758437682898868,
    0.1001687345355225, -0.01521568228065043, -0.08624895363864853, -0.0006660262221308538, -0.0101526974311963,
    0.09560387957928243,
];

fn families() -> Vec<Arc<FilterPair>> {
    vec![
        build_filter_pair(Family::Haar, 1).unwrap(),
        build_filter_pair(Family::Daubechies, 2).unwrap(),
        build_filter_pair(Family::Daubechies, 3).unwrap(),
        build_filter_pair(Family::Symmlet, 8).unwrap(),
    ]
}

fn noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let n: f64 = b.iter().map(|y| y * y).sum();
    (d / n).sqrt()
}

#[test]
fn single_level_matches_pywavelets_up_to_phase() {
    let x: Vec<f64> = (0..32).map(|i| (0.37 * i as f64).sin() + 0.05 * (i % 5) as f64).collect();
    for (family, order, a_ref, d_ref) in
        [(Family::Daubechies, 3, PYWT_DB3_A, PYWT_DB3_D), (Family::Symmlet, 8, PYWT_SYM8_A, PYWT_SYM8_D)]
    {
        let f = build_filter_pair(family, order).unwrap();
        let t = 1 - f.len() as isize / 2;
        let shifted: Vec<f64> = (0..32).map(|i| x[(i + t).rem_euclid(32) as usize]).collect();
        let c = dwt_1d(&shifted, &f, 1).unwrap();
        for k in 0..16 {
            assert!((c.coarse[k] - a_ref[k]).abs() <= 1e-11, "{family} approx {k}");
            assert!((c.details[0][k] - d_ref[k]).abs() <= 1e-11, "{family} detail {k}");
        }
    }
}

#[test]
fn perfect_reconstruction_and_parseval_for_all_sizes() {
    for f in families() {
        for m in 3..=10 {
            let n = 1usize << m;
            let x = noise(n, m as u64);
            let levels = m.min(6);
            let c = dwt_1d(&x, &f, levels).unwrap();
            assert_eq!(c.flatten().len(), n);
            let energy: f64 = x.iter().map(|v| v * v).sum();
            assert!((c.energy() - energy).abs() <= 1e-10 * energy);
            assert!(rel_err(&idwt_1d(&c, &f).unwrap(), &x) <= 1e-12, "{} n={n}", f.family);
        }
    }
}

#[test]
fn constant_signal_has_no_details() {
    let f = build_filter_pair(Family::Daubechies, 2).unwrap();
    for levels in 1..=6 {
        let c = dwt_1d(&[3.5; 64], &f, levels).unwrap();
        assert!(c.details.iter().flatten().all(|d| d.abs() <= 1e-12));
    }
}

#[test]
fn vanishing_moments_annihilate_interior_polynomials() {
    let n = 256;
    for p in 1..=10 {
        let f = build_filter_pair(Family::Daubechies, p).unwrap();
        let coeffs: Vec<f64> = noise(p, 40 + p as u64);
        // degree p − 1 on [0, 1)
        let x: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / n as f64;
                coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
            })
            .collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let c = dwt_1d(&x, &f, 1).unwrap();
        let interior = (n - f.len()) / 2;
        let worst = c.details[0][..=interior].iter().fold(0.0f64, |m, d| m.max(d.abs()));
        assert!(worst <= 1e-8 * norm, "db{p}: {worst:e}");
    }
}

#[test]
fn transform_errors() {
    let f = build_filter_pair(Family::Haar, 1).unwrap();
    assert_eq!(dwt_1d(&[1.0; 12], &f, 1).unwrap_err(), Error::NonDyadicLength(12));
    assert_eq!(dwt_1d(&[1.0; 16], &f, 5).unwrap_err(), Error::TooManyLevels { levels: 5, max: 4 });
    let bad = MraCoefficients { coarse: vec![1.0; 2], details: vec![vec![0.0; 3]], length: 4 };
    assert!(matches!(idwt_1d(&bad, &f), Err(Error::MalformedCoefficients(_))));
    assert_eq!(dwt_2d(&Array2::zeros((8, 12)), &f, 1).unwrap_err(), Error::NonDyadicShape(8, 12));
}

#[test]
fn two_dimensional_separability() {
    let f = build_filter_pair(Family::Symmlet, 8).unwrap();
    let (u, v) = (noise(64, 1), noise(32, 2));
    let field = Array2::from_shape_fn((64, 32), |(i, j)| u[i] * v[j]);
    let levels = 3;
    let c = dwt_2d(&field, &f, levels).unwrap();
    let outer = |a: &[f64], b: &[f64]| Array2::from_shape_fn((a.len(), b.len()), |(i, j)| a[i] * b[j]);
    let close = |a: &Array2<f64>, b: &Array2<f64>| a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= 1e-12);
    let cu = dwt_1d(&u, &f, levels).unwrap();
    let cv = dwt_1d(&v, &f, levels).unwrap();
    assert!(close(&c.coarse, &outer(&cu.coarse, &cv.coarse)));
    for j in 0..levels {
        // approximations at detail level j come from a transform stopped there
        let au = dwt_1d(&u, &f, levels - j).unwrap().coarse;
        let av = dwt_1d(&v, &f, levels - j).unwrap().coarse;
        assert!(close(&c.details[j].low_high, &outer(&au, &cv.details[j])));
        assert!(close(&c.details[j].high_low, &outer(&cu.details[j], &av)));
        assert!(close(&c.details[j].high_high, &outer(&cu.details[j], &cv.details[j])));
    }
}

#[test]
fn two_dimensional_round_trip_at_512() {
    let f = build_filter_pair(Family::Symmlet, 8).unwrap();
    let x = noise(512 * 512, 5);
    let field = Array2::from_shape_vec((512, 512), x.clone()).unwrap();
    let c = dwt_2d(&field, &f, 4).unwrap();
    let energy: f64 = x.iter().map(|v| v * v).sum();
    assert!((c.energy() - energy).abs() <= 1e-10 * energy);
    let back = idwt_2d(&c, &f).unwrap();
    assert!(rel_err(back.as_slice().unwrap(), &x) <= 1e-12);
}

#[test]
fn constant_matrix_is_pure_coarse() {
    let f = build_filter_pair(Family::Daubechies, 3).unwrap();
    let c = dwt_2d(&Array2::from_elem((32, 32), 1.25), &f, 3).unwrap();
    for d in &c.details {
        for b in [&d.low_high, &d.high_low, &d.high_high] {
            assert!(b.iter().all(|v| v.abs() <= 1e-12));
        }
    }
}

#[test]
fn csv_dumps_have_one_row_per_coefficient() {
    let f = build_filter_pair(Family::Haar, 1).unwrap();
    let c = dwt_1d(&noise(16, 3), &f, 2).unwrap();
    let text = coefficients_csv(&c);
    assert_eq!(text.lines().count(), 17);
    assert_eq!(text.lines().next(), Some("level,band,index,value"));
    let c2 = dwt_2d(&Array2::from_elem((8, 8), 1.0), &f, 2).unwrap();
    assert_eq!(coefficients_2d_csv(&c2).lines().count(), 65);
}

/// Every admissible tiling of the subtree rooted at `node`.
fn all_tilings(node: NodeId, max_depth: usize) -> Vec<Vec<NodeId>> {
    let mut out = vec![vec![node]];
    if node.depth < max_depth {
        let l = all_tilings(NodeId { depth: node.depth + 1, index: 2 * node.index }, max_depth);
        let r = all_tilings(NodeId { depth: node.depth + 1, index: 2 * node.index + 1 }, max_depth);
        for a in &l {
            for b in &r {
                out.push(a.iter().chain(b).copied().collect());
            }
        }
    }
    out
}

fn exhaustive_minimum(tree: &PacketTree) -> f64 {
    all_tilings(NodeId { depth: 0, index: 0 }, tree.max_depth())
        .iter()
        .map(|t| tree.tiling_cost(t))
        .fold(f64::INFINITY, f64::min)
}

fn check_optimal(signal: &[f64], f: &FilterPair, depth: usize) {
    let tree = packet_best_basis(signal, f, depth).unwrap();
    assert!(tree.is_tiling(&tree.chosen_basis));
    let best = exhaustive_minimum(&tree);
    assert_eq!(tree.entropy, best);
    assert_eq!(tree.tiling_cost(&tree.chosen_basis), best);
}

#[test]
fn best_basis_on_sinusoid_and_dirac() {
    let f = build_filter_pair(Family::Daubechies, 3).unwrap();
    let sine: Vec<f64> = (0..64).map(|i| (2.0 * std::f64::consts::PI * i as f64 / 64.0).sin()).collect();
    check_optimal(&sine, &f, 3);
    let tree = packet_best_basis(&sine, &f, 3).unwrap();
    let dwt_basis = vec![
        NodeId { depth: 3, index: 0 },
        NodeId { depth: 3, index: 1 },
        NodeId { depth: 2, index: 1 },
        NodeId { depth: 1, index: 1 },
    ];
    assert!(tree.entropy <= tree.tiling_cost(&dwt_basis));

    let mut dirac = vec![0.0; 32];
    dirac[9] = 1.0;
    let tree = packet_best_basis(&dirac, &build_filter_pair(Family::Haar, 1).unwrap(), 2).unwrap();
    assert_eq!(tree.chosen_basis, vec![NodeId { depth: 0, index: 0 }]);
    assert_eq!(tree.entropy, 0.0);
    check_optimal(&dirac, &f, 2);
}

#[test]
fn zero_signal_keeps_the_root() {
    let tree = packet_best_basis(&[0.0; 16], &build_filter_pair(Family::Symmlet, 8).unwrap(), 3).unwrap();
    assert_eq!(tree.entropy, 0.0);
    assert_eq!(tree.chosen_basis, vec![NodeId { depth: 0, index: 0 }]);
}

#[test]
fn scale_truncation_cases() {
    let f = build_filter_pair(Family::Daubechies, 3).unwrap();
    let x = noise(128, 8);
    let c = dwt_1d(&x, &f, 4).unwrap();
    assert!(rel_err(&scale_truncate(&c, &ScaleSelection::all(4), &f).unwrap(), &x) <= 1e-12);
    assert!(scale_truncate(&c, &ScaleSelection::none(), &f).unwrap().iter().all(|v| *v == 0.0));
    assert_eq!(scale_truncate(&c, &ScaleSelection::up_to_depth(5), &f).unwrap_err(), Error::UnknownLevel(4));
    let field = Array2::from_shape_vec((32, 32), noise(1024, 9)).unwrap();
    let c2 = dwt_2d(&field, &f, 3).unwrap();
    let back = scale_truncate_2d(&c2, &ScaleSelection::all(3), &f).unwrap();
    assert!(rel_err(back.as_slice().unwrap(), field.as_slice().unwrap()) <= 1e-12);
}

#[test]
fn fock_norm_cases() {
    assert_eq!(fock_norm(0.0, &[&[0.0; 4]], &[&[0.5; 4]]).unwrap(), 0.0);
    let h = 0.05;
    let g: Vec<f64> = (0..200).map(|i| (-(i as f64 * h - 5.0).powi(2) / 2.0).exp()).collect();
    let mu = vec![h; 200];
    let direct: f64 = g.iter().map(|v| v * v * h).sum();
    assert!((fock_norm(0.0, &[&g], &[&mu]).unwrap() - direct).abs() <= 1e-12);
    let two = fock_norm(1.5, &[&g, &g], &[&mu, &mu]).unwrap();
    assert!((two - (2.25 + 2.0 * direct)).abs() <= 1e-12);
    assert!(matches!(fock_norm(0.0, &[&g], &[&mu[..10]]), Err(Error::ShapeMismatch(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn round_trip_property(m in 3usize..=10, seed in any::<u64>(), which in 0usize..4) {
        let f = &families()[which];
        let x = noise(1 << m, seed);
        let c = dwt_1d(&x, f, m).unwrap();
        prop_assert!(rel_err(&idwt_1d(&c, f).unwrap(), &x) <= 1e-12);
        let e: f64 = x.iter().map(|v| v * v).sum();
        prop_assert!((c.energy() - e).abs() <= 1e-10 * e);
    }

    #[test]
    fn best_basis_equals_exhaustive_minimum(m in 3usize..=6, depth in 1usize..=3, seed in any::<u64>(), which in 0usize..4) {
        let depth = depth.min(m);
        check_optimal(&noise(1 << m, seed), &families()[which], depth);
    }

    #[test]
    fn truncation_is_a_linear_projector(seed in any::<u64>(), mask in 0u8..32) {
        let f = build_filter_pair(Family::Symmlet, 8).unwrap();
        let keep = ScaleSelection { coarse: mask & 1 == 1, details: (0..4).filter(|j| mask >> (j + 1) & 1 == 1).collect() };
        let (x, y) = (noise(64, seed), noise(64, seed ^ 0xabcd));
        let t = |s: &[f64]| scale_truncate(&dwt_1d(s, &f, 4).unwrap(), &keep, &f).unwrap();
        let tx = t(&x);
        let twice = t(&tx);
        prop_assert!(tx.iter().zip(&twice).all(|(a, b)| (a - b).abs() <= 1e-12));
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 2.0 * a - b).collect();
        let lin: Vec<f64> = tx.iter().zip(t(&y)).map(|(a, b)| 2.0 * a - b).collect();
        prop_assert!(t(&sum).iter().zip(&lin).all(|(a, b)| (a - b).abs() <= 1e-12));
    }
}
