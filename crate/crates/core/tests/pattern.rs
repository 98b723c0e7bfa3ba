use std::f64::consts::PI;

use ndarray::Array2;
use proptest::prelude::*;
use waveleton::dynamics::{FieldKind, PhaseSpaceGrid, WignerField};
use waveleton::ensembles::{wigner_from_wavefunction, WavefunctionGrid};
use waveleton::pattern::{analyze, analyze_trajectory, classify, Label, PatternReport, Thresholds};
use waveleton::Error;

fn gaussian(sigma: f64, n: usize) -> WignerField {
    let grid = PhaseSpaceGrid::symmetric(8.0, 8.0, n).unwrap();
    WignerField::gaussian(grid, 0.1, 1.0, 0.3, -0.2, sigma, sigma).unwrap()
}

fn pattern(values: Array2<f64>) -> WignerField {
    let n = values.nrows();
    let grid = PhaseSpaceGrid::new((0.0, n as f64), (0.0, n as f64), n, n).unwrap();
    WignerField::new(grid, values, 0.0, 1.0, FieldKind::Pattern).unwrap()
}

#[test]
fn sharp_gaussian_is_localized_with_analytic_top_mass() {
    let sigma = 0.5;
    let w = gaussian(sigma, 256);
    let r = analyze(&w, &Thresholds::default()).unwrap();
    // 90% of an isotropic Gaussian lies in the disc of area 2πσ² ln 10
    let oracle = 2.0 * PI * sigma * sigma * 10f64.ln() / (16.0 * 16.0);
    assert!(r.top_mass <= 0.05);
    assert!((r.top_mass - oracle).abs() <= 0.02 * oracle, "top_mass {} vs {oracle}", r.top_mass);
    assert_eq!(r.negativity_volume, 0.0);
    assert_eq!(r.stability_drift, None);
    assert_eq!(r.label, Label::Localized);
}

#[test]
fn frozen_gaussian_trajectory_is_a_waveleton() {
    let w = gaussian(0.5, 128);
    let snaps = vec![w.clone(), w.clone(), w];
    let r = analyze_trajectory(&snaps, &[0.0, 0.5, 1.0], &Thresholds::default()).unwrap();
    assert_eq!(r.stability_drift, Some(0.0));
    assert_eq!(r.label, Label::Waveleton);
}

#[test]
fn drift_is_relative_norm_change_per_unit_time() {
    let a = gaussian(0.5, 64);
    let mut b = a.clone();
    b.values.mapv_inplace(|v| 1.5 * v);
    let r = analyze_trajectory(&[a.clone(), b], &[0.0, 2.0], &Thresholds::default()).unwrap();
    assert!((r.stability_drift.unwrap() - 0.25).abs() < 1e-14);
    assert_eq!(r.label, Label::Localized);
    assert!(matches!(analyze_trajectory(&[a], &[0.0, 1.0], &Thresholds::default()), Err(Error::ShapeMismatch(_))));
}

#[test]
fn uniform_field_has_unit_participation_and_exact_top_mass() {
    let r = analyze(&pattern(Array2::from_elem((64, 64), 0.37)), &Thresholds::default()).unwrap();
    assert_eq!(r.participation_ratio, 1.0);
    assert!((r.top_mass - 0.9).abs() < 1e-15);
    assert!(r.shannon_entropy.abs() < 1e-12);
    assert_eq!(r.label, Label::ChaoticLike);
}

#[test]
fn cat_state_is_entangled_like_and_mixture_is_not() {
    let (hbar, q) = (0.1, (-4.0, 4.0));
    let n = 256;
    let cat = WavefunctionGrid::even_cat(q, n, hbar, 1.0, 1.0, 1.5).unwrap();
    let w = wigner_from_wavefunction(&cat, (-4.0, 4.0, 256), hbar).unwrap();
    let r = analyze(&w, &Thresholds::default()).unwrap();
    assert!(r.negativity_volume > 0.0);
    assert_eq!(r.label, Label::EntangledLike);

    let grid = w.grid;
    let s = (hbar / 2.0).sqrt();
    let lobe = |q0: f64| move |q: f64, p: f64| (-(q - q0).powi(2) / (2.0 * s * s) - p * p / (2.0 * s * s)).exp() / (2.0 * PI * s * s);
    let (l, rr) = (lobe(-1.5), lobe(1.5));
    let mix = WignerField::from_fn(grid, hbar, 1.0, FieldKind::Distribution, |q, p| 0.5 * (l(q, p) + rr(q, p))).unwrap();
    let m = analyze(&mix, &Thresholds::default()).unwrap();
    assert_eq!(m.negativity_volume, 0.0);
    assert_ne!(m.label, Label::EntangledLike);
}

#[test]
fn patterns_skip_the_negativity_branch() {
    let values = Array2::from_shape_fn((32, 32), |(i, j)| if (i + j) % 2 == 0 { 1.0 } else { -1.0 });
    let r = analyze(&pattern(values), &Thresholds::default()).unwrap();
    assert!(r.negativity_fraction > 0.4);
    assert_eq!(r.label, Label::ChaoticLike);
}

#[test]
fn empty_trajectory_is_rejected() {
    assert_eq!(analyze_trajectory(&[], &[], &Thresholds::default()), Err(Error::EmptyField));
}

fn report(top_mass: f64, pr: f64, neg: f64, drift: Option<f64>) -> PatternReport {
    PatternReport {
        shannon_entropy: 1.0,
        participation_ratio: pr,
        top_mass,
        negativity_volume: neg,
        negativity_fraction: neg,
        stability_drift: drift,
        quasi_probability: true,
        label: Label::Unclassified,
    }
}

#[test]
fn decision_tree_walk() {
    let t = Thresholds::default();
    assert_eq!(classify(&report(0.05, 0.01, 0.5, Some(0.0)), &t), Label::EntangledLike);
    assert_eq!(classify(&report(0.05, 0.01, 0.0, Some(0.001)), &t), Label::Waveleton);
    assert_eq!(classify(&report(0.05, 0.01, 0.0, Some(0.5)), &t), Label::Localized);
    assert_eq!(classify(&report(0.05, 0.01, 0.0, None), &t), Label::Localized);
    // a nonnegative diffuse blob that drifts falls through to the spread test
    assert_eq!(classify(&report(0.6, 0.5, 0.0, Some(0.5)), &t), Label::ChaoticLike);
    assert_eq!(classify(&report(0.6, 0.02, 0.0, Some(0.5)), &t), Label::Unclassified);
}

#[test]
fn report_serialisations() {
    let r = report(0.05, 0.25, 0.0, None);
    let text = r.to_text();
    assert!(text.contains("participation_ratio = 2.5"));
    assert!(text.contains("stability_drift = n/a"));
    let row = r.csv_row("x");
    assert_eq!(row.split(',').count(), PatternReport::CSV_HEADER.split(',').count());
}

fn field_strategy() -> impl Strategy<Value = Array2<f64>> {
    prop::collection::vec(-1.0f64..1.0, 16 * 16).prop_map(|v| Array2::from_shape_vec((16, 16), v).unwrap())
}

fn distribution(values: Array2<f64>) -> WignerField {
    let grid = PhaseSpaceGrid::symmetric(2.0, 2.0, 16).unwrap();
    WignerField::new(grid, values, 0.1, 1.0, FieldKind::Distribution).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metrics_are_flip_invariant(v in field_strategy(), flip_q in any::<bool>()) {
        let t = Thresholds::default();
        let a = analyze(&distribution(v.clone()), &t).unwrap();
        let flipped = if flip_q {
            Array2::from_shape_fn((16, 16), |(i, j)| v[[15 - i, j]])
        } else {
            Array2::from_shape_fn((16, 16), |(i, j)| v[[i, 15 - j]])
        };
        let b = analyze(&distribution(flipped), &t).unwrap();
        prop_assert!((a.shannon_entropy - b.shannon_entropy).abs() <= 1e-12);
        prop_assert!((a.participation_ratio - b.participation_ratio).abs() <= 1e-12);
        prop_assert!((a.top_mass - b.top_mass).abs() <= 1e-12);
        prop_assert!((a.negativity_volume - b.negativity_volume).abs() <= 1e-12);
        prop_assert_eq!(a.label, b.label);
    }

    #[test]
    fn positive_scaling_keeps_shape_metrics(v in field_strategy(), c in 1e-3f64..1e3) {
        let t = Thresholds::default();
        let a = analyze(&distribution(v.clone()), &t).unwrap();
        let b = analyze(&distribution(v.mapv(|x| c * x)), &t).unwrap();
        prop_assert!((a.participation_ratio - b.participation_ratio).abs() <= 1e-12);
        prop_assert!((a.top_mass - b.top_mass).abs() <= 1e-12);
        prop_assert!((b.negativity_volume - c * a.negativity_volume).abs() <= 1e-12 * c.max(1.0));
        prop_assert_eq!(a.label, b.label);
    }

    #[test]
    fn negativity_vanishes_exactly_for_nonnegative_fields(v in field_strategy()) {
        let r = analyze(&distribution(v.mapv(f64::abs)), &Thresholds::default()).unwrap();
        prop_assert_eq!(r.negativity_volume, 0.0);
        prop_assert!(r.participation_ratio > 0.0 && r.participation_ratio <= 1.0);
    }

    #[test]
    fn classify_is_pure(tm in 0.0f64..1.0, pr in 0.0f64..1.0, neg in 0.0f64..0.01, drift in proptest::option::of(0.0f64..0.1)) {
        let r = report(tm, pr, neg, drift);
        let t = Thresholds::default();
        prop_assert_eq!(classify(&r, &t), classify(&r.clone(), &t));
    }
}
