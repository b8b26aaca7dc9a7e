//! Exact quasi-polynomial fits of oracle samples.

use num_rational::BigRational;
use proptest::prelude::*;

use subregkl::affine::AffineWeyl;
use subregkl::cell::Cell;
use subregkl::closed::box_points;
use subregkl::quasipoly::{
    fit, fit_with_holdout, oracle_samples, scan_minimal, shell_points, FitOutcome, Samples,
};
use subregkl::rootdata::CartanType;

fn cell_of(k: CartanType) -> Cell {
    let g = AffineWeyl::new(k).unwrap();
    match k {
        CartanType::C(_) => Cell::new(g, 8),
        _ => Cell::full(g).unwrap(),
    }
}

fn samples_for(k: CartanType, label: &str, radius: i64) -> Samples {
    let mut cell = cell_of(k);
    let id = cell.find_label(label).unwrap();
    oracle_samples(&mut cell, id, &box_points(k.rank(), radius)).unwrap()
}

#[test]
fn b3_label_is_quasi_polynomial_of_period_two_degree_two() {
    let mut cell = cell_of(CartanType::B(3));
    let id = cell.find_label("e1+e2").unwrap();
    let (outcome, rep) = fit_with_holdout(&mut cell, id, 2, 2, 3, 4).unwrap();
    assert!(outcome.is_feasible());
    assert!(rep.holdout_checked > 0);
    assert!(rep.holdout_mismatches.is_empty());
}

#[test]
fn g2_labels_fit_period_six_degree_two_with_holdout() {
    let mut cell = cell_of(CartanType::G2);
    for l in ["s0", "s1s0", "s2s1s0", "s0s1s2s1s2s1s0"] {
        let id = cell.find_label(l).unwrap();
        let (outcome, rep) = fit_with_holdout(&mut cell, id, 6, 2, 9, 11).unwrap();
        assert!(outcome.is_feasible(), "{l}");
        assert_eq!(rep.holdout_checked, 23 * 23 - 19 * 19);
        assert!(rep.holdout_mismatches.is_empty(), "{l}");
    }
}

#[test]
fn g2_minimal_periods_on_box_ten() {
    let expected = [
        ("s0", (6, 2)),
        ("s1s0", (6, 2)),
        ("s2s1s0", (2, 2)),
        ("s1s2s1s0", (3, 2)),
        ("s0s1s2s1s0", (3, 2)),
        ("s2s1s2s1s0", (2, 2)),
        ("s1s2s1s2s1s0", (6, 2)),
        ("s0s1s2s1s2s1s0", (6, 2)),
    ];
    for (l, min) in expected {
        let s = samples_for(CartanType::G2, l, 10);
        let rep = scan_minimal(&s, 12, 4).unwrap();
        assert_eq!(rep.minimal, Some(min), "{l}");
        assert!(rep.monotonicity_violations.is_empty(), "{l}");
    }
}

/// With period 6 on the box of radius 8, some residue classes meet an axis
/// in only 2 values, which cannot determine a quadratic term.
#[test]
fn g2_box_eight_is_too_small_for_period_six() {
    let s = samples_for(CartanType::G2, "s0", 8);
    match fit(&s, 6, 2).unwrap() {
        FitOutcome::InsufficientSamples { samples, monomials, .. } => {
            assert_eq!(monomials, 6);
            assert!(samples == 4 || samples == 6, "{samples}");
        }
        other => panic!("{}", other.tag()),
    }
}

/// Period 4 and degree 4 interpolate the box of radius 10 but fail beyond
/// it; the degree-first scan order does not select this fit.
#[test]
fn high_degree_fits_can_overfit_a_box() {
    let mut cell = cell_of(CartanType::G2);
    let id = cell.find_label("s0").unwrap();
    let (outcome, rep) = fit_with_holdout(&mut cell, id, 4, 4, 10, 11).unwrap();
    assert!(outcome.is_feasible());
    assert!(!rep.holdout_mismatches.is_empty());
}

#[test]
fn c2_first_label_is_not_quasi_polynomial_across_the_wall() {
    let s = samples_for(CartanType::C(2), "e1", 6);
    assert!(s.keys().any(|g| g[0] < 0) && s.keys().any(|g| g[0] > 0));
    for l in 1..=6i64 {
        for d in 0..=3u32 {
            let o = fit(&s, l, d).unwrap();
            assert!(!o.is_feasible(), "l={l} d={d}");
            // Every residue class meets each axis in at least d + 1 values.
            if 13 / l > d as i64 {
                assert!(matches!(o, FitOutcome::Infeasible { .. }), "l={l} d={d}: {}", o.tag());
            }
        }
    }
}

#[test]
fn shell_points_exclude_the_inner_box() {
    let pts = shell_points(2, 3, 4);
    assert_eq!(pts.len(), 81 - 25);
    assert!(pts.iter().all(|g| g.iter().map(|x| x.abs()).max().unwrap() >= 3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// A random period-2 quasi-polynomial of degree 2 is recovered exactly
    /// and extrapolates beyond the sampled box.
    #[test]
    fn random_quasi_polynomials_are_recovered(
        coeffs in proptest::collection::vec(proptest::collection::vec(-5i64..=5, 6), 4),
        scale in 1i64..4,
    ) {
        let eval = |g: &[i64]| -> i64 {
            let c = &coeffs[(g[0].rem_euclid(2) * 2 + g[1].rem_euclid(2)) as usize];
            let (x, y) = (g[0], g[1]);
            scale * (c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y)
        };
        let s: Samples = box_points(2, 4).into_iter().map(|g| { let v = eval(&g); (g, v) }).collect();
        match fit(&s, 2, 2).unwrap() {
            FitOutcome::Feasible(qp) => {
                for g in box_points(2, 7) {
                    prop_assert_eq!(qp.eval(&g), Some(BigRational::from_integer(eval(&g).into())));
                }
            }
            other => prop_assert!(false, "{}", other.tag()),
        }
        let rep = scan_minimal(&s, 4, 2).unwrap();
        prop_assert!(rep.monotonicity_violations.is_empty());
        prop_assert!(rep.minimal.is_some());
    }
}
