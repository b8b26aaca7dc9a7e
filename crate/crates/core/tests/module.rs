//! The cell module, its sign twist, the generic-q action and the
//! translation expansion.

use proptest::prelude::*;

use subregkl::affine::AffineWeyl;
use subregkl::cell::Cell;
use subregkl::laurent::LaurentPoly;
use subregkl::module::*;
use subregkl::rootdata::CartanType;

fn cell_of(s: &str) -> Cell {
    let g = AffineWeyl::new(s.parse().unwrap()).unwrap();
    match g.kind() {
        CartanType::C(_) => Cell::new(g, 12),
        _ => Cell::full(g).unwrap(),
    }
}

const TYPES: [&str; 7] = ["G2", "B3", "B4", "F4", "C2", "C3", "C4"];

#[test]
fn untwisted_action_examples() {
    let cell = cell_of("B3");
    let s0 = cell.find_word(&[0]).unwrap();
    let e1 = ModuleVector::unit(1i64);
    let v = act_e(&cell, 0, &e1).unwrap();
    assert_eq!(v.c1, 1);
    assert_eq!(v.coeff(s0), 1);
    assert_eq!(v.cell.len(), 1);
    for t in 1..=3 {
        assert_eq!(act_e(&cell, t, &e1).unwrap(), e1);
    }
    for id in cell.ordered_ids() {
        let mu = cell.nodes[id].mu;
        let v = act_e(&cell, mu, &ModuleVector::basis(id, 1)).unwrap();
        assert_eq!(v, ModuleVector::basis(id, -1));
    }
}

#[test]
fn twisted_action_examples() {
    let cell = cell_of("B3");
    let s0 = cell.find_word(&[0]).unwrap();
    let c1 = ModuleVector::unit(1i64);
    let v = act_twisted(&cell, 0, &c1).unwrap();
    assert_eq!((v.c1, v.coeff(s0), v.cell.len()), (-1, -1, 1));
    let cs0 = ModuleVector::basis(s0, 1i64);
    assert_eq!(act_twisted(&cell, 0, &cs0).unwrap(), cs0);
    // No Γ_0 neighbour of s0 has μ equal to s1 or s3.
    for t in [1, 3] {
        assert_eq!(act_twisted(&cell, t, &cs0).unwrap(), cs0.negated());
    }
    for t in 1..=3 {
        assert_eq!(act_twisted(&cell, t, &c1).unwrap(), c1.negated());
    }
}

#[test]
fn hecke_action_on_unit() {
    let cell = cell_of("G2");
    let s0 = cell.find_word(&[0]).unwrap();
    let v = act_hecke(&cell, 0, &ModuleVector::unit(LaurentPoly::one())).unwrap();
    assert_eq!(v.c1, LaurentPoly::q());
    assert_eq!(v.coeff(s0), LaurentPoly::v());
    let v = act_hecke(&cell, 2, &ModuleVector::unit(LaurentPoly::one())).unwrap();
    assert_eq!(v, ModuleVector::unit(LaurentPoly::q()));
}

#[test]
fn braid_relations_hold_on_every_window() {
    for t in TYPES {
        let cell = cell_of(t);
        assert!(check_braid_relations(&cell, false).unwrap().is_empty(), "{t}");
        assert!(check_braid_relations(&cell, true).unwrap().is_empty(), "{t}");
    }
}

#[test]
fn hecke_relations_hold_on_every_window() {
    for t in TYPES {
        let cell = cell_of(t);
        let f = check_hecke_relations(&cell).unwrap();
        assert!(f.is_empty(), "{t}: {f:?}");
    }
}

#[test]
fn twisted_action_is_block_triangular() {
    for t in TYPES {
        let cell = cell_of(t);
        assert!(check_block_triangular(&cell).unwrap().is_empty(), "{t}");
    }
}

#[test]
fn kac_moody_cartan_model_intertwines() {
    for t in TYPES {
        let cell = cell_of(t);
        let rep = kacmoody_cartan_check(&cell).unwrap();
        assert_eq!(rep.len(), cell.group.rank() + 1);
        assert!(rep.iter().all(|r| r.passed), "{t}: {rep:?}");
    }
    let cell = cell_of("B3");
    let rep = kacmoody_cartan_check(&cell).unwrap();
    assert!(rep.iter().all(|r| r.checked == 8));
}

/// The rule `t(e_1) = −e_1` for finite `t` is incompatible with the braid
/// relation between `s_0` and a neighbouring `t`.
#[test]
fn negating_e1_under_finite_reflections_breaks_braid_relation() {
    for name in ["G2", "C2", "B3", "F4"] {
        let cell = cell_of(name);
        let act_alt = |t: usize, v: &ModuleVector<i64>| -> ModuleVector<i64> {
            let mut out = act_e(&cell, t, &ModuleVector { c1: 0, cell: v.cell.clone() }).unwrap();
            if t == 0 {
                out.add(&act_e(&cell, 0, &ModuleVector::unit(v.c1)).unwrap());
            } else {
                out.c1 -= v.c1;
            }
            out
        };
        let t = (1..=cell.group.rank())
            .find(|&j| cell.group.sys.coxeter[0][j] > 2)
            .unwrap();
        let m = cell.group.sys.coxeter[0][t] as usize;
        let run = |first: usize, second: usize| {
            let mut v = ModuleVector::unit(1i64);
            for k in 0..m {
                v = act_alt(if k % 2 == 0 { second } else { first }, &v);
            }
            v
        };
        let lhs = if m % 2 == 0 { run(0, t) } else { run(t, 0) };
        let rhs = if m % 2 == 0 { run(t, 0) } else { run(0, t) };
        assert_ne!(lhs, rhs, "{name}");
    }
}

#[test]
fn expansion_of_zero_is_the_unit() {
    for t in TYPES {
        let cell = cell_of(t);
        let e = expand_translation(&cell, &vec![0; cell.group.rank()]).unwrap();
        assert_eq!(e.c1, 1);
        assert!(e.coeffs.is_empty());
    }
}

#[test]
fn expansion_of_theta_is_c1_plus_c_s0() {
    for t in ["B3", "C2", "F4", "G2"] {
        let cell = cell_of(t);
        let th = cell.group.sys.theta.clone();
        let e = expand_translation(&cell, &th).unwrap();
        let s0 = cell.find_word(&[0]).unwrap();
        assert_eq!(e.c1, 1, "{t}");
        assert_eq!(e.get(s0), 1, "{t}");
        assert_eq!(e.coeffs.len(), 1, "{t}");
    }
}

#[test]
fn expansion_needs_a_large_enough_window() {
    let g = AffineWeyl::new("C2".parse().unwrap()).unwrap();
    let mut cell = Cell::new(g, 3);
    assert!(expand_translation(&cell, &[3, 1]).is_err());
    let e = expand_translation_grow(&mut cell, &[3, 1]).unwrap();
    assert_eq!(e.c1, 1);
    assert!(cell.growth_events >= 1);
}

fn small_gamma(rank: usize) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(-3i64..=3, rank)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn two_reduced_words_give_the_same_expansion_g2(gamma in small_gamma(2)) {
        let cell = cell_of("G2");
        let a = expand_translation_with(&cell, &gamma, WordChoice::Canonical).unwrap();
        let b = expand_translation_with(&cell, &gamma, WordChoice::ReversedGreedy).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.c1, 1);
    }

    #[test]
    fn two_reduced_words_give_the_same_expansion_b3(gamma in small_gamma(3)) {
        let cell = cell_of("B3");
        let a = expand_translation_with(&cell, &gamma, WordChoice::Canonical).unwrap();
        let b = expand_translation_with(&cell, &gamma, WordChoice::ReversedGreedy).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.c1, 1);
    }

    #[test]
    fn two_reduced_words_give_the_same_expansion_c3(gamma in small_gamma(3)) {
        let g = AffineWeyl::new("C3".parse().unwrap()).unwrap();
        let mut cell = Cell::new(g, 4);
        let a = expand_translation_grow(&mut cell, &gamma).unwrap();
        let b = expand_translation_with(&cell, &gamma, WordChoice::ReversedGreedy).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.c1, 1);
    }
}
