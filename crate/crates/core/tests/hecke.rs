//! Kazhdan–Lusztig tables and inverse values at `q = 1`.

use std::collections::HashMap;

use subregkl::affine::{AffineElement, AffineWeyl};
use subregkl::cell::Cell;
use subregkl::error::Error;
use subregkl::hecke::{default_bound, KlTable};
use subregkl::laurent::LaurentPoly;
use subregkl::module::expand_translation;
use subregkl::rootdata::CartanType;
use subregkl::verify::{run_verify, Methods, VerifyConfig};
use subregkl::cache::Cache;

fn group(s: &str) -> AffineWeyl {
    AffineWeyl::new(s.parse().unwrap()).unwrap()
}

/// Elements of length `≤ bound`, sorted by length.
fn ball(g: &AffineWeyl, bound: usize) -> Vec<AffineElement> {
    let mut seen: HashMap<AffineElement, usize> = HashMap::new();
    seen.insert(g.identity(), 0);
    let mut layer = vec![g.identity()];
    let mut all = layer.clone();
    for l in 1..=bound {
        let mut next = Vec::new();
        for x in &layer {
            for j in g.sys.generators() {
                let y = g.lmul_gen(j, x);
                if !seen.contains_key(&y) {
                    seen.insert(y.clone(), l);
                    next.push(y);
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

/// Polynomials in `q` as coefficient vectors.
type QPoly = Vec<i64>;

fn add_shifted(acc: &mut QPoly, p: &QPoly, shift: usize, c: i64) {
    if acc.len() < p.len() + shift {
        acc.resize(p.len() + shift, 0);
    }
    for (k, &v) in p.iter().enumerate() {
        acc[k + shift] += c * v;
    }
}

fn trim(mut p: QPoly) -> QPoly {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

/// Textbook recursion over all pairs of a length ball, with no Bruhat
/// order: `P_{x,v} = 0` falls out for incomparable pairs.
fn naive_kl(g: &AffineWeyl, bound: usize) -> (Vec<AffineElement>, HashMap<(usize, usize), QPoly>) {
    let elts = ball(g, bound);
    let idx: HashMap<AffineElement, usize> = elts.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let len: Vec<usize> = elts.iter().map(|e| g.length(e)).collect();
    let mut p: HashMap<(usize, usize), QPoly> = HashMap::new();
    let get = |p: &HashMap<(usize, usize), QPoly>, x: usize, w: usize| p.get(&(x, w)).cloned().unwrap_or_default();
    for w in 0..elts.len() {
        if len[w] == 0 {
            p.insert((w, w), vec![1]);
            continue;
        }
        let s = g.left_descents(&elts[w])[0];
        let v = idx[&g.lmul_gen(s, &elts[w])];
        let mus: Vec<(usize, i64)> = (0..elts.len())
            .filter(|&z| len[z] < len[v] && g.is_left_descent(s, &elts[z]))
            .filter_map(|z| {
                let d = len[v] - len[z];
                if d % 2 == 0 {
                    return None;
                }
                let c = get(&p, z, v).get((d - 1) / 2).copied().unwrap_or(0);
                (c != 0).then_some((z, c))
            })
            .collect();
        for x in 0..elts.len() {
            if len[x] > len[w] {
                continue;
            }
            let sx = idx.get(&g.lmul_gen(s, &elts[x])).copied();
            let mut acc = QPoly::new();
            if g.is_left_descent(s, &elts[x]) {
                add_shifted(&mut acc, &get(&p, sx.unwrap(), v), 0, 1);
                add_shifted(&mut acc, &get(&p, x, v), 1, 1);
            } else {
                if let Some(sx) = sx {
                    add_shifted(&mut acc, &get(&p, sx, v), 1, 1);
                }
                add_shifted(&mut acc, &get(&p, x, v), 0, 1);
            }
            for &(z, mu) in &mus {
                add_shifted(&mut acc, &get(&p, x, z), (len[w] - len[z]) / 2, -mu);
            }
            let acc = trim(acc);
            if !acc.is_empty() {
                p.insert((x, w), acc);
            }
        }
    }
    (elts, p)
}

#[test]
fn table_matches_naive_recursion() {
    for (t, bound) in [("G2", 9), ("C2", 8), ("B3", 6)] {
        let g = group(t);
        let table = KlTable::build(&g, bound);
        let (elts, naive) = naive_kl(&g, bound);
        assert_eq!(table.len(), elts.len(), "{t}");
        for (x, ex) in elts.iter().enumerate() {
            for (w, ew) in elts.iter().enumerate() {
                let expected = LaurentPoly::from_q_coeffs(&naive.get(&(x, w)).cloned().unwrap_or_default());
                assert_eq!(table.p(ex, ew).unwrap(), expected, "{t}: P_{{{ex},{ew}}}");
            }
        }
    }
}

#[test]
fn diagonal_and_dihedral_parabolic_entries_are_one() {
    let g = group("G2");
    let table = KlTable::build(&g, 8);
    for e in &table.elements {
        assert_eq!(table.p(e, e).unwrap(), LaurentPoly::one());
    }
    // ⟨s1, s2⟩ is dihedral of order 12, where every P_{x,w} with x ≤ w is 1.
    let para: Vec<AffineElement> = table
        .elements
        .iter()
        .filter(|e| g.reduced_word(e).iter().all(|&s| s != 0))
        .cloned()
        .collect();
    assert_eq!(para.len(), 12);
    let top = para.iter().max_by_key(|e| g.length(e)).unwrap();
    for x in &para {
        assert_eq!(table.p(x, top).unwrap(), LaurentPoly::one());
    }
}

#[test]
fn positivity_and_degree_bound() {
    for t in ["G2", "C2", "B3", "F4"] {
        let g = group(t);
        let table = KlTable::build(&g, if t == "F4" { 8 } else { 12 });
        assert!(table.is_positive(), "{t}");
        let rep = table.degree_report();
        assert_eq!(rep.violations, 0, "{t}");
        assert!(rep.pairs > 0);
    }
}

#[test]
fn inversion_identity_on_every_minimal_element() {
    for (t, bound) in [("G2", 12), ("C2", 10), ("B3", 8)] {
        let g = group(t);
        let table = KlTable::build(&g, bound);
        for i in table.minimal_elements() {
            assert!(table.check_inversion_identity(&table.elements[i]).unwrap(), "{t}");
        }
    }
}

#[test]
fn inverse_values_at_one_match_the_polynomials() {
    let g = group("G2");
    let table = KlTable::build(&g, 12);
    for i in table.minimal_elements() {
        let w = &table.elements[i];
        let at_one: HashMap<usize, i64> = table.inverse_column_at_one(w).unwrap().into_iter().collect();
        let full: HashMap<usize, i64> = table
            .inverse_column(w)
            .unwrap()
            .into_iter()
            .map(|(v, p)| (v, p.eval_one()))
            .filter(|&(_, c)| c != 0)
            .collect();
        assert_eq!(at_one, full);
    }
}

#[test]
fn small_inverse_values() {
    let g = group("G2");
    let table = KlTable::build(&g, 8);
    let e = g.identity();
    let s0 = g.generator(0);
    assert_eq!(table.inverse_kl_at_one(&e, &e).unwrap(), 1);
    assert_eq!(table.inverse_kl_at_one(&s0, &s0).unwrap(), 1);
    for x in &table.elements {
        assert_eq!(table.inverse_kl_at_one(x, x).unwrap(), 1);
    }
    let b = group("B3");
    let tb = KlTable::build(&b, 4);
    assert_eq!(tb.inverse_kl_at_one(&b.generator(0), &b.identity()).unwrap(), 0);
}

#[test]
fn hecke_values_equal_cell_module_values() {
    for (t, bound) in [("G2", 16), ("C2", 14), ("B3", 10)] {
        let g = group(t);
        let table = KlTable::build(&g, bound);
        let mut cell = match g.kind() {
            CartanType::C(_) => Cell::new(g.clone(), bound + 2),
            _ => Cell::full(g.clone()).unwrap(),
        };
        cell.grow_to(bound + 2);
        let mut checked = 0;
        for i in table.minimal_elements() {
            let w = &table.elements[i];
            let gamma = g.nu_of(w).unwrap();
            let exp = expand_translation(&cell, &gamma).unwrap();
            let col: HashMap<usize, i64> = table.inverse_column_at_one(w).unwrap().into_iter().collect();
            assert_eq!(col.get(&table.index_of(&g.identity()).unwrap()).copied().unwrap_or(0), exp.c1);
            for id in cell.ordered_ids() {
                let v = &cell.nodes[id].elt;
                let Some(vi) = table.index_of(v) else { continue };
                assert_eq!(col.get(&vi).copied().unwrap_or(0), exp.get(id), "{t} γ={gamma:?}");
                checked += 1;
            }
        }
        assert!(checked > 50, "{t}: {checked}");
    }
}

#[test]
fn budget_and_out_of_table_queries() {
    let g = group("G2");
    let table = KlTable::build_with_budget(&g, default_bound(CartanType::G2), 200);
    assert!(table.complete < default_bound(CartanType::G2));
    assert!(table.len() <= 200);
    let far = g.w_nu(&[6, 3]).unwrap();
    assert!(matches!(table.inverse_kl_at_one(&g.identity(), &far), Err(Error::OutOfTable { .. })));
}

#[test]
fn verify_marks_budget_exhaustion() {
    let mut config = VerifyConfig::new(CartanType::G2, 2);
    config.methods = Methods { formula: true, hecke: true, cellmod: false };
    config.max_elements = 100;
    config.audit = false;
    let (report, _) = run_verify(&config, &Cache::disabled()).unwrap();
    let info = report.hecke.unwrap();
    assert!(info.budget_exceeded);
    assert!(report.summary.hecke_out_of_table > 0);
    assert_eq!(report.summary.mismatches, 0);
}
