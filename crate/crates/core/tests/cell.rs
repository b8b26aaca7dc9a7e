//! Enumeration of the left cell `c⁰_subreg`, its μ map and the graph Γ_0.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use subregkl::affine::{AffineElement, AffineWeyl, Word};
use subregkl::cell::{
    bruhat_rank_type_c, bruhat_rank_type_c_displayed, count_reduced_words, is_subregular, Cell,
};
use subregkl::rootdata::CartanType;

fn group(s: &str) -> AffineWeyl {
    AffineWeyl::new(s.parse().unwrap()).unwrap()
}

fn cell_of(s: &str) -> Cell {
    let g = group(s);
    match g.kind() {
        CartanType::C(_) => Cell::new(g, 12),
        _ => Cell::full(g).unwrap(),
    }
}

/// All elements of length `≤ bound`, by breadth-first search.
fn ball(g: &AffineWeyl, bound: usize) -> Vec<AffineElement> {
    let mut seen: HashSet<AffineElement> = HashSet::new();
    let mut layer = vec![g.identity()];
    seen.insert(g.identity());
    let mut all = layer.clone();
    for _ in 0..bound {
        let mut next = Vec::new();
        for x in &layer {
            for j in g.sys.generators() {
                let y = g.lmul_gen(j, x);
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

/// Γ_0 adjacency over the whole enumerated window.
fn adjacency(cell: &Cell) -> BTreeMap<usize, BTreeSet<usize>> {
    let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for id in cell.ordered_ids() {
        adj.entry(id).or_default();
    }
    for (a, b) in cell.edges() {
        adj.entry(a).or_default().insert(b);
        adj.entry(b).or_default().insert(a);
    }
    adj
}

/// Arm lengths of a tree with exactly one branch vertex.
fn arms(adj: &BTreeMap<usize, BTreeSet<usize>>, branch: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for &start in &adj[&branch] {
        let (mut prev, mut cur, mut len) = (branch, start, 1);
        loop {
            let nxt: Vec<usize> = adj[&cur].iter().copied().filter(|&x| x != prev).collect();
            if nxt.len() != 1 {
                assert!(nxt.is_empty(), "second branch vertex");
                break;
            }
            prev = cur;
            cur = nxt[0];
            len += 1;
        }
        out.push(len);
    }
    out.sort();
    out
}

fn words(cell: &Cell) -> BTreeSet<Word> {
    cell.nodes.iter().map(|n| n.word.clone()).collect()
}

#[test]
fn g2_cell_matches_listed_elements() {
    let cell = cell_of("G2");
    assert_eq!(cell.len(), 8);
    // ν in (α∨, β∨) coordinates; s0 s1 s2 s1 s0 has ν = 3α∨ + 2β∨.
    let expected: BTreeMap<Word, Vec<i64>> = [
        (vec![0], vec![2, 1]),
        (vec![1, 0], vec![1, 1]),
        (vec![2, 1, 0], vec![1, 0]),
        (vec![1, 2, 1, 0], vec![-1, 0]),
        (vec![0, 1, 2, 1, 0], vec![3, 2]),
        (vec![2, 1, 2, 1, 0], vec![-1, -1]),
        (vec![1, 2, 1, 2, 1, 0], vec![-2, -1]),
        (vec![0, 1, 2, 1, 2, 1, 0], vec![4, 2]),
    ]
    .into_iter()
    .collect();
    let got: BTreeMap<Word, Vec<i64>> = cell
        .nodes
        .iter()
        .map(|n| (n.word.clone(), n.nu.clone()))
        .collect();
    assert_eq!(got, expected);
}

#[test]
fn g2_listed_nu_three_alpha_plus_beta_is_not_a_cell_label() {
    let g = group("G2");
    let w = g.w_nu(&[3, 1]).unwrap();
    assert!(!is_subregular(&g, &w) || g.length(&w) != 5);
    assert_eq!(g.nu_of(&g.from_word(&[0, 1, 2, 1, 0])).unwrap(), vec![3, 2]);
}

#[test]
fn f4_cell_matches_listed_words() {
    let cell = cell_of("F4");
    let expected: BTreeSet<Word> = [
        vec![0],
        vec![1, 0],
        vec![2, 1, 0],
        vec![3, 2, 1, 0],
        vec![4, 3, 2, 1, 0],
        vec![2, 3, 2, 1, 0],
        vec![1, 2, 3, 2, 1, 0],
        vec![0, 1, 2, 3, 2, 1, 0],
    ]
    .into_iter()
    .collect();
    assert_eq!(words(&cell), expected);
    assert!(cell.nodes.iter().all(|n| n.label != "?"));
    // The listed ε-labels are the images of the coroots under one linear
    // map. With label coordinates p, 2ν = M·p for the integer matrix M below.
    let m = [[2i64, 2, 0, 0], [4, 2, 2, 0], [3, 1, 1, 1], [2, 0, 0, 0]];
    let labelled: [(&[u8], [i64; 4]); 8] = [
        (&[0], [1, 1, 0, 0]),
        (&[1, 0], [1, 0, 1, 0]),
        (&[2, 1, 0], [1, 0, 0, 1]),
        (&[3, 2, 1, 0], [1, 0, 0, -1]),
        (&[4, 3, 2, 1, 0], [0, 1, 1, 0]),
        (&[2, 3, 2, 1, 0], [1, 0, -1, 0]),
        (&[1, 2, 3, 2, 1, 0], [1, -1, 0, 0]),
        (&[0, 1, 2, 3, 2, 1, 0], [2, 0, 0, 0]),
    ];
    for (w, p) in labelled {
        let id = cell.find_word(w).unwrap();
        let twice: Vec<i64> = m
            .iter()
            .map(|row| row.iter().zip(&p).map(|(a, b)| a * b).sum())
            .collect();
        let nu2: Vec<i64> = cell.nodes[id].nu.iter().map(|x| 2 * x).collect();
        assert_eq!(nu2, twice, "word {w:?}");
    }
}

#[test]
fn b3_cell_matches_listed_labels() {
    let cell = cell_of("B3");
    assert_eq!(cell.len(), 7);
    let labels: BTreeSet<String> = cell.nodes.iter().map(|n| n.label.clone()).collect();
    let expected: BTreeSet<String> = ["e1+e2", "e2+e3", "e1+e3", "e1-e3", "e1-e2", "-e1+e2", "2e1"]
        .into_iter()
        .map(String::from)
        .collect();
    assert_eq!(labels, expected);
    assert_eq!(
        cell.nodes[cell.find_label("2e1").unwrap()].word,
        vec![0, 2, 3, 2, 0]
    );
}

#[test]
fn b_n_cells_have_2n_plus_1_elements() {
    for n in 3..=5 {
        let cell = cell_of(&format!("B{n}"));
        assert_eq!(cell.len(), 2 * n + 1, "B{n}");
        let max = cell.nodes.iter().map(|x| x.len).max().unwrap();
        assert_eq!(max, 2 * n - 1);
    }
}

#[test]
fn type_c_cell_is_the_k_eps_family_with_ranks() {
    for n in [2usize, 3] {
        let cell = cell_of(&format!("C{n}"));
        let g = &cell.group;
        let mut seen = BTreeSet::new();
        let mut ranks = BTreeSet::new();
        for id in cell.ordered_ids() {
            let node = &cell.nodes[id];
            let eps = g.sys.coroot_to_eps(&node.nu);
            let nz: Vec<(usize, i64)> = eps
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.into())
                .map(|(i, c)| {
                    assert!(c.is_integer());
                    (i + 1, c.to_integer())
                })
                .collect();
            if nz == vec![(1, 1), (2, 1)] {
                assert_eq!(node.word, vec![0, 1, 0]);
                continue;
            }
            assert_eq!(nz.len(), 1, "unexpected element {}", node.label);
            let (i, k) = nz[0];
            let r = bruhat_rank_type_c(n, k, i).unwrap();
            assert_eq!(r, node.len, "C{n} k={k} i={i}");
            assert_eq!(r, g.length(&node.elt));
            assert!(ranks.insert(r), "rank not injective");
            seen.insert((k, i));
        }
        // Every (k, i) of rank ≤ 12 occurs.
        for k in -7i64..=7 {
            for i in 1..=n {
                if k != 0 && bruhat_rank_type_c(n, k, i).unwrap() <= 12 {
                    assert!(seen.contains(&(k, i)), "missing C{n} k={k} i={i}");
                }
            }
        }
    }
}

#[test]
fn displayed_rank_formula_swaps_even_k() {
    for n in 2..=4 {
        for k in -6i64..=6 {
            if k == 0 {
                continue;
            }
            for i in 1..=n {
                let d = bruhat_rank_type_c_displayed(n, k, i).unwrap();
                if k % 2 != 0 {
                    assert_eq!(d, bruhat_rank_type_c(n, k, i).unwrap());
                } else {
                    assert_eq!(d, bruhat_rank_type_c(n, -k, i).unwrap());
                }
            }
        }
    }
    assert_eq!(bruhat_rank_type_c(3, -1, 1).unwrap(), 6);
    assert!(bruhat_rank_type_c(3, 0, 1).is_err());
}

#[test]
fn cell_nodes_satisfy_membership_invariants() {
    for t in ["G2", "F4", "B3", "B4", "C2", "C3"] {
        let cell = cell_of(t);
        let g = &cell.group;
        for id in cell.ordered_ids() {
            let n = &cell.nodes[id];
            assert!(is_subregular(g, &n.elt), "{t} {}", n.label);
            assert_eq!(count_reduced_words(g, &n.elt, 5), 1);
            assert!(g.is_minimal(&n.elt));
            assert_eq!(g.left_descents(&n.elt), vec![n.mu]);
            assert_eq!(n.mu, n.word[0] as usize);
            assert_eq!(g.from_word(&n.word), n.elt);
            assert_eq!(g.w_nu(&n.nu).unwrap(), n.elt);
        }
        let adj = adjacency(&cell);
        for (a, nb) in &adj {
            assert!(nb.len() <= 3, "{t}: degree of {a}");
            for b in nb {
                let d = cell.nodes[*a].len as i64 - cell.nodes[*b].len as i64;
                assert_eq!(d.abs(), 1);
            }
        }
    }
}

#[test]
fn brute_force_audit_of_cell_membership() {
    for (t, bound) in [("G2", 8), ("C2", 9), ("B3", 7), ("C3", 8)] {
        let cell = cell_of(t);
        let g = &cell.group;
        let brute: BTreeSet<Word> = ball(g, bound)
            .into_iter()
            .filter(|x| g.is_minimal(x) && is_subregular(g, x))
            .map(|x| g.reduced_word(&x))
            .collect();
        let enumerated: BTreeSet<Word> = cell
            .nodes
            .iter()
            .filter(|n| n.len <= bound)
            .map(|n| n.word.clone())
            .collect();
        assert_eq!(brute, enumerated, "{t}");
    }
}

#[test]
fn gamma0_shapes() {
    // G2 and F4: affine E7, one branch vertex with arms 1, 3, 3.
    for t in ["G2", "F4"] {
        let cell = cell_of(t);
        let adj = adjacency(&cell);
        assert_eq!(cell.edges().len(), 7);
        let branch: Vec<usize> = adj.iter().filter(|(_, v)| v.len() == 3).map(|(k, _)| *k).collect();
        assert_eq!(branch.len(), 1, "{t}");
        assert_eq!(arms(&adj, branch[0]), vec![1, 3, 3], "{t}");
    }
    // B_n: affine D, two branch vertices, four leaves.
    for n in [3usize, 4] {
        let cell = cell_of(&format!("B{n}"));
        let adj = adjacency(&cell);
        assert_eq!(cell.edges().len(), 2 * n);
        let deg: Vec<usize> = adj.values().map(|v| v.len()).collect();
        assert_eq!(deg.iter().filter(|&&d| d == 3).count(), 2);
        assert_eq!(deg.iter().filter(|&&d| d == 1).count(), 4);
    }
    // C_n: a path with one pendant vertex ε1+ε2 at ε2.
    let cell = cell_of("C3");
    let adj = adjacency(&cell);
    let e12 = cell.find_label("e1+e2").unwrap();
    let e2 = cell.find_label("e2").unwrap();
    assert_eq!(adj[&e12].iter().copied().collect::<Vec<_>>(), vec![e2]);
}

#[test]
fn subregular_recognizer_examples() {
    let g = group("C3");
    assert!(is_subregular(&g, &g.generator(0)));
    assert!(is_subregular(&g, &g.from_word(&[0, 1, 0])));
    // m(s0, s1) = 4: the braid-length element has two reduced words.
    let x = g.from_word(&[1, 0, 1, 0]);
    assert_eq!(g.length(&x), 4);
    assert!(!is_subregular(&g, &x));
    assert!(!is_subregular(&g, &g.identity()));
    let g = group("G2");
    assert!(!is_subregular(&g, &g.from_word(&[2, 1, 2, 1, 2, 1])));
}

#[test]
fn c2_window_seven() {
    let g = group("C2");
    let cell = Cell::new(g, 7);
    let got = cell.ordered_ids().len();
    // ε1+ε2 plus N_{k,i} ≤ 7: ±ε1, ±ε2, 2ε1, 2ε2, −2ε2.
    assert_eq!(got, 8);
}

#[test]
fn window_growth_is_logged_and_idempotent() {
    let g = group("C2");
    let mut cell = Cell::new(g, 5);
    assert_eq!(cell.growth_events, 0);
    cell.grow_to(9);
    assert_eq!(cell.growth_events, 1);
    let n = cell.len();
    cell.grow_to(9);
    assert_eq!(cell.len(), n);
    assert_eq!(cell.growth_events, 1);
    assert!(cell.nodes.iter().any(|x| x.label == "3e1"));
}
