//! Lusztig's module on the cell basis, its extension by `e_1`, the
//! sign-twisted model on `{C_1} ∪ {C_w}`, the generic-q Hecke action and the
//! translation-expansion oracle.
//!
//! Untwisted action of a simple reflection `t`:
//! * `t(e_w) = −e_w` if `μ(w) = t`, otherwise `e_w + Σ e_y` over Γ_0
//!   neighbours `y` of `w` with `μ(y) = t`;
//! * `s_0(e_1) = e_1 + e_{s_0}` and `t(e_1) = e_1` for finite `t`.
//!
//! The twisted action is the negative of the untwisted one, so that
//! `s_0·C_1 = −C_1 − C_{s_0}` and `t·C_1 = −C_1` for finite `t`.

use std::collections::BTreeMap;

use crate::affine::Word;
use crate::cell::Cell;
use crate::error::Result;
use crate::laurent::LaurentPoly;

/// Coefficient ring of a [`ModuleVector`].
pub trait Coeff: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, o: &Self);
    fn negated(&self) -> Self;
}

impl Coeff for i64 {
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn negated(&self) -> Self {
        -self
    }
}

impl Coeff for LaurentPoly {
    fn zero() -> Self {
        LaurentPoly::zero()
    }
    fn is_zero(&self) -> bool {
        LaurentPoly::is_zero(self)
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn negated(&self) -> Self {
        -self
    }
}

/// A finite combination `c_1·e_1 + Σ c_w e_w`, cell nodes keyed by id.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleVector<C: Coeff> {
    pub c1: C,
    pub cell: BTreeMap<usize, C>,
}

impl<C: Coeff> ModuleVector<C> {
    pub fn zero() -> Self {
        Self {
            c1: C::zero(),
            cell: BTreeMap::new(),
        }
    }

    /// The basis vector `e_1` (or `C_1`) with coefficient `c`.
    pub fn unit(c: C) -> Self {
        Self {
            c1: c,
            cell: BTreeMap::new(),
        }
    }

    /// The basis vector `e_w` with coefficient `c`.
    pub fn basis(id: usize, c: C) -> Self {
        let mut v = Self::zero();
        v.add_cell(id, &c);
        v
    }

    pub fn add_cell(&mut self, id: usize, c: &C) {
        if c.is_zero() {
            return;
        }
        let e = self.cell.entry(id).or_insert_with(C::zero);
        e.add_assign(c);
        if e.is_zero() {
            self.cell.remove(&id);
        }
    }

    pub fn add(&mut self, o: &Self) {
        self.c1.add_assign(&o.c1);
        for (&k, c) in &o.cell {
            self.add_cell(k, c);
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            c1: self.c1.negated(),
            cell: self.cell.iter().map(|(&k, c)| (k, c.negated())).collect(),
        }
    }

    pub fn coeff(&self, id: usize) -> C {
        self.cell.get(&id).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c1.is_zero() && self.cell.is_empty()
    }
}

/// Untwisted action of the simple reflection `s_t`.
pub fn act_e(cell: &Cell, t: usize, v: &ModuleVector<i64>) -> Result<ModuleVector<i64>> {
    let mut out = ModuleVector::zero();
    if v.c1 != 0 {
        out.c1 += v.c1;
        if t == 0 {
            out.add_cell(0, &v.c1);
        }
    }
    for (&w, &x) in &v.cell {
        if cell.nodes[w].mu == t {
            out.add_cell(w, &-x);
        } else {
            out.add_cell(w, &x);
            for y in cell.neighbors_with_mu(w, t)? {
                out.add_cell(y, &x);
            }
        }
    }
    Ok(out)
}

/// Sign-twisted action on the canonical basis `{C_1} ∪ {C_w}`.
pub fn act_twisted(cell: &Cell, t: usize, v: &ModuleVector<i64>) -> Result<ModuleVector<i64>> {
    Ok(act_e(cell, t, v)?.negated())
}

/// Either action, selected by a flag.
pub fn act(cell: &Cell, t: usize, v: &ModuleVector<i64>, twisted: bool) -> Result<ModuleVector<i64>> {
    if twisted {
        act_twisted(cell, t, v)
    } else {
        act_e(cell, t, v)
    }
}

/// Generic-q action of `T_t` on the left-cell quotient of the bimodule.
pub fn act_hecke(
    cell: &Cell,
    t: usize,
    v: &ModuleVector<LaurentPoly>,
) -> Result<ModuleVector<LaurentPoly>> {
    let q = LaurentPoly::q();
    let h = LaurentPoly::v();
    let mut out = ModuleVector::zero();
    if !v.c1.is_zero() {
        out.c1 += &(&q * &v.c1);
        if t == 0 {
            out.add_cell(0, &(&h * &v.c1));
        }
    }
    for (&w, x) in &v.cell {
        if cell.nodes[w].mu == t {
            out.add_cell(w, &-x);
        } else {
            out.add_cell(w, &(&q * x));
            let hx = &h * x;
            for y in cell.neighbors_with_mu(w, t)? {
                out.add_cell(y, &hx);
            }
        }
    }
    Ok(out)
}

/// Specialization `v → 1`.
pub fn specialize(v: &ModuleVector<LaurentPoly>) -> ModuleVector<i64> {
    let mut out = ModuleVector::unit(v.c1.eval_one());
    for (&k, c) in &v.cell {
        out.add_cell(k, &c.eval_one());
    }
    out
}

/// Applies a word (rightmost letter first).
pub fn act_word(
    cell: &Cell,
    word: &[u8],
    v: &ModuleVector<i64>,
    twisted: bool,
) -> Result<ModuleVector<i64>> {
    let mut cur = v.clone();
    for &j in word.iter().rev() {
        cur = act(cell, j as usize, &cur, twisted)?;
    }
    Ok(cur)
}

/// Result of expanding `t_γ · C_1` in the canonical basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub gamma: Vec<i64>,
    /// Coefficient of `C_1`.
    pub c1: i64,
    /// Coefficients of `C_w`, keyed by cell node id.
    pub coeffs: BTreeMap<usize, i64>,
}

impl Expansion {
    pub fn get(&self, id: usize) -> i64 {
        self.coeffs.get(&id).copied().unwrap_or(0)
    }
}

/// Word used for the expansion of `t_γ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordChoice {
    Canonical,
    ReversedGreedy,
}

/// Length of `t_γ`, the cell window needed to expand it.
pub fn translation_length(cell: &Cell, gamma: &[i64]) -> Result<usize> {
    let g = &cell.group;
    Ok(g.length(&g.translation(gamma)?))
}

/// `t_γ · C_1` computed with the twisted action along a reduced word of
/// `t_γ`.  The cell must already cover length `ℓ(t_γ)`.
pub fn expand_translation_with(cell: &Cell, gamma: &[i64], choice: WordChoice) -> Result<Expansion> {
    let g = &cell.group;
    let t = g.translation(gamma)?;
    let word: Word = match choice {
        WordChoice::Canonical => g.reduced_word(&t),
        WordChoice::ReversedGreedy => g.reversed_greedy_word(&t),
    };
    let v = act_word(cell, &word, &ModuleVector::unit(1), true)?;
    Ok(Expansion {
        gamma: gamma.to_vec(),
        c1: v.c1,
        coeffs: v.cell,
    })
}

pub fn expand_translation(cell: &Cell, gamma: &[i64]) -> Result<Expansion> {
    expand_translation_with(cell, gamma, WordChoice::Canonical)
}

/// Same as [`expand_translation`], enlarging the cell window first.
pub fn expand_translation_grow(cell: &mut Cell, gamma: &[i64]) -> Result<Expansion> {
    let l = translation_length(cell, gamma)?;
    cell.grow_to(l + 2);
    expand_translation(cell, gamma)
}

/// Basis vectors of the window on which an operator identity of word
/// length `depth` can be evaluated without leaving the enumerated region.
pub fn checkable_basis(cell: &Cell, depth: usize) -> Vec<Option<usize>> {
    let limit = cell.window().saturating_sub(depth);
    std::iter::once(None)
        .chain(
            cell.ordered_ids()
                .into_iter()
                .filter(|&i| cell.is_finite_type() || cell.nodes[i].len < limit)
                .map(Some),
        )
        .collect()
}

fn basis_vec<C: Coeff>(b: Option<usize>, one: C) -> ModuleVector<C> {
    match b {
        None => ModuleVector::unit(one),
        Some(id) => ModuleVector::basis(id, one),
    }
}

/// A failed operator identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationFailure {
    pub relation: String,
    pub basis: String,
}

fn basis_name(cell: &Cell, b: Option<usize>) -> String {
    match b {
        None => "1".into(),
        Some(id) => cell.nodes[id].label.clone(),
    }
}

/// Checks `(s_i s_j)^{m_ij}`-braid relations of the integral actions on
/// every checkable basis vector.
pub fn check_braid_relations(cell: &Cell, twisted: bool) -> Result<Vec<RelationFailure>> {
    let r = cell.group.rank();
    let mut fails = Vec::new();
    for i in 0..=r {
        for j in (i + 1)..=r {
            let m = cell.group.sys.coxeter[i][j] as usize;
            let lhs: Word = (0..m).map(|k| if k % 2 == 0 { i } else { j } as u8).collect();
            let rhs: Word = (0..m).map(|k| if k % 2 == 0 { j } else { i } as u8).collect();
            for b in checkable_basis(cell, m + 1) {
                let v = basis_vec(b, 1i64);
                let a = act_word(cell, &lhs, &v, twisted)?;
                let c = act_word(cell, &rhs, &v, twisted)?;
                if a != c {
                    fails.push(RelationFailure {
                        relation: format!("braid s{i},s{j} (m={m})"),
                        basis: basis_name(cell, b),
                    });
                }
            }
        }
        for b in checkable_basis(cell, 3) {
            let v = basis_vec(b, 1i64);
            let a = act_word(cell, &[i as u8, i as u8], &v, twisted)?;
            if a != v {
                fails.push(RelationFailure {
                    relation: format!("involution s{i}"),
                    basis: basis_name(cell, b),
                });
            }
        }
    }
    Ok(fails)
}

fn hecke_word(cell: &Cell, word: &[u8], v: &ModuleVector<LaurentPoly>) -> Result<ModuleVector<LaurentPoly>> {
    let mut cur = v.clone();
    for &j in word.iter().rev() {
        cur = act_hecke(cell, j as usize, &cur)?;
    }
    Ok(cur)
}

/// Braid relations, the quadratic relation `(T+1)(T−q) = 0` and the
/// `v → 1` specialization of the Hecke action.
pub fn check_hecke_relations(cell: &Cell) -> Result<Vec<RelationFailure>> {
    let r = cell.group.rank();
    let one = LaurentPoly::one();
    let q = LaurentPoly::q();
    let mut fails = Vec::new();
    for i in 0..=r {
        for j in (i + 1)..=r {
            let m = cell.group.sys.coxeter[i][j] as usize;
            let lhs: Word = (0..m).map(|k| if k % 2 == 0 { i } else { j } as u8).collect();
            let rhs: Word = (0..m).map(|k| if k % 2 == 0 { j } else { i } as u8).collect();
            for b in checkable_basis(cell, m + 1) {
                let v = basis_vec(b, one.clone());
                if hecke_word(cell, &lhs, &v)? != hecke_word(cell, &rhs, &v)? {
                    fails.push(RelationFailure {
                        relation: format!("hecke braid s{i},s{j} (m={m})"),
                        basis: basis_name(cell, b),
                    });
                }
            }
        }
        for b in checkable_basis(cell, 3) {
            let v = basis_vec(b, one.clone());
            let tv = act_hecke(cell, i, &v)?;
            // (T + 1)(T − q) v = T(Tv − qv) + (Tv − qv)
            let mut inner = tv.clone();
            let mut qv = v.clone();
            qv.c1 = &q * &qv.c1;
            for c in qv.cell.values_mut() {
                *c = &q * c;
            }
            inner.add(&qv.negated());
            let mut total = act_hecke(cell, i, &inner)?;
            total.add(&inner);
            if !total.is_zero() {
                fails.push(RelationFailure {
                    relation: format!("quadratic T{i}"),
                    basis: basis_name(cell, b),
                });
            }
            let spec = specialize(&tv);
            let plain = act_e(cell, i, &basis_vec(b, 1i64))?;
            if spec != plain {
                fails.push(RelationFailure {
                    relation: format!("specialization T{i}"),
                    basis: basis_name(cell, b),
                });
            }
        }
    }
    Ok(fails)
}

/// Block triangularity of the twisted action: the span of the `C_w` is
/// stable and the quotient line `C_1` carries the sign character.
pub fn check_block_triangular(cell: &Cell) -> Result<Vec<RelationFailure>> {
    let mut fails = Vec::new();
    for t in cell.group.sys.generators() {
        for b in checkable_basis(cell, 2) {
            let v = act_twisted(cell, t, &basis_vec(b, 1i64))?;
            let ok = match b {
                None => v.c1 == -1,
                Some(_) => v.c1 == 0,
            };
            if !ok {
                fails.push(RelationFailure {
                    relation: format!("block triangular s{t}"),
                    basis: basis_name(cell, b),
                });
            }
        }
    }
    Ok(fails)
}

// ---------------------------------------------------------------------------
// Kac–Moody Cartan model
// ---------------------------------------------------------------------------

/// Vector of the Cartan model `span{α_w} ⊕ Z h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanVector {
    pub h: i64,
    pub alpha: BTreeMap<usize, i64>,
}

impl CartanVector {
    fn add_alpha(&mut self, id: usize, c: i64) {
        if c == 0 {
            return;
        }
        let e = self.alpha.entry(id).or_insert(0);
        *e += c;
        if *e == 0 {
            self.alpha.remove(&id);
        }
    }
}

/// Reflection `s_{α_w}` of the Kac–Moody algebra attached to Γ_0.  Its
/// Cartan matrix is `2` on the diagonal and `−1` on Γ_0 edges; `h` pairs
/// to 1 with `α_{s_0}` and to 0 with the other simple roots.
fn km_reflect(cell: &Cell, w: usize, v: &CartanVector) -> Result<CartanVector> {
    let mut pairing = 2 * v.alpha.get(&w).copied().unwrap_or(0);
    let node = &cell.nodes[w];
    let mut nbrs: Vec<usize> = node.parent.into_iter().collect();
    match &node.children {
        Some(k) => nbrs.extend(k.iter().map(|&(_, c)| c)),
        None => {
            return Err(crate::error::Error::Budget("Cartan model window".into()));
        }
    }
    for y in nbrs {
        pairing -= v.alpha.get(&y).copied().unwrap_or(0);
    }
    if w == 0 {
        pairing += v.h;
    }
    let mut out = v.clone();
    out.add_alpha(w, -pairing);
    Ok(out)
}

/// Action of `s_t` on the Cartan model: the product of `s_{α_w}` over the
/// cell nodes with `μ(w) = t` (these commute, no two being adjacent).
pub fn km_act(cell: &Cell, t: usize, v: &CartanVector, nodes: &[usize]) -> Result<CartanVector> {
    let mut cur = v.clone();
    for &w in nodes {
        if cell.nodes[w].mu == t {
            cur = km_reflect(cell, w, &cur)?;
        }
    }
    Ok(cur)
}

/// `e_w ↦ −α_w`, `e_1 ↦ h`.
pub fn km_image(v: &ModuleVector<i64>) -> CartanVector {
    let mut out = CartanVector {
        h: v.c1,
        alpha: BTreeMap::new(),
    };
    for (&k, &c) in &v.cell {
        out.add_alpha(k, -c);
    }
    out
}

/// Per-generator outcome of the Cartan model comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanCheck {
    pub generator: usize,
    pub checked: usize,
    pub passed: bool,
}

/// Verifies that `e_w ↦ −α_w`, `e_1 ↦ h` intertwines the action of every
/// generator, both untwisted and after tensoring both sides with the sign.
pub fn kacmoody_cartan_check(cell: &Cell) -> Result<Vec<CartanCheck>> {
    let nodes: Vec<usize> = cell
        .ordered_ids()
        .into_iter()
        .filter(|&i| cell.nodes[i].children.is_some())
        .collect();
    let basis = checkable_basis(cell, 2);
    let mut out = Vec::new();
    for t in cell.group.sys.generators() {
        let mut ok = true;
        for &b in &basis {
            let v = basis_vec(b, 1i64);
            let lhs = km_image(&act_e(cell, t, &v)?);
            let rhs = km_act(cell, t, &km_image(&v), &nodes)?;
            // Twisted: C ↦ (image) ⊗ sgn, so both sides change sign.
            let lt = km_image(&act_twisted(cell, t, &v)?);
            let mut rt = rhs.clone();
            rt.h = -rt.h;
            for c in rt.alpha.values_mut() {
                *c = -*c;
            }
            if lhs != rhs || lt != rt {
                ok = false;
            }
        }
        out.push(CartanCheck {
            generator: t,
            checked: basis.len(),
            passed: ok,
        });
    }
    Ok(out)
}
