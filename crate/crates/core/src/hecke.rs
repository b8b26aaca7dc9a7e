//! Kazhdan–Lusztig polynomials of an affine Weyl group up to a length bound,
//! and their inverses.
//!
//! Conventions: `C_v = Σ_{w ≤ v} P_{w,v}(q) H_w`, and the inverse values are
//! defined by `H_w = Σ_{v ≤ w} ε(wv⁻¹) m_v^w(q) C_v`.
//!
//! `P_{x,w}` is computed by induction on `ℓ(w)`.  With `s` a left descent of
//! `w` and `v = sw`,
//! `P_{x,w} = q^{1−c} P_{sx,v} + q^c P_{x,v} − Σ_z μ(z,v) q^{(ℓ(w)−ℓ(z))/2} P_{x,z}`,
//! where `c = 1` if `sx < x` and the sum runs over `z < v` with `sz < z`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::affine::{AffineElement, AffineWeyl};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::rootdata::CartanType;

const NONE: u32 = u32::MAX;

/// Default length bound of the table for a root system.
pub fn default_bound(kind: CartanType) -> usize {
    match kind {
        CartanType::G2 => 24,
        CartanType::C(2) => 20,
        CartanType::B(3) | CartanType::C(3) => 16,
        CartanType::F4 => 12,
        CartanType::B(_) | CartanType::C(_) => 12,
    }
}

/// Sparse column `x ↦ P_{x,w}` of one element `w`, with dense q-coefficients.
#[derive(Clone, Debug, Default)]
struct Row {
    xs: Vec<u32>,
    coeffs: Vec<i64>,
}

/// Degree statistics of a built table.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DegreeReport {
    /// Pairs `x < w` with a nonzero polynomial.
    pub pairs: usize,
    /// Pairs violating `deg P_{x,w} ≤ (ℓ(w) − ℓ(x) − 1)/2`.
    pub violations: usize,
    /// Pairs attaining the bound with equality (`μ(x,w) ≠ 0`).
    pub attained: usize,
}

/// Kazhdan–Lusztig table of all elements of length at most `complete`.
#[derive(Clone, Debug)]
pub struct KlTable {
    pub group: AffineWeyl,
    /// Requested length bound.
    pub bound: usize,
    /// Largest length for which the table is complete.
    pub complete: usize,
    pub elements: Vec<AffineElement>,
    pub lengths: Vec<usize>,
    index: HashMap<AffineElement, u32>,
    /// `lmul[x * gens + s]` is the index of `s·x`, or `NONE`.
    lmul: Vec<u32>,
    gens: usize,
    rows: Vec<Row>,
    stride: usize,
}

impl KlTable {
    /// Builds the table for all elements of length `≤ bound`.
    pub fn build(group: &AffineWeyl, bound: usize) -> Self {
        Self::build_with_budget(group, bound, usize::MAX)
    }

    /// Builds the table, stopping after the last length layer that keeps the
    /// element count within `max_elements`.  The reached length is recorded
    /// in [`KlTable::complete`].
    pub fn build_with_budget(group: &AffineWeyl, bound: usize, max_elements: usize) -> Self {
        let gens = group.rank() + 1;
        let stride = bound / 2 + 2;
        let Ball { elements, lengths, index, complete } = Ball::new(group, bound, max_elements);
        if complete < bound {
            log::warn!("{} table stopped at length {complete} (budget {max_elements} elements)", group.kind());
        }
        let n = elements.len();
        let mut lmul = vec![NONE; n * gens];
        for (i, x) in elements.iter().enumerate() {
            for s in 0..gens {
                let y = group.lmul_gen(s, x);
                if let Some(&j) = index.get(&y) {
                    lmul[i * gens + s] = j;
                }
            }
        }
        let mut table = KlTable {
            group: group.clone(),
            bound,
            complete,
            elements,
            lengths,
            index,
            lmul,
            gens,
            rows: Vec::with_capacity(n),
            stride,
        };
        table.fill_rows();
        table
    }

    fn fill_rows(&mut self) {
        let n = self.elements.len();
        self.rows.push(Row {
            xs: vec![0],
            coeffs: unit_poly(self.stride),
        });
        let mut start = 1;
        while start < n {
            let l = self.lengths[start];
            let end = (start..n).find(|&i| self.lengths[i] != l).unwrap_or(n);
            let new_rows: Vec<Row> = (start..end)
                .into_par_iter()
                .map(|w| self.compute_row(w))
                .collect();
            self.rows.extend(new_rows);
            start = end;
        }
    }

    fn left(&self, x: usize, s: usize) -> usize {
        self.lmul[x * self.gens + s] as usize
    }

    fn is_descent(&self, s: usize, x: usize) -> bool {
        let y = self.lmul[x * self.gens + s];
        y != NONE && self.lengths[y as usize] < self.lengths[x]
    }

    fn compute_row(&self, w: usize) -> Row {
        let d = self.stride;
        let s = (0..self.gens).find(|&s| self.is_descent(s, w)).unwrap();
        let v = self.left(w, s);
        let n = self.elements.len();
        let lw = self.lengths[w];
        let mut acc = vec![0i64; (w + 1) * d];
        let mut touched = vec![false; w + 1];
        let mut add = |x: usize, p: &[i64], shift: usize, sign: i64, acc: &mut Vec<i64>| {
            touched[x] = true;
            let dst = &mut acc[x * d..(x + 1) * d];
            for (k, &c) in p.iter().enumerate() {
                if c != 0 {
                    dst[k + shift] += sign * c;
                }
            }
        };
        let row_v = &self.rows[v];
        for (k, &y) in row_v.xs.iter().enumerate() {
            let y = y as usize;
            let p = &row_v.coeffs[k * d..(k + 1) * d];
            let sy = self.left(y, s);
            debug_assert!(sy < n);
            let shift = usize::from(self.lengths[sy] < self.lengths[y]);
            add(y, p, shift, 1, &mut acc);
            add(sy, p, shift, 1, &mut acc);
        }
        for (z, mu) in self.mu_list(v) {
            if !self.is_descent(s, z) {
                continue;
            }
            let shift = (lw - self.lengths[z]) / 2;
            let row_z = &self.rows[z];
            for (k, &x) in row_z.xs.iter().enumerate() {
                let p: Vec<i64> = row_z.coeffs[k * d..(k + 1) * d].to_vec();
                add(x as usize, &p, shift, -mu, &mut acc);
            }
        }
        let mut row = Row::default();
        for x in 0..=w {
            if touched[x] && acc[x * d..(x + 1) * d].iter().any(|&c| c != 0) {
                row.xs.push(x as u32);
                row.coeffs.extend_from_slice(&acc[x * d..(x + 1) * d]);
            }
        }
        row
    }

    /// `(z, μ(z,w))` for all `z < w` with `μ(z,w) ≠ 0`.
    pub fn mu_list(&self, w: usize) -> Vec<(usize, i64)> {
        let d = self.stride;
        let row = &self.rows[w];
        let lw = self.lengths[w];
        let mut out = Vec::new();
        for (k, &z) in row.xs.iter().enumerate() {
            let z = z as usize;
            let diff = lw - self.lengths[z];
            if diff % 2 == 1 {
                let c = row.coeffs[k * d + (diff - 1) / 2];
                if c != 0 {
                    out.push((z, c));
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, x: &AffineElement) -> Option<usize> {
        self.index.get(x).map(|&i| i as usize)
    }

    fn require(&self, x: &AffineElement) -> Result<usize> {
        self.index_of(x).ok_or_else(|| Error::OutOfTable {
            bound: self.complete,
            needed: self.group.length(x),
        })
    }

    /// Dense q-coefficients of `P_{x,w}` (zero if `x ≰ w`).
    fn coeffs(&self, x: usize, w: usize) -> Option<&[i64]> {
        let row = &self.rows[w];
        let d = self.stride;
        row.xs
            .binary_search(&(x as u32))
            .ok()
            .map(|k| &row.coeffs[k * d..(k + 1) * d])
    }

    /// `P_{x,w}` as a Laurent polynomial in `v`.
    pub fn p(&self, x: &AffineElement, w: &AffineElement) -> Result<LaurentPoly> {
        let (x, w) = (self.require(x)?, self.require(w)?);
        Ok(self.p_idx(x, w))
    }

    pub fn p_idx(&self, x: usize, w: usize) -> LaurentPoly {
        self.coeffs(x, w)
            .map(LaurentPoly::from_q_coeffs)
            .unwrap_or_default()
    }

    /// Nonzero entries `(x, P_{x,w})` of the column of `w`.
    pub fn column(&self, w: usize) -> Vec<(usize, LaurentPoly)> {
        let row = &self.rows[w];
        let d = self.stride;
        row.xs
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                (
                    x as usize,
                    LaurentPoly::from_q_coeffs(&row.coeffs[k * d..(k + 1) * d]),
                )
            })
            .collect()
    }

    /// Total number of stored nonzero polynomials.
    pub fn entries(&self) -> usize {
        self.rows.iter().map(|r| r.xs.len()).sum()
    }

    /// Whether every coefficient of every `P_{x,w}` is nonnegative.
    pub fn is_positive(&self) -> bool {
        self.rows.iter().all(|r| r.coeffs.iter().all(|&c| c >= 0))
    }

    /// Checks the degree bound with `≤` and counts where it is attained.
    pub fn degree_report(&self) -> DegreeReport {
        let d = self.stride;
        let mut rep = DegreeReport::default();
        for (w, row) in self.rows.iter().enumerate() {
            for (k, &x) in row.xs.iter().enumerate() {
                let x = x as usize;
                if x == w {
                    continue;
                }
                rep.pairs += 1;
                let diff = self.lengths[w] - self.lengths[x];
                let p = &row.coeffs[k * d..(k + 1) * d];
                let deg = p.iter().rposition(|&c| c != 0).unwrap_or(0);
                if 2 * deg + 1 > diff {
                    rep.violations += 1;
                } else if 2 * deg + 1 == diff {
                    rep.attained += 1;
                }
            }
        }
        if rep.attained > 0 {
            log::info!(
                "{}: strict degree bound fails for {} of {} pairs",
                self.group.kind(),
                rep.attained,
                rep.pairs
            );
        }
        rep
    }

    /// `m_v^w(1)` for every `v ≤ w`, as `(v, value)` pairs.
    pub fn inverse_column_at_one(&self, w: &AffineElement) -> Result<Vec<(usize, i64)>> {
        let w = self.require(w)?;
        let d = self.stride;
        let mut x = vec![0i64; w + 1];
        x[w] = 1;
        for v in (0..=w).rev() {
            let xv = x[v];
            if xv == 0 {
                continue;
            }
            let row = &self.rows[v];
            for (k, &y) in row.xs.iter().enumerate() {
                let y = y as usize;
                if y == v {
                    continue;
                }
                let p1: i64 = row.coeffs[k * d..(k + 1) * d].iter().sum();
                x[y] -= xv * p1;
            }
        }
        let lw = self.lengths[w];
        Ok(x.into_iter()
            .enumerate()
            .filter(|&(_, c)| c != 0)
            .map(|(v, c)| {
                let sign = if (lw - self.lengths[v]) % 2 == 0 { 1 } else { -1 };
                (v, sign * c)
            })
            .collect())
    }

    /// `m_v^w(1)`; zero when `v ≰ w`.
    pub fn inverse_kl_at_one(&self, v: &AffineElement, w: &AffineElement) -> Result<i64> {
        let vi = self.require(v)?;
        Ok(self
            .inverse_column_at_one(w)?
            .into_iter()
            .find(|&(u, _)| u == vi)
            .map(|(_, c)| c)
            .unwrap_or(0))
    }

    /// `m_v^w(q)` for every `v ≤ w`.
    pub fn inverse_column(&self, w: &AffineElement) -> Result<Vec<(usize, LaurentPoly)>> {
        let w = self.require(w)?;
        let mut x: Vec<LaurentPoly> = vec![LaurentPoly::zero(); w + 1];
        x[w] = LaurentPoly::one();
        for v in (0..=w).rev() {
            if x[v].is_zero() {
                continue;
            }
            let xv = x[v].clone();
            for (y, p) in self.column(v) {
                if y != v {
                    x[y] -= &(&xv * &p);
                }
            }
        }
        let lw = self.lengths[w];
        Ok(x.into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(v, c)| {
                let c = if (lw - self.lengths[v]) % 2 == 0 { c } else { -c };
                (v, c)
            })
            .collect())
    }

    /// Checks `Σ_v ε(wv⁻¹) m_v^w(q) P_{u,v}(q) = δ_{w,u}` for one `w`.
    pub fn check_inversion_identity(&self, w: &AffineElement) -> Result<bool> {
        let wi = self.require(w)?;
        let lw = self.lengths[wi];
        let mut acc: HashMap<usize, LaurentPoly> = HashMap::new();
        for (v, m) in self.inverse_column(w)? {
            let m = if (lw - self.lengths[v]) % 2 == 0 { m } else { -m };
            for (u, p) in self.column(v) {
                *acc.entry(u).or_default() += &(&m * &p);
            }
        }
        Ok(acc.into_iter().all(|(u, p)| {
            if u == wi {
                p == LaurentPoly::one()
            } else {
                p.is_zero()
            }
        }))
    }

    /// Minimal coset representatives present in the table.
    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.group.is_minimal(&self.elements[i]))
            .collect()
    }
}

/// Elements of length at most the reached bound, in length order.
struct Ball {
    elements: Vec<AffineElement>,
    lengths: Vec<usize>,
    index: HashMap<AffineElement, u32>,
    complete: usize,
}

impl Ball {
    fn new(group: &AffineWeyl, bound: usize, max_elements: usize) -> Self {
        let gens = group.rank() + 1;
        let mut elements = vec![group.identity()];
        let mut lengths = vec![0usize];
        let mut index = HashMap::new();
        index.insert(group.identity(), 0u32);
        let mut layer_start = 0;
        let mut complete = 0;
        for l in 1..=bound {
            let prev: Vec<AffineElement> = elements[layer_start..].to_vec();
            let mut next = Vec::new();
            for x in &prev {
                for s in 0..gens {
                    if group.is_left_descent(s, x) {
                        continue;
                    }
                    let y = group.lmul_gen(s, x);
                    if !index.contains_key(&y) {
                        index.insert(y.clone(), (elements.len() + next.len()) as u32);
                        next.push(y);
                    }
                }
            }
            if elements.len() + next.len() > max_elements {
                for y in &next {
                    index.remove(y);
                }
                break;
            }
            layer_start = elements.len();
            lengths.extend(std::iter::repeat(l).take(next.len()));
            elements.extend(next);
            complete = l;
        }
        Ball { elements, lengths, index, complete }
    }
}

/// Length up to which [`KlTable::build_with_budget`] completes the table.
pub fn reachable_length(group: &AffineWeyl, bound: usize, max_elements: usize) -> usize {
    if max_elements == usize::MAX {
        return bound;
    }
    Ball::new(group, bound, max_elements).complete
}

fn unit_poly(stride: usize) -> Vec<i64> {
    let mut v = vec![0; stride];
    v[0] = 1;
    v
}
