//! Closed formulas for `m_{w_ν}^{w_γ}` on the cell, and for the differences
//! `m_w^{w_γ} − m_w^{w_{s_iγ}}` with `i = μ(w)`.
//!
//! Values are assembled as exact rationals and only then checked for
//! integrality.  The type C families are given by generating functions in
//! `Ξ`; they are expanded as Laurent polynomials in `x = Ξ^{1/2}` with exact
//! division, and coefficients are read off.
//!
//! Labels follow the cell's own labels: ε-vectors for B and C, the F4 ε-names
//! returned by [`crate::cell::f4_label`], and reduced words such as `s1s0`
//! for G2 (with `1` for the identity).

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::Serialize;

use crate::cell::eps_label;
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::rootdata::{CartanType, Rational, RootSystem};

fn rat(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn frac(p: i64, q: i64) -> Rational {
    Rational::new(p, q)
}

fn ind(c: bool) -> i64 {
    i64::from(c)
}

fn odd(a: i64) -> bool {
    a.rem_euclid(2) == 1
}

fn floor2(a: i64) -> i64 {
    Integer::div_floor(&a, &2)
}

fn ceil2(a: i64) -> i64 {
    Integer::div_ceil(&a, &2)
}

fn fmt_gamma(gamma: &[i64]) -> String {
    crate::affine::format_vec(gamma)
}

/// Values of the closed formulas at one `γ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaResult {
    pub kind: CartanType,
    pub gamma: Vec<i64>,
    /// Cell label to exact value, in the order the formulas are listed.
    pub values: Vec<(String, Rational)>,
    /// Which set of formulas produced the values.
    pub case: &'static str,
}

impl FormulaResult {
    /// The value for a label as an integer.  In type C every label of the
    /// form `kε_i` that the generating functions do not mention is zero.
    pub fn get(&self, label: &str) -> Result<i64> {
        let want = normalize(label);
        match self.values.iter().find(|(l, _)| normalize(l) == want) {
            Some((l, v)) => self.integral(l, v),
            None if matches!(self.kind, CartanType::C(_)) && is_type_c_label(&want) => Ok(0),
            None => Err(Error::UnknownLabel(label.to_string())),
        }
    }

    /// All values as integers; fails on the first non-integral one.
    pub fn integers(&self) -> Result<BTreeMap<String, i64>> {
        self.values
            .iter()
            .map(|(l, v)| Ok((l.clone(), self.integral(l, v)?)))
            .collect()
    }

    fn integral(&self, label: &str, v: &Rational) -> Result<i64> {
        if v.is_integer() {
            Ok(v.to_integer())
        } else {
            Err(Error::NonIntegral {
                label: label.to_string(),
                gamma: fmt_gamma(&self.gamma),
                value: crate::weight::format_rational(v),
            })
        }
    }
}

fn normalize(label: &str) -> String {
    label.chars().filter(|c| !c.is_whitespace()).collect::<String>().replace('ε', "e")
}

/// Whether a label has the shape `ke_i` (including `e_i`, `-e_i`).
fn is_type_c_label(label: &str) -> bool {
    parse_k_eps(label).is_some()
}

/// Parses `ke_i` into `(k, i)`.
pub fn parse_k_eps(label: &str) -> Option<(i64, usize)> {
    let label = normalize(label);
    let pos = label.find('e')?;
    let (coef, rest) = label.split_at(pos);
    let i: usize = rest[1..].parse().ok()?;
    let k = match coef {
        "" => 1,
        "-" => -1,
        s => s.parse().ok()?,
    };
    if k == 0 || i == 0 {
        None
    } else {
        Some((k, i))
    }
}

/// Label of `w_{kε_i}`.
pub fn k_eps_label(n: usize, k: i64, i: usize) -> String {
    let mut v = vec![rat(0); n];
    v[i - 1] = rat(k);
    eps_label(&v)
}

fn check_gamma(kind: CartanType, gamma: &[i64]) -> Result<()> {
    kind.validate()?;
    if gamma.len() != kind.rank() {
        return Err(Error::Dimension {
            expected: kind.rank(),
            got: gamma.len(),
        });
    }
    Ok(())
}

fn norm(kind: CartanType, gamma: &[i64]) -> Result<Rational> {
    RootSystem::new(kind)?.norm_sq(gamma)
}

/// Evaluates the closed formulas for every cell label at `γ`.
pub fn m_formula(kind: CartanType, gamma: &[i64]) -> Result<FormulaResult> {
    check_gamma(kind, gamma)?;
    let (values, case) = match kind {
        CartanType::B(n) => (m_formula_b(n, gamma)?, "type B"),
        CartanType::C(n) => (m_formula_c(n, gamma)?, "type C"),
        CartanType::F4 => (m_formula_f(gamma)?, "type F4"),
        CartanType::G2 => (m_formula_g(gamma), "type G2"),
    };
    let res = FormulaResult {
        kind,
        gamma: gamma.to_vec(),
        values,
        case,
    };
    res.integers()?;
    Ok(res)
}

/// The integer value of one label.
pub fn m_formula_label(kind: CartanType, gamma: &[i64], label: &str) -> Result<i64> {
    m_formula(kind, gamma)?.get(label)
}

/// Number of parity changes along `a_{lo}, …, a_n` (indices into the padded
/// sequence `a_0 = 0, a_1, …, a_{n−1}, a_n = 0`), counted over `j` with
/// `lo < j ≤ n`.
fn parity_changes(padded: &[i64], lo: usize) -> i64 {
    (lo + 1..padded.len())
        .map(|j| ind(odd(padded[j - 1] - padded[j])))
        .sum()
}

fn m_formula_b(n: usize, gamma: &[i64]) -> Result<Vec<(String, Rational)>> {
    let nrm = norm(CartanType::B(n), gamma)?;
    let b = gamma[n - 1];
    // a_0 = 0, a_1..a_{n-1}, a_n = 0.
    let mut a = vec![0i64; n + 1];
    a[1..n].copy_from_slice(&gamma[..n - 1]);
    let p = parity_changes(&a, 0);
    let lbl = |k: &[(usize, i64)]| {
        let mut v = vec![rat(0); n];
        for &(i, c) in k {
            v[i - 1] = rat(c);
        }
        eps_label(&v)
    };
    let mut out = Vec::new();
    out.push((lbl(&[(1, 1), (2, 1)]), nrm / 2 + frac(p, 4)));
    for i in 2..n {
        let pi = parity_changes(&a, i);
        out.push((lbl(&[(1, 1), (i + 1, 1)]), nrm - frac(a[i], 2) + frac(pi, 2)));
    }
    out.push((lbl(&[(1, 1), (n, -1)]), nrm - rat(b)));
    for i in (2..n).rev() {
        let pi = parity_changes(&a, i);
        out.push((lbl(&[(1, 1), (i, -1)]), nrm - frac(a[i], 2) - frac(pi, 2)));
    }
    out.push((lbl(&[(1, 2)]), nrm / 2 - frac(p, 4)));
    out.push((lbl(&[(2, 1), (3, 1)]), nrm / 2 - rat(ceil2(a[1])) + frac(p, 4)));
    out.push((lbl(&[(1, -1), (2, 1)]), nrm / 2 - rat(floor2(a[1])) - frac(p, 4)));
    Ok(out)
}

/// `x^e` in the variable `x = Ξ^{1/2}`.
fn xp(e: i64) -> LaurentPoly {
    LaurentPoly::monomial(1, e as i32)
}

fn div(num: &LaurentPoly, den: &LaurentPoly, what: &str) -> Result<LaurentPoly> {
    num.div_exact(den)
        .ok_or_else(|| Error::InexactDivision(what.to_string()))
}

/// `(Ξ^d − 1)/(Ξ − 1)`.
fn geometric(d: i64) -> Result<LaurentPoly> {
    div(&(xp(2 * d) - xp(0)), &(xp(2) - xp(0)), "(Ξ^d-1)/(Ξ-1)")
}

/// `((Ξ^{d/2} − Ξ^{−d/2}) / (Ξ^{1/2} − Ξ^{−1/2}))²`.
fn square_quotient(d: i64) -> Result<LaurentPoly> {
    let q = div(&(xp(d) - xp(-d)), &(xp(1) - xp(-1)), "quantum integer")?;
    Ok(&q * &q)
}

/// `(Ξ^{1/2} − Ξ^{−1/2})`.
fn xi_half_diff() -> LaurentPoly {
    xp(1) - xp(-1)
}

/// Padded type C sequence `a_0 = 0, a_1, …, a_{n−1}, a_n = b, a_{n+1} = 0`.
fn padded_c(n: usize, gamma: &[i64]) -> Vec<i64> {
    let mut a = vec![0i64; n + 2];
    a[1..=n].copy_from_slice(gamma);
    a
}

/// The right-hand side of the `i`-th family identity (`1 ≤ i ≤ n−1`) as
/// displayed, in `x`: `Σ_{j≤i} (Ξ^{a_j−a_{j−1}}−1)/(Ξ−1) − Σ_j (quantum
/// integer of a_j − a_{j+1})²`.
pub fn type_c_family_displayed(n: usize, gamma: &[i64], i: usize) -> Result<LaurentPoly> {
    let a = padded_c(n, gamma);
    let mut f = LaurentPoly::zero();
    for j in 1..=i {
        f += &geometric(a[j] - a[j - 1])?;
    }
    for j in 0..n {
        f -= &square_quotient(a[j] - a[j + 1])?;
    }
    Ok(f)
}

/// The generating function `Σ_{k≥0} m_{(k+1)ε_{i+1}} Ξ^k + Σ_{k<0} m_{kε_i} Ξ^k`
/// used by [`m_formula`]: the displayed right-hand side with the opposite
/// overall sign.
pub fn type_c_family(n: usize, gamma: &[i64], i: usize) -> Result<LaurentPoly> {
    Ok(-type_c_family_displayed(n, gamma, i)?)
}

/// The generating function of the `kε_1` family, `k ≥ 2`, in `x`.
pub fn type_c_eps1_family(n: usize, gamma: &[i64]) -> Result<LaurentPoly> {
    let a = padded_c(n, gamma);
    let mut f = LaurentPoly::zero();
    for j in 0..n {
        let d = a[j] - a[j + 1];
        f += &square_quotient(d)?;
        f -= &LaurentPoly::constant(d.abs());
    }
    Ok(f)
}

/// `(Ξ^{d−1/2} + Ξ^{1/2−d} − Ξ^{1/2} − Ξ^{−1/2}) / (Ξ^{1/2} − Ξ^{−1/2})²`.
fn neg_family_term(d: i64) -> Result<LaurentPoly> {
    let den = &xi_half_diff() * &xi_half_diff();
    let num = xp(2 * d - 1) + xp(1 - 2 * d) - xp(1) - xp(-1);
    div(&num, &den, "-kε_n family")
}

/// The right-hand side of the `−kε_n` identity as displayed, in `x`: the
/// term above at `d = a_j − a_{j+1}` summed over `0 ≤ j ≤ n`.
pub fn type_c_neg_family_displayed(n: usize, gamma: &[i64]) -> Result<LaurentPoly> {
    let a = padded_c(n, gamma);
    let mut f = LaurentPoly::zero();
    for j in 0..=n {
        f += &neg_family_term(a[j] - a[j + 1])?;
    }
    Ok(f)
}

/// `Σ_{k≥1} m_{−kε_n} (Ξ^{k−1/2} + Ξ^{1/2−k})` as used by [`m_formula`]: the
/// term above at `d = a_{j+1} − a_j`, summed over `0 ≤ j ≤ n−1`.
pub fn type_c_neg_family(n: usize, gamma: &[i64]) -> Result<LaurentPoly> {
    let a = padded_c(n, gamma);
    let mut f = LaurentPoly::zero();
    for j in 0..n {
        f += &neg_family_term(a[j + 1] - a[j])?;
    }
    Ok(f)
}

fn push_family(
    out: &mut Vec<(String, Rational)>,
    n: usize,
    f: &LaurentPoly,
    what: &str,
    mut label_of: impl FnMut(i32) -> Option<(i64, usize)>,
) -> Result<()> {
    for (e, c) in f.terms() {
        match label_of(e) {
            Some((k, i)) => out.push((k_eps_label(n, k, i), rat(c))),
            None => {
                return Err(Error::Invalid(format!(
                    "{what}: unexpected term {c}·Ξ^({e}/2)"
                )))
            }
        }
    }
    Ok(())
}

/// The terms of positive exponent of a polynomial invariant under
/// `x ↦ x^{-1}` with no constant term.
fn positive_half(f: &LaurentPoly, what: &str) -> Result<LaurentPoly> {
    let mut p = LaurentPoly::zero();
    for (e, c) in f.terms() {
        if e == 0 || f.coeff(-e) != c {
            return Err(Error::Invalid(format!("{what} is not a symmetric sum")));
        }
        if e > 0 {
            p.add_term(e, c);
        }
    }
    Ok(p)
}

fn m_formula_c(n: usize, gamma: &[i64]) -> Result<Vec<(String, Rational)>> {
    let a = padded_c(n, gamma);
    let s: i64 = (0..n).map(|j| (a[j] - a[j + 1]).abs()).sum();
    let mut out = vec![
        (k_eps_label(n, 1, 1), rat(Integer::div_ceil(&s, &2))),
        (
            {
                let mut v = vec![rat(0); n];
                v[0] = rat(1);
                v[1] = rat(1);
                eps_label(&v)
            },
            rat(Integer::div_floor(&s, &2)),
        ),
    ];
    for i in 1..n {
        let f = type_c_family(n, gamma, i)?;
        push_family(&mut out, n, &f, "family", |e| {
            if e % 2 != 0 {
                None
            } else if e >= 0 {
                Some((i64::from(e / 2) + 1, i + 1))
            } else {
                Some((i64::from(e / 2), i))
            }
        })?;
    }
    let f = positive_half(&type_c_eps1_family(n, gamma)?, "kε_1 family")?;
    push_family(&mut out, n, &f, "kε_1 family", |e| {
        if e % 2 != 0 {
            None
        } else {
            Some((i64::from(e / 2) + 1, 1))
        }
    })?;
    let f = positive_half(&type_c_neg_family(n, gamma)?, "-kε_n family")?;
    push_family(&mut out, n, &f, "-kε_n family", |e| {
        if e % 2 == 0 {
            None
        } else {
            Some((-i64::from((e + 1) / 2), n))
        }
    })?;
    Ok(out)
}

fn m_formula_f(gamma: &[i64]) -> Result<Vec<(String, Rational)>> {
    let nrm = norm(CartanType::F4, gamma)?;
    let (a1, a2, a3, a4) = (gamma[0], gamma[1], gamma[2], gamma[3]);
    let p3 = ind(odd(a1)) + ind(odd(a1 - a2)) + ind(odd(a2));
    let q = ind(odd(a1)) + ind(odd(a1 - a2)) - ind(odd(a2));
    let h = frac(3, 2) * nrm;
    Ok(vec![
        ("e1+e2".into(), nrm / 2 + frac(p3, 4)),
        ("e1+e3".into(), nrm - rat(floor2(a1))),
        ("e1+e4".into(), h - frac(a2, 2) + frac(q, 4)),
        ("e1-e4".into(), nrm * 2 - rat(a3)),
        ("e2+e3".into(), nrm - rat(a4)),
        ("e1-e3".into(), h - frac(a2, 2) - frac(q, 4)),
        ("e1-e2".into(), nrm - rat(ceil2(a1))),
        ("2e1".into(), nrm / 2 - frac(p3, 4)),
    ])
}

/// `N_r(m) = Σ_{1 ≤ j ≤ m−1, j ≡ −r (mod 3)} (m − j)`; an empty sum for
/// `m ≤ 1`.
pub fn n_r(m: i64, r: i64) -> i64 {
    (1..m).filter(|j| (j + r).rem_euclid(3) == 0).map(|j| m - j).sum()
}

/// The quasi-polynomial rewriting
/// `⌊(m+r)/3⌋(m+r) − (3/2)⌊(m+r)/3⌋(⌊(m+r)/3⌋+1)`, which agrees with
/// [`n_r`] for `m ≥ 0`.
pub fn n_r_quasi(m: i64, r: i64) -> i64 {
    let f = Integer::div_floor(&(m + r), &3);
    f * (m + r) - 3 * f * (f + 1) / 2
}

/// G2 labels in the order of the formulas.
pub const G2_LABELS: [&str; 9] = [
    "1",
    "s0",
    "s1s0",
    "s2s1s0",
    "s1s2s1s0",
    "s0s1s2s1s0",
    "s2s1s2s1s0",
    "s1s2s1s2s1s0",
    "s0s1s2s1s2s1s0",
];

/// Uses the quasi-polynomial form of `N_r`, which extends the defining sum
/// to negative `m`.
fn m_formula_g(gamma: &[i64]) -> Vec<(String, Rational)> {
    m_formula_g_with(gamma, n_r_quasi)
}

/// The G2 formulas with a caller-chosen `N_r`.
pub fn m_formula_g_with(gamma: &[i64], nr: impl Fn(i64, i64) -> i64) -> Vec<(String, Rational)> {
    let (m, n) = (gamma[0], gamma[1]);
    let (n0, n1, n2) = (rat(nr(m, 0)), rat(nr(m, 1)), rat(nr(m, 2)));
    let nn = rat(n * (n - m));
    let tri = frac(m * (m - 1), 2);
    let vals = [
        rat(1),
        n0 + (nn + rat(ceil2(m) - floor2(n - m) + ceil2(n))) / 2,
        rat(ceil2(m)) + n0 + n1 + nn,
        tri + (nn * 3 + rat(ceil2(m) - floor2(n - m) - ceil2(n))) / 2,
        tri + n2 + nn * 2,
        n1 + n2 + nn,
        tri + (nn * 3 + rat(floor2(m) - ceil2(n - m) - floor2(n))) / 2,
        rat(floor2(m)) + n0 + n1 + nn,
        n0 + (nn + rat(floor2(m) - ceil2(n - m) + floor2(n))) / 2,
    ];
    G2_LABELS
        .iter()
        .zip(vals)
        .map(|(l, v)| (l.to_string(), v))
        .collect()
}

/// The index `i` of the reflection `s_i` a difference formula refers to, for
/// labels that carry one.
pub fn diff_index(kind: CartanType, label: &str) -> Option<usize> {
    let l = normalize(label);
    match kind {
        CartanType::G2 => G2_LABELS
            .iter()
            .position(|x| *x == l)
            .filter(|&p| p > 0)
            .map(|p| (G2_LABELS[p].as_bytes()[1] - b'0') as usize),
        CartanType::F4 => match l.as_str() {
            "e1+e2" | "2e1" => Some(0),
            "e1+e3" | "e1-e2" => Some(1),
            "e1+e4" | "e1-e3" => Some(2),
            "e1-e4" => Some(3),
            "e2+e3" => Some(4),
            _ => None,
        },
        CartanType::B(n) => b_diff_index(n, &l),
        CartanType::C(n) => {
            if l == "e1+e2" {
                return Some(0);
            }
            let (k, i) = parse_k_eps(&l)?;
            if i > n {
                None
            } else if i == 1 && k >= 1 {
                Some(0)
            } else if i == n && k < 0 {
                Some(n)
            } else if k > 0 {
                Some(i - 1)
            } else {
                Some(i)
            }
        }
    }
}

fn b_diff_index(n: usize, l: &str) -> Option<usize> {
    match l {
        "e1+e2" | "2e1" => return Some(0),
        "e2+e3" | "-e1+e2" => return Some(1),
        _ => {}
    }
    let rest = l.strip_prefix("e1")?;
    let (sign, idx) = rest.split_at(1);
    let j: usize = idx.strip_prefix('e')?.parse().ok()?;
    match sign {
        "+" if (3..=n).contains(&j) => Some(j - 1),
        "-" if (2..=n).contains(&j) => Some(j),
        _ => None,
    }
}

/// The displayed difference `m_w^{w_γ} − m_w^{w_{s_iγ}}` for a label, with
/// `i` from [`diff_index`].  Returns `Ok(None)` for labels with no displayed
/// expression.
pub fn diff_formula(kind: CartanType, label: &str, gamma: &[i64]) -> Result<Option<Rational>> {
    check_gamma(kind, gamma)?;
    let l = normalize(label);
    Ok(match kind {
        CartanType::B(n) => diff_b(n, &l, gamma),
        CartanType::C(n) => diff_c(n, &l, gamma)?,
        CartanType::F4 => diff_f(&l, gamma),
        CartanType::G2 => diff_g(&l, gamma),
    })
}

fn pm1(e: i64) -> i64 {
    if odd(e) {
        -1
    } else {
        1
    }
}

fn diff_b(n: usize, l: &str, gamma: &[i64]) -> Option<Rational> {
    let b = gamma[n - 1];
    // a_0 = 0, a_1..a_{n-1}, a_n = b: the displayed cases use b in place of
    // a_n where the index reaches n.
    let mut a = vec![0i64; n + 1];
    a[1..n].copy_from_slice(&gamma[..n - 1]);
    a[n] = b;
    let i = b_diff_index(n, l)?;
    Some(match l {
        "e1+e2" => frac(a[1] - 1, 2) - frac(pm1(a[1]) * ind(odd(a[2])), 2),
        "2e1" => frac(a[2] - 1, 2) + frac(pm1(a[1]) * ind(odd(a[1])), 2),
        "e2+e3" => rat(ceil2(a[2] - a[1]) - ceil2(a[1])),
        "-e1+e2" => rat(floor2(a[2] - a[1]) - floor2(a[1])),
        _ if l.starts_with("e1+") => {
            if i < n - 1 {
                rat(-a[i]) + frac(a[i - 1] + a[i + 1], 2)
                    + frac(pm1(a[i] - a[i - 1]) * ind(odd(a[i - 1] - a[i + 1])), 2)
            } else {
                rat(-a[n - 1]) + frac(a[n - 2] + b, 2)
                    + frac(pm1(a[n - 1]) * ind(odd(a[n - 2] - b)), 2)
            }
        }
        _ => {
            if i < n {
                rat(-a[i]) + frac(a[i - 1] + a[i + 1], 2)
                    - frac(pm1(a[i] - a[i - 1]) * ind(odd(a[i - 1] - a[i + 1])), 2)
            } else {
                rat(-2 * b)
            }
        }
    })
}

fn diff_c(n: usize, l: &str, gamma: &[i64]) -> Result<Option<Rational>> {
    let a = padded_c(n, gamma);
    let b = a[n];
    let sgn_b = pm1(b);
    let base = (a[1].abs() - (a[1] - 1).abs()) as i64;
    if l == "e1+e2" {
        return Ok(Some(frac(base + sgn_b, 2)));
    }
    let Some((k, i)) = parse_k_eps(l) else {
        return Ok(None);
    };
    if i > n {
        return Ok(None);
    }
    if (k, i) == (1, 1) {
        return Ok(Some(frac(base - sgn_b, 2)));
    }
    if i == 1 && k >= 2 {
        // (Ξ^{a1−1/2} − Ξ^{1/2−a1})/(Ξ^{1/2} − Ξ^{−1/2}) − (|a1| − |a1−1|),
        // read at Ξ^{k−1}.
        let f = div(
            &(xp(2 * a[1] - 1) - xp(1 - 2 * a[1])),
            &xi_half_diff(),
            "kε_1 difference",
        )? - LaurentPoly::constant(base);
        return Ok(Some(rat(f.coeff(2 * (k as i32 - 1)))));
    }
    if i == n && k < 0 {
        let f1 = div(
            &(xp(2 * (b - a[n - 1])) - xp(2 * (a[n - 1] - b))),
            &xi_half_diff(),
            "-kε_n difference",
        )?;
        let f2 = div(
            &(xp(2 * a[n - 1] - 1) - xp(1 - 2 * a[n - 1])),
            &xi_half_diff(),
            "-kε_n difference",
        )?;
        let f = &f1 * &f2;
        return Ok(Some(rat(f.coeff(2 * (-k) as i32 - 1))));
    }
    // Family s_j with j = i − 1 for positive k and j = i for negative k.
    let j = if k > 0 { i - 1 } else { i };
    let f = div(
        &(xp(2 * (a[j] - a[j - 1])) - xp(2 * (a[j + 1] - a[j]))),
        &(xp(2) - xp(0)),
        "family difference",
    )?;
    let e = if k > 0 { 2 * (k - 1) } else { 2 * k };
    Ok(Some(rat(f.coeff(e as i32))))
}

fn diff_f(l: &str, gamma: &[i64]) -> Option<Rational> {
    let (a1, a2, a3, a4) = (gamma[0], gamma[1], gamma[2], gamma[3]);
    let r = ind(odd(a1 - a2)) - ind(odd(a2));
    Some(match l {
        "e1+e2" => frac(a1 - ind(!odd(a1 - a2)) - ind(!odd(a2)), 2),
        "e1+e3" => rat(floor2(a2 - a1) - floor2(a1)),
        "e1+e4" => rat(a3) - frac(a1, 2) + frac(r, 2),
        "e1-e4" => rat(a2 - 2 * a3 + a4),
        "e2+e3" => rat(a3 - 2 * a4),
        "e1-e3" => rat(a3) - frac(a1, 2) - frac(r, 2),
        "e1-e2" => rat(ceil2(a2 - a1) - ceil2(a1)),
        "2e1" => frac(a1 + ind(!odd(a1 - a2)) + ind(!odd(a2)), 2),
        _ => return None,
    })
}

fn fl3(x: i64) -> i64 {
    Integer::div_floor(&x, &3)
}

fn diff_g(l: &str, gamma: &[i64]) -> Option<Rational> {
    let (m, n) = (gamma[0], gamma[1]);
    Some(match l {
        "s0" => rat(2 * fl3(m - 1)) + frac(m - ind(!odd(m - n)) - ind(!odd(n)), 2),
        "s1s0" => frac(n + ind(odd(m)) - ind(odd(m - n)), 2) - rat(fl3(m - 2)),
        "s2s1s0" => rat(-floor2(n - m) - ceil2(n)),
        "s1s2s1s0" => rat(n - m + fl3(m - 2)),
        "s0s1s2s1s0" => rat(-2 * fl3(m - 1)),
        "s2s1s2s1s0" => rat(-ceil2(n - m) - floor2(n)),
        "s1s2s1s2s1s0" => frac(n + ind(!odd(m)) - ind(!odd(m - n)), 2) - rat(fl3(m - 2)),
        "s0s1s2s1s2s1s0" => rat(2 * fl3(m - 1)) + frac(m - ind(odd(m - n)) - ind(odd(n)), 2),
        _ => return None,
    })
}

/// Integer points of the box `|γ_i| ≤ r`, in graded-lex order (by
/// `Σ|γ_i|`, then lexicographically).
pub fn box_points(rank: usize, r: i64) -> Vec<Vec<i64>> {
    let mut pts: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..rank {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                (-r..=r).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    pts.sort_by_key(|p| (p.iter().map(|x| x.abs()).sum::<i64>(), p.clone()));
    pts
}

/// One comparison of a displayed difference formula.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorollaryRow {
    pub gamma: Vec<i64>,
    pub label: String,
    /// Index `i` of the reflection `s_i`.
    pub reflection: usize,
    pub reflected: Vec<i64>,
    pub displayed: String,
    /// Difference of the two oracle values.
    pub oracle: i64,
    /// Difference of the two theorem values.
    pub theorem: i64,
}

/// Per-label tallies of a corollary audit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CorollaryTally {
    pub checked: usize,
    pub mismatched: usize,
    pub positive_checked: usize,
    pub positive_mismatched: usize,
}

/// Outcome of comparing every displayed difference formula with oracle
/// differences over a box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorollaryAudit {
    pub kind: CartanType,
    pub radius: i64,
    pub tallies: BTreeMap<String, CorollaryTally>,
    /// Rows where the displayed value differs from the oracle difference.
    pub mismatches: Vec<CorollaryRow>,
    /// Mismatching rows at `γ = θ∨`.
    pub anchor_mismatches: Vec<CorollaryRow>,
    /// Rows where the theorem difference differs from the oracle difference.
    pub theorem_mismatches: Vec<CorollaryRow>,
}

/// Compares [`diff_formula`] against oracle differences (and against
/// differences of [`m_formula`]) for every labelled cell element and every
/// `γ` in the box `|γ_i| ≤ radius`.  In type C the labels audited are those
/// of cell elements of length at most `c_labels_len`.
pub fn audit_corollaries(
    cell: &mut crate::cell::Cell,
    radius: i64,
    c_labels_len: usize,
) -> Result<CorollaryAudit> {
    use crate::module::{expand_translation_grow, Expansion};
    use std::collections::HashMap;

    let kind = cell.group.kind();
    let sys = cell.group.sys.clone();
    let theta = sys.theta.clone();
    let mut cache: HashMap<Vec<i64>, Expansion> = HashMap::new();
    let mut oracle = |cell: &mut crate::cell::Cell, g: &[i64]| -> Result<Expansion> {
        if let Some(e) = cache.get(g) {
            return Ok(e.clone());
        }
        let e = expand_translation_grow(cell, g)?;
        cache.insert(g.to_vec(), e.clone());
        Ok(e)
    };
    let mut audit = CorollaryAudit {
        kind,
        radius,
        tallies: BTreeMap::new(),
        mismatches: Vec::new(),
        anchor_mismatches: Vec::new(),
        theorem_mismatches: Vec::new(),
    };
    let mut points = box_points(sys.rank, radius);
    if !points.contains(&theta) {
        points.push(theta.clone());
    }
    for gamma in points {
        let in_box = gamma.iter().all(|x| x.abs() <= radius);
        let e = oracle(cell, &gamma)?;
        let f = m_formula(kind, &gamma)?;
        let ids: Vec<usize> = cell
            .ordered_ids()
            .into_iter()
            .filter(|&id| cell.is_finite_type() || cell.nodes[id].len <= c_labels_len)
            .collect();
        for id in ids {
            let label = cell.nodes[id].label.clone();
            let Some(i) = diff_index(kind, &label) else {
                continue;
            };
            let Some(shown) = diff_formula(kind, &label, &gamma)? else {
                continue;
            };
            let reflected = sys.affine_reflect(i, &gamma);
            let e2 = oracle(cell, &reflected)?;
            let f2 = m_formula(kind, &reflected)?;
            let row = CorollaryRow {
                gamma: gamma.clone(),
                label: label.clone(),
                reflection: i,
                reflected,
                displayed: crate::weight::format_rational(&shown),
                oracle: e.get(id) - e2.get(id),
                theorem: f.get(&label)? - f2.get(&label)?,
            };
            let ok = shown == rat(row.oracle);
            if row.theorem != row.oracle {
                audit.theorem_mismatches.push(row.clone());
            }
            if gamma == theta && !ok {
                audit.anchor_mismatches.push(row.clone());
            }
            if !in_box {
                continue;
            }
            let positive = gamma.iter().all(|&x| x >= 1);
            let t = audit.tallies.entry(label).or_default();
            t.checked += 1;
            t.positive_checked += usize::from(positive);
            if !ok {
                t.mismatched += 1;
                t.positive_mismatched += usize::from(positive);
                audit.mismatches.push(row);
            }
        }
    }
    Ok(audit)
}

/// Types and box radii of the committed difference-formula findings.
pub const FINDINGS_BOXES: [(CartanType, i64); 6] = [
    (CartanType::G2, 4),
    (CartanType::B(3), 3),
    (CartanType::B(4), 2),
    (CartanType::F4, 2),
    (CartanType::C(2), 3),
    (CartanType::C(3), 2),
];

/// Difference-formula audits over [`FINDINGS_BOXES`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorollaryFindings {
    pub audits: Vec<CorollaryAudit>,
}

impl CorollaryFindings {
    pub fn anchor_mismatches(&self) -> usize {
        self.audits.iter().map(|a| a.anchor_mismatches.len()).sum()
    }

    /// Mismatches on the sub-box with every coordinate `≥ 1`.
    pub fn positive_mismatches(&self) -> usize {
        self.audits
            .iter()
            .flat_map(|a| a.tallies.values())
            .map(|t| t.positive_mismatched)
            .sum()
    }

    pub fn theorem_mismatches(&self) -> usize {
        self.audits.iter().map(|a| a.theorem_mismatches.len()).sum()
    }

    /// Compact JSON, one line, with a trailing newline.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string(self).map_err(|e| Error::Invalid(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

/// Runs [`audit_corollaries`] for one type.  Type C audits the labels of
/// length at most `2·rank·(radius + 1)`.
pub fn audit_type(kind: CartanType, radius: i64) -> Result<CorollaryAudit> {
    let g = crate::affine::AffineWeyl::new(kind)?;
    let mut cell = match kind {
        CartanType::C(_) => crate::cell::Cell::new(g, 4),
        _ => crate::cell::Cell::full(g)?,
    };
    audit_corollaries(&mut cell, radius, 2 * kind.rank() * (radius.max(0) as usize + 1))
}

pub fn corollary_findings() -> Result<CorollaryFindings> {
    let audits = FINDINGS_BOXES
        .iter()
        .map(|&(k, r)| audit_type(k, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(CorollaryFindings { audits })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_eps_labels_round_trip() {
        for (k, i) in [(1, 1), (-1, 2), (3, 2), (-2, 3)] {
            assert_eq!(parse_k_eps(&k_eps_label(3, k, i)), Some((k, i)));
        }
        assert_eq!(parse_k_eps("e1+e2"), None);
    }

    #[test]
    fn quasi_rewriting_of_n_r() {
        for m in 0..50 {
            for r in 0..3 {
                assert_eq!(n_r(m, r), n_r_quasi(m, r), "m={m} r={r}");
            }
        }
    }
}
