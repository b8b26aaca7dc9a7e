//! Character numerators `R̂·ch L(Λ)` assembled from inverse KL values on the
//! cell, as truncated weight maps.
//!
//! For `w` in the cell with `i = μ(w)` and `λ = −Λ_i + Σ_{k≠i} m_k Λ_k`, the
//! numerator of `Λ = w⁻¹∘λ` is
//! `½ Σ_γ Σ_{u∈W} ε(uw) (m_w^{w_γ} − m_w^{w_{s_iγ}}) e^{u t_{−γ}(λ+ρ̂)}`,
//! where `s_iγ` is the affine action on coroots.  The unpaired form
//! `Σ_γ Σ_u ε(uw) m_w^{w_γ} e^{u t_{−γ}(λ+ρ̂)}` is also available.
//!
//! Sums run over a box `|γ_j| ≤ r`.  A weight is *safe* when every `(u, γ)`
//! reaching it has `γ` inside the box; only safe weights are kept.  Since
//! `u t_{−γ} X` has finite part `u(X̄ − k ν(γ))`, the preimages of a weight
//! `μ` are found by solving `k ν(γ') = X̄ − u'μ̄` for each `u' ∈ W`.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::affine::AffineWeyl;
use crate::cell::Cell;
use crate::closed::{box_points, diff_formula, m_formula_label};
use crate::error::{Error, Result};
use crate::linalg::solve_integral;
use crate::module::expand_translation_grow;
use crate::rootdata::{CartanType, Rational};
use crate::weight::{format_rational, AffineWeight};

/// Where the values `m_w^{w_γ}` come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MSource {
    /// Expansion of `t_γ · C_1` in the cell module.
    Oracle,
    /// The closed formulas for `m_w^{w_γ}`.
    Formula,
    /// The displayed difference formulas (paired assembly only).
    Corollary,
}

impl std::str::FromStr for MSource {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Self::Oracle),
            "formula" => Ok(Self::Formula),
            "corollary" => Ok(Self::Corollary),
            _ => Err(Error::Invalid(format!("unknown m-source {s:?}"))),
        }
    }
}

/// Which description of admissible weights applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AdmissibleCase {
    /// `λ + ρ̂` regular dominant integral.
    RegularDominant,
    /// `λ = −Λ_i + Σ_{k≠i} m_k Λ_k + xδ` with `i = μ(w)` and `m_k ≥ 0`.
    Singular,
}

/// One admissible pair `(λ, Λ = w⁻¹∘λ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Admissible {
    pub lambda: AffineWeight,
    pub big_lambda: AffineWeight,
    pub case: AdmissibleCase,
    /// Level of `Λ` (equal to the level of `λ`).
    pub level: i64,
    /// Whether the level is at least `−b`, with `b` the largest coefficient
    /// of `θ∨`.
    pub level_ok: bool,
}

/// Largest coefficient of `θ∨` in the simple coroots.
pub fn theta_max_coeff(g: &AffineWeyl) -> i64 {
    g.sys.theta.iter().copied().max().unwrap_or(1)
}

/// Classifies `λ` for the cell element `id`, or `None` if it is neither
/// regular dominant after the `ρ̂`-shift nor of the singular form.
pub fn admissibility(cell: &Cell, id: usize, lambda: &AffineWeight) -> Option<AdmissibleCase> {
    let i = cell.nodes.get(id)?.mu;
    if lambda.lam.iter().all(|&x| x >= 0) {
        Some(AdmissibleCase::RegularDominant)
    } else if lambda
        .lam
        .iter()
        .enumerate()
        .all(|(k, &x)| if k == i { x == -1 } else { x >= 0 })
    {
        Some(AdmissibleCase::Singular)
    } else {
        None
    }
}

fn admissible_entry(cell: &Cell, id: usize, lambda: AffineWeight, case: AdmissibleCase) -> Admissible {
    let g = &cell.group;
    let winv = g.inverse(&cell.nodes[id].elt);
    let big_lambda = g.dot_action(&winv, &lambda);
    let level = g.level(&lambda);
    Admissible {
        lambda,
        big_lambda,
        case,
        level,
        level_ok: level >= -theta_max_coeff(g),
    }
}

/// Every admissible `λ` with coefficients in `0..=bound` (besides the
/// forced `−1`), with `δ`-part zero.  Case (a) entries come first, each
/// family in lexicographic order.
pub fn admissible_lambdas(cell: &Cell, id: usize, bound: i64) -> Result<Vec<Admissible>> {
    let node = cell
        .nodes
        .get(id)
        .ok_or_else(|| Error::NotInCell(format!("node {id}")))?;
    let rank = cell.group.rank();
    let i = node.mu;
    let mut out = Vec::new();
    let mut push_all = |fixed: Option<usize>, case: AdmissibleCase| {
        let free: Vec<usize> = (0..=rank).filter(|&k| Some(k) != fixed).collect();
        let mut digits = vec![0i64; free.len()];
        loop {
            let mut lam = vec![0i64; rank + 1];
            if let Some(f) = fixed {
                lam[f] = -1;
            }
            for (k, &d) in free.iter().zip(&digits) {
                lam[*k] = d;
            }
            let w = AffineWeight::new(lam, Rational::from_integer(0));
            out.push(admissible_entry(cell, id, w, case));
            let mut pos = free.len();
            loop {
                if pos == 0 {
                    return;
                }
                pos -= 1;
                if digits[pos] < bound {
                    digits[pos] += 1;
                    digits[pos + 1..].iter_mut().for_each(|d| *d = 0);
                    break;
                }
            }
        }
    };
    push_all(None, AdmissibleCase::RegularDominant);
    push_all(Some(i), AdmissibleCase::Singular);
    Ok(out)
}

/// Cell elements `w` for which `λ = w∘Λ` is of the singular form, with
/// that `λ`.
pub fn realize(cell: &Cell, big_lambda: &AffineWeight) -> Vec<(usize, AffineWeight)> {
    let g = &cell.group;
    cell.ordered_ids()
        .into_iter()
        .filter_map(|id| {
            let lambda = g.dot_action(&cell.nodes[id].elt, big_lambda);
            (admissibility(cell, id, &lambda) == Some(AdmissibleCase::Singular)).then_some((id, lambda))
        })
        .collect()
}

/// Truncated numerator: integer coefficients on the safe weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightMap {
    pub kind: CartanType,
    pub radius: i64,
    /// `λ + ρ̂`, the weight whose orbit carries the sum.
    pub origin: AffineWeight,
    /// `Λ + ρ̂`.
    pub leading_weight: AffineWeight,
    /// Nonzero coefficients at safe weights.
    pub entries: BTreeMap<AffineWeight, i64>,
    /// Number of safe weights reached (including zero coefficients).
    pub safe_weights: usize,
    /// Number of weights reached outside the safe region.
    pub unsafe_weights: usize,
    /// Coefficient at `Λ + ρ̂`, if that weight is safe.
    pub leading: Option<i64>,
}

impl WeightMap {
    pub fn coeff(&self, mu: &AffineWeight) -> i64 {
        self.entries.get(mu).copied().unwrap_or(0)
    }

    /// Pairs `(μ, s_j μ)` violating `coeff(s_j μ) = −coeff(μ)` for finite
    /// simple reflections.  The safe region is a union of `W`-orbits, so
    /// both weights are always safe.
    pub fn antisymmetry_failures(&self, g: &AffineWeyl) -> Vec<(AffineWeight, usize)> {
        let mut out = Vec::new();
        for (mu, &c) in &self.entries {
            for j in 1..=g.rank() {
                let nu = g.reflect_weight(j, mu);
                if self.coeff(&nu) != -c {
                    out.push((mu.clone(), j));
                }
            }
        }
        out
    }

    /// Weights whose level differs from that of `λ + ρ̂`.
    pub fn level_failures(&self, g: &AffineWeyl) -> Vec<AffineWeight> {
        let k = g.level(&self.origin);
        self.entries
            .keys()
            .filter(|mu| g.level(mu) != k)
            .cloned()
            .collect()
    }
}

/// Exact safety test for weights of the orbit of `origin`.
struct SafeRegion<'a> {
    g: &'a AffineWeyl,
    origin: AffineWeight,
    level: i64,
    radius: i64,
}

impl<'a> SafeRegion<'a> {
    fn new(g: &'a AffineWeyl, origin: AffineWeight, radius: i64) -> Result<Self> {
        let level = g.level(&origin);
        if level == 0 {
            return Err(Error::Invalid("λ + ρ̂ has level zero".into()));
        }
        Ok(Self { g, origin, level, radius })
    }

    /// Every `γ'` with `u' t_{−γ'}(origin)` having the finite part of `μ`.
    fn preimages(&self, mu: &AffineWeight) -> Vec<Vec<i64>> {
        let r = self.g.rank();
        let gram: Vec<Vec<i64>> = self
            .g
            .sys
            .gram2
            .iter()
            .map(|row| row.iter().map(|&x| x * self.level).collect())
            .collect();
        let mut out = Vec::new();
        for u in 0..self.g.fin.size() as u32 {
            let z = self.g.finite_act_weight(u, mu);
            let y: Vec<i64> = (1..=r).map(|i| self.origin.lam[i] - z.lam[i]).collect();
            if let Some(gp) = solve_integral(&gram, &y) {
                out.push(gp);
            }
        }
        out
    }

    fn is_safe(&self, mu: &AffineWeight) -> bool {
        self.preimages(mu)
            .iter()
            .all(|gp| gp.iter().all(|c| c.abs() <= self.radius))
    }

    /// `t_{−γ}(origin)`.
    fn base(&self, gamma: &[i64]) -> AffineWeight {
        let neg: Vec<i64> = gamma.iter().map(|x| -x).collect();
        self.g.translate_weight(&neg, &self.origin)
    }
}

/// Memoised `m_w^{w_γ}` for one cell element.
struct MValues<'a> {
    cell: &'a mut Cell,
    id: usize,
    source: MSource,
    cache: HashMap<Vec<i64>, i64>,
}

impl MValues<'_> {
    fn get(&mut self, gamma: &[i64]) -> Result<i64> {
        if let Some(&v) = self.cache.get(gamma) {
            return Ok(v);
        }
        let v = match self.source {
            MSource::Oracle => expand_translation_grow(self.cell, gamma)?.get(self.id),
            MSource::Formula | MSource::Corollary => {
                let kind = self.cell.group.kind();
                m_formula_label(kind, gamma, &self.cell.nodes[self.id].label)?
            }
        };
        self.cache.insert(gamma.to_vec(), v);
        Ok(v)
    }

    /// `½(m(γ) − m(s_iγ))`, or half the displayed difference.
    fn half_diff(&mut self, gamma: &[i64]) -> Result<Rational> {
        let node = &self.cell.nodes[self.id];
        let i = node.mu;
        if self.source == MSource::Corollary {
            let kind = self.cell.group.kind();
            let label = node.label.clone();
            let d = diff_formula(kind, &label, gamma)?
                .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
            return Ok(d / Rational::from_integer(2));
        }
        let reflected = self.cell.group.sys.affine_reflect(i, gamma);
        let a = self.get(gamma)?;
        let b = self.get(&reflected)?;
        Ok(Rational::new(a - b, 2))
    }
}

/// Raw rational sum over the box, restricted to safe weights.
fn assemble(
    g: &AffineWeyl,
    region: &SafeRegion<'_>,
    radius: i64,
    sign_w: i64,
    mut coeff: impl FnMut(&[i64]) -> Result<Rational>,
) -> Result<(BTreeMap<AffineWeight, Rational>, usize, usize)> {
    let mut acc: BTreeMap<AffineWeight, Rational> = BTreeMap::new();
    let (mut safe, mut unsafe_) = (0usize, 0usize);
    for gamma in box_points(g.rank(), radius) {
        let y = region.base(&gamma);
        let n = g.fin.size();
        if !region.is_safe(&y) {
            unsafe_ += n;
            continue;
        }
        safe += n;
        let c = coeff(&gamma)?;
        if c == Rational::from_integer(0) {
            for u in 0..n as u32 {
                acc.entry(g.finite_act_weight(u, &y)).or_default();
            }
            continue;
        }
        for u in 0..n as u32 {
            let e = Rational::from_integer(g.fin.sign(u) * sign_w);
            *acc.entry(g.finite_act_weight(u, &y)).or_default() += e * c;
        }
    }
    Ok((acc, safe, unsafe_))
}

fn finish(
    cell: &Cell,
    radius: i64,
    region: &SafeRegion<'_>,
    leading_weight: AffineWeight,
    raw: (BTreeMap<AffineWeight, Rational>, usize, usize),
) -> Result<WeightMap> {
    let (acc, _, _) = &raw;
    let mut entries = BTreeMap::new();
    for (mu, c) in acc {
        if !c.is_integer() {
            return Err(Error::NonIntegral {
                label: "weight".into(),
                gamma: mu.to_string(),
                value: format_rational(c),
            });
        }
        if c.to_integer() != 0 {
            entries.insert(mu.clone(), c.to_integer());
        }
    }
    let leading = region
        .is_safe(&leading_weight)
        .then(|| entries.get(&leading_weight).copied().unwrap_or(0));
    Ok(WeightMap {
        kind: cell.group.kind(),
        radius,
        origin: region.origin.clone(),
        leading_weight,
        safe_weights: acc.len(),
        unsafe_weights: raw.2,
        entries,
        leading,
    })
}

fn prepare(cell: &Cell, lambda: &AffineWeight, id: usize) -> Result<(AffineWeight, AffineWeight, i64)> {
    let node = cell
        .nodes
        .get(id)
        .ok_or_else(|| Error::NotInCell(format!("node {id}")))?;
    if admissibility(cell, id, lambda) != Some(AdmissibleCase::Singular) {
        return Err(Error::Invalid(format!(
            "λ = {lambda} is not of the form −Λ_{} + Σ m_k Λ_k",
            node.mu
        )));
    }
    let g = &cell.group;
    let rho = AffineWeight::rho(g.rank());
    let origin = lambda.add(&rho);
    let winv = g.inverse(&node.elt);
    let leading = g.act_weight(&winv, &origin);
    let sign_w = if node.len % 2 == 0 { 1 } else { -1 };
    Ok((origin, leading, sign_w))
}

/// The paired numerator `½ Σ_γ Σ_u ε(uw)(m(γ) − m(s_iγ)) e^{u t_{−γ}(λ+ρ̂)}`.
pub fn character_numerator(
    cell: &mut Cell,
    lambda: &AffineWeight,
    id: usize,
    radius: i64,
    source: MSource,
) -> Result<WeightMap> {
    let (origin, leading, sign_w) = prepare(cell, lambda, id)?;
    let g = cell.group.clone();
    let region = SafeRegion::new(&g, origin, radius)?;
    let mut m = MValues { cell, id, source, cache: HashMap::new() };
    let raw = assemble(&g, &region, radius, sign_w, |gm| m.half_diff(gm))?;
    finish(m.cell, radius, &region, leading, raw)
}

/// The unpaired numerator `Σ_γ Σ_u ε(uw) m(γ) e^{u t_{−γ}(λ+ρ̂)}`.
pub fn character_numerator_unpaired(
    cell: &mut Cell,
    lambda: &AffineWeight,
    id: usize,
    radius: i64,
    source: MSource,
) -> Result<WeightMap> {
    if source == MSource::Corollary {
        return Err(Error::Invalid("the unpaired sum needs m-values".into()));
    }
    let (origin, leading, sign_w) = prepare(cell, lambda, id)?;
    let g = cell.group.clone();
    let region = SafeRegion::new(&g, origin, radius)?;
    let mut m = MValues { cell, id, source, cache: HashMap::new() };
    let raw = assemble(&g, &region, radius, sign_w, |gm| m.get(gm).map(Rational::from_integer))?;
    finish(m.cell, radius, &region, leading, raw)
}

/// Coefficient functions displayed for specific numerators, each of the
/// form `−Σ_γ Σ_u ε(u) f(γ) e^{u t_{−γ}(Λ+ρ̂)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DisplayedExample {
    /// G2, `Λ = −Λ_0`.
    G2MinusLambda0,
    /// G2, `Λ = −2Λ_0`.
    G2MinusTwoLambda0,
    /// B3, `Λ = −2Λ_0`.
    B3MinusTwoLambda0,
}

impl DisplayedExample {
    pub const ALL: [Self; 3] = [Self::G2MinusLambda0, Self::G2MinusTwoLambda0, Self::B3MinusTwoLambda0];

    pub fn kind(self) -> CartanType {
        match self {
            Self::G2MinusLambda0 | Self::G2MinusTwoLambda0 => CartanType::G2,
            Self::B3MinusTwoLambda0 => CartanType::B(3),
        }
    }

    /// `Λ`.
    pub fn big_lambda(self) -> AffineWeight {
        let rank = self.kind().rank();
        let k = if self == Self::G2MinusLambda0 { -1 } else { -2 };
        AffineWeight::fundamental(rank, 0).scale(k)
    }

    /// `f(γ)`.
    pub fn f(self, gamma: &[i64]) -> Rational {
        let ind = |c: bool| i64::from(c);
        let even = |x: i64| x.rem_euclid(2) == 0;
        match self {
            Self::G2MinusLambda0 | Self::G2MinusTwoLambda0 => {
                let (m, n) = (gamma[0], gamma[1]);
                let fl = num_integer::Integer::div_floor(&(m - 1), &3);
                Rational::from_integer(fl)
                    + Rational::new(m - ind(even(m - n)) - ind(even(n)), 4)
            }
            Self::B3MinusTwoLambda0 => {
                let (a1, a2) = (gamma[0], gamma[1]);
                let sign = if even(a1) { 1 } else { -1 };
                Rational::new(a1 - 1, 4) - Rational::new(sign * ind(!even(a2)), 4)
            }
        }
    }
}

/// Comparison of a displayed numerator with the oracle numerator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExampleGrade {
    pub example: DisplayedExample,
    pub radius: i64,
    /// Cell element used for the oracle side.
    pub w: String,
    /// Weights safe for both sums.
    pub compared: usize,
    pub agreeing: usize,
    /// Up to ten disagreeing weights with `(displayed, oracle)` values.
    pub samples: Vec<(String, String, i64)>,
    /// Safe weights where the displayed sum is not an integer.
    pub nonintegral: usize,
}

/// Builds the displayed numerator over the box and compares it with the
/// oracle numerator at every weight safe for both.
pub fn grade_example(cell: &mut Cell, example: DisplayedExample, radius: i64) -> Result<ExampleGrade> {
    if cell.group.kind() != example.kind() {
        return Err(Error::Invalid("cell type does not match the example".into()));
    }
    let big = example.big_lambda();
    let (id, lambda) = realize(cell, &big)
        .into_iter()
        .next()
        .ok_or_else(|| Error::Invalid(format!("{big} is not realised on the cell")))?;
    let oracle = character_numerator(cell, &lambda, id, radius, MSource::Oracle)?;
    let g = cell.group.clone();
    let rho = AffineWeight::rho(g.rank());
    let region = SafeRegion::new(&g, big.add(&rho), radius)?;
    let oracle_region = SafeRegion::new(&g, oracle.origin.clone(), radius)?;
    let (acc, _, _) = assemble(&g, &region, radius, -1, |gm| Ok(example.f(gm)))?;
    let mut grade = ExampleGrade {
        example,
        radius,
        w: cell.nodes[id].label.clone(),
        compared: 0,
        agreeing: 0,
        samples: Vec::new(),
        nonintegral: 0,
    };
    for (mu, c) in &acc {
        if !oracle_region.is_safe(mu) {
            continue;
        }
        grade.compared += 1;
        if !c.is_integer() {
            grade.nonintegral += 1;
        }
        let o = oracle.coeff(mu);
        if *c == Rational::from_integer(o) {
            grade.agreeing += 1;
        } else if grade.samples.len() < 10 {
            grade.samples.push((mu.to_string(), format_rational(c), o));
        }
    }
    Ok(grade)
}

/// One row of the type C check for `Λ = −Λ_0`, `w = s_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KwRow {
    pub gamma: Vec<i64>,
    pub oracle: i64,
    pub table: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KwReport {
    pub n: usize,
    pub radius: i64,
    pub checked: usize,
    pub mismatches: Vec<KwRow>,
}

/// The case table for `m_{w_{ε1}}^{w_γ} − m_{w_{ε1}}^{w_{s_0γ}}` in type
/// `C_n`: `+1` if `a_1 ≥ 1` and `a_n` is odd, `−1` if `a_1 ≤ 0` and `a_n`
/// is even, and `0` otherwise (`a_j = ⟨γ, Λ̄_j⟩`).
pub fn kac_wakimoto_table(gamma: &[i64]) -> i64 {
    let a1 = gamma[0];
    let an = gamma[gamma.len() - 1];
    let odd = an.rem_euclid(2) == 1;
    if a1 >= 1 && odd {
        1
    } else if a1 <= 0 && !odd {
        -1
    } else {
        0
    }
}

/// Compares the case table with oracle differences on the box.
pub fn kac_wakimoto_check_type_c(n: usize, radius: i64) -> Result<KwReport> {
    let g = AffineWeyl::new(CartanType::C(n))?;
    let mut cell = Cell::new(g, 4);
    let id = cell
        .find_word(&[0])
        .ok_or_else(|| Error::NotInCell("s0".into()))?;
    let mut rep = KwReport { n, radius, checked: 0, mismatches: Vec::new() };
    for gamma in box_points(n, radius) {
        let reflected = cell.group.sys.affine_reflect(0, &gamma);
        let a = expand_translation_grow(&mut cell, &gamma)?.get(id);
        let b = expand_translation_grow(&mut cell, &reflected)?.get(id);
        let row = KwRow { table: kac_wakimoto_table(&gamma), oracle: a - b, gamma };
        rep.checked += 1;
        if row.oracle != row.table {
            rep.mismatches.push(row);
        }
    }
    Ok(rep)
}
