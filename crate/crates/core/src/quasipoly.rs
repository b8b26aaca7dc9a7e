//! Exact quasi-polynomial fits of `γ ↦ m_{w_ν}^{w_γ}`.
//!
//! A quasi-polynomial of period `l` and degree `d` on `Z^r` is a polynomial
//! of total degree `≤ d` on each residue class of `(Z/l)^r`.  Fitting solves
//! one exact linear system per class.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::cell::Cell;
use crate::closed::box_points;
use crate::error::{Error, Result};
use crate::linalg::{solve, Solution};
use crate::module::{expand_translation, translation_length};

/// Samples `γ ↦ value`, ordered by `γ`.
pub type Samples = BTreeMap<Vec<i64>, i64>;

/// Exponent multi-indices of total degree `≤ d`, by degree and then
/// lexicographically descending.
pub fn monomials(rank: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(rank: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == rank - 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(rank, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for deg in 0..=d {
        rec(rank, deg, &mut Vec::new(), &mut out);
    }
    out
}

fn monomial_value(gamma: &[i64], e: &[u32]) -> BigInt {
    gamma
        .iter()
        .zip(e)
        .fold(BigInt::one(), |acc, (&x, &k)| acc * BigInt::from(x).pow(k))
}

fn residue(gamma: &[i64], l: i64) -> Vec<i64> {
    gamma.iter().map(|x| x.rem_euclid(l)).collect()
}

fn ser_rationals<S: Serializer>(v: &BTreeMap<Vec<i64>, Vec<BigRational>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let m: BTreeMap<String, Vec<String>> = v
        .iter()
        .map(|(k, c)| (crate::affine::format_vec(k), c.iter().map(|q| q.to_string()).collect()))
        .collect();
    m.serialize(s)
}

/// A fitted quasi-polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiPoly {
    pub rank: usize,
    pub period: i64,
    pub degree: u32,
    /// Monomial exponents, in the order used by every coefficient vector.
    pub monomials: Vec<Vec<u32>>,
    /// Residue class to coefficients.
    #[serde(serialize_with = "ser_rationals")]
    pub coeffs: BTreeMap<Vec<i64>, Vec<BigRational>>,
}

impl QuasiPoly {
    pub fn eval(&self, gamma: &[i64]) -> Option<BigRational> {
        let c = self.coeffs.get(&residue(gamma, self.period))?;
        Some(
            self.monomials
                .iter()
                .zip(c)
                .filter(|(_, q)| !q.is_zero())
                .map(|(e, q)| q * BigRational::from_integer(monomial_value(gamma, e)))
                .fold(BigRational::zero(), |a, b| a + b),
        )
    }

    /// Samples where the evaluation differs from the sampled value.
    pub fn mismatches(&self, samples: &Samples) -> Vec<Vec<i64>> {
        samples
            .iter()
            .filter(|(g, &v)| self.eval(g) != Some(BigRational::from_integer(v.into())))
            .map(|(g, _)| g.clone())
            .collect()
    }
}

/// Result of [`fit`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum FitOutcome {
    Feasible(QuasiPoly),
    /// Some residue class has an inconsistent system.
    Infeasible { residue: Vec<i64> },
    /// Some residue class has too few samples, or a rank-deficient system.
    InsufficientSamples { residue: Vec<i64>, samples: usize, monomials: usize },
}

impl FitOutcome {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Feasible(_) => "feasible",
            Self::Infeasible { .. } => "infeasible",
            Self::InsufficientSamples { .. } => "insufficient",
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible(_))
    }
}

enum ClassFit {
    Ok(Vec<BigRational>),
    Inconsistent,
    Short(usize),
}

/// Fits a quasi-polynomial of period `l` and degree `≤ d` exactly.
pub fn fit(samples: &Samples, l: i64, d: u32) -> Result<FitOutcome> {
    if l < 1 {
        return Err(Error::Invalid("period must be positive".into()));
    }
    let rank = samples
        .keys()
        .next()
        .map(|g| g.len())
        .ok_or_else(|| Error::Invalid("no samples".into()))?;
    let mons = monomials(rank, d);
    let mut classes: BTreeMap<Vec<i64>, Vec<(&Vec<i64>, i64)>> = BTreeMap::new();
    for (g, &v) in samples {
        classes.entry(residue(g, l)).or_default().push((g, v));
    }
    let total = (l as usize).pow(rank as u32);
    let results: Vec<(Vec<i64>, ClassFit)> = classes
        .into_par_iter()
        .map(|(res, pts)| {
            if pts.len() < mons.len() {
                return (res, ClassFit::Short(pts.len()));
            }
            let a: Vec<Vec<BigInt>> = pts
                .iter()
                .map(|(g, _)| mons.iter().map(|e| monomial_value(g, e)).collect())
                .collect();
            let b: Vec<BigInt> = pts.iter().map(|(_, v)| BigInt::from(*v)).collect();
            let out = match solve(&a, &b) {
                Solution::Unique(x) => ClassFit::Ok(x),
                Solution::Inconsistent => ClassFit::Inconsistent,
                Solution::Underdetermined { .. } => ClassFit::Short(pts.len()),
            };
            (res, out)
        })
        .collect();
    if let Some((res, _)) = results.iter().find(|(_, f)| matches!(f, ClassFit::Inconsistent)) {
        return Ok(FitOutcome::Infeasible { residue: res.clone() });
    }
    if results.len() < total {
        let missing = (0..total)
            .map(|k| {
                let mut k = k;
                (0..rank)
                    .map(|_| {
                        let r = (k % l as usize) as i64;
                        k /= l as usize;
                        r
                    })
                    .collect::<Vec<i64>>()
            })
            .find(|r| !results.iter().any(|(x, _)| x == r))
            .unwrap_or_default();
        return Ok(FitOutcome::InsufficientSamples { residue: missing, samples: 0, monomials: mons.len() });
    }
    let mut coeffs = BTreeMap::new();
    for (res, f) in results {
        match f {
            ClassFit::Ok(x) => {
                coeffs.insert(res, x);
            }
            ClassFit::Short(n) => {
                return Ok(FitOutcome::InsufficientSamples { residue: res, samples: n, monomials: mons.len() })
            }
            ClassFit::Inconsistent => unreachable!(),
        }
    }
    Ok(FitOutcome::Feasible(QuasiPoly { rank, period: l, degree: d, monomials: mons, coeffs }))
}

/// One cell of the feasibility grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridEntry {
    pub period: i64,
    pub degree: u32,
    pub outcome: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    /// First feasible `(l, d)` with `d` running over `0..=d_max` and, for
    /// each degree, `l` over the divisors of `l_max` in increasing order.
    pub minimal: Option<(i64, u32)>,
    pub grid: Vec<GridEntry>,
    /// Pairs `((l, d), (l', d'))` with `l | l'`, `d ≤ d'`, the first feasible
    /// and the second infeasible.
    pub monotonicity_violations: Vec<((i64, u32), (i64, u32))>,
}

pub fn divisors(n: i64) -> Vec<i64> {
    (1..=n).filter(|k| n % k == 0).collect()
}

/// Scans periods dividing `l_max` and degrees up to `d_max`.
pub fn scan_minimal(samples: &Samples, l_max: i64, d_max: u32) -> Result<ScanReport> {
    let mut grid = Vec::new();
    for l in divisors(l_max) {
        for d in 0..=d_max {
            let o = fit(samples, l, d)?;
            grid.push(GridEntry { period: l, degree: d, outcome: o.tag() });
        }
    }
    let minimal = grid
        .iter()
        .filter(|e| e.outcome == "feasible")
        .min_by_key(|e| (e.degree, e.period))
        .map(|e| (e.period, e.degree));
    let mut monotonicity_violations = Vec::new();
    for a in grid.iter().filter(|e| e.outcome == "feasible") {
        for b in grid.iter().filter(|e| e.outcome == "infeasible") {
            if b.period % a.period == 0 && b.degree >= a.degree {
                monotonicity_violations.push(((a.period, a.degree), (b.period, b.degree)));
            }
        }
    }
    Ok(ScanReport { minimal, grid, monotonicity_violations })
}

/// Oracle values of `m_{w}^{w_γ}` for the cell element `id` at the given
/// points, computed from the cell module.
pub fn oracle_samples(cell: &mut Cell, id: usize, points: &[Vec<i64>]) -> Result<Samples> {
    let mut need = 0;
    for g in points {
        need = need.max(translation_length(cell, g)?);
    }
    cell.grow_to(need + 2);
    let cell: &Cell = cell;
    let vals: Result<Vec<i64>> = points
        .par_iter()
        .map(|g| expand_translation(cell, g).map(|e| e.get(id)))
        .collect();
    Ok(points.iter().cloned().zip(vals?).collect())
}

/// Points with `lo ≤ max_j |γ_j| ≤ hi`.
pub fn shell_points(rank: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    box_points(rank, hi)
        .into_iter()
        .filter(|g| g.iter().map(|x| x.abs()).max().unwrap_or(0) >= lo)
        .collect()
}

/// Fit on the box of radius `train`, then compare on the shell
/// `train < max|γ_j| ≤ holdout`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HoldoutReport {
    pub period: i64,
    pub degree: u32,
    pub train_radius: i64,
    pub holdout_radius: i64,
    pub outcome: &'static str,
    pub holdout_checked: usize,
    pub holdout_mismatches: Vec<Vec<i64>>,
}

pub fn fit_with_holdout(
    cell: &mut Cell,
    id: usize,
    l: i64,
    d: u32,
    train: i64,
    holdout: i64,
) -> Result<(FitOutcome, HoldoutReport)> {
    let rank = cell.group.rank();
    let samples = oracle_samples(cell, id, &box_points(rank, train))?;
    let outcome = fit(&samples, l, d)?;
    let mut rep = HoldoutReport {
        period: l,
        degree: d,
        train_radius: train,
        holdout_radius: holdout,
        outcome: outcome.tag(),
        holdout_checked: 0,
        holdout_mismatches: Vec::new(),
    };
    if let FitOutcome::Feasible(qp) = &outcome {
        if holdout > train {
            let shell = oracle_samples(cell, id, &shell_points(rank, train + 1, holdout))?;
            rep.holdout_checked = shell.len();
            rep.holdout_mismatches = qp.mismatches(&shell);
        }
    }
    Ok((outcome, rep))
}
