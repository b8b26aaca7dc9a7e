//! Affine weights `λ = Σ_i λ_i Λ_i + xδ` and the action of `Ŵ` on them.
//!
//! The coordinate `λ_i` is the pairing `⟨λ, α_i∨⟩`; the δ-part is an exact
//! rational.  The simple root `α_j` has coordinates given by column `j` of the
//! affine Cartan matrix, with δ-part 1 for `j = 0` and 0 otherwise.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::affine::{AffineElement, AffineWeyl};
use crate::error::{Error, Result};
use crate::rootdata::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineWeight {
    pub lam: Vec<i64>,
    pub delta: Rational,
}

impl AffineWeight {
    pub fn new(lam: Vec<i64>, delta: Rational) -> Self {
        Self { lam, delta }
    }

    pub fn zero(rank: usize) -> Self {
        Self::new(vec![0; rank + 1], Rational::from_integer(0))
    }

    /// The fundamental weight `Λ_i`.
    pub fn fundamental(rank: usize, i: usize) -> Self {
        let mut w = Self::zero(rank);
        w.lam[i] = 1;
        w
    }

    /// `ρ̂ = Σ Λ_i`.
    pub fn rho(rank: usize) -> Self {
        Self::new(vec![1; rank + 1], Rational::from_integer(0))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(
            self.lam.iter().zip(&o.lam).map(|(a, b)| a + b).collect(),
            self.delta + o.delta,
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(
            self.lam.iter().zip(&o.lam).map(|(a, b)| a - b).collect(),
            self.delta - o.delta,
        )
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::new(
            self.lam.iter().map(|a| a * k).collect(),
            self.delta * Rational::from_integer(k),
        )
    }

    /// Parses expressions such as `-1*L0`, `-2L0+L1`, `L0+L2+1/2d`.
    pub fn parse(rank: usize, s: &str) -> Result<Self> {
        let mut w = Self::zero(rank);
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Invalid("empty weight".into()));
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (k, c) in s.chars().enumerate() {
            if (c == '+' || c == '-') && k > 0 && !cur.ends_with('*') && !cur.ends_with('/') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(c);
        }
        terms.push(cur);
        for t in terms {
            let (coef, sym) = split_term(&t)?;
            if let Some(idx) = sym.strip_prefix('L') {
                let i: usize = idx
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad weight symbol {sym:?}")))?;
                if i > rank {
                    return Err(Error::Invalid(format!("index {i} exceeds rank {rank}")));
                }
                if !coef.is_integer() {
                    return Err(Error::Invalid("Λ coefficients must be integers".into()));
                }
                w.lam[i] += coef.to_integer();
            } else if sym == "d" || sym == "delta" {
                w.delta += coef;
            } else {
                return Err(Error::Invalid(format!("bad weight symbol {sym:?}")));
            }
        }
        Ok(w)
    }
}

fn split_term(t: &str) -> Result<(Rational, String)> {
    let bad = || Error::Invalid(format!("bad weight term {t:?}"));
    let pos = t.find(|c: char| c == 'L' || c == 'd').ok_or_else(bad)?;
    let (num, sym) = t.split_at(pos);
    let num = num.trim_end_matches('*');
    let coef = match num {
        "" | "+" => Rational::from_integer(1),
        "-" => Rational::from_integer(-1),
        _ => parse_rational(num).ok_or_else(bad)?,
    };
    Ok((coef, sym.to_string()))
}

/// Parses `p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((p, q)) => {
            let q: i64 = q.parse().ok()?;
            if q == 0 {
                return None;
            }
            Some(Rational::new(p.parse().ok()?, q))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// Formats a rational as `p` or `p/q`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for AffineWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.lam.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}; {}]", parts.join(","), format_rational(&self.delta))
    }
}

impl PartialOrd for AffineWeight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AffineWeight {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lam
            .cmp(&other.lam)
            .then_with(|| self.delta.cmp(&other.delta))
    }
}

impl AffineWeyl {
    /// Level `⟨λ, K⟩ = Σ c_i λ_i`.
    pub fn level(&self, w: &AffineWeight) -> i64 {
        self.sys.level(&w.lam)
    }

    /// `α_j` in the `(Λ, δ)` basis.
    pub fn simple_root_weight(&self, j: usize) -> AffineWeight {
        let r = self.rank();
        let lam = (0..=r).map(|i| self.sys.affine_cartan[i][j]).collect();
        let d = if j == 0 { 1 } else { 0 };
        AffineWeight::new(lam, Rational::from_integer(d))
    }

    /// Linear action of `s_j`: `λ ↦ λ − ⟨λ, α_j∨⟩ α_j`.
    pub fn reflect_weight(&self, j: usize, w: &AffineWeight) -> AffineWeight {
        let p = w.lam[j];
        if p == 0 {
            return w.clone();
        }
        w.sub(&self.simple_root_weight(j).scale(p))
    }

    /// Linear action of a finite element `u` (fixes `Λ_0`-level and δ).
    pub fn finite_act_weight(&self, u: u32, w: &AffineWeight) -> AffineWeight {
        let r = self.rank();
        let ui = &self.fin.mats[self.fin.inv[u as usize] as usize];
        // λ'_i = Σ_j λ_j (U⁻¹)_{j i}
        let mut lam = vec![0i64; r + 1];
        for i in 0..r {
            lam[i + 1] = (0..r).map(|j| w.lam[j + 1] * ui.at(j, i)).sum();
        }
        let k = self.level(w);
        let rest: i64 = (1..=r).map(|i| self.sys.marks[i] * lam[i]).sum();
        lam[0] = k - rest;
        AffineWeight::new(lam, w.delta)
    }

    /// `t_γ(λ) = λ + k ν(γ) − (⟨λ̄, γ⟩ + k‖γ‖) δ` with `k` the level.
    pub fn translate_weight(&self, gamma: &[i64], w: &AffineWeight) -> AffineWeight {
        let r = self.rank();
        let k = self.level(w);
        let mut lam = w.lam.clone();
        // ν(γ) in Λ̄_i coordinates is gram2·γ; Λ̄_i = Λ_i − c_i Λ_0.
        for i in 0..r {
            let nu_i: i64 = (0..r).map(|j| self.sys.gram2[i][j] * gamma[j]).sum();
            lam[i + 1] += k * nu_i;
            lam[0] -= k * nu_i * self.sys.marks[i + 1];
        }
        let pair: i64 = (0..r).map(|i| w.lam[i + 1] * gamma[i]).sum();
        let norm = Rational::new(self.sys.inner2(gamma, gamma), 2);
        let delta = w.delta - Rational::from_integer(pair) - Rational::from_integer(k) * norm;
        AffineWeight::new(lam, delta)
    }

    /// Linear action of `t_γ u`.
    pub fn act_weight(&self, x: &AffineElement, w: &AffineWeight) -> AffineWeight {
        let uw = self.finite_act_weight(x.u, w);
        self.translate_weight(&x.t, &uw)
    }

    /// Dot action `x ∘ λ = x(λ + ρ̂) − ρ̂`.
    pub fn dot_action(&self, x: &AffineElement, w: &AffineWeight) -> AffineWeight {
        let rho = AffineWeight::rho(self.rank());
        self.act_weight(x, &w.add(&rho)).sub(&rho)
    }

    /// Linear action along a word (rightmost letter first).
    pub fn act_weight_word(&self, word: &[u8], w: &AffineWeight) -> AffineWeight {
        let mut cur = w.clone();
        for &j in word.iter().rev() {
            cur = self.reflect_weight(j as usize, &cur);
        }
        cur
    }
}
