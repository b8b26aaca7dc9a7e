//! Arithmetic in the affine Weyl group `Ŵ = Q∨ ⋊ W`.
//!
//! An element `t_γ u` is stored as its translation `γ` (coroot coordinates)
//! and the index of `u` in the enumerated finite Weyl group.  The simple
//! generators are `s_1, …, s_r` (finite) and `s_0 = t_{θ∨} s_θ`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootdata::{dot, CartanType, Mat, RootSystem};
use crate::weyl::{FIdx, FiniteWeyl};

/// A word in the simple generators `0..=r`.
pub type Word = Vec<u8>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffineElement {
    /// Translation part `γ`.
    pub t: Vec<i64>,
    /// Finite part, as an index into [`FiniteWeyl`].
    pub u: FIdx,
}

impl AffineElement {
    pub fn is_identity(&self) -> bool {
        self.u == 0 && self.t.iter().all(|&x| x == 0)
    }
}

/// The affine Weyl group of one root system.
#[derive(Clone, Debug)]
pub struct AffineWeyl {
    pub sys: Arc<RootSystem>,
    pub fin: Arc<FiniteWeyl>,
}

impl AffineWeyl {
    pub fn new(kind: CartanType) -> Result<Self> {
        let sys = RootSystem::new(kind)?;
        let fin = FiniteWeyl::new(&sys);
        Ok(Self {
            sys: Arc::new(sys),
            fin: Arc::new(fin),
        })
    }

    pub fn rank(&self) -> usize {
        self.sys.rank
    }

    pub fn kind(&self) -> CartanType {
        self.sys.kind
    }

    pub fn identity(&self) -> AffineElement {
        AffineElement {
            t: vec![0; self.rank()],
            u: 0,
        }
    }

    pub fn translation(&self, gamma: &[i64]) -> Result<AffineElement> {
        self.sys.check_dim(gamma)?;
        Ok(AffineElement {
            t: gamma.to_vec(),
            u: 0,
        })
    }

    /// Simple generator `s_j`, `j` in `0..=r`.
    pub fn generator(&self, j: usize) -> AffineElement {
        self.lmul_gen(j, &self.identity())
    }

    /// Matrix of the finite part.
    pub fn finite_matrix(&self, x: &AffineElement) -> &Mat {
        &self.fin.mats[x.u as usize]
    }

    /// `s_j · x`.
    pub fn lmul_gen(&self, j: usize, x: &AffineElement) -> AffineElement {
        if j == 0 {
            let p = self.sys.theta_pairing(&x.t);
            let t = x
                .t
                .iter()
                .zip(&self.sys.theta)
                .map(|(g, th)| g - (p - 1) * th)
                .collect();
            AffineElement {
                t,
                u: self.fin.theta_lmul[x.u as usize],
            }
        } else {
            AffineElement {
                t: self.sys.reflect(j, &x.t),
                u: self.fin.lmul[j - 1][x.u as usize],
            }
        }
    }

    /// `x · s_j`.
    pub fn rmul_gen(&self, x: &AffineElement, j: usize) -> AffineElement {
        if j == 0 {
            self.multiply(x, &self.generator(0))
        } else {
            AffineElement {
                t: x.t.clone(),
                u: self.fin.rmul[j - 1][x.u as usize],
            }
        }
    }

    /// Group law `(t_a u)(t_b v) = t_{a + u b} (uv)`.
    pub fn multiply(&self, a: &AffineElement, b: &AffineElement) -> AffineElement {
        let ub = self.fin.mats[a.u as usize].apply(&b.t);
        AffineElement {
            t: a.t.iter().zip(ub).map(|(x, y)| x + y).collect(),
            u: self.fin.mul(a.u, b.u),
        }
    }

    /// `(t_γ u)⁻¹ = t_{−u⁻¹γ} u⁻¹`.
    pub fn inverse(&self, a: &AffineElement) -> AffineElement {
        let ui = self.fin.inv[a.u as usize];
        let t = self.fin.mats[ui as usize]
            .apply(&a.t)
            .into_iter()
            .map(|x| -x)
            .collect();
        AffineElement { t, u: ui }
    }

    /// Length by counting separating hyperplanes:
    /// `ℓ(t_γ u) = Σ_{α>0} |⟨α, γ⟩ − [u⁻¹α < 0]|`.
    pub fn length(&self, x: &AffineElement) -> usize {
        let mask = self.fin.neg_mask[x.u as usize];
        let mut total = 0i64;
        for (k, f) in self.sys.pos_functionals.iter().enumerate() {
            let p = dot(f, &x.t) - (mask >> k & 1) as i64;
            total += p.abs();
        }
        total as usize
    }

    /// Sign `(−1)^{ℓ(x)}`.
    pub fn sign(&self, x: &AffineElement) -> i64 {
        if self.length(x) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Whether `ℓ(s_j x) < ℓ(x)`.
    pub fn is_left_descent(&self, j: usize, x: &AffineElement) -> bool {
        if j == 0 {
            let p = self.sys.theta_pairing(&x.t);
            p > 1 || (p == 1 && !self.fin.inv_neg_theta(x.u))
        } else {
            let p = self.sys.simple_pairing(j, &x.t);
            p < 0 || (p == 0 && self.fin.inv_neg_simple(x.u, j))
        }
    }

    /// Whether `ℓ(x s_j) < ℓ(x)`.
    pub fn is_right_descent(&self, x: &AffineElement, j: usize) -> bool {
        self.is_left_descent(j, &self.inverse(x))
    }

    pub fn left_descents(&self, x: &AffineElement) -> Vec<usize> {
        self.sys
            .generators()
            .filter(|&j| self.is_left_descent(j, x))
            .collect()
    }

    /// The lexicographically least reduced word (greedy on the least left
    /// descent).
    pub fn reduced_word(&self, x: &AffineElement) -> Word {
        self.greedy_word(x, false)
    }

    /// Reduced word built greedily from the largest left descent.
    pub fn reversed_greedy_word(&self, x: &AffineElement) -> Word {
        self.greedy_word(x, true)
    }

    fn greedy_word(&self, x: &AffineElement, largest: bool) -> Word {
        let mut word = Vec::new();
        let mut cur = x.clone();
        let r = self.rank();
        loop {
            let pick = if largest {
                (0..=r).rev().find(|&j| self.is_left_descent(j, &cur))
            } else {
                (0..=r).find(|&j| self.is_left_descent(j, &cur))
            };
            match pick {
                Some(j) => {
                    word.push(j as u8);
                    cur = self.lmul_gen(j, &cur);
                }
                None => break,
            }
        }
        debug_assert!(cur.is_identity());
        word
    }

    /// Product of a word, read left to right.
    pub fn from_word(&self, word: &[u8]) -> AffineElement {
        let mut x = self.identity();
        for &j in word.iter().rev() {
            x = self.lmul_gen(j as usize, &x);
        }
        x
    }

    /// Shortest element `w_ν` of the coset `t_ν W`.
    pub fn w_nu(&self, nu: &[i64]) -> Result<AffineElement> {
        let mut x = self.translation(nu)?;
        'outer: loop {
            for j in 1..=self.rank() {
                if self.is_right_descent(&x, j) {
                    x = self.rmul_gen(&x, j);
                    continue 'outer;
                }
            }
            return Ok(x);
        }
    }

    /// Whether `x` is the shortest element of `xW`.
    pub fn is_minimal(&self, x: &AffineElement) -> bool {
        (1..=self.rank()).all(|j| !self.is_right_descent(x, j))
    }

    /// Inverse of [`AffineWeyl::w_nu`]: the translation part of a minimal
    /// representative.
    pub fn nu_of(&self, x: &AffineElement) -> Result<Vec<i64>> {
        if !self.is_minimal(x) {
            return Err(Error::NotMinimal);
        }
        Ok(x.t.clone())
    }

    /// Affine action on coroots: `t_γ u · η = γ + u η`.
    pub fn act_on_coroot(&self, x: &AffineElement, eta: &[i64]) -> Vec<i64> {
        let ue = self.fin.mats[x.u as usize].apply(eta);
        x.t.iter().zip(ue).map(|(a, b)| a + b).collect()
    }
}

/// Serializes a word as comma-separated indices, e.g. `0,2,3,2,0`.
pub fn word_to_string(word: &[u8]) -> String {
    word.iter()
        .map(|j| j.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Parses the format written by [`word_to_string`].
pub fn parse_word(s: &str) -> Result<Word> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .trim_start_matches('s')
                .parse::<u8>()
                .map_err(|_| Error::Invalid(format!("bad word letter {p:?}")))
        })
        .collect()
}

impl fmt::Display for AffineElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t({})·u{}", format_vec(&self.t), self.u)
    }
}

/// Formats an integer vector as `a,b,c`.
pub fn format_vec(v: &[i64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Parses `a,b,c` into an integer vector.
pub fn parse_vec(s: &str) -> Result<Vec<i64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|_| Error::Invalid(format!("bad integer {p:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s0_is_translation_times_reflection() {
        let g = AffineWeyl::new(CartanType::G2).unwrap();
        let s0 = g.generator(0);
        assert_eq!(s0.t, vec![2, 1]);
        assert_eq!(g.length(&s0), 1);
        let tt = g.translation(&[2, 1]).unwrap();
        assert_eq!(g.length(&tt), 6);
    }

    #[test]
    fn words_round_trip() {
        assert_eq!(parse_word("0,2,3,2,0").unwrap(), vec![0, 2, 3, 2, 0]);
        assert_eq!(word_to_string(&[0, 2, 3, 2, 0]), "0,2,3,2,0");
        assert_eq!(parse_word("").unwrap(), Vec::<u8>::new());
    }
}
