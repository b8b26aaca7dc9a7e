//! Root data for the non-simply-laced types B_n, C_n, F4 and G2.
//!
//! Everything is expressed in coroot coordinates: a vector `γ` holds its
//! coefficients on the simple coroots `α_1∨, …, α_r∨` (for B/C the last one is
//! `β∨`).  The integer Gram matrix `gram2` is the invariant form scaled so that
//! short coroots have squared length 2; the normalized quadratic form is
//! `‖γ‖ = ½ γᵀ·gram2·γ`, which gives `‖θ∨‖ = 1` in every type.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Largest rank for which the finite Weyl group is enumerated.
pub const MAX_RANK: usize = 6;

/// One of the supported Cartan types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CartanType {
    B(usize),
    C(usize),
    F4,
    G2,
}

impl CartanType {
    pub fn rank(&self) -> usize {
        match *self {
            CartanType::B(n) | CartanType::C(n) => n,
            CartanType::F4 => 4,
            CartanType::G2 => 2,
        }
    }

    /// Checks the allowed rank range.
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            CartanType::B(n) => (3..=MAX_RANK).contains(&n),
            CartanType::C(n) => (2..=MAX_RANK).contains(&n),
            CartanType::F4 | CartanType::G2 => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnsupportedType(self.to_string()))
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CartanType::B(n) => write!(f, "B{n}"),
            CartanType::C(n) => write!(f, "C{n}"),
            CartanType::F4 => write!(f, "F4"),
            CartanType::G2 => write!(f, "G2"),
        }
    }
}

impl FromStr for CartanType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let upper = s.to_ascii_uppercase();
        let t = match upper.as_str() {
            "F4" => CartanType::F4,
            "G2" => CartanType::G2,
            _ => {
                let (head, tail) = upper.split_at(1.min(upper.len()));
                let n: usize = tail
                    .parse()
                    .map_err(|_| Error::UnsupportedType(s.to_string()))?;
                match head {
                    "B" => CartanType::B(n),
                    "C" => CartanType::C(n),
                    _ => return Err(Error::UnsupportedType(s.to_string())),
                }
            }
        };
        t.validate()?;
        Ok(t)
    }
}

/// Square integer matrix stored row-major, acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat {
    pub n: usize,
    pub data: Vec<i64>,
}

impl Mat {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        Self { n, data }
    }

    pub fn at(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Mat { n, data }
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.data[i * n + j] * v[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        Mat { n, data }
    }
}

/// Complete root datum of one supported type.
#[derive(Clone, Debug)]
pub struct RootSystem {
    pub kind: CartanType,
    pub rank: usize,
    /// `(α_i∨, α_j∨)` with short coroots of squared length 2.
    pub gram2: Vec<Vec<i64>>,
    /// `A[i][j] = ⟨α_j, α_i∨⟩`.
    pub cartan: Vec<Vec<i64>>,
    /// Affine Cartan matrix with the same convention, index 0 affine.
    pub affine_cartan: Vec<Vec<i64>>,
    /// Highest short coroot.
    pub theta: Vec<i64>,
    /// Pairing functional of the root θ paired with `θ∨`.
    pub theta_functional: Vec<i64>,
    /// Dual Coxeter labels `c_0 = 1, c_i = θ∨_i`.
    pub marks: Vec<i64>,
    /// Positive coroots in graded-lex order.
    pub pos_coroots: Vec<Vec<i64>>,
    /// Positive roots in simple-root coordinates, matched with `pos_coroots`.
    pub pos_roots: Vec<Vec<i64>>,
    /// For each positive root `α`, the row `f` with `⟨α, γ⟩ = f·γ`.
    pub pos_functionals: Vec<Vec<i64>>,
    /// Simple reflections `s_1..s_r` on coroot coordinates (index `i-1`).
    pub simple_refl: Vec<Mat>,
    /// Reflection in `θ∨`.
    pub theta_refl: Mat,
    /// Coxeter matrix on `0..=r`.
    pub coxeter: Vec<Vec<u32>>,
    /// Simple coroots in ε-coordinates.
    pub eps_basis: Vec<Vec<Rational>>,
}

fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn half(n: i64) -> Rational {
    Rational::new(n, 2)
}

impl RootSystem {
    pub fn new(kind: CartanType) -> Result<Self> {
        kind.validate()?;
        let rank = kind.rank();
        let (gram2, theta, eps_basis) = match kind {
            CartanType::B(n) => {
                // α_i∨ = ε_i − ε_{i+1}, β∨ = 2ε_n, standard inner product.
                let mut g = vec![vec![0i64; n]; n];
                for i in 0..n - 1 {
                    g[i][i] = 2;
                    if i + 1 < n - 1 {
                        g[i][i + 1] = -1;
                        g[i + 1][i] = -1;
                    }
                }
                g[n - 2][n - 1] = -2;
                g[n - 1][n - 2] = -2;
                g[n - 1][n - 1] = 4;
                let mut theta = vec![2i64; n];
                theta[0] = 1;
                theta[n - 1] = 1;
                let mut eps = vec![vec![r(0); n]; n];
                for i in 0..n - 1 {
                    eps[i][i] = r(1);
                    eps[i][i + 1] = r(-1);
                }
                eps[n - 1][n - 1] = r(2);
                (g, theta, eps)
            }
            CartanType::C(n) => {
                // α_i∨ = ε_i − ε_{i+1}, β∨ = ε_n, twice the standard product.
                let mut g = vec![vec![0i64; n]; n];
                for i in 0..n - 1 {
                    g[i][i] = 4;
                    g[i][i + 1] = -2;
                    g[i + 1][i] = -2;
                }
                g[n - 1][n - 1] = 2;
                let theta = vec![1i64; n];
                let mut eps = vec![vec![r(0); n]; n];
                for i in 0..n - 1 {
                    eps[i][i] = r(1);
                    eps[i][i + 1] = r(-1);
                }
                eps[n - 1][n - 1] = r(1);
                (g, theta, eps)
            }
            CartanType::F4 => {
                // α_1∨, α_2∨ short; α_3∨, α_4∨ long.
                let g = vec![
                    vec![2, -1, 0, 0],
                    vec![-1, 2, -2, 0],
                    vec![0, -2, 4, -2],
                    vec![0, 0, -2, 4],
                ];
                let theta = vec![2, 3, 2, 1];
                let eps = vec![
                    vec![half(1), half(-1), half(-1), half(-1)],
                    vec![r(0), r(0), r(0), r(1)],
                    vec![r(0), r(0), r(1), r(-1)],
                    vec![r(0), r(1), r(-1), r(0)],
                ];
                (g, theta, eps)
            }
            CartanType::G2 => {
                let g = vec![vec![2, -3], vec![-3, 6]];
                let theta = vec![2, 1];
                // Realized in the plane x+y+z = 0 of R^3.
                let eps = vec![
                    vec![r(1), r(-1), r(0)],
                    vec![r(-2), r(1), r(1)],
                ];
                (g, theta, eps)
            }
        };

        let mut cartan = vec![vec![0i64; rank]; rank];
        for i in 0..rank {
            for j in 0..rank {
                cartan[i][j] = 2 * gram2[j][i] / gram2[j][j];
            }
        }

        let mut simple_refl = Vec::with_capacity(rank);
        for i in 0..rank {
            let mut m = Mat::identity(rank);
            // s_i(γ)_i -= ⟨α_i, γ⟩ = Σ_j A[j][i] γ_j
            for j in 0..rank {
                m.data[i * rank + j] -= cartan[j][i];
            }
            simple_refl.push(m);
        }

        let mut sys = RootSystem {
            kind,
            rank,
            gram2,
            cartan,
            affine_cartan: Vec::new(),
            theta,
            theta_functional: Vec::new(),
            marks: Vec::new(),
            pos_coroots: Vec::new(),
            pos_roots: Vec::new(),
            pos_functionals: Vec::new(),
            simple_refl,
            theta_refl: Mat::identity(rank),
            coxeter: Vec::new(),
            eps_basis,
        };
        sys.theta_functional = sys.functional_of(&sys.theta.clone());
        sys.theta_refl = sys.reflection_matrix(&sys.theta.clone());
        sys.marks = std::iter::once(1).chain(sys.theta.iter().copied()).collect();
        sys.build_positive();
        sys.build_affine_cartan();
        sys.build_coxeter();
        Ok(sys)
    }

    /// `(x, y)` with short coroots of squared length 2.
    pub fn inner2(&self, x: &[i64], y: &[i64]) -> i64 {
        let n = self.rank;
        let mut s = 0;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..n {
                s += x[i] * self.gram2[i][j] * y[j];
            }
        }
        s
    }

    /// The normalized quadratic form `‖γ‖`.
    pub fn norm_sq(&self, gamma: &[i64]) -> Result<Rational> {
        self.check_dim(gamma)?;
        Ok(Rational::new(self.inner2(gamma, gamma), 2))
    }

    pub fn check_dim(&self, v: &[i64]) -> Result<()> {
        if v.len() != self.rank {
            return Err(Error::Dimension {
                expected: self.rank,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Row `f` with `⟨β, γ⟩ = f·γ` for the root `β` attached to coroot `c`.
    pub fn functional_of(&self, c: &[i64]) -> Vec<i64> {
        let cc = self.inner2(c, c);
        (0..self.rank)
            .map(|j| {
                let g: i64 = (0..self.rank).map(|i| c[i] * self.gram2[i][j]).sum();
                debug_assert_eq!((2 * g) % cc, 0);
                2 * g / cc
            })
            .collect()
    }

    /// Reflection along the coroot `c` acting on coroot coordinates.
    pub fn reflection_matrix(&self, c: &[i64]) -> Mat {
        let f = self.functional_of(c);
        let n = self.rank;
        let mut m = Mat::identity(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] -= c[i] * f[j];
            }
        }
        m
    }

    /// `⟨α_i, γ⟩` for a simple root `α_i`, `i` in `1..=r`.
    pub fn simple_pairing(&self, i: usize, gamma: &[i64]) -> i64 {
        (0..self.rank).map(|j| self.cartan[j][i - 1] * gamma[j]).sum()
    }

    /// `⟨θ, γ⟩`.
    pub fn theta_pairing(&self, gamma: &[i64]) -> i64 {
        dot(&self.theta_functional, gamma)
    }

    /// Finite reflection `s_i`, `i` in `1..=r`, applied to `γ`.
    pub fn reflect(&self, i: usize, gamma: &[i64]) -> Vec<i64> {
        let p = self.simple_pairing(i, gamma);
        let mut out = gamma.to_vec();
        out[i - 1] -= p;
        out
    }

    /// Affine simple reflection `s_j` acting on coroots: linear for `j ≥ 1`,
    /// `s_0·γ = s_θ(γ) + θ∨`.
    pub fn affine_reflect(&self, j: usize, gamma: &[i64]) -> Vec<i64> {
        if j == 0 {
            let p = self.theta_pairing(gamma);
            gamma
                .iter()
                .zip(&self.theta)
                .map(|(g, t)| g - p * t + t)
                .collect()
        } else {
            self.reflect(j, gamma)
        }
    }

    fn build_positive(&mut self) {
        let n = self.rank;
        let mut found: Vec<Vec<i64>> = Vec::new();
        let mut frontier: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                e
            })
            .collect();
        found.extend(frontier.iter().cloned());
        while let Some(c) = frontier.pop() {
            for i in 1..=n {
                let d = self.reflect(i, &c);
                if d.iter().all(|&x| x >= 0) && !found.contains(&d) {
                    found.push(d.clone());
                    frontier.push(d);
                }
            }
        }
        found.sort_by(|a, b| {
            let sa: i64 = a.iter().sum();
            let sb: i64 = b.iter().sum();
            sa.cmp(&sb).then_with(|| a.cmp(b))
        });
        self.pos_functionals = found.iter().map(|c| self.functional_of(c)).collect();
        // Simple-root coordinates: β = Σ k_j α_j with α_j = 2α_j∨/(α_j∨,α_j∨),
        // so k_j = c_j (α_j∨,α_j∨)/(β∨,β∨).
        self.pos_roots = found
            .iter()
            .map(|c| {
                let cc = self.inner2(c, c);
                (0..n).map(|j| c[j] * self.gram2[j][j] / cc).collect()
            })
            .collect();
        self.pos_coroots = found;
    }

    fn build_affine_cartan(&mut self) {
        let n = self.rank;
        let mut a = vec![vec![0i64; n + 1]; n + 1];
        a[0][0] = 2;
        for i in 1..=n {
            for j in 1..=n {
                a[i][j] = self.cartan[i - 1][j - 1];
            }
            let mut e = vec![0; n];
            e[i - 1] = 1;
            // ⟨α_0, α_i∨⟩ = −⟨θ, α_i∨⟩
            a[i][0] = -self.theta_pairing(&e);
            // ⟨α_i, α_0∨⟩ = −⟨α_i, θ∨⟩
            a[0][i] = -self.simple_pairing(i, &self.theta);
        }
        self.affine_cartan = a;
    }

    fn build_coxeter(&mut self) {
        let n = self.rank;
        let vecs: Vec<Vec<i64>> = std::iter::once(self.theta.iter().map(|x| -x).collect())
            .chain((0..n).map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                e
            }))
            .collect();
        let mut m = vec![vec![1u32; n + 1]; n + 1];
        for i in 0..=n {
            for j in 0..=n {
                if i == j {
                    continue;
                }
                let gij = self.inner2(&vecs[i], &vecs[j]);
                let gii = self.inner2(&vecs[i], &vecs[i]);
                let gjj = self.inner2(&vecs[j], &vecs[j]);
                // cos² = gij²/(gii·gjj) ∈ {0, 1/4, 1/2, 3/4}
                let num = 4 * gij * gij;
                let den = gii * gjj;
                m[i][j] = match (num, den) {
                    (0, _) => 2,
                    (x, d) if x == d => 3,
                    (x, d) if x == 2 * d => 4,
                    (x, d) if x == 3 * d => 6,
                    _ => panic!("unexpected angle between simple roots"),
                };
            }
        }
        self.coxeter = m;
    }

    /// Converts ε-coordinates to coroot coordinates (B and C only; other
    /// types solve against `eps_basis`).
    pub fn eps_to_coroot(&self, x: &[Rational]) -> Result<Vec<i64>> {
        let n = self.rank;
        let dim = self.eps_basis[0].len();
        if x.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: x.len(),
            });
        }
        let coords: Vec<Rational> = match self.kind {
            CartanType::B(_) => {
                let mut out = Vec::with_capacity(n);
                let mut acc = r(0);
                for xi in x.iter().take(n - 1) {
                    acc += *xi;
                    out.push(acc);
                }
                let total: Rational = x.iter().copied().sum();
                out.push(total / r(2));
                out
            }
            CartanType::C(_) => {
                let mut out = Vec::with_capacity(n);
                let mut acc = r(0);
                for xi in x.iter() {
                    acc += *xi;
                    out.push(acc);
                }
                out
            }
            _ => solve_rational(&self.eps_basis, x)
                .ok_or_else(|| Error::Invalid("vector not in the coroot span".into()))?,
        };
        coords
            .iter()
            .map(|c| {
                if c.is_integer() {
                    Ok(c.to_integer())
                } else {
                    Err(Error::Invalid("vector not in the coroot lattice".into()))
                }
            })
            .collect()
    }

    /// Converts coroot coordinates to ε-coordinates.
    pub fn coroot_to_eps(&self, gamma: &[i64]) -> Vec<Rational> {
        let dim = self.eps_basis[0].len();
        let mut out = vec![r(0); dim];
        for (i, &g) in gamma.iter().enumerate() {
            for k in 0..dim {
                out[k] += self.eps_basis[i][k] * r(g);
            }
        }
        out
    }

    /// Simple generator indices `0..=r`.
    pub fn generators(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.rank
    }

    /// Level `Σ c_i λ_i` of a weight given by its `Λ_i`-coordinates.
    pub fn level(&self, lam: &[i64]) -> i64 {
        lam.iter().zip(&self.marks).map(|(a, b)| a * b).sum()
    }

    /// Dual Coxeter number `Σ c_i`.
    pub fn dual_coxeter(&self) -> i64 {
        self.marks.iter().sum()
    }
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `Σ_i c_i rows[i] = x` for `c` by Gaussian elimination over ℚ.
fn solve_rational(rows: &[Vec<Rational>], x: &[Rational]) -> Option<Vec<Rational>> {
    let n = rows.len();
    let dim = x.len();
    // Augmented system: dim equations, n unknowns.
    let mut a: Vec<Vec<Rational>> = (0..dim)
        .map(|k| {
            let mut row: Vec<Rational> = (0..n).map(|i| rows[i][k]).collect();
            row.push(x[k]);
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..dim).find(|&k| a[k][col] != r(0)) else {
            continue;
        };
        a.swap(row, p);
        let inv = r(1) / a[row][col];
        for v in a[row].iter_mut() {
            *v *= inv;
        }
        for k in 0..dim {
            if k != row && a[k][col] != r(0) {
                let f = a[k][col];
                let src = a[row].clone();
                for (dst, s) in a[k].iter_mut().zip(src) {
                    *dst -= f * s;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if a[row..].iter().any(|rw| rw[n] != r(0)) {
        return None;
    }
    let mut out = vec![r(0); n];
    for (k, &c) in pivots.iter().enumerate() {
        out[c] = a[k][n];
    }
    Some(out)
}
