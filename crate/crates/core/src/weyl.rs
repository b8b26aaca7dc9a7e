//! The finite Weyl group, enumerated once as integer matrices on coroot
//! coordinates together with the lookup tables the affine arithmetic needs.

use std::collections::HashMap;

use crate::rootdata::{Mat, RootSystem};

/// Index of an element of the finite Weyl group.
pub type FIdx = u32;

#[derive(Clone, Debug)]
pub struct FiniteWeyl {
    pub rank: usize,
    pub mats: Vec<Mat>,
    index: HashMap<Vec<i64>, FIdx>,
    pub inv: Vec<FIdx>,
    pub len: Vec<u32>,
    /// Left multiplication by `s_i` (row `i-1`).
    pub lmul: Vec<Vec<FIdx>>,
    /// Right multiplication by `s_i` (row `i-1`).
    pub rmul: Vec<Vec<FIdx>>,
    /// Left multiplication by the reflection `s_θ`.
    pub theta_lmul: Vec<FIdx>,
    /// Bit `k` is set iff `u⁻¹ α_k < 0` for the k-th positive root.
    pub neg_mask: Vec<u64>,
    /// A reduced word for each element (letters in `1..=r`).
    pub words: Vec<Vec<u8>>,
    /// Position of the simple root `α_i` in the positive root list.
    pub simple_pos: Vec<usize>,
    /// Position of the highest root `θ` in the positive root list.
    pub theta_pos: usize,
}

impl FiniteWeyl {
    pub fn new(sys: &RootSystem) -> Self {
        let n = sys.rank;
        let id = Mat::identity(n);
        let mut mats = vec![id.clone()];
        let mut index = HashMap::new();
        index.insert(id.data.clone(), 0u32);
        let mut len = vec![0u32];
        let mut words: Vec<Vec<u8>> = vec![Vec::new()];
        let mut start = 0;
        // Breadth-first search by left multiplication yields lengths directly.
        while start < mats.len() {
            let end = mats.len();
            for u in start..end {
                for i in 0..n {
                    let m = sys.simple_refl[i].mul(&mats[u]);
                    if !index.contains_key(&m.data) {
                        index.insert(m.data.clone(), mats.len() as FIdx);
                        let mut w = vec![(i + 1) as u8];
                        w.extend_from_slice(&words[u]);
                        words.push(w);
                        len.push(len[u] + 1);
                        mats.push(m);
                    }
                }
            }
            start = end;
        }
        let size = mats.len();
        let look = |m: &Mat| index[&m.data];
        let lmul: Vec<Vec<FIdx>> = (0..n)
            .map(|i| {
                (0..size)
                    .map(|u| look(&sys.simple_refl[i].mul(&mats[u])))
                    .collect()
            })
            .collect();
        let rmul: Vec<Vec<FIdx>> = (0..n)
            .map(|i| {
                (0..size)
                    .map(|u| look(&mats[u].mul(&sys.simple_refl[i])))
                    .collect()
            })
            .collect();
        let theta_lmul = (0..size)
            .map(|u| look(&sys.theta_refl.mul(&mats[u])))
            .collect();
        let ident = Mat::identity(n);
        let mut inv = vec![0; size];
        for u in 0..size {
            if inv[u] != 0 || u == 0 {
                continue;
            }
            // u⁻¹ is the reversed word.
            let mut m = ident.clone();
            for &l in words[u].iter() {
                m = m.mul(&sys.simple_refl[l as usize - 1]);
            }
            // m equals u; build the reverse product.
            debug_assert_eq!(m, mats[u]);
            let mut r = ident.clone();
            for &l in words[u].iter().rev() {
                r = r.mul(&sys.simple_refl[l as usize - 1]);
            }
            let j = look(&r);
            inv[u] = j;
            inv[j as usize] = u as FIdx;
        }
        assert!(sys.pos_coroots.len() <= 64, "too many positive roots");
        let neg_mask = (0..size)
            .map(|u| {
                let m = &mats[inv[u] as usize];
                let mut mask = 0u64;
                for (k, c) in sys.pos_coroots.iter().enumerate() {
                    let d = m.apply(c);
                    if d.iter().any(|&x| x < 0) {
                        mask |= 1 << k;
                    }
                }
                mask
            })
            .collect();
        let simple_pos = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                sys.pos_coroots.iter().position(|c| *c == e).unwrap()
            })
            .collect();
        let theta_pos = sys
            .pos_coroots
            .iter()
            .position(|c| *c == sys.theta)
            .unwrap();
        FiniteWeyl {
            rank: n,
            mats,
            index,
            inv,
            len,
            lmul,
            rmul,
            theta_lmul,
            neg_mask,
            words,
            simple_pos,
            theta_pos,
        }
    }

    pub fn size(&self) -> usize {
        self.mats.len()
    }

    pub fn lookup(&self, m: &Mat) -> Option<FIdx> {
        self.index.get(&m.data).copied()
    }

    /// Product `u·v`.
    pub fn mul(&self, u: FIdx, v: FIdx) -> FIdx {
        let mut x = v;
        for &l in self.words[u as usize].iter().rev() {
            x = self.lmul[l as usize - 1][x as usize];
        }
        x
    }

    /// Sign `(-1)^{ℓ(u)}`.
    pub fn sign(&self, u: FIdx) -> i64 {
        if self.len[u as usize] % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Whether `u⁻¹ α_i < 0`, i.e. `s_i` is a left descent of `u`.
    pub fn inv_neg_simple(&self, u: FIdx, i: usize) -> bool {
        self.neg_mask[u as usize] >> self.simple_pos[i - 1] & 1 == 1
    }

    /// Whether `u⁻¹ θ < 0`.
    pub fn inv_neg_theta(&self, u: FIdx) -> bool {
        self.neg_mask[u as usize] >> self.theta_pos & 1 == 1
    }

    /// Whether `s_i` (`i ≥ 1`) is a right descent of `u`, i.e. `u α_i < 0`.
    pub fn right_descent(&self, u: FIdx, i: usize) -> bool {
        self.inv_neg_simple(self.inv[u as usize], i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::CartanType;

    #[test]
    fn group_orders() {
        for (t, k) in [
            (CartanType::B(3), 48),
            (CartanType::C(2), 8),
            (CartanType::B(4), 384),
            (CartanType::F4, 1152),
            (CartanType::G2, 12),
        ] {
            let s = RootSystem::new(t).unwrap();
            assert_eq!(FiniteWeyl::new(&s).size(), k, "{t}");
        }
    }

    #[test]
    fn length_matches_inversions() {
        let s = RootSystem::new(CartanType::F4).unwrap();
        let w = FiniteWeyl::new(&s);
        for u in 0..w.size() {
            assert_eq!(w.neg_mask[u].count_ones(), w.len[u]);
            assert_eq!(w.mul(u as FIdx, w.inv[u]), 0);
        }
    }
}
