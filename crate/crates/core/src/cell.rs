//! The left cell `c⁰_subreg`: elements with a unique reduced word that are
//! shortest in their coset `t_ν W`, together with the μ map and the graph Γ_0.
//!
//! The cell is grown from `s_0` by left extension.  Types B, F4 and G2 give a
//! finite cell; in type C it is infinite and is enumerated up to a length
//! window that can be enlarged on demand.

use std::collections::HashMap;

use crate::affine::{word_to_string, AffineElement, AffineWeyl, Word};
use crate::error::{Error, Result};
use crate::rootdata::{CartanType, Rational};

/// One element of `c⁰_subreg`.
#[derive(Clone, Debug)]
pub struct CellNode {
    pub elt: AffineElement,
    pub word: Word,
    pub nu: Vec<i64>,
    /// The unique left descent.
    pub mu: usize,
    pub len: usize,
    pub parent: Option<usize>,
    /// Children `s·w` in the cell, as `(s, node)`.  `None` until expanded.
    pub children: Option<Vec<(usize, usize)>>,
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub group: AffineWeyl,
    pub nodes: Vec<CellNode>,
    index: HashMap<AffineElement, usize>,
    window: usize,
    /// Number of window enlargements performed.
    pub growth_events: usize,
}

impl Cell {
    /// Enumerates the cell up to the given length window.
    pub fn new(group: AffineWeyl, window: usize) -> Self {
        let s0 = group.generator(0);
        let mut cell = Cell {
            group,
            nodes: Vec::new(),
            index: HashMap::new(),
            window: 1,
            growth_events: 0,
        };
        cell.push_node(s0, None);
        cell.grow_to(window.max(1));
        cell.growth_events = 0;
        cell
    }

    /// Enumerates a finite cell completely (types B, F4, G2).
    pub fn full(group: AffineWeyl) -> Result<Self> {
        let w = match group.kind() {
            CartanType::B(n) => 2 * n + 1,
            CartanType::F4 | CartanType::G2 => 8,
            CartanType::C(_) => {
                return Err(Error::Invalid("the type C cell is infinite".into()));
            }
        };
        let cell = Self::new(group, w);
        Ok(cell)
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_finite_type(&self) -> bool {
        !matches!(self.group.kind(), CartanType::C(_))
    }

    pub fn find(&self, x: &AffineElement) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn find_word(&self, word: &[u8]) -> Option<usize> {
        self.find(&self.group.from_word(word))
    }

    pub fn find_label(&self, label: &str) -> Option<usize> {
        let want = normalize_label(label);
        self.nodes
            .iter()
            .position(|n| normalize_label(&n.label) == want)
            .or_else(|| {
                crate::affine::parse_word(label)
                    .ok()
                    .and_then(|w| self.find_word(&w))
            })
    }

    fn push_node(&mut self, elt: AffineElement, parent: Option<usize>) -> usize {
        let g = &self.group;
        let word = g.reduced_word(&elt);
        let len = word.len();
        let nu = elt.t.clone();
        let mu = word[0] as usize;
        let label = make_label(g, &word, &nu);
        let id = self.nodes.len();
        self.index.insert(elt.clone(), id);
        self.nodes.push(CellNode {
            elt,
            word,
            nu,
            mu,
            len,
            parent,
            children: None,
            label,
        });
        id
    }

    /// Whether `s·w` (with `s` not a left descent of `w`) lies in the cell.
    fn extends(&self, s: usize, w: &AffineElement) -> Option<AffineElement> {
        let g = &self.group;
        if g.is_left_descent(s, w) {
            return None;
        }
        let y = g.lmul_gen(s, w);
        let only_s = g
            .sys
            .generators()
            .all(|j| (j == s) == g.is_left_descent(j, &y));
        if only_s && g.is_minimal(&y) {
            Some(y)
        } else {
            None
        }
    }

    fn expand(&mut self, id: usize) {
        if self.nodes[id].children.is_some() {
            return;
        }
        let elt = self.nodes[id].elt.clone();
        let mu = self.nodes[id].mu;
        let mut kids = Vec::new();
        for s in self.group.sys.generators() {
            if s == mu {
                continue;
            }
            if let Some(y) = self.extends(s, &elt) {
                let cid = match self.find(&y) {
                    Some(c) => c,
                    None => self.push_node(y, Some(id)),
                };
                kids.push((s, cid));
            }
        }
        self.nodes[id].children = Some(kids);
    }

    /// Extends the enumeration so that every element of length `≤ window`
    /// is present and every element of length `< window` has its children.
    pub fn grow_to(&mut self, window: usize) {
        if window <= self.window && self.window > 1 {
            return;
        }
        if window > self.window {
            self.growth_events += 1;
            log::debug!(
                "growing {} cell window {} -> {}",
                self.group.kind(),
                self.window,
                window
            );
        }
        let mut i = 0;
        while i < self.nodes.len() {
            if self.nodes[i].len < window {
                self.expand(i);
            }
            i += 1;
        }
        self.window = self.window.max(window);
    }

    /// Γ_0 neighbours of a node with a given μ-value: the child `t·w` and,
    /// if its μ is `t`, the parent.
    pub fn neighbors_with_mu(&self, id: usize, t: usize) -> Result<Vec<usize>> {
        let node = &self.nodes[id];
        let mut out = Vec::with_capacity(2);
        if let Some(p) = node.parent {
            if self.nodes[p].mu == t {
                out.push(p);
            }
        }
        match &node.children {
            Some(kids) => {
                for &(s, c) in kids {
                    if s == t {
                        out.push(c);
                    }
                }
            }
            None => {
                return Err(Error::Budget(format!(
                    "cell window {} too small for node {}",
                    self.window,
                    word_to_string(&node.word)
                )))
            }
        }
        Ok(out)
    }

    /// All Γ_0 edges among enumerated nodes with expanded children.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (id, n) in self.nodes.iter().enumerate() {
            if let Some(kids) = &n.children {
                for &(_, c) in kids {
                    out.push((id, c));
                }
            }
        }
        out.sort();
        out
    }

    /// Node ids in display order: by length, then word.
    pub fn ordered_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| self.nodes[i].len <= self.window)
            .collect();
        ids.sort_by(|&a, &b| {
            let (x, y) = (&self.nodes[a], &self.nodes[b]);
            x.len.cmp(&y.len).then_with(|| x.word.cmp(&y.word))
        });
        ids
    }
}

/// Number of reduced words of `x`, capped at `cap`, by descent recursion.
pub fn count_reduced_words(g: &AffineWeyl, x: &AffineElement, cap: u64) -> u64 {
    fn go(
        g: &AffineWeyl,
        x: &AffineElement,
        cap: u64,
        memo: &mut HashMap<AffineElement, u64>,
    ) -> u64 {
        if x.is_identity() {
            return 1;
        }
        if let Some(&c) = memo.get(x) {
            return c;
        }
        let mut total = 0;
        for j in g.sys.generators() {
            if g.is_left_descent(j, x) {
                total += go(g, &g.lmul_gen(j, x), cap, memo);
                if total >= cap {
                    total = cap;
                    break;
                }
            }
        }
        memo.insert(x.clone(), total);
        total
    }
    let mut memo = HashMap::new();
    go(g, x, cap, &mut memo)
}

/// Membership in `c_subreg`: `x ≠ 1` with exactly one reduced word.
pub fn is_subregular(g: &AffineWeyl, x: &AffineElement) -> bool {
    !x.is_identity() && count_reduced_words(g, x, 2) == 1
}

/// Length of `w_{kε_i}` in type C_n: `2(k−1)n + i` for `k > 0` and
/// `−2kn + 1 − i` for `k < 0`.  Lengths order the family as
/// `ε_1, …, ε_n, −ε_n, …, −ε_1, 2ε_1, …`.
pub fn bruhat_rank_type_c(n: usize, k: i64, i: usize) -> Result<usize> {
    check_rank_args(k, i, n)?;
    let n = n as i64;
    let i = i as i64;
    let v = if k > 0 {
        2 * (k - 1) * n + i
    } else {
        -2 * k * n + 1 - i
    };
    Ok(v as usize)
}

/// The four-case parity formula as commonly displayed.  It agrees with
/// [`bruhat_rank_type_c`] for odd `k` and swaps `k ↔ −k` for even `k`.
pub fn bruhat_rank_type_c_displayed(n: usize, k: i64, i: usize) -> Result<usize> {
    check_rank_args(k, i, n)?;
    let n = n as i64;
    let i = i as i64;
    let v = match (k % 2 == 0, k > 0) {
        (true, true) => 2 * k * n + 1 - i,
        (true, false) => -2 * (k + 1) * n + i,
        (false, true) => 2 * (k - 1) * n + i,
        (false, false) => -2 * k * n + 1 - i,
    };
    Ok(v as usize)
}

fn check_rank_args(k: i64, i: usize, n: usize) -> Result<()> {
    if k == 0 || i == 0 || i > n {
        return Err(Error::Invalid(format!("N_(k={k}, i={i}) undefined")));
    }
    Ok(())
}

fn normalize_label(s: &str) -> String {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            'ε' => 'e',
            '−' => '-',
            c => c,
        })
        .collect()
}

/// Human-readable label of a cell element.
fn make_label(g: &AffineWeyl, word: &[u8], nu: &[i64]) -> String {
    match g.kind() {
        CartanType::B(_) | CartanType::C(_) => eps_label(&g.sys.coroot_to_eps(nu)),
        CartanType::F4 => f4_label(word).to_string(),
        CartanType::G2 => word.iter().map(|j| format!("s{j}")).collect(),
    }
}

/// ε-labels used for the finite F4 cell, keyed by reduced word.
pub fn f4_label(word: &[u8]) -> &'static str {
    match word {
        [0] => "e1+e2",
        [1, 0] => "e1+e3",
        [2, 1, 0] => "e1+e4",
        [3, 2, 1, 0] => "e1-e4",
        [4, 3, 2, 1, 0] => "e2+e3",
        [2, 3, 2, 1, 0] => "e1-e3",
        [1, 2, 3, 2, 1, 0] => "e1-e2",
        [0, 1, 2, 3, 2, 1, 0] => "2e1",
        _ => "?",
    }
}

/// Formats an ε-vector as e.g. `e1-e3`, `2e2`, `-e1+e2`.
pub fn eps_label(x: &[Rational]) -> String {
    let mut out = String::new();
    for (k, c) in x.iter().enumerate() {
        if *c == Rational::from_integer(0) {
            continue;
        }
        let neg = *c < Rational::from_integer(0);
        let a = if neg { -*c } else { *c };
        if neg {
            out.push('-');
        } else if !out.is_empty() {
            out.push('+');
        }
        if a != Rational::from_integer(1) {
            out.push_str(&crate::weight::format_rational(&a));
        }
        out.push_str(&format!("e{}", k + 1));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
