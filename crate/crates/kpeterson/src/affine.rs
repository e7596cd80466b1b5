//! Combinatorics of the affine symmetric group of type `A_{n−1}^{(1)}`:
//! window-notation affine permutations, affine Grassmannian elements,
//! k-bounded partitions and n-cores, residues, translation decomposition,
//! `ω_k`-conjugation, k-rectangles and the maximal k-irreducible partition.
//!
//! The bijection between k-bounded partitions and affine Grassmannian
//! elements goes through n-cores via the shifted beta-set
//! `S(κ) = {κ_i − i + 1 : i ≥ 1}`: the generator `s_i` acts on `ℤ` and on a
//! core adds/removes every addable/removable box of n-residue `i`, where the
//! residue of the box `(r, c)` is `(c − r) mod n`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::KError;

/// An integer partition (weakly decreasing positive parts).
#[derive(Clone, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub struct Partition(pub Vec<u8>);

impl Partition {
    pub fn new(mut parts: Vec<u8>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn size(&self) -> usize {
        self.0.iter().map(|&p| p as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn part(&self, i: usize) -> u8 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        if self.0.is_empty() {
            return Partition::empty();
        }
        let cols = self.0[0] as usize;
        let mut out = vec![0u8; cols];
        for (j, slot) in out.iter_mut().enumerate() {
            *slot = self.0.iter().filter(|&&p| (p as usize) > j).count() as u8;
        }
        Partition(out)
    }

    pub fn is_k_bounded(&self, k: usize) -> bool {
        self.0.iter().all(|&p| (p as usize) <= k)
    }

    /// `λ₁ + ℓ(λ) ≤ n`.
    pub fn is_k_small(&self, n: usize) -> bool {
        self.part(0) as usize + self.len() <= n
    }

    /// Multiset union of parts.
    pub fn union(&self, other: &Partition) -> Partition {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Partition::new(v)
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        row >= 1 && col >= 1 && self.part(row - 1) as usize >= col
    }

    pub fn hook(&self, row: usize, col: usize) -> usize {
        let conj = self.conjugate();
        (self.part(row - 1) as usize - col) + (conj.part(col - 1) as usize - row) + 1
    }

    /// Removable corners as (row, col), 1-based.
    pub fn corners(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, &p) in self.0.iter().enumerate() {
            let next = self.part(i + 1);
            if p > next {
                out.push((i + 1, p as usize));
            }
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "()")
        } else {
            write!(
                f,
                "({})",
                self.0
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )
        }
    }
}

/// `(col − row) mod n`, the n-residue of a box.
pub fn residue(n: usize, row: usize, col: usize) -> usize {
    let n = n as i64;
    let r = (col as i64 - row as i64).rem_euclid(n);
    r as usize
}

/// Maps a residue class to the 1-based equivariant parameter index: residue 0
/// pairs with `b_n`.
pub fn residue_param_index(n: usize, r: usize) -> usize {
    if r == 0 {
        n
    } else {
        r
    }
}

/// The k-rectangle `R_i = (i)^{n−i}`.
pub fn k_rectangle(n: usize, i: usize) -> Partition {
    assert!(i >= 1 && i <= n - 1);
    Partition(vec![i as u8; n - i])
}

/// The maximal k-irreducible partition `ν_n = ⋃_{i=1}^{n−2} (n−i−1)^i`.
pub fn nu(n: usize) -> Partition {
    let mut acc = Partition::empty();
    for i in 1..=(n.saturating_sub(2)) {
        let part = (n - i - 1) as u8;
        if part > 0 {
            acc = acc.union(&Partition(vec![part; i]));
        }
    }
    acc
}

/// For each diagonal box `x = (i,i)` of λ: the residue `r(x)` of the
/// rightmost box in its row and `b(x)` of the bottom box in its column.
pub fn diag_stats(n: usize, lambda: &Partition) -> Vec<(usize, usize)> {
    let conj = lambda.conjugate();
    let mut out = Vec::new();
    let mut i = 1;
    while lambda.contains(i, i) {
        let r = residue(n, i, lambda.part(i - 1) as usize);
        let b = residue(n, conj.part(i - 1) as usize, i);
        out.push((r, b));
        i += 1;
    }
    out
}

/// The exponent vector of the unit `e(λ) = ∏ e^{a_{r(x)+1} − a_{b(x)}}`
/// (1-based parameter indices, residue 0 mapped to n).
pub fn diag_unit_exponents(n: usize, lambda: &Partition) -> Vec<i32> {
    let mut exps = vec![0i32; n];
    for (r, b) in diag_stats(n, lambda) {
        exps[r] += 1; // a_{r+1}: r ∈ 0..n−1 so index r+1 is r 0-based
        exps[residue_param_index(n, b) - 1] -= 1;
    }
    exps
}

/// All k-bounded partitions of size at most `max`.
pub fn k_bounded_up_to(k: usize, max: usize) -> Vec<Partition> {
    let mut out = vec![Partition::empty()];
    fn rec(maxpart: usize, rem: usize, cur: &mut Vec<u8>, out: &mut Vec<Partition>) {
        for p in (1..=maxpart.min(rem)).rev() {
            cur.push(p as u8);
            out.push(Partition(cur.clone()));
            rec(p, rem - p, cur, out);
            cur.pop();
        }
    }
    let mut cur = Vec::new();
    rec(k, max, &mut cur, &mut out);
    out.sort_by_key(|p| (p.size(), p.0.clone()));
    out.dedup();
    out
}

// ---------------------------------------------------------------------------
// Affine permutations
// ---------------------------------------------------------------------------

/// Affine permutation in window notation: `f(i+n) = f(i) + n` and
/// `Σ (f(i) − i) = 0`.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct AffinePerm {
    pub n: usize,
    pub window: Vec<i64>,
}

impl AffinePerm {
    pub fn identity(n: usize) -> Self {
        AffinePerm {
            n,
            window: (1..=n as i64).collect(),
        }
    }

    pub fn from_window(n: usize, window: Vec<i64>) -> Result<Self, KError> {
        if window.len() != n {
            return Err(KError::Invalid("window length must equal n".into()));
        }
        let sum: i64 = window.iter().enumerate().map(|(i, &f)| f - (i as i64 + 1)).sum();
        if sum != 0 {
            return Err(KError::Invalid("window normalization sum is nonzero".into()));
        }
        let mut seen = BTreeSet::new();
        for &f in &window {
            if !seen.insert(f.rem_euclid(n as i64)) {
                return Err(KError::Invalid("window entries collide modulo n".into()));
            }
        }
        Ok(AffinePerm { n, window })
    }

    /// The generator `s_i` (0-based residue, `0 ≤ i ≤ n−1`): `j ↦ j+1` for
    /// `j ≡ i`, `j ↦ j−1` for `j ≡ i+1 (mod n)`.
    pub fn gen(n: usize, i: usize) -> Self {
        assert!(i < n);
        let mut w: Vec<i64> = (1..=n as i64).collect();
        let n_i = n as i64;
        for (idx, v) in w.iter_mut().enumerate() {
            let j = idx as i64 + 1;
            if j.rem_euclid(n_i) == (i as i64).rem_euclid(n_i) {
                *v = j + 1;
            } else if j.rem_euclid(n_i) == (i as i64 + 1).rem_euclid(n_i) {
                *v = j - 1;
            }
        }
        AffinePerm { n, window: w }
    }

    /// The finite reflection `s_θ` exchanging 1 and n.
    pub fn s_theta(n: usize) -> Self {
        let mut w: Vec<i64> = (1..=n as i64).collect();
        w[0] = n as i64;
        w[n - 1] = 1;
        AffinePerm { n, window: w }
    }

    /// Translation `t_ξ` for `ξ` in ε-coordinates with `Σ ξ_i = 0`:
    /// `t_ξ(i) = i + n·ξ_i`.
    pub fn translation(n: usize, xi: &[i64]) -> Self {
        assert_eq!(xi.len(), n);
        assert_eq!(xi.iter().sum::<i64>(), 0);
        let window = (0..n).map(|i| (i as i64 + 1) + (n as i64) * xi[i]).collect();
        AffinePerm { n, window }
    }

    /// A finite permutation given in one-line notation (1-based images).
    pub fn from_finite(n: usize, oneline: &[usize]) -> Self {
        let window = oneline.iter().map(|&v| v as i64).collect();
        AffinePerm { n, window }
    }

    pub fn eval(&self, j: i64) -> i64 {
        let n = self.n as i64;
        let r = (j - 1).rem_euclid(n);
        let q = (j - 1).div_euclid(n);
        self.window[r as usize] + q * n
    }

    pub fn mul(&self, other: &AffinePerm) -> AffinePerm {
        debug_assert_eq!(self.n, other.n);
        let window = (1..=self.n as i64).map(|i| self.eval(other.eval(i))).collect();
        AffinePerm { n: self.n, window }
    }

    pub fn inverse(&self) -> AffinePerm {
        let n = self.n as i64;
        let mut window = vec![0i64; self.n];
        for (idx, &v) in self.window.iter().enumerate() {
            let i = idx as i64 + 1;
            // self(i) = v ⟹ inv(v) = i; shift v into the window range.
            let r = (v - 1).rem_euclid(n);
            let q = (v - 1).div_euclid(n);
            window[r as usize] = i - q * n;
        }
        AffinePerm { n: self.n, window }
    }

    /// Coxeter length: `Σ_{1≤i<j≤n} |⌊(f(j) − f(i))/n⌋|`.
    pub fn len(&self) -> usize {
        let n = self.n as i64;
        let mut total = 0i64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                total += ((self.window[j] - self.window[i]) as f64 / n as f64).floor().abs() as i64;
            }
        }
        total as usize
    }

    pub fn is_identity(&self) -> bool {
        self.window.iter().enumerate().all(|(i, &v)| v == i as i64 + 1)
    }

    /// Minimal-length coset representative for `Ŵ/W`: increasing window.
    pub fn is_grassmannian(&self) -> bool {
        self.window.windows(2).all(|w| w[0] < w[1])
    }

    pub fn left_mul_gen(&self, i: usize) -> AffinePerm {
        AffinePerm::gen(self.n, i).mul(self)
    }

    /// Residues `i` with `ℓ(s_i x) < ℓ(x)`.
    pub fn left_descents(&self) -> Vec<usize> {
        let l = self.len();
        (0..self.n)
            .filter(|&i| self.left_mul_gen(i).len() < l)
            .collect()
    }

    pub fn from_word(n: usize, word: &[usize]) -> AffinePerm {
        let mut x = AffinePerm::identity(n);
        for &i in word {
            x = x.mul(&AffinePerm::gen(n, i));
        }
        x
    }

    /// A reduced word obtained by peeling left descents. `largest_first`
    /// selects the other greedy order (used to exercise path independence).
    pub fn reduced_word(&self, largest_first: bool) -> Vec<usize> {
        let mut x = self.clone();
        let mut word = Vec::new();
        while !x.is_identity() {
            let ds = x.left_descents();
            let &i = if largest_first {
                ds.last().expect("non-identity element has a descent")
            } else {
                ds.first().expect("non-identity element has a descent")
            };
            word.push(i);
            x = x.left_mul_gen(i);
        }
        word
    }

    /// `ω_k`-conjugation: replaces `s_i` by `s_{−i mod n}` in any reduced
    /// word; realized as conjugation by `j ↦ 1 − j`.
    pub fn omega_k_conj(&self) -> AffinePerm {
        let window: Vec<i64> = (1..=self.n as i64).map(|i| 1 - self.eval(1 - i)).collect();
        AffinePerm { n: self.n, window }
    }

    /// Decompose `x = w·t_ξ` with `w ∈ S_n` (one-line notation) and `ξ` in
    /// ε-coordinates.
    pub fn translation_decompose(&self) -> (Vec<usize>, Vec<i64>) {
        let n = self.n as i64;
        let mut w = vec![0usize; self.n];
        let mut xi = vec![0i64; self.n];
        for (idx, &f) in self.window.iter().enumerate() {
            let r = (f - 1).rem_euclid(n) + 1;
            w[idx] = r as usize;
            xi[idx] = (f - r) / n;
        }
        (w, xi)
    }

    /// The n-core associated with a Grassmannian element: the partition whose
    /// shifted beta-set is `x({j ≤ 0})`.
    pub fn core(&self) -> Partition {
        assert!(self.is_grassmannian());
        let n = self.n as i64;
        // Collect the positive elements of x({j ≤ 0}); all sufficiently
        // negative arguments map to negative values.
        let mut elems: Vec<i64> = Vec::new();
        // x(r − c·n) = x(r) − c·n for r ∈ [1,n], c ≥ 1.
        let max_c: i64 = self
            .window
            .iter()
            .map(|&v| (v + n - 1).div_euclid(n).max(0))
            .max()
            .unwrap_or(0)
            + self.n as i64
            + 2;
        for r in 0..self.n {
            for c in 1..=max_c {
                elems.push(self.window[r] - c * n);
            }
        }
        elems.sort_unstable_by(|a, b| b.cmp(a));
        // κ_i = s_i + i − 1 for the descending elements s_1 > s_2 > …
        let mut parts = Vec::new();
        for (i, &s) in elems.iter().enumerate() {
            let p = s + i as i64;
            if p <= 0 {
                break;
            }
            parts.push(p as u8);
        }
        Partition::new(parts)
    }
}

impl fmt::Display for AffinePerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}]",
            self.window
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

/// `ξ = Σ c_i α_i^∨` in simple-coroot coordinates: `c_i = ξ_1 + ⋯ + ξ_i`.
pub fn coroot_coordinates(xi: &[i64]) -> Vec<i64> {
    let mut c = Vec::with_capacity(xi.len() - 1);
    let mut acc = 0;
    for &x in &xi[..xi.len() - 1] {
        acc += x;
        c.push(acc);
    }
    c
}

/// The k-bounded partition of an n-core: `λ_i` counts the boxes in row `i`
/// with hook length at most `k = n−1`.
pub fn core_to_bounded(n: usize, core: &Partition) -> Partition {
    let k = n - 1;
    let parts: Vec<u8> = (1..=core.len())
        .map(|i| {
            (1..=core.part(i - 1) as usize)
                .filter(|&j| core.hook(i, j) <= k)
                .count() as u8
        })
        .collect();
    Partition::new(parts)
}

/// Lazily grown table of the bijection `𝒫^{(k)} ≅ Ŵ⁰`, built by breadth-first
/// search over left multiplication.
pub struct AffineTables {
    pub n: usize,
    by_partition: HashMap<Partition, AffinePerm>,
    frontier: Vec<AffinePerm>,
    built_len: usize,
}

impl AffineTables {
    pub fn new(n: usize) -> Self {
        let e = AffinePerm::identity(n);
        let mut by_partition = HashMap::new();
        by_partition.insert(Partition::empty(), e.clone());
        AffineTables {
            n,
            by_partition,
            frontier: vec![e],
            built_len: 0,
        }
    }

    pub fn ensure(&mut self, len: usize) {
        while self.built_len < len {
            let mut next: Vec<AffinePerm> = Vec::new();
            let mut seen: HashSet<Vec<i64>> = HashSet::new();
            for x in &self.frontier {
                for i in 0..self.n {
                    let y = x.left_mul_gen(i);
                    if !y.is_grassmannian() || y.len() != self.built_len + 1 {
                        continue;
                    }
                    if !seen.insert(y.window.clone()) {
                        continue;
                    }
                    let lambda = core_to_bounded(self.n, &y.core());
                    debug_assert_eq!(lambda.size(), self.built_len + 1);
                    self.by_partition.insert(lambda, y.clone());
                    next.push(y);
                }
            }
            self.frontier = next;
            self.built_len += 1;
        }
    }

    pub fn element(&mut self, lambda: &Partition) -> Result<AffinePerm, KError> {
        if !lambda.is_k_bounded(self.n - 1) {
            return Err(KError::NotKBounded);
        }
        self.ensure(lambda.size());
        self.by_partition
            .get(lambda)
            .cloned()
            .ok_or_else(|| KError::Invalid(format!("no element for partition {lambda}")))
    }

    /// Reduced word by greedy corner peeling (first letter = first peel).
    pub fn word(&mut self, lambda: &Partition, largest_first: bool) -> Result<Vec<usize>, KError> {
        Ok(self.element(lambda)?.reduced_word(largest_first))
    }

    /// Partition of an arbitrary Grassmannian element (not necessarily in the
    /// table yet).
    pub fn partition_of(&self, x: &AffinePerm) -> Partition {
        core_to_bounded(self.n, &x.core())
    }
}

/// `partition_from_word`: validates that the word is reduced and defines a
/// Grassmannian element, then reads off its k-bounded partition.
pub fn partition_from_word(n: usize, word: &[usize]) -> Result<Partition, KError> {
    let x = AffinePerm::from_word(n, word);
    if x.len() != word.len() {
        return Err(KError::NotReduced);
    }
    if !x.is_grassmannian() {
        return Err(KError::NotGrassmannian);
    }
    Ok(core_to_bounded(n, &x.core()))
}

/// All `z ∈ Ŵ⁰` with `z ≤ x` in Bruhat order, via the subword
/// characterization on a fixed reduced word of `x`.
pub fn bruhat_lower_set(x: &AffinePerm, bound: usize) -> Result<Vec<Partition>, KError> {
    let word = x.reduced_word(false);
    if word.len() > bound {
        return Err(KError::BoundExceeded);
    }
    let n = x.n;
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut out: Vec<Partition> = Vec::new();
    for mask in 0u32..(1 << word.len()) {
        let sub: Vec<usize> = word
            .iter()
            .enumerate()
            .filter(|(p, _)| mask & (1 << p) != 0)
            .map(|(_, &l)| l)
            .collect();
        let z = AffinePerm::from_word(n, &sub);
        if z.len() != sub.len() || !z.is_grassmannian() {
            continue;
        }
        if seen.insert(z.window.clone()) {
            out.push(core_to_bounded(n, &z.core()));
        }
    }
    out.sort_by_key(|p| (p.size(), p.0.clone()));
    Ok(out)
}
