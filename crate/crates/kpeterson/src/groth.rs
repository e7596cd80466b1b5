//! Quantum double Grothendieck polynomials:
//! conserved quantities `F_m^{(i)}`, the `ψ_i` factors, `𝔊^Q_{w∘}`, the
//! `D_i^Q` recursion, the affine-node operator, the involution on the
//! quantum side, and the `η → b` specialization.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::KError;
use crate::ring::CRing;
use crate::rt::{RTPoly, RingCtx};

/// A monomial in `z_1..z_n`, `Q_1..Q_{n−1}`, `η_1..η_n`. `z` and `Q`
/// exponents may be negative (Laurent) where the affine operator or the
/// involution has been applied.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct QMono {
    pub z: Vec<i16>,
    pub q: Vec<i16>,
    pub eta: Vec<i16>,
}

impl QMono {
    pub fn unit(n: usize) -> Self {
        QMono {
            z: vec![0; n],
            q: vec![0; n - 1],
            eta: vec![0; n],
        }
    }

    fn degree(&self) -> i64 {
        self.z.iter().map(|&e| e as i64).sum::<i64>()
            + self.q.iter().map(|&e| e as i64).sum::<i64>()
            + self.eta.iter().map(|&e| e as i64).sum::<i64>()
    }

    fn add(&self, other: &QMono) -> QMono {
        QMono {
            z: self.z.iter().zip(&other.z).map(|(a, b)| a + b).collect(),
            q: self.q.iter().zip(&other.q).map(|(a, b)| a + b).collect(),
            eta: self.eta.iter().zip(&other.eta).map(|(a, b)| a + b).collect(),
        }
    }

    fn sub(&self, other: &QMono) -> QMono {
        QMono {
            z: self.z.iter().zip(&other.z).map(|(a, b)| a - b).collect(),
            q: self.q.iter().zip(&other.q).map(|(a, b)| a - b).collect(),
            eta: self.eta.iter().zip(&other.eta).map(|(a, b)| a - b).collect(),
        }
    }

    fn all_nonneg(&self) -> bool {
        self.z.iter().chain(&self.q).chain(&self.eta).all(|&e| e >= 0)
    }
}

impl Ord for QMono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.z.cmp(&other.z))
            .then_with(|| self.q.cmp(&other.q))
            .then_with(|| self.eta.cmp(&other.eta))
    }
}

impl PartialOrd for QMono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial over ℤ in the quantum Grothendieck ambient ring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QPoly {
    pub n: usize,
    pub terms: BTreeMap<QMono, BigInt>,
}

impl QPoly {
    pub fn zero(n: usize) -> Self {
        QPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, BigInt::one())
    }

    pub fn constant(n: usize, c: BigInt) -> Self {
        let mut p = Self::zero(n);
        if !c.is_zero() {
            p.terms.insert(QMono::unit(n), c);
        }
        p
    }

    pub fn int(n: usize, c: i64) -> Self {
        Self::constant(n, BigInt::from(c))
    }

    pub fn monomial(n: usize, m: QMono, c: BigInt) -> Self {
        let mut p = Self::zero(n);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn z(n: usize, i: usize) -> Self {
        assert!((1..=n).contains(&i));
        let mut m = QMono::unit(n);
        m.z[i - 1] = 1;
        Self::monomial(n, m, BigInt::one())
    }

    pub fn qvar(n: usize, i: usize) -> Self {
        assert!((1..=n - 1).contains(&i));
        let mut m = QMono::unit(n);
        m.q[i - 1] = 1;
        Self::monomial(n, m, BigInt::one())
    }

    pub fn eta(n: usize, i: usize) -> Self {
        assert!((1..=n).contains(&i));
        let mut m = QMono::unit(n);
        m.eta[i - 1] = 1;
        Self::monomial(n, m, BigInt::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&QMono::unit(self.n))
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    fn insert_term(&mut self, m: QMono, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> QPoly {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        let mut out = Self::zero(self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.insert_term(m1.add(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> QPoly {
        let mut acc = Self::one(self.n);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiply by `Q^{−θ∨} = (Q_1⋯Q_{n−1})^{-1}`.
    pub fn mul_q_neg_theta(&self) -> QPoly {
        let mut m = QMono::unit(self.n);
        for q in m.q.iter_mut() {
            *q = -1;
        }
        self.mul(&Self::monomial(self.n, m, BigInt::one()))
    }

    /// Swap `η_i ↔ η_j` (1-based).
    pub fn swap_eta(&self, i: usize, j: usize) -> QPoly {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            m2.eta.swap(i - 1, j - 1);
            out.insert_term(m2, c.clone());
        }
        out
    }

    /// Cyclic shift `ω^{(η)}: η_i ↦ η_{i+1}` (with `η_{n+1} = η_1`).
    pub fn omega_eta(&self) -> QPoly {
        let n = self.n;
        let mut out = Self::zero(n);
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            for i in 0..n {
                m2.eta[(i + 1) % n] = m.eta[i];
            }
            out.insert_term(m2, c.clone());
        }
        out
    }

    /// Set all Novikov variables to zero (classical limit). Terms with
    /// positive Q-exponents vanish; negative Q-exponents are rejected.
    pub fn q_to_zero(&self) -> Result<QPoly, KError> {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            if m.q.iter().any(|&e| e < 0) {
                return Err(KError::DegeneratePoint("negative Q exponent at Q = 0".into()));
            }
            if m.q.iter().all(|&e| e == 0) {
                out.insert_term(m.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn leading(&self) -> Option<(&QMono, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Exact division (leading-term elimination after shifting to ℕ
    /// exponents).
    pub fn exact_div(&self, d: &QPoly) -> Result<QPoly, KError> {
        if d.is_zero() {
            return Err(KError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.n));
        }
        let shift_of = |p: &QPoly| -> QMono {
            let mut m = p.terms.keys().next().unwrap().clone();
            for k in p.terms.keys() {
                for (a, b) in m.z.iter_mut().zip(&k.z) {
                    *a = (*a).min(*b);
                }
                for (a, b) in m.q.iter_mut().zip(&k.q) {
                    *a = (*a).min(*b);
                }
                for (a, b) in m.eta.iter_mut().zip(&k.eta) {
                    *a = (*a).min(*b);
                }
            }
            m
        };
        let sp = shift_of(self);
        let sd = shift_of(d);
        let shift = |p: &QPoly, s: &QMono| -> QPoly {
            let mut out = QPoly::zero(p.n);
            for (m, c) in &p.terms {
                out.terms.insert(m.sub(s), c.clone());
            }
            out
        };
        let p = shift(self, &sp);
        let dd = shift(d, &sd);
        let (dl_m, dl_c) = {
            let (m, c) = dd.leading().unwrap();
            (m.clone(), c.clone())
        };
        let mut rem = p;
        let mut quo = QPoly::zero(self.n);
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading().unwrap();
                (m.clone(), c.clone())
            };
            let diff = rm.sub(&dl_m);
            if !diff.all_nonneg() {
                return Err(KError::NotDivisible);
            }
            use num_integer::Integer;
            let (qc, r) = rc.div_rem(&dl_c);
            if !r.is_zero() {
                return Err(KError::NotDivisible);
            }
            let t = QPoly::monomial(self.n, diff, qc);
            rem = rem.sub(&t.mul(&dd));
            quo = quo.add(&t);
        }
        Ok(quo.mul(&QPoly::monomial(self.n, sp.sub(&sd), BigInt::one())))
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                json!({"z": m.z, "q": m.q, "eta": m.eta, "coeff": c.to_string()})
            })
            .collect();
        json!({"n": self.n, "terms": terms})
    }

    pub fn from_json(v: &Value) -> Option<QPoly> {
        let n = v.get("n")?.as_u64()? as usize;
        let mut p = QPoly::zero(n);
        for t in v.get("terms")?.as_array()? {
            let get = |k: &str| -> Option<Vec<i16>> {
                Some(
                    t.get(k)?
                        .as_array()?
                        .iter()
                        .map(|x| x.as_i64().unwrap() as i16)
                        .collect(),
                )
            };
            let m = QMono {
                z: get("z")?,
                q: get("q")?,
                eta: get("eta")?,
            };
            let c: BigInt = t.get("coeff")?.as_str()?.parse().ok()?;
            p.insert_term(m, c);
        }
        Some(p)
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            }
            let mag = c.magnitude();
            let mut parts: Vec<String> = Vec::new();
            let var = |name: &str, idx: usize, e: i16| -> String {
                if e == 1 {
                    format!("{name}{idx}")
                } else {
                    format!("{name}{idx}^{e}")
                }
            };
            for (i, &e) in m.z.iter().enumerate() {
                if e != 0 {
                    parts.push(var("z", i + 1, e));
                }
            }
            for (i, &e) in m.q.iter().enumerate() {
                if e != 0 {
                    parts.push(var("Q", i + 1, e));
                }
            }
            for (i, &e) in m.eta.iter().enumerate() {
                if e != 0 {
                    parts.push(var("y", i + 1, e));
                }
            }
            if parts.is_empty() {
                write!(f, "{}", mag)?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}*", mag)?;
                }
                write!(f, "{}", parts.join("*"))?;
            }
        }
        Ok(())
    }
}

impl CRing for QPoly {
    fn czero(&self) -> Self {
        Self::zero(self.n)
    }
    fn cone(&self) -> Self {
        Self::one(self.n)
    }
    fn cadd(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn csub(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn cmul(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn cneg(&self) -> Self {
        self.neg()
    }
    fn cis_zero(&self) -> bool {
        self.is_zero()
    }
}

// ---------------------------------------------------------------------------
// Conserved quantities and the longest-element Grothendieck polynomial
// ---------------------------------------------------------------------------

/// `F_m^{(i)} = Σ_{J⊂[i], |J|=m} ∏_{j∈J, j+1∉J} (1−Q_j) ∏_{j∈J} z_j`, with
/// the boundary convention `Q_n = 0` (the factor for `j = n` is 1).
pub fn f_conserved(n: usize, i: usize, m: usize) -> QPoly {
    assert!(i <= n && m <= i);
    let mut acc = QPoly::zero(n);
    let mut subset: Vec<usize> = Vec::new();
    fn rec(n: usize, i: usize, m: usize, start: usize, subset: &mut Vec<usize>, acc: &mut QPoly) {
        if subset.len() == m {
            let mut term = QPoly::one(n);
            for &j in subset.iter() {
                term = term.mul(&QPoly::z(n, j));
                if !subset.contains(&(j + 1)) && j < n {
                    term = term.mul(&QPoly::one(n).sub(&QPoly::qvar(n, j)));
                }
            }
            *acc = acc.add(&term);
            return;
        }
        for j in start..=i {
            subset.push(j);
            rec(n, i, m, j + 1, subset, acc);
            subset.pop();
        }
    }
    rec(n, i, m, 1, &mut subset, &mut acc);
    acc
}

/// The full conserved quantity `F_i(z,Q) = F_i^{(n)}`.
pub fn f_full(n: usize, i: usize) -> QPoly {
    f_conserved(n, n, i)
}

/// `ψ_i = Σ_{j=0}^i (−1)^j (1−η_{n−i})^j F_j^{(i)}`.
pub fn psi(n: usize, i: usize) -> QPoly {
    assert!((1..=n - 1).contains(&i));
    let base = QPoly::one(n).sub(&QPoly::eta(n, n - i));
    let mut acc = QPoly::zero(n);
    for j in 0..=i {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let term = base.pow(j as u32).mul(&f_conserved(n, i, j));
        acc = acc.add(&QPoly::int(n, sign).mul(&term));
    }
    acc
}

/// `𝔊^Q_{w∘} = ∏_{i=1}^{n−1} ψ_i`.
pub fn groth_longest(n: usize) -> QPoly {
    let mut acc = QPoly::one(n);
    for i in 1..n {
        acc = acc.mul(&psi(n, i));
    }
    acc
}

// ---------------------------------------------------------------------------
// Permutations (one-line notation, 1-based images)
// ---------------------------------------------------------------------------

pub fn perm_identity(n: usize) -> Vec<u8> {
    (1..=n as u8).collect()
}

pub fn perm_longest(n: usize) -> Vec<u8> {
    (1..=n as u8).rev().collect()
}

/// `s_θ = [n, 2, …, n−1, 1]`.
pub fn perm_s_theta(n: usize) -> Vec<u8> {
    let mut w = perm_identity(n);
    w.swap(0, n - 1);
    w
}

pub fn perm_len(w: &[u8]) -> usize {
    let mut inv = 0;
    for i in 0..w.len() {
        for j in (i + 1)..w.len() {
            if w[i] > w[j] {
                inv += 1;
            }
        }
    }
    inv
}

/// Left multiplication `s_i·w`: swap the values `i` and `i+1`.
pub fn perm_left_mul(i: usize, w: &[u8]) -> Vec<u8> {
    w.iter()
        .map(|&v| {
            if v as usize == i {
                (i + 1) as u8
            } else if v as usize == i + 1 {
                i as u8
            } else {
                v
            }
        })
        .collect()
}

/// `s_i·w > w` iff the value `i` appears before `i+1` in one-line notation.
pub fn perm_has_left_ascent(i: usize, w: &[u8]) -> bool {
    let pos_i = w.iter().position(|&v| v as usize == i).unwrap();
    let pos_i1 = w.iter().position(|&v| v as usize == i + 1).unwrap();
    pos_i < pos_i1
}

/// `w* = w∘ w w∘`.
pub fn perm_star(w: &[u8]) -> Vec<u8> {
    let n = w.len();
    (0..n).map(|i| (n as u8 + 1) - w[n - 1 - i]).collect()
}

pub fn perm_inverse(w: &[u8]) -> Vec<u8> {
    let mut inv = vec![0u8; w.len()];
    for (i, &v) in w.iter().enumerate() {
        inv[v as usize - 1] = i as u8 + 1;
    }
    inv
}

/// All permutations of S_n.
pub fn all_perms(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = perm_identity(n);
    fn rec(k: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in k..cur.len() {
            cur.swap(k, i);
            rec(k + 1, cur, out);
            cur.swap(k, i);
        }
    }
    rec(0, &mut cur, &mut out);
    out
}

// ---------------------------------------------------------------------------
// Demazure operators and the Grothendieck table
// ---------------------------------------------------------------------------

/// `T_i^Q f = (1−η_i)·(s_i^{(η)}f − f)/(η_{i+1} − η_i)`; the division is
/// exact because the numerator is antisymmetric in `η_i, η_{i+1}`.
pub fn t_q(n: usize, i: usize, f: &QPoly) -> Result<QPoly, KError> {
    assert!((1..=n - 1).contains(&i));
    let diff = f.swap_eta(i, i + 1).sub(f);
    let div = QPoly::eta(n, i + 1).sub(&QPoly::eta(n, i));
    let quotient = diff.exact_div(&div)?;
    Ok(QPoly::one(n).sub(&QPoly::eta(n, i)).mul(&quotient))
}

pub fn d_q(n: usize, i: usize, f: &QPoly) -> Result<QPoly, KError> {
    Ok(f.add(&t_q(n, i, f)?))
}

/// Memoized table of quantum double Grothendieck polynomials, filled by the
/// descent recursion downward from the longest element.
pub struct GrothTable {
    pub n: usize,
    map: Mutex<HashMap<Vec<u8>, QPoly>>,
}

impl GrothTable {
    pub fn new(n: usize) -> Self {
        let map = Mutex::new(HashMap::new());
        GrothTable { n, map }
    }

    pub fn groth(&self, w: &[u8]) -> QPoly {
        if let Some(hit) = self.map.lock().unwrap().get(w) {
            return hit.clone();
        }
        let val = if w == perm_longest(self.n).as_slice() {
            groth_longest(self.n)
        } else {
            // find an ascent: s_i w > w, then 𝔊_w = D_i^Q 𝔊_{s_i w}
            let i = (1..self.n)
                .find(|&i| perm_has_left_ascent(i, w))
                .expect("only the longest element has no ascent");
            let up = self.groth(&perm_left_mul(i, w));
            d_q(self.n, i, &up).expect("Grothendieck recursion divides exactly")
        };
        self.map
            .lock()
            .unwrap()
            .insert(w.to_vec(), val.clone());
        val
    }
}

// ---------------------------------------------------------------------------
// Specialized polynomials (η → b) and the affine-node operator
// ---------------------------------------------------------------------------

/// Monomial in `z` and `Q` only (exponents in ℤ).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct SMono {
    pub z: Vec<i16>,
    pub q: Vec<i16>,
}

impl SMono {
    pub fn unit(n: usize) -> Self {
        SMono {
            z: vec![0; n],
            q: vec![0; n - 1],
        }
    }

    fn add(&self, other: &SMono) -> SMono {
        SMono {
            z: self.z.iter().zip(&other.z).map(|(a, b)| a + b).collect(),
            q: self.q.iter().zip(&other.q).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Polynomial in `z, Q` (Laurent) with `R(T)` coefficients: the image of the
/// Grothendieck layer after the `η_i = 1 − e^{a_{n−i+1}}` specialization.
#[derive(Clone, PartialEq, Debug)]
pub struct SPoly {
    pub rt: RingCtx,
    pub terms: BTreeMap<SMono, RTPoly>,
}

impl SPoly {
    pub fn zero(rt: RingCtx) -> Self {
        SPoly {
            rt,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(rt: RingCtx) -> Self {
        Self::from_coeff(rt, RTPoly::one(rt))
    }

    pub fn from_coeff(rt: RingCtx, c: RTPoly) -> Self {
        let mut p = Self::zero(rt);
        p.insert_term(SMono::unit(rt.n), c);
        p
    }

    pub fn monomial(rt: RingCtx, m: SMono, c: RTPoly) -> Self {
        let mut p = Self::zero(rt);
        p.insert_term(m, c);
        p
    }

    pub fn z(rt: RingCtx, i: usize) -> Self {
        let mut m = SMono::unit(rt.n);
        m.z[i - 1] = 1;
        Self::monomial(rt, m, RTPoly::one(rt))
    }

    pub fn z_pow(rt: RingCtx, i: usize, e: i16) -> Self {
        let mut m = SMono::unit(rt.n);
        m.z[i - 1] = e;
        Self::monomial(rt, m, RTPoly::one(rt))
    }

    pub fn qvar(rt: RingCtx, i: usize) -> Self {
        let mut m = SMono::unit(rt.n);
        m.q[i - 1] = 1;
        Self::monomial(rt, m, RTPoly::one(rt))
    }

    pub fn q_monomial(rt: RingCtx, exps: &[i64]) -> Self {
        let mut m = SMono::unit(rt.n);
        for (slot, &e) in m.q.iter_mut().zip(exps) {
            *slot = e as i16;
        }
        Self::monomial(rt, m, RTPoly::one(rt))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert_term(&mut self, m: SMono, c: RTPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &SPoly) -> SPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SPoly) -> SPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SPoly {
        let mut out = Self::zero(self.rt);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.neg());
        }
        out
    }

    pub fn mul(&self, other: &SPoly) -> SPoly {
        let mut out = Self::zero(self.rt);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.insert_term(m1.add(m2), c1.mul(c2));
            }
        }
        out
    }

    pub fn mul_coeff(&self, c: &RTPoly) -> SPoly {
        let mut out = Self::zero(self.rt);
        for (m, x) in &self.terms {
            out.insert_term(m.clone(), x.mul(c));
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&RTPoly) -> RTPoly) -> SPoly {
        let mut out = Self::zero(self.rt);
        for (m, c) in &self.terms {
            out.insert_term(m.clone(), f(c));
        }
        out
    }

    /// The involution: `z_i ↦ z_{n−i+1}^{-1}`, `Q_i ↦ Q_{n−i}`, `ι` on
    /// coefficients.
    pub fn iota(&self) -> SPoly {
        let n = self.rt.n;
        let mut out = Self::zero(self.rt);
        for (m, c) in &self.terms {
            let mut z = vec![0i16; n];
            for (i, &e) in m.z.iter().enumerate() {
                z[n - 1 - i] = -e;
            }
            let mut q = m.q.clone();
            q.reverse();
            out.insert_term(SMono { z, q }, c.iota());
        }
        out
    }

    /// Coefficient-wise `s_θ` (swap `a_1 ↔ a_n`), the specialized form of
    /// `s_θ^{(η)}`.
    pub fn s_theta_coeff(&self) -> SPoly {
        self.map_coeffs(|c| c.swap_params(1, self.rt.n))
    }

    /// Specialized `D_i^Q`: coefficient-wise
    /// `f ↦ f + (s_{n−i}f − f)/(1 − e^{α_{n−i}})`.
    pub fn d_q(&self, i: usize) -> SPoly {
        let n = self.rt.n;
        assert!((1..=n - 1).contains(&i));
        let j = n - i;
        let mut exps = vec![0i32; n];
        exps[j - 1] += 1;
        exps[j] -= 1;
        let div = RTPoly::one(self.rt).sub(&RTPoly::monomial(self.rt, exps, BigInt::one()));
        let swapped = self.map_coeffs(|c| c.swap_params(j, j + 1));
        let mut out = self.clone();
        for (m, c) in swapped.terms {
            let prev = self
                .terms
                .get(&m)
                .cloned()
                .unwrap_or_else(|| RTPoly::zero(self.rt));
            let num = c.sub(&prev);
            if num.is_zero() {
                continue;
            }
            let q = num
                .exact_div(&div)
                .expect("Demazure numerator is divisible");
            out.insert_term(m, q);
        }
        out
    }

    /// Specialized `T_θ^Q`: `(s_θ f − f)/(1 − e^{−θ})` coefficient-wise.
    pub fn t_theta(&self) -> SPoly {
        let n = self.rt.n;
        let mut exps = vec![0i32; n];
        exps[n - 1] += 1;
        exps[0] -= 1;
        let div = RTPoly::one(self.rt).sub(&RTPoly::monomial(self.rt, exps, BigInt::one()));
        let mut out = Self::zero(self.rt);
        // the parameter swap preserves the (z, Q)-key set exactly
        let swapped = self.s_theta_coeff();
        for (m, b) in &self.terms {
            let a = swapped
                .terms
                .get(m)
                .cloned()
                .unwrap_or_else(|| RTPoly::zero(self.rt));
            let num = a.sub(b);
            if num.is_zero() {
                continue;
            }
            out.insert_term(
                m.clone(),
                num.exact_div(&div).expect("T_theta numerator divisible"),
            );
        }
        out
    }

    /// The affine-node operator on the quantum side:
    /// `D_0^Q f = e^{−θ}·T_θ^Q f + Q^{−θ∨}·𝔊_{s_θ}·s_θ(f)`.
    ///
    /// The `e^{−θ}` factor makes the operator match the pullback of the
    /// affine `D_0` through the Peterson map; it also makes
    /// `D_0^Q(𝔊_{s_θ}) ≡ 𝔊_{s_θ}` hold modulo the ideal, which fails for the
    /// bare `T_θ^Q` variant.
    pub fn d0_q(&self, groth_s_theta: &SPoly) -> SPoly {
        let n = self.rt.n;
        let mut exps = vec![0i32; n];
        exps[n - 1] += 1;
        exps[0] -= 1;
        let e_neg_theta = RTPoly::monomial(self.rt, exps, BigInt::one());
        let t_part = self.t_theta().mul_coeff(&e_neg_theta);
        let mut qm = SMono::unit(n);
        for q in qm.q.iter_mut() {
            *q = -1;
        }
        let q_neg = Self::monomial(self.rt, qm, RTPoly::one(self.rt));
        let twist = q_neg.mul(groth_s_theta).mul(&self.s_theta_coeff());
        t_part.add(&twist)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| json!({"z": m.z, "q": m.q, "coeff": c.to_json()}))
            .collect();
        json!({"n": self.rt.n, "mode": self.rt.mode.to_string(), "terms": terms})
    }
}

/// Substitute `η_i = 1 − e^{a_{n−i+1}}`.
pub fn eta_specialize(rt: RingCtx, f: &QPoly) -> SPoly {
    assert_eq!(rt.n, f.n);
    let n = rt.n;
    // cache powers of (1 − e^{a_{n−i+1}})
    let bases: Vec<RTPoly> = (1..=n)
        .map(|i| RTPoly::one(rt).sub(&RTPoly::e_pow(rt, (n - i + 1) as i64, 1)))
        .collect();
    let mut out = SPoly::zero(rt);
    for (m, c) in &f.terms {
        let mut coeff = RTPoly::constant(rt, c.clone());
        for (i, &e) in m.eta.iter().enumerate() {
            assert!(e >= 0, "eta exponents must be polynomial");
            coeff = coeff.mul(&bases[i].pow(e as u32));
        }
        out.insert_term(
            SMono {
                z: m.z.clone(),
                q: m.q.clone(),
            },
            coeff,
        );
    }
    out
}

/// `D_x^Q(1)` along a reduced word of an affine Grassmannian element
/// (operators applied right-to-left; letters 1..n−1 are the finite nodes,
/// letter 0 is the affine node).
pub fn d_word_q(rt: RingCtx, word: &[usize], groth_s_theta: &SPoly) -> SPoly {
    let mut f = SPoly::one(rt);
    for &i in word.iter().rev() {
        f = if i == 0 {
            f.d0_q(groth_s_theta)
        } else {
            f.d_q(i)
        };
    }
    f
}

/// Classical dominant-permutation product `[x_1|η]^{c_1}[x_2|η]^{c_2}⋯` with
/// `x_i = 1 − z_i` and `[x|η]^j = (x⊕η_1)⋯(x⊕η_j)`, `x⊕y = x + y − xy`.
pub fn dominant_product(n: usize, code: &[usize]) -> QPoly {
    let mut acc = QPoly::one(n);
    for (i, &ci) in code.iter().enumerate() {
        let x = QPoly::one(n).sub(&QPoly::z(n, i + 1));
        for j in 1..=ci {
            let eta = QPoly::eta(n, j);
            // x ⊕ η_j
            let oplus = x.add(&eta).sub(&x.mul(&eta));
            acc = acc.mul(&oplus);
        }
    }
    acc
}

/// Fraction of `QPoly` over ℤ (used by the discrete Toda step).
#[derive(Clone, Debug)]
pub struct QFrac {
    pub num: QPoly,
    pub den: QPoly,
}

impl QFrac {
    pub fn from_poly(p: QPoly) -> Self {
        let den = QPoly::one(p.n);
        QFrac { num: p, den }
    }

    pub fn new(num: QPoly, den: QPoly) -> Result<Self, KError> {
        if den.is_zero() {
            return Err(KError::DivisionByZero);
        }
        // cheap cancellation keeps the discrete-time iterates small
        if let Ok(q) = num.exact_div(&den) {
            return Ok(Self::from_poly(q));
        }
        Ok(QFrac { num, den })
    }

    pub fn add(&self, other: &QFrac) -> QFrac {
        QFrac::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
        .expect("nonzero denominators")
    }

    pub fn sub(&self, other: &QFrac) -> QFrac {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> QFrac {
        QFrac {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &QFrac) -> QFrac {
        QFrac::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominators")
    }

    pub fn div(&self, other: &QFrac) -> Result<QFrac, KError> {
        if other.num.is_zero() {
            return Err(KError::DivisionByZero);
        }
        QFrac::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl PartialEq for QFrac {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rt::Mode;

    #[test]
    fn f_examples() {
        // F_0^{(i)} = 1
        for n in 2..=4 {
            for i in 0..=n {
                assert!(f_conserved(n, i, 0).is_one());
            }
        }
        // n=2: F_1^{(2)} = (1−Q_1)z_1 + z_2
        let expect = QPoly::one(2)
            .sub(&QPoly::qvar(2, 1))
            .mul(&QPoly::z(2, 1))
            .add(&QPoly::z(2, 2));
        assert_eq!(f_full(2, 1), expect);
        // F_n^{(n)} = z_1⋯z_n
        for n in 2..=4 {
            let mut prod = QPoly::one(n);
            for i in 1..=n {
                prod = prod.mul(&QPoly::z(n, i));
            }
            assert_eq!(f_full(n, n), prod);
        }
    }

    #[test]
    fn psi_rank_two() {
        // ψ₁ = 1 − (1−η₁)(1−Q₁)z₁ and 𝔊_{w∘} = ψ₁ for n=2
        let n = 2;
        let expect = QPoly::one(n).sub(
            &QPoly::one(n)
                .sub(&QPoly::eta(n, 1))
                .mul(&QPoly::one(n).sub(&QPoly::qvar(n, 1)))
                .mul(&QPoly::z(n, 1)),
        );
        assert_eq!(psi(n, 1), expect);
        assert_eq!(groth_longest(n), expect);
    }

    #[test]
    fn groth_identity_element() {
        // 𝔊_e = 1 for n = 2, 3 (runs the recursion to the bottom)
        for n in [2usize, 3] {
            let table = GrothTable::new(n);
            assert!(table.groth(&perm_identity(n)).is_one(), "n={n}");
        }
    }

    #[test]
    fn groth_path_independence_s4() {
        // all descent paths agree: check every ascent route for every w ∈ S₄
        let n = 4;
        let table = GrothTable::new(n);
        for w in all_perms(n) {
            let g = table.groth(&w);
            for i in 1..n {
                if perm_has_left_ascent(i, &w) {
                    let up = table.groth(&perm_left_mul(i, &w));
                    let via = d_q(n, i, &up).unwrap();
                    assert_eq!(via, g, "w={w:?} via i={i}");
                }
                // descent direction: D_i^Q fixes 𝔊_w when s_i w < w? No —
                // D_i^Q 𝔊_w = 𝔊_{s_i w}; when s_i w < w the recursion gives
                // 𝔊_{s_iw} directly; check that applying D twice stabilizes.
            }
        }
    }

    #[test]
    fn d_q_properties() {
        // D_i^Q(1) = 1, idempotency, T² = −T, braid on random-ish inputs
        let n = 3;
        assert!(d_q(n, 1, &QPoly::one(n)).unwrap().is_one());
        let f = groth_longest(n); // a conveniently asymmetric polynomial
        for i in 1..n {
            let df = d_q(n, i, &f).unwrap();
            assert_eq!(d_q(n, i, &df).unwrap(), df, "D idempotent");
            let tf = t_q(n, i, &f).unwrap();
            assert_eq!(t_q(n, i, &tf).unwrap(), tf.neg(), "T² = −T");
        }
        let braid_l = d_q(n, 1, &d_q(n, 2, &d_q(n, 1, &f).unwrap()).unwrap()).unwrap();
        let braid_r = d_q(n, 2, &d_q(n, 1, &d_q(n, 2, &f).unwrap()).unwrap()).unwrap();
        assert_eq!(braid_l, braid_r, "braid");
        // T on symmetric input is zero
        let sym = QPoly::eta(n, 1).add(&QPoly::eta(n, 2));
        assert!(t_q(n, 1, &sym).unwrap().is_zero());
    }

    #[test]
    fn cor_phi_n_minus_1() {
        // 𝔊_{s_1s_2⋯s_{n−1}} = Σ_j (−1)^j (1−η_1)^j F_j^{(n−1)} for n ≤ 4
        for n in [2usize, 3, 4] {
            // one-line notation of s_1s_2⋯s_{n−1}: [2,3,…,n,1]
            let mut w: Vec<u8> = (2..=n as u8).collect();
            w.push(1);
            let table = GrothTable::new(n);
            let got = table.groth(&w);
            let base = QPoly::one(n).sub(&QPoly::eta(n, 1));
            let mut expect = QPoly::zero(n);
            for j in 0..=(n - 1) {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                expect = expect.add(
                    &QPoly::int(n, sign)
                        .mul(&base.pow(j as u32))
                        .mul(&f_conserved(n, n - 1, j)),
                );
            }
            assert_eq!(got, expect, "n={n}");
        }
    }

    #[test]
    fn prop_gtheta_product() {
        // 𝔊_{s_θ}(z|η) = 𝔊_{s_1⋯s_{n−1}}(z|η)·𝔊_{s_{n−2}⋯s_1}(z|ω^{(η)}η)
        for n in [3usize, 4] {
            let table = GrothTable::new(n);
            let lhs = table.groth(&perm_s_theta(n));
            let mut w1: Vec<u8> = (2..=n as u8).collect();
            w1.push(1);
            // s_{n−2}⋯s_2s_1 in one-line notation: maps 1→n−1? Compute by
            // multiplying generators.
            // s_{n−2}⋯s_2s_1: left-multiply upward so the last factor
            // applied is s_{n−2} (the leftmost letter).
            let mut w2 = perm_identity(n);
            for i in 1..=(n - 2) {
                w2 = perm_left_mul(i, &w2);
            }
            let rhs = table.groth(&w1).mul(&table.groth(&w2).omega_eta());
            assert_eq!(lhs, rhs, "n={n}");
        }
    }

    #[test]
    fn classical_dominant_forms() {
        // At Q = 0 the three named permutations reduce to the dominant
        // products [x|η]-style.
        for n in [2usize, 3, 4] {
            let table = GrothTable::new(n);
            // s_θ: code (n−1, 1, …, 1, 0)
            let mut code = vec![n - 1];
            code.extend(std::iter::repeat(1).take(n - 2));
            let lhs = table.groth(&perm_s_theta(n)).q_to_zero().unwrap();
            assert_eq!(lhs, dominant_product(n, &code), "s_theta n={n}");
            // s_1⋯s_{n−1}: code (1,…,1,0)
            let mut w1: Vec<u8> = (2..=n as u8).collect();
            w1.push(1);
            let code1 = vec![1usize; n - 1];
            assert_eq!(
                table.groth(&w1).q_to_zero().unwrap(),
                dominant_product(n, &code1),
                "row n={n}"
            );
            // s_{n−2}⋯s_1: code (n−2, 0, …, 0)
            let mut w2 = perm_identity(n);
            for i in 1..=(n - 2) {
                w2 = perm_left_mul(i, &w2);
            }
            assert_eq!(
                table.groth(&w2).q_to_zero().unwrap(),
                dominant_product(n, &[n - 2]),
                "column n={n}"
            );
        }
    }

    #[test]
    fn iota_preserves_ideal_generators() {
        // z_1⋯z_n·ι(F_i^{(n)}) = F_{n−i}^{(n)}
        let rt = RingCtx::new(3, Mode::Sl);
        let n = 3;
        let mut zprod = SPoly::one(rt);
        for i in 1..=n {
            zprod = zprod.mul(&SPoly::z(rt, i));
        }
        for i in 1..=(n - 1) {
            let f = eta_specialize(rt, &f_full(n, i));
            let lhs = zprod.mul(&f.iota());
            let rhs = eta_specialize(rt, &f_full(n, n - i));
            assert_eq!(lhs, rhs, "i={i}");
        }
    }

    #[test]
    fn iota_is_involution() {
        let rt = RingCtx::new(3, Mode::Sl);
        let f = eta_specialize(rt, &groth_longest(3));
        assert_eq!(f.iota().iota(), f);
    }

    #[test]
    fn eta_specialization_examples() {
        let rt = RingCtx::new(2, Mode::Sl);
        // η₁ ↦ 1 − e^{a_n}
        let s = eta_specialize(rt, &QPoly::eta(2, 1));
        let expect = SPoly::from_coeff(rt, RTPoly::one(rt).sub(&RTPoly::e_pow(rt, 2, 1)));
        assert_eq!(s, expect);
        // 1 − η₁ ↦ e^{a₂}
        let s2 = eta_specialize(rt, &QPoly::one(2).sub(&QPoly::eta(2, 1)));
        assert_eq!(s2, SPoly::from_coeff(rt, RTPoly::e_pow(rt, 2, 1)));
        // ψ₁ (n=2) ↦ 1 − e^{a₂}(1−Q₁)z₁
        let spec = eta_specialize(rt, &psi(2, 1));
        let expect = SPoly::one(rt).sub(
            &SPoly::z(rt, 1)
                .mul(&SPoly::one(rt).sub(&SPoly::qvar(rt, 1)))
                .mul_coeff(&RTPoly::e_pow(rt, 2, 1)),
        );
        assert_eq!(spec, expect);
    }

    #[test]
    fn d0q_of_one() {
        // D₀^Q(1) = Q^{−θ∨}·𝔊_{s_θ} (T_θ^Q(1) = 0)
        let rt = RingCtx::new(3, Mode::Sl);
        let table = GrothTable::new(3);
        let gst = eta_specialize(rt, &table.groth(&perm_s_theta(3)));
        let got = SPoly::one(rt).d0_q(&gst);
        let mut qm = SMono::unit(3);
        qm.q = vec![-1, -1];
        let expect = SPoly::monomial(rt, qm, RTPoly::one(rt)).mul(&gst);
        assert_eq!(got, expect);
    }

    #[test]
    fn star_involution_consistency() {
        // w ↦ w* = w∘ww∘ preserves length; ι ∘ table should send 𝔊_w to
        // 𝔊_{w*} modulo the ideal — checked through Peterson images in the
        // peterson module; here only the combinatorial layer.
        let w = vec![2u8, 3, 1];
        assert_eq!(perm_len(&perm_star(&w)), perm_len(&w));
        assert_eq!(perm_star(&perm_star(&w)), w);
    }
}
