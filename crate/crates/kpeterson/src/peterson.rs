//! The K-Peterson substitution `Φ_n` (and `Φ̃_n = σ∘Φ_n`), the main-theorem
//! verifier, and the determinantal / factorization theorem verifiers.
//!
//! `Φ` sends `z_i ↦ τ_iσ_{i−1}/(σ_iτ_{i−1})` and `Q_i ↦ τ_{i−1}τ_{i+1}/τ_i²`.
//! Since `σ^m(τ_i) = det(Z·A^{1−m}P)^{[1,i]}` is exact, `Φ̃` is evaluated by
//! shifting every tau variant by one σ-power — never by applying a series
//! level `σ` to truncated data.

use std::collections::HashMap;
use std::sync::Mutex;


use num_bigint::BigInt;
use num_traits::One;

use crate::affine::{
    diag_unit_exponents, k_rectangle, nu, residue, residue_param_index, Partition,
};
use crate::demazure::DemazureCtx;
use crate::error::KError;
use crate::groth::{
    d_word_q, eta_specialize, perm_s_theta, GrothTable, SPoly,
};
use crate::ring::{det, Matrix};
use crate::rt::{RTPoly, RingCtx};
use crate::sym::{SeriesFrac, SymSeries};
use crate::toda::{p_inv_matrix, Centralizer};

pub struct PetersonCtx {
    pub rt: RingCtx,
    pub trunc: usize,
    pub dem: DemazureCtx,
    pub cent: Centralizer,
    pub groth: GrothTable,
    tau_pow: Mutex<HashMap<(i32, usize, u32), SymSeries>>,
}

/// Outcome of one verification case, with the first differing h-monomial as
/// a witness on failure.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub pass: bool,
    pub witness: Option<String>,
}

impl CheckOutcome {
    pub fn ok() -> Self {
        CheckOutcome {
            pass: true,
            witness: None,
        }
    }

    pub fn from_frac_eq(lhs: &SeriesFrac, rhs: &SeriesFrac) -> Self {
        match lhs.diff_witness(rhs) {
            None => CheckOutcome::ok(),
            Some((mono, a, b)) => CheckOutcome {
                pass: false,
                witness: Some(format!(
                    "first mismatch at h-monomial {:?}: lhs {} vs rhs {}",
                    mono.0, a, b
                )),
            },
        }
    }

    pub fn from_series_eq(lhs: &SymSeries, rhs: &SymSeries) -> Self {
        Self::from_frac_eq(
            &SeriesFrac::from_series(lhs.clone()),
            &SeriesFrac::from_series(rhs.clone()),
        )
    }
}

impl PetersonCtx {
    pub fn new(rt: RingCtx, trunc: usize) -> Result<Self, KError> {
        let dem = DemazureCtx::new(rt, trunc);
        let cent = Centralizer::build(&dem)?;
        let groth = GrothTable::new(rt.n);
        Ok(PetersonCtx {
            rt,
            trunc,
            dem,
            cent,
            groth,
            tau_pow: Mutex::new(HashMap::new()),
        })
    }

    fn n(&self) -> usize {
        self.rt.n
    }

    fn one_series(&self) -> SymSeries {
        SymSeries::one(self.rt, self.trunc)
    }

    fn tau_power(&self, variant: i32, i: usize, e: u32) -> SymSeries {
        if i == 0 || e == 0 {
            return self.one_series();
        }
        if let Some(hit) = self.tau_pow.lock().unwrap().get(&(variant, i, e)) {
            return hit.clone();
        }
        let val = if e == 1 {
            self.cent.tau_variant(variant, i)
        } else {
            self.tau_power(variant, i, e - 1)
                .mul(&self.cent.tau_variant(variant, i))
        };
        self.tau_pow
            .lock()
            .unwrap()
            .insert((variant, i, e), val.clone());
        val
    }

    /// Generator images as fractions: `Φ(z_i)`, `Φ(Q_i)` (`twist = 0`) or
    /// their `Φ̃` counterparts (`twist = 1`).
    pub fn phi_z(&self, twist: i32, i: usize) -> SeriesFrac {
        crate::toda::phi_z_image(&self.cent, twist, i)
    }

    pub fn phi_q(&self, twist: i32, i: usize) -> SeriesFrac {
        crate::toda::phi_q_image(&self.cent, twist, i)
    }

    /// Apply the substitution to a specialized polynomial. Each monomial
    /// `z^α Q^γ` becomes a Laurent monomial in the tau variants; the terms
    /// are assembled over the common denominator determined by minimal
    /// exponents.
    pub fn phi_apply(&self, f: &SPoly, twist: i32) -> SeriesFrac {
        let n = self.n();
        // exponent slots: (variant t or t+1) × (index 1..=n)
        let slot = |var_is_upper: bool, i: usize| -> usize {
            (if var_is_upper { n } else { 0 }) + (i - 1)
        };
        let nslots = 2 * n;
        let mut term_exps: Vec<(Vec<i32>, RTPoly)> = Vec::with_capacity(f.terms.len());
        for (m, coeff) in &f.terms {
            let mut e = vec![0i32; nslots];
            for (idx, &alpha) in m.z.iter().enumerate() {
                let i = idx + 1;
                let a = alpha as i32;
                // Φ(z_i) = T(t)_i·T(t+1)_{i−1} / (T(t+1)_i·T(t)_{i−1})
                e[slot(false, i)] += a;
                if i > 1 {
                    e[slot(true, i - 1)] += a;
                    e[slot(false, i - 1)] -= a;
                }
                e[slot(true, i)] -= a;
            }
            for (idx, &gamma) in m.q.iter().enumerate() {
                let i = idx + 1;
                let g = gamma as i32;
                // Φ(Q_i) = T(t)_{i−1}·T(t)_{i+1} / T(t)_i²
                if i > 1 {
                    e[slot(false, i - 1)] += g;
                }
                e[slot(false, i + 1)] += g;
                e[slot(false, i)] -= 2 * g;
            }
            term_exps.push((e, coeff.clone()));
        }
        let mut mins = vec![0i32; nslots];
        for (e, _) in &term_exps {
            for (m, &x) in mins.iter_mut().zip(e) {
                if x < *m {
                    *m = x;
                }
            }
        }
        let variant_of = |s: usize| -> (i32, usize) {
            if s < n {
                (twist, s + 1)
            } else {
                (twist + 1, s - n + 1)
            }
        };
        let mut num = SymSeries::zero(self.rt, self.trunc);
        for (e, coeff) in &term_exps {
            let mut prod = SymSeries::from_poly_const(self.rt, self.trunc, coeff.clone());
            for s in 0..nslots {
                let pow = (e[s] - mins[s]) as u32;
                if pow > 0 {
                    let (v, i) = variant_of(s);
                    prod = prod.mul(&self.tau_power(v, i, pow));
                }
            }
            num = num.add(&prod);
        }
        let mut den = self.one_series();
        for s in 0..nslots {
            let pow = (-mins[s]) as u32;
            if pow > 0 {
                let (v, i) = variant_of(s);
                den = den.mul(&self.tau_power(v, i, pow));
            }
        }
        SeriesFrac::new(num, den)
    }

    pub fn phi_tilde_apply(&self, f: &SPoly) -> SeriesFrac {
        self.phi_apply(f, 1)
    }

    // -- basic identity checks ------------------------------------------------

    /// `Φ(F_i(z,Q)) = e_i(e^{−a_1},…,e^{−a_n})` — the substitution kills the
    /// ideal.
    pub fn phi_kills_ideal(&self) -> CheckOutcome {
        let n = self.n();
        for i in 1..=n {
            let f = eta_specialize(self.rt, &crate::groth::f_full(n, i));
            let img = self.phi_apply(&f, 0);
            let expect = SeriesFrac::from_series(SymSeries::from_poly_const(
                self.rt,
                self.trunc,
                RTPoly::elementary_in_inverses(self.rt, i),
            ));
            let out = CheckOutcome::from_frac_eq(&img, &expect);
            if !out.pass {
                return out;
            }
        }
        CheckOutcome::ok()
    }

    /// Theorem 1.1 instance: `Φ̃_n(Q^ξ 𝔊_w) = g̃_{x^{ω_k}}(y|b)` for the
    /// Grassmannian element of `λ`.
    pub fn verify_main(&self, lambda: &Partition) -> Result<CheckOutcome, KError> {
        let x = self.dem.tables.lock().unwrap().element(lambda)?;
        let (w, xi) = x.translation_decompose();
        let coroot = crate::affine::coroot_coordinates(&xi);
        let w8: Vec<u8> = w.iter().map(|&v| v as u8).collect();
        let g = self.groth.groth(&w8);
        let spec = eta_specialize(self.rt, &g);
        let shifted = SPoly::q_monomial(self.rt, &coroot).mul(&spec);
        let lhs = self.phi_tilde_apply(&shifted);
        let conj = x.omega_k_conj();
        let mu = self.dem.tables.lock().unwrap().partition_of(&conj);
        let rhs = SeriesFrac::from_series(self.dem.g_tilde(&mu, 0)?);
        Ok(CheckOutcome::from_frac_eq(&lhs, &rhs))
    }

    /// The base case of the correspondence: `Φ̃_n(Q^{−θ∨}𝔊_{s_θ}) = g̃_{s_0}(y|b)`.
    pub fn base_case_check(&self) -> Result<CheckOutcome, KError> {
        let n = self.n();
        let g = self.groth.groth(&perm_s_theta(n));
        let spec = eta_specialize(self.rt, &g);
        let coroot = vec![-1i64; n - 1];
        let shifted = SPoly::q_monomial(self.rt, &coroot).mul(&spec);
        let lhs = self.phi_tilde_apply(&shifted);
        let rhs =
            SeriesFrac::from_series(self.dem.g_tilde(&Partition::new(vec![1]), 0)?);
        Ok(CheckOutcome::from_frac_eq(&lhs, &rhs))
    }

    // -- determinantal formulas -------------------------------------------------

    /// `ξ_λ(y) = ∏_{i=1}^{λ'_1} Ω(b_{res(i,1)}|y)`.
    pub fn xi_lambda(&self, lambda: &Partition) -> SymSeries {
        let n = self.n();
        let conj = lambda.conjugate();
        let mut acc = self.one_series();
        for i in 1..=conj.part(0) as usize {
            let r = residue_param_index(n, residue(n, i, 1));
            acc = acc.mul(&SymSeries::omega(self.rt, self.trunc, r as i64));
        }
        acc
    }

    fn w_lambda_rows(&self, lambda: &Partition, l: usize, r: usize) -> Matrix<SymSeries> {
        let n = self.n();
        let conj = lambda.conjugate();
        let size = n - l + 1 + r;
        let mut rows = Vec::with_capacity(r);
        for s in 1..=r {
            let mut row = vec![SymSeries::zero(self.rt, self.trunc); size];
            let col_len = conj.part(s - 1) as usize;
            for m in 0..=col_len {
                let col = n - l + s - m; // 1-based column position is this +1
                // entry (−1)^m f_m^{⟨m,s⟩;λ} = (−1)^m h_m(𝔡(m,s))
                let val = if m == 0 {
                    RTPoly::one(self.rt)
                } else {
                    let args: Vec<RTPoly> = (m..=col_len)
                        .map(|t| {
                            let idx = residue_param_index(n, residue(n, t, s));
                            RTPoly::e_pow(self.rt, idx as i64, -1)
                        })
                        .collect();
                    let h = RTPoly::h_of(self.rt, &args, m);
                    if m % 2 == 0 {
                        h
                    } else {
                        h.neg()
                    }
                };
                row[col] = SymSeries::from_poly_const(self.rt, self.trunc, val);
            }
            rows.push(row);
        }
        rows
    }

    /// The matrix `M_λ` of the determinantal formula for a k-small λ.
    pub fn m_lambda_matrix(&self, lambda: &Partition) -> Result<Matrix<SymSeries>, KError> {
        let n = self.n();
        if !lambda.is_k_small(n) || lambda.is_empty() {
            return Err(KError::NotKSmall);
        }
        let conj = lambda.conjugate();
        let l = n - conj.part(0) as usize + 1;
        let r = lambda.part(0) as usize;
        let mut m: Matrix<SymSeries> = Vec::new();
        for q in l..=n {
            let row: Vec<SymSeries> = (l..=(n + r))
                .map(|p| self.cent.z(q as i64, p as i64))
                .collect();
            m.push(row);
        }
        m.extend(self.w_lambda_rows(lambda, l, r));
        Ok(m)
    }

    /// `g̃_λ = det(M_λ)/ξ_λ` (k-small λ).
    pub fn det_m_lambda(&self, lambda: &Partition) -> Result<SymSeries, KError> {
        let m = self.m_lambda_matrix(lambda)?;
        let d = det(&m);
        let xi_inv = self.xi_lambda(lambda).invert()?;
        Ok(d.mul(&xi_inv))
    }

    /// The matrix `N_λ` (ZA-rows over the same bottom block) and the full
    /// right side of the determinantal formula for `g_λ`:
    /// `e(λ)·e^{Σ_i a_{res(i,1)}}·det(N_λ)/ξ_λ`.
    pub fn det_n_lambda(&self, lambda: &Partition) -> Result<SymSeries, KError> {
        let n = self.n();
        if !lambda.is_k_small(n) || lambda.is_empty() {
            return Err(KError::NotKSmall);
        }
        let conj = lambda.conjugate();
        let l = n - conj.part(0) as usize + 1;
        let r = lambda.part(0) as usize;
        let mut m: Matrix<SymSeries> = Vec::new();
        for q in l..=n {
            let row: Vec<SymSeries> = (l..=(n + r))
                .map(|p| {
                    // (ZA)_{qp} = e^{−a_p}·z_{qp} − z_{q,p−1}, indices mod n
                    let ep = RTPoly::e_pow(self.rt, p as i64, -1);
                    self.cent
                        .z(q as i64, p as i64)
                        .mul_poly(&ep)
                        .sub(&self.cent.z(q as i64, p as i64 - 1))
                })
                .collect();
            m.push(row);
        }
        m.extend(self.w_lambda_rows(lambda, l, r));
        let d = det(&m);
        let xi_inv = self.xi_lambda(lambda).invert()?;
        // prefactor e(λ)·e^{Σ_{i=1}^{λ'_1} a_{res(i,1)}}
        let mut exps = diag_unit_exponents(n, lambda);
        for i in 1..=conj.part(0) as usize {
            let idx = residue_param_index(n, residue(n, i, 1));
            exps[idx - 1] += 1;
        }
        let unit = RTPoly::monomial(self.rt, exps, BigInt::one());
        Ok(d.mul(&xi_inv).mul_poly(&unit))
    }

    /// Rectangle variant `M'_{(i^j)}` built from `Z`-rows and `P^{-1}`-rows,
    /// conjugated by `ω^{−j}`.
    pub fn det_m_prime_rect(&self, i: usize, j: usize) -> Result<SymSeries, KError> {
        let n = self.n();
        if i + j > n {
            return Err(KError::NotKSmall);
        }
        let pinv = p_inv_matrix(self.rt);
        let size = i + j;
        let mut m: Matrix<SymSeries> = Vec::new();
        for q in 1..=j {
            m.push(
                (1..=size)
                    .map(|p| self.cent.z(q as i64, p as i64))
                    .collect(),
            );
        }
        for q in (j + 1)..=size {
            m.push(
                (1..=size)
                    .map(|p| {
                        SymSeries::from_poly_const(self.rt, self.trunc, pinv[q - 1][p - 1].clone())
                    })
                    .collect(),
            );
        }
        let shifted: Matrix<SymSeries> = m
            .iter()
            .map(|row| row.iter().map(|e| e.param_shift(-(j as i64))).collect())
            .collect();
        let d = det(&shifted);
        let lam = Partition(vec![i as u8; j]);
        let xi_inv = self.xi_lambda(&lam).invert()?;
        Ok(d.mul(&xi_inv))
    }

    /// Rectangle corollary: `g̃_{R_i} = σ_{n−i}/ξ_{R_i}` and
    /// `g_{R_i} = e^{Σ_{s=0}^{n−i−1} a_{i−s}}·τ_{n−i}/ξ_{R_i}`.
    pub fn rect_tau_check(&self, i: usize) -> Result<CheckOutcome, KError> {
        let n = self.n();
        let rect = k_rectangle(n, i);
        let xi_inv = self.xi_lambda(&rect).invert()?;
        let lhs1 = self.dem.g_tilde(&rect, 0)?;
        let rhs1 = self.cent.sigma_minor(n - i).mul(&xi_inv);
        let out = CheckOutcome::from_series_eq(&lhs1, &rhs1);
        if !out.pass {
            return Ok(out);
        }
        let lhs2 = self.dem.g(&rect, 0)?;
        let mut exps = vec![0i32; n];
        for s in 0..=(n - i - 1) {
            let idx = self.rt.wrap_index(i as i64 - s as i64);
            exps[idx - 1] += 1;
        }
        let unit = RTPoly::monomial(self.rt, exps, BigInt::one());
        let rhs2 = self.cent.tau(n - i).mul(&xi_inv).mul_poly(&unit);
        Ok(CheckOutcome::from_series_eq(&lhs2, &rhs2))
    }

    // -- factorization theorems -------------------------------------------------

    /// k-rectangle factorization: `g̃_{λ∪R_i} = g̃_λ(y|ω^i b)·g̃_{R_i}(y|b)`.
    pub fn krect_factor_check(&self, lambda: &Partition, i: usize) -> Result<CheckOutcome, KError> {
        let n = self.n();
        let rect = k_rectangle(n, i);
        let union = lambda.union(&rect);
        let lhs = self.dem.g_tilde(&union, 0)?;
        let rhs = self
            .dem
            .g_tilde(lambda, i as i64)?
            .mul(&self.dem.g_tilde(&rect, 0)?);
        Ok(CheckOutcome::from_series_eq(&lhs, &rhs))
    }

    /// `Φ̃_n(ψ_i) = (∏_{l=1}^i Ω(b_{i+l+1}|y) / σ_i)·g̃_{(n−i−1)^i}(y|ω^{2i+1}b)`.
    pub fn psi_image_check(&self, i: usize) -> Result<CheckOutcome, KError> {
        let n = self.n();
        let psi = eta_specialize(self.rt, &crate::groth::psi(n, i));
        let lhs = self.phi_tilde_apply(&psi);
        let mut omegas = self.one_series();
        for l in 1..=i {
            let idx = self.rt.wrap_index((i + l + 1) as i64);
            omegas = omegas.mul(&SymSeries::omega(self.rt, self.trunc, idx as i64));
        }
        let part = if n - i - 1 == 0 {
            Partition::empty()
        } else {
            Partition(vec![(n - i - 1) as u8; i])
        };
        let gt = self.dem.g_tilde(&part, (2 * i + 1) as i64)?;
        let rhs = SeriesFrac::new(omegas.mul(&gt), self.cent.sigma_minor(i));
        Ok(CheckOutcome::from_frac_eq(&lhs, &rhs))
    }

    /// `Φ̃_n(𝔊_{w∘})` against the rectangle-product closed form, including the
    /// two parity closed forms of the Ω-prefactor.
    pub fn groth_image_check(&self) -> Result<CheckOutcome, KError> {
        let n = self.n();
        let g = eta_specialize(self.rt, &crate::groth::groth_longest(n));
        let lhs = self.phi_tilde_apply(&g);
        let mut omegas = self.one_series();
        for i in 1..=(n - 1) {
            for l in 1..=i {
                let idx = self.rt.wrap_index((i + l + 1) as i64);
                omegas = omegas.mul(&SymSeries::omega(self.rt, self.trunc, idx as i64));
            }
        }
        // parity closed form of the Ω-factor
        let mut closed = self.one_series();
        if n % 2 == 1 {
            let m = (n - 1) / 2;
            for i in 1..=n {
                closed = closed.mul(&SymSeries::omega(self.rt, self.trunc, i as i64).pow(m as u32));
            }
        } else {
            let m = n / 2;
            for i in 1..=m {
                closed = closed.mul(
                    &SymSeries::omega(self.rt, self.trunc, (2 * i - 1) as i64).pow(m as u32),
                );
                closed = closed.mul(
                    &SymSeries::omega(self.rt, self.trunc, (2 * i) as i64)
                        .pow((m - 1) as u32),
                );
            }
        }
        if omegas != closed {
            return Ok(CheckOutcome {
                pass: false,
                witness: Some("Ω-prefactor parity closed form mismatch".into()),
            });
        }
        let mut rect_prod = self.one_series();
        for i in 1..=(n - 2) {
            let part = Partition(vec![(n - i - 1) as u8; i]);
            rect_prod = rect_prod.mul(&self.dem.g_tilde(&part, (2 * i + 1) as i64)?);
        }
        let mut sigma_prod = self.one_series();
        for i in 1..=(n - 1) {
            sigma_prod = sigma_prod.mul(&self.cent.sigma_minor(i));
        }
        let rhs = SeriesFrac::new(omegas.mul(&rect_prod), sigma_prod);
        Ok(CheckOutcome::from_frac_eq(&lhs, &rhs))
    }

    /// Max-factorization of `g̃_{ν_n}` (Theorem 1.2), even and odd cases.
    pub fn max_factor_check(&self) -> Result<CheckOutcome, KError> {
        let n = self.n();
        let nu_n = nu(n);
        let lhs = SeriesFrac::from_series(self.dem.g_tilde(&nu_n, 0)?);
        if n % 2 == 1 {
            let mut prod = self.one_series();
            for i in 1..=(n - 2) {
                let part = Partition(vec![(n - i - 1) as u8; i]);
                prod = prod.mul(&self.dem.g_tilde(&part, (2 * i + 1) as i64)?);
            }
            Ok(CheckOutcome::from_frac_eq(
                &lhs,
                &SeriesFrac::from_series(prod),
            ))
        } else {
            let m = n / 2;
            let mut num = self.one_series();
            let mut den = self.one_series();
            let mut i = 0i64;
            while i <= ((m as i64 - 1) / 2) {
                let top = self.rt.wrap_index(m as i64 - 1 - 2 * i);
                let bot = self.rt.wrap_index(m as i64 + 2 - 2 * i);
                num = num.mul(&SymSeries::omega(self.rt, self.trunc, top as i64));
                den = den.mul(&SymSeries::omega(self.rt, self.trunc, bot as i64));
                i += 1;
            }
            let mut prod = self.one_series();
            for i in 1..=(n - 2) {
                let part = Partition(vec![(n - i - 1) as u8; i]);
                prod = prod.mul(&self.dem.g_tilde(&part, (m + 2 * i + 1) as i64)?);
            }
            let rhs = SeriesFrac::new(num.mul(&prod), den);
            Ok(CheckOutcome::from_frac_eq(&lhs, &rhs))
        }
    }

    // -- inverse-map fixtures ----------------------------------------------------

    /// The closed-form `Φ^{-1}` entries for n = 2, 3 substituted back through
    /// `Φ` must reproduce the `Z`-entries. The centralizer family is only
    /// defined up to the ℂ^×-scaling `Z ↦ cZ` (that quotient is what `𝒵`
    /// is), so the recovered matrix agrees with the β-normalized one up to a
    /// single global factor: the check compares entry cross-ratios, which
    /// pins every entry against the (1,1)-reference.
    pub fn phi_inverse_check(&self) -> Result<CheckOutcome, KError> {
        let n = self.n();
        let rt = self.rt;
        let einv = |i: i64| RTPoly::e_pow(rt, i, -1);
        let families: Vec<Vec<(SPoly, i64, i64)>> = match n {
            2 => {
                // 1/(z_1z_2Q_1) · [z_2 − e^{−a_1}, 1; 0, z_2 − e^{−a_2}]
                let scale = SPoly::z_pow(rt, 1, -1)
                    .mul(&SPoly::z_pow(rt, 2, -1))
                    .mul(&SPoly::q_monomial(rt, &[-1]));
                let z2 = SPoly::z(rt, 2);
                vec![vec![
                    (z2.sub(&SPoly::from_coeff(rt, einv(1))).mul(&scale), 1, 1),
                    (scale.clone(), 1, 2),
                    (z2.sub(&SPoly::from_coeff(rt, einv(2))).mul(&scale), 2, 2),
                ]]
            }
            3 => {
                let scale = SPoly::z_pow(rt, 1, -1)
                    .mul(&SPoly::z_pow(rt, 2, -1))
                    .mul(&SPoly::z_pow(rt, 3, -1))
                    .mul(&SPoly::q_monomial(rt, &[-1, -1]));
                let z2 = SPoly::z(rt, 2);
                let z3 = SPoly::z(rt, 3);
                let one_minus_q2 = SPoly::one(rt).sub(&SPoly::qvar(rt, 2));
                // z_11 = scale·(z_2z_3 − e^{−a_1}(z_2(1−Q_2)+z_3) + e^{−2a_1})
                let z11 = z2
                    .mul(&z3)
                    .sub(&z2.mul(&one_minus_q2).add(&z3).mul_coeff(&einv(1)))
                    .add(&SPoly::from_coeff(rt, RTPoly::e_pow(rt, 1, -2)))
                    .mul(&scale);
                // z_12 = scale·(z_2(1−Q_2)+z_3 − e^{−a_1} − e^{−a_2})
                let z12 = z2
                    .mul(&one_minus_q2)
                    .add(&z3)
                    .sub(&SPoly::from_coeff(rt, einv(1).add(&einv(2))))
                    .mul(&scale);
                let base = vec![(z11, 1i64, 1i64), (z12, 1, 2), (scale, 1, 3)];
                // the remaining entries come from z_{i+1,j+1} = ω(z_{ij}):
                // the ω-shift of the fixture family pairs with the shifted
                // entries (separate family: the global scalar shifts too).
                let shifted = base
                    .iter()
                    .map(|(f, i, j)| (f.map_coeffs(|c| c.param_shift(1)), i + 1, j + 1))
                    .collect();
                vec![base, shifted]
            }
            _ => {
                return Err(KError::Invalid(
                    "closed-form inverse fixtures exist for n = 2, 3 only".into(),
                ))
            }
        };
        for family in families {
            let mut reference: Option<(SeriesFrac, SymSeries)> = None;
            for (expr, i, j) in family {
                let img = self.phi_apply(&expr, 0);
                let z = self.cent.z(i, j);
                match reference.as_ref() {
                    None => reference = Some((img, z)),
                    Some((img0, z0)) => {
                        // img/z == img0/z0 ⟺ img·z0 == img0·z
                        let lhs = img.mul_series(z0);
                        let rhs = img0.mul_series(&z);
                        let out = CheckOutcome::from_frac_eq(&lhs, &rhs);
                        if !out.pass {
                            return Ok(out);
                        }
                    }
                }
            }
        }
        Ok(CheckOutcome::ok())
    }

    // -- intertwining and quantum-side consequences -------------------------------

    /// `Φ̃∘D_i^Q = D_{n−i}∘Φ̃` for `i ∈ I`, and `Φ̃∘D_0^Q = D_0∘Φ̃`.
    pub fn intertwine_check(&self, i: usize, f: &SPoly) -> Result<CheckOutcome, KError> {
        let n = self.n();
        let lhs = if i == 0 {
            let gst = eta_specialize(self.rt, &self.groth.groth(&perm_s_theta(n)));
            self.phi_tilde_apply(&f.d0_q(&gst))
        } else {
            self.phi_tilde_apply(&f.d_q(i))
        };
        let img = self.phi_tilde_apply(f);
        let rhs = if i == 0 {
            self.dem.d_frac(0, &img)
        } else {
            self.dem.d_frac(n - i, &img)
        };
        Ok(CheckOutcome::from_frac_eq(&lhs, &rhs))
    }

    /// The affine-node Demazure action on Schubert classes, through
    /// Peterson images:
    /// `D_0^Q(𝔊_w) ≡ Q^{−w^{-1}(θ∨)}𝔊_{s_θw}` if `s_θw > w`, else `𝔊_w`.
    pub fn left_dem_zero_check(&self, w: &[u8]) -> Result<CheckOutcome, KError> {
        let n = self.n();
        let gst = eta_specialize(self.rt, &self.groth.groth(&perm_s_theta(n)));
        let gw = eta_specialize(self.rt, &self.groth.groth(w));
        let lhs = self.phi_tilde_apply(&gw.d0_q(&gst));
        let stw: Vec<u8> = {
            let st = perm_s_theta(n);
            w.iter().map(|&v| st[v as usize - 1]).collect()
        };
        let rhs_poly = if crate::groth::perm_len(&stw) > crate::groth::perm_len(w) {
            // ξ = −w^{-1}(θ∨): θ∨ = ε_1 − ε_n, w^{-1}θ∨ has +1 at w^{-1}(1)
            // and −1 at w^{-1}(n)
            let winv = crate::groth::perm_inverse(w);
            let mut xi = vec![0i64; n];
            xi[winv[0] as usize - 1] -= 1;
            xi[winv[n - 1] as usize - 1] += 1;
            let coroot = crate::affine::coroot_coordinates(&xi);
            SPoly::q_monomial(self.rt, &coroot)
                .mul(&eta_specialize(self.rt, &self.groth.groth(&stw)))
        } else {
            gw
        };
        let rhs = self.phi_tilde_apply(&rhs_poly);
        Ok(CheckOutcome::from_frac_eq(&lhs, &rhs))
    }

    /// `D_x^Q(1) ≡ Q^ξ𝔊_w` through Peterson images: for the Grassmannian
    /// element of λ, `Φ̃(D_x^Q(1)) = g̃_{x^{ω_k}}`.
    pub fn quantum_d1_check(&self, lambda: &Partition) -> Result<CheckOutcome, KError> {
        let n = self.n();
        let word = self.dem.tables.lock().unwrap().word(lambda, false)?;
        let gst = eta_specialize(self.rt, &self.groth.groth(&perm_s_theta(n)));
        let dx1 = d_word_q(self.rt, &word, &gst);
        let lhs = self.phi_tilde_apply(&dx1);
        let conj = {
            let x = self.dem.tables.lock().unwrap().element(lambda)?;
            x.omega_k_conj()
        };
        let mu = self.dem.tables.lock().unwrap().partition_of(&conj);
        let rhs = SeriesFrac::from_series(self.dem.g_tilde(&mu, 0)?);
        Ok(CheckOutcome::from_frac_eq(&lhs, &rhs))
    }

    /// `ι(𝔊_w) ≡ 𝔊_{w*}` through Peterson images (the identity lives in the
    /// quotient ring, so it is checked after applying `Φ̃`, which kills the
    /// ideal; `ι∘Φ = Φ∘ι` reduces the left side to `Φ̃(ι(𝔊_w))`).
    pub fn star_check(&self, w: &[u8]) -> Result<CheckOutcome, KError> {
        let gw = eta_specialize(self.rt, &self.groth.groth(w));
        let lhs = self.phi_tilde_apply(&gw.iota());
        let star = crate::groth::perm_star(w);
        let gs = eta_specialize(self.rt, &self.groth.groth(&star));
        let rhs = self.phi_tilde_apply(&gs);
        Ok(CheckOutcome::from_frac_eq(&lhs, &rhs))
    }

    /// `(ι∘Φ)(F_m^{(i)})` equals the bordered c-coefficient
    /// determinant over `τ_{n−i}`, for `1 ≤ m ≤ i ≤ n−1`.
    pub fn sf_to_c_check(&self, i: usize, m: usize) -> Result<CheckOutcome, KError> {
        let n = self.n();
        assert!(m >= 1 && m <= i && i <= n - 1);
        // left side via ι∘Φ = Φ∘ι
        let f = eta_specialize(self.rt, &crate::groth::f_conserved(n, i, m));
        let lhs = self.phi_apply(&f.iota(), 0);
        // bordered determinant in the c^{(j)}
        let rows: Vec<Vec<SymSeries>> = (1..=(n - i)).map(|j| self.cent.c_coeffs(j)).collect();
        let size = n - i;
        let matrix: Matrix<SymSeries> = rows
            .iter()
            .map(|r| {
                let mut row: Vec<SymSeries> = Vec::with_capacity(size);
                for c in 0..size.saturating_sub(1) {
                    row.push(r[c].clone());
                }
                row.push(r[n - i + m - 1].clone());
                row
            })
            .collect();
        let d = det(&matrix);
        let signed = if m % 2 == 0 { d } else { d.neg() };
        let rhs = SeriesFrac::new(signed, self.cent.tau(n - i));
        Ok(CheckOutcome::from_frac_eq(&lhs, &rhs))
    }

    /// Conjugation of closed k-Schur functions under the involution, for
    /// k-small λ: `ι(g̃_λ(y|ω^i b)) = g̃_{λ^{ω_k}}(y|ω^{−i}b)`.
    /// The left side is computed exactly through the determinant route with
    /// `ι` applied entry-wise (`ι(Z)` has the matrix closed form), since `ι`
    /// cannot be applied to truncated series directly.
    pub fn iota_k_schur_check(&self, lambda: &Partition, shift: i64) -> Result<CheckOutcome, KError> {
        let n = self.n();
        if !lambda.is_k_small(n) || lambda.is_empty() {
            return Err(KError::NotKSmall);
        }
        let conj_part = lambda.conjugate();
        let l = n - conj_part.part(0) as usize + 1;
        let r = lambda.part(0) as usize;
        // ι of the Z-block: ι(z_{qp}) for extended p via ι∘ω^k = ω^{−k}∘ι on
        // the first-row entries.
        let iz = self.cent.iota_z()?;
        let iota_entry = |q: usize, p: usize| -> SymSeries {
            // reduce to first rows: z_{qp} = ω^{q−1}(z_{1,p−q+1})
            let d = p - q;
            let first = iz[0][d].clone();
            first.param_shift(-((q as i64) - 1))
        };
        let mut m: Matrix<SymSeries> = Vec::new();
        for q in l..=n {
            let row: Vec<SymSeries> = (l..=(n + r))
                .map(|p| {
                    if p < q || p - q >= n {
                        SymSeries::zero(self.rt, self.trunc)
                    } else {
                        iota_entry(q, p)
                    }
                })
                .collect();
            m.push(row);
        }
        for row in self.w_lambda_rows(lambda, l, r) {
            m.push(
                row.iter()
                    .map(|e| e.map_coeffs(|c| c.iota()))
                    .collect(),
            );
        }
        let d = det(&m);
        // ι(ξ_λ) = ∏ Ω(b_{n+1−res})^{-1}: move it across as a product.
        let mut omega_prod = self.one_series();
        for i in 1..=conj_part.part(0) as usize {
            let idx = residue_param_index(n, residue(n, i, 1));
            omega_prod = omega_prod.mul(&SymSeries::omega(
                self.rt,
                self.trunc,
                (n + 1 - idx) as i64,
            ));
        }
        let lhs = d.mul(&omega_prod).param_shift(-shift);
        let conj_elt = {
            let x = self.dem.tables.lock().unwrap().element(lambda)?;
            x.omega_k_conj()
        };
        let mu = self.dem.tables.lock().unwrap().partition_of(&conj_elt);
        let rhs = self.dem.g_tilde(&mu, -shift)?;
        Ok(CheckOutcome::from_series_eq(&lhs, &rhs))
    }

    /// Fixtures from the worked n = 6 example: residues, `ξ_λ`, `f`-entries
    /// and the diagonal prefactor.
    pub fn example_fixtures_check() -> CheckOutcome {
        let n = 6;
        let lam = Partition::new(vec![3, 3, 1]);
        // residues of the first column boxes pair with b_6, b_5, b_4
        let cols: Vec<usize> = (1..=3)
            .map(|i| residue_param_index(n, residue(n, i, 1)))
            .collect();
        if cols != vec![6, 5, 4] {
            return CheckOutcome {
                pass: false,
                witness: Some(format!("ξ_λ indices {cols:?}")),
            };
        }
        // f_m^{⟨2,1⟩} = h_m(e^{−a_5}, e^{−a_4})
        let d21: Vec<usize> = (2..=3)
            .map(|t| residue_param_index(n, residue(n, t, 1)))
            .collect();
        if d21 != vec![5, 4] {
            return CheckOutcome {
                pass: false,
                witness: Some(format!("𝔡(2,1) indices {d21:?}")),
            };
        }
        // e(λ) = e^{(a_3−a_4)+(a_2−a_6)}
        let exps = diag_unit_exponents(n, &lam);
        if exps != vec![0, 1, 1, -1, 0, -1] {
            return CheckOutcome {
                pass: false,
                witness: Some(format!("diagonal prefactor exponents {exps:?}")),
            };
        }
        CheckOutcome::ok()
    }
}

/// Truncation consistency: an object computed at a higher degree and
/// truncated must equal the direct lower-degree computation.
pub fn consistency_check(n: usize, d_hi: usize, d_lo: usize) -> Result<bool, KError> {
    let rt = RingCtx::sl(n);
    let hi = PetersonCtx::new(rt, d_hi)?;
    let lo = PetersonCtx::new(rt, d_lo)?;
    // g and g̃ across all partitions of size ≤ 4
    for lam in crate::affine::k_bounded_up_to(n - 1, 4) {
        if hi.dem.g_tilde(&lam, 0)?.truncate(d_lo) != lo.dem.g_tilde(&lam, 0)? {
            return Ok(false);
        }
        if hi.dem.g(&lam, 0)?.truncate(d_lo) != lo.dem.g(&lam, 0)? {
            return Ok(false);
        }
    }
    // tau variants
    for v in -1..=2 {
        for i in 0..=n {
            if hi.cent.tau_variant(v, i).truncate(d_lo) != lo.cent.tau_variant(v, i) {
                return Ok(false);
            }
        }
    }
    // Peterson images of the longest-element Grothendieck polynomial
    let g = eta_specialize(rt, &crate::groth::groth_longest(n));
    let hi_img = hi.phi_tilde_apply(&g);
    let lo_img = lo.phi_tilde_apply(&g);
    if hi_img.num.truncate(d_lo) != lo_img.num || hi_img.den.truncate(d_lo) != lo_img.den {
        return Ok(false);
    }
    // determinantal route
    for lam in crate::affine::k_bounded_up_to(n - 1, 3) {
        if lam.is_empty() || !lam.is_k_small(n) {
            continue;
        }
        if hi.det_m_lambda(&lam)?.truncate(d_lo) != lo.det_m_lambda(&lam)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::k_bounded_up_to;
    use crate::rt::Mode;

    fn ctx(n: usize, d: usize) -> PetersonCtx {
        PetersonCtx::new(RingCtx::new(n, Mode::Sl), d).unwrap()
    }

    #[test]
    fn phi_generator_shapes() {
        let p = ctx(2, 3);
        // Φ(Q_1) = τ_2/τ_1² with τ_0 = 1; Φ(z_1) = τ_1/σ_1
        let q1 = p.phi_q(0, 1);
        assert_eq!(q1.num, p.cent.tau(2));
        assert_eq!(q1.den, p.cent.tau(1).mul(&p.cent.tau(1)));
        let z1 = p.phi_z(0, 1);
        assert_eq!(z1.num, p.cent.tau(1));
        assert_eq!(z1.den, p.cent.sigma_minor(1));
    }

    #[test]
    fn phi_of_z_product_is_unit() {
        // Φ(z_1⋯z_n) = τ_n/σ_n = 1 in SL mode
        let p = ctx(3, 3);
        let mut zprod = SPoly::one(p.rt);
        for i in 1..=3 {
            zprod = zprod.mul(&SPoly::z(p.rt, i));
        }
        let img = p.phi_apply(&zprod, 0);
        let one = SeriesFrac::one(p.rt, 3);
        assert!(img == one, "Φ(z_1z_2z_3) = {img}");
    }

    #[test]
    fn phi_kills_the_ideal() {
        for n in [2usize, 3] {
            let p = ctx(n, 4);
            let out = p.phi_kills_ideal();
            assert!(out.pass, "n={n}: {:?}", out.witness);
        }
    }

    #[test]
    fn base_case_small() {
        for n in [2usize, 3] {
            let p = ctx(n, 4);
            let out = p.base_case_check().unwrap();
            assert!(out.pass, "n={n}: {:?}", out.witness);
        }
    }

    #[test]
    fn main_theorem_rank_two() {
        let p = ctx(2, 4);
        for lam in k_bounded_up_to(1, 3) {
            let out = p.verify_main(&lam).unwrap();
            assert!(out.pass, "λ={lam}: {:?}", out.witness);
        }
    }

    #[test]
    fn main_theorem_rank_three_spot() {
        let p = ctx(3, 3);
        for lam in [
            Partition::empty(),
            Partition::new(vec![1]),
            Partition::new(vec![2]),
            Partition::new(vec![1, 1]),
            Partition::new(vec![2, 1]),
        ] {
            let out = p.verify_main(&lam).unwrap();
            assert!(out.pass, "λ={lam}: {:?}", out.witness);
        }
    }

    #[test]
    fn determinant_formulas_small() {
        let p = ctx(3, 3);
        for lam in k_bounded_up_to(2, 4) {
            if lam.is_empty() || !lam.is_k_small(3) {
                continue;
            }
            let det_route = p.det_m_lambda(&lam).unwrap();
            let dem_route = p.dem.g_tilde(&lam, 0).unwrap();
            assert_eq!(det_route, dem_route, "g̃ det route λ={lam}");
            let det_g = p.det_n_lambda(&lam).unwrap();
            let dem_g = p.dem.g(&lam, 0).unwrap();
            assert_eq!(det_g, dem_g, "g det route λ={lam}");
        }
        for i in 1..=2 {
            let out = p.rect_tau_check(i).unwrap();
            assert!(out.pass, "rectangle i={i}: {:?}", out.witness);
        }
        // M' route for rectangles and the smallest box
        for (i, j) in [(1usize, 1usize), (1, 2), (2, 1)] {
            let lhs = p.det_m_prime_rect(i, j).unwrap();
            let rhs = p
                .dem
                .g_tilde(&Partition(vec![i as u8; j]), 0)
                .unwrap();
            assert_eq!(lhs, rhs, "M' rect ({i},{j})");
        }
    }

    #[test]
    fn krect_small() {
        let p = ctx(3, 3);
        for i in 1..=2usize {
            for lam in k_bounded_up_to(2, 2) {
                let out = p.krect_factor_check(&lam, i).unwrap();
                assert!(out.pass, "λ={lam} i={i}: {:?}", out.witness);
            }
        }
    }

    #[test]
    fn psi_and_groth_images() {
        let p = ctx(3, 3);
        for i in 1..=2 {
            let out = p.psi_image_check(i).unwrap();
            assert!(out.pass, "ψ_{i}: {:?}", out.witness);
        }
        let out = p.groth_image_check().unwrap();
        assert!(out.pass, "𝔊_{{w∘}} image: {:?}", out.witness);
    }

    #[test]
    fn max_factor_small() {
        let p = ctx(3, 4);
        let out = p.max_factor_check().unwrap();
        assert!(out.pass, "odd case: {:?}", out.witness);
        let p4 = ctx(4, 3);
        let out = p4.max_factor_check().unwrap();
        assert!(out.pass, "even case: {:?}", out.witness);
    }

    #[test]
    fn phi_inverse_fixtures() {
        for n in [2usize, 3] {
            let p = ctx(n, 4);
            let out = p.phi_inverse_check().unwrap();
            assert!(out.pass, "n={n}: {:?}", out.witness);
        }
    }

    #[test]
    fn intertwining() {
        let p = ctx(3, 3);
        let f = eta_specialize(p.rt, &p.groth.groth(&vec![2u8, 1, 3]));
        for i in 0..3 {
            let out = p.intertwine_check(i, &f).unwrap();
            assert!(out.pass, "i={i}: {:?}", out.witness);
        }
    }

    #[test]
    fn left_dem_and_quantum_d1() {
        let p = ctx(3, 3);
        for w in crate::groth::all_perms(3) {
            let out = p.left_dem_zero_check(&w).unwrap();
            assert!(out.pass, "w={w:?}: {:?}", out.witness);
        }
        for lam in [Partition::new(vec![1]), Partition::new(vec![2, 1])] {
            let out = p.quantum_d1_check(&lam).unwrap();
            assert!(out.pass, "λ={lam}: {:?}", out.witness);
        }
    }

    #[test]
    fn star_and_sf_to_c() {
        let p = ctx(3, 3);
        for w in crate::groth::all_perms(3) {
            let out = p.star_check(&w).unwrap();
            assert!(out.pass, "w={w:?}: {:?}", out.witness);
        }
        for i in 1..=2usize {
            for m in 1..=i {
                let out = p.sf_to_c_check(i, m).unwrap();
                assert!(out.pass, "(i,m)=({i},{m}): {:?}", out.witness);
            }
        }
    }

    #[test]
    fn iota_of_closed_k_schur() {
        // ι(g̃) via the entry-wise ι determinant route
        let p = ctx(3, 3);
        for lam in [
            Partition::new(vec![1]),
            Partition::new(vec![2]),
            Partition::new(vec![1, 1]),
        ] {
            for shift in [0i64, 1] {
                let out = p.iota_k_schur_check(&lam, shift).unwrap();
                assert!(out.pass, "λ={lam} shift={shift}: {:?}", out.witness);
            }
        }
        let p4 = ctx(4, 3);
        for lam in [Partition::new(vec![2, 1]), Partition::new(vec![3])] {
            let out = p4.iota_k_schur_check(&lam, 0).unwrap();
            assert!(out.pass, "n=4 λ={lam}: {:?}", out.witness);
        }
    }

    #[test]
    fn worked_example_fixtures() {
        let out = PetersonCtx::example_fixtures_check();
        assert!(out.pass, "{:?}", out.witness);
    }

    #[test]
    fn truncation_consistency_small() {
        assert!(consistency_check(3, 4, 2).unwrap());
    }
}
