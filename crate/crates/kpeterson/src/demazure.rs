//! The level-zero affine Demazure action on truncated symmetric series:
//! `s_0`, `T_i`, `D_i`, `T_θ`, `D_θ`, and the K-theoretic double k-Schur
//! functions `g_λ = T_x(1)`, `g̃_λ = D_x(1)`.
//!
//! `s_i` (1 ≤ i ≤ n−1) exchanges `a_i` and `a_{i+1}` in the coefficients;
//! `s_0(f) = (Ω(b_1|y)/Ω(b_n|y))·s_θ(f)` is the level-zero twist. Note that
//! `s_0` is *not* multiplicative; on fractions the twist is applied once to
//! the whole element.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::affine::{AffineTables, Partition};
use crate::error::KError;
use crate::rt::{RTPoly, RingCtx};
use crate::sym::{SeriesFrac, SymSeries};

pub struct DemazureCtx {
    pub rt: RingCtx,
    pub trunc: usize,
    /// Maximum word length for g/g̃ computations.
    pub budget: usize,
    pub tables: Mutex<AffineTables>,
    memo: Mutex<HashMap<(Vec<u8>, bool), SymSeries>>,
    omega1: SymSeries,
    omega1_inv: SymSeries,
    omega_ratio: SymSeries,
    /// `1 − e^{α_i}` for i = 1..n−1 at index i, and `1 − e^{α_0}` at index 0.
    alpha_div: Vec<RTPoly>,
}

impl DemazureCtx {
    pub fn new(rt: RingCtx, trunc: usize) -> Self {
        let n = rt.n;
        let omega1 = SymSeries::omega(rt, trunc, 1);
        let omega1_inv = SymSeries::omega_inv(rt, trunc, 1);
        let omega_n_inv = SymSeries::omega_inv(rt, trunc, n as i64);
        let omega_ratio = omega1.mul(&omega_n_inv);
        let mut alpha_div = Vec::with_capacity(n);
        // α_0 = −θ = a_n − a_1
        let mut exps0 = vec![0i32; n];
        exps0[n - 1] += 1;
        exps0[0] -= 1;
        alpha_div.push(
            RTPoly::one(rt).sub(&RTPoly::monomial(rt, exps0, num_bigint::BigInt::from(1))),
        );
        for i in 1..n {
            let mut exps = vec![0i32; n];
            exps[i - 1] += 1;
            exps[i] -= 1;
            alpha_div.push(
                RTPoly::one(rt).sub(&RTPoly::monomial(rt, exps, num_bigint::BigInt::from(1))),
            );
        }
        DemazureCtx {
            rt,
            trunc,
            budget: 64,
            tables: Mutex::new(AffineTables::new(n)),
            memo: Mutex::new(HashMap::new()),
            omega1,
            omega1_inv,
            omega_ratio,
            alpha_div,
        }
    }

    pub fn n(&self) -> usize {
        self.rt.n
    }

    pub fn one(&self) -> SymSeries {
        SymSeries::one(self.rt, self.trunc)
    }

    // -- simple reflections -------------------------------------------------

    pub fn s_finite(&self, i: usize, f: &SymSeries) -> SymSeries {
        debug_assert!(i >= 1 && i < self.n());
        f.coeff_swap(i, i + 1)
    }

    pub fn s_theta(&self, f: &SymSeries) -> SymSeries {
        f.coeff_swap(1, self.n())
    }

    /// `s_0(f) = (Ω(b_1|y)/Ω(b_n|y))·s_θ(f)`.
    pub fn s0(&self, f: &SymSeries) -> SymSeries {
        self.omega_ratio.mul(&self.s_theta(f))
    }

    // -- Demazure operators ---------------------------------------------------

    fn divide_coeffs(&self, f: &SymSeries, d: &RTPoly) -> SymSeries {
        f.map_coeffs(|c| c.div_poly(d))
    }

    /// `T_i` for `i ∈ {0, …, n−1}`; `i = 0` uses the conjugated form
    /// `Ω(b_1)·T_θ·Ω(b_1)^{-1}` (the production path).
    pub fn t(&self, i: usize, f: &SymSeries) -> SymSeries {
        if i == 0 {
            self.t0_conj(f)
        } else {
            let num = self.s_finite(i, f).sub(f);
            self.divide_coeffs(&num, &self.alpha_div[i])
        }
    }

    pub fn d(&self, i: usize, f: &SymSeries) -> SymSeries {
        self.t(i, f).add(f)
    }

    pub fn t_theta(&self, f: &SymSeries) -> SymSeries {
        let num = self.s_theta(f).sub(f);
        self.divide_coeffs(&num, &self.alpha_div[0])
    }

    pub fn d_theta(&self, f: &SymSeries) -> SymSeries {
        self.t_theta(f).add(f)
    }

    /// Direct formula `T_0 = (1−e^{α_0})^{-1}(s_0 − 1)`.
    pub fn t0_direct(&self, f: &SymSeries) -> SymSeries {
        let num = self.s0(f).sub(f);
        self.divide_coeffs(&num, &self.alpha_div[0])
    }

    /// `T_0 = Ω(b_1|y) ∘ T_θ ∘ Ω(b_1|y)^{-1}`.
    pub fn t0_conj(&self, f: &SymSeries) -> SymSeries {
        let inner = self.omega1_inv.mul(f);
        self.omega1.mul(&self.t_theta(&inner))
    }

    /// Apply `T_w` along a word (first letter outermost): operators act
    /// right-to-left.
    pub fn apply_word_t(&self, word: &[usize], start: &SymSeries) -> SymSeries {
        let mut f = start.clone();
        for &i in word.iter().rev() {
            f = self.t(i, &f);
        }
        f
    }

    pub fn apply_word_d(&self, word: &[usize], start: &SymSeries) -> SymSeries {
        let mut f = start.clone();
        for &i in word.iter().rev() {
            f = self.d(i, &f);
        }
        f
    }

    // -- k-Schur functions ----------------------------------------------------

    fn compute(&self, lambda: &Partition, closed: bool) -> Result<SymSeries, KError> {
        if let Some(hit) = self
            .memo
            .lock()
            .unwrap()
            .get(&(lambda.0.clone(), closed))
        {
            return Ok(hit.clone());
        }
        let word = {
            let mut t = self.tables.lock().unwrap();
            t.word(lambda, false)?
        };
        if word.len() > self.budget {
            return Err(KError::BudgetExceeded);
        }
        let val = if closed {
            self.apply_word_d(&word, &self.one())
        } else {
            self.apply_word_t(&word, &self.one())
        };
        self.memo
            .lock()
            .unwrap()
            .insert((lambda.0.clone(), closed), val.clone());
        Ok(val)
    }

    /// `g_λ(y|ω^j b) = T_x(1)` with the parameter shift applied afterwards.
    pub fn g(&self, lambda: &Partition, shift: i64) -> Result<SymSeries, KError> {
        Ok(self.compute(lambda, false)?.param_shift(shift))
    }

    /// `g̃_λ(y|ω^j b) = D_x(1)`.
    pub fn g_tilde(&self, lambda: &Partition, shift: i64) -> Result<SymSeries, KError> {
        Ok(self.compute(lambda, true)?.param_shift(shift))
    }

    /// `σ(g_λ)` computed exactly through the operator identity
    /// `σ∘T_0 = e^θ·D_0∘σ` (and `σ∘T_i = T_i∘σ` for i ≠ 0), avoiding any
    /// application of `σ` to truncated data.
    pub fn sigma_g(&self, lambda: &Partition) -> Result<SymSeries, KError> {
        let word = {
            let mut t = self.tables.lock().unwrap();
            t.word(lambda, false)?
        };
        if word.len() > self.budget {
            return Err(KError::BudgetExceeded);
        }
        let e_theta = self.e_theta();
        let mut f = self.one();
        for &i in word.iter().rev() {
            f = if i == 0 {
                self.d(0, &f).mul_poly(&e_theta)
            } else {
                self.t(i, &f)
            };
        }
        Ok(f)
    }

    /// `σ(g̃_λ)` through `σ∘D_0 = (1 + e^θ·D_0)∘σ`.
    pub fn sigma_g_tilde(&self, lambda: &Partition) -> Result<SymSeries, KError> {
        let word = {
            let mut t = self.tables.lock().unwrap();
            t.word(lambda, false)?
        };
        if word.len() > self.budget {
            return Err(KError::BudgetExceeded);
        }
        let e_theta = self.e_theta();
        let mut f = self.one();
        for &i in word.iter().rev() {
            f = if i == 0 {
                f.add(&self.d(0, &f).mul_poly(&e_theta))
            } else {
                self.d(i, &f)
            };
        }
        Ok(f)
    }

    pub fn e_theta(&self) -> RTPoly {
        let n = self.n();
        let mut exps = vec![0i32; n];
        exps[0] += 1;
        exps[n - 1] -= 1;
        RTPoly::monomial(self.rt, exps, num_bigint::BigInt::from(1))
    }

    // -- action on fractions --------------------------------------------------

    pub fn s_finite_frac(&self, i: usize, f: &SeriesFrac) -> SeriesFrac {
        SeriesFrac::new(
            f.num.coeff_swap(i, i + 1),
            f.den.coeff_swap(i, i + 1),
        )
    }

    pub fn s_theta_frac(&self, f: &SeriesFrac) -> SeriesFrac {
        SeriesFrac::new(
            f.num.coeff_swap(1, self.n()),
            f.den.coeff_swap(1, self.n()),
        )
    }

    /// The level-zero twist applies once to the whole fraction:
    /// `s_0(N/Δ) = R·s_θ(N)/s_θ(Δ)`.
    pub fn s0_frac(&self, f: &SeriesFrac) -> SeriesFrac {
        let st = self.s_theta_frac(f);
        SeriesFrac::new(self.omega_ratio.mul(&st.num), st.den)
    }

    pub fn t_frac(&self, i: usize, f: &SeriesFrac) -> SeriesFrac {
        let (sf, div) = if i == 0 {
            (self.s0_frac(f), &self.alpha_div[0])
        } else {
            (self.s_finite_frac(i, f), &self.alpha_div[i])
        };
        let diff = sf.sub(f);
        SeriesFrac::new(diff.num.map_coeffs(|c| c.div_poly(div)), diff.den)
    }

    pub fn d_frac(&self, i: usize, f: &SeriesFrac) -> SeriesFrac {
        self.t_frac(i, f).add(f)
    }

    pub fn t_theta_frac(&self, f: &SeriesFrac) -> SeriesFrac {
        let diff = self.s_theta_frac(f).sub(f);
        SeriesFrac::new(
            diff.num.map_coeffs(|c| c.div_poly(&self.alpha_div[0])),
            diff.den,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::k_bounded_up_to;
    use crate::rt::{Mode, RTFrac};
    use num_bigint::BigInt;

    fn dem(n: usize, d: usize) -> DemazureCtx {
        DemazureCtx::new(RingCtx::new(n, Mode::Sl), d)
    }

    fn random_series(rt: RingCtx, d: usize, seed: u64) -> SymSeries {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut s = SymSeries::zero(rt, d);
        let mut parts: Vec<Vec<u8>> = vec![vec![]];
        for a in 1..=d.min(3) as u8 {
            parts.push(vec![a]);
            for b in 1..=a {
                if (a + b) as usize <= d {
                    parts.push(vec![a, b]);
                }
            }
        }
        for p in parts {
            if rng.gen_bool(0.6) {
                let exps: Vec<i32> = (0..rt.n).map(|_| rng.gen_range(-1..=1)).collect();
                let c = RTPoly::monomial(rt, exps, BigInt::from(rng.gen_range(-2..=2i64)));
                s.insert_term(crate::sym::HMono(p), RTFrac::from_poly(c));
            }
        }
        s
    }

    #[test]
    fn t_kills_constants() {
        let ctx = dem(3, 3);
        for i in 1..3 {
            assert!(ctx.t(i, &ctx.one()).is_zero(), "T_{i}(1) = 0");
        }
        assert!(ctx.t_theta(&ctx.one()).is_zero(), "T_θ(1) = 0");
        // T_0(1) is NOT zero: the level-zero twist moves 1.
        assert!(!ctx.t(0, &ctx.one()).is_zero());
    }

    #[test]
    fn d0_of_one_rank_two() {
        // D₀(1) for n=2 to degree 1 → 1 + e^{−a₂}h₁
        let ctx = dem(2, 1);
        let got = ctx.d(0, &ctx.one());
        let mut expect = ctx.one();
        expect.insert_term(
            crate::sym::HMono(vec![1]),
            RTFrac::from_poly(RTPoly::e_pow(ctx.rt, 2, -1)),
        );
        assert_eq!(got, expect);
    }

    #[test]
    fn t0_routes_agree() {
        for n in [2usize, 3] {
            let ctx = dem(n, 3);
            for seed in 0..4 {
                let f = random_series(ctx.rt, 3, seed);
                let direct = ctx.t0_direct(&f);
                let conj = ctx.t0_conj(&f);
                assert_eq!(direct, conj, "n={n} seed={seed}");
                // second conjugated form Ω(b_n)^{-1}∘T_θ∘Ω(b_n)
                let omn = SymSeries::omega(ctx.rt, 3, n as i64);
                let omn_inv = SymSeries::omega_inv(ctx.rt, 3, n as i64);
                let alt = omn_inv.mul(&ctx.t_theta(&omn.mul(&f)));
                assert_eq!(direct, alt, "n={n} seed={seed} (Ω(b_n) form)");
            }
        }
    }

    #[test]
    fn s0_is_involutive() {
        let ctx = dem(3, 4);
        let h1 = SymSeries::h(ctx.rt, 4, 1);
        assert_eq!(ctx.s0(&ctx.s0(&h1)), h1);
        let f = random_series(ctx.rt, 4, 11);
        assert_eq!(ctx.s0(&ctx.s0(&f)), f);
    }

    #[test]
    fn lemma_t_and_d() {
        // T_i∘e^{−a_{i+1}} = e^{−a_i}∘D_i and T_θ∘e^{−a_1} = e^{−a_n}∘D_θ
        let ctx = dem(3, 3);
        for i in 1..3 {
            for seed in 0..3 {
                let f = random_series(ctx.rt, 3, 100 + seed);
                let lhs = ctx.t(i, &f.mul_poly(&RTPoly::e_pow(ctx.rt, i as i64 + 1, -1)));
                let rhs = ctx.d(i, &f).mul_poly(&RTPoly::e_pow(ctx.rt, i as i64, -1));
                assert_eq!(lhs, rhs, "i={i} seed={seed}");
            }
        }
        let f = random_series(ctx.rt, 3, 200);
        let lhs = ctx.t_theta(&f.mul_poly(&RTPoly::e_pow(ctx.rt, 1, -1)));
        let rhs = ctx.d_theta(&f).mul_poly(&RTPoly::e_pow(ctx.rt, 3, -1));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn lemma_t_on_h() {
        // D_θ h_m(e^{−a_1},…,e^{−a_j}) = h_m(e^{−a_n},e^{−a_1},…,e^{−a_j})
        let ctx = dem(4, 2);
        let einv = |i: i64| RTPoly::e_pow(ctx.rt, i, -1);
        for j in 1..=3usize {
            for m in 0..=3usize {
                let args: Vec<RTPoly> = (1..=j as i64).map(einv).collect();
                let mut args_ext = vec![einv(4)];
                args_ext.extend(args.clone());
                let lhs = ctx.d_theta(&SymSeries::from_poly_const(
                    ctx.rt,
                    2,
                    RTPoly::h_of(ctx.rt, &args, m),
                ));
                let rhs = SymSeries::from_poly_const(ctx.rt, 2, RTPoly::h_of(ctx.rt, &args_ext, m));
                assert_eq!(lhs, rhs, "D_θ h_{m} on j={j}");
            }
        }
        // D_i version: D_i h_m(e^{−a_{i+1}},…,e^{−a_j}) = h_m(e^{−a_i},…)
        for i in 1..=2i64 {
            for m in 1..=3usize {
                let args: Vec<RTPoly> = ((i + 1)..=3).map(einv).collect();
                let mut args_ext = vec![einv(i)];
                args_ext.extend(args.clone());
                let lhs = ctx.d(
                    i as usize,
                    &SymSeries::from_poly_const(ctx.rt, 2, RTPoly::h_of(ctx.rt, &args, m)),
                );
                let rhs = SymSeries::from_poly_const(ctx.rt, 2, RTPoly::h_of(ctx.rt, &args_ext, m));
                assert_eq!(lhs, rhs, "D_{i} h_{m}");
            }
        }
        // spec example: D_θ h₁(e^{−a₁}) = e^{−a₄} + e^{−a₁} at n=4
        let lhs = ctx.d_theta(&SymSeries::from_poly_const(ctx.rt, 2, einv(1)));
        let rhs = SymSeries::from_poly_const(ctx.rt, 2, einv(4).add(&einv(1)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn idempotents_and_braid() {
        let ctx = dem(3, 3);
        for seed in 0..3 {
            let f = random_series(ctx.rt, 3, 300 + seed);
            for i in 0..3 {
                let t2 = ctx.t(i, &ctx.t(i, &f));
                assert_eq!(t2, ctx.t(i, &f).neg(), "T_{i}² = −T_{i}");
                let d2 = ctx.d(i, &ctx.d(i, &f));
                assert_eq!(d2, ctx.d(i, &f), "D_{i}² = D_{i}");
            }
            // all pairs adjacent for n=3 (affine A_2)
            for (i, j) in [(0usize, 1usize), (1, 2), (0, 2)] {
                let lhs = ctx.d(i, &ctx.d(j, &ctx.d(i, &f)));
                let rhs = ctx.d(j, &ctx.d(i, &ctx.d(j, &f)));
                assert_eq!(lhs, rhs, "braid {i}{j}");
            }
        }
        // commuting pair at n=4
        let ctx4 = dem(4, 2);
        let f = random_series(ctx4.rt, 2, 17);
        assert_eq!(
            ctx4.d(1, &ctx4.d(3, &f)),
            ctx4.d(3, &ctx4.d(1, &f)),
            "distant nodes commute"
        );
    }

    #[test]
    fn g_basics_and_path_independence() {
        let ctx = dem(3, 4);
        assert_eq!(ctx.g(&Partition::empty(), 0).unwrap(), ctx.one());
        assert_eq!(ctx.g_tilde(&Partition::empty(), 0).unwrap(), ctx.one());
        // two greedy peeling orders give the same series
        let mut tables = AffineTables::new(3);
        for lam in k_bounded_up_to(2, 4) {
            let w1 = tables.word(&lam, false).unwrap();
            let w2 = tables.word(&lam, true).unwrap();
            let a = ctx.apply_word_d(&w1, &ctx.one());
            let b = ctx.apply_word_d(&w2, &ctx.one());
            assert_eq!(a, b, "λ={lam} words {w1:?} vs {w2:?}");
        }
    }

    #[test]
    fn closed_sum_identity() {
        // g̃_x = Σ_{z≤x} g_z for n=3, ℓ(x) ≤ 4
        let ctx = dem(3, 4);
        let mut tables = AffineTables::new(3);
        for lam in k_bounded_up_to(2, 4) {
            let x = tables.element(&lam).unwrap();
            let lower = crate::affine::bruhat_lower_set(&x, 16).unwrap();
            let mut sum = SymSeries::zero(ctx.rt, 4);
            for z in &lower {
                sum = sum.add(&ctx.g(z, 0).unwrap());
            }
            assert_eq!(ctx.g_tilde(&lam, 0).unwrap(), sum, "λ={lam}");
        }
    }

    #[test]
    fn sigma_g_prefactor_for_k_small() {
        // σ(g_λ) = e(λ)·g̃_λ for k-small λ
        for n in [3usize, 4] {
            let ctx = dem(n, 4);
            for lam in k_bounded_up_to(n - 1, 4) {
                if !lam.is_k_small(n) || lam.is_empty() {
                    continue;
                }
                let lhs = ctx.sigma_g(&lam).unwrap();
                let exps = crate::affine::diag_unit_exponents(n, &lam);
                let unit = RTPoly::monomial(ctx.rt, exps, BigInt::from(1));
                let rhs = ctx.g_tilde(&lam, 0).unwrap().mul_poly(&unit);
                assert_eq!(lhs, rhs, "n={n} λ={lam}");
            }
        }
    }

    #[test]
    fn sigma_g_non_k_small_counterexample() {
        // n=3, λ=(2,1) is not 2-small:
        // σ(g_{(2,1)}) = g̃_{(2)} + e^{a_3−a_2}·g̃_{(2,1)}, not a single
        // prefactor times g̃_{(2,1)}.
        let ctx = dem(3, 4);
        let lam = Partition::new(vec![2, 1]);
        let lhs = ctx.sigma_g(&lam).unwrap();
        let mut exps = vec![0i32; 3];
        exps[2] += 1;
        exps[1] -= 1;
        let twist = RTPoly::monomial(ctx.rt, exps, BigInt::from(1));
        let rhs = ctx
            .g_tilde(&Partition::new(vec![2]), 0)
            .unwrap()
            .add(&ctx.g_tilde(&lam, 0).unwrap().mul_poly(&twist));
        assert_eq!(lhs, rhs);
        // and the k-small formula genuinely fails here
        let exps = crate::affine::diag_unit_exponents(3, &lam);
        let unit = RTPoly::monomial(ctx.rt, exps, BigInt::from(1));
        assert_ne!(lhs, ctx.g_tilde(&lam, 0).unwrap().mul_poly(&unit));
    }

    #[test]
    fn iota_intertwines_finite_nodes() {
        // ι∘T_i = T_{n−i}∘ι on finite inputs
        let ctx = dem(4, 3);
        for i in 1..4usize {
            for seed in 0..3 {
                let f = random_series(ctx.rt, 3, 400 + seed);
                let lhs = ctx.t(i, &f).iota_poly();
                let rhs = ctx.t(4 - i, &f.iota_poly());
                assert_eq!(lhs, rhs, "i={i} seed={seed}");
            }
        }
    }

    #[test]
    fn memo_cache_transparency() {
        // cached values equal freshly computed values
        let ctx = dem(3, 3);
        let lam = Partition::new(vec![2, 1]);
        let first = ctx.g_tilde(&lam, 0).unwrap();
        let again = ctx.g_tilde(&lam, 0).unwrap();
        assert_eq!(first, again);
        let fresh = dem(3, 3).g_tilde(&lam, 0).unwrap();
        assert_eq!(first, fresh);
        // shifts are applied on retrieval, not baked into the cache
        let shifted = ctx.g_tilde(&lam, 1).unwrap();
        assert_eq!(shifted, fresh.param_shift(1));
    }

    #[test]
    fn budget_guard() {
        let mut ctx = dem(2, 2);
        ctx.budget = 2;
        let lam = Partition::new(vec![1, 1, 1]);
        assert_eq!(ctx.g_tilde(&lam, 0), Err(KError::BudgetExceeded));
    }
}
