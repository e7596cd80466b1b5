//! Verification suites: named cases over a shared read-only context, a
//! seeded work-queue runner, and machine-readable reports.
//!
//! Case order is shuffled under the seed (scheduling) while the report is
//! sorted by case key (presentation), so identical configurations produce
//! byte-identical reports regardless of the job count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::affine::{k_bounded_up_to, Partition};
use crate::config::RunConfig;
use crate::error::KError;
use crate::groth::{all_perms, eta_specialize};
use crate::peterson::{consistency_check, CheckOutcome, PetersonCtx};
use crate::rt::RingCtx;
use crate::sym::SymSeries;
use crate::toda::{closed_f_check, dtoda_conserves_f, psi_det_check};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseResult {
    pub case: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: RunConfig,
    pub cases: Vec<CaseResult>,
    pub all_pass: bool,
    /// Nonzero when a case hit a budget/bound guard rather than a failure.
    pub budget_exhausted: bool,
}

impl SuiteReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!(self)
    }

    pub fn print_lines(&self) {
        for c in &self.cases {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Error => "ERROR",
            };
            match &c.witness {
                Some(w) => println!("[{tag}] {} — {w}", c.case),
                None => println!("[{tag}] {}", c.case),
            }
        }
        println!(
            "suite {}: {}/{} cases pass",
            self.suite,
            self.cases
                .iter()
                .filter(|c| c.status == Status::Pass)
                .count(),
            self.cases.len()
        );
    }
}

type CaseFn<'a> = Box<dyn Fn() -> Result<CheckOutcome, KError> + Send + Sync + 'a>;

pub struct Suite<'a> {
    pub name: String,
    cases: Vec<(String, CaseFn<'a>)>,
}

impl<'a> Suite<'a> {
    pub fn new(name: &str) -> Self {
        Suite {
            name: name.to_string(),
            cases: Vec::new(),
        }
    }

    pub fn case(
        &mut self,
        key: String,
        f: impl Fn() -> Result<CheckOutcome, KError> + Send + Sync + 'a,
    ) {
        self.cases.push((key, Box::new(f)));
    }

    /// Run all cases with `jobs`-way parallelism; deterministic report order.
    pub fn run(self, config: &RunConfig) -> SuiteReport {
        let mut order: Vec<usize> = (0..self.cases.len()).collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
        order.shuffle(&mut rng);
        let results: Mutex<Vec<Option<CaseResult>>> =
            Mutex::new(vec![None; self.cases.len()]);
        let next = AtomicUsize::new(0);
        let jobs = config.jobs.max(1);
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(|| loop {
                    let t = next.fetch_add(1, Ordering::SeqCst);
                    if t >= order.len() {
                        break;
                    }
                    let idx = order[t];
                    let (key, f) = &self.cases[idx];
                    let result = match f() {
                        Ok(out) => CaseResult {
                            case: key.clone(),
                            status: if out.pass { Status::Pass } else { Status::Fail },
                            witness: out.witness,
                        },
                        Err(e) => CaseResult {
                            case: key.clone(),
                            status: Status::Error,
                            witness: Some(e.to_string()),
                        },
                    };
                    results.lock().unwrap()[idx] = Some(result);
                });
            }
        });
        let mut cases: Vec<CaseResult> = results
            .into_inner()
            .unwrap()
            .into_iter()
            .map(|c| c.expect("all cases ran"))
            .collect();
        cases.sort_by(|a, b| a.case.cmp(&b.case));
        let all_pass = cases.iter().all(|c| c.status == Status::Pass);
        let budget_exhausted = cases.iter().any(|c| {
            c.status == Status::Error
                && c.witness
                    .as_deref()
                    .map(|w| w.contains("budget") || w.contains("bound"))
                    .unwrap_or(false)
        });
        SuiteReport {
            suite: self.name,
            config: config.clone(),
            cases,
            all_pass,
            budget_exhausted,
        }
    }
}

fn seeded_series(rt: RingCtx, d: usize, seed: u64) -> SymSeries {
    use num_bigint::BigInt;
    use rand::Rng;
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
            let c = crate::rt::RTPoly::monomial(rt, exps, BigInt::from(rng.gen_range(-2..=2i64)));
            s.insert_term(
                crate::sym::HMono(p),
                crate::rt::RTFrac::from_poly(c),
            );
        }
    }
    s
}

/// Theorem 1.1 instances for every Grassmannian element up to the length
/// bound, plus the base case behind the correspondence.
pub fn suite_main<'a>(ctx: &'a PetersonCtx, config: &RunConfig) -> Suite<'a> {
    let mut suite = Suite::new("main");
    let n = config.n;
    for lam in k_bounded_up_to(n - 1, config.max_length) {
        let lam2 = lam.clone();
        suite.case(format!("main/n{}/lambda{}", n, lam), move || {
            ctx.verify_main(&lam2)
        });
    }
    suite.case(format!("main/n{}/base-case", n), move || ctx.base_case_check());
    suite.case(format!("main/n{}/phi-kills-ideal", n), move || {
        Ok(ctx.phi_kills_ideal())
    });
    suite
}

/// Determinantal formulas for every k-small partition, the rectangle
/// corollaries, and the M' variant.
pub fn suite_det<'a>(ctx: &'a PetersonCtx, config: &RunConfig) -> Suite<'a> {
    let mut suite = Suite::new("det");
    let n = config.n;
    for lam in k_bounded_up_to(n - 1, n) {
        if lam.is_empty() || !lam.is_k_small(n) {
            continue;
        }
        let l1 = lam.clone();
        suite.case(format!("det/n{}/gtilde{}", n, lam), move || {
            let det_route = ctx.det_m_lambda(&l1)?;
            let dem_route = ctx.dem.g_tilde(&l1, 0)?;
            Ok(CheckOutcome::from_series_eq(&det_route, &dem_route))
        });
        let l2 = lam.clone();
        suite.case(format!("det/n{}/g{}", n, lam), move || {
            let det_route = ctx.det_n_lambda(&l2)?;
            let dem_route = ctx.dem.g(&l2, 0)?;
            Ok(CheckOutcome::from_series_eq(&det_route, &dem_route))
        });
    }
    for i in 1..n {
        suite.case(format!("det/n{}/rectangle-tau-{}", n, i), move || {
            ctx.rect_tau_check(i)
        });
    }
    for lam in k_bounded_up_to(n - 1, n) {
        if lam.is_empty() || !lam.is_k_small(n) {
            continue;
        }
        let l = lam.clone();
        suite.case(format!("det/n{}/iota-k-schur{}", n, lam), move || {
            ctx.iota_k_schur_check(&l, 0)
        });
    }
    for i in 1..n {
        for j in 1..n {
            if i + j > n {
                continue;
            }
            suite.case(format!("det/n{}/m-prime-{}x{}", n, i, j), move || {
                let lhs = ctx.det_m_prime_rect(i, j)?;
                let rhs = ctx.dem.g_tilde(&Partition(vec![i as u8; j]), 0)?;
                Ok(CheckOutcome::from_series_eq(&lhs, &rhs))
            });
        }
    }
    suite
}

/// k-rectangle factorization over all small λ and every rectangle.
pub fn suite_krect<'a>(ctx: &'a PetersonCtx, config: &RunConfig) -> Suite<'a> {
    let mut suite = Suite::new("krect");
    let n = config.n;
    let bound = config.max_length.min(3);
    for i in 1..n {
        for lam in k_bounded_up_to(n - 1, bound) {
            let l = lam.clone();
            suite.case(format!("krect/n{}/lambda{}/R{}", n, lam, i), move || {
                ctx.krect_factor_check(&l, i)
            });
        }
    }
    suite
}

/// Maximal k-irreducible factorization and the ψ/𝔊-image formulas behind it.
pub fn suite_maxfactor<'a>(ctx: &'a PetersonCtx, config: &RunConfig) -> Suite<'a> {
    let mut suite = Suite::new("maxfactor");
    let n = config.n;
    suite.case(format!("maxfactor/n{}/nu", n), move || ctx.max_factor_check());
    for i in 1..n {
        suite.case(format!("maxfactor/n{}/psi-image-{}", n, i), move || {
            ctx.psi_image_check(i)
        });
    }
    suite.case(format!("maxfactor/n{}/groth-image", n), move || {
        ctx.groth_image_check()
    });
    suite
}

/// Toda-lattice identities: closed conserved quantities, discrete-time
/// conservation, Hirota bilinear form, c-determinants, σ/ι structure.
pub fn suite_toda<'a>(ctx: &'a PetersonCtx, config: &RunConfig) -> Suite<'a> {
    let mut suite = Suite::new("toda");
    let n = config.n;
    suite.case(format!("toda/n{}/closed-f", n), move || {
        Ok(CheckOutcome {
            pass: closed_f_check(n),
            witness: None,
        })
    });
    suite.case(format!("toda/n{}/psi-det", n), move || {
        Ok(CheckOutcome {
            pass: psi_det_check(n),
            witness: None,
        })
    });
    suite.case(format!("toda/n{}/dtoda-conserves-f", n), move || {
        Ok(CheckOutcome {
            pass: dtoda_conserves_f(n)?,
            witness: None,
        })
    });
    for i in 1..n {
        suite.case(format!("toda/n{}/hirota-{}", n, i), move || {
            Ok(CheckOutcome {
                pass: ctx.cent.hirota_check(i),
                witness: None,
            })
        });
    }
    for i in 0..=n {
        suite.case(format!("toda/n{}/det-c-{}", n, i), move || {
            Ok(CheckOutcome {
                pass: ctx.cent.det_c_identity_check(i),
                witness: None,
            })
        });
    }
    suite.case(format!("toda/n{}/sigma-on-z", n), move || {
        Ok(CheckOutcome {
            pass: ctx.cent.sigma_on_z_check(),
            witness: None,
        })
    });
    suite.case(format!("toda/n{}/iota-tau", n), move || {
        Ok(CheckOutcome {
            pass: ctx.cent.iota_tau_check()?,
            witness: None,
        })
    });
    suite.case(format!("toda/n{}/sn-invariance", n), move || {
        Ok(CheckOutcome {
            pass: ctx.cent.invariance_check(),
            witness: None,
        })
    });
    suite
}

/// Grothendieck-layer properties: recursion path independence, the star
/// involution, dominant closed forms, the intertwining with the affine side
/// and the quantum Demazure consequences.
pub fn suite_groth_props<'a>(ctx: &'a PetersonCtx, config: &RunConfig) -> Suite<'a> {
    let mut suite = Suite::new("groth-props");
    let n = config.n;
    suite.case(format!("groth/n{}/path-independence", n), move || {
        let table = &ctx.groth;
        for w in all_perms(n) {
            let g = table.groth(&w);
            for i in 1..n {
                if crate::groth::perm_has_left_ascent(i, &w) {
                    let via =
                        crate::groth::d_q(n, i, &table.groth(&crate::groth::perm_left_mul(i, &w)))?;
                    if via != g {
                        return Ok(CheckOutcome {
                            pass: false,
                            witness: Some(format!("w={w:?} via node {i}")),
                        });
                    }
                }
            }
        }
        Ok(CheckOutcome::ok())
    });
    for w in all_perms(n) {
        let w1 = w.clone();
        suite.case(format!("groth/n{}/star-{:?}", n, w), move || {
            ctx.star_check(&w1)
        });
        let w2 = w.clone();
        suite.case(format!("groth/n{}/left-dem-zero-{:?}", n, w), move || {
            ctx.left_dem_zero_check(&w2)
        });
    }
    suite.case(format!("groth/n{}/gtheta-product", n), move || {
        let table = &ctx.groth;
        let lhs = table.groth(&crate::groth::perm_s_theta(n));
        let mut w1: Vec<u8> = (2..=n as u8).collect();
        w1.push(1);
        let mut w2 = crate::groth::perm_identity(n);
        for i in 1..=(n - 2) {
            w2 = crate::groth::perm_left_mul(i, &w2);
        }
        let rhs = table.groth(&w1).mul(&table.groth(&w2).omega_eta());
        Ok(CheckOutcome {
            pass: lhs == rhs,
            witness: None,
        })
    });
    suite.case(format!("groth/n{}/phi-n-minus-1", n), move || {
        let mut w: Vec<u8> = (2..=n as u8).collect();
        w.push(1);
        let got = ctx.groth.groth(&w);
        let base = crate::groth::QPoly::one(n).sub(&crate::groth::QPoly::eta(n, 1));
        let mut expect = crate::groth::QPoly::zero(n);
        for j in 0..=(n - 1) {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            expect = expect.add(
                &crate::groth::QPoly::int(n, sign)
                    .mul(&base.pow(j as u32))
                    .mul(&crate::groth::f_conserved(n, n - 1, j)),
            );
        }
        Ok(CheckOutcome {
            pass: got == expect,
            witness: None,
        })
    });
    for i in 0..n {
        suite.case(format!("groth/n{}/intertwine-{}", n, i), move || {
            let f = eta_specialize(
                ctx.rt,
                &ctx.groth.groth(&crate::groth::perm_s_theta(n)),
            );
            ctx.intertwine_check(i, &f)
        });
    }
    for lam in k_bounded_up_to(n - 1, config.max_length.min(3)) {
        let l = lam.clone();
        suite.case(format!("groth/n{}/quantum-d1-{}", n, lam), move || {
            ctx.quantum_d1_check(&l)
        });
    }
    for i in 1..n {
        for m in 1..=i {
            suite.case(format!("groth/n{}/sf-to-c-{}-{}", n, i, m), move || {
                ctx.sf_to_c_check(i, m)
            });
        }
    }
    suite
}

/// Operator-algebra properties on seeded random inputs plus the closed-sum
/// identity.
pub fn suite_ops<'a>(ctx: &'a PetersonCtx, config: &RunConfig) -> Suite<'a> {
    let mut suite = Suite::new("ops");
    let n = config.n;
    let d = config.deg;
    let samples = 20usize;
    for i in 0..n {
        let seed_base = config.seed;
        suite.case(format!("ops/n{}/idempotent-{}", n, i), move || {
            for s in 0..samples {
                let f = seeded_series(ctx.rt, d, seed_base ^ (s as u64) << 8 ^ i as u64);
                let tf = ctx.dem.t(i, &f);
                if ctx.dem.t(i, &tf) != tf.neg() {
                    return Ok(CheckOutcome {
                        pass: false,
                        witness: Some(format!("T_{i}² ≠ −T_{i} at sample {s}")),
                    });
                }
                let df = ctx.dem.d(i, &f);
                if ctx.dem.d(i, &df) != df {
                    return Ok(CheckOutcome {
                        pass: false,
                        witness: Some(format!("D_{i}² ≠ D_{i} at sample {s}")),
                    });
                }
            }
            Ok(CheckOutcome::ok())
        });
    }
    for i in 0..n {
        for j in 0..n {
            if i >= j {
                continue;
            }
            let seed_base = config.seed;
            let adjacent = (j == i + 1) || (i == 0 && j == n - 1) || n <= 3;
            suite.case(format!("ops/n{}/braid-{}-{}", n, i, j), move || {
                for s in 0..samples.min(8) {
                    let f = seeded_series(ctx.rt, d, seed_base ^ 0xb1a1d ^ ((s * 31 + i * 7 + j) as u64));
                    let (lhs, rhs) = if adjacent {
                        (
                            ctx.dem.d(i, &ctx.dem.d(j, &ctx.dem.d(i, &f))),
                            ctx.dem.d(j, &ctx.dem.d(i, &ctx.dem.d(j, &f))),
                        )
                    } else {
                        (
                            ctx.dem.d(i, &ctx.dem.d(j, &f)),
                            ctx.dem.d(j, &ctx.dem.d(i, &f)),
                        )
                    };
                    if lhs != rhs {
                        return Ok(CheckOutcome {
                            pass: false,
                            witness: Some(format!("braid ({i},{j}) fails at sample {s}")),
                        });
                    }
                }
                Ok(CheckOutcome::ok())
            });
        }
    }
    for lam in k_bounded_up_to(n - 1, config.max_length) {
        let l = lam.clone();
        suite.case(format!("ops/n{}/closed-sum-{}", n, lam), move || {
            let x = ctx.dem.tables.lock().unwrap().element(&l)?;
            let lower = crate::affine::bruhat_lower_set(&x, 20)?;
            let mut sum = SymSeries::zero(ctx.rt, ctx.trunc);
            for z in &lower {
                sum = sum.add(&ctx.dem.g(z, 0)?);
            }
            Ok(CheckOutcome::from_series_eq(
                &ctx.dem.g_tilde(&l, 0)?,
                &sum,
            ))
        });
    }
    // polynomiality of g̃-coefficients (reported, per the theory's claim)
    for lam in k_bounded_up_to(n - 1, config.max_length.min(3)) {
        let l = lam.clone();
        suite.case(format!("ops/n{}/unit-denominators-{}", n, lam), move || {
            let g = ctx.dem.g_tilde(&l, 0)?;
            Ok(CheckOutcome {
                pass: g.coeffs_have_unit_denominators(),
                witness: None,
            })
        });
    }
    suite
}

/// Reference fixtures: the closed-form inverse entries and the worked n = 6
/// residue example.
pub fn suite_fixtures<'a>(
    ctx2: &'a PetersonCtx,
    ctx3: &'a PetersonCtx,
) -> Suite<'a> {
    let mut suite = Suite::new("fixtures");
    suite.case("fixtures/z2-inverse-n2".into(), move || {
        ctx2.phi_inverse_check()
    });
    suite.case("fixtures/z-inverse-n3".into(), move || {
        ctx3.phi_inverse_check()
    });
    suite.case("fixtures/residue-example-n6".into(), || {
        Ok(PetersonCtx::example_fixtures_check())
    });
    suite.case("fixtures/sigma-g-prefactor-n3".into(), move || {
        // σ(g_λ) = e(λ)·g̃_λ at a k-small fixture
        let lam = Partition::new(vec![1, 1]);
        let lhs = ctx3.dem.sigma_g(&lam)?;
        let exps = crate::affine::diag_unit_exponents(3, &lam);
        let unit = crate::rt::RTPoly::monomial(ctx3.rt, exps, num_bigint::BigInt::from(1));
        let rhs = ctx3.dem.g_tilde(&lam, 0)?.mul_poly(&unit);
        Ok(CheckOutcome::from_series_eq(&lhs, &rhs))
    });
    suite
}

/// Truncation-consistency meta-suite.
pub fn suite_consistency(config: &RunConfig) -> Suite<'static> {
    let mut suite = Suite::new("consistency");
    let n = config.n;
    let d_hi = config.deg;
    let d_lo = config.deg.saturating_sub(2).max(1);
    suite.case(format!("consistency/n{}/deg{}-to-{}", n, d_hi, d_lo), move || {
        Ok(CheckOutcome {
            pass: consistency_check(n, d_hi, d_lo)?,
            witness: None,
        })
    });
    suite
}

/// A bundle of every suite at the configured parameters.
pub fn run_suite(name: &str, config: &RunConfig) -> Result<SuiteReport, KError> {
    let ctx = PetersonCtx::new(config.ring(), config.deg)?;
    let report = match name {
        "main" => suite_main(&ctx, config).run(config),
        "det" => suite_det(&ctx, config).run(config),
        "krect" => suite_krect(&ctx, config).run(config),
        "maxfactor" => suite_maxfactor(&ctx, config).run(config),
        "toda" => suite_toda(&ctx, config).run(config),
        "groth-props" => suite_groth_props(&ctx, config).run(config),
        "ops" => suite_ops(&ctx, config).run(config),
        "consistency" => suite_consistency(config).run(config),
        "fixtures" => {
            let ctx2 = PetersonCtx::new(RingCtx::sl(2), config.deg)?;
            let ctx3 = PetersonCtx::new(RingCtx::sl(3), config.deg)?;
            suite_fixtures(&ctx2, &ctx3).run(config)
        }
        "all" => {
            let mut all_cases = Vec::new();
            let mut all_pass = true;
            let mut budget = false;
            for sub in [
                "main",
                "det",
                "krect",
                "maxfactor",
                "toda",
                "groth-props",
                "ops",
                "consistency",
                "fixtures",
            ] {
                let r = run_suite(sub, config)?;
                all_pass &= r.all_pass;
                budget |= r.budget_exhausted;
                all_cases.extend(r.cases);
            }
            all_cases.sort_by(|a, b| a.case.cmp(&b.case));
            return Ok(SuiteReport {
                suite: "all".into(),
                config: config.clone(),
                cases: all_cases,
                all_pass,
                budget_exhausted: budget,
            });
        }
        other => {
            return Err(KError::Invalid(format!("unknown suite '{other}'")));
        }
    };
    Ok(report)
}
