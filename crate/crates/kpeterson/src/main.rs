//! Thin command-line front end over the library: compute objects, run
//! verification suites, poke the Toda lattice, and manage the cache.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 budget/bound exhaustion.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use kpeterson::affine::Partition;
use kpeterson::cache;
use kpeterson::config::RunConfig;
use kpeterson::error::KError;
use kpeterson::groth::f_full;
use kpeterson::peterson::PetersonCtx;
use kpeterson::report::run_suite;
use kpeterson::toda::{dtoda_step, eval_at_state, TodaState};

#[derive(Parser)]
#[command(name = "kpeterson", version, about = "Exact computations around the K-theoretic Peterson map for SL_n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Rank parameter n ≥ 2
    #[arg(long, default_value_t = 3, env = "KPETERSON_N")]
    n: usize,
    /// Series truncation degree
    #[arg(long, default_value_t = 4, env = "KPETERSON_DEG")]
    deg: usize,
    /// Maximum affine length for enumerations
    #[arg(long, default_value_t = 4, env = "KPETERSON_MAX_LENGTH")]
    max_length: usize,
    /// Coefficient normalization: SL or GL
    #[arg(long, default_value = "SL", env = "KPETERSON_MODE")]
    mode: String,
    /// Parallel jobs for suite runs
    #[arg(long, default_value_t = 1, env = "KPETERSON_JOBS")]
    jobs: usize,
    /// Seed for randomized property inputs and case shuffling
    #[arg(long, default_value_t = 0, env = "KPETERSON_SEED")]
    seed: u64,
    /// Cache directory (omit to disable caching)
    #[arg(long, default_value = "", env = "KPETERSON_CACHE_DIR")]
    cache_dir: String,
    /// Write the JSON output/report to this path as well as stdout
    #[arg(long)]
    json: Option<PathBuf>,
}

impl CommonOpts {
    fn config(&self) -> RunConfig {
        RunConfig {
            n: self.n,
            deg: self.deg,
            max_length: self.max_length,
            mode: self.mode.clone(),
            jobs: self.jobs,
            seed: self.seed,
            cache_dir: self.cache_dir.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute an object and emit canonical JSON
    Compute {
        #[command(subcommand)]
        kind: ComputeKind,
    },
    /// Run a verification suite (exit 1 on any failing case)
    Verify {
        /// main | det | krect | maxfactor | toda | groth-props | ops | consistency | fixtures | all
        suite: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Toda-lattice utilities
    Toda {
        #[command(subcommand)]
        action: TodaAction,
    },
    /// Remove corrupt cache entries (or all with --all)
    CacheGc {
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        opts: CommonOpts,
    },
}

#[derive(Subcommand)]
enum ComputeKind {
    /// K-theoretic double k-Schur function g_λ
    Gkschur {
        /// Comma-separated partition, e.g. 2,1 (empty for ∅)
        #[arg(long, default_value = "")]
        partition: String,
        /// Parameter shift j (b ↦ ω^j b)
        #[arg(long, default_value_t = 0)]
        shift: i64,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Closed K-theoretic double k-Schur function g̃_λ
    GkschurClosed {
        #[arg(long, default_value = "")]
        partition: String,
        #[arg(long, default_value_t = 0)]
        shift: i64,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Quantum double Grothendieck polynomial 𝔊^Q_w
    Groth {
        /// One-line notation, e.g. 2,1
        #[arg(long)]
        perm: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Tau function σ^m(τ_i) as a truncated series
    Tau {
        #[arg(long)]
        i: usize,
        /// σ-power: 0 = τ_i, 1 = σ_i, 2 = σ(σ_i), −1 = σ^{-1}(τ_i)
        #[arg(long, default_value_t = 0)]
        variant: i32,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// The stored band of the centralizer matrix Z
    ZMatrix {
        #[command(flatten)]
        opts: CommonOpts,
    },
}

#[derive(Subcommand)]
enum TodaAction {
    /// Print the conserved quantities F_1..F_n
    PrintF {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Run discrete Toda steps from the symbolic point or a rational point
    Step {
        /// Number of steps
        #[arg(long, default_value_t = 1)]
        steps: usize,
        /// Optional comma-separated integer z-values (symbolic when omitted)
        #[arg(long)]
        z: Option<String>,
        /// Optional comma-separated integer Q-values
        #[arg(long)]
        q: Option<String>,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Emit a Hirota bilinear-identity report
    Hirota {
        #[command(flatten)]
        opts: CommonOpts,
    },
}

fn parse_partition(s: &str) -> Result<Partition, KError> {
    if s.trim().is_empty() {
        return Ok(Partition::empty());
    }
    let parts: Result<Vec<u8>, _> = s.split(',').map(|p| p.trim().parse::<u8>()).collect();
    parts
        .map(Partition::new)
        .map_err(|e| KError::Invalid(format!("bad partition '{s}': {e}")))
}

fn parse_perm(s: &str, n: usize) -> Result<Vec<u8>, KError> {
    let vals: Result<Vec<u8>, _> = s.split(',').map(|p| p.trim().parse::<u8>()).collect();
    let w = vals.map_err(|e| KError::Invalid(format!("bad permutation '{s}': {e}")))?;
    let mut sorted = w.clone();
    sorted.sort_unstable();
    if sorted != (1..=n as u8).collect::<Vec<_>>() {
        return Err(KError::Invalid(format!(
            "'{s}' is not a permutation of 1..{n} in one-line notation"
        )));
    }
    Ok(w)
}

fn parse_ints(s: &str) -> Result<Vec<i64>, KError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|e| KError::Invalid(format!("bad integer list '{s}': {e}")))
        })
        .collect()
}

fn emit(opts: &CommonOpts, payload: Value) -> Result<(), KError> {
    let wrapped = json!({"config": opts.config(), "result": payload});
    let text = serde_json::to_string_pretty(&wrapped)
        .map_err(|e| KError::Invalid(e.to_string()))?;
    println!("{text}");
    if let Some(path) = &opts.json {
        std::fs::write(path, &text).map_err(|e| KError::Invalid(e.to_string()))?;
    }
    Ok(())
}

/// Fetch from the cache or compute and store.
fn cached(
    opts: &CommonOpts,
    kind: &str,
    key: &str,
    compute: impl FnOnce() -> Result<Value, KError>,
) -> Result<Value, KError> {
    if opts.cache_dir.is_empty() {
        return compute();
    }
    let dir = PathBuf::from(&opts.cache_dir);
    let ckey = cache::cache_key(kind, opts.n, opts.deg, key);
    if let Some(hit) = cache::get(&dir, &ckey) {
        return Ok(hit);
    }
    let value = compute()?;
    cache::put(&dir, &ckey, &value).map_err(|e| KError::Invalid(e.to_string()))?;
    Ok(value)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(KError::BudgetExceeded) | Err(KError::BoundExceeded) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn real_main() -> Result<bool, KError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Compute { kind } => {
            compute(kind)?;
            Ok(true)
        }
        Command::Verify { suite, opts } => {
            let config = opts.config();
            let report = run_suite(&suite, &config)?;
            report.print_lines();
            let payload = report.to_json();
            emit(&opts, payload)?;
            if report.budget_exhausted {
                return Err(KError::BudgetExceeded);
            }
            Ok(report.all_pass)
        }
        Command::Toda { action } => {
            toda_action(action)?;
            Ok(true)
        }
        Command::CacheGc { all, opts } => {
            if opts.cache_dir.is_empty() {
                return Err(KError::Invalid(
                    "cache-gc needs --cache-dir (or KPETERSON_CACHE_DIR)".into(),
                ));
            }
            let removed = cache::gc(&PathBuf::from(&opts.cache_dir), all)
                .map_err(|e| KError::Invalid(e.to_string()))?;
            println!("removed {removed} cache entries");
            Ok(true)
        }
    }
}

fn compute(kind: ComputeKind) -> Result<(), KError> {
    match kind {
        ComputeKind::Gkschur {
            partition,
            shift,
            opts,
        } => {
            let lam = parse_partition(&partition)?;
            let key = format!("{}|shift{}", partition, shift);
            let value = cached(&opts, "gkschur", &key, || {
                let ctx = PetersonCtx::new(opts.config().ring(), opts.deg)?;
                let g = ctx.dem.g(&lam, shift)?;
                Ok(json!({"n": opts.n, "deg": opts.deg, "partition": lam.0, "shift": shift,
                          "closed": false, "series": g.to_json()}))
            })?;
            emit(&opts, value)
        }
        ComputeKind::GkschurClosed {
            partition,
            shift,
            opts,
        } => {
            let lam = parse_partition(&partition)?;
            let key = format!("{}|shift{}", partition, shift);
            let value = cached(&opts, "gkschur-closed", &key, || {
                let ctx = PetersonCtx::new(opts.config().ring(), opts.deg)?;
                let g = ctx.dem.g_tilde(&lam, shift)?;
                Ok(json!({"n": opts.n, "deg": opts.deg, "partition": lam.0, "shift": shift,
                          "closed": true, "series": g.to_json()}))
            })?;
            emit(&opts, value)
        }
        ComputeKind::Groth { perm, opts } => {
            let w = parse_perm(&perm, opts.n)?;
            let value = cached(&opts, "groth", &perm, || {
                let table = kpeterson::groth::GrothTable::new(opts.n);
                Ok(json!({"n": opts.n, "perm": w, "poly": table.groth(&w).to_json()}))
            })?;
            emit(&opts, value)
        }
        ComputeKind::Tau { i, variant, opts } => {
            if i > opts.n {
                return Err(KError::Invalid(format!("tau index {i} exceeds n={}", opts.n)));
            }
            let key = format!("tau{}|variant{}", i, variant);
            let value = cached(&opts, "tau", &key, || {
                let ctx = PetersonCtx::new(opts.config().ring(), opts.deg)?;
                let t = ctx.cent.tau_variant(variant, i);
                Ok(json!({"n": opts.n, "deg": opts.deg, "i": i, "variant": variant,
                          "series": t.to_json()}))
            })?;
            emit(&opts, value)
        }
        ComputeKind::ZMatrix { opts } => {
            let value = cached(&opts, "z-matrix", "band", || {
                let ctx = PetersonCtx::new(opts.config().ring(), opts.deg)?;
                let mut rows = Vec::new();
                for i in 1..=opts.n as i64 {
                    let mut row = Vec::new();
                    for j in i..(i + opts.n as i64) {
                        row.push(json!({"i": i, "j": j, "series": ctx.cent.z(i, j).to_json()}));
                    }
                    rows.push(Value::Array(row));
                }
                Ok(json!({"n": opts.n, "deg": opts.deg, "band": rows}))
            })?;
            emit(&opts, value)
        }
    }
}

fn toda_action(action: TodaAction) -> Result<(), KError> {
    match action {
        TodaAction::PrintF { opts } => {
            let fs: Vec<Value> = (1..=opts.n)
                .map(|i| json!({"i": i, "poly": f_full(opts.n, i).to_json()}))
                .collect();
            emit(&opts, json!({"n": opts.n, "conserved": fs}))
        }
        TodaAction::Step { steps, z, q, opts } => {
            let n = opts.n;
            let mut state = match (&z, &q) {
                (Some(zs), Some(qs)) => {
                    let zv = parse_ints(zs)?;
                    let qv = parse_ints(qs)?;
                    if zv.len() != n || qv.len() != n - 1 {
                        return Err(KError::Invalid(format!(
                            "need {} z-values and {} Q-values",
                            n,
                            n - 1
                        )));
                    }
                    TodaState::rational(n, &zv, &qv)
                }
                (None, None) => TodaState::symbolic(n),
                _ => {
                    return Err(KError::Invalid(
                        "--z and --q must be given together".into(),
                    ))
                }
            };
            let f_before: Vec<Value> = (1..=n)
                .map(|i| {
                    let v = eval_at_state(&f_full(n, i), &state);
                    json!({"i": i, "num": v.num.to_json(), "den": v.den.to_json()})
                })
                .collect();
            let mut trajectory = Vec::new();
            for _ in 0..steps {
                state = dtoda_step(&state)?;
                trajectory.push(state_json(&state));
            }
            let f_after: Vec<Value> = (1..=n)
                .map(|i| {
                    let v = eval_at_state(&f_full(n, i), &state);
                    json!({"i": i, "num": v.num.to_json(), "den": v.den.to_json()})
                })
                .collect();
            let conserved = f_before == f_after;
            emit(
                &opts,
                json!({"n": n, "steps": steps, "trajectory": trajectory,
                       "conserved_f": conserved}),
            )?;
            if !conserved {
                return Err(KError::Invalid(
                    "conserved quantities changed along the trajectory".into(),
                ));
            }
            Ok(())
        }
        TodaAction::Hirota { opts } => {
            let ctx = PetersonCtx::new(opts.config().ring(), opts.deg)?;
            let mut cases = Vec::new();
            let mut all = true;
            for i in 1..opts.n {
                let pass = ctx.cent.hirota_check(i);
                all &= pass;
                cases.push(json!({"identity": format!("tau_{i}^2 - tau_{}tau_{} = tau_{i}^+tau_{i}^-", i+1, i-1),
                                  "n": opts.n, "D": opts.deg,
                                  "status": if pass {"pass"} else {"fail"}}));
            }
            emit(&opts, json!({"hirota": cases, "all_pass": all}))?;
            if all {
                Ok(())
            } else {
                Err(KError::Invalid("Hirota identity failed".into()))
            }
        }
    }
}

fn state_json(s: &TodaState) -> Value {
    json!({
        "z": s.z.iter().map(|f| json!({"num": f.num.to_json(), "den": f.den.to_json()})).collect::<Vec<_>>(),
        "q": s.q.iter().map(|f| json!({"num": f.num.to_json(), "den": f.den.to_json()})).collect::<Vec<_>>(),
    })
}
