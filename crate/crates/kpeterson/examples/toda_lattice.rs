//! The relativistic Toda lattice side: closed-form conserved quantities,
//! the discrete-time flow that preserves them, and the Hirota bilinear
//! identity satisfied by the tau functions of the centralizer family.

use kpeterson::groth::f_full;
use kpeterson::peterson::PetersonCtx;
use kpeterson::rt::RingCtx;
use kpeterson::toda::{closed_f_check, dtoda_step, eval_at_state, TodaState};

fn main() {
    let n = 3;
    println!("conserved quantities of the rank-{n} relativistic Toda lattice:");
    for i in 1..=n {
        println!("  F_{i} = {}", f_full(n, i));
    }
    assert!(closed_f_check(n));
    println!("char-poly coefficients of the Lax matrix match the closed form  ✓\n");

    // discrete flow from the symbolic point preserves every F_i
    let state = TodaState::symbolic(n);
    let mut current = state.clone();
    for step in 1..=2 {
        current = dtoda_step(&current).unwrap();
        let ok = (1..=n).all(|i| {
            eval_at_state(&f_full(n, i), &state) == eval_at_state(&f_full(n, i), &current)
        });
        println!("discrete Toda step {step}: all F_i preserved as rational identities: {ok}");
        assert!(ok);
    }

    // Hirota bilinear identity for the tau functions
    let deg = 5;
    let ctx = PetersonCtx::new(RingCtx::sl(n), deg).unwrap();
    println!("\ntau functions at truncation degree {deg}:");
    println!("  τ_1 = {}", ctx.cent.tau(1));
    for i in 1..n {
        assert!(ctx.cent.hirota_check(i));
        println!("  τ_{i}² − τ_{}τ_{} = τ_{i}⁺·τ_{i}⁻  ✓", i + 1, i - 1);
    }
}
