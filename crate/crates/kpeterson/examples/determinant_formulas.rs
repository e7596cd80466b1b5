//! Determinantal formulas for k-small partitions: the banded `M_λ` and
//! `N_λ` determinants over `ξ_λ` reproduce `g̃_λ = D_x(1)` and `g_λ = T_x(1)`
//! computed through the Demazure engine, and the rectangle cases collapse to
//! tau-function minors.

use kpeterson::affine::{k_bounded_up_to, k_rectangle};
use kpeterson::peterson::PetersonCtx;
use kpeterson::rt::RingCtx;

fn main() {
    let n = 4;
    let deg = 4;
    let ctx = PetersonCtx::new(RingCtx::sl(n), deg).unwrap();
    println!("n = {n}, degree {deg}: determinant route vs. operator route\n");

    for lam in k_bounded_up_to(n - 1, n) {
        if lam.is_empty() || !lam.is_k_small(n) {
            continue;
        }
        let det_gt = ctx.det_m_lambda(&lam).unwrap();
        let dem_gt = ctx.dem.g_tilde(&lam, 0).unwrap();
        let det_g = ctx.det_n_lambda(&lam).unwrap();
        let dem_g = ctx.dem.g(&lam, 0).unwrap();
        assert_eq!(det_gt, dem_gt);
        assert_eq!(det_g, dem_g);
        println!("λ = {lam}: det(M_λ)/ξ_λ = g̃_λ and the N_λ route gives g_λ  ✓");
    }

    println!();
    for i in 1..n {
        let out = ctx.rect_tau_check(i).unwrap();
        assert!(out.pass);
        let rect = k_rectangle(n, i);
        println!("rectangle R_{i} = {rect}: g̃ = σ_{}/ξ and g = e^(…)·τ_{}/ξ  ✓", n - i, n - i);
    }

    // the ω-conjugated block form with P^{-1}-rows
    for (i, j) in [(1usize, 1usize), (2, 2), (3, 1), (1, 3)] {
        if i + j > n {
            continue;
        }
        let lhs = ctx.det_m_prime_rect(i, j).unwrap();
        let rhs = ctx
            .dem
            .g_tilde(&kpeterson::affine::Partition(vec![i as u8; j]), 0)
            .unwrap();
        assert_eq!(lhs, rhs);
        println!("M'-variant for the {i}×{j} rectangle  ✓");
    }
}
