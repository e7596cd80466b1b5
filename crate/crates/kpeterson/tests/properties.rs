//! Property-based invariants over randomized ring elements and series.

use num_bigint::BigInt;
use proptest::prelude::*;

use kpeterson::rt::{RTFrac, RTPoly, RingCtx};
use kpeterson::sym::{HMono, SymSeries};

fn arb_poly(n: usize) -> impl Strategy<Value = RTPoly> {
    let ctx = RingCtx::sl(n);
    prop::collection::vec(
        (prop::collection::vec(-2i32..=2, n), -4i64..=4),
        0..4,
    )
    .prop_map(move |terms| {
        let mut p = RTPoly::zero(ctx);
        for (exps, c) in terms {
            p = p.add(&RTPoly::monomial(ctx, exps, BigInt::from(c)));
        }
        p
    })
}

fn arb_series(n: usize, d: usize) -> impl Strategy<Value = SymSeries> {
    let ctx = RingCtx::sl(n);
    let parts: Vec<Vec<u8>> = {
        let mut out = vec![vec![]];
        for a in 1..=d as u8 {
            out.push(vec![a]);
            for b in 1..=a {
                if (a + b) as usize <= d {
                    out.push(vec![a, b]);
                }
            }
        }
        out
    };
    prop::collection::vec((0..parts.len(), arb_poly(n)), 0..5).prop_map(move |terms| {
        let mut s = SymSeries::zero(ctx, d);
        for (idx, c) in terms {
            s.insert_term(HMono(parts[idx].clone()), RTFrac::from_poly(c));
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rt_ring_axioms(a in arb_poly(3), b in arb_poly(3), c in arb_poly(3)) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
    }

    #[test]
    fn exact_div_of_products(a in arb_poly(3), b in arb_poly(3)) {
        prop_assume!(!b.is_zero());
        let prod = a.mul(&b);
        prop_assert_eq!(prod.exact_div(&b).unwrap(), a);
    }

    #[test]
    fn iota_and_shift_are_homomorphic(a in arb_poly(4), b in arb_poly(4)) {
        prop_assert_eq!(a.mul(&b).iota(), a.iota().mul(&b.iota()));
        prop_assert_eq!(a.iota().iota(), a.clone());
        prop_assert_eq!(
            a.param_shift(1).param_shift(3),
            a.param_shift(4),
            "shifts compose modulo n"
        );
    }

    #[test]
    fn fraction_equivalence(a in arb_poly(3), b in arb_poly(3), c in arb_poly(3)) {
        prop_assume!(!b.is_zero() && !c.is_zero());
        // (a·c)/(b·c) = a/b, and full reduction does not change the class
        let f = RTFrac::new(a.mul(&c), b.mul(&c));
        let g = RTFrac::new(a, b);
        prop_assert_eq!(&f, &g);
        prop_assert_eq!(&f.reduced(), &g);
    }

    #[test]
    fn series_ring_axioms(f in arb_series(3, 4), g in arb_series(3, 4), h in arb_series(3, 4)) {
        prop_assert_eq!(f.mul(&g), g.mul(&f));
        prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
        prop_assert_eq!(f.mul(&g.add(&h)), f.mul(&g).add(&f.mul(&h)));
    }

    #[test]
    fn series_truncation_is_a_ring_map(f in arb_series(3, 5), g in arb_series(3, 5)) {
        let lhs = f.mul(&g).truncate(3);
        let rhs = f.truncate(3).mul(&g.truncate(3));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn series_involutions(f in arb_series(3, 4)) {
        prop_assert_eq!(f.iota_poly().iota_poly(), f.clone());
        prop_assert_eq!(f.sigma_poly().sigma_inv_poly(), f.clone());
        prop_assert_eq!(
            f.sigma_poly().iota_poly(),
            f.iota_poly().sigma_poly()
        );
    }

    #[test]
    fn series_inversion(f in arb_series(3, 4)) {
        // force a unit constant term
        let one = SymSeries::one(f.rt, f.trunc);
        let g = one.add(&f.sub(&SymSeries::constant(f.rt, f.trunc, f.constant_term())));
        let inv = g.invert().unwrap();
        prop_assert_eq!(g.mul(&inv), one);
    }
}
