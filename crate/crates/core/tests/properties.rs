//! Property tests for the exact algebraic laws of the sparse polynomial
//! ring.  Coefficients are drawn as small integers so every sum and product
//! along both evaluation routes is exact in binary64, which lets the laws
//! assert bitwise coefficient equality rather than a tolerance.

use proptest::prelude::*;

use koopman_lab::polynomials::{MultiIndex, MultiPoly};

const NVARS: usize = 3;

fn arb_poly() -> impl Strategy<Value = MultiPoly> {
    proptest::collection::vec(
        (
            proptest::collection::vec(0u32..=3, NVARS),
            -8i32..=8,
        ),
        0..6,
    )
    .prop_map(|terms| {
        let mut p = MultiPoly::zero(NVARS);
        for (exps, coef) in terms {
            p.add_term(MultiIndex::new(exps), f64::from(coef));
        }
        p
    })
}

proptest! {
    #[test]
    fn addition_commutes(a in arb_poly(), b in arb_poly()) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
    }

    #[test]
    fn multiplication_commutes(a in arb_poly(), b in arb_poly()) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
    }

    #[test]
    fn multiplication_associates(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn multiplication_distributes(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        let left = a.mul(&b.add(&c).unwrap()).unwrap();
        let right = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn subtraction_inverts_addition(a in arb_poly(), b in arb_poly()) {
        prop_assert_eq!(a.add(&b).unwrap().sub(&b).unwrap(), a.clone());
    }

    #[test]
    fn partial_satisfies_the_product_rule(a in arb_poly(), b in arb_poly(), var in 0usize..NVARS) {
        let left = a.mul(&b).unwrap().partial(var).unwrap();
        let right = a
            .partial(var).unwrap().mul(&b).unwrap()
            .add(&a.mul(&b.partial(var).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(
        a in arb_poly(),
        b in arb_poly(),
        x in -2i32..=2,
        y in -2i32..=2,
        z in -2i32..=2,
    ) {
        let point = [f64::from(x), f64::from(y), f64::from(z)];
        let sum = a.add(&b).unwrap().eval(&point).unwrap();
        prop_assert_eq!(sum, a.eval(&point).unwrap() + b.eval(&point).unwrap());
        let product = a.mul(&b).unwrap().eval(&point).unwrap();
        prop_assert_eq!(product, a.eval(&point).unwrap() * b.eval(&point).unwrap());
    }

    #[test]
    fn serialization_round_trips(a in arb_poly()) {
        let json = serde_json::to_string(&a).unwrap();
        let back: MultiPoly = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(a, back);
    }
}
