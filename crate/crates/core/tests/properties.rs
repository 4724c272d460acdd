use std::sync::Arc;

use drinfeld::gf::{gf, GfField};
use drinfeld::poly::{Poly, Var};
use drinfeld::puiseux::Px;
use drinfeld::relations::{find_relations, kspan_dim};
use proptest::prelude::*;

fn f4() -> Arc<GfField> {
    gf(2, 2).unwrap()
}

/// Series with leading slot `lo`, digits in `F_4` and relative precision 30.
fn series() -> impl Strategy<Value = Px> {
    (-3i64..4, prop::collection::vec(0u32..4, 1..30)).prop_map(|(lo, mut c)| {
        c[0] = c[0].max(1);
        Px::from_slots(&f4(), 1, lo, c, lo + 30)
    })
}

fn agree_to_cap(a: &Px, b: &Px) -> bool {
    a.agreement(b) >= a.cap_val().min(b.cap_val())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(x in series(), y in series(), z in series()) {
        prop_assert!(agree_to_cap(&(&x + &y), &(&y + &x)));
        prop_assert!(agree_to_cap(&(&x * &y), &(&y * &x)));
        prop_assert!(agree_to_cap(&(&(&x * &y) * &z), &(&x * &(&y * &z))));
        prop_assert!(agree_to_cap(&(&x * &(&y + &z)), &(&(&x * &y) + &(&x * &z))));
        prop_assert!((&x - &x).is_zero_to_prec());
    }

    #[test]
    fn product_valuation_adds(x in series(), y in series()) {
        let v = (&x * &y).valuation().unwrap();
        prop_assert_eq!(v, x.valuation().unwrap() + y.valuation().unwrap());
    }

    #[test]
    fn inverse(x in series()) {
        let one = &x * &x.inv().unwrap();
        prop_assert!(agree_to_cap(&one, &Px::one(&f4())));
    }

    #[test]
    fn literal_round_trip(x in series()) {
        let back = Px::parse(&f4(), &x.to_literal()).unwrap();
        prop_assert_eq!(back.to_literal(), x.to_literal());
        prop_assert_eq!(back.cap_val(), x.cap_val());
    }

    #[test]
    fn frobenius_is_multiplicative(x in series(), y in series()) {
        let lhs = (&x * &y).frob(2, 1);
        let rhs = &x.frob(2, 1) * &y.frob(2, 1);
        prop_assert!(agree_to_cap(&lhs, &rhs));
    }

    #[test]
    fn planted_relation_found_and_span_monotone(
        vals in prop::collection::vec(series(), 2),
        a in prop::collection::vec(0u32..4, 2),
        b in prop::collection::vec(0u32..4, 2),
    ) {
        let f = f4();
        let (a, b) = (Poly::new(&f, Var::Theta, a), Poly::new(&f, Var::Theta, b));
        prop_assume!(!a.is_zero() || !b.is_zero());
        let third = &(&Px::from_theta_poly(&a) * &vals[0]) + &(&Px::from_theta_poly(&b) * &vals[1]);
        let vs = vec![vals[0].clone(), vals[1].clone(), third];
        let rels = find_relations(&f, &vs, 1).unwrap();
        prop_assert!(!rels.is_empty());
        let mut last = vs.len();
        for d in 0..3 {
            let s = kspan_dim(&f, &vs, d).unwrap();
            prop_assert!(s <= last);
            last = s;
        }
    }
}
