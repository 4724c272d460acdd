//! The Carlitz period from torsion towers against the product formula
//! `(-theta)^(q/(q-1)) prod_(i>=1) (1 - theta^(1-q^i))^(-1)`.

use drinfeld::gf::{embedding, gf};
use drinfeld::module::{DrinfeldModule, Precision};
use drinfeld::periods::{period_from_tower, torsion_tower};
use drinfeld::puiseux::{Px, EXACT};
use num_rational::Ratio;

fn product_formula(q: u32) -> Px {
    let p = q; // q prime in these tests
    let big = gf(p, 2).unwrap();
    let minus_one = big.neg(1);
    let gamma = (1..big.size()).find(|&g| big.pow(g, (q - 1) as u64) == minus_one).unwrap();
    // lambda = gamma * theta^(1/(q-1)), lambda^(q-1) = -theta
    let lambda = Px::from_slots(&big, q - 1, -1, vec![gamma], EXACT);
    let mut acc = &Px::theta(&big).neg_val() * &lambda;
    let mut i = 1;
    loop {
        let e = (q as i64).pow(i) - 1;
        if e > 80 {
            break;
        }
        let factor = &Px::one(&big) - &Px::theta_pow(&big, 1, -e);
        acc = (&acc * &factor.inv_rel(200).unwrap()).truncated_rel(200);
        i += 1;
    }
    acc
}

#[test]
fn carlitz_period_matches_product_formula() {
    for q in [2u32, 3] {
        let prec = Precision { target: 48, guard: 12, t_trunc: 48 };
        let m = DrinfeldModule::carlitz(q, prec).unwrap();
        let tower = torsion_tower(&m, 4, 0).unwrap();
        let (omega, _) = period_from_tower(&m, &tower).unwrap();
        let oracle = product_formula(q);
        let base = m.base_field();
        let lead = omega.valuation().unwrap();
        let best = (1..q)
            .map(|c| {
                let (o, w) = (&oracle, &omega);
                let table = embedding(base, &drinfeld::gf::common_field(o.field(), w.field()).unwrap()).unwrap();
                let scaled = o.lift_to(&drinfeld::gf::common_field(o.field(), w.field()).unwrap(), o.ram());
                (&scaled.scale(table[c as usize]) - w).val_or_cap()
            })
            .max()
            .unwrap();
        // 30 fractional digits beyond the leading term.
        assert!(best - lead >= Ratio::from_integer(30), "q = {q}: agreement {best}, leading {lead}");
    }
}
