//! Rational reconstruction of power-series data via Berlekamp–Massey.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{Fe, GfField};
use crate::poly::{Poly, RationalFn, Var};

/// Shortest linear recurrence: returns the connection polynomial `C`
/// (`C[0] = 1`) and its length `L`, so that `sum_i C[i] s[n-i] = 0` for `n >= L`.
pub fn berlekamp_massey(field: &GfField, s: &[Fe]) -> (Vec<Fe>, usize) {
    let mut c = vec![1 as Fe];
    let mut b = vec![1 as Fe];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bd: Fe = 1;
    for n in 0..s.len() {
        let mut d = s[n];
        for i in 1..=l.min(c.len() - 1) {
            d = field.add(d, field.mul(c[i], s[n - i]));
        }
        if d == 0 {
            m += 1;
            continue;
        }
        let coef = field.mul(d, field.inv(bd).expect("nonzero discrepancy"));
        let t = c.clone();
        if c.len() < b.len() + m {
            c.resize(b.len() + m, 0);
        }
        for (i, &bi) in b.iter().enumerate() {
            c[i + m] = field.sub(c[i + m], field.mul(coef, bi));
        }
        if 2 * l <= n {
            l = n + 1 - l;
            b = t;
            bd = d;
            m = 1;
        } else {
            m += 1;
        }
    }
    while c.len() > 1 && c.last() == Some(&0) {
        c.pop();
    }
    (c, l)
}

/// Recover `P/Q` with `deg P, deg Q <= max_deg` from its expansion `seq` in `t`.
pub fn rational_reconstruct(field: &Arc<GfField>, seq: &[Fe], max_deg: usize) -> Result<RationalFn> {
    let needed = 2 * max_deg + 2;
    if seq.len() < needed {
        return Err(Error::InsufficientData { needed, have: seq.len() });
    }
    let (c, l) = berlekamp_massey(field, seq);
    if l > max_deg + 1 || c.len() > max_deg + 1 {
        return Err(Error::NoMatch);
    }
    let q = Poly::new(field, Var::T, c.clone());
    // P = (Q * S) mod t^L.
    let mut p = vec![0; l];
    for (n, slot) in p.iter_mut().enumerate() {
        let mut acc = 0;
        for (i, &ci) in c.iter().enumerate().take(n + 1) {
            acc = field.add(acc, field.mul(ci, seq[n - i]));
        }
        *slot = acc;
    }
    let p = Poly::new(field, Var::T, p);
    if p.degree().is_some_and(|d| d > max_deg) {
        return Err(Error::NoMatch);
    }
    let f = RationalFn::new(p, q)?;
    // The recurrence must explain the whole window.
    let expanded = f.expand(seq.len())?;
    if expanded != seq {
        return Err(Error::NoMatch);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::gf;

    #[test]
    fn geometric_series() {
        let f = gf(3, 1).unwrap();
        let r = rational_reconstruct(&f, &[1; 8], 2).unwrap();
        // 1/(1-t) = -1/(t-1) with a monic denominator.
        assert_eq!(r.den().coeffs(), &[2, 1]);
        assert_eq!(r.num().coeffs(), &[2]);
    }

    #[test]
    fn plain_t() {
        let f = gf(2, 1).unwrap();
        let r = rational_reconstruct(&f, &[0, 1, 0, 0, 0, 0], 1).unwrap();
        assert_eq!(r.num(), &Poly::x(&f, Var::T));
        assert_eq!(r.den(), &Poly::one(&f, Var::T));
    }

    #[test]
    fn quadratic_denominator_over_f2() {
        let f = gf(2, 1).unwrap();
        let target = RationalFn::new(
            Poly::new(&f, Var::T, vec![1, 1]),
            Poly::new(&f, Var::T, vec![1, 1, 1]),
        )
        .unwrap();
        let seq = target.expand(10).unwrap();
        assert_eq!(rational_reconstruct(&f, &seq, 2).unwrap(), target);
    }

    #[test]
    fn short_input_rejected() {
        let f = gf(2, 1).unwrap();
        assert!(matches!(
            rational_reconstruct(&f, &[1, 1, 1], 2),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn high_degree_data_does_not_match() {
        let f = gf(5, 1).unwrap();
        let seq = [1, 2, 3, 1, 4, 0, 2, 2, 1, 3, 3, 4];
        assert!(rational_reconstruct(&f, &seq, 1).is_err());
    }
}
