//! Bounded-height `F_q[theta]`-linear relations among Puiseux numbers.
//!
//! Unknown coefficients `c_i = sum_(k<=D) c_(ik) theta^k` are expanded over an
//! `F_p`-basis of `F_q`, every known digit of `sum_i c_i v_i` below a cutoff
//! becomes a linear condition over `F_p`, and one nullspace solve produces all
//! relations. Results are reported up to multiplication by `F_q(theta)`: of
//! the solution space, only relations that raise the rank over `F_q(theta)`
//! are kept. A missing relation means "none at this height and precision",
//! never independence.

use std::sync::Arc;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{embedding, gf, GfField};
use crate::linalg::{nullspace_codes, rank, rref_codes};
use crate::poly::{Poly, RationalFn, Var};
use crate::puiseux::Px;

/// Slots of margin between the precision cap and the cutoff.
pub const SAFETY_SLOTS: i64 = 4;
/// Required excess of `F_p`-equations over unknowns.
const EXTRA_EQUATIONS: usize = 16;

#[derive(Debug, Clone)]
pub struct RelationCertificate {
    /// One polynomial in `theta` per input value; the first nonzero one is monic.
    pub coeffs: Vec<Poly>,
    /// Valuation (or cap) of `sum c_i v_i` computed directly.
    pub residual: Ratio<i64>,
    /// Valuation below which the relation was required to hold.
    pub cutoff: Ratio<i64>,
}

impl Serialize for RelationCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RelationCertificate", 3)?;
        st.serialize_field("coeffs", &self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>())?;
        st.serialize_field("residual", &self.residual.to_string())?;
        st.serialize_field("cutoff", &self.cutoff.to_string())?;
        st.end()
    }
}

/// All relations as an `F_q`-basis of coefficient vectors (codes of `F_q`,
/// laid out as `[i][k]` flattened to `i * (D+1) + k`), with the cutoff used.
fn solve(base: &Arc<GfField>, values: &[Px], d: usize) -> Result<(Vec<Vec<u32>>, Ratio<i64>)> {
    let vals = Px::unify(values);
    let field = vals[0].field().clone();
    let ram = vals[0].ram() as i64;
    let p = base.characteristic();
    let qe = base.degree() as usize;
    let n = field.degree() as usize;
    let fp = gf(p, 1)?;
    let emb = embedding(base, &field)?;
    // F_p-basis of F_q inside the common field.
    let gammas: Vec<u32> = (0..qe).map(|l| emb[(p as usize).pow(l as u32)]).collect();

    let top = vals.iter().filter(|v| !v.is_zero_to_prec()).map(Px::lo).max().unwrap_or(0);
    // Exact inputs still get a finite window.
    let cap = vals.iter().map(Px::cap).min().unwrap().min(top + 256 * ram);
    // theta^k v has cap lowered by k*ram.
    let cut = cap.saturating_sub(d as i64 * ram).saturating_sub(SAFETY_SLOTS);
    let lo = vals
        .iter()
        .filter(|v| !v.is_zero_to_prec())
        .map(|v| v.lo() - d as i64 * ram)
        .min()
        .unwrap_or(cut);
    let m = vals.len();
    let unknowns = m * (d + 1) * qe;
    let window = (cut - lo).max(0) as usize;
    if window * n < unknowns + EXTRA_EQUATIONS {
        return Err(Error::InsufficientPrecision(format!(
            "{window} slots over F_p^{n} for {unknowns} unknowns"
        )));
    }
    // Column for each unknown: digits of gamma_l * theta^k * v_i at slots lo..cut.
    let mut rows = vec![vec![0u32; unknowns]; window * n];
    for (i, v) in vals.iter().enumerate() {
        for k in 0..=d {
            for (l, &g) in gammas.iter().enumerate() {
                let col = (i * (d + 1) + k) * qe + l;
                for s in 0..window {
                    let slot = lo + s as i64 + k as i64 * ram;
                    let c = field.mul(g, v.coeff_at(slot));
                    if c == 0 {
                        continue;
                    }
                    for (t, digit) in field.digits(c).into_iter().enumerate() {
                        rows[s * n + t][col] = digit;
                    }
                }
            }
        }
    }
    let kernel = nullspace_codes(&fp, &rows, unknowns);
    // Back to F_q coordinates, then an F_q-basis via row reduction.
    let mut vecs: Vec<Vec<u32>> = kernel
        .iter()
        .map(|v| v.chunks(qe).map(|digits| base.from_digits(digits)).collect())
        .collect();
    let piv = rref_codes(base, &mut vecs);
    vecs.truncate(piv.len());
    Ok((vecs, Ratio::new(cut, ram)))
}

fn to_polys(base: &Arc<GfField>, v: &[u32], m: usize, d: usize) -> Vec<Poly> {
    (0..m).map(|i| Poly::new(base, Var::Theta, v[i * (d + 1)..(i + 1) * (d + 1)].to_vec())).collect()
}

/// Make the first nonzero coefficient monic.
fn normalize(polys: Vec<Poly>) -> Vec<Poly> {
    let lead = polys.iter().find(|p| !p.is_zero()).map(Poly::lead);
    match lead {
        Some(c) => {
            let inv = polys[0].field.inv(c).expect("nonzero lead");
            polys.into_iter().map(|p| p.scale(inv)).collect()
        }
        None => polys,
    }
}

fn direct_residual(values: &[Px], coeffs: &[Poly]) -> Ratio<i64> {
    let mut acc = Px::zero(values[0].field());
    for (v, c) in values.iter().zip(coeffs) {
        if !c.is_zero() {
            acc = &acc + &(&Px::from_theta_poly(c) * v);
        }
    }
    acc.val_or_cap()
}

/// Relations `sum c_i v_i = 0` with `deg c_i <= D`, one per independent
/// direction over `F_q(theta)`, each re-verified by direct summation.
pub fn find_relations(base: &Arc<GfField>, values: &[Px], d: usize) -> Result<Vec<RelationCertificate>> {
    if values.is_empty() {
        return Ok(Vec::new());
    }
    let m = values.len();
    let (mut basis, cutoff) = solve(base, values, d)?;
    let deg = |v: &Vec<u32>| {
        (0..m)
            .filter_map(|i| (0..=d).rev().find(|&k| v[i * (d + 1) + k] != 0))
            .max()
            .unwrap_or(0)
    };
    basis.sort_by_key(deg);
    let mut kept: Vec<Vec<Poly>> = Vec::new();
    let mut out = Vec::new();
    for v in basis {
        let polys = normalize(to_polys(base, &v, m, d));
        let mut trial = kept.clone();
        trial.push(polys.clone());
        let mat: Vec<Vec<RationalFn>> =
            trial.iter().map(|row| row.iter().map(|p| RationalFn::from_poly(p.clone())).collect()).collect();
        if rank(&mat) < trial.len() {
            continue;
        }
        let residual = direct_residual(values, &polys);
        if residual < cutoff {
            return Err(Error::InsufficientPrecision(format!(
                "relation failed direct verification: {residual} < {cutoff}"
            )));
        }
        kept.push(polys.clone());
        out.push(RelationCertificate { coeffs: polys, residual, cutoff });
    }
    Ok(out)
}

/// `m` minus the number of independent relations at height `<= D`.
pub fn kspan_dim(base: &Arc<GfField>, values: &[Px], d: usize) -> Result<usize> {
    Ok(values.len() - find_relations(base, values, d)?.len())
}

/// Fails with [`Error::DependentPeriods`] if any relation exists at height `<= D`.
pub fn check_independent(base: &Arc<GfField>, values: &[Px], d: usize) -> Result<()> {
    if find_relations(base, values, d)?.is_empty() {
        Ok(())
    } else {
        Err(Error::DependentPeriods)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puiseux::EXACT;

    #[test]
    fn one_theta_one_plus_theta() {
        let f = gf(3, 1).unwrap();
        let vals = [Px::one(&f), Px::theta(&f), Px::parse(&f, "1 + th").unwrap()];
        let vals: Vec<Px> = vals.iter().map(|v| v.truncated(60)).collect();
        let rels = find_relations(&f, &vals, 0).unwrap();
        assert_eq!(rels.len(), 1);
        let c: Vec<u32> = rels[0].coeffs.iter().map(|p| p.coeff(0)).collect();
        assert_eq!(c, vec![1, 1, 2]);
        assert_eq!(kspan_dim(&f, &vals, 0).unwrap(), 2);
    }

    #[test]
    fn theta_multiples_are_not_repeated() {
        let f = gf(2, 1).unwrap();
        let vals = [Px::one(&f), Px::theta(&f), Px::parse(&f, "1 + th").unwrap()];
        let vals: Vec<Px> = vals.iter().map(|v| v.truncated(60)).collect();
        // At D = 2 the space also contains theta*1 - 1*theta; all theta-multiples are dropped.
        let rels = find_relations(&f, &vals, 2).unwrap();
        assert_eq!(rels.len(), 2);
        assert_eq!(kspan_dim(&f, &vals, 2).unwrap(), 1);
    }

    #[test]
    fn short_window_rejected() {
        let f = gf(2, 1).unwrap();
        let vals = [Px::from_slots(&f, 1, 0, vec![1, 0, 1], 3), Px::from_slots(&f, 1, 0, vec![1, 1], 3)];
        assert!(matches!(find_relations(&f, &vals, 3), Err(Error::InsufficientPrecision(_))));
    }

    #[test]
    fn exact_values_use_their_digits() {
        let f = gf(2, 2).unwrap();
        let g = f.gen();
        let a = Px::from_slots(&f, 1, 0, vec![1, g, 0, 1, 1, g, 0, 0, 1], EXACT).truncated(80);
        let b = a.scale(g);
        let rels = find_relations(&f, &[a, b], 1).unwrap();
        assert_eq!(rels.len(), 1);
    }
}
