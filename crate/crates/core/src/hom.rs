//! Morphisms `b` with `b rho_t = rho'_t b`, searched in bounded `tau`-degree
//! over a bounded constant field extension `F_(q^d)(theta)`.
//!
//! Writing `b = sum_(n<=B) c_n tau^n`, the `tau^n` coefficient of the
//! defining equation reads
//! `c_n (theta^(q^n) - theta) = sum_(j>=1) (kappa'_j c_(n-j)^(q^j) - c_(n-j) kappa_j^(q^(n-j)))`,
//! so `c_0` determines `b` and the only constraints are that the right-hand
//! side vanishes for `B < n <= B + r`. Frobenius is `F_p`-linear, so the
//! recursion is run once per `F_p`-basis vector of the `c_0` ansatz and the
//! constraints become one linear system over `F_p`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact::DFrac;
use crate::gf::{embedding, gf, Fe, GfField};
use crate::linalg::{nullspace_codes, rank};
use crate::module::DrinfeldModule;
use crate::poly::{Poly, RationalFn, Var};
use crate::puiseux::Px;
use crate::twisted::TwistedPoly;

/// A morphism `sum c_n tau^n` with coefficients in `F_(q^d)(theta)`.
#[derive(Debug, Clone)]
pub struct Morphism {
    pub coeffs: Vec<RationalFn>,
}

impl Morphism {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
    /// The constant term, i.e. the action on the tangent space.
    pub fn c0(&self) -> &RationalFn {
        &self.coeffs[0]
    }
    pub fn field(&self) -> &Arc<GfField> {
        &self.coeffs[0].num().field
    }
    /// Expansion as a twisted polynomial with Puiseux coefficients; exact when
    /// the coefficients are polynomials, else `rel` slots of relative precision.
    pub fn to_twisted(&self, qe: u32, rel: i64) -> Result<TwistedPoly<Px>> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let n = Px::from_theta_poly(c.num());
                if c.den().degree() == Some(0) {
                    return Ok(n.scale(c.num().field.inv(c.den().lead())?));
                }
                let d = Px::from_theta_poly(c.den());
                Ok((&n * &d.inv_rel(rel)?).truncated_rel(rel))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TwistedPoly::new(qe, coeffs))
    }
    /// Polynomial coefficients, if every `c_n` is integral.
    pub fn polys(&self) -> Option<Vec<Poly>> {
        self.coeffs
            .iter()
            .map(|c| {
                let inv = c.num().field.inv(c.den().lead()).ok()?;
                (c.den().degree() == Some(0)).then(|| c.num().scale(inv))
            })
            .collect()
    }
}

/// An `F_q`-basis of morphisms found within the caps.
#[derive(Debug, Clone)]
pub struct HomBasis {
    pub morphisms: Vec<Morphism>,
    pub max_degree: usize,
    pub ext_degree: u32,
    pub field: Arc<GfField>,
}

/// Echelonized row space over `F_p`, filled one row at a time so that tall
/// systems never have to be stored.
struct RowSpace {
    field: Arc<GfField>,
    rows: Vec<(usize, Vec<Fe>)>,
}

impl RowSpace {
    fn new(field: Arc<GfField>) -> Self {
        RowSpace { field, rows: Vec::new() }
    }
    /// Reduce `v` against the stored rows; returns whether it was new.
    fn insert(&mut self, mut v: Vec<Fe>) -> bool {
        let f = &self.field;
        for (pc, row) in &self.rows {
            let c = v[*pc];
            if c != 0 {
                let factor = f.neg(c);
                for (x, &y) in v.iter_mut().zip(row) {
                    if y != 0 {
                        *x = f.add(*x, f.mul(factor, y));
                    }
                }
            }
        }
        let Some(pc) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(v[pc]).expect("nonzero pivot");
        for x in v.iter_mut() {
            *x = f.mul(*x, inv);
        }
        self.rows.push((pc, v));
        true
    }
    fn matrix(&self) -> Vec<Vec<Fe>> {
        self.rows.iter().map(|(_, r)| r.clone()).collect()
    }
}

fn lift(p: &Poly, big: &Arc<GfField>, table: &[Fe]) -> Poly {
    Poly::new(big, Var::Theta, p.coeffs().iter().map(|&c| table[c as usize]).collect())
}

fn exact_kappa(rho: &DrinfeldModule) -> Result<&[Poly]> {
    rho.kappa_poly()
        .ok_or_else(|| Error::BadField("morphism search needs coefficients in F_q[theta]".into()))
}

/// `c_0..c_B` and the residuals at `B < n <= B + r` for one choice of `c_0`.
fn recursion(
    q: u64,
    qe: u32,
    k1: &[DFrac],
    k2: &[DFrac],
    c0: DFrac,
    b: usize,
) -> (Vec<DFrac>, Vec<DFrac>) {
    let r = k1.len().max(k2.len());
    let mut c = vec![c0];
    let mut residuals = Vec::new();
    for n in 1..=b + r {
        let mut s = DFrac::zero(q, c[0].field());
        for j in 1..=n.min(r) {
            let Some(prev) = c.get(n - j) else { continue };
            if prev.is_zero() {
                continue;
            }
            if let Some(kp) = k2.get(j - 1) {
                s = s.add(&kp.mul(&prev.frob(qe, j as u32)));
            }
            if let Some(k) = k1.get(j - 1) {
                s = s.sub(&prev.mul(&k.frob(qe, (n - j) as u32)));
            }
        }
        if n <= b {
            c.push(s.div_d(n as u32, 1));
        } else {
            residuals.push(s);
        }
    }
    (c, residuals)
}

fn to_rational(x: &DFrac) -> RationalFn {
    let den = x.den_poly();
    match x.num().div_rem(&den) {
        Ok((quo, rem)) if rem.is_zero() => RationalFn::from_poly(quo),
        _ => x.to_rational(),
    }
}

/// An `F_q`-basis of `{b : deg_tau b <= B, b rho_t = rho'_t b}` with
/// coefficients in `F_(q^d)(theta)`, the constant term ranging over
/// `F_(q^d)[theta]` of degree at most `B`.
pub fn hom_solver(rho: &DrinfeldModule, rho2: &DrinfeldModule, b: usize, d: u32) -> Result<HomBasis> {
    if rho.q() != rho2.q() {
        return Err(Error::BadField("modules over different F_q".into()));
    }
    let (p, qe) = (rho.characteristic(), rho.qe());
    let q = rho.q() as u64;
    let big = gf(p, qe * d)?;
    let fp = gf(p, 1)?;
    let table = embedding(rho.base_field(), &big)?;
    let to_d = |ks: &[Poly]| ks.iter().map(|k| DFrac::from_poly(q, lift(k, &big, &table))).collect::<Vec<_>>();
    let k1 = to_d(exact_kappa(rho)?);
    let k2 = to_d(exact_kappa(rho2)?);

    // Unknowns: F_p-digits of the coefficients of c_0, indexed (k, l).
    let width = big.degree() as usize;
    let unknowns = (b + 1) * width;
    let runs: Vec<(Vec<DFrac>, Vec<DFrac>)> = (0..unknowns)
        .map(|u| {
            let (k, l) = (u / width, u % width);
            let gamma = (p as Fe).pow(l as u32);
            let c0 = DFrac::from_poly(q, Poly::monomial(&big, Var::Theta, gamma, k));
            recursion(q, qe, &k1, &k2, c0, b)
        })
        .collect();

    let mut space = RowSpace::new(fp.clone());
    let n_res = runs[0].1.len();
    for i in 0..n_res {
        let fracs: Vec<DFrac> = runs.iter().map(|r| r.1[i].clone()).collect();
        let nums = DFrac::common_numerators(&fracs);
        let len = nums.iter().map(|n| n.coeffs().len()).max().unwrap_or(0);
        for idx in 0..len {
            let digits: Vec<Vec<u32>> = nums.iter().map(|n| big.digits(n.coeff(idx))).collect();
            for t in 0..width {
                let row: Vec<Fe> = digits.iter().map(|dg| dg[t]).collect();
                if row.iter().any(|&x| x != 0) {
                    space.insert(row);
                }
            }
        }
    }
    let kernel = nullspace_codes(&fp, &space.matrix(), unknowns);

    // F_q-closure: the solution set is an F_q-space, keep one generator per F_q-line.
    let fq_basis: Vec<Fe> = (0..qe).map(|l| table[(p as usize).pow(l)]).collect();
    let mut span = RowSpace::new(fp.clone());
    let mut chosen: Vec<Vec<Fe>> = Vec::new();
    for x in kernel {
        let coeffs: Vec<Fe> = x.chunks(width).map(|dg| big.from_digits(dg)).collect();
        if !span.insert(x.clone()) {
            continue;
        }
        for &beta in &fq_basis[1..] {
            let scaled: Vec<u32> = coeffs.iter().flat_map(|&c| big.digits(big.mul(beta, c))).collect();
            span.insert(scaled);
        }
        chosen.push(coeffs);
    }

    let mut morphisms: Vec<Morphism> = chosen
        .iter()
        .map(|c0| {
            let c0 = DFrac::from_poly(q, Poly::new(&big, Var::Theta, c0.clone()));
            let (cs, _) = recursion(q, qe, &k1, &k2, c0, b);
            let mut coeffs: Vec<RationalFn> = cs.iter().map(to_rational).collect();
            while coeffs.len() > 1 && coeffs.last().is_some_and(RationalFn::is_zero) {
                coeffs.pop();
            }
            Morphism { coeffs }
        })
        .collect();
    morphisms.sort_by_key(|m| (m.degree(), m.c0().num().degree()));
    Ok(HomBasis { morphisms, max_degree: b, ext_degree: d, field: big })
}

/// `F_q`-coordinates of the elements of `F_(q^d)` in the basis `1, g, .., g^(d-1)`.
fn fq_coordinates(base: &GfField, big: &Arc<GfField>, d: u32) -> Result<Vec<Vec<Fe>>> {
    let table = embedding(base, big)?;
    let g = big.gen();
    let powers: Vec<Fe> = (0..d).map(|i| big.pow(g, i as u64)).collect();
    let q = base.size() as usize;
    let mut coords = vec![Vec::new(); big.size() as usize];
    for idx in 0..q.pow(d) {
        let mut rest = idx;
        let mut x = 0;
        let mut tuple = Vec::with_capacity(d as usize);
        for &gp in &powers {
            let a = (rest % q) as Fe;
            rest /= q;
            x = big.add(x, big.mul(table[a as usize], gp));
            tuple.push(a);
        }
        coords[x as usize] = tuple;
    }
    Ok(coords)
}

/// `dim_k` of the `k`-span of the constant terms of `basis` inside `F_(q^d)(theta)`.
pub fn kspan_of_constants(base: &Arc<GfField>, basis: &HomBasis) -> Result<usize> {
    if basis.morphisms.is_empty() {
        return Ok(0);
    }
    let d = basis.ext_degree;
    let coords = fq_coordinates(base, &basis.field, d)?;
    let rows: Vec<Vec<RationalFn>> = basis
        .morphisms
        .iter()
        .map(|m| {
            let c0 = m.c0();
            let num = c0.num();
            // Denominators of c_0 are 1 by construction.
            let inv = basis.field.inv(c0.den().lead()).expect("nonzero");
            (0..d as usize)
                .map(|i| {
                    let v = num.coeffs().iter().map(|&c| coords[basis.field.mul(c, inv) as usize][i]).collect();
                    RationalFn::from_poly(Poly::new(base, Var::Theta, v))
                })
                .collect()
        })
        .collect();
    Ok(rank(&rows))
}

/// Result of [`endo_ring_degree`].
#[derive(Debug, Clone)]
pub struct EndoDegree {
    pub s: usize,
    pub basis: HomBasis,
}

/// `s = [K_rho : k]` from endomorphisms of degree `<= B` over `F_(q^d)`,
/// cross-checked against the caps `(B + 1, d)` and `(B, 2d)`.
pub fn endo_ring_degree(rho: &DrinfeldModule, b: usize, d: u32) -> Result<EndoDegree> {
    let basis = hom_solver(rho, rho, b, d)?;
    let s = kspan_of_constants(rho.base_field(), &basis)?;
    for (b2, d2) in [(b + 1, d), (b, 2 * d)] {
        let other = kspan_of_constants(rho.base_field(), &hom_solver(rho, rho, b2, d2)?)?;
        if other != s {
            return Err(Error::InconclusiveBound(format!(
                "s = {s} at (B, d) = ({b}, {d}) but {other} at ({b2}, {d2})"
            )));
        }
    }
    Ok(EndoDegree { s, basis })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::Precision;

    fn module(q: u32, kappa: &[&[u32]]) -> DrinfeldModule {
        let (p, e) = crate::module::prime_power(q).unwrap();
        let f = gf(p, e).unwrap();
        let polys = kappa.iter().map(|c| Poly::new(&f, Var::Theta, c.to_vec())).collect();
        DrinfeldModule::from_polys(q, polys, Precision::default()).unwrap()
    }

    #[test]
    fn carlitz_degree_one_is_one_and_rho_t() {
        let m = module(3, &[&[1]]);
        let h = hom_solver(&m, &m, 1, 1).unwrap();
        assert_eq!(h.morphisms.len(), 2);
        let polys: Vec<Vec<Poly>> = h.morphisms.iter().map(|b| b.polys().unwrap()).collect();
        assert_eq!(polys[0].len(), 1);
        assert_eq!(polys[0][0].coeffs(), &[1]);
        // theta + tau up to an F_q^x scalar
        assert_eq!(polys[1].len(), 2);
        let c = polys[1][1].coeff(0);
        assert_ne!(c, 0);
        assert_eq!(polys[1][0].coeffs(), &[0, c]);
    }

    #[test]
    fn identity_always_present() {
        let m = module(2, &[&[0, 1], &[1]]);
        let h = hom_solver(&m, &m, 0, 1).unwrap();
        assert_eq!(h.morphisms.len(), 1);
    }

    #[test]
    fn cm_by_fq2() {
        let m = module(2, &[&[0], &[1]]);
        let h = hom_solver(&m, &m, 0, 2).unwrap();
        assert_eq!(h.morphisms.len(), 2);
        let e = endo_ring_degree(&m, 4, 2).unwrap();
        assert_eq!(e.s, 2);
    }

    #[test]
    fn generic_rank_two_has_s_one() {
        let m = module(2, &[&[1], &[1]]);
        assert_eq!(endo_ring_degree(&m, 4, 2).unwrap().s, 1);
        let c = module(2, &[&[1]]);
        assert_eq!(endo_ring_degree(&c, 2, 1).unwrap().s, 1);
    }

    #[test]
    fn morphisms_satisfy_the_equation() {
        let m = module(2, &[&[0], &[1]]);
        let h = hom_solver(&m, &m, 4, 2).unwrap();
        let rho = m.rho_t();
        for b in &h.morphisms {
            let tb = b.to_twisted(1, 64).unwrap();
            let lhs = tb.mul(&rho).sub(&rho.mul(&tb));
            assert!(lhs.coeffs().iter().all(|c| c.val_or_cap() >= num_rational::Ratio::from_integer(40)));
        }
    }
}
