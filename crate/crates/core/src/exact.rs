//! Exact exponential and logarithm coefficients over `F_q(theta)`.
//!
//! Every coefficient of `exp_rho` and `log_rho` has a denominator built from
//! `D_k = theta^(q^k) - theta`, and powers `D_k^(q^m) = theta^(q^(k+m)) - theta^(q^m)`
//! are binomials. [`DFrac`] keeps the denominator as exponents of the `D_k`, so
//! bringing fractions to a common denominator only ever multiplies by sparse
//! binomials and stays cheap even when numerators have degree in the millions.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::gf::{Fe, GfField};
use crate::poly::{Poly, RationalFn, Var};
use crate::puiseux::Px;
use crate::twisted::{TwistCoeff, TwistedPoly};

/// `num / prod_k D_k^(den[k])` with `D_k = theta^(q^k) - theta`.
#[derive(Debug, Clone)]
pub struct DFrac {
    q: u64,
    num: Poly,
    den: BTreeMap<u32, u64>,
}

/// Product of two coefficient vectors, iterating over the sparser one.
fn mul_sparse(field: &GfField, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let nz = |v: &[Fe]| v.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c)).collect::<Vec<_>>();
    let (na, nb) = (nz(a), nz(b));
    let mut out = vec![0; a.len() + b.len() - 1];
    let (small, big) = if na.len() <= nb.len() { (na, nb) } else { (nb, na) };
    for &(i, x) in &small {
        for &(j, y) in &big {
            out[i + j] = field.add(out[i + j], field.mul(x, y));
        }
    }
    out
}

/// Multiply by `theta^hi - theta^lo` in place.
fn mul_binomial(field: &GfField, a: &[Fe], hi: usize, lo: usize) -> Vec<Fe> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + hi];
    for (i, &c) in a.iter().enumerate() {
        if c != 0 {
            out[i + hi] = field.add(out[i + hi], c);
            out[i + lo] = field.sub(out[i + lo], c);
        }
    }
    out
}

impl DFrac {
    pub fn from_poly(q: u64, num: Poly) -> DFrac {
        assert_eq!(num.var, Var::Theta);
        DFrac { q, num, den: BTreeMap::new() }
    }
    pub fn zero(q: u64, field: &Arc<GfField>) -> DFrac {
        DFrac::from_poly(q, Poly::zero(field, Var::Theta))
    }
    pub fn one(q: u64, field: &Arc<GfField>) -> DFrac {
        DFrac::from_poly(q, Poly::one(field, Var::Theta))
    }
    pub fn theta_pow(q: u64, field: &Arc<GfField>, k: usize) -> DFrac {
        DFrac::from_poly(q, Poly::monomial(field, Var::Theta, 1, k))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }
    /// Exponent of `D_k` in the denominator.
    pub fn den_exponent(&self, k: u32) -> u64 {
        self.den.get(&k).copied().unwrap_or(0)
    }
    pub fn field(&self) -> &Arc<GfField> {
        &self.num.field
    }

    /// Divide by `D_k^e`.
    pub fn div_d(&self, k: u32, e: u64) -> DFrac {
        let mut den = self.den.clone();
        *den.entry(k).or_insert(0) += e;
        DFrac { q: self.q, num: self.num.clone(), den }
    }

    /// Multiply the numerator by `D_k^e`, expanded through the base-q digits of `e`.
    fn num_times_d(&self, num: Vec<Fe>, k: u32, mut e: u64) -> Vec<Fe> {
        let f = &self.num.field;
        let mut out = num;
        let mut qm: u64 = 1;
        while e > 0 {
            let digit = e % self.q;
            let hi = (self.q.pow(k) * qm) as usize;
            for _ in 0..digit {
                out = mul_binomial(f, &out, hi, qm as usize);
            }
            e /= self.q;
            qm *= self.q;
        }
        out
    }

    /// Numerator after scaling to the denominator `den` (which must dominate ours).
    fn num_over(&self, den: &BTreeMap<u32, u64>) -> Vec<Fe> {
        let mut v = self.num.coeffs().to_vec();
        for (&k, &e) in den {
            let mine = self.den_exponent(k);
            if e > mine {
                v = self.num_times_d(v, k, e - mine);
            }
        }
        v
    }

    pub fn add(&self, o: &DFrac) -> DFrac {
        if o.num.is_zero() {
            return self.clone();
        }
        if self.num.is_zero() {
            return o.clone();
        }
        let mut den = self.den.clone();
        for (&k, &e) in &o.den {
            let slot = den.entry(k).or_insert(0);
            *slot = (*slot).max(e);
        }
        let a = self.num_over(&den);
        let b = o.num_over(&den);
        let f = &self.num.field;
        let n = a.len().max(b.len());
        let v = (0..n)
            .map(|i| f.add(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0)))
            .collect();
        DFrac { q: self.q, num: Poly::new(f, Var::Theta, v), den }
    }

    pub fn neg(&self) -> DFrac {
        DFrac { q: self.q, num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &DFrac) -> DFrac {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &DFrac) -> DFrac {
        let f = &self.num.field;
        let num = Poly::new(f, Var::Theta, mul_sparse(f, self.num.coeffs(), o.num.coeffs()));
        let mut den = self.den.clone();
        for (&k, &e) in &o.den {
            *den.entry(k).or_insert(0) += e;
        }
        DFrac { q: self.q, num, den }
    }

    /// `x^(q^n)` for `n >= 0`.
    pub fn frob(&self, qe: u32, n: u32) -> DFrac {
        let qn = self.q.pow(n);
        let num = self.num.frob_coeffs(qe as i64 * n as i64).stretch(qn as usize);
        let den = self.den.iter().map(|(&k, &e)| (k, e * qn)).collect();
        DFrac { q: self.q, num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Numerators of `fracs` over their least common `D`-denominator.
    pub fn common_numerators(fracs: &[DFrac]) -> Vec<Poly> {
        let mut den = BTreeMap::new();
        for f in fracs {
            for (&k, &e) in &f.den {
                let slot = den.entry(k).or_insert(0);
                *slot = (*slot).max(e);
            }
        }
        fracs.iter().map(|f| Poly::new(f.field(), Var::Theta, f.num_over(&den))).collect()
    }

    /// Expanded denominator as a polynomial.
    pub fn den_poly(&self) -> Poly {
        let f = &self.num.field;
        let mut v = vec![1];
        for (&k, &e) in &self.den {
            v = self.num_times_d(v, k, e);
        }
        Poly::new(f, Var::Theta, v)
    }

    /// Reduced rational function in `theta` (for small cases).
    pub fn to_rational(&self) -> RationalFn {
        RationalFn::new(self.num.clone(), self.den_poly()).expect("nonzero denominator")
    }

    /// Puiseux expansion with `rel` slots of relative precision.
    pub fn to_px(&self, rel: i64) -> Px {
        let f = &self.num.field;
        let mut v = Px::from_theta_poly(&self.num);
        for (&k, &e) in &self.den {
            let mut e = e;
            let mut qm: u64 = 1;
            while e > 0 {
                let digit = e % self.q;
                if digit > 0 {
                    let hi = (self.q.pow(k) * qm) as i64;
                    let b = &Px::theta_pow(f, 1, hi) - &Px::theta_pow(f, 1, qm as i64);
                    let inv = b.inv_rel(rel).expect("nonzero binomial");
                    for _ in 0..digit {
                        v = (&v * &inv).truncated_rel(rel);
                    }
                }
                e /= self.q;
                qm *= self.q;
            }
        }
        v
    }
}

impl TwistCoeff for DFrac {
    fn zero_like(&self) -> Self {
        DFrac::zero(self.q, self.field())
    }
    fn is_zero(&self) -> bool {
        DFrac::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        DFrac::add(self, o)
    }
    fn neg(&self) -> Self {
        DFrac::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        DFrac::mul(self, o)
    }
    fn twist(&self, qe: u32, n: i64) -> Self {
        assert!(n >= 0, "inverse Frobenius is not defined on F_q(theta)");
        self.frob(qe, n as u32)
    }
}

/// Exact `alpha_0..alpha_I` for `rho_t = theta + sum kappa_j tau^j` with
/// `kappa_j` in `F_q[theta]`.
pub fn exact_exp_coeffs(q: u64, qe: u32, kappa: &[Poly], count: usize) -> Vec<DFrac> {
    let field = &kappa[0].field;
    let kap: Vec<DFrac> = kappa.iter().map(|k| DFrac::from_poly(q, k.clone())).collect();
    let mut alpha = vec![DFrac::one(q, field)];
    for i in 1..=count {
        let mut s = DFrac::zero(q, field);
        for j in 1..=i.min(kap.len()) {
            s = s.add(&kap[j - 1].mul(&alpha[i - j].frob(qe, j as u32)));
        }
        alpha.push(s.div_d(i as u32, 1));
    }
    alpha
}

/// Exact `beta_0..beta_I` with `beta_i (theta - theta^(q^i)) = sum_j beta_(i-j) kappa_j^(q^(i-j))`.
pub fn exact_log_coeffs(q: u64, qe: u32, kappa: &[Poly], count: usize) -> Vec<DFrac> {
    let field = &kappa[0].field;
    let kap: Vec<DFrac> = kappa.iter().map(|k| DFrac::from_poly(q, k.clone())).collect();
    let mut beta = vec![DFrac::one(q, field)];
    for i in 1..=count {
        let mut s = DFrac::zero(q, field);
        for j in 1..=i.min(kap.len()) {
            s = s.add(&beta[i - j].mul(&kap[j - 1].frob(qe, (i - j) as u32)));
        }
        beta.push(s.neg().div_d(i as u32, 1));
    }
    beta
}

/// Truncated composition `a * b` keeping only `tau` degrees `<= max_deg`.
pub fn compose_trunc(a: &TwistedPoly<DFrac>, b: &TwistedPoly<DFrac>, max_deg: usize) -> Vec<DFrac> {
    let sample = &a.coeffs()[0];
    let mut out = vec![sample.zero_like(); max_deg + 1];
    for (i, x) in a.coeffs().iter().enumerate().take(max_deg + 1) {
        for (j, y) in b.coeffs().iter().enumerate().take(max_deg + 1 - i) {
            if x.is_zero() || y.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].add(&x.mul(&y.frob(a.qe(), i as u32)));
        }
    }
    out
}

/// Coefficients of `exp(theta z) - rho_t(exp(z))` through `z^(q^I)`, computed
/// by twisted-polynomial composition. All entries vanish for a correct table.
pub fn exp_functional_residual(q: u64, qe: u32, kappa: &[Poly], count: usize) -> Vec<DFrac> {
    let field = &kappa[0].field;
    let alpha = exact_exp_coeffs(q, qe, kappa, count);
    let e = TwistedPoly::new(qe, alpha);
    let theta = TwistedPoly::new(qe, vec![DFrac::theta_pow(q, field, 1)]);
    let mut rho = vec![DFrac::theta_pow(q, field, 1)];
    rho.extend(kappa.iter().map(|k| DFrac::from_poly(q, k.clone())));
    let rho = TwistedPoly::new(qe, rho);
    let lhs = compose_trunc(&e, &theta, count);
    let rhs = compose_trunc(&rho, &e, count);
    lhs.iter().zip(&rhs).map(|(a, b)| a.sub(b)).collect()
}

/// Coefficients of `exp(log(z)) - z` through `z^(q^I)`.
pub fn exp_log_residual(q: u64, qe: u32, kappa: &[Poly], count: usize) -> Vec<DFrac> {
    let field = &kappa[0].field;
    let e = TwistedPoly::new(qe, exact_exp_coeffs(q, qe, kappa, count));
    let l = TwistedPoly::new(qe, exact_log_coeffs(q, qe, kappa, count));
    let mut comp = compose_trunc(&e, &l, count);
    comp[0] = comp[0].sub(&DFrac::one(q, field));
    comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::gf;

    fn th(field: &Arc<GfField>, c: &[Fe]) -> Poly {
        Poly::new(field, Var::Theta, c.to_vec())
    }

    #[test]
    fn carlitz_alpha_one_and_two() {
        let f = gf(2, 1).unwrap();
        let a = exact_exp_coeffs(2, 1, &[th(&f, &[1])], 2);
        // alpha_1 = 1/(th^2 + th)
        let want1 = RationalFn::new(th(&f, &[1]), th(&f, &[0, 1, 1])).unwrap();
        assert_eq!(a[1].to_rational(), want1);
        // alpha_2 = 1/((th^2+th)^2 (th^4+th))
        let d1 = th(&f, &[0, 1, 1]);
        let d2 = th(&f, &[0, 1, 0, 0, 1]);
        let want2 = RationalFn::new(th(&f, &[1]), d1.mul(&d1).mul(&d2)).unwrap();
        assert_eq!(a[2].to_rational(), want2);
    }

    #[test]
    fn carlitz_beta_one() {
        let f = gf(3, 1).unwrap();
        let b = exact_log_coeffs(3, 1, &[th(&f, &[1])], 1);
        // 1/(th - th^3)
        let want = RationalFn::new(th(&f, &[1]), th(&f, &[0, 1, 0, 2])).unwrap();
        assert_eq!(b[1].to_rational(), want);
    }

    #[test]
    fn functional_equation_rank_two_q3() {
        let f = gf(3, 1).unwrap();
        let kappa = [th(&f, &[1, 2]), th(&f, &[1])];
        for r in exp_functional_residual(3, 1, &kappa, 5) {
            assert!(r.is_zero());
        }
    }

    #[test]
    fn exp_log_inverse_rank_two() {
        let f = gf(2, 1).unwrap();
        let kappa = [th(&f, &[0, 1, 1]), th(&f, &[1, 1])];
        for r in exp_log_residual(2, 1, &kappa, 6) {
            assert!(r.is_zero());
        }
    }

    #[test]
    fn puiseux_expansion_matches() {
        let f = gf(2, 1).unwrap();
        let a = exact_exp_coeffs(2, 1, &[th(&f, &[1])], 2);
        // alpha_1 = th^-2 (1 + th^-1)^-1 = th^-2 + th^-3 + ...
        let v = a[1].to_px(10);
        assert_eq!(v.valuation(), Some(num_rational::Ratio::from_integer(2)));
        assert_eq!(&v.coeffs()[..4], &[1, 1, 1, 1]);
    }
}
