//! Dense univariate polynomials and rational functions over a finite field.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{Fe, GfField};

/// Which indeterminate a polynomial is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    Theta,
    T,
}

impl Var {
    pub fn symbol(self) -> &'static str {
        match self {
            Var::Theta => "th",
            Var::T => "t",
        }
    }
}

#[derive(Clone)]
pub struct Poly {
    pub field: Arc<GfField>,
    pub var: Var,
    coeffs: Vec<Fe>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.var == other.var && self.coeffs == other.coeffs
    }
}
impl Eq for Poly {}

impl Poly {
    pub fn new(field: &Arc<GfField>, var: Var, mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { field: field.clone(), var, coeffs }
    }
    pub fn zero(field: &Arc<GfField>, var: Var) -> Self {
        Poly::new(field, var, Vec::new())
    }
    pub fn constant(field: &Arc<GfField>, var: Var, c: Fe) -> Self {
        Poly::new(field, var, vec![c])
    }
    pub fn one(field: &Arc<GfField>, var: Var) -> Self {
        Poly::constant(field, var, 1)
    }
    /// `c * x^k`.
    pub fn monomial(field: &Arc<GfField>, var: Var, c: Fe, k: usize) -> Self {
        let mut v = vec![0; k + 1];
        v[k] = c;
        Poly::new(field, var, v)
    }
    pub fn x(field: &Arc<GfField>, var: Var) -> Self {
        Poly::monomial(field, var, 1, 1)
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }
    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(0)
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
    pub fn lead(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(0)
    }

    fn same(&self, other: &Self) {
        assert!(self.field == other.field && self.var == other.var, "polynomial ring mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same(other);
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        Poly::new(f, self.var, v)
    }
    pub fn neg(&self) -> Self {
        let v = self.coeffs.iter().map(|&c| self.field.neg(c)).collect();
        Poly::new(&self.field, self.var, v)
    }
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
    pub fn scale(&self, c: Fe) -> Self {
        let v = self.coeffs.iter().map(|&x| self.field.mul(x, c)).collect();
        Poly::new(&self.field, self.var, v)
    }
    pub fn mul(&self, other: &Self) -> Self {
        self.same(other);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.field, self.var);
        }
        let f = &self.field;
        let mut v = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                v[i + j] = f.add(v[i + j], f.mul(a, b));
            }
        }
        Poly::new(f, self.var, v)
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        self.same(d);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = &self.field;
        let dd = d.coeffs.len() - 1;
        let inv = f.inv(d.lead())?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(f, self.var), self.clone()));
        }
        let mut q = vec![0; r.len() - dd];
        for k in (dd..r.len()).rev() {
            let c = f.mul(r[k], inv);
            if c == 0 {
                continue;
            }
            q[k - dd] = c;
            for (i, &di) in d.coeffs.iter().enumerate() {
                r[k - dd + i] = f.sub(r[k - dd + i], f.mul(c, di));
            }
        }
        Ok((Poly::new(f, self.var, q), Poly::new(f, self.var, r)))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.field.inv(self.lead()).expect("nonzero lead");
        self.scale(inv)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: Fe) -> Fe {
        let f = &self.field;
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Coefficientwise `c -> c^(p^k)`.
    pub fn frob_coeffs(&self, k: i64) -> Self {
        let v = self.coeffs.iter().map(|&c| self.field.frob_p(c, k)).collect();
        Poly::new(&self.field, self.var, v)
    }

    /// `self(x^m)`.
    pub fn stretch(&self, m: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![0; (self.coeffs.len() - 1) * m + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            v[i * m] = c;
        }
        Poly::new(&self.field, self.var, v)
    }

    /// `self^(p^k)` for `k >= 0`: Frobenius on coefficients and exponents.
    pub fn pow_p(&self, k: u32) -> Self {
        let m = (self.field.characteristic() as usize).pow(k);
        self.frob_coeffs(k as i64).stretch(m)
    }

    pub fn shift(&self, k: usize) -> Self {
        let mut v = vec![0; k];
        v.extend_from_slice(&self.coeffs);
        Poly::new(&self.field, self.var, v)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let sym = self.var.symbol();
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let cs = self.field.format(c);
            let cs = if cs.contains('+') { format!("({cs})") } else { cs };
            let mono = match i {
                0 => String::new(),
                1 => sym.to_string(),
                _ => format!("{sym}^{i}"),
            };
            terms.push(match (i, cs.as_str()) {
                (0, _) => cs,
                (_, "1") => mono,
                _ => format!("{cs}*{mono}"),
            });
        }
        write!(f, "{}", terms.join("+"))
    }
}

/// Rational function `num/den` in lowest terms with monic denominator.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            let one = Poly::one(&den.field, den.var);
            return Ok(RationalFn { num, den: one });
        }
        let g = num.gcd(&den);
        let (n, _) = num.div_rem(&g)?;
        let (d, _) = den.div_rem(&g)?;
        let lc = d.field.inv(d.lead())?;
        Ok(RationalFn { num: n.scale(lc), den: d.scale(lc) })
    }
    pub fn from_poly(p: Poly) -> Self {
        let one = Poly::one(&p.field, p.var);
        RationalFn { num: p, den: one }
    }
    pub fn zero(field: &Arc<GfField>, var: Var) -> Self {
        RationalFn::from_poly(Poly::zero(field, var))
    }
    pub fn one(field: &Arc<GfField>, var: Var) -> Self {
        RationalFn::from_poly(Poly::one(field, var))
    }
    pub fn num(&self) -> &Poly {
        &self.num
    }
    pub fn den(&self) -> &Poly {
        &self.den
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    pub fn add(&self, o: &Self) -> Self {
        let n = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        RationalFn::new(n, self.den.mul(&o.den)).expect("nonzero denominators")
    }
    pub fn neg(&self) -> Self {
        RationalFn { num: self.num.neg(), den: self.den.clone() }
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &Self) -> Self {
        RationalFn::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero denominators")
    }
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RationalFn::new(self.den.clone(), self.num.clone())
    }
    /// Power-series expansion at 0 up to `len` terms; requires `den(0) != 0`.
    pub fn expand(&self, len: usize) -> Result<Vec<Fe>> {
        let f = &self.num.field;
        let d0 = self.den.coeff(0);
        let inv0 = f.inv(d0)?;
        let mut out = vec![0; len];
        for n in 0..len {
            let mut acc = self.num.coeff(n);
            for k in 1..=n.min(self.den.coeffs().len().saturating_sub(1)) {
                acc = f.sub(acc, f.mul(self.den.coeff(k), out[n - k]));
            }
            out[n] = f.mul(acc, inv0);
        }
        Ok(out)
    }
    /// Value at a point; `None` at a pole.
    pub fn eval(&self, x: Fe) -> Option<Fe> {
        let d = self.den.eval(x);
        let f = &self.num.field;
        f.inv(d).ok().map(|di| f.mul(self.num.eval(x), di))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::gf;

    #[test]
    fn division_with_remainder() {
        let f = gf(3, 1).unwrap();
        let a = Poly::new(&f, Var::T, vec![1, 2, 0, 1]);
        let d = Poly::new(&f, Var::T, vec![2, 1]);
        let (q, r) = a.div_rem(&d).unwrap();
        assert_eq!(q.mul(&d).add(&r), a);
        assert!(r.degree().is_none_or(|x| x < 1));
    }

    #[test]
    fn rational_lowest_terms() {
        let f = gf(2, 1).unwrap();
        let x = Poly::x(&f, Var::T);
        let one = Poly::one(&f, Var::T);
        let xp1 = x.add(&one);
        let r = RationalFn::new(x.mul(&xp1), xp1.mul(&xp1)).unwrap();
        assert_eq!(r.num(), &x);
        assert_eq!(r.den(), &xp1);
    }

    #[test]
    fn pow_p_is_frobenius() {
        let f = gf(3, 2).unwrap();
        let a = Poly::new(&f, Var::Theta, vec![5, 1, 7]);
        let cube = a.mul(&a).mul(&a);
        assert_eq!(a.pow_p(1), cube);
    }

    #[test]
    fn display_uses_th() {
        let f = gf(2, 1).unwrap();
        let a = Poly::new(&f, Var::Theta, vec![1, 1, 1]);
        assert_eq!(a.to_string(), "th^2+th+1");
    }
}
