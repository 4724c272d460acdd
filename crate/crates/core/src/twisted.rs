//! Twisted polynomials `sum c_i tau^i` with `tau c = c^q tau`.

use crate::puiseux::Px;

/// Coefficient ring for [`TwistedPoly`]: a commutative ring with a q-power
/// Frobenius.
pub trait TwistCoeff: Clone {
    fn zero_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// `x^(q^n)` with `q = p^qe`.
    fn twist(&self, qe: u32, n: i64) -> Self;
}

impl TwistCoeff for Px {
    fn zero_like(&self) -> Self {
        Px::zero(self.field())
    }
    fn is_zero(&self) -> bool {
        self.is_zero_to_prec()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        self.neg_val()
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn twist(&self, qe: u32, n: i64) -> Self {
        self.frob(qe, n)
    }
}

#[derive(Debug, Clone)]
pub struct TwistedPoly<C> {
    qe: u32,
    coeffs: Vec<C>,
}

impl<C: TwistCoeff> TwistedPoly<C> {
    /// `qe` is the exponent with `q = p^qe`. Trailing zero coefficients are dropped.
    pub fn new(qe: u32, mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(TwistCoeff::is_zero) {
            coeffs.pop();
        }
        TwistedPoly { qe, coeffs }
    }

    pub fn qe(&self) -> u32 {
        self.qe
    }
    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }
    pub fn coeff(&self, i: usize) -> Option<&C> {
        self.coeffs.get(i)
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    /// Degree in `tau` (`None` for zero).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        TwistedPoly::new(self.qe, out)
    }

    pub fn neg(&self) -> Self {
        TwistedPoly::new(self.qe, self.coeffs.iter().map(TwistCoeff::neg).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Left scalar multiple `c * self`.
    pub fn scale(&self, c: &C) -> Self {
        TwistedPoly::new(self.qe, self.coeffs.iter().map(|x| c.mul(x)).collect())
    }

    /// Composition `self * other`: `(a tau^i)(b tau^j) = a b^(q^i) tau^(i+j)`.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return TwistedPoly::new(self.qe, Vec::new());
        }
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let t = a.mul(&b.twist(self.qe, i as i64));
                out[i + j] = out[i + j].add(&t);
            }
        }
        TwistedPoly::new(self.qe, out)
    }

    /// Coefficientwise twist by `n`.
    pub fn twist(&self, n: i64) -> Self {
        TwistedPoly::new(self.qe, self.coeffs.iter().map(|c| c.twist(self.qe, n)).collect())
    }
}

impl TwistedPoly<Px> {
    /// Apply as an `F_q`-linear map: `sum c_i x^(q^i)`, truncated below `limit` slots.
    pub fn apply(&self, x: &Px, limit: i64) -> Px {
        let mut acc = Px::zero(x.field());
        let mut xi = x.truncated(limit);
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                xi = xi.frob_to(self.qe, 1, limit);
            }
            if !c.is_zero_to_prec() {
                acc = &acc + &c.mul_to(&xi, limit);
            }
        }
        acc.truncated(limit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::gf;

    #[test]
    fn carlitz_square() {
        // (th + tau)^2 = th^2 + (th + th^2) tau + tau^2 over F_2.
        let f = gf(2, 1).unwrap();
        let rho = TwistedPoly::new(1, vec![Px::theta(&f), Px::one(&f)]);
        let sq = rho.mul(&rho);
        let want = [Px::theta_pow(&f, 1, 2), Px::parse(&f, "th + th^2").unwrap(), Px::one(&f)];
        assert_eq!(sq.coeffs().len(), 3);
        for (a, b) in sq.coeffs().iter().zip(&want) {
            assert!((a - b).is_zero_to_prec());
        }
    }

    #[test]
    fn composition_is_application_order() {
        let f = gf(3, 1).unwrap();
        let a = TwistedPoly::new(1, vec![Px::theta(&f), Px::constant(&f, 2)]);
        let b = TwistedPoly::new(1, vec![Px::one(&f), Px::theta(&f)]);
        let x = Px::parse(&f, "th + 1 + th^(-2)").unwrap();
        let lhs = a.mul(&b).apply(&x, 200);
        let rhs = a.apply(&b.apply(&x, 200), 200);
        assert!((&lhs - &rhs).is_zero_to_prec());
    }
}
