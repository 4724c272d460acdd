//! Drinfeld `F_q[t]`-modules `rho_t = theta + kappa_1 tau + ... + kappa_r tau^r`,
//! with their exponential and logarithm.

use std::sync::{Arc, Mutex};

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::gf::{gf, GfField};
use crate::newton::{newton_roots, RootOptions};
use crate::poly::{Poly, Var};
use crate::puiseux::Px;
use crate::twisted::TwistedPoly;

/// Monotone window used to certify convergence of the logarithm.
pub const LOG_WINDOW: usize = 5;
/// Largest `q^i` handled when summing series.
const MAX_QPOW: i64 = 1 << 40;

/// Working precision: results are certified modulo `theta^(-target)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Precision {
    /// Target absolute valuation cap.
    pub target: i64,
    /// Extra valuation carried internally.
    pub guard: i64,
    /// Truncation order in `t` for generating functions.
    pub t_trunc: usize,
}

impl Default for Precision {
    fn default() -> Self {
        Precision { target: 40, guard: 24, t_trunc: 48 }
    }
}

impl Precision {
    pub fn working(&self) -> Ratio<i64> {
        Ratio::from_integer(self.target + self.guard)
    }
    pub fn target_val(&self) -> Ratio<i64> {
        Ratio::from_integer(self.target)
    }
}

/// Slot index corresponding to valuation `v` in ramification `ram` (rounded up).
pub fn slots(v: Ratio<i64>, ram: u32) -> i64 {
    (v * ram as i64).ceil().to_integer()
}

#[derive(Debug)]
pub struct DrinfeldModule {
    p: u32,
    qe: u32,
    base: Arc<GfField>,
    kappa: Vec<Px>,
    kappa_poly: Option<Vec<Poly>>,
    prec: Precision,
    alpha: Mutex<Vec<Px>>,
    beta: Mutex<Vec<Px>>,
}

impl Clone for DrinfeldModule {
    fn clone(&self) -> Self {
        DrinfeldModule {
            p: self.p,
            qe: self.qe,
            base: self.base.clone(),
            kappa: self.kappa.clone(),
            kappa_poly: self.kappa_poly.clone(),
            prec: self.prec,
            alpha: Mutex::new(self.alpha.lock().unwrap().clone()),
            beta: Mutex::new(self.beta.lock().unwrap().clone()),
        }
    }
}

/// Split `q = p^e`.
pub fn prime_power(q: u32) -> Result<(u32, u32)> {
    if q < 2 {
        return Err(Error::BadField(format!("q = {q}")));
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap();
    let mut e = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        e += 1;
    }
    if r != 1 {
        return Err(Error::BadField(format!("q = {q} is not a prime power")));
    }
    Ok((p, e))
}

impl DrinfeldModule {
    /// Module over `F_q` with Puiseux coefficients `kappa_1..kappa_r`.
    pub fn new(q: u32, kappa: Vec<Px>, prec: Precision) -> Result<DrinfeldModule> {
        let (p, qe) = prime_power(q)?;
        let base = gf(p, qe)?;
        let Some(last) = kappa.last() else {
            return Err(Error::BadField("rank must be at least 1".into()));
        };
        if last.is_zero_to_prec() {
            return Err(Error::BadField("leading coefficient kappa_r vanishes".into()));
        }
        if kappa.iter().any(|k| k.field().characteristic() != p || k.field().degree() % qe != 0) {
            return Err(Error::BadField("coefficients must lie in an extension of F_q".into()));
        }
        Ok(DrinfeldModule {
            p,
            qe,
            base,
            kappa,
            kappa_poly: None,
            prec,
            alpha: Mutex::new(Vec::new()),
            beta: Mutex::new(Vec::new()),
        })
    }

    /// Module whose coefficients are polynomials in `theta` over `F_{q^d}`.
    pub fn from_polys(q: u32, kappa: Vec<Poly>, prec: Precision) -> Result<DrinfeldModule> {
        let px = kappa.iter().map(Px::from_theta_poly).collect();
        let mut m = DrinfeldModule::new(q, px, prec)?;
        m.kappa_poly = Some(kappa);
        Ok(m)
    }

    /// The Carlitz module `theta + tau`.
    pub fn carlitz(q: u32, prec: Precision) -> Result<DrinfeldModule> {
        let (p, qe) = prime_power(q)?;
        let f = gf(p, qe)?;
        DrinfeldModule::from_polys(q, vec![Poly::one(&f, Var::Theta)], prec)
    }

    pub fn q(&self) -> u32 {
        self.p.pow(self.qe)
    }
    pub fn qe(&self) -> u32 {
        self.qe
    }
    pub fn characteristic(&self) -> u32 {
        self.p
    }
    pub fn rank(&self) -> usize {
        self.kappa.len()
    }
    pub fn base_field(&self) -> &Arc<GfField> {
        &self.base
    }
    /// Field holding the coefficients (an extension of `F_q`).
    pub fn coeff_field(&self) -> Arc<GfField> {
        let mut f = self.base.clone();
        for k in &self.kappa {
            f = crate::gf::common_field(&f, k.field()).expect("same characteristic");
        }
        f
    }
    pub fn kappa(&self) -> &[Px] {
        &self.kappa
    }
    pub fn kappa_poly(&self) -> Option<&[Poly]> {
        self.kappa_poly.as_deref()
    }
    pub fn precision(&self) -> Precision {
        self.prec
    }
    pub fn with_precision(&self, prec: Precision) -> DrinfeldModule {
        let mut m = self.clone();
        if prec != self.prec {
            m.prec = prec;
            m.alpha = Mutex::new(Vec::new());
            m.beta = Mutex::new(Vec::new());
        }
        m
    }
    pub fn is_normalized(&self) -> bool {
        let last = self.kappa.last().unwrap();
        last.is_exact() && (last - &Px::one(last.field())).is_zero_to_prec()
    }
    /// `q^i`, or `None` when it leaves the supported range.
    pub fn qpow(&self, i: usize) -> Option<i64> {
        (self.q() as i64).checked_pow(i as u32).filter(|&v| v <= MAX_QPOW)
    }

    /// `kappa_j` is an exact zero.
    fn kappa_vanishes(&self, j: usize) -> bool {
        let k = &self.kappa[j - 1];
        k.is_zero_to_prec() && k.is_exact()
    }

    /// Relative precision (in valuation units) kept in the coefficient tables.
    fn rel_slots(&self, ram: u32) -> i64 {
        2 * (self.prec.target + self.prec.guard) * ram as i64
    }

    /// `rho_t` as a twisted polynomial.
    pub fn rho_t(&self) -> TwistedPoly<Px> {
        let mut c = vec![Px::theta(&self.base)];
        c.extend(self.kappa.iter().cloned());
        TwistedPoly::new(self.qe, c)
    }

    /// Image of `a in F_q[t]` (coefficients are codes of `F_q`).
    pub fn rho_a(&self, a: &Poly) -> TwistedPoly<Px> {
        let rho = self.rho_t();
        let mut acc: TwistedPoly<Px> = TwistedPoly::new(self.qe, Vec::new());
        for &c in a.coeffs().iter().rev() {
            acc = acc.mul(&rho);
            let cst = TwistedPoly::new(self.qe, vec![Px::constant(&self.base, c)]);
            acc = acc.add(&cst);
        }
        acc
    }

    /// Conjugate by a scalar so that `kappa_r = 1`; returns the new module and
    /// the scalar `c` with `rho' = c^(-1) rho c`.
    pub fn normalize(&self) -> Result<(DrinfeldModule, Px)> {
        let r = self.rank();
        let qr = self.qpow(r).ok_or_else(|| Error::BadField("q^r too large".into()))? as usize;
        let target = self.kappa[r - 1].inv()?;
        let mut coeffs = vec![Px::zero(&self.base); qr];
        coeffs[0] = target.neg_val();
        coeffs[qr - 1] = Px::one(&self.base);
        let opts = RootOptions { target: self.prec.working(), ..Default::default() };
        let roots = newton_roots(&coeffs, &opts)?;
        let c = roots.into_iter().find(|x| !x.value.is_zero_to_prec()).ok_or(Error::NoMatch)?.value;
        let mut kappa = Vec::with_capacity(r);
        for (j, k) in self.kappa.iter().enumerate() {
            let qj = self.qpow(j + 1).unwrap();
            let mut factor = Px::one(&self.base);
            for _ in 0..qj - 1 {
                factor = &factor * &c;
            }
            kappa.push(k * &factor);
        }
        let last = Px::one(kappa[r - 1].field());
        kappa[r - 1] = last;
        Ok((DrinfeldModule::new(self.q(), kappa, self.prec)?, c))
    }

    /// `alpha_0..alpha_count`; `alpha_i (theta^(q^i) - theta) = sum_j kappa_j alpha_(i-j)^(q^j)`.
    pub fn exp_coeffs(&self, count: usize) -> Result<Vec<Px>> {
        let mut cache = self.alpha.lock().unwrap();
        if cache.is_empty() {
            cache.push(Px::one(&self.base));
        }
        while cache.len() <= count {
            let i = cache.len();
            let qi = self.qpow(i).ok_or_else(|| Error::InsufficientPrecision(format!("q^{i} overflow")))?;
            let mut s = Px::zero(&self.base);
            for j in 1..=i.min(self.rank()) {
                if self.kappa_vanishes(j) {
                    continue;
                }
                let prev = &cache[i - j];
                let rel = self.rel_slots(prev.ram());
                let limit = prev.lo().saturating_mul(self.qpow(j).unwrap()).saturating_add(rel);
                let tw = prev.frob_to(self.qe, j as i64, limit);
                s = &s + &(&self.kappa[j - 1] * &tw);
            }
            let rel = self.rel_slots(s.ram());
            let a = (&s * &inv_frob_diff(&self.base, qi, rel)).truncated_rel(rel);
            cache.push(a);
        }
        Ok(cache[..=count].to_vec())
    }

    /// `beta_0..beta_count`; `beta_i (theta - theta^(q^i)) = sum_j beta_(i-j) kappa_j^(q^(i-j))`.
    pub fn log_coeffs(&self, count: usize) -> Result<Vec<Px>> {
        let mut cache = self.beta.lock().unwrap();
        if cache.is_empty() {
            cache.push(Px::one(&self.base));
        }
        while cache.len() <= count {
            let i = cache.len();
            let qi = self.qpow(i).ok_or_else(|| Error::InsufficientPrecision(format!("q^{i} overflow")))?;
            let mut s = Px::zero(&self.base);
            for j in 1..=i.min(self.rank()) {
                if self.kappa_vanishes(j) {
                    continue;
                }
                let k = &self.kappa[j - 1];
                let rel = self.rel_slots(k.ram());
                let limit = k.lo().saturating_mul(self.qpow(i - j).unwrap()).saturating_add(rel);
                let tw = k.frob_to(self.qe, (i - j) as i64, limit);
                s = &s + &(&cache[i - j] * &tw);
            }
            let rel = self.rel_slots(s.ram());
            let b = -&(&s * &inv_frob_diff(&self.base, qi, rel)).truncated_rel(rel);
            cache.push(b);
        }
        Ok(cache[..=count].to_vec())
    }

    /// Terms `c_i z^(q^i)` truncated at the working cap.
    fn series_term(&self, c: &Px, z: &Px, i: usize, cap: Ratio<i64>) -> Px {
        if c.is_zero_to_prec() && c.is_exact() {
            return Px::zero(z.field());
        }
        // Only digits of z^(q^i) below cap - val(c) matter.
        let need = cap - c.val_or_cap();
        let zq = z.frob_to(self.qe, i as i64, slots(need, z.ram()) + 1);
        c.mul_to(&zq, crate::puiseux::EXACT).truncated_val(cap)
    }

    /// `exp_rho(z)` to the working cap; the result's cap is the attained precision.
    pub fn exp_eval(&self, z: &Px) -> Result<Px> {
        self.exp_eval_to(z, self.prec.working())
    }

    /// [`DrinfeldModule::exp_eval`] with an explicit absolute cap.
    pub fn exp_eval_to(&self, z: &Px, cap: Ratio<i64>) -> Result<Px> {
        if z.is_zero_to_prec() {
            return Ok(Px::zero_to(z.field(), z.ram(), slots(cap, z.ram()).min(z.cap())));
        }
        let mut sum = Px::zero(z.field());
        let mut prev: Option<Ratio<i64>> = None;
        let mut i = 0;
        loop {
            if self.qpow(i).is_none() {
                break;
            }
            let a = self.exp_coeffs(i)?.pop().unwrap();
            if a.is_exact() && a.is_zero_to_prec() {
                i += 1;
                continue;
            }
            let term = self.series_term(&a, z, i, cap);
            let v = term.val_or_cap();
            sum = &sum + &term;
            if v >= cap && prev.is_some_and(|p| v > p) {
                break;
            }
            prev = Some(v);
            i += 1;
        }
        Ok(sum.truncated_val(cap))
    }

    /// `log_rho(z)`; fails with [`Error::LogDivergence`] unless the term
    /// valuations increase strictly over a [`LOG_WINDOW`]-term window and
    /// pass the working cap.
    pub fn log_eval(&self, z: &Px) -> Result<Px> {
        self.log_eval_to(z, self.prec.working())
    }

    /// [`DrinfeldModule::log_eval`] with an explicit absolute cap.
    pub fn log_eval_to(&self, z: &Px, cap: Ratio<i64>) -> Result<Px> {
        if z.is_zero_to_prec() {
            return Ok(Px::zero_to(z.field(), z.ram(), slots(cap, z.ram()).min(z.cap())));
        }
        let mut sum = Px::zero(z.field());
        let mut vals: Vec<Ratio<i64>> = Vec::new();
        let mut stalled = 0;
        let mut i = 0;
        loop {
            if self.qpow(i).is_none() {
                return Err(Error::LogDivergence(format!("no certificate after {i} terms")));
            }
            let b = self.log_coeffs(i)?.pop().unwrap();
            if b.is_exact() && b.is_zero_to_prec() {
                i += 1;
                continue;
            }
            let term = self.series_term(&b, z, i, cap);
            let v = if term.is_zero_to_prec() {
                // Use the true term valuation even when it lies beyond the cap.
                b.val_or_cap() + z.val_or_cap() * self.qpow(i).unwrap()
            } else {
                term.val_or_cap()
            };
            sum = &sum + &term;
            if let Some(&last) = vals.last() {
                if v <= last {
                    stalled += 1;
                    if stalled >= LOG_WINDOW {
                        return Err(Error::LogDivergence(format!(
                            "term valuations stop increasing at {last}"
                        )));
                    }
                } else {
                    stalled = 0;
                }
            }
            vals.push(v);
            let n = vals.len();
            if n > LOG_WINDOW && v >= cap && vals[n - LOG_WINDOW..].windows(2).all(|w| w[1] > w[0]) {
                break;
            }
            i += 1;
        }
        Ok(sum.truncated_val(cap))
    }
}

/// `1 / (theta^Q - theta) = sum_(k>=0) theta^(-Q - k(Q-1))` to `rel` slots,
/// built sparsely since `Q` can be huge.
pub fn inv_frob_diff(field: &Arc<GfField>, qi: i64, rel: i64) -> Px {
    let rel = rel.max(1);
    let step = (qi - 1).max(1) as usize;
    let mut coeffs = vec![0; rel as usize];
    for k in (0..rel as usize).step_by(step) {
        coeffs[k] = 1;
    }
    Px::from_slots(field, 1, qi, coeffs, qi + rel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prec() -> Precision {
        Precision { target: 40, guard: 10, t_trunc: 48 }
    }

    #[test]
    fn carlitz_alpha_one() {
        for q in [2, 3] {
            let m = DrinfeldModule::carlitz(q, prec()).unwrap();
            let a = m.exp_coeffs(1).unwrap();
            let f = m.base_field();
            let d = &Px::theta_pow(f, 1, q as i64) - &Px::theta(f);
            let one = &a[1] * &d;
            assert!((&one - &Px::one(f)).val_or_cap() >= Ratio::from_integer(40));
        }
    }

    #[test]
    fn rho_t_squared_q2() {
        let m = DrinfeldModule::carlitz(2, prec()).unwrap();
        let f = m.base_field().clone();
        let t2 = Poly::monomial(&f, Var::T, 1, 2);
        let r = m.rho_a(&t2);
        let want = [Px::theta_pow(&f, 1, 2), Px::parse(&f, "th + th^2").unwrap(), Px::one(&f)];
        assert_eq!(r.coeffs().len(), 3);
        for (a, b) in r.coeffs().iter().zip(&want) {
            assert!((a - b).is_zero_to_prec());
        }
        let c = m.rho_a(&Poly::constant(&f, Var::T, 1));
        assert_eq!(c.coeffs().len(), 1);
    }

    #[test]
    fn exp_of_log_is_identity() {
        let f = gf(3, 1).unwrap();
        let m = DrinfeldModule::from_polys(
            3,
            vec![Poly::new(&f, Var::Theta, vec![1, 1]), Poly::one(&f, Var::Theta)],
            prec(),
        )
        .unwrap();
        let z = Px::parse(&f, "th^(-1) + 2*th^(-3)").unwrap();
        let l = m.log_eval(&z).unwrap();
        let back = m.exp_eval(&l).unwrap();
        assert!((&back - &z).val_or_cap() >= Ratio::from_integer(40));
    }

    #[test]
    fn log_diverges_on_boundary() {
        let m = DrinfeldModule::carlitz(2, prec()).unwrap();
        let f = m.base_field().clone();
        assert!(matches!(m.log_eval(&Px::theta_pow(&f, 1, 2)), Err(Error::LogDivergence(_))));
        // theta itself converges for q = 2.
        assert!(m.log_eval(&Px::theta(&f)).is_ok());
    }

    #[test]
    fn normalization_makes_leading_one() {
        let f = gf(3, 1).unwrap();
        let m = DrinfeldModule::from_polys(3, vec![Poly::constant(&f, Var::Theta, 2)], prec()).unwrap();
        assert!(!m.is_normalized());
        let (n, _) = m.normalize().unwrap();
        assert!(n.is_normalized());
    }
}
