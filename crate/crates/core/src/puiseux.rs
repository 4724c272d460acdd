//! Truncated Laurent–Puiseux numbers in `F_{p^n}((theta^{-1/e}))`.
//!
//! A [`Px`] stores coefficients for the slots `lo, lo+1, ...` of the uniformizer
//! `pi = theta^{-1/e}` together with an absolute cap: every slot at or beyond
//! `cap` is unknown. Valuations are measured in units where `val(1/theta) = 1`,
//! so slot `k` has valuation `k/e`. Exactly known values (finite Laurent
//! polynomials such as `theta` or the coefficients of a module) carry the cap
//! [`EXACT`].
//!
//! Binary operations lift both operands to a common ramification index and a
//! common coefficient field first. Caps propagate pessimistically:
//! `cap(x*y) = min(cap x + lo y, cap y + lo x)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::gf::{common_field, embedding, Fe, GfField};
use crate::poly::Poly;

/// Cap of exactly known values.
pub const EXACT: i64 = 1 << 60;

/// Relative precision used when inverting an exact multi-term value.
pub const DEFAULT_INV_REL: i64 = 512;

#[inline]
fn clamp_cap(c: i64) -> i64 {
    c.min(EXACT)
}

#[derive(Clone)]
pub struct Px {
    field: Arc<GfField>,
    ram: u32,
    lo: i64,
    coeffs: Vec<Fe>,
    cap: i64,
}

impl Px {
    fn normalized(field: Arc<GfField>, ram: u32, lo: i64, mut coeffs: Vec<Fe>, cap: i64) -> Px {
        let cap = clamp_cap(cap);
        let keep = (cap - lo).clamp(0, coeffs.len() as i64) as usize;
        coeffs.truncate(keep);
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        let lead = coeffs.iter().position(|&c| c != 0);
        match lead {
            None => Px { field, ram, lo: cap, coeffs: Vec::new(), cap },
            Some(k) => {
                coeffs.drain(..k);
                Px { field, ram, lo: lo + k as i64, coeffs, cap }
            }
        }
    }

    /// Build from raw slot data: value `sum coeffs[i] * pi^(lo+i)` known below `cap`.
    pub fn from_slots(field: &Arc<GfField>, ram: u32, lo: i64, coeffs: Vec<Fe>, cap: i64) -> Px {
        assert!(ram > 0);
        Px::normalized(field.clone(), ram, lo, coeffs, cap)
    }

    /// Exact zero.
    pub fn zero(field: &Arc<GfField>) -> Px {
        Px { field: field.clone(), ram: 1, lo: EXACT, coeffs: Vec::new(), cap: EXACT }
    }
    /// `O(pi^cap)`: zero known up to the given cap.
    pub fn zero_to(field: &Arc<GfField>, ram: u32, cap: i64) -> Px {
        Px::normalized(field.clone(), ram, cap, Vec::new(), cap)
    }
    pub fn constant(field: &Arc<GfField>, c: Fe) -> Px {
        Px::normalized(field.clone(), 1, 0, vec![c], EXACT)
    }
    pub fn one(field: &Arc<GfField>) -> Px {
        Px::constant(field, 1)
    }
    /// Exact `c * theta^k`.
    pub fn theta_pow(field: &Arc<GfField>, c: Fe, k: i64) -> Px {
        Px::normalized(field.clone(), 1, -k, vec![c], EXACT)
    }
    pub fn theta(field: &Arc<GfField>) -> Px {
        Px::theta_pow(field, 1, 1)
    }
    /// Exact value of a polynomial in theta.
    pub fn from_theta_poly(p: &Poly) -> Px {
        let Some(d) = p.degree() else {
            return Px::zero(&p.field);
        };
        let coeffs: Vec<Fe> = (0..=d).rev().map(|i| p.coeff(i)).collect();
        Px::normalized(p.field.clone(), 1, -(d as i64), coeffs, EXACT)
    }

    pub fn field(&self) -> &Arc<GfField> {
        &self.field
    }
    pub fn ram(&self) -> u32 {
        self.ram
    }
    /// Slot index of the leading coefficient (equals `cap` when zero to precision).
    pub fn lo(&self) -> i64 {
        self.lo
    }
    pub fn cap(&self) -> i64 {
        self.cap
    }
    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }
    pub fn is_exact(&self) -> bool {
        self.cap >= EXACT
    }
    /// Coefficient at slot `k` (zero outside the stored window).
    pub fn coeff_at(&self, k: i64) -> Fe {
        if k < self.lo {
            return 0;
        }
        self.coeffs.get((k - self.lo) as usize).copied().unwrap_or(0)
    }
    /// True when no nonzero digit is known below the cap.
    pub fn is_zero_to_prec(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn leading(&self) -> Option<Fe> {
        self.coeffs.first().copied()
    }
    /// Valuation; `None` when the value is indistinguishable from zero.
    pub fn valuation(&self) -> Option<Ratio<i64>> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(Ratio::new(self.lo, self.ram as i64))
        }
    }
    /// Valuation, or the cap when zero to precision.
    pub fn val_or_cap(&self) -> Ratio<i64> {
        Ratio::new(self.lo.min(EXACT), self.ram as i64)
    }
    pub fn cap_val(&self) -> Ratio<i64> {
        Ratio::new(self.cap, self.ram as i64)
    }

    /// Same value over `pi' = theta^{-1/(e m)}`.
    pub fn lift_ram(&self, m: u32) -> Px {
        if m == 1 {
            return self.clone();
        }
        let m64 = m as i64;
        let cap = if self.is_exact() { EXACT } else { self.cap * m64 };
        if self.coeffs.is_empty() {
            let lo = if self.is_exact() { EXACT } else { self.lo * m64 };
            return Px { field: self.field.clone(), ram: self.ram * m, lo, coeffs: Vec::new(), cap };
        }
        let mut coeffs = vec![0; (self.coeffs.len() - 1) * m as usize + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * m as usize] = c;
        }
        Px { field: self.field.clone(), ram: self.ram * m, lo: self.lo * m64, coeffs, cap }
    }

    /// Same value with coefficients embedded into `target`.
    pub fn lift_field(&self, target: &Arc<GfField>) -> Result<Px> {
        if **target == *self.field {
            return Ok(self.clone());
        }
        let table = embedding(&self.field, target)?;
        Ok(Px {
            field: target.clone(),
            ram: self.ram,
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|&c| table[c as usize]).collect(),
            cap: self.cap,
        })
    }

    /// Lift to ramification `ram` (a multiple of the current one) and field `field`.
    pub fn lift_to(&self, field: &Arc<GfField>, ram: u32) -> Px {
        assert!(ram.is_multiple_of(self.ram), "ramification {ram} is not a multiple of {}", self.ram);
        self.lift_field(field).expect("field embedding").lift_ram(ram / self.ram)
    }

    fn common(a: &Px, b: &Px) -> (Px, Px) {
        if a.ram == b.ram && Arc::ptr_eq(&a.field, &b.field) {
            return (a.clone(), b.clone());
        }
        let field = common_field(&a.field, &b.field).expect("same characteristic");
        let ram = a.ram.lcm(&b.ram);
        (a.lift_to(&field, ram), b.lift_to(&field, ram))
    }

    /// Bring every entry to a common field and ramification.
    pub fn unify(values: &[Px]) -> Vec<Px> {
        let Some(first) = values.first() else {
            return Vec::new();
        };
        let mut field = first.field.clone();
        let mut ram = first.ram;
        for v in values {
            field = common_field(&field, &v.field).expect("same characteristic");
            ram = ram.lcm(&v.ram);
        }
        values.iter().map(|v| v.lift_to(&field, ram)).collect()
    }

    fn add_same(&self, other: &Px) -> Px {
        let f = &self.field;
        let cap = self.cap.min(other.cap);
        let lo = self.lo.min(other.lo);
        if lo >= cap {
            return Px::normalized(f.clone(), self.ram, cap, Vec::new(), cap);
        }
        let end_of = |x: &Px| if x.coeffs.is_empty() { i64::MIN } else { x.lo + x.coeffs.len() as i64 };
        let end = end_of(self).max(end_of(other)).min(cap);
        let len = (end - lo).max(0) as usize;
        let mut v = vec![0; len];
        for (i, &c) in self.coeffs.iter().enumerate() {
            let k = self.lo + i as i64 - lo;
            if (k as usize) < len {
                v[k as usize] = c;
            }
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            let k = other.lo + i as i64 - lo;
            if (k as usize) < len {
                v[k as usize] = f.add(v[k as usize], c);
            }
        }
        Px::normalized(f.clone(), self.ram, lo, v, cap)
    }

    pub fn neg_val(&self) -> Px {
        let f = &self.field;
        Px {
            field: f.clone(),
            ram: self.ram,
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
            cap: self.cap,
        }
    }

    /// Product with the result additionally truncated below `limit` (in the
    /// common ramification).
    pub fn mul_to(&self, other: &Px, limit: i64) -> Px {
        let (a, b) = Px::common(self, other);
        a.mul_same(&b, limit)
    }

    fn mul_same(&self, other: &Px, limit: i64) -> Px {
        let f = &self.field;
        let bound = |x: &Px, y: &Px| {
            if x.is_exact() {
                EXACT
            } else {
                clamp_cap(x.cap.saturating_add(y.lo))
            }
        };
        let cap = bound(self, other).min(bound(other, self)).min(limit);
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Px::normalized(f.clone(), self.ram, cap, Vec::new(), cap);
        }
        let lo = self.lo + other.lo;
        let full = self.coeffs.len() + other.coeffs.len() - 1;
        let len = ((cap - lo).max(0) as usize).min(full);
        let mut v = vec![0; len];
        let logs_b: Vec<Option<u32>> = other.coeffs.iter().map(|&c| f.log_of(c)).collect();
        for (i, &a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            let Some(la) = f.log_of(a) else { continue };
            let jmax = (len - i).min(other.coeffs.len());
            for (j, lb) in logs_b[..jmax].iter().enumerate() {
                if let Some(lb) = lb {
                    let prod = f.exp_of(la as u64 + *lb as u64);
                    v[i + j] = f.add(v[i + j], prod);
                }
            }
        }
        Px::normalized(f.clone(), self.ram, lo, v, cap)
    }

    /// Multiply by an exact field constant.
    pub fn scale(&self, c: Fe) -> Px {
        if c == 0 {
            return Px::zero_to(&self.field, self.ram, EXACT);
        }
        let f = &self.field;
        Px {
            field: f.clone(),
            ram: self.ram,
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|&x| f.mul(x, c)).collect(),
            cap: self.cap,
        }
    }

    /// Multiply by `theta^k` (an exact shift).
    pub fn mul_theta_pow(&self, k: i64) -> Px {
        let s = k * self.ram as i64;
        let shift = |x: i64| if x >= EXACT { EXACT } else { x - s };
        Px {
            field: self.field.clone(),
            ram: self.ram,
            lo: shift(self.lo),
            coeffs: self.coeffs.clone(),
            cap: shift(self.cap),
        }
    }

    /// Inverse with relative precision capped at `rel` slots.
    pub fn inv_rel(&self, rel: i64) -> Result<Px> {
        if self.coeffs.is_empty() {
            return Err(Error::ZeroToPrec);
        }
        let f = &self.field;
        if self.is_exact() && self.coeffs.len() == 1 {
            let c = f.inv(self.coeffs[0])?;
            return Ok(Px::normalized(f.clone(), self.ram, -self.lo, vec![c], EXACT));
        }
        let r = if self.is_exact() { rel } else { (self.cap - self.lo).min(rel) };
        let r = r.max(1) as usize;
        let a = &self.coeffs;
        let b0 = f.inv(a[0])?;
        let nb0 = f.neg(b0);
        let mut b = vec![0; r];
        b[0] = b0;
        for n in 1..r {
            let mut acc = 0;
            for k in 1..=n.min(a.len() - 1) {
                acc = f.add(acc, f.mul(a[k], b[n - k]));
            }
            b[n] = f.mul(acc, nb0);
        }
        Ok(Px::normalized(f.clone(), self.ram, -self.lo, b, -self.lo + r as i64))
    }

    /// Inverse to the full relative precision of `self`; exact non-monomials
    /// get [`DEFAULT_INV_REL`] slots.
    pub fn inv(&self) -> Result<Px> {
        let rel = if self.is_exact() { DEFAULT_INV_REL } else { self.cap - self.lo };
        self.inv_rel(rel)
    }

    pub fn div(&self, other: &Px) -> Result<Px> {
        Ok(self * &other.inv()?)
    }

    /// `x^(q^n)`, where `q = p^qe`; negative `n` applies the inverse Frobenius.
    ///
    /// Positive powers stretch slot indices (`x^q = sum c^q pi^(kq)` in
    /// characteristic `p`, exactly, with the cap multiplied by `q`). Negative
    /// powers keep slot indices and multiply the ramification by `q^|n|`.
    pub fn frob(&self, qe: u32, n: i64) -> Px {
        self.frob_to(qe, n, EXACT)
    }

    /// [`Px::frob`] keeping only slots below `limit` (in the result's ramification).
    pub fn frob_to(&self, qe: u32, n: i64, limit: i64) -> Px {
        let f = &self.field;
        let k = qe as i64 * n;
        if n == 0 {
            return self.truncated(limit);
        }
        let p = f.characteristic() as i64;
        let qn: i64 = match p.checked_pow((qe as i64 * n.abs()) as u32) {
            Some(v) => v,
            None => EXACT,
        };
        let coeffs: Vec<Fe> = self.coeffs.iter().map(|&c| f.frob_p(c, k)).collect();
        if n < 0 {
            let ram = (self.ram as i64).checked_mul(qn).expect("ramification overflow") as u32;
            return Px::normalized(f.clone(), ram, self.lo, coeffs, self.cap.min(limit));
        }
        let cap = if self.is_exact() { EXACT } else { self.cap.saturating_mul(qn) };
        let cap = clamp_cap(cap).min(limit);
        if coeffs.is_empty() {
            let lo = self.lo.saturating_mul(qn).min(cap);
            return Px::normalized(f.clone(), self.ram, lo, Vec::new(), cap);
        }
        let lo = self.lo.saturating_mul(qn);
        if lo >= cap {
            return Px::normalized(f.clone(), self.ram, cap, Vec::new(), cap);
        }
        let mut out = Vec::new();
        for (i, &c) in coeffs.iter().enumerate() {
            let pos = i as i64 * qn;
            if lo + pos >= cap {
                break;
            }
            if c != 0 {
                out.resize(pos as usize + 1, 0);
                out[pos as usize] = c;
            }
        }
        Px::normalized(f.clone(), self.ram, lo, out, cap)
    }

    /// Lower the cap to `cap` (no-op if already lower).
    pub fn truncated(&self, cap: i64) -> Px {
        if cap >= self.cap {
            return self.clone();
        }
        Px::normalized(self.field.clone(), self.ram, self.lo, self.coeffs.clone(), cap)
    }

    /// Lower the cap so that at most `rel` slots follow the leading one.
    pub fn truncated_rel(&self, rel: i64) -> Px {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        self.truncated(self.lo.saturating_add(rel))
    }

    /// Cap expressed in valuation units, rounded down to a multiple of `1/e'`.
    pub fn truncated_val(&self, cap_val: Ratio<i64>) -> Px {
        let slots = (cap_val * self.ram as i64).floor().to_integer();
        self.truncated(slots)
    }

    /// Smallest ramification that represents the value with the same digits.
    pub fn reduce_ram(&self) -> Px {
        let mut g = self.ram as i64;
        if !self.is_exact() {
            g = g.gcd(&self.cap);
        }
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                g = g.gcd(&(self.lo + i as i64));
            }
            if g == 1 {
                return self.clone();
            }
        }
        if g <= 1 || self.coeffs.is_empty() {
            return self.clone();
        }
        let coeffs: Vec<Fe> = self.coeffs.iter().step_by(g as usize).copied().collect();
        let cap = if self.is_exact() { EXACT } else { self.cap / g };
        Px::normalized(self.field.clone(), self.ram / g as u32, self.lo / g, coeffs, cap)
    }

    /// Valuation of `self - other`, or the joint cap when they agree to precision.
    pub fn agreement(&self, other: &Px) -> Ratio<i64> {
        (self - other).val_or_cap()
    }

    /// `true` when every known digit lies in `F_{p^e}` and all are at slot 0.
    pub fn is_constant_in(&self, e: u32) -> bool {
        match self.coeffs.as_slice() {
            [] => true,
            [c] if self.lo == 0 => self.field.in_subfield(*c, e),
            _ => false,
        }
    }

    pub fn to_literal(&self) -> String {
        let r = self.reduce_ram();
        let f = &r.field;
        let mut terms = Vec::new();
        for (i, &c) in r.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let slot = r.lo + i as i64;
            let exp = Ratio::new(-slot, r.ram as i64);
            let cs = f.format(c);
            let cs = if cs.contains('+') || cs.contains('*') { format!("({cs})") } else { cs };
            terms.push(match (*exp.numer(), cs.as_str()) {
                (0, _) => cs,
                (_, "1") => format!("th^({})", fmt_ratio(exp)),
                _ => format!("{cs}*th^({})", fmt_ratio(exp)),
            });
        }
        if !r.is_exact() {
            terms.push(format!("O(th^({}))", fmt_ratio(Ratio::new(-r.cap, r.ram as i64))));
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// Parse the literal grammar emitted by [`Px::to_literal`]. Plain theta
    /// polynomials such as `th^2+th+1` are accepted as exact values.
    pub fn parse(field: &Arc<GfField>, s: &str) -> Result<Px> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty literal".into()));
        }
        let mut terms: Vec<(Fe, Ratio<i64>)> = Vec::new();
        let mut big_o: Option<Ratio<i64>> = None;
        for (sign, tok) in split_terms(&compact)? {
            if let Some(inner) = tok.strip_prefix("O(").and_then(|t| t.strip_suffix(')')) {
                big_o = Some(parse_th_power(inner)?);
                continue;
            }
            let (coef, mono) = split_coef(&tok)?;
            let mut c = match coef {
                Some(cs) => field.parse(cs)?,
                None => 1,
            };
            if sign < 0 {
                c = field.neg(c);
            }
            let e = match mono {
                Some(m) => parse_th_power(m)?,
                None => Ratio::from_integer(0),
            };
            terms.push((c, e));
        }
        let mut ram: i64 = 1;
        for (_, e) in &terms {
            ram = ram.lcm(e.denom());
        }
        if let Some(o) = big_o {
            ram = ram.lcm(o.denom());
        }
        let mut acc = match big_o {
            Some(o) => Px::zero_to(field, ram as u32, (-o * ram).to_integer()),
            None => Px::zero(field),
        };
        for (c, e) in terms {
            let slot = (-e * ram).to_integer();
            let t = Px::from_slots(field, ram as u32, slot, vec![c], EXACT);
            acc = &acc + &t;
        }
        Ok(acc)
    }
}

fn fmt_ratio(r: Ratio<i64>) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn split_terms(s: &str) -> Result<Vec<(i32, String)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut sign = 1;
    let mut prev: Option<char> = None;
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                cur.push(ch);
            }
            '+' | '-' if depth == 0 && prev != Some('^') => {
                if !cur.is_empty() {
                    out.push((sign, std::mem::take(&mut cur)));
                }
                sign = if ch == '-' { -1 } else { 1 };
            }
            _ => cur.push(ch),
        }
        prev = Some(ch);
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced parentheses in `{s}`")));
    }
    if !cur.is_empty() {
        out.push((sign, cur));
    }
    Ok(out)
}

/// Split `coef*th^(...)`, `th^k`, `coef` into coefficient and theta-monomial.
fn split_coef(tok: &str) -> Result<(Option<&str>, Option<&str>)> {
    if let Some(pos) = tok.find("th") {
        let mono = &tok[pos..];
        let coef = tok[..pos].strip_suffix('*');
        if pos > 0 && coef.is_none() {
            return Err(Error::Parse(format!("bad term `{tok}`")));
        }
        Ok((coef, Some(mono)))
    } else {
        Ok((Some(tok), None))
    }
}

/// Parse `th`, `th^k`, `th^(a/b)`, `th^(-a/b)`; returns the theta exponent.
fn parse_th_power(m: &str) -> Result<Ratio<i64>> {
    let rest = m.strip_prefix("th").ok_or_else(|| Error::Parse(format!("expected th in `{m}`")))?;
    if rest.is_empty() {
        return Ok(Ratio::from_integer(1));
    }
    let e = rest.strip_prefix('^').ok_or_else(|| Error::Parse(format!("bad exponent in `{m}`")))?;
    let e = e.trim_start_matches('(').trim_end_matches(')');
    let bad = || Error::Parse(format!("bad exponent `{e}`"));
    match e.split_once('/') {
        Some((a, b)) => {
            let a: i64 = a.parse().map_err(|_| bad())?;
            let b: i64 = b.parse().map_err(|_| bad())?;
            if b <= 0 {
                return Err(bad());
            }
            Ok(Ratio::new(a, b))
        }
        None => Ok(Ratio::from_integer(e.parse().map_err(|_| bad())?)),
    }
}

impl fmt::Debug for Px {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}

impl fmt::Display for Px {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}

impl Add for &Px {
    type Output = Px;
    fn add(self, rhs: &Px) -> Px {
        let (a, b) = Px::common(self, rhs);
        a.add_same(&b)
    }
}

impl Sub for &Px {
    type Output = Px;
    fn sub(self, rhs: &Px) -> Px {
        #[allow(clippy::suspicious_arithmetic_impl)]
        let d = self + &rhs.neg_val();
        d
    }
}

impl Mul for &Px {
    type Output = Px;
    fn mul(self, rhs: &Px) -> Px {
        let (a, b) = Px::common(self, rhs);
        a.mul_same(&b, EXACT)
    }
}

impl Neg for &Px {
    type Output = Px;
    fn neg(self) -> Px {
        self.neg_val()
    }
}

/// Arithmetic selector for [`px_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PxOp {
    Add,
    Mul,
    Inv,
}

pub fn px_arith(x: &Px, y: &Px, op: PxOp) -> Result<Px> {
    match op {
        PxOp::Add => Ok(x + y),
        PxOp::Mul => Ok(x * y),
        PxOp::Inv => x.inv(),
    }
}

/// `x^(q^n)`; see [`Px::frob`].
pub fn frob_power(x: &Px, qe: u32, n: i64) -> Px {
    x.frob(qe, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::gf;

    #[test]
    fn inverse_of_theta() {
        let f = gf(2, 1).unwrap();
        let th = Px::theta(&f);
        let inv = th.inv().unwrap();
        assert_eq!(inv.valuation(), Some(Ratio::from_integer(1)));
        let one = &th * &inv;
        assert!(one.is_exact());
        assert_eq!(one.to_literal(), "1");
    }

    #[test]
    fn schoolbook_product_over_f3() {
        let f = gf(3, 1).unwrap();
        let a = Px::parse(&f, "1 + th^(-1)").unwrap();
        let b = Px::parse(&f, "1 - th^(-1)").unwrap();
        let prod = &a * &b;
        let want = Px::parse(&f, "1 - th^(-2)").unwrap();
        assert!((&prod - &want).is_zero_to_prec());
    }

    #[test]
    fn frobenius_of_theta() {
        let f = gf(3, 1).unwrap();
        let th = Px::theta(&f);
        let th3 = th.frob(1, 1);
        assert_eq!(th3.valuation(), Some(Ratio::from_integer(-3)));
        let c = Px::constant(&f, 2);
        assert!((&c.frob(1, 1) - &c).is_zero_to_prec());
    }

    #[test]
    fn frobenius_of_square_root() {
        // (theta^{1/2})^q squared equals theta^q.
        let f = gf(3, 1).unwrap();
        let half = Px::from_slots(&f, 2, -1, vec![1], EXACT);
        let lhs = half.frob(1, 1);
        let sq = &lhs * &lhs;
        assert!((&sq - &Px::theta(&f).frob(1, 1)).is_zero_to_prec());
        assert_eq!(lhs.valuation(), Some(Ratio::new(-3, 2)));
    }

    #[test]
    fn inverse_frobenius_round_trip() {
        let f = gf(2, 2).unwrap();
        let x = Px::parse(&f, "g*th^(2) + th^(-1) + (g+1)*th^(-3) + O(th^(-10))").unwrap();
        let y = x.frob(2, -1).frob(2, 1);
        assert!((&y - &x).is_zero_to_prec());
    }

    #[test]
    fn caps_propagate() {
        let f = gf(2, 1).unwrap();
        let x = Px::parse(&f, "th + 1 + O(th^(-5))").unwrap();
        let y = &x * &x;
        // cap(x*x) = cap + lo = 5 - 1.
        assert_eq!(y.cap(), 4);
        let s = &x + &Px::parse(&f, "O(th^(-2))").unwrap();
        assert_eq!(s.cap(), 2);
    }

    #[test]
    fn zero_to_precision_inverse_fails() {
        let f = gf(2, 1).unwrap();
        assert_eq!(Px::zero_to(&f, 1, 10).inv().unwrap_err(), Error::ZeroToPrec);
    }

    #[test]
    fn literal_round_trip() {
        let f = gf(3, 2).unwrap();
        let x = Px::parse(&f, "(g+1)*th^(1/2) + 2*th^(-3/2) + O(th^(-7))").unwrap();
        assert_eq!(x.ram(), 2);
        let y = Px::parse(&f, &x.to_literal()).unwrap();
        assert!((&x - &y).is_zero_to_prec());
        assert_eq!(x.cap_val(), y.cap_val());
    }

    #[test]
    fn lifting_preserves_value() {
        let f = gf(3, 1).unwrap();
        let big = gf(3, 2).unwrap();
        let x = Px::parse(&f, "th + 2 + th^(-1) + O(th^(-6))").unwrap();
        let y = x.lift_to(&big, 4);
        let z = &(&y * &y) - &(&x * &x).lift_to(&big, 4);
        assert!(z.is_zero_to_prec());
    }
}
