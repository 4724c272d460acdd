//! Finite fields `F_{p^n}` with table-driven arithmetic.
//!
//! Every field is `F_p[g]/(m(g))` where `m` is the lowest monic irreducible of
//! degree `n` in the order that reads the lower coefficients as a base-`p`
//! integer (constant term least significant). Elements are stored as that
//! integer ("code"), so `0` and `1` are the usual constants and, for `n > 1`,
//! the code `p` is the generator `g`.
//!
//! Fields are interned: [`gf`] returns the same `Arc` for the same `(p, n)`,
//! and embeddings `F_{p^a} -> F_{p^b}` are computed once and cached.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Largest supported field size `p^n`.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

/// An element code inside a [`GfField`].
pub type Fe = u32;

const NO_LOG: u32 = u32::MAX;

pub struct GfField {
    p: u32,
    n: u32,
    size: u32,
    order: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

impl fmt::Debug for GfField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.n)
    }
}

impl PartialEq for GfField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n
    }
}
impl Eq for GfField {}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over F_p used only while building tables.
mod fp_poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let inv_lead = inv(m[dm], p);
        while r.len() > dm {
            let k = r.len() - 1;
            let c = (r[k] as u64 * inv_lead as u64 % p as u64) as u32;
            let shift = k - dm;
            for (i, &mi) in m.iter().enumerate() {
                let sub = (c as u64 * mi as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let prod: Vec<u32> = prod.into_iter().map(|v| v as u32).collect();
        rem(&prod, m, p)
    }

    pub fn powmod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut result = vec![1];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mulmod(&result, &b, m, p);
            }
            b = mulmod(&b, &b, m, p);
            e >>= 1;
        }
        result
    }

    pub fn inv(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64 % p as u64;
        let mut e = p as u64 - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let mut out = vec![0; n];
        for (i, o) in out.iter_mut().enumerate() {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            *o = (x + p - y) % p;
        }
        trim(&mut out);
        out
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }
}

/// Rabin's irreducibility test for a monic polynomial over F_p.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let n = (f.len() - 1) as u32;
    if n == 1 {
        return true;
    }
    let x = vec![0, 1];
    let frob_pow = |k: u32| -> Vec<u32> {
        let mut acc = x.clone();
        for _ in 0..k {
            acc = fp_poly::powmod(&acc, p as u64, f, p);
        }
        acc
    };
    let full = frob_pow(n);
    if fp_poly::sub(&full, &x, p) != Vec::<u32>::new() {
        return false;
    }
    for l in prime_factors(n) {
        let h = fp_poly::sub(&frob_pow(n / l), &x, p);
        let g = fp_poly::gcd(f, &h, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn lowest_irreducible(p: u32, n: u32) -> Vec<u32> {
    let count = (p as u64).pow(n);
    for k in 0..count {
        let mut coeffs = Vec::with_capacity(n as usize + 1);
        let mut v = k;
        for _ in 0..n {
            coeffs.push((v % p as u64) as u32);
            v /= p as u64;
        }
        coeffs.push(1);
        if n > 1 && coeffs[0] == 0 {
            continue;
        }
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl GfField {
    fn build(p: u32, n: u32) -> Result<GfField> {
        if !is_prime(p) {
            return Err(Error::BadField(format!("{p} is not prime")));
        }
        if n == 0 || (p as u64).checked_pow(n).is_none_or(|s| s > MAX_FIELD_SIZE) {
            return Err(Error::FieldTooLarge { p, n });
        }
        let size = p.pow(n);
        let order = size - 1;
        let modulus = lowest_irreducible(p, n);
        let to_digits = |c: u32| -> Vec<u32> {
            let mut v = Vec::with_capacity(n as usize);
            let mut c = c;
            for _ in 0..n {
                v.push(c % p);
                c /= p;
            }
            fp_poly::trim(&mut v);
            v
        };
        let from_digits = |d: &[u32]| -> u32 {
            d.iter().rev().fold(0u32, |acc, &x| acc * p + x)
        };
        // Primitive element search.
        let mut exp = vec![0u32; 2 * order.max(1) as usize];
        let mut log = vec![NO_LOG; size as usize];
        let mut found = false;
        for cand in 1..size {
            let cd = to_digits(cand);
            let mut cur = vec![1u32];
            let mut ok = true;
            for k in 0..order {
                let code = from_digits(&cur);
                if k > 0 && code == 1 {
                    ok = false;
                    break;
                }
                exp[k as usize] = code;
                cur = fp_poly::mulmod(&cur, &cd, &modulus, p);
            }
            if ok {
                found = true;
                break;
            }
        }
        debug_assert!(found);
        for k in 0..order {
            let c = exp[k as usize];
            exp[(k + order) as usize] = c;
            log[c as usize] = k;
        }
        let mut field = GfField { p, n, size, order, modulus, exp, log, zech: Vec::new() };
        if p != 2 && n > 1 {
            let mut zech = vec![NO_LOG; order as usize];
            for k in 0..order {
                let s = field.add_digits(field.exp[k as usize], 1);
                zech[k as usize] = if s == 0 { NO_LOG } else { field.log[s as usize] };
            }
            field.zech = zech;
        }
        Ok(field)
    }

    fn add_digits(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.n {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }
    /// Degree over F_p.
    pub fn degree(&self) -> u32 {
        self.n
    }
    pub fn size(&self) -> u32 {
        self.size
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.p == 2 {
            return a ^ b;
        }
        if self.n == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        let la = self.log[a as usize];
        let lb = self.log[b as usize];
        let d = if lb >= la { lb - la } else { lb + self.order - la };
        let z = self.zech[d as usize];
        if z == NO_LOG {
            0
        } else {
            self.exp[(la + z) as usize]
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if self.p == 2 || a == 0 {
            return a;
        }
        if self.n == 1 {
            return self.p - a;
        }
        self.exp[(self.log[a as usize] + self.order / 2) as usize]
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    /// Logarithm with respect to the internal primitive element; `None` for 0.
    #[inline]
    pub fn log_of(&self, a: Fe) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.log[a as usize])
        }
    }

    /// `prim^k` for the internal primitive element.
    #[inline]
    pub fn exp_of(&self, k: u64) -> Fe {
        self.exp[(k % self.order as u64) as usize]
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let l = self.log[a as usize];
        Ok(self.exp[((self.order - l) % self.order) as usize])
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = self.log[a as usize] as u64;
        self.exp[((l * (e % self.order as u64)) % self.order as u64) as usize]
    }

    /// `a^(p^k)` for any integer `k` (negative `k` applies the inverse Frobenius).
    #[inline]
    pub fn frob_p(&self, a: Fe, k: i64) -> Fe {
        if a == 0 || self.order == 1 {
            return a;
        }
        let k = k.rem_euclid(self.n as i64) as u32;
        let mut l = self.log[a as usize] as u64;
        for _ in 0..k {
            l = l * self.p as u64 % self.order as u64;
        }
        self.exp[l as usize]
    }

    /// Digits of the code: coefficients of `1, g, g^2, ...` in F_p.
    pub fn digits(&self, a: Fe) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.n as usize);
        let mut c = a;
        for _ in 0..self.n {
            v.push(c % self.p);
            c /= self.p;
        }
        v
    }

    pub fn from_digits(&self, d: &[u32]) -> Fe {
        let mut acc = 0u32;
        for (i, &x) in d.iter().enumerate().rev() {
            if i < self.n as usize {
                acc = acc * self.p + x % self.p;
            }
        }
        acc
    }

    pub fn from_int(&self, v: i64) -> Fe {
        v.rem_euclid(self.p as i64) as Fe
    }

    /// The generator `g` (root of the defining polynomial).
    pub fn gen(&self) -> Fe {
        if self.n == 1 {
            // F_p: report the primitive element used for logs.
            self.exp[if self.order > 1 { 1 } else { 0 }]
        } else {
            self.p
        }
    }

    /// A primitive element of the subfield `F_{p^e}`; requires `e | n`.
    pub fn subfield_primitive(&self, e: u32) -> Fe {
        assert!(self.n.is_multiple_of(e), "F_{{p^{e}}} is not a subfield of F_{{p^{}}}", self.n);
        let sub_order = self.p.pow(e) - 1;
        self.exp_of((self.order / sub_order) as u64)
    }

    /// Whether `a` lies in the subfield `F_{p^e}`.
    pub fn in_subfield(&self, a: Fe, e: u32) -> bool {
        self.frob_p(a, e as i64) == a
    }

    /// All elements of the subfield `F_{p^e}`, zero first, then by code.
    pub fn subfield_elements(&self, e: u32) -> Vec<Fe> {
        if e == self.n {
            return (0..self.size).collect();
        }
        let prim = self.subfield_primitive(e);
        let mut v = vec![0];
        let sub_order = self.p.pow(e) - 1;
        let mut x = 1;
        for _ in 0..sub_order {
            v.push(x);
            x = self.mul(x, prim);
        }
        v.sort_unstable();
        v
    }

    /// Render a code as a polynomial in `g` (plain integers for prime fields).
    pub fn format(&self, a: Fe) -> String {
        if self.n == 1 {
            return a.to_string();
        }
        let d = self.digits(a);
        let mut terms = Vec::new();
        for (i, &c) in d.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "g".to_string(),
                _ => format!("g^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }

    /// Parse a polynomial in `g` with integer coefficients, e.g. `g^2+2*g+1`.
    pub fn parse(&self, s: &str) -> Result<Fe> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let s = s.trim_start_matches('(').trim_end_matches(')');
        if s.is_empty() {
            return Err(Error::Parse("empty field literal".into()));
        }
        let mut acc = 0;
        let mut term = String::new();
        let mut sign = 1i64;
        let flush = |term: &str, sign: i64, acc: &mut Fe| -> Result<()> {
            if term.is_empty() {
                return Ok(());
            }
            let (coef, mono) = match term.split_once('*') {
                Some((c, m)) => (c.parse::<i64>().map_err(|_| Error::Parse(format!("bad coefficient `{c}`")))?, m),
                None if term.starts_with('g') => (1, term),
                None => (term.parse::<i64>().map_err(|_| Error::Parse(format!("bad term `{term}`")))?, ""),
            };
            let power = if mono.is_empty() {
                0
            } else if mono == "g" {
                1
            } else if let Some(e) = mono.strip_prefix("g^") {
                e.parse::<u64>().map_err(|_| Error::Parse(format!("bad exponent `{e}`")))?
            } else {
                return Err(Error::Parse(format!("unknown symbol in `{term}`")));
            };
            let g = if power == 0 { 1 } else { self.pow(self.gen_for_parse(), power) };
            let c = self.from_int(sign * coef);
            *acc = self.add(*acc, self.mul(c, g));
            Ok(())
        };
        for ch in s.chars() {
            match ch {
                '+' | '-' => {
                    flush(&term, sign, &mut acc)?;
                    term.clear();
                    sign = if ch == '-' { -1 } else { 1 };
                }
                _ => term.push(ch),
            }
        }
        flush(&term, sign, &mut acc)?;
        Ok(acc)
    }

    fn gen_for_parse(&self) -> Fe {
        if self.n == 1 {
            self.gen()
        } else {
            self.p
        }
    }
}

type Registry = Mutex<HashMap<(u32, u32), Arc<GfField>>>;
type EmbedRegistry = Mutex<HashMap<(u32, u32, u32), Arc<Vec<Fe>>>>;

fn registry() -> &'static Registry {
    static R: OnceLock<Registry> = OnceLock::new();
    R.get_or_init(|| Mutex::new(HashMap::new()))
}

fn embed_registry() -> &'static EmbedRegistry {
    static R: OnceLock<EmbedRegistry> = OnceLock::new();
    R.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The interned field `F_{p^n}`.
pub fn gf(p: u32, n: u32) -> Result<Arc<GfField>> {
    if let Some(f) = registry().lock().unwrap().get(&(p, n)) {
        return Ok(f.clone());
    }
    let field = Arc::new(GfField::build(p, n)?);
    let mut reg = registry().lock().unwrap();
    Ok(reg.entry((p, n)).or_insert(field).clone())
}

/// Code table of the canonical embedding `from -> to`: the generator of `from`
/// is sent to the smallest-code root of its defining polynomial in `to`.
pub fn embedding(from: &GfField, to: &GfField) -> Result<Arc<Vec<Fe>>> {
    if from.p != to.p || !to.n.is_multiple_of(from.n) {
        return Err(Error::TowerMismatch(format!("{from:?} does not embed in {to:?}")));
    }
    let key = (from.p, from.n, to.n);
    if let Some(t) = embed_registry().lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let table: Vec<Fe> = if from.n == 1 {
        (0..from.size).collect()
    } else {
        let eval = |x: Fe| -> Fe {
            from.modulus.iter().rev().fold(0, |acc, &c| to.add(to.mul(acc, x), c))
        };
        let gamma = (0..to.size).find(|&x| eval(x) == 0).expect("subfield root exists");
        let mut powers = vec![1 as Fe];
        for _ in 1..from.n {
            let last = *powers.last().unwrap();
            powers.push(to.mul(last, gamma));
        }
        (0..from.size)
            .map(|c| {
                from.digits(c)
                    .iter()
                    .zip(&powers)
                    .fold(0, |acc, (&d, &pw)| to.add(acc, to.mul(d as Fe, pw)))
            })
            .collect()
    };
    let table = Arc::new(table);
    embed_registry().lock().unwrap().insert(key, table.clone());
    Ok(table)
}

/// The smallest field containing both (same characteristic required).
pub fn common_field(a: &Arc<GfField>, b: &Arc<GfField>) -> Result<Arc<GfField>> {
    if a.p != b.p {
        return Err(Error::TowerMismatch(format!("{a:?} vs {b:?}")));
    }
    if Arc::ptr_eq(a, b) || a.n == b.n {
        return Ok(a.clone());
    }
    let n = num_integer::lcm(a.n, b.n);
    gf(a.p, n)
}

/// Hash-friendly digest of every interned field's defining polynomial.
pub fn table_fingerprint(fields: &[(u32, u32)]) -> String {
    let mut parts = Vec::new();
    for &(p, n) in fields {
        if let Ok(f) = gf(p, n) {
            let m: Vec<String> = f.modulus.iter().map(|c| c.to_string()).collect();
            parts.push(format!("{p}^{n}:[{}]", m.join(",")));
        }
    }
    parts.join(";")
}

/// A field element bundled with its field, for the value-level API.
#[derive(Clone)]
pub struct FieldElem {
    pub field: Arc<GfField>,
    pub code: Fe,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format(self.code))
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format(self.code))
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.code == other.code
    }
}
impl Eq for FieldElem {}

/// Field operations selectable by [`gf_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfOp {
    Add,
    Mul,
    Inv,
    /// `x -> x^(q^n)` with `q = p^e`.
    FrobQ { e: u32, n: i64 },
}

impl FieldElem {
    pub fn new(field: Arc<GfField>, code: Fe) -> Self {
        FieldElem { field, code }
    }
    pub fn zero(field: &Arc<GfField>) -> Self {
        FieldElem::new(field.clone(), 0)
    }
    pub fn one(field: &Arc<GfField>) -> Self {
        FieldElem::new(field.clone(), 1)
    }
    pub fn is_zero(&self) -> bool {
        self.code == 0
    }
    fn check(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::TowerMismatch(format!("{:?} vs {:?}", self.field, other.field)));
        }
        Ok(())
    }
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(FieldElem::new(self.field.clone(), self.field.add(self.code, other.code)))
    }
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(FieldElem::new(self.field.clone(), self.field.sub(self.code, other.code)))
    }
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(FieldElem::new(self.field.clone(), self.field.mul(self.code, other.code)))
    }
    pub fn inv(&self) -> Result<Self> {
        Ok(FieldElem::new(self.field.clone(), self.field.inv(self.code)?))
    }
    pub fn neg(&self) -> Self {
        FieldElem::new(self.field.clone(), self.field.neg(self.code))
    }
    /// `x^(q^n)` where `q = p^e`.
    pub fn frob_q(&self, e: u32, n: i64) -> Self {
        FieldElem::new(self.field.clone(), self.field.frob_p(self.code, e as i64 * n))
    }
}

/// Dispatch a single field operation; `b` is ignored for unary operations.
pub fn gf_arith(a: &FieldElem, b: &FieldElem, op: GfOp) -> Result<FieldElem> {
    match op {
        GfOp::Add => a.add(b),
        GfOp::Mul => a.mul(b),
        GfOp::Inv => a.inv(),
        GfOp::FrobQ { e, n } => Ok(a.frob_q(e, n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_multiplication_table() {
        // Brute-force table from g^2 + g + 1 = 0 over F_2: codes 0, 1, g = 2, g + 1 = 3.
        let f = gf(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let g = 2;
        assert_eq!(f.mul(g, g), 3);
        let table = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(f.mul(a, b), table[a as usize][b as usize], "{a}*{b}");
            }
        }
    }

    #[test]
    fn inverse_of_one_and_zero() {
        let f = gf(3, 2).unwrap();
        assert_eq!(f.inv(1).unwrap(), 1);
        assert_eq!(f.inv(0), Err(Error::DivisionByZero));
    }

    #[test]
    fn frobenius_has_order_n() {
        for (p, n) in [(2, 3), (3, 2), (5, 2), (3, 4)] {
            let f = gf(p, n).unwrap();
            for x in 0..f.size() {
                assert_eq!(f.frob_p(x, n as i64), x);
                assert_eq!(f.frob_p(f.frob_p(x, 1), -1), x);
            }
        }
    }

    #[test]
    fn subfield_detection() {
        let f = gf(2, 4).unwrap();
        let sub = f.subfield_elements(2);
        assert_eq!(sub.len(), 4);
        for &x in &sub {
            assert!(f.in_subfield(x, 2));
        }
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let small = gf(3, 2).unwrap();
        let big = gf(3, 4).unwrap();
        let e = embedding(&small, &big).unwrap();
        for a in 0..9 {
            for b in 0..9 {
                assert_eq!(e[small.mul(a, b) as usize], big.mul(e[a as usize], e[b as usize]));
                assert_eq!(e[small.add(a, b) as usize], big.add(e[a as usize], e[b as usize]));
            }
        }
    }

    #[test]
    fn parse_and_format_round_trip() {
        let f = gf(3, 3).unwrap();
        for x in 0..f.size() {
            assert_eq!(f.parse(&f.format(x)).unwrap(), x);
        }
        assert!(f.parse("h+1").is_err());
    }

    #[test]
    fn mismatched_towers_are_rejected() {
        let a = FieldElem::one(&gf(2, 2).unwrap());
        let b = FieldElem::one(&gf(2, 3).unwrap());
        assert!(matches!(a.add(&b), Err(Error::TowerMismatch(_))));
    }

    #[test]
    fn oversize_field_rejected() {
        assert!(matches!(gf(2, 21), Err(Error::FieldTooLarge { .. })));
        assert!(gf(4, 1).is_err());
    }
}
