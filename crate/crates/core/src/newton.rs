//! Newton polygons and tame root finding for polynomials with [`Px`] coefficients.
//!
//! Roots are located by slope dissection of the lower convex hull, the
//! residue equation of each slope is solved by exhaustive search over
//! `F_{p^{n k}}` for increasing `k`, and simple residue roots are refined by
//! Newton iteration. Clustered residue roots are separated by re-centering the
//! polynomial and recursing.

use std::sync::Arc;

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::gf::{embedding, gf, Fe, GfField};
use crate::puiseux::{Px, EXACT};

/// One edge of the lower convex hull.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    /// `(v_end - v_start) / (end - start)`; roots on this edge have valuation `-slope`.
    pub slope: Ratio<i64>,
}

impl Segment {
    pub fn length(&self) -> usize {
        self.end - self.start
    }
    pub fn root_valuation(&self) -> Ratio<i64> {
        -self.slope
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// `(i, val a_i)` for every coefficient distinguishable from zero.
    pub points: Vec<(usize, Ratio<i64>)>,
    /// Edges sorted by increasing slope.
    pub segments: Vec<Segment>,
}

impl NewtonPolygon {
    pub fn new(coeffs: &[Px]) -> NewtonPolygon {
        let points: Vec<(usize, Ratio<i64>)> =
            coeffs.iter().enumerate().filter_map(|(i, c)| c.valuation().map(|v| (i, v))).collect();
        let mut hull: Vec<(usize, Ratio<i64>)> = Vec::new();
        for &pt in &points {
            while hull.len() >= 2 {
                let (i1, v1) = hull[hull.len() - 2];
                let (i2, v2) = hull[hull.len() - 1];
                // Drop the middle point when it lies on or above the chord.
                let lhs = (v2 - v1) * Ratio::from_integer((pt.0 - i1) as i64);
                let rhs = (pt.1 - v1) * Ratio::from_integer((i2 - i1) as i64);
                if lhs >= rhs {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        let segments = hull
            .windows(2)
            .map(|w| Segment {
                start: w[0].0,
                end: w[1].0,
                slope: (w[1].1 - w[0].1) / Ratio::from_integer((w[1].0 - w[0].0) as i64),
            })
            .collect();
        NewtonPolygon { points, segments }
    }

    /// Sum of horizontal lengths.
    pub fn width(&self) -> usize {
        self.segments.iter().map(Segment::length).sum()
    }
}

#[derive(Debug, Clone)]
pub struct RootOptions {
    /// Absolute valuation cap to which roots are refined.
    pub target: Ratio<i64>,
    /// Largest degree over `F_p` allowed for residue fields.
    pub max_field_degree: u32,
    /// Skip wild slopes instead of failing.
    pub skip_wild: bool,
    pub max_newton_steps: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            target: Ratio::from_integer(64),
            max_field_degree: 16,
            skip_wild: false,
            max_newton_steps: 64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Root {
    pub value: Px,
    pub multiplicity: usize,
    /// Valuation of `P(root)` (or its cap when zero to precision).
    pub residual: Ratio<i64>,
}

/// Horner evaluation with every partial result truncated below `limit` slots.
pub fn eval_poly(coeffs: &[Px], x: &Px, limit: i64) -> Px {
    let Some(last) = coeffs.last() else {
        return Px::zero(x.field());
    };
    let mut acc = last.clone();
    for c in coeffs.iter().rev().skip(1) {
        acc = &acc.mul_to(x, limit) + c;
        acc = acc.truncated(limit);
    }
    acc
}

pub fn derivative(coeffs: &[Px]) -> Vec<Px> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| {
            let f = c.field();
            c.scale(f.from_int(i as i64))
        })
        .collect()
}

/// Newton iteration from `x0`; returns the refined root and the valuations of
/// `P(x_k)` along the way.
pub fn newton_refine(coeffs: &[Px], x0: &Px, target: Ratio<i64>, max_steps: usize) -> Result<(Px, Vec<Ratio<i64>>)> {
    let mut all: Vec<Px> = coeffs.to_vec();
    all.push(x0.clone());
    let mut all = Px::unify(&all);
    let mut x = all.pop().unwrap();
    let coeffs = &all[..];
    let dcoeffs = derivative(coeffs);
    let mut log = Vec::new();
    let limit_slots = |x: &Px| (target * x.ram() as i64).ceil().to_integer() + 4 * x.ram() as i64;
    let mut best = Ratio::from_integer(i64::MIN / 4);
    for _ in 0..max_steps {
        let limit = limit_slots(&x);
        let px = eval_poly(coeffs, &x, limit);
        let res = px.val_or_cap();
        log.push(res);
        if px.is_zero_to_prec() || res > target {
            break;
        }
        if res <= best && log.len() > 2 {
            // No further progress: limited by coefficient precision.
            break;
        }
        best = best.max(res);
        let dp = eval_poly(&dcoeffs, &x, limit);
        // Enough relative precision in 1/P'(x) for the step to reach `limit`.
        let rel = (limit - px.lo() + dp.lo()).max(16) + 8;
        let step = px.mul_to(&dp.inv_rel(rel)?, limit);
        if step.is_zero_to_prec() {
            break;
        }
        x = (&x - &step).truncated(limit);
    }
    Ok((x, log))
}

/// Nonzero roots (with multiplicity) of `sum coeffs[i] y^i` over the smallest
/// `F_{p^{n k}}` containing all of them.
/// Roots with multiplicity, in the extension where they live.
type ResidueRoots = (Arc<GfField>, Vec<(Fe, usize)>);

fn residue_roots(field: &Arc<GfField>, coeffs: &[Fe], max_deg: u32) -> Result<ResidueRoots> {
    let start = coeffs.iter().position(|&c| c != 0).unwrap_or(0);
    let poly: Vec<Fe> = coeffs[start..].to_vec();
    let want = poly.len() - 1;
    let p = field.characteristic();
    let n = field.degree();
    let mut k = 1;
    loop {
        let deg = n * k;
        if deg > max_deg || (p as u64).pow(deg) > crate::gf::MAX_FIELD_SIZE {
            return Err(Error::ResidueFieldTooLarge { degree: deg });
        }
        let ext = gf(p, deg)?;
        let table = embedding(field, &ext)?;
        let mut rem: Vec<Fe> = poly.iter().map(|&c| table[c as usize]).collect();
        let mut found = Vec::new();
        let mut total = 0;
        for x in 1..ext.size() {
            let mut mult = 0;
            loop {
                // Synthetic division by (y - x).
                let mut q = vec![0; rem.len().saturating_sub(1)];
                let mut carry = 0;
                for i in (0..rem.len()).rev() {
                    let val = ext.add(rem[i], ext.mul(carry, x));
                    if i == 0 {
                        carry = val;
                    } else {
                        q[i - 1] = val;
                        carry = val;
                    }
                }
                if carry != 0 || rem.len() <= 1 {
                    break;
                }
                rem = q;
                mult += 1;
            }
            if mult > 0 {
                found.push((x, mult));
                total += mult;
                if total == want {
                    break;
                }
            }
        }
        if total == want {
            return Ok((ext, found));
        }
        k += 1;
    }
}

/// Coefficients of `P(c + y)` as a polynomial in `y`.
fn taylor_shift(coeffs: &[Px], c: &Px, limit: i64) -> Vec<Px> {
    let mut a: Vec<Px> = coeffs.to_vec();
    let n = a.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = a[j + 1].mul_to(c, limit);
            a[j] = (&a[j] + &t).truncated(limit);
        }
    }
    a
}

struct Finder<'a> {
    opts: &'a RootOptions,
    p: u32,
}

impl Finder<'_> {
    fn roots(&self, coeffs: &[Px], min_val: Option<Ratio<i64>>, depth: usize) -> Result<Vec<Root>> {
        let coeffs = Px::unify(coeffs);
        let mut out = Vec::new();
        let zeros = coeffs.iter().take_while(|c| c.is_zero_to_prec()).count();
        if zeros == coeffs.len() {
            return Ok(out);
        }
        if zeros > 0 && min_val.is_none() {
            let f = coeffs[0].field().clone();
            out.push(Root { value: Px::zero(&f), multiplicity: zeros, residual: Ratio::from_integer(EXACT) });
        }
        let poly = NewtonPolygon::new(&coeffs);
        for seg in &poly.segments {
            let w = seg.root_valuation();
            if min_val.is_some_and(|m| w <= m) {
                continue;
            }
            let ram = coeffs[0].ram();
            let new_ram = (ram as i64).lcm(w.denom());
            let extra = new_ram / ram as i64;
            if extra % self.p as i64 == 0 {
                if self.opts.skip_wild {
                    continue;
                }
                return Err(Error::WildRamification(format!("{}", seg.slope)));
            }
            let field = coeffs[0].field().clone();
            // Residue polynomial from points on the segment.
            let mut res = vec![0; seg.length() + 1];
            for (i, c) in coeffs.iter().enumerate().take(seg.end + 1).skip(seg.start) {
                if let Some(v) = c.valuation() {
                    let on_line = v == poly.points.iter().find(|pt| pt.0 == seg.start).unwrap().1
                        + seg.slope * Ratio::from_integer((i - seg.start) as i64);
                    if on_line {
                        res[i - seg.start] = c.leading().unwrap();
                    }
                }
            }
            let (ext, rroots) = residue_roots(&field, &res, self.opts.max_field_degree)?;
            let lifted: Vec<Px> = coeffs.iter().map(|c| c.lift_to(&ext, new_ram as u32)).collect();
            let slot = (w * new_ram).to_integer();
            for (gamma, mult) in rroots {
                let x0 = Px::from_slots(&ext, new_ram as u32, slot, vec![gamma], EXACT);
                if mult == 1 {
                    let (x, log) = newton_refine(&lifted, &x0, self.opts.target, self.opts.max_newton_steps)?;
                    out.push(Root { value: x, multiplicity: 1, residual: *log.last().unwrap() });
                } else if depth >= 24 {
                    out.push(Root { value: x0, multiplicity: mult, residual: Ratio::from_integer(0) });
                } else {
                    let limit = (self.opts.target * new_ram).ceil().to_integer() + 4 * new_ram;
                    let shifted = taylor_shift(&lifted, &x0, limit);
                    let sub = self.roots(&shifted, Some(w), depth + 1)?;
                    let found: usize = sub.iter().map(|r| r.multiplicity).sum();
                    if found == 0 {
                        out.push(Root { value: x0.clone(), multiplicity: mult, residual: Ratio::from_integer(0) });
                    }
                    for r in sub {
                        out.push(Root { value: &x0 + &r.value, ..r });
                    }
                }
            }
        }
        Ok(out)
    }
}

/// All tame roots of `sum coeffs[i] x^i`, sorted by valuation and then by the
/// digits of the root in a common field.
pub fn newton_roots(coeffs: &[Px], opts: &RootOptions) -> Result<Vec<Root>> {
    if coeffs.iter().all(Px::is_zero_to_prec) {
        return Err(Error::ZeroToPrec);
    }
    let p = coeffs[0].field().characteristic();
    let finder = Finder { opts, p };
    let mut roots = finder.roots(coeffs, None, 0)?;
    let values: Vec<Px> = roots.iter().map(|r| r.value.clone()).collect();
    let unified = Px::unify(&values);
    for (r, v) in roots.iter_mut().zip(unified) {
        r.value = v;
    }
    roots.sort_by_key(|a| root_key(&a.value));
    Ok(roots)
}

fn root_key(x: &Px) -> (Ratio<i64>, Vec<Fe>) {
    (x.val_or_cap(), x.coeffs().iter().take(8).copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> RootOptions {
        RootOptions { target: Ratio::from_integer(40), ..Default::default() }
    }

    #[test]
    fn polygon_widths_add_up() {
        let f = gf(3, 1).unwrap();
        let th = Px::theta(&f);
        // theta + x^2 + x^8
        let mut c = vec![Px::zero(&f); 9];
        c[0] = th;
        c[2] = Px::one(&f);
        c[8] = Px::one(&f);
        let np = NewtonPolygon::new(&c);
        assert_eq!(np.width(), 8);
        assert_eq!(np.segments.len(), 1);
        assert_eq!(np.segments[0].root_valuation(), Ratio::new(-1, 8));
    }

    #[test]
    fn carlitz_q2_torsion_root() {
        // x + theta over F_2: root theta.
        let f = gf(2, 1).unwrap();
        let c = vec![Px::theta(&f), Px::one(&f)];
        let roots = newton_roots(&c, &opts()).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((&roots[0].value - &Px::theta(&f)).is_zero_to_prec());
    }

    #[test]
    fn square_root_of_theta() {
        let f = gf(3, 1).unwrap();
        let c = vec![Px::theta(&f).neg_val(), Px::zero(&f), Px::one(&f)];
        let roots = newton_roots(&c, &opts()).unwrap();
        assert_eq!(roots.len(), 2);
        for r in &roots {
            assert_eq!(r.value.ram(), 2);
            let sq = &r.value * &r.value;
            assert!((&sq - &Px::theta(&f)).val_or_cap() >= Ratio::from_integer(30));
        }
    }

    #[test]
    fn artin_schreier_is_wild() {
        let f = gf(2, 1).unwrap();
        let c = vec![Px::theta(&f).neg_val(), Px::one(&f).neg_val(), Px::one(&f)];
        assert!(matches!(newton_roots(&c, &opts()), Err(Error::WildRamification(_))));
    }

    #[test]
    fn newton_converges_quadratically() {
        // x^2 - x - theta^{-1} over F_3: root near 1 (simple).
        let f = gf(3, 1).unwrap();
        let c = vec![Px::theta_pow(&f, 2, -1), Px::constant(&f, 2), Px::one(&f)];
        let x0 = Px::one(&f);
        let (_, log) = newton_refine(&c, &x0, Ratio::from_integer(200), 20).unwrap();
        for w in log.windows(2) {
            if w[1] < Ratio::from_integer(200) {
                assert!(w[1] >= w[0] * 2, "{log:?}");
            }
        }
    }
}
