//! Truncated series in `t` with [`Px`] coefficients, and matrices of them.
//!
//! A [`TateSeries`] of order `N` stands for an element of the Tate algebra
//! known modulo `t^N`. Twisting acts on coefficients only, so `t` itself is
//! fixed.

use std::sync::Arc;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::GfField;
use crate::puiseux::Px;

/// Default truncation order in `t`.
pub const DEFAULT_T_TRUNC: usize = 48;
/// Number of trailing terms inspected by the tail certificate.
pub const TAIL_WINDOW: usize = 5;

#[derive(Debug, Clone)]
pub struct TateSeries {
    coeffs: Vec<Px>,
}

/// Value of a series at `t = theta` with its certified precision.
#[derive(Debug, Clone)]
pub struct Specialization {
    pub value: Px,
    /// Valuation below which the value is certified.
    pub attained: Ratio<i64>,
}

impl TateSeries {
    /// Series of order `coeffs.len()`.
    pub fn new(coeffs: Vec<Px>) -> TateSeries {
        assert!(!coeffs.is_empty(), "truncation order must be positive");
        TateSeries { coeffs }
    }
    pub fn zero(field: &Arc<GfField>, n: usize) -> TateSeries {
        TateSeries::new(vec![Px::zero(field); n])
    }
    pub fn constant(c: Px, n: usize) -> TateSeries {
        let mut v = vec![Px::zero(c.field()); n];
        v[0] = c;
        TateSeries::new(v)
    }
    pub fn one(field: &Arc<GfField>, n: usize) -> TateSeries {
        TateSeries::constant(Px::one(field), n)
    }
    /// `t - theta`.
    pub fn t_minus_theta(field: &Arc<GfField>, n: usize) -> TateSeries {
        let mut s = TateSeries::constant(Px::theta(field).neg_val(), n);
        if n > 1 {
            s.coeffs[1] = Px::one(field);
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }
    pub fn coeffs(&self) -> &[Px] {
        &self.coeffs
    }
    pub fn coeff(&self, m: usize) -> &Px {
        &self.coeffs[m]
    }
    pub fn field(&self) -> &Arc<GfField> {
        self.coeffs[0].field()
    }

    /// Smallest valuation (or cap) over all coefficients.
    pub fn min_valuation(&self) -> Ratio<i64> {
        self.coeffs.iter().map(Px::val_or_cap).min().unwrap()
    }

    pub fn add(&self, o: &TateSeries) -> TateSeries {
        let n = self.order().min(o.order());
        TateSeries::new((0..n).map(|i| &self.coeffs[i] + &o.coeffs[i]).collect())
    }
    pub fn neg(&self) -> TateSeries {
        TateSeries::new(self.coeffs.iter().map(Px::neg_val).collect())
    }
    pub fn sub(&self, o: &TateSeries) -> TateSeries {
        self.add(&o.neg())
    }
    pub fn scale(&self, c: &Px) -> TateSeries {
        TateSeries::new(self.coeffs.iter().map(|x| c * x).collect())
    }

    pub fn mul(&self, o: &TateSeries) -> TateSeries {
        let n = self.order().min(o.order());
        let out = (0..n)
            .map(|m| {
                let mut acc = Px::zero(self.field());
                for i in 0..=m {
                    let (a, b) = (&self.coeffs[i], &o.coeffs[m - i]);
                    if a.is_zero_to_prec() && a.is_exact() || b.is_zero_to_prec() && b.is_exact() {
                        continue;
                    }
                    acc = &acc + &(a * b);
                }
                acc
            })
            .collect();
        TateSeries::new(out)
    }

    /// Multiply by `t^k`, dropping terms beyond the order.
    pub fn shift(&self, k: usize) -> TateSeries {
        let n = self.order();
        let mut v = vec![Px::zero(self.field()); n];
        if k < n {
            v[k..].clone_from_slice(&self.coeffs[..n - k]);
        }
        TateSeries::new(v)
    }

    /// Coefficientwise `x -> x^(q^n)`.
    pub fn twist(&self, qe: u32, n: i64) -> TateSeries {
        TateSeries::new(self.coeffs.iter().map(|c| c.frob(qe, n)).collect())
    }

    /// Inverse of a series with unit constant term.
    pub fn inv(&self) -> Result<TateSeries> {
        let c0 = &self.coeffs[0];
        if c0.is_zero_to_prec() {
            return Err(Error::NonUnitConstantTerm);
        }
        let inv0 = c0.inv()?;
        let mut g: Vec<Px> = vec![inv0.clone()];
        for m in 1..self.order() {
            let mut acc = Px::zero(self.field());
            for k in 1..=m {
                acc = &acc + &(&self.coeffs[k] * &g[m - k]);
            }
            g.push(&acc.neg_val() * &inv0);
        }
        Ok(TateSeries::new(g))
    }

    /// `sum c_m theta^m`, certified by the tail: the last [`TAIL_WINDOW`]
    /// terms must reach `target` and be non-decreasing in valuation.
    pub fn eval_at_theta(&self, target: Ratio<i64>) -> Result<Specialization> {
        let terms: Vec<Px> = self.coeffs.iter().enumerate().map(|(m, c)| c.mul_theta_pow(m as i64)).collect();
        let vals: Vec<Ratio<i64>> = terms.iter().map(Px::val_or_cap).collect();
        let w = TAIL_WINDOW.min(vals.len());
        let tail = &vals[vals.len() - w..];
        let tail_min = *tail.iter().min().unwrap();
        let trending = tail.windows(2).all(|p| p[1] >= p[0]);
        if tail_min < target || !trending {
            return Err(Error::InsufficientTruncation(format!(
                "tail valuations {:?} do not certify target {target}",
                tail.iter().map(|v| v.to_string()).collect::<Vec<_>>()
            )));
        }
        let mut sum = Px::zero(self.field());
        for t in &terms {
            sum = &sum + t;
        }
        let attained = sum.cap_val().min(tail_min);
        Ok(Specialization { value: sum.truncated_val(attained), attained })
    }

    pub fn literals(&self) -> Vec<String> {
        self.coeffs.iter().map(Px::to_literal).collect()
    }
}

impl Serialize for TateSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TateSeries", 2)?;
        st.serialize_field("N", &self.order())?;
        st.serialize_field("coeffs", &self.literals())?;
        st.end()
    }
}

#[derive(Debug, Clone)]
pub struct TateMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<TateSeries>,
}

/// Matrix operation selector for [`mat_ops`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatOp {
    Mul,
    Add,
    Twist(i64),
    Inv,
}

impl TateMatrix {
    pub fn from_rows(rows: Vec<Vec<TateSeries>>) -> Result<TateMatrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged or empty matrix".into()));
        }
        Ok(TateMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }
    pub fn identity(field: &Arc<GfField>, r: usize, n: usize) -> TateMatrix {
        let entries = (0..r * r)
            .map(|k| if k / r == k % r { TateSeries::one(field, n) } else { TateSeries::zero(field, n) })
            .collect();
        TateMatrix { rows: r, cols: r, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, i: usize, j: usize) -> &TateSeries {
        &self.entries[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: TateSeries) {
        self.entries[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> Vec<TateSeries> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }
    pub fn field(&self) -> &Arc<GfField> {
        self.entries[0].field()
    }
    pub fn order(&self) -> usize {
        self.entries.iter().map(TateSeries::order).min().unwrap()
    }

    pub fn min_valuation(&self) -> Ratio<i64> {
        self.entries.iter().map(TateSeries::min_valuation).min().unwrap()
    }

    pub fn add(&self, o: &TateMatrix) -> Result<TateMatrix> {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let entries = self.entries.par_iter().zip(&o.entries).map(|(a, b)| a.add(b)).collect();
        Ok(TateMatrix { entries, ..*self })
    }

    pub fn sub(&self, o: &TateMatrix) -> Result<TateMatrix> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> TateMatrix {
        TateMatrix { entries: self.entries.iter().map(TateSeries::neg).collect(), ..*self }
    }

    pub fn mul(&self, o: &TateMatrix) -> Result<TateMatrix> {
        if self.cols != o.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let (r, c) = (self.rows, o.cols);
        let entries = (0..r * c)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / c, k % c);
                let mut acc = self.get(i, 0).mul(o.get(0, j));
                for l in 1..self.cols {
                    acc = acc.add(&self.get(i, l).mul(o.get(l, j)));
                }
                acc
            })
            .collect();
        Ok(TateMatrix { rows: r, cols: c, entries })
    }

    /// Entrywise twist.
    pub fn twist(&self, qe: u32, n: i64) -> TateMatrix {
        let entries = self.entries.par_iter().map(|e| e.twist(qe, n)).collect();
        TateMatrix { entries, ..*self }
    }

    pub fn transpose(&self) -> TateMatrix {
        let entries = (0..self.rows * self.cols)
            .map(|k| self.get(k % self.rows, k / self.rows).clone())
            .collect();
        TateMatrix { rows: self.cols, cols: self.rows, entries }
    }

    /// Gauss-Jordan inverse over the series ring; every pivot must have a
    /// t-constant term that is nonzero to precision.
    pub fn inv(&self) -> Result<TateMatrix> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch("inverse of a non-square matrix".into()));
        }
        let r = self.rows;
        let n = self.order();
        let mut a: Vec<Vec<TateSeries>> = (0..r).map(|i| self.row(i)).collect();
        let mut b: Vec<Vec<TateSeries>> = (0..r).map(|i| TateMatrix::identity(self.field(), r, n).row(i)).collect();
        for c in 0..r {
            // Pivot with the smallest constant-term valuation (most robust unit).
            let piv = (c..r)
                .filter(|&i| !a[i][c].coeff(0).is_zero_to_prec())
                .min_by_key(|&i| a[i][c].coeff(0).val_or_cap())
                .ok_or(Error::NonUnitConstantTerm)?;
            a.swap(c, piv);
            b.swap(c, piv);
            let inv = a[c][c].inv()?;
            a[c] = a[c].iter().map(|x| x.mul(&inv)).collect();
            b[c] = b[c].iter().map(|x| x.mul(&inv)).collect();
            for i in 0..r {
                if i == c {
                    continue;
                }
                let f = a[i][c].clone();
                let (pa, pb) = (a[c].clone(), b[c].clone());
                a[i] = a[i].iter().zip(&pa).map(|(x, y)| x.sub(&f.mul(y))).collect();
                b[i] = b[i].iter().zip(&pb).map(|(x, y)| x.sub(&f.mul(y))).collect();
            }
        }
        TateMatrix::from_rows(b)
    }

    /// Entrywise specialization at `t = theta`.
    pub fn eval_at_theta(&self, target: Ratio<i64>) -> Result<Vec<Vec<Specialization>>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).eval_at_theta(target)).collect())
            .collect()
    }
}

impl Serialize for TateMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<&TateSeries>> =
            (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j)).collect()).collect();
        rows.serialize(s)
    }
}

/// One-stop matrix arithmetic; `b` is ignored for unary operations.
pub fn mat_ops(a: &TateMatrix, b: &TateMatrix, op: MatOp, qe: u32) -> Result<TateMatrix> {
    match op {
        MatOp::Mul => a.mul(b),
        MatOp::Add => a.add(b),
        MatOp::Twist(n) => Ok(a.twist(qe, n)),
        MatOp::Inv => a.inv(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::gf;

    #[test]
    fn geometric_series_at_theta() {
        let f = gf(2, 1).unwrap();
        let s = TateSeries::new((0..40).map(|m| Px::theta_pow(&f, 1, -2 * m)).collect());
        let v = s.eval_at_theta(Ratio::from_integer(30)).unwrap();
        // 1/(1 - 1/theta) = sum theta^{-m}
        let want = Px::from_slots(&f, 1, 0, vec![1; 40], 40);
        assert!((&v.value - &want).val_or_cap() >= Ratio::from_integer(30));
    }

    #[test]
    fn short_tail_is_rejected() {
        let f = gf(2, 1).unwrap();
        let s = TateSeries::new((0..10).map(|m| Px::theta_pow(&f, 1, -2 * m)).collect());
        assert!(matches!(s.eval_at_theta(Ratio::from_integer(30)), Err(Error::InsufficientTruncation(_))));
    }

    #[test]
    fn identity_inverse() {
        let f = gf(3, 1).unwrap();
        let id = TateMatrix::identity(&f, 3, 8);
        let inv = id.inv().unwrap();
        assert!(inv.sub(&id).unwrap().min_valuation() >= Ratio::from_integer(1000));
    }

    #[test]
    fn singular_constant_term() {
        let f = gf(3, 1).unwrap();
        let t = TateSeries::one(&f, 6).shift(1);
        let m = TateMatrix::from_rows(vec![vec![t]]).unwrap();
        assert!(matches!(m.inv(), Err(Error::NonUnitConstantTerm)));
    }

    #[test]
    fn twist_fixes_fq_coefficients() {
        let f = gf(3, 1).unwrap();
        let s = TateSeries::new(vec![Px::one(&f), Px::zero(&f), Px::one(&f)]);
        let tw = s.twist(1, 2);
        assert!(tw.sub(&s).min_valuation() >= Ratio::from_integer(1000));
    }
}
