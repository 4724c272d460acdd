//! Gaussian elimination: rank, reduced row echelon form, and kernels.
//!
//! Two entry points share one elimination kernel shape: a raw-code path over a
//! [`GfField`] for large sparse-ish systems, and a generic path over any
//! [`Scalar`] (field elements, rational functions).

use std::sync::Arc;

use crate::gf::{Fe, FieldElem, GfField};
use crate::poly::RationalFn;

/// Minimal field interface for the generic elimination routines.
pub trait Scalar: Clone {
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Multiplicative inverse; only called on nonzero values.
    fn inv(&self) -> Self;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
}

impl Scalar for FieldElem {
    fn is_zero(&self) -> bool {
        self.code == 0
    }
    fn add(&self, o: &Self) -> Self {
        FieldElem::add(self, o).expect("same field")
    }
    fn sub(&self, o: &Self) -> Self {
        FieldElem::sub(self, o).expect("same field")
    }
    fn mul(&self, o: &Self) -> Self {
        FieldElem::mul(self, o).expect("same field")
    }
    fn inv(&self) -> Self {
        FieldElem::inv(self).expect("nonzero pivot")
    }
    fn zero_like(&self) -> Self {
        FieldElem::zero(&self.field)
    }
    fn one_like(&self) -> Self {
        FieldElem::one(&self.field)
    }
}

impl Scalar for RationalFn {
    fn is_zero(&self) -> bool {
        RationalFn::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        RationalFn::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        RationalFn::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RationalFn::mul(self, o)
    }
    fn inv(&self) -> Self {
        RationalFn::inv(self).expect("nonzero pivot")
    }
    fn zero_like(&self) -> Self {
        RationalFn::zero(&self.num().field, self.num().var)
    }
    fn one_like(&self) -> Self {
        RationalFn::one(&self.num().field, self.num().var)
    }
}

/// In-place reduced row echelon form; returns pivot columns.
pub fn rref<S: Scalar>(m: &mut [Vec<S>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].inv();
        for x in &mut m[r][c..cols] {
            *x = x.mul(&inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                let pivot_row = m[r][c..cols].to_vec();
                for (x, pj) in m[i][c..cols].iter_mut().zip(&pivot_row) {
                    *x = x.sub(&factor.mul(pj));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<S: Scalar>(m: &[Vec<S>]) -> usize {
    let mut work = m.to_vec();
    rref(&mut work).len()
}

/// Basis of `{v : M v = 0}`; `cols` is needed when `m` has no rows.
pub fn nullspace<S: Scalar>(m: &[Vec<S>], cols: usize, sample: &S) -> Vec<Vec<S>> {
    let mut work = m.to_vec();
    let pivots = rref(&mut work);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![sample.zero_like(); cols];
            v[fc] = sample.one_like();
            for (row, &pc) in pivots.iter().enumerate() {
                let x = work[row][fc].clone();
                v[pc] = sample.zero_like().sub(&x);
            }
            v
        })
        .collect()
}

/// RREF over raw codes of `field`; returns pivot columns.
pub fn rref_codes(field: &GfField, m: &mut [Vec<Fe>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, pr);
        let inv = field.inv(m[r][c]).expect("nonzero pivot");
        for x in &mut m[r][c..cols] {
            *x = field.mul(*x, inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let factor = field.neg(row[c]);
                for j in c..cols {
                    if pivot_row[j] != 0 {
                        row[j] = field.add(row[j], field.mul(factor, pivot_row[j]));
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Kernel basis over raw codes, one vector per free column in increasing order.
pub fn nullspace_codes(field: &GfField, m: &[Vec<Fe>], cols: usize) -> Vec<Vec<Fe>> {
    let mut work = m.to_vec();
    let pivots = rref_codes(field, &mut work);
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|fc| {
            let mut v = vec![0; cols];
            v[fc] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = field.neg(work[row][fc]);
            }
            v
        })
        .collect()
}

/// Kernel of a matrix of field elements (all in one field).
pub fn nullspace_elems(field: &Arc<GfField>, m: &[Vec<FieldElem>], cols: usize) -> Vec<Vec<FieldElem>> {
    let raw: Vec<Vec<Fe>> = m.iter().map(|r| r.iter().map(|x| x.code).collect()).collect();
    nullspace_codes(field, &raw, cols)
        .into_iter()
        .map(|v| v.into_iter().map(|c| FieldElem::new(field.clone(), c)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::gf;

    #[test]
    fn identity_has_trivial_kernel() {
        let f = gf(5, 1).unwrap();
        let m = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert!(nullspace_codes(&f, &m, 3).is_empty());
    }

    #[test]
    fn zero_matrix_full_kernel() {
        let f = gf(2, 1).unwrap();
        let m = vec![vec![0, 0], vec![0, 0]];
        assert_eq!(nullspace_codes(&f, &m, 2).len(), 2);
    }

    #[test]
    fn all_ones_over_f2() {
        // Enumerate F_2^2: only (0,0) and (1,1) satisfy [[1,1],[1,1]] v = 0.
        let f = gf(2, 1).unwrap();
        let m = vec![vec![1, 1], vec![1, 1]];
        let mut brute = Vec::new();
        for a in 0..2u32 {
            for b in 0..2u32 {
                if (a + b) % 2 == 0 && (a, b) != (0, 0) {
                    brute.push(vec![a, b]);
                }
            }
        }
        assert_eq!(nullspace_codes(&f, &m, 2), brute);
    }

    #[test]
    fn generic_and_raw_paths_agree() {
        let f = gf(3, 2).unwrap();
        let raw = [vec![1, 2, 3, 4], vec![2, 4, 6, 8], vec![0, 1, 5, 7]];
        let elems: Vec<Vec<FieldElem>> =
            raw.iter().map(|r| r.iter().map(|&c| FieldElem::new(f.clone(), c)).collect()).collect();
        let a = nullspace_elems(&f, &elems, 4);
        let b = nullspace(&elems, 4, &FieldElem::zero(&f));
        assert_eq!(a, b);
    }
}
