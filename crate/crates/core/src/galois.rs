//! The image of `End(rho)` in `Mat_r(F_q(t))`, its centralizer, and the
//! transcendence-degree predictions built on it.
//!
//! The difference Galois group of `Psi_rho` is the centralizer of the
//! endomorphism algebra inside `GL_r`. That identification rests on Pink's
//! theorem on the Galois image of the Tate module, which is not computed here:
//! only the dimension identity `dim Cent = r^2 / s` is checked, and the group
//! is represented by its commutation conditions alone.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::GfField;
use crate::linalg::{nullspace, rank};
use crate::poly::{RationalFn, Var};

pub type RatMatrix = Vec<Vec<RationalFn>>;

/// Generators of a subalgebra of `Mat_r(F_q(t))`; always contains the identity.
#[derive(Debug, Clone)]
pub struct EndoAlgebra {
    field: Arc<GfField>,
    r: usize,
    gens: Vec<RatMatrix>,
}

fn identity(field: &Arc<GfField>, r: usize) -> RatMatrix {
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| if i == j { RationalFn::one(field, Var::T) } else { RationalFn::zero(field, Var::T) })
                .collect()
        })
        .collect()
}

fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let r = a.len();
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let mut acc = RationalFn::zero(&a[0][0].num().field, Var::T);
                    for k in 0..r {
                        if !a[i][k].is_zero() && !b[k][j].is_zero() {
                            acc = acc.add(&a[i][k].mul(&b[k][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

impl EndoAlgebra {
    pub fn new(field: &Arc<GfField>, r: usize, gens: Vec<RatMatrix>) -> Result<EndoAlgebra> {
        if r == 0 {
            return Err(Error::ShapeMismatch("empty matrix algebra".into()));
        }
        for g in &gens {
            if g.len() != r || g.iter().any(|row| row.len() != r) {
                return Err(Error::ShapeMismatch(format!("generator is not {r} x {r}")));
            }
        }
        let mut all = vec![identity(field, r)];
        all.extend(gens);
        Ok(EndoAlgebra { field: field.clone(), r, gens: all })
    }

    pub fn size(&self) -> usize {
        self.r
    }

    pub fn generators(&self) -> &[RatMatrix] {
        &self.gens
    }

    /// Dimension over `F_q(t)` of the span of all words of length `<= depth`
    /// in the generators. For the image of `End(rho)` this is `s`.
    pub fn span_dim(&self, depth: usize) -> usize {
        let flat = |m: &RatMatrix| m.iter().flatten().cloned().collect::<Vec<_>>();
        let mut words = self.gens.clone();
        let mut layer = self.gens.clone();
        for _ in 1..depth {
            let next: Vec<RatMatrix> =
                layer.iter().flat_map(|w| self.gens.iter().map(move |g| mat_mul(w, g))).collect();
            words.extend(next.iter().cloned());
            layer = next;
        }
        rank(&words.iter().map(flat).collect::<Vec<_>>())
    }
}

/// Dimension over `F_q(t)` of `{X : X g = g X for every generator g}`.
pub fn centralizer_dim(alg: &EndoAlgebra) -> usize {
    let r = alg.r;
    let zero = RationalFn::zero(&alg.field, Var::T);
    let mut rows = Vec::new();
    for g in &alg.gens {
        // (Xg - gX)_ij = sum_k x_ik g_kj - g_ik x_kj; unknown x_ab sits in column a*r + b.
        for i in 0..r {
            for j in 0..r {
                let mut row = vec![zero.clone(); r * r];
                for k in 0..r {
                    row[i * r + k] = row[i * r + k].add(&g[k][j]);
                    row[k * r + j] = row[k * r + j].sub(&g[i][k]);
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    nullspace(&rows, r * r, &zero).len()
}

fn check(r: usize, s: usize) -> Result<usize> {
    if s == 0 || !r.is_multiple_of(s) {
        return Err(Error::BadDivisibility { r, s });
    }
    Ok(r / s)
}

/// `r^2 / s`: transcendence degree of the period matrix entries.
pub fn predicted_trdeg_periods(r: usize, s: usize) -> Result<usize> {
    Ok(r * check(r, s)?)
}

/// `r (r/s + n)`: transcendence degree of periods, quasi-periods and `n`
/// independent logarithms with their quasi-logarithms.
pub fn predicted_trdeg_logs(r: usize, s: usize, n: usize) -> Result<usize> {
    Ok(r * (check(r, s)? + n))
}

/// Linear-level evidence from the relation finder.
#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalSummary {
    /// What was searched, e.g. "period matrix entries".
    pub values: String,
    pub count: usize,
    /// Height bound `D` of the search.
    pub height: usize,
    /// Relations found at height `<= D`.
    pub relations: usize,
    /// `count - relations`: dimension at height `<= D`, not a proof of independence.
    pub span_dim: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GaloisReport {
    pub r: usize,
    pub s: usize,
    /// Search caps `(B, d)` under which `s` was certified.
    pub caps: (usize, u32),
    pub algebra_dim: usize,
    pub centralizer_dim: usize,
    pub predicted_trdeg: usize,
    pub predicted_trdeg_logs: Option<(usize, usize)>,
    /// `centralizer_dim == r^2 / s` and `algebra_dim == s`.
    pub consistent: bool,
    pub empirical: Option<EmpiricalSummary>,
}

impl GaloisReport {
    /// `n_logs` adds the prediction `r (r/s + n)` for that many logarithms.
    pub fn new(
        s: usize,
        caps: (usize, u32),
        alg: &EndoAlgebra,
        n_logs: Option<usize>,
        empirical: Option<EmpiricalSummary>,
    ) -> Result<GaloisReport> {
        let r = alg.size();
        let predicted = predicted_trdeg_periods(r, s)?;
        let logs = n_logs.map(|n| predicted_trdeg_logs(r, s, n).map(|v| (n, v))).transpose()?;
        let algebra_dim = alg.span_dim(r);
        let centralizer_dim = centralizer_dim(alg);
        Ok(GaloisReport {
            r,
            s,
            caps,
            algebra_dim,
            centralizer_dim,
            predicted_trdeg: predicted,
            predicted_trdeg_logs: logs,
            consistent: centralizer_dim == predicted && algebra_dim == s,
            empirical,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::gf;
    use crate::poly::Poly;

    fn c(f: &Arc<GfField>, coeffs: &[u32]) -> RationalFn {
        RationalFn::from_poly(Poly::new(f, Var::T, coeffs.to_vec()))
    }

    #[test]
    fn identity_centralizer_is_full() {
        let f = gf(3, 1).unwrap();
        for r in 1..=4 {
            let alg = EndoAlgebra::new(&f, r, vec![]).unwrap();
            assert_eq!(centralizer_dim(&alg), r * r);
            assert_eq!(alg.span_dim(2), 1);
        }
    }

    #[test]
    fn quadratic_element_rank_two() {
        // Companion matrix of x^2 - t generates F_q(sqrt t).
        let f = gf(3, 1).unwrap();
        let m = vec![vec![c(&f, &[]), c(&f, &[0, 1])], vec![c(&f, &[1]), c(&f, &[])]];
        let alg = EndoAlgebra::new(&f, 2, vec![m]).unwrap();
        assert_eq!(centralizer_dim(&alg), 2);
        assert_eq!(alg.span_dim(2), 2);
    }

    #[test]
    fn predictions() {
        assert_eq!(predicted_trdeg_periods(1, 1).unwrap(), 1);
        assert_eq!(predicted_trdeg_periods(2, 1).unwrap(), 4);
        assert_eq!(predicted_trdeg_periods(2, 2).unwrap(), 2);
        assert_eq!(predicted_trdeg_logs(2, 1, 1).unwrap(), 6);
        assert_eq!(predicted_trdeg_logs(1, 1, 3).unwrap(), 4);
        for r in 1..=6 {
            for s in (1..=r).filter(|s| r % s == 0) {
                assert_eq!(predicted_trdeg_logs(r, s, 0).unwrap(), predicted_trdeg_periods(r, s).unwrap());
            }
        }
        assert!(matches!(predicted_trdeg_periods(3, 2), Err(Error::BadDivisibility { r: 3, s: 2 })));
        assert!(matches!(predicted_trdeg_logs(2, 0, 1), Err(Error::BadDivisibility { .. })));
    }

    #[test]
    fn bad_shape() {
        let f = gf(2, 1).unwrap();
        assert!(EndoAlgebra::new(&f, 2, vec![vec![vec![c(&f, &[1])]]]).is_err());
    }
}
