//! Anderson generating functions, biderivations and quasi-periods.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::module::{inv_frob_diff, slots, DrinfeldModule};
use crate::puiseux::{Px, EXACT};
use crate::tate::{Specialization, TateSeries};

/// A biderivation, given by `delta_t = sum_(j>=1) b_j tau^j`.
#[derive(Debug, Clone)]
pub struct Biderivation {
    /// `b_1, b_2, ...`
    pub b: Vec<Px>,
}

impl Biderivation {
    /// The inner biderivation `delta^(1)`: `t -> theta - rho_t`.
    pub fn inner(rho: &DrinfeldModule) -> Biderivation {
        Biderivation { b: rho.kappa().iter().map(Px::neg_val).collect() }
    }
    /// `t -> tau^j` for `j >= 1`.
    pub fn tau(rho: &DrinfeldModule, j: usize) -> Biderivation {
        assert!(j >= 1);
        let f = rho.base_field();
        let mut b = vec![Px::zero(f); j];
        b[j - 1] = Px::one(f);
        Biderivation { b }
    }
    pub fn zero(rho: &DrinfeldModule) -> Biderivation {
        Biderivation { b: vec![Px::zero(rho.base_field())] }
    }
    /// The standard de Rham basis `delta^(1), tau, ..., tau^(r-1)`.
    pub fn standard_basis(rho: &DrinfeldModule) -> Vec<Biderivation> {
        let mut v = vec![Biderivation::inner(rho)];
        v.extend((1..rho.rank()).map(|j| Biderivation::tau(rho, j)));
        v
    }
    /// `delta_t(x)` truncated at `cap`.
    pub fn apply(&self, qe: u32, x: &Px, cap: Ratio<i64>) -> Px {
        let mut acc = Px::zero(x.field());
        for (j, bj) in self.b.iter().enumerate() {
            if bj.is_zero_to_prec() && bj.is_exact() {
                continue;
            }
            let need = cap - bj.val_or_cap();
            let xq = x.frob_to(qe, j as i64 + 1, slots(need, x.ram()) + 1);
            acc = &acc + &bj.mul_to(&xq, EXACT);
        }
        acc.truncated_val(cap)
    }
}

/// Weights `w_i = alpha_i u^(q^i)` of the closed form
/// `f_u = sum_i w_i / (theta^(q^i) - t)`.
fn agf_weights(rho: &DrinfeldModule, u: &Px, cap: Ratio<i64>) -> Result<Vec<Px>> {
    let mut w = Vec::new();
    let mut prev: Option<Ratio<i64>> = None;
    for i in 0.. {
        let Some(qi) = rho.qpow(i) else { break };
        let a = rho.exp_coeffs(i)?.pop().unwrap();
        if a.is_exact() && a.is_zero_to_prec() {
            w.push(a);
            continue;
        }
        let need = cap - a.val_or_cap();
        let uq = u.frob_to(rho.qe(), i as i64, slots(need, u.ram()) + 1);
        let wi = a.mul_to(&uq, EXACT).truncated_val(cap);
        // Contribution to the t^0 coefficient has valuation val(w_i) + q^i.
        let v = wi.val_or_cap() + qi;
        w.push(wi);
        if v >= cap && prev.is_some_and(|p| v > p) {
            break;
        }
        prev = Some(v);
    }
    Ok(w)
}

/// `f_u(t) = sum_(m<n) exp_rho(u / theta^(m+1)) t^m`.
pub fn agf(rho: &DrinfeldModule, u: &Px, n: usize) -> Result<TateSeries> {
    let cap = rho.precision().working();
    if u.is_zero_to_prec() {
        return Ok(TateSeries::zero(u.field(), n));
    }
    let w = agf_weights(rho, u, cap)?;
    let coeffs = (0..n)
        .map(|m| {
            let mut c = Px::zero(u.field());
            let ccap = cap + m as i64;
            for (i, wi) in w.iter().enumerate() {
                let shift = rho.qpow(i).unwrap() * (m as i64 + 1);
                let term = wi.mul_theta_pow(-shift);
                if term.val_or_cap() >= ccap && term.is_zero_to_prec() {
                    continue;
                }
                c = &c + &term;
            }
            c.truncated_val(ccap)
        })
        .collect();
    Ok(TateSeries::new(coeffs))
}

/// `kappa_1 f^(1) + ... + kappa_r f^(r)`.
pub fn twisted_combination(rho: &DrinfeldModule, f: &TateSeries) -> TateSeries {
    let mut acc = TateSeries::zero(f.field(), f.order());
    for (j, k) in rho.kappa().iter().enumerate() {
        acc = acc.add(&f.twist(rho.qe(), j as i64 + 1).scale(k));
    }
    acc
}

/// Residual series of `sum kappa_j f^(j) - (t - theta) f - exp(u)`.
pub fn agf_residual(rho: &DrinfeldModule, u: &Px, f: &TateSeries) -> Result<TateSeries> {
    let n = f.order();
    let lhs = twisted_combination(rho, f);
    let tm = TateSeries::t_minus_theta(u.field(), n);
    let e = rho.exp_eval(u)?;
    let rhs = tm.mul(f).add(&TateSeries::constant(e, n));
    Ok(lhs.sub(&rhs))
}

/// `sum kappa_j f^(j)` at `t = theta` minus `exp_rho(u) - u`.
pub fn agf_specialization_residual(rho: &DrinfeldModule, u: &Px, f: &TateSeries) -> Result<Specialization> {
    let spec = twisted_combination(rho, f).eval_at_theta(rho.precision().target_val())?;
    let e = rho.exp_eval(u)?;
    Ok(Specialization { value: &spec.value - &(&e - u), attained: spec.attained })
}

/// `c_0..c_count` with `F_delta(z) = sum c_m z^(q^m)`:
/// `c_m (theta^(q^m) - theta) = sum_(j>=1) b_j alpha_(m-j)^(q^j)`.
pub fn quasi_coeffs(rho: &DrinfeldModule, delta: &Biderivation, count: usize) -> Result<Vec<Px>> {
    let f = rho.base_field();
    let alpha = rho.exp_coeffs(count)?;
    let rel = 2 * rho.precision().working().to_integer();
    let mut out = vec![Px::zero(f)];
    for m in 1..=count {
        let qm = rho.qpow(m).ok_or_else(|| Error::InsufficientPrecision(format!("q^{m} overflow")))?;
        let mut s = Px::zero(f);
        for (j, bj) in delta.b.iter().enumerate() {
            let j = j + 1;
            if j > m || bj.is_zero_to_prec() && bj.is_exact() {
                continue;
            }
            let a = &alpha[m - j];
            let limit = a.lo().saturating_mul(rho.qpow(j).unwrap()).saturating_add(rel * a.ram() as i64);
            s = &s + &(bj * &a.frob_to(rho.qe(), j as i64, limit));
        }
        let rel = rel * s.ram() as i64;
        out.push((&s * &inv_frob_diff(f, qm, rel)).truncated_rel(rel));
    }
    Ok(out)
}

/// `F_delta(u)` from the power series `sum c_m u^(q^m)`.
pub fn quasi_period_series(rho: &DrinfeldModule, delta: &Biderivation, u: &Px) -> Result<Px> {
    let cap = rho.precision().working();
    let mut sum = Px::zero(u.field());
    let mut prev: Option<Ratio<i64>> = None;
    let mut count = 8;
    let mut m = 1;
    loop {
        if rho.qpow(m).is_none() {
            break;
        }
        if m > count {
            count *= 2;
        }
        let c = quasi_coeffs(rho, delta, count)?;
        let cm = &c[m];
        if cm.is_exact() && cm.is_zero_to_prec() {
            m += 1;
            continue;
        }
        let need = cap - cm.val_or_cap();
        let uq = u.frob_to(rho.qe(), m as i64, slots(need, u.ram()) + 1);
        let term = cm.mul_to(&uq, EXACT).truncated_val(cap);
        let v = term.val_or_cap();
        sum = &sum + &term;
        if v >= cap && prev.is_some_and(|p| v > p) {
            break;
        }
        prev = Some(v);
        m += 1;
    }
    Ok(sum.truncated_val(cap))
}

/// `F_delta(u) = sum_(m>=0) theta^m delta_t(exp_rho(u / theta^(m+1)))`, each
/// exponential evaluated directly.
pub fn quasi_period(rho: &DrinfeldModule, delta: &Biderivation, u: &Px) -> Result<Px> {
    let cap = rho.precision().working();
    let mut sum = Px::zero(u.field());
    let mut prev: Option<Ratio<i64>> = None;
    for m in 0..100_000i64 {
        let x = rho.exp_eval_to(&u.mul_theta_pow(-(m + 1)), cap + m)?;
        let term = delta.apply(rho.qe(), &x, cap + m).mul_theta_pow(m);
        let v = term.val_or_cap();
        sum = &sum + &term;
        if v >= cap && prev.is_some_and(|p| v > p) {
            return Ok(sum.truncated_val(cap));
        }
        prev = Some(v);
    }
    Err(Error::InsufficientTruncation("telescoped series did not settle".into()))
}

/// `F_delta(u)` from generating functions: `sum_j b_j f_u^(j)(theta)`.
pub fn quasi_period_agf(rho: &DrinfeldModule, delta: &Biderivation, u: &Px) -> Result<Specialization> {
    let n = rho.precision().t_trunc;
    let f = agf(rho, u, n)?;
    let mut acc = TateSeries::zero(u.field(), n);
    for (j, bj) in delta.b.iter().enumerate() {
        if bj.is_zero_to_prec() && bj.is_exact() {
            continue;
        }
        acc = acc.add(&f.twist(rho.qe(), j as i64 + 1).scale(bj));
    }
    acc.eval_at_theta(rho.precision().target_val())
}

/// `P[i][j] = F_(delta_j)(omega_i)` for the standard basis; column 0 is `omega_i`.
pub fn period_matrix(rho: &DrinfeldModule, periods: &[Px]) -> Result<Vec<Vec<Px>>> {
    let basis = Biderivation::standard_basis(rho);
    periods
        .iter()
        .map(|w| {
            let mut row = vec![w.clone()];
            for d in &basis[1..] {
                row.push(quasi_period(rho, d, w)?);
            }
            Ok(row)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::Precision;
    use crate::periods::{period_from_tower, torsion_tower};

    fn prec() -> Precision {
        Precision { target: 30, guard: 16, t_trunc: 48 }
    }

    #[test]
    fn first_quasi_coefficient_carlitz() {
        let m = DrinfeldModule::carlitz(3, prec()).unwrap();
        let c = quasi_coeffs(&m, &Biderivation::tau(&m, 1), 1).unwrap();
        let a = m.exp_coeffs(1).unwrap();
        assert!((&c[1] - &a[1]).is_zero_to_prec());
    }

    #[test]
    fn inner_quasi_coeffs_are_minus_alpha() {
        let m = DrinfeldModule::carlitz(2, prec()).unwrap();
        let c = quasi_coeffs(&m, &Biderivation::inner(&m), 4).unwrap();
        let a = m.exp_coeffs(4).unwrap();
        for i in 1..=4 {
            assert!((&c[i] + &a[i]).val_or_cap() >= Ratio::from_integer(40));
        }
    }

    #[test]
    fn inner_quasi_period_of_period_is_period() {
        let m = DrinfeldModule::carlitz(3, prec()).unwrap();
        let t = torsion_tower(&m, 3, 0).unwrap();
        let (w, _) = period_from_tower(&m, &t).unwrap();
        let v = quasi_period(&m, &Biderivation::inner(&m), &w).unwrap();
        assert!((&v - &w).val_or_cap() >= Ratio::from_integer(30));
    }

    #[test]
    fn agf_residue_at_theta() {
        // (t - theta) f_u at theta is -u.
        let m = DrinfeldModule::carlitz(2, prec()).unwrap();
        let f = m.base_field();
        let u = Px::parse(f, "th^(-1) + th^(-2)").unwrap();
        let s = agf(&m, &u, 48).unwrap();
        let g = TateSeries::t_minus_theta(f, 48).mul(&s);
        let v = g.eval_at_theta(Ratio::from_integer(30)).unwrap();
        assert!((&v.value + &u).val_or_cap() >= Ratio::from_integer(30));
    }

    #[test]
    fn zero_biderivation_vanishes() {
        let m = DrinfeldModule::carlitz(2, prec()).unwrap();
        let c = quasi_coeffs(&m, &Biderivation::zero(&m), 3).unwrap();
        assert!(c.iter().all(Px::is_zero_to_prec));
    }
}
