//! Torsion towers and periods.
//!
//! A tower is a sequence `x_0, x_1, ...` with `rho_t(x_0) = 0`, `x_0 != 0`
//! and `rho_t(x_(m+1)) = x_m`, so that `x_m = exp_rho(omega / theta^(m+1))`
//! for a period `omega`. Once some `x_m` lies in the disc where the logarithm
//! converges, `omega = theta^(m+1) log_rho(x_m)`.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::module::DrinfeldModule;
use crate::newton::{newton_roots, RootOptions};
use crate::puiseux::Px;

/// Extra valuation requested from the torsion root finder.
const ROOT_GUARD: i64 = 4;
const MAX_FIXED_POINT_STEPS: usize = 400;

#[derive(Debug, Clone)]
pub struct PeriodData {
    /// Lattice generators `omega_1..omega_r`.
    pub periods: Vec<Px>,
    /// The tower that produced each period.
    pub towers: Vec<Vec<Px>>,
    /// Tower level whose logarithm gave the period.
    pub levels: Vec<usize>,
}

/// Nonzero roots of `rho_t(x) / x`, in the canonical root order.
pub fn torsion_roots(rho: &DrinfeldModule, extra: i64) -> Result<Vec<Px>> {
    let r = rho.rank();
    let qr = rho.qpow(r).ok_or_else(|| Error::BadField("q^r too large".into()))? as usize;
    let f = rho.base_field();
    let mut coeffs = vec![Px::zero(f); qr];
    coeffs[0] = Px::theta(f);
    for (j, k) in rho.kappa().iter().enumerate() {
        coeffs[rho.qpow(j + 1).unwrap() as usize - 1] = k.clone();
    }
    let target = rho.precision().working() + Ratio::from_integer(extra + ROOT_GUARD);
    let opts = RootOptions { target, ..Default::default() };
    let roots = newton_roots(&coeffs, &opts)?;
    Ok(roots.into_iter().filter(|r| !r.value.is_zero_to_prec()).map(|r| r.value).collect())
}

/// A root of maximal valuation of `rho_t(x) = y`: by the contraction
/// `x -> (y - sum kappa_j x^(q^j)) / theta` where it contracts, else from the
/// Newton polygon (first such root in the canonical order).
pub fn division_by_t(rho: &DrinfeldModule, y: &Px) -> Result<Px> {
    match division_fixed_point(rho, y) {
        Err(Error::InsufficientPrecision(_)) => division_newton(rho, y),
        other => other,
    }
}

fn division_newton(rho: &DrinfeldModule, y: &Px) -> Result<Px> {
    let r = rho.rank();
    let qr = rho.qpow(r).ok_or_else(|| Error::BadField("q^r too large".into()))? as usize;
    let f = rho.base_field();
    let mut coeffs = vec![Px::zero(f); qr + 1];
    coeffs[0] = y.neg_val();
    coeffs[1] = Px::theta(f);
    for (j, k) in rho.kappa().iter().enumerate() {
        coeffs[rho.qpow(j + 1).unwrap() as usize] = k.clone();
    }
    let opts = RootOptions { target: y.cap_val() + 1, ..Default::default() };
    let roots = newton_roots(&coeffs, &opts)?;
    let best = roots.iter().map(|r| r.value.val_or_cap()).max().ok_or(Error::TowerDead)?;
    Ok(roots.into_iter().find(|r| r.value.val_or_cap() == best).unwrap().value)
}

fn division_fixed_point(rho: &DrinfeldModule, y: &Px) -> Result<Px> {
    let th_inv = Px::theta_pow(rho.base_field(), 1, -1);
    let mut x = y * &th_inv;
    let cap = y.cap_val() + 1;
    for _ in 0..MAX_FIXED_POINT_STEPS {
        let mut s = y.clone();
        for (j, k) in rho.kappa().iter().enumerate() {
            if k.is_zero_to_prec() && k.is_exact() {
                continue;
            }
            let need = cap - k.val_or_cap();
            let xq = x.frob_to(rho.qe(), j as i64 + 1, crate::module::slots(need, x.ram()) + 1);
            s = &s - &(k * &xq);
        }
        let next = (&s * &th_inv).truncated_val(cap);
        if (&next - &x).is_zero_to_prec() {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::InsufficientPrecision("division by t did not converge".into()))
}

/// `x_0..x_depth` starting at the given torsion point.
pub fn tower_from(rho: &DrinfeldModule, x0: Px, depth: usize) -> Result<Vec<Px>> {
    if x0.is_zero_to_prec() {
        return Err(Error::TowerDead);
    }
    // Exact seeds (such as theta for q = 2) would make the fixed point iteration unbounded.
    let cap = rho.precision().working() + Ratio::from_integer(depth as i64 + 1 + ROOT_GUARD);
    let mut tower = vec![x0.truncated_val(cap)];
    for m in 0..depth {
        let next = division_by_t(rho, &tower[m])?;
        if next.is_zero_to_prec() {
            return Err(Error::TowerDead);
        }
        tower.push(next);
    }
    Ok(tower)
}

/// Tower seeded at the `branch`-th nonzero t-torsion point (cyclically).
pub fn torsion_tower(rho: &DrinfeldModule, depth: usize, branch: usize) -> Result<Vec<Px>> {
    let roots = torsion_roots(rho, depth as i64 + 1)?;
    if roots.is_empty() {
        return Err(Error::TowerDead);
    }
    let x0 = roots[branch % roots.len()].clone();
    tower_from(rho, x0, depth)
}

/// `omega = theta^(m+1) log(x_m)` at the first level where the logarithm
/// converges and the next level agrees.
pub fn period_from_tower(rho: &DrinfeldModule, tower: &[Px]) -> Result<(Px, usize)> {
    let work = rho.precision().working();
    let mut last_err = None;
    let mut found: Option<(Px, usize)> = None;
    for (m, x) in tower.iter().enumerate() {
        let shift = m as i64 + 1;
        let l = match rho.log_eval_to(x, work + shift) {
            Ok(l) => l,
            Err(e @ Error::LogDivergence(_)) => {
                last_err = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        let omega = l.mul_theta_pow(shift).truncated_val(work);
        match found {
            None => found = Some((omega, m)),
            Some((prev, pm)) => {
                if (&prev - &omega).val_or_cap() >= rho.precision().target_val() {
                    return Ok((prev, pm));
                }
                return Err(Error::InsufficientPrecision(format!(
                    "periods from levels {pm} and {m} disagree"
                )));
            }
        }
    }
    match (found, last_err) {
        (Some(f), _) => Ok(f),
        (None, Some(e)) => Err(e),
        (None, None) => Err(Error::LogDivergence("empty tower".into())),
    }
}

/// Is `x` in the `F_q`-span of `basis` (to the working precision)?
fn in_fq_span(rho: &DrinfeldModule, basis: &[Px], x: &Px) -> bool {
    let f = x.field();
    let table = crate::gf::embedding(rho.base_field(), f).expect("base field embeds");
    let q = rho.q() as usize;
    let target = rho.precision().target_val();
    let total = q.pow(basis.len() as u32);
    (0..total).any(|mut idx| {
        let mut acc = Px::zero(f);
        for b in basis {
            let c = (idx % q) as u32;
            idx /= q;
            if c != 0 {
                acc = &acc + &b.scale(table[c as usize]);
            }
        }
        (&acc - x).val_or_cap() >= target
    })
}

/// A lattice basis: towers seeded at t-torsion points forming an `F_q`-basis of `rho[t]`.
pub fn lattice(rho: &DrinfeldModule, depth: usize, branch: usize) -> Result<PeriodData> {
    let roots = torsion_roots(rho, depth as i64 + 1)?;
    let n = roots.len();
    if n == 0 {
        return Err(Error::TowerDead);
    }
    let mut seeds: Vec<Px> = Vec::new();
    for k in 0..n {
        let x = &roots[(branch + k) % n];
        if seeds.len() == rho.rank() {
            break;
        }
        if !in_fq_span(rho, &seeds, x) {
            seeds.push(x.clone());
        }
    }
    if seeds.len() < rho.rank() {
        return Err(Error::DependentPeriods);
    }
    let mut data = PeriodData { periods: Vec::new(), towers: Vec::new(), levels: Vec::new() };
    for s in seeds {
        let tower = tower_from(rho, s, depth)?;
        let (omega, level) = period_from_tower(rho, &tower)?;
        data.periods.push(omega);
        data.towers.push(tower);
        data.levels.push(level);
    }
    Ok(data)
}

/// Default tower depth: enough levels for the logarithm to converge.
pub fn default_depth(rho: &DrinfeldModule) -> usize {
    rho.rank() + 3
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::gf;
    use crate::module::Precision;
    use crate::poly::{Poly, Var};

    fn prec() -> Precision {
        Precision { target: 40, guard: 10, t_trunc: 48 }
    }

    #[test]
    fn carlitz_q2_x0_is_theta() {
        let m = DrinfeldModule::carlitz(2, prec()).unwrap();
        let t = torsion_tower(&m, 0, 0).unwrap();
        assert!((&t[0] - &Px::theta(m.base_field())).is_zero_to_prec());
    }

    #[test]
    fn carlitz_x0_power() {
        // x_0^(q-1) = -theta
        let m = DrinfeldModule::carlitz(3, prec()).unwrap();
        let t = torsion_tower(&m, 2, 0).unwrap();
        let sq = &t[0] * &t[0];
        let f = m.base_field();
        assert!((&sq + &Px::theta(f)).val_or_cap() >= Ratio::from_integer(40));
        assert_eq!(t[0].valuation(), Some(Ratio::new(-1, 2)));
    }

    #[test]
    fn tower_is_compatible() {
        let m = DrinfeldModule::carlitz(3, prec()).unwrap();
        let t = torsion_tower(&m, 3, 1).unwrap();
        let rho = m.rho_t();
        for w in t.windows(2) {
            let img = rho.apply(&w[1], 200);
            assert!((&img - &w[0]).val_or_cap() >= Ratio::from_integer(40));
        }
    }

    #[test]
    fn carlitz_period_valuation() {
        for q in [2u32, 3] {
            let m = DrinfeldModule::carlitz(q, prec()).unwrap();
            let t = torsion_tower(&m, 3, 0).unwrap();
            let (w, _) = period_from_tower(&m, &t).unwrap();
            let qq = q as i64;
            assert_eq!(w.valuation(), Some(Ratio::new(-qq, qq - 1)));
            let e = m.exp_eval(&w).unwrap();
            assert!(e.val_or_cap() >= Ratio::from_integer(38), "{e}");
        }
    }

    #[test]
    fn rank_two_valuation_follows_polygon() {
        let f = gf(2, 1).unwrap();
        let m = DrinfeldModule::from_polys(2, vec![Poly::one(&f, Var::Theta), Poly::one(&f, Var::Theta)], prec())
            .unwrap();
        let roots = torsion_roots(&m, 2).unwrap();
        assert_eq!(roots.len(), 3);
        for r in &roots {
            assert_eq!(r.valuation(), Some(Ratio::new(-1, 3)));
        }
        let data = lattice(&m, 4, 0).unwrap();
        assert_eq!(data.periods.len(), 2);
        for w in &data.periods {
            assert!(m.exp_eval(w).unwrap().val_or_cap() >= Ratio::from_integer(38));
        }
    }
}
