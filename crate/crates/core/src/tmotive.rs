//! The t-motive of a normalized Drinfeld module: `Phi`, `Theta`, `V`, the
//! rigid analytic trivialization `Psi` built from generating functions,
//! extension blocks for logarithm points, and endomorphism matrices.
//!
//! Identities between polynomial matrices are checked exactly. Identities
//! involving generating functions are checked by the minimum valuation of the
//! residual matrix. Inverse twists divide absolute precision by `q`, so
//! `Psi^(-1)` is assembled from untwisted data, `(V^(-1))^(-1) Upsilon^(-1)`,
//! rather than by twisting `Psi`; the extension block runs at `q` times the
//! working precision for the same reason.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::embedding;
use crate::hom::Morphism;
use crate::module::{DrinfeldModule, Precision};
use crate::poly::RationalFn;
use crate::puiseux::Px;
use crate::quasi::agf;
use crate::reconstruct::rational_reconstruct;
use crate::relations::{find_relations, RelationCertificate};
use crate::tate::{TateMatrix, TateSeries};

/// Residuals may fall short of the target by this many valuation units.
pub const RESIDUAL_SLACK: i64 = 4;

/// Outcome of one identity check.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub identity: String,
    /// `None` when the residual is exactly zero.
    pub min_valuation: Option<Ratio<i64>>,
    pub target: Ratio<i64>,
    pub pass: bool,
}

impl ResidualReport {
    fn analytic(identity: &str, residual: &TateMatrix, prec: Precision) -> ResidualReport {
        let target = Ratio::from_integer(prec.target - RESIDUAL_SLACK);
        let v = residual.min_valuation();
        ResidualReport { identity: identity.into(), min_valuation: Some(v), target, pass: v >= target }
    }
    fn exact(identity: &str, residual: &TateMatrix) -> ResidualReport {
        let zero = is_exact_zero(residual);
        ResidualReport {
            identity: identity.into(),
            min_valuation: if zero { None } else { Some(residual.min_valuation()) },
            target: Ratio::from_integer(0),
            pass: zero,
        }
    }
    fn scalar(identity: &str, value: &Px, prec: Precision) -> ResidualReport {
        let target = Ratio::from_integer(prec.target - RESIDUAL_SLACK);
        let v = value.val_or_cap();
        ResidualReport { identity: identity.into(), min_valuation: Some(v), target, pass: v >= target }
    }
}

impl Serialize for ResidualReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ResidualReport", 4)?;
        st.serialize_field("identity", &self.identity)?;
        let v = self.min_valuation.map_or_else(|| "exact".to_string(), |v| v.to_string());
        st.serialize_field("min_valuation", &v)?;
        st.serialize_field("target", &self.target.to_string())?;
        st.serialize_field("pass", &self.pass)?;
        st.end()
    }
}

fn is_exact_zero(m: &TateMatrix) -> bool {
    (0..m.rows()).all(|i| {
        (0..m.cols()).all(|j| m.get(i, j).coeffs().iter().all(|c| c.is_zero_to_prec() && c.is_exact()))
    })
}

fn konst(c: Px, n: usize) -> TateSeries {
    TateSeries::constant(c, n)
}

fn require_normalized(rho: &DrinfeldModule) -> Result<()> {
    if rho.is_normalized() {
        Ok(())
    } else {
        Err(Error::NotNormalized)
    }
}

/// Companion matrix of `sigma` on `M_rho`: ones on the superdiagonal, bottom
/// row `(t - theta, -kappa_1^(-1), ..., -kappa_(r-1)^(-r+1))`.
pub fn build_phi(rho: &DrinfeldModule, n: usize) -> Result<TateMatrix> {
    require_normalized(rho)?;
    let r = rho.rank();
    let f = rho.base_field();
    let mut m = TateMatrix::identity(f, r, n);
    for i in 0..r {
        for j in 0..r {
            let e = if i + 1 < r && j == i + 1 {
                TateSeries::one(f, n)
            } else if i + 1 == r && j == 0 {
                TateSeries::t_minus_theta(f, n)
            } else if i + 1 == r {
                konst(rho.kappa()[j - 1].frob(rho.qe(), -(j as i64)).neg_val(), n)
            } else {
                TateSeries::zero(f, n)
            };
            m.set(i, j, e);
        }
    }
    Ok(m)
}

/// `Theta`: ones on the subdiagonal, last column `(t - theta, -kappa_1, ..., -kappa_(r-1))`.
pub fn build_theta(rho: &DrinfeldModule, n: usize) -> TateMatrix {
    let r = rho.rank();
    let f = rho.base_field();
    let mut m = TateMatrix::identity(f, r, n);
    for i in 0..r {
        for j in 0..r {
            let e = if j + 1 == r && i == 0 {
                TateSeries::t_minus_theta(f, n)
            } else if j + 1 == r {
                konst(rho.kappa()[i - 1].neg_val(), n)
            } else if i == j + 1 {
                TateSeries::one(f, n)
            } else {
                TateSeries::zero(f, n)
            };
            m.set(i, j, e);
        }
    }
    m
}

/// `V_ij = kappa_(i+j-1)^(-(j-1))` above the antidiagonal (`kappa_r = 1`), zero below.
pub fn build_v(rho: &DrinfeldModule, n: usize) -> Result<TateMatrix> {
    require_normalized(rho)?;
    let r = rho.rank();
    let f = rho.base_field();
    let mut m = TateMatrix::identity(f, r, n);
    for i in 0..r {
        for j in 0..r {
            let e = if i + j < r {
                konst(rho.kappa()[i + j].frob(rho.qe(), -(j as i64)), n)
            } else {
                TateSeries::zero(f, n)
            };
            m.set(i, j, e);
        }
    }
    Ok(m)
}

/// Exact check of `V^(-1) Phi = Theta V`.
pub fn check_v_identity(rho: &DrinfeldModule, n: usize) -> Result<ResidualReport> {
    let v = build_v(rho, n)?;
    let lhs = v.twist(rho.qe(), -1).mul(&build_phi(rho, n)?)?;
    let rhs = build_theta(rho, n).mul(&v)?;
    Ok(ResidualReport::exact("V^(-1) Phi = Theta V", &lhs.sub(&rhs)?))
}

/// `Upsilon_ij = f_i^(j-1)` for the generating functions of the periods.
pub fn build_upsilon(rho: &DrinfeldModule, periods: &[Px], n: usize) -> Result<TateMatrix> {
    let r = rho.rank();
    if periods.len() != r {
        return Err(Error::ShapeMismatch(format!("{} periods for rank {r}", periods.len())));
    }
    let rows = periods
        .iter()
        .map(|w| {
            let f = agf(rho, w, n)?;
            Ok((0..r).map(|j| f.twist(rho.qe(), j as i64)).collect())
        })
        .collect::<Result<Vec<Vec<TateSeries>>>>()?;
    TateMatrix::from_rows(rows)
}

/// The matrices attached to `rho` and its period lattice.
#[derive(Debug, Clone)]
pub struct TMotiveData {
    pub phi: TateMatrix,
    pub theta: TateMatrix,
    pub v: TateMatrix,
    pub upsilon: TateMatrix,
    pub upsilon1: TateMatrix,
    pub psi: TateMatrix,
    /// `Psi^(-1)` assembled from untwisted data.
    pub psi_minus: TateMatrix,
    pub t_trunc: usize,
    pub precision: Precision,
    pub reports: Vec<ResidualReport>,
}

impl TMotiveData {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

fn singular(e: Error) -> Error {
    match e {
        Error::NonUnitConstantTerm => Error::SingularUpsilon,
        e => e,
    }
}

/// `Psi = V^(-1) (Upsilon^(1))^(-1)` with the residuals of
/// `Upsilon^(1) = Upsilon Theta` and `Psi^(-1) = Phi Psi`.
pub fn build_psi(rho: &DrinfeldModule, periods: &[Px]) -> Result<TMotiveData> {
    let prec = rho.precision();
    let n = prec.t_trunc;
    let qe = rho.qe();
    let phi = build_phi(rho, n)?;
    let theta = build_theta(rho, n);
    let v = build_v(rho, n)?;
    let upsilon = build_upsilon(rho, periods, n)?;
    let upsilon1 = upsilon.twist(qe, 1);
    let mut reports = vec![check_v_identity(rho, n)?];
    reports.push(ResidualReport::analytic(
        "Upsilon^(1) = Upsilon Theta",
        &upsilon1.sub(&upsilon.mul(&theta)?)?,
        prec,
    ));
    let psi = v.inv()?.mul(&upsilon1.inv().map_err(singular)?)?;
    let psi_minus = v.twist(qe, -1).inv()?.mul(&upsilon.inv().map_err(singular)?)?;
    reports.push(ResidualReport::analytic("Psi^(-1) = Phi Psi", &psi_minus.sub(&phi.mul(&psi)?)?, prec));
    Ok(TMotiveData { phi, theta, v, upsilon, upsilon1, psi, psi_minus, t_trunc: n, precision: prec, reports })
}

/// `Upsilon^(1)(theta)`, whose columns hold `F_(tau^j)(omega_i)` and, last,
/// `-omega_i - sum kappa_s F_(tau^s)(omega_i)`.
pub fn upsilon1_at_theta(data: &TMotiveData) -> Result<Vec<Vec<Px>>> {
    let vals = data.upsilon1.eval_at_theta(data.precision.target_val())?;
    Ok(vals.into_iter().map(|row| row.into_iter().map(|s| s.value).collect()).collect())
}

/// Precision for extension blocks: `q` times the working cap, so that one
/// inverse twist still leaves the working cap.
pub fn ext_precision(rho: &DrinfeldModule) -> Precision {
    let p = rho.precision();
    let q = rho.q() as i64;
    Precision { target: p.target, guard: p.guard + (q - 1) * (p.target + p.guard), t_trunc: p.t_trunc }
}

/// The extension of `1` by `M_rho` attached to a logarithm point `u`.
#[derive(Debug, Clone)]
pub struct ExtBlock {
    pub u: Px,
    pub alpha: Px,
    pub h: TateMatrix,
    pub g: TateMatrix,
    pub phi_alpha: TateMatrix,
    pub psi_alpha: TateMatrix,
    /// First entry of `g_alpha` at `t = theta`; equals `u - alpha`.
    pub g1_at_theta: Px,
    pub reports: Vec<ResidualReport>,
}

fn block(tl: &TateMatrix, bl: &TateMatrix, br: TateSeries) -> Result<TateMatrix> {
    let r = tl.rows();
    let n = tl.order();
    let f = tl.field().clone();
    let mut rows = Vec::with_capacity(r + 1);
    for i in 0..r {
        let mut row = tl.row(i);
        row.push(TateSeries::zero(&f, n));
        rows.push(row);
    }
    let mut last = bl.row(0);
    last.push(br);
    rows.push(last);
    TateMatrix::from_rows(rows)
}

/// `g_alpha`, `Phi_alpha`, `Psi_alpha` for `u` (which must be known to
/// [`ext_precision`]), with the residuals of `Phi^T g^(-1) = g + h` and
/// `Psi_alpha^(-1) = Phi_alpha Psi_alpha`.
pub fn build_ext(rho: &DrinfeldModule, data: &TMotiveData, u: &Px) -> Result<ExtBlock> {
    require_normalized(rho)?;
    let r = rho.rank();
    let qe = rho.qe();
    let n = data.t_trunc;
    let prec = data.precision;
    let boosted = rho.with_precision(ext_precision(rho));
    let alpha = boosted.exp_eval(u)?;
    let f = agf(&boosted, u, n)?;
    let tw: Vec<TateSeries> = (0..=r).map(|j| f.twist(qe, j as i64)).collect();
    let field = u.field();

    // g_1 = -(t - theta) f - alpha; g_k = -(sum_(j=k)^(r-1) kappa_j^(-(k-1)) f^(j-k+1) + f^(r-k+1)).
    let tm = TateSeries::t_minus_theta(field, n);
    let mut g_rows = vec![vec![tm.mul(&f).add(&konst(alpha.clone(), n)).neg()]];
    for k in 2..=r {
        let mut acc = tw[r - k + 1].clone();
        for j in k..r {
            let kj = rho.kappa()[j - 1].frob(qe, -(k as i64 - 1));
            acc = acc.add(&tw[j - k + 1].scale(&kj));
        }
        g_rows.push(vec![acc.neg()]);
    }
    let g = TateMatrix::from_rows(g_rows)?;
    let mut h_rows = vec![vec![konst(alpha.clone(), n)]];
    h_rows.extend((1..r).map(|_| vec![TateSeries::zero(field, n)]));
    let h = TateMatrix::from_rows(h_rows)?;

    let g_minus = g.twist(qe, -1);
    let mut reports = vec![ResidualReport::analytic(
        "Phi^T g^(-1) = g + h",
        &data.phi.transpose().mul(&g_minus)?.sub(&g.add(&h)?)?,
        prec,
    )];

    let one = TateSeries::one(field, n);
    let phi_alpha = block(&data.phi, &h.transpose(), one.clone())?;
    let psi_alpha = block(&data.psi, &g.transpose().mul(&data.psi)?, one.clone())?;
    let psi_alpha_minus = block(&data.psi_minus, &g_minus.transpose().mul(&data.psi_minus)?, one)?;
    reports.push(ResidualReport::analytic(
        "Psi_alpha^(-1) = Phi_alpha Psi_alpha",
        &psi_alpha_minus.sub(&phi_alpha.mul(&psi_alpha)?)?,
        prec,
    ));
    let g1_at_theta = g.get(0, 0).eval_at_theta(prec.target_val())?.value;
    reports.push(ResidualReport::scalar("g_1(theta) = u - alpha", &(&g1_at_theta - &(u - &alpha)), prec));
    Ok(ExtBlock { u: u.clone(), alpha, h, g, phi_alpha, psi_alpha, g1_at_theta, reports })
}

/// Push-out along an endomorphism: `sigma` on `e_* X` has bottom row `v E`.
pub fn pushout_row(v: &TateMatrix, e: &TateMatrix) -> Result<TateMatrix> {
    if v.rows() != 1 {
        return Err(Error::ShapeMismatch(format!("push-out needs a row vector, got {} rows", v.rows())));
    }
    v.mul(e)
}

/// Baer sum of two extensions given by their bottom rows.
pub fn baer_sum(a: &TateMatrix, b: &TateMatrix) -> Result<TateMatrix> {
    a.add(b)
}

/// Matrix `E` of `beta(m) = E m` for the motive morphism induced by `b`:
/// `beta(m_1) = b^* m_1` with `b^* = sum c_k^(-k) sigma^k` and `m_i = sigma^(i-1) m_1`.
pub fn endo_matrix(rho: &DrinfeldModule, b: &Morphism, phi: &TateMatrix) -> Result<TateMatrix> {
    let r = rho.rank();
    let n = phi.order();
    let qe = rho.qe();
    let coeffs = b.to_twisted(qe, 2 * rho.precision().working().to_integer())?;
    let coeffs = coeffs.coeffs();
    let f = rho.base_field();
    // w_k: coordinates of sigma^k m_1, with w_k = w_(k-1)^(-1) Phi.
    let top = coeffs.len() + r;
    let mut e1 = vec![TateSeries::zero(f, n); r];
    e1[0] = TateSeries::one(f, n);
    let mut w = vec![TateMatrix::from_rows(vec![e1])?];
    for k in 1..top {
        let next = w[k - 1].twist(qe, -1).mul(phi)?;
        w.push(next);
    }
    let mut rows = Vec::with_capacity(r);
    for i in 0..r {
        let mut acc = TateMatrix::from_rows(vec![vec![TateSeries::zero(f, n); r]])?;
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero_to_prec() && c.is_exact() {
                continue;
            }
            let ck = c.frob(qe, -((k + i) as i64));
            let row = w[k + i].row(0).iter().map(|s| s.scale(&ck)).collect();
            acc = acc.add(&TateMatrix::from_rows(vec![row])?)?;
        }
        rows.push(acc.row(0));
    }
    TateMatrix::from_rows(rows)
}

/// `eta = Psi^(-1) E Psi` and its certificates.
#[derive(Debug, Clone)]
pub struct EtaData {
    pub e: TateMatrix,
    pub eta: TateMatrix,
    /// Entries of `eta` as rational functions in `t` over `F_q`.
    pub eta_rational: Vec<Vec<RationalFn>>,
    /// `E_(i1)(theta)` for `i = 1..r`.
    pub e_col1_at_theta: Vec<Px>,
    /// Relation placing `E_11(theta)` in the span of the given `K_rho` generators.
    pub membership: Option<RelationCertificate>,
    pub reports: Vec<ResidualReport>,
}

impl EtaData {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

/// `F_q`-constant sequence of a twist-fixed series, or `None` if some
/// coefficient is not a constant of `F_q` above `threshold`.
fn fq_sequence(rho: &DrinfeldModule, s: &TateSeries, threshold: Ratio<i64>) -> Option<Vec<u32>> {
    let base = rho.base_field();
    s.coeffs()
        .iter()
        .map(|c| {
            let table = embedding(base, c.field()).ok()?;
            let k = c.coeff_at(0);
            let code = table.iter().position(|&x| x == k)? as u32;
            let rest = c - &Px::constant(c.field(), k);
            (rest.val_or_cap() >= threshold).then_some(code)
        })
        .collect()
}

/// Certificates for the endomorphism `b`: `Phi E = E^(-1) Phi` exactly,
/// `eta^(-1) = eta`, entries of `eta` in `F_q(t)` with numerator and
/// denominator degree at most `deg_cap`, `E_(i1)(theta) = 0` for `i >= 2`, and
/// `E_11(theta)` in the `k`-span of `k_basis` at relation height `height`.
pub fn eta_of_endo(
    rho: &DrinfeldModule,
    data: &TMotiveData,
    b: &Morphism,
    k_basis: &[Px],
    deg_cap: usize,
    height: usize,
) -> Result<EtaData> {
    let qe = rho.qe();
    let prec = data.precision;
    let threshold = Ratio::from_integer(prec.target - RESIDUAL_SLACK);
    let e = endo_matrix(rho, b, &data.phi)?;
    let e_minus = e.twist(qe, -1);
    let mut reports = vec![ResidualReport::exact("Phi E = E^(-1) Phi", &data.phi.mul(&e)?.sub(&e_minus.mul(&data.phi)?)?)];

    // Psi^(-1) = Upsilon^(1) V and (Psi^(-1))^(-1) = Upsilon V^(-1).
    let psi_inv = data.upsilon1.mul(&data.v)?;
    let psi_minus_inv = data.upsilon.mul(&data.v.twist(qe, -1))?;
    let eta = psi_inv.mul(&e)?.mul(&data.psi)?;
    let eta_minus = psi_minus_inv.mul(&e_minus)?.mul(&data.psi_minus)?;
    reports.push(ResidualReport::analytic("eta^(-1) = eta", &eta_minus.sub(&eta)?, prec));

    let r = rho.rank();
    let mut eta_rational = Vec::with_capacity(r);
    for i in 0..r {
        let mut row = Vec::with_capacity(r);
        for j in 0..r {
            let seq = fq_sequence(rho, eta.get(i, j), threshold).ok_or_else(|| {
                Error::ReconstructFailed(format!("eta[{i}][{j}] has coefficients outside F_q"))
            })?;
            let f = rational_reconstruct(rho.base_field(), &seq, deg_cap)
                .map_err(|e| Error::ReconstructFailed(format!("eta[{i}][{j}]: {e}")))?;
            row.push(f);
        }
        eta_rational.push(row);
    }
    reports.push(ResidualReport {
        identity: format!("eta rational in t, degree <= {deg_cap}"),
        min_valuation: None,
        target: Ratio::from_integer(0),
        pass: true,
    });

    let col1: Vec<Px> = (0..r)
        .map(|i| Ok(e.get(i, 0).eval_at_theta(prec.target_val())?.value))
        .collect::<Result<_>>()?;
    for (i, v) in col1.iter().enumerate().skip(1) {
        reports.push(ResidualReport::scalar(&format!("E_{}1(theta) = 0", i + 1), v, prec));
    }
    let mut values = vec![col1[0].clone()];
    values.extend(k_basis.iter().cloned());
    let membership = find_relations(rho.base_field(), &values, height)?
        .into_iter()
        .find(|c| !c.coeffs[0].is_zero());
    reports.push(ResidualReport {
        identity: "E_11(theta) in K_rho".into(),
        min_valuation: membership.as_ref().map(|c| c.residual),
        target: membership.as_ref().map_or(threshold, |c| c.cutoff),
        pass: membership.is_some(),
    });
    Ok(EtaData { e, eta, eta_rational, e_col1_at_theta: col1, membership, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::gf;
    use crate::hom::hom_solver;
    use crate::periods::lattice;
    use crate::poly::{Poly, Var};

    fn module(q: u32, kappa: &[&[u32]]) -> DrinfeldModule {
        let (p, e) = crate::module::prime_power(q).unwrap();
        let f = gf(p, e).unwrap();
        let polys = kappa.iter().map(|c| Poly::new(&f, Var::Theta, c.to_vec())).collect();
        DrinfeldModule::from_polys(q, polys, Precision::default()).unwrap()
    }

    #[test]
    fn phi_shape_and_v_identity() {
        for r in 1..=4 {
            let kappa: Vec<Vec<u32>> = (0..r).map(|j| if j + 1 == r { vec![1] } else { vec![1, 1] }).collect();
            let refs: Vec<&[u32]> = kappa.iter().map(|v| v.as_slice()).collect();
            let m = module(3, &refs);
            let phi = build_phi(&m, 4).unwrap();
            assert!(phi.get(r - 1, 0).coeff(1).leading() == Some(1));
            assert!(check_v_identity(&m, 4).unwrap().pass, "r = {r}");
        }
    }

    #[test]
    fn v_rank_two() {
        let m = module(2, &[&[0, 1], &[1]]);
        let v = build_v(&m, 2).unwrap();
        assert!((v.get(0, 0).coeff(0) - &Px::theta(m.base_field())).is_zero_to_prec());
        assert!((v.get(0, 1).coeff(0) - &Px::one(m.base_field())).is_zero_to_prec());
        assert!((v.get(1, 0).coeff(0) - &Px::one(m.base_field())).is_zero_to_prec());
        assert!(v.get(1, 1).coeff(0).is_zero_to_prec());
    }

    #[test]
    fn not_normalized_rejected() {
        let m = module(2, &[&[0, 1]]);
        assert!(matches!(build_phi(&m, 4), Err(Error::NotNormalized)));
    }

    #[test]
    fn carlitz_psi_and_eta_of_rho_t() {
        let m = module(2, &[&[1]]);
        let lat = lattice(&m, 4, 0).unwrap();
        let data = build_psi(&m, &lat.periods).unwrap();
        for r in &data.reports {
            assert!(r.pass, "{r:?}");
        }
        let h = hom_solver(&m, &m, 1, 1).unwrap();
        let kb: Vec<Px> = h.morphisms.iter().map(|b| b.to_twisted(1, 64).unwrap().coeffs()[0].clone()).collect();
        let eta = eta_of_endo(&m, &data, &h.morphisms[1], &kb, 2, 2).unwrap();
        assert!(eta.all_pass(), "{:?}", eta.reports);
        // eta = (t) up to the F_q^x scalar of the basis element
        assert_eq!(eta.eta_rational[0][0].num().degree(), Some(1));
    }
}
