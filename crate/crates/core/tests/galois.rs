use std::sync::Arc;

use drinfeld::galois::*;
use drinfeld::gf::{gf, FieldElem, GfField};
use drinfeld::hom::endo_ring_degree;
use drinfeld::linalg::nullspace_elems;
use drinfeld::module::{DrinfeldModule, Precision};
use drinfeld::periods::{default_depth, lattice};
use drinfeld::poly::{Poly, RationalFn, Var};
use drinfeld::puiseux::Px;
use drinfeld::tmotive::{build_psi, eta_of_endo};

fn c(f: &Arc<GfField>, coeffs: &[u32]) -> RationalFn {
    RationalFn::from_poly(Poly::new(f, Var::T, coeffs.to_vec()))
}

fn block_diag(f: &Arc<GfField>, blocks: &[RatMatrix]) -> RatMatrix {
    let r: usize = blocks.iter().map(Vec::len).sum();
    let mut m = vec![vec![c(f, &[]); r]; r];
    let mut off = 0;
    for b in blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                m[off + i][off + j] = x.clone();
            }
        }
        off += b.len();
    }
    m
}

/// Centralizer dimension after specializing `t` to `x`, by a separate
/// finite-field elimination. Agrees with the generic value for all but
/// finitely many `x`.
fn specialized_oracle(f: &Arc<GfField>, r: usize, gens: &[RatMatrix], x: u32) -> usize {
    let mut rows = Vec::new();
    for g in gens {
        let gv: Vec<Vec<u32>> = g.iter().map(|row| row.iter().map(|e| e.eval(x).unwrap()).collect()).collect();
        for i in 0..r {
            for j in 0..r {
                let mut row = vec![0u32; r * r];
                for k in 0..r {
                    row[i * r + k] = f.add(row[i * r + k], gv[k][j]);
                    row[k * r + j] = f.sub(row[k * r + j], gv[i][k]);
                }
                rows.push(row.into_iter().map(|v| FieldElem::new(f.clone(), v)).collect::<Vec<_>>());
            }
        }
    }
    nullspace_elems(f, &rows, r * r).len()
}

#[test]
fn constructed_degree_s_elements_match_oracle() {
    let f = gf(3, 1).unwrap();
    // x^2 - t and a scalar t + 1.
    let quad = vec![vec![c(&f, &[]), c(&f, &[0, 1])], vec![c(&f, &[1]), c(&f, &[])]];
    let scal = vec![vec![c(&f, &[1, 1]), c(&f, &[])], vec![c(&f, &[]), c(&f, &[1, 1])]];
    let cases = [
        (2, 1, vec![scal.clone()]),
        (2, 2, vec![quad.clone()]),
        (4, 1, vec![block_diag(&f, &[scal.clone(), scal])]),
        (4, 2, vec![block_diag(&f, &[quad.clone(), quad])]),
    ];
    let big = gf(3, 3).unwrap();
    for (r, s, gens) in cases {
        let alg = EndoAlgebra::new(&f, r, gens.clone()).unwrap();
        let dim = centralizer_dim(&alg);
        assert_eq!(dim, r * r / s);
        assert_eq!(alg.span_dim(r), s);
        let lifted: Vec<RatMatrix> = gens
            .iter()
            .map(|g| g.iter().map(|row| row.iter().map(|e| lift(e, &big)).collect()).collect())
            .collect();
        assert_eq!(specialized_oracle(&big, r, &lifted, big.gen()), dim);
    }
}

fn lift(e: &RationalFn, to: &Arc<GfField>) -> RationalFn {
    // Base field is prime, so codes embed unchanged.
    let up = |p: &Poly| Poly::new(to, Var::T, p.coeffs().to_vec());
    RationalFn::new(up(e.num()), up(e.den())).unwrap()
}

fn module(q: u32, kappa: &[&[u32]]) -> DrinfeldModule {
    let (p, e) = drinfeld::module::prime_power(q).unwrap();
    let f = gf(p, e).unwrap();
    let polys = kappa.iter().map(|c| Poly::new(&f, Var::Theta, c.to_vec())).collect();
    DrinfeldModule::from_polys(q, polys, Precision::default()).unwrap()
}

fn report_for(m: &DrinfeldModule) -> GaloisReport {
    let lat = lattice(m, default_depth(m), 0).unwrap();
    let data = build_psi(m, &lat.periods).unwrap();
    let endo = endo_ring_degree(m, 4, 2).unwrap();
    let kb: Vec<Px> =
        endo.basis.morphisms.iter().map(|b| b.to_twisted(m.qe(), 64).unwrap().coeffs()[0].clone()).collect();
    let gens = endo
        .basis
        .morphisms
        .iter()
        .map(|b| {
            let cap = (2 * m.rank()).max(b.degree());
            let eta = eta_of_endo(m, &data, b, &kb, cap, 2).unwrap();
            assert!(eta.all_pass());
            eta.eta_rational
        })
        .collect();
    let alg = EndoAlgebra::new(m.base_field(), m.rank(), gens).unwrap();
    GaloisReport::new(endo.s, (4, 2), &alg, Some(1), None).unwrap()
}

#[test]
fn carlitz_and_cm_reports() {
    let carlitz = report_for(&module(2, &[&[1]]));
    assert_eq!((carlitz.r, carlitz.s, carlitz.centralizer_dim, carlitz.predicted_trdeg), (1, 1, 1, 1));
    assert!(carlitz.consistent);
    let cm = report_for(&module(2, &[&[0], &[1]]));
    assert_eq!((cm.r, cm.s, cm.centralizer_dim, cm.predicted_trdeg), (2, 2, 2, 2));
    assert_eq!(cm.predicted_trdeg_logs, Some((1, 4)));
    assert!(cm.consistent);
}
