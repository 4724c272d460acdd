//! Command dispatch.

use std::time::Instant;

use drinfeld::galois::{EmpiricalSummary, EndoAlgebra, GaloisReport};
use drinfeld::gf::table_fingerprint;
use drinfeld::hom::{endo_ring_degree, EndoDegree};
use drinfeld::module::{prime_power, DrinfeldModule};
use drinfeld::periods::{default_depth, lattice, PeriodData};
use drinfeld::poly::Poly;
use drinfeld::puiseux::Px;
use drinfeld::quasi::{
    agf, agf_residual, agf_specialization_residual, period_matrix, quasi_period, quasi_period_agf, Biderivation,
};
use drinfeld::relations::find_relations;
use drinfeld::tmotive::{build_ext, build_psi, eta_of_endo, ext_precision, upsilon1_at_theta, EtaData, ResidualReport, TMotiveData, RESIDUAL_SLACK};
use num_rational::Ratio;
use serde_json::{json, Value};

use crate::config::{build_module, JobConfig};
use crate::error::{CliError, Result};
use crate::report::{px_json, Report};

pub const COMMANDS: [&str; 12] = [
    "exp",
    "log",
    "period",
    "agf",
    "quasiperiod",
    "period-matrix",
    "verify-triv",
    "ext",
    "endos",
    "galois-dim",
    "relations",
    "full-report",
];

/// Relative precision (in slots) used to expand endomorphism constants.
const CONSTANT_REL: i64 = 64;
/// Height for placing `E_11(theta)` among the endomorphism constants.
const MEMBERSHIP_HEIGHT: usize = 2;

fn stage<T>(name: &str, r: drinfeld::Result<T>) -> Result<T> {
    r.map_err(|e| CliError::stage(name, e))
}

struct Runner<'a> {
    cfg: &'a JobConfig,
    rho: DrinfeldModule,
    rep: Report,
    lattice: Option<PeriodData>,
    boosted_lattice: Option<PeriodData>,
    psi: Option<TMotiveData>,
    endo: Option<EndoDegree>,
    etas: Option<Vec<EtaData>>,
}

/// Run `command` on the configured module.
pub fn run(cfg: &JobConfig, command: &str) -> Result<Report> {
    if !COMMANDS.contains(&command) {
        return Err(CliError::UnknownCommand(command.into()));
    }
    let resolved = cfg.resolved();
    let rho = build_module(&resolved.module, resolved.precision())?;
    let (p, e) = stage("module", prime_power(cfg.module.q))?;
    let fields: Vec<(u32, u32)> = (1..=2 * rho.rank() as u32).map(|k| (p, e * k)).collect();
    let rep = Report::new(command, resolved.clone(), table_fingerprint(&fields));
    let mut r = Runner {
        cfg,
        rho,
        rep,
        lattice: None,
        boosted_lattice: None,
        psi: None,
        endo: None,
        etas: None,
    };
    match command {
        "exp" => r.exp()?,
        "log" => r.log()?,
        "period" => r.period()?,
        "agf" => r.agf()?,
        "quasiperiod" => r.quasiperiods()?,
        "period-matrix" => r.period_matrix()?,
        "verify-triv" => r.verify_triv()?,
        "ext" => {
            let u = r.input()?.to_string();
            r.ext(&u)?
        }
        "endos" => r.endos()?,
        "galois-dim" => r.galois()?,
        "relations" => r.relations()?,
        _ => r.full_report()?,
    }
    Ok(r.rep)
}

impl Runner<'_> {
    fn time(&mut self, name: &str, start: Instant) {
        *self.rep.timings_ms.entry(name.into()).or_default() += start.elapsed().as_millis() as u64;
    }

    fn input(&self) -> Result<&str> {
        self.cfg.input.as_deref().ok_or_else(|| CliError::Parse("this command needs an input value".into()))
    }

    fn parse(&self, s: &str) -> Result<Px> {
        Px::parse(self.rho.base_field(), s).map_err(|e| CliError::Parse(format!("`{s}`: {e}")))
    }

    fn target_minus(&self, slack: Ratio<i64>) -> Ratio<i64> {
        self.rho.precision().target_val() - slack
    }

    fn periods(&mut self) -> Result<Vec<Px>> {
        if self.lattice.is_none() {
            let t = Instant::now();
            let l = stage("period", lattice(&self.rho, default_depth(&self.rho), self.cfg.branch))?;
            self.lattice = Some(l);
            self.time("period", t);
        }
        Ok(self.lattice.as_ref().unwrap().periods.clone())
    }

    /// Periods at [`ext_precision`], for use as extension-block inputs.
    fn boosted_periods(&mut self) -> Result<Vec<Px>> {
        if self.boosted_lattice.is_none() {
            let t = Instant::now();
            let b = self.rho.with_precision(ext_precision(&self.rho));
            let l = stage("period (boosted)", lattice(&b, default_depth(&b), self.cfg.branch))?;
            self.boosted_lattice = Some(l);
            self.time("period", t);
        }
        Ok(self.boosted_lattice.as_ref().unwrap().periods.clone())
    }

    /// `omega`, `omega:i`, `log:<literal>` or a plain literal; `boosted`
    /// computes periods and logarithms at [`ext_precision`].
    fn point(&mut self, spec: &str, boosted: bool) -> Result<Px> {
        let spec = spec.trim();
        if let Some(rest) = spec.strip_prefix("omega") {
            let i = match rest.strip_prefix(':') {
                Some(k) => k.parse::<usize>().map_err(|_| CliError::Parse(format!("bad period index `{k}`")))?,
                None if rest.is_empty() => 1,
                None => return Err(CliError::Parse(format!("bad point `{spec}`"))),
            };
            let ws = if boosted { self.boosted_periods()? } else { self.periods()? };
            return ws
                .get(i.wrapping_sub(1))
                .cloned()
                .ok_or_else(|| CliError::Parse(format!("no period omega:{i}")));
        }
        if let Some(lit) = spec.strip_prefix("log:") {
            let x = self.parse(lit)?;
            let m = if boosted { self.rho.with_precision(ext_precision(&self.rho)) } else { self.rho.clone() };
            let t = Instant::now();
            let v = stage("log", m.log_eval(&x))?;
            self.time("log", t);
            return Ok(v);
        }
        self.parse(spec)
    }

    fn psi(&mut self) -> Result<TMotiveData> {
        if self.psi.is_none() {
            let w = self.periods()?;
            let t = Instant::now();
            let d = stage("verify-triv", build_psi(&self.rho, &w))?;
            self.psi = Some(d);
            self.time("verify-triv", t);
        }
        Ok(self.psi.clone().unwrap())
    }

    fn exp(&mut self) -> Result<()> {
        let z = self.point(self.input()?.to_string().as_str(), false)?;
        let t = Instant::now();
        let v = stage("exp", self.rho.exp_eval(&z))?;
        self.time("exp", t);
        self.rep.values.insert("z".into(), px_json(&z));
        self.rep.values.insert("exp".into(), px_json(&v));
        Ok(())
    }

    fn log(&mut self) -> Result<()> {
        let z = self.parse(self.input()?)?;
        let t = Instant::now();
        let v = stage("log", self.rho.log_eval(&z))?;
        self.time("log", t);
        self.rep.values.insert("z".into(), px_json(&z));
        self.rep.values.insert("log".into(), px_json(&v));
        Ok(())
    }

    fn period(&mut self) -> Result<()> {
        let ws = self.periods()?;
        let levels = self.lattice.as_ref().unwrap().levels.clone();
        self.rep.values.insert("periods".into(), Value::Array(ws.iter().map(px_json).collect()));
        self.rep.values.insert("tower_levels".into(), json!(levels));
        let t = Instant::now();
        for (i, w) in ws.iter().enumerate() {
            let e = stage("period", self.rho.exp_eval(w))?;
            // Two slots of slack at the period's own ramification.
            let target = self.target_minus(Ratio::new(2, w.ram() as i64));
            let v = e.val_or_cap();
            let r = ResidualReport { identity: "exp(omega) = 0".into(), min_valuation: Some(v), target, pass: v >= target };
            self.rep.residual(&format!("omega_{}", i + 1), &r);
        }
        self.time("period", t);
        Ok(())
    }

    fn agf(&mut self) -> Result<()> {
        let u = self.point(self.input()?.to_string().as_str(), false)?;
        let t = Instant::now();
        let n = self.rho.precision().t_trunc;
        let f = stage("agf", agf(&self.rho, &u, n))?;
        let res = stage("agf", agf_residual(&self.rho, &u, &f))?;
        let spec = stage("agf", agf_specialization_residual(&self.rho, &u, &f))?;
        self.time("agf", t);
        let target = self.target_minus(Ratio::from_integer(RESIDUAL_SLACK));
        let v = res.min_valuation();
        let r = ResidualReport {
            identity: "sum kappa_j f^(j) = (t - theta) f + exp(u)".into(),
            min_valuation: Some(v),
            target,
            pass: v >= target,
        };
        self.rep.residual("", &r);
        let v = spec.value.val_or_cap();
        let r = ResidualReport {
            identity: "sum kappa_j f^(j)(theta) = exp(u) - u".into(),
            min_valuation: Some(v),
            target,
            pass: v >= target,
        };
        self.rep.residual("", &r);
        self.rep.values.insert("u".into(), px_json(&u));
        self.rep.values.insert("f".into(), json!(f.literals()));
        Ok(())
    }

    fn quasiperiods(&mut self) -> Result<()> {
        let ws = self.periods()?;
        let t = Instant::now();
        let target = self.target_minus(Ratio::from_integer(RESIDUAL_SLACK));
        let mut rows = Vec::new();
        for (i, w) in ws.iter().enumerate() {
            let mut row = Vec::new();
            for j in 1..self.rho.rank() {
                let d = Biderivation::tau(&self.rho, j);
                let a = stage("quasiperiod", quasi_period(&self.rho, &d, w))?;
                let b = stage("quasiperiod", quasi_period_agf(&self.rho, &d, w))?.value;
                let joint = a.cap_val().min(b.cap_val());
                let v = (&a - &b).val_or_cap();
                let r = ResidualReport {
                    identity: format!("F_tau^{j}(omega_{}): series = agf", i + 1),
                    min_valuation: Some(v),
                    target: joint,
                    pass: v >= joint && joint >= target,
                };
                self.rep.residual("", &r);
                row.push(json!({ "series": px_json(&a), "agf": px_json(&b) }));
            }
            rows.push(Value::Array(row));
        }
        self.time("quasiperiod", t);
        self.rep.values.insert("quasi_periods".into(), Value::Array(rows));
        Ok(())
    }

    fn matrix(&mut self) -> Result<Vec<Vec<Px>>> {
        let ws = self.periods()?;
        let t = Instant::now();
        let p = stage("period-matrix", period_matrix(&self.rho, &ws))?;
        self.time("period-matrix", t);
        Ok(p)
    }

    fn period_matrix(&mut self) -> Result<()> {
        let p = self.matrix()?;
        let rows: Vec<Value> = p.iter().map(|r| Value::Array(r.iter().map(px_json).collect())).collect();
        self.rep.values.insert("period_matrix".into(), Value::Array(rows));
        Ok(())
    }

    fn verify_triv(&mut self) -> Result<()> {
        let data = self.psi()?;
        for r in &data.reports {
            self.rep.residual("", r);
        }
        // Upsilon^(1)(theta): F_tau^j(omega_i) for j < r, then -omega_i - sum kappa_s F_tau^s(omega_i).
        let t = Instant::now();
        let at = stage("verify-triv", upsilon1_at_theta(&data))?;
        let p = self.matrix()?;
        let r = self.rho.rank();
        let target = self.target_minus(Ratio::from_integer(RESIDUAL_SLACK));
        for i in 0..r {
            for j in 1..r {
                let v = (&at[i][j - 1] - &p[i][j]).val_or_cap();
                let rep = ResidualReport {
                    identity: format!("Upsilon^(1)(theta)_{}{} = F_tau^{j}(omega_{})", i + 1, j, i + 1),
                    min_valuation: Some(v),
                    target,
                    pass: v >= target,
                };
                self.rep.residual("", &rep);
            }
            let mut want = p[i][0].neg_val();
            for (k, ps) in self.rho.kappa().iter().zip(&p[i][1..r]) {
                want = &want - &(k * ps);
            }
            let v = (&at[i][r - 1] - &want).val_or_cap();
            let rep = ResidualReport {
                identity: format!("Upsilon^(1)(theta)_{}{r} = -omega_{} - sum kappa_s F_tau^s(omega_{})", i + 1, i + 1, i + 1),
                min_valuation: Some(v),
                target,
                pass: v >= target,
            };
            self.rep.residual("", &rep);
        }
        self.time("verify-triv", t);
        Ok(())
    }

    fn ext(&mut self, spec: &str) -> Result<()> {
        let data = self.psi()?;
        let u = self.point(spec, true)?;
        let t = Instant::now();
        let x = stage("ext", build_ext(&self.rho, &data, &u))?;
        self.time("ext", t);
        for r in &x.reports {
            self.rep.residual(&format!("u = {spec}"), r);
        }
        let entry = json!({ "u": px_json(&x.u), "alpha": px_json(&x.alpha), "g1_at_theta": px_json(&x.g1_at_theta) });
        match self.rep.values.get_mut("ext") {
            Some(Value::Object(m)) => {
                m.insert(spec.into(), entry);
            }
            _ => {
                self.rep.values.insert("ext".into(), json!({ spec: entry }));
            }
        }
        Ok(())
    }

    fn endo(&mut self) -> Result<EndoDegree> {
        if self.endo.is_none() {
            let t = Instant::now();
            let e = stage("endos", endo_ring_degree(&self.rho, self.cfg.hom_degree, self.cfg.ext_degree))?;
            self.endo = Some(e);
            self.time("endos", t);
        }
        Ok(self.endo.clone().unwrap())
    }

    /// Prop. 4.1 data for every endomorphism found; failures become failing rows.
    fn etas(&mut self) -> Result<Vec<EtaData>> {
        if let Some(e) = &self.etas {
            return Ok(e.clone());
        }
        let endo = self.endo()?;
        let data = self.psi()?;
        let t = Instant::now();
        let qe = self.rho.qe();
        let kb: Vec<Px> = endo
            .basis
            .morphisms
            .iter()
            .map(|b| Ok(b.to_twisted(qe, CONSTANT_REL)?.coeffs()[0].clone()))
            .collect::<drinfeld::Result<_>>()
            .map_err(|e| CliError::stage("endos", e))?;
        let r = self.rho.rank();
        let mut out = Vec::new();
        for (k, b) in endo.basis.morphisms.iter().enumerate() {
            let ctx = format!("b_{k} (c_0 = {})", b.c0());
            let cap = (2 * r).max(b.degree());
            match eta_of_endo(&self.rho, &data, b, &kb, cap, MEMBERSHIP_HEIGHT) {
                Ok(eta) => {
                    for rep in &eta.reports {
                        self.rep.residual(&ctx, rep);
                    }
                    out.push(eta);
                }
                Err(e) => self.rep.check(&format!("{ctx}: {e}"), false),
            }
        }
        self.time("endos", t);
        self.etas = Some(out.clone());
        Ok(out)
    }

    fn endos(&mut self) -> Result<()> {
        let endo = self.endo()?;
        let morphisms: Vec<Value> = endo
            .basis
            .morphisms
            .iter()
            .map(|b| json!(b.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>()))
            .collect();
        self.rep.values.insert("s".into(), json!(endo.s));
        self.rep.values.insert(
            "endomorphisms".into(),
            json!({ "caps": { "B": self.cfg.hom_degree, "d": self.cfg.ext_degree }, "tau_coeffs": morphisms }),
        );
        let etas = self.etas()?;
        let mut rendered = Vec::new();
        for eta in &etas {
            let m: Vec<Vec<String>> =
                eta.eta_rational.iter().map(|row| row.iter().map(|x| x.to_string()).collect()).collect();
            rendered.push(json!({
                "eta": m,
                "e11_at_theta": px_json(&eta.e_col1_at_theta[0]),
            }));
            if let Some(c) = &eta.membership {
                self.rep.certificates.push(json!({ "kind": "E_11(theta) in K_rho", "certificate": c }));
            }
        }
        self.rep.values.insert("eta".into(), Value::Array(rendered));
        Ok(())
    }

    fn galois(&mut self) -> Result<()> {
        self.endos()?;
        let endo = self.endo()?;
        let etas = self.etas()?;
        let gens = etas.iter().filter(|e| e.all_pass()).map(|e| e.eta_rational.clone()).collect();
        let alg = stage("galois-dim", EndoAlgebra::new(self.rho.base_field(), self.rho.rank(), gens))?;
        let n_logs = (!self.cfg.logs.is_empty()).then_some(self.cfg.logs.len());
        let caps = (self.cfg.hom_degree, self.cfg.ext_degree);
        let t = Instant::now();
        let g = stage("galois-dim", GaloisReport::new(endo.s, caps, &alg, n_logs, None))?;
        self.time("galois-dim", t);
        self.rep.check("centralizer_dim = r^2 / s and algebra_dim = s", g.consistent);
        self.rep.values.insert("r".into(), json!(g.r));
        self.rep.values.insert("centralizer_dim".into(), json!(g.centralizer_dim));
        self.rep.values.insert("predicted_trdeg".into(), json!(g.predicted_trdeg));
        self.rep.predictions.insert("trdeg_periods".into(), json!(g.predicted_trdeg));
        if let Some((n, v)) = g.predicted_trdeg_logs {
            self.rep.predictions.insert("trdeg_logs".into(), json!({ "n": n, "value": v }));
        }
        self.rep.values.insert("galois".into(), serde_json::to_value(&g)?);
        Ok(())
    }

    /// The relation `omega_i + sum kappa_s F_tau^s(omega_i) + Upsilon^(1)(theta)_ir = 0`.
    fn upsilon_relations(&mut self) -> Result<()> {
        let Some(kappa) = self.rho.kappa_poly().map(<[Poly]>::to_vec) else {
            return Ok(());
        };
        let data = self.psi()?;
        let at = stage("relations", upsilon1_at_theta(&data))?;
        let p = self.matrix()?;
        let r = self.rho.rank();
        let height = kappa.iter().filter_map(Poly::degree).max().unwrap_or(0).max(2);
        let t = Instant::now();
        for i in 0..r {
            let mut vals = p[i].clone();
            vals.push(at[i][r - 1].clone());
            let rels = stage("relations", find_relations(self.rho.base_field(), &vals, height))?;
            let mut want = vec![Poly::one(self.rho.base_field(), drinfeld::poly::Var::Theta)];
            want.extend(kappa[..r - 1].iter().cloned());
            want.push(Poly::one(self.rho.base_field(), drinfeld::poly::Var::Theta));
            let ok = rels.len() == 1 && rels[0].coeffs == want;
            self.rep.check(
                &format!("row {}: unique relation (1, kappa_1, ..., kappa_(r-1), 1) at height <= {height}", i + 1),
                ok,
            );
            for c in &rels {
                self.rep.certificates.push(json!({ "kind": format!("Upsilon relation row {}", i + 1), "certificate": c }));
            }
        }
        self.time("relations", t);
        Ok(())
    }

    fn relations(&mut self) -> Result<()> {
        let d = self.cfg.height;
        let (labels, vals): (Vec<String>, Vec<Px>) = if self.cfg.values.is_empty() {
            let p = self.matrix()?;
            let mut out = (Vec::new(), Vec::new());
            for (i, row) in p.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    out.0.push(format!("P[{}][{}]", i + 1, j + 1));
                    out.1.push(x.clone());
                }
            }
            out
        } else {
            let specs = self.cfg.values.clone();
            let mut vals = Vec::new();
            for s in &specs {
                vals.push(self.point(s, false)?);
            }
            (specs, vals)
        };
        let t = Instant::now();
        let rels = stage("relations", find_relations(self.rho.base_field(), &vals, d))?;
        self.time("relations", t);
        let precision = vals.iter().map(Px::cap_val).min().unwrap();
        let summary = EmpiricalSummary {
            values: labels.join(", "),
            count: vals.len(),
            height: d,
            relations: rels.len(),
            span_dim: vals.len() - rels.len(),
        };
        let note = if rels.is_empty() {
            format!("no relation at height <= {d}, precision {precision}")
        } else {
            format!("{} independent relation(s) at height <= {d}", rels.len())
        };
        self.rep.values.insert("relations".into(), json!({ "summary": summary, "note": note }));
        for c in &rels {
            self.rep.certificates.push(json!({ "kind": "linear relation", "values": labels, "certificate": c }));
        }
        if self.cfg.values.is_empty() {
            self.upsilon_relations()?;
        }
        Ok(())
    }

    fn full_report(&mut self) -> Result<()> {
        self.period()?;
        self.quasiperiods()?;
        self.period_matrix()?;
        self.verify_triv()?;
        if self.rho.kappa_poly().is_some() {
            self.galois()?;
        }
        self.relations()?;
        for u in self.cfg.logs.clone() {
            self.ext(&format!("log:{u}"))?;
        }
        if let (Some(Value::Object(rel)), Some(p)) =
            (self.rep.values.get("relations"), self.rep.predictions.get("trdeg_periods"))
        {
            let span = rel["summary"]["span_dim"].clone();
            let p = p.clone();
            self.rep.predictions.insert("linear_span_of_period_matrix".into(), json!({
                "observed": span,
                "trdeg": p,
                "note": "linear span over F_q(theta) at bounded height; relations that need constants outside F_q are not searched",
            }));
        }
        Ok(())
    }
}
