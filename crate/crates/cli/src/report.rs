use std::collections::BTreeMap;
use std::fmt::Write as _;

use drinfeld::puiseux::Px;
use drinfeld::tmotive::ResidualReport;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::JobConfig;

/// Result of one run. Everything except `timings_ms` is a function of the config.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    /// Moduli of the finite fields used, pinning every element encoding.
    pub table_fingerprint: String,
    pub command: String,
    /// The config with all defaults filled in.
    pub config: JobConfig,
    pub values: BTreeMap<String, Value>,
    pub residuals: Vec<Value>,
    pub certificates: Vec<Value>,
    pub predictions: BTreeMap<String, Value>,
    pub pass: bool,
    pub timings_ms: BTreeMap<String, u64>,
}

impl Report {
    pub fn new(command: &str, config: JobConfig, table_fingerprint: String) -> Report {
        Report {
            version: format!("drinfeld {}", env!("CARGO_PKG_VERSION")),
            table_fingerprint,
            command: command.into(),
            config,
            values: BTreeMap::new(),
            residuals: Vec::new(),
            certificates: Vec::new(),
            predictions: BTreeMap::new(),
            pass: true,
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn residual(&mut self, context: &str, r: &ResidualReport) {
        let mut v = serde_json::to_value(r).expect("residual serializes");
        if !context.is_empty() {
            v["identity"] = Value::String(format!("{context}: {}", r.identity));
        }
        self.pass &= r.pass;
        self.residuals.push(v);
    }

    /// A yes/no check with no valuation attached.
    pub fn check(&mut self, identity: &str, pass: bool) {
        self.pass &= pass;
        self.residuals.push(json!({ "identity": identity, "min_valuation": "exact", "target": "0", "pass": pass }));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Plain-text rendering of the JSON form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} ({})", self.command, self.version);
        let _ = writeln!(out, "pass: {}", self.pass);
        for (k, v) in &self.values {
            flatten(&mut out, k, v);
        }
        for r in &self.residuals {
            let tag = if r["pass"].as_bool() == Some(true) { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{tag} {} (valuation {}, target {})",
                r["identity"].as_str().unwrap_or(""),
                r["min_valuation"].as_str().unwrap_or(""),
                r["target"].as_str().unwrap_or("")
            );
        }
        for (i, c) in self.certificates.iter().enumerate() {
            flatten(&mut out, &format!("certificate[{i}]"), c);
        }
        for (k, v) in &self.predictions {
            flatten(&mut out, &format!("prediction.{k}"), v);
        }
        out
    }
}

fn flatten(out: &mut String, path: &str, v: &Value) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(out, &format!("{path}.{k}"), x);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(out, &format!("{path}[{i}]"), x);
            }
        }
        Value::String(s) => {
            let _ = writeln!(out, "{path} = {s}");
        }
        other => {
            let _ = writeln!(out, "{path} = {other}");
        }
    }
}

/// A Puiseux value as literal, valuation and certified precision.
pub fn px_json(x: &Px) -> Value {
    json!({
        "literal": x.to_literal(),
        "valuation": x.valuation().map_or_else(|| "none".to_string(), |v| v.to_string()),
        "precision": if x.is_exact() { "exact".to_string() } else { x.cap_val().to_string() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ModuleDescriptor;
    use drinfeld::gf::gf;

    #[test]
    fn text_mirrors_json() {
        let cfg = JobConfig::new(ModuleDescriptor { q: 2, rank: 1, kappa: vec!["1".into()], precision: None });
        let mut r = Report::new("exp", cfg, String::new());
        let f = gf(2, 1).unwrap();
        r.values.insert("z".into(), px_json(&Px::theta(&f)));
        r.check("trivial", true);
        let t = r.to_text();
        assert!(t.contains("z.literal = th^(1)"));
        assert!(t.contains("PASS trivial"));
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back.to_json(), r.to_json());
    }
}
