//! Flat `key = value` report documents.
//!
//! One entry per line, in a fixed order. Floats are written with 17
//! significant digits (`{:.16e}`), so parsing a document recovers every
//! number bit-for-bit; non-finite values are written `inf`, `-inf`, `nan`.
//! Absent optional values are written `none`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use cmi_core::simulation::{LimitSimConfig, LimitSummary, McSummary};
use cmi_core::{CExponent, ContactSetSpec, TestConfig, TestReport, TruncationRule};

use crate::{CliError, Result};

pub const TIMESTAMP_KEY: &str = "timestamp";

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(u64),
    Bool(bool),
    Str(String),
    None,
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Float(v) => format_float(*v),
            Value::Int(v) => v.to_string(),
            Value::Bool(v) => v.to_string(),
            Value::Str(s) => s.clone(),
            Value::None => "none".into(),
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<Option<f64>> for Value {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Value::None, Value::Float)
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

pub fn parse_float(s: &str) -> Option<f64> {
    match s {
        "nan" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    entries: Vec<(String, Value)>,
}

impl Document {
    pub fn new(kind: &str) -> Self {
        let mut d = Self::default();
        d.push("tool", Value::Str("cmi".into()));
        d.push("version", Value::Str(env!("CARGO_PKG_VERSION").into()));
        d.push("kind", Value::Str(kind.into()));
        d
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.entries.push((key.into(), value.into()));
    }

    pub fn entries(&self) -> &[(String, Value)] {
        &self.entries
    }

    /// Appends the wall-clock timestamp, the only nondeterministic field.
    pub fn stamp(&mut self) {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        self.push(TIMESTAMP_KEY, Value::Int(secs));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {}", v.render());
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Parses a rendered document into its raw string fields.
pub fn parse_document(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once(" = ")
            .ok_or_else(|| CliError::MalformedCsv {
                line: i as u64 + 1,
                message: format!("report line without ' = ': {line:?}"),
            })?;
        map.insert(k.to_string(), v.to_string());
    }
    Ok(map)
}

pub fn push_config(doc: &mut Document, prefix: &str, cfg: &TestConfig) {
    doc.push(format!("{prefix}config.alpha"), cfg.alpha);
    match cfg.rule {
        TruncationRule::Explicit(v) => {
            doc.push(
                format!("{prefix}config.truncation"),
                Value::Str("explicit".into()),
            );
            doc.push(format!("{prefix}config.sigma_min"), v);
        }
        TruncationRule::Schedule { kappa, delta } => {
            doc.push(
                format!("{prefix}config.truncation"),
                Value::Str("schedule".into()),
            );
            doc.push(format!("{prefix}config.kappa"), kappa);
            doc.push(format!("{prefix}config.delta"), delta);
        }
    }
    match cfg.contact {
        ContactSetSpec::FullSupport => {
            doc.push(format!("{prefix}config.contact"), Value::Str("full".into()))
        }
        ContactSetSpec::Explicit { lo, hi } => {
            doc.push(
                format!("{prefix}config.contact"),
                Value::Str("explicit".into()),
            );
            doc.push(format!("{prefix}config.contact_lo"), lo);
            doc.push(format!("{prefix}config.contact_hi"), hi);
        }
        ContactSetSpec::Estimated {
            bandwidth,
            multiplier,
        } => {
            doc.push(
                format!("{prefix}config.contact"),
                Value::Str("estimate".into()),
            );
            doc.push(format!("{prefix}config.contact_bandwidth"), bandwidth);
            doc.push(format!("{prefix}config.contact_multiplier"), multiplier);
        }
    }
    let exp = match cfg.exponent {
        CExponent::Squared => 2,
        CExponent::Linear => 1,
    };
    doc.push(format!("{prefix}config.c_exponent"), Value::Int(exp));
}

fn push_test_fields(doc: &mut Document, prefix: &str, r: &TestReport) {
    let p = |k: &str| format!("{prefix}{k}");
    doc.push(p("n"), Value::Int(r.n as u64));
    doc.push(p("alpha"), r.alpha);
    doc.push(p("statistic"), r.statistic);
    doc.push(p("cv"), r.cv);
    doc.push(p("reject"), Value::Bool(r.reject));
    doc.push(p("c_hat"), r.c_hat);
    doc.push(p("r"), r.r);
    doc.push(p("sigma_min"), r.sigma_min);
    doc.push(p("first_order"), r.first_order);
    doc.push(p("inf_value"), r.inf_value);
    doc.push(p("t_n"), r.t_n);
    doc.push(p("feasible_count"), Value::Int(r.feasible_count));
    doc.push(p("contact_lo"), r.contact.0);
    doc.push(p("contact_hi"), r.contact.1);
    doc.push(p("argmin_x_lo"), r.argmin_x.map(|a| a.0));
    doc.push(p("argmin_x_hi"), r.argmin_x.map(|a| a.1));
    let flags: Vec<&str> = r.flags.iter().map(|f| f.as_str()).collect();
    doc.push(
        p("flags"),
        if flags.is_empty() {
            Value::None
        } else {
            Value::Str(flags.join(","))
        },
    );
}

pub fn test_report_document(r: &TestReport) -> Document {
    let mut doc = Document::new("test");
    push_test_fields(&mut doc, "", r);
    doc.push("coordinates", Value::Int(r.coordinates.len().max(1) as u64));
    doc.push(
        "driving_coordinate",
        r.driving_coordinate
            .map_or(Value::None, |c| Value::Int(c as u64 + 1)),
    );
    push_config(&mut doc, "", &r.config);
    for (k, c) in r.coordinates.iter().enumerate() {
        push_test_fields(&mut doc, &format!("coord.{}.", k + 1), c);
    }
    doc
}

pub fn push_mc_summary(doc: &mut Document, prefix: &str, s: &McSummary) {
    let p = |k: &str| format!("{prefix}{k}");
    doc.push(p("rejections"), Value::Int(s.rejections));
    doc.push(p("reps"), Value::Int(s.reps));
    doc.push(p("flagged"), Value::Int(s.flagged));
    doc.push(p("rate"), s.rate);
    doc.push(p("ci_lo"), s.ci_lo);
    doc.push(p("ci_hi"), s.ci_hi);
}

pub fn mc_summary_document(kind: &str, s: &McSummary, cfg: &TestConfig, seed: u64) -> Document {
    let mut doc = Document::new(kind);
    push_mc_summary(&mut doc, "", s);
    doc.push("seed", Value::Int(seed));
    push_config(&mut doc, "", cfg);
    doc
}

pub fn limit_document(s: &LimitSummary, cfg: &LimitSimConfig) -> Document {
    let mut doc = Document::new("limit");
    doc.push("horizon", cfg.horizon);
    doc.push("step", cfg.step);
    doc.push("min_t", cfg.min_t);
    doc.push("reps", Value::Int(cfg.reps));
    doc.push("seed", Value::Int(cfg.seed));
    doc.push("a_t", s.a_t);
    doc.push("b_t", s.b_t);
    doc.push("ks_distance", s.ks_distance);
    let mean = s.normalized.iter().sum::<f64>() / s.normalized.len() as f64;
    doc.push("normalized_mean", mean);
    let joined: Vec<String> = s.normalized.iter().map(|v| format_float(*v)).collect();
    doc.push("normalized", Value::Str(joined.join(",")));
    doc
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmi_core::{build_sample, run_test};
    use proptest::prelude::*;

    #[test]
    fn non_reject_report_has_all_fields() {
        let s = build_sample(&[(1.0, -1.0), (2.0, -1.0), (3.0, 1.0), (4.0, 1.0)]).unwrap();
        let cfg = TestConfig {
            rule: TruncationRule::Explicit(0.1),
            ..TestConfig::default()
        };
        let doc = test_report_document(&run_test(&s, &cfg).unwrap());
        let map = parse_document(&doc.render()).unwrap();
        for key in [
            "tool",
            "version",
            "kind",
            "statistic",
            "cv",
            "reject",
            "c_hat",
            "sigma_min",
            "flags",
            "argmin_x_lo",
            "argmin_x_hi",
            "config.alpha",
            "config.sigma_min",
            "config.contact",
            "config.c_exponent",
            "feasible_count",
            "first_order",
        ] {
            assert!(map.contains_key(key), "missing {key}");
        }
        assert_eq!(map["reject"], "false");
        assert_eq!(map["statistic"], "2.0000000000000000e0");
        assert_eq!(map["flags"], "none");
    }

    #[test]
    fn mc_summary_fields() {
        let s = McSummary::from_counts(3, 10, 1);
        let doc = mc_summary_document("size", &s, &TestConfig::default(), 5);
        let map = parse_document(&doc.render()).unwrap();
        assert_eq!(parse_float(&map["rate"]), Some(0.3));
        assert_eq!(parse_float(&map["ci_lo"]), Some(s.ci_lo));
        assert_eq!(parse_float(&map["ci_hi"]), Some(s.ci_hi));
        assert_eq!(map["flagged"], "1");
    }

    #[test]
    fn special_values() {
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(parse_float("-inf"), Some(f64::NEG_INFINITY));
        assert!(parse_float("nan").unwrap().is_nan());
        assert!(parse_document("no separator").is_err());
    }

    proptest! {
        #[test]
        fn floats_round_trip_exactly(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            let back = parse_float(&format_float(v)).unwrap();
            prop_assert!(back.to_bits() == v.to_bits() || (v.is_nan() && back.is_nan()));
        }

        #[test]
        fn rendered_documents_round_trip(vals in proptest::collection::vec(any::<f64>(), 1..20)) {
            let mut doc = Document::new("probe");
            for (i, v) in vals.iter().enumerate() {
                doc.push(format!("v{i}"), *v);
            }
            let map = parse_document(&doc.render()).unwrap();
            for (i, v) in vals.iter().enumerate() {
                let back = parse_float(&map[&format!("v{i}")]).unwrap();
                prop_assert!(back.to_bits() == v.to_bits() || (v.is_nan() && back.is_nan()));
            }
        }
    }
}
