//! Versioned JSON reports, CSV rows and text rendering.
//!
//! Every report has the shape
//!
//! ```json
//! { "schema": "weibrec-report/1",
//!   "tool": { "name": "weibrec", "version": "0.1.0" },
//!   "command": "ci-ratio",
//!   "request": { ... everything needed to rerun ... },
//!   "result": { ... } }
//! ```
//!
//! Reports contain no timestamps or host details, so identical requests
//! serialize to identical bytes.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use weibrec_core::sim::{TABLE1_BETA1, TABLE1_N};
use weibrec_core::{SimConfig, SimReport};

use crate::io::LabelledRecords;

pub const SCHEMA: &str = "weibrec-report/1";

#[derive(Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

pub const TOOL: Tool = Tool {
    name: "weibrec",
    version: env!("CARGO_PKG_VERSION"),
};

#[derive(Debug, Serialize)]
pub struct Report<'a, Req: Serialize, Res: Serialize> {
    pub schema: &'static str,
    pub tool: &'a Tool,
    pub command: &'a str,
    pub request: Req,
    pub result: Res,
}

impl<'a, Req: Serialize, Res: Serialize> Report<'a, Req, Res> {
    pub fn new(command: &'a str, request: Req, result: Res) -> Self {
        Self {
            schema: SCHEMA,
            tool: &TOOL,
            command,
            request,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Serialize)]
pub struct PopulationEcho<'a> {
    pub label: &'a str,
    pub records: &'a [f64],
}

pub fn echo(records: &[LabelledRecords]) -> Vec<PopulationEcho<'_>> {
    records
        .iter()
        .map(|r| PopulationEcho {
            label: &r.label,
            records: r.series.values(),
        })
        .collect()
}

/// SHA-256 over labels and the exact bit patterns of every record.
pub fn digest(records: &[LabelledRecords]) -> String {
    let mut h = Sha256::new();
    for r in records {
        h.update((r.label.len() as u64).to_le_bytes());
        h.update(r.label.as_bytes());
        h.update((r.series.len() as u64).to_le_bytes());
        for v in r.series.values() {
            h.update(v.to_bits().to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

/// Six significant digits; scientific notation outside `[1e-4, 1e6)`.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    // exponent after rounding, so 9.9999996 counts as 10
    let e: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("exponent");
    if !(-4..6).contains(&e) {
        return sci;
    }
    format!("{:.*}", (5 - e) as usize, x)
}

/// Converts a serde value to a CSV cell.
pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn sim_csv(outcomes: &[(SimConfig, Result<SimReport, String>)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "n1",
        "n2",
        "beta1",
        "beta2",
        "alpha1",
        "alpha2",
        "draws",
        "replications",
        "gamma",
        "seed",
        "coverage",
        "mc_se_coverage",
        "expected_length",
        "error",
    ])
    .expect("in-memory write");
    for (c, r) in outcomes {
        let mut row = vec![
            c.n1.to_string(),
            c.n2.to_string(),
            c.beta1.to_string(),
            c.beta2.to_string(),
            c.alpha1.to_string(),
            c.alpha2.to_string(),
            c.draws.to_string(),
            c.replications.to_string(),
            c.gamma.to_string(),
            c.seed.to_string(),
        ];
        match r {
            Ok(rep) => row.extend([
                rep.coverage.to_string(),
                rep.mc_se_coverage.to_string(),
                rep.expected_length.to_string(),
                String::new(),
            ]),
            Err(e) => row.extend([String::new(), String::new(), String::new(), e.clone()]),
        }
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 csv")
}

/// Renders reports in the standard grid layout: a coverage block and a length
/// block, rows `n1,n2`, columns `beta1`. Cells missing from `outcomes` are
/// left blank; configs off the standard grid are listed after the table.
pub fn table1_text(outcomes: &[(SimConfig, Result<SimReport, String>)]) -> String {
    let lookup = |n1: usize, n2: usize, b1: f64| {
        outcomes
            .iter()
            .find(|(c, _)| c.n1 == n1 && c.n2 == n2 && c.beta1 == b1 && c.beta2 == 2.0)
            .map(|(_, r)| r)
    };
    let mut out = String::new();
    let header = {
        let mut h = format!("{:<10}{:<8}", "", "n1,n2");
        for b in TABLE1_BETA1 {
            h.push_str(&format!("{:>9}", format!("{b:.1}")));
        }
        h
    };
    out.push_str(&format!("{:<18}{:>9}\n", "", "beta1 (beta2 = 2)"));
    out.push_str(&header);
    out.push('\n');
    for (block, pick) in [
        ("Coverage", (|r: &SimReport| format!("{:.3}", r.coverage)) as fn(&SimReport) -> String),
        ("Length", |r: &SimReport| format!("{:.3}", r.expected_length)),
    ] {
        let mut first = true;
        for n1 in TABLE1_N {
            for n2 in TABLE1_N {
                let label = if first { block } else { "" };
                first = false;
                let mut line = format!("{:<10}{:<8}", label, format!("{n1},{n2}"));
                for b1 in TABLE1_BETA1 {
                    let text = match lookup(n1, n2, b1) {
                        Some(Ok(r)) => pick(r),
                        Some(Err(_)) => "err".to_string(),
                        None => String::new(),
                    };
                    line.push_str(&format!("{text:>9}"));
                }
                out.push_str(line.trim_end());
                out.push('\n');
            }
        }
    }
    let off_grid: Vec<_> = outcomes
        .iter()
        .filter(|(c, _)| {
            !(TABLE1_N.contains(&c.n1)
                && TABLE1_N.contains(&c.n2)
                && TABLE1_BETA1.contains(&c.beta1)
                && c.beta2 == 2.0)
        })
        .collect();
    for (c, r) in off_grid {
        out.push_str(&format!(
            "n1={} n2={} beta1={} beta2={}: {}\n",
            c.n1,
            c.n2,
            sig6(c.beta1),
            sig6(c.beta2),
            match r {
                Ok(r) => format!(
                    "coverage {} (se {}), expected length {}",
                    sig6(r.coverage),
                    sig6(r.mc_se_coverage),
                    sig6(r.expected_length)
                ),
                Err(e) => format!("error: {e}"),
            }
        ));
    }
    out
}
