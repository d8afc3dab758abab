//! Line-oriented `key=value` result records and trace files.

use std::fmt::Write as _;

use conerefine::jordan::BlockVec;
use conerefine::models::Certificate;
use conerefine::prsolver::Diagnostic;
use conerefine::refine::{Exit, RefineResult, TraceRecord};
use nalgebra::DVector;

use crate::sdpa::element_entries;

/// Ordered `key=value` pairs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Record {
    pub fields: Vec<(String, String)>,
}

impl Record {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.fields.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    /// One pair per line.
    pub fn to_lines(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.fields {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    /// All pairs on one line, separated by spaces; values must not contain spaces.
    pub fn to_line(&self) -> String {
        self.fields.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
    }

    pub fn parse_lines(text: &str) -> Record {
        Record { fields: text.lines().filter_map(split_pair).collect() }
    }

    pub fn parse_line(line: &str) -> Record {
        Record { fields: line.split_whitespace().filter_map(split_pair).collect() }
    }
}

fn split_pair(s: &str) -> Option<(String, String)> {
    let (k, v) = s.split_once('=')?;
    Some((k.trim().to_string(), v.trim().to_string()))
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn vector(v: &DVector<f64>) -> String {
    v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",")
}

/// `blk:i:j:value` entries joined by commas.
fn element(x: &BlockVec) -> String {
    element_entries(x).iter().map(|(b, i, j, v)| format!("{b}:{i}:{j}:{v:e}")).collect::<Vec<_>>().join(",")
}

/// Appends the certificate tag and its direction or point.
pub fn push_certificate(r: &mut Record, cert: &Certificate) {
    r.push("certificate", cert.tag());
    match cert {
        Certificate::ImprovingRayD { y, .. } | Certificate::ReducingDirP { y, .. } => r.push("direction_y", vector(y)),
        Certificate::ImprovingRayP { x, .. } | Certificate::ReducingDirD { x, .. } => r.push("direction_x", element(x)),
        Certificate::PrimalInterior { x, .. } => r.push("point_x", element(x)),
        Certificate::DualFeasible { y, .. } => r.push("point_y", vector(y)),
    }
}

/// Problem id, exit tag, DIMACS errors, objectives, bracket, time and iteration counts.
pub fn result_record(problem: &str, res: &RefineResult, by: f64, cx: f64, seconds: f64) -> Record {
    let mut r = Record::default();
    r.push("problem", problem);
    r.push("exit", res.exit.name());
    for (k, e) in res.dimacs.as_array().iter().enumerate() {
        r.push(&format!("err{}", k + 1), num(*e));
    }
    r.push("dual_objective", num(by));
    r.push("primal_objective", num(cx));
    r.push("lb", num(res.lb));
    r.push("ub", num(res.ub));
    r.push("seconds", num(seconds));
    r.push("iterations", res.trace.len());
    r.push("pr_rounds", res.trace.iter().map(|t| t.rounds).sum::<usize>());
    r.push("bp_iterations", res.trace.iter().map(|t| t.bp_iterations).sum::<usize>());
    if let Exit::CertificateFound(c) = &res.exit {
        push_certificate(&mut r, c);
    }
    r
}

fn diagnostic_tag(d: &Diagnostic) -> &'static str {
    match d {
        Diagnostic::BudgetExhausted { .. } => "budget_exhausted",
        Diagnostic::NotInterior { .. } => "not_interior",
        Diagnostic::ConeViolation { .. } => "cone_violation",
        Diagnostic::Algebra(_) => "algebra",
        Diagnostic::Rejected { .. } => "rejected",
    }
}

pub fn trace_line(t: &TraceRecord) -> String {
    let mut r = Record::default();
    r.push("side", t.side.name());
    r.push("k", t.k);
    r.push("theta", num(t.theta));
    r.push("outcome", t.outcome.name());
    r.push("lb", num(t.lb));
    r.push("ub", num(t.ub));
    r.push("seconds", num(t.seconds));
    r.push("rounds", t.rounds);
    r.push("bp_iterations", t.bp_iterations);
    if let Some(d) = &t.diagnostic {
        r.push("diagnostic", diagnostic_tag(d));
    }
    r.to_line()
}

pub fn write_trace(trace: &[TraceRecord]) -> String {
    trace.iter().map(|t| trace_line(t) + "\n").collect()
}

/// One record per non-empty line.
pub fn parse_trace(text: &str) -> Vec<Record> {
    text.lines().filter(|l| !l.trim().is_empty()).map(Record::parse_line).collect()
}
