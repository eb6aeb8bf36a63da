//! Machine-readable reports. Field order is the declaration order below.

use std::io::{self, Write};

use serde::Serialize;
use unitscheck_core::ast::Scope;
use unitscheck_core::report::{Burden, CheckReport, InferReport, SuggestReport, Verdict};
use unitscheck_core::solver::CriticalVar;
use unitscheck_core::Span;

#[derive(Serialize)]
pub struct Document<'a> {
    file: &'a str,
    mode: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    entries: Option<Vec<Entry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    underdetermined: Option<Vec<Entry>>,
    conflicts: Vec<Conflict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    burden: Option<BurdenDoc>,
}

#[derive(Serialize)]
struct Entry {
    name: String,
    line: usize,
    column: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    scope: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unit: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    polymorphic: Option<bool>,
}

#[derive(Serialize)]
struct Conflict {
    function: Option<String>,
    message: String,
    provenance: Vec<Location>,
}

#[derive(Serialize)]
struct Location {
    line: usize,
    column: usize,
    length: usize,
    reason: String,
}

#[derive(Serialize)]
struct BurdenDoc {
    declared: usize,
    critical: usize,
    /// `null` when nothing is declared.
    reduction: Option<f64>,
}

fn scope_name(s: &Scope) -> String {
    match s {
        Scope::Main => "main".into(),
        Scope::Function(f) => f.clone(),
    }
}

fn located(name: &str, span: &Span) -> Entry {
    Entry {
        name: name.into(),
        line: span.line,
        column: span.column,
        scope: None,
        unit: None,
        polymorphic: None,
    }
}

fn critical(v: &CriticalVar) -> Entry {
    Entry {
        scope: Some(scope_name(&v.scope)),
        ..located(&v.name, &v.span)
    }
}

pub fn suggest<'a>(r: &'a SuggestReport, burden: Option<&Burden>) -> Document<'a> {
    Document {
        file: &r.file,
        mode: "suggest",
        verdict: None,
        entries: Some(r.entries.iter().map(critical).collect()),
        underdetermined: None,
        conflicts: Vec::new(),
        burden: burden.map(|b| BurdenDoc {
            declared: b.declared,
            critical: b.critical,
            reduction: b.reduction.as_ref().map(|r| r.to_f64()),
        }),
    }
}

pub fn infer(r: &InferReport) -> Document<'_> {
    Document {
        file: &r.file,
        mode: "infer",
        verdict: None,
        entries: Some(
            r.entries
                .iter()
                .map(|e| Entry {
                    scope: Some(scope_name(&e.scope)),
                    unit: Some(e.rendered.clone()),
                    polymorphic: Some(e.polymorphic),
                    ..located(&e.name, &e.span)
                })
                .collect(),
        ),
        underdetermined: Some(r.unresolved.iter().map(critical).collect()),
        conflicts: Vec::new(),
        burden: None,
    }
}

/// A check document; `mode` names the subcommand that produced it.
pub fn check<'a>(r: &'a CheckReport, mode: &'a str) -> Document<'a> {
    Document {
        file: &r.file,
        mode,
        verdict: Some(match r.verdict {
            Verdict::Consistent => "consistent",
            Verdict::Inconsistent => "inconsistent",
        }),
        entries: None,
        underdetermined: None,
        conflicts: r
            .conflicts
            .iter()
            .map(|c| Conflict {
                function: c.function.clone(),
                message: c.message.clone(),
                provenance: c
                    .provenance
                    .iter()
                    .map(|p| Location {
                        line: p.span.line,
                        column: p.span.column,
                        length: p.span.length,
                        reason: p.reason.to_string(),
                    })
                    .collect(),
            })
            .collect(),
        burden: None,
    }
}

/// One document per line.
pub fn emit(out: &mut impl Write, doc: &Document<'_>) -> io::Result<()> {
    serde_json::to_writer(&mut *out, doc)?;
    out.write_all(b"\n")
}
