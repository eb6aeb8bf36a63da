//! User-facing reports and their text renderings.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::ast::Scope;
use crate::constraints::Provenance;
use crate::rational::Rational;
use crate::solver::{Conflict, CriticalVar};
use crate::span::Span;
use crate::units::{unit_render, UnitNorm};

/// Variables the user should annotate, alphabetically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuggestReport {
    pub file: String,
    pub entries: Vec<CriticalVar>,
}

impl SuggestReport {
    pub fn count(&self) -> usize {
        self.entries.len()
    }
}

pub fn render_suggest(r: &SuggestReport) -> String {
    let mut out = format!(
        "{}: {} variable declarations suggested to be given a specification:\n",
        r.file,
        r.count()
    );
    for e in &r.entries {
        let _ = writeln!(out, "    {} {}    {}", r.file, e.span.position(), e.name);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InferEntry {
    pub name: String,
    pub span: Span,
    pub scope: Scope,
    pub unit: UnitNorm,
    pub rendered: String,
    pub polymorphic: bool,
}

impl InferEntry {
    pub fn new(name: String, span: Span, scope: Scope, unit: UnitNorm) -> Self {
        InferEntry {
            rendered: unit_render(&unit),
            polymorphic: !unit.is_ground(),
            name,
            span,
            scope,
            unit,
        }
    }

    /// The annotation that would state this entry, `unit(<u>) :: <name>`.
    pub fn annotation(&self) -> String {
        format!("unit({}) :: {}", self.rendered, self.name)
    }
}

/// Inferred units for variables that carry no annotation yet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InferReport {
    pub file: String,
    /// In source order.
    pub entries: Vec<InferEntry>,
    /// Variables whose unit still depends on an unannotated variable.
    pub unresolved: Vec<CriticalVar>,
}

pub fn render_infer(r: &InferReport) -> String {
    let mut out = String::new();
    for e in &r.entries {
        let _ = writeln!(
            out,
            "{} {}    {}",
            r.file,
            e.span.position(),
            e.annotation()
        );
    }
    if !r.unresolved.is_empty() {
        out.push_str("underdetermined:\n");
        for u in &r.unresolved {
            let _ = writeln!(out, "    {} {}    {}", r.file, u.span.position(), u.name);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictReport {
    /// Function whose body is contradictory, or `None` for the main program.
    pub function: Option<String>,
    pub message: String,
    /// Sorted by span.
    pub provenance: Vec<Provenance>,
}

impl ConflictReport {
    pub fn new(function: Option<String>, conflict: &Conflict) -> Self {
        let mut message = format!(
            "incompatible units: `{}` would have to be dimensionless",
            unit_render(&conflict.residual)
        );
        if let Some(f) = &function {
            message = format!("in function `{f}`: {message}");
        }
        let mut provenance = conflict.provenance.clone();
        provenance.sort();
        ConflictReport {
            function,
            message,
            provenance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub file: String,
    pub verdict: Verdict,
    pub conflicts: Vec<ConflictReport>,
}

pub fn render_check(r: &CheckReport) -> String {
    match r.verdict {
        Verdict::Consistent => format!("{}: consistent\n", r.file),
        Verdict::Inconsistent => {
            let mut out = format!(
                "{}: inconsistent, {} conflict(s):\n",
                r.file,
                r.conflicts.len()
            );
            for c in &r.conflicts {
                let _ = writeln!(out, "    {}", c.message);
                for p in &c.provenance {
                    let _ = writeln!(
                        out,
                        "        {} {}    {}",
                        r.file,
                        p.span.position(),
                        p.reason
                    );
                }
            }
            out
        }
    }
}

/// How much of the annotation work inference saves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Burden {
    pub declared: usize,
    pub critical: usize,
    /// `1 - critical/declared`; `None` when nothing is declared.
    pub reduction: Option<Rational>,
}

pub fn annotation_burden(declared: usize, suggest: &SuggestReport) -> Burden {
    let critical = suggest.count();
    let reduction = (declared > 0).then(|| {
        let frac = Rational::new(critical as i64, declared as i64).expect("declared > 0");
        Rational::one() - frac
    });
    Burden {
        declared,
        critical,
        reduction,
    }
}

pub fn render_burden(file: &str, b: &Burden) -> String {
    let reduction = match &b.reduction {
        Some(r) => format!("{}", r.to_f64()),
        None => String::from("n/a"),
    };
    format!(
        "{file}: annotation burden: {} of {} declared variables critical, reduction {reduction}\n",
        b.critical, b.declared
    )
}
