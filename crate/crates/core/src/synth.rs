//! Inserting annotation lines into source text.
//!
//! Rewriting is purely additive: new `!=` lines are placed immediately above
//! the declaration (or function header) they describe, with that line's
//! indentation, and every original line is kept byte for byte.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::ast::{Program, Scope};
use crate::report::InferReport;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Insertion {
    /// 1-based line the annotation goes above.
    pub before_line: usize,
    pub indent: String,
    /// Annotation text without indentation or line ending.
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewritePlan {
    /// Ordered by `before_line`; ties keep request order.
    pub insertions: Vec<Insertion>,
    pub original: Vec<String>,
}

impl RewritePlan {
    pub fn is_empty(&self) -> bool {
        self.insertions.is_empty()
    }

    /// The rewritten text, using the file's dominant line ending.
    pub fn apply(&self) -> String {
        let eol = dominant_line_ending(&self.original);
        let mut out = String::new();
        let mut pending = self.insertions.iter().peekable();
        for (i, line) in self.original.iter().enumerate() {
            while let Some(ins) = pending.next_if(|ins| ins.before_line <= i + 1) {
                out.push_str(&ins.indent);
                out.push_str(&ins.text);
                out.push_str(eol);
            }
            out.push_str(line);
        }
        for ins in pending {
            if !out.is_empty() && !out.ends_with('\n') {
                out.push_str(eol);
            }
            out.push_str(&ins.indent);
            out.push_str(&ins.text);
            out.push_str(eol);
        }
        out
    }
}

fn dominant_line_ending(lines: &[String]) -> &'static str {
    let crlf = lines.iter().filter(|l| l.ends_with("\r\n")).count();
    let lf = lines.iter().filter(|l| l.ends_with('\n')).count() - crlf;
    if crlf > lf {
        "\r\n"
    } else {
        "\n"
    }
}

/// Insert `!= unit(<unit>) :: <name>` for every inferred entry that has no
/// annotation yet. Underdetermined variables get nothing.
pub fn synthesize(program: &Program, inferred: &InferReport) -> RewritePlan {
    let requests: Vec<_> = inferred
        .entries
        .iter()
        .filter(|e| !program.is_annotated(&e.scope, &e.name))
        .map(|e| (e.scope.clone(), e.name.clone(), e.rendered.clone()))
        .collect();
    plan_annotations(program, &requests)
}

/// Place one annotation line per `(scope, name, unit text)` request.
pub fn plan_annotations(program: &Program, requests: &[(Scope, String, String)]) -> RewritePlan {
    let mut insertions: Vec<Insertion> = requests
        .iter()
        .filter_map(|(scope, name, unit)| {
            let (before_line, indent) = anchor(program, scope, name)?;
            Some(Insertion {
                before_line,
                indent,
                text: format!("!= unit({unit}) :: {name}"),
            })
        })
        .collect();
    insertions.sort_by_key(|i| i.before_line);
    RewritePlan {
        insertions,
        original: program.source_lines.clone(),
    }
}

fn indent_of(program: &Program, line: usize) -> String {
    program
        .source_lines
        .get(line - 1)
        .map(|l| l.chars().take_while(|c| *c == ' ' || *c == '\t').collect())
        .unwrap_or_default()
}

/// Line to insert above, and its indentation.
fn anchor(program: &Program, scope: &Scope, name: &str) -> Option<(usize, String)> {
    let line = match scope {
        Scope::Main => program
            .main_decls()
            .find(|(_, item)| item.name.name == name)
            .map(|(d, _)| d.span.line)?,
        Scope::Function(f) => {
            let func = program.function(f)?;
            if name == f {
                func.span.line
            } else if let Some((decl, _)) = func.body_decl(name) {
                decl.span.line
            } else {
                func.params.iter().find(|p| p.name == name)?;
                // undeclared parameter: first line of the body
                let header = func.span.line;
                let indent = match func.body.first() {
                    Some(_) => indent_of(program, header + 1),
                    None => format!("{}  ", indent_of(program, header)),
                };
                return Some((header + 1, indent));
            }
        }
    };
    Some((line, indent_of(program, line)))
}

/// Drop every line whose first non-blank characters are `!=`.
pub fn strip_annotations(text: &str) -> String {
    text.split_inclusive('\n')
        .filter(|l| !l.trim_start().starts_with("!="))
        .collect()
}
