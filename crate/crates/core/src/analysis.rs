//! One-file pipeline: parse, generate, solve templates, solve main.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::ast::{Program, Scope};
use crate::constraints::{gen_constraints, ConstraintSet, UnknownKind};
use crate::error::Error;
use crate::parser::parse_source;
use crate::report::{
    annotation_burden, Burden, CheckReport, ConflictReport, InferEntry, InferReport, SuggestReport,
    Verdict,
};
use crate::solver::{
    critical_variables, solve_main, solve_templates, sort_critical, CriticalVar, SolveOutcome,
    TemplateOutcome, TemplateSolution,
};
use crate::synth::{synthesize, RewritePlan};

#[derive(Debug, Clone)]
pub struct Analysis {
    pub program: Program,
    pub constraints: ConstraintSet,
    /// One per function, in source order.
    pub templates: Vec<TemplateSolution>,
    pub main: SolveOutcome,
}

/// Analyze one source file. `file` is used verbatim in spans and reports.
pub fn analyze(source: &str, file: &str) -> Result<Analysis, Error> {
    let program = parse_source(source, file)?;
    let constraints = gen_constraints(&program)?;
    let templates = solve_templates(&constraints);
    let main = solve_main(&constraints);
    Ok(Analysis {
        program,
        constraints,
        templates,
        main,
    })
}

impl Analysis {
    pub fn file(&self) -> &str {
        &self.program.file
    }

    pub fn is_consistent(&self) -> bool {
        self.main.is_consistent()
            && self
                .templates
                .iter()
                .all(|t| matches!(t.outcome, TemplateOutcome::Consistent(_)))
    }

    /// Lines holding a function's definition or its annotations.
    fn function_lines(&self, name: &str) -> BTreeSet<usize> {
        let p = &self.program;
        let mut lines = BTreeSet::new();
        if let Some(f) = p.function(name) {
            lines.extend(f.span.line..=f.end_line);
        }
        for a in &p.function_annotations {
            if a.names.iter().any(|n| n.name == name) {
                lines.insert(a.span.line);
            }
        }
        lines
    }

    pub fn check_report(&self) -> CheckReport {
        let mut conflicts = Vec::new();
        let mut broken_lines = BTreeSet::new();
        for t in &self.templates {
            if let TemplateOutcome::Inconsistent(cs) = &t.outcome {
                conflicts.extend(
                    cs.iter()
                        .map(|c| ConflictReport::new(Some(t.function.clone()), c)),
                );
                broken_lines.extend(self.function_lines(&t.function));
            }
        }
        if let SolveOutcome::Inconsistent(cs) = &self.main {
            for c in cs {
                // skip copies of an already-reported contradictory function body
                if c.provenance
                    .iter()
                    .any(|p| broken_lines.contains(&p.span.line))
                {
                    continue;
                }
                conflicts.push(ConflictReport::new(None, c));
            }
        }
        CheckReport {
            file: self.file().into(),
            verdict: if self.is_consistent() {
                Verdict::Consistent
            } else {
                Verdict::Inconsistent
            },
            conflicts,
        }
    }

    /// Critical variables of the main program and of every function body.
    pub fn critical(&self) -> Result<Vec<CriticalVar>, Error> {
        if !self.is_consistent() {
            return Err(Error::CalledOnInconsistent);
        }
        let mut out = critical_variables(&self.main, &self.constraints)?;
        for t in &self.templates {
            if let TemplateOutcome::Consistent(spec) = &t.outcome {
                out.extend(spec.critical.iter().cloned());
            }
        }
        sort_critical(&mut out);
        Ok(out)
    }

    pub fn suggest_report(&self) -> Result<SuggestReport, Error> {
        Ok(SuggestReport {
            file: self.file().into(),
            entries: self.critical()?,
        })
    }

    pub fn burden(&self) -> Result<Burden, Error> {
        Ok(annotation_burden(
            self.program.declared_variable_count(),
            &self.suggest_report()?,
        ))
    }

    pub fn infer_report(&self) -> Result<InferReport, Error> {
        let SolveOutcome::Consistent(sol) = &self.main else {
            return Err(Error::CalledOnInconsistent);
        };
        if !self.is_consistent() {
            return Err(Error::CalledOnInconsistent);
        }
        let cs = &self.constraints;
        let program = &self.program;
        let mut entries = Vec::new();
        let mut unresolved = Vec::new();

        for &id in &cs.main_vars {
            let UnknownKind::DeclaredVar { name, span, .. } = &cs.unknown(id).kind else {
                continue;
            };
            if program.is_annotated(&Scope::Main, name) {
                continue;
            }
            let sym = &sol.assignments[&id];
            if sym.is_determined() {
                entries.push(InferEntry::new(
                    name.clone(),
                    span.clone(),
                    Scope::Main,
                    sym.ground.clone(),
                ));
            } else {
                unresolved.push(CriticalVar {
                    name: name.clone(),
                    span: span.clone(),
                    scope: Scope::Main,
                });
            }
        }

        for (t, solution) in cs.templates.iter().zip(&self.templates) {
            let TemplateOutcome::Consistent(spec) = &solution.outcome else {
                continue;
            };
            let scope = Scope::Function(t.name.clone());
            let func = program
                .function(&t.name)
                .expect("template of a parsed function");
            let mut push = |name: &str, span, unit: &crate::units::UnitNorm| {
                if !program.is_annotated(&scope, name) {
                    entries.push(InferEntry::new(
                        name.into(),
                        span,
                        scope.clone(),
                        unit.clone(),
                    ));
                }
            };
            push(&t.name, t.span.clone(), &spec.result);
            for (param, unit) in func.params.iter().zip(&spec.params) {
                let span = func
                    .body_decl(&param.name)
                    .map(|(_, item)| item.name.span.clone())
                    .unwrap_or_else(|| param.span.clone());
                push(&param.name, span, unit);
            }
            for (id, unit) in &spec.locals {
                let UnknownKind::DeclaredVar { name, span, .. } = &cs.unknown(*id).kind else {
                    continue;
                };
                match unit {
                    Some(u) => push(name, span.clone(), u),
                    None if !program.is_annotated(&scope, name) => unresolved.push(CriticalVar {
                        name: name.clone(),
                        span: span.clone(),
                        scope: scope.clone(),
                    }),
                    None => {}
                }
            }
        }

        entries.sort_by(|a, b| a.span.cmp(&b.span));
        unresolved.sort_by(|a, b| a.span.cmp(&b.span));
        Ok(InferReport {
            file: self.file().into(),
            entries,
            unresolved,
        })
    }

    /// Plan for inserting every missing inferred annotation.
    pub fn synthesize(&self) -> Result<RewritePlan, Error> {
        if !self.is_consistent() {
            return Err(Error::RefusesOnInconsistent);
        }
        Ok(synthesize(&self.program, &self.infer_report()?))
    }

    /// Names with their scope that still have no determined unit.
    pub fn underdetermined(&self) -> Result<Vec<(Scope, String)>, Error> {
        Ok(self
            .infer_report()?
            .unresolved
            .into_iter()
            .map(|u| (u.scope, u.name))
            .collect())
    }
}

/// Convenience for callers that only need the rewritten text.
pub fn synthesize_source(source: &str, file: &str) -> Result<String, Error> {
    Ok(analyze(source, file)?.synthesize()?.apply())
}
