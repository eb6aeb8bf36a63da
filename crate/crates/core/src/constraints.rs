//! Constraint generation.
//!
//! Every program variable, numeric literal and call-site copy gets an
//! unknown standing for its unit, written multiplicatively as a vector of
//! exponents. Expressions fold to linear combinations of unknowns
//! (`u(a*b) = u(a) + u(b)`, `u(a**k) = k*u(a)`), and equations are emitted
//! only where units must agree: operands of `+`/`-`, assignments, call
//! arguments and annotations.
//!
//! Function bodies become [`FunctionTemplate`]s. A call copies the callee's
//! template with fresh unknowns, so each call site is solved independently
//! (let-polymorphism). Unit variables written in a function's annotations
//! are rigid inside the template and become fresh unknowns when copied.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::ast::*;
use crate::error::GenError;
use crate::rational::Rational;
use crate::span::Span;
use crate::units::{unit_normalize, Dim, UnitNorm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnknownId(pub usize);

impl fmt::Display for UnknownId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{}", self.0)
    }
}

/// What a template-local unknown was copied from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceOrigin {
    Unknown(UnknownId),
    UnitVar(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnknownKind {
    DeclaredVar {
        name: String,
        span: Span,
        scope: Scope,
    },
    LiteralUnit {
        span: Span,
    },
    Instantiated {
        origin: InstanceOrigin,
        call_site: Span,
    },
    Param {
        function: String,
        index: usize,
        name: String,
        span: Span,
    },
    Result {
        function: String,
        span: Span,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unknown {
    pub id: UnknownId,
    pub kind: UnknownKind,
    /// The system this unknown belongs to: main, or a function's template.
    pub owner: Scope,
}

impl Unknown {
    pub fn display_name(&self) -> String {
        match &self.kind {
            UnknownKind::DeclaredVar { name, .. } | UnknownKind::Param { name, .. } => name.clone(),
            UnknownKind::Result { function, .. } => function.clone(),
            UnknownKind::LiteralUnit { span } => format!("literal@{}:{}", span.line, span.column),
            UnknownKind::Instantiated { origin, call_site } => match origin {
                InstanceOrigin::Unknown(id) => {
                    format!("{id}@{}:{}", call_site.line, call_site.column)
                }
                InstanceOrigin::UnitVar(v) => {
                    format!("'{v}@{}:{}", call_site.line, call_site.column)
                }
            },
        }
    }

    pub fn is_declared_var(&self) -> bool {
        matches!(self.kind, UnknownKind::DeclaredVar { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Reason {
    AdditionOperands,
    SubtractionOperands,
    Assignment,
    AnnotationBinding,
    ArgumentPassing,
    ResultBinding,
    PowExponent,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reason::AdditionOperands => "addition operands",
            Reason::SubtractionOperands => "subtraction operands",
            Reason::Assignment => "assignment",
            Reason::AnnotationBinding => "annotation",
            Reason::ArgumentPassing => "argument passing",
            Reason::ResultBinding => "function result",
            Reason::PowExponent => "exponent",
        })
    }
}

/// Where a constraint came from. Orders by span first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Provenance {
    pub span: Span,
    pub reason: Reason,
}

/// `product over terms of unit(u)^coeff = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub terms: BTreeMap<UnknownId, Rational>,
    pub rhs: UnitNorm,
    pub provenance: Provenance,
}

/// A function body generalized over its own unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTemplate {
    pub name: String,
    pub span: Span,
    pub params: Vec<UnknownId>,
    pub result: UnknownId,
    /// Declared locals that are not parameters, in declaration order.
    pub locals: Vec<UnknownId>,
    /// Every unknown owned by the template, in creation order.
    pub unknowns: Vec<UnknownId>,
    pub body: Vec<Constraint>,
    /// Rigid unit variables used by this function's annotations.
    pub unit_vars: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstraintSet {
    /// Main-scope constraints in source order.
    pub constraints: Vec<Constraint>,
    /// Indexed by `UnknownId`.
    pub unknowns: Vec<Unknown>,
    /// In source order of the function definitions.
    pub templates: Vec<FunctionTemplate>,
    /// Main-scope declared variables in declaration order.
    pub main_vars: Vec<UnknownId>,
}

impl ConstraintSet {
    pub fn unknown(&self, id: UnknownId) -> &Unknown {
        &self.unknowns[id.0]
    }

    pub fn template(&self, name: &str) -> Option<&FunctionTemplate> {
        self.templates.iter().find(|t| t.name == name)
    }

    /// Unknowns owned by the main system, in creation order.
    pub fn main_unknowns(&self) -> impl Iterator<Item = &Unknown> {
        self.unknowns.iter().filter(|u| u.owner == Scope::Main)
    }

    fn fresh(&mut self, kind: UnknownKind, owner: &Scope) -> UnknownId {
        let id = UnknownId(self.unknowns.len());
        self.unknowns.push(Unknown {
            id,
            kind,
            owner: owner.clone(),
        });
        id
    }
}

type LinComb = BTreeMap<UnknownId, Rational>;

fn add_scaled(acc: &mut LinComb, other: &LinComb, k: &Rational) {
    for (id, c) in other {
        let slot = acc.entry(*id).or_default();
        *slot = &*slot + &(c * k);
        if slot.is_zero() {
            acc.remove(id);
        }
    }
}

fn single(id: UnknownId) -> LinComb {
    let mut lc = LinComb::new();
    lc.insert(id, Rational::one());
    lc
}

/// Generate main-scope constraints and one template per function.
pub fn gen_constraints(program: &Program) -> Result<ConstraintSet, GenError> {
    let order = call_order(program)?;
    let mut gen = Gen {
        program,
        cs: ConstraintSet::default(),
        built: BTreeMap::new(),
    };
    for idx in order {
        let template = gen.template_for(&program.functions[idx])?;
        gen.built.insert(idx, template);
    }
    gen.cs.templates = gen.built.values().cloned().collect();

    let mut scope = ScopeCtx::new(Scope::Main);
    for (_, item) in program.main_decls() {
        let id = gen.cs.fresh(
            UnknownKind::DeclaredVar {
                name: item.name.name.clone(),
                span: item.name.span.clone(),
                scope: Scope::Main,
            },
            &Scope::Main,
        );
        scope.env.insert(item.name.name.clone(), id);
        gen.cs.main_vars.push(id);
    }
    gen.stmts(&mut scope, &program.statements)?;
    gen.cs.constraints = scope.out;
    Ok(gen.cs)
}

/// Indices of functions ordered callees-first; rejects recursion.
fn call_order(program: &Program) -> Result<Vec<usize>, GenError> {
    fn calls<'p>(stmts: &'p [Stmt], out: &mut Vec<(&'p Ident, usize, &'p Span)>) {
        fn walk<'p>(e: &'p Expr, out: &mut Vec<(&'p Ident, usize, &'p Span)>) {
            match e {
                Expr::Num { .. } | Expr::Var(_) => {}
                Expr::Neg { operand, .. } => walk(operand, out),
                Expr::Binary { lhs, rhs, .. } => {
                    walk(lhs, out);
                    walk(rhs, out);
                }
                Expr::Pow { base, exponent, .. } => {
                    walk(base, out);
                    walk(exponent, out);
                }
                Expr::Call { callee, args, span } => {
                    args.iter().for_each(|a| walk(a, out));
                    out.push((callee, args.len(), span));
                }
            }
        }
        for s in stmts {
            match s {
                Stmt::Decl(d) => d
                    .items
                    .iter()
                    .filter_map(|i| i.init.as_ref())
                    .for_each(|e| walk(e, out)),
                Stmt::Assign(a) => walk(&a.value, out),
                Stmt::Annotation(_) => {}
            }
        }
    }

    let index: BTreeMap<&str, usize> = program
        .functions
        .iter()
        .enumerate()
        .map(|(i, f)| (f.name.name.as_str(), i))
        .collect();
    let mut edges: Vec<Vec<(usize, Span)>> = Vec::new();
    for f in &program.functions {
        let mut found = Vec::new();
        calls(&f.body, &mut found);
        let mut out = Vec::new();
        for (callee, arity, span) in found {
            let target = check_call(program, &index, callee, arity, span)?;
            out.push((target, span.clone()));
        }
        edges.push(out);
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    fn visit(
        i: usize,
        edges: &[Vec<(usize, Span)>],
        marks: &mut [Mark],
        order: &mut Vec<usize>,
        program: &Program,
    ) -> Result<(), GenError> {
        marks[i] = Mark::Active;
        for (j, span) in &edges[i] {
            match marks[*j] {
                Mark::Active => {
                    return Err(GenError::RecursionUnsupported {
                        span: span.clone(),
                        function: program.functions[*j].name.name.clone(),
                    })
                }
                Mark::New => visit(*j, edges, marks, order, program)?,
                Mark::Done => {}
            }
        }
        marks[i] = Mark::Done;
        order.push(i);
        Ok(())
    }

    let mut marks = alloc::vec![Mark::New; program.functions.len()];
    let mut order = Vec::new();
    for i in 0..program.functions.len() {
        if marks[i] == Mark::New {
            visit(i, &edges, &mut marks, &mut order, program)?;
        }
    }
    Ok(order)
}

fn check_call(
    program: &Program,
    index: &BTreeMap<&str, usize>,
    callee: &Ident,
    arity: usize,
    span: &Span,
) -> Result<usize, GenError> {
    let Some(&target) = index.get(callee.name.as_str()) else {
        return Err(GenError::UnknownFunction {
            span: callee.span.clone(),
            name: callee.name.clone(),
        });
    };
    let expected = program.functions[target].params.len();
    if expected != arity {
        return Err(GenError::ArityMismatch {
            span: span.clone(),
            function: callee.name.clone(),
            expected,
            found: arity,
        });
    }
    Ok(target)
}

struct ScopeCtx {
    owner: Scope,
    env: BTreeMap<String, UnknownId>,
    out: Vec<Constraint>,
    /// Unit variables mentioned by annotations in this scope.
    unit_vars: BTreeSet<String>,
}

impl ScopeCtx {
    fn new(owner: Scope) -> Self {
        ScopeCtx {
            owner,
            env: BTreeMap::new(),
            out: Vec::new(),
            unit_vars: BTreeSet::new(),
        }
    }

    fn emit(&mut self, terms: LinComb, rhs: UnitNorm, span: Span, reason: Reason) {
        if terms.is_empty() && rhs.is_one() {
            return;
        }
        self.out.push(Constraint {
            terms,
            rhs,
            provenance: Provenance { span, reason },
        });
    }
}

struct Gen<'p> {
    program: &'p Program,
    cs: ConstraintSet,
    /// Templates built so far, keyed by function index.
    built: BTreeMap<usize, FunctionTemplate>,
}

impl Gen<'_> {
    fn template_for(&mut self, f: &FuncDef) -> Result<FunctionTemplate, GenError> {
        let owner = Scope::Function(f.name.name.clone());
        let first = self.cs.unknowns.len();
        let mut scope = ScopeCtx::new(owner.clone());

        let result = self.cs.fresh(
            UnknownKind::Result {
                function: f.name.name.clone(),
                span: f.name.span.clone(),
            },
            &owner,
        );
        scope.env.insert(f.name.name.clone(), result);
        let mut params = Vec::new();
        for (index, p) in f.params.iter().enumerate() {
            let id = self.cs.fresh(
                UnknownKind::Param {
                    function: f.name.name.clone(),
                    index,
                    name: p.name.clone(),
                    span: p.span.clone(),
                },
                &owner,
            );
            scope.env.insert(p.name.clone(), id);
            params.push(id);
        }
        let mut locals = Vec::new();
        for (_, item) in decls_of(&f.body) {
            if scope.env.contains_key(&item.name.name) {
                continue;
            }
            let id = self.cs.fresh(
                UnknownKind::DeclaredVar {
                    name: item.name.name.clone(),
                    span: item.name.span.clone(),
                    scope: owner.clone(),
                },
                &owner,
            );
            scope.env.insert(item.name.name.clone(), id);
            locals.push(id);
        }

        for a in &self.program.function_annotations {
            if a.names.iter().any(|n| n.name == f.name.name) {
                let unit = unit_normalize(&a.unit);
                scope
                    .unit_vars
                    .extend(unit.var_factors().map(|(v, _)| String::from(v)));
                for n in a.names.iter().filter(|n| n.name == f.name.name) {
                    scope.emit(
                        single(result),
                        unit.clone(),
                        n.span.clone(),
                        Reason::AnnotationBinding,
                    );
                }
            }
        }
        self.stmts(&mut scope, &f.body)?;

        let unknowns = (first..self.cs.unknowns.len()).map(UnknownId).collect();
        Ok(FunctionTemplate {
            name: f.name.name.clone(),
            span: f.name.span.clone(),
            params,
            result,
            locals,
            unknowns,
            body: scope.out,
            unit_vars: scope.unit_vars,
        })
    }

    fn stmts(&mut self, scope: &mut ScopeCtx, stmts: &[Stmt]) -> Result<(), GenError> {
        for stmt in stmts {
            match stmt {
                Stmt::Decl(d) => {
                    for item in &d.items {
                        if let Some(init) = &item.init {
                            let target = scope.env[&item.name.name];
                            self.bind(scope, target, init, item.name.span.to(init.span()))?;
                        }
                    }
                }
                Stmt::Assign(a) => {
                    let target = scope.env[&a.target.name];
                    self.bind(scope, target, &a.value, a.target.span.to(a.value.span()))?;
                }
                Stmt::Annotation(a) => {
                    let unit = unit_normalize(&a.unit);
                    if !unit.is_ground() && scope.owner == Scope::Main {
                        return Err(GenError::PolymorphicAnnotationAtMainScope {
                            span: a.span.clone(),
                        });
                    }
                    scope
                        .unit_vars
                        .extend(unit.var_factors().map(|(v, _)| String::from(v)));
                    for n in &a.names {
                        let id = scope.env[&n.name];
                        scope.emit(
                            single(id),
                            unit.clone(),
                            n.span.clone(),
                            Reason::AnnotationBinding,
                        );
                    }
                }
            }
        }
        Ok(())
    }

    fn bind(
        &mut self,
        scope: &mut ScopeCtx,
        target: UnknownId,
        value: &Expr,
        span: Span,
    ) -> Result<(), GenError> {
        let value = self.expr(scope, value)?;
        let mut terms = single(target);
        add_scaled(&mut terms, &value, &Rational::integer(-1));
        scope.emit(terms, UnitNorm::one(), span, Reason::Assignment);
        Ok(())
    }

    fn expr(&mut self, scope: &mut ScopeCtx, expr: &Expr) -> Result<LinComb, GenError> {
        Ok(match expr {
            Expr::Num { span, .. } => single(self.cs.fresh(
                UnknownKind::LiteralUnit { span: span.clone() },
                &scope.owner,
            )),
            Expr::Var(id) => single(scope.env[&id.name]),
            Expr::Neg { operand, .. } => self.expr(scope, operand)?,
            Expr::Binary { op, lhs, rhs, span } => {
                let mut l = self.expr(scope, lhs)?;
                let r = self.expr(scope, rhs)?;
                match op {
                    BinOp::Add | BinOp::Sub => {
                        let mut diff = l.clone();
                        add_scaled(&mut diff, &r, &Rational::integer(-1));
                        let reason = if *op == BinOp::Add {
                            Reason::AdditionOperands
                        } else {
                            Reason::SubtractionOperands
                        };
                        scope.emit(diff, UnitNorm::one(), span.clone(), reason);
                    }
                    BinOp::Mul => add_scaled(&mut l, &r, &Rational::one()),
                    BinOp::Div => add_scaled(&mut l, &r, &Rational::integer(-1)),
                }
                l
            }
            Expr::Pow { base, exponent, .. } => {
                let k = exponent
                    .as_integer_literal()
                    .ok_or_else(|| GenError::PowExponent {
                        span: exponent.span().clone(),
                    })?;
                let b = self.expr(scope, base)?;
                let mut out = LinComb::new();
                add_scaled(&mut out, &b, &Rational::integer(k));
                out
            }
            Expr::Call { callee, args, span } => {
                let index: BTreeMap<&str, usize> = self
                    .program
                    .functions
                    .iter()
                    .enumerate()
                    .map(|(i, f)| (f.name.name.as_str(), i))
                    .collect();
                let target = check_call(self.program, &index, callee, args.len(), span)?;
                let mut arg_units = Vec::new();
                for a in args {
                    arg_units.push((self.expr(scope, a)?, a.span().clone()));
                }
                let template = self
                    .built
                    .get(&target)
                    .cloned()
                    .expect("callee templates are built first");
                let result = instantiate_template(
                    &template,
                    &arg_units,
                    span,
                    &mut self.cs,
                    &scope.owner,
                    &mut scope.out,
                )?;
                single(result)
            }
        })
    }
}

/// Copy `template` for one call site with fresh unknowns owned by `owner`,
/// appending its body constraints and one argument equation per parameter
/// to `out`. Returns the copy of the result unknown.
pub fn instantiate_template(
    template: &FunctionTemplate,
    args: &[(BTreeMap<UnknownId, Rational>, Span)],
    call_site: &Span,
    cs: &mut ConstraintSet,
    owner: &Scope,
    out: &mut Vec<Constraint>,
) -> Result<UnknownId, GenError> {
    if args.len() != template.params.len() {
        return Err(GenError::ArityMismatch {
            span: call_site.clone(),
            function: template.name.clone(),
            expected: template.params.len(),
            found: args.len(),
        });
    }
    let mut rename = BTreeMap::new();
    for &id in &template.unknowns {
        let fresh = cs.fresh(
            UnknownKind::Instantiated {
                origin: InstanceOrigin::Unknown(id),
                call_site: call_site.clone(),
            },
            owner,
        );
        rename.insert(id, fresh);
    }
    let mut var_rename = BTreeMap::new();
    for v in &template.unit_vars {
        let fresh = cs.fresh(
            UnknownKind::Instantiated {
                origin: InstanceOrigin::UnitVar(v.clone()),
                call_site: call_site.clone(),
            },
            owner,
        );
        var_rename.insert(v.clone(), fresh);
    }

    for c in &template.body {
        let mut terms: LinComb = c
            .terms
            .iter()
            .map(|(id, k)| (rename[id], k.clone()))
            .collect();
        let mut rhs = UnitNorm::one();
        for (dim, e) in c.rhs.factors() {
            match dim {
                Dim::Var(v) => {
                    let slot = terms.entry(var_rename[v]).or_default();
                    *slot = &*slot - e;
                    if slot.is_zero() {
                        terms.remove(&var_rename[v]);
                    }
                }
                Dim::Base(_) => rhs.add_factor(dim.clone(), e.clone()),
            }
        }
        if terms.is_empty() && rhs.is_one() {
            continue;
        }
        out.push(Constraint {
            terms,
            rhs,
            provenance: c.provenance.clone(),
        });
    }

    for ((arg, span), param) in args.iter().zip(&template.params) {
        let mut terms = arg.clone();
        add_scaled(&mut terms, &single(rename[param]), &Rational::integer(-1));
        if terms.is_empty() {
            continue;
        }
        out.push(Constraint {
            terms,
            rhs: UnitNorm::one(),
            provenance: Provenance {
                span: span.clone(),
                reason: Reason::ArgumentPassing,
            },
        });
    }
    Ok(rename[&template.result])
}
