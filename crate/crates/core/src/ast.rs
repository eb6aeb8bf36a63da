use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::rational::Rational;
use crate::span::Span;

/// An identifier occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

/// A parsed source file.
///
/// Main-scope statements come first, then an optional `contains` section
/// holding function definitions. Annotations written between functions in
/// that section bind function names and are kept in `function_annotations`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub file: String,
    pub statements: Vec<Stmt>,
    pub function_annotations: Vec<Annotation>,
    pub functions: Vec<FuncDef>,
    /// Raw source lines, each including its line terminator.
    pub source_lines: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Decl(Decl),
    Annotation(Annotation),
    Assign(Assign),
}

/// `real :: a, b = expr, ...`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub items: Vec<DeclItem>,
    /// Span of the `real` keyword.
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclItem {
    pub name: Ident,
    pub init: Option<Expr>,
}

/// `!= unit(<unit>) :: a, b`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub unit: UnitExpr,
    pub names: Vec<Ident>,
    /// Span of the `!=` marker.
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assign {
    pub target: Ident,
    pub value: Expr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Num {
        text: String,
        span: Span,
    },
    Var(Ident),
    Neg {
        operand: Box<Expr>,
        span: Span,
    },
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        span: Span,
    },
    /// `base ** exponent`. Only integer literal exponents are accepted by
    /// constraint generation.
    Pow {
        base: Box<Expr>,
        exponent: Box<Expr>,
        span: Span,
    },
    Call {
        callee: Ident,
        args: Vec<Expr>,
        span: Span,
    },
}

impl Expr {
    pub fn span(&self) -> &Span {
        match self {
            Expr::Num { span, .. }
            | Expr::Neg { span, .. }
            | Expr::Binary { span, .. }
            | Expr::Pow { span, .. }
            | Expr::Call { span, .. } => span,
            Expr::Var(id) => &id.span,
        }
    }

    /// The value of an integer literal, looking through unary minus.
    pub fn as_integer_literal(&self) -> Option<i64> {
        match self {
            Expr::Num { text, .. } if text.bytes().all(|b| b.is_ascii_digit()) => text.parse().ok(),
            Expr::Neg { operand, .. } => operand.as_integer_literal().map(|n| -n),
            _ => None,
        }
    }
}

/// `real function name(params) ... end function`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuncDef {
    pub name: Ident,
    pub params: Vec<Ident>,
    pub body: Vec<Stmt>,
    /// Span of the `real` keyword opening the header line.
    pub span: Span,
    /// Line of the closing `end`.
    pub end_line: usize,
}

impl FuncDef {
    /// The `real :: p` declaration for a name in the body, if any.
    pub fn body_decl(&self, name: &str) -> Option<(&Decl, &DeclItem)> {
        self.body.iter().find_map(|s| match s {
            Stmt::Decl(d) => d.items.iter().find(|i| i.name.name == name).map(|i| (d, i)),
            _ => None,
        })
    }
}

/// Surface syntax of a unit inside an annotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnitExpr {
    One,
    Base(String),
    /// A unit variable, `'a`, stored without the quote.
    Var(String),
    Mul(Box<UnitExpr>, Box<UnitExpr>),
    Div(Box<UnitExpr>, Box<UnitExpr>),
    Pow(Box<UnitExpr>, Rational),
}

impl UnitExpr {
    pub fn has_vars(&self) -> bool {
        match self {
            UnitExpr::One | UnitExpr::Base(_) => false,
            UnitExpr::Var(_) => true,
            UnitExpr::Mul(a, b) | UnitExpr::Div(a, b) => a.has_vars() || b.has_vars(),
            UnitExpr::Pow(a, _) => a.has_vars(),
        }
    }
}

/// Which scope a name lives in.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scope {
    Main,
    Function(String),
}

impl Program {
    pub fn function(&self, name: &str) -> Option<&FuncDef> {
        self.functions.iter().find(|f| f.name.name == name)
    }

    pub fn main_decls(&self) -> impl Iterator<Item = (&Decl, &DeclItem)> {
        decls_of(&self.statements)
    }

    pub fn main_annotations(&self) -> impl Iterator<Item = &Annotation> {
        annotations_of(&self.statements)
    }

    /// Number of names declared with `real ::` across every scope.
    pub fn declared_variable_count(&self) -> usize {
        self.main_decls().count()
            + self
                .functions
                .iter()
                .map(|f| decls_of(&f.body).count())
                .sum::<usize>()
    }

    /// Whether some annotation in `scope` already names `name`.
    pub fn is_annotated(&self, scope: &Scope, name: &str) -> bool {
        let names = |a: &Annotation| a.names.iter().any(|n| n.name == name);
        match scope {
            Scope::Main => self.main_annotations().any(names),
            Scope::Function(f) => {
                let Some(func) = self.function(f) else {
                    return false;
                };
                (name == f && self.function_annotations.iter().any(names))
                    || annotations_of(&func.body).any(names)
            }
        }
    }
}

pub(crate) fn decls_of(stmts: &[Stmt]) -> impl Iterator<Item = (&Decl, &DeclItem)> {
    stmts.iter().flat_map(|s| match s {
        Stmt::Decl(d) => d.items.iter().map(move |i| (d, i)).collect::<Vec<_>>(),
        _ => Vec::new(),
    })
}

pub(crate) fn annotations_of(stmts: &[Stmt]) -> impl Iterator<Item = &Annotation> {
    stmts.iter().filter_map(|s| match s {
        Stmt::Annotation(a) => Some(a),
        _ => None,
    })
}
