//! Recursive-descent parser and post-parse name resolution.
//!
//! Grammar, one statement per line:
//!
//! ```text
//! program    := stmt* [ "contains" NL ( annotation | function )* ]
//! stmt       := decl | annotation | assign
//! decl       := "real" "::" item ("," item)*          item := name ["=" expr]
//! annotation := "!=" "unit" "(" unit ")" "::" name ("," name)*
//! assign     := name "=" expr
//! function   := "real" "function" name "(" [name ("," name)*] ")" NL
//!               stmt* "end" ["function" [name]]
//! expr       := ["+"|"-"] term (("+"|"-") term)*
//! term       := factor (("*"|"/") factor)*
//! factor     := primary ["**" ["+"|"-"] factor]
//! primary    := number | name | name "(" [expr ("," expr)*] ")" | "(" expr ")"
//! unit       := uterm (("*"|"/") uterm)*
//! uterm      := uatom ["**" exponent]
//! uatom      := name | "1" | 'var | "(" unit ")"
//! exponent   := ["-"] int | "(" ["-"] int ["/" ["-"] int] ")"
//! ```

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::ast::*;
use crate::error::SyntaxError;
use crate::lexer::{tokenize_file, Token, TokenKind};
use crate::rational::Rational;
use crate::span::Span;

/// Tokenize, parse and resolve one source file.
pub fn parse_source(source: &str, file: &str) -> Result<Program, SyntaxError> {
    let tokens = tokenize_file(source, file)?;
    let lines = source.split_inclusive('\n').map(String::from).collect();
    parse_program(&tokens, file, lines)
}

/// Parse a token stream into a resolved [`Program`].
pub fn parse_program(
    tokens: &[Token],
    file: &str,
    source_lines: Vec<String>,
) -> Result<Program, SyntaxError> {
    let mut p = Parser::new(tokens, file);
    let program = p.program(source_lines)?;
    resolve(&program)?;
    Ok(program)
}

/// Parse one annotation token stream, `!= unit(<unit>) :: names`.
pub fn parse_unit_expr(tokens: &[Token]) -> Result<Annotation, SyntaxError> {
    let file = tokens
        .first()
        .map(|t| t.span.file.to_string())
        .unwrap_or_default();
    let mut p = Parser::new(tokens, &file);
    let annotation = p.annotation()?;
    p.eat(&TokenKind::Newline);
    if let Some(tok) = p.peek() {
        return Err(p.unexpected_at(tok, "end of annotation"));
    }
    Ok(annotation)
}

/// Parse bare unit syntax such as `m / s**2` or `('a)**2`.
pub fn parse_unit_str(text: &str) -> Result<UnitExpr, SyntaxError> {
    let source = format!("!= unit({text})");
    let tokens = tokenize_file(&source, "<unit>")?;
    let mut p = Parser::new(&tokens, "<unit>");
    p.expect(&TokenKind::AnnotStart)?;
    p.expect(&TokenKind::KwUnit)?;
    p.expect(&TokenKind::LParen)?;
    let unit = p.unit()?;
    p.expect(&TokenKind::RParen)?;
    if let Some(tok) = p.peek() {
        return Err(p.unexpected_at(tok, "end of unit"));
    }
    Ok(unit)
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    file: Arc<str>,
}

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token], file: &str) -> Self {
        Parser {
            tokens,
            pos: 0,
            file: Arc::from(file),
        }
    }

    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&'t TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn peek_kind_at(&self, ahead: usize) -> Option<&'t TokenKind> {
        self.tokens.get(self.pos + ahead).map(|t| &t.kind)
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let tok = self.tokens.get(self.pos)?;
        self.pos += 1;
        Some(tok)
    }

    fn eat(&mut self, kind: &TokenKind) -> Option<&'t Token> {
        if self.peek_kind() == Some(kind) {
            self.bump()
        } else {
            None
        }
    }

    fn eof_span(&self) -> Span {
        match self.tokens.last() {
            Some(t) => Span::new(
                self.file.clone(),
                t.span.line,
                t.span.column + t.span.length,
                0,
            ),
            None => Span::new(self.file.clone(), 1, 1, 0),
        }
    }

    fn unexpected_at(&self, tok: &Token, expected: &str) -> SyntaxError {
        SyntaxError::Parse {
            span: tok.span.clone(),
            expected: expected.to_string(),
            found: tok.kind.to_string(),
        }
    }

    fn unexpected(&self, expected: &str) -> SyntaxError {
        match self.peek() {
            Some(tok) => self.unexpected_at(tok, expected),
            None => SyntaxError::Parse {
                span: self.eof_span(),
                expected: expected.to_string(),
                found: "end of file".to_string(),
            },
        }
    }

    fn expect(&mut self, kind: &TokenKind) -> Result<&'t Token, SyntaxError> {
        self.eat(kind)
            .ok_or_else(|| self.unexpected(&kind.to_string()))
    }

    fn ident(&mut self) -> Result<Ident, SyntaxError> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Ident(name),
                span,
                ..
            }) => {
                self.pos += 1;
                Ok(Ident {
                    name: name.clone(),
                    span: span.clone(),
                })
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    /// A statement ends at a newline or at end of input.
    fn end_of_statement(&mut self) -> Result<(), SyntaxError> {
        if self.peek().is_none() || self.eat(&TokenKind::Newline).is_some() {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }

    fn program(&mut self, source_lines: Vec<String>) -> Result<Program, SyntaxError> {
        let statements = self.statements()?;
        let mut function_annotations = Vec::new();
        let mut functions = Vec::new();
        if self.eat(&TokenKind::KwContains).is_some() {
            self.end_of_statement()?;
            loop {
                match self.peek_kind() {
                    None => break,
                    Some(TokenKind::AnnotStart) => {
                        function_annotations.push(self.annotation()?);
                        self.end_of_statement()?;
                    }
                    Some(TokenKind::KwReal) => functions.push(self.function()?),
                    Some(_) => return Err(self.unexpected("function definition or annotation")),
                }
            }
        }
        if self.peek().is_some() {
            return Err(self.unexpected("statement or `contains`"));
        }
        Ok(Program {
            file: self.file.to_string(),
            statements,
            function_annotations,
            functions,
            source_lines,
        })
    }

    /// Statements up to (not including) `contains`, `end` or end of input.
    fn statements(&mut self) -> Result<Vec<Stmt>, SyntaxError> {
        let mut out = Vec::new();
        loop {
            let stmt = match self.peek_kind() {
                None | Some(TokenKind::KwContains) | Some(TokenKind::KwEnd) => return Ok(out),
                Some(TokenKind::KwReal) => {
                    if self.peek_kind_at(1) == Some(&TokenKind::KwFunction) {
                        return Err(self.unexpected("statement (functions go after `contains`)"));
                    }
                    Stmt::Decl(self.decl()?)
                }
                Some(TokenKind::AnnotStart) => Stmt::Annotation(self.annotation()?),
                Some(TokenKind::Ident(_)) => Stmt::Assign(self.assign()?),
                Some(_) => return Err(self.unexpected("statement")),
            };
            self.end_of_statement()?;
            out.push(stmt);
        }
    }

    fn decl(&mut self) -> Result<Decl, SyntaxError> {
        let span = self.expect(&TokenKind::KwReal)?.span.clone();
        self.expect(&TokenKind::DColon)?;
        let mut items = Vec::new();
        loop {
            let name = self.ident()?;
            let init = if self.eat(&TokenKind::Eq).is_some() {
                Some(self.expr()?)
            } else {
                None
            };
            items.push(DeclItem { name, init });
            if self.eat(&TokenKind::Comma).is_none() {
                break;
            }
        }
        Ok(Decl { items, span })
    }

    fn assign(&mut self) -> Result<Assign, SyntaxError> {
        let target = self.ident()?;
        self.expect(&TokenKind::Eq)?;
        let value = self.expr()?;
        Ok(Assign { target, value })
    }

    fn annotation(&mut self) -> Result<Annotation, SyntaxError> {
        let span = self.expect(&TokenKind::AnnotStart)?.span.clone();
        self.expect(&TokenKind::KwUnit)?;
        self.expect(&TokenKind::LParen)?;
        let unit = self.unit()?;
        self.expect(&TokenKind::RParen)?;
        self.expect(&TokenKind::DColon)?;
        let mut names = alloc::vec![self.ident()?];
        while self.eat(&TokenKind::Comma).is_some() {
            names.push(self.ident()?);
        }
        Ok(Annotation { unit, names, span })
    }

    fn function(&mut self) -> Result<FuncDef, SyntaxError> {
        let span = self.expect(&TokenKind::KwReal)?.span.clone();
        self.expect(&TokenKind::KwFunction)?;
        let name = self.ident()?;
        self.expect(&TokenKind::LParen)?;
        let mut params = Vec::new();
        if self.eat(&TokenKind::RParen).is_none() {
            loop {
                params.push(self.ident()?);
                if self.eat(&TokenKind::Comma).is_none() {
                    break;
                }
            }
            self.expect(&TokenKind::RParen)?;
        }
        self.end_of_statement()?;
        let body = self.statements()?;
        if self.peek_kind() != Some(&TokenKind::KwEnd) {
            return Err(self.unexpected("`end function`"));
        }
        let end_line = self.bump().unwrap().span.line;
        if self.eat(&TokenKind::KwFunction).is_some() {
            if let Some(TokenKind::Ident(closing)) = self.peek_kind() {
                if *closing != name.name {
                    return Err(self.unexpected(&format!("`{}`", name.name)));
                }
                self.bump();
            }
        }
        self.end_of_statement()?;
        Ok(FuncDef {
            name,
            params,
            body,
            span,
            end_line,
        })
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = match self.peek_kind() {
            Some(TokenKind::Minus) => {
                let start = self.bump().unwrap().span.clone();
                let operand = self.term()?;
                Expr::Neg {
                    span: start.to(operand.span()),
                    operand: Box::new(operand),
                }
            }
            Some(TokenKind::Plus) => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Plus) => BinOp::Add,
                Some(TokenKind::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Star) => BinOp::Mul,
                Some(TokenKind::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.primary()?;
        if self.eat(&TokenKind::Power).is_none() {
            return Ok(base);
        }
        let exponent = match self.peek_kind() {
            Some(TokenKind::Minus) => {
                let start = self.bump().unwrap().span.clone();
                let operand = self.factor()?;
                Expr::Neg {
                    span: start.to(operand.span()),
                    operand: Box::new(operand),
                }
            }
            Some(TokenKind::Plus) => {
                self.bump();
                self.factor()?
            }
            _ => self.factor()?,
        };
        Ok(Expr::Pow {
            span: base.span().to(exponent.span()),
            base: Box::new(base),
            exponent: Box::new(exponent),
        })
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek_kind() {
            Some(TokenKind::Number(text)) => {
                let span = self.bump().unwrap().span.clone();
                Ok(Expr::Num {
                    text: text.clone(),
                    span,
                })
            }
            Some(TokenKind::Ident(_)) => {
                let id = self.ident()?;
                if self.eat(&TokenKind::LParen).is_none() {
                    return Ok(Expr::Var(id));
                }
                let mut args = Vec::new();
                let close = match self.eat(&TokenKind::RParen) {
                    Some(t) => t,
                    None => {
                        loop {
                            args.push(self.expr()?);
                            if self.eat(&TokenKind::Comma).is_none() {
                                break;
                            }
                        }
                        self.expect(&TokenKind::RParen)?
                    }
                };
                Ok(Expr::Call {
                    span: id.span.to(&close.span),
                    callee: id,
                    args,
                })
            }
            Some(TokenKind::LParen) => {
                self.bump();
                let inner = self.expr()?;
                self.expect(&TokenKind::RParen)?;
                Ok(inner)
            }
            _ => Err(self.unexpected("expression")),
        }
    }

    fn unit(&mut self) -> Result<UnitExpr, SyntaxError> {
        let mut lhs = self.unit_term()?;
        loop {
            if self.eat(&TokenKind::Star).is_some() {
                lhs = UnitExpr::Mul(Box::new(lhs), Box::new(self.unit_term()?));
            } else if self.eat(&TokenKind::Slash).is_some() {
                lhs = UnitExpr::Div(Box::new(lhs), Box::new(self.unit_term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unit_term(&mut self) -> Result<UnitExpr, SyntaxError> {
        let atom = self.unit_atom()?;
        if self.eat(&TokenKind::Power).is_none() {
            return Ok(atom);
        }
        let exponent = if self.eat(&TokenKind::LParen).is_some() {
            let numer = self.signed_int()?;
            let denom = if self.eat(&TokenKind::Slash).is_some() {
                self.signed_int()?
            } else {
                BigInt::from(1)
            };
            let close = self.expect(&TokenKind::RParen)?;
            Rational::from_bigints(numer, denom).map_err(|_| SyntaxError::Parse {
                span: close.span.clone(),
                expected: "non-zero denominator".into(),
                found: "0".into(),
            })?
        } else {
            let n = self.signed_int()?;
            Rational::from_bigints(n, BigInt::from(1)).expect("unit denominator")
        };
        Ok(UnitExpr::Pow(Box::new(atom), exponent))
    }

    fn signed_int(&mut self) -> Result<BigInt, SyntaxError> {
        let negative = self.eat(&TokenKind::Minus).is_some();
        match self.peek_kind() {
            Some(TokenKind::Number(text)) if text.bytes().all(|b| b.is_ascii_digit()) => {
                let n: BigInt = text.parse().expect("digits");
                self.bump();
                Ok(if negative { -n } else { n })
            }
            _ => Err(self.unexpected("integer exponent")),
        }
    }

    fn unit_atom(&mut self) -> Result<UnitExpr, SyntaxError> {
        match self.peek_kind() {
            Some(TokenKind::Ident(name)) => {
                self.bump();
                Ok(UnitExpr::Base(name.clone()))
            }
            Some(TokenKind::UnitVar(name)) => {
                self.bump();
                Ok(UnitExpr::Var(name.clone()))
            }
            Some(TokenKind::Number(text)) if text == "1" => {
                self.bump();
                Ok(UnitExpr::One)
            }
            Some(TokenKind::LParen) => {
                self.bump();
                let inner = self.unit()?;
                self.expect(&TokenKind::RParen)?;
                Ok(inner)
            }
            _ => Err(self.unexpected("unit")),
        }
    }
}

fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
    Expr::Binary {
        op,
        span: lhs.span().to(rhs.span()),
        lhs: Box::new(lhs),
        rhs: Box::new(rhs),
    }
}

/// Check that every name refers to something declared in its scope.
fn resolve(program: &Program) -> Result<(), SyntaxError> {
    let mut function_names = BTreeSet::new();
    for f in &program.functions {
        if !function_names.insert(f.name.name.as_str()) {
            return Err(dup(&f.name));
        }
    }

    let mut main = BTreeSet::new();
    for (_, item) in program.main_decls() {
        if function_names.contains(item.name.name.as_str()) || !main.insert(item.name.name.as_str())
        {
            return Err(dup(&item.name));
        }
    }
    check_stmts(&program.statements, &main)?;

    for a in &program.function_annotations {
        for n in &a.names {
            if !function_names.contains(n.name.as_str()) {
                return Err(unresolved(n));
            }
        }
    }

    for f in &program.functions {
        let mut scope = BTreeSet::new();
        scope.insert(f.name.name.as_str());
        for p in &f.params {
            if !scope.insert(p.name.as_str()) {
                return Err(dup(p));
            }
        }
        let params: BTreeSet<&str> = f.params.iter().map(|p| p.name.as_str()).collect();
        let mut declared = BTreeSet::new();
        for (_, item) in decls_of(&f.body) {
            let name = item.name.name.as_str();
            if !declared.insert(name) || name == f.name.name {
                return Err(dup(&item.name));
            }
            if !params.contains(name) {
                scope.insert(name);
            }
        }
        check_stmts(&f.body, &scope)?;
        let assigns_result = f
            .body
            .iter()
            .any(|s| matches!(s, Stmt::Assign(a) if a.target.name == f.name.name));
        if !assigns_result {
            return Err(SyntaxError::MissingResult {
                span: f.name.span.clone(),
                function: f.name.name.clone(),
            });
        }
    }
    Ok(())
}

fn check_stmts(stmts: &[Stmt], scope: &BTreeSet<&str>) -> Result<(), SyntaxError> {
    for stmt in stmts {
        match stmt {
            Stmt::Decl(d) => {
                for item in &d.items {
                    if let Some(init) = &item.init {
                        check_expr(init, scope)?;
                    }
                }
            }
            Stmt::Annotation(a) => {
                for n in &a.names {
                    if !scope.contains(n.name.as_str()) {
                        return Err(unresolved(n));
                    }
                }
            }
            Stmt::Assign(a) => {
                if !scope.contains(a.target.name.as_str()) {
                    return Err(unresolved(&a.target));
                }
                check_expr(&a.value, scope)?;
            }
        }
    }
    Ok(())
}

fn check_expr(expr: &Expr, scope: &BTreeSet<&str>) -> Result<(), SyntaxError> {
    match expr {
        Expr::Num { .. } => Ok(()),
        Expr::Var(id) if scope.contains(id.name.as_str()) => Ok(()),
        Expr::Var(id) => Err(unresolved(id)),
        Expr::Neg { operand, .. } => check_expr(operand, scope),
        Expr::Binary { lhs, rhs, .. } => {
            check_expr(lhs, scope)?;
            check_expr(rhs, scope)
        }
        Expr::Pow { base, exponent, .. } => {
            check_expr(base, scope)?;
            check_expr(exponent, scope)
        }
        Expr::Call { args, .. } => args.iter().try_for_each(|a| check_expr(a, scope)),
    }
}

fn dup(id: &Ident) -> SyntaxError {
    SyntaxError::DuplicateName {
        span: id.span.clone(),
        name: id.name.clone(),
    }
}

fn unresolved(id: &Ident) -> SyntaxError {
    SyntaxError::UnresolvedName {
        span: id.span.clone(),
        name: id.name.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexer::tokenize;

    pub(crate) const SAMPLE: &str = "  real :: a, b
  real :: x = 20.0
  real :: t = 3.0
  a = sqr(x)
  b = sqr(t)

  contains
  real function sqr(y)
    real :: y
    sqr = y * y
  end function
";

    #[test]
    fn sample_program_shape() {
        let p = parse_source(SAMPLE, "sample.f90").unwrap();
        let decls = p
            .statements
            .iter()
            .filter(|s| matches!(s, Stmt::Decl(_)))
            .count();
        let assigns = p
            .statements
            .iter()
            .filter(|s| matches!(s, Stmt::Assign(_)))
            .count();
        assert_eq!((decls, assigns), (3, 2));
        assert_eq!(p.functions.len(), 1);
        let sqr = &p.functions[0];
        assert_eq!(sqr.name.name, "sqr");
        assert_eq!(sqr.params.len(), 1);
        assert_eq!(sqr.params[0].name, "y");
        assert_eq!(p.source_lines.len(), 11);
    }

    #[test]
    fn declaration_spans() {
        let p = parse_source(SAMPLE, "sample.f90").unwrap();
        let spans: Vec<_> = p
            .main_decls()
            .map(|(_, i)| (i.name.name.clone(), i.name.span.line, i.name.span.column))
            .collect();
        assert_eq!(
            spans,
            vec![
                ("a".into(), 1, 11),
                ("b".into(), 1, 14),
                ("x".into(), 2, 11),
                ("t".into(), 3, 11)
            ]
        );
    }

    #[test]
    fn empty_file() {
        let p = parse_source("", "e.f90").unwrap();
        assert!(p.statements.is_empty());
        assert!(p.functions.is_empty());
    }

    #[test]
    fn undeclared_identifier() {
        let err = parse_source("real :: x\nx = y", "u.f90").unwrap_err();
        match err {
            SyntaxError::UnresolvedName { span, name } => {
                assert_eq!(name, "y");
                assert_eq!((span.line, span.column), (2, 5));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn annotation_names_must_resolve() {
        let err = parse_source("!= unit(m) :: q\nreal :: x", "u.f90").unwrap_err();
        assert!(matches!(err, SyntaxError::UnresolvedName { name, .. } if name == "q"));
    }

    #[test]
    fn duplicate_declaration() {
        let err = parse_source("real :: x\nreal :: x", "d.f90").unwrap_err();
        assert!(matches!(err, SyntaxError::DuplicateName { .. }));
    }

    #[test]
    fn function_without_result_assignment() {
        let src = "real :: a\ncontains\nreal function f(p)\nreal :: p\nend function\n";
        let err = parse_source(src, "f.f90").unwrap_err();
        assert!(matches!(err, SyntaxError::MissingResult { .. }));
    }

    #[test]
    fn host_variables_are_not_visible_in_functions() {
        let src = "real :: g\ncontains\nreal function f(p)\nf = p * g\nend function\n";
        let err = parse_source(src, "f.f90").unwrap_err();
        assert!(matches!(err, SyntaxError::UnresolvedName { name, .. } if name == "g"));
    }

    #[test]
    fn unit_annotation_forms() {
        let toks = tokenize("!= unit(m**2) :: a").unwrap();
        let a = parse_unit_expr(&toks).unwrap();
        assert_eq!(
            a.unit,
            UnitExpr::Pow(Box::new(UnitExpr::Base("m".into())), Rational::integer(2))
        );
        assert_eq!(a.names[0].name, "a");

        let toks = tokenize("!= unit(1) :: k").unwrap();
        assert_eq!(parse_unit_expr(&toks).unwrap().unit, UnitExpr::One);

        let toks = tokenize("!= unit(m / s**2) :: g").unwrap();
        assert_eq!(
            parse_unit_expr(&toks).unwrap().unit,
            UnitExpr::Div(
                Box::new(UnitExpr::Base("m".into())),
                Box::new(UnitExpr::Pow(
                    Box::new(UnitExpr::Base("s".into())),
                    Rational::integer(2)
                ))
            )
        );

        let toks = tokenize("!= unit(('a)**2) :: sqr").unwrap();
        assert_eq!(
            parse_unit_expr(&toks).unwrap().unit,
            UnitExpr::Pow(Box::new(UnitExpr::Var("a".into())), Rational::integer(2))
        );
    }

    #[test]
    fn malformed_units() {
        for bad in ["m**x", "(m", "m**(1/0)", "m**", "m s", "2"] {
            assert!(parse_unit_str(bad).is_err(), "{bad} should fail");
        }
        assert_eq!(
            parse_unit_str("m**(-1/2)").unwrap(),
            UnitExpr::Pow(
                Box::new(UnitExpr::Base("m".into())),
                Rational::new(-1, 2).unwrap()
            )
        );
    }

    #[test]
    fn expression_precedence_and_spans() {
        let p = parse_source("real :: a, b, c\na = b + c * b ** 2\n", "e.f90").unwrap();
        let Stmt::Assign(assign) = &p.statements[1] else {
            panic!()
        };
        let Expr::Binary { op, rhs, span, .. } = &assign.value else {
            panic!()
        };
        assert_eq!(*op, BinOp::Add);
        assert_eq!((span.column, span.length), (5, 14));
        let Expr::Binary { op, rhs, .. } = &**rhs else {
            panic!()
        };
        assert_eq!(*op, BinOp::Mul);
        assert!(
            matches!(&**rhs, Expr::Pow { exponent, .. } if exponent.as_integer_literal() == Some(2))
        );
    }

    #[test]
    fn parse_is_deterministic() {
        let a = parse_source(SAMPLE, "sample.f90").unwrap();
        let b = parse_source(SAMPLE, "sample.f90").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn stray_tokens_report_position() {
        let err = parse_source("real :: x y\n", "p.f90").unwrap_err();
        match err {
            SyntaxError::Parse { span, expected, .. } => {
                assert_eq!((span.line, span.column), (1, 11));
                assert_eq!(expected, "end of line");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn function_annotations_and_end_name() {
        let src = "contains\n!= unit(('a)**2) :: sqr\nreal function sqr(y)\nsqr = y*y\nend function sqr\n";
        let p = parse_source(src, "f.f90").unwrap();
        assert_eq!(p.function_annotations.len(), 1);
        assert!(parse_source(
            &src.replace("end function sqr", "end function other"),
            "f.f90"
        )
        .is_err());
    }
}
