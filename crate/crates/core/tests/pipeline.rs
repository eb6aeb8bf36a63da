use std::fmt::Write;

use proptest::prelude::*;
use unitscheck_core::ast::{Scope, Stmt};
use unitscheck_core::parser::{parse_source, parse_unit_str};
use unitscheck_core::synth::{plan_annotations, strip_annotations};
use unitscheck_core::units::unit_normalize;
use unitscheck_core::{analyze, Analysis};

#[derive(Debug, Clone)]
enum Rhs {
    Mul(usize, usize),
    Div(usize, usize),
    Add(usize, usize),
    Square(usize),
    Literal,
    ScaledBy(usize),
    Call(usize),
}

#[derive(Debug, Clone)]
struct Program {
    vars: usize,
    annotations: Vec<(usize, &'static str)>,
    assigns: Vec<(usize, Rhs)>,
    with_function: bool,
    indent: usize,
}

fn rhs(n: usize) -> impl Strategy<Value = Rhs> {
    prop_oneof![
        (0..n, 0..n).prop_map(|(a, b)| Rhs::Mul(a, b)),
        (0..n, 0..n).prop_map(|(a, b)| Rhs::Div(a, b)),
        (0..n, 0..n).prop_map(|(a, b)| Rhs::Add(a, b)),
        (0..n).prop_map(Rhs::Square),
        Just(Rhs::Literal),
        (0..n).prop_map(Rhs::ScaledBy),
        (0..n).prop_map(Rhs::Call),
    ]
}

/// Small programs whose annotations use distinct variables, so most are
/// consistent while some still hit conflicts through the equations.
fn program() -> impl Strategy<Value = Program> {
    (2usize..7, any::<bool>(), 0usize..4).prop_flat_map(|(n, with_function, indent)| {
        (
            Just(n),
            proptest::collection::vec(
                (
                    0..n,
                    prop::sample::select(vec!["m", "s", "kg", "m / s", "m**2"]),
                ),
                0..3,
            ),
            proptest::collection::vec((0..n, rhs(n)), 0..6),
            Just(with_function),
            Just(indent),
        )
            .prop_map(|(vars, mut annotations, assigns, with_function, indent)| {
                annotations.sort_by_key(|a| a.0);
                annotations.dedup_by_key(|a| a.0);
                let assigns = assigns
                    .into_iter()
                    .map(|(t, r)| match r {
                        Rhs::Call(a) if !with_function => (t, Rhs::Square(a)),
                        r => (t, r),
                    })
                    .collect();
                Program {
                    vars,
                    annotations,
                    assigns,
                    with_function,
                    indent,
                }
            })
    })
}

fn render(p: &Program) -> String {
    let pad = " ".repeat(p.indent);
    let mut out = String::new();
    for (v, u) in &p.annotations {
        let _ = writeln!(out, "{pad}!= unit({u}) :: v{v}");
    }
    let names: Vec<String> = (0..p.vars).map(|i| format!("v{i}")).collect();
    let _ = writeln!(out, "{pad}real :: {}", names.join(", "));
    for (t, r) in &p.assigns {
        let e = match r {
            Rhs::Mul(a, b) => format!("v{a} * v{b}"),
            Rhs::Div(a, b) => format!("v{a} / v{b}"),
            Rhs::Add(a, b) => format!("v{a} + v{b}"),
            Rhs::Square(a) => format!("v{a}**2"),
            Rhs::Literal => "1.5".into(),
            Rhs::ScaledBy(a) => format!("2.0 * v{a}"),
            Rhs::Call(a) => format!("twice(v{a})"),
        };
        let _ = writeln!(out, "{pad}v{t} = {e}");
    }
    if p.with_function {
        let _ = writeln!(out, "\n{pad}contains\n{pad}real function twice(z)\n{pad}  real :: z\n{pad}  twice = z + z\n{pad}end function");
    }
    out
}

fn consistent(src: &str) -> Option<Analysis> {
    analyze(src, "gen.f90").ok().filter(Analysis::is_consistent)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn identifier_spans_point_at_their_text(p in program()) {
        let src = render(&p);
        let prog = parse_source(&src, "gen.f90").unwrap();
        let lines: Vec<&str> = src.lines().collect();
        let text = |line: usize, col: usize, len: usize| -> String {
            lines[line - 1].chars().skip(col - 1).take(len).collect()
        };
        for s in &prog.statements {
            match s {
                Stmt::Decl(d) => {
                    for item in &d.items {
                        let sp = &item.name.span;
                        prop_assert_eq!(text(sp.line, sp.column, sp.length), item.name.name.clone());
                    }
                }
                Stmt::Assign(a) => {
                    let sp = &a.target.span;
                    prop_assert_eq!(text(sp.line, sp.column, sp.length), a.target.name.clone());
                }
                Stmt::Annotation(_) => {}
            }
        }
    }

    #[test]
    fn synthesis_is_additive_and_idempotent(p in program()) {
        let src = render(&p);
        let Some(a) = consistent(&src) else { return Ok(()); };
        let once = a.synthesize().unwrap().apply();
        prop_assert_eq!(strip_annotations(&once), strip_annotations(&src));
        let b = consistent(&once).expect("synthesized output stays consistent");
        prop_assert_eq!(b.synthesize().unwrap().apply(), once.clone());

        // nothing that was inferred is suggested again
        let inferred: Vec<String> = a.infer_report().unwrap().entries.into_iter().map(|e| e.name).collect();
        for c in b.critical().unwrap() {
            prop_assert!(!inferred.contains(&c.name), "{} suggested after synthesis", c.name);
        }
    }

    #[test]
    fn rendered_units_reparse_exactly(p in program()) {
        let Some(a) = consistent(&render(&p)) else { return Ok(()); };
        for e in a.infer_report().unwrap().entries {
            let parsed = parse_unit_str(&e.rendered).unwrap();
            prop_assert_eq!(unit_normalize(&parsed), e.unit.clone(), "{}", e.rendered);
        }
    }

    #[test]
    fn critical_set_is_sufficient_and_minimal(p in program()) {
        let src = render(&p);
        let Some(a) = consistent(&src) else { return Ok(()); };
        let critical = a.critical().unwrap();
        let prog = parse_source(&src, "gen.f90").unwrap();
        let annotate = |skip: Option<usize>| {
            let requests: Vec<(Scope, String, String)> = critical
                .iter()
                .enumerate()
                .filter(|(i, _)| Some(*i) != skip)
                .map(|(i, c)| (c.scope.clone(), c.name.clone(), format!("q{i}")))
                .collect();
            let text = plan_annotations(&prog, &requests).apply();
            consistent(&text).expect("fresh units on free variables stay consistent")
        };
        prop_assert!(annotate(None).underdetermined().unwrap().is_empty());
        for i in 0..critical.len() {
            prop_assert!(!annotate(Some(i)).underdetermined().unwrap().is_empty());
        }
    }

    #[test]
    fn analysis_is_deterministic(p in program()) {
        let src = render(&p);
        let (Ok(a), Ok(b)) = (analyze(&src, "gen.f90"), analyze(&src, "gen.f90")) else {
            return Ok(());
        };
        prop_assert_eq!(a.check_report(), b.check_report());
        prop_assert_eq!(a.critical().ok(), b.critical().ok());
    }
}
