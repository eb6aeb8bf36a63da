//! Exact Gauss-Jordan elimination over unit constraints.
//!
//! A constraint system becomes an augmented matrix: one column per unknown,
//! one right-hand-side column per generator (base unit or rigid unit
//! variable). The reduced row-echelon form tells us which unknowns are
//! determined (pivot columns) and which are free. Column order matters: it
//! decides which of several equally small free sets is reported, so the
//! unknowns a user can annotate are placed rightmost.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::ast::Scope;
use crate::constraints::{
    Constraint, ConstraintSet, FunctionTemplate, Provenance, UnknownId, UnknownKind,
};
use crate::error::Error;
use crate::rational::Rational;
use crate::span::Span;
use crate::units::{Dim, UnitNorm};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixRow {
    pub coeffs: Vec<Rational>,
    pub rhs: Vec<Rational>,
    pub provenance: BTreeSet<Provenance>,
}

impl MatrixRow {
    fn coeffs_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    fn rhs_zero(&self) -> bool {
        self.rhs.iter().all(Rational::is_zero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugMatrix {
    pub rows: Vec<MatrixRow>,
    /// Unknown for each coefficient column.
    pub cols: Vec<UnknownId>,
    /// Generator for each right-hand-side column.
    pub dims: Vec<Dim>,
}

impl AugMatrix {
    /// Encode `constraints` over the given column order. Right-hand-side
    /// columns are every generator mentioned, in [`Dim`] order.
    pub fn from_constraints(constraints: &[Constraint], cols: Vec<UnknownId>) -> Self {
        let col_index: BTreeMap<UnknownId, usize> =
            cols.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let dims: Vec<Dim> = constraints
            .iter()
            .flat_map(|c| c.rhs.dims().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let rows = constraints
            .iter()
            .map(|c| {
                let mut coeffs = alloc::vec![Rational::zero(); cols.len()];
                for (id, k) in &c.terms {
                    coeffs[col_index[id]] = k.clone();
                }
                let rhs = dims.iter().map(|d| c.rhs.exponent(d)).collect();
                MatrixRow {
                    coeffs,
                    rhs,
                    provenance: BTreeSet::from([c.provenance.clone()]),
                }
            })
            .collect();
        AugMatrix { rows, cols, dims }
    }

    pub fn rhs_unit(&self, row: usize) -> UnitNorm {
        UnitNorm::from_factors(
            self.dims
                .iter()
                .cloned()
                .zip(self.rows[row].rhs.iter().cloned()),
        )
    }
}

/// Main-system column order: literals, then call-site copies, then declared
/// variables in declaration order.
pub fn main_column_order(cs: &ConstraintSet) -> Vec<UnknownId> {
    let mut literals = Vec::new();
    let mut copies = Vec::new();
    for u in cs.main_unknowns() {
        match u.kind {
            UnknownKind::LiteralUnit { .. } => literals.push(u.id),
            UnknownKind::Instantiated { .. } => copies.push(u.id),
            _ => {}
        }
    }
    literals.extend(copies);
    literals.extend(cs.main_vars.iter().copied());
    literals
}

/// Template column order: literals, call-site copies, declared locals, the
/// result, then parameters in order.
pub fn template_column_order(cs: &ConstraintSet, t: &FunctionTemplate) -> Vec<UnknownId> {
    let mut literals = Vec::new();
    let mut copies = Vec::new();
    for &id in &t.unknowns {
        match cs.unknown(id).kind {
            UnknownKind::LiteralUnit { .. } => literals.push(id),
            UnknownKind::Instantiated { .. } => copies.push(id),
            _ => {}
        }
    }
    literals.extend(copies);
    literals.extend(t.locals.iter().copied());
    literals.push(t.result);
    literals.extend(t.params.iter().copied());
    literals
}

/// Matrix for the main-scope constraints.
pub fn build_matrix(cs: &ConstraintSet) -> AugMatrix {
    AugMatrix::from_constraints(&cs.constraints, main_column_order(cs))
}

pub fn build_template_matrix(cs: &ConstraintSet, t: &FunctionTemplate) -> AugMatrix {
    AugMatrix::from_constraints(&t.body, template_column_order(cs, t))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RrefResult {
    pub matrix: AugMatrix,
    /// Pivot column to row index.
    pub pivots: BTreeMap<usize, usize>,
    pub free_cols: Vec<usize>,
    /// Rows reading `0 = non-trivial unit`.
    pub inconsistent_rows: Vec<usize>,
}

impl RrefResult {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Reduce to reduced row-echelon form.
///
/// Columns are scanned left to right; the pivot is the first unused row
/// with a non-zero entry. After the coefficient columns the right-hand-side
/// columns are reduced the same way, so the whole augmented matrix is in
/// canonical form. Combining rows unions their provenance.
pub fn rref(mut m: AugMatrix) -> RrefResult {
    let ncoef = m.cols.len();
    let total = ncoef + m.dims.len();
    let mut pivots = BTreeMap::new();
    let mut next = 0;
    for col in 0..total {
        if next == m.rows.len() {
            break;
        }
        let entry = |row: &MatrixRow| -> Rational {
            if col < ncoef {
                row.coeffs[col].clone()
            } else {
                row.rhs[col - ncoef].clone()
            }
        };
        let Some(found) = (next..m.rows.len()).find(|&r| !entry(&m.rows[r]).is_zero()) else {
            continue;
        };
        m.rows.swap(next, found);
        let scale = entry(&m.rows[next]).inv().expect("pivot is non-zero");
        scale_row(&mut m.rows[next], &scale);
        for r in 0..m.rows.len() {
            if r == next {
                continue;
            }
            let factor = entry(&m.rows[r]);
            if factor.is_zero() {
                continue;
            }
            let (pivot_row, target) = pick_two(&mut m.rows, next, r);
            subtract_scaled(target, pivot_row, &factor);
        }
        if col < ncoef {
            pivots.insert(col, next);
        }
        next += 1;
    }

    let free_cols = (0..ncoef).filter(|c| !pivots.contains_key(c)).collect();
    let inconsistent_rows = m
        .rows
        .iter()
        .enumerate()
        .filter(|(_, row)| row.coeffs_zero() && !row.rhs_zero())
        .map(|(i, _)| i)
        .collect();
    RrefResult {
        matrix: m,
        pivots,
        free_cols,
        inconsistent_rows,
    }
}

fn scale_row(row: &mut MatrixRow, k: &Rational) {
    for x in row.coeffs.iter_mut().chain(row.rhs.iter_mut()) {
        *x = &*x * k;
    }
}

fn subtract_scaled(target: &mut MatrixRow, pivot: &MatrixRow, k: &Rational) {
    for (t, p) in target.coeffs.iter_mut().zip(&pivot.coeffs) {
        if !p.is_zero() {
            *t = &*t - &(p * k);
        }
    }
    for (t, p) in target.rhs.iter_mut().zip(&pivot.rhs) {
        if !p.is_zero() {
            *t = &*t - &(p * k);
        }
    }
    target.provenance.extend(pivot.provenance.iter().cloned());
}

fn pick_two(rows: &mut [MatrixRow], a: usize, b: usize) -> (&MatrixRow, &mut MatrixRow) {
    if a < b {
        let (lo, hi) = rows.split_at_mut(b);
        (&lo[a], &mut hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(a);
        (&hi[0], &mut lo[b])
    }
}

/// A solved unit: a fixed part plus powers of free unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicUnit {
    pub ground: UnitNorm,
    pub free_terms: BTreeMap<UnknownId, Rational>,
}

impl SymbolicUnit {
    pub fn is_determined(&self) -> bool {
        self.free_terms.is_empty()
    }

    /// Substitute units for free unknowns; `None` if one is missing.
    pub fn evaluate(&self, free: &BTreeMap<UnknownId, UnitNorm>) -> Option<UnitNorm> {
        let mut out = self.ground.clone();
        for (id, k) in &self.free_terms {
            out = out.mul(&free.get(id)?.pow(k));
        }
        Some(out)
    }
}

/// A set of rows that combine to `0 = residual`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub residual: UnitNorm,
    pub provenance: Vec<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub assignments: BTreeMap<UnknownId, SymbolicUnit>,
    pub free: Vec<UnknownId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Inconsistent(Vec<Conflict>),
    Consistent(Solution),
}

impl SolveOutcome {
    pub fn is_consistent(&self) -> bool {
        matches!(self, SolveOutcome::Consistent(_))
    }
}

/// Read the solution (or the contradictions) off a reduced matrix.
pub fn classify(r: &RrefResult) -> SolveOutcome {
    let m = &r.matrix;
    if !r.inconsistent_rows.is_empty() {
        let conflicts = r
            .inconsistent_rows
            .iter()
            .map(|&i| Conflict {
                residual: m.rhs_unit(i),
                provenance: m.rows[i].provenance.iter().cloned().collect(),
            })
            .collect();
        return SolveOutcome::Inconsistent(conflicts);
    }
    let free: Vec<UnknownId> = r.free_cols.iter().map(|&c| m.cols[c]).collect();
    let mut assignments = BTreeMap::new();
    for &id in &free {
        assignments.insert(
            id,
            SymbolicUnit {
                ground: UnitNorm::one(),
                free_terms: BTreeMap::from([(id, Rational::one())]),
            },
        );
    }
    for (&col, &row) in &r.pivots {
        let free_terms = r
            .free_cols
            .iter()
            .filter(|&&f| !m.rows[row].coeffs[f].is_zero())
            .map(|&f| (m.cols[f], -&m.rows[row].coeffs[f]))
            .collect();
        assignments.insert(
            m.cols[col],
            SymbolicUnit {
                ground: m.rhs_unit(row),
                free_terms,
            },
        );
    }
    SolveOutcome::Consistent(Solution { assignments, free })
}

/// Solve the main-scope system.
pub fn solve_main(cs: &ConstraintSet) -> SolveOutcome {
    classify(&rref(build_matrix(cs)))
}

/// A variable the user should annotate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalVar {
    pub name: String,
    pub span: Span,
    pub scope: Scope,
}

/// Main-scope declared variables left free, alphabetically.
pub fn critical_variables(
    outcome: &SolveOutcome,
    cs: &ConstraintSet,
) -> Result<Vec<CriticalVar>, Error> {
    let SolveOutcome::Consistent(sol) = outcome else {
        return Err(Error::CalledOnInconsistent);
    };
    let mut out: Vec<CriticalVar> = sol
        .free
        .iter()
        .filter_map(|&id| declared_var(cs, id))
        .collect();
    sort_critical(&mut out);
    Ok(out)
}

pub(crate) fn sort_critical(vars: &mut [CriticalVar]) {
    vars.sort_by(|a, b| a.name.cmp(&b.name).then_with(|| a.span.cmp(&b.span)));
}

fn declared_var(cs: &ConstraintSet, id: UnknownId) -> Option<CriticalVar> {
    match &cs.unknown(id).kind {
        UnknownKind::DeclaredVar { name, span, scope } => Some(CriticalVar {
            name: name.clone(),
            span: span.clone(),
            scope: scope.clone(),
        }),
        _ => None,
    }
}

/// A function's published specification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateSpec {
    /// Unit of each parameter, over unit variables and base units.
    pub params: Vec<UnitNorm>,
    pub result: UnitNorm,
    /// Declared locals; `None` when a local is not determined by the
    /// parameters.
    pub locals: Vec<(UnknownId, Option<UnitNorm>)>,
    /// Free declared locals.
    pub critical: Vec<CriticalVar>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TemplateOutcome {
    Inconsistent(Vec<Conflict>),
    Consistent(TemplateSpec),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateSolution {
    pub function: String,
    pub outcome: TemplateOutcome,
}

/// Solve each function body on its own, generalizing free parameters (and
/// a free result) to unit variables `'a`, `'b`, ... in parameter order.
pub fn solve_templates(cs: &ConstraintSet) -> Vec<TemplateSolution> {
    cs.templates
        .iter()
        .map(|t| TemplateSolution {
            function: t.name.clone(),
            outcome: solve_template(cs, t),
        })
        .collect()
}

fn solve_template(cs: &ConstraintSet, t: &FunctionTemplate) -> TemplateOutcome {
    let sol = match classify(&rref(build_template_matrix(cs, t))) {
        SolveOutcome::Inconsistent(c) => return TemplateOutcome::Inconsistent(c),
        SolveOutcome::Consistent(sol) => sol,
    };
    let free: BTreeSet<UnknownId> = sol.free.iter().copied().collect();
    let mut names = VarNames::new(&t.unit_vars);
    let mut generalized = BTreeMap::new();
    for &id in t.params.iter().chain(core::iter::once(&t.result)) {
        if free.contains(&id) && !generalized.contains_key(&id) {
            generalized.insert(id, UnitNorm::var(names.next()));
        }
    }
    let unit_of = |id: UnknownId| sol.assignments[&id].evaluate(&generalized);

    let params = t
        .params
        .iter()
        .map(|&p| unit_of(p).expect("parameters depend only on parameters and result"))
        .collect();
    let result = unit_of(t.result).expect("result depends only on parameters");
    let locals = t.locals.iter().map(|&l| (l, unit_of(l))).collect();
    let mut critical: Vec<_> = t
        .locals
        .iter()
        .filter(|l| free.contains(l))
        .filter_map(|&l| declared_var(cs, l))
        .collect();
    sort_critical(&mut critical);
    TemplateOutcome::Consistent(TemplateSpec {
        params,
        result,
        locals,
        critical,
    })
}

/// Fresh unit-variable names `a`, `b`, ..., `z`, `a1`, ... skipping taken ones.
struct VarNames<'a> {
    taken: &'a BTreeSet<String>,
    counter: usize,
}

impl<'a> VarNames<'a> {
    fn new(taken: &'a BTreeSet<String>) -> Self {
        VarNames { taken, counter: 0 }
    }

    fn next(&mut self) -> String {
        loop {
            let letter = (b'a' + (self.counter % 26) as u8) as char;
            let round = self.counter / 26;
            self.counter += 1;
            let name = if round == 0 {
                format!("{letter}")
            } else {
                format!("{letter}{round}")
            };
            if !self.taken.contains(&name) {
                return name;
            }
        }
    }
}
