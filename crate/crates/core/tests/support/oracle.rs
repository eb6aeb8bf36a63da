//! Reference implementations the solver is checked against. Nothing here
//! calls the elimination code under test.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use unitscheck_core::constraints::{Constraint, Provenance, Reason, UnknownId};
use unitscheck_core::solver::{AugMatrix, MatrixRow};
use unitscheck_core::units::{Dim, UnitNorm};
use unitscheck_core::{Rational, Span};

/// A small rational as `(numerator, denominator)` with a positive denominator.
pub type Frac = (i64, i64);

#[derive(Debug, Clone)]
pub struct RawMatrix {
    pub ncoef: usize,
    pub nrhs: usize,
    /// Each row holds `ncoef + nrhs` entries.
    pub rows: Vec<Vec<Frac>>,
}

fn entry() -> impl Strategy<Value = Frac> {
    prop_oneof![
        3 => Just((0, 1)),
        4 => (-5i64..=5, 1i64..=4),
    ]
}

/// Matrices up to 8x8, mixing random rows with combinations of earlier rows
/// so that rank deficiency is common.
pub fn raw_matrix() -> impl Strategy<Value = RawMatrix> {
    (1usize..=8, 0usize..=2, 1usize..=8)
        .prop_flat_map(|(total, nrhs, nrows)| {
            let nrhs = nrhs.min(total - 1);
            let width = total;
            (
                Just(total - nrhs),
                Just(nrhs),
                proptest::collection::vec(proptest::collection::vec(entry(), width), nrows),
                proptest::collection::vec(
                    (any::<bool>(), 0usize..8, 0usize..8, -3i64..=3, -3i64..=3),
                    nrows,
                ),
            )
        })
        .prop_map(|(ncoef, nrhs, mut rows, mixes)| {
            for (i, (mix, a, b, ka, kb)) in mixes.into_iter().enumerate() {
                if mix && i >= 1 {
                    let (a, b) = (a % i, b % i);
                    let combined = (0..rows[i].len())
                        .map(|c| {
                            frac_add(frac_mul(rows[a][c], (ka, 1)), frac_mul(rows[b][c], (kb, 1)))
                        })
                        .collect();
                    rows[i] = combined;
                }
            }
            RawMatrix { ncoef, nrhs, rows }
        })
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn frac_norm((n, d): Frac) -> Frac {
    let g = gcd(n, d).max(1);
    let s = if d < 0 { -1 } else { 1 };
    (s * n / g, s * d / g)
}

fn frac_add(a: Frac, b: Frac) -> Frac {
    frac_norm((a.0 * b.1 + b.0 * a.1, a.1 * b.1))
}

fn frac_mul(a: Frac, b: Frac) -> Frac {
    frac_norm((a.0 * b.0, a.1 * b.1))
}

pub fn to_rational((n, d): Frac) -> Rational {
    Rational::new(n, d).expect("positive denominator")
}

pub fn dim(i: usize) -> Dim {
    Dim::Base(format!("d{i}"))
}

pub fn to_aug(m: &RawMatrix) -> AugMatrix {
    AugMatrix {
        rows: m
            .rows
            .iter()
            .map(|r| MatrixRow {
                coeffs: r[..m.ncoef].iter().copied().map(to_rational).collect(),
                rhs: r[m.ncoef..].iter().copied().map(to_rational).collect(),
                provenance: BTreeSet::new(),
            })
            .collect(),
        cols: (0..m.ncoef).map(UnknownId).collect(),
        dims: (0..m.nrhs).map(dim).collect(),
    }
}

/// Coefficients and right-hand sides only; provenance is order dependent.
pub fn numbers(m: &AugMatrix) -> Vec<(Vec<Rational>, Vec<Rational>)> {
    m.rows
        .iter()
        .map(|r| (r.coeffs.clone(), r.rhs.clone()))
        .collect()
}

/// Rank by fraction-free (Bareiss) elimination over the integers. Each row
/// is first scaled by the lcm of its denominators.
pub fn bareiss_rank(rows: &[Vec<Frac>], cols: std::ops::Range<usize>) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let scale = r[cols.clone()]
                .iter()
                .fold(1i64, |l, &(_, d)| l / gcd(l, d) * d);
            r[cols.clone()]
                .iter()
                .map(|&(n, d)| BigInt::from(n * (scale / d)))
                .collect()
        })
        .collect();
    let ncols = cols.len();
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for c in 0..ncols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..a.len() {
            for k in c + 1..ncols {
                let num = &a[r][k] * &a[rank][c] - &a[r][c] * &a[rank][k];
                a[r][k] = num / &prev;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

/// A linear system over unit exponents: `sum coeff_j * u_j = rhs` per row.
#[derive(Debug, Clone)]
pub struct RawSystem {
    pub unknowns: usize,
    pub dims: usize,
    pub rows: Vec<(Vec<i64>, Vec<i64>)>,
    /// Whether the right-hand sides were computed from a known solution.
    pub planted: bool,
}

/// Up to 5 unknowns and 2 base units, coefficients in [-3, 3]. Half the
/// systems have right-hand sides computed from an integer solution in
/// [-6, 6], so they are consistent by construction.
pub fn raw_system() -> impl Strategy<Value = RawSystem> {
    (1usize..=5, 1usize..=2, 1usize..=6, any::<bool>())
        .prop_flat_map(|(n, d, m, planted)| {
            (
                Just(n),
                Just(d),
                proptest::collection::vec(proptest::collection::vec(-3i64..=3, n), m),
                proptest::collection::vec(proptest::collection::vec(-3i64..=3, d), m),
                proptest::collection::vec(proptest::collection::vec(-6i64..=6, d), n),
                Just(planted),
            )
        })
        .prop_map(|(n, d, coeffs, rhs, solution, planted)| {
            let rows = coeffs
                .into_iter()
                .zip(rhs)
                .map(|(c, r)| {
                    let r = if planted {
                        (0..d)
                            .map(|k| (0..n).map(|j| c[j] * solution[j][k]).sum())
                            .collect()
                    } else {
                        r
                    };
                    (c, r)
                })
                .collect();
            RawSystem {
                unknowns: n,
                dims: d,
                rows,
                planted,
            }
        })
}

pub fn to_constraints(s: &RawSystem) -> Vec<Constraint> {
    let file: Arc<str> = Arc::from("<generated>");
    s.rows
        .iter()
        .enumerate()
        .map(|(i, (c, r))| Constraint {
            terms: c
                .iter()
                .enumerate()
                .filter(|(_, k)| **k != 0)
                .map(|(j, k)| (UnknownId(j), Rational::integer(*k)))
                .collect(),
            rhs: UnitNorm::from_factors(
                r.iter()
                    .enumerate()
                    .map(|(k, e)| (dim(k), Rational::integer(*e))),
            ),
            provenance: Provenance {
                span: Span::new(file.clone(), i + 1, 1, 1),
                reason: Reason::Assignment,
            },
        })
        .collect()
}

/// Whether `coeffs . x = rhs` has an integer solution with every entry in
/// [-6, 6], checked one base unit at a time by exhaustive search over all
/// but the last unknown.
pub fn brute_force_solvable(s: &RawSystem) -> bool {
    (0..s.dims).all(|k| {
        let rows: Vec<(&[i64], i64)> = s.rows.iter().map(|(c, r)| (c.as_slice(), r[k])).collect();
        search(&rows, s.unknowns, &mut Vec::new())
    })
}

fn search(rows: &[(&[i64], i64)], n: usize, prefix: &mut Vec<i64>) -> bool {
    if prefix.len() + 1 < n {
        for v in -6..=6 {
            prefix.push(v);
            let found = search(rows, n, prefix);
            prefix.pop();
            if found {
                return true;
            }
        }
        return false;
    }
    let last = n - 1;
    let partial = |c: &[i64]| -> i64 { prefix.iter().zip(c).map(|(x, k)| x * k).sum() };
    let candidate = rows
        .iter()
        .find(|(c, _)| c[last] != 0)
        .map(|(c, r)| (r - partial(c), c[last]));
    let x = match candidate {
        None => 0,
        Some((num, den)) if num % den == 0 && (-6..=6).contains(&(num / den)) => num / den,
        Some(_) => return false,
    };
    rows.iter().all(|(c, r)| partial(c) + c[last] * x == *r)
}

/// The unit `sum coeff_j * u_j` for concrete `u`.
pub fn combine(
    terms: &BTreeMap<UnknownId, Rational>,
    units: &BTreeMap<UnknownId, UnitNorm>,
) -> UnitNorm {
    terms
        .iter()
        .fold(UnitNorm::one(), |acc, (id, k)| acc.mul(&units[id].pow(k)))
}

/// A matrix together with a permutation of its rows.
pub fn matrix_and_permutation() -> impl Strategy<Value = (RawMatrix, Vec<usize>)> {
    raw_matrix().prop_flat_map(|m| {
        let n = m.rows.len();
        (Just(m), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

/// Reduced form, idempotence, row-permutation canonicity and rank.
pub fn check_rref(m: &RawMatrix, perm: &[usize]) -> Result<(), TestCaseError> {
    use unitscheck_core::solver::rref;

    let r = rref(to_aug(m));
    let reduced = &r.matrix;

    // leading ones, strictly increasing, zero elsewhere in their columns
    let mut last_lead = None;
    let mut seen_zero_row = false;
    for (i, row) in reduced.rows.iter().enumerate() {
        let lead = row.coeffs.iter().chain(&row.rhs).position(|x| !x.is_zero());
        match lead {
            None => seen_zero_row = true,
            Some(c) => {
                prop_assert!(!seen_zero_row, "non-zero row below a zero row");
                prop_assert!(last_lead.is_none_or(|l| c > l));
                last_lead = Some(c);
                let at = |row: &MatrixRow| {
                    if c < m.ncoef {
                        row.coeffs[c].clone()
                    } else {
                        row.rhs[c - m.ncoef].clone()
                    }
                };
                prop_assert!(at(row).is_one());
                for (j, other) in reduced.rows.iter().enumerate() {
                    if j != i {
                        prop_assert!(at(other).is_zero());
                    }
                }
            }
        }
    }

    let again = rref(reduced.clone());
    prop_assert_eq!(numbers(&again.matrix), numbers(reduced));

    let mut permuted = m.clone();
    permuted.rows = perm.iter().map(|&i| m.rows[i].clone()).collect();
    prop_assert_eq!(numbers(&rref(to_aug(&permuted)).matrix), numbers(reduced));

    prop_assert_eq!(r.rank(), bareiss_rank(&m.rows, 0..m.ncoef));
    prop_assert_eq!(r.rank() + r.free_cols.len(), m.ncoef);
    Ok(())
}

/// Solver verdicts against substitution and brute force. Returns whether
/// the system was judged consistent.
pub fn check_system(s: &RawSystem) -> Result<bool, TestCaseError> {
    use unitscheck_core::solver::{classify, rref, SolveOutcome};

    let constraints = to_constraints(s);
    let cols: Vec<UnknownId> = (0..s.unknowns).map(UnknownId).collect();
    let outcome = classify(&rref(AugMatrix::from_constraints(
        &constraints,
        cols.clone(),
    )));
    match outcome {
        SolveOutcome::Consistent(sol) => {
            // free unknowns get units over fresh symbols, so no accidental cancellation
            let free: BTreeMap<UnknownId, UnitNorm> = sol
                .free
                .iter()
                .enumerate()
                .map(|(i, id)| {
                    (
                        *id,
                        UnitNorm::base(format!("f{i}"))
                            .mul(&UnitNorm::base("d0").pow(&Rational::integer(i as i64 + 2))),
                    )
                })
                .collect();
            let units: BTreeMap<UnknownId, UnitNorm> = cols
                .iter()
                .map(|id| {
                    (
                        *id,
                        sol.assignments[id]
                            .evaluate(&free)
                            .expect("depends only on free unknowns"),
                    )
                })
                .collect();
            for c in &constraints {
                prop_assert_eq!(combine(&c.terms, &units), c.rhs.clone());
            }
            Ok(true)
        }
        SolveOutcome::Inconsistent(conflicts) => {
            prop_assert!(!s.planted, "planted system judged inconsistent");
            prop_assert!(!conflicts.is_empty());
            for c in &conflicts {
                prop_assert!(!c.residual.is_one());
            }
            prop_assert!(!brute_force_solvable(s), "brute force found a solution");
            Ok(false)
        }
    }
}
