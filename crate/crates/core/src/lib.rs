//! Units-of-measure analysis for a small Fortran dialect.
//!
//! The pipeline is: [`lexer::tokenize`] and [`parser::parse_program`] build a
//! span-annotated [`ast::Program`]; [`constraints::gen_constraints`] turns it
//! into linear equations over unit exponents; [`solver`] reduces them to
//! reduced row-echelon form over exact rationals; [`report`] and [`synth`]
//! produce the user-facing suggest, infer and check reports and the
//! rewritten source. [`analysis::analyze`] runs the whole thing for one file.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod analysis;
pub mod ast;
pub mod constraints;
pub mod error;
pub mod lexer;
pub mod parser;
pub mod rational;
pub mod report;
pub mod solver;
pub mod span;
pub mod synth;
pub mod units;

pub use analysis::{analyze, Analysis};
pub use error::Error;
pub use rational::Rational;
pub use span::Span;
pub use units::UnitNorm;
