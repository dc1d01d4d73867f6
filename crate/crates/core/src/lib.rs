//! Symbolic quadratization of spatially one-dimensional PDE systems.
//!
//! Given a system of evolution equations whose right-hand sides are
//! polynomial (or rational) in the states and their spatial derivatives, the
//! engine searches for a small set of auxiliary variables, each defined as a
//! monomial in the states and derivatives, such that the extended system
//! closes with right-hand sides of total degree at most two. Rational
//! systems are first rewritten as polynomial ones by adjoining inverses of
//! the denominator factors.
//!
//! The crate is organized as a pipeline: [`parse`] turns the small input
//! language into a [`system::PdeSystem`]; [`lift`] removes denominators;
//! [`search`] runs a branch-and-bound over candidate auxiliary sets, using
//! [`decompose`] to propose candidates and [`verify`] to check them;
//! [`report`] serializes the outcome. [`benchmarks`] bundles a fixed suite
//! of example systems used by the regression tests and the benchmark binary.

pub mod benchmarks;
pub mod decompose;
pub mod ideal;
pub mod jet;
pub mod lift;
pub mod monomial;
pub mod parse;
pub mod poly;
pub mod rational;
pub mod render;
pub mod report;
pub mod search;
pub mod system;
pub mod verify;

pub use benchmarks::{
    cases, find_case, format_recorded_sets, format_suite, recorded_set, run_suite,
    verify_recorded_sets, BenchmarkCase, RecordedSetRow, SuiteConfig, SuiteRow,
};
pub use decompose::{decompose, select_target, sort_candidates, DecompositionTuple, Heuristic};
pub use ideal::{buchberger, reduce_nf, IdealBasis, TermOrder};
pub use jet::JetVar;
pub use lift::{factor_denominator, polynomialize, FactoredDenominator, LiftError};
pub use monomial::{lex_compare, Monomial};
pub use parse::{parse, ParseError};
pub use poly::Polynomial;
pub use rational::RationalFunction;
pub use render::Namer;
pub use report::{build_report, render_input, ConfigReport, ResultReport, RunReport, StatsReport};
pub use search::{
    auto_search, search, shrink, AutoRound, FailureKind, QuadResult, SearchConfig, SearchFailure,
    SearchStats, ShrinkOutcome,
};
pub use system::{
    time_derivative_inverse, time_derivative_monomial, AuxDefinition, AuxKind, ExtendError,
    ExtendedSystem, PdeSystem, RationalSystem, SystemError, Workspace,
};
pub use verify::{
    build_generators, row_reduce, verify, verify_once, GeneratorSet, VerifyCtx, VerifyError,
    VerifyOutcome,
};

/// Exact scalar type used for every coefficient in the engine.
pub type Coef = num_rational::BigRational;
