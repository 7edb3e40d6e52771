//! Exact quantifier elimination over products of projective spaces.
//!
//! The library builds join formulas from quantifier-free multi-homogeneous
//! input, computes pseudo-Poincare polynomials of linear-arrangement
//! realizations exactly (with a finite-field point-counting cross-check),
//! runs the quantifier-word operator pipeline, evaluates explicit
//! Betti-number bounds, and provides the join-vs-hypercover comparison
//! diagnostics.
//!
//! Modules:
//! - [`polyring`]: exact integer polynomials and the named polynomial maps;
//! - [`formula`]: the proper-formula data model, parser and validator;
//! - [`join`]: join parameters, join/relative-join/multi-join construction;
//! - [`operators`]: the Rec/Trunc operator algebra and the decision pipeline;
//! - [`motivic`]: exact classes, point counts and Betti numbers for unions of
//!   products of projective-linear subspaces;
//! - [`bounds`]: explicit Euler-characteristic and Betti-sum bounds;
//! - [`compare`]: hypercover-versus-join diagnostics and theorem verifiers;
//! - [`cli`]: the command-line frontend used by the `cohomqe` binary.

pub mod bounds;
pub mod cli;
pub mod compare;
pub mod formula;
pub mod join;
pub mod motivic;
pub mod operators;
pub mod polyring;
