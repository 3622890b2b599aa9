//! Exact computation over finite probability algebras.
//!
//! A finite probability algebra is a finite set of atoms carrying strictly
//! positive rational weights that sum to one. Events are sets of atoms and
//! finite subalgebras are partitions of the atom set. On top of this carrier
//! the crate provides:
//!
//! - conditional probability and expectation as step functions ([`conditional`]),
//! - a parser and exact evaluator for `[0,1]`-valued formulas with `sup`/`inf`
//!   quantifiers ranging over all events ([`logic`]),
//! - closed forms for the atom predicates `at_n`, `phi_n`, `chi`, `theta` and the
//!   invariant `Phi` ([`atoms`]),
//! - conditional independence and independent amalgamation ([`independence`]),
//! - type descriptors, type distances, non-forking extensions and
//!   `eps`-forking ([`types`], [`oracle`]),
//! - partition-valued random variables ([`rv`]) and conditional entropy ([`entropy`]).
//!
//! Every measure is an exact [`Rational`]; only entropies are `f64`.

pub mod algebra;
pub mod atoms;
pub mod atomset;
pub mod conditional;
pub mod document;
pub mod entropy;
pub mod error;
pub mod independence;
pub mod logic;
pub mod oracle;
pub mod random;
pub mod rational;
pub mod rv;
pub mod selftest;
pub mod types;

pub use algebra::{Event, Extension, FiniteProbabilityAlgebra, Subalgebra};
pub use atomset::AtomSet;
pub use conditional::StepFunction;
pub use error::{Error, Result};
pub use rational::Rational;
