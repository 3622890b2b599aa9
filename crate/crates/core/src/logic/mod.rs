//! Continuous-logic formulas over probability algebras: syntax, exact
//! evaluation, normal forms and the standard atom-detecting formulas.

pub mod ast;
pub mod builders;
pub mod eval;
pub mod normal;
pub mod parser;

pub use ast::{Builtin, Formula, Term};
pub use eval::{evaluate, Evaluation, Evaluator, Valuation, DEFAULT_ATOM_CAP};
pub use normal::{normal_form, to_restricted_connectives};
pub use parser::{parse, parse_term};
