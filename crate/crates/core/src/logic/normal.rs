//! Quantifier-free normal form and the rewrite into restricted connectives.

use std::collections::BTreeSet;

use num_traits::One;

use super::ast::{Formula, Term};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Variables plus parameters a single atomic formula may expand over.
pub const MAX_EXPANSION_VARS: usize = 20;

/// Rewrites a quantifier-free formula so that every atomic subformula is
/// `mu(x^s /\ c)` for a cell `x^s` of `vars` and a cell `c` of the remaining
/// identifiers (named events), in lexicographic order of sign vectors.
///
/// `d(t, u)` becomes `mu` of the symmetric difference, and each `mu(t)`
/// becomes the truncated sum of `mu` over the cells that make up `t`.
pub fn normal_form(phi: &Formula, vars: &[String]) -> Result<Formula> {
    Ok(match phi {
        Formula::Mu(t) => expand(t, vars)?,
        Formula::D(a, b) => {
            let sym = a.clone().meet(b.clone().not()).join(a.clone().not().meet(b.clone()));
            expand(&sym, vars)?
        }
        Formula::Const(c) => Formula::Const(c.clone()),
        Formula::Half(f) => normal_form(f, vars)?.half(),
        Formula::Monus(a, b) => normal_form(a, vars)?.monus(normal_form(b, vars)?),
        Formula::Plus(a, b) => normal_form(a, vars)?.plus(normal_form(b, vars)?),
        Formula::AbsDiff(a, b) => normal_form(a, vars)?.abs_diff(normal_form(b, vars)?),
        Formula::Min(fs) => Formula::Min(fs.iter().map(|f| normal_form(f, vars)).collect::<Result<_>>()?),
        Formula::Max(fs) => Formula::Max(fs.iter().map(|f| normal_form(f, vars)).collect::<Result<_>>()?),
        Formula::Sup(..) => return Err(Error::UnsupportedConnective("sup".into())),
        Formula::Inf(..) => return Err(Error::UnsupportedConnective("inf".into())),
        Formula::Call(b, _) => return Err(Error::UnsupportedConnective(b.name())),
    })
}

fn truth(t: &Term, names: &[String], assignment: u64) -> bool {
    let n = names.len();
    match t {
        Term::Zero => false,
        Term::One => true,
        Term::Var(v) => {
            let i = names.iter().position(|x| x == v).expect("all variables are named");
            assignment >> (n - 1 - i) & 1 == 1
        }
        Term::Not(a) => !truth(a, names, assignment),
        Term::Meet(a, b) => truth(a, names, assignment) && truth(b, names, assignment),
        Term::Join(a, b) => truth(a, names, assignment) || truth(b, names, assignment),
    }
}

/// Meet of literals: `names[i]` where bit `n-1-i` of `s` is set, else its
/// complement. The empty meet is `1`.
pub fn cell_term(names: &[String], s: u64) -> Term {
    let n = names.len();
    names
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let lit = Term::var(v);
            if s >> (n - 1 - i) & 1 == 1 {
                lit
            } else {
                lit.not()
            }
        })
        .reduce(Term::meet)
        .unwrap_or(Term::One)
}

fn expand(t: &Term, vars: &[String]) -> Result<Formula> {
    let mut occurring = BTreeSet::new();
    t.vars(&mut occurring);
    let mut names: Vec<String> = vars.to_vec();
    names.extend(occurring.into_iter().filter(|v| !vars.contains(v)));
    if names.len() > MAX_EXPANSION_VARS {
        return Err(Error::LengthMismatch(names.len(), MAX_EXPANSION_VARS));
    }
    Ok((0..1u64 << names.len())
        .filter(|&s| truth(t, &names, s))
        .map(|s| Formula::mu(cell_term(&names, s)))
        .reduce(Formula::plus)
        .unwrap_or(Formula::Const(Rational::from_integer(0.into()))))
}

/// Rewrites `min`, `max`, `|.-.|` and `+.` into `-.` and constants:
/// `min(a,b) = a -. (a -. b)`, `max(a,b) = a +. (b -. a)`,
/// `|a-b| = (a -. b) +. (b -. a)`, `a +. b = 1 -. ((1 -. a) -. b)`.
pub fn to_restricted_connectives(phi: &Formula) -> Formula {
    let one = || Formula::Const(Rational::one());
    let plus = |a: Formula, b: Formula| one().monus(one().monus(a).monus(b));
    match phi {
        Formula::Mu(_) | Formula::D(..) | Formula::Const(_) | Formula::Call(..) => phi.clone(),
        Formula::Half(f) => to_restricted_connectives(f).half(),
        Formula::Monus(a, b) => to_restricted_connectives(a).monus(to_restricted_connectives(b)),
        Formula::Plus(a, b) => plus(to_restricted_connectives(a), to_restricted_connectives(b)),
        Formula::AbsDiff(a, b) => {
            let (a, b) = (to_restricted_connectives(a), to_restricted_connectives(b));
            plus(a.clone().monus(b.clone()), b.monus(a))
        }
        Formula::Min(fs) => fs
            .iter()
            .map(to_restricted_connectives)
            .reduce(|a, b| a.clone().monus(a.monus(b)))
            .expect("min has arguments"),
        Formula::Max(fs) => fs
            .iter()
            .map(to_restricted_connectives)
            .reduce(|a, b| {
                let diff = b.monus(a.clone());
                plus(a, diff)
            })
            .expect("max has arguments"),
        Formula::Sup(v, body) => Formula::sup(v, to_restricted_connectives(body)),
        Formula::Inf(v, body) => Formula::inf(v, to_restricted_connectives(body)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::uniform_algebra;
    use crate::logic::eval::{evaluate, Valuation};
    use crate::logic::parser::parse;

    fn names(vs: &[&str]) -> Vec<String> {
        vs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn join_expands_to_three_cells() {
        let f = normal_form(&parse("mu(x1 \\/ x2)").unwrap(), &names(&["x1", "x2"])).unwrap();
        assert_eq!(f, parse("mu(~x1 /\\ x2) +. mu(x1 /\\ ~x2) +. mu(x1 /\\ x2)").unwrap());
    }

    #[test]
    fn single_variable_is_unchanged() {
        let f = parse("mu(x1)").unwrap();
        assert_eq!(normal_form(&f, &names(&["x1"])).unwrap(), f);
    }

    #[test]
    fn distance_becomes_mixed_cells() {
        let f = normal_form(&parse("d(x1, x2)").unwrap(), &names(&["x1", "x2"])).unwrap();
        assert_eq!(f, parse("mu(~x1 /\\ x2) +. mu(x1 /\\ ~x2)").unwrap());
    }

    #[test]
    fn parameters_split_into_their_own_cells() {
        let f = normal_form(&parse("mu(x /\\ C)").unwrap(), &names(&["x"])).unwrap();
        assert_eq!(f, parse("mu(x /\\ C)").unwrap());
        let g = normal_form(&parse("mu(0) +. mu(1)").unwrap(), &names(&["x"])).unwrap();
        assert_eq!(g, parse("0 +. (mu(~x) +. mu(x))").unwrap());
    }

    #[test]
    fn quantifiers_are_rejected() {
        assert_eq!(
            normal_form(&parse("sup y . mu(y)").unwrap(), &[]),
            Err(Error::UnsupportedConnective("sup".into()))
        );
        assert_eq!(
            normal_form(&parse("chi(x)").unwrap(), &[]),
            Err(Error::UnsupportedConnective("chi".into()))
        );
    }

    #[test]
    fn restricted_rewrite_preserves_values() {
        let alg = uniform_algebra(3);
        let mut v = Valuation::new();
        v.insert("a".into(), alg.event([0]).unwrap());
        v.insert("b".into(), alg.event([0, 1]).unwrap());
        for text in [
            "min(mu(a), mu(b), 1/2)",
            "max(mu(a), 1/2, mu(b))",
            "|mu(a) - mu(b)|",
            "mu(b) +. mu(b)",
            "max(|mu(a) - 1/2|, (mu(b) +. 1/3)/2)",
        ] {
            let f = parse(text).unwrap();
            let r = to_restricted_connectives(&f);
            assert!(!r.to_string().contains("min") && !r.to_string().contains('|') && !r.to_string().contains("+."));
            assert_eq!(evaluate(&alg, &f, &v).unwrap(), evaluate(&alg, &r, &v).unwrap(), "{text}");
        }
    }
}
