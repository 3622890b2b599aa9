//! Boolean terms and `[0,1]`-valued formulas.

use std::collections::BTreeSet;
use std::fmt;

use crate::rational::{fmt_short, Rational};

/// Boolean term over event variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Zero,
    One,
    /// A variable; resolved at evaluation time against bound variables,
    /// then the valuation, then the structure's named events.
    Var(String),
    Not(Box<Term>),
    Meet(Box<Term>, Box<Term>),
    Join(Box<Term>, Box<Term>),
}

/// Predicates with a fixed quantifier definition, evaluated natively.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    /// `inf y . |mu(x /\ y) - mu(x /\ ~y)|`
    Chi,
    /// `mu(x) -. chi(x)`
    Psi,
    /// `sup y . inf z . |mu(x /\ y /\ z) - mu(x /\ y /\ ~z)|`
    Theta,
    /// `phi1(x) = inf z . (d(x,z) +. psi(z))`,
    /// `phin(x) = inf w . (phi(n-1)(x /\ w) +. phi1(x /\ ~w))`
    Phi(usize),
    /// `at1 = mu -. phi1`, `atn = phi(n-1) -. phin`
    At(usize),
}

impl Builtin {
    pub fn name(&self) -> String {
        match self {
            Builtin::Chi => "chi".into(),
            Builtin::Psi => "psi".into(),
            Builtin::Theta => "theta".into(),
            Builtin::Phi(n) => format!("phi{n}"),
            Builtin::At(n) => format!("at{n}"),
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        let indexed = |prefix: &str| {
            name.strip_prefix(prefix)
                .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()) && !d.starts_with('0'))
                .and_then(|d| d.parse::<usize>().ok())
        };
        match name {
            "chi" => Some(Builtin::Chi),
            "psi" => Some(Builtin::Psi),
            "theta" => Some(Builtin::Theta),
            _ => indexed("phi")
                .map(Builtin::Phi)
                .or_else(|| indexed("at").map(Builtin::At)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Mu(Term),
    D(Term, Term),
    Const(Rational),
    /// `f/2`
    Half(Box<Formula>),
    /// `f -. g = max(f - g, 0)`
    Monus(Box<Formula>, Box<Formula>),
    /// `f +. g = min(f + g, 1)`
    Plus(Box<Formula>, Box<Formula>),
    /// `|f - g|`
    AbsDiff(Box<Formula>, Box<Formula>),
    Min(Vec<Formula>),
    Max(Vec<Formula>),
    Sup(String, Box<Formula>),
    Inf(String, Box<Formula>),
    Call(Builtin, Term),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn not(self) -> Term {
        Term::Not(Box::new(self))
    }

    pub fn meet(self, other: Term) -> Term {
        Term::Meet(Box::new(self), Box::new(other))
    }

    pub fn join(self, other: Term) -> Term {
        Term::Join(Box::new(self), Box::new(other))
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Zero | Term::One => {}
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Not(t) => t.vars(out),
            Term::Meet(a, b) | Term::Join(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    /// Replaces free occurrences of `var` by `with`.
    pub fn substitute(&self, var: &str, with: &Term) -> Term {
        match self {
            Term::Var(v) if v == var => with.clone(),
            Term::Zero | Term::One | Term::Var(_) => self.clone(),
            Term::Not(t) => t.substitute(var, with).not(),
            Term::Meet(a, b) => a.substitute(var, with).meet(b.substitute(var, with)),
            Term::Join(a, b) => a.substitute(var, with).join(b.substitute(var, with)),
        }
    }
}

impl Formula {
    pub fn mu(t: Term) -> Formula {
        Formula::Mu(t)
    }

    pub fn constant(c: Rational) -> Formula {
        Formula::Const(c)
    }

    pub fn half(self) -> Formula {
        Formula::Half(Box::new(self))
    }

    pub fn monus(self, g: Formula) -> Formula {
        Formula::Monus(Box::new(self), Box::new(g))
    }

    pub fn plus(self, g: Formula) -> Formula {
        Formula::Plus(Box::new(self), Box::new(g))
    }

    pub fn abs_diff(self, g: Formula) -> Formula {
        Formula::AbsDiff(Box::new(self), Box::new(g))
    }

    pub fn sup(var: &str, body: Formula) -> Formula {
        Formula::Sup(var.to_string(), Box::new(body))
    }

    pub fn inf(var: &str, body: Formula) -> Formula {
        Formula::Inf(var.to_string(), Box::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<String>| {
            let mut vs = BTreeSet::new();
            t.vars(&mut vs);
            out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
        };
        match self {
            Formula::Mu(t) | Formula::Call(_, t) => term(t, bound),
            Formula::D(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Formula::Const(_) => {}
            Formula::Half(f) => f.collect_free(bound, out),
            Formula::Monus(a, b) | Formula::Plus(a, b) | Formula::AbsDiff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Min(fs) | Formula::Max(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Sup(v, body) | Formula::Inf(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// True when there are no quantifiers and no built-in predicate calls.
    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Mu(_) | Formula::D(..) | Formula::Const(_) => true,
            Formula::Sup(..) | Formula::Inf(..) | Formula::Call(..) => false,
            Formula::Half(f) => f.is_quantifier_free(),
            Formula::Monus(a, b) | Formula::Plus(a, b) | Formula::AbsDiff(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Min(fs) | Formula::Max(fs) => fs.iter().all(Formula::is_quantifier_free),
        }
    }

    /// Number of nodes, counting terms as one.
    pub fn size(&self) -> usize {
        match self {
            Formula::Mu(_) | Formula::D(..) | Formula::Const(_) | Formula::Call(..) => 1,
            Formula::Half(f) | Formula::Sup(_, f) | Formula::Inf(_, f) => 1 + f.size(),
            Formula::Monus(a, b) | Formula::Plus(a, b) | Formula::AbsDiff(a, b) => 1 + a.size() + b.size(),
            Formula::Min(fs) | Formula::Max(fs) => 1 + fs.iter().map(Formula::size).sum::<usize>(),
        }
    }
}

// ---- printing -----------------------------------------------------------
//
// Precedence, loosest first: quantifiers (body extends right), the
// left-associative pair `-.`/`+.`, postfix `/2`, then delimited forms.
// Terms: `\/` < `/\` < prefix `~`, both binary operators left-associative.

fn term_prec(t: &Term) -> u8 {
    match t {
        Term::Join(..) => 0,
        Term::Meet(..) => 1,
        _ => 2,
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, min_prec: u8) -> fmt::Result {
    let p = term_prec(t);
    if p < min_prec {
        write!(f, "(")?;
    }
    match t {
        Term::Zero => write!(f, "0")?,
        Term::One => write!(f, "1")?,
        Term::Var(v) => write!(f, "{v}")?,
        Term::Not(inner) => {
            write!(f, "~")?;
            write_term(f, inner, 2)?;
        }
        Term::Meet(a, b) => {
            write_term(f, a, 1)?;
            write!(f, " /\\ ")?;
            write_term(f, b, 2)?;
        }
        Term::Join(a, b) => {
            write_term(f, a, 0)?;
            write!(f, " \\/ ")?;
            write_term(f, b, 1)?;
        }
    }
    if p < min_prec {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, 0)
    }
}

fn formula_prec(phi: &Formula) -> u8 {
    match phi {
        Formula::Sup(..) | Formula::Inf(..) => 0,
        Formula::Monus(..) | Formula::Plus(..) => 1,
        Formula::Half(_) => 2,
        _ => 3,
    }
}

fn write_formula(f: &mut fmt::Formatter<'_>, phi: &Formula, min_prec: u8) -> fmt::Result {
    let p = formula_prec(phi);
    let paren = p < min_prec;
    if paren {
        write!(f, "(")?;
    }
    match phi {
        Formula::Mu(t) => write!(f, "mu({t})")?,
        Formula::D(a, b) => write!(f, "d({a}, {b})")?,
        Formula::Const(c) => write!(f, "{}", fmt_short(c))?,
        Formula::Half(inner) => {
            // A constant directly before `/2` would read as one fraction.
            if matches!(**inner, Formula::Const(_)) {
                write!(f, "(")?;
                write_formula(f, inner, 0)?;
                write!(f, ")")?;
            } else {
                write_formula(f, inner, 2)?;
            }
            write!(f, "/2")?;
        }
        Formula::Monus(a, b) | Formula::Plus(a, b) => {
            let op = if matches!(phi, Formula::Monus(..)) { "-." } else { "+." };
            write_formula(f, a, 1)?;
            write!(f, " {op} ")?;
            write_formula(f, b, 2)?;
        }
        Formula::AbsDiff(a, b) => {
            write!(f, "|")?;
            write_formula(f, a, 0)?;
            write!(f, " - ")?;
            write_formula(f, b, 0)?;
            write!(f, "|")?;
        }
        Formula::Min(fs) | Formula::Max(fs) => {
            write!(f, "{}(", if matches!(phi, Formula::Min(_)) { "min" } else { "max" })?;
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write_formula(f, g, 0)?;
            }
            write!(f, ")")?;
        }
        Formula::Sup(v, body) | Formula::Inf(v, body) => {
            let q = if matches!(phi, Formula::Sup(..)) { "sup" } else { "inf" };
            write!(f, "{q} {v} . ")?;
            write_formula(f, body, 0)?;
        }
        Formula::Call(b, t) => write!(f, "{}({t})", b.name())?,
    }
    if paren {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn builtin_names_round_trip() {
        for b in [Builtin::Chi, Builtin::Psi, Builtin::Theta, Builtin::Phi(3), Builtin::At(12)] {
            assert_eq!(Builtin::from_name(&b.name()), Some(b));
        }
        assert_eq!(Builtin::from_name("phi"), None);
        assert_eq!(Builtin::from_name("phi0"), None);
        assert_eq!(Builtin::from_name("at01"), None);
    }

    #[test]
    fn prints_with_minimal_parentheses() {
        let x = Term::var("x");
        let y = Term::var("y");
        let t = x.clone().join(y.clone()).meet(x.clone().not());
        assert_eq!(t.to_string(), "(x \\/ y) /\\ ~x");
        let f = Formula::mu(x.clone()).monus(Formula::mu(y.clone()).plus(Formula::Const(rat(1, 2))));
        assert_eq!(f.to_string(), "mu(x) -. (mu(y) +. 1/2)");
        assert_eq!(Formula::Const(rat(1, 2)).half().to_string(), "(1/2)/2");
        let q = Formula::mu(x).plus(Formula::inf("y", Formula::mu(y)));
        assert_eq!(q.to_string(), "mu(x) +. (inf y . mu(y))");
    }

    #[test]
    fn free_variables_respect_binding() {
        let body = Formula::mu(Term::var("x").meet(Term::var("y")));
        let f = Formula::inf("y", body).plus(Formula::mu(Term::var("y")));
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec!["x", "y"]);
        assert!(!f.is_quantifier_free());
    }
}
