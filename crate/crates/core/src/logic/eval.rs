//! Exact evaluation of formulas on a finite probability algebra.
//!
//! Quantifiers range over all `2^k` events of the algebra, so evaluation of
//! quantified formulas is refused above a configurable atom cap. Events are
//! handled as 64-bit masks internally.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::ast::{Builtin, Formula, Term};
use crate::algebra::{Event, FiniteProbabilityAlgebra};
use crate::atomset::AtomSet;
use crate::error::{Error, Result};
use crate::rational::{lcm_of_denominators, monus, trunc_add, Rational};

/// Variable assignment for free variables.
pub type Valuation = BTreeMap<String, Event>;

/// Default bound on the atom count for quantifier evaluation.
pub const DEFAULT_ATOM_CAP: usize = 16;

/// Largest atom count the mask representation supports at all.
pub const MASK_ATOMS: usize = 64;

/// Hard bound for quantifier enumeration regardless of the configured cap.
const MAX_QUANTIFIED_ATOMS: usize = 40;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub value: Rational,
    /// Optimal events for the leading chain of quantifiers, outermost first.
    pub witnesses: Vec<(String, Event)>,
}

/// Evaluates with the default cap and no named events.
pub fn evaluate(alg: &FiniteProbabilityAlgebra, phi: &Formula, v: &Valuation) -> Result<Rational> {
    Ok(Evaluator::new(alg).eval(phi, v)?.value)
}

pub struct Evaluator<'a> {
    alg: &'a FiniteProbabilityAlgebra,
    named: Option<&'a BTreeMap<String, Event>>,
    cap: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(alg: &'a FiniteProbabilityAlgebra) -> Self {
        Evaluator {
            alg,
            named: None,
            cap: DEFAULT_ATOM_CAP,
        }
    }

    /// Events that free identifiers fall back to after the valuation.
    pub fn with_named(mut self, named: &'a BTreeMap<String, Event>) -> Self {
        self.named = Some(named);
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn eval(&self, phi: &Formula, v: &Valuation) -> Result<Evaluation> {
        let k = self.alg.atom_count();
        if k > MASK_ATOMS {
            return Err(Error::AtomCapExceeded { atoms: k, cap: MASK_ATOMS });
        }
        let mut c = Compiler {
            nodes: Vec::new(),
            scope: Vec::new(),
            slot_names: Vec::new(),
            alg: self.alg,
            valuation: v,
            named: self.named,
            quantified: false,
        };
        let (root, _) = c.formula(phi)?;
        let cap = self.cap.min(MAX_QUANTIFIED_ATOMS);
        if c.quantified && k > cap {
            return Err(Error::AtomCapExceeded { atoms: k, cap });
        }
        let mut run = Run {
            nodes: &c.nodes,
            full: if k == 64 { u64::MAX } else { (1u64 << k) - 1 },
            measure: Measure::new(self.alg),
            env: vec![0; c.slot_names.len()],
            memo: HashMap::new(),
            builtin_memo: HashMap::new(),
        };
        let value = run.node(root);

        let mut witnesses = Vec::new();
        let mut at = root;
        while let Node::Quant { slot, body, free, .. } = &c.nodes[at] {
            let key = (at, free.iter().map(|&s| run.env[s]).collect::<Vec<_>>());
            let (_, w) = run.memo[&key].clone();
            run.env[*slot] = w;
            witnesses.push((c.slot_names[*slot].clone(), self.alg.wrap(AtomSet::from_mask(w))));
            at = *body;
        }
        Ok(Evaluation { value, witnesses })
    }

    /// Values of each built-in on every event, indexed by atom bitmask
    /// (bit `i` is atom `i`). One memo is shared by all of them.
    pub fn builtin_tables(&self, builtins: &[Builtin]) -> Result<Vec<Vec<Rational>>> {
        let k = self.alg.atom_count();
        let cap = self.cap.min(MAX_QUANTIFIED_ATOMS).min(MASK_ATOMS - 1);
        if k > cap {
            return Err(Error::AtomCapExceeded { atoms: k, cap });
        }
        let mut run = Run {
            nodes: &[],
            full: (1u64 << k) - 1,
            measure: Measure::new(self.alg),
            env: Vec::new(),
            memo: HashMap::new(),
            builtin_memo: HashMap::new(),
        };
        Ok(builtins
            .iter()
            .map(|&b| (0..=run.full).map(|x| run.builtin(b, x)).collect())
            .collect())
    }
}

// ---- compiled form ------------------------------------------------------

#[derive(Clone, Debug)]
enum T {
    Const(u64),
    Slot(usize),
    Not(Box<T>),
    Meet(Box<T>, Box<T>),
    Join(Box<T>, Box<T>),
}

#[derive(Clone, Debug)]
enum Node {
    Mu(T),
    D(T, T),
    Const(Rational),
    Half(usize),
    Monus(usize, usize),
    Plus(usize, usize),
    Abs(usize, usize),
    Min(Vec<usize>),
    Max(Vec<usize>),
    Quant {
        sup: bool,
        slot: usize,
        body: usize,
        /// Slots of enclosing binders the body reads; the memo key.
        free: Vec<usize>,
    },
    Call(Builtin, T),
}

struct Compiler<'a> {
    nodes: Vec<Node>,
    scope: Vec<(String, usize)>,
    slot_names: Vec<String>,
    alg: &'a FiniteProbabilityAlgebra,
    valuation: &'a Valuation,
    named: Option<&'a BTreeMap<String, Event>>,
    quantified: bool,
}

type Slots = Vec<usize>;

fn merge(a: &mut Slots, b: Slots) {
    for s in b {
        if !a.contains(&s) {
            a.push(s);
        }
    }
}

impl Compiler<'_> {
    fn push(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    fn term(&self, t: &Term, used: &mut Slots) -> Result<T> {
        Ok(match t {
            Term::Zero => T::Const(0),
            Term::One => T::Not(Box::new(T::Const(0))),
            Term::Var(name) => {
                if let Some((_, s)) = self.scope.iter().rev().find(|(n, _)| n == name) {
                    if !used.contains(s) {
                        used.push(*s);
                    }
                    T::Slot(*s)
                } else {
                    let e = self
                        .valuation
                        .get(name)
                        .or_else(|| self.named.and_then(|m| m.get(name)))
                        .ok_or_else(|| Error::UnboundVariable(name.clone()))?;
                    self.alg.owns(e)?;
                    T::Const(e.members().to_mask())
                }
            }
            Term::Not(a) => T::Not(Box::new(self.term(a, used)?)),
            Term::Meet(a, b) => T::Meet(Box::new(self.term(a, used)?), Box::new(self.term(b, used)?)),
            Term::Join(a, b) => T::Join(Box::new(self.term(a, used)?), Box::new(self.term(b, used)?)),
        })
    }

    /// Returns the node index and the binder slots it reads.
    fn formula(&mut self, phi: &Formula) -> Result<(usize, Slots)> {
        let mut used = Slots::new();
        let node = match phi {
            Formula::Mu(t) => Node::Mu(self.term(t, &mut used)?),
            Formula::D(a, b) => Node::D(self.term(a, &mut used)?, self.term(b, &mut used)?),
            Formula::Const(c) => Node::Const(c.clone()),
            Formula::Call(b, t) => {
                self.quantified = true;
                Node::Call(*b, self.term(t, &mut used)?)
            }
            Formula::Half(f) => {
                let (i, u) = self.formula(f)?;
                used = u;
                Node::Half(i)
            }
            Formula::Monus(a, b) | Formula::Plus(a, b) | Formula::AbsDiff(a, b) => {
                let (i, u) = self.formula(a)?;
                let (j, w) = self.formula(b)?;
                used = u;
                merge(&mut used, w);
                match phi {
                    Formula::Monus(..) => Node::Monus(i, j),
                    Formula::Plus(..) => Node::Plus(i, j),
                    _ => Node::Abs(i, j),
                }
            }
            Formula::Min(fs) | Formula::Max(fs) => {
                let mut kids = Vec::with_capacity(fs.len());
                for f in fs {
                    let (i, u) = self.formula(f)?;
                    kids.push(i);
                    merge(&mut used, u);
                }
                if matches!(phi, Formula::Min(_)) {
                    Node::Min(kids)
                } else {
                    Node::Max(kids)
                }
            }
            Formula::Sup(var, body) | Formula::Inf(var, body) => {
                self.quantified = true;
                let slot = self.slot_names.len();
                self.slot_names.push(var.clone());
                self.scope.push((var.clone(), slot));
                let (b, u) = self.formula(body)?;
                self.scope.pop();
                used = u.into_iter().filter(|&s| s != slot).collect();
                used.sort_unstable();
                Node::Quant {
                    sup: matches!(phi, Formula::Sup(..)),
                    slot,
                    body: b,
                    free: used.clone(),
                }
            }
        };
        Ok((self.push(node), used))
    }
}

/// `mu` on masks: scaled integers when they fit, with a lazily filled table
/// for small algebras.
struct Measure {
    units: Option<(Vec<i128>, BigInt)>,
    weights: Vec<Rational>,
    table: Vec<Option<Rational>>,
}

impl Measure {
    fn new(alg: &FiniteProbabilityAlgebra) -> Self {
        let l = lcm_of_denominators(alg.weights());
        let units: Option<Vec<i128>> = alg
            .weights()
            .iter()
            .map(|w| (w.numer() * (&l / w.denom())).to_i128().filter(|u| u.unsigned_abs() < 1 << 96))
            .collect();
        let k = alg.atom_count();
        Measure {
            units: units.map(|u| (u, l)),
            weights: alg.weights().to_vec(),
            table: if k <= 16 { vec![None; 1 << k] } else { Vec::new() },
        }
    }

    fn compute(&self, mask: u64) -> Rational {
        let atoms = (0..64).filter(|i| mask >> i & 1 == 1);
        match &self.units {
            Some((units, l)) => Rational::new(BigInt::from(atoms.map(|i| units[i]).sum::<i128>()), l.clone()),
            None => atoms.map(|i| &self.weights[i]).sum(),
        }
    }

    fn of(&mut self, mask: u64) -> Rational {
        if let Some(slot) = self.table.get(mask as usize) {
            if let Some(v) = slot {
                return v.clone();
            }
            let v = self.compute(mask);
            self.table[mask as usize] = Some(v.clone());
            return v;
        }
        self.compute(mask)
    }
}

struct Run<'a> {
    nodes: &'a [Node],
    full: u64,
    measure: Measure,
    env: Vec<u64>,
    memo: HashMap<(usize, Vec<u64>), (Rational, u64)>,
    builtin_memo: HashMap<(Builtin, u64), Rational>,
}

impl Run<'_> {
    fn term(&self, t: &T) -> u64 {
        match t {
            T::Const(m) => *m,
            T::Slot(s) => self.env[*s],
            T::Not(a) => !self.term(a) & self.full,
            T::Meet(a, b) => self.term(a) & self.term(b),
            T::Join(a, b) => self.term(a) | self.term(b),
        }
    }

    fn node(&mut self, i: usize) -> Rational {
        match &self.nodes[i] {
            Node::Mu(t) => {
                let m = self.term(t);
                self.measure.of(m)
            }
            Node::D(a, b) => {
                let m = self.term(a) ^ self.term(b);
                self.measure.of(m)
            }
            Node::Const(c) => c.clone(),
            Node::Half(f) => self.node(*f) / Rational::from_integer(BigInt::from(2)),
            Node::Monus(a, b) => {
                let (x, y) = (self.node(*a), self.node(*b));
                monus(&x, &y)
            }
            Node::Plus(a, b) => {
                let (x, y) = (self.node(*a), self.node(*b));
                trunc_add(&x, &y)
            }
            Node::Abs(a, b) => {
                let (x, y) = (self.node(*a), self.node(*b));
                if x >= y {
                    x - y
                } else {
                    y - x
                }
            }
            Node::Min(kids) => {
                let kids = kids.clone();
                kids.iter().map(|&k| self.node(k)).min().expect("min has arguments")
            }
            Node::Max(kids) => {
                let kids = kids.clone();
                kids.iter().map(|&k| self.node(k)).max().expect("max has arguments")
            }
            Node::Quant { sup, slot, body, free } => {
                let (sup, slot, body) = (*sup, *slot, *body);
                let key = (i, free.iter().map(|&s| self.env[s]).collect::<Vec<_>>());
                if let Some((v, _)) = self.memo.get(&key) {
                    return v.clone();
                }
                let saved = self.env[slot];
                let mut best: Option<(Rational, u64)> = None;
                let stop = if sup { Rational::one() } else { Rational::zero() };
                for y in 0..=self.full {
                    self.env[slot] = y;
                    let v = self.node(body);
                    let better = match &best {
                        None => true,
                        Some((b, _)) => (sup && v > *b) || (!sup && v < *b),
                    };
                    if better {
                        let done = v == stop;
                        best = Some((v, y));
                        if done {
                            break;
                        }
                    }
                }
                self.env[slot] = saved;
                let best = best.expect("at least one event");
                self.memo.insert(key, best.clone());
                best.0
            }
            Node::Call(b, t) => {
                let (b, x) = (*b, self.term(t));
                self.builtin(b, x)
            }
        }
    }

    fn argmin(&mut self, mut f: impl FnMut(&mut Self, u64) -> Rational) -> Rational {
        let mut best: Option<Rational> = None;
        for y in 0..=self.full {
            let v = f(self, y);
            if best.as_ref().is_none_or(|b| v < *b) {
                let done = v.is_zero();
                best = Some(v);
                if done {
                    break;
                }
            }
        }
        best.expect("at least one event")
    }

    /// Built-in predicates, by their defining quantifier formulas.
    fn builtin(&mut self, b: Builtin, x: u64) -> Rational {
        if let Some(v) = self.builtin_memo.get(&(b, x)) {
            return v.clone();
        }
        let full = self.full;
        let v = match b {
            Builtin::Chi => self.argmin(|r, y| {
                let p = r.measure.of(x & y);
                let q = r.measure.of(x & !y & full);
                if p >= q {
                    p - q
                } else {
                    q - p
                }
            }),
            Builtin::Psi => {
                let m = self.measure.of(x);
                let c = self.builtin(Builtin::Chi, x);
                monus(&m, &c)
            }
            Builtin::Theta => {
                let mut best = Rational::zero();
                for y in 0..=full {
                    let v = self.builtin(Builtin::Chi, x & y);
                    if v > best {
                        best = v;
                        if best.is_one() {
                            break;
                        }
                    }
                }
                best
            }
            Builtin::Phi(1) => self.argmin(|r, z| {
                let d = r.measure.of(x ^ z);
                let p = r.builtin(Builtin::Psi, z);
                trunc_add(&d, &p)
            }),
            Builtin::Phi(n) => self.argmin(|r, w| {
                let a = r.builtin(Builtin::Phi(n - 1), x & w);
                let c = r.builtin(Builtin::Phi(1), x & !w & full);
                trunc_add(&a, &c)
            }),
            Builtin::At(n) => {
                let prev = if n <= 1 {
                    self.measure.of(x)
                } else {
                    self.builtin(Builtin::Phi(n - 1), x)
                };
                let cur = self.builtin(Builtin::Phi(n.max(1)), x);
                monus(&prev, &cur)
            }
        };
        self.builtin_memo.insert((b, x), v.clone());
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::uniform_algebra;
    use crate::logic::parser::parse;
    use crate::rational::{int, rat};

    const CHI: &str = "inf y . |mu(x /\\ y) - mu(x /\\ ~y)|";

    fn bind(alg: &FiniteProbabilityAlgebra, var: &str, e: Event) -> Valuation {
        let _ = alg;
        [(var.to_string(), e)].into_iter().collect()
    }

    #[test]
    fn chi_on_two_atoms_with_witness() {
        let alg = uniform_algebra(2);
        let ev = Evaluator::new(&alg).eval(&parse(CHI).unwrap(), &bind(&alg, "x", alg.full())).unwrap();
        assert_eq!(ev.value, int(0));
        let (name, w) = &ev.witnesses[0];
        assert_eq!(name, "y");
        assert_eq!(w.members().len(), 1);
    }

    #[test]
    fn chi_detects_a_single_atom() {
        let alg = uniform_algebra(1);
        let v = evaluate(&alg, &parse(CHI).unwrap(), &bind(&alg, "x", alg.full())).unwrap();
        assert_eq!(v, int(1));
    }

    #[test]
    fn closed_constants() {
        let alg = uniform_algebra(3);
        let v = Valuation::new();
        assert_eq!(evaluate(&alg, &parse("mu(1)").unwrap(), &v).unwrap(), int(1));
        assert_eq!(evaluate(&alg, &parse("mu(0)").unwrap(), &v).unwrap(), int(0));
        assert_eq!(evaluate(&alg, &parse("(1/2)/2 +. 1/3").unwrap(), &v).unwrap(), rat(7, 12));
        assert_eq!(evaluate(&alg, &parse("min(1/2, 1/3, 1) -. max(0, 1/4)").unwrap(), &v).unwrap(), rat(1, 12));
    }

    #[test]
    fn errors() {
        let alg = uniform_algebra(3);
        assert_eq!(
            evaluate(&alg, &parse("mu(x)").unwrap(), &Valuation::new()),
            Err(Error::UnboundVariable("x".into()))
        );
        let big = uniform_algebra(17);
        assert_eq!(
            evaluate(&big, &parse("sup y . mu(y)").unwrap(), &Valuation::new()),
            Err(Error::AtomCapExceeded { atoms: 17, cap: 16 })
        );
        assert_eq!(evaluate(&big, &parse("mu(1)").unwrap(), &Valuation::new()), Ok(int(1)));
        let other = uniform_algebra(3);
        assert_eq!(
            evaluate(&alg, &parse("mu(x)").unwrap(), &bind(&other, "x", other.full())),
            Err(Error::ForeignEvent)
        );
    }

    #[test]
    fn bound_variables_shadow_valuation() {
        let alg = uniform_algebra(2);
        let v = bind(&alg, "y", alg.empty());
        assert_eq!(evaluate(&alg, &parse("sup y . mu(y)").unwrap(), &v).unwrap(), int(1));
        assert_eq!(evaluate(&alg, &parse("mu(y) +. sup y . mu(y)").unwrap(), &v).unwrap(), int(1));
        assert_eq!(evaluate(&alg, &parse("sup y . inf y . mu(y)").unwrap(), &v).unwrap(), int(0));
    }

    #[test]
    fn named_events_are_the_last_fallback() {
        let alg = uniform_algebra(4);
        let named: BTreeMap<String, Event> = [("A".to_string(), alg.event([0, 1, 2]).unwrap())].into_iter().collect();
        let ev = Evaluator::new(&alg).with_named(&named);
        assert_eq!(ev.eval(&parse("mu(A)").unwrap(), &Valuation::new()).unwrap().value, rat(3, 4));
        let v = bind(&alg, "A", alg.empty());
        assert_eq!(ev.eval(&parse("mu(A)").unwrap(), &v).unwrap().value, int(0));
    }

    #[test]
    fn builtins_match_their_definitions() {
        let alg = crate::algebra::random_algebra(11, 5);
        let ev = Evaluator::new(&alg);
        for m in 0..32u64 {
            let v = bind(&alg, "x", alg.wrap(AtomSet::from_mask(m)));
            let by_call = ev.eval(&parse("chi(x)").unwrap(), &v).unwrap().value;
            let by_formula = ev.eval(&parse(CHI).unwrap(), &v).unwrap().value;
            assert_eq!(by_call, by_formula);
            let theta_call = ev.eval(&parse("theta(x)").unwrap(), &v).unwrap().value;
            let theta_formula = ev
                .eval(&parse("sup y . inf z . |mu(x /\\ y /\\ z) - mu(x /\\ y /\\ ~z)|").unwrap(), &v)
                .unwrap()
                .value;
            assert_eq!(theta_call, theta_formula);
        }
    }
}
