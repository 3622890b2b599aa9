//! Atom structure: `at_n`, `phi_n`, `chi`, `theta`, the invariant `Phi` and
//! classification of finite algebras up to isomorphism.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::algebra::{Event, FiniteProbabilityAlgebra};
use crate::error::{Error, Result};
use crate::logic::{Builtin, Evaluator, Formula, Term, Valuation, DEFAULT_ATOM_CAP};
use crate::rational::{lcm_of_denominators, Rational};

/// Weights of the atoms inside `a`, largest first.
fn sorted_weights_in(alg: &FiniteProbabilityAlgebra, a: &Event) -> Result<Vec<Rational>> {
    alg.owns(a)?;
    let mut ws: Vec<Rational> = a.atoms().map(|i| alg.weight(i).clone()).collect();
    ws.sort_by(|x, y| y.cmp(x));
    Ok(ws)
}

/// The `n`-th largest atom weight below `a` (`0` if `a` has fewer atoms).
pub fn at_n(alg: &FiniteProbabilityAlgebra, a: &Event, n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::ValueOutOfRange("n = 0".into()));
    }
    let ws = sorted_weights_in(alg, a)?;
    Ok(ws.get(n - 1).cloned().unwrap_or_else(Rational::zero))
}

/// Distance from `a` to the unions of at most `n` atoms:
/// `mu(a)` minus the `n` largest atom weights in `a`, floored at zero.
pub fn phi_n_closed(alg: &FiniteProbabilityAlgebra, a: &Event, n: usize) -> Result<Rational> {
    let ws = sorted_weights_in(alg, a)?;
    Ok(ws.iter().skip(n).sum())
}

/// `phi_n(a)` by evaluating its quantifier definition over all events.
pub fn phi_n_bruteforce(alg: &FiniteProbabilityAlgebra, a: &Event, n: usize) -> Result<Rational> {
    phi_n_bruteforce_with_cap(alg, a, n, DEFAULT_ATOM_CAP)
}

pub fn phi_n_bruteforce_with_cap(alg: &FiniteProbabilityAlgebra, a: &Event, n: usize, cap: usize) -> Result<Rational> {
    let f = if n == 0 {
        Formula::mu(Term::var("x"))
    } else {
        Formula::Call(Builtin::Phi(n), Term::var("x"))
    };
    eval_at(alg, &f, a, cap)
}

/// `at_n(a)` by evaluating `phi_{n-1} -. phi_n` through the evaluator.
pub fn at_n_bruteforce(alg: &FiniteProbabilityAlgebra, a: &Event, n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(Error::ValueOutOfRange("n = 0".into()));
    }
    eval_at(alg, &Formula::Call(Builtin::At(n), Term::var("x")), a, DEFAULT_ATOM_CAP)
}

fn eval_at(alg: &FiniteProbabilityAlgebra, f: &Formula, a: &Event, cap: usize) -> Result<Rational> {
    alg.owns(a)?;
    let v: Valuation = [("x".to_string(), a.clone())].into_iter().collect();
    Ok(Evaluator::new(alg).with_cap(cap).eval(f, &v)?.value)
}

/// Subset sums of the weights inside `a`, indexed by masks over the
/// positions of `a`'s atoms. Uses scaled `i128` when the common denominator
/// allows it.
enum SubsetSums {
    Scaled(Vec<i128>, BigInt),
    Exact(Vec<Rational>),
}

fn table<T: Clone + std::ops::Add<Output = T>>(ws: &[T], zero: T) -> Vec<T> {
    let mut sums = vec![zero; 1 << ws.len()];
    for m in 1..sums.len() {
        let low = m.trailing_zeros() as usize;
        sums[m] = sums[m & (m - 1)].clone() + ws[low].clone();
    }
    sums
}

impl SubsetSums {
    fn new(alg: &FiniteProbabilityAlgebra, a: &Event) -> Self {
        let ws: Vec<Rational> = a.atoms().map(|i| alg.weight(i).clone()).collect();
        let l = lcm_of_denominators(&ws);
        let scaled: Option<Vec<i128>> = ws
            .iter()
            .map(|w| (w.numer() * (&l / w.denom())).to_i128().filter(|u| *u < 1 << 100))
            .collect();
        match scaled {
            Some(units) => SubsetSums::Scaled(table(&units, 0), l),
            None => SubsetSums::Exact(table(&ws, Rational::zero())),
        }
    }
}

/// `min over sub of m` of `|S(m) - 2 S(sub)|`.
fn balanced<T: Clone + Ord + Signed>(sums: &[T], m: usize) -> T {
    let total = sums[m].clone();
    let mut best = total.clone();
    let mut sub = m;
    loop {
        let d = (total.clone() - sums[sub].clone() - sums[sub].clone()).abs();
        if d < best {
            best = d;
            if best.is_zero() {
                break;
            }
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & m;
    }
    best
}

fn theta_core<T: Clone + Ord + Signed>(sums: &[T]) -> T {
    let full = sums.len() - 1;
    (0..=full).map(|m| balanced(sums, m)).max().expect("nonempty")
}

fn check_cap(alg: &FiniteProbabilityAlgebra, cap: usize) -> Result<()> {
    if alg.atom_count() > cap {
        Err(Error::AtomCapExceeded { atoms: alg.atom_count(), cap })
    } else {
        Ok(())
    }
}

/// `chi(a) = min over y of |mu(a n y) - mu(a \ y)|`, the best balanced
/// split of `a`. Only subsets of `a` matter, so `2^|a|` candidates.
pub fn chi(alg: &FiniteProbabilityAlgebra, a: &Event) -> Result<Rational> {
    chi_with_cap(alg, a, DEFAULT_ATOM_CAP)
}

pub fn chi_with_cap(alg: &FiniteProbabilityAlgebra, a: &Event, cap: usize) -> Result<Rational> {
    alg.owns(a)?;
    check_cap(alg, cap)?;
    Ok(match SubsetSums::new(alg, a) {
        SubsetSums::Scaled(s, l) => Rational::new(BigInt::from(balanced(&s, s.len() - 1)), l),
        SubsetSums::Exact(s) => balanced(&s, s.len() - 1),
    })
}

/// `theta(a) = max over y of chi(a n y)`; nested enumeration over subsets
/// of `a`, `3^|a|` steps.
pub fn theta(alg: &FiniteProbabilityAlgebra, a: &Event) -> Result<Rational> {
    theta_with_cap(alg, a, DEFAULT_ATOM_CAP)
}

pub fn theta_with_cap(alg: &FiniteProbabilityAlgebra, a: &Event, cap: usize) -> Result<Rational> {
    alg.owns(a)?;
    check_cap(alg, cap)?;
    Ok(match SubsetSums::new(alg, a) {
        SubsetSums::Scaled(s, l) => Rational::new(BigInt::from(theta_core(&s)), l),
        SubsetSums::Exact(s) => theta_core(&s),
    })
}

/// Atom weights sorted weakly decreasing; trailing zeros are implicit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PhiInvariant {
    pub sorted_weights: Vec<Rational>,
}

impl PhiInvariant {
    /// Entry `i` (0-based), padding with zeros.
    pub fn entry(&self, i: usize) -> Rational {
        self.sorted_weights.get(i).cloned().unwrap_or_else(Rational::zero)
    }
}

pub fn phi_invariant(alg: &FiniteProbabilityAlgebra) -> PhiInvariant {
    let mut ws = alg.weights().to_vec();
    ws.sort_by(|x, y| y.cmp(x));
    ws.retain(|w| !w.is_zero());
    PhiInvariant { sorted_weights: ws }
}

pub fn elementarily_equivalent(a: &FiniteProbabilityAlgebra, b: &FiniteProbabilityAlgebra) -> bool {
    phi_invariant(a) == phi_invariant(b)
}

/// A weight-preserving bijection from the atoms of `a` to those of `b`,
/// found by backtracking. Each step checks that the atoms still to be placed
/// with the current weight do not outnumber the unused targets of that
/// weight.
pub fn find_isomorphism(a: &FiniteProbabilityAlgebra, b: &FiniteProbabilityAlgebra) -> Option<Vec<usize>> {
    if a.atom_count() != b.atom_count() {
        return None;
    }
    let k = a.atom_count();
    let mut remaining: BTreeMap<&Rational, (usize, usize)> = BTreeMap::new();
    for w in a.weights() {
        remaining.entry(w).or_default().0 += 1;
    }
    for w in b.weights() {
        remaining.entry(w).or_default().1 += 1;
    }
    let mut image = vec![usize::MAX; k];
    let mut used = vec![false; k];
    if place(a, b, 0, &mut image, &mut used, &mut remaining) {
        Some(image)
    } else {
        None
    }
}

fn place<'w>(
    a: &'w FiniteProbabilityAlgebra,
    b: &'w FiniteProbabilityAlgebra,
    i: usize,
    image: &mut Vec<usize>,
    used: &mut Vec<bool>,
    remaining: &mut BTreeMap<&'w Rational, (usize, usize)>,
) -> bool {
    if i == a.atom_count() {
        return true;
    }
    let w = a.weight(i);
    let (need, have) = remaining[w];
    if need > have {
        return false;
    }
    for j in 0..b.atom_count() {
        if used[j] || b.weight(j) != w {
            continue;
        }
        used[j] = true;
        image[i] = j;
        remaining.insert(w, (need - 1, have - 1));
        if place(a, b, i + 1, image, used, remaining) {
            return true;
        }
        remaining.insert(w, (need, have));
        used[j] = false;
    }
    image[i] = usize::MAX;
    false
}
