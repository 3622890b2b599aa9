//! Seeded generators for algebras, events, subalgebras, chains, step
//! functions and quantifier-free formulas. All draw from a caller-supplied
//! RNG, so a fixed seed reproduces the same instances.

use num_bigint::BigInt;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{random_algebra_with, Event, FiniteProbabilityAlgebra, Subalgebra};
use crate::atomset::AtomSet;
use crate::conditional::StepFunction;
use crate::logic::{Formula, Term};
use crate::rational::Rational;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Algebra with `min..=max` atoms and weight numerators in `1..=max_units`.
pub fn algebra<R: Rng>(rng: &mut R, min: usize, max: usize, max_units: u64) -> FiniteProbabilityAlgebra {
    let n = rng.random_range(min..=max);
    random_algebra_with(rng, n, max_units)
}

/// Each atom independently with probability 1/2.
pub fn event<R: Rng>(rng: &mut R, alg: &FiniteProbabilityAlgebra) -> Event {
    alg.event((0..alg.atom_count()).filter(|_| rng.random_bool(0.5)))
        .expect("atoms are in range")
}

pub fn events<R: Rng>(rng: &mut R, alg: &FiniteProbabilityAlgebra, count: usize) -> Vec<Event> {
    (0..count).map(|_| event(rng, alg)).collect()
}

/// Partition of the atoms into `n` labelled parts; parts may be empty.
pub fn partition<R: Rng>(rng: &mut R, alg: &FiniteProbabilityAlgebra, n: usize) -> Vec<Event> {
    let mut members = vec![Vec::new(); n];
    for x in 0..alg.atom_count() {
        members[rng.random_range(0..n)].push(x);
    }
    members.into_iter().map(|m| alg.event(m).expect("atoms are in range")).collect()
}

/// A subalgebra with a random number of blocks.
pub fn subalgebra<R: Rng>(rng: &mut R, alg: &FiniteProbabilityAlgebra) -> Subalgebra {
    let k = rng.random_range(1..=alg.atom_count());
    let parts = partition(rng, alg, k);
    Subalgebra::from_partition(alg, &parts).expect("a partition")
}

/// A refinement of `s`: each block is split into up to three pieces.
pub fn refinement<R: Rng>(rng: &mut R, alg: &FiniteProbabilityAlgebra, s: &Subalgebra) -> Subalgebra {
    let mut blocks = Vec::new();
    for b in s.blocks() {
        let mut pieces = vec![AtomSet::new(); 3];
        for x in b.iter() {
            pieces[rng.random_range(0..3)].insert(x);
        }
        blocks.extend(pieces.into_iter().filter(|p| !p.is_empty()));
    }
    Subalgebra::from_blocks(alg, blocks).expect("a refinement of a partition")
}

/// `C` coarser than `D`.
pub fn coarsening_pair<R: Rng>(rng: &mut R, alg: &FiniteProbabilityAlgebra) -> (Subalgebra, Subalgebra) {
    let c = subalgebra(rng, alg);
    let d = refinement(rng, alg, &c);
    (c, d)
}

/// Increasing chain of `len` subalgebras starting from the trivial one.
/// Steps may repeat a subalgebra.
pub fn chain<R: Rng>(rng: &mut R, alg: &FiniteProbabilityAlgebra, len: usize) -> Vec<Subalgebra> {
    let mut out = vec![Subalgebra::trivial(alg)];
    while out.len() < len {
        let last = out.last().expect("nonempty");
        let next = if rng.random_bool(0.5) {
            last.join(&alg.generated_subalgebra(&[event(rng, alg)]).expect("own event"))
                .expect("same algebra")
        } else {
            let splittable: Vec<&AtomSet> = last.blocks().iter().filter(|b| b.len() > 1).collect();
            match splittable.choose(rng) {
                Some(b) => {
                    let x = b.iter().nth(rng.random_range(0..b.len())).expect("in range");
                    last.join(&alg.generated_subalgebra(&[alg.atom(x)]).expect("own event"))
                        .expect("same algebra")
                }
                None => last.clone(),
            }
        };
        out.push(next);
    }
    out
}

/// Rational in `[0,1]` with denominator `1..=max_den`.
pub fn unit_rational<R: Rng>(rng: &mut R, max_den: u64) -> Rational {
    let d = rng.random_range(1..=max_den);
    Rational::new(BigInt::from(rng.random_range(0..=d)), BigInt::from(d))
}

/// Step function over `s` with values in `[0,1]`.
pub fn step_function<R: Rng>(rng: &mut R, s: &Subalgebra, max_den: u64) -> StepFunction {
    let values = (0..s.block_count()).map(|_| unit_rational(rng, max_den)).collect();
    StepFunction::new(s.clone(), values).expect("one value per block")
}

/// Boolean term over `vars` of depth at most `depth`.
pub fn term<R: Rng>(rng: &mut R, vars: &[String], depth: usize) -> Term {
    if depth == 0 || rng.random_bool(0.3) {
        return match rng.random_range(0..10) {
            0 => Term::Zero,
            1 => Term::One,
            _ => Term::var(vars.choose(rng).expect("at least one variable")),
        };
    }
    match rng.random_range(0..3) {
        0 => term(rng, vars, depth - 1).not(),
        1 => term(rng, vars, depth - 1).meet(term(rng, vars, depth - 1)),
        _ => term(rng, vars, depth - 1).join(term(rng, vars, depth - 1)),
    }
}

/// Quantifier-free formula over `vars` using every connective, of depth at
/// most `depth`.
pub fn qf_formula<R: Rng>(rng: &mut R, vars: &[String], depth: usize) -> Formula {
    if depth == 0 || rng.random_bool(0.25) {
        return match rng.random_range(0..5) {
            0 => Formula::constant(unit_rational(rng, 6)),
            1 => Formula::D(term(rng, vars, 2), term(rng, vars, 2)),
            _ => Formula::mu(term(rng, vars, 3)),
        };
    }
    let choice = rng.random_range(0..6);
    let mut sub = || qf_formula(rng, vars, depth - 1);
    match choice {
        0 => sub().half(),
        1 => sub().monus(sub()),
        2 => sub().plus(sub()),
        3 => sub().abs_diff(sub()),
        4 => Formula::Min(vec![sub(), sub()]),
        _ => Formula::Max(vec![sub(), sub(), sub()]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_reproduce() {
        let vars = vec!["x".to_string(), "y".to_string()];
        let draw = |seed| {
            let mut r = rng(seed);
            let alg = algebra(&mut r, 2, 8, 9);
            let f = qf_formula(&mut r, &vars, 5);
            (alg.weights().to_vec(), f.to_string())
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
    }

    #[test]
    fn chains_increase() {
        let mut r = rng(1);
        for _ in 0..20 {
            let alg = algebra(&mut r, 1, 10, 9);
            let ch = chain(&mut r, &alg, 10);
            assert_eq!(ch.len(), 10);
            assert!(ch.windows(2).all(|w| w[0].is_coarsening_of(&w[1])));
            let (c, d) = coarsening_pair(&mut r, &alg);
            assert!(c.is_coarsening_of(&d));
            let p = partition(&mut r, &alg, 3);
            alg.check_partition(&p).unwrap();
        }
    }
}
