//! Partitions of 1 into `n` labelled parts, read as random variables with
//! values `1/n, 2/n, .., 1`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::algebra::{Event, FiniteProbabilityAlgebra, Subalgebra};
use crate::conditional::StepFunction;
use crate::error::{Error, Result};
use crate::rational::{fmt_ratio, in_unit_interval, Rational};

/// `n` pairwise disjoint events covering 1; empty parts are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RVPartition {
    parts: Vec<Event>,
}

impl RVPartition {
    pub fn new(alg: &FiniteProbabilityAlgebra, parts: Vec<Event>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::NotAPartition("no parts".into()));
        }
        alg.check_partition(&parts)?;
        Ok(RVPartition { parts })
    }

    pub fn n(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[Event] {
        &self.parts
    }

    /// `f_E = sum_i (i/n) chi_{E_i}`, over the subalgebra of the parts.
    pub fn step_function(&self, alg: &FiniteProbabilityAlgebra) -> Result<StepFunction> {
        let base = Subalgebra::from_partition(alg, &self.parts)?;
        let n = self.n() as i64;
        let values = base
            .blocks()
            .iter()
            .map(|b| {
                let first = b.first().expect("blocks are nonempty");
                let i = self.parts.iter().position(|p| p.contains(first)).expect("parts cover") as i64;
                Rational::new(BigInt::from(i + 1), BigInt::from(n))
            })
            .collect();
        StepFunction::new(base, values)
    }
}

fn same_n(e: &RVPartition, f: &RVPartition) -> Result<()> {
    if e.n() != f.n() {
        return Err(Error::LengthMismatch(e.n(), f.n()));
    }
    Ok(())
}

/// `(1/n) sum_{i,j} |i-j| mu(E_i n F_j)`, the `L_1` distance of `f_E` and `f_F`.
pub fn rho_n(alg: &FiniteProbabilityAlgebra, e: &RVPartition, f: &RVPartition) -> Result<Rational> {
    same_n(e, f)?;
    let mut total = Rational::zero();
    for (i, a) in e.parts.iter().enumerate() {
        for (j, b) in f.parts.iter().enumerate() {
            if i != j {
                total += alg.mu(&alg.meet(a, b)?)? * Rational::from_integer(BigInt::from(i.abs_diff(j)));
            }
        }
    }
    Ok(total / Rational::from_integer(BigInt::from(e.n())))
}

/// `1/2 sum_i mu(E_i sym-diff F_i)`.
pub fn dp_rv(alg: &FiniteProbabilityAlgebra, e: &RVPartition, f: &RVPartition) -> Result<Rational> {
    same_n(e, f)?;
    let mut total = Rational::zero();
    for (a, b) in e.parts.iter().zip(&f.parts) {
        total += alg.dist(a, b)?;
    }
    Ok(total / Rational::from_integer(BigInt::from(2)))
}

/// Merges consecutive pairs of parts: `(E_1 u E_2, .., E_{2m-1} u E_{2m})`.
pub fn project_pi(alg: &FiniteProbabilityAlgebra, e: &RVPartition) -> Result<RVPartition> {
    if e.n() % 2 != 0 {
        return Err(Error::OddLength(e.n()));
    }
    let parts = e
        .parts
        .chunks(2)
        .map(|p| alg.join(&p[0], &p[1]))
        .collect::<Result<Vec<_>>>()?;
    Ok(RVPartition { parts })
}

/// `E_j = f^-1(I_j)` for the dyadic intervals `I_1 = [0, 2^-d]` and
/// `I_j = ((j-1) 2^-d, j 2^-d]`.
pub fn dyadic_approx(alg: &FiniteProbabilityAlgebra, f: &StepFunction, depth: u32) -> Result<RVPartition> {
    alg.owns_subalgebra(f.base())?;
    if depth == 0 || depth > 20 {
        return Err(Error::ValueOutOfRange(format!("depth {depth}")));
    }
    if let Some(v) = f.values().iter().find(|v| !in_unit_interval(v)) {
        return Err(Error::ValueOutOfRange(fmt_ratio(v)));
    }
    let n = 1usize << depth;
    let mut members = vec![Vec::new(); n];
    for (b, v) in f.base().blocks().iter().zip(f.values()) {
        let j = dyadic_index(v, n);
        members[j - 1].extend(b.iter());
    }
    let parts = members.into_iter().map(|m| alg.event(m)).collect::<Result<_>>()?;
    Ok(RVPartition { parts })
}

/// 1-based `j` with `v` in `I_j` for `n` intervals.
fn dyadic_index(v: &Rational, n: usize) -> usize {
    let scaled = v * Rational::from_integer(BigInt::from(n));
    let j: usize = scaled.ceil().to_integer().try_into().expect("v in [0,1]");
    j.max(1)
}

/// `f <= g` at every atom.
pub fn pointwise_le(alg: &FiniteProbabilityAlgebra, f: &StepFunction, g: &StepFunction) -> bool {
    (0..alg.atom_count()).all(|x| f.at_atom(x) <= g.at_atom(x))
}

/// `g - f` at every atom lies in `[0, bound]`.
pub fn pointwise_gap_within(alg: &FiniteProbabilityAlgebra, f: &StepFunction, g: &StepFunction, bound: &Rational) -> bool {
    (0..alg.atom_count()).all(|x| {
        let d = g.at_atom(x) - f.at_atom(x);
        !d.is_negative() && d <= *bound
    })
}

/// `1/m` for a partition of length `2m`: the bound on `f_pi(E) - f_E`.
pub fn pi_gap_bound(n: usize) -> Rational {
    Rational::new(BigInt::from(2), BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::uniform_algebra;
    use crate::conditional::l1_distance;
    use crate::rational::{int, rat};

    #[test]
    fn swap_example() {
        let alg = uniform_algebra(2);
        let e = RVPartition::new(&alg, vec![alg.atom(0), alg.atom(1)]).unwrap();
        let f = RVPartition::new(&alg, vec![alg.atom(1), alg.atom(0)]).unwrap();
        assert_eq!(rho_n(&alg, &e, &f).unwrap(), rat(1, 2));
        assert_eq!(dp_rv(&alg, &e, &f).unwrap(), int(1));
        assert_eq!(rho_n(&alg, &e, &e).unwrap(), int(0));
        assert_eq!(dp_rv(&alg, &e, &e).unwrap(), int(0));
        let fe = e.step_function(&alg).unwrap();
        let ff = f.step_function(&alg).unwrap();
        assert_eq!(l1_distance(&alg, &fe, &ff).unwrap(), rat(1, 2));
    }

    #[test]
    fn length_errors() {
        let alg = uniform_algebra(2);
        let e = RVPartition::new(&alg, vec![alg.atom(0), alg.atom(1)]).unwrap();
        let f = RVPartition::new(&alg, vec![alg.full()]).unwrap();
        assert_eq!(rho_n(&alg, &e, &f).unwrap_err(), Error::LengthMismatch(2, 1));
        assert_eq!(project_pi(&alg, &f).unwrap_err(), Error::OddLength(1));
    }

    #[test]
    fn projection_merges_pairs() {
        let alg = uniform_algebra(4);
        let e = RVPartition::new(&alg, (0..4).map(|i| alg.atom(i)).collect()).unwrap();
        let p = project_pi(&alg, &e).unwrap();
        assert_eq!(p.parts(), &[alg.event([0, 1]).unwrap(), alg.event([2, 3]).unwrap()]);

        let two = uniform_algebra(2);
        let low = RVPartition::new(&two, vec![two.full(), two.empty()]).unwrap();
        let f = low.step_function(&two).unwrap();
        let g = project_pi(&two, &low).unwrap().step_function(&two).unwrap();
        assert_eq!(f.values(), &[rat(1, 2)]);
        assert_eq!(g.values(), &[int(1)]);
        assert_eq!(l1_distance(&two, &f, &g).unwrap(), rat(1, 2));
    }

    #[test]
    fn dyadic_examples() {
        let alg = FiniteProbabilityAlgebra::from_weights(vec![rat(1, 2), rat(1, 2)]).unwrap();
        let f = StepFunction::new(Subalgebra::full(&alg), vec![int(1), rat(1, 2)]).unwrap();
        let e = dyadic_approx(&alg, &f, 1).unwrap();
        assert_eq!(e.parts(), &[alg.atom(1), alg.atom(0)]);
        assert_eq!(l1_distance(&alg, &e.step_function(&alg).unwrap(), &f).unwrap(), int(0));
        let one = StepFunction::constant(Subalgebra::trivial(&alg), int(1));
        let e = dyadic_approx(&alg, &one, 3).unwrap();
        assert_eq!(e.parts()[7], alg.full());
        let zero = StepFunction::constant(Subalgebra::trivial(&alg), int(0));
        assert_eq!(dyadic_approx(&alg, &zero, 2).unwrap().parts()[0], alg.full());
        let bad = StepFunction::constant(Subalgebra::trivial(&alg), int(2));
        assert!(matches!(dyadic_approx(&alg, &bad, 2), Err(Error::ValueOutOfRange(_))));
    }

    #[test]
    fn dyadic_boundaries_are_right_closed() {
        assert_eq!(dyadic_index(&rat(1, 4), 4), 1);
        assert_eq!(dyadic_index(&rat(1, 3), 4), 2);
        assert_eq!(dyadic_index(&rat(1, 2), 4), 2);
        assert_eq!(dyadic_index(&int(0), 4), 1);
        assert_eq!(dyadic_index(&int(1), 4), 4);
    }
}
