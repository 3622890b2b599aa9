//! Step functions over finite subalgebras: conditional probability and
//! expectation, L¹/L² distances and level partitions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{Event, FiniteProbabilityAlgebra, Subalgebra};
use crate::atomset::AtomSet;
use crate::error::{Error, Result};
use crate::rational::{fmt_ratio, in_unit_interval, Rational};

/// One rational value per block of `base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFunction {
    base: Subalgebra,
    values: Vec<Rational>,
}

impl StepFunction {
    pub fn new(base: Subalgebra, values: Vec<Rational>) -> Result<Self> {
        if values.len() != base.block_count() {
            return Err(Error::LengthMismatch(values.len(), base.block_count()));
        }
        Ok(StepFunction { base, values })
    }

    pub fn constant(base: Subalgebra, c: Rational) -> Self {
        let values = vec![c; base.block_count()];
        StepFunction { base, values }
    }

    /// The zero function on the trivial subalgebra.
    pub fn zero(alg: &FiniteProbabilityAlgebra) -> Self {
        Self::constant(Subalgebra::trivial(alg), Rational::zero())
    }

    /// Indicator of an event, over the full algebra.
    pub fn indicator(alg: &FiniteProbabilityAlgebra, e: &Event) -> Result<Self> {
        alg.owns(e)?;
        let values = (0..alg.atom_count())
            .map(|a| if e.contains(a) { Rational::one() } else { Rational::zero() })
            .collect();
        Ok(StepFunction {
            base: Subalgebra::full(alg),
            values,
        })
    }

    pub fn base(&self) -> &Subalgebra {
        &self.base
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn at_atom(&self, atom: usize) -> &Rational {
        &self.values[self.base.block_of(atom)]
    }

    pub fn map(&self, f: impl Fn(&Rational) -> Rational) -> StepFunction {
        StepFunction {
            base: self.base.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    /// Same function re-expressed over a finer subalgebra.
    pub fn refine_to(&self, finer: &Subalgebra) -> Result<StepFunction> {
        if !self.base.is_coarsening_of(finer) {
            return Err(Error::NotCoarsening);
        }
        let values = finer
            .blocks()
            .iter()
            .map(|b| self.at_atom(b.first().expect("blocks are nonempty")).clone())
            .collect();
        Ok(StepFunction {
            base: finer.clone(),
            values,
        })
    }

    fn check(&self, alg: &FiniteProbabilityAlgebra) -> Result<()> {
        alg.owns_subalgebra(&self.base)
    }
}

fn block_measure(alg: &FiniteProbabilityAlgebra, b: &AtomSet) -> Rational {
    alg.measure_of(b)
}

/// `P(a|C)`: on block `E_j` the value `mu(a n E_j) / mu(E_j)`.
pub fn cond_prob(alg: &FiniteProbabilityAlgebra, a: &Event, c: &Subalgebra) -> Result<StepFunction> {
    alg.owns(a)?;
    alg.owns_subalgebra(c)?;
    let values = c
        .blocks()
        .iter()
        .map(|b| alg.measure_of(&b.intersection(a.members())) / block_measure(alg, b))
        .collect();
    Ok(StepFunction {
        base: c.clone(),
        values,
    })
}

/// `E(f|D)`: the measure-weighted average of `f` over each block of `D`,
/// taken on the common refinement of `D` and the base of `f`.
pub fn cond_expect(alg: &FiniteProbabilityAlgebra, f: &StepFunction, d: &Subalgebra) -> Result<StepFunction> {
    f.check(alg)?;
    alg.owns_subalgebra(d)?;
    let values = d
        .blocks()
        .iter()
        .map(|b| {
            let mass: Rational = b.iter().map(|x| alg.weight(x) * f.at_atom(x)).sum();
            mass / block_measure(alg, b)
        })
        .collect();
    Ok(StepFunction {
        base: d.clone(),
        values,
    })
}

/// `int |f - g| dmu`, computed cell by cell on the common refinement.
pub fn l1_distance(alg: &FiniteProbabilityAlgebra, f: &StepFunction, g: &StepFunction) -> Result<Rational> {
    f.check(alg)?;
    g.check(alg)?;
    let cells = f.base.join(&g.base)?;
    Ok(cells
        .blocks()
        .iter()
        .map(|b| {
            let x = b.first().expect("blocks are nonempty");
            block_measure(alg, b) * (f.at_atom(x) - g.at_atom(x)).abs()
        })
        .sum())
}

/// `int (f - g)^2 dmu` on the common refinement.
pub fn l2_distance_sq(alg: &FiniteProbabilityAlgebra, f: &StepFunction, g: &StepFunction) -> Result<Rational> {
    f.check(alg)?;
    g.check(alg)?;
    let cells = f.base.join(&g.base)?;
    Ok(cells
        .blocks()
        .iter()
        .map(|b| {
            let x = b.first().expect("blocks are nonempty");
            let diff = f.at_atom(x) - g.at_atom(x);
            block_measure(alg, b) * &diff * &diff
        })
        .sum())
}

/// `||f||_2^2`.
pub fn norm_sq(alg: &FiniteProbabilityAlgebra, f: &StepFunction) -> Result<Rational> {
    l2_distance_sq(alg, f, &StepFunction::zero(alg))
}

/// `int_e f dmu`.
pub fn integral(alg: &FiniteProbabilityAlgebra, f: &StepFunction, e: &Event) -> Result<Rational> {
    f.check(alg)?;
    alg.owns(e)?;
    Ok(e.atoms().map(|x| alg.weight(x) * f.at_atom(x)).sum())
}

/// 1-based index `j` of the interval `I_j` containing `v`, where
/// `I_j = [(j-1)/k, j/k)` for `j < k` and `I_k = [(k-1)/k, 1]`.
pub fn level_index(v: &Rational, k: usize) -> usize {
    if v.is_one() {
        return k;
    }
    let scaled = v * Rational::from_integer(BigInt::from(k));
    let j: usize = scaled.floor().to_integer().try_into().unwrap_or(usize::MAX);
    (j + 1).min(k)
}

/// The subalgebra generated by the level sets `f^-1(I_j)`.
pub fn level_partition(alg: &FiniteProbabilityAlgebra, f: &StepFunction, k: usize) -> Result<Subalgebra> {
    f.check(alg)?;
    if k == 0 {
        return Err(Error::ValueOutOfRange("k = 0".into()));
    }
    if let Some(v) = f.values.iter().find(|v| !in_unit_interval(v)) {
        return Err(Error::ValueOutOfRange(fmt_ratio(v)));
    }
    let mut levels: std::collections::BTreeMap<usize, AtomSet> = Default::default();
    for (b, v) in f.base.blocks().iter().zip(&f.values) {
        let slot = levels.entry(level_index(v, k)).or_default();
        *slot = slot.union(b);
    }
    Ok(Subalgebra::from_blocks_unchecked(alg, levels.into_values().collect()))
}

/// Least common denominator of a step function's values.
pub fn values_lcm(f: &StepFunction) -> BigInt {
    f.values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}
