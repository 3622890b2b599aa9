//! Conditional entropy of finite subalgebras (natural logarithm).
//!
//! Entropies are `f64`; every bound they are compared against is kept as
//! an exact [`Rational`] and the tolerance [`TOLERANCE`] is applied to the
//! float side only.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::algebra::{Event, FiniteProbabilityAlgebra, Subalgebra};
use crate::conditional::{cond_prob, norm_sq};
use crate::error::{Error, Result};
use crate::independence::subalgebras_independent;
use crate::rational::{to_f64, Rational};
use crate::types::forking_distance;

pub const TOLERANCE: f64 = 1e-12;

/// `H(A/C) = -sum_j mu(e_j) sum_i p_ij ln p_ij` with
/// `p_ij = mu(a_i n e_j) / mu(e_j)`, and `0 ln 0 = 0`.
pub fn cond_entropy(alg: &FiniteProbabilityAlgebra, a: &Subalgebra, c: &Subalgebra) -> Result<f64> {
    alg.owns_subalgebra(a)?;
    alg.owns_subalgebra(c)?;
    let mut h = 0.0;
    for e in c.blocks() {
        let me = alg.measure_of(e);
        for blk in a.blocks() {
            let m = alg.measure_of(&blk.intersection(e));
            if m.is_zero() {
                continue;
            }
            let p = &m / &me;
            h -= to_f64(&m) * to_f64(&p).ln();
        }
    }
    // Rounding can leave -0.0 or a tiny negative value when every p is 1.
    Ok(h.max(0.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainRule {
    /// `H(A v C / E)`.
    pub lhs: f64,
    /// `H(A/E) + H(C / A v E)`.
    pub rhs: f64,
    pub error: f64,
}

impl ChainRule {
    pub fn holds(&self) -> bool {
        self.error <= TOLERANCE
    }
}

pub fn chain_rule_check(alg: &FiniteProbabilityAlgebra, a: &Subalgebra, c: &Subalgebra, e: &Subalgebra) -> Result<ChainRule> {
    let lhs = cond_entropy(alg, &a.join(c)?, e)?;
    let rhs = cond_entropy(alg, a, e)? + cond_entropy(alg, c, &a.join(e)?)?;
    Ok(ChainRule {
        lhs,
        rhs,
        error: (lhs - rhs).abs(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyDrop {
    /// `H(A/E) - H(A/D)`.
    pub gap: f64,
    /// `1/2 sum_j (||P(a_j|D)||^2 - ||P(a_j|E)||^2)` over the atoms `a_j` of `A`.
    pub rhs: Rational,
    /// `A` is independent from `D` over `E`.
    pub independent: bool,
}

impl EntropyDrop {
    /// `gap >= rhs >= 0`, and `gap = 0` exactly when independent.
    pub fn holds(&self) -> bool {
        let rhs = to_f64(&self.rhs);
        let zero_gap = self.gap.abs() <= TOLERANCE;
        self.gap + TOLERANCE >= rhs && self.rhs >= Rational::zero() && zero_gap == self.independent
    }
}

pub fn entropy_drop(alg: &FiniteProbabilityAlgebra, a: &Subalgebra, e: &Subalgebra, d: &Subalgebra) -> Result<EntropyDrop> {
    alg.owns_subalgebra(e)?;
    alg.owns_subalgebra(d)?;
    if !e.is_coarsening_of(d) {
        return Err(Error::NotCoarsening);
    }
    let gap = cond_entropy(alg, a, e)? - cond_entropy(alg, a, d)?;
    let mut sum = Rational::zero();
    for aj in a.block_events() {
        sum += norm_sq(alg, &cond_prob(alg, &aj, d)?)? - norm_sq(alg, &cond_prob(alg, &aj, e)?)?;
    }
    Ok(EntropyDrop {
        gap,
        rhs: sum / Rational::from_integer(BigInt::from(2)),
        independent: subalgebras_independent(alg, a, d, e),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForkingGap {
    pub eps: Rational,
    /// Distance of `tp(a/D)` from the non-forking extension of `tp(a/E)`.
    pub distance: Rational,
    pub forks: bool,
    /// `H(a#/E)` and `H(a#/D)` for the subalgebra `a#` generated by `a`.
    pub h_e: f64,
    pub h_d: f64,
    /// `eps^2 / 2`.
    pub threshold: Rational,
}

impl ForkingGap {
    pub fn gap(&self) -> f64 {
        self.h_e - self.h_d
    }

    /// Vacuous without an `eps`-fork; otherwise `H(a#/E) > H(a#/D) + eps^2/2`.
    pub fn holds(&self) -> bool {
        !self.forks || self.gap() + TOLERANCE > to_f64(&self.threshold)
    }
}

pub fn entropy_forking_gap(
    alg: &FiniteProbabilityAlgebra,
    a: &[Event],
    e: &Subalgebra,
    d: &Subalgebra,
    eps: &Rational,
) -> Result<ForkingGap> {
    if !e.is_coarsening_of(d) {
        return Err(Error::NotCoarsening);
    }
    let distance = forking_distance(alg, a, e, d)?;
    let sharp = alg.generated_subalgebra(a)?;
    Ok(ForkingGap {
        eps: eps.clone(),
        forks: distance > *eps,
        distance,
        h_e: cond_entropy(alg, &sharp, e)?,
        h_d: cond_entropy(alg, &sharp, d)?,
        threshold: eps * eps / Rational::from_integer(BigInt::from(2)),
    })
}
