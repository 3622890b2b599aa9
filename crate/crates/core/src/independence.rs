//! Conditional independence over finite subalgebras and independent
//! amalgamation.

use num_traits::{Signed, Zero};

use crate::algebra::{Event, Extension, FiniteProbabilityAlgebra, Refinement, Subalgebra};
use crate::atomset::AtomSet;
use crate::conditional::{cond_prob, l1_distance, norm_sq};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// `max |mu(A n B n C) mu(C) - mu(A n C) mu(B n C)|` over atoms `A` of
/// `<S>`, `B` of `<T>` and `C` of `<W>`.
pub fn independence_defect(alg: &FiniteProbabilityAlgebra, s: &[Event], t: &[Event], w: &[Event]) -> Result<Rational> {
    let sa = alg.generated_subalgebra(s)?;
    let ta = alg.generated_subalgebra(t)?;
    let wa = alg.generated_subalgebra(w)?;
    Ok(subalgebra_defect(alg, &sa, &ta, &wa))
}

/// [`independence_defect`] for subalgebras given directly.
pub fn subalgebra_defect(alg: &FiniteProbabilityAlgebra, s: &Subalgebra, t: &Subalgebra, w: &Subalgebra) -> Rational {
    let mu = |x: &AtomSet| alg.measure_of(x);
    let mut worst = Rational::zero();
    for c in w.blocks() {
        let mc = mu(c);
        for a in s.blocks() {
            let ac = a.intersection(c);
            let mac = mu(&ac);
            for b in t.blocks() {
                let lhs = mu(&ac.intersection(b)) * &mc;
                let rhs = &mac * mu(&b.intersection(c));
                let d = (lhs - rhs).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
    }
    worst
}

/// `S` and `T` are independent over `W`.
pub fn independent(alg: &FiniteProbabilityAlgebra, s: &[Event], t: &[Event], w: &[Event]) -> Result<bool> {
    Ok(independence_defect(alg, s, t, w)?.is_zero())
}

pub fn subalgebras_independent(alg: &FiniteProbabilityAlgebra, s: &Subalgebra, t: &Subalgebra, w: &Subalgebra) -> bool {
    subalgebra_defect(alg, s, t, w).is_zero()
}

/// The four equivalent forms of independence of `S` and `T` over `W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterizationReport {
    pub defect: Rational,
    /// The product identity holds on every triple of atoms.
    pub product: bool,
    /// `P(A|<WT>) = P(A|<W>)` for every atom `A` of `<S>`.
    pub same_conditional: bool,
    /// `P(A|<WT>)` is constant on each block of `<W>`.
    pub w_measurable: bool,
    /// `||P(A|<WT>)||_2 = ||P(A|<W>)||_2`.
    pub equal_norms: bool,
}

impl CharacterizationReport {
    pub fn conditions(&self) -> [bool; 4] {
        [self.product, self.same_conditional, self.w_measurable, self.equal_norms]
    }

    /// All four conditions agree.
    pub fn consistent(&self) -> bool {
        let c = self.conditions();
        c.iter().all(|&x| x == c[0])
    }
}

pub fn characterization_report(
    alg: &FiniteProbabilityAlgebra,
    s: &[Event],
    t: &[Event],
    w: &[Event],
) -> Result<CharacterizationReport> {
    let defect = independence_defect(alg, s, t, w)?;
    let sa = alg.generated_subalgebra(s)?;
    let wa = alg.generated_subalgebra(w)?;
    let wt: Vec<Event> = w.iter().chain(t).cloned().collect();
    let wta = alg.generated_subalgebra(&wt)?;

    let (mut same, mut measurable, mut norms) = (true, true, true);
    for a in sa.block_events() {
        let big = cond_prob(alg, &a, &wta)?;
        let small = cond_prob(alg, &a, &wa)?;
        same &= l1_distance(alg, &big, &small)?.is_zero();
        measurable &= wa.blocks().iter().all(|blk| {
            let mut vals = blk.iter().map(|x| big.at_atom(x));
            let first = vals.next();
            vals.all(|v| Some(v) == first)
        });
        norms &= norm_sq(alg, &big)? == norm_sq(alg, &small)?;
    }
    Ok(CharacterizationReport {
        product: defect.is_zero(),
        defect,
        same_conditional: same,
        w_measurable: measurable,
        equal_norms: norms,
    })
}

/// Result of independent amalgamation.
#[derive(Clone, Debug)]
pub struct IndependentCopy {
    pub extension: Extension,
    /// `E_1, .., E_m` in the new algebra.
    pub copies: Vec<Event>,
}

/// Splits every atom `x` into pieces of weight `mu(x) f_i(x)` with
/// `f_i = P(A_i|C)`, and collects the `i`-th pieces into `E_i`.
///
/// Then `P(E_i|C') = P(A_i'|C')` and `E` is independent from `D'` over `C'`.
/// `D` only needs to refine `C`; the construction does not depend on it.
pub fn extend_with_independent_copy(
    alg: &FiniteProbabilityAlgebra,
    a_atoms: &[Event],
    c: &Subalgebra,
    d: &Subalgebra,
) -> Result<IndependentCopy> {
    if a_atoms.is_empty() {
        return Err(Error::NotAPartition("no parts".into()));
    }
    alg.check_partition(a_atoms)?;
    alg.owns_subalgebra(c)?;
    alg.owns_subalgebra(d)?;
    if !c.is_coarsening_of(d) {
        return Err(Error::NotCoarsening);
    }
    let fs = a_atoms
        .iter()
        .map(|a| cond_prob(alg, a, c))
        .collect::<Result<Vec<_>>>()?;
    let mut r = Refinement::new(alg);
    for x in 0..alg.atom_count() {
        for (i, f) in fs.iter().enumerate() {
            r.add(x, alg.weight(x) * f.at_atom(x), i);
        }
    }
    let (extension, tagged) = r.build(a_atoms.len())?;
    let copies = tagged.into_iter().map(|s| extension.algebra.wrap(s)).collect();
    Ok(IndependentCopy { extension, copies })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::uniform_algebra;
    use crate::rational::{int, rat};

    fn xyz() -> FiniteProbabilityAlgebra {
        FiniteProbabilityAlgebra::new(
            vec![rat(1, 2), rat(1, 4), rat(1, 4)],
            Some(vec!["x".into(), "y".into(), "z".into()]),
        )
        .unwrap()
    }

    #[test]
    fn product_algebra_is_independent() {
        let alg = uniform_algebra(4);
        let first = alg.event([0, 1]).unwrap();
        let second = alg.event([0, 2]).unwrap();
        assert!(independent(&alg, &[first.clone()], &[second.clone()], &[]).unwrap());
        let r = characterization_report(&alg, &[first], &[second], &[]).unwrap();
        assert_eq!(r.conditions(), [true; 4]);
    }

    #[test]
    fn dependent_example() {
        let alg = xyz();
        let s = [alg.atom(0)];
        let t = [alg.event([0, 1]).unwrap()];
        assert!(!independent(&alg, &s, &t, &[]).unwrap());
        assert_eq!(independence_defect(&alg, &s, &t, &[]).unwrap(), rat(1, 8));
        assert_eq!(independence_defect(&alg, &t, &s, &[]).unwrap(), rat(1, 8));
        let r = characterization_report(&alg, &s, &t, &[]).unwrap();
        assert_eq!(r.conditions(), [false; 4]);
    }

    #[test]
    fn full_event_is_independent_of_everything() {
        let alg = xyz();
        let w = [alg.atom(2)];
        assert!(independent(&alg, &[alg.atom(0)], &[alg.full()], &w).unwrap());
    }

    #[test]
    fn extension_example() {
        let alg = xyz();
        let a = [alg.event([0, 1]).unwrap(), alg.atom(2)];
        let c = Subalgebra::trivial(&alg);
        let out = extend_with_independent_copy(&alg, &a, &c, &Subalgebra::full(&alg)).unwrap();
        let new = &out.extension.algebra;
        assert_eq!(
            new.weights(),
            &[rat(3, 8), rat(1, 8), rat(3, 16), rat(1, 16), rat(3, 16), rat(1, 16)]
        );
        let e1 = &out.copies[0];
        assert_eq!(new.mu(e1).unwrap(), rat(3, 4));
        let x_img = out.extension.image(&alg.atom(0)).unwrap();
        assert_eq!(new.mu(&new.meet(e1, &x_img).unwrap()).unwrap(), rat(3, 8));
        assert!(out.extension.is_measure_preserving(&alg));
    }

    #[test]
    fn measurable_parts_copy_themselves() {
        let alg = xyz();
        let c = alg.generated_subalgebra(&[alg.atom(0)]).unwrap();
        let a = [alg.atom(0), alg.event([1, 2]).unwrap()];
        let out = extend_with_independent_copy(&alg, &a, &c, &Subalgebra::full(&alg)).unwrap();
        assert_eq!(out.extension.algebra.weights(), alg.weights());
        assert_eq!(out.copies, out.extension.image_all(&a).unwrap());

        let whole = extend_with_independent_copy(&alg, &[alg.full()], &c, &c).unwrap();
        assert_eq!(whole.copies, vec![whole.extension.algebra.full()]);
        assert_eq!(whole.extension.algebra.mu(&whole.copies[0]).unwrap(), int(1));
    }

    #[test]
    fn extension_errors() {
        let alg = xyz();
        let c = alg.generated_subalgebra(&[alg.atom(0)]).unwrap();
        let t = Subalgebra::trivial(&alg);
        assert_eq!(
            extend_with_independent_copy(&alg, &[alg.full()], &c, &t).unwrap_err(),
            Error::NotCoarsening
        );
        assert!(matches!(
            extend_with_independent_copy(&alg, &[alg.full(), alg.atom(0)], &t, &c),
            Err(Error::NotAPartition(_))
        ));
    }
}
