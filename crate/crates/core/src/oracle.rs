//! Brute-force search over realizations of a type, used as an independent
//! check on the closed-form distances in [`crate::types`].
//!
//! A realization of `tp(b/C)` in a refinement of the algebra is determined by
//! how much of each atom goes into each cell `b'^s`; it realizes the type iff
//! every `C`-block receives exactly `mu(b^s n f)` in cell `s`. The search
//! splits atoms only into multiples of `1 / (L r)`, where `L` is the common
//! denominator of the weights and `r` the split factor, and enumerates every
//! such assignment. Per block it keeps the Pareto set of per-coordinate
//! distance vectors; blocks are combined by Minkowski sum.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::algebra::{Event, FiniteProbabilityAlgebra, Subalgebra};
use crate::error::{Error, Result};
use crate::rational::{lcm_of_denominators, Rational};

/// Above this many units in total the search refuses to run.
pub const MAX_UNITS: u64 = 256;
/// Bound on DP states per block.
pub const MAX_STATES: usize = 200_000;

type Vector = Vec<u32>;

fn insert_pareto(set: &mut Vec<Vector>, v: Vector) {
    if set.iter().any(|w| w.iter().zip(&v).all(|(a, b)| a <= b)) {
        return;
    }
    set.retain(|w| !v.iter().zip(w).all(|(a, b)| a <= b));
    set.push(v);
}

struct Problem {
    /// Label of each atom: the `a`-cell it lies in.
    labels: Vec<usize>,
    /// Units per atom.
    units: Vec<u32>,
    /// `cost[sigma][s]`: distance added per unit of a `sigma`-atom sent to cell `s`.
    cost: Vec<Vec<Vector>>,
    dims: usize,
}

impl Problem {
    fn block(&self, atoms: &[usize], targets: Vec<u32>) -> Result<Vec<Vector>> {
        let mut states: HashMap<Vec<u32>, Vec<Vector>> = HashMap::new();
        states.insert(targets, vec![vec![0; self.dims]]);
        for &x in atoms {
            let mut next: HashMap<Vec<u32>, Vec<Vector>> = HashMap::new();
            let sigma = self.labels[x];
            for (rem, set) in &states {
                let mut take = vec![0u32; rem.len()];
                self.compose(rem, self.units[x], 0, &mut take, &mut |t| {
                    let new_rem: Vec<u32> = rem.iter().zip(t).map(|(r, k)| r - k).collect();
                    let mut add = vec![0u32; self.dims];
                    for (s, &k) in t.iter().enumerate() {
                        if k > 0 {
                            for (a, c) in add.iter_mut().zip(&self.cost[sigma][s]) {
                                *a += c * k;
                            }
                        }
                    }
                    let slot = next.entry(new_rem).or_default();
                    for v in set {
                        insert_pareto(slot, v.iter().zip(&add).map(|(a, b)| a + b).collect());
                    }
                });
            }
            if next.len() > MAX_STATES {
                return Err(Error::SearchTooLarge(format!("{} states in one block", next.len())));
            }
            states = next;
        }
        Ok(states.into_iter().filter(|(r, _)| r.iter().all(|&k| k == 0)).flat_map(|(_, s)| s).collect())
    }

    /// Calls `f` on every `take` with `take[s] <= rem[s]` and sum `left`.
    fn compose(&self, rem: &[u32], left: u32, s: usize, take: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if s + 1 == rem.len() {
            if left <= rem[s] {
                take[s] = left;
                f(take);
                take[s] = 0;
            }
            return;
        }
        let room: u32 = rem[s + 1..].iter().sum();
        let lo = left.saturating_sub(room);
        for k in lo..=left.min(rem[s]) {
            take[s] = k;
            self.compose(rem, left - k, s + 1, take, f);
        }
        take[s] = 0;
    }
}

fn units_of(r: &Rational, scale: &BigInt) -> u32 {
    let v = r * Rational::from_integer(scale.clone());
    assert!(v.is_integer(), "mass is a multiple of the unit");
    v.to_integer().to_u32().expect("unit count fits")
}

/// Minimum over realizations on the grid of `max_i d(a_i, b_i')`, where
/// `label_a`/`label_b` give the cell of each atom under `a` and `b`.
#[allow(clippy::too_many_arguments)]
fn run(
    alg: &FiniteProbabilityAlgebra,
    c: &Subalgebra,
    label_a: Vec<usize>,
    label_b: &[usize],
    cells: usize,
    cost: Vec<Vec<Vector>>,
    dims: usize,
    split: u32,
) -> Result<Rational> {
    if split == 0 {
        return Err(Error::ValueOutOfRange("split factor 0".into()));
    }
    let scale = lcm_of_denominators(alg.weights()) * BigInt::from(split);
    if scale > BigInt::from(MAX_UNITS) {
        return Err(Error::SearchTooLarge(format!("{scale} units")));
    }
    let units: Vec<u32> = alg.weights().iter().map(|w| units_of(w, &scale)).collect();
    let problem = Problem {
        labels: label_a,
        units,
        cost,
        dims,
    };
    let mut total: Vec<Vector> = vec![vec![0; dims]];
    for block in c.blocks() {
        let atoms: Vec<usize> = block.iter().collect();
        let mut targets = vec![0u32; cells];
        for &x in &atoms {
            targets[label_b[x]] += problem.units[x];
        }
        let set = problem.block(&atoms, targets)?;
        let mut next = Vec::new();
        for v in &total {
            for w in &set {
                insert_pareto(&mut next, v.iter().zip(w).map(|(a, b)| a + b).collect());
            }
        }
        total = next;
    }
    let best = total
        .iter()
        .map(|v| v.iter().copied().max().unwrap_or(0))
        .min()
        .expect("some realization exists");
    Ok(Rational::new(BigInt::from(best), scale))
}

fn part_labels(alg: &FiniteProbabilityAlgebra, parts: &[Event]) -> Vec<usize> {
    (0..alg.atom_count())
        .map(|x| parts.iter().position(|p| p.contains(x)).expect("partition covers"))
        .collect()
}

/// Smallest `max_i d(a_i, b_i')` over grid realizations `b'` of the type of
/// the partition `b` over `C`, in refinements splitting atoms into multiples
/// of `1/(L split)`.
pub fn partition_search(alg: &FiniteProbabilityAlgebra, a: &[Event], b: &[Event], c: &Subalgebra, split: u32) -> Result<Rational> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    alg.check_partition(a)?;
    alg.check_partition(b)?;
    alg.owns_subalgebra(c)?;
    let n = a.len();
    let cost = (0..n)
        .map(|sigma| {
            (0..n)
                .map(|s| {
                    let mut v = vec![0; n];
                    if sigma != s {
                        v[sigma] = 1;
                        v[s] = 1;
                    }
                    v
                })
                .collect()
        })
        .collect();
    let lb = part_labels(alg, b);
    run(alg, c, part_labels(alg, a), &lb, n, cost, n, split)
}

/// As [`partition_search`] for general `n`-tuples: the cells `b'^s` are
/// placed and coordinate `i` of `b'` is the union of cells with `s_i = +1`.
/// Every value found is attained, so it bounds the induced distance `d_n`
/// from above.
pub fn tuple_search(alg: &FiniteProbabilityAlgebra, a: &[Event], b: &[Event], c: &Subalgebra, split: u32) -> Result<Rational> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n > 4 {
        return Err(Error::SearchTooLarge(format!("arity {n}")));
    }
    alg.owns_subalgebra(c)?;
    let cells = 1usize << n;
    let label = |t: &[Event]| -> Result<Vec<usize>> {
        let map = alg.nonempty_cells(t)?;
        let mut out = vec![0; alg.atom_count()];
        for (s, atoms) in map {
            for x in atoms.iter() {
                out[x] = s as usize;
            }
        }
        Ok(out)
    };
    let cost = (0..cells)
        .map(|sigma| {
            (0..cells)
                .map(|s| (0..n).map(|i| ((sigma ^ s) >> (n - 1 - i) & 1) as u32).collect())
                .collect()
        })
        .collect();
    let lb = label(b)?;
    run(alg, c, label(a)?, &lb, cells, cost, n, split)
}

/// Minimum of [`tuple_search`] over split factors `1..=max_split`.
pub fn tuple_search_upto(alg: &FiniteProbabilityAlgebra, a: &[Event], b: &[Event], c: &Subalgebra, max_split: u32) -> Result<Rational> {
    let mut best: Option<Rational> = None;
    for r in 1..=max_split {
        let v = tuple_search(alg, a, b, c, r)?;
        best = Some(match best {
            Some(b) if b <= v => b,
            _ => v,
        });
    }
    best.ok_or_else(|| Error::ValueOutOfRange("split factor 0".into()))
}

/// Minimum of [`partition_search`] over split factors `1..=max_split`.
pub fn partition_search_upto(alg: &FiniteProbabilityAlgebra, a: &[Event], b: &[Event], c: &Subalgebra, max_split: u32) -> Result<Rational> {
    let mut best: Option<Rational> = None;
    for r in 1..=max_split {
        let v = partition_search(alg, a, b, c, r)?;
        best = Some(match best {
            Some(b) if b <= v => b,
            _ => v,
        });
    }
    best.ok_or_else(|| Error::ValueOutOfRange("split factor 0".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn xyz() -> FiniteProbabilityAlgebra {
        FiniteProbabilityAlgebra::from_weights(vec![rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap()
    }

    #[test]
    fn partition_example() {
        let alg = xyz();
        let t = Subalgebra::trivial(&alg);
        let a = vec![alg.atom(0), alg.event([1, 2]).unwrap()];
        let b = vec![alg.event([0, 1]).unwrap(), alg.atom(2)];
        for r in 1..=3 {
            assert_eq!(partition_search(&alg, &a, &b, &t, r).unwrap(), rat(1, 4));
        }
        assert_eq!(partition_search(&alg, &a, &a, &t, 2).unwrap(), int(0));
        let full = Subalgebra::full(&alg);
        assert_eq!(partition_search(&alg, &a, &b, &full, 1).unwrap(), rat(1, 4));
    }

    #[test]
    fn tuple_example() {
        let alg = xyz();
        let t = Subalgebra::trivial(&alg);
        assert_eq!(tuple_search(&alg, &[alg.event([0, 1]).unwrap()], &[alg.atom(0)], &t, 1).unwrap(), rat(1, 4));
        let c = alg.generated_subalgebra(&[alg.atom(0)]).unwrap();
        assert_eq!(tuple_search(&alg, &[alg.atom(1)], &[alg.atom(2)], &c, 1).unwrap(), int(0));
    }

    #[test]
    fn pareto_keeps_incomparable() {
        let mut s = Vec::new();
        insert_pareto(&mut s, vec![1, 3]);
        insert_pareto(&mut s, vec![3, 1]);
        insert_pareto(&mut s, vec![3, 3]);
        insert_pareto(&mut s, vec![1, 1]);
        assert_eq!(s, vec![vec![1, 1]]);
    }

    #[test]
    fn large_searches_are_refused() {
        let w: Vec<Rational> = vec![rat(1, 300), rat(299, 300)];
        let alg = FiniteProbabilityAlgebra::from_weights(w).unwrap();
        let t = Subalgebra::trivial(&alg);
        assert!(matches!(
            partition_search(&alg, &[alg.full()], &[alg.full()], &t, 1),
            Err(Error::SearchTooLarge(_))
        ));
    }
}
