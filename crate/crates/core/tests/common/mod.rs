#![allow(dead_code)]

use num_bigint::BigInt;
use probalg::{Event, FiniteProbabilityAlgebra, Rational, Subalgebra};
use proptest::prelude::*;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn algebra(w: &[(i64, i64)]) -> FiniteProbabilityAlgebra {
    FiniteProbabilityAlgebra::from_weights(w.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap()
}

/// (1/2, 1/4, 1/4) on atoms x, y, z.
pub fn xyz() -> FiniteProbabilityAlgebra {
    let w = vec![rat(1, 2), rat(1, 4), rat(1, 4)];
    FiniteProbabilityAlgebra::new(w, Some(vec!["x".into(), "y".into(), "z".into()])).unwrap()
}

pub fn ev(alg: &FiniteProbabilityAlgebra, atoms: &[usize]) -> Event {
    alg.event(atoms.iter().copied()).unwrap()
}

pub fn blocks(alg: &FiniteProbabilityAlgebra, parts: &[&[usize]]) -> Subalgebra {
    let events: Vec<Event> = parts.iter().map(|p| ev(alg, p)).collect();
    Subalgebra::from_partition(alg, &events).unwrap()
}

/// Integer numerators normalized to total mass 1.
pub fn from_units(units: &[u64]) -> FiniteProbabilityAlgebra {
    let total: u64 = units.iter().sum();
    let w = units.iter().map(|&u| rat(u as i64, total as i64)).collect();
    FiniteProbabilityAlgebra::from_weights(w).unwrap()
}

pub fn mask_event(alg: &FiniteProbabilityAlgebra, mask: u64) -> Event {
    let k = alg.atom_count();
    alg.event((0..k).filter(|i| mask >> i & 1 == 1)).unwrap()
}

/// Partition of the atoms into `n` labelled parts from per-atom labels.
pub fn labelled_partition(alg: &FiniteProbabilityAlgebra, labels: &[usize], n: usize) -> Vec<Event> {
    (0..n)
        .map(|p| alg.event((0..alg.atom_count()).filter(|&x| labels[x % labels.len()] % n == p)).unwrap())
        .collect()
}

pub fn subalgebra_from_labels(alg: &FiniteProbabilityAlgebra, labels: &[usize]) -> Subalgebra {
    let n = labels.iter().max().map_or(1, |m| m + 1);
    Subalgebra::from_partition(alg, &labelled_partition(alg, labels, n)).unwrap()
}

/// A random algebra together with a few per-atom label vectors for building
/// events, partitions and subalgebras.
#[derive(Clone, Debug)]
pub struct Instance {
    pub units: Vec<u64>,
    pub masks: Vec<u64>,
    pub labels: Vec<Vec<usize>>,
}

impl Instance {
    pub fn algebra(&self) -> FiniteProbabilityAlgebra {
        from_units(&self.units)
    }
}

pub fn instance(max_atoms: usize) -> impl Strategy<Value = Instance> {
    prop::collection::vec(1u64..=9, 1..=max_atoms).prop_flat_map(|units| {
        let k = units.len();
        let full = (1u64 << k) - 1;
        (
            Just(units),
            prop::collection::vec(0..=full, 4),
            prop::collection::vec(prop::collection::vec(0usize..4, k), 4),
        )
            .prop_map(|(units, masks, labels)| Instance { units, masks, labels })
    })
}
