//! Finite probability algebras, their events and finite subalgebras.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atomset::AtomSet;
use crate::error::{Error, Result};
use crate::rational::{fmt_ratio, lcm_of_denominators, Rational};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

/// Largest tuple length for which the full list of `2^n` cells is built.
pub const MAX_MATERIALIZED_ARITY: usize = 20;

/// Atoms with strictly positive rational weights summing to one.
///
/// Every algebra gets a process-unique id; events and subalgebras remember
/// the id of the algebra they were built from and operations refuse to mix
/// them.
#[derive(Clone, Debug)]
pub struct FiniteProbabilityAlgebra {
    id: u64,
    weights: Vec<Rational>,
    labels: Vec<String>,
}

impl PartialEq for FiniteProbabilityAlgebra {
    /// Structural equality; the identity tag is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.weights == other.weights && self.labels == other.labels
    }
}

/// An element of a finite algebra: a set of atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    algebra: u64,
    members: AtomSet,
}

impl Event {
    pub fn algebra_id(&self) -> u64 {
        self.algebra
    }

    pub fn members(&self) -> &AtomSet {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.members.contains(atom)
    }

    pub fn atoms(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter()
    }
}

/// A finite boolean subalgebra, given by its atoms (blocks of a partition of
/// the atom index set). Blocks are ordered by least member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subalgebra {
    algebra: u64,
    blocks: Vec<AtomSet>,
    block_of: Vec<usize>,
}

impl FiniteProbabilityAlgebra {
    /// Validated constructor. Labels default to `a0, a1, ..`.
    pub fn new(weights: Vec<Rational>, labels: Option<Vec<String>>) -> Result<Self> {
        let alg = Self::unchecked(weights, labels)?;
        if alg.weights.is_empty() {
            return Err(Error::InvalidAlgebra("no atoms".into()));
        }
        if let Some(i) = alg.weights.iter().position(|w| !w.is_positive()) {
            return Err(Error::InvalidAlgebra(format!(
                "atom `{}` has non-positive weight {}",
                alg.labels[i],
                fmt_ratio(&alg.weights[i])
            )));
        }
        let total: Rational = alg.weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidAlgebra(format!(
                "weights sum to {}, not 1",
                fmt_ratio(&total)
            )));
        }
        Ok(alg)
    }

    pub fn from_weights(weights: Vec<Rational>) -> Result<Self> {
        Self::new(weights, None)
    }

    /// Builds the object without measure checks, so that
    /// [`verify_axioms`](Self::verify_axioms) can report on broken inputs.
    /// Labels must still be distinct and match the weight count.
    pub fn unchecked(weights: Vec<Rational>, labels: Option<Vec<String>>) -> Result<Self> {
        let labels = labels.unwrap_or_else(|| (0..weights.len()).map(|i| format!("a{i}")).collect());
        if labels.len() != weights.len() {
            return Err(Error::LengthMismatch(labels.len(), weights.len()));
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::InvalidAlgebra("atom labels are not distinct".into()));
        }
        Ok(FiniteProbabilityAlgebra {
            id: fresh_id(),
            weights,
            labels,
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn atom_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, atom: usize) -> &Rational {
        &self.weights[atom]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    // ---- events -------------------------------------------------------

    pub fn event<I: IntoIterator<Item = usize>>(&self, atoms: I) -> Result<Event> {
        let members: AtomSet = atoms.into_iter().collect();
        if members.bound() > self.atom_count() {
            return Err(Error::InvalidAlgebra(format!(
                "atom index {} out of range",
                members.bound() - 1
            )));
        }
        Ok(self.wrap(members))
    }

    pub fn event_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Event> {
        let mut members = AtomSet::new();
        for l in labels {
            let i = self
                .label_index(l.as_ref())
                .ok_or_else(|| Error::UnknownSymbol(l.as_ref().to_string()))?;
            members.insert(i);
        }
        Ok(self.wrap(members))
    }

    pub(crate) fn wrap(&self, members: AtomSet) -> Event {
        Event {
            algebra: self.id,
            members,
        }
    }

    pub fn empty(&self) -> Event {
        self.wrap(AtomSet::new())
    }

    pub fn full(&self) -> Event {
        self.wrap(AtomSet::full(self.atom_count()))
    }

    pub fn atom(&self, i: usize) -> Event {
        self.wrap(AtomSet::singleton(i))
    }

    pub fn owns(&self, e: &Event) -> Result<()> {
        if e.algebra == self.id {
            Ok(())
        } else {
            Err(Error::ForeignEvent)
        }
    }

    pub fn owns_all(&self, es: &[Event]) -> Result<()> {
        es.iter().try_for_each(|e| self.owns(e))
    }

    pub fn owns_subalgebra(&self, s: &Subalgebra) -> Result<()> {
        if s.algebra == self.id {
            Ok(())
        } else {
            Err(Error::ForeignEvent)
        }
    }

    pub(crate) fn measure_of(&self, atoms: &AtomSet) -> Rational {
        atoms.iter().map(|i| &self.weights[i]).sum()
    }

    /// Sum of the atom weights in `e`.
    pub fn mu(&self, e: &Event) -> Result<Rational> {
        self.owns(e)?;
        Ok(self.measure_of(&e.members))
    }

    /// `mu(e symmetric-difference f)`.
    pub fn dist(&self, e: &Event, f: &Event) -> Result<Rational> {
        Ok(self.measure_of(&self.symdiff(e, f)?.members))
    }

    pub fn complement(&self, e: &Event) -> Result<Event> {
        self.owns(e)?;
        Ok(self.wrap(e.members.complement(self.atom_count())))
    }

    pub fn meet(&self, e: &Event, f: &Event) -> Result<Event> {
        self.owns(e)?;
        self.owns(f)?;
        Ok(self.wrap(e.members.intersection(&f.members)))
    }

    pub fn join(&self, e: &Event, f: &Event) -> Result<Event> {
        self.owns(e)?;
        self.owns(f)?;
        Ok(self.wrap(e.members.union(&f.members)))
    }

    pub fn symdiff(&self, e: &Event, f: &Event) -> Result<Event> {
        self.owns(e)?;
        self.owns(f)?;
        Ok(self.wrap(e.members.symmetric_difference(&f.members)))
    }

    pub fn difference(&self, e: &Event, f: &Event) -> Result<Event> {
        self.owns(e)?;
        self.owns(f)?;
        Ok(self.wrap(e.members.difference(&f.members)))
    }

    // ---- tuples and partitions ---------------------------------------

    /// Nonempty cells `a^s` of a tuple, keyed by the lexicographic index of
    /// the sign vector `s` (coordinate `i` is `+1` iff bit `n-1-i` is set, so
    /// `-1 < +1` and the first coordinate is most significant).
    pub fn nonempty_cells(&self, tuple: &[Event]) -> Result<BTreeMap<u64, AtomSet>> {
        if tuple.is_empty() {
            return Err(Error::EmptyTuple);
        }
        if tuple.len() > 63 {
            return Err(Error::LengthMismatch(tuple.len(), 63));
        }
        self.owns_all(tuple)?;
        let n = tuple.len();
        let mut cells: BTreeMap<u64, AtomSet> = BTreeMap::new();
        for atom in 0..self.atom_count() {
            let s = sign_index(tuple.iter().map(|e| e.contains(atom)), n);
            cells.entry(s).or_default().insert(atom);
        }
        Ok(cells)
    }

    /// The partition of 1 associated with a tuple, in lexicographic order of
    /// the sign vectors (with `-1 < +1`). Cells may be empty.
    pub fn associated_partition(&self, tuple: &[Event]) -> Result<Vec<Event>> {
        if tuple.len() > MAX_MATERIALIZED_ARITY {
            return Err(Error::LengthMismatch(tuple.len(), MAX_MATERIALIZED_ARITY));
        }
        let cells = self.nonempty_cells(tuple)?;
        Ok((0..1u64 << tuple.len())
            .map(|s| self.wrap(cells.get(&s).cloned().unwrap_or_default()))
            .collect())
    }

    /// Inverse of [`associated_partition`](Self::associated_partition):
    /// coordinate `i` is the union of the parts whose sign vector has `+1`
    /// in place `i`.
    pub fn tuple_from_partition(&self, parts: &[Event]) -> Result<Vec<Event>> {
        let len = parts.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::BadLength(len));
        }
        self.check_partition(parts)?;
        let n = len.trailing_zeros() as usize;
        Ok((0..n)
            .map(|i| {
                let bit = 1usize << (n - 1 - i);
                let members = parts
                    .iter()
                    .enumerate()
                    .filter(|(s, _)| s & bit != 0)
                    .fold(AtomSet::new(), |acc, (_, p)| acc.union(&p.members));
                self.wrap(members)
            })
            .collect())
    }

    /// Checks that `parts` are pairwise disjoint and cover every atom.
    pub fn check_partition(&self, parts: &[Event]) -> Result<()> {
        self.owns_all(parts)?;
        let mut seen = AtomSet::new();
        for (i, p) in parts.iter().enumerate() {
            if !seen.is_disjoint(&p.members) {
                return Err(Error::NotAPartition(format!("part {} overlaps an earlier part", i + 1)));
            }
            seen = seen.union(&p.members);
        }
        if seen != AtomSet::full(self.atom_count()) {
            return Err(Error::NotAPartition("parts do not cover 1".into()));
        }
        Ok(())
    }

    /// The subalgebra generated by `events`: atoms grouped by their
    /// membership pattern across all events.
    pub fn generated_subalgebra(&self, events: &[Event]) -> Result<Subalgebra> {
        self.owns_all(events)?;
        let mut classes: BTreeMap<Vec<bool>, AtomSet> = BTreeMap::new();
        for atom in 0..self.atom_count() {
            let pattern: Vec<bool> = events.iter().map(|e| e.contains(atom)).collect();
            classes.entry(pattern).or_default().insert(atom);
        }
        Ok(Subalgebra::from_blocks_unchecked(
            self,
            classes.into_values().collect(),
        ))
    }

    // ---- axioms -------------------------------------------------------

    /// Checks the finite-model axioms: boolean identities, modularity of the
    /// measure, strict positivity, total mass and the metric/measure link.
    ///
    /// Pairs of events are enumerated exhaustively up to
    /// [`EXHAUSTIVE_AXIOM_ATOMS`] atoms (triples up to 6 atoms); larger
    /// algebras are checked on a deterministic random sample.
    pub fn verify_axioms(&self) -> AxiomReport {
        crate::algebra::axioms::verify(self)
    }
}

pub use axioms::{AxiomCheck, AxiomReport, EXHAUSTIVE_AXIOM_ATOMS};

/// Lexicographic index of a sign vector given as `+1` flags.
pub fn sign_index(plus: impl Iterator<Item = bool>, n: usize) -> u64 {
    plus.enumerate()
        .filter(|(_, p)| *p)
        .fold(0u64, |acc, (i, _)| acc | 1 << (n - 1 - i))
}

/// Whether coordinate `i` of the sign vector with index `s` is `+1`.
pub fn sign_is_plus(s: u64, i: usize, n: usize) -> bool {
    s & (1 << (n - 1 - i)) != 0
}

/// `n` atoms of weight `1/n`.
pub fn uniform_algebra(n: usize) -> FiniteProbabilityAlgebra {
    assert!(n >= 1, "an algebra needs at least one atom");
    let w = Rational::new(BigInt::one(), BigInt::from(n));
    FiniteProbabilityAlgebra::from_weights(vec![w; n]).expect("uniform weights are valid")
}

/// `n` atoms with weights `k_i / sum(k)`, `k_i` drawn from `1..=9` by a
/// ChaCha8 stream seeded with `seed`.
pub fn random_algebra(seed: u64, n: usize) -> FiniteProbabilityAlgebra {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_algebra_with(&mut rng, n, 9)
}

/// Random algebra with integer weight numerators in `1..=max_units`.
pub fn random_algebra_with<R: Rng>(rng: &mut R, n: usize, max_units: u64) -> FiniteProbabilityAlgebra {
    assert!(n >= 1, "an algebra needs at least one atom");
    let units: Vec<u64> = (0..n).map(|_| rng.random_range(1..=max_units)).collect();
    let total: u64 = units.iter().sum();
    let weights = units
        .iter()
        .map(|&u| Rational::new(BigInt::from(u), BigInt::from(total)))
        .collect();
    FiniteProbabilityAlgebra::from_weights(weights).expect("normalized weights are valid")
}

// ---- subalgebras -------------------------------------------------------

impl Subalgebra {
    /// Validates that `blocks` is a partition of the atoms into nonempty sets.
    pub fn from_blocks(alg: &FiniteProbabilityAlgebra, blocks: Vec<AtomSet>) -> Result<Self> {
        let mut seen = AtomSet::new();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::NotAPartition("empty block".into()));
            }
            if !seen.is_disjoint(b) {
                return Err(Error::NotAPartition("blocks overlap".into()));
            }
            seen = seen.union(b);
        }
        if seen != AtomSet::full(alg.atom_count()) {
            return Err(Error::NotAPartition("blocks do not cover every atom".into()));
        }
        Ok(Self::from_blocks_unchecked(alg, blocks))
    }

    /// Subalgebra whose atoms are the nonempty events of a partition of 1.
    pub fn from_partition(alg: &FiniteProbabilityAlgebra, parts: &[Event]) -> Result<Self> {
        alg.check_partition(parts)?;
        Ok(Self::from_blocks_unchecked(
            alg,
            parts
                .iter()
                .filter(|p| !p.is_empty())
                .map(|p| p.members.clone())
                .collect(),
        ))
    }

    pub(crate) fn from_blocks_unchecked(alg: &FiniteProbabilityAlgebra, mut blocks: Vec<AtomSet>) -> Self {
        blocks.sort_by_key(|b| b.first());
        let mut block_of = vec![0; alg.atom_count()];
        for (j, b) in blocks.iter().enumerate() {
            for a in b.iter() {
                block_of[a] = j;
            }
        }
        Subalgebra {
            algebra: alg.id,
            blocks,
            block_of,
        }
    }

    /// `{0, 1}`.
    pub fn trivial(alg: &FiniteProbabilityAlgebra) -> Self {
        Self::from_blocks_unchecked(alg, vec![AtomSet::full(alg.atom_count())])
    }

    /// The whole algebra.
    pub fn full(alg: &FiniteProbabilityAlgebra) -> Self {
        Self::from_blocks_unchecked(alg, (0..alg.atom_count()).map(AtomSet::singleton).collect())
    }

    pub fn algebra_id(&self) -> u64 {
        self.algebra
    }

    pub fn blocks(&self) -> &[AtomSet] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Index of the block containing `atom`.
    pub fn block_of(&self, atom: usize) -> usize {
        self.block_of[atom]
    }

    pub fn block_events(&self) -> Vec<Event> {
        self.blocks
            .iter()
            .map(|b| Event {
                algebra: self.algebra,
                members: b.clone(),
            })
            .collect()
    }

    /// Whether every block of `finer` lies inside one block of `self`,
    /// i.e. `self` is a subalgebra of `finer`.
    pub fn is_coarsening_of(&self, finer: &Subalgebra) -> bool {
        self.algebra == finer.algebra
            && finer.blocks.iter().all(|b| {
                let mut it = b.iter().map(|a| self.block_of[a]);
                let first = it.next();
                it.all(|j| Some(j) == first)
            })
    }

    /// Common refinement: the subalgebra generated by both.
    pub fn join(&self, other: &Subalgebra) -> Result<Subalgebra> {
        if self.algebra != other.algebra {
            return Err(Error::ForeignEvent);
        }
        let mut cells: BTreeMap<(usize, usize), AtomSet> = BTreeMap::new();
        for (a, (&i, &j)) in self.block_of.iter().zip(&other.block_of).enumerate() {
            cells.entry((i, j)).or_default().insert(a);
        }
        let mut blocks: Vec<AtomSet> = cells.into_values().collect();
        blocks.sort_by_key(|b| b.first());
        let mut block_of = vec![0; self.block_of.len()];
        for (j, b) in blocks.iter().enumerate() {
            for a in b.iter() {
                block_of[a] = j;
            }
        }
        Ok(Subalgebra {
            algebra: self.algebra,
            blocks,
            block_of,
        })
    }

    /// Whether `e` is a union of blocks.
    pub fn contains_event(&self, e: &Event) -> bool {
        e.algebra == self.algebra
            && self
                .blocks
                .iter()
                .all(|b| b.is_subset(&e.members) || b.is_disjoint(&e.members))
    }
}

// ---- extensions --------------------------------------------------------

/// A measure-preserving boolean embedding of an algebra into a finer one,
/// recorded atom by atom.
#[derive(Clone, Debug)]
pub struct Extension {
    pub algebra: FiniteProbabilityAlgebra,
    source: u64,
    images: Vec<AtomSet>,
}

impl Extension {
    /// The identity embedding of `alg` into a copy of itself.
    pub fn identity(alg: &FiniteProbabilityAlgebra) -> Self {
        Extension {
            algebra: alg.clone(),
            source: alg.id,
            images: (0..alg.atom_count()).map(AtomSet::singleton).collect(),
        }
    }

    pub fn source_id(&self) -> u64 {
        self.source
    }

    /// New atoms that old atom `atom` was split into.
    pub fn atom_image(&self, atom: usize) -> &AtomSet {
        &self.images[atom]
    }

    pub fn image(&self, e: &Event) -> Result<Event> {
        if e.algebra != self.source {
            return Err(Error::ForeignEvent);
        }
        let members = e
            .members
            .iter()
            .fold(AtomSet::new(), |acc, a| acc.union(&self.images[a]));
        Ok(self.algebra.wrap(members))
    }

    pub fn image_all(&self, es: &[Event]) -> Result<Vec<Event>> {
        es.iter().map(|e| self.image(e)).collect()
    }

    pub fn image_subalgebra(&self, s: &Subalgebra) -> Result<Subalgebra> {
        if s.algebra != self.source {
            return Err(Error::ForeignEvent);
        }
        let blocks = s
            .blocks
            .iter()
            .map(|b| b.iter().fold(AtomSet::new(), |acc, a| acc.union(&self.images[a])))
            .collect();
        Ok(Subalgebra::from_blocks_unchecked(&self.algebra, blocks))
    }

    /// Checks that the embedding preserves the measure of every old atom and
    /// that images of distinct atoms are disjoint and cover the new algebra.
    pub fn is_measure_preserving(&self, source: &FiniteProbabilityAlgebra) -> bool {
        if source.id != self.source || source.atom_count() != self.images.len() {
            return false;
        }
        let mut seen = AtomSet::new();
        for (a, img) in self.images.iter().enumerate() {
            if img.is_empty() || !seen.is_disjoint(img) {
                return false;
            }
            seen = seen.union(img);
            if self.algebra.measure_of(img) != source.weights[a] {
                return false;
            }
        }
        seen == AtomSet::full(self.algebra.atom_count())
    }
}

/// Splits each atom of an algebra into tagged pieces and assembles the
/// refined algebra.
///
/// Pieces with the same tag inside one atom are merged and zero-weight
/// pieces are dropped, so the result keeps strictly positive weights. New
/// atoms are numbered in the order of the old atoms.
pub(crate) struct Refinement<'a> {
    alg: &'a FiniteProbabilityAlgebra,
    pieces: Vec<Vec<(Rational, usize)>>,
}

impl<'a> Refinement<'a> {
    pub fn new(alg: &'a FiniteProbabilityAlgebra) -> Self {
        Refinement {
            alg,
            pieces: vec![Vec::new(); alg.atom_count()],
        }
    }

    pub fn add(&mut self, atom: usize, weight: Rational, tag: usize) {
        if weight.is_zero() {
            return;
        }
        match self.pieces[atom].iter_mut().find(|(_, t)| *t == tag) {
            Some((w, _)) => *w += weight,
            None => self.pieces[atom].push((weight, tag)),
        }
    }

    /// Builds the extension and the event collecting each tag in
    /// `0..tags`.
    pub fn build(self, tags: usize) -> Result<(Extension, Vec<AtomSet>)> {
        let mut weights = Vec::new();
        let mut labels = Vec::new();
        let mut images = Vec::with_capacity(self.pieces.len());
        let mut tagged = vec![AtomSet::new(); tags];
        let taken: BTreeSet<&str> = self.alg.labels.iter().map(String::as_str).collect();
        let mut used: BTreeSet<String> = BTreeSet::new();
        for (atom, pieces) in self.pieces.iter().enumerate() {
            let total: Rational = pieces.iter().map(|(w, _)| w).sum();
            if &total != self.alg.weight(atom) {
                return Err(Error::InvalidAlgebra(format!(
                    "pieces of atom `{}` carry {} instead of {}",
                    self.alg.labels[atom],
                    fmt_ratio(&total),
                    fmt_ratio(self.alg.weight(atom))
                )));
            }
            let mut img = AtomSet::new();
            let base = &self.alg.labels[atom];
            for (k, (w, tag)) in pieces.iter().enumerate() {
                let new_index = weights.len();
                let mut label = if pieces.len() == 1 {
                    base.clone()
                } else {
                    format!("{base}.{}", k + 1)
                };
                while used.contains(&label) || (pieces.len() > 1 && taken.contains(label.as_str())) {
                    label.push('\'');
                }
                used.insert(label.clone());
                weights.push(w.clone());
                labels.push(label);
                img.insert(new_index);
                if *tag < tags {
                    tagged[*tag].insert(new_index);
                }
            }
            images.push(img);
        }
        let algebra = FiniteProbabilityAlgebra::new(weights, Some(labels))?;
        Ok((
            Extension {
                algebra,
                source: self.alg.id,
                images,
            },
            tagged,
        ))
    }
}

mod axioms {
    use super::*;

    /// Pairs of events are enumerated exhaustively up to this many atoms.
    pub const EXHAUSTIVE_AXIOM_ATOMS: usize = 12;
    const EXHAUSTIVE_TRIPLE_ATOMS: usize = 6;
    const SAMPLES: usize = 2000;

    #[derive(Clone, Debug, PartialEq, Eq)]
    pub struct AxiomCheck {
        pub name: &'static str,
        pub passed: bool,
        pub witness: Option<String>,
    }

    #[derive(Clone, Debug, PartialEq, Eq)]
    pub struct AxiomReport {
        pub checks: Vec<AxiomCheck>,
        pub exhaustive: bool,
    }

    impl AxiomReport {
        pub fn all_passed(&self) -> bool {
            self.checks.iter().all(|c| c.passed)
        }

        pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
            self.checks.iter().filter(|c| !c.passed)
        }
    }

    struct Recorder {
        checks: Vec<AxiomCheck>,
    }

    impl Recorder {
        fn check(&mut self, name: &'static str, witness: Option<String>) {
            self.checks.push(AxiomCheck {
                name,
                passed: witness.is_none(),
                witness,
            });
        }
    }

    /// Sets the checks run on: `u64` masks on the exhaustive path, where the
    /// measure comes from a precomputed table, and [`AtomSet`] otherwise.
    trait Set: Clone + PartialEq {
        fn union(&self, o: &Self) -> Self;
        fn meet(&self, o: &Self) -> Self;
        fn sym(&self, o: &Self) -> Self;
        fn compl(&self, k: usize) -> Self;
        fn subset(&self, o: &Self) -> bool;
        fn empty(&self) -> bool;
        fn members(&self) -> Vec<usize>;
        fn mask(&self) -> Option<u64>;
    }

    impl Set for u64 {
        fn union(&self, o: &Self) -> Self {
            self | o
        }
        fn meet(&self, o: &Self) -> Self {
            self & o
        }
        fn sym(&self, o: &Self) -> Self {
            self ^ o
        }
        fn compl(&self, k: usize) -> Self {
            !self & ((1u64 << k) - 1)
        }
        fn subset(&self, o: &Self) -> bool {
            self & !o == 0
        }
        fn empty(&self) -> bool {
            *self == 0
        }
        fn members(&self) -> Vec<usize> {
            (0..64).filter(|i| self >> i & 1 == 1).collect()
        }
        fn mask(&self) -> Option<u64> {
            Some(*self)
        }
    }

    impl Set for AtomSet {
        fn union(&self, o: &Self) -> Self {
            AtomSet::union(self, o)
        }
        fn meet(&self, o: &Self) -> Self {
            self.intersection(o)
        }
        fn sym(&self, o: &Self) -> Self {
            self.symmetric_difference(o)
        }
        fn compl(&self, k: usize) -> Self {
            self.complement(k)
        }
        fn subset(&self, o: &Self) -> bool {
            self.is_subset(o)
        }
        fn empty(&self) -> bool {
            self.is_empty()
        }
        fn members(&self) -> Vec<usize> {
            self.iter().collect()
        }
        fn mask(&self) -> Option<u64> {
            None
        }
    }

    /// A measure value: integers scaled by the common denominator when the
    /// weights allow it, otherwise exact rationals.
    #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
    enum Val {
        I(i128),
        R(Rational),
    }

    impl std::ops::Add for &Val {
        type Output = Val;
        fn add(self, o: &Val) -> Val {
            match (self, o) {
                (Val::I(a), Val::I(b)) => Val::I(a + b),
                (Val::R(a), Val::R(b)) => Val::R(a + b),
                _ => unreachable!("one representation per algebra"),
            }
        }
    }

    struct Measure {
        units: Option<(Vec<i128>, i128)>,
        weights: Vec<Rational>,
        table: Vec<Val>,
    }

    impl Measure {
        fn new(alg: &FiniteProbabilityAlgebra, tabulate: bool) -> Self {
            let l = lcm_of_denominators(alg.weights.iter());
            let units: Option<Vec<i128>> = alg
                .weights
                .iter()
                .map(|w| (w.numer() * (&l / w.denom())).to_i128().filter(|u| u.unsigned_abs() < 1 << 100))
                .collect();
            let units = units.zip(l.to_i128().filter(|s| *s < 1 << 100));
            let mut m = Measure {
                units,
                weights: alg.weights.clone(),
                table: Vec::new(),
            };
            if tabulate {
                m.table = (0..1u64 << alg.atom_count()).map(|x| m.compute(&x.members())).collect();
            }
            m
        }

        fn compute(&self, atoms: &[usize]) -> Val {
            match &self.units {
                Some((u, _)) => Val::I(atoms.iter().map(|&a| u[a]).sum()),
                None => Val::R(atoms.iter().map(|&a| &self.weights[a]).sum()),
            }
        }

        fn of<S: Set>(&self, s: &S) -> Val {
            match s.mask() {
                Some(m) if !self.table.is_empty() => self.table[m as usize].clone(),
                _ => self.compute(&s.members()),
            }
        }

        fn zero(&self) -> Val {
            self.compute(&[])
        }

        fn rational(&self, v: &Val) -> Rational {
            match (v, &self.units) {
                (Val::I(n), Some((_, scale))) => Rational::new(BigInt::from(*n), BigInt::from(*scale)),
                (Val::R(r), _) => r.clone(),
                _ => unreachable!("one representation per algebra"),
            }
        }
    }

    pub fn verify(alg: &FiniteProbabilityAlgebra) -> AxiomReport {
        let k = alg.atom_count();
        let mut rec = Recorder { checks: Vec::new() };

        rec.check("at least one atom", (k == 0).then(|| "no atoms".to_string()));
        let nonpos = alg.weights.iter().position(|w| !w.is_positive());
        rec.check(
            "strict positivity",
            nonpos.map(|i| format!("atom `{}` has weight {}", alg.labels[i], fmt_ratio(&alg.weights[i]))),
        );
        let total: Rational = alg.weights.iter().sum();
        rec.check(
            "total mass 1",
            (!total.is_one()).then(|| format!("weights sum to {}", fmt_ratio(&total))),
        );

        let exhaustive = k <= EXHAUSTIVE_AXIOM_ATOMS;
        let measure = Measure::new(alg, exhaustive);
        let mu0 = measure.rational(&measure.of(&AtomSet::new()));
        let mu1 = measure.rational(&measure.of(&AtomSet::full(k)));
        rec.check(
            "measure of 0 and 1",
            (!mu0.is_zero() || !mu1.is_one())
                .then(|| format!("mu(0) = {}, mu(1) = {}", fmt_ratio(&mu0), fmt_ratio(&mu1))),
        );

        let found = if exhaustive {
            let all: Vec<u64> = (0..1u64 << k).collect();
            let triples = k <= EXHAUSTIVE_TRIPLE_ATOMS;
            let third: &[u64] = if triples { &all } else { &[] };
            run_checks(alg, &measure, (1u64 << k) - 1, k, &all, &all, third, (!triples).then_some(0x7e57))
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let xs: Vec<AtomSet> = (0..SAMPLES).map(|_| random_set(&mut rng, k)).collect();
            let ys: Vec<AtomSet> = (0..SAMPLES).map(|_| random_set(&mut rng, k)).collect();
            run_sampled(alg, &measure, k, &xs, &ys)
        };
        for (name, witness) in found {
            rec.check(name, witness);
        }

        AxiomReport {
            checks: rec.checks,
            exhaustive,
        }
    }

    fn random_set(rng: &mut ChaCha8Rng, k: usize) -> AtomSet {
        (0..k).filter(|_| rng.random_bool(0.5)).collect()
    }

    type Found = Vec<(&'static str, Option<String>)>;

    fn show<S: Set>(alg: &FiniteProbabilityAlgebra, s: &S) -> String {
        let names: Vec<&str> = s.members().into_iter().map(|a| alg.labels[a].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Pair checks over all of `xs` x `ys`; triple checks over `xs` x `ys` x
    /// `zs`, or over sampled mask triples when `sample_seed` is given.
    #[allow(clippy::too_many_arguments)]
    fn run_checks(
        alg: &FiniteProbabilityAlgebra,
        measure: &Measure,
        full: u64,
        k: usize,
        xs: &[u64],
        ys: &[u64],
        zs: &[u64],
        sample_seed: Option<u64>,
    ) -> Found {
        let mut found = pair_checks(alg, measure, &full, k, xs.iter().flat_map(|x| ys.iter().map(move |y| (*x, *y))));
        let triples: Box<dyn Iterator<Item = (u64, u64, u64)>> = match sample_seed {
            None => Box::new(xs.iter().flat_map(|x| ys.iter().flat_map(move |y| zs.iter().map(move |z| (*x, *y, *z))))),
            Some(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let v: Vec<(u64, u64, u64)> = (0..SAMPLES)
                    .map(|_| (rng.random::<u64>() & full, rng.random::<u64>() & full, rng.random::<u64>() & full))
                    .collect();
                Box::new(v.into_iter())
            }
        };
        found.extend(triple_checks(alg, measure, triples));
        found
    }

    fn run_sampled(alg: &FiniteProbabilityAlgebra, measure: &Measure, k: usize, xs: &[AtomSet], ys: &[AtomSet]) -> Found {
        let full = AtomSet::full(k);
        let mut found = pair_checks(alg, measure, &full, k, xs.iter().cloned().zip(ys.iter().cloned()));
        let mut rng = ChaCha8Rng::seed_from_u64(0x7e57);
        let triples: Vec<(AtomSet, AtomSet, AtomSet)> = (0..SAMPLES)
            .map(|_| (random_set(&mut rng, k), random_set(&mut rng, k), random_set(&mut rng, k)))
            .collect();
        found.extend(triple_checks(alg, measure, triples.into_iter()));
        found
    }

    fn pair_checks<S: Set>(
        alg: &FiniteProbabilityAlgebra,
        measure: &Measure,
        full: &S,
        k: usize,
        pairs: impl Iterator<Item = (S, S)>,
    ) -> Found {
        let zero = measure.zero();
        let mut boolean = None;
        let mut modular = None;
        let mut metric = None;
        let mut monotone = None;
        for (x, y) in pairs {
            let xc = x.compl(k);
            let yc = y.compl(k);
            if boolean.is_none() {
                let ok = x.union(&y) == y.union(&x)
                    && x.meet(&y) == y.meet(&x)
                    && x.union(&x.meet(&y)) == x
                    && x.meet(&x.union(&y)) == x
                    && x.union(&xc) == *full
                    && x.meet(&xc).empty()
                    && x.union(&y).compl(k) == xc.meet(&yc)
                    && xc.compl(k) == x;
                if !ok {
                    boolean = Some(format!("x = {}, y = {}", show(alg, &x), show(alg, &y)));
                }
            }
            let mx = measure.of(&x);
            let my = measure.of(&y);
            if modular.is_none() && &measure.of(&x.union(&y)) + &measure.of(&x.meet(&y)) != &mx + &my {
                modular = Some(format!("x = {}, y = {}", show(alg, &x), show(alg, &y)));
            }
            if metric.is_none() {
                let d = measure.of(&x.sym(&y));
                let dc = measure.of(&xc.sym(&yc));
                if d != dc || ((d == zero) != (x == y)) || d < zero {
                    let shown = fmt_ratio(&measure.rational(&d));
                    metric = Some(format!("x = {}, y = {}, d = {shown}", show(alg, &x), show(alg, &y)));
                }
            }
            if monotone.is_none() && x.subset(&y) && mx > my {
                monotone = Some(format!("x = {} inside y = {}", show(alg, &x), show(alg, &y)));
            }
        }
        vec![
            ("boolean algebra identities", boolean),
            ("modularity mu(x u y) + mu(x n y) = mu(x) + mu(y)", modular),
            ("d(x,y) = mu(x sym-diff y) is a metric", metric),
            ("monotonicity of mu", monotone),
        ]
    }

    fn triple_checks<S: Set>(alg: &FiniteProbabilityAlgebra, measure: &Measure, triples: impl Iterator<Item = (S, S, S)>) -> Found {
        let mut distributive = None;
        let mut triangle = None;
        for (x, y, z) in triples {
            if distributive.is_none()
                && (x.meet(&y.union(&z)) != x.meet(&y).union(&x.meet(&z))
                    || x.union(&y.meet(&z)) != x.union(&y).meet(&x.union(&z)))
            {
                distributive = Some(format!("x = {}, y = {}, z = {}", show(alg, &x), show(alg, &y), show(alg, &z)));
            }
            if triangle.is_none() {
                let dxz = measure.of(&x.sym(&z));
                let dxy = measure.of(&x.sym(&y));
                let dyz = measure.of(&y.sym(&z));
                if dxz > &dxy + &dyz {
                    triangle = Some(format!("x = {}, y = {}, z = {}", show(alg, &x), show(alg, &y), show(alg, &z)));
                }
            }
        }
        vec![("distributivity", distributive), ("triangle inequality", triangle)]
    }
}
