//! Types of tuples over finite subalgebras: descriptors, realization, type
//! distances, the canonical-base metric, non-forking extensions and
//! `eps`-forking.
//!
//! A type of an `n`-tuple `a` over `C` is described by the step functions
//! `g_s = P(a^s|C)` for the sign vectors `s`, keyed by lexicographic index
//! (see [`crate::algebra::sign_index`]). Only nonzero `g_s` are stored.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{Event, Extension, FiniteProbabilityAlgebra, Refinement, Subalgebra, MAX_MATERIALIZED_ARITY};
use crate::atomset::AtomSet;
use crate::conditional::{cond_prob, l1_distance, level_partition, StepFunction};
use crate::error::{Error, Result};
use crate::independence::extend_with_independent_copy;
use crate::rational::{fmt_ratio, in_unit_interval, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDescriptor {
    arity: usize,
    base: Subalgebra,
    g: BTreeMap<u64, StepFunction>,
}

impl TypeDescriptor {
    /// Validates keys, ranges and the blockwise sums; zero functions are
    /// dropped.
    pub fn new(arity: usize, base: Subalgebra, g: BTreeMap<u64, StepFunction>) -> Result<Self> {
        if arity == 0 || arity > 63 {
            return Err(Error::InvalidDescriptor(format!("arity {arity}")));
        }
        let mut sums = vec![Rational::zero(); base.block_count()];
        for (s, f) in &g {
            if *s >> arity != 0 {
                return Err(Error::InvalidDescriptor(format!("cell index {s} out of range")));
            }
            if f.base() != &base {
                return Err(Error::InvalidDescriptor("step function over a different base".into()));
            }
            for (j, v) in f.values().iter().enumerate() {
                if !in_unit_interval(v) {
                    return Err(Error::InvalidDescriptor(format!("value {} outside [0,1]", fmt_ratio(v))));
                }
                sums[j] += v;
            }
        }
        if let Some(j) = sums.iter().position(|t| !t.is_one()) {
            return Err(Error::InvalidDescriptor(format!(
                "values on block {} sum to {}",
                j + 1,
                fmt_ratio(&sums[j])
            )));
        }
        let g = g.into_iter().filter(|(_, f)| f.values().iter().any(|v| !v.is_zero())).collect();
        Ok(TypeDescriptor { arity, base, g })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn base(&self) -> &Subalgebra {
        &self.base
    }

    /// `g_s`, the zero function when the cell is absent.
    pub fn get(&self, s: u64) -> StepFunction {
        self.g
            .get(&s)
            .cloned()
            .unwrap_or_else(|| StepFunction::constant(self.base.clone(), Rational::zero()))
    }

    /// Nonzero cells in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (u64, &StepFunction)> {
        self.g.iter().map(|(s, f)| (*s, f))
    }

    /// Same arity, cells and values, ignoring which algebra the base lives in.
    pub fn same_values(&self, other: &TypeDescriptor) -> bool {
        self.arity == other.arity
            && self.base.blocks().len() == other.base.blocks().len()
            && self.g.len() == other.g.len()
            && self
                .g
                .iter()
                .zip(&other.g)
                .all(|((s, f), (t, h))| s == t && f.values() == h.values())
    }

    /// The same descriptor over the image of its base in an extension.
    pub fn transport(&self, ext: &Extension) -> Result<TypeDescriptor> {
        let base = ext.image_subalgebra(&self.base)?;
        let g = self
            .g
            .iter()
            .map(|(s, f)| Ok((*s, StepFunction::new(base.clone(), f.values().to_vec())?)))
            .collect::<Result<_>>()?;
        Ok(TypeDescriptor {
            arity: self.arity,
            base,
            g,
        })
    }
}

/// `g_s = P(a^s|C)` for every nonempty cell.
pub fn type_of(alg: &FiniteProbabilityAlgebra, tuple: &[Event], c: &Subalgebra) -> Result<TypeDescriptor> {
    alg.owns_subalgebra(c)?;
    let cells = alg.nonempty_cells(tuple)?;
    let g = cells
        .into_iter()
        .map(|(s, cell)| Ok((s, cond_prob(alg, &alg.wrap(cell), c)?)))
        .collect::<Result<_>>()?;
    TypeDescriptor::new(tuple.len(), c.clone(), g)
}

/// An extension together with a tuple living in it.
#[derive(Clone, Debug)]
pub struct Realization {
    pub extension: Extension,
    pub tuple: Vec<Event>,
}

fn coordinates(alg: &FiniteProbabilityAlgebra, n: usize, tagged: &BTreeMap<u64, AtomSet>) -> Vec<Event> {
    (0..n)
        .map(|i| {
            let bit = 1u64 << (n - 1 - i);
            let members = tagged
                .iter()
                .filter(|(s, _)| *s & bit != 0)
                .fold(AtomSet::new(), |acc, (_, p)| acc.union(p));
            alg.wrap(members)
        })
        .collect()
}

/// Builds a tuple with type `desc`. Inside each base block the cell masses
/// `g_s * mu(block)` are stacked over the block's atoms (cells from the
/// all-`+1` vector down, atoms in index order), splitting atoms where a
/// cell boundary falls inside them.
pub fn realize_type(alg: &FiniteProbabilityAlgebra, desc: &TypeDescriptor) -> Result<Realization> {
    alg.owns_subalgebra(&desc.base)
        .map_err(|_| Error::InvalidDescriptor("base belongs to another algebra".into()))?;
    let desc = TypeDescriptor::new(desc.arity, desc.base.clone(), desc.g.clone())?;
    let n = desc.arity;
    if n > MAX_MATERIALIZED_ARITY {
        return Err(Error::InvalidDescriptor(format!("arity {n} is too large to realize")));
    }
    let mut r = Refinement::new(alg);
    for (j, block) in desc.base.blocks().iter().enumerate() {
        let mass = alg.measure_of(block);
        let mut cells: Vec<(u64, Rational)> = desc
            .g
            .iter()
            .rev()
            .map(|(s, f)| (*s, &f.values()[j] * &mass))
            .filter(|(_, m)| !m.is_zero())
            .collect();
        cells.reverse();
        let mut atoms: Vec<(usize, Rational)> = block.iter().map(|x| (x, alg.weight(x).clone())).collect();
        atoms.reverse();
        stack(&mut r, &mut atoms, &mut cells);
    }
    let (extension, tagged) = r.build(1 << n)?;
    let tagged: BTreeMap<u64, AtomSet> = tagged
        .into_iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .map(|(s, a)| (s as u64, a))
        .collect();
    let tuple = coordinates(&extension.algebra, n, &tagged);
    Ok(Realization { extension, tuple })
}

/// Pours atom pieces into cells in order. Both lists are consumed from the
/// back; their totals must agree.
fn stack(r: &mut Refinement<'_>, atoms: &mut Vec<(usize, Rational)>, cells: &mut Vec<(u64, Rational)>) {
    while let (Some((x, w)), Some((s, m))) = (atoms.last_mut(), cells.last_mut()) {
        let take = if *w < *m { w.clone() } else { m.clone() };
        r.add(*x, take.clone(), *s as usize);
        *w -= &take;
        *m -= &take;
        if w.is_zero() {
            atoms.pop();
        }
        if m.is_zero() {
            cells.pop();
        }
    }
}

fn check_partition_pair(alg: &FiniteProbabilityAlgebra, a: &[Event], b: &[Event]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(Error::NotAPartition("no parts".into()));
    }
    alg.check_partition(a)?;
    alg.check_partition(b)
}

/// `||P(a_i|C) - P(b_i|C)||_1` for each `i`.
pub fn coordinate_distances(
    alg: &FiniteProbabilityAlgebra,
    a: &[Event],
    b: &[Event],
    c: &Subalgebra,
) -> Result<Vec<Rational>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| l1_distance(alg, &cond_prob(alg, x, c)?, &cond_prob(alg, y, c)?))
        .collect()
}

/// Induced distance between the types of two partitions of 1 over `C`:
/// `max_i ||P(a_i|C) - P(b_i|C)||_1`.
pub fn type_distance_partitions(
    alg: &FiniteProbabilityAlgebra,
    a: &[Event],
    b: &[Event],
    c: &Subalgebra,
) -> Result<Rational> {
    check_partition_pair(alg, a, b)?;
    Ok(coordinate_distances(alg, a, b, c)?
        .into_iter()
        .max()
        .expect("at least one part"))
}

#[derive(Clone, Debug)]
pub struct OptimalRealization {
    pub extension: Extension,
    /// Image of `a` in the extension.
    pub a_image: Vec<Event>,
    /// A realization of `tp(b/C)` closest to `a`.
    pub b_prime: Vec<Event>,
    /// `d(a_i', b_i')`, equal to `||P(a_i|C) - P(b_i|C)||_1`.
    pub distances: Vec<Rational>,
}

/// Rearranges `b` inside each block of `C` so that every `b_i'` overlaps
/// `a_i` as much as the masses allow: parts with `mu(b_i n f) <= mu(a_i n f)`
/// are carved out of `a_i n f`, the remainder is handed to the other parts.
pub fn optimal_realization(
    alg: &FiniteProbabilityAlgebra,
    a: &[Event],
    b: &[Event],
    c: &Subalgebra,
) -> Result<OptimalRealization> {
    check_partition_pair(alg, a, b)?;
    alg.owns_subalgebra(c)?;
    let n = a.len();
    let part_of: Vec<usize> = (0..alg.atom_count())
        .map(|x| a.iter().position(|p| p.contains(x)).expect("a covers every atom"))
        .collect();
    let mut r = Refinement::new(alg);
    for block in c.blocks() {
        let in_a: Vec<Rational> = a.iter().map(|p| alg.measure_of(&p.members().intersection(block))).collect();
        let target: Vec<Rational> = b.iter().map(|p| alg.measure_of(&p.members().intersection(block))).collect();
        let mut need = target.clone();
        let mut pool: Vec<(usize, Rational)> = Vec::new();
        for x in block.iter() {
            let i = part_of[x];
            let w = alg.weight(x).clone();
            if target[i] <= in_a[i] {
                let take = if w < need[i] { w.clone() } else { need[i].clone() };
                need[i] -= &take;
                r.add(x, take.clone(), i);
                let rest = w - take;
                if !rest.is_zero() {
                    pool.push((x, rest));
                }
            } else {
                need[i] -= &w;
                r.add(x, w, i);
            }
        }
        let mut deficits: Vec<(u64, Rational)> = (0..n)
            .filter(|&j| target[j] > in_a[j])
            .map(|j| (j as u64, need[j].clone()))
            .collect();
        deficits.reverse();
        pool.reverse();
        stack(&mut r, &mut pool, &mut deficits);
    }
    let (extension, tagged) = r.build(n)?;
    let b_prime: Vec<Event> = tagged.into_iter().map(|s| extension.algebra.wrap(s)).collect();
    let a_image = extension.image_all(a)?;
    let distances = a_image
        .iter()
        .zip(&b_prime)
        .map(|(x, y)| extension.algebra.dist(x, y))
        .collect::<Result<_>>()?;
    Ok(OptimalRealization {
        extension,
        a_image,
        b_prime,
        distances,
    })
}

fn cell_pairs(
    alg: &FiniteProbabilityAlgebra,
    a: &[Event],
    b: &[Event],
) -> Result<Vec<(AtomSet, AtomSet)>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let ca = alg.nonempty_cells(a)?;
    let cb = alg.nonempty_cells(b)?;
    let keys: BTreeSet<u64> = ca.keys().chain(cb.keys()).copied().collect();
    Ok(keys
        .into_iter()
        .map(|s| {
            (
                ca.get(&s).cloned().unwrap_or_default(),
                cb.get(&s).cloned().unwrap_or_default(),
            )
        })
        .collect())
}

/// `d_P(a, b) = 1/2 sum_s d(a^s, b^s)`.
pub fn d_p(alg: &FiniteProbabilityAlgebra, a: &[Event], b: &[Event]) -> Result<Rational> {
    let total: Rational = cell_pairs(alg, a, b)?
        .iter()
        .map(|(x, y)| alg.measure_of(&x.symmetric_difference(y)))
        .sum();
    Ok(total / Rational::from_integer(BigInt::from(2)))
}

/// Largest `|sum_{j in J} delta_j|` over sets `J` of blocks: the larger of
/// the positive and the negative parts.
fn best_union(deltas: impl Iterator<Item = Rational>) -> Rational {
    let (mut pos, mut neg) = (Rational::zero(), Rational::zero());
    for d in deltas {
        if d.is_positive() {
            pos += d;
        } else {
            neg -= d;
        }
    }
    pos.max(neg)
}

/// `d_Cb = max_s max_{c in <C>} |mu(a^s n c) - mu(b^s n c)|`.
pub fn d_cb(alg: &FiniteProbabilityAlgebra, a: &[Event], b: &[Event], c: &Subalgebra) -> Result<Rational> {
    alg.owns_subalgebra(c)?;
    Ok(cell_pairs(alg, a, b)?
        .iter()
        .map(|(x, y)| {
            best_union(
                c.blocks()
                    .iter()
                    .map(|blk| alg.measure_of(&x.intersection(blk)) - alg.measure_of(&y.intersection(blk))),
            )
        })
        .max()
        .unwrap_or_else(Rational::zero))
}

/// [`d_cb`] computed from two descriptors over the same base.
pub fn d_cb_descriptors(alg: &FiniteProbabilityAlgebra, p: &TypeDescriptor, q: &TypeDescriptor) -> Result<Rational> {
    if p.base != q.base || p.arity != q.arity {
        return Err(Error::InvalidDescriptor("descriptors over different bases or arities".into()));
    }
    alg.owns_subalgebra(&p.base)?;
    let masses: Vec<Rational> = p.base.blocks().iter().map(|b| alg.measure_of(b)).collect();
    let keys: BTreeSet<u64> = p.g.keys().chain(q.g.keys()).copied().collect();
    Ok(keys
        .into_iter()
        .map(|s| {
            let (f, g) = (p.get(s), q.get(s));
            best_union(
                f.values()
                    .iter()
                    .zip(g.values())
                    .zip(&masses)
                    .map(|((x, y), m)| (x - y) * m),
            )
        })
        .max()
        .unwrap_or_else(Rational::zero))
}

/// The type of the associated partition `(a^s)_s`, a `2^n`-tuple, from the
/// type of `a`. Part `s` of the partition is `+1` only at coordinate `s`.
pub fn pi_map(desc: &TypeDescriptor) -> Result<TypeDescriptor> {
    let n = desc.arity;
    if n > 5 {
        return Err(Error::InvalidDescriptor(format!("arity {n} above 5")));
    }
    let big = 1usize << n;
    let g = desc
        .g
        .iter()
        .map(|(s, f)| (1u64 << (big - 1 - *s as usize), f.clone()))
        .collect();
    TypeDescriptor::new(big, desc.base.clone(), g)
}

/// Certified bounds on the induced distance `d_n` between the types of two
/// general `n`-tuples: with `middle = d_{2^n}` of the associated partitions,
/// `middle / n <= d_n <= 2^{n-1} middle`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LipschitzBracket {
    pub lower: Rational,
    pub middle: Rational,
    pub upper: Rational,
}

impl LipschitzBracket {
    pub fn contains(&self, d: &Rational) -> bool {
        self.lower <= *d && *d <= self.upper
    }
}

pub fn lipschitz_check(alg: &FiniteProbabilityAlgebra, a: &[Event], b: &[Event], c: &Subalgebra) -> Result<LipschitzBracket> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    let pa = alg.associated_partition(a)?;
    let pb = alg.associated_partition(b)?;
    let middle = type_distance_partitions(alg, &pa, &pb, c)?;
    let lower = &middle / Rational::from_integer(BigInt::from(n));
    let upper = &middle * Rational::from_integer(BigInt::from(1u64 << (n - 1)));
    Ok(LipschitzBracket { lower, middle, upper })
}

// ---- forking ------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct NonForking {
    pub extension: Extension,
    /// The original tuple, embedded.
    pub original: Vec<Event>,
    /// Realization of the non-forking extension of `tp(a/E)` to `C`.
    pub tuple: Vec<Event>,
}

/// Realizes the non-forking extension to `C` of the type of the partition
/// `a` over `E`, as an independent copy of `a` over `E`.
pub fn nonforking_extension(alg: &FiniteProbabilityAlgebra, a: &[Event], e: &Subalgebra, c: &Subalgebra) -> Result<NonForking> {
    let copy = extend_with_independent_copy(alg, a, e, c)?;
    let original = copy.extension.image_all(a)?;
    Ok(NonForking {
        extension: copy.extension,
        original,
        tuple: copy.copies,
    })
}

/// Distance over `C` between `tp(a/C)` and the non-forking extension of
/// `tp(a/E)`, measured in a common extension.
pub fn forking_distance(alg: &FiniteProbabilityAlgebra, a: &[Event], e: &Subalgebra, c: &Subalgebra) -> Result<Rational> {
    let nf = nonforking_extension(alg, a, e, c)?;
    let c_image = nf.extension.image_subalgebra(c)?;
    type_distance_partitions(&nf.extension.algebra, &nf.original, &nf.tuple, &c_image)
}

/// `tp(a/C)` is further than `eps` (strictly) from the non-forking extension
/// of `tp(a/E)`.
pub fn epsilon_forks(alg: &FiniteProbabilityAlgebra, a: &[Event], e: &Subalgebra, c: &Subalgebra, eps: &Rational) -> Result<bool> {
    Ok(forking_distance(alg, a, e, c)? > *eps)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainReport {
    /// Forking distance of each step `chain[i] -> chain[i+1]`.
    pub distances: Vec<Rational>,
    /// Indices of the steps that `eps`-fork.
    pub forking_steps: Vec<usize>,
    /// `(1/eps)^2`.
    pub bound: Rational,
    pub within_bound: bool,
}

/// Counts the `eps`-forking steps along an increasing chain of subalgebras
/// and compares the count with `(1/eps)^2`.
pub fn forking_chain_check(alg: &FiniteProbabilityAlgebra, a: &[Event], chain: &[Subalgebra], eps: &Rational) -> Result<ChainReport> {
    if !eps.is_positive() {
        return Err(Error::ValueOutOfRange(fmt_ratio(eps)));
    }
    for w in chain.windows(2) {
        if !w[0].is_coarsening_of(&w[1]) {
            return Err(Error::NotCoarsening);
        }
    }
    let distances = chain
        .windows(2)
        .map(|w| forking_distance(alg, a, &w[0], &w[1]))
        .collect::<Result<Vec<_>>>()?;
    let forking_steps: Vec<usize> = distances
        .iter()
        .enumerate()
        .filter(|(_, d)| *d > eps)
        .map(|(i, _)| i)
        .collect();
    let inv = eps.recip();
    let bound = &inv * &inv;
    let within_bound = Rational::from_integer(BigInt::from(forking_steps.len())) <= bound;
    Ok(ChainReport {
        distances,
        forking_steps,
        bound,
        within_bound,
    })
}

/// One cell of the canonical-base estimate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SfbCell {
    pub cell: u64,
    /// `||P(a^s|C) - P(b^s|C)||_1`.
    pub distance: Rational,
    /// Atoms of the level subalgebra `E` built from both conditional
    /// probabilities; at most `k^2`.
    pub atoms: usize,
    /// `||P(a^s|E) - P(b^s|E)||_1`.
    pub coarse_distance: Rational,
    /// `d_phi_s = max_c |mu(a^s n c) - mu(b^s n c)|`.
    pub d_phi: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SfbReport {
    pub eps: Rational,
    /// `d_{2^n}` of the associated partitions; an upper bound for
    /// `2^{-n+1} d_n`, exact for `n = 1`.
    pub lhs: Rational,
    /// `(1/eps + 1)^2 d_Cb + 2 eps`.
    pub rhs: Rational,
    pub d_cb: Rational,
    pub cells: Vec<SfbCell>,
    /// `lhs <= rhs` and every intermediate estimate holds.
    pub holds: bool,
}

/// Checks `2^{-n+1} d(p,q) <= (1/eps + 1)^2 d_Cb(p,q) + 2 eps` through the
/// level-partition argument, cell by cell.
pub fn sfb_check(alg: &FiniteProbabilityAlgebra, a: &[Event], b: &[Event], c: &Subalgebra, eps: &Rational) -> Result<SfbReport> {
    if !eps.is_positive() || *eps > Rational::one() {
        return Err(Error::ValueOutOfRange(fmt_ratio(eps)));
    }
    let k: usize = eps.recip().floor().to_integer().to_usize().expect("eps <= 1") + 1;
    let two_eps = eps * Rational::from_integer(BigInt::from(2));
    let factor = {
        let t = eps.recip() + Rational::one();
        &t * &t
    };
    let dcb = d_cb(alg, a, b, c)?;
    let mut holds = true;
    let mut cells = Vec::new();
    for (s, (x, y)) in cell_pairs(alg, a, b)?.into_iter().enumerate() {
        let (ex, ey) = (alg.wrap(x), alg.wrap(y));
        let (px, py) = (cond_prob(alg, &ex, c)?, cond_prob(alg, &ey, c)?);
        let distance = l1_distance(alg, &px, &py)?;
        let e = level_partition(alg, &px, k)?.join(&level_partition(alg, &py, k)?)?;
        let coarse_distance = l1_distance(alg, &cond_prob(alg, &ex, &e)?, &cond_prob(alg, &ey, &e)?)?;
        let d_phi = best_union(
            c.blocks()
                .iter()
                .map(|blk| alg.measure_of(&ex.members().intersection(blk)) - alg.measure_of(&ey.members().intersection(blk))),
        );
        let atoms = e.block_count();
        holds &= atoms <= k * k
            && distance <= &coarse_distance + &two_eps
            && coarse_distance <= Rational::from_integer(BigInt::from(atoms)) * &d_phi
            && Rational::from_integer(BigInt::from(atoms)) <= factor;
        cells.push(SfbCell {
            cell: s as u64,
            distance,
            atoms,
            coarse_distance,
            d_phi,
        });
    }
    let pa = alg.associated_partition(a)?;
    let pb = alg.associated_partition(b)?;
    let lhs = type_distance_partitions(alg, &pa, &pb, c)?;
    let rhs = &factor * &dcb + &two_eps;
    holds &= lhs <= rhs;
    Ok(SfbReport {
        eps: eps.clone(),
        lhs,
        rhs,
        d_cb: dcb,
        cells,
        holds,
    })
}
