//! Randomized property suites, one per acceptance criterion.
//!
//! Every suite draws its instances from a ChaCha8 stream derived from the
//! configured seed, so runs are reproducible. A failing suite reports the
//! smallest failing instance it saw (fewest atoms) as its witness. With
//! `inject_fault` set, each suite perturbs the value under test so that the
//! harness itself can be checked to fail loudly.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{Event, FiniteProbabilityAlgebra, Subalgebra};
use crate::atoms::{at_n, elementarily_equivalent, find_isomorphism, phi_n_closed};
use crate::conditional::{cond_prob, l1_distance};
use crate::entropy::{chain_rule_check, cond_entropy, entropy_drop, entropy_forking_gap, TOLERANCE};
use crate::error::Result;
use crate::independence::{characterization_report, extend_with_independent_copy, subalgebras_independent};
use crate::logic::{evaluate, normal_form, to_restricted_connectives, Builtin, Evaluator, Valuation};
use crate::oracle::{partition_search, partition_search_upto, tuple_search_upto};
use crate::random::{self as gen, Rng8};
use crate::rational::{fmt_ratio, rat, Rational};
use crate::rv::{dp_rv, dyadic_approx, pi_gap_bound, pointwise_gap_within, project_pi, rho_n, RVPartition};
use crate::types::{
    coordinate_distances, forking_chain_check, lipschitz_check, optimal_realization, sfb_check, type_distance_partitions,
    type_of,
};

#[derive(Clone, Debug)]
pub struct Config {
    pub seed: u64,
    /// Multiplies every instance count (at least one instance per suite).
    pub scale: f64,
    /// Upper bound on atoms, applied on top of each suite's own bound.
    pub max_atoms: usize,
    pub inject_fault: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 2024,
            scale: 1.0,
            max_atoms: 10,
            inject_fault: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub id: &'static str,
    pub title: &'static str,
    pub instances: usize,
    pub failures: usize,
    pub witness: Option<String>,
    pub elapsed: Duration,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

type SuiteFn = fn(&mut Ctx) -> Result<()>;

/// `(id, title, base instance count, body)`.
pub const SUITES: &[(&str, &str, usize, SuiteFn)] = &[
    ("axioms", "axioms hold on random algebras (<= 10 atoms)", 200, axioms),
    ("phi-oracle", "phi_n closed form = quantifier evaluation; chain and at_n (<= 8 atoms, n <= 4)", 40, phi_oracle),
    ("normal-form", "quantifier-free formulas equal their normal forms", 1000, normal_forms),
    ("independence", "the four characterizations of independence agree", 500, independence),
    ("extension", "independent copies have the right type and are independent", 500, extension),
    ("distance", "optimal realization attains the type distance; search never beats it", 150, distance),
    ("lipschitz", "general-tuple search result lies in the partition bracket (n <= 2)", 150, lipschitz),
    ("sfb", "canonical-base estimate for eps in {1/2, 1/4, 1/8}", 500, sfb),
    ("rv", "rho_n sandwich, L1 identity, projection gap, dyadic coherence", 500, rv),
    ("entropy", "chain rule, entropy drop, entropy-forking gap", 500, entropy),
    ("chain-bound", "eps-forking steps along chains stay below (1/eps)^2", 200, chain_bound),
    ("classification", "equal Phi invariants iff an isomorphism exists", 200, classification),
];

pub fn suite_ids() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

pub fn run_all(cfg: &Config) -> Vec<SuiteResult> {
    SUITES.iter().map(|s| run_entry(s, cfg)).collect()
}

pub fn run_suite(id: &str, cfg: &Config) -> Option<SuiteResult> {
    SUITES.iter().find(|s| s.0 == id).map(|s| run_entry(s, cfg))
}

fn run_entry(entry: &(&'static str, &'static str, usize, SuiteFn), cfg: &Config) -> SuiteResult {
    let (id, title, base, body) = *entry;
    let count = ((base as f64 * cfg.scale).round() as usize).max(1);
    let salt = id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    let mut ctx = Ctx {
        rng: gen::rng(cfg.seed ^ salt),
        count,
        max_atoms: cfg.max_atoms.max(1),
        fault: cfg.inject_fault,
        instances: 0,
        failures: 0,
        witness: None,
    };
    let start = Instant::now();
    if let Err(e) = body(&mut ctx) {
        ctx.failures += 1;
        ctx.witness.get_or_insert((0, format!("error: {e}")));
    }
    SuiteResult {
        id,
        title,
        instances: ctx.instances,
        failures: ctx.failures,
        witness: ctx.witness.map(|w| w.1),
        elapsed: start.elapsed(),
    }
}

pub struct Ctx {
    rng: Rng8,
    count: usize,
    max_atoms: usize,
    fault: bool,
    instances: usize,
    failures: usize,
    witness: Option<(usize, String)>,
}

impl Ctx {
    fn atoms(&mut self, lo: usize, hi: usize) -> usize {
        let hi = hi.min(self.max_atoms).max(1);
        self.rng.random_range(lo.min(hi)..=hi)
    }

    fn algebra(&mut self, lo: usize, hi: usize, units: u64) -> FiniteProbabilityAlgebra {
        let n = self.atoms(lo, hi);
        crate::algebra::random_algebra_with(&mut self.rng, n, units)
    }

    /// The value under test, shifted by `1/1009` when faults are injected.
    /// Suites whose checks are inequalities shift their bound instead.
    fn tweak(&self, r: Rational) -> Rational {
        if self.fault {
            r + rat(1, 1009)
        } else {
            r
        }
    }

    fn flip(&self, b: bool) -> bool {
        b != self.fault
    }

    fn check(&mut self, ok: bool, alg: &FiniteProbabilityAlgebra, detail: impl FnOnce() -> String) {
        self.instances += 1;
        if ok {
            return;
        }
        self.failures += 1;
        let size = alg.atom_count();
        if self.witness.as_ref().is_none_or(|(s, _)| size < *s) {
            self.witness = Some((size, format!("weights {}; {}", weights(alg), detail())));
        }
    }
}

fn weights(alg: &FiniteProbabilityAlgebra) -> String {
    let w: Vec<String> = alg.weights().iter().map(fmt_ratio).collect();
    format!("[{}]", w.join(", "))
}

fn ev(e: &Event) -> String {
    let a: Vec<String> = e.atoms().map(|x| x.to_string()).collect();
    format!("{{{}}}", a.join(","))
}

fn evs(es: &[Event]) -> String {
    let a: Vec<String> = es.iter().map(ev).collect();
    format!("({})", a.join(", "))
}

fn sub(s: &Subalgebra) -> String {
    let b: Vec<String> = s
        .blocks()
        .iter()
        .map(|b| format!("{{{}}}", b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    format!("<{}>", b.join(" "))
}

const EPS_SFB: [(i64, i64); 3] = [(1, 2), (1, 4), (1, 8)];

// ---- suites -------------------------------------------------------------

fn axioms(ctx: &mut Ctx) -> Result<()> {
    for _ in 0..ctx.count {
        let mut alg = ctx.algebra(1, 10, 9);
        if ctx.fault {
            let mut w = alg.weights().to_vec();
            w[0] = ctx.tweak(w[0].clone());
            alg = FiniteProbabilityAlgebra::unchecked(w, None)?;
        }
        let report = alg.verify_axioms();
        let failed: Vec<String> = report.failures().map(|c| c.name.to_string()).collect();
        ctx.check(report.all_passed(), &alg, || format!("failing: {}", failed.join("; ")));
    }
    Ok(())
}

fn phi_oracle(ctx: &mut Ctx) -> Result<()> {
    let builtins: Vec<Builtin> = (1..=4).map(Builtin::Phi).chain((1..=4).map(Builtin::At)).collect();
    for _ in 0..ctx.count {
        let alg = ctx.algebra(1, 8, 9);
        let tables = Evaluator::new(&alg).builtin_tables(&builtins)?;
        for mask in 0u64..1 << alg.atom_count() {
            let a = alg.event((0..alg.atom_count()).filter(|i| mask >> i & 1 == 1))?;
            let mut prev = alg.mu(&a)?;
            let mut ok = true;
            let mut detail = String::new();
            for n in 1..=4 {
                let closed = ctx.tweak(phi_n_closed(&alg, &a, n)?);
                let brute = &tables[n - 1][mask as usize];
                let at_closed = at_n(&alg, &a, n)?;
                let at_brute = &tables[n + 3][mask as usize];
                let at_def = crate::rational::monus(&prev, brute);
                if closed != *brute || closed > prev || at_closed != *at_brute || *at_brute != at_def {
                    ok = false;
                    detail = format!(
                        "a = {}, n = {n}: closed {}, evaluated {}, at_n {} vs {}",
                        ev(&a),
                        fmt_ratio(&closed),
                        fmt_ratio(brute),
                        fmt_ratio(&at_closed),
                        fmt_ratio(at_brute)
                    );
                    break;
                }
                prev = brute.clone();
            }
            ctx.check(ok, &alg, || detail);
        }
    }
    Ok(())
}

fn normal_forms(ctx: &mut Ctx) -> Result<()> {
    let vars: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    for _ in 0..ctx.count {
        let alg = ctx.algebra(1, 6, 9);
        let nv = ctx.rng.random_range(1..=3);
        let f = gen::qf_formula(&mut ctx.rng, &vars[..nv], 5);
        let mut v = Valuation::new();
        for name in &vars {
            v.insert(name.clone(), gen::event(&mut ctx.rng, &alg));
        }
        let direct = ctx.tweak(evaluate(&alg, &f, &v)?);
        let nf = evaluate(&alg, &normal_form(&f, &vars[..nv])?, &v)?;
        let restricted = evaluate(&alg, &to_restricted_connectives(&f), &v)?;
        ctx.check(direct == nf && direct == restricted, &alg, || {
            format!("{f} at {}: {} vs normal form {}", evs(&[v["x"].clone(), v["y"].clone(), v["z"].clone()]), fmt_ratio(&direct), fmt_ratio(&nf))
        });
    }
    Ok(())
}

/// Two random algebras multiplied together, with the events of each factor.
fn product(ctx: &mut Ctx) -> Result<(FiniteProbabilityAlgebra, Vec<Event>, Vec<Event>)> {
    let p = ctx.algebra(1, 3, 6);
    let q = ctx.algebra(1, 3, 6);
    let (m, n) = (p.atom_count(), q.atom_count());
    let w = (0..m * n).map(|k| p.weight(k / n) * q.weight(k % n)).collect();
    let alg = FiniteProbabilityAlgebra::from_weights(w)?;
    let s = (0..2)
        .map(|_| {
            let e = gen::event(&mut ctx.rng, &p);
            alg.event((0..m * n).filter(|k| e.contains(k / n)))
        })
        .collect::<Result<_>>()?;
    let t = (0..2)
        .map(|_| {
            let e = gen::event(&mut ctx.rng, &q);
            alg.event((0..m * n).filter(|k| e.contains(k % n)))
        })
        .collect::<Result<_>>()?;
    Ok((alg, s, t))
}

fn independence(ctx: &mut Ctx) -> Result<()> {
    for i in 0..ctx.count {
        let (alg, s, t, w) = match i % 3 {
            0 => {
                let (alg, s, t) = product(ctx)?;
                (alg, s, t, Vec::new())
            }
            1 => {
                let alg = ctx.algebra(1, 6, 9);
                let a = gen::partition(&mut ctx.rng, &alg, 2);
                let (c, d) = gen::coarsening_pair(&mut ctx.rng, &alg);
                let out = extend_with_independent_copy(&alg, &a, &c, &d)?;
                let x = out.extension;
                (
                    x.algebra.clone(),
                    out.copies,
                    x.image_subalgebra(&d)?.block_events(),
                    x.image_subalgebra(&c)?.block_events(),
                )
            }
            _ => {
                let alg = ctx.algebra(1, 6, 9);
                let s = gen::events(&mut ctx.rng, &alg, 1 + i % 2);
                let t = gen::events(&mut ctx.rng, &alg, 1);
                let w = gen::events(&mut ctx.rng, &alg, i % 2);
                (alg, s, t, w)
            }
        };
        let r = characterization_report(&alg, &s, &t, &w)?;
        let ok = ctx.flip(r.consistent());
        ctx.check(ok, &alg, || {
            format!("S = {}, T = {}, W = {}: conditions {:?}", evs(&s), evs(&t), evs(&w), r.conditions())
        });
    }
    Ok(())
}

fn extension(ctx: &mut Ctx) -> Result<()> {
    for _ in 0..ctx.count {
        let alg = ctx.algebra(1, 6, 9);
        let m = ctx.rng.random_range(1..=3);
        let a = gen::partition(&mut ctx.rng, &alg, m);
        let (c, d) = gen::coarsening_pair(&mut ctx.rng, &alg);
        let out = extend_with_independent_copy(&alg, &a, &c, &d)?;
        let x = &out.extension;
        let new = &x.algebra;
        let (c2, d2) = (x.image_subalgebra(&c)?, x.image_subalgebra(&d)?);
        let a2 = x.image_all(&a)?;
        let mut ok = x.is_measure_preserving(&alg);
        for (e, ai) in out.copies.iter().zip(&a2) {
            let lhs = cond_prob(new, e, &c2)?;
            let rhs = cond_prob(new, ai, &c2)?;
            ok &= ctx.tweak(l1_distance(new, &lhs, &rhs)?).is_zero();
        }
        let e_sub = new.generated_subalgebra(&out.copies)?;
        ok &= subalgebras_independent(new, &e_sub, &d2, &c2);
        ctx.check(ok, &alg, || format!("A = {}, C = {}, D = {}", evs(&a), sub(&c), sub(&d)));
    }
    Ok(())
}

fn distance(ctx: &mut Ctx) -> Result<()> {
    for _ in 0..ctx.count {
        let alg = ctx.algebra(1, 6, 4);
        let n = ctx.rng.random_range(2..=3);
        let a = gen::partition(&mut ctx.rng, &alg, n);
        let b = gen::partition(&mut ctx.rng, &alg, n);
        let c = gen::subalgebra(&mut ctx.rng, &alg);
        let target = coordinate_distances(&alg, &a, &b, &c)?;
        let d = ctx.tweak(type_distance_partitions(&alg, &a, &b, &c)?);
        let o = optimal_realization(&alg, &a, &b, &c)?;
        let c2 = o.extension.image_subalgebra(&c)?;
        let realizes = type_of(&o.extension.algebra, &o.b_prime, &c2)?.same_values(&type_of(&alg, &b, &c)?);
        let searched = partition_search_upto(&alg, &a, &b, &c, 3)?;
        let at_one = partition_search(&alg, &a, &b, &c, 1)?;
        let ok = o.distances == target && realizes && searched >= d && at_one == d;
        ctx.check(ok, &alg, || {
            format!(
                "a = {}, b = {}, C = {}: theorem {}, search {}",
                evs(&a),
                evs(&b),
                sub(&c),
                fmt_ratio(&d),
                fmt_ratio(&searched)
            )
        });
    }
    Ok(())
}

fn lipschitz(ctx: &mut Ctx) -> Result<()> {
    for _ in 0..ctx.count {
        let alg = ctx.algebra(1, 5, 4);
        let n = ctx.rng.random_range(1..=2);
        let a = gen::events(&mut ctx.rng, &alg, n);
        let b = gen::events(&mut ctx.rng, &alg, n);
        let c = gen::subalgebra(&mut ctx.rng, &alg);
        let br = lipschitz_check(&alg, &a, &b, &c)?;
        let mut dn = tuple_search_upto(&alg, &a, &b, &c, 3)?;
        if ctx.fault {
            dn = ctx.tweak(br.upper.clone());
        }
        let nn = Rational::from_integer(BigInt::from(n));
        let scale = Rational::new(BigInt::one(), BigInt::from(1u64 << (n - 1)));
        let ok = br.contains(&dn) && &scale * &dn <= br.middle && br.middle <= &nn * &dn;
        ctx.check(ok, &alg, || {
            format!(
                "a = {}, b = {}, C = {}: search {}, bracket [{}, {}]",
                evs(&a),
                evs(&b),
                sub(&c),
                fmt_ratio(&dn),
                fmt_ratio(&br.lower),
                fmt_ratio(&br.upper)
            )
        });
    }
    Ok(())
}

fn sfb(ctx: &mut Ctx) -> Result<()> {
    for _ in 0..ctx.count {
        let alg = ctx.algebra(1, 8, 9);
        let n = ctx.rng.random_range(1..=3);
        let a = gen::events(&mut ctx.rng, &alg, n);
        let b = gen::events(&mut ctx.rng, &alg, n);
        let c = gen::subalgebra(&mut ctx.rng, &alg);
        for (p, q) in EPS_SFB {
            let r = sfb_check(&alg, &a, &b, &c, &rat(p, q))?;
            let lhs = if ctx.fault { ctx.tweak(r.rhs.clone()) } else { r.lhs.clone() };
            let ok = r.holds && lhs <= r.rhs;
            ctx.check(ok, &alg, || {
                format!(
                    "a = {}, b = {}, C = {}, eps = {p}/{q}: lhs {} rhs {}",
                    evs(&a),
                    evs(&b),
                    sub(&c),
                    fmt_ratio(&lhs),
                    fmt_ratio(&r.rhs)
                )
            });
        }
    }
    Ok(())
}

fn rv(ctx: &mut Ctx) -> Result<()> {
    for _ in 0..ctx.count {
        let alg = ctx.algebra(1, 8, 9);
        let n = ctx.rng.random_range(1..=6);
        let e = RVPartition::new(&alg, gen::partition(&mut ctx.rng, &alg, n))?;
        let f = RVPartition::new(&alg, gen::partition(&mut ctx.rng, &alg, n))?;
        let rho = ctx.tweak(rho_n(&alg, &e, &f)?);
        let dp = dp_rv(&alg, &e, &f)?;
        let nn = Rational::from_integer(BigInt::from(n));
        let (fe, ff) = (e.step_function(&alg)?, f.step_function(&alg)?);
        let mut ok = &dp / &nn <= rho && rho <= dp && rho == l1_distance(&alg, &fe, &ff)?;
        if n % 2 == 0 {
            let p = project_pi(&alg, &e)?.step_function(&alg)?;
            let bound = pi_gap_bound(n);
            ok &= pointwise_gap_within(&alg, &fe, &p, &bound) && l1_distance(&alg, &fe, &p)? <= bound;
        }
        let s = gen::subalgebra(&mut ctx.rng, &alg);
        let g = gen::step_function(&mut ctx.rng, &s, 12);
        let depth = ctx.rng.random_range(1..=4u32);
        let fine = dyadic_approx(&alg, &g, depth + 1)?;
        let coarse = dyadic_approx(&alg, &g, depth)?;
        let err = l1_distance(&alg, &coarse.step_function(&alg)?, &g)?;
        ok &= project_pi(&alg, &fine)? == coarse && err <= Rational::new(BigInt::one(), BigInt::from(1u64 << depth));
        ctx.check(ok, &alg, || {
            format!("E = {}, F = {}: rho {}, d_P {}", evs(e.parts()), evs(f.parts()), fmt_ratio(&rho), fmt_ratio(&dp))
        });
    }
    Ok(())
}

fn entropy(ctx: &mut Ctx) -> Result<()> {
    let coin = crate::algebra::uniform_algebra(2);
    let h = cond_entropy(&coin, &Subalgebra::full(&coin), &Subalgebra::trivial(&coin))?;
    let spot = (h - std::f64::consts::LN_2).abs() <= TOLERANCE && (h - 0.6931471805).abs() < 1e-10;
    ctx.check(spot, &coin, || format!("H(coin) = {h}"));
    for i in 0..ctx.count {
        let alg = ctx.algebra(1, 8, 9);
        let a = gen::subalgebra(&mut ctx.rng, &alg);
        let c = gen::subalgebra(&mut ctx.rng, &alg);
        let e = gen::subalgebra(&mut ctx.rng, &alg);
        let chain = chain_rule_check(&alg, &a, &c, &e)?;
        let (lo, hi) = gen::coarsening_pair(&mut ctx.rng, &alg);
        let drop = entropy_drop(&alg, &a, &lo, &hi)?;
        let m = ctx.rng.random_range(2..=3);
        let parts = gen::partition(&mut ctx.rng, &alg, m);
        let (p, q) = EPS_SFB[i % 3];
        let mut gap = entropy_forking_gap(&alg, &parts, &lo, &hi, &rat(p, q))?;
        if ctx.fault {
            gap.h_d += 1.0;
            gap.forks = true;
        }
        let ok = chain.holds() && drop.holds() && gap.holds();
        ctx.check(ok, &alg, || {
            format!(
                "A = {}, C = {}, E = {}, D = {}, a = {}: chain error {:e}, drop {} vs {}, forking gap {} vs {}",
                sub(&a),
                sub(&c),
                sub(&lo),
                sub(&hi),
                evs(&parts),
                chain.error,
                drop.gap,
                fmt_ratio(&drop.rhs),
                gap.gap(),
                fmt_ratio(&gap.threshold)
            )
        });
    }
    Ok(())
}

fn chain_bound(ctx: &mut Ctx) -> Result<()> {
    let eps = [rat(1, 2), rat(1, 3), rat(1, 4)];
    for i in 0..ctx.count {
        let alg = ctx.algebra(1, 10, 9);
        let len = ctx.rng.random_range(2..=11);
        let chain = gen::chain(&mut ctx.rng, &alg, len);
        let m = ctx.rng.random_range(2..=3);
        let a = gen::partition(&mut ctx.rng, &alg, m);
        let e = &eps[i % 3];
        let r = forking_chain_check(&alg, &a, &chain, e)?;
        let count = Rational::from_integer(BigInt::from(r.forking_steps.len()));
        let ok = ctx.flip(r.within_bound) && count <= r.bound;
        ctx.check(ok, &alg, || {
            let steps: Vec<String> = chain.iter().map(sub).collect();
            format!("a = {}, eps = {}, chain {}: {} forks", evs(&a), fmt_ratio(e), steps.join(" < "), r.forking_steps.len())
        });
    }
    Ok(())
}

fn classification(ctx: &mut Ctx) -> Result<()> {
    for i in 0..ctx.count {
        let a = ctx.algebra(1, 8, 4);
        let b = if i % 2 == 0 {
            let mut w = a.weights().to_vec();
            w.shuffle(&mut ctx.rng);
            FiniteProbabilityAlgebra::from_weights(w)?
        } else {
            let n = if ctx.rng.random_bool(0.5) { a.atom_count() } else { ctx.atoms(1, 8) };
            crate::algebra::random_algebra_with(&mut ctx.rng, n, 4)
        };
        let equiv = ctx.flip(elementarily_equivalent(&a, &b));
        let iso = find_isomorphism(&a, &b);
        let valid = iso
            .as_ref()
            .is_none_or(|m| m.iter().enumerate().all(|(x, &y)| a.weight(x) == b.weight(y)));
        ctx.check(equiv == iso.is_some() && valid, &a, || {
            format!("other weights {}: equivalent {equiv}, isomorphism {:?}", weights(&b), iso)
        });
    }
    Ok(())
}

/// Summary table: one `PASS`/`FAIL` line per suite, followed by the
/// witness of a failing suite. Timings are optional so that output can be
/// compared byte for byte.
pub fn render(results: &[SuiteResult], timings: bool) -> String {
    let mut out = String::new();
    for r in results {
        let time = if timings {
            format!("  {:>8.2}s", r.elapsed.as_secs_f64())
        } else {
            String::new()
        };
        out.push_str(&format!(
            "{} {:<15} {:>6} instances{}  {}\n",
            if r.passed() { "PASS" } else { "FAIL" },
            r.id,
            r.instances,
            time,
            r.title
        ));
        if let Some(w) = &r.witness {
            out.push_str(&format!("     witness: {w}\n"));
        }
    }
    out
}

/// Results as `id -> passed`.
pub fn outcome_map(results: &[SuiteResult]) -> BTreeMap<&'static str, bool> {
    results.iter().map(|r| (r.id, r.passed())).collect()
}
