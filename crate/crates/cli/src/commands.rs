use std::fs;
use std::path::Path;

use probalg::algebra::{sign_is_plus, Event, Subalgebra};
use probalg::atoms::{at_n, chi_with_cap, elementarily_equivalent, find_isomorphism, phi_invariant, phi_n_closed, theta_with_cap};
use probalg::conditional::cond_prob;
use probalg::document::{Structure, StructureDocument};
use probalg::entropy::{chain_rule_check, cond_entropy, entropy_drop, entropy_forking_gap, TOLERANCE};
use probalg::independence::characterization_report;
use probalg::logic::{parse, Evaluator, Valuation};
use probalg::rational::{fmt_ratio, parse_rational, to_f64};
use probalg::rv::{dp_rv, dyadic_approx, rho_n, RVPartition};
use probalg::selftest::{self, Config};
use probalg::types::{
    d_cb, d_p, forking_chain_check, forking_distance, lipschitz_check, nonforking_extension, optimal_realization,
    realize_type, type_distance_partitions, type_of, TypeDescriptor,
};
use probalg::{random, Error, Extension, FiniteProbabilityAlgebra, Rational};

use crate::args::*;
use crate::out::{Cell, Report};

/// Failure with the process exit code: 2 for unreadable input, 3 for input
/// that reads fine but does not make sense.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Semantic(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Semantic(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Semantic(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_parse_error() {
            CliError::Parse(e.to_string())
        } else {
            CliError::Semantic(e.to_string())
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))
}

fn document(path: &Path) -> Result<StructureDocument> {
    StructureDocument::from_json(&read(path)?).map_err(|e| CliError::Parse(e.to_string()))
}

fn structure_path(cli: &Cli) -> Result<&Path> {
    cli.structure
        .as_deref()
        .ok_or_else(|| CliError::Parse("this command needs --structure FILE".into()))
}

pub fn load(path: &Path) -> Result<Structure> {
    Ok(document(path)?.load()?)
}

fn ratio(text: &str) -> Result<Rational> {
    parse_rational(text).map_err(|e| CliError::Parse(e.to_string()))
}

fn sign(s: u64, n: usize) -> String {
    (0..n).map(|i| if sign_is_plus(s, i, n) { '+' } else { '-' }).collect()
}

fn labels(alg: &FiniteProbabilityAlgebra, atoms: impl Iterator<Item = usize>) -> String {
    let names: Vec<&str> = atoms.map(|x| alg.labels()[x].as_str()).collect();
    format!("{{{}}}", names.join(","))
}

fn show(alg: &FiniteProbabilityAlgebra, e: &Event) -> String {
    labels(alg, e.atoms())
}

fn show_tuple(alg: &FiniteProbabilityAlgebra, es: &[Event]) -> Cell {
    Cell::Text(es.iter().map(|e| show(alg, e)).collect::<Vec<_>>().join(", "))
}

fn show_blocks(alg: &FiniteProbabilityAlgebra, s: &Subalgebra) -> Vec<String> {
    s.blocks().iter().map(|b| labels(alg, b.iter())).collect()
}

pub fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Eval(a) => eval(&load(structure_path(cli)?)?, a),
        Command::Atoms(a) => atoms(&load(structure_path(cli)?)?, a),
        Command::Indep(a) => indep(&load(structure_path(cli)?)?, a),
        Command::Type(a) => type_report(&load(structure_path(cli)?)?, a),
        Command::Forking(a) => forking(&load(structure_path(cli)?)?, a),
        Command::Rv(a) => rv(&load(structure_path(cli)?)?, a),
        Command::Entropy(a) => entropy(&load(structure_path(cli)?)?, a),
        Command::Axioms => axioms(structure_path(cli)?),
        Command::Gen(a) => gen(a),
        Command::Selftest(a) => self_test(a),
    }
}

fn eval(s: &Structure, a: &EvalArgs) -> Result<Report> {
    let text = match (&a.formula, &a.inline) {
        (Some(path), _) => read(path)?,
        (None, Some(t)) => t.clone(),
        (None, None) => unreachable!("clap requires one source"),
    };
    let phi = parse(text.trim())?;
    let mut v = Valuation::new();
    for b in &a.binds {
        let (var, reference) = b
            .split_once('=')
            .ok_or_else(|| CliError::Parse(format!("binding `{b}` is not VAR=EVENT")))?;
        v.insert(var.trim().to_string(), s.event(reference)?);
    }
    let result = Evaluator::new(&s.algebra).with_named(&s.events).with_cap(a.cap).eval(&phi, &v)?;
    let mut r = Report::new();
    r.put("formula", phi.to_string());
    let value = &result.value;
    r.put_as("value", value, format!("{} ≈ {:.6}", fmt_ratio(value), to_f64(value)));
    if a.witness {
        let rows = result
            .witnesses
            .iter()
            .map(|(var, e)| vec![Cell::from(var.as_str()), Cell::Text(show(&s.algebra, e))])
            .collect();
        r.table("witnesses", &["var", "event"], rows);
    }
    Ok(r)
}

fn atoms(s: &Structure, a: &AtomsArgs) -> Result<Report> {
    let alg = &s.algebra;
    let e = s.event(&a.event)?;
    let mut r = Report::new();
    r.list("Phi", phi_invariant(alg).sorted_weights.iter().map(Cell::from).collect());
    r.put("event", show(alg, &e));
    r.put("mu", alg.mu(&e)?);
    let rows = (1..=alg.atom_count())
        .map(|n| Ok(vec![Cell::from(n), at_n(alg, &e, n)?.into(), phi_n_closed(alg, &e, n)?.into()]))
        .collect::<Result<Vec<_>>>()?;
    r.table("predicates", &["n", "at_n", "phi_n"], rows);
    if alg.atom_count() <= a.cap {
        r.put("chi", chi_with_cap(alg, &e, a.cap)?);
        r.put("theta", theta_with_cap(alg, &e, a.cap)?);
    }
    if let Some(path) = &a.against {
        let other = load(path)?.algebra;
        r.put("equivalent", elementarily_equivalent(alg, &other));
        match find_isomorphism(alg, &other) {
            Some(map) => {
                let rows = map
                    .iter()
                    .enumerate()
                    .map(|(x, &y)| vec![Cell::from(alg.labels()[x].as_str()), Cell::from(other.labels()[y].as_str())])
                    .collect();
                r.table("isomorphism", &["atom", "image"], rows);
            }
            None => r.put("isomorphism", "none"),
        }
    }
    Ok(r)
}

fn indep(s: &Structure, a: &IndepArgs) -> Result<Report> {
    let (st, tt, wt) = (s.events_list(&a.s)?, s.events_list(&a.t)?, s.events_list(&a.w)?);
    let rep = characterization_report(&s.algebra, &st, &tt, &wt)?;
    let mut r = Report::new();
    r.put("defect", &rep.defect);
    r.put("(i) product identity", rep.product);
    r.put("(ii) P(A|WT) = P(A|W)", rep.same_conditional);
    r.put("(iii) P(A|WT) is W-measurable", rep.w_measurable);
    r.put("(iv) equal L2 norms", rep.equal_norms);
    r.put("independent", rep.product);
    if !rep.consistent() {
        r.failed = true;
    }
    Ok(r)
}

fn descriptor_table(r: &mut Report, key: &str, alg: &FiniteProbabilityAlgebra, d: &TypeDescriptor) {
    let blocks = show_blocks(alg, d.base());
    let mut headers = vec!["cell"];
    headers.extend(blocks.iter().map(String::as_str));
    let rows = d
        .entries()
        .map(|(s, f)| {
            let mut row = vec![Cell::Text(sign(s, d.arity()))];
            row.extend(f.values().iter().map(Cell::from));
            row
        })
        .collect();
    r.table(key, &headers, rows);
}

fn is_partition(alg: &FiniteProbabilityAlgebra, t: &[Event]) -> bool {
    alg.check_partition(t).is_ok()
}

fn atoms_of(ext: &Extension) -> Vec<Vec<Cell>> {
    let alg = &ext.algebra;
    (0..alg.atom_count())
        .map(|x| vec![Cell::from(alg.labels()[x].as_str()), alg.weight(x).into()])
        .collect()
}

fn type_report(s: &Structure, a: &TypeArgs) -> Result<Report> {
    let alg = &s.algebra;
    let c = s.subalgebra(&a.c)?;
    let ta = s.events_list(&a.a)?;
    let pa = type_of(alg, &ta, &c)?;
    let mut r = Report::new();
    r.list("C", show_blocks(alg, &c).into_iter().map(Cell::Text).collect());
    descriptor_table(&mut r, "tp(a/C)", alg, &pa);
    if let Some(b) = &a.b {
        let tb = s.events_list(b)?;
        if tb.len() != ta.len() {
            return Err(Error::LengthMismatch(ta.len(), tb.len()).into());
        }
        let pb = type_of(alg, &tb, &c)?;
        descriptor_table(&mut r, "tp(b/C)", alg, &pb);
        r.put("same type", pa.same_values(&pb));
        r.put("d_P", d_p(alg, &ta, &tb)?);
        r.put("d_Cb", d_cb(alg, &ta, &tb, &c)?);
        if is_partition(alg, &ta) && is_partition(alg, &tb) {
            r.put("distance", type_distance_partitions(alg, &ta, &tb, &c)?);
            let opt = optimal_realization(alg, &ta, &tb, &c)?;
            r.list("optimal coordinate distances", opt.distances.iter().map(Cell::from).collect());
            r.put("b' realizing tp(b/C)", show_tuple(&opt.extension.algebra, &opt.b_prime));
        } else {
            let br = lipschitz_check(alg, &ta, &tb, &c)?;
            r.put("partition distance of cells", &br.middle);
            r.put_as(
                "distance bracket",
                Cell::Text(format!("[{}, {}]", fmt_ratio(&br.lower), fmt_ratio(&br.upper))),
                format!("distance bracket = [{}, {}]", fmt_ratio(&br.lower), fmt_ratio(&br.upper)),
            );
        }
    }
    if a.realize {
        let real = realize_type(alg, &pa)?;
        r.table("realization atoms", &["atom", "weight"], atoms_of(&real.extension));
        r.put("realizing tuple", show_tuple(&real.extension.algebra, &real.tuple));
    }
    Ok(r)
}

fn forking(s: &Structure, a: &ForkingArgs) -> Result<Report> {
    let alg = &s.algebra;
    let tuple = s.events_list(&a.a)?;
    let eps = ratio(&a.eps)?;
    let mut r = Report::new();
    r.put("eps", &eps);
    if !a.chain.is_empty() {
        let chain = a.chain.iter().map(|c| s.subalgebra(c)).collect::<std::result::Result<Vec<_>, _>>()?;
        let rep = forking_chain_check(alg, &tuple, &chain, &eps)?;
        let rows = rep
            .distances
            .iter()
            .enumerate()
            .map(|(i, d)| vec![Cell::from(i + 1), d.into(), Cell::from(d > &eps)])
            .collect();
        r.table("steps", &["step", "distance", "forks"], rows);
        r.put("forking steps", rep.forking_steps.len());
        r.put("bound (1/eps)^2", &rep.bound);
        r.put("within bound", rep.within_bound);
        r.failed = !rep.within_bound;
        return Ok(r);
    }
    let e = s.subalgebra(&a.e)?;
    let c = s.subalgebra(&a.c)?;
    let nf = nonforking_extension(alg, &tuple, &e, &c)?;
    r.table("extension atoms", &["atom", "weight"], atoms_of(&nf.extension));
    r.put("a", show_tuple(&nf.extension.algebra, &nf.original));
    r.put("non-forking a''", show_tuple(&nf.extension.algebra, &nf.tuple));
    let d = forking_distance(alg, &tuple, &e, &c)?;
    r.put("distance", &d);
    r.put("eps-forks", d > eps);
    Ok(r)
}

fn partition(s: &Structure, text: &str) -> Result<RVPartition> {
    Ok(RVPartition::new(&s.algebra, s.events_list(text)?)?)
}

fn rv(s: &Structure, a: &RvArgs) -> Result<Report> {
    let alg = &s.algebra;
    let mut r = Report::new();
    if let (Some(e), Some(f)) = (&a.e, &a.f) {
        let (pe, pf) = (partition(s, e)?, partition(s, f)?);
        let rho = rho_n(alg, &pe, &pf)?;
        let dp = dp_rv(alg, &pe, &pf)?;
        r.put("n", pe.n());
        r.put("rho_n", &rho);
        r.put("d_P", &dp);
        let n = Rational::from_integer(pe.n().into());
        let sandwich = &dp / n <= rho && rho <= dp;
        r.put("d_P/n <= rho_n <= d_P", sandwich);
        r.failed |= !sandwich;
    }
    if let Some(ev) = &a.dyadic {
        let c = s.subalgebra(&a.c)?;
        let f = cond_prob(alg, &s.event(ev)?, &c)?;
        let approx = dyadic_approx(alg, &f, a.depth)?;
        let n = approx.n() as i64;
        let rows = approx
            .parts()
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_empty())
            .map(|(j, p)| {
                let hi = Rational::new((j as i64 + 1).into(), n.into());
                Ok(vec![Cell::from(j + 1), hi.into(), Cell::Text(show(alg, p)), alg.mu(p)?.into()])
            })
            .collect::<Result<Vec<_>>>()?;
        r.table("dyadic parts", &["j", "upper end", "part", "mu"], rows);
        let err = probalg::conditional::l1_distance(alg, &approx.step_function(alg)?, &f)?;
        r.put("L1 error", &err);
    }
    if a.dyadic.is_none() && a.e.is_none() {
        return Err(CliError::Parse("rv needs --E/--F or --dyadic".into()));
    }
    Ok(r)
}

/// `ln m` for the integer `m <= 64` matching `h`, if any.
fn log_name(h: f64) -> Option<String> {
    (2..=64u32).find(|&m| (h - f64::from(m).ln()).abs() <= TOLERANCE).map(|m| format!("ln{m}"))
}

fn show_entropy(r: &mut Report, key: &str, h: f64) {
    let text = match log_name(h) {
        Some(name) => format!("{key} = {name} ≈ {h:.6}"),
        None if h == 0.0 => format!("{key} = 0"),
        None => format!("{key} ≈ {h:.6}"),
    };
    r.put_as(key, h, text);
}

fn entropy(s: &Structure, a: &EntropyArgs) -> Result<Report> {
    let alg = &s.algebra;
    let sa = s.subalgebra(&a.a)?;
    let sc = s.subalgebra(&a.c)?;
    let mut r = Report::new();
    show_entropy(&mut r, &format!("H({}/{})", a.a, a.c), cond_entropy(alg, &sa, &sc)?);
    if let Some(b) = &a.b {
        let sb = s.subalgebra(b)?;
        let chain = chain_rule_check(alg, &sa, &sb, &sc)?;
        let mut inner = Report::new();
        inner.put("lhs", chain.lhs);
        inner.put("rhs", chain.rhs);
        inner.put("error", chain.error);
        inner.put("holds", chain.holds());
        inner.failed = !chain.holds();
        r.nest("chain rule", inner);
    }
    if let Some(d) = &a.d {
        let sd = s.subalgebra(d)?;
        let drop = entropy_drop(alg, &sa, &sc, &sd)?;
        let mut inner = Report::new();
        inner.put("gap", drop.gap);
        inner.put("bound", &drop.rhs);
        inner.put("independent", drop.independent);
        inner.put("holds", drop.holds());
        inner.failed = !drop.holds();
        r.nest("entropy drop", inner);
        if let Some(t) = &a.tuple {
            let tuple = s.events_list(t)?;
            let g = entropy_forking_gap(alg, &tuple, &sc, &sd, &ratio(&a.eps)?)?;
            let mut inner = Report::new();
            inner.put("eps", &g.eps);
            inner.put("distance", &g.distance);
            inner.put("eps-forks", g.forks);
            inner.put("gap", g.gap());
            inner.put("eps^2/2", &g.threshold);
            inner.put("holds", g.holds());
            if !g.forks {
                inner.put("note", "no eps-fork");
            }
            inner.failed = !g.holds();
            r.nest("forking gap", inner);
        }
    }
    Ok(r)
}

fn axioms(path: &Path) -> Result<Report> {
    let s = document(path)?.load_unchecked()?;
    let report = s.algebra.verify_axioms();
    let mut r = Report::new();
    r.put("mode", if report.exhaustive { "exhaustive" } else { "sampled" });
    let rows = report
        .checks
        .iter()
        .map(|c| {
            vec![
                Cell::from(if c.passed { "PASS" } else { "FAIL" }),
                Cell::from(c.name),
                Cell::Text(c.witness.clone().unwrap_or_default()),
            ]
        })
        .collect();
    r.table("checks", &["status", "axiom", "witness"], rows);
    r.failed = !report.all_passed();
    Ok(r)
}

/// Always JSON: the output is a structure file.
fn gen(a: &GenArgs) -> Result<Report> {
    if a.max_atoms == 0 || a.atoms == Some(0) || a.max_units == 0 {
        return Err(CliError::Semantic("need at least one atom and one unit".into()));
    }
    let mut rng = random::rng(a.seed);
    let alg = match a.atoms {
        Some(n) => random::algebra(&mut rng, n, n, a.max_units),
        None => random::algebra(&mut rng, 1, a.max_atoms, a.max_units),
    };
    let events = (1..=a.events).map(|i| (format!("E{i}"), random::event(&mut rng, &alg))).collect();
    let mut doc = StructureDocument::describe(&alg, &events);
    if a.events > 0 {
        doc.subalgebras.insert("C".into(), vec!["E1".into()]);
    }
    let mut r = Report::new();
    r.raw = Some(doc.to_json() + "\n");
    Ok(r)
}

fn self_test(a: &SelftestArgs) -> Result<Report> {
    let cfg = Config {
        seed: a.seed,
        scale: a.scale,
        max_atoms: a.max_atoms,
        inject_fault: a.inject_fault,
    };
    let results = if a.suites.is_empty() {
        selftest::run_all(&cfg)
    } else {
        a.suites
            .iter()
            .map(|id| {
                selftest::run_suite(id, &cfg).ok_or_else(|| {
                    CliError::Semantic(format!("unknown suite `{id}`; known: {}", selftest::suite_ids().join(", ")))
                })
            })
            .collect::<Result<Vec<_>>>()?
    };
    let mut r = Report::new();
    let rows = results
        .iter()
        .map(|x| {
            vec![
                Cell::from(x.id),
                Cell::from(x.passed()),
                Cell::from(x.instances),
                Cell::from(x.failures),
                Cell::Text(x.witness.clone().unwrap_or_default()),
            ]
        })
        .collect();
    r.table("suites", &["id", "passed", "instances", "failures", "witness"], rows);
    r.raw = Some(selftest::render(&results, a.timings));
    r.failed = results.iter().any(|x| !x.passed());
    Ok(r)
}
