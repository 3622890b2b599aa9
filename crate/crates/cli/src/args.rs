use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Exact reports over finite probability algebras.
///
/// Event references: a named event, `ALL`, `NONE`, an atom label or `{x,y}`.
/// Lists and tuples are comma-separated references. Subalgebras: a named
/// subalgebra, `trivial`, `full`, or generators joined with `+`.
#[derive(Parser, Debug)]
#[command(name = "probalg", version, about, long_about = None)]
pub struct Cli {
    /// Structure file (JSON).
    #[arg(long, global = true, value_name = "FILE")]
    pub structure: Option<PathBuf>,

    /// Machine-readable output; rationals are written as "p/q" strings.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a formula exactly.
    Eval(EvalArgs),
    /// Atom invariants: Phi, at_n, phi_n, chi, theta.
    Atoms(AtomsArgs),
    /// Independence of S and T over W.
    Indep(IndepArgs),
    /// Type descriptors, type distances and realizations.
    Type(TypeArgs),
    /// Non-forking extensions and eps-forking.
    Forking(ForkingArgs),
    /// Partition-valued random variables.
    Rv(RvArgs),
    /// Conditional entropy, entropy drop and the forking gap.
    Entropy(EntropyArgs),
    /// Check the probability-algebra axioms on a structure file.
    Axioms,
    /// Generate a random structure file.
    Gen(GenArgs),
    /// Run the property suites.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["formula", "inline"])))]
pub struct EvalArgs {
    /// File containing the formula.
    #[arg(long, value_name = "FILE")]
    pub formula: Option<PathBuf>,
    /// The formula itself.
    #[arg(long, value_name = "STR")]
    pub inline: Option<String>,
    /// Bind a free variable, e.g. `--bind x=ALL`.
    #[arg(long = "bind", value_name = "VAR=EVENT")]
    pub binds: Vec<String>,
    /// List optimal events for the leading quantifiers.
    #[arg(long)]
    pub witness: bool,
    /// Refuse quantifiers above this many atoms.
    #[arg(long, default_value_t = probalg::logic::DEFAULT_ATOM_CAP)]
    pub cap: usize,
}

#[derive(Args, Debug)]
pub struct AtomsArgs {
    /// Event to report on.
    #[arg(long, default_value = "ALL")]
    pub event: String,
    /// Compare with a second structure: elementary equivalence and an isomorphism.
    #[arg(long, value_name = "FILE")]
    pub against: Option<PathBuf>,
    /// chi and theta are skipped above this many atoms.
    #[arg(long, default_value_t = 12)]
    pub cap: usize,
}

#[derive(Args, Debug)]
pub struct IndepArgs {
    #[arg(long = "S", value_name = "EVENTS")]
    pub s: String,
    #[arg(long = "T", value_name = "EVENTS")]
    pub t: String,
    #[arg(long = "W", value_name = "EVENTS", default_value = "")]
    pub w: String,
}

#[derive(Args, Debug)]
pub struct TypeArgs {
    /// The tuple whose type is described.
    #[arg(long, value_name = "TUPLE")]
    pub a: String,
    /// A second tuple: equality and distances.
    #[arg(long, value_name = "TUPLE")]
    pub b: Option<String>,
    /// Parameter subalgebra.
    #[arg(long = "C", default_value = "trivial")]
    pub c: String,
    /// Realize tp(a/C) in a fresh refinement.
    #[arg(long)]
    pub realize: bool,
}

#[derive(Args, Debug)]
pub struct ForkingArgs {
    /// Partition of 1.
    #[arg(long, value_name = "TUPLE")]
    pub a: String,
    /// Base subalgebra.
    #[arg(long = "E", default_value = "trivial")]
    pub e: String,
    /// Larger subalgebra.
    #[arg(long = "C", default_value = "full")]
    pub c: String,
    #[arg(long, default_value = "1/4")]
    pub eps: String,
    /// Check a chain of subalgebras instead (repeat, coarsest first).
    #[arg(long = "chain", value_name = "SUB")]
    pub chain: Vec<String>,
}

#[derive(Args, Debug)]
pub struct RvArgs {
    /// Partition E, for rho_n and d_P against F.
    #[arg(long = "E", value_name = "TUPLE", requires = "f_part")]
    pub e: Option<String>,
    /// Partition F.
    #[arg(long = "F", id = "f_part", value_name = "TUPLE")]
    pub f: Option<String>,
    /// Event whose conditional probability P(event|C) is approximated.
    #[arg(long, value_name = "EVENT")]
    pub dyadic: Option<String>,
    #[arg(long = "C", default_value = "full")]
    pub c: String,
    #[arg(long, default_value_t = 2)]
    pub depth: u32,
}

#[derive(Args, Debug)]
pub struct EntropyArgs {
    #[arg(long = "A", value_name = "SUB")]
    pub a: String,
    /// Conditioning subalgebra.
    #[arg(long = "C", default_value = "trivial")]
    pub c: String,
    /// A second subalgebra B: chain rule H(A v B / C).
    #[arg(long = "B", value_name = "SUB")]
    pub b: Option<String>,
    /// A finer subalgebra D: entropy drop from C to D.
    #[arg(long = "D", value_name = "SUB")]
    pub d: Option<String>,
    /// With --D: forking-gap report for this partition.
    #[arg(long, value_name = "TUPLE", requires = "d")]
    pub tuple: Option<String>,
    #[arg(long, default_value = "1/4")]
    pub eps: String,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Exact atom count; otherwise drawn from 1..=max-atoms.
    #[arg(long)]
    pub atoms: Option<usize>,
    #[arg(long, default_value_t = 6)]
    pub max_atoms: usize,
    /// Named events E1, E2, ...
    #[arg(long, default_value_t = 2)]
    pub events: usize,
    /// Weights are numerators in 1..=max-units, normalized.
    #[arg(long, default_value_t = 9)]
    pub max_units: u64,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub max_atoms: usize,
    /// Multiplies every suite's instance count.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Run only these suites (repeatable).
    #[arg(long = "suite", value_name = "ID")]
    pub suites: Vec<String>,
    /// Print per-suite timings.
    #[arg(long)]
    pub timings: bool,
    /// Deliberately break every checked bound, to test the harness.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}
