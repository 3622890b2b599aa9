//! The formulas `chi`, `psi`, `phi_n`, `theta` and `at_n` written out with
//! explicit quantifiers.
//!
//! Each builder takes the argument term and picks bound variable names that
//! do not occur in it, so the result can be substituted anywhere.

use std::collections::BTreeSet;

use super::ast::{Formula, Term};

fn fresh(arg: &Term, base: &str) -> String {
    let mut used = BTreeSet::new();
    arg.vars(&mut used);
    std::iter::once(base.to_string())
        .chain((1..).map(|i| format!("{base}{i}")))
        .find(|v| !used.contains(v))
        .expect("unbounded supply of names")
}

/// `inf y . |mu(x /\ y) - mu(x /\ ~y)|`
pub fn chi(x: &Term) -> Formula {
    let y = fresh(x, "y");
    let yv = Term::var(&y);
    Formula::inf(
        &y,
        Formula::mu(x.clone().meet(yv.clone())).abs_diff(Formula::mu(x.clone().meet(yv.not()))),
    )
}

/// `mu(x) -. chi(x)`
pub fn psi(x: &Term) -> Formula {
    Formula::mu(x.clone()).monus(chi(x))
}

/// `phi_1(x) = inf z . (d(x, z) +. psi(z))` and
/// `phi_n(x) = inf w . (phi_{n-1}(x /\ w) +. phi_1(x /\ ~w))`; `phi_0 = mu`.
pub fn phi_n(n: usize, x: &Term) -> Formula {
    match n {
        0 => Formula::mu(x.clone()),
        1 => {
            let z = fresh(x, "z");
            let zv = Term::var(&z);
            Formula::inf(&z, Formula::D(x.clone(), zv.clone()).plus(psi(&zv)))
        }
        _ => {
            let w = fresh(x, "w");
            let wv = Term::var(&w);
            Formula::inf(
                &w,
                phi_n(n - 1, &x.clone().meet(wv.clone())).plus(phi_n(1, &x.clone().meet(wv.not()))),
            )
        }
    }
}

/// `sup y . inf z . |mu(x /\ y /\ z) - mu(x /\ y /\ ~z)|`
pub fn theta(x: &Term) -> Formula {
    let y = fresh(x, "y");
    let xy = x.clone().meet(Term::var(&y));
    let z = fresh(&xy, "z");
    let zv = Term::var(&z);
    Formula::sup(
        &y,
        Formula::inf(
            &z,
            Formula::mu(xy.clone().meet(zv.clone())).abs_diff(Formula::mu(xy.meet(zv.not()))),
        ),
    )
}

/// `at_n = phi_{n-1} -. phi_n`, `n >= 1`.
pub fn at_n(n: usize, x: &Term) -> Formula {
    assert!(n >= 1, "at_n is defined for n >= 1");
    phi_n(n - 1, x).monus(phi_n(n, x))
}
