mod common;

use std::collections::BTreeMap;

use common::*;
use probalg::algebra::uniform_algebra;
use probalg::atoms::{
    at_n, chi, elementarily_equivalent, find_isomorphism, phi_invariant, phi_n_bruteforce, phi_n_closed, theta,
};
use probalg::logic::{builders, evaluate, normal_form, parse, to_restricted_connectives, Evaluator, Formula, Term, Valuation};
use probalg::{Error, FiniteProbabilityAlgebra};
use proptest::prelude::*;

fn bind(pairs: &[(&str, probalg::Event)]) -> Valuation {
    pairs.iter().map(|(k, e)| (k.to_string(), e.clone())).collect()
}

fn vars(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

#[test]
fn parser_examples() {
    let f = parse("mu(x /\\ y)").unwrap();
    assert_eq!(f, Formula::mu(Term::var("x").meet(Term::var("y"))));

    let chi_text = parse("inf y . |mu(x /\\ y) - mu(x /\\ ~y)|").unwrap();
    let built = Formula::inf(
        "y",
        Formula::mu(Term::var("x").meet(Term::var("y"))).abs_diff(Formula::mu(Term::var("x").meet(Term::var("y").not()))),
    );
    assert_eq!(chi_text, built);

    match parse("mu(") {
        Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 3),
        other => panic!("expected a syntax error, got {other:?}"),
    }
}

#[test]
fn printing_round_trips() {
    for text in [
        "mu(x /\\ y)",
        "sup x . inf y . min(mu(x), d(x, ~y), 1/3) -. mu(x \\/ y)/2",
        "|mu(1) - mu(0)| +. max(mu(x), 2/7)",
        "inf w . phi2(x /\\ w) +. phi1(x /\\ ~w)",
    ] {
        let f = parse(text).unwrap();
        assert_eq!(parse(&f.to_string()).unwrap(), f, "{text}");
    }
}

#[test]
fn evaluation_examples() {
    let u2 = uniform_algebra(2);
    let chi = builders::chi(&Term::var("x"));
    let r = Evaluator::new(&u2).eval(&chi, &bind(&[("x", u2.full())])).unwrap();
    assert_eq!(r.value, int(0));
    let (name, w) = &r.witnesses[0];
    assert_eq!(name, "y");
    assert_eq!(w.members().len(), 1);

    let one = uniform_algebra(1);
    assert_eq!(evaluate(&one, &chi, &bind(&[("x", one.full())])).unwrap(), int(1));
    assert_eq!(evaluate(&one, &parse("mu(1)").unwrap(), &Valuation::new()).unwrap(), int(1));

    assert_eq!(
        evaluate(&u2, &parse("mu(z)").unwrap(), &Valuation::new()),
        Err(Error::UnboundVariable("z".into()))
    );
    let big = uniform_algebra(18);
    assert!(matches!(
        evaluate(&big, &chi, &bind(&[("x", big.full())])),
        Err(Error::AtomCapExceeded { .. })
    ));
}

#[test]
fn named_events_resolve_after_the_valuation() {
    let alg = xyz();
    let named: BTreeMap<String, probalg::Event> = [("A".to_string(), ev(&alg, &[0, 1]))].into();
    let f = parse("mu(A /\\ x)").unwrap();
    let v = bind(&[("x", ev(&alg, &[1, 2]))]);
    assert_eq!(Evaluator::new(&alg).with_named(&named).eval(&f, &v).unwrap().value, rat(1, 4));
}

#[test]
fn normal_form_examples() {
    let alg = xyz();
    let n2 = vars(&["x1", "x2"]);
    let join = normal_form(&parse("mu(x1 \\/ x2)").unwrap(), &n2).unwrap();
    let text = join.to_string();
    assert_eq!(text.matches("mu(").count(), 3, "{text}");
    let single = normal_form(&parse("mu(x1)").unwrap(), &vars(&["x1"])).unwrap();
    assert_eq!(single, parse("mu(x1)").unwrap());
    let d = normal_form(&parse("d(x1, x2)").unwrap(), &n2).unwrap();
    assert_eq!(d.to_string().matches("mu(").count(), 2, "{d}");

    for (m1, m2) in [(0b001, 0b011), (0b110, 0b010), (0b101, 0b111)] {
        let v = bind(&[("x1", mask_event(&alg, m1)), ("x2", mask_event(&alg, m2))]);
        assert_eq!(evaluate(&alg, &join, &v).unwrap(), evaluate(&alg, &parse("mu(x1 \\/ x2)").unwrap(), &v).unwrap());
        assert_eq!(evaluate(&alg, &d, &v).unwrap(), alg.dist(&v["x1"], &v["x2"]).unwrap());
    }
    assert!(matches!(
        normal_form(&parse("sup y . mu(y)").unwrap(), &n2),
        Err(Error::UnsupportedConnective(_))
    ));
}

#[test]
fn atom_predicate_examples() {
    let alg = xyz();
    let full = alg.full();
    assert_eq!(at_n(&alg, &full, 1).unwrap(), rat(1, 2));
    assert_eq!(at_n(&alg, &full, 4).unwrap(), int(0));
    assert_eq!(at_n(&alg, &alg.empty(), 2).unwrap(), int(0));

    assert_eq!(phi_n_closed(&alg, &full, 1).unwrap(), rat(1, 2));
    assert_eq!(phi_n_closed(&alg, &full, 3).unwrap(), int(0));
    assert_eq!(phi_n_closed(&alg, &ev(&alg, &[1]), 1).unwrap(), int(0));
    for n in 1..=3 {
        assert_eq!(phi_n_bruteforce(&alg, &full, n).unwrap(), phi_n_closed(&alg, &full, n).unwrap());
    }
    let one = uniform_algebra(1);
    assert_eq!(phi_n_bruteforce(&one, &one.full(), 1).unwrap(), int(0));
    assert_eq!(phi_n_bruteforce(&alg, &alg.empty(), 2).unwrap(), int(0));

    let u2 = uniform_algebra(2);
    assert_eq!(chi(&u2, &u2.full()).unwrap(), int(0));
    let u3 = uniform_algebra(3);
    assert_eq!(chi(&u3, &u3.full()).unwrap(), rat(1, 3));
    for m in 1..8u64 {
        assert!(theta(&alg, &mask_event(&alg, m)).unwrap() > int(0));
    }
}

#[test]
fn classification_examples() {
    let a = xyz();
    let b = algebra(&[(1, 4), (1, 2), (1, 4)]);
    assert_eq!(phi_invariant(&a).entry(0), rat(1, 2));
    assert!(elementarily_equivalent(&a, &b));
    let iso = find_isomorphism(&a, &b).unwrap();
    for (x, &y) in iso.iter().enumerate() {
        assert_eq!(a.weight(x), b.weight(y));
    }
    assert!(!elementarily_equivalent(&uniform_algebra(4), &a));
    assert!(find_isomorphism(&uniform_algebra(4), &a).is_none());
    assert_eq!(find_isomorphism(&a, &a).unwrap(), vec![0, 1, 2]);
}

fn term_strategy() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::Zero),
        Just(Term::One),
        prop::sample::select(vec!["x", "y", "z"]).prop_map(Term::var),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.meet(b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.join(b)),
        ]
    })
}

fn qf_strategy() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        term_strategy().prop_map(Formula::mu),
        (term_strategy(), term_strategy()).prop_map(|(a, b)| Formula::D(a, b)),
        (0i64..=5, 1i64..=5).prop_map(|(n, d)| Formula::constant(rat(n.min(d), d))),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::half),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.monus(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.plus(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.abs_diff(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Min(vec![a, b])),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::Max(vec![a, b])),
        ]
    })
}

fn valuation(alg: &FiniteProbabilityAlgebra, masks: &[u64]) -> Valuation {
    bind(&[("x", mask_event(alg, masks[0])), ("y", mask_event(alg, masks[1])), ("z", mask_event(alg, masks[2]))])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn normal_form_is_sound(inst in instance(8), phi in qf_strategy()) {
        let alg = inst.algebra();
        let v = valuation(&alg, &inst.masks);
        let value = evaluate(&alg, &phi, &v).unwrap();
        let nf = normal_form(&phi, &vars(&["x", "y", "z"])).unwrap();
        prop_assert_eq!(&evaluate(&alg, &nf, &v).unwrap(), &value);
        prop_assert_eq!(&evaluate(&alg, &to_restricted_connectives(&nf), &v).unwrap(), &value);
        prop_assert_eq!(parse(&phi.to_string()).unwrap(), phi);
    }

    #[test]
    fn quantifiers_bound_instances(inst in instance(6), body in qf_strategy()) {
        let alg = inst.algebra();
        let v = valuation(&alg, &inst.masks);
        let inside = evaluate(&alg, &body, &v).unwrap();
        let mut without_x = v.clone();
        without_x.remove("x");
        let lo = evaluate(&alg, &Formula::inf("x", body.clone()), &without_x).unwrap();
        let hi = evaluate(&alg, &Formula::sup("x", body), &without_x).unwrap();
        prop_assert!(lo <= inside && inside <= hi);
    }

    #[test]
    fn builders_match_closed_forms(inst in instance(5)) {
        let alg = inst.algebra();
        let a = mask_event(&alg, inst.masks[0]);
        let x = Term::var("x");
        let v = bind(&[("x", a.clone())]);
        let eval = |f: &Formula| evaluate(&alg, f, &v).unwrap();
        prop_assert_eq!(eval(&builders::chi(&x)), chi(&alg, &a).unwrap());
        prop_assert_eq!(eval(&builders::theta(&x)), theta(&alg, &a).unwrap());
        for n in 1..=3 {
            prop_assert_eq!(eval(&builders::phi_n(n, &x)), phi_n_closed(&alg, &a, n).unwrap());
            prop_assert_eq!(eval(&builders::at_n(n, &x)), at_n(&alg, &a, n).unwrap());
        }
    }

    #[test]
    fn phi_chain_and_at_n(inst in instance(10)) {
        let alg = inst.algebra();
        let a = mask_event(&alg, inst.masks[0]);
        let size = a.members().len();
        let mut prev = alg.mu(&a).unwrap();
        for n in 1..=size + 1 {
            let phi = phi_n_closed(&alg, &a, n).unwrap();
            prop_assert!(phi <= prev);
            prop_assert_eq!(at_n(&alg, &a, n).unwrap(), probalg::rational::monus(&prev, &phi));
            if n >= size {
                prop_assert_eq!(&phi, &int(0));
            }
            prev = phi;
        }
    }

    #[test]
    fn chi_is_bounded_by_the_largest_atom(inst in instance(8)) {
        let alg = inst.algebra();
        let a = mask_event(&alg, inst.masks[0]);
        let c = chi(&alg, &a).unwrap();
        prop_assert!(c <= at_n(&alg, &a, 1).unwrap());
        prop_assert_eq!(c == alg.mu(&a).unwrap(), a.members().len() <= 1);
    }

    #[test]
    fn equivalence_matches_isomorphism(u in prop::collection::vec(1u64..=4, 1..=6), perm_seed in any::<u64>(), tweak in any::<bool>()) {
        let a = from_units(&u);
        let mut v = u.clone();
        let k = v.len();
        v.rotate_left((perm_seed as usize) % k);
        if tweak {
            v[0] += 1;
        }
        let b = from_units(&v);
        let eq = elementarily_equivalent(&a, &b);
        prop_assert_eq!(eq, find_isomorphism(&a, &b).is_some());
        prop_assert_eq!(eq, elementarily_equivalent(&b, &a));
        prop_assert!(elementarily_equivalent(&a, &a));
    }
}
