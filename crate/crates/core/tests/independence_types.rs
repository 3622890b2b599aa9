mod common;

use common::*;
use probalg::algebra::uniform_algebra;
use probalg::conditional::cond_prob;
use probalg::independence::{
    characterization_report, extend_with_independent_copy, independence_defect, independent, subalgebras_independent,
};
use probalg::oracle::{partition_search_upto, tuple_search_upto};
use probalg::types::{
    d_cb, d_cb_descriptors, d_p, epsilon_forks, forking_chain_check, forking_distance, lipschitz_check,
    nonforking_extension, optimal_realization, pi_map, realize_type, sfb_check, type_distance_partitions, type_of,
    TypeDescriptor,
};
use probalg::{Error, Event, FiniteProbabilityAlgebra, Subalgebra};
use proptest::prelude::*;

/// Atoms (a,b),(a,b'),(a',b),(a',b') of a fair product.
fn product() -> (FiniteProbabilityAlgebra, Event, Event) {
    let alg = uniform_algebra(4);
    let first = ev(&alg, &[0, 1]);
    let second = ev(&alg, &[0, 2]);
    (alg, first, second)
}

/// Weights (3/8, 1/8, 1/8, 3/8) on p, q, r, t; C splits {p,q} from {r,t};
/// a = ({p,r}, {q,t}) has mu(a_1) = 1/2 but P(a_1|C) = (3/4, 1/4).
fn forking_example() -> (FiniteProbabilityAlgebra, Vec<Event>, Subalgebra, Subalgebra) {
    let alg = algebra(&[(3, 8), (1, 8), (1, 8), (3, 8)]);
    let a = vec![ev(&alg, &[0, 2]), ev(&alg, &[1, 3])];
    let c = blocks(&alg, &[&[0, 1], &[2, 3]]);
    (alg.clone(), a, Subalgebra::trivial(&alg), c)
}

#[test]
fn independence_examples() {
    let (alg, first, second) = product();
    assert!(independent(&alg, &[first.clone()], &[second.clone()], &[]).unwrap());
    let r = characterization_report(&alg, &[first.clone()], &[second], &[]).unwrap();
    assert_eq!(r.conditions(), [true; 4]);

    let alg = xyz();
    let (s, t) = (vec![ev(&alg, &[0])], vec![ev(&alg, &[0, 1])]);
    assert!(!independent(&alg, &s, &t, &[]).unwrap());
    assert_eq!(independence_defect(&alg, &s, &t, &[]).unwrap(), rat(1, 8));
    assert_eq!(independence_defect(&alg, &t, &s, &[]).unwrap(), rat(1, 8));
    let r = characterization_report(&alg, &s, &t, &[]).unwrap();
    assert_eq!(r.conditions(), [false; 4]);
    assert!(independent(&alg, &s, &[alg.full()], &[ev(&alg, &[1])]).unwrap());
}

#[test]
fn extension_lemma_example() {
    let alg = xyz();
    let a = vec![ev(&alg, &[0, 1]), ev(&alg, &[2])];
    let t = Subalgebra::trivial(&alg);
    let full = Subalgebra::full(&alg);
    let copy = extend_with_independent_copy(&alg, &a, &t, &full).unwrap();
    let new = &copy.extension.algebra;
    let mut w = new.weights().to_vec();
    w.sort();
    let mut expected = vec![rat(3, 8), rat(1, 8), rat(3, 16), rat(1, 16), rat(3, 16), rat(1, 16)];
    expected.sort();
    assert_eq!(w, expected);
    let e1 = &copy.copies[0];
    assert_eq!(new.mu(e1).unwrap(), rat(3, 4));
    let x = copy.extension.image(&alg.atom(0)).unwrap();
    assert_eq!(new.mu(&new.meet(e1, &x).unwrap()).unwrap(), rat(3, 8));
    assert!(copy.extension.is_measure_preserving(&alg));

    // already C-measurable: E_i = A_i'
    let c = blocks(&alg, &[&[0, 1], &[2]]);
    let same = extend_with_independent_copy(&alg, &a, &c, &full).unwrap();
    assert_eq!(same.copies, same.extension.image_all(&a).unwrap());
    assert_eq!(same.extension.algebra.atom_count(), 3);

    let whole = extend_with_independent_copy(&alg, &[alg.full()], &t, &full).unwrap();
    assert_eq!(whole.copies, vec![whole.extension.algebra.full()]);

    assert_eq!(extend_with_independent_copy(&alg, &a, &full, &t).unwrap_err(), Error::NotCoarsening);
    assert!(matches!(
        extend_with_independent_copy(&alg, &[ev(&alg, &[0])], &t, &full),
        Err(Error::NotAPartition(_))
    ));
}

#[test]
fn type_examples() {
    let alg = xyz();
    let c = blocks(&alg, &[&[0], &[1, 2]]);
    let desc = type_of(&alg, &[ev(&alg, &[0, 1])], &c).unwrap();
    assert_eq!(desc.get(1).values(), &[int(1), rat(1, 2)]);
    assert_eq!(desc.get(0).values(), &[int(0), rat(1, 2)]);
    let full_desc = type_of(&alg, &[alg.full()], &c).unwrap();
    assert_eq!(full_desc.get(1).values(), &[int(1), int(1)]);
    assert_eq!(full_desc.get(0).values(), &[int(0), int(0)]);
}

#[test]
fn realization_example() {
    let alg = xyz();
    let c = blocks(&alg, &[&[0], &[1, 2]]);
    let g: std::collections::BTreeMap<u64, _> = [
        (1, probalg::StepFunction::new(c.clone(), vec![rat(1, 2), rat(1, 4)]).unwrap()),
        (0, probalg::StepFunction::new(c.clone(), vec![rat(1, 2), rat(3, 4)]).unwrap()),
    ]
    .into();
    let desc = TypeDescriptor::new(1, c.clone(), g).unwrap();
    let r = realize_type(&alg, &desc).unwrap();
    let new = &r.extension.algebra;
    let c2 = r.extension.image_subalgebra(&c).unwrap();
    let b = c2.block_events();
    assert_eq!(new.mu(&new.meet(&r.tuple[0], &b[0]).unwrap()).unwrap(), rat(1, 4));
    assert_eq!(new.mu(&new.meet(&r.tuple[0], &b[1]).unwrap()).unwrap(), rat(1, 8));
    assert!(type_of(new, &r.tuple, &c2).unwrap().same_values(&desc));

    let bad: std::collections::BTreeMap<u64, _> =
        [(1, probalg::StepFunction::new(c.clone(), vec![rat(1, 2), rat(1, 4)]).unwrap())].into();
    assert!(matches!(TypeDescriptor::new(1, c, bad), Err(Error::InvalidDescriptor(_))));
}

#[test]
fn distance_examples() {
    let alg = xyz();
    let t = Subalgebra::trivial(&alg);
    let a = vec![ev(&alg, &[0]), ev(&alg, &[1, 2])];
    let b = vec![ev(&alg, &[0, 1]), ev(&alg, &[2])];
    assert_eq!(type_distance_partitions(&alg, &a, &b, &t).unwrap(), rat(1, 4));
    assert_eq!(type_distance_partitions(&alg, &a, &a, &t).unwrap(), int(0));
    assert_eq!(type_distance_partitions(&alg, &[alg.full()], &[alg.full()], &t).unwrap(), int(0));

    let opt = optimal_realization(&alg, &a, &b, &t).unwrap();
    assert_eq!(opt.distances, vec![rat(1, 4), rat(1, 4)]);
    let new = &opt.extension.algebra;
    assert_eq!(new.dist(&opt.a_image[0], &opt.b_prime[0]).unwrap(), rat(1, 4));
    assert_eq!(partition_search_upto(&alg, &a, &b, &t, 3).unwrap(), rat(1, 4));

    let x = vec![ev(&alg, &[0, 1])];
    let y = vec![ev(&alg, &[0])];
    assert_eq!(d_p(&alg, &x, &y).unwrap(), alg.dist(&x[0], &y[0]).unwrap());
    assert_eq!(d_cb(&alg, &a, &b, &t).unwrap(), rat(1, 4));
    assert_eq!(d_p(&alg, &a, &a).unwrap(), int(0));
    assert_eq!(d_cb(&alg, &a, &a, &t).unwrap(), int(0));

    let bracket = lipschitz_check(&alg, &x, &y, &t).unwrap();
    assert_eq!(bracket.lower, rat(1, 4));
    assert_eq!(bracket.upper, rat(1, 4));
    assert!(bracket.contains(&tuple_search_upto(&alg, &x, &y, &t, 3).unwrap()));
    assert_eq!(
        type_distance_partitions(&alg, &a, &[alg.full()], &t).unwrap_err(),
        Error::LengthMismatch(2, 1)
    );
}

#[test]
fn forking_examples() {
    let (alg, a, e, c) = forking_example();
    assert_eq!(cond_prob(&alg, &a[0], &c).unwrap().values(), &[rat(3, 4), rat(1, 4)]);
    let nf = nonforking_extension(&alg, &a, &e, &c).unwrap();
    let c2 = nf.extension.image_subalgebra(&c).unwrap();
    let new = &nf.extension.algebra;
    assert_eq!(cond_prob(new, &nf.tuple[0], &c2).unwrap().values(), &[rat(1, 2), rat(1, 2)]);
    let e2 = nf.extension.image_subalgebra(&e).unwrap();
    assert!(subalgebras_independent(new, &new.generated_subalgebra(&nf.tuple).unwrap(), &c2, &e2));

    assert_eq!(forking_distance(&alg, &a, &e, &c).unwrap(), rat(1, 4));
    assert!(epsilon_forks(&alg, &a, &e, &c, &rat(1, 8)).unwrap());
    assert!(!epsilon_forks(&alg, &a, &e, &c, &rat(1, 4)).unwrap());
    for eps in [rat(1, 2), rat(1, 100)] {
        assert!(!epsilon_forks(&alg, &a, &c, &c, &eps).unwrap());
    }
    assert_eq!(nonforking_extension(&alg, &a, &c, &e).unwrap_err(), Error::NotCoarsening);

    let chain = vec![e.clone(), c.clone(), Subalgebra::full(&alg)];
    let report = forking_chain_check(&alg, &a, &chain, &rat(1, 8)).unwrap();
    assert!(report.within_bound);
    assert_eq!(report.bound, int(64));
    assert_eq!(report.distances[0], rat(1, 4));
}

#[test]
fn pi_map_of_a_single_event() {
    let alg = xyz();
    let c = blocks(&alg, &[&[0], &[1, 2]]);
    let desc = type_of(&alg, &[ev(&alg, &[0, 1])], &c).unwrap();
    let pi = pi_map(&desc).unwrap();
    assert_eq!(pi.arity(), 2);
    let cells = alg.associated_partition(&[ev(&alg, &[0, 1])]).unwrap();
    assert!(pi.same_values(&type_of(&alg, &cells, &c).unwrap()));
}

fn random_partition(alg: &FiniteProbabilityAlgebra, labels: &[usize], n: usize) -> Vec<Event> {
    labelled_partition(alg, labels, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn independence_is_symmetric_and_closed(inst in instance(8)) {
        let alg = inst.algebra();
        let s = vec![mask_event(&alg, inst.masks[0])];
        let t = vec![mask_event(&alg, inst.masks[1]), mask_event(&alg, inst.masks[2])];
        let w = vec![mask_event(&alg, inst.masks[3])];
        let ind = independent(&alg, &s, &t, &w).unwrap();
        prop_assert_eq!(ind, independent(&alg, &t, &s, &w).unwrap());
        let tw: Vec<Event> = t.iter().chain(&w).cloned().collect();
        let tw_atoms = alg.generated_subalgebra(&tw).unwrap().block_events();
        prop_assert_eq!(ind, independent(&alg, &s, &tw_atoms, &w).unwrap());
        let r = characterization_report(&alg, &s, &t, &w).unwrap();
        prop_assert!(r.consistent());
        prop_assert_eq!(r.product, ind);
    }

    #[test]
    fn extension_contract(inst in instance(8), m in 1usize..=4) {
        let alg = inst.algebra();
        let a = random_partition(&alg, &inst.labels[0], m);
        let c = subalgebra_from_labels(&alg, &inst.labels[1]);
        let d = c.join(&subalgebra_from_labels(&alg, &inst.labels[2])).unwrap();
        let copy = extend_with_independent_copy(&alg, &a, &c, &d).unwrap();
        let new = &copy.extension.algebra;
        prop_assert!(copy.extension.is_measure_preserving(&alg));
        prop_assert_eq!(new.weights().iter().sum::<probalg::Rational>(), int(1));
        let c2 = copy.extension.image_subalgebra(&c).unwrap();
        let d2 = copy.extension.image_subalgebra(&d).unwrap();
        for (ai, ei) in copy.extension.image_all(&a).unwrap().iter().zip(&copy.copies) {
            let (fe, fa) = (cond_prob(new, ei, &c2).unwrap(), cond_prob(new, ai, &c2).unwrap());
            prop_assert_eq!(fe.values(), fa.values());
        }
        let e_alg = new.generated_subalgebra(&copy.copies).unwrap();
        prop_assert!(subalgebras_independent(new, &e_alg, &d2, &c2));
    }

    #[test]
    fn descriptors_are_sound(inst in instance(8), n in 1usize..=2) {
        let alg = inst.algebra();
        let tuple: Vec<Event> = inst.masks[..n].iter().map(|&m| mask_event(&alg, m)).collect();
        let c = subalgebra_from_labels(&alg, &inst.labels[0]);
        let desc = type_of(&alg, &tuple, &c).unwrap();
        for blk in 0..c.block_count() {
            let total: probalg::Rational = desc.entries().map(|(_, f)| f.values()[blk].clone()).sum();
            prop_assert_eq!(total, int(1));
        }
        let r = realize_type(&alg, &desc).unwrap();
        let c2 = r.extension.image_subalgebra(&c).unwrap();
        prop_assert!(type_of(&r.extension.algebra, &r.tuple, &c2).unwrap().same_values(&desc));
    }

    #[test]
    fn distance_is_attained_and_never_beaten(inst in instance(5), n in 1usize..=3) {
        let alg = inst.algebra();
        let a = random_partition(&alg, &inst.labels[0], n);
        let b = random_partition(&alg, &inst.labels[1], n);
        let c = subalgebra_from_labels(&alg, &inst.labels[2]);
        let d = type_distance_partitions(&alg, &a, &b, &c).unwrap();
        let opt = optimal_realization(&alg, &a, &b, &c).unwrap();
        prop_assert_eq!(opt.distances.iter().max().unwrap(), &d);
        let c2 = opt.extension.image_subalgebra(&c).unwrap();
        let new = &opt.extension.algebra;
        prop_assert!(type_of(new, &opt.b_prime, &c2).unwrap().same_values(&type_of(&alg, &b, &c).unwrap()));
        if let Ok(found) = partition_search_upto(&alg, &a, &b, &c, 2) {
            prop_assert!(found >= d);
        }
    }

    #[test]
    fn d_cb_separates_descriptors(inst in instance(8), n in 1usize..=2) {
        let alg = inst.algebra();
        let a: Vec<Event> = inst.masks[..n].iter().map(|&m| mask_event(&alg, m)).collect();
        let b: Vec<Event> = inst.masks[2..2 + n].iter().map(|&m| mask_event(&alg, m)).collect();
        let c = subalgebra_from_labels(&alg, &inst.labels[0]);
        let (p, q) = (type_of(&alg, &a, &c).unwrap(), type_of(&alg, &b, &c).unwrap());
        let dcb = d_cb_descriptors(&alg, &p, &q).unwrap();
        prop_assert_eq!(&dcb, &d_cb(&alg, &a, &b, &c).unwrap());
        prop_assert_eq!(dcb == int(0), p.same_values(&q));
    }

    #[test]
    fn stationarity(inst in instance(6)) {
        let alg = inst.algebra();
        let a = random_partition(&alg, &inst.labels[0], 2);
        let e = subalgebra_from_labels(&alg, &inst.labels[1]);
        let c = e.join(&subalgebra_from_labels(&alg, &inst.labels[2])).unwrap();
        // b has the same type as a over E: realize tp(a/E) freshly.
        let desc = type_of(&alg, &a, &e).unwrap();
        let r = realize_type(&alg, &desc).unwrap();
        let ext = &r.extension.algebra;
        let e2 = r.extension.image_subalgebra(&e).unwrap();
        let c2 = r.extension.image_subalgebra(&c).unwrap();
        let nf_a = nonforking_extension(&alg, &a, &e, &c).unwrap();
        let nf_b = nonforking_extension(ext, &r.tuple, &e2, &c2).unwrap();
        let ca = nf_a.extension.image_subalgebra(&c).unwrap();
        let cb = nf_b.extension.image_subalgebra(&c2).unwrap();
        let pa = type_of(&nf_a.extension.algebra, &nf_a.tuple, &ca).unwrap();
        let pb = type_of(&nf_b.extension.algebra, &nf_b.tuple, &cb).unwrap();
        // compare step-function values atom by atom of the original algebra
        for x in 0..alg.atom_count() {
            let xa = nf_a.extension.image(&alg.atom(x)).unwrap().atoms().next().unwrap();
            let mid = r.extension.image(&alg.atom(x)).unwrap().atoms().next().unwrap();
            let xb = nf_b.extension.image(&ext.atom(mid)).unwrap().atoms().next().unwrap();
            for (s, f) in pa.entries() {
                let g = pb.get(s);
                prop_assert_eq!(f.at_atom(xa), g.at_atom(xb));
            }
        }
    }

    #[test]
    fn sfb_and_lipschitz(inst in instance(5), n in 1usize..=2) {
        let alg = inst.algebra();
        let a: Vec<Event> = inst.masks[..n].iter().map(|&m| mask_event(&alg, m)).collect();
        let b: Vec<Event> = inst.masks[2..2 + n].iter().map(|&m| mask_event(&alg, m)).collect();
        let c = subalgebra_from_labels(&alg, &inst.labels[0]);
        for eps in [rat(1, 2), rat(1, 4), rat(1, 8)] {
            prop_assert!(sfb_check(&alg, &a, &b, &c, &eps).unwrap().holds);
        }
        let bracket = lipschitz_check(&alg, &a, &b, &c).unwrap();
        if let Ok(v) = tuple_search_upto(&alg, &a, &b, &c, 2) {
            prop_assert!(bracket.contains(&v), "{:?} not in {:?}", v, bracket);
        }
    }
}
