mod common;

use common::diagrams::{gamma, kronecker, random_diagram, random_entries, random_monomial, random_quiver};
use klrw_core::cover::{transport, transport_back};
use klrw_core::enumerate::{all_valid_sequences, enumerate_sequences};
use klrw_core::klrw::action::{act, graded_degree, is_graded_homogeneous, PolyVector};
use klrw_core::klrw::diagram::{grading_shift, straight_line};
use klrw_core::klrw::idempotent::vanishing_certificate;
use klrw_core::quiver::parse_quiver_spec;
use klrw_core::scalar::ExactScalar;
use klrw_core::seq::{equivalent, from_weight, is_valid};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn action_is_degree_homogeneous(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fq = random_quiver(&mut rng);
        let d = random_diagram(&mut rng, &fq, 4);
        let f = random_monomial(&mut rng, d.bottom.n(), 3);
        let g = act(&d, &fq, &PolyVector::new(d.bottom.clone(), f.clone())).unwrap();
        prop_assert_eq!(&g.tag, &d.top);
        if !g.poly.is_zero() {
            prop_assert!(is_graded_homogeneous(&g.poly));
            let shift = d.degree(&fq).unwrap() + grading_shift(&d.bottom, &fq).unwrap() - grading_shift(&d.top, &fq).unwrap();
            prop_assert_eq!(graded_degree(&g.poly).unwrap(), graded_degree(&f).unwrap() + shift);
        }
    }

    #[test]
    fn composition_is_associative_and_acts_stepwise(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fq = random_quiver(&mut rng);
        let d1 = random_diagram(&mut rng, &fq, 4);
        // back down to the bottom of d1, then d1 again
        let d2 = straight_line(&d1.top, &d1.bottom, &fq).unwrap();
        let d3 = d1.clone();
        let left = d3.compose(&d2).unwrap().compose(&d1).unwrap();
        let right = d3.compose(&d2.compose(&d1).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        let f = random_monomial(&mut rng, d1.bottom.n(), 2);
        let v = PolyVector::new(d1.bottom.clone(), f);
        let stepwise = act(&d3, &fq, &act(&d2, &fq, &act(&d1, &fq, &v).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(act(&left, &fq, &v).unwrap(), stepwise);
    }

    #[test]
    fn reflection_is_an_involution(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fq = random_quiver(&mut rng);
        let d = random_diagram(&mut rng, &fq, 4);
        let r = d.reflect();
        prop_assert_eq!(&r.bottom, &d.top);
        prop_assert_eq!(&r.top, &d.bottom);
        prop_assert_eq!(r.reflect(), d);
    }

    #[test]
    fn enumeration_partitions_valid_orders(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fq = random_quiver(&mut rng);
        let entries = random_entries(&mut rng, &fq, 3);
        let all = all_valid_sequences(&entries, &fq).unwrap();
        prop_assert!(!all.is_empty());
        for s in &all {
            prop_assert!(is_valid(s, &fq).unwrap());
        }
        let classes = enumerate_sequences(&entries, &fq).unwrap();
        prop_assert_eq!(classes.iter().map(|c| c.members.len()).sum::<usize>(), all.len());
        for (i, c) in classes.iter().enumerate() {
            for m in &c.members {
                prop_assert!(equivalent(&c.representative, m, &fq).unwrap().is_some());
            }
            for other in &classes[i + 1..] {
                prop_assert!(equivalent(&c.representative, &other.representative, &fq).unwrap().is_none());
            }
        }
        // the default order of the weight is among them
        let s = from_weight(&gamma(&entries), &fq).unwrap();
        prop_assert!(classes.iter().any(|c| equivalent(&c.representative, &s, &fq).unwrap().is_some()));
    }
}

const KRONECKER_COVER: &str = r#"{"vertices":["α","β"],
    "edges":[{"id":"e","tail":"β","head":"α"},{"id":"f","tail":"α","head":"β"},
             {"id":"r","tail":"α","head":"∞"},{"id":"s","tail":"β","head":"∞"}],
    "flavour":{"e":"1/3","f":"0","r":"0","s":"1/2"}}"#;

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn cover_transport_round_trips(xs in proptest::collection::vec((any::<bool>(), -6i64..6), 1..5)) {
        let fq = parse_quiver_spec(KRONECKER_COVER).unwrap();
        let entries: Vec<(String, ExactScalar)> = xs
            .iter()
            .map(|(a, n)| ((if *a { "α" } else { "β" }).to_string(), ExactScalar::frac(*n, 6)))
            .collect();
        let s = from_weight(&gamma(&entries), &fq).unwrap();
        let (cq, lifted) = transport(&s, &fq).unwrap();
        prop_assert!(cq.phi.is_integral());
        prop_assert!(is_valid(&lifted, &cq).unwrap());
        prop_assert!(lifted.longitudes.iter().all(ExactScalar::is_integer));
        prop_assert_eq!(transport_back(&lifted, &cq, &fq).unwrap(), s);
    }

    #[test]
    fn unframed_weights_carry_vanishing_certificates(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fq = kronecker(&mut rng, false);
        let entries = random_entries(&mut rng, &fq, 3);
        let c = vanishing_certificate(&gamma(&entries), "α", &fq, 2).unwrap();
        prop_assert!(c.check);
        prop_assert!(c.unsteady.is_some());
    }
}

#[test]
fn random_diagrams_are_not_trivial() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut crossings, mut nonzero) = (0, 0);
    for _ in 0..100 {
        let fq = random_quiver(&mut rng);
        let d = random_diagram(&mut rng, &fq, 4);
        crossings += d.crossings();
        let f = random_monomial(&mut rng, d.bottom.n(), 2);
        if !act(&d, &fq, &PolyVector::new(d.bottom.clone(), f)).unwrap().poly.is_zero() {
            nonzero += 1;
        }
    }
    println!("crossings {crossings}, nonzero {nonzero}");
    assert!(crossings > 100);
    assert!(nonzero > 10 && nonzero < 100);
}
