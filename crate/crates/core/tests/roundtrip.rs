//! Printing and reading agree: terms, types and derivation documents.

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use vsc_core::counterexamples::{kmr, pr, read_any_derivation, System};
use vsc_core::enumerate::enumerate_terms;
use vsc_core::props::random_term;
use vsc_core::quantitative::derive_open;
use vsc_core::syntax::{print_type, read_derivation, write_derivation};
use vsc_core::types::enumerate_multi_types;
use vsc_core::{check, parse_term, parse_type, print_term, Term};

fn term(seed: u64, nodes: usize) -> Term {
    random_term(&mut StdRng::seed_from_u64(seed), nodes, &["x", "y", "z"])
}

proptest! {
    #[test]
    fn terms_print_then_parse(seed in any::<u64>(), nodes in 1usize..24) {
        let t = term(seed, nodes);
        let s = print_term(&t);
        prop_assert_eq!(parse_term(&s).unwrap(), t.clone());
        // Printing is canonical up to alpha-equivalence.
        prop_assert_eq!(print_term(&parse_term(&s).unwrap()), s);
    }

    #[test]
    fn typed_documents_read_back(seed in any::<u64>(), nodes in 1usize..12) {
        let t = term(seed, nodes);
        if let Ok(r) = derive_open(&t, 200) {
            let doc = write_derivation(&r.derivation);
            let back = read_derivation(&doc).unwrap();
            prop_assert!(check(&back).is_ok());
            prop_assert_eq!(back, r.derivation);
        }
    }
}

#[test]
fn every_small_type_round_trips() {
    let types = enumerate_multi_types(6);
    assert!(types.len() > 10);
    for m in types {
        assert_eq!(parse_type(&print_type(&m)).unwrap(), m);
    }
}

#[test]
fn enumeration_counts_and_round_trips() {
    // Independent count of terms per size over a two-name pool.
    let expected = [2, 3, 14, 55, 268, 1370, 7418];
    let mut counts = [0usize; 7];
    for t in enumerate_terms(7, &["x", "y"]) {
        counts[t.node_count() - 1] += 1;
        assert!(t.is_locally_closed());
        assert_eq!(parse_term(&print_term(&t)).unwrap(), t);
    }
    assert_eq!(counts, expected);

    assert_eq!(
        enumerate_terms(1, &["x"]).collect::<Vec<_>>(),
        vec![parse_term("x").unwrap()]
    );
    let closed: Vec<Term> = enumerate_terms(2, &[]).collect();
    assert_eq!(closed, vec![parse_term("\\a. a").unwrap()]);
    let three: Vec<Term> = enumerate_terms(3, &["x"]).collect();
    assert!(three.contains(&parse_term("x x").unwrap()));
}

#[test]
fn neighbouring_systems_syntax() {
    for s in [
        "alpha",
        "nu",
        "{alpha} => alpha",
        "{alpha, {alpha} => nu} => {alpha} => alpha",
    ] {
        let a = pr::parse_pr_type(s).unwrap();
        assert_eq!(a.to_string(), s);
    }
    for s in ["c", "[]", "[a1, a2] => c", "[[b1] => []] => c"] {
        let a = kmr::parse_kmr_type(s).unwrap();
        assert_eq!(kmr::parse_kmr_type(&a.to_string()).unwrap(), a);
    }
    let doc = vsc_core::counterexamples::KMR_T_FIXTURE;
    let d = read_any_derivation(doc, Some(System::Kmr)).unwrap();
    assert!(d.check().is_ok());
    assert!(read_any_derivation(doc, Some(System::Pr)).is_err());
}
