//! Documented behaviour of the term, syntax, reduction and classification
//! operations, exercised through the public API.

use std::collections::BTreeSet;

use vsc_core::classify::{decompose_answer, is_fireball};
use vsc_core::reduction::{
    check_simulation, evaluate_plotkin, find_redexes, plotkin_step, root_expo, root_mult, step,
    EvalStatus, StepKind,
};
use vsc_core::term::alpha_eq;
use vsc_core::{classify, evaluate, parse_term, print_term, ContextClass, Term};

fn t(s: &str) -> Term {
    parse_term(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn names(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

const I: &str = "(\\z. z)";
const OMEGA: &str = "((\\w. w w) (\\w. w w))";

#[test]
fn free_variables() {
    assert_eq!(t("x").free_vars(), names(&["x"]));
    assert!(t("\\x. x").free_vars().is_empty());
    assert_eq!(t("(x y)[x <- z]").free_vars(), names(&["y", "z"]));
}

#[test]
fn substitution_avoids_capture() {
    assert_eq!(t("x").meta_subst("x", &t("\\y. y")), t("\\y. y"));
    assert_eq!(t("\\x. x").meta_subst("x", &t("z")), t("\\x. x"));
    let r = t("\\y. x y").meta_subst("x", &t("y"));
    assert_eq!(r.free_vars(), names(&["y"]));
    assert!(alpha_eq(&r, &t("\\w. y w")));
    assert_eq!(print_term(&r), "\\y'. y y'");
}

#[test]
fn alpha_equivalence() {
    assert!(alpha_eq(&t("\\x. x"), &t("\\y. y")));
    assert!(alpha_eq(&t("\\x. x y"), &t("\\z. z y")));
    assert!(!alpha_eq(&t("\\x. x"), &t("\\x. y")));
}

#[test]
fn sizes() {
    assert_eq!(t("\\x. x x").open_size(), 0);
    assert_eq!(t("(\\x. x x) (\\x. x x)").open_size(), 1);
    assert_eq!(t("(x y)[y <- z w]").open_size(), 2);
    assert_eq!(t("\\x. x x").solvable_size(), 2);
    assert_eq!(t("x").solvable_size(), 0);
    assert_eq!(t("y (\\x. x x)").solvable_size(), 1);
}

#[test]
fn parsing_and_printing() {
    assert_eq!(
        t("\\x. x x"),
        Term::lam("x", Term::app(Term::var("x"), Term::var("x")))
    );
    let id = Term::lam("z", Term::var("z"));
    assert_eq!(
        t("x[x <- \\z. z] y"),
        Term::app(Term::esub(Term::var("x"), "x", id.clone()), Term::var("y"))
    );
    assert_eq!(t("(\\x. x) (\\x. x)"), Term::app(id.clone(), id.clone()));
    assert_eq!(print_term(&Term::lam("x", Term::var("x"))), "\\x. x");
    assert_eq!(
        print_term(&Term::apps(
            Term::var("x"),
            [Term::var("y"), Term::var("z")]
        )),
        "x y z"
    );
    assert_eq!(
        print_term(&Term::esub(Term::var("x"), "x", id)),
        "x[x <- \\z. z]"
    );
    for bad in ["", "\\x.", "(x", "x[y <- ]", "x )"] {
        assert!(parse_term(bad).is_err(), "{bad:?} should not parse");
    }
}

#[test]
fn root_rules() {
    assert_eq!(root_mult(&t("(\\x. x) y")), Some(t("x[x <- y]")));
    assert_eq!(
        root_mult(&t("(\\x. x)[z <- w] y")),
        Some(t("x[x <- y][z <- w]"))
    );
    assert_eq!(root_mult(&t("x y")), None);
    assert_eq!(root_expo(&t("x[x <- \\y. y]")), Some(t("\\y. y")));
    assert_eq!(
        root_expo(&t("(x x)[x <- (\\y. y)[z <- w]]")),
        Some(t("((\\y. y) (\\y. y))[z <- w]"))
    );
    assert_eq!(root_expo(&t("x[x <- y z]")), None);
}

#[test]
fn redexes_by_class() {
    let body_redex = t(&format!("\\x. {I} {I}"));
    assert!(find_redexes(&body_redex, ContextClass::Open, None).is_empty());
    let solving = find_redexes(&body_redex, ContextClass::Solving, None);
    assert_eq!(solving.len(), 1);
    assert_eq!(solving[0].0.kind, StepKind::Mult);
    assert_eq!(solving[0].0.path_string(), "b");
    assert_eq!(solving[0].1, t(&format!("\\x. z[z <- {I}]")));
    let guarded = t(&format!("y (\\x. {I} {I})"));
    assert!(find_redexes(&guarded, ContextClass::Solving, None).is_empty());
    assert_eq!(find_redexes(&guarded, ContextClass::Full, None).len(), 1);
}

#[test]
fn single_steps() {
    let (u, pos) = step(&t(&format!("{I} {I}")), ContextClass::Open).unwrap();
    assert_eq!(u, t(&format!("z[z <- {I}]")));
    assert_eq!(
        (pos.kind, pos.path_string()),
        (StepKind::Mult, "root".to_string())
    );
    let (u, pos) = step(&t(&format!("x[x <- {I}]")), ContextClass::Open).unwrap();
    assert_eq!(u, t(I));
    assert_eq!(pos.kind, StepKind::Expo);
    assert!(step(&t("x"), ContextClass::Full).is_none());
}

#[test]
fn evaluation() {
    let tr = evaluate(&t(&format!("{I} {I}")), ContextClass::Open, 10);
    assert_eq!((tr.len(), tr.m_count, tr.e_count), (2, 1, 1));
    assert_eq!(tr.status, EvalStatus::Normal);
    assert_eq!(*tr.final_term(), t(I));

    let tr = evaluate(&t(&format!("\\x. {I} {I}")), ContextClass::Open, 10);
    assert!(tr.is_empty() && tr.is_normal());

    let tr = evaluate(&t(OMEGA), ContextClass::Open, 50);
    assert_eq!(tr.status, EvalStatus::FuelExhausted);
    assert_eq!(tr.len(), 50);
}

#[test]
fn plotkin_steps() {
    let pair = t("(\\x. x) (\\y. y)");
    assert_eq!(plotkin_step(&pair), Some(t("\\y. y")));
    assert!(check_simulation(&pair));

    let nested = t("(\\x. y) ((\\z. z) (\\w. w))");
    assert_eq!(plotkin_step(&nested), Some(t("(\\x. y) (\\w. w)")));
    assert!(check_simulation(&nested));
    let (steps, status) = evaluate_plotkin(&nested, 10);
    assert_eq!(steps.last(), Some(&t("y")));
    assert_eq!(status, EvalStatus::Normal);

    assert_eq!(plotkin_step(&t("x y")), None);
}

#[test]
fn classification() {
    let c = classify(&t(&format!("x (\\y. {OMEGA})")));
    assert!(c.is_proper_inert && c.is_fireball && c.is_solvable_fireball);
    let c = classify(&t(&format!("\\x. {OMEGA}")));
    assert!(c.is_fireball && !c.is_solvable_fireball);
    assert!(!is_fireball(&t(&format!("x {OMEGA}"))));
}

#[test]
fn answers() {
    let a = t("(\\x. x)[y <- z]");
    let (l, v) = decompose_answer(&a).unwrap();
    assert_eq!(l.len(), 1);
    assert_eq!(*v, t("\\x. x"));
    let b = t("x[y <- z]");
    let (l, v) = decompose_answer(&b).unwrap();
    assert_eq!((l.len(), v), (1, &t("x")));
    assert!(decompose_answer(&t("x y")).is_none());
}

#[test]
fn full_reduction_is_not_diamond() {
    // Both ends normalize under Full, but through traces of different lengths.
    let src = t(&format!("(x x)[x <- \\y. {I} {I}]"));
    let mut lengths = BTreeSet::new();
    let mut frontier = vec![(src, 0usize)];
    while let Some((u, n)) = frontier.pop() {
        let next = find_redexes(&u, ContextClass::Full, None);
        if next.is_empty() {
            lengths.insert(n);
        }
        frontier.extend(next.into_iter().map(|(_, v)| (v, n + 1)));
    }
    assert!(lengths.len() > 1, "{lengths:?}");
}
