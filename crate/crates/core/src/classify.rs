//! Normal-form grammars.
//!
//! ```text
//! proper inert   ip ::= x f | ip f | ip[x<-ip]
//! inert          i  ::= x | i f | i[x<-ip]
//! fireball       f  ::= v | ip | f[x<-ip]
//! solvable fb    fs ::= i | λx.fs | fs[x<-ip]
//! ```
//!
//! Bound indices count as variables so the predicates work on open subterms.

use serde::Serialize;

use crate::reduction::{has_redex, ContextClass};
use crate::term::{SubstContext, Term};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NormalFormClass {
    pub is_value: bool,
    pub is_answer: bool,
    pub is_proper_inert: bool,
    pub is_inert: bool,
    pub is_fireball: bool,
    pub is_solvable_fireball: bool,
    pub is_full_fireball: bool,
}

impl NormalFormClass {
    pub fn flags(&self) -> [(&'static str, bool); 7] {
        [
            ("value", self.is_value),
            ("answer", self.is_answer),
            ("proper_inert", self.is_proper_inert),
            ("inert", self.is_inert),
            ("fireball", self.is_fireball),
            ("solvable_fireball", self.is_solvable_fireball),
            ("full_fireball", self.is_full_fireball),
        ]
    }
}

pub fn classify(t: &Term) -> NormalFormClass {
    NormalFormClass {
        is_value: t.is_value(),
        is_answer: is_answer(t),
        is_proper_inert: is_proper_inert(t),
        is_inert: is_inert(t),
        is_fireball: is_fireball(t),
        is_solvable_fireball: is_solvable_fireball(t),
        is_full_fireball: is_full_fireball(t),
    }
}

pub fn is_proper_inert(t: &Term) -> bool {
    match t {
        // Any inert head, including a variable under ES such as `x[y<-z z]`.
        Term::App(f, a) => is_inert(f) && is_fireball(a),
        Term::ESub(b, _, a) => is_proper_inert(b) && is_proper_inert(a),
        _ => false,
    }
}

/// Inert terms via the recursive grammar.
pub fn is_inert(t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Bound(_) => true,
        Term::App(f, a) => is_inert(f) && is_fireball(a),
        Term::ESub(b, _, a) => is_inert(b) && is_proper_inert(a),
        Term::Abs(..) => false,
    }
}

/// Inert terms as "a variable or a proper inert term".
pub fn is_inert_by_cases(t: &Term) -> bool {
    t.is_variable() || is_proper_inert(t)
}

pub fn is_fireball(t: &Term) -> bool {
    match t {
        Term::ESub(b, _, a) => is_proper_inert(a) && is_fireball(b),
        _ => t.is_value() || is_proper_inert(t),
    }
}

pub fn is_solvable_fireball(t: &Term) -> bool {
    match t {
        Term::Abs(_, b) => is_solvable_fireball(b),
        Term::ESub(b, _, a) => is_inert(t) || (is_proper_inert(a) && is_solvable_fireball(b)),
        _ => is_inert(t),
    }
}

/// No redex anywhere.
pub fn is_full_fireball(t: &Term) -> bool {
    !has_redex(t, ContextClass::Full)
}

pub fn is_answer(t: &Term) -> bool {
    decompose_answer(t).is_some()
}

/// `L<v>` split into `L` and `v`.
pub fn decompose_answer(t: &Term) -> Option<(SubstContext, &Term)> {
    let (l, v) = t.split_spine();
    v.is_value().then_some((l, v))
}

/// Full inert terms: `x | i F | i[x<-i']` with `i'` not an answer.
pub fn is_full_inert(t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Bound(_) => true,
        Term::App(f, a) => is_full_inert(f) && is_full_normal_grammar(a),
        Term::ESub(b, _, a) => is_full_inert(b) && is_full_es_arg(a),
        Term::Abs(..) => false,
    }
}

/// Full values: `λx.F | v[x<-i']` with `i'` not an answer.
pub fn is_full_value(t: &Term) -> bool {
    match t {
        Term::Abs(_, b) => is_full_normal_grammar(b),
        Term::ESub(b, _, a) => is_full_value(b) && is_full_es_arg(a),
        _ => false,
    }
}

fn is_full_es_arg(a: &Term) -> bool {
    is_full_inert(a) && !is_answer(a)
}

/// Full normal forms described by grammar instead of by absence of redexes.
pub fn is_full_normal_grammar(t: &Term) -> bool {
    is_full_inert(t) || is_full_value(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    const OMEGA: &str = "((\\x. x x) (\\x. x x))";

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn documented_examples() {
        let c = classify(&t(&format!("x (\\y. {OMEGA})")));
        assert!(c.is_proper_inert && c.is_fireball && c.is_solvable_fireball);
        let c = classify(&t(&format!("\\x. {OMEGA}")));
        assert!(c.is_fireball && c.is_value && !c.is_solvable_fireball);
        let c = classify(&t(&format!("x {OMEGA}")));
        assert!(!c.is_fireball && !c.is_inert);
    }

    #[test]
    fn answers() {
        let a = t("(\\x. x)[y <- z]");
        let (l, v) = decompose_answer(&a).unwrap();
        assert_eq!((l.len(), v), (1, &t("\\x. x")));
        let b = t("x[y <- z]");
        let (l, v) = decompose_answer(&b).unwrap();
        assert_eq!((l.len(), v), (1, &t("x")));
        assert!(decompose_answer(&t("x y")).is_none());
    }

    #[test]
    fn es_arguments_must_be_proper() {
        // x[y<-z] is an e-redex: variables are values.
        assert!(!is_fireball(&t("x[y <- z]")));
        assert!(is_fireball(&t("x[y <- z w]")));
        assert!(is_inert(&t("x[y <- z w]")));
        assert!(!is_proper_inert(&t("x[y <- z w]")));
        assert!(is_proper_inert(&t("(x x)[y <- z w]")));
        assert!(is_solvable_fireball(&t("\\a. (\\b. a)[c <- a a]")));
    }

    #[test]
    fn full_grammar() {
        assert!(is_full_inert(&t("x (\\y. y z)")));
        assert!(!is_full_inert(&t("x (\\y. (\\z. z) y)")));
        assert!(is_full_value(&t("(\\y. y)[w <- x x]")));
        assert!(!is_full_value(&t("(\\y. y)[w <- x[z <- x x]]")));
        assert!(is_full_fireball(&t("\\y. y (\\z. z y)")));
    }
}
