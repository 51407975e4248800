//! Locally nameless terms.
//!
//! Bound variables are de Bruijn indices, free variables are names. Binders
//! keep the name they were written with as a [`Hint`], which never takes part
//! in comparisons, so the derived `Eq`, `Ord` and `Hash` on [`Term`] are
//! alpha-equivalence.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

pub type Name = String;

/// Separator of generated names. The parser rejects it in user input.
pub const FRESH_MARK: char = '~';

#[derive(Clone, Debug, Default)]
pub struct Hint(pub Name);

impl Hint {
    pub fn new(name: impl Into<Name>) -> Self {
        Hint(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl PartialEq for Hint {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Hint {}

impl Hash for Hint {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl PartialOrd for Hint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Hint {
    fn cmp(&self, _: &Self) -> Ordering {
        Ordering::Equal
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Name),
    Bound(usize),
    Abs(Hint, Box<Term>),
    App(Box<Term>, Box<Term>),
    /// `t[x <- u]`: the body is under the binder, the argument is not.
    ESub(Box<Term>, Hint, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<Name>) -> Term {
        Term::Var(name.into())
    }

    /// `λx.body`, binding the free occurrences of `x` in `body`.
    pub fn lam(x: &str, body: Term) -> Term {
        Term::Abs(Hint::new(x), Box::new(body.close(x)))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    /// `body[x <- arg]`, binding the free occurrences of `x` in `body`.
    pub fn esub(body: Term, x: &str, arg: Term) -> Term {
        Term::ESub(Box::new(body.close(x)), Hint::new(x), Box::new(arg))
    }

    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn is_value(&self) -> bool {
        matches!(self, Term::Var(_) | Term::Bound(_) | Term::Abs(..))
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Var(_) | Term::Bound(_))
    }

    pub fn is_es_free(&self) -> bool {
        match self {
            Term::Var(_) | Term::Bound(_) => true,
            Term::Abs(_, b) => b.is_es_free(),
            Term::App(f, a) => f.is_es_free() && a.is_es_free(),
            Term::ESub(..) => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Bound(_) => {}
            Term::Abs(_, b) => b.collect_free(out),
            Term::App(f, a) => {
                f.collect_free(out);
                a.collect_free(out);
            }
            Term::ESub(b, _, a) => {
                b.collect_free(out);
                a.collect_free(out);
            }
        }
    }

    pub fn has_free(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => y == x,
            Term::Bound(_) => false,
            Term::Abs(_, b) => b.has_free(x),
            Term::App(f, a) | Term::ESub(f, _, a) => f.has_free(x) || a.has_free(x),
        }
    }

    /// Whether index `k` (counted from the outside of this term) occurs.
    pub fn has_loose(&self, k: usize) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Bound(i) => *i == k,
            Term::Abs(_, b) => b.has_loose(k + 1),
            Term::App(f, a) => f.has_loose(k) || a.has_loose(k),
            Term::ESub(b, _, a) => b.has_loose(k + 1) || a.has_loose(k),
        }
    }

    /// No index escapes its binders.
    pub fn is_locally_closed(&self) -> bool {
        fn go(t: &Term, depth: usize) -> bool {
            match t {
                Term::Var(_) => true,
                Term::Bound(i) => *i < depth,
                Term::Abs(_, b) => go(b, depth + 1),
                Term::App(f, a) => go(f, depth) && go(a, depth),
                Term::ESub(b, _, a) => go(b, depth + 1) && go(a, depth),
            }
        }
        go(self, 0)
    }

    /// Adds `d` to every index that is at least `cutoff` at the root.
    pub fn shift(&self, d: usize, cutoff: usize) -> Term {
        if d == 0 {
            return self.clone();
        }
        match self {
            Term::Var(_) => self.clone(),
            Term::Bound(i) if *i >= cutoff => Term::Bound(i + d),
            Term::Bound(_) => self.clone(),
            Term::Abs(h, b) => Term::Abs(h.clone(), Box::new(b.shift(d, cutoff + 1))),
            Term::App(f, a) => Term::app(f.shift(d, cutoff), a.shift(d, cutoff)),
            Term::ESub(b, h, a) => Term::ESub(
                Box::new(b.shift(d, cutoff + 1)),
                h.clone(),
                Box::new(a.shift(d, cutoff)),
            ),
        }
    }

    /// Replaces index 0 by `v` and lowers the other loose indices, i.e. the
    /// body of a binder instantiated with `v` (which lives outside it).
    pub fn instantiate(&self, v: &Term) -> Term {
        self.instantiate_at(v, 0)
    }

    fn instantiate_at(&self, v: &Term, depth: usize) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::Bound(i) => match (*i).cmp(&depth) {
                Ordering::Less => self.clone(),
                Ordering::Equal => v.shift(depth, 0),
                Ordering::Greater => Term::Bound(i - 1),
            },
            Term::Abs(h, b) => Term::Abs(h.clone(), Box::new(b.instantiate_at(v, depth + 1))),
            Term::App(f, a) => Term::app(f.instantiate_at(v, depth), a.instantiate_at(v, depth)),
            Term::ESub(b, h, a) => Term::ESub(
                Box::new(b.instantiate_at(v, depth + 1)),
                h.clone(),
                Box::new(a.instantiate_at(v, depth)),
            ),
        }
    }

    /// Body of a binder with the bound variable replaced by the name `x`.
    pub fn open(&self, x: &str) -> Term {
        self.instantiate(&Term::var(x))
    }

    /// Inverse of [`Term::open`]: turns free `x` into the index of a new
    /// binder placed around this term.
    pub fn close(&self, x: &str) -> Term {
        self.close_at(x, 0)
    }

    fn close_at(&self, x: &str, depth: usize) -> Term {
        match self {
            Term::Var(y) if y == x => Term::Bound(depth),
            Term::Var(_) => self.clone(),
            Term::Bound(i) if *i >= depth => Term::Bound(i + 1),
            Term::Bound(_) => self.clone(),
            Term::Abs(h, b) => Term::Abs(h.clone(), Box::new(b.close_at(x, depth + 1))),
            Term::App(f, a) => Term::app(f.close_at(x, depth), a.close_at(x, depth)),
            Term::ESub(b, h, a) => Term::ESub(
                Box::new(b.close_at(x, depth + 1)),
                h.clone(),
                Box::new(a.close_at(x, depth)),
            ),
        }
    }

    /// `t{x <- v}`. Capture cannot happen since binders are indices.
    pub fn meta_subst(&self, x: &str, v: &Term) -> Term {
        self.subst_at(x, v, 0)
    }

    fn subst_at(&self, x: &str, v: &Term, depth: usize) -> Term {
        match self {
            Term::Var(y) if y == x => v.shift(depth, 0),
            Term::Var(_) | Term::Bound(_) => self.clone(),
            Term::Abs(h, b) => Term::Abs(h.clone(), Box::new(b.subst_at(x, v, depth + 1))),
            Term::App(f, a) => Term::app(f.subst_at(x, v, depth), a.subst_at(x, v, depth)),
            Term::ESub(b, h, a) => Term::ESub(
                Box::new(b.subst_at(x, v, depth + 1)),
                h.clone(),
                Box::new(a.subst_at(x, v, depth)),
            ),
        }
    }

    pub fn rename_free(&self, from: &str, to: &str) -> Term {
        if from == to {
            return self.clone();
        }
        self.meta_subst(from, &Term::var(to))
    }

    /// Number of constructors.
    pub fn node_count(&self) -> usize {
        match self {
            Term::Var(_) | Term::Bound(_) => 1,
            Term::Abs(_, b) => 1 + b.node_count(),
            Term::App(f, a) | Term::ESub(f, _, a) => 1 + f.node_count() + a.node_count(),
        }
    }

    /// Applications not under an abstraction.
    pub fn open_size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Bound(_) | Term::Abs(..) => 0,
            Term::App(f, a) => f.open_size() + a.open_size() + 1,
            Term::ESub(b, _, a) => b.open_size() + a.open_size(),
        }
    }

    /// Applications plus abstractions, ignoring what sits in argument
    /// position (measured with [`Term::open_size`] instead).
    pub fn solvable_size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Bound(_) => 0,
            Term::Abs(_, b) => b.solvable_size() + 1,
            Term::App(f, a) => f.solvable_size() + a.open_size() + 1,
            Term::ESub(b, _, a) => b.solvable_size() + a.open_size(),
        }
    }

    /// Splits `L<u>` into the maximal substitution context and `u`.
    pub fn split_spine(&self) -> (SubstContext, &Term) {
        let mut bindings = Vec::new();
        let mut cur = self;
        while let Term::ESub(b, h, a) = cur {
            bindings.push((h.clone(), (**a).clone()));
            cur = b;
        }
        bindings.reverse();
        (SubstContext { bindings }, cur)
    }

    pub fn spine_len(&self) -> usize {
        let mut n = 0;
        let mut cur = self;
        while let Term::ESub(b, _, _) = cur {
            n += 1;
            cur = b;
        }
        n
    }
}

pub fn alpha_eq(t: &Term, u: &Term) -> bool {
    t == u
}

/// `L ::= <.> | L[x <- t]`, stored innermost binding first.
///
/// The term plugged into the context is read under all of its binders, and
/// each argument is read under the binders that sit outside it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SubstContext {
    pub bindings: Vec<(Hint, Term)>,
}

impl SubstContext {
    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn plug(&self, t: Term) -> Term {
        self.bindings.iter().fold(t, |acc, (h, a)| {
            Term::ESub(Box::new(acc), h.clone(), Box::new(a.clone()))
        })
    }
}

/// A name based on `base` that `taken` rejects nowhere: `base~1`, `base~2`, ...
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> Name {
    let stem = base.split(FRESH_MARK).next().unwrap_or(base);
    let stem = if stem.is_empty() { "v" } else { stem };
    (1..)
        .map(|k| format!("{stem}{FRESH_MARK}{k}"))
        .find(|n| !taken(n))
        .expect("unbounded supply")
}

impl serde::Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_term(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Term {
        Term::var("x")
    }
    fn y() -> Term {
        Term::var("y")
    }
    fn z() -> Term {
        Term::var("z")
    }
    fn id(n: &str) -> Term {
        Term::lam(n, Term::var(n))
    }
    fn delta() -> Term {
        Term::lam("x", Term::app(x(), x()))
    }

    #[test]
    fn free_vars_respect_both_binders() {
        assert_eq!(x().free_vars(), BTreeSet::from(["x".to_string()]));
        assert!(id("x").free_vars().is_empty());
        let t = Term::esub(Term::app(x(), y()), "x", z());
        assert_eq!(
            t.free_vars(),
            BTreeSet::from(["y".to_string(), "z".to_string()])
        );
    }

    #[test]
    fn meta_subst_cases() {
        assert_eq!(x().meta_subst("x", &id("y")), id("y"));
        assert_eq!(id("x").meta_subst("x", &z()), id("x"));
        let t = Term::lam("y", Term::app(x(), y()));
        let r = t.meta_subst("x", &y());
        assert_eq!(r.free_vars(), BTreeSet::from(["y".to_string()]));
        assert_eq!(r, Term::lam("w", Term::app(y(), Term::var("w"))));
    }

    #[test]
    fn alpha_equivalence() {
        assert!(alpha_eq(&id("x"), &id("y")));
        assert!(alpha_eq(
            &Term::lam("x", Term::app(x(), y())),
            &Term::lam("z", Term::app(z(), y()))
        ));
        assert!(!alpha_eq(&id("x"), &Term::lam("x", y())));
    }

    #[test]
    fn sizes() {
        assert_eq!(delta().open_size(), 0);
        assert_eq!(Term::app(delta(), delta()).open_size(), 1);
        let t = Term::esub(Term::app(x(), y()), "y", Term::app(z(), Term::var("w")));
        assert_eq!(t.open_size(), 2);
        assert_eq!(delta().solvable_size(), 2);
        assert_eq!(x().solvable_size(), 0);
        assert_eq!(Term::app(y(), delta()).solvable_size(), 1);
    }

    #[test]
    fn open_close_round_trip() {
        let t = Term::lam("x", Term::esub(Term::app(x(), y()), "y", z()));
        if let Term::Abs(_, body) = &t {
            let opened = body.open("q");
            assert!(opened.is_locally_closed());
            assert_eq!(&opened.close("q"), &**body);
        } else {
            unreachable!()
        }
    }

    #[test]
    fn spine_split_and_plug() {
        let t = Term::esub(Term::esub(id("a"), "y", z()), "z", Term::var("w"));
        let (l, v) = t.split_spine();
        assert_eq!(l.len(), 2);
        assert!(v.is_value());
        assert_eq!(l.plug(v.clone()), t);
    }

    #[test]
    fn fresh_names_skip_taken() {
        let n = fresh_name("x~3", |s| s == "x~1");
        assert_eq!(n, "x~2");
    }
}
