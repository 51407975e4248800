//! Explicit type derivations and their validation.
//!
//! Every node stores its full judgment. Premises of `lam` and `es` type the
//! body of the binder opened with a free name; [`opened_name`] recovers that
//! name by comparing the premise's subject with the binder's body.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::term::{fresh_name, Hint, Name, Term};
use crate::types::{LinearType, MultiType, TypeContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Ax,
    App,
    Lam,
    Es,
    Many,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum JType {
    Linear(LinearType),
    Multi(MultiType),
}

impl JType {
    pub fn is_linear(&self) -> bool {
        matches!(self, JType::Linear(_))
    }

    pub fn as_multi(&self) -> Option<&MultiType> {
        match self {
            JType::Multi(m) => Some(m),
            JType::Linear(_) => None,
        }
    }

    pub fn as_linear(&self) -> Option<&LinearType> {
        match self {
            JType::Linear(a) => Some(a),
            JType::Multi(_) => None,
        }
    }
}

impl fmt::Display for JType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JType::Linear(a) => write!(f, "{a}"),
            JType::Multi(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Judgment {
    pub ctx: TypeContext,
    pub term: Term,
    pub ty: JType,
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |- {} : {}", self.ctx, self.term, self.ty)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Derivation {
    pub rule: Rule,
    pub conclusion: Judgment,
    pub children: Vec<Derivation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("`{0}` is not a value")]
    NotAValue(String),
    #[error("expected a multi judgment, found `{0}`")]
    ExpectedMulti(String),
    #[error("expected a linear judgment, found `{0}`")]
    ExpectedLinear(String),
    #[error("expected a `many` node for `{0}`")]
    ExpectedMany(String),
    #[error("premise types `{found}` where `{expected}` was required")]
    SubjectMismatch { expected: String, found: String },
    #[error("type mismatch: expected `{expected}`, found `{found}`")]
    TypeMismatch { expected: String, found: String },
    #[error("left premise type `{0}` is not a singleton arrow")]
    NotSingletonArrow(String),
    #[error("cannot split `{total}` into `{left}` and `{right}`")]
    BadSplit {
        total: String,
        left: String,
        right: String,
    },
    #[error("premise does not open the binder of `{0}`")]
    BinderMismatch(String),
    #[error("derivation has an unexpected shape: {0}")]
    Shape(String),
    #[error("position {0} is not a redex of the requested class")]
    InvalidPosition(String),
    #[error("mode precondition violated: {0}")]
    Mode(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type DResult<T> = Result<T, DerivationError>;

/// Name under which `child` opens the binder whose body is `body`; `None` if
/// the body does not use the binder and `child` is the body itself.
pub fn opened_name(body: &Term, child: &Term) -> Option<Option<Name>> {
    let outer = body.free_vars();
    let candidates: Vec<Name> = child
        .free_vars()
        .into_iter()
        .filter(|y| !outer.contains(y))
        .collect();
    match candidates.as_slice() {
        [] => {
            if body.has_loose(0) {
                return None;
            }
            let probe = fresh_name("v", |n| outer.contains(n));
            (body.open(&probe) == *child).then_some(None)
        }
        [y] => (body.open(y) == *child).then(|| Some(y.clone())),
        _ => None,
    }
}

impl Derivation {
    pub fn term(&self) -> &Term {
        &self.conclusion.term
    }

    pub fn ctx(&self) -> &TypeContext {
        &self.conclusion.ctx
    }

    pub fn multi_type(&self) -> DResult<&MultiType> {
        self.conclusion
            .ty
            .as_multi()
            .ok_or_else(|| DerivationError::ExpectedMulti(self.conclusion.to_string()))
    }

    pub fn ax(x: &str, a: LinearType) -> Derivation {
        Derivation {
            rule: Rule::Ax,
            conclusion: Judgment {
                ctx: TypeContext::singleton(x, MultiType::single(a.clone())),
                term: Term::var(x),
                ty: JType::Linear(a),
            },
            children: Vec::new(),
        }
    }

    /// `x:M |- x : M`, one `ax` per element of `m`.
    pub fn var_many(x: &str, m: &MultiType) -> Derivation {
        let children = m
            .elems()
            .iter()
            .map(|a| Derivation::ax(x, a.clone()))
            .collect();
        Derivation::many(Term::var(x), children).expect("axioms over a variable")
    }

    pub fn many(v: Term, children: Vec<Derivation>) -> DResult<Derivation> {
        if !v.is_value() {
            return Err(DerivationError::NotAValue(v.to_string()));
        }
        let mut ctx = TypeContext::new();
        let mut types = Vec::with_capacity(children.len());
        for c in &children {
            let a = c
                .conclusion
                .ty
                .as_linear()
                .ok_or_else(|| DerivationError::ExpectedLinear(c.conclusion.to_string()))?;
            if c.conclusion.term != v {
                return Err(DerivationError::SubjectMismatch {
                    expected: v.to_string(),
                    found: c.conclusion.term.to_string(),
                });
            }
            ctx = ctx.sum(&c.conclusion.ctx);
            types.push(a.clone());
        }
        Ok(Derivation {
            rule: Rule::Many,
            conclusion: Judgment {
                ctx,
                term: v,
                ty: JType::Multi(MultiType::new(types)),
            },
            children,
        })
    }

    /// The abstraction binding `y` in the premise's subject.
    pub fn lam(y: &str, hint: &Hint, child: Derivation) -> DResult<Derivation> {
        let n = child.multi_type()?.clone();
        let m = child.ctx().get(y);
        let term = Term::Abs(hint.clone(), Box::new(child.term().close(y)));
        Ok(Derivation {
            rule: Rule::Lam,
            conclusion: Judgment {
                ctx: child.ctx().remove(y),
                term,
                ty: JType::Linear(LinearType::Arrow(m, n)),
            },
            children: vec![child],
        })
    }

    pub fn app(left: Derivation, right: Derivation) -> DResult<Derivation> {
        let lt = left.multi_type()?;
        let (m, n) = lt
            .as_singleton_arrow()
            .ok_or_else(|| DerivationError::NotSingletonArrow(lt.to_string()))?;
        let rt = right.multi_type()?;
        if rt != m {
            return Err(DerivationError::TypeMismatch {
                expected: m.to_string(),
                found: rt.to_string(),
            });
        }
        let n = n.clone();
        Ok(Derivation {
            rule: Rule::App,
            conclusion: Judgment {
                ctx: left.ctx().sum(right.ctx()),
                term: Term::app(left.term().clone(), right.term().clone()),
                ty: JType::Multi(n),
            },
            children: vec![left, right],
        })
    }

    /// The explicit substitution binding `y` in the left premise's subject.
    pub fn es(left: Derivation, y: &str, hint: &Hint, right: Derivation) -> DResult<Derivation> {
        let n = left.multi_type()?.clone();
        let m = left.ctx().get(y);
        let rt = right.multi_type()?;
        if *rt != m {
            return Err(DerivationError::TypeMismatch {
                expected: m.to_string(),
                found: rt.to_string(),
            });
        }
        let term = Term::ESub(
            Box::new(left.term().close(y)),
            hint.clone(),
            Box::new(right.term().clone()),
        );
        Ok(Derivation {
            rule: Rule::Es,
            conclusion: Judgment {
                ctx: left.ctx().remove(y).sum(right.ctx()),
                term,
                ty: JType::Multi(n),
            },
            children: vec![left, right],
        })
    }

    /// `|Φ|`: every rule but `many`.
    pub fn size_general(&self) -> usize {
        let own = usize::from(self.rule != Rule::Many);
        own + self
            .children
            .iter()
            .map(Derivation::size_general)
            .sum::<usize>()
    }

    /// `|Φ|m`: the `lam` and `app` rules.
    pub fn size_mult(&self) -> usize {
        let own = usize::from(matches!(self.rule, Rule::Lam | Rule::App));
        own + self
            .children
            .iter()
            .map(Derivation::size_mult)
            .sum::<usize>()
    }

    /// Every free name mentioned by a subject or a context, at any node.
    pub fn names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        out.extend(self.conclusion.term.free_vars());
        out.extend(self.conclusion.ctx.domain().cloned());
        for c in &self.children {
            c.collect_names(out);
        }
    }

    /// Renames a free name everywhere; `to` must not occur in the tree.
    pub fn rename(&self, from: &str, to: &str) -> Derivation {
        Derivation {
            rule: self.rule,
            conclusion: Judgment {
                ctx: self.conclusion.ctx.rename(from, to),
                term: self.conclusion.term.rename_free(from, to),
                ty: self.conclusion.ty.clone(),
            },
            children: self.children.iter().map(|c| c.rename(from, to)).collect(),
        }
    }

    /// Indented one-judgment-per-line rendering.
    pub fn render_tree(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        let tag = match self.rule {
            Rule::Ax => "ax",
            Rule::App => "app",
            Rule::Lam => "lam",
            Rule::Es => "es",
            Rule::Many => "many",
        };
        out.push_str(&format!(
            "{:indent$}{tag}: {}\n",
            "",
            self.conclusion,
            indent = depth * 2
        ));
        for c in &self.children {
            c.render_into(depth + 1, out);
        }
    }
}

/// A binder premise opened with a name that is fresh for `avoid`; renames
/// the premise when its current name is in `avoid`.
pub(crate) fn open_premise(
    body: &Term,
    hint: &Hint,
    premise: &Derivation,
    avoid: &BTreeSet<Name>,
) -> DResult<(Name, Derivation)> {
    let found = opened_name(body, premise.term())
        .ok_or_else(|| DerivationError::BinderMismatch(premise.term().to_string()))?;
    let taken = |n: &str| avoid.contains(n) || premise.names().contains(n) || body.has_free(n);
    match found {
        Some(y) if !avoid.contains(&y) => Ok((y, premise.clone())),
        Some(y) => {
            let z = fresh_name(hint.as_str(), taken);
            Ok((z.clone(), premise.rename(&y, &z)))
        }
        None => Ok((fresh_name(hint.as_str(), taken), premise.clone())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleViolation {
    /// Child indices from the root.
    pub path: Vec<usize>,
    pub message: String,
}

impl fmt::Display for RuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(usize::to_string).collect();
        let path = if path.is_empty() {
            "root".to_string()
        } else {
            path.join(".")
        };
        write!(f, "at {path}: {}", self.message)
    }
}

pub fn check(d: &Derivation) -> Result<(), Vec<RuleViolation>> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    check_node(d, &mut path, &mut out);
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn check_node(d: &Derivation, path: &mut Vec<usize>, out: &mut Vec<RuleViolation>) {
    for message in node_violations(d) {
        out.push(RuleViolation {
            path: path.clone(),
            message,
        });
    }
    recurse(d, path, out)
}

fn node_violations(d: &Derivation) -> Vec<String> {
    let mut found = Vec::new();
    let mut fail = |msg: String| found.push(msg);
    let j = &d.conclusion;
    if !j.term.is_locally_closed() {
        fail("subject has dangling bound indices".into());
    }
    let fv = j.term.free_vars();
    for x in j.ctx.domain() {
        if !fv.contains(x) {
            fail(format!(
                "context binds `{x}` which is not free in the subject"
            ));
        }
    }
    let arity = |n: usize| d.children.len() == n;
    let multi = |c: &Derivation| c.conclusion.ty.as_multi().cloned();
    match d.rule {
        Rule::Ax => {
            if !arity(0) {
                fail("ax has premises".into());
            }
            match (&j.term, &j.ty) {
                (Term::Var(x), JType::Linear(a)) => {
                    if j.ctx != TypeContext::singleton(x, MultiType::single(a.clone())) {
                        fail(format!("ax context must be exactly {x}:[{a}]"));
                    }
                }
                (Term::Var(_), _) => fail("ax concludes a linear judgment".into()),
                _ => fail("ax over a non-variable".into()),
            }
        }
        Rule::Many => {
            if !j.term.is_value() {
                fail("many over non-value".into());
            }
            let Some(m) = j.ty.as_multi() else {
                fail("many concludes a multi judgment".into());
                return found;
            };
            let mut ctx = TypeContext::new();
            let mut types = Vec::new();
            for c in &d.children {
                match c.conclusion.ty.as_linear() {
                    Some(a) => types.push(a.clone()),
                    None => fail("many premise is not a linear judgment".into()),
                }
                if c.conclusion.term != j.term {
                    fail("many premises must type the same value".into());
                }
                ctx = ctx.sum(&c.conclusion.ctx);
            }
            if MultiType::new(types) != *m {
                fail("many type is not the multiset of premise types".into());
            }
            if ctx != j.ctx {
                fail("many context is not the sum of premise contexts".into());
            }
        }
        Rule::Lam => {
            if !arity(1) {
                fail("lam needs exactly one premise".into());
                return found;
            }
            let c = &d.children[0];
            let (Term::Abs(_, body), JType::Linear(a)) = (&j.term, &j.ty) else {
                fail("lam concludes a linear judgment over an abstraction".into());
                return found;
            };
            let Some(n) = multi(c) else {
                fail("lam premise is not a multi judgment".into());
                return found;
            };
            match opened_name(body, &c.conclusion.term) {
                None => fail("lam premise does not type the abstraction body".into()),
                Some(y) => {
                    let m = y
                        .as_deref()
                        .map(|y| c.conclusion.ctx.get(y))
                        .unwrap_or_default();
                    let rest = y
                        .as_deref()
                        .map(|y| c.conclusion.ctx.remove(y))
                        .unwrap_or_else(|| c.conclusion.ctx.clone());
                    if *a != LinearType::Arrow(m, n) {
                        fail("lam type must be the bound variable's type -o the body type".into());
                    }
                    if rest != j.ctx {
                        fail(
                            "lam context must be the premise context without the bound variable"
                                .into(),
                        );
                    }
                }
            }
        }
        Rule::App => {
            if !arity(2) {
                fail("app needs exactly two premises".into());
                return found;
            }
            let (l, r) = (&d.children[0], &d.children[1]);
            let (Term::App(f, a), JType::Multi(n)) = (&j.term, &j.ty) else {
                fail("app concludes a multi judgment over an application".into());
                return found;
            };
            if l.conclusion.term != **f || r.conclusion.term != **a {
                fail("app premises must type the function and the argument".into());
            }
            match (multi(l), multi(r)) {
                (Some(lt), Some(rt)) => match lt.as_singleton_arrow() {
                    None => fail("left premise not singleton arrow".into()),
                    Some((m, n2)) => {
                        if *m != rt {
                            fail("argument type does not match the arrow's source".into());
                        }
                        if n2 != n {
                            fail("app type must be the arrow's target".into());
                        }
                    }
                },
                _ => fail("app premises must be multi judgments".into()),
            }
            if l.conclusion.ctx.sum(&r.conclusion.ctx) != j.ctx {
                fail("app context is not the sum of premise contexts".into());
            }
        }
        Rule::Es => {
            if !arity(2) {
                fail("es needs exactly two premises".into());
                return found;
            }
            let (l, r) = (&d.children[0], &d.children[1]);
            let (Term::ESub(body, _, arg), JType::Multi(n)) = (&j.term, &j.ty) else {
                fail("es concludes a multi judgment over an explicit substitution".into());
                return found;
            };
            if r.conclusion.term != **arg {
                fail("es right premise must type the substituted term".into());
            }
            match (opened_name(body, &l.conclusion.term), multi(l), multi(r)) {
                (None, _, _) => fail("es left premise does not type the body".into()),
                (Some(y), Some(lt), Some(rt)) => {
                    let m = y
                        .as_deref()
                        .map(|y| l.conclusion.ctx.get(y))
                        .unwrap_or_default();
                    let rest = y
                        .as_deref()
                        .map(|y| l.conclusion.ctx.remove(y))
                        .unwrap_or_else(|| l.conclusion.ctx.clone());
                    if m != rt {
                        fail("es argument type does not match the bound variable's type".into());
                    }
                    if lt != *n {
                        fail("es type must be the body type".into());
                    }
                    if rest.sum(&r.conclusion.ctx) != j.ctx {
                        fail("es context is not the sum of premise contexts".into());
                    }
                }
                _ => fail("es premises must be multi judgments".into()),
            }
        }
    }
    found
}

fn recurse(d: &Derivation, path: &mut Vec<usize>, out: &mut Vec<RuleViolation>) {
    for (i, c) in d.children.iter().enumerate() {
        path.push(i);
        check_node(c, path, out);
        path.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, parse_type};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }
    fn m(s: &str) -> MultiType {
        parse_type(s).unwrap()
    }

    #[test]
    fn empty_many_over_abstraction_checks() {
        let d = Derivation::many(t("\\x. (\\y. y y) (\\y. y y)"), vec![]).unwrap();
        assert!(check(&d).is_ok());
        assert_eq!((d.size_general(), d.size_mult()), (0, 0));
    }

    #[test]
    fn identity_arrow_sizes() {
        let body = Derivation::many(t("z"), vec![]).unwrap();
        let lam = Derivation::lam("z", &Hint::new("z"), body).unwrap();
        let d = Derivation::many(t("\\z. z"), vec![lam]).unwrap();
        assert!(check(&d).is_ok());
        assert_eq!(d.multi_type().unwrap(), &m("[0 -o 0]"));
        assert_eq!((d.size_general(), d.size_mult()), (1, 1));
        let x = Derivation::var_many("x", &m("[X]"));
        assert!(check(&x).is_ok());
        assert_eq!((x.size_general(), x.size_mult()), (1, 0));
    }

    #[test]
    fn violations_are_reported() {
        let mut bad = Derivation::many(t("x"), vec![]).unwrap();
        bad.conclusion.term = t("x y");
        let errs = check(&bad).unwrap_err();
        assert!(errs.iter().any(|v| v.message == "many over non-value"));

        let left = Derivation::var_many("x", &m("[X]"));
        let right = Derivation::many(t("y"), vec![]).unwrap();
        let forged = Derivation {
            rule: Rule::App,
            conclusion: Judgment {
                ctx: left.ctx().clone(),
                term: t("x y"),
                ty: JType::Multi(m("0")),
            },
            children: vec![left.clone(), right.clone()],
        };
        let errs = check(&forged).unwrap_err();
        assert!(errs
            .iter()
            .any(|v| v.message == "left premise not singleton arrow"));
        assert!(Derivation::app(left, right).is_err());
    }

    #[test]
    fn binder_premise_must_match() {
        let body = Derivation::var_many("y", &m("[X]"));
        let lam = Derivation::lam("y", &Hint::new("y"), body).unwrap();
        assert_eq!(lam.conclusion.term, t("\\q. q"));
        assert!(check(&lam).is_ok());
        let mut wrong = lam.clone();
        wrong.conclusion.term = t("\\q. w");
        assert!(check(&wrong).is_err());
    }

    #[test]
    fn opened_name_cases() {
        let Term::Abs(_, body) = t("\\x. x y") else {
            unreachable!()
        };
        assert_eq!(opened_name(&body, &t("z y")), Some(Some("z".into())));
        assert_eq!(opened_name(&body, &t("y y")), None);
        let Term::Abs(_, body) = t("\\x. y") else {
            unreachable!()
        };
        assert_eq!(opened_name(&body, &t("y")), Some(None));
    }
}
