//! Root rules at a distance, redex search per context class, evaluators.

use std::fmt;

use serde::Serialize;

use crate::term::Term;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum StepKind {
    Mult,
    Expo,
}

impl StepKind {
    pub fn letter(self) -> char {
        match self {
            StepKind::Mult => 'm',
            StepKind::Expo => 'e',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ContextClass {
    Open,
    Solving,
    Full,
}

/// One step from a node to one of its children.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Dir {
    AbsBody,
    AppFun,
    AppArg,
    EsBody,
    EsArg,
}

impl Dir {
    pub fn letter(self) -> char {
        match self {
            Dir::AbsBody => 'b',
            Dir::AppFun => 'l',
            Dir::AppArg => 'r',
            Dir::EsBody => 's',
            Dir::EsArg => 'a',
        }
    }

    pub fn from_letter(c: char) -> Option<Dir> {
        Some(match c {
            'b' => Dir::AbsBody,
            'l' => Dir::AppFun,
            'r' => Dir::AppArg,
            's' => Dir::EsBody,
            'a' => Dir::EsArg,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RedexPosition {
    pub path: Vec<Dir>,
    pub kind: StepKind,
}

impl RedexPosition {
    pub fn root(kind: StepKind) -> Self {
        RedexPosition {
            path: Vec::new(),
            kind,
        }
    }

    pub fn path_string(&self) -> String {
        if self.path.is_empty() {
            "root".into()
        } else {
            self.path.iter().map(|d| d.letter()).collect()
        }
    }
}

impl fmt::Display for RedexPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ {}", self.kind.letter(), self.path_string())
    }
}

/// `L<λx.b> u  ->  L<b[x<-u]>`.
pub fn root_mult(t: &Term) -> Option<Term> {
    let Term::App(f, u) = t else { return None };
    let (l, inner) = f.split_spine();
    let Term::Abs(h, b) = inner else { return None };
    let es = Term::ESub(b.clone(), h.clone(), Box::new(u.shift(l.len(), 0)));
    Some(l.plug(es))
}

/// `t[x<-L<v>]  ->  L<t{x<-v}>`.
pub fn root_expo(t: &Term) -> Option<Term> {
    let Term::ESub(body, _, arg) = t else {
        return None;
    };
    let (l, v) = arg.split_spine();
    if !v.is_value() {
        return None;
    }
    Some(l.plug(body.shift(l.len(), 1).instantiate(v)))
}

pub fn root_step(t: &Term, kind: StepKind) -> Option<Term> {
    match kind {
        StepKind::Mult => root_mult(t),
        StepKind::Expo => root_expo(t),
    }
}

fn root_kind(t: &Term) -> Option<StepKind> {
    match t {
        Term::App(..) => root_mult(t).map(|_| StepKind::Mult),
        Term::ESub(..) => root_expo(t).map(|_| StepKind::Expo),
        _ => None,
    }
}

/// Which class a child position falls in, given the class of the parent.
fn descend(cls: ContextClass, dir: Dir) -> Option<ContextClass> {
    use ContextClass::*;
    match (cls, dir) {
        (Full, _) => Some(Full),
        (Open, Dir::AbsBody) => None,
        (Open, _) => Some(Open),
        (Solving, Dir::AbsBody | Dir::AppFun | Dir::EsBody) => Some(Solving),
        (Solving, Dir::AppArg | Dir::EsArg) => Some(Open),
    }
}

fn children(t: &Term) -> Vec<(Dir, &Term)> {
    match t {
        Term::Var(_) | Term::Bound(_) => Vec::new(),
        Term::Abs(_, b) => vec![(Dir::AbsBody, b)],
        Term::App(f, a) => vec![(Dir::AppFun, f), (Dir::AppArg, a)],
        Term::ESub(b, _, a) => vec![(Dir::EsBody, b), (Dir::EsArg, a)],
    }
}

pub fn subterm_at<'a>(t: &'a Term, path: &[Dir]) -> Option<&'a Term> {
    let mut cur = t;
    for &d in path {
        cur = match (cur, d) {
            (Term::Abs(_, b), Dir::AbsBody) => b,
            (Term::App(f, _), Dir::AppFun) => f,
            (Term::App(_, a), Dir::AppArg) => a,
            (Term::ESub(b, _, _), Dir::EsBody) => b,
            (Term::ESub(_, _, a), Dir::EsArg) => a,
            _ => return None,
        };
    }
    Some(cur)
}

/// Rebuilds `t` with the subterm at `path` replaced by `f` of it.
pub fn replace_at(
    t: &Term,
    path: &[Dir],
    f: &mut dyn FnMut(&Term) -> Option<Term>,
) -> Option<Term> {
    let Some((&d, rest)) = path.split_first() else {
        return f(t);
    };
    Some(match (t, d) {
        (Term::Abs(h, b), Dir::AbsBody) => Term::Abs(h.clone(), Box::new(replace_at(b, rest, f)?)),
        (Term::App(l, a), Dir::AppFun) => Term::App(Box::new(replace_at(l, rest, f)?), a.clone()),
        (Term::App(l, a), Dir::AppArg) => Term::App(l.clone(), Box::new(replace_at(a, rest, f)?)),
        (Term::ESub(b, h, a), Dir::EsBody) => {
            Term::ESub(Box::new(replace_at(b, rest, f)?), h.clone(), a.clone())
        }
        (Term::ESub(b, h, a), Dir::EsArg) => {
            Term::ESub(b.clone(), h.clone(), Box::new(replace_at(a, rest, f)?))
        }
        _ => return None,
    })
}

/// Whether `path` stays inside the contexts of class `cls`.
pub fn path_in_class(t: &Term, path: &[Dir], cls: ContextClass) -> bool {
    let mut cur = t;
    let mut mode = cls;
    for &d in path {
        let Some(next) = descend(mode, d) else {
            return false;
        };
        let Some(child) = subterm_at(cur, &[d]) else {
            return false;
        };
        mode = next;
        cur = child;
    }
    true
}

/// Redex positions of class `cls`, leftmost-outermost first.
pub fn find_positions(t: &Term, cls: ContextClass, kind: Option<StepKind>) -> Vec<RedexPosition> {
    fn go(
        t: &Term,
        mode: ContextClass,
        kind: Option<StepKind>,
        path: &mut Vec<Dir>,
        out: &mut Vec<RedexPosition>,
    ) {
        if let Some(k) = root_kind(t) {
            if kind.is_none_or(|want| want == k) {
                out.push(RedexPosition {
                    path: path.clone(),
                    kind: k,
                });
            }
        }
        for (d, child) in children(t) {
            if let Some(next) = descend(mode, d) {
                path.push(d);
                go(child, next, kind, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(t, cls, kind, &mut Vec::new(), &mut out);
    out
}

pub fn has_redex(t: &Term, cls: ContextClass) -> bool {
    fn go(t: &Term, mode: ContextClass) -> bool {
        root_kind(t).is_some()
            || children(t)
                .into_iter()
                .any(|(d, c)| descend(mode, d).is_some_and(|m| go(c, m)))
    }
    go(t, cls)
}

/// Applies the root rule of `pos.kind` at `pos.path`, whatever the class.
pub fn reduce_at(t: &Term, pos: &RedexPosition) -> Option<Term> {
    replace_at(t, &pos.path, &mut |s| root_step(s, pos.kind))
}

/// Every redex of class `cls` with the corresponding one-step reduct.
pub fn find_redexes(
    t: &Term,
    cls: ContextClass,
    kind: Option<StepKind>,
) -> Vec<(RedexPosition, Term)> {
    find_positions(t, cls, kind)
        .into_iter()
        .map(|p| {
            let u = reduce_at(t, &p).expect("position found by search");
            (p, u)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Policy {
    Leftmost,
    Rightmost,
}

impl Policy {
    pub fn label(self) -> &'static str {
        match self {
            Policy::Leftmost => "leftmost-outermost",
            Policy::Rightmost => "rightmost",
        }
    }
}

pub fn step_with(t: &Term, cls: ContextClass, policy: Policy) -> Option<(Term, RedexPosition)> {
    let positions = find_positions(t, cls, None);
    let pos = match policy {
        Policy::Leftmost => positions.into_iter().next()?,
        Policy::Rightmost => positions.into_iter().last()?,
    };
    let u = reduce_at(t, &pos).expect("position found by search");
    Some((u, pos))
}

pub fn step(t: &Term, cls: ContextClass) -> Option<(Term, RedexPosition)> {
    step_with(t, cls, Policy::Leftmost)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EvalStatus {
    Normal,
    FuelExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub position: RedexPosition,
    pub result: Term,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvalTrace {
    pub initial: Term,
    pub class: ContextClass,
    /// Counts of full evaluations depend on it; open and solving ones do not.
    pub policy: Policy,
    pub steps: Vec<TraceStep>,
    pub m_count: usize,
    pub e_count: usize,
    pub status: EvalStatus,
}

impl EvalTrace {
    pub fn final_term(&self) -> &Term {
        self.steps.last().map_or(&self.initial, |s| &s.result)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_normal(&self) -> bool {
        self.status == EvalStatus::Normal
    }

    /// The term each step starts from.
    pub fn sources(&self) -> impl Iterator<Item = &Term> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|s| &s.result))
    }
}

pub fn evaluate_with(t: &Term, cls: ContextClass, fuel: usize, policy: Policy) -> EvalTrace {
    let mut trace = EvalTrace {
        initial: t.clone(),
        class: cls,
        policy,
        steps: Vec::new(),
        m_count: 0,
        e_count: 0,
        status: EvalStatus::FuelExhausted,
    };
    let mut cur = t.clone();
    loop {
        let Some((next, pos)) = step_with(&cur, cls, policy) else {
            trace.status = EvalStatus::Normal;
            return trace;
        };
        if trace.steps.len() == fuel {
            return trace;
        }
        match pos.kind {
            StepKind::Mult => trace.m_count += 1,
            StepKind::Expo => trace.e_count += 1,
        }
        trace.steps.push(TraceStep {
            position: pos,
            result: next.clone(),
        });
        cur = next;
    }
}

pub fn evaluate(t: &Term, cls: ContextClass, fuel: usize) -> EvalTrace {
    evaluate_with(t, cls, fuel, Policy::Leftmost)
}

pub const DEFAULT_FUEL: usize = 10_000;

/// `VSC_FUEL_DEFAULT` when set to a number, otherwise [`DEFAULT_FUEL`].
pub fn default_fuel() -> usize {
    std::env::var("VSC_FUEL_DEFAULT")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_FUEL)
}

fn beta_v(t: &Term) -> Option<Term> {
    match t {
        Term::App(f, v) if v.is_value() => match &**f {
            Term::Abs(_, b) => Some(b.instantiate(v)),
            _ => None,
        },
        _ => None,
    }
}

/// Position of the leftmost-outermost βv redex of an ES-free term.
pub fn plotkin_position(t: &Term) -> Option<Vec<Dir>> {
    fn go(t: &Term, path: &mut Vec<Dir>) -> bool {
        if beta_v(t).is_some() {
            return true;
        }
        for (d, c) in children(t) {
            path.push(d);
            if go(c, path) {
                return true;
            }
            path.pop();
        }
        false
    }
    let mut path = Vec::new();
    go(t, &mut path).then_some(path)
}

/// One leftmost βv step `(λx.b) v -> b{x<-v}` anywhere in the term.
pub fn plotkin_step(t: &Term) -> Option<Term> {
    let path = plotkin_position(t)?;
    replace_at(t, &path, &mut beta_v)
}

pub fn evaluate_plotkin(t: &Term, fuel: usize) -> (Vec<Term>, EvalStatus) {
    let mut out = Vec::new();
    let mut cur = t.clone();
    while let Some(next) = plotkin_step(&cur) {
        if out.len() == fuel {
            return (out, EvalStatus::FuelExhausted);
        }
        out.push(next.clone());
        cur = next;
    }
    (out, EvalStatus::Normal)
}

/// Whether the βv step from `t`, if any, is matched by a full m-step
/// followed by a full e-step.
pub fn check_simulation(t: &Term) -> bool {
    let Some(target) = plotkin_step(t) else {
        return true;
    };
    find_redexes(t, ContextClass::Full, Some(StepKind::Mult))
        .iter()
        .any(|(_, mid)| {
            find_redexes(mid, ContextClass::Full, Some(StepKind::Expo))
                .iter()
                .any(|(_, u)| *u == target)
        })
}
