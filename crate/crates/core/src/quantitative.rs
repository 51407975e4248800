//! Typing normal forms, quantitative subject reduction and expansion, and
//! the exact bounds relating evaluation length to derivation size.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::classify::{is_fireball, is_inert, is_proper_inert, is_solvable_fireball};
use crate::derivation::{open_premise, opened_name, DResult, Derivation, DerivationError, Rule};
use crate::lemmas::{empty_value, remove_derivation, substitute_derivation};
use crate::reduction::{
    evaluate, path_in_class, reduce_at, ContextClass, Dir, EvalTrace, RedexPosition, StepKind,
};
use crate::term::{fresh_name, Hint, Name, Term};
use crate::types::{LinearType, MultiType};

fn fresh_for(base: &str, taken: &BTreeSet<Name>) -> Name {
    fresh_name(base, |n| taken.contains(n))
}

/// An inert derivation `Γ |- i : m` (`Γ` inert) for an inert term and an
/// inert multi type.
pub fn type_inert(i: &Term, m: &MultiType) -> DResult<Derivation> {
    if !is_inert(i) {
        return Err(DerivationError::Precondition(format!("`{i}` is not inert")));
    }
    if !m.is_inert() {
        return Err(DerivationError::Precondition(format!(
            "`{m}` is not an inert multi type"
        )));
    }
    inert_rec(i, m)
}

fn inert_rec(i: &Term, m: &MultiType) -> DResult<Derivation> {
    match i {
        Term::Var(x) => Ok(Derivation::var_many(x, m)),
        Term::App(head, arg) => {
            let arrow = MultiType::single(LinearType::arrow(MultiType::empty(), m.clone()));
            Derivation::app(inert_rec(head, &arrow)?, fireball_rec(arg)?)
        }
        Term::ESub(body, h, arg) => {
            let y = fresh_for(h.as_str(), &i.free_vars());
            let left = inert_rec(&body.open(&y), m)?;
            let n = left.ctx().get(&y);
            Derivation::es(left, &y, h, inert_rec(arg, &n)?)
        }
        _ => Err(DerivationError::Precondition(format!("`{i}` is not inert"))),
    }
}

/// A tight derivation `Γ |- f : 0` for a fireball.
pub fn type_fireball(f: &Term) -> DResult<Derivation> {
    if !is_fireball(f) {
        return Err(DerivationError::Precondition(format!(
            "`{f}` is not a fireball"
        )));
    }
    fireball_rec(f)
}

fn fireball_rec(f: &Term) -> DResult<Derivation> {
    match f {
        _ if f.is_value() => empty_value(f),
        Term::ESub(body, h, arg) if !is_proper_inert(f) => {
            let y = fresh_for(h.as_str(), &f.free_vars());
            let left = fireball_rec(&body.open(&y))?;
            let n = left.ctx().get(&y);
            Derivation::es(left, &y, h, inert_rec(arg, &n)?)
        }
        _ => inert_rec(f, &MultiType::empty()),
    }
}

/// `Γ |- fs : M` with `Γ` inert and `M` precisely solvable.
pub fn type_solvable_fireball(fs: &Term) -> DResult<Derivation> {
    if !is_solvable_fireball(fs) {
        return Err(DerivationError::Precondition(format!(
            "`{fs}` is not a solvable fireball"
        )));
    }
    solvable_rec(fs)
}

fn solvable_rec(fs: &Term) -> DResult<Derivation> {
    if is_inert(fs) {
        return inert_rec(fs, &MultiType::ground(1));
    }
    match fs {
        Term::Abs(h, body) => {
            let y = fresh_for(h.as_str(), &fs.free_vars());
            let lam = Derivation::lam(&y, h, solvable_rec(&body.open(&y))?)?;
            Derivation::many(fs.clone(), vec![lam])
        }
        Term::ESub(body, h, arg) => {
            let y = fresh_for(h.as_str(), &fs.free_vars());
            let left = solvable_rec(&body.open(&y))?;
            let n = left.ctx().get(&y);
            Derivation::es(left, &y, h, inert_rec(arg, &n)?)
        }
        _ => Err(DerivationError::Precondition(format!(
            "`{fs}` is not a solvable fireball"
        ))),
    }
}

/// Whether an inert context forces an inert type at the conclusion.
pub fn check_spreading(phi: &Derivation) -> DResult<bool> {
    if !is_inert(phi.term()) {
        return Err(DerivationError::Precondition(format!(
            "`{}` is not inert",
            phi.term()
        )));
    }
    Ok(!phi.ctx().is_inert() || phi.multi_type()?.is_inert())
}

struct Peeled {
    name: Name,
    hint: Hint,
    arg: Derivation,
}

/// Strips `n` `es` nodes off the top, opening each binder with a name
/// outside `avoid`. Outermost first.
fn peel_chain(
    d: &Derivation,
    n: usize,
    avoid: &BTreeSet<Name>,
) -> DResult<(Vec<Peeled>, Derivation)> {
    let mut avoid = avoid.clone();
    let mut out = Vec::with_capacity(n);
    let mut cur = d.clone();
    for _ in 0..n {
        let (Rule::Es, Term::ESub(body, h, _)) = (cur.rule, cur.term()) else {
            return Err(DerivationError::Shape(format!(
                "expected an es node over `{}`",
                cur.term()
            )));
        };
        let [left, right] = cur.children.as_slice() else {
            return Err(DerivationError::Shape("es node needs two premises".into()));
        };
        let (y, left) = open_premise(body, h, left, &avoid)?;
        avoid.insert(y.clone());
        out.push(Peeled {
            name: y,
            hint: h.clone(),
            arg: right.clone(),
        });
        cur = left;
    }
    Ok((out, cur))
}

fn rebuild_chain(inner: Derivation, peeled: Vec<Peeled>) -> DResult<Derivation> {
    peeled
        .into_iter()
        .rev()
        .try_fold(inner, |acc, p| Derivation::es(acc, &p.name, &p.hint, p.arg))
}

/// `L<v>` with the binders of `L` opened by `names`, outermost first.
fn open_spine(t: &Term, names: &[Name]) -> DResult<Term> {
    let mut cur = t.clone();
    for y in names {
        let Term::ESub(body, _, _) = &cur else {
            return Err(DerivationError::Shape(format!(
                "`{cur}` has too few substitutions"
            )));
        };
        cur = body.open(y);
    }
    Ok(cur)
}

fn two(d: &Derivation) -> DResult<(&Derivation, &Derivation)> {
    match d.children.as_slice() {
        [l, r] => Ok((l, r)),
        _ => Err(DerivationError::Shape(format!(
            "{:?} node needs two premises",
            d.rule
        ))),
    }
}

fn reduce_root_mult(phi: &Derivation) -> DResult<Derivation> {
    let (Rule::App, Term::App(f, _)) = (phi.rule, phi.term()) else {
        return Err(DerivationError::Shape(format!(
            "expected an app node over `{}`",
            phi.term()
        )));
    };
    let (df, du) = two(phi)?;
    let mut avoid = du.names();
    let (peeled, inner) = peel_chain(df, f.spine_len(), &avoid)?;
    let (Rule::Many, Term::Abs(h, body), [lam]) =
        (inner.rule, inner.term(), inner.children.as_slice())
    else {
        return Err(DerivationError::Shape(format!(
            "expected one abstraction typing `{}`",
            inner.term()
        )));
    };
    avoid.extend(peeled.iter().map(|p| p.name.clone()));
    let premise = lam
        .children
        .first()
        .ok_or_else(|| DerivationError::Shape("lam without premise".into()))?;
    let (x, theta) = open_premise(body, h, premise, &avoid)?;
    rebuild_chain(Derivation::es(theta, &x, h, du.clone())?, peeled)
}

fn reduce_root_expo(phi: &Derivation) -> DResult<Derivation> {
    let (Rule::Es, Term::ESub(body, h, arg)) = (phi.rule, phi.term()) else {
        return Err(DerivationError::Shape(format!(
            "expected an es node over `{}`",
            phi.term()
        )));
    };
    let (db, da) = two(phi)?;
    let (x, db) = open_premise(body, h, db, &da.names())?;
    let mut avoid = db.names();
    avoid.insert(x.clone());
    let (peeled, theta_v) = peel_chain(da, arg.spine_len(), &avoid)?;
    rebuild_chain(substitute_derivation(&db, &x, &theta_v)?, peeled)
}

fn expand_root_mult(phi_prime: &Derivation, t: &Term) -> DResult<Derivation> {
    let Term::App(f, _) = t else {
        return Err(DerivationError::Shape(format!(
            "`{t}` is not an application"
        )));
    };
    let (peeled, inner) = peel_chain(phi_prime, f.spine_len(), &t.free_vars())?;
    let (Rule::Es, Term::ESub(body, h, _)) = (inner.rule, inner.term()) else {
        return Err(DerivationError::Shape(format!(
            "expected an es node over `{}`",
            inner.term()
        )));
    };
    let (dt, du) = two(&inner)?;
    let (x, theta) = open_premise(body, h, dt, &du.names())?;
    let lam = Derivation::lam(&x, h, theta)?;
    let many = Derivation::many(lam.term().clone(), vec![lam])?;
    Derivation::app(rebuild_chain(many, peeled)?, du.clone())
}

fn expand_root_expo(phi_prime: &Derivation, t: &Term) -> DResult<Derivation> {
    let Term::ESub(b, h, arg) = t else {
        return Err(DerivationError::Shape(format!(
            "`{t}` is not an explicit substitution"
        )));
    };
    let outer = t.free_vars();
    let (peeled, inner) = peel_chain(phi_prime, arg.spine_len(), &outer)?;
    let names: Vec<Name> = peeled.iter().map(|p| p.name.clone()).collect();
    let v = open_spine(arg, &names)?;
    let mut taken = inner.names();
    taken.extend(outer);
    taken.extend(names);
    let x = fresh_for(h.as_str(), &taken);
    let (psi, theta) = remove_derivation(&inner, &b.open(&x), &x, &v)?;
    Derivation::es(psi, &x, h, rebuild_chain(theta, peeled)?)
}

/// Rebuilds `phi` along `path`, applying `f` at the end. `target` is the
/// subject the rebuilt derivation must have.
fn along_path(
    phi: &Derivation,
    target: &Term,
    path: &[Dir],
    f: &mut dyn FnMut(&Derivation, &Term) -> DResult<Derivation>,
) -> DResult<Derivation> {
    let Some((&d, rest)) = path.split_first() else {
        return f(phi, target);
    };
    let bad = || DerivationError::InvalidPosition(format!("{d:?} into `{}`", phi.term()));
    match (d, phi.rule, phi.term(), target) {
        (Dir::AppFun, Rule::App, _, Term::App(tf, _)) => {
            let (l, r) = two(phi)?;
            Derivation::app(along_path(l, tf, rest, f)?, r.clone())
        }
        (Dir::AppArg, Rule::App, _, Term::App(_, ta)) => {
            let (l, r) = two(phi)?;
            Derivation::app(l.clone(), along_path(r, ta, rest, f)?)
        }
        (Dir::EsBody, Rule::Es, Term::ESub(body, h, _), Term::ESub(tb, _, _)) => {
            let (l, r) = two(phi)?;
            let (y, l) = open_premise(body, h, l, &target.free_vars())?;
            Derivation::es(along_path(&l, &tb.open(&y), rest, f)?, &y, h, r.clone())
        }
        (Dir::EsArg, Rule::Es, Term::ESub(body, h, _), Term::ESub(_, _, ta)) => {
            let (l, r) = two(phi)?;
            let (y, l) = open_premise(body, h, l, &BTreeSet::new())?;
            Derivation::es(l, &y, h, along_path(r, ta, rest, f)?)
        }
        (Dir::AbsBody, Rule::Many, Term::Abs(h, body), Term::Abs(_, tb)) => {
            let mut lams = Vec::with_capacity(phi.children.len());
            for lam in &phi.children {
                let premise = lam
                    .children
                    .first()
                    .ok_or_else(|| DerivationError::Shape("lam without premise".into()))?;
                let (y, premise) = open_premise(body, h, premise, &target.free_vars())?;
                lams.push(Derivation::lam(
                    &y,
                    h,
                    along_path(&premise, &tb.open(&y), rest, f)?,
                )?);
            }
            Derivation::many(target.clone(), lams)
        }
        _ => Err(bad()),
    }
}

fn expect_subject(d: &Derivation, t: &Term) -> DResult<()> {
    if d.term() == t {
        Ok(())
    } else {
        Err(DerivationError::SubjectMismatch {
            expected: t.to_string(),
            found: d.term().to_string(),
        })
    }
}

/// The reduct of `t` at `pos`, provided `pos` is a redex of class `cls`.
fn reduct_in(t: &Term, pos: &RedexPosition, cls: ContextClass) -> DResult<Term> {
    if !path_in_class(t, &pos.path, cls) {
        return Err(DerivationError::InvalidPosition(format!(
            "{pos} is outside the {cls:?} contexts"
        )));
    }
    reduce_at(t, pos).ok_or_else(|| DerivationError::InvalidPosition(pos.to_string()))
}

fn reduce_generic(phi: &Derivation, pos: &RedexPosition, cls: ContextClass) -> DResult<Derivation> {
    let t = phi.term();
    let target = reduct_in(t, pos, cls)?;
    let out = along_path(phi, &target, &pos.path, &mut |d, _| match pos.kind {
        StepKind::Mult => reduce_root_mult(d),
        StepKind::Expo => reduce_root_expo(d),
    })?;
    expect_subject(&out, &target)?;
    Ok(out)
}

fn expand_generic(
    phi_prime: &Derivation,
    t: &Term,
    pos: &RedexPosition,
    cls: ContextClass,
) -> DResult<Derivation> {
    let reduct = reduct_in(t, pos, cls)?;
    expect_subject(phi_prime, &reduct)?;
    let out = along_path(phi_prime, t, &pos.path, &mut |d, src| match pos.kind {
        StepKind::Mult => expand_root_mult(d, src),
        StepKind::Expo => expand_root_expo(d, src),
    })?;
    expect_subject(&out, t)?;
    Ok(out)
}

/// One open step on the subject: `|Φ'|m = |Φ|m - 2` and `|Φ'| = |Φ| - 1`
/// for m-steps, `|Φ'|m = |Φ|m` and `|Φ'| < |Φ|` for e-steps.
pub fn subject_reduction_open(phi: &Derivation, pos: &RedexPosition) -> DResult<Derivation> {
    reduce_generic(phi, pos, ContextClass::Open)
}

/// Inverse of [`subject_reduction_open`]: from a derivation of the reduct
/// of `t` at `pos`, one for `t`.
pub fn subject_expansion_open(
    phi_prime: &Derivation,
    t: &Term,
    pos: &RedexPosition,
) -> DResult<Derivation> {
    expand_generic(phi_prime, t, pos, ContextClass::Open)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolvingMode {
    /// Solvable conclusion type; sizes only shrink by at least the step.
    Solvable,
    /// Unitary solvable conclusion type; sizes change exactly.
    Unitary,
}

fn check_mode(m: &MultiType, mode: SolvingMode) -> DResult<()> {
    let ok = match mode {
        SolvingMode::Solvable => m.is_solvable(),
        SolvingMode::Unitary => m.is_unitary_solvable(),
    };
    if ok {
        Ok(())
    } else {
        Err(DerivationError::Mode(
            format!("`{m}` is not {mode:?} solvable").to_lowercase(),
        ))
    }
}

pub fn subject_reduction_solving(
    phi: &Derivation,
    pos: &RedexPosition,
    mode: SolvingMode,
) -> DResult<Derivation> {
    check_mode(phi.multi_type()?, mode)?;
    reduce_generic(phi, pos, ContextClass::Solving)
}

pub fn subject_expansion_solving(
    phi_prime: &Derivation,
    t: &Term,
    pos: &RedexPosition,
    mode: SolvingMode,
) -> DResult<Derivation> {
    check_mode(phi_prime.multi_type()?, mode)?;
    expand_generic(phi_prime, t, pos, ContextClass::Solving)
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DeriveError {
    #[error("fuel exhausted after {steps} steps")]
    FuelExhausted { steps: usize },
    #[error(transparent)]
    Derivation(#[from] DerivationError),
}

#[derive(Clone, Debug)]
pub struct BoundReport {
    pub term: Term,
    pub strategy: ContextClass,
    pub trace: EvalTrace,
    pub derivation: Derivation,
    /// Size of the normal form under the strategy's measure.
    pub nf_size: usize,
    /// `2·m_count + nf_size`.
    pub lhs: usize,
    /// `|Φ|m`.
    pub rhs: usize,
    pub exact: bool,
}

impl BoundReport {
    fn new(
        t: &Term,
        strategy: ContextClass,
        trace: EvalTrace,
        derivation: Derivation,
        nf_size: usize,
    ) -> Self {
        let lhs = 2 * trace.m_count + nf_size;
        let rhs = derivation.size_mult();
        BoundReport {
            term: t.clone(),
            strategy,
            trace,
            derivation,
            nf_size,
            lhs,
            rhs,
            exact: lhs == rhs,
        }
    }

    pub const HEADER: &'static str = "term\tstrategy\tm_count\te_count\tnf_size\tsize_mult\texact";

    /// Tab-separated row matching [`BoundReport::HEADER`].
    pub fn row(&self) -> String {
        let strategy = match self.strategy {
            ContextClass::Open => "open",
            ContextClass::Solving => "solving",
            ContextClass::Full => "full",
        };
        format!(
            "{}\t{strategy}\t{}\t{}\t{}\t{}\t{}",
            self.term, self.trace.m_count, self.trace.e_count, self.nf_size, self.rhs, self.exact
        )
    }

    /// `2*m + nf = |Φ|m` when exact, `2*m + nf = lhs != rhs = |Φ|m` otherwise.
    pub fn equation(&self) -> String {
        let (m, nf) = (self.trace.m_count, self.nf_size);
        if self.exact {
            format!("2*{m} + {nf} = {} = |Φ|m", self.rhs)
        } else {
            format!("2*{m} + {nf} = {} != {} = |Φ|m", self.lhs, self.rhs)
        }
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.row())
    }
}

/// Expands `phi` (a derivation of the trace's normal form) back to the
/// initial term.
pub fn expand_along(
    trace: &EvalTrace,
    mut phi: Derivation,
    mut expand: impl FnMut(&Derivation, &Term, &RedexPosition) -> DResult<Derivation>,
) -> DResult<Derivation> {
    let sources: Vec<&Term> = trace.sources().collect();
    for (k, step) in trace.steps.iter().enumerate().rev() {
        phi = expand(&phi, sources[k], &step.position)?;
    }
    Ok(phi)
}

/// Open evaluation plus a tight derivation of the initial term.
pub fn derive_open(t: &Term, fuel: usize) -> Result<BoundReport, DeriveError> {
    let trace = evaluate(t, ContextClass::Open, fuel);
    if !trace.is_normal() {
        return Err(DeriveError::FuelExhausted { steps: trace.len() });
    }
    let u = trace.final_term().clone();
    let phi = expand_along(&trace, type_fireball(&u)?, subject_expansion_open)?;
    Ok(BoundReport::new(
        t,
        ContextClass::Open,
        trace,
        phi,
        u.open_size(),
    ))
}

/// Solving evaluation plus a derivation with inert context and precisely
/// solvable type.
pub fn derive_solving(t: &Term, fuel: usize) -> Result<BoundReport, DeriveError> {
    let trace = evaluate(t, ContextClass::Solving, fuel);
    if !trace.is_normal() {
        return Err(DeriveError::FuelExhausted { steps: trace.len() });
    }
    let u = trace.final_term().clone();
    let phi = expand_along(&trace, type_solvable_fireball(&u)?, |d, s, p| {
        subject_expansion_solving(d, s, p, SolvingMode::Unitary)
    })?;
    Ok(BoundReport::new(
        t,
        ContextClass::Solving,
        trace,
        phi,
        u.solvable_size(),
    ))
}

/// `Some(y)` when the premise of a binder node opens it as `y`.
pub fn binder_name(d: &Derivation) -> Option<Name> {
    let (body, premise) = match (d.rule, d.term()) {
        (Rule::Es, Term::ESub(body, _, _)) => (body, d.children.first()?),
        (Rule::Lam, Term::Abs(_, body)) => (body, d.children.first()?),
        _ => return None,
    };
    opened_name(body, premise.term()).flatten()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::check;
    use crate::syntax::{parse_term, parse_type};

    const OMEGA: &str = "((\\x. x x) (\\x. x x))";

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }
    fn m(s: &str) -> MultiType {
        parse_type(s).unwrap()
    }
    fn ok(d: &Derivation) {
        if let Err(v) = check(d) {
            panic!("{}\n{v:?}", d.render_tree());
        }
    }

    #[test]
    fn inert_typing() {
        let d = type_inert(&t("x"), &m("[X]")).unwrap();
        assert_eq!((d.children.len(), d.ctx().get("x")), (1, m("[X]")));
        let d = type_inert(&t("x"), &m("0")).unwrap();
        assert!(d.children.is_empty() && d.ctx().is_empty());
        let d = type_inert(&t("x (\\y. y)"), &m("[X]")).unwrap();
        ok(&d);
        assert_eq!(d.size_mult(), 1);
        assert_eq!(d.children[0].multi_type().unwrap(), &m("[0 -o [X]]"));
        assert_eq!(d.children[1].multi_type().unwrap(), &m("0"));
        assert!(check_spreading(&d).unwrap());
        assert!(type_inert(&t("\\y. y"), &m("[X]")).is_err());
        assert!(type_inert(&t("x"), &m("[[0 -o 0] -o 0]")).is_err());
    }

    #[test]
    fn fireball_typing() {
        let d = type_fireball(&t("\\x. (\\y. y y) (\\y. y y)")).unwrap();
        assert!(d.children.is_empty() && d.size_mult() == 0);
        let d = type_fireball(&t("x y")).unwrap();
        ok(&d);
        assert_eq!(d.size_mult(), 1);
        assert!(type_fireball(&t(OMEGA)).is_err());
        let f = t("(y (x z))[x <- w w][z <- a b]");
        let d = type_fireball(&f).unwrap();
        ok(&d);
        assert_eq!(d.size_mult(), f.open_size());
        assert!(d.ctx().is_inert() && d.multi_type().unwrap().is_empty());
    }

    #[test]
    fn solvable_fireball_typing() {
        let d = type_solvable_fireball(&t("x")).unwrap();
        assert_eq!((d.ctx().get("x"), d.size_mult()), (m("[X]"), 0));
        let d = type_solvable_fireball(&t("\\z. y")).unwrap();
        ok(&d);
        assert_eq!(d.multi_type().unwrap(), &m("[0 -o [X]]"));
        assert_eq!((d.ctx().get("y"), d.size_mult()), (m("[X]"), 1));
        assert!(type_solvable_fireball(&t(&format!("\\x. {OMEGA}"))).is_err());
        let fs = t("\\a. (a (\\b. b))[c <- a a]");
        let d = type_solvable_fireball(&fs).unwrap();
        ok(&d);
        assert!(d.multi_type().unwrap().is_precisely_solvable());
        assert_eq!(d.size_mult(), fs.solvable_size());
    }

    #[test]
    fn open_bounds_on_examples() {
        let r = derive_open(&t("(\\z. z) (\\z. z)"), 100).unwrap();
        ok(&r.derivation);
        assert_eq!((r.trace.m_count, r.nf_size, r.rhs), (1, 0, 2));
        assert!(r.exact);
        assert_eq!(r.equation(), "2*1 + 0 = 2 = |Φ|m");
        let r = derive_open(&t("\\x. (\\y. y y) (\\y. y y)"), 100).unwrap();
        assert_eq!((r.trace.len(), r.rhs), (0, 0));
        assert!(matches!(
            derive_open(&t(OMEGA), 100),
            Err(DeriveError::FuelExhausted { steps: 100 })
        ));
    }

    #[test]
    fn solving_bounds_on_examples() {
        let r = derive_solving(&t("\\x. (\\z. z) (\\z. z)"), 100).unwrap();
        ok(&r.derivation);
        assert_eq!((r.trace.m_count, r.nf_size, r.rhs), (1, 2, 4));
        assert!(r.exact);
        let r = derive_solving(&t(&format!("x (\\y. {OMEGA})")), 100).unwrap();
        assert_eq!((r.trace.len(), r.nf_size, r.rhs), (0, 1, 1));
        assert!(r.derivation.multi_type().unwrap().is_precisely_solvable());
        assert!(derive_solving(&t(&format!("\\x. {OMEGA}")), 100).is_err());
    }

    #[test]
    fn reduction_steps_change_sizes_exactly() {
        let ii = t("(\\z. z) (\\z. z)");
        let phi = derive_open(&ii, 10).unwrap().derivation;
        let phi1 = subject_reduction_open(&phi, &RedexPosition::root(StepKind::Mult)).unwrap();
        ok(&phi1);
        assert_eq!(phi1.size_mult() + 2, phi.size_mult());
        assert_eq!(phi1.size_general() + 1, phi.size_general());
        let phi2 = subject_reduction_open(&phi1, &RedexPosition::root(StepKind::Expo)).unwrap();
        ok(&phi2);
        assert_eq!(phi2.size_mult(), phi1.size_mult());
        assert!(phi2.size_general() < phi1.size_general());
        assert!(subject_reduction_open(&phi, &RedexPosition::root(StepKind::Expo)).is_err());

        let lam = t("\\x. (\\z. z) (\\z. z)");
        let psi = derive_solving(&lam, 10).unwrap().derivation;
        let under = RedexPosition {
            path: vec![Dir::AbsBody],
            kind: StepKind::Mult,
        };
        assert!(subject_reduction_open(&psi, &under).is_err());
        let psi1 = subject_reduction_solving(&psi, &under, SolvingMode::Unitary).unwrap();
        ok(&psi1);
        assert_eq!(psi1.size_mult() + 2, psi.size_mult());
    }

    #[test]
    fn expansion_checks_the_reduct() {
        let phi = type_fireball(&t("\\z. z")).unwrap();
        let wrong = t("(\\z. z) y");
        assert!(
            subject_expansion_open(&phi, &wrong, &RedexPosition::root(StepKind::Mult)).is_err()
        );
        let zero = empty_value(&t("\\x. x")).unwrap();
        assert!(matches!(
            subject_reduction_solving(
                &zero,
                &RedexPosition::root(StepKind::Mult),
                SolvingMode::Solvable
            ),
            Err(DerivationError::Mode(_))
        ));
    }

    #[test]
    fn expansion_avoids_capturing_outer_names() {
        // The ES argument `w` reaches `z` through the chain [z <- w].
        let t0 = t("(\\x. x z)[z <- w] z");
        let r = derive_open(&t0, 20).unwrap();
        ok(&r.derivation);
        assert!(r.exact, "{}", r.equation());
        let t1 = t("(y z)[y <- (\\a. a)[z <- w w]]");
        let r = derive_open(&t1, 20).unwrap();
        ok(&r.derivation);
        assert!(r.exact, "{}", r.equation());
    }

    #[test]
    fn inequality_branch_for_duplicated_arrows() {
        // [A, A] with A = [0 -o [X]] ... typed by merging two unitary copies.
        let lam = t("\\x. (\\z. z) (\\z. z)");
        let one = derive_solving(&lam, 10).unwrap().derivation;
        let both = crate::lemmas::merge_value(&one, &one).unwrap();
        ok(&both);
        assert!(both.multi_type().unwrap().is_solvable());
        let under = RedexPosition {
            path: vec![Dir::AbsBody],
            kind: StepKind::Mult,
        };
        assert!(subject_reduction_solving(&both, &under, SolvingMode::Unitary).is_err());
        let reduced = subject_reduction_solving(&both, &under, SolvingMode::Solvable).unwrap();
        ok(&reduced);
        assert_eq!(both.size_mult() - reduced.size_mult(), 4);
    }
}
