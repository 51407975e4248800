//! Property suites over exhaustively enumerated terms, plus a seeded sample
//! of larger random terms.
//!
//! Each suite maps a case to `None` (not applicable), `Some(Ok(()))` or
//! `Some(Err(reason))`. Cases run in parallel; failures are reported in case
//! order.

use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::classify::{
    is_fireball, is_full_fireball, is_full_normal_grammar, is_inert, is_inert_by_cases,
    is_solvable_fireball,
};
use crate::derivation::{check, Derivation};
use crate::enumerate::enumerate_terms;
use crate::lemmas::{remove_derivation, substitute_derivation};
use crate::quantitative::{
    derive_open, derive_solving, subject_expansion_open, subject_expansion_solving,
    subject_reduction_open, subject_reduction_solving, DeriveError, SolvingMode,
};
use crate::reduction::{
    check_simulation, evaluate, evaluate_with, find_positions, find_redexes, has_redex, reduce_at,
    ContextClass, Policy, RedexPosition, StepKind,
};
use crate::search::{closed_types, derivable_judgments};
use crate::solvability::{curated_corpus, is_solvable, Expected, SolvabilityStatus};
use crate::syntax::parse_term;
use crate::term::Term;
use crate::types::is_tight_conclusion;

pub const POOL: [&str; 2] = ["x", "y"];

/// How many failure reasons a suite keeps.
const KEEP: usize = 5;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: String,
    pub checked: usize,
    pub failed: usize,
    /// The first few failures, as `(case index, reason)`.
    pub failures: Vec<(usize, String)>,
}

impl SuiteResult {
    pub fn passed(&self) -> usize {
        self.checked - self.failed
    }

    pub fn ok(&self) -> bool {
        self.failed == 0 && self.checked > 0
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<28} pass={} fail={}",
            self.name,
            self.passed(),
            self.failed
        )?;
        for (i, why) in &self.failures {
            write!(f, "\n    case {i}: {why}")?;
        }
        Ok(())
    }
}

pub fn run_cases<T, F>(name: &str, cases: &[T], f: F) -> SuiteResult
where
    T: Sync,
    F: Fn(&T) -> Option<Result<(), String>> + Sync,
{
    let outcomes: Vec<Option<Result<(), String>>> = cases.par_iter().map(&f).collect();
    let mut r = SuiteResult {
        name: name.into(),
        ..SuiteResult::default()
    };
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            None => {}
            Some(Ok(())) => r.checked += 1,
            Some(Err(why)) => {
                r.checked += 1;
                r.failed += 1;
                if r.failures.len() < KEEP {
                    r.failures.push((i, why));
                }
            }
        }
    }
    r
}

fn ensure(cond: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why())
    }
}

pub fn terms_up_to(max_nodes: usize) -> Vec<Term> {
    enumerate_terms(max_nodes, &POOL).collect()
}

/// Fireballs and solvable fireballs are exactly the Open and Solving normal
/// forms; the full grammar matches Full normality.
pub fn normal_forms(terms: &[Term]) -> SuiteResult {
    run_cases("normal forms", terms, |t| {
        Some(
            ensure(is_fireball(t) == !has_redex(t, ContextClass::Open), || {
                format!("{t}: fireball vs open redex")
            })
            .and(ensure(
                is_solvable_fireball(t) == !has_redex(t, ContextClass::Solving),
                || format!("{t}: solvable fireball vs solving redex"),
            ))
            .and(ensure(
                is_full_fireball(t) == is_full_normal_grammar(t),
                || format!("{t}: full normal grammar"),
            )),
        )
    })
}

/// A variable under a non-empty ES chain, such as `x[y<-z z]`.
fn variable_under_es(t: &Term) -> bool {
    let (ctx, inner) = t.split_spine();
    !ctx.is_empty() && inner.is_variable()
}

/// The by-cases inert grammar is the recursive one minus variables under ES
/// chains. Inert terms have equal open and solvable sizes, and redex sets
/// grow from Open to Solving to Full.
pub fn grammar_and_classes(terms: &[Term]) -> SuiteResult {
    run_cases("grammars and classes", terms, |t| {
        let inert = is_inert(t);
        let by_cases = is_inert_by_cases(t);
        let mut r = ensure(by_cases == (inert && !variable_under_es(t)), || {
            format!("{t}: inert grammars differ unexpectedly")
        });
        if inert {
            r = r.and(ensure(t.open_size() == t.solvable_size(), || {
                format!("{t}: inert sizes differ")
            }));
        }
        let open = find_positions(t, ContextClass::Open, None);
        let solving = find_positions(t, ContextClass::Solving, None);
        let full = find_positions(t, ContextClass::Full, None);
        r = r.and(ensure(
            open.iter().all(|p| solving.contains(p)) && solving.iter().all(|p| full.contains(p)),
            || format!("{t}: redex classes not nested"),
        ));
        Some(r)
    })
}

/// One-step closure of distinct peaks, and `oe`/`om` peaks closing as
/// `om`/`oe`.
pub fn diamond(terms: &[Term], cls: ContextClass) -> SuiteResult {
    let name = format!("diamond {}", class_label(cls));
    run_cases(&name, terms, |t| {
        let reds = find_redexes(t, cls, None);
        if reds.len() < 2 {
            return None;
        }
        let one_step = |u: &Term| -> Vec<(StepKind, Term)> {
            find_redexes(u, cls, None)
                .into_iter()
                .map(|(p, w)| (p.kind, w))
                .collect()
        };
        for (i, (p1, u1)) in reds.iter().enumerate() {
            for (p2, u2) in &reds[i + 1..] {
                if u1 == u2 {
                    continue;
                }
                let (n1, n2) = (one_step(u1), one_step(u2));
                if !n1.iter().any(|(_, w)| n2.iter().any(|(_, w2)| w == w2)) {
                    return Some(Err(format!("{t}: peak at {p1} / {p2} does not close")));
                }
                if p1.kind != p2.kind {
                    // u_e continues with m, u_m continues with e.
                    let (ue, um) = if p1.kind == StepKind::Expo {
                        (&n1, &n2)
                    } else {
                        (&n2, &n1)
                    };
                    let closes = ue.iter().any(|(k, w)| {
                        *k == StepKind::Mult
                            && um.iter().any(|(k2, w2)| *k2 == StepKind::Expo && w == w2)
                    });
                    if !closes {
                        return Some(Err(format!(
                            "{t}: mixed peak at {p1} / {p2} does not commute"
                        )));
                    }
                }
            }
        }
        Some(Ok(()))
    })
}

fn class_label(cls: ContextClass) -> &'static str {
    match cls {
        ContextClass::Open => "open",
        ContextClass::Solving => "solving",
        ContextClass::Full => "full",
    }
}

/// Leftmost and rightmost evaluation agree on step counts and result.
pub fn random_descent(terms: &[Term], cls: ContextClass, fuel: usize) -> SuiteResult {
    let name = format!("random descent {}", class_label(cls));
    run_cases(&name, terms, |t| {
        let l = evaluate_with(t, cls, fuel, Policy::Leftmost);
        let r = evaluate_with(t, cls, fuel, Policy::Rightmost);
        if !l.is_normal() && !r.is_normal() {
            return None;
        }
        Some(ensure(
            l.is_normal() == r.is_normal()
                && l.m_count == r.m_count
                && l.e_count == r.e_count
                && l.final_term() == r.final_term(),
            || {
                format!(
                    "{t}: leftmost m={} e={} vs rightmost m={} e={}",
                    l.m_count, l.e_count, r.m_count, r.e_count
                )
            },
        ))
    })
}

/// The canonical derivation is valid, tight and meets the bound exactly.
pub fn open_bounds(terms: &[Term], fuel: usize) -> SuiteResult {
    run_cases("exact open bounds", terms, |t| match derive_open(t, fuel) {
        Err(DeriveError::FuelExhausted { .. }) => None,
        Err(e) => Some(Err(format!("{t}: {e}"))),
        Ok(r) => {
            let d = &r.derivation;
            let tight = d
                .multi_type()
                .is_ok_and(|m| is_tight_conclusion(d.ctx(), m));
            Some(
                ensure(check(d).is_ok(), || {
                    format!("{t}: derivation does not check")
                })
                .and(ensure(tight, || format!("{t}: derivation is not tight")))
                .and(ensure(r.exact, || format!("{t}: {}", r.equation()))),
            )
        }
    })
}

/// The canonical derivation is valid, precisely solvable and meets the bound
/// exactly.
pub fn solving_bounds(terms: &[Term], fuel: usize) -> SuiteResult {
    run_cases("exact solving bounds", terms, |t| {
        match derive_solving(t, fuel) {
            Err(DeriveError::FuelExhausted { .. }) => None,
            Err(e) => Some(Err(format!("{t}: {e}"))),
            Ok(r) => {
                let d = &r.derivation;
                let precise = d.multi_type().is_ok_and(|m| m.is_precisely_solvable());
                Some(
                    ensure(check(d).is_ok(), || {
                        format!("{t}: derivation does not check")
                    })
                    .and(ensure(precise, || {
                        format!("{t}: type is not precisely solvable")
                    }))
                    .and(ensure(r.exact, || format!("{t}: {}", r.equation()))),
                )
            }
        }
    })
}

/// Every enumerated derivation bounds evaluation from above; tight and
/// precisely solvable ones do so exactly.
pub fn upper_bounds(terms: &[Term], type_bound: usize, fuel: usize) -> SuiteResult {
    run_cases("non-tight upper bounds", terms, |t| {
        let ds = derivable_judgments(t, type_bound);
        if ds.is_empty() {
            return None;
        }
        let open = evaluate(t, ContextClass::Open, fuel);
        let solving = evaluate(t, ContextClass::Solving, fuel);
        for d in &ds {
            let Ok(m) = d.multi_type() else { continue };
            if !open.is_normal() {
                return Some(Err(format!(
                    "{t}: typed as {m} but open evaluation diverges"
                )));
            }
            let lhs = 2 * open.m_count + open.final_term().open_size();
            let ok = if is_tight_conclusion(d.ctx(), m) {
                lhs == d.size_mult()
            } else {
                lhs <= d.size_mult()
            };
            if !ok {
                return Some(Err(format!(
                    "{t}: open {lhs} vs |Φ|m = {} for {}",
                    d.size_mult(),
                    d.conclusion
                )));
            }
            if m.is_solvable() {
                if !solving.is_normal() {
                    return Some(Err(format!("{t}: solvable type {m} but solving diverges")));
                }
                let lhs = 2 * solving.m_count + solving.final_term().solvable_size();
                let ok = if m.is_precisely_solvable() {
                    lhs == d.size_mult()
                } else {
                    lhs <= d.size_mult()
                };
                if !ok {
                    return Some(Err(format!(
                        "{t}: solving {lhs} vs |Φ|m = {} for {}",
                        d.size_mult(),
                        d.conclusion
                    )));
                }
            }
        }
        Some(Ok(()))
    })
}

pub fn lemma_values() -> Vec<Term> {
    ["y", "\\z. z", "\\z. y", "\\z. z z"]
        .iter()
        .map(|s| parse_term(s).expect("constant term parses"))
        .collect()
}

/// Substitution and removal: `|·|m` is additive and `|·|` sub-additive, and
/// both results are valid derivations with the expected conclusions.
pub fn substitution_lemmas(terms: &[Term], type_bound: usize) -> SuiteResult {
    let values = lemma_values();
    let value_ds: Vec<Vec<Derivation>> = values
        .iter()
        .map(|v| derivable_judgments(v, type_bound))
        .collect();
    let cases: Vec<(usize, &Term)> = terms
        .iter()
        .flat_map(|t| (0..values.len()).map(move |i| (i, t)))
        .collect();
    run_cases("substitution and removal", &cases, |&(vi, t)| {
        let (v, psis) = (&values[vi], &value_ds[vi]);
        let x = "x";
        let target = t.meta_subst(x, v);
        let mut any = false;
        for phi in derivable_judgments(t, type_bound) {
            let n = phi.ctx().get(x);
            for psi in psis
                .iter()
                .filter(|p| p.multi_type().is_ok_and(|m| *m == n))
                .take(2)
            {
                any = true;
                let theta = match substitute_derivation(&phi, x, psi) {
                    Ok(d) => d,
                    Err(e) => return Some(Err(format!("{t}{{{x}<-{v}}}: {e}"))),
                };
                let ctx = phi.ctx().remove(x).sum(psi.ctx());
                let ok = check(&theta).is_ok()
                    && *theta.term() == target
                    && *theta.ctx() == ctx
                    && theta.conclusion.ty == phi.conclusion.ty
                    && theta.size_mult() == phi.size_mult() + psi.size_mult()
                    && theta.size_general() <= phi.size_general() + psi.size_general();
                if !ok {
                    return Some(Err(format!(
                        "{t}{{{x}<-{v}}}: substitution of {}",
                        phi.conclusion
                    )));
                }
            }
        }
        for theta in derivable_judgments(&target, type_bound) {
            any = true;
            let (phi, psi) = match remove_derivation(&theta, t, x, v) {
                Ok(p) => p,
                Err(e) => return Some(Err(format!("removing {v} from {}: {e}", theta.conclusion))),
            };
            let ok = check(&phi).is_ok()
                && check(&psi).is_ok()
                && phi.term() == t
                && psi.term() == v
                && psi.multi_type().is_ok_and(|m| *m == phi.ctx().get(x))
                && phi.ctx().remove(x).sum(psi.ctx()) == *theta.ctx()
                && phi.conclusion.ty == theta.conclusion.ty
                && theta.size_mult() == phi.size_mult() + psi.size_mult()
                && theta.size_general() <= phi.size_general() + psi.size_general();
            if !ok {
                return Some(Err(format!("removing {v} from {}", theta.conclusion)));
            }
        }
        any.then_some(Ok(()))
    })
}

fn m_delta(kind: StepKind) -> usize {
    match kind {
        StepKind::Mult => 2,
        StepKind::Expo => 0,
    }
}

/// Subject reduction and expansion along every Open step, and along every
/// Solving step for unitary solvable types, with exact `|·|m` deltas.
pub fn subject_steps(terms: &[Term], type_bound: usize) -> SuiteResult {
    run_cases("subject reduction/expansion", terms, |t| {
        let mut any = false;
        for (cls, mode) in [
            (ContextClass::Open, None),
            (ContextClass::Solving, Some(SolvingMode::Unitary)),
        ] {
            for pos in find_positions(t, cls, None) {
                let t2 = reduce_at(t, &pos).expect("found position reduces");
                let applies = |d: &Derivation| {
                    mode.is_none() || d.multi_type().is_ok_and(|m| m.is_unitary_solvable())
                };
                for d in derivable_judgments(t, type_bound)
                    .into_iter()
                    .filter(applies)
                {
                    any = true;
                    if let Err(why) = reduce_then_expand(&d, t, &t2, &pos, mode) {
                        return Some(Err(format!("{t} at {pos}: {why}")));
                    }
                }
                for d2 in derivable_judgments(&t2, type_bound)
                    .into_iter()
                    .filter(applies)
                {
                    any = true;
                    let d = match expand(&d2, t, &pos, mode) {
                        Ok(d) => d,
                        Err(e) => return Some(Err(format!("{t} at {pos}: expansion: {e}"))),
                    };
                    let ok = check(&d).is_ok()
                        && d.term() == t
                        && d.ctx() == d2.ctx()
                        && d.conclusion.ty == d2.conclusion.ty
                        && d.size_mult() == d2.size_mult() + m_delta(pos.kind);
                    if !ok {
                        return Some(Err(format!("{t} at {pos}: expansion of {}", d2.conclusion)));
                    }
                }
            }
        }
        any.then_some(Ok(()))
    })
}

fn reduce(
    d: &Derivation,
    pos: &RedexPosition,
    mode: Option<SolvingMode>,
) -> Result<Derivation, String> {
    match mode {
        None => subject_reduction_open(d, pos),
        Some(m) => subject_reduction_solving(d, pos, m),
    }
    .map_err(|e| e.to_string())
}

fn expand(
    d: &Derivation,
    t: &Term,
    pos: &RedexPosition,
    mode: Option<SolvingMode>,
) -> Result<Derivation, String> {
    match mode {
        None => subject_expansion_open(d, t, pos),
        Some(m) => subject_expansion_solving(d, t, pos, m),
    }
    .map_err(|e| e.to_string())
}

fn reduce_then_expand(
    d: &Derivation,
    t: &Term,
    t2: &Term,
    pos: &RedexPosition,
    mode: Option<SolvingMode>,
) -> Result<(), String> {
    let d2 = reduce(d, pos, mode)?;
    let same =
        |a: &Derivation, b: &Derivation| a.ctx() == b.ctx() && a.conclusion.ty == b.conclusion.ty;
    ensure(
        check(&d2).is_ok() && d2.term() == t2 && same(d, &d2),
        || format!("reduct of {} is wrong", d.conclusion),
    )?;
    ensure(d.size_mult() == d2.size_mult() + m_delta(pos.kind), || {
        format!("|Φ|m {} -> {}", d.size_mult(), d2.size_mult())
    })?;
    let back = expand(&d2, t, pos, mode)?;
    ensure(
        check(&back).is_ok() && back.term() == t && same(d, &back),
        || "round trip changed the conclusion".into(),
    )?;
    ensure(back.size_mult() == d.size_mult(), || {
        "round trip changed |Φ|m".into()
    })
}

/// Each βv step on an ES-free term is one m-step then one e-step.
pub fn plotkin(terms: &[Term]) -> SuiteResult {
    run_cases("plotkin simulation", terms, |t| {
        t.is_es_free()
            .then(|| ensure(check_simulation(t), || format!("{t}: simulation fails")))
    })
}

/// The curated examples get their documented status; looping bodies only
/// get unsolvable types.
pub fn corpus(fuel: usize, type_bound: usize) -> SuiteResult {
    let mut cases: Vec<(Term, Option<Expected>)> = curated_corpus()
        .into_iter()
        .map(|(t, e)| (t, Some(e)))
        .collect();
    for s in ["\\x. (\\z. z z) (\\z. z z)", "\\y. (\\z. z z) (\\z. z z)"] {
        cases.push((parse_term(s).expect("constant term parses"), None));
    }
    run_cases("solvability corpus", &cases, |(t, e)| {
        Some(match e {
            Some(Expected::Solvable) => {
                let v = is_solvable(t, fuel);
                let precise = v.witness.as_ref().is_some_and(|w| {
                    w.exact
                        && w.derivation
                            .multi_type()
                            .is_ok_and(|m| m.is_precisely_solvable())
                });
                ensure(v.status == SolvabilityStatus::Solvable && precise, || {
                    format!("{t}: {}", v.status)
                })
            }
            Some(Expected::Unsolvable) => {
                let v = is_solvable(t, fuel);
                ensure(v.status == SolvabilityStatus::UnsolvableWithinFuel, || {
                    format!("{t}: {}", v.status)
                })
            }
            None => {
                let types = closed_types(t, type_bound);
                ensure(
                    !types.is_empty() && types.iter().all(|m| !m.is_solvable()),
                    || format!("{t}: closed types {types:?}"),
                )
            }
        })
    })
}

/// A random term with exactly `nodes` constructors.
pub fn random_term(rng: &mut StdRng, nodes: usize, pool: &[&str]) -> Term {
    fn go(rng: &mut StdRng, nodes: usize, scope: &mut Vec<String>, pool: &[&str]) -> Term {
        let names: Vec<String> = pool
            .iter()
            .map(|s| s.to_string())
            .chain(scope.iter().cloned())
            .collect();
        if nodes <= 1 || (nodes == 2 && names.is_empty()) {
            if names.is_empty() {
                return Term::lam("a", Term::var("a"));
            }
            return Term::var(names[rng.gen_range(0..names.len())].clone());
        }
        let binder = format!("b{}", scope.len());
        match rng.gen_range(0..3) {
            0 => {
                scope.push(binder.clone());
                let body = go(rng, nodes - 1, scope, pool);
                scope.pop();
                Term::lam(&binder, body)
            }
            k if nodes >= 3 => {
                let left = rng.gen_range(1..nodes - 1);
                let right = nodes - 1 - left;
                if k == 1 {
                    let f = go(rng, left, scope, pool);
                    Term::app(f, go(rng, right, scope, pool))
                } else {
                    let arg = go(rng, right, scope, pool);
                    scope.push(binder.clone());
                    let body = go(rng, left, scope, pool);
                    scope.pop();
                    Term::esub(body, &binder, arg)
                }
            }
            _ => {
                scope.push(binder.clone());
                let body = go(rng, nodes - 1, scope, pool);
                scope.pop();
                Term::lam(&binder, body)
            }
        }
    }
    go(rng, nodes, &mut Vec::new(), pool)
}

pub fn sample_terms(seed: u64, count: usize, min_nodes: usize, max_nodes: usize) -> Vec<Term> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(min_nodes..=max_nodes);
            random_term(&mut rng, n, &POOL)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct PropsConfig {
    /// Constructor bound for the cheap suites.
    pub max_nodes: usize,
    /// Constructor bound for suites that enumerate derivations.
    pub derivation_nodes: usize,
    /// Type-size bound for enumerated derivations.
    pub type_bound: usize,
    pub fuel: usize,
    pub seed: u64,
    pub samples: usize,
}

impl Default for PropsConfig {
    fn default() -> Self {
        PropsConfig {
            max_nodes: 9,
            derivation_nodes: 5,
            type_bound: 4,
            fuel: 200,
            seed: 0,
            samples: 300,
        }
    }
}

pub fn run_all(cfg: &PropsConfig) -> Vec<SuiteResult> {
    let terms = terms_up_to(cfg.max_nodes);
    let small = terms_up_to(cfg.derivation_nodes.min(cfg.max_nodes));
    let sampled = sample_terms(cfg.seed, cfg.samples, cfg.max_nodes + 1, cfg.max_nodes + 6);
    let mut out = vec![
        normal_forms(&terms),
        grammar_and_classes(&terms),
        diamond(&terms, ContextClass::Open),
        diamond(&terms, ContextClass::Solving),
        random_descent(&terms, ContextClass::Open, cfg.fuel),
        random_descent(&terms, ContextClass::Solving, cfg.fuel),
        open_bounds(&terms, cfg.fuel),
        solving_bounds(&terms, cfg.fuel),
        upper_bounds(&small, cfg.type_bound, cfg.fuel),
        substitution_lemmas(&small, cfg.type_bound),
        subject_steps(&small, cfg.type_bound),
        plotkin(&terms),
        corpus(1000, 6),
    ];
    let mut sampled_suites = vec![
        random_descent(&sampled, ContextClass::Open, cfg.fuel),
        random_descent(&sampled, ContextClass::Solving, cfg.fuel),
        open_bounds(&sampled, cfg.fuel),
        solving_bounds(&sampled, cfg.fuel),
    ];
    for s in &mut sampled_suites {
        s.name = format!("sampled {}", s.name);
    }
    out.extend(sampled_suites);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_enumerations_pass() {
        let cfg = PropsConfig {
            max_nodes: 5,
            derivation_nodes: 3,
            samples: 20,
            ..PropsConfig::default()
        };
        for s in run_all(&cfg) {
            assert!(s.ok(), "{s}");
        }
    }

    #[test]
    fn sampling_is_seeded() {
        assert_eq!(sample_terms(7, 10, 5, 9), sample_terms(7, 10, 5, 9));
        assert_ne!(sample_terms(7, 10, 5, 9), sample_terms(8, 10, 5, 9));
        for t in sample_terms(3, 50, 4, 8) {
            assert!(t.is_locally_closed());
            let n = t.node_count();
            assert!((4..=8).contains(&n), "{t} has {n} nodes");
        }
    }

    #[test]
    fn failures_are_reported_in_order() {
        let r = run_cases("odd", &[1, 2, 3, 4, 5], |n| {
            (*n != 4).then(|| ensure(n % 2 == 0, || format!("{n}")))
        });
        assert_eq!((r.checked, r.failed), (4, 3));
        assert_eq!(r.failures[0], (0, "1".to_string()));
    }
}
