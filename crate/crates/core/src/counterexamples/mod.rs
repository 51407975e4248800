//! Two neighbouring type systems in which subject reduction or expansion
//! breaks, with bounded searches that exhibit the failures, and the matching
//! checks on the main system.

pub mod kmr;
pub mod pr;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::derivation::{check, Derivation};
use crate::quantitative::{
    derive_open, derive_solving, subject_expansion_open, subject_expansion_solving,
    subject_reduction_open, subject_reduction_solving, SolvingMode,
};
use crate::reduction::{find_positions, reduce_at, ContextClass, RedexPosition, StepKind};
use crate::search::derivable_judgments;
use crate::syntax::{parse_term, read_derivation, ParseError, SourceSpan};
use crate::term::Term;

pub use kmr::{
    kmr_check, kmr_search, parse_kmr_judgment, KmrDerivation, KmrJType, KmrJudgment, KmrType,
};
pub use pr::{parse_pr_type, pr_check, pr_search, PrDerivation, PrType};

#[derive(Serialize, Deserialize)]
pub(crate) struct Node {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
    pub rule: String,
    pub ctx: Vec<(String, String)>,
    pub term: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub children: Vec<Node>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Child indices from the root.
    pub path: Vec<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
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

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum System {
    Main,
    Pr,
    Kmr,
}

impl System {
    pub fn tag(self) -> &'static str {
        match self {
            System::Main => "main",
            System::Pr => "pr",
            System::Kmr => "kmr",
        }
    }

    pub fn from_tag(s: &str) -> Option<System> {
        [System::Main, System::Pr, System::Kmr]
            .into_iter()
            .find(|x| x.tag() == s)
    }
}

#[derive(Clone, Debug)]
pub enum AnyDerivation {
    Main(Derivation),
    Pr(PrDerivation),
    Kmr(KmrDerivation),
}

impl AnyDerivation {
    pub fn system(&self) -> System {
        match self {
            AnyDerivation::Main(_) => System::Main,
            AnyDerivation::Pr(_) => System::Pr,
            AnyDerivation::Kmr(_) => System::Kmr,
        }
    }

    /// Rule violations, rendered.
    pub fn check(&self) -> Result<(), Vec<String>> {
        let strs = |v: Vec<Violation>| v.iter().map(ToString::to_string).collect();
        match self {
            AnyDerivation::Main(d) => {
                check(d).map_err(|v| v.iter().map(ToString::to_string).collect())
            }
            AnyDerivation::Pr(d) => pr_check(d).map_err(strs),
            AnyDerivation::Kmr(d) => kmr_check(d).map_err(strs),
        }
    }

    pub fn judgment(&self) -> String {
        match self {
            AnyDerivation::Main(d) => d.conclusion.to_string(),
            AnyDerivation::Pr(d) => d.judgment(),
            AnyDerivation::Kmr(d) => d.judgment(),
        }
    }
}

/// Reads a derivation document for `system`, or for the system named by its
/// tag (untagged documents are main-system ones).
pub fn read_any_derivation(
    input: &str,
    system: Option<System>,
) -> Result<AnyDerivation, ParseError> {
    let tag = crate::syntax::derivation_system(input)?;
    let tagged = match tag.as_deref() {
        None => None,
        Some(s) => Some(System::from_tag(s).ok_or_else(|| {
            ParseError::new(SourceSpan::new(0, 0), format!("unknown system tag `{s}`"))
        })?),
    };
    let system = match (system, tagged) {
        (Some(a), Some(b)) if a != b => {
            return Err(ParseError::new(
                SourceSpan::new(0, 0),
                format!("document is tagged `{}`, not `{}`", b.tag(), a.tag()),
            ))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => System::Main,
    };
    if system == System::Main {
        return read_derivation(input).map(AnyDerivation::Main);
    }
    let node: Node = serde_json::from_str(input)
        .map_err(|e| ParseError::new(SourceSpan::new(0, 0), e.to_string()))?;
    Ok(match system {
        System::Pr => AnyDerivation::Pr(pr::from_node(&node)?),
        _ => AnyDerivation::Kmr(kmr::from_node(&node)?),
    })
}

pub fn write_pr_derivation(d: &PrDerivation) -> String {
    let mut n = pr::to_node(d);
    n.system = Some("pr".into());
    serde_json::to_string_pretty(&n).expect("nodes serialize")
}

pub fn write_kmr_derivation(d: &KmrDerivation) -> String {
    let mut n = kmr::to_node(d);
    n.system = Some("kmr".into());
    serde_json::to_string_pretty(&n).expect("nodes serialize")
}

pub const PR_T_FIXTURE: &str = include_str!("../../fixtures/pr_t.vscd");
pub const PR_T_PRIME_FIXTURE: &str = include_str!("../../fixtures/pr_t_prime.vscd");
pub const KMR_T_FIXTURE: &str = include_str!("../../fixtures/kmr_t.vscd");

pub fn pr_fixture(src: &str) -> PrDerivation {
    match read_any_derivation(src, Some(System::Pr)) {
        Ok(AnyDerivation::Pr(d)) => d,
        other => panic!("bundled fixture is malformed: {other:?}"),
    }
}

pub fn kmr_fixture() -> KmrDerivation {
    match read_any_derivation(KMR_T_FIXTURE, Some(System::Kmr)) {
        Ok(AnyDerivation::Kmr(d)) => d,
        other => panic!("bundled fixture is malformed: {other:?}"),
    }
}

pub const PR_T: &str = "\\x. (\\z. x) (x x)";
pub const PR_T_PRIME: &str = "\\x. x";
pub const KMR_T: &str = "w ((\\x. w') (z y))";
pub const KMR_T_PRIME: &str = "(\\x. w w') (z y)";
pub const KMR_CTX: &str = "w:[[a1, a2] => c], z:[[b1] => [], [b2] => []], y:[b1, b2], w':[a1, a2]";

#[derive(Clone, Debug)]
pub struct CheckLine {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct CounterexampleReport {
    pub lines: Vec<CheckLine>,
}

impl CounterexampleReport {
    fn push(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        self.lines.push(CheckLine {
            name: name.into(),
            ok,
            detail: detail.into(),
        });
    }

    pub fn all_ok(&self) -> bool {
        self.lines.iter().all(|l| l.ok)
    }

    pub fn line(&self, name: &str) -> Option<&CheckLine> {
        self.lines.iter().find(|l| l.name == name)
    }
}

impl fmt::Display for CounterexampleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(
                f,
                "{} {}: {}",
                if l.ok { "ok  " } else { "FAIL" },
                l.name,
                l.detail
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Bounds {
    /// Node bound for the idempotent searches.
    pub pr: usize,
    /// Node bound for the empty-type searches.
    pub kmr: usize,
    /// Type-size bound for main-system enumeration.
    pub main: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            pr: 20,
            kmr: 30,
            main: 4,
        }
    }
}

fn term(s: &str) -> Term {
    parse_term(s).expect("constant term parses")
}

/// Absence at `bound` and at half again as much.
fn absent_stably(found: impl Fn(usize) -> bool, bound: usize) -> (bool, String) {
    let big = bound + bound / 2;
    let (a, b) = (found(bound), found(big));
    (
        !a && !b,
        format!("found at {bound}: {a}, found at {big}: {b}"),
    )
}

pub fn reproduce_counterexamples(bounds: Bounds) -> CounterexampleReport {
    let mut r = CounterexampleReport::default();
    let alpha_id = parse_pr_type("{alpha} => alpha").expect("type parses");
    let tau_tau = parse_pr_type("{{alpha} => alpha} => {alpha} => alpha").expect("type parses");
    let s_tau = parse_pr_type("{{alpha} => nu, alpha, {alpha} => alpha} => {alpha} => alpha")
        .expect("type parses");
    let (t, t_prime) = (term(PR_T), term(PR_T_PRIME));

    let d = pr_fixture(PR_T_FIXTURE);
    let ok = pr_check(&d).is_ok() && d.term == t && d.ty == s_tau && d.env.is_empty();
    r.push("pr fixture for t checks", ok, d.judgment());
    let d = pr_fixture(PR_T_PRIME_FIXTURE);
    let ok = pr_check(&d).is_ok() && d.term == t_prime && d.ty == tau_tau && d.env.is_empty();
    r.push("pr fixture for t' checks", ok, d.judgment());

    let (ok, detail) = absent_stably(
        |b| pr_search(&t_prime, &s_tau, b).witness.is_some(),
        bounds.pr,
    );
    r.push(
        "pr subject reduction fails: t' lacks the type of t",
        ok,
        format!("{s_tau}; {detail}"),
    );
    let (ok, detail) = absent_stably(|b| pr_search(&t, &tau_tau, b).witness.is_some(), bounds.pr);
    r.push(
        "pr subject expansion fails: t lacks the type of t'",
        ok,
        format!("{tau_tau}; {detail}"),
    );
    let (ok, detail) = absent_stably(|b| pr_search(&t, &alpha_id, b).witness.is_some(), bounds.pr);
    r.push("pr t lacks {alpha} => alpha", ok, detail);
    let w = pr_search(&t_prime, &alpha_id, 12).witness;
    let ok = w.as_ref().is_some_and(|d| pr_check(d).is_ok());
    r.push(
        "pr t' has {alpha} => alpha",
        ok,
        w.map_or("no witness".into(), |d| format!("{} nodes", d.node_count())),
    );

    let d = kmr_fixture();
    let goal = parse_kmr_judgment(&format!("{KMR_CTX} |- {KMR_T} : c")).expect("judgment parses");
    let ok = kmr_check(&d).is_ok() && d.term == goal.term && d.env == goal.env && d.ty == goal.ty;
    r.push("kmr fixture for t checks", ok, d.judgment());
    let goal_prime = KmrJudgment {
        term: term(KMR_T_PRIME),
        ..goal.clone()
    };
    let (ok, detail) = absent_stably(|b| kmr_search(&goal_prime, b).witness.is_some(), bounds.kmr);
    r.push(
        "kmr subject reduction fails: t' lacks the judgment of t",
        ok,
        detail,
    );
    let sub = parse_kmr_judgment("y:[b1, b2], z:[[b1] => [], [b2] => []] |- z y : []")
        .expect("judgment parses");
    let (ok, detail) = absent_stably(|b| kmr_search(&sub, b).witness.is_some(), bounds.kmr);
    r.push("kmr sub-goal for z y is underivable", ok, detail);
    let found = kmr_search(&goal, bounds.kmr).witness;
    r.push(
        "kmr search rediscovers t",
        found.is_some(),
        found.map_or("no witness".into(), |d| format!("{} nodes", d.node_count())),
    );

    let (ok, detail) = main_round_trip(&t, ContextClass::Solving, bounds.main);
    r.push(
        "main system preserves types across the step from t",
        ok,
        detail,
    );
    let (ok, detail) = main_round_trip(&term(KMR_T), ContextClass::Open, bounds.main);
    r.push(
        "main system preserves types across the step from w ((\\x. w') (z y))",
        ok,
        detail,
    );
    let (ok, detail) = main_round_trip(&term(KMR_T_PRIME), ContextClass::Open, bounds.main);
    r.push(
        "main system preserves types across the step from (\\x. w w') (z y)",
        ok,
        detail,
    );
    r
}

/// Subject reduction and expansion over every enumerated derivation of `t`
/// and of its reduct at the first multiplicative redex in `cls`.
fn main_round_trip(t: &Term, cls: ContextClass, bound: usize) -> (bool, String) {
    let Some(pos) = find_positions(t, cls, Some(StepKind::Mult))
        .into_iter()
        .next()
    else {
        return (false, "no multiplicative redex".into());
    };
    let reduct = reduce_at(t, &pos).expect("found position reduces");
    let applicable =
        |d: &Derivation| cls == ContextClass::Open || d.multi_type().is_ok_and(|m| m.is_solvable());
    let (mut tried, mut failures) = (0, Vec::new());
    for d in with_canonical(t, cls, bound)
        .into_iter()
        .filter(|d| applicable(d))
    {
        tried += 1;
        match reduce_one(&d, &pos, cls) {
            Ok(d2)
                if d2.conclusion.ctx == d.conclusion.ctx && d2.conclusion.ty == d.conclusion.ty =>
            {
                let shrink = d.size_mult().checked_sub(d2.size_mult());
                let exact = cls == ContextClass::Open
                    || d.multi_type().is_ok_and(|m| m.is_unitary_solvable());
                let size_ok = if exact {
                    shrink == Some(2)
                } else {
                    shrink.is_some_and(|k| k >= 2)
                };
                if !size_ok || check(&d2).is_err() {
                    failures.push(format!("reduction of {}", d.conclusion));
                }
            }
            _ => failures.push(format!("reduction of {}", d.conclusion)),
        }
    }
    for d in with_canonical(&reduct, cls, bound)
        .into_iter()
        .filter(|d| applicable(d))
    {
        tried += 1;
        match expand_one(&d, t, &pos, cls) {
            Ok(d0)
                if d0.conclusion.ctx == d.conclusion.ctx && d0.conclusion.ty == d.conclusion.ty =>
            {
                if check(&d0).is_err() {
                    failures.push(format!("expansion of {}", d.conclusion));
                }
            }
            _ => failures.push(format!("expansion of {}", d.conclusion)),
        }
    }
    let detail = format!(
        "{} at {}: {tried} derivations, {} failures",
        reduct,
        pos,
        failures.len()
    );
    (tried > 0 && failures.is_empty(), detail)
}

/// Enumerated derivations plus the one read off the strategy's evaluation.
fn with_canonical(t: &Term, cls: ContextClass, bound: usize) -> Vec<Derivation> {
    let mut out = derivable_judgments(t, bound);
    let canonical = match cls {
        ContextClass::Open => derive_open(t, 1000),
        _ => derive_solving(t, 1000),
    };
    if let Ok(r) = canonical {
        if !out.iter().any(|d| d.conclusion == r.derivation.conclusion) {
            out.push(r.derivation);
        }
    }
    out
}

fn reduce_one(
    d: &Derivation,
    pos: &RedexPosition,
    cls: ContextClass,
) -> crate::derivation::DResult<Derivation> {
    match cls {
        ContextClass::Open => subject_reduction_open(d, pos),
        _ => subject_reduction_solving(d, pos, SolvingMode::Solvable),
    }
}

fn expand_one(
    d: &Derivation,
    t: &Term,
    pos: &RedexPosition,
    cls: ContextClass,
) -> crate::derivation::DResult<Derivation> {
    match cls {
        ContextClass::Open => subject_expansion_open(d, t, pos),
        _ => subject_expansion_solving(d, t, pos, SolvingMode::Solvable),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_check() {
        assert!(pr_check(&pr_fixture(PR_T_FIXTURE)).is_ok());
        assert!(pr_check(&pr_fixture(PR_T_PRIME_FIXTURE)).is_ok());
        assert!(kmr_check(&kmr_fixture()).is_ok());
    }

    #[test]
    fn mislabelled_rule_is_reported() {
        let bad = PR_T_PRIME_FIXTURE.replacen("\"=>I\"", "\"=>nuI\"", 1);
        let d = pr_fixture(&bad);
        let errs = pr_check(&d).unwrap_err();
        assert_eq!(errs[0].path, Vec::<usize>::new());
    }

    #[test]
    fn documents_round_trip() {
        let d = pr_fixture(PR_T_FIXTURE);
        assert_eq!(pr_fixture(&write_pr_derivation(&d)), d);
        let d = kmr_fixture();
        let again = read_any_derivation(&write_kmr_derivation(&d), None).unwrap();
        assert!(matches!(again, AnyDerivation::Kmr(k) if k == d));
        assert!(read_any_derivation(KMR_T_FIXTURE, Some(System::Pr)).is_err());
        assert!(crate::syntax::read_derivation(KMR_T_FIXTURE).is_err());
    }

    #[test]
    fn full_report() {
        let r = reproduce_counterexamples(Bounds::default());
        assert!(r.all_ok(), "{r}");
    }
}
