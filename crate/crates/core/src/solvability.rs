//! Operational solvability and a brute-force head-context check.

use std::fmt;

use crate::quantitative::{derive_solving, BoundReport, DeriveError};
use crate::reduction::{evaluate, ContextClass};
use crate::syntax::parse_term;
use crate::term::{Name, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolvabilityStatus {
    Solvable,
    UnsolvableWithinFuel,
    Unknown,
}

impl fmt::Display for SolvabilityStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolvabilityStatus::Solvable => "Solvable",
            SolvabilityStatus::UnsolvableWithinFuel => "Unsolvable-within-fuel",
            SolvabilityStatus::Unknown => "Unknown",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SolvabilityVerdict {
    pub status: SolvabilityStatus,
    /// Present exactly when solvable.
    pub witness: Option<BoundReport>,
    /// Why the verdict is unknown, if it is.
    pub note: Option<String>,
}

/// Solvable iff the solving strategy terminates; divergence is only ever
/// reported relative to `fuel`.
pub fn is_solvable(t: &Term, fuel: usize) -> SolvabilityVerdict {
    match derive_solving(t, fuel) {
        Ok(r) => SolvabilityVerdict {
            status: SolvabilityStatus::Solvable,
            witness: Some(r),
            note: None,
        },
        Err(DeriveError::FuelExhausted { .. }) => SolvabilityVerdict {
            status: SolvabilityStatus::UnsolvableWithinFuel,
            witness: None,
            note: None,
        },
        Err(e) => SolvabilityVerdict {
            status: SolvabilityStatus::Unknown,
            witness: None,
            note: Some(e.to_string()),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeadWitness {
    /// Abstracted names, outermost first.
    pub binders: Vec<Name>,
    pub args: Vec<Term>,
}

impl HeadWitness {
    pub fn plug(&self, t: &Term) -> Term {
        let abs = self
            .binders
            .iter()
            .rev()
            .fold(t.clone(), |acc, x| Term::lam(x, acc));
        Term::apps(abs, self.args.iter().cloned())
    }
}

pub fn identity() -> Term {
    Term::lam("x", Term::var("x"))
}

/// Searches `(λx1..xh. t) u1..uk` with `h <= max_h`, `k <= max_k` and the
/// `ui` from `arg_pool` for one that fully evaluates to exactly `λx.x`.
/// The `xi` range over the free variables of `t` and unused names.
pub fn head_context_search(
    t: &Term,
    max_h: usize,
    max_k: usize,
    arg_pool: &[Term],
    fuel: usize,
) -> Option<HeadWitness> {
    let fv = t.free_vars();
    let mut names: Vec<Name> = fv.iter().cloned().collect();
    let mut k = 0;
    while names.len() < fv.len() + max_h {
        let d = format!("d{k}");
        if !fv.contains(&d) {
            names.push(d);
        }
        k += 1;
    }
    let target = identity();
    for h in 0..=max_h {
        for binders in ordered_selections(&names, h) {
            for k in 0..=max_k {
                for args in tuples(arg_pool, k) {
                    let w = HeadWitness {
                        binders: binders.clone(),
                        args,
                    };
                    let tr = evaluate(&w.plug(t), ContextClass::Full, fuel);
                    if tr.is_normal() && *tr.final_term() == target {
                        return Some(w);
                    }
                }
            }
        }
    }
    None
}

fn ordered_selections(pool: &[Name], h: usize) -> Vec<Vec<Name>> {
    if h == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in ordered_selections(pool, h - 1) {
        for x in pool {
            if !rest.contains(x) {
                let mut v = rest.clone();
                v.push(x.clone());
                out.push(v);
            }
        }
    }
    out
}

fn tuples(pool: &[Term], k: usize) -> Vec<Vec<Term>> {
    (0..k).fold(vec![Vec::new()], |acc, _| {
        acc.iter()
            .flat_map(|prefix| {
                pool.iter().map(move |u| {
                    let mut v = prefix.clone();
                    v.push(u.clone());
                    v
                })
            })
            .collect()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
    Solvable,
    Unsolvable,
}

const CORPUS: &str = include_str!("../fixtures/corpus.txt");

/// Named examples with their known status.
pub fn curated_corpus() -> Vec<(Term, Expected)> {
    parse_corpus(CORPUS).expect("bundled corpus parses")
}

/// Lines `solvable TERM` or `unsolvable TERM`; `#` starts a comment line.
pub fn parse_corpus(text: &str) -> Result<Vec<(Term, Expected)>, String> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (label, term) = line
            .split_once(char::is_whitespace)
            .ok_or(format!("line {}: missing term", n + 1))?;
        let expected = match label {
            "solvable" => Expected::Solvable,
            "unsolvable" => Expected::Unsolvable,
            other => return Err(format!("line {}: unknown label `{other}`", n + 1)),
        };
        let t = parse_term(term).map_err(|e| format!("line {}: {e}", n + 1))?;
        out.push((t, expected));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    const OMEGA: &str = "((\\z. z z) (\\z. z z))";

    #[test]
    fn verdicts() {
        let v = is_solvable(&t(&format!("x (\\x. {OMEGA})")), 1000);
        assert_eq!(v.status, SolvabilityStatus::Solvable);
        assert!(v
            .witness
            .unwrap()
            .derivation
            .multi_type()
            .unwrap()
            .is_precisely_solvable());
        assert_eq!(
            is_solvable(&t(&format!("x {OMEGA}")), 1000).status,
            SolvabilityStatus::UnsolvableWithinFuel
        );
        assert_eq!(
            is_solvable(&t(&format!("\\x. {OMEGA}")), 1000).status,
            SolvabilityStatus::UnsolvableWithinFuel
        );
    }

    #[test]
    fn head_contexts() {
        let pool = [identity()];
        // `λx.x` is already the identity, so no argument is needed.
        let w = head_context_search(&t("x"), 2, 2, &pool, 100).unwrap();
        assert_eq!((w.binders, w.args.len()), (vec!["x".to_string()], 0));
        let applied = HeadWitness {
            binders: vec!["x".into()],
            args: vec![identity()],
        };
        assert_eq!(
            evaluate(&applied.plug(&t("x")), ContextClass::Full, 100).final_term(),
            &identity()
        );
        let w = head_context_search(&identity(), 2, 2, &pool, 100).unwrap();
        assert_eq!((w.binders.len(), w.args.len()), (0, 0));
        assert!(head_context_search(&t(&format!("\\x. {OMEGA}")), 1, 2, &pool, 100).is_none());
    }

    #[test]
    fn corpus_loads() {
        let c = curated_corpus();
        assert_eq!(c.len(), 7);
        assert_eq!(
            c.iter().filter(|(_, e)| *e == Expected::Solvable).count(),
            1
        );
        assert!(parse_corpus("maybe x").is_err());
    }
}
