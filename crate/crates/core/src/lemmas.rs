//! Derivation transforms for values: splitting, merging, substitution and
//! its inverse.

use std::collections::BTreeSet;

use crate::derivation::{open_premise, DResult, Derivation, DerivationError, Rule};
use crate::term::{Name, Term};
use crate::types::MultiType;

fn expect_many(d: &Derivation) -> DResult<()> {
    if d.rule == Rule::Many && d.term().is_value() {
        Ok(())
    } else {
        Err(DerivationError::ExpectedMany(d.term().to_string()))
    }
}

/// Splits a derivation `Γ |- v : m1 ⊎ m2` into one for `m1` and one for `m2`.
///
/// Premises are visited in type order and each goes to the first part that
/// still needs its type.
pub fn split_value(
    d: &Derivation,
    m1: &MultiType,
    m2: &MultiType,
) -> DResult<(Derivation, Derivation)> {
    expect_many(d)?;
    let total = d.multi_type()?;
    if m1.sum(m2) != *total {
        return Err(DerivationError::BadSplit {
            total: total.to_string(),
            left: m1.to_string(),
            right: m2.to_string(),
        });
    }
    let mut order: Vec<usize> = (0..d.children.len()).collect();
    order.sort_by(|&i, &j| {
        d.children[i]
            .conclusion
            .ty
            .as_linear()
            .cmp(&d.children[j].conclusion.ty.as_linear())
    });
    let mut wanted: Vec<_> = m1.elems().to_vec();
    let mut first = vec![false; d.children.len()];
    for i in order {
        let a = d.children[i]
            .conclusion
            .ty
            .as_linear()
            .expect("many premises are linear");
        if let Some(k) = wanted.iter().position(|b| b == a) {
            wanted.remove(k);
            first[i] = true;
        }
    }
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for (i, c) in d.children.iter().enumerate() {
        if first[i] {
            left.push(c.clone());
        } else {
            right.push(c.clone());
        }
    }
    let v = d.term().clone();
    Ok((
        Derivation::many(v.clone(), left)?,
        Derivation::many(v, right)?,
    ))
}

/// Splits along an arbitrary decomposition of the type.
pub fn split_many(d: &Derivation, parts: &[MultiType]) -> DResult<Vec<Derivation>> {
    let mut out = Vec::with_capacity(parts.len());
    let mut rest = d.clone();
    for (k, m) in parts.iter().enumerate() {
        if k + 1 == parts.len() {
            if rest.multi_type()? != m {
                return Err(DerivationError::BadSplit {
                    total: d.multi_type()?.to_string(),
                    left: m.to_string(),
                    right: rest.multi_type()?.to_string(),
                });
            }
            out.push(rest);
            return Ok(out);
        }
        let remaining = rest
            .multi_type()?
            .minus(m)
            .ok_or_else(|| DerivationError::BadSplit {
                total: d.multi_type().map(|t| t.to_string()).unwrap_or_default(),
                left: m.to_string(),
                right: "the remainder".into(),
            })?;
        let (a, b) = split_value(&rest, m, &remaining)?;
        out.push(a);
        rest = b;
    }
    if rest.multi_type()?.is_empty() {
        Ok(out)
    } else {
        Err(DerivationError::BadSplit {
            total: d.multi_type()?.to_string(),
            left: "nothing".into(),
            right: "0".into(),
        })
    }
}

pub fn merge_value(d1: &Derivation, d2: &Derivation) -> DResult<Derivation> {
    expect_many(d1)?;
    expect_many(d2)?;
    if d1.term() != d2.term() {
        return Err(DerivationError::SubjectMismatch {
            expected: d1.term().to_string(),
            found: d2.term().to_string(),
        });
    }
    let children = d1.children.iter().chain(&d2.children).cloned().collect();
    Derivation::many(d1.term().clone(), children)
}

/// The `many` rule with no premises: `|- v : 0`.
pub fn empty_value(v: &Term) -> DResult<Derivation> {
    Derivation::many(v.clone(), Vec::new())
}

fn binder_parts(d: &Derivation) -> DResult<(&Derivation, &Derivation)> {
    match d.children.as_slice() {
        [l, r] => Ok((l, r)),
        _ => Err(DerivationError::Shape(format!(
            "{:?} node needs two premises",
            d.rule
        ))),
    }
}

/// From `phi ▷ Γ, x:N |- t : M` and `psi ▷ Δ |- v : N`, builds a derivation
/// of `Γ ⊎ Δ |- t{x<-v} : M`.
pub fn substitute_derivation(phi: &Derivation, x: &str, psi: &Derivation) -> DResult<Derivation> {
    expect_many(psi)?;
    let n = phi.ctx().get(x);
    if *psi.multi_type()? != n {
        return Err(DerivationError::TypeMismatch {
            expected: n.to_string(),
            found: psi.multi_type()?.to_string(),
        });
    }
    let mut avoid: BTreeSet<Name> = psi.term().free_vars();
    avoid.insert(x.to_string());
    substitute_rec(phi, x, psi, &avoid)
}

fn substitute_rec(
    phi: &Derivation,
    x: &str,
    psi: &Derivation,
    avoid: &BTreeSet<Name>,
) -> DResult<Derivation> {
    let v = psi.term();
    match (phi.rule, phi.term()) {
        (Rule::Many, Term::Var(z)) if z == x => Ok(psi.clone()),
        (Rule::Many, Term::Var(_)) => {
            if !psi.multi_type()?.is_empty() {
                return Err(DerivationError::TypeMismatch {
                    expected: "0".into(),
                    found: psi.multi_type()?.to_string(),
                });
            }
            Ok(phi.clone())
        }
        (Rule::Many, Term::Abs(h, body)) => {
            let parts: Vec<MultiType> = phi.children.iter().map(|c| c.ctx().get(x)).collect();
            let psis = split_many(psi, &parts)?;
            let mut lams = Vec::with_capacity(parts.len());
            for (lam, psi_i) in phi.children.iter().zip(psis) {
                let premise = lam
                    .children
                    .first()
                    .ok_or_else(|| DerivationError::Shape("lam without premise".into()))?;
                let (y, premise) = open_premise(body, h, premise, avoid)?;
                let sub = substitute_rec(&premise, x, &psi_i, avoid)?;
                lams.push(Derivation::lam(&y, h, sub)?);
            }
            Derivation::many(phi.term().meta_subst(x, v), lams)
        }
        (Rule::App, _) => {
            let (l, r) = binder_parts(phi)?;
            let psis = split_many(psi, &[l.ctx().get(x), r.ctx().get(x)])?;
            Derivation::app(
                substitute_rec(l, x, &psis[0], avoid)?,
                substitute_rec(r, x, &psis[1], avoid)?,
            )
        }
        (Rule::Es, Term::ESub(body, h, _)) => {
            let (l, r) = binder_parts(phi)?;
            let (y, l) = open_premise(body, h, l, avoid)?;
            let psis = split_many(psi, &[l.ctx().get(x), r.ctx().get(x)])?;
            Derivation::es(
                substitute_rec(&l, x, &psis[0], avoid)?,
                &y,
                h,
                substitute_rec(r, x, &psis[1], avoid)?,
            )
        }
        _ => Err(DerivationError::Shape(format!(
            "cannot substitute into a {:?} node over `{}`",
            phi.rule,
            phi.term()
        ))),
    }
}

/// Inverse of [`substitute_derivation`]: splits `phi ▷ Γ |- t{x<-v} : M`
/// into `Δ, x:N |- t : M` and `Σ |- v : N` with `Γ = Δ ⊎ Σ`.
pub fn remove_derivation(
    phi: &Derivation,
    t: &Term,
    x: &str,
    v: &Term,
) -> DResult<(Derivation, Derivation)> {
    if !v.is_value() {
        return Err(DerivationError::NotAValue(v.to_string()));
    }
    let expected = t.meta_subst(x, v);
    if *phi.term() != expected {
        return Err(DerivationError::SubjectMismatch {
            expected: expected.to_string(),
            found: phi.term().to_string(),
        });
    }
    let mut avoid: BTreeSet<Name> = v.free_vars();
    avoid.extend(t.free_vars());
    avoid.insert(x.to_string());
    remove_rec(phi, t, x, v, &avoid)
}

fn remove_rec(
    phi: &Derivation,
    t: &Term,
    x: &str,
    v: &Term,
    avoid: &BTreeSet<Name>,
) -> DResult<(Derivation, Derivation)> {
    match t {
        Term::Var(z) if z == x => {
            expect_many(phi)?;
            Ok((Derivation::var_many(x, phi.multi_type()?), phi.clone()))
        }
        Term::Var(_) => Ok((phi.clone(), empty_value(v)?)),
        Term::Abs(h, body) => {
            expect_many(phi)?;
            let Term::Abs(_, sub_body) = phi.term() else {
                return Err(DerivationError::Shape("expected an abstraction".into()));
            };
            let mut lams = Vec::with_capacity(phi.children.len());
            let mut theta = empty_value(v)?;
            for lam in &phi.children {
                let premise = lam
                    .children
                    .first()
                    .ok_or_else(|| DerivationError::Shape("lam without premise".into()))?;
                let (y, premise) = open_premise(sub_body, h, premise, avoid)?;
                let (psi_i, theta_i) = remove_rec(&premise, &body.open(&y), x, v, avoid)?;
                lams.push(Derivation::lam(&y, h, psi_i)?);
                theta = merge_value(&theta, &theta_i)?;
            }
            Ok((Derivation::many(t.clone(), lams)?, theta))
        }
        Term::App(f, a) => {
            if phi.rule != Rule::App {
                return Err(DerivationError::Shape("expected an app node".into()));
            }
            let (l, r) = binder_parts(phi)?;
            let (psi_l, th_l) = remove_rec(l, f, x, v, avoid)?;
            let (psi_r, th_r) = remove_rec(r, a, x, v, avoid)?;
            Ok((Derivation::app(psi_l, psi_r)?, merge_value(&th_l, &th_r)?))
        }
        Term::ESub(body, h, a) => {
            let (Rule::Es, Term::ESub(sub_body, _, _)) = (phi.rule, phi.term()) else {
                return Err(DerivationError::Shape("expected an es node".into()));
            };
            let (l, r) = binder_parts(phi)?;
            let (y, l) = open_premise(sub_body, h, l, avoid)?;
            let (psi_l, th_l) = remove_rec(&l, &body.open(&y), x, v, avoid)?;
            let (psi_r, th_r) = remove_rec(r, a, x, v, avoid)?;
            Ok((
                Derivation::es(psi_l, &y, h, psi_r)?,
                merge_value(&th_l, &th_r)?,
            ))
        }
        Term::Bound(_) => Err(DerivationError::Shape("dangling index".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::check;
    use crate::syntax::{parse_term, parse_type};
    use crate::term::Hint;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }
    fn m(s: &str) -> MultiType {
        parse_type(s).unwrap()
    }
    /// `|- \z. z : [0 -o 0]`.
    fn id_arrow() -> Derivation {
        let lam = Derivation::lam("z", &Hint::new("z"), empty_value(&t("z")).unwrap()).unwrap();
        Derivation::many(t("\\z. z"), vec![lam]).unwrap()
    }

    #[test]
    fn split_cases() {
        let e = empty_value(&t("\\z. z")).unwrap();
        let (a, b) = split_value(&e, &m("0"), &m("0")).unwrap();
        assert!(a.children.is_empty() && b.children.is_empty());
        let xx = Derivation::var_many("x", &m("[X, X]"));
        let (a, b) = split_value(&xx, &m("[X]"), &m("[X]")).unwrap();
        assert_eq!(a.ctx().get("x"), m("[X]"));
        assert_eq!(b.ctx().get("x"), m("[X]"));
        assert!(split_value(&xx, &m("[X, X, X]"), &m("0")).is_err());
    }

    #[test]
    fn merge_cases() {
        let e = empty_value(&t("\\z. z")).unwrap();
        assert_eq!(merge_value(&e, &e).unwrap(), e);
        let x = Derivation::var_many("x", &m("[X]"));
        let xx = merge_value(&x, &x).unwrap();
        assert_eq!(xx.ctx().get("x"), m("[X, X]"));
        assert_eq!(xx.multi_type().unwrap(), &m("[X, X]"));
        assert!(merge_value(&x, &Derivation::var_many("y", &m("[X]"))).is_err());
    }

    #[test]
    fn substitute_variable_cases() {
        let psi = empty_value(&t("\\z. z")).unwrap();
        let phi = empty_value(&t("y")).unwrap();
        assert_eq!(substitute_derivation(&phi, "x", &psi).unwrap(), phi);

        let psi = id_arrow();
        let phi = Derivation::var_many("x", &m("[0 -o 0]"));
        assert_eq!(substitute_derivation(&phi, "x", &psi).unwrap(), psi);
    }

    #[test]
    fn substitute_into_application() {
        // x:[[0 -o 0] -o [0 -o 0], 0 -o 0] |- x x : [0 -o 0]
        let arrow = m("[0 -o 0]");
        let big = m("[[0 -o 0] -o [0 -o 0]]");
        let phi = Derivation::app(
            Derivation::var_many("x", &big),
            Derivation::var_many("x", &arrow),
        )
        .unwrap();
        assert!(check(&phi).is_ok());
        let outer =
            Derivation::lam("z", &Hint::new("z"), Derivation::var_many("z", &arrow)).unwrap();
        let psi = merge_value(
            &Derivation::many(t("\\z. z"), vec![outer]).unwrap(),
            &id_arrow(),
        )
        .unwrap();
        let theta = substitute_derivation(&phi, "x", &psi).unwrap();
        assert!(check(&theta).is_ok(), "{:?}", check(&theta));
        assert_eq!(theta.term(), &t("(\\z. z) (\\z. z)"));
        assert_eq!(theta.size_mult(), phi.size_mult() + psi.size_mult());
        assert!(theta.size_general() <= phi.size_general() + psi.size_general());

        let (psi2, th2) = remove_derivation(&theta, &t("x x"), "x", &t("\\z. z")).unwrap();
        assert!(check(&psi2).is_ok() && check(&th2).is_ok());
        assert_eq!(psi2.conclusion, phi.conclusion);
        assert_eq!(psi2.size_mult() + th2.size_mult(), theta.size_mult());
    }

    #[test]
    fn remove_variable_cases() {
        let phi = Derivation::var_many("z", &m("[X]"));
        let (psi, theta) = remove_derivation(&phi, &t("z"), "x", &t("\\y. y")).unwrap();
        assert_eq!(psi, phi);
        assert_eq!(theta, empty_value(&t("\\y. y")).unwrap());
        let phi = id_arrow();
        let (psi, theta) = remove_derivation(&phi, &t("x"), "x", &t("\\z. z")).unwrap();
        assert_eq!(psi, Derivation::var_many("x", &m("[0 -o 0]")));
        assert_eq!(theta, phi);
    }

    #[test]
    fn substitution_avoids_capture_under_binders() {
        // x:[X] |- \y. x : [0 -o [X]], substituting y for x.
        let lam =
            Derivation::lam("y", &Hint::new("y"), Derivation::var_many("x", &m("[X]"))).unwrap();
        let phi = Derivation::many(t("\\y. x"), vec![lam]).unwrap();
        let psi = Derivation::var_many("y", &m("[X]"));
        let theta = substitute_derivation(&phi, "x", &psi).unwrap();
        assert!(check(&theta).is_ok(), "{:?}", check(&theta));
        assert_eq!(theta.term(), &t("\\w. y"));
        assert_eq!(theta.ctx().get("y"), m("[X]"));
    }
}
