//! Bounded enumeration of derivable judgments.
//!
//! Every type in a judgment, context entries included, is kept within a size
//! bound, so the search is finite. It under-approximates derivability: a
//! judgment missing from the result may still be derivable with bigger
//! intermediate types.

use std::collections::{BTreeSet, HashMap};

use crate::derivation::{Derivation, Judgment};
use crate::term::{fresh_name, Name, Term};
use crate::types::{enumerate_linear_types, LinearType, MultiType};

/// One witness derivation per derivable multi judgment for `t`, in a
/// deterministic order.
pub fn derivable_judgments(t: &Term, max_type_size: usize) -> Vec<Derivation> {
    let mut s = Search {
        bound: max_type_size,
        taken: t.free_vars(),
        linear_types: Vec::new(),
    };
    s.linear_types = enumerate_linear_types(max_type_size.saturating_sub(1));
    let mut out: Vec<Derivation> = s.multi(t).into_values().collect();
    out.sort_by_cached_key(|d| {
        (
            d.multi_type().map(|m| m.size()).unwrap_or(0),
            d.conclusion.to_string(),
        )
    });
    out
}

/// The conclusion types of closed derivations for a closed term.
pub fn closed_types(t: &Term, max_type_size: usize) -> Vec<MultiType> {
    derivable_judgments(t, max_type_size)
        .into_iter()
        .filter(|d| d.ctx().is_empty())
        .filter_map(|d| d.multi_type().ok().cloned())
        .collect()
}

struct Search {
    bound: usize,
    taken: BTreeSet<Name>,
    linear_types: Vec<LinearType>,
}

type Table = HashMap<Judgment, Derivation>;

impl Search {
    fn fresh(&mut self, base: &str) -> Name {
        let y = fresh_name(base, |n| self.taken.contains(n));
        self.taken.insert(y.clone());
        y
    }

    fn fits(&self, d: &Derivation) -> bool {
        d.ctx().iter().all(|(_, m)| m.size() <= self.bound)
            && match d.conclusion.ty.as_multi() {
                Some(m) => m.size() <= self.bound,
                None => true,
            }
    }

    fn insert(&self, table: &mut Table, d: Derivation) {
        if self.fits(&d) {
            table.entry(d.conclusion.clone()).or_insert(d);
        }
    }

    /// Linear judgments for a value; each type leaves room for the bracket.
    fn linear(&mut self, v: &Term) -> Vec<Derivation> {
        let mut out = Vec::new();
        match v {
            Term::Var(x) => {
                for a in &self.linear_types {
                    out.push(Derivation::ax(x, a.clone()));
                }
            }
            Term::Abs(h, body) => {
                let y = self.fresh(h.as_str());
                for d in self.multi(&body.open(&y)).into_values() {
                    let Ok(lam) = Derivation::lam(&y, h, d) else {
                        continue;
                    };
                    let fits = lam
                        .conclusion
                        .ty
                        .as_linear()
                        .is_some_and(|a| a.size() < self.bound);
                    if fits && lam.ctx().iter().all(|(_, m)| m.size() <= self.bound) {
                        out.push(lam);
                    }
                }
            }
            _ => {}
        }
        out.sort_by_cached_key(|d| d.conclusion.to_string());
        out
    }

    fn multi(&mut self, t: &Term) -> Table {
        let mut table = Table::new();
        match t {
            Term::Var(_) | Term::Abs(..) => {
                let lin = self.linear(t);
                let mut chosen = Vec::new();
                self.many_combos(t, &lin, 0, 1, &mut chosen, &mut table);
            }
            Term::App(f, a) => {
                let fs = self.multi(f);
                let by_type = index_by_type(self.multi(a));
                for df in fs.into_values() {
                    let Some((m, _)) = df.multi_type().ok().and_then(|m| m.as_singleton_arrow())
                    else {
                        continue;
                    };
                    for da in by_type.get(m).into_iter().flatten() {
                        if let Ok(d) = Derivation::app(df.clone(), da.clone()) {
                            self.insert(&mut table, d);
                        }
                    }
                }
            }
            Term::ESub(b, h, a) => {
                let y = self.fresh(h.as_str());
                let bs = self.multi(&b.open(&y));
                let by_type = index_by_type(self.multi(a));
                for db in bs.into_values() {
                    let m = db.ctx().get(&y);
                    for da in by_type.get(&m).into_iter().flatten() {
                        if let Ok(d) = Derivation::es(db.clone(), &y, h, da.clone()) {
                            self.insert(&mut table, d);
                        }
                    }
                }
            }
            Term::Bound(_) => {}
        }
        table
    }

    /// Multisets of linear judgments, as non-decreasing index sequences.
    fn many_combos(
        &self,
        v: &Term,
        lin: &[Derivation],
        from: usize,
        size: usize,
        chosen: &mut Vec<Derivation>,
        table: &mut Table,
    ) {
        if let Ok(d) = Derivation::many(v.clone(), chosen.clone()) {
            if !self.fits(&d) {
                return;
            }
            self.insert(table, d);
        }
        for i in from..lin.len() {
            let s = lin[i]
                .conclusion
                .ty
                .as_linear()
                .map_or(usize::MAX, LinearType::size);
            if size + s <= self.bound {
                chosen.push(lin[i].clone());
                self.many_combos(v, lin, i, size + s, chosen, table);
                chosen.pop();
            }
        }
    }
}

fn index_by_type(table: Table) -> HashMap<MultiType, Vec<Derivation>> {
    let mut out: HashMap<MultiType, Vec<Derivation>> = HashMap::new();
    let mut all: Vec<Derivation> = table.into_values().collect();
    all.sort_by_cached_key(|d| d.conclusion.to_string());
    for d in all {
        if let Ok(m) = d.multi_type() {
            out.entry(m.clone()).or_default().push(d);
        }
    }
    out
}
