//! Exhaustive enumeration of terms by constructor count.

use std::collections::HashMap;
use std::rc::Rc;

use crate::term::{Hint, Term};

/// Canonical binder hint for depth `d`: `a`, `b`, ..., `z`, `a1`, ...
fn binder_hint(d: usize) -> Hint {
    let letter = (b'a' + (d % 26) as u8) as char;
    if d < 26 {
        Hint(letter.to_string())
    } else {
        Hint(format!("{letter}{}", d / 26))
    }
}

struct Table {
    pool: Vec<String>,
    memo: HashMap<(usize, usize), Rc<Vec<Term>>>,
}

impl Table {
    /// Terms with exactly `size` constructors whose loose indices are below `depth`.
    fn exact(&mut self, size: usize, depth: usize) -> Rc<Vec<Term>> {
        if let Some(v) = self.memo.get(&(size, depth)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if size == 1 {
            out.extend(self.pool.iter().map(|x| Term::Var(x.clone())));
            out.extend((0..depth).map(Term::Bound));
        }
        if size >= 2 {
            for b in self.exact(size - 1, depth + 1).iter() {
                out.push(Term::Abs(binder_hint(depth), Box::new(b.clone())));
            }
        }
        if size >= 3 {
            for left in 1..size - 1 {
                let right = size - 1 - left;
                let fs = self.exact(left, depth);
                let args = self.exact(right, depth);
                for f in fs.iter() {
                    for a in args.iter() {
                        out.push(Term::app(f.clone(), a.clone()));
                    }
                }
            }
            for left in 1..size - 1 {
                let right = size - 1 - left;
                let bodies = self.exact(left, depth + 1);
                let args = self.exact(right, depth);
                for b in bodies.iter() {
                    for a in args.iter() {
                        out.push(Term::ESub(
                            Box::new(b.clone()),
                            binder_hint(depth),
                            Box::new(a.clone()),
                        ));
                    }
                }
            }
        }
        let out = Rc::new(out);
        self.memo.insert((size, depth), out.clone());
        out
    }
}

/// Lazily yields every closed-binder term with at most `max_nodes`
/// constructors and free variables from `pool`, smallest first.
///
/// Within a size, variants come in the order Var, Abs, App, ESub, and
/// children vary left to right (the left child grows first).
pub struct TermEnumerator {
    table: Table,
    max_nodes: usize,
    size: usize,
    current: Rc<Vec<Term>>,
    index: usize,
}

impl Iterator for TermEnumerator {
    type Item = Term;

    fn next(&mut self) -> Option<Term> {
        loop {
            if let Some(t) = self.current.get(self.index) {
                self.index += 1;
                return Some(t.clone());
            }
            if self.size >= self.max_nodes {
                return None;
            }
            self.size += 1;
            self.current = self.table.exact(self.size, 0);
            self.index = 0;
        }
    }
}

pub fn enumerate_terms(max_nodes: usize, free_pool: &[&str]) -> TermEnumerator {
    TermEnumerator {
        table: Table {
            pool: free_pool.iter().map(|s| s.to_string()).collect(),
            memo: HashMap::new(),
        },
        max_nodes,
        size: 0,
        current: Rc::new(Vec::new()),
        index: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn smallest_sizes() {
        let one: Vec<_> = enumerate_terms(1, &["x"]).collect();
        assert_eq!(one, vec![Term::var("x")]);
        let two: Vec<_> = enumerate_terms(2, &[]).collect();
        assert_eq!(two, vec![Term::lam("a", Term::var("a"))]);
        let three: Vec<_> = enumerate_terms(3, &["x"]).collect();
        assert!(three.contains(&Term::app(Term::var("x"), Term::var("x"))));
    }

    #[test]
    fn no_duplicates_and_all_closed() {
        let all: Vec<_> = enumerate_terms(6, &["x", "y"]).collect();
        let set: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        assert!(all
            .iter()
            .all(|t| t.is_locally_closed() && t.node_count() <= 6));
    }

    #[test]
    fn sizes_are_non_decreasing() {
        let sizes: Vec<_> = enumerate_terms(5, &["x"]).map(|t| t.node_count()).collect();
        assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
    }
}
