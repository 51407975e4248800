//! Linear and multi types, type contexts, and the type predicates.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinearType {
    Ground,
    Arrow(MultiType, MultiType),
}

/// A finite multiset of linear types, kept sorted so that equal multisets
/// are structurally equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiType(Vec<LinearType>);

impl LinearType {
    pub fn arrow(lhs: MultiType, rhs: MultiType) -> Self {
        LinearType::Arrow(lhs, rhs)
    }

    /// Constructor count: `X` is 1, `M -o N` is `1 + |M| + |N|`.
    pub fn size(&self) -> usize {
        match self {
            LinearType::Ground => 1,
            LinearType::Arrow(m, n) => 1 + m.size() + n.size(),
        }
    }

    pub fn is_inert(&self) -> bool {
        match self {
            LinearType::Ground => true,
            LinearType::Arrow(m, n) => m.is_ground() && n.is_inert(),
        }
    }

    fn is_solvable(&self) -> bool {
        match self {
            LinearType::Ground => true,
            LinearType::Arrow(_, n) => n.is_solvable(),
        }
    }

    fn is_unitary_solvable(&self) -> bool {
        match self {
            LinearType::Ground => true,
            LinearType::Arrow(_, n) => n.is_unitary_solvable(),
        }
    }

    fn is_inertly_solvable(&self) -> bool {
        match self {
            LinearType::Ground => true,
            LinearType::Arrow(m, n) => m.is_inert() && n.is_inertly_solvable(),
        }
    }
}

impl MultiType {
    pub fn new(mut elems: Vec<LinearType>) -> Self {
        elems.sort();
        MultiType(elems)
    }

    pub fn empty() -> Self {
        MultiType(Vec::new())
    }

    pub fn single(a: LinearType) -> Self {
        MultiType(vec![a])
    }

    /// `n[X]`.
    pub fn ground(n: usize) -> Self {
        MultiType(vec![LinearType::Ground; n])
    }

    pub fn elems(&self) -> &[LinearType] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self, other: &MultiType) -> MultiType {
        let mut v = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            if self.0[i] <= other.0[j] {
                v.push(self.0[i].clone());
                i += 1;
            } else {
                v.push(other.0[j].clone());
                j += 1;
            }
        }
        v.extend_from_slice(&self.0[i..]);
        v.extend_from_slice(&other.0[j..]);
        MultiType(v)
    }

    /// `self - other` if `other` is a sub-multiset.
    pub fn minus(&self, other: &MultiType) -> Option<MultiType> {
        let mut rest = self.0.clone();
        for a in &other.0 {
            let k = rest.iter().position(|b| b == a)?;
            rest.remove(k);
        }
        Some(MultiType(rest))
    }

    /// The single arrow of `[M -o N]`.
    pub fn as_singleton_arrow(&self) -> Option<(&MultiType, &MultiType)> {
        match self.0.as_slice() {
            [LinearType::Arrow(m, n)] => Some((m, n)),
            _ => None,
        }
    }

    /// Bracket plus elements: `0` has size 1, `[X]` has size 2.
    pub fn size(&self) -> usize {
        1 + self.0.iter().map(LinearType::size).sum::<usize>()
    }

    pub fn is_ground(&self) -> bool {
        self.0.iter().all(|a| *a == LinearType::Ground)
    }

    pub fn is_inert(&self) -> bool {
        self.0.iter().all(LinearType::is_inert)
    }

    pub fn is_solvable(&self) -> bool {
        !self.0.is_empty() && self.0.iter().all(LinearType::is_solvable)
    }

    pub fn is_unitary_solvable(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_unitary_solvable()
    }

    pub fn is_inertly_solvable(&self) -> bool {
        !self.0.is_empty() && self.0.iter().all(LinearType::is_inertly_solvable)
    }

    pub fn is_precisely_solvable(&self) -> bool {
        self.is_unitary_solvable() && self.is_inertly_solvable()
    }
}

pub fn mt_sum(m1: &MultiType, m2: &MultiType) -> MultiType {
    m1.sum(m2)
}

impl fmt::Display for LinearType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinearType::Ground => f.write_str("X"),
            LinearType::Arrow(m, n) => write!(f, "{m} -o {n}"),
        }
    }
}

impl fmt::Display for MultiType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        f.write_str("[")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("]")
    }
}

/// Finite map from variables to multi types; absent variables have type `0`
/// and `0` is never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeContext(BTreeMap<String, MultiType>);

impl TypeContext {
    pub fn new() -> Self {
        TypeContext(BTreeMap::new())
    }

    pub fn singleton(x: &str, m: MultiType) -> Self {
        TypeContext::new().add(x, &m)
    }

    pub fn get(&self, x: &str) -> MultiType {
        self.0.get(x).cloned().unwrap_or_default()
    }

    /// `self ⊎ x:m`.
    pub fn add(mut self, x: &str, m: &MultiType) -> Self {
        if m.is_empty() {
            return self;
        }
        let entry = self.0.entry(x.to_string()).or_default();
        *entry = entry.sum(m);
        self
    }

    pub fn sum(&self, other: &TypeContext) -> TypeContext {
        let mut out = self.clone();
        for (x, m) in &other.0 {
            out = out.add(x, m);
        }
        out
    }

    /// Drops the binding of `x`.
    pub fn remove(&self, x: &str) -> TypeContext {
        let mut out = self.clone();
        out.0.remove(x);
        out
    }

    /// `self - other` pointwise, if `other` is included in `self`.
    pub fn minus(&self, other: &TypeContext) -> Option<TypeContext> {
        let mut out = self.clone();
        for (x, m) in &other.0 {
            let rest = out.get(x).minus(m)?;
            out.0.remove(x);
            out = out.add(x, &rest);
        }
        Some(out)
    }

    pub fn rename(&self, from: &str, to: &str) -> TypeContext {
        let mut out = self.clone();
        if let Some(m) = out.0.remove(from) {
            out = out.add(to, &m);
        }
        out
    }

    pub fn domain(&self) -> impl Iterator<Item = &String> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &MultiType)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_inert(&self) -> bool {
        self.0.values().all(MultiType::is_inert)
    }
}

impl fmt::Display for TypeContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, m)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}:{m}")?;
        }
        Ok(())
    }
}

pub fn ctx_sum(g1: &TypeContext, g2: &TypeContext) -> TypeContext {
    g1.sum(g2)
}

pub fn is_inert_conclusion(g: &TypeContext, m: &MultiType) -> bool {
    g.is_inert() && m.is_inert()
}

pub fn is_tight_conclusion(g: &TypeContext, m: &MultiType) -> bool {
    is_inert_conclusion(g, m) && m.is_ground()
}

/// All linear types with at most `max_size` constructors, smallest first.
pub fn enumerate_linear_types(max_size: usize) -> Vec<LinearType> {
    TypeTable::new(max_size).linear_upto(max_size)
}

/// All multi types with at most `max_size` constructors, smallest first.
pub fn enumerate_multi_types(max_size: usize) -> Vec<MultiType> {
    TypeTable::new(max_size).multi_upto(max_size)
}

struct TypeTable {
    /// `linear[s]`: linear types of size exactly `s`.
    linear: Vec<Vec<LinearType>>,
    /// `multi[s]`: multi types of size exactly `s`.
    multi: Vec<Vec<MultiType>>,
}

impl TypeTable {
    fn new(max: usize) -> Self {
        let mut t = TypeTable {
            linear: vec![Vec::new(); max + 1],
            multi: vec![Vec::new(); max + 1],
        };
        for s in 1..=max {
            let mut lin = Vec::new();
            if s == 1 {
                lin.push(LinearType::Ground);
            }
            for left in 1..s {
                let right = s - 1 - left;
                if right == 0 {
                    continue;
                }
                for m in &t.multi[left] {
                    for n in &t.multi[right] {
                        lin.push(LinearType::Arrow(m.clone(), n.clone()));
                    }
                }
            }
            t.linear[s] = lin;
            t.multi[s] = t.multisets_of_weight(s - 1);
        }
        t
    }

    /// Sorted sequences of already known linear types whose sizes sum to `w`.
    fn multisets_of_weight(&self, w: usize) -> Vec<MultiType> {
        let pool: Vec<&LinearType> = (1..=w).flat_map(|s| self.linear[s].iter()).collect();
        let mut pool = pool;
        pool.sort();
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn go(
            pool: &[&LinearType],
            from: usize,
            w: usize,
            cur: &mut Vec<LinearType>,
            out: &mut Vec<MultiType>,
        ) {
            if w == 0 {
                out.push(MultiType(cur.clone()));
                return;
            }
            for i in from..pool.len() {
                let s = pool[i].size();
                if s <= w {
                    cur.push(pool[i].clone());
                    go(pool, i, w - s, cur, out);
                    cur.pop();
                }
            }
        }
        go(&pool, 0, w, &mut cur, &mut out);
        out
    }

    fn linear_upto(&self, max: usize) -> Vec<LinearType> {
        (1..=max)
            .flat_map(|s| self.linear[s].iter().cloned())
            .collect()
    }

    fn multi_upto(&self, max: usize) -> Vec<MultiType> {
        (1..=max)
            .flat_map(|s| self.multi[s].iter().cloned())
            .collect()
    }
}
