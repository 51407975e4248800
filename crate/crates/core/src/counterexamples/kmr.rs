//! Non-idempotent types for call-by-value with a distinguished empty type:
//!
//! ```text
//! α ::= a | [] | M => α        M ::= [α1, .., αn]   (αi != [])
//! ```
//!
//! The type `[]` and the empty multiset are the same thing, so a judgment
//! type is either a type or a non-empty multiset.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::derivation::opened_name;
use crate::syntax::{parse_term_with, print_term, ParseError, SourceSpan};
use crate::term::{fresh_name, Hint, Name, Term};

use super::{Node, Violation};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KmrType {
    Const(String),
    Empty,
    Arrow(KmrMulti, Box<KmrType>),
}

/// Sorted, never containing [`KmrType::Empty`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KmrMulti(Vec<KmrType>);

impl KmrMulti {
    pub fn new(mut elems: Vec<KmrType>) -> Option<KmrMulti> {
        if elems.contains(&KmrType::Empty) {
            return None;
        }
        elems.sort();
        Some(KmrMulti(elems))
    }

    pub fn elems(&self) -> &[KmrType] {
        &self.0
    }

    pub fn sum(&self, other: &KmrMulti) -> KmrMulti {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        v.sort();
        KmrMulti(v)
    }

    /// Multiset inclusion.
    pub fn within(&self, other: &KmrMulti) -> bool {
        let mut rest = other.0.clone();
        self.0
            .iter()
            .all(|a| match rest.iter().position(|b| b == a) {
                Some(i) => {
                    rest.remove(i);
                    true
                }
                None => false,
            })
    }

    pub fn size(&self) -> usize {
        1 + self.0.iter().map(KmrType::size).sum::<usize>()
    }
}

impl KmrType {
    pub fn konst(name: &str) -> KmrType {
        KmrType::Const(name.into())
    }

    pub fn size(&self) -> usize {
        match self {
            KmrType::Const(_) | KmrType::Empty => 1,
            KmrType::Arrow(m, a) => 1 + m.size() + a.size(),
        }
    }

    fn collect(&self, types: &mut BTreeSet<KmrType>, consts: &mut BTreeSet<String>) {
        if !types.insert(self.clone()) {
            return;
        }
        match self {
            KmrType::Const(c) => {
                consts.insert(c.clone());
            }
            KmrType::Empty => {}
            KmrType::Arrow(m, a) => {
                for x in m.elems() {
                    x.collect(types, consts);
                }
                a.collect(types, consts);
            }
        }
    }
}

impl fmt::Display for KmrMulti {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", items.join(", "))
    }
}

impl fmt::Display for KmrType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KmrType::Const(c) => f.write_str(c),
            KmrType::Empty => f.write_str("[]"),
            KmrType::Arrow(m, a) => write!(f, "{m} => {a}"),
        }
    }
}

/// What a judgment assigns: a type, or a non-empty multiset of types.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KmrJType {
    Type(KmrType),
    Multi(KmrMulti),
}

impl KmrJType {
    pub fn multi(m: KmrMulti) -> KmrJType {
        if m.0.is_empty() {
            KmrJType::Type(KmrType::Empty)
        } else {
            KmrJType::Multi(m)
        }
    }
}

impl fmt::Display for KmrJType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KmrJType::Type(a) => a.fmt(f),
            KmrJType::Multi(m) => m.fmt(f),
        }
    }
}

pub type KmrEnv = BTreeMap<Name, KmrMulti>;

pub fn fmt_env(env: &KmrEnv) -> String {
    let items: Vec<String> = env.iter().map(|(x, m)| format!("{x}:{m}")).collect();
    items.join(", ")
}

fn env_sum(a: &KmrEnv, b: &KmrEnv) -> KmrEnv {
    let mut out = a.clone();
    for (x, m) in b {
        let e = out.entry(x.clone()).or_default();
        *e = e.sum(m);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KmrRule {
    Val0,
    Var,
    App,
    ValMany,
    Lam,
}

impl KmrRule {
    pub fn tag(self) -> &'static str {
        match self {
            KmrRule::Val0 => "val0",
            KmrRule::Var => "var",
            KmrRule::App => "app",
            KmrRule::ValMany => "val>0",
            KmrRule::Lam => "lam",
        }
    }

    fn from_tag(s: &str) -> Option<KmrRule> {
        [
            KmrRule::Val0,
            KmrRule::Var,
            KmrRule::App,
            KmrRule::ValMany,
            KmrRule::Lam,
        ]
        .into_iter()
        .find(|r| r.tag() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KmrDerivation {
    pub rule: KmrRule,
    pub env: KmrEnv,
    pub term: Term,
    pub ty: KmrJType,
    pub children: Vec<KmrDerivation>,
}

impl KmrDerivation {
    pub fn judgment(&self) -> String {
        let s = format!(
            "{} |- {} : {}",
            fmt_env(&self.env),
            print_term(&self.term),
            self.ty
        );
        s.trim_start().to_string()
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(KmrDerivation::node_count)
            .sum::<usize>()
    }
}

/// `env |- term : ty`, the goal of a search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KmrJudgment {
    pub env: KmrEnv,
    pub term: Term,
    pub ty: KmrJType,
}

impl fmt::Display for KmrJudgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = format!(
            "{} |- {} : {}",
            fmt_env(&self.env),
            print_term(&self.term),
            self.ty
        );
        f.write_str(s.trim_start())
    }
}

fn premise_binder(body: &Term, hint: &Hint, child: &KmrDerivation) -> Option<Name> {
    match opened_name(body, &child.term)? {
        Some(y) => Some(y),
        None => Some(fresh_name(hint.as_str(), |n| {
            child.env.contains_key(n) || child.term.has_free(n)
        })),
    }
}

pub fn kmr_check(d: &KmrDerivation) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    check_rec(d, &mut Vec::new(), &mut out);
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn check_rec(d: &KmrDerivation, path: &mut Vec<usize>, out: &mut Vec<Violation>) {
    if let Err(message) = node_ok(d) {
        out.push(Violation {
            path: path.clone(),
            message,
        });
    }
    if d.env.values().any(|m| m.0.is_empty()) {
        out.push(Violation {
            path: path.clone(),
            message: "environment entry with the empty multiset".into(),
        });
    }
    for (i, c) in d.children.iter().enumerate() {
        path.push(i);
        check_rec(c, path, out);
        path.pop();
    }
}

fn node_ok(d: &KmrDerivation) -> Result<(), String> {
    let kids = &d.children;
    match d.rule {
        KmrRule::Val0 => {
            if !d.term.is_value()
                || !kids.is_empty()
                || !d.env.is_empty()
                || d.ty != KmrJType::Type(KmrType::Empty)
            {
                return Err("val0 types a value with [] in the empty environment".into());
            }
            Ok(())
        }
        KmrRule::Var => {
            let Term::Var(x) = &d.term else {
                return Err("var over a non-variable".into());
            };
            let KmrJType::Type(a) = &d.ty else {
                return Err("var concludes a multiset".into());
            };
            if *a == KmrType::Empty || !kids.is_empty() {
                return Err("var needs a non-empty type and no premises".into());
            }
            if d.env != KmrEnv::from([(x.clone(), KmrMulti(vec![a.clone()]))]) {
                return Err(format!("var needs exactly {x}:[{a}]"));
            }
            Ok(())
        }
        KmrRule::App => {
            let Term::App(f, u) = &d.term else {
                return Err("app over a non-application".into());
            };
            let [fun, arg] = kids.as_slice() else {
                return Err("app needs two premises".into());
            };
            if fun.term != **f || arg.term != **u {
                return Err("premise subjects do not match the application".into());
            }
            let KmrJType::Type(KmrType::Arrow(m, a)) = &fun.ty else {
                return Err("function premise is not an arrow".into());
            };
            if arg.ty != KmrJType::multi(m.clone()) {
                return Err(format!("argument premise should have {m}"));
            }
            if d.ty != KmrJType::Type((**a).clone()) || d.env != env_sum(&fun.env, &arg.env) {
                return Err("conclusion does not combine the premises".into());
            }
            Ok(())
        }
        KmrRule::ValMany => {
            let mut elems = Vec::new();
            for c in kids {
                match &c.ty {
                    KmrJType::Type(a) if *a != KmrType::Empty && c.term == d.term => {
                        elems.push(a.clone())
                    }
                    _ => return Err("premises must type the same term with non-empty types".into()),
                }
            }
            if kids.is_empty() {
                return Err("val>0 needs at least one premise".into());
            }
            let env = kids
                .iter()
                .fold(KmrEnv::new(), |acc, c| env_sum(&acc, &c.env));
            let m = KmrMulti::new(elems).expect("checked non-empty");
            if d.ty != KmrJType::Multi(m) || d.env != env {
                return Err("conclusion does not collect the premises".into());
            }
            Ok(())
        }
        KmrRule::Lam => {
            let Term::Abs(h, body) = &d.term else {
                return Err("lam over a non-abstraction".into());
            };
            let [child] = kids.as_slice() else {
                return Err("lam needs one premise".into());
            };
            let KmrJType::Type(a) = &child.ty else {
                return Err("body premise concludes a multiset".into());
            };
            let y =
                premise_binder(body, h, child).ok_or("premise does not open the abstraction")?;
            let mut env = child.env.clone();
            let m = env.remove(&y).unwrap_or_default();
            let expected = KmrJType::Type(KmrType::Arrow(m, Box::new(a.clone())));
            if d.env != env || d.ty != expected {
                return Err(format!("expected {} |- .. : {expected}", fmt_env(&env)));
            }
            Ok(())
        }
    }
}

struct TypeParser<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> TypeParser<'a> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError::new(SourceSpan::new(self.pos, self.pos + 1), msg.to_string())
    }

    fn ws(&mut self) {
        while self.s[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.s[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.s[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.ws();
        let rest = &self.s[self.pos..];
        let len = rest
            .char_indices()
            .find(|&(i, c)| !(c.is_alphanumeric() || c == '_' || (i > 0 && c == '\'')))
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 || !rest.starts_with(char::is_alphabetic) {
            return None;
        }
        self.pos += len;
        Some(rest[..len].to_string())
    }

    /// A type or a multiset, whichever the input spells.
    fn jtype(&mut self) -> Result<KmrJType, ParseError> {
        if self.eat("(") {
            let t = self.ty()?;
            return if self.eat(")") {
                Ok(KmrJType::Type(t))
            } else {
                Err(self.err("expected `)`"))
            };
        }
        if let Some(c) = self.ident() {
            return Ok(KmrJType::Type(KmrType::Const(c)));
        }
        let m = self.multi()?;
        if self.eat("=>") {
            return Ok(KmrJType::Type(KmrType::Arrow(m, Box::new(self.ty()?))));
        }
        Ok(KmrJType::multi(m))
    }

    fn ty(&mut self) -> Result<KmrType, ParseError> {
        let at = self.pos;
        match self.jtype()? {
            KmrJType::Type(t) => Ok(t),
            KmrJType::Multi(_) => {
                self.pos = at;
                Err(self.err("expected a type, found a non-empty multiset"))
            }
        }
    }

    fn multi(&mut self) -> Result<KmrMulti, ParseError> {
        if !self.eat("[") {
            return Err(self.err("expected a type"));
        }
        let mut elems = Vec::new();
        if self.eat("]") {
            return Ok(KmrMulti::default());
        }
        loop {
            let t = self.ty()?;
            if t == KmrType::Empty {
                return Err(self.err("`[]` cannot occur in a multiset"));
            }
            elems.push(t);
            if self.eat("]") {
                return Ok(KmrMulti::new(elems).expect("checked above"));
            }
            if !self.eat(",") {
                return Err(self.err("expected `,` or `]`"));
            }
        }
    }

    fn end(&mut self) -> Result<(), ParseError> {
        self.ws();
        if self.pos == self.s.len() {
            Ok(())
        } else {
            Err(self.err("trailing input"))
        }
    }
}

pub fn parse_kmr_type(s: &str) -> Result<KmrJType, ParseError> {
    let mut p = TypeParser { s, pos: 0 };
    let t = p.jtype()?;
    p.end()?;
    Ok(t)
}

pub fn parse_kmr_multi(s: &str) -> Result<KmrMulti, ParseError> {
    let mut p = TypeParser { s, pos: 0 };
    let t = p.multi()?;
    p.end()?;
    Ok(t)
}

/// `x:[..], y:[..] |- term : type`.
pub fn parse_kmr_judgment(s: &str) -> Result<KmrJudgment, ParseError> {
    let (ctx, rest) = s
        .split_once("|-")
        .ok_or_else(|| ParseError::new(SourceSpan::new(0, s.len()), "expected `|-`"))?;
    let colon = find_top_colon(rest)
        .ok_or_else(|| ParseError::new(SourceSpan::new(0, s.len()), "expected `: type`"))?;
    let mut env = KmrEnv::new();
    for entry in split_top(ctx) {
        let entry = entry.trim();
        if entry.is_empty() {
            continue;
        }
        let (x, m) = entry
            .split_once(':')
            .ok_or_else(|| ParseError::new(SourceSpan::new(0, 0), "expected `x:[..]`"))?;
        let m = parse_kmr_multi(m)?;
        if !m.0.is_empty() {
            let e = env.entry(x.trim().to_string()).or_default();
            *e = e.sum(&m);
        }
    }
    Ok(KmrJudgment {
        env,
        term: parse_term_with(rest[..colon].trim(), true)?,
        ty: parse_kmr_type(&rest[colon + 1..])?,
    })
}

/// Splits on commas outside brackets.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Last `:` outside parentheses; terms never contain one.
fn find_top_colon(s: &str) -> Option<usize> {
    s.rfind(':')
}

pub(super) fn from_node(n: &Node) -> Result<KmrDerivation, ParseError> {
    let rule = KmrRule::from_tag(&n.rule).ok_or_else(|| {
        ParseError::new(
            SourceSpan::new(0, 0),
            format!("unknown rule tag `{}`", n.rule),
        )
    })?;
    let mut env = KmrEnv::new();
    for (x, m) in &n.ctx {
        env.insert(x.clone(), parse_kmr_multi(m)?);
    }
    Ok(KmrDerivation {
        rule,
        env,
        term: parse_term_with(&n.term, true)?,
        ty: parse_kmr_type(&n.ty)?,
        children: n.children.iter().map(from_node).collect::<Result<_, _>>()?,
    })
}

pub(super) fn to_node(d: &KmrDerivation) -> Node {
    Node {
        system: None,
        rule: d.rule.tag().into(),
        ctx: d
            .env
            .iter()
            .map(|(x, m)| (x.clone(), m.to_string()))
            .collect(),
        term: print_term(&d.term),
        ty: d.ty.to_string(),
        children: d.children.iter().map(to_node).collect(),
    }
}

fn small_types(consts: &BTreeSet<String>, max: usize) -> BTreeSet<KmrType> {
    let mut by_size: Vec<Vec<KmrType>> = vec![Vec::new(); max + 1];
    if max >= 1 {
        by_size[1] = consts
            .iter()
            .map(|c| KmrType::Const(c.clone()))
            .chain([KmrType::Empty])
            .collect();
    }
    for s in 3..=max {
        let mut here = Vec::new();
        for a_size in 1..s - 1 {
            for m in multis_of_weight(&by_size, s - 1 - a_size) {
                for a in &by_size[a_size] {
                    here.push(KmrType::Arrow(m.clone(), Box::new(a.clone())));
                }
            }
        }
        by_size[s] = here;
    }
    by_size.into_iter().flatten().collect()
}

/// Multisets whose size, bracket included, is `w`.
fn multis_of_weight(by_size: &[Vec<KmrType>], w: usize) -> Vec<KmrMulti> {
    let pool: Vec<&KmrType> = by_size
        .iter()
        .flatten()
        .filter(|t| **t != KmrType::Empty)
        .collect();
    let mut out = Vec::new();
    fn go(
        pool: &[&KmrType],
        from: usize,
        w: usize,
        cur: &mut Vec<KmrType>,
        out: &mut Vec<KmrMulti>,
    ) {
        if w == 0 {
            out.push(KmrMulti::new(cur.clone()).expect("no empty elements"));
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
    if w >= 1 {
        go(&pool, 0, w - 1, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone, Debug)]
pub struct KmrSearchOutcome {
    pub witness: Option<KmrDerivation>,
    pub judgments: usize,
}

/// Bounded bottom-up search for exactly `goal`.
///
/// Derivations have at most `bound` nodes. Types range over the subtypes of
/// the goal, `[]`, and types of size at most `bound / 10` over the goal's
/// constants. Entries for the goal's free variables stay within the goal's
/// environment; other multisets have at most `max(2, bound / 15)` elements.
pub fn kmr_search(goal: &KmrJudgment, bound: usize) -> KmrSearchOutcome {
    let mut types = BTreeSet::new();
    let mut consts = BTreeSet::new();
    match &goal.ty {
        KmrJType::Type(a) => a.collect(&mut types, &mut consts),
        KmrJType::Multi(m) => m
            .elems()
            .iter()
            .for_each(|a| a.collect(&mut types, &mut consts)),
    }
    for m in goal.env.values() {
        m.elems()
            .iter()
            .for_each(|a| a.collect(&mut types, &mut consts));
    }
    if consts.is_empty() {
        consts.insert("a".into());
    }
    types.extend(small_types(&consts, bound / 10));
    types.insert(KmrType::Empty);
    let mut s = KmrSearch {
        universe: types,
        bound,
        cap: (bound / 15).max(2),
        outer: goal
            .term
            .free_vars()
            .into_iter()
            .map(|x| (x.clone(), goal.env.get(&x).cloned().unwrap_or_default()))
            .collect(),
        taken: goal
            .term
            .free_vars()
            .into_iter()
            .chain(goal.env.keys().cloned())
            .collect(),
    };
    let table = s.judgments(&goal.term);
    let witness = table.get(&(goal.env.clone(), goal.ty.clone())).cloned();
    KmrSearchOutcome {
        witness,
        judgments: table.len(),
    }
}

type KmrTable = BTreeMap<(KmrEnv, KmrJType), KmrDerivation>;

struct KmrSearch {
    universe: BTreeSet<KmrType>,
    bound: usize,
    cap: usize,
    outer: BTreeMap<Name, KmrMulti>,
    taken: BTreeSet<Name>,
}

impl KmrSearch {
    fn env_ok(&self, env: &KmrEnv) -> bool {
        env.iter().all(|(x, m)| match self.outer.get(x) {
            Some(limit) => m.within(limit),
            None => m.0.len() <= self.cap && m.0.iter().all(|a| self.universe.contains(a)),
        })
    }

    fn keep(&self, table: &mut KmrTable, d: KmrDerivation) {
        if d.node_count() > self.bound || !self.env_ok(&d.env) {
            return;
        }
        if let KmrJType::Type(a) = &d.ty {
            if !self.universe.contains(a) {
                return;
            }
        }
        let key = (d.env.clone(), d.ty.clone());
        match table.get(&key) {
            Some(old) if old.node_count() <= d.node_count() => {}
            _ => {
                table.insert(key, d);
            }
        }
    }

    fn judgments(&mut self, t: &Term) -> KmrTable {
        let mut table = KmrTable::new();
        if t.is_value() {
            let d = KmrDerivation {
                rule: KmrRule::Val0,
                env: KmrEnv::new(),
                term: t.clone(),
                ty: KmrJType::Type(KmrType::Empty),
                children: vec![],
            };
            self.keep(&mut table, d);
        }
        match t {
            Term::Var(x) => {
                for a in self.universe.iter().filter(|a| **a != KmrType::Empty) {
                    let env = KmrEnv::from([(x.clone(), KmrMulti(vec![a.clone()]))]);
                    let d = KmrDerivation {
                        rule: KmrRule::Var,
                        env,
                        term: t.clone(),
                        ty: KmrJType::Type(a.clone()),
                        children: vec![],
                    };
                    self.keep(&mut table, d);
                }
            }
            Term::Abs(h, body) => {
                let y = fresh_name(h.as_str(), |n| self.taken.contains(n));
                self.taken.insert(y.clone());
                for ((env, ty), d) in self.judgments(&body.open(&y)) {
                    let KmrJType::Type(a) = ty else { continue };
                    let mut rest = env;
                    let m = rest.remove(&y).unwrap_or_default();
                    let ty = KmrJType::Type(KmrType::Arrow(m, Box::new(a)));
                    self.keep(
                        &mut table,
                        KmrDerivation {
                            rule: KmrRule::Lam,
                            env: rest,
                            term: t.clone(),
                            ty,
                            children: vec![d],
                        },
                    );
                }
            }
            Term::App(f, u) => {
                let fs = self.judgments(f);
                let us = self.judgments(u);
                for ((_, fty), df) in &fs {
                    let KmrJType::Type(KmrType::Arrow(m, a)) = fty else {
                        continue;
                    };
                    let want = KmrJType::multi(m.clone());
                    for ((_, uty), du) in &us {
                        if *uty != want {
                            continue;
                        }
                        let d = KmrDerivation {
                            rule: KmrRule::App,
                            env: env_sum(&df.env, &du.env),
                            term: t.clone(),
                            ty: KmrJType::Type((**a).clone()),
                            children: vec![df.clone(), du.clone()],
                        };
                        self.keep(&mut table, d);
                    }
                }
            }
            _ => {}
        }
        self.collect_many(&mut table);
        table
    }

    /// Adds every `val>0` conclusion over the type judgments in `table`.
    fn collect_many(&self, table: &mut KmrTable) {
        let singles: Vec<KmrDerivation> = table
            .values()
            .filter(|d| matches!(&d.ty, KmrJType::Type(a) if *a != KmrType::Empty))
            .cloned()
            .collect();
        let mut chosen = Vec::new();
        self.many_rec(&singles, 0, 1, &mut chosen, table);
    }

    fn many_rec(
        &self,
        singles: &[KmrDerivation],
        from: usize,
        nodes: usize,
        chosen: &mut Vec<KmrDerivation>,
        table: &mut KmrTable,
    ) {
        if !chosen.is_empty() {
            let env = chosen
                .iter()
                .fold(KmrEnv::new(), |acc, c| env_sum(&acc, &c.env));
            if !self.env_ok(&env) {
                return;
            }
            let elems = chosen
                .iter()
                .map(|c| match &c.ty {
                    KmrJType::Type(a) => a.clone(),
                    KmrJType::Multi(_) => unreachable!("only type judgments are chosen"),
                })
                .collect();
            let d = KmrDerivation {
                rule: KmrRule::ValMany,
                env,
                term: chosen[0].term.clone(),
                ty: KmrJType::Multi(KmrMulti::new(elems).expect("non-empty types")),
                children: chosen.clone(),
            };
            self.keep(table, d);
        }
        if chosen.len() == self.cap {
            return;
        }
        for i in from..singles.len() {
            let n = nodes + singles[i].node_count();
            if n <= self.bound {
                chosen.push(singles[i].clone());
                self.many_rec(singles, i, n, chosen, table);
                chosen.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_syntax() {
        for s in [
            "a",
            "[]",
            "[] => a",
            "[a, b] => []",
            "[[b1] => [], [b2] => []]",
            "[a] => [b] => c",
        ] {
            let t = parse_kmr_type(s).unwrap();
            assert_eq!(parse_kmr_type(&t.to_string()).unwrap(), t, "{s}");
        }
        assert!(parse_kmr_type("[[]]").is_err());
        assert!(parse_kmr_type("[a] => [b]").is_err());
        assert_eq!(
            parse_kmr_type("[b, a]").unwrap(),
            parse_kmr_type("[a, b]").unwrap()
        );
    }

    #[test]
    fn judgment_syntax() {
        let j = parse_kmr_judgment("y:[b1, b2], z:[[b1] => [], [b2] => []] |- z y : []").unwrap();
        assert_eq!(j.env.len(), 2);
        assert_eq!(j.ty, KmrJType::Type(KmrType::Empty));
    }

    #[test]
    fn single_application() {
        let j = parse_kmr_judgment("z:[[b] => []], y:[b] |- z y : []").unwrap();
        let d = kmr_search(&j, 10).witness.unwrap();
        assert!(kmr_check(&d).is_ok());
        assert_eq!(d.node_count(), 4);
    }

    #[test]
    fn values_take_the_empty_type() {
        let j = parse_kmr_judgment("|- \\x. x x : []").unwrap();
        assert_eq!(kmr_search(&j, 5).witness.unwrap().rule, KmrRule::Val0);
        let j = parse_kmr_judgment("x:[a] |- x x : []").unwrap();
        assert!(kmr_search(&j, 20).witness.is_none());
    }
}
