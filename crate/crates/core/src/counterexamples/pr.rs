//! Idempotent intersection types with the constants `alpha` and `nu`:
//!
//! ```text
//! σ, τ ::= alpha | nu | S => τ        S ::= {σ1, .., σn}   (n >= 1)
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::derivation::opened_name;
use crate::syntax::{parse_term_with, print_term, ParseError, SourceSpan};
use crate::term::{fresh_name, Hint, Name, Term};

use super::{Node, Violation};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrType {
    Alpha,
    Nu,
    Arrow(BTreeSet<PrType>, Box<PrType>),
}

impl PrType {
    pub fn arrow(s: impl IntoIterator<Item = PrType>, t: PrType) -> PrType {
        PrType::Arrow(s.into_iter().collect(), Box::new(t))
    }

    pub fn size(&self) -> usize {
        match self {
            PrType::Alpha | PrType::Nu => 1,
            PrType::Arrow(s, t) => 1 + s.iter().map(PrType::size).sum::<usize>() + t.size(),
        }
    }

    fn collect_subtypes(&self, out: &mut BTreeSet<PrType>) {
        if out.insert(self.clone()) {
            if let PrType::Arrow(s, t) = self {
                for x in s {
                    x.collect_subtypes(out);
                }
                t.collect_subtypes(out);
            }
        }
    }
}

impl fmt::Display for PrType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrType::Alpha => f.write_str("alpha"),
            PrType::Nu => f.write_str("nu"),
            PrType::Arrow(s, t) => write!(f, "{} => {t}", fmt_set(s)),
        }
    }
}

fn fmt_set(s: &BTreeSet<PrType>) -> String {
    let items: Vec<String> = s.iter().map(ToString::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

pub type PrEnv = BTreeMap<Name, BTreeSet<PrType>>;

pub fn fmt_env(env: &PrEnv) -> String {
    let items: Vec<String> = env
        .iter()
        .map(|(x, s)| format!("{x}:{}", fmt_set(s)))
        .collect();
    items.join(", ")
}

fn union(a: &PrEnv, b: &PrEnv) -> PrEnv {
    let mut out = a.clone();
    for (x, s) in b {
        out.entry(x.clone()).or_default().extend(s.iter().cloned());
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrRule {
    Var,
    ArrowE,
    ArrowNuE,
    Nu,
    ArrowNuI,
    ArrowZeroI,
    ArrowI,
}

impl PrRule {
    pub fn tag(self) -> &'static str {
        match self {
            PrRule::Var => "var",
            PrRule::ArrowE => "=>E",
            PrRule::ArrowNuE => "=>nuE",
            PrRule::Nu => "nu",
            PrRule::ArrowNuI => "=>nuI",
            PrRule::ArrowZeroI => "=>0I",
            PrRule::ArrowI => "=>I",
        }
    }

    fn from_tag(s: &str) -> Option<PrRule> {
        [
            PrRule::Var,
            PrRule::ArrowE,
            PrRule::ArrowNuE,
            PrRule::Nu,
            PrRule::ArrowNuI,
            PrRule::ArrowZeroI,
            PrRule::ArrowI,
        ]
        .into_iter()
        .find(|r| r.tag() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrDerivation {
    pub rule: PrRule,
    pub env: PrEnv,
    pub term: Term,
    pub ty: PrType,
    pub children: Vec<PrDerivation>,
}

impl PrDerivation {
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
            .map(PrDerivation::node_count)
            .sum::<usize>()
    }
}

/// Name the premise uses for the binder of `abs`, or a fresh one.
fn premise_binder(body: &Term, hint: &Hint, child: &PrDerivation) -> Option<Name> {
    match opened_name(body, &child.term)? {
        Some(y) => Some(y),
        None => Some(fresh_name(hint.as_str(), |n| {
            child.env.contains_key(n) || child.term.has_free(n)
        })),
    }
}

pub fn pr_check(d: &PrDerivation) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    check_rec(d, &mut Vec::new(), &mut out);
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn check_rec(d: &PrDerivation, path: &mut Vec<usize>, out: &mut Vec<Violation>) {
    if let Err(message) = node_ok(d) {
        out.push(Violation {
            path: path.clone(),
            message,
        });
    }
    for (i, c) in d.children.iter().enumerate() {
        path.push(i);
        check_rec(c, path, out);
        path.pop();
    }
}

fn node_ok(d: &PrDerivation) -> Result<(), String> {
    let kids = &d.children;
    match d.rule {
        PrRule::Var => {
            let Term::Var(x) = &d.term else {
                return Err("var over a non-variable".into());
            };
            let expected = PrEnv::from([(x.clone(), BTreeSet::from([d.ty.clone()]))]);
            if !kids.is_empty() || d.env != expected {
                return Err(format!(
                    "var needs exactly {x}:{{{}}} and no premises",
                    d.ty
                ));
            }
            Ok(())
        }
        PrRule::ArrowE | PrRule::ArrowNuE => {
            let Term::App(f, u) = &d.term else {
                return Err("elimination over a non-application".into());
            };
            let Some((fun, args)) = kids.split_first() else {
                return Err("missing premises".into());
            };
            let PrType::Arrow(s, tau) = &fun.ty else {
                return Err("function premise is not an arrow".into());
            };
            if fun.term != **f || args.iter().any(|a| a.term != **u) {
                return Err("premise subjects do not match the application".into());
            }
            if **tau != d.ty {
                return Err("conclusion type is not the arrow's target".into());
            }
            if d.rule == PrRule::ArrowNuE {
                if *s != BTreeSet::from([PrType::Nu]) || args.len() != 1 || args[0].ty != PrType::Nu
                {
                    return Err("=>nuE needs {nu} => τ and an argument of type nu".into());
                }
            } else {
                let given: BTreeSet<PrType> = args.iter().map(|a| a.ty.clone()).collect();
                if args.is_empty() || args.len() != s.len() || given != *s {
                    return Err(format!("argument premises do not type {}", fmt_set(s)));
                }
            }
            let env = args
                .iter()
                .fold(fun.env.clone(), |acc, a| union(&acc, &a.env));
            if env != d.env {
                return Err("environment is not the union of the premises".into());
            }
            Ok(())
        }
        PrRule::Nu => {
            if !matches!(d.term, Term::Abs(..))
                || !kids.is_empty()
                || !d.env.is_empty()
                || d.ty != PrType::Nu
            {
                return Err("nu types an abstraction with nu in the empty environment".into());
            }
            Ok(())
        }
        PrRule::ArrowNuI | PrRule::ArrowZeroI | PrRule::ArrowI => {
            let Term::Abs(h, body) = &d.term else {
                return Err("introduction over a non-abstraction".into());
            };
            let [child] = kids.as_slice() else {
                return Err("introduction needs one premise".into());
            };
            let y =
                premise_binder(body, h, child).ok_or("premise does not open the abstraction")?;
            let mut env = child.env.clone();
            let s = env.remove(&y);
            let expected = match (d.rule, s) {
                (PrRule::ArrowI, Some(s)) => PrType::Arrow(s, Box::new(child.ty.clone())),
                (PrRule::ArrowI, None) => {
                    return Err("=>I needs the bound variable in the premise".into())
                }
                (_, Some(_)) => {
                    return Err("bound variable must not be in the premise environment".into())
                }
                (PrRule::ArrowNuI, None) => PrType::arrow([PrType::Nu], child.ty.clone()),
                (_, None) => child.ty.clone(),
            };
            if env != d.env || expected != d.ty {
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

    fn ty(&mut self) -> Result<PrType, ParseError> {
        if self.eat("alpha") {
            return Ok(PrType::Alpha);
        }
        if self.eat("nu") {
            return Ok(PrType::Nu);
        }
        if self.eat("(") {
            let t = self.ty()?;
            return if self.eat(")") {
                Ok(t)
            } else {
                Err(self.err("expected `)`"))
            };
        }
        let s = self.set()?;
        if !self.eat("=>") {
            return Err(self.err("expected `=>` after a set"));
        }
        Ok(PrType::Arrow(s, Box::new(self.ty()?)))
    }

    fn set(&mut self) -> Result<BTreeSet<PrType>, ParseError> {
        if !self.eat("{") {
            return Err(self.err("expected a type"));
        }
        let mut out = BTreeSet::new();
        loop {
            out.insert(self.ty()?);
            if self.eat("}") {
                return Ok(out);
            }
            if !self.eat(",") {
                return Err(self.err("expected `,` or `}`"));
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

pub fn parse_pr_type(s: &str) -> Result<PrType, ParseError> {
    let mut p = TypeParser { s, pos: 0 };
    let t = p.ty()?;
    p.end()?;
    Ok(t)
}

pub fn parse_pr_set(s: &str) -> Result<BTreeSet<PrType>, ParseError> {
    let mut p = TypeParser { s, pos: 0 };
    let t = p.set()?;
    p.end()?;
    Ok(t)
}

pub(super) fn from_node(n: &Node) -> Result<PrDerivation, ParseError> {
    let rule = PrRule::from_tag(&n.rule).ok_or_else(|| {
        ParseError::new(
            SourceSpan::new(0, 0),
            format!("unknown rule tag `{}`", n.rule),
        )
    })?;
    let mut env = PrEnv::new();
    for (x, s) in &n.ctx {
        env.insert(x.clone(), parse_pr_set(s)?);
    }
    Ok(PrDerivation {
        rule,
        env,
        term: parse_term_with(&n.term, true)?,
        ty: parse_pr_type(&n.ty)?,
        children: n.children.iter().map(from_node).collect::<Result<_, _>>()?,
    })
}

pub(super) fn to_node(d: &PrDerivation) -> Node {
    Node {
        system: None,
        rule: d.rule.tag().into(),
        ctx: d.env.iter().map(|(x, s)| (x.clone(), fmt_set(s))).collect(),
        term: print_term(&d.term),
        ty: d.ty.to_string(),
        children: d.children.iter().map(to_node).collect(),
    }
}

/// Small types, by size, for padding the search universe.
fn small_types(max: usize) -> BTreeSet<PrType> {
    let mut by_size: Vec<Vec<PrType>> = vec![Vec::new(); max + 1];
    if max >= 1 {
        by_size[1] = vec![PrType::Alpha, PrType::Nu];
    }
    for s in 3..=max {
        let mut here = Vec::new();
        for t_size in 1..s - 1 {
            let set_budget = s - 1 - t_size;
            for set in sets_of_weight(&by_size, set_budget) {
                for t in &by_size[t_size] {
                    here.push(PrType::Arrow(set.clone(), Box::new(t.clone())));
                }
            }
        }
        by_size[s] = here;
    }
    by_size.into_iter().flatten().collect()
}

fn sets_of_weight(by_size: &[Vec<PrType>], w: usize) -> Vec<BTreeSet<PrType>> {
    let pool: Vec<&PrType> = by_size.iter().take(w + 1).flatten().collect();
    let mut out = Vec::new();
    fn go(
        pool: &[&PrType],
        from: usize,
        w: usize,
        cur: &mut Vec<PrType>,
        out: &mut Vec<BTreeSet<PrType>>,
    ) {
        if w == 0 && !cur.is_empty() {
            out.push(cur.iter().cloned().collect());
            return;
        }
        for i in from..pool.len() {
            let s = pool[i].size();
            if s <= w {
                cur.push(pool[i].clone());
                go(pool, i + 1, w - s, cur, out);
                cur.pop();
            }
        }
    }
    go(&pool, 0, w, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct PrSearchOutcome {
    /// Smallest derivation found for the goal, if any.
    pub witness: Option<PrDerivation>,
    /// Distinct judgments derived for the whole term.
    pub judgments: usize,
}

/// Bounded bottom-up search for `B |- term : ty` with any environment `B`.
///
/// Derivations have at most `bound` nodes; types range over the subtypes of
/// `ty`, the two constants, and every type of size at most `bound / 10`.
pub fn pr_search(term: &Term, ty: &PrType, bound: usize) -> PrSearchOutcome {
    let mut universe = small_types(bound / 10);
    ty.collect_subtypes(&mut universe);
    universe.insert(PrType::Alpha);
    universe.insert(PrType::Nu);
    let mut s = PrSearch {
        universe,
        bound,
        taken: term.free_vars(),
    };
    let table = s.judgments(term);
    let witness = table
        .iter()
        .filter(|((_, t), _)| t == ty)
        .map(|(_, d)| d)
        .min_by_key(|d| d.node_count())
        .cloned();
    PrSearchOutcome {
        witness,
        judgments: table.len(),
    }
}

type PrTable = BTreeMap<(PrEnv, PrType), PrDerivation>;

struct PrSearch {
    universe: BTreeSet<PrType>,
    bound: usize,
    taken: BTreeSet<Name>,
}

impl PrSearch {
    fn keep(&self, table: &mut PrTable, d: PrDerivation) {
        if d.node_count() > self.bound || !self.universe.contains(&d.ty) {
            return;
        }
        if d.env.values().flatten().any(|t| !self.universe.contains(t)) {
            return;
        }
        let key = (d.env.clone(), d.ty.clone());
        match table.get(&key) {
            Some(old) if old.node_count() <= d.node_count() => {}
            _ => {
                table.insert(key, d);
            }
        }
    }

    fn judgments(&mut self, t: &Term) -> PrTable {
        let mut table = PrTable::new();
        match t {
            Term::Var(x) => {
                for s in self.universe.clone() {
                    let env = PrEnv::from([(x.clone(), BTreeSet::from([s.clone()]))]);
                    self.keep(
                        &mut table,
                        PrDerivation {
                            rule: PrRule::Var,
                            env,
                            term: t.clone(),
                            ty: s,
                            children: vec![],
                        },
                    );
                }
            }
            Term::Abs(h, body) => {
                let nu = PrDerivation {
                    rule: PrRule::Nu,
                    env: PrEnv::new(),
                    term: t.clone(),
                    ty: PrType::Nu,
                    children: vec![],
                };
                self.keep(&mut table, nu);
                let y = fresh_name(h.as_str(), |n| self.taken.contains(n));
                self.taken.insert(y.clone());
                for ((env, tau), d) in self.judgments(&body.open(&y)) {
                    let mut rest = env.clone();
                    let mk = |rule, ty| PrDerivation {
                        rule,
                        env: rest.clone(),
                        term: t.clone(),
                        ty,
                        children: vec![d.clone()],
                    };
                    match env.get(&y) {
                        Some(s) => {
                            let ty = PrType::Arrow(s.clone(), Box::new(tau.clone()));
                            rest.remove(&y);
                            let d2 = PrDerivation {
                                rule: PrRule::ArrowI,
                                env: rest,
                                term: t.clone(),
                                ty,
                                children: vec![d],
                            };
                            self.keep(&mut table, d2);
                        }
                        None => {
                            let nu_i =
                                mk(PrRule::ArrowNuI, PrType::arrow([PrType::Nu], tau.clone()));
                            let zero_i = mk(PrRule::ArrowZeroI, tau.clone());
                            self.keep(&mut table, nu_i);
                            self.keep(&mut table, zero_i);
                        }
                    }
                }
            }
            Term::App(f, u) => {
                let fs = self.judgments(f);
                let us = self.judgments(u);
                let mut by_type: BTreeMap<&PrType, Vec<&PrDerivation>> = BTreeMap::new();
                for ((_, ty), d) in &us {
                    by_type.entry(ty).or_default().push(d);
                }
                for ((_, fty), df) in &fs {
                    let PrType::Arrow(s, tau) = fty else { continue };
                    let options: Vec<&Vec<&PrDerivation>> =
                        match s.iter().map(|x| by_type.get(x)).collect() {
                            Some(o) => o,
                            None => continue,
                        };
                    let rule = if *s == BTreeSet::from([PrType::Nu]) {
                        PrRule::ArrowNuE
                    } else {
                        PrRule::ArrowE
                    };
                    let mut picks = Vec::new();
                    self.products(
                        &options,
                        0,
                        df.node_count() + 1,
                        &mut picks,
                        &mut |picks: &[&PrDerivation]| {
                            let env = picks
                                .iter()
                                .fold(df.env.clone(), |acc, a| union(&acc, &a.env));
                            let mut children = vec![df.clone()];
                            children.extend(picks.iter().map(|a| (*a).clone()));
                            Some(PrDerivation {
                                rule,
                                env,
                                term: t.clone(),
                                ty: (**tau).clone(),
                                children,
                            })
                        },
                        &mut table,
                    );
                }
            }
            _ => {}
        }
        table
    }

    fn products<'a>(
        &self,
        options: &[&Vec<&'a PrDerivation>],
        i: usize,
        nodes: usize,
        picks: &mut Vec<&'a PrDerivation>,
        build: &mut dyn FnMut(&[&'a PrDerivation]) -> Option<PrDerivation>,
        table: &mut PrTable,
    ) {
        if nodes > self.bound {
            return;
        }
        if i == options.len() {
            if let Some(d) = build(picks) {
                self.keep(table, d);
            }
            return;
        }
        for d in options[i] {
            picks.push(d);
            self.products(options, i + 1, nodes + d.node_count(), picks, build, table);
            picks.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    #[test]
    fn type_syntax_round_trips() {
        for s in [
            "alpha",
            "nu",
            "{alpha} => alpha",
            "{{alpha} => nu, alpha, {alpha} => alpha} => {alpha} => alpha",
        ] {
            let t = parse_pr_type(s).unwrap();
            assert_eq!(parse_pr_type(&t.to_string()).unwrap(), t);
        }
        assert_eq!(
            parse_pr_type("{alpha, alpha} => nu").unwrap(),
            parse_pr_type("{alpha} => nu").unwrap()
        );
        assert!(parse_pr_type("{} => nu").is_err());
        assert!(parse_pr_type("{alpha}").is_err());
    }

    #[test]
    fn var_rule_shape() {
        let x = Term::var("x");
        let good = PrDerivation {
            rule: PrRule::Var,
            env: PrEnv::from([("x".into(), BTreeSet::from([PrType::Alpha]))]),
            term: x.clone(),
            ty: PrType::Alpha,
            children: vec![],
        };
        assert!(pr_check(&good).is_ok());
        let bad = PrDerivation {
            env: PrEnv::from([("x".into(), BTreeSet::from([PrType::Alpha, PrType::Nu]))]),
            ..good
        };
        assert!(pr_check(&bad).is_err());
    }

    #[test]
    fn identity_search() {
        let i = parse_term("\\x. x").unwrap();
        let goal = parse_pr_type("{alpha} => alpha").unwrap();
        let found = pr_search(&i, &goal, 12).witness.unwrap();
        assert!(pr_check(&found).is_ok());
        assert!(found.env.is_empty());
    }
}
