//! Concrete syntax for terms, types and derivations.
//!
//! Terms: `\x. t` (or `λx. t`), juxtaposition, `t[x <- u]` (or `←`),
//! parentheses. Types: `[A, ..., B]`, `0` or `[]`, `X`, `M -o N` (or `⊸`).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::derivation::{Derivation, JType, Judgment, Rule};
use crate::term::{Term, FRESH_MARK};
use crate::types::{LinearType, MultiType, TypeContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        SourceSpan { start, end }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{message} at {}..{}", span.start, span.end)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

impl ParseError {
    pub fn new(span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError {
            span,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Lambda,
    Dot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LArrow,
    Comma,
    Lolli,
    Zero,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Lambda => f.write_str("`\\`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::LArrow => f.write_str("`<-`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Lolli => f.write_str("`-o`"),
            Tok::Zero => f.write_str("`0`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(input: &str, allow_reserved: bool) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = input.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let single = |tok: Tok| (tok, SourceSpan::new(i, i + c.len_utf8()));
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '\\' | 'λ' => {
                out.push(single(Tok::Lambda));
                chars.next();
            }
            '.' => {
                out.push(single(Tok::Dot));
                chars.next();
            }
            '(' => {
                out.push(single(Tok::LParen));
                chars.next();
            }
            ')' => {
                out.push(single(Tok::RParen));
                chars.next();
            }
            '[' => {
                out.push(single(Tok::LBracket));
                chars.next();
            }
            ']' => {
                out.push(single(Tok::RBracket));
                chars.next();
            }
            ',' => {
                out.push(single(Tok::Comma));
                chars.next();
            }
            '←' => {
                out.push(single(Tok::LArrow));
                chars.next();
            }
            '⊸' => {
                out.push(single(Tok::Lolli));
                chars.next();
            }
            '0' => {
                out.push(single(Tok::Zero));
                chars.next();
            }
            '<' => {
                chars.next();
                match chars.next() {
                    Some((_, '-')) => out.push((Tok::LArrow, SourceSpan::new(i, i + 2))),
                    _ => return Err(ParseError::new(SourceSpan::new(i, i + 1), "expected `<-`")),
                }
            }
            '-' => {
                chars.next();
                match chars.next() {
                    Some((_, 'o')) => out.push((Tok::Lolli, SourceSpan::new(i, i + 2))),
                    _ => return Err(ParseError::new(SourceSpan::new(i, i + 1), "expected `-o`")),
                }
            }
            c if c.is_ascii_alphabetic() => {
                let mut end = i;
                let mut name = String::new();
                while let Some(&(j, d)) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                        name.push(d);
                        end = j + 1;
                        chars.next();
                    } else if d == FRESH_MARK {
                        if !allow_reserved {
                            return Err(ParseError::new(
                                SourceSpan::new(i, j + 1),
                                "identifiers containing `~` are reserved for generated names",
                            ));
                        }
                        name.push(d);
                        end = j + 1;
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(name), SourceSpan::new(i, end)));
            }
            _ => {
                return Err(ParseError::new(
                    SourceSpan::new(i, i + c.len_utf8()),
                    format!("unexpected character `{c}`"),
                ))
            }
        }
    }
    out.push((Tok::Eof, SourceSpan::new(input.len(), input.len())));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser {
    fn new(input: &str, allow_reserved: bool) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(input, allow_reserved)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::new(
            self.span(),
            format!("expected {expected}, found {}", self.peek()),
        )
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if *self.peek() == Tok::Lambda {
            return self.lambda();
        }
        let mut acc = self.postfix()?;
        loop {
            match self.peek() {
                Tok::Ident(_) | Tok::LParen => {
                    let arg = self.postfix()?;
                    acc = Term::app(acc, arg);
                }
                Tok::Lambda => {
                    let arg = self.lambda()?;
                    return Ok(Term::app(acc, arg));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn lambda(&mut self) -> Result<Term, ParseError> {
        self.expect(Tok::Lambda)?;
        let x = self.ident()?;
        self.expect(Tok::Dot)?;
        let body = self.term()?;
        Ok(Term::lam(&x, body))
    }

    fn postfix(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.atom()?;
        while *self.peek() == Tok::LBracket {
            self.bump();
            let x = self.ident()?;
            self.expect(Tok::LArrow)?;
            let arg = self.term()?;
            self.expect(Tok::RBracket)?;
            acc = Term::esub(acc, &x, arg);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::Ident(_) => Ok(Term::var(self.ident()?)),
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    fn multi_type(&mut self) -> Result<MultiType, ParseError> {
        match self.peek() {
            Tok::Zero => {
                self.bump();
                Ok(MultiType::empty())
            }
            Tok::LBracket => {
                self.bump();
                let mut elems = Vec::new();
                if *self.peek() == Tok::RBracket {
                    self.bump();
                    return Ok(MultiType::empty());
                }
                loop {
                    elems.push(self.linear_type()?);
                    match self.peek() {
                        Tok::Comma => {
                            self.bump();
                        }
                        Tok::RBracket => {
                            self.bump();
                            break;
                        }
                        _ => return Err(self.unexpected("`,` or `]`")),
                    }
                }
                Ok(MultiType::new(elems))
            }
            _ => Err(self.unexpected("a multi type")),
        }
    }

    fn linear_type(&mut self) -> Result<LinearType, ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == "X" => {
                self.bump();
                Ok(LinearType::Ground)
            }
            Tok::Zero | Tok::LBracket => {
                let lhs = self.multi_type()?;
                self.expect(Tok::Lolli)?;
                let rhs = self.multi_type()?;
                Ok(LinearType::Arrow(lhs, rhs))
            }
            _ => Err(self.unexpected("a linear type")),
        }
    }
}

/// Parses user input. Generated names (containing `~`) are rejected.
pub fn parse_term(input: &str) -> Result<Term, ParseError> {
    parse_term_with(input, false)
}

/// Like [`parse_term`] but accepts generated names, as found in derivation
/// files written by this crate.
pub fn parse_term_with(input: &str, allow_reserved: bool) -> Result<Term, ParseError> {
    let mut p = Parser::new(input, allow_reserved)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_type(input: &str) -> Result<MultiType, ParseError> {
    let mut p = Parser::new(input, false)?;
    let m = p.multi_type()?;
    p.finish()?;
    Ok(m)
}

pub fn parse_linear_type(input: &str) -> Result<LinearType, ParseError> {
    let mut p = Parser::new(input, false)?;
    let a = p.linear_type()?;
    p.finish()?;
    Ok(a)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Top,
    Fun,
    Arg,
    EsBody,
}

fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic())
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Indices escaping `t`, relative to its root.
fn loose_indices(t: &Term, depth: usize, out: &mut BTreeSet<usize>) {
    match t {
        Term::Var(_) => {}
        Term::Bound(i) => {
            if *i >= depth {
                out.insert(i - depth);
            }
        }
        Term::Abs(_, b) => loose_indices(b, depth + 1, out),
        Term::App(f, a) => {
            loose_indices(f, depth, out);
            loose_indices(a, depth, out);
        }
        Term::ESub(b, _, a) => {
            loose_indices(b, depth + 1, out);
            loose_indices(a, depth, out);
        }
    }
}

struct Printer {
    scope: Vec<String>,
    out: String,
}

impl Printer {
    /// Picks a printable name for a binder over `body` that neither captures
    /// a free name nor shadows an enclosing binder the body refers to.
    fn binder_name(&self, hint: &str, body: &Term) -> String {
        let stem = hint.split(FRESH_MARK).next().unwrap_or("");
        let stem = if is_identifier(stem) { stem } else { "v" };
        let free = body.free_vars();
        let mut loose = BTreeSet::new();
        loose_indices(body, 1, &mut loose);
        let visible: BTreeSet<&str> = loose
            .iter()
            .filter_map(|k| {
                self.scope
                    .len()
                    .checked_sub(k + 1)
                    .map(|i| self.scope[i].as_str())
            })
            .collect();
        let mut name = stem.to_string();
        while free.contains(&name) || visible.contains(name.as_str()) {
            name.push('\'');
        }
        name
    }

    fn print(&mut self, t: &Term, slot: Slot, rightmost: bool) {
        match t {
            Term::Var(x) => self.out.push_str(x),
            Term::Bound(i) => {
                let name = self
                    .scope
                    .len()
                    .checked_sub(i + 1)
                    .map(|k| self.scope[k].clone())
                    .unwrap_or_else(|| format!("#{i}"));
                self.out.push_str(&name);
            }
            Term::Abs(h, b) => {
                let paren = match slot {
                    Slot::Top => false,
                    Slot::Arg => !rightmost,
                    Slot::Fun | Slot::EsBody => true,
                };
                let name = self.binder_name(h.as_str(), b);
                if paren {
                    self.out.push('(');
                }
                self.out.push('\\');
                self.out.push_str(&name);
                self.out.push_str(". ");
                self.scope.push(name);
                self.print(b, Slot::Top, true);
                self.scope.pop();
                if paren {
                    self.out.push(')');
                }
            }
            Term::App(f, a) => {
                let paren = matches!(slot, Slot::Arg | Slot::EsBody);
                if paren {
                    self.out.push('(');
                }
                let inner_right = paren || rightmost;
                self.print(f, Slot::Fun, false);
                self.out.push(' ');
                self.print(a, Slot::Arg, inner_right);
                if paren {
                    self.out.push(')');
                }
            }
            Term::ESub(b, h, a) => {
                let name = self.binder_name(h.as_str(), b);
                self.scope.push(name.clone());
                self.print(b, Slot::EsBody, false);
                self.scope.pop();
                self.out.push('[');
                self.out.push_str(&name);
                self.out.push_str(" <- ");
                self.print(a, Slot::Top, true);
                self.out.push(']');
            }
        }
    }
}

pub fn print_term(t: &Term) -> String {
    let mut p = Printer {
        scope: Vec::new(),
        out: String::new(),
    };
    p.print(t, Slot::Top, true);
    p.out
}

pub fn print_type(m: &MultiType) -> String {
    m.to_string()
}

#[derive(Serialize, Deserialize)]
struct Node {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    system: Option<String>,
    rule: String,
    ctx: Vec<(String, String)>,
    term: String,
    #[serde(rename = "type")]
    ty: String,
    linear: bool,
    children: Vec<Node>,
}

fn rule_tag(r: Rule) -> &'static str {
    match r {
        Rule::Ax => "ax",
        Rule::App => "app",
        Rule::Lam => "lam",
        Rule::Es => "es",
        Rule::Many => "many",
    }
}

fn to_node(d: &Derivation) -> Node {
    let j = &d.conclusion;
    Node {
        system: None,
        rule: rule_tag(d.rule).to_string(),
        ctx: j
            .ctx
            .iter()
            .map(|(x, m)| (x.clone(), m.to_string()))
            .collect(),
        term: print_term(&j.term),
        ty: match &j.ty {
            JType::Linear(a) => a.to_string(),
            JType::Multi(m) => m.to_string(),
        },
        linear: j.ty.is_linear(),
        children: d.children.iter().map(to_node).collect(),
    }
}

/// Maps a field-level error back to the whole input.
fn in_document(e: ParseError, what: &str) -> ParseError {
    ParseError::new(SourceSpan::new(0, 0), format!("in {what}: {e}"))
}

fn from_node(n: &Node) -> Result<Derivation, ParseError> {
    let rule = match n.rule.as_str() {
        "ax" => Rule::Ax,
        "app" => Rule::App,
        "lam" => Rule::Lam,
        "es" => Rule::Es,
        "many" => Rule::Many,
        other => {
            return Err(ParseError::new(
                SourceSpan::new(0, 0),
                format!("unknown rule tag `{other}`"),
            ))
        }
    };
    let mut ctx = TypeContext::new();
    for (x, ty) in &n.ctx {
        let m = parse_type(ty).map_err(|e| in_document(e, &format!("context entry `{x}`")))?;
        ctx = ctx.add(x, &m);
    }
    let term = parse_term_with(&n.term, true).map_err(|e| in_document(e, "term"))?;
    let ty = if n.linear {
        JType::Linear(parse_linear_type(&n.ty).map_err(|e| in_document(e, "type"))?)
    } else {
        JType::Multi(parse_type(&n.ty).map_err(|e| in_document(e, "type"))?)
    };
    let children = n
        .children
        .iter()
        .map(from_node)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Derivation {
        rule,
        conclusion: Judgment { ctx, term, ty },
        children,
    })
}

fn json_error(input: &str, e: serde_json::Error) -> ParseError {
    let offset = input
        .split_inclusive('\n')
        .take(e.line().saturating_sub(1))
        .map(str::len)
        .sum::<usize>()
        + e.column().saturating_sub(1);
    let offset = offset.min(input.len());
    ParseError::new(SourceSpan::new(offset, offset), e.to_string())
}

pub fn read_derivation(input: &str) -> Result<Derivation, ParseError> {
    let node: Node = serde_json::from_str(input).map_err(|e| json_error(input, e))?;
    if let Some(sys) = &node.system {
        if sys != "main" {
            return Err(ParseError::new(
                SourceSpan::new(0, 0),
                format!("derivation is tagged for system `{sys}`"),
            ));
        }
    }
    from_node(&node)
}

pub fn write_derivation(d: &Derivation) -> String {
    serde_json::to_string_pretty(&to_node(d)).expect("derivation nodes serialize")
}

/// The `system` tag of a derivation document, if any.
pub fn derivation_system(input: &str) -> Result<Option<String>, ParseError> {
    #[derive(Deserialize)]
    struct Tag {
        system: Option<String>,
    }
    let tag: Tag = serde_json::from_str(input).map_err(|e| json_error(input, e))?;
    Ok(tag.system)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn parses_basic_forms() {
        assert_eq!(
            p("\\x. x x"),
            Term::lam("x", Term::app(Term::var("x"), Term::var("x")))
        );
        assert_eq!(
            p("x[x <- \\z. z] y"),
            Term::app(
                Term::esub(Term::var("x"), "x", Term::lam("z", Term::var("z"))),
                Term::var("y")
            )
        );
        let i = Term::lam("x", Term::var("x"));
        assert_eq!(p("(\\x. x) (\\x. x)"), Term::app(i.clone(), i));
        assert_eq!(p("λx. x[y ← z]"), p("\\x. x[y <- z]"));
    }

    #[test]
    fn es_chains_left_to_right() {
        let t = p("t[x <- u][y <- s]");
        let expected = Term::esub(
            Term::esub(Term::var("t"), "x", Term::var("u")),
            "y",
            Term::var("s"),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn prints_minimally() {
        assert_eq!(print_term(&p("\\x. x")), "\\x. x");
        assert_eq!(print_term(&p("(x y) z")), "x y z");
        assert_eq!(print_term(&p("x[x <- \\z. z]")), "x[x <- \\z. z]");
        assert_eq!(print_term(&p("x (y z)")), "x (y z)");
        assert_eq!(print_term(&p("(\\x. x) y")), "(\\x. x) y");
        assert_eq!(print_term(&p("(x y)[x <- z]")), "(x y)[x <- z]");
    }

    #[test]
    fn printing_renames_capturing_binders() {
        let t = p("\\y. x y").meta_subst("x", &Term::var("y"));
        assert_eq!(print_term(&t), "\\y'. y y'");
        assert_eq!(p(&print_term(&t)), t);
    }

    #[test]
    fn rejects_reserved_and_malformed() {
        assert!(parse_term("x~1").is_err());
        assert!(parse_term_with("x~1", true).is_ok());
        let e = parse_term("\\x x").unwrap_err();
        assert_eq!(e.span, SourceSpan::new(3, 4));
        assert!(parse_term("(x").is_err());
        assert!(parse_term("x[y z]").is_err());
    }

    #[test]
    fn types_round_trip() {
        assert_eq!(parse_type("0").unwrap(), MultiType::empty());
        assert_eq!(parse_type("[]").unwrap(), MultiType::empty());
        assert_eq!(parse_type("[X, X]").unwrap(), MultiType::ground(2));
        let m = parse_type("[[X] -o [X]]").unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(print_type(&m), "[[X] -o [X]]");
        assert!(parse_type("[X ⊸ X]").is_err());
        assert_eq!(
            parse_type("[[X] ⊸ 0, X]").unwrap(),
            parse_type("[X, [X] -o 0]").unwrap()
        );
    }

    #[test]
    fn derivation_documents() {
        let doc = r#"{"rule":"many","ctx":[],"term":"\\x. (\\x. x x) (\\x. x x)","type":"0","linear":false,"children":[]}"#;
        let d = read_derivation(doc).unwrap();
        assert_eq!(d.rule, Rule::Many);
        assert!(d.children.is_empty());
        let back = read_derivation(&write_derivation(&d)).unwrap();
        assert_eq!(back, d);
        let bad = doc.replace("\"many\"", "\"app2\"");
        assert!(read_derivation(&bad).is_err());
        let ax = r#"{"rule":"ax","ctx":[["x","[X]"]],"term":"x","type":"X","linear":true,"children":[]}"#;
        let d = read_derivation(ax).unwrap();
        assert!(d.conclusion.ty.is_linear());
    }
}
