//! End-to-end acceptance run: one PASS/FAIL line per criterion, exit code 1
//! if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use vsc_core::counterexamples::{reproduce_counterexamples, Bounds};
use vsc_core::parse_term;
use vsc_core::props::{
    corpus, diamond, normal_forms, open_bounds, plotkin, random_descent, solving_bounds,
    subject_steps, substitution_lemmas, terms_up_to, upper_bounds, SuiteResult,
};
use vsc_core::quantitative::derive_solving;
use vsc_core::ContextClass;

const MAX_NODES: usize = 9;
const DERIVATION_NODES: usize = 5;
const TYPE_BOUND: usize = 4;
const FUEL: usize = 200;

/// Terms per constructor count 1..=9 over a two-variable pool, counted by an
/// independent generating-function computation.
const ENUMERATION_COUNTS: [usize; 9] = [2, 3, 14, 55, 268, 1370, 7418, 42476, 251690];

struct Outcome {
    ok: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            ok: true,
            lines: Vec::new(),
        }
    }

    fn suite(&mut self, s: SuiteResult) {
        self.ok &= s.ok();
        self.lines.push(s.to_string());
        for (i, why) in s.failures.iter().take(5) {
            self.lines.push(format!("  case {i}: {why}"));
        }
    }

    fn fact(&mut self, ok: bool, line: String) {
        self.ok &= ok;
        self.lines
            .push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn solving_value(src: &str, want: usize) -> (bool, String) {
    let t = parse_term(src).expect("literal parses");
    match derive_solving(&t, 1000) {
        Ok(r) => (
            r.exact && r.rhs == want,
            format!(
                "{src}: |Φ|m = {} (expected {want}); {}",
                r.rhs,
                r.equation()
            ),
        ),
        Err(e) => (false, format!("{src}: {e}")),
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let terms = terms_up_to(MAX_NODES);
    let small = terms_up_to(DERIVATION_NODES);

    let mut criteria: Vec<(&str, Outcome)> = Vec::new();

    let mut c = Outcome::new();
    let mut counts = [0usize; MAX_NODES];
    for t in &terms {
        counts[t.node_count() - 1] += 1;
    }
    c.fact(
        counts == ENUMERATION_COUNTS,
        format!("enumeration sizes {counts:?}, total {}", terms.len()),
    );
    c.suite(normal_forms(&terms));
    criteria.push(("normal forms agree with redex absence", c));

    let mut c = Outcome::new();
    c.suite(diamond(&terms, ContextClass::Open));
    c.suite(diamond(&terms, ContextClass::Solving));
    criteria.push(("diamond and commutation", c));

    let mut c = Outcome::new();
    c.suite(random_descent(&terms, ContextClass::Open, FUEL));
    c.suite(random_descent(&terms, ContextClass::Solving, FUEL));
    criteria.push(("random descent", c));

    let mut c = Outcome::new();
    c.suite(open_bounds(&terms, FUEL));
    c.suite(upper_bounds(&small, TYPE_BOUND, FUEL));
    criteria.push(("exact open bounds", c));

    let mut c = Outcome::new();
    c.suite(solving_bounds(&terms, FUEL));
    for (src, want) in [
        ("(\\z. z) (\\z. z)", 2),
        ("\\x. (\\z. z) (\\z. z)", 4),
        ("x (\\y. (\\z. z z) (\\z. z z))", 1),
    ] {
        let (ok, line) = solving_value(src, want);
        c.fact(ok, line);
    }
    criteria.push(("exact solving bounds", c));

    let mut c = Outcome::new();
    c.suite(substitution_lemmas(&small, TYPE_BOUND));
    c.suite(subject_steps(&small, TYPE_BOUND));
    criteria.push(("substitution and subject-step arithmetic", c));

    let mut c = Outcome::new();
    c.suite(corpus(1000, 6));
    criteria.push(("solvability corpus", c));

    let mut c = Outcome::new();
    c.suite(plotkin(&terms));
    criteria.push(("plotkin simulation", c));

    let mut c = Outcome::new();
    let report = reproduce_counterexamples(Bounds::default());
    for line in &report.lines {
        c.fact(line.ok, format!("{}: {}", line.name, line.detail));
    }
    criteria.push(("neighbouring systems reproduction", c));

    let mut all = true;
    for (k, (name, outcome)) in criteria.iter().enumerate() {
        for line in &outcome.lines {
            println!("    {line}");
        }
        let tag = if outcome.ok { "PASS" } else { "FAIL" };
        println!("{tag} criterion {}: {name}", k + 1);
        all &= outcome.ok;
    }
    println!("elapsed {:.1}s", started.elapsed().as_secs_f64());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
