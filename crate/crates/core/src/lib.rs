//! Value substitution calculus: terms, strategies, multi types and
//! quantitative derivations.

pub mod classify;
pub mod counterexamples;
pub mod derivation;
pub mod enumerate;
pub mod lemmas;
pub mod props;
pub mod quantitative;
pub mod reduction;
pub mod search;
pub mod solvability;
pub mod syntax;
pub mod term;
pub mod types;

pub use classify::{classify, NormalFormClass};
pub use derivation::{check, Derivation, DerivationError, JType, Judgment, Rule, RuleViolation};
pub use reduction::{evaluate, ContextClass, EvalStatus, EvalTrace, RedexPosition, StepKind};
pub use syntax::{parse_term, parse_type, print_term, ParseError};
pub use term::{SubstContext, Term};
pub use types::{LinearType, MultiType, TypeContext};
