//! Problem input, exact structured output and LP text.

pub mod document;
pub mod lp;

pub use document::{
    emit_structured, parse_formulation, parse_problem, parse_rational, to_json, CheckLevel, FormulationDocument,
    OutputFormat, ParsedFormulation, Problem, ProblemDocument, ProblemOptions, VerificationSummary,
};
pub use lp::{emit_lp_text, parse_lp, LpModel};
