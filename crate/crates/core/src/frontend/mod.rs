//! Text input and output: the equation parser, corpus files and reports.

mod corpus;
mod parse;
mod report;

pub use corpus::{
    corpus_exit_code, load_corpus, parse_corpus, run_corpus, run_corpus_entries, run_single,
    run_spec, single_exit_code, BindingValue, Budgets, ExpectedFactor, ExpectedPower, OdeSpec,
};
pub use parse::{parse_binding, parse_ode, parse_poly};
pub use report::{
    emit_report, parse_report, EigenReport, EntryReport, FactorReport, FoundAtReport, Format,
    Outcome, PowerReport, RunReport, StatsReport, SCHEMA,
};

use thiserror::Error;

use crate::darboux::FieldError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unbound parameter '{name}' at offset {offset} (bind it with --bind {name}=<rational>)")]
    UnboundParameter { name: String, offset: usize },
    #[error("equation is not linear in dy/dx (offset {offset})")]
    NotLinear { offset: usize },
    #[error("division by dy/dx at offset {offset}")]
    DivisionByDerivative { offset: usize },
    #[error("division by zero at offset {offset}")]
    DivisionByZero { offset: usize },
    #[error("equation does not contain dy/dx")]
    NoDerivative,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("not a polynomial in x and y: {0}")]
    NotPolynomial(String),
    #[error("invalid binding '{0}' (expected name=rational)")]
    BadBinding(String),
    #[error("invalid rational '{0}'")]
    BadRational(String),
    #[error("corpus: {0}")]
    Corpus(String),
    #[error("entry '{id}': {source}")]
    Entry { id: String, source: Box<FrontendError> },
    #[error("{0}")]
    Io(String),
}

impl FrontendError {
    fn syntax(offset: usize, message: impl Into<String>) -> Self {
        FrontendError::Syntax { offset, message: message.into() }
    }
}

/// Equation text from a command-line argument: the contents of the file of
/// that name if one exists (lines starting with `#` dropped), else the
/// argument itself.
pub fn read_equation_source(arg: &str) -> Result<String, FrontendError> {
    let path = std::path::Path::new(arg);
    if !path.is_file() {
        return Ok(arg.to_string());
    }
    let text = std::fs::read_to_string(path).map_err(|e| FrontendError::Io(format!("{arg}: {e}")))?;
    Ok(text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .collect::<Vec<_>>()
        .join(" "))
}
