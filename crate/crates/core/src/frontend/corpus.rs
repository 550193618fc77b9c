use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use web_time::Instant;

use super::parse::{parse_ode, parse_poly};
use super::report::{EntryReport, RunReport};
use super::FrontendError;
use crate::engine::{
    equivalent_up_to_constant, reduce_and_canonicalize, search_integrating_factor,
    verify_integrating_factor, IntegratingFactor, SearchConfig,
};
use crate::polynomials::{parse_rational, Rational};

/// A parameter value: an integer or a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BindingValue {
    Int(i64),
    Text(String),
}

impl BindingValue {
    fn to_rational(&self) -> Option<Rational> {
        match self {
            BindingValue::Int(n) => Some(Rational::from_integer((*n).into())),
            BindingValue::Text(s) => parse_rational(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedPower {
    pub poly: String,
    pub exponent: String,
}

/// `exp(p/q) * prod(poly ^ exponent)` as written in a corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedFactor {
    #[serde(default = "zero_text")]
    pub p: String,
    #[serde(default = "one_text")]
    pub q: String,
    #[serde(default)]
    pub factors: Vec<ExpectedPower>,
}

fn zero_text() -> String {
    "0".into()
}

fn one_text() -> String {
    "1".into()
}

impl ExpectedFactor {
    pub fn to_factor(&self) -> Result<IntegratingFactor, FrontendError> {
        let mut factors = Vec::new();
        for f in &self.factors {
            let c = parse_rational(&f.exponent).ok_or_else(|| FrontendError::BadRational(f.exponent.clone()))?;
            factors.push((parse_poly(&f.poly)?, c));
        }
        let raw = IntegratingFactor { p: parse_poly(&self.p)?, q: parse_poly(&self.q)?, q_factors: Vec::new(), factors };
        reduce_and_canonicalize(&raw).map_err(|_| FrontendError::NotPolynomial(self.q.clone()))
    }
}

/// Per-entry overrides of the search budgets.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    pub max_eigen_degree: Option<u32>,
    pub max_q_degree: Option<u32>,
    pub max_p_degree: Option<u32>,
    pub branch_cap: Option<u64>,
    pub timeout_secs: Option<f64>,
}

impl Budgets {
    pub fn apply(&self, base: &SearchConfig) -> SearchConfig {
        let mut cfg = base.clone();
        if let Some(v) = self.max_eigen_degree {
            cfg.max_eigen_degree = v;
        }
        if let Some(v) = self.max_q_degree {
            cfg.max_q_degree = v;
        }
        if self.max_p_degree.is_some() {
            cfg.max_p_degree = self.max_p_degree;
        }
        if let Some(v) = self.branch_cap {
            cfg.branch_cap = v;
        }
        if let Some(v) = self.timeout_secs {
            cfg.time_budget = Duration::from_secs_f64(v.max(0.0));
        }
        cfg
    }
}

/// One corpus record. Entries without an equation are placeholders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeSpec {
    pub id: String,
    pub equation: Option<String>,
    #[serde(default)]
    pub bindings: BTreeMap<String, BindingValue>,
    pub expected: Option<ExpectedFactor>,
    #[serde(default)]
    pub budgets: Budgets,
    pub note: Option<String>,
}

impl OdeSpec {
    pub fn bindings(&self) -> Result<BTreeMap<String, Rational>, FrontendError> {
        self.bindings
            .iter()
            .map(|(k, v)| {
                v.to_rational()
                    .map(|r| (k.clone(), r))
                    .ok_or_else(|| FrontendError::BadBinding(format!("{k}={v:?}")))
            })
            .collect()
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorpusFile {
    #[serde(default)]
    entry: Vec<OdeSpec>,
}

/// Parses corpus text; entries come back sorted by id.
pub fn parse_corpus(text: &str) -> Result<Vec<OdeSpec>, FrontendError> {
    let file: CorpusFile = toml::from_str(text).map_err(|e| FrontendError::Corpus(e.to_string()))?;
    let mut entries = file.entry;
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = entries.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(FrontendError::Corpus(format!("duplicate entry id '{}'", w[0].id)));
    }
    Ok(entries)
}

pub fn load_corpus(path: &Path) -> Result<Vec<OdeSpec>, FrontendError> {
    let text = std::fs::read_to_string(path).map_err(|e| FrontendError::Io(format!("{}: {e}", path.display())))?;
    parse_corpus(&text)
}

/// Parses, searches, re-verifies and compares one equation.
pub fn run_spec(spec: &OdeSpec, base: &SearchConfig) -> Result<Option<EntryReport>, FrontendError> {
    let Some(equation) = &spec.equation else {
        return Ok(None);
    };
    let wrap = |e: FrontendError| FrontendError::Entry { id: spec.id.clone(), source: Box::new(e) };
    let bindings = spec.bindings().map_err(wrap)?;
    let ode = parse_ode(equation, &bindings).map_err(wrap)?;
    let expected = spec.expected.as_ref().map(ExpectedFactor::to_factor).transpose().map_err(wrap)?;
    let cfg = spec.budgets.apply(base);

    let start = Instant::now();
    let outcome = search_integrating_factor(&ode, &cfg);
    let wall = u64::try_from(start.elapsed().as_micros()).unwrap_or(u64::MAX);

    let verified = outcome.factor.as_ref().is_some_and(|f| verify_integrating_factor(&ode, f));
    let matches = expected.map(|e| outcome.factor.as_ref().is_some_and(|f| equivalent_up_to_constant(f, &e)));
    Ok(Some(EntryReport::new(&spec.id, &ode, &outcome, verified, matches, wall)))
}

/// Runs a single equation given on the command line.
pub fn run_single(
    equation: &str,
    bindings: &BTreeMap<String, Rational>,
    cfg: &SearchConfig,
) -> Result<RunReport, FrontendError> {
    let spec = OdeSpec {
        id: "input".into(),
        equation: Some(equation.to_string()),
        bindings: bindings
            .iter()
            .map(|(k, v)| (k.clone(), BindingValue::Text(crate::polynomials::format_rational(v))))
            .collect(),
        expected: None,
        budgets: Budgets::default(),
        note: None,
    };
    let entry = run_spec(&spec, cfg).map_err(|e| match e {
        FrontendError::Entry { source, .. } => *source,
        other => other,
    })?;
    Ok(RunReport::new(entry.into_iter().collect(), Vec::new()))
}

/// Runs every entry (concurrently) with its own budgets; the report is
/// ordered by id.
pub fn run_corpus_entries(entries: &[OdeSpec], base: &SearchConfig) -> Result<RunReport, FrontendError> {
    let results: Vec<Result<Option<EntryReport>, FrontendError>> =
        entries.par_iter().map(|spec| run_spec(spec, base)).collect();
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for (spec, r) in entries.iter().zip(results) {
        match r? {
            Some(e) => reports.push(e),
            None => skipped.push(spec.id.clone()),
        }
    }
    Ok(RunReport::new(reports, skipped))
}

pub fn run_corpus(path: &Path) -> Result<RunReport, FrontendError> {
    run_corpus_entries(&load_corpus(path)?, &SearchConfig::default())
}

/// Exit status for `solve`: 0 when a factor was found, 2 otherwise.
pub fn single_exit_code(report: &RunReport) -> i32 {
    if report.entries.iter().all(|e| e.succeeded()) && !report.entries.is_empty() {
        0
    } else {
        2
    }
}

/// Exit status for `corpus`: 2 iff some entry with an expected factor did not
/// produce a matching one.
pub fn corpus_exit_code(report: &RunReport) -> i32 {
    if report.entries.iter().any(|e| e.matches_expected == Some(false)) {
        2
    } else {
        0
    }
}
