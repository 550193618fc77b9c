use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::engine::{IntegratingFactor, SearchOutcome, SearchStats};
use crate::polynomials::format_rational;

pub const SCHEMA: &str = "liouvillian-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Found,
    Exhausted,
    Resource,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenReport {
    pub poly: String,
    pub eigenvalue: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerReport {
    pub poly: String,
    pub exponent: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorReport {
    pub p: String,
    pub q: String,
    /// Darboux polynomials `Q` is built from, with integer multiplicities.
    pub q_composition: Vec<PowerReport>,
    pub factors: Vec<PowerReport>,
}

impl From<&IntegratingFactor> for FactorReport {
    fn from(f: &IntegratingFactor) -> Self {
        FactorReport {
            p: f.p.to_string(),
            q: f.q.to_string(),
            q_composition: f
                .q_factors
                .iter()
                .map(|(v, k)| PowerReport { poly: v.to_string(), exponent: k.to_string() })
                .collect(),
            factors: f
                .factors
                .iter()
                .map(|(v, c)| PowerReport { poly: v.to_string(), exponent: format_rational(c) })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoundAtReport {
    pub eigen_degree: u32,
    pub q_degree: u32,
    pub p_degree: u32,
    pub composition: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsReport {
    pub branches_tried: u64,
    pub systems_solved: u64,
    pub eigen_degree_reached: u32,
    pub basis_size: usize,
    pub excluded_irrational: usize,
    pub rejected_unverified: u64,
    /// Common factor of the input `M` and `N` divided out before the search.
    pub common_factor: String,
    pub found_at: Option<FoundAtReport>,
}

impl StatsReport {
    pub fn new(stats: &SearchStats, common_factor: String) -> Self {
        StatsReport {
            branches_tried: stats.branches_tried,
            systems_solved: stats.systems_solved,
            eigen_degree_reached: stats.eigen_degree_reached,
            basis_size: stats.basis_size,
            excluded_irrational: stats.excluded_irrational,
            rejected_unverified: stats.rejected_unverified,
            common_factor,
            found_at: stats.found_at.as_ref().map(|f| FoundAtReport {
                eigen_degree: f.eigen_degree,
                q_degree: f.q_degree,
                p_degree: f.p_degree,
                composition: f.composition.clone(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryReport {
    pub id: String,
    /// Reduced numerator and denominator of `dy/dx`.
    pub m: String,
    pub n: String,
    pub outcome: Outcome,
    pub eigenpolys: Vec<EigenReport>,
    pub factor: Option<FactorReport>,
    pub verified: bool,
    /// `None` when no expected factor was supplied.
    pub matches_expected: Option<bool>,
    pub exhausted: bool,
    pub resource: Option<String>,
    pub stats: StatsReport,
    pub wall_time_us: u64,
}

impl EntryReport {
    pub fn new(
        id: &str,
        ode: &crate::darboux::OdeField,
        outcome: &SearchOutcome,
        verified: bool,
        matches_expected: Option<bool>,
        wall_time_us: u64,
    ) -> Self {
        let kind = if outcome.factor.is_some() {
            Outcome::Found
        } else if outcome.exhausted {
            Outcome::Exhausted
        } else {
            Outcome::Resource
        };
        EntryReport {
            id: id.to_string(),
            m: ode.m().to_string(),
            n: ode.n().to_string(),
            outcome: kind,
            eigenpolys: outcome
                .basis
                .iter()
                .map(|p| EigenReport { poly: p.v.to_string(), eigenvalue: p.lambda.to_string() })
                .collect(),
            factor: outcome.factor.as_ref().map(FactorReport::from),
            verified,
            matches_expected,
            exhausted: outcome.exhausted,
            resource: outcome.resource.as_ref().map(ToString::to_string),
            stats: StatsReport::new(&outcome.stats, ode.common_factor().to_string()),
            wall_time_us,
        }
    }

    /// Found and, if an expectation was given, matching it.
    pub fn succeeded(&self) -> bool {
        self.outcome == Outcome::Found && self.matches_expected != Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub entries: Vec<EntryReport>,
    /// Corpus entries without an equation.
    pub skipped: Vec<String>,
}

impl RunReport {
    pub fn new(entries: Vec<EntryReport>, skipped: Vec<String>) -> Self {
        RunReport { schema: SCHEMA.to_string(), entries, skipped }
    }

    /// The same report with every timing field zeroed.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        for e in &mut r.entries {
            e.wall_time_us = 0;
        }
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown output format '{s}' (expected json or text)")),
        }
    }
}

pub fn emit_report(report: &RunReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => text_report(report),
    }
}

pub fn parse_report(json: &str) -> Result<RunReport, serde_json::Error> {
    serde_json::from_str(json)
}

fn text_report(report: &RunReport) -> String {
    let mut out = String::new();
    for e in &report.entries {
        let status = match e.outcome {
            Outcome::Found => "found",
            Outcome::Exhausted => "exhausted",
            Outcome::Resource => "resource limit",
        };
        let _ = writeln!(out, "{}: {status}", e.id);
        let _ = writeln!(out, "  dy/dx = ({})/({})", e.m, e.n);
        if !e.eigenpolys.is_empty() {
            let list: Vec<String> = e.eigenpolys.iter().map(|p| format!("{} [{}]", p.poly, p.eigenvalue)).collect();
            let _ = writeln!(out, "  darboux polynomials: {}", list.join(", "));
        }
        if let Some(f) = &e.factor {
            let _ = writeln!(out, "  R = {}", factor_text(f));
            let _ = writeln!(out, "  verified: {}", e.verified);
        }
        if let Some(at) = &e.stats.found_at {
            let m: Vec<String> = at.composition.iter().map(u32::to_string).collect();
            let _ = writeln!(
                out,
                "  found at darboux degree {}, deg Q {}, deg P {}, m = ({})",
                at.eigen_degree,
                at.q_degree,
                at.p_degree,
                m.join(", ")
            );
        }
        if let Some(r) = &e.resource {
            let _ = writeln!(out, "  stopped: {r}");
        }
        if let Some(ok) = e.matches_expected {
            let _ = writeln!(out, "  matches expected: {ok}");
        }
        let _ = writeln!(
            out,
            "  {} branches, {} systems, {:.3} ms",
            e.stats.branches_tried,
            e.stats.systems_solved,
            e.wall_time_us as f64 / 1000.0
        );
    }
    for id in &report.skipped {
        let _ = writeln!(out, "{id}: skipped (no equation)");
    }
    out
}

fn factor_text(f: &FactorReport) -> String {
    let mut parts = Vec::new();
    if f.p != "0" {
        if f.q == "1" {
            parts.push(format!("exp({})", f.p));
        } else {
            parts.push(format!("exp(({})/({}))", f.p, f.q));
        }
    }
    for v in &f.factors {
        parts.push(format!("({})^({})", v.poly, v.exponent));
    }
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join(" * ")
    }
}
