//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every function takes plain strings and numbers and returns a JSON string;
//! failures come back as `{"error": "..."}`.

use std::collections::BTreeMap;
use std::time::Duration;

use liouvillian::frontend::{emit_report, parse_binding, parse_ode, run_single, Format};
use liouvillian::{eigen_candidates, OdeField, Rational, SearchConfig};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn error(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

/// `"a=1, b=-2/3"` (commas or whitespace between bindings).
fn bindings(text: &str) -> Result<BTreeMap<String, Rational>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| parse_binding(s).map_err(|e| e.to_string()))
        .collect()
}

fn field(equation: &str, binds: &str) -> Result<OdeField, String> {
    parse_ode(equation, &bindings(binds)?).map_err(|e| e.to_string())
}

/// The reduced field `dy/dx = M/N`.
#[wasm_bindgen]
pub fn parse_equation(equation: &str, binds: &str) -> String {
    match field(equation, binds) {
        Ok(ode) => json!({
            "m": ode.m().to_string(),
            "n": ode.n().to_string(),
            "common_factor": ode.common_factor().to_string(),
        })
        .to_string(),
        Err(e) => error(e),
    }
}

/// Darboux polynomials of degree `degree` with their eigenvalues.
#[wasm_bindgen]
pub fn darboux_polynomials(equation: &str, binds: &str, degree: u32) -> String {
    if degree == 0 || degree > 3 {
        return error("degree must be 1, 2 or 3");
    }
    let ode = match field(equation, binds) {
        Ok(ode) => ode,
        Err(e) => return error(e),
    };
    match eigen_candidates(&ode, degree) {
        Ok(pairs) => Value::Array(
            pairs
                .iter()
                .map(|p| json!({ "poly": p.v.to_string(), "eigenvalue": p.lambda.to_string() }))
                .collect(),
        )
        .to_string(),
        Err(e) => error(e),
    }
}

/// Runs the search and returns the machine report.
#[wasm_bindgen]
pub fn find_integrating_factor(equation: &str, binds: &str, max_q_degree: u32, timeout_secs: f64) -> String {
    let binds = match bindings(binds) {
        Ok(b) => b,
        Err(e) => return error(e),
    };
    let cfg = SearchConfig {
        max_q_degree,
        time_budget: Duration::from_secs_f64(timeout_secs.clamp(0.0, 600.0)),
        ..SearchConfig::default()
    };
    match run_single(equation, &binds, &cfg) {
        Ok(report) => emit_report(&report, Format::Json),
        Err(e) => error(e),
    }
}
