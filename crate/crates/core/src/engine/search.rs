use std::time::Duration;

use rayon::prelude::*;
use web_time::Instant;

use super::factor::{assemble_factor, verify_integrating_factor, IntegratingFactor};
use super::master::{build_master_equation, degree_bound_p, q_compositions};
use crate::darboux::{eigen_candidates_with, reduce_basis, DarbouxPair, EigenMethod, OdeField};
use crate::solvers::{solve_linear_exact, ParametricSolution, PointLimits, SolverError};

/// Escalation budgets for [`search_integrating_factor`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    /// Highest degree of Darboux polynomials computed.
    pub max_eigen_degree: u32,
    /// Highest degree of `Q` tried.
    pub max_q_degree: u32,
    /// Replaces the `dQ + max(dM, dN)` bound on the degree of `P`.
    pub max_p_degree: Option<u32>,
    /// Maximum number of `Q`-compositions examined. Zero examines none.
    pub branch_cap: u64,
    pub time_budget: Duration,
    /// Evaluate the compositions of one `Q` degree concurrently.
    pub parallel: bool,
    pub point_limits: PointLimits,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_eigen_degree: 1,
            max_q_degree: 2,
            max_p_degree: None,
            branch_cap: 100_000,
            time_budget: Duration::from_secs(120),
            parallel: false,
            point_limits: PointLimits::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResourceLimit {
    BranchCap,
    TimeBudget,
    Solver(String),
}

impl std::fmt::Display for ResourceLimit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ResourceLimit::BranchCap => f.write_str("branch cap reached"),
            ResourceLimit::TimeBudget => f.write_str("time budget exhausted"),
            ResourceLimit::Solver(msg) => write!(f, "solver: {msg}"),
        }
    }
}

/// Where in the loop the factor was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoundAt {
    pub eigen_degree: u32,
    pub q_degree: u32,
    pub p_degree: u32,
    pub composition: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SearchStats {
    /// `Q`-compositions examined.
    pub branches_tried: u64,
    /// Linear systems built and solved.
    pub systems_solved: u64,
    pub eigen_degree_reached: u32,
    pub basis_size: usize,
    /// Non-rational eigenpolynomial coefficient points skipped.
    pub excluded_irrational: usize,
    /// Solutions whose assembled factor failed verification. Never returned.
    pub rejected_unverified: u64,
    pub found_at: Option<FoundAt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub factor: Option<IntegratingFactor>,
    /// Darboux polynomials found, in canonical order.
    pub basis: Vec<DarbouxPair>,
    pub stats: SearchStats,
    /// Every budgeted branch was examined without success.
    pub exhausted: bool,
    pub resource: Option<ResourceLimit>,
}

struct Timeout;

enum BranchResult {
    Solved { dp: u32, solution: ParametricSolution, systems: u64 },
    Inconsistent { systems: u64 },
}

/// Smallest `dp` in `0..=dp_max` whose master equation is consistent.
///
/// A solution for some `dp` extends by zeros to every larger `dp`, so the
/// system at `dp_max` is solved first and the ascent happens only when it is
/// consistent. The result is the one the plain ascending loop would give.
fn solve_branch(
    ode: &OdeField,
    basis: &[DarbouxPair],
    m: &[u32],
    dp_max: u32,
    deadline: Instant,
) -> Result<BranchResult, Timeout> {
    let mut systems = 0;
    let mut attempt = |dp: u32| -> Result<Option<ParametricSolution>, Timeout> {
        if Instant::now() > deadline {
            return Err(Timeout);
        }
        systems += 1;
        Ok(solve_linear_exact(&build_master_equation(ode, basis, m, dp)))
    };
    let Some(top) = attempt(dp_max)? else {
        return Ok(BranchResult::Inconsistent { systems });
    };
    for dp in 0..dp_max {
        if let Some(solution) = attempt(dp)? {
            return Ok(BranchResult::Solved { dp, solution, systems });
        }
    }
    Ok(BranchResult::Solved { dp: dp_max, solution: top, systems })
}

/// Steps through Darboux degree, then `Q` degree, then `Q`-composition, then
/// `P` degree, returning the first verified factor in that order.
pub fn search_integrating_factor(ode: &OdeField, cfg: &SearchConfig) -> SearchOutcome {
    let start = Instant::now();
    let deadline = start + cfg.time_budget;
    let mut stats = SearchStats::default();
    let mut basis: Vec<DarbouxPair> = Vec::new();

    let resource = |stats: SearchStats, basis: Vec<DarbouxPair>, limit: ResourceLimit| SearchOutcome {
        factor: None,
        basis,
        stats,
        exhausted: false,
        resource: Some(limit),
    };

    // dy/dx = 0 is already exact.
    if ode.m().is_zero() {
        let factor = IntegratingFactor::trivial();
        debug_assert!(verify_integrating_factor(ode, &factor));
        stats.found_at = Some(FoundAt {
            eigen_degree: 0,
            q_degree: 0,
            p_degree: 0,
            composition: Vec::new(),
        });
        return SearchOutcome {
            factor: Some(factor),
            basis,
            stats,
            exhausted: false,
            resource: None,
        };
    }

    let field_degree = ode.degree();
    for eigen_degree in 1..=cfg.max_eigen_degree {
        if Instant::now() > deadline {
            return resource(stats, basis, ResourceLimit::TimeBudget);
        }
        let limits = PointLimits { deadline: Some(deadline), ..cfg.point_limits };
        let found = match eigen_candidates_with(ode, eigen_degree, EigenMethod::Auto, limits) {
            Ok(found) => found,
            Err(SolverError::Deadline) => return resource(stats, basis, ResourceLimit::TimeBudget),
            Err(e) => return resource(stats, basis, ResourceLimit::Solver(e.to_string())),
        };
        stats.excluded_irrational += found.excluded_irrational;
        basis.extend(found.pairs);
        basis = reduce_basis(&basis);
        stats.eigen_degree_reached = eigen_degree;
        stats.basis_size = basis.len();

        for dq in 0..=cfg.max_q_degree {
            let comps = q_compositions(&basis, dq);
            if comps.is_empty() {
                continue;
            }
            let dp_max = cfg
                .max_p_degree
                .unwrap_or_else(|| degree_bound_p(dq, field_degree, field_degree));
            let remaining = cfg.branch_cap.saturating_sub(stats.branches_tried);
            let take = comps.len().min(usize::try_from(remaining).unwrap_or(usize::MAX));
            let run = |m: &Vec<u32>| solve_branch(ode, &basis, m, dp_max, deadline);
            // Serial runs evaluate lazily and stop at the first success.
            let results: Box<dyn Iterator<Item = Result<BranchResult, Timeout>> + '_> = if cfg.parallel {
                let all: Vec<_> = comps[..take].par_iter().map(run).collect();
                Box::new(all.into_iter())
            } else {
                Box::new(comps[..take].iter().map(run))
            };
            // Commit in canonical order so parallel and serial runs agree.
            for (m, r) in comps.iter().zip(results) {
                stats.branches_tried += 1;
                match r {
                    Err(Timeout) => return resource(stats, basis.clone(), ResourceLimit::TimeBudget),
                    Ok(BranchResult::Inconsistent { systems }) => stats.systems_solved += systems,
                    Ok(BranchResult::Solved { dp, solution, systems }) => {
                        stats.systems_solved += systems;
                        let factor = assemble_factor(&solution, &basis, m, dp);
                        if verify_integrating_factor(ode, &factor) {
                            stats.found_at = Some(FoundAt {
                                eigen_degree,
                                q_degree: dq,
                                p_degree: dp,
                                composition: m.clone(),
                            });
                            return SearchOutcome {
                                factor: Some(factor),
                                basis: basis.clone(),
                                stats,
                                exhausted: false,
                                resource: None,
                            };
                        }
                        stats.rejected_unverified += 1;
                    }
                }
            }
            if take < comps.len() {
                return resource(stats, basis.clone(), ResourceLimit::BranchCap);
            }
        }
    }
    SearchOutcome {
        factor: None,
        basis,
        stats,
        exhausted: true,
        resource: None,
    }
}
