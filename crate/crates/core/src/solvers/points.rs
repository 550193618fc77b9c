use std::collections::BTreeMap;

use num_traits::Zero;

use web_time::Instant;

use super::groebner::{groebner_basis, TermOrder};
use super::{rational_roots, PolySystem, SolverError};
use crate::polynomials::{int, MultiPoly, Rational, Var};

/// Caps for [`solve_rational_points_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointLimits {
    /// Maximum number of back-substitution branches explored.
    pub max_branches: usize,
    /// Maximum size of any intermediate Gröbner basis.
    pub max_basis: usize,
    pub deadline: Option<Instant>,
}

impl Default for PointLimits {
    fn default() -> Self {
        PointLimits {
            max_branches: 4096,
            max_basis: 512,
            deadline: None,
        }
    }
}

/// Rational solutions plus diagnostics about what was skipped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RationalPoints {
    pub points: Vec<BTreeMap<Var, Rational>>,
    /// Roots of eliminants that are not rational (counted with multiplicity
    /// of the eliminant degree, not of the solution set).
    pub excluded_irrational: usize,
    /// Unknowns left undetermined by the system and pinned to a value.
    pub pinned_free: usize,
}

/// All rational solutions of `sys`, variables eliminated in index order.
pub fn solve_rational_points(sys: &PolySystem) -> Result<Vec<BTreeMap<Var, Rational>>, SolverError> {
    Ok(solve_rational_points_with(sys, &sys.vars(), PointLimits::default())?.points)
}

/// Rational solutions of `sys` using the lex order `order` (`order[0]`
/// eliminated first). Unknowns the system does not determine are pinned to
/// 0, falling back to a few small integers when 0 does not extend.
pub fn solve_rational_points_with(
    sys: &PolySystem,
    order: &[Var],
    limits: PointLimits,
) -> Result<RationalPoints, SolverError> {
    let mut order: Vec<Var> = order.to_vec();
    for v in sys.vars() {
        if !order.contains(&v) {
            order.push(v);
        }
    }
    let mut state = State {
        limits,
        branches: 0,
        out: RationalPoints::default(),
    };
    state.solve(sys.equations.clone(), &order, BTreeMap::new())?;
    let mut points = std::mem::take(&mut state.out.points);
    points.sort_by(|a, b| a.iter().cmp(b.iter()));
    points.dedup();
    state.out.points = points;
    Ok(state.out)
}

struct State {
    limits: PointLimits,
    branches: usize,
    out: RationalPoints,
}

impl State {
    fn tick(&mut self) -> Result<(), SolverError> {
        self.branches += 1;
        if self.branches > self.limits.max_branches {
            return Err(SolverError::ResourceCap {
                cap: "rational point branches",
                limit: self.limits.max_branches,
            });
        }
        Ok(())
    }

    /// Returns whether at least one point was produced below this node.
    fn solve(
        &mut self,
        eqs: Vec<MultiPoly>,
        order: &[Var],
        assignment: BTreeMap<Var, Rational>,
    ) -> Result<bool, SolverError> {
        self.tick()?;
        let sys = PolySystem::new(eqs);
        if sys.equations.iter().any(|p| p.is_constant()) {
            return Ok(false);
        }
        let Some((&t, rest)) = order.split_last() else {
            self.out.points.push(assignment);
            return Ok(true);
        };
        if sys.equations.is_empty() {
            let mut a = assignment;
            for &v in order {
                a.insert(v, Rational::zero());
            }
            self.out.pinned_free += order.len();
            self.out.points.push(a);
            return Ok(true);
        }
        // A degree-compatible basis detects inconsistency far faster than lex.
        let limits = self.limits;
        let grevlex = groebner_basis(&sys, order, TermOrder::GrevLex, limits.max_basis, limits.deadline)?;
        if grevlex.equations.iter().any(|p| p.is_constant()) {
            return Ok(false);
        }
        let gb = groebner_basis(&grevlex, order, TermOrder::Lex, limits.max_basis, limits.deadline)?;
        if gb.equations.iter().any(|p| p.is_constant()) {
            return Ok(false);
        }
        let eliminant = gb
            .equations
            .iter()
            .find(|p| p.vars().iter().all(|&v| v == t));
        let candidates: Vec<Rational> = match eliminant {
            Some(f) => {
                let roots = rational_roots(f)?;
                self.out.excluded_irrational += (f.degree_in(t) as usize).saturating_sub(roots.len());
                roots
            }
            None => {
                self.out.pinned_free += 1;
                [0, 1, -1, 2, -2].into_iter().map(int).collect()
            }
        };
        let free = eliminant.is_none();
        let mut found = false;
        for r in candidates {
            let values = BTreeMap::from([(t, r.clone())]);
            let next: Vec<MultiPoly> = gb.equations.iter().map(|p| p.eval_partial(&values)).collect();
            let mut a = assignment.clone();
            a.insert(t, r);
            let ok = self.solve(next, rest, a)?;
            found |= ok;
            if free && ok {
                break;
            }
        }
        Ok(found)
    }
}
