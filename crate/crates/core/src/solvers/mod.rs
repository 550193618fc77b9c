//! Exact solvers: linear systems with free-variable parametrization, and
//! zero-dimensional polynomial systems restricted to rational points.

mod groebner;
mod linear;
mod points;
mod roots;

pub use groebner::{elimination_basis, elimination_basis_capped, reduce_by, s_polynomial};
pub use linear::{solve_linear_exact, LinearForm, LinearSystem, ParametricSolution};
pub use points::{solve_rational_points, solve_rational_points_with, PointLimits, RationalPoints};
pub use roots::rational_roots;

use thiserror::Error;

use crate::polynomials::{MultiPoly, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("resource cap exceeded: {cap} (limit {limit})")]
    ResourceCap { cap: &'static str, limit: usize },
    #[error("rational roots of the zero polynomial are undefined")]
    ZeroPolynomial,
    #[error("polynomial is not univariate")]
    NotUnivariate,
    #[error("deadline passed")]
    Deadline,
}

/// A list of polynomial equations in auxiliary unknowns, each asserted `= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolySystem {
    pub equations: Vec<MultiPoly>,
}

impl PolySystem {
    pub fn new(equations: impl IntoIterator<Item = MultiPoly>) -> Self {
        PolySystem {
            equations: equations.into_iter().filter(|p| !p.is_zero()).collect(),
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.equations.iter().flat_map(|p| p.vars()).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// The system is coefficient-extracted: no `x` or `y` remain.
    pub fn is_auxiliary_only(&self) -> bool {
        self.equations.iter().all(|p| p.only_vars(Var::is_aux))
    }
}
