//! The integrating-factor search.
//!
//! For an ODE `dy/dx = M/N` with derivation `D`, a factor
//! `R = exp(P/Q) * prod(v_j ^ c_j)` satisfies `D[R]/R = -(dN/dx + dM/dy)`.
//! With `Q = prod(q_i ^ m_i)` built from Darboux polynomials `q_i` (eigenvalues
//! `l_i`) and the `v_j` Darboux with eigenvalues `s_j`, that condition becomes
//! the polynomial identity
//!
//! ```text
//! D[P] - P * sum(m_i l_i) + Q * (sum(c_j s_j) + dN/dx + dM/dy) = 0
//! ```
//!
//! which is linear in the coefficients of `P` and in the `c_j` once the
//! Darboux basis and the exponents `m_i` are fixed.

mod factor;
mod master;
mod plant;
mod search;

pub use factor::{
    assemble_factor, equivalent_up_to_constant, reduce_and_canonicalize, verification_residual,
    verify_integrating_factor, IntegratingFactor,
};
pub use master::{build_master_equation, degree_bound_p, divergence_term, p_unknown_names, q_compositions};
pub use plant::plant_from_first_integral;
pub use search::{
    search_integrating_factor, FoundAt, ResourceLimit, SearchConfig, SearchOutcome, SearchStats,
};

use thiserror::Error;

use crate::darboux::FieldError;
use crate::polynomials::PolyError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("planted first integral is constant")]
    ConstantFirstIntegral,
}
