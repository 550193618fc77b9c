//! Liouvillian integrating factors for planar polynomial ODEs.
//!
//! Given `dy/dx = M/N` with rational coefficients, the search looks for
//! `R = exp(P/Q) * prod(v_j ^ c_j)` with `Q` and the `v_j` Darboux polynomials
//! of the field, escalating the Darboux degree, the degree of `Q`, its
//! composition and the degree of `P` in turn. Arithmetic is exact throughout
//! and every returned factor has been verified symbolically.

pub mod darboux;
pub mod engine;
pub mod frontend;
pub mod polynomials;
pub mod solvers;

pub use darboux::{apply_d, eigen_candidates, reduce_basis, DarbouxPair, OdeField};
pub use engine::{
    search_integrating_factor, verify_integrating_factor, IntegratingFactor, SearchConfig,
    SearchOutcome,
};
pub use polynomials::{MultiPoly, PolyError, Rational, RationalFunction, Var};
