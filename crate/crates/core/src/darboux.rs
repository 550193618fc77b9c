//! The derivation `D = N d/dx + M d/dy` of an ODE `dy/dx = M/N` and its
//! Darboux polynomials (eigenpolynomials): `D[v] = lambda * v` with a
//! polynomial eigenvalue `lambda`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::polynomials::{Monomial, MultiPoly, Rational, Var};
use crate::solvers::{solve_rational_points_with, PointLimits, PolySystem, SolverError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("the denominator N of dy/dx = M/N is zero")]
    ZeroDenominator,
    #[error("M and N may only depend on x and y (found {0})")]
    ForeignVariable(Var),
}

/// The ODE `dy/dx = M/N`, stored with `gcd(M, N) = 1`, integer coefficients
/// with no common content, and `N` having a positive leading coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OdeField {
    m: MultiPoly,
    n: MultiPoly,
    common_factor: MultiPoly,
}

impl OdeField {
    pub fn new(m: MultiPoly, n: MultiPoly) -> Result<Self, FieldError> {
        if n.is_zero() {
            return Err(FieldError::ZeroDenominator);
        }
        for p in [&m, &n] {
            if let Some(v) = p.vars().into_iter().find(|v| v.is_aux()) {
                return Err(FieldError::ForeignVariable(v));
            }
        }
        let g = m.gcd(&n).expect("n is nonzero");
        let (m, n) = if g.is_one() {
            (m, n)
        } else {
            (
                m.divide_exact(&g).unwrap().expect("gcd divides M"),
                n.divide_exact(&g).unwrap().expect("gcd divides N"),
            )
        };
        // Joint content: make the pair integer-primitive with lc(N) > 0.
        let joint = &(&m * &MultiPoly::var(Var::aux(0))) + &n;
        let mut inv = joint.content().abs().recip();
        if n.leading_coeff().is_negative() {
            inv = -inv;
        }
        Ok(OdeField {
            m: m.scale(&inv),
            n: n.scale(&inv),
            common_factor: g,
        })
    }

    pub fn m(&self) -> &MultiPoly {
        &self.m
    }

    pub fn n(&self) -> &MultiPoly {
        &self.n
    }

    /// Common factor of the original `M` and `N` removed at construction.
    pub fn common_factor(&self) -> &MultiPoly {
        &self.common_factor
    }

    /// `max(deg M, deg N)`, with the zero polynomial counted as degree 0.
    pub fn degree(&self) -> u32 {
        self.m.total_degree().max(self.n.total_degree()).max(0) as u32
    }

    pub fn scaled(&self, k: &Rational) -> Result<OdeField, FieldError> {
        OdeField::new(self.m.scale(k), self.n.scale(k))
    }
}

impl fmt::Display for OdeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dy/dx = ({})/({})", self.m, self.n)
    }
}

/// `D[p] = N * dp/dx + M * dp/dy`.
pub fn apply_d(ode: &OdeField, p: &MultiPoly) -> MultiPoly {
    &(&ode.n * &p.differentiate(Var::X)) + &(&ode.m * &p.differentiate(Var::Y))
}

/// An eigenpolynomial `v` (canonical form) with its eigenvalue.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DarbouxPair {
    pub v: MultiPoly,
    pub lambda: MultiPoly,
}

impl DarbouxPair {
    /// Normalizes `v` and computes `lambda = D[v] / v`; `None` unless `v` is
    /// a non-constant Darboux polynomial.
    pub fn from_poly(ode: &OdeField, v: &MultiPoly) -> Option<DarbouxPair> {
        if v.is_constant() {
            return None;
        }
        let v = v.normalize();
        let lambda = apply_d(ode, &v).divide_exact(&v).ok()??;
        Some(DarbouxPair { v, lambda })
    }

    pub fn degree(&self) -> u32 {
        self.v.total_degree() as u32
    }

    pub fn holds_for(&self, ode: &OdeField) -> bool {
        apply_d(ode, &self.v) == &self.lambda * &self.v
    }
}

/// How degree-`d` candidates are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenMethod {
    /// Line substitution for degree 1, bilinear system otherwise.
    #[default]
    Auto,
    /// Always solve the bilinear undetermined-coefficient system.
    Bilinear,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EigenSearch {
    pub pairs: Vec<DarbouxPair>,
    pub excluded_irrational: usize,
    pub pinned_free: usize,
}

/// All rational Darboux polynomials of exactly `degree`, canonical and sorted.
pub fn eigen_candidates(ode: &OdeField, degree: u32) -> Result<Vec<DarbouxPair>, SolverError> {
    Ok(eigen_candidates_with(ode, degree, EigenMethod::Auto, PointLimits::default())?.pairs)
}

pub fn eigen_candidates_with(
    ode: &OdeField,
    degree: u32,
    method: EigenMethod,
    limits: PointLimits,
) -> Result<EigenSearch, SolverError> {
    assert!(degree >= 1, "eigenpolynomial degree must be positive");
    let mut out = EigenSearch::default();
    let mut polys: Vec<MultiPoly> = Vec::new();
    if degree == 1 && method == EigenMethod::Auto {
        for (sys, order, build) in line_branches(ode) {
            let pts = solve_rational_points_with(&sys, &order, limits)?;
            out.excluded_irrational += pts.excluded_irrational;
            out.pinned_free += pts.pinned_free;
            polys.extend(pts.points.iter().map(build));
        }
    } else {
        for branch in bilinear_branches(ode, degree) {
            let pts = solve_rational_points_with(&branch.system, &branch.order, limits)?;
            out.excluded_irrational += pts.excluded_irrational;
            out.pinned_free += pts.pinned_free;
            polys.extend(pts.points.iter().map(|p| branch.v.eval_partial(&fill(p, &branch.order))));
        }
    }
    let mut pairs: Vec<DarbouxPair> = polys
        .iter()
        .filter(|v| v.total_degree() == i64::from(degree))
        .filter_map(|v| DarbouxPair::from_poly(ode, v))
        .collect();
    sort_dedup(&mut pairs);
    out.pairs = pairs;
    Ok(out)
}

fn fill(point: &BTreeMap<Var, Rational>, vars: &[Var]) -> BTreeMap<Var, Rational> {
    vars.iter()
        .map(|v| (*v, point.get(v).cloned().unwrap_or_else(Rational::zero)))
        .collect()
}

fn sort_dedup(pairs: &mut Vec<DarbouxPair>) {
    pairs.sort_by(|a, b| a.v.canonical_cmp(&b.v));
    pairs.dedup_by(|a, b| a.v == b.v);
}

type LineBuilder = Box<dyn Fn(&BTreeMap<Var, Rational>) -> MultiPoly>;

/// The two normalization branches for lines: `x + b y + c` and `y + c`.
/// A line divides `D[v]` iff `D[v]` vanishes identically on it.
fn line_branches(ode: &OdeField) -> Vec<(PolySystem, Vec<Var>, LineBuilder)> {
    let (b, c) = (Var::aux(0), Var::aux(1));
    let bp = MultiPoly::var(b);
    let cp = MultiPoly::var(c);

    // v = x + b y + c: D[v] = N + b M restricted to x = -b y - c
    let dv = ode.n() + &(&bp * ode.m());
    let on_line = dv.compose(&BTreeMap::from([(Var::X, -&(&(&bp * &MultiPoly::y()) + &cp))]));
    let sys_a = PolySystem::new(on_line.coefficients_wrt(|v| v == Var::Y).into_values());
    let build_a: LineBuilder = Box::new(move |p| {
        let f = fill(p, &[b, c]);
        &(&MultiPoly::x() + &MultiPoly::y().scale(&f[&b])) + &MultiPoly::constant(f[&c].clone())
    });

    // v = y + c: D[v] = M restricted to y = -c
    let on_line = ode.m().compose(&BTreeMap::from([(Var::Y, -&cp)]));
    let sys_b = PolySystem::new(on_line.coefficients_wrt(|v| v == Var::X).into_values());
    let build_b: LineBuilder = Box::new(move |p| {
        let f = fill(p, &[c]);
        &MultiPoly::y() + &MultiPoly::constant(f[&c].clone())
    });

    vec![(sys_a, vec![c, b], build_a), (sys_b, vec![c], build_b)]
}

struct BilinearBranch {
    system: PolySystem,
    /// Elimination order: eigenvalue coefficients first.
    order: Vec<Var>,
    /// Generic `v` in `x`, `y` and the coefficient unknowns.
    v: MultiPoly,
}

/// Monomials in `x`, `y` of total degree exactly `d`, grlex descending.
fn monomials_of_degree(d: u32) -> Vec<Monomial> {
    (0..=d).rev().map(|i| Monomial::xy(i, d - i)).collect()
}

/// Monomials in `x`, `y` of total degree at most `d`: ascending degree,
/// `x`-heavy first within a degree (1, x, y, x^2, x y, y^2, ...).
pub fn monomials_up_to(d: i64) -> Vec<Monomial> {
    (0..=d.max(-1)).flat_map(|k| monomials_of_degree(k as u32)).collect()
}

/// `D[v] - lambda v = 0` with undetermined coefficients, one branch per
/// choice of leading monomial of `v` (its coefficient pinned to 1).
fn bilinear_branches(ode: &OdeField, degree: u32) -> Vec<BilinearBranch> {
    let lambda_monos = monomials_up_to(i64::from(ode.degree()) - 1);
    let lambda_vars: Vec<Var> = (0..lambda_monos.len()).map(|i| Var::aux(i as u16)).collect();
    let lambda = MultiPoly::from_terms(
        lambda_monos
            .iter()
            .zip(&lambda_vars)
            .map(|(m, &v)| (m.mul(&Monomial::var(v)), Rational::one())),
    );
    let top = monomials_of_degree(degree);
    let lower = monomials_up_to(i64::from(degree) - 1);
    let base = lambda_vars.len() as u16;
    let mut branches = Vec::new();
    for k in 0..top.len() {
        let free_monos: Vec<&Monomial> = top[k + 1..].iter().chain(lower.iter()).collect();
        let coeff_vars: Vec<Var> = (0..free_monos.len()).map(|i| Var::aux(base + i as u16)).collect();
        let mut v = MultiPoly::term(Rational::one(), top[k].clone());
        for (m, &u) in free_monos.iter().zip(&coeff_vars) {
            v.add_term(m.mul(&Monomial::var(u)), Rational::one());
        }
        let residual = &apply_d(ode, &v) - &(&lambda * &v);
        let system = PolySystem::new(
            residual
                .coefficients_wrt(|w| w == Var::X || w == Var::Y)
                .into_values(),
        );
        let mut order = lambda_vars.clone();
        order.extend(coeff_vars);
        branches.push(BilinearBranch { system, order, v });
    }
    branches
}

/// Splits composite eigenpolynomials by exact division against the others,
/// until no retained polynomial divides another. The quotient of two
/// Darboux polynomials is Darboux with the difference of the eigenvalues.
pub fn reduce_basis(pairs: &[DarbouxPair]) -> Vec<DarbouxPair> {
    let mut work: Vec<DarbouxPair> = pairs
        .iter()
        .filter(|p| !p.v.is_constant())
        .map(|p| {
            let c = p.v.content();
            DarbouxPair {
                v: p.v.scale(&c.recip()),
                lambda: p.lambda.clone(),
            }
        })
        .collect();
    sort_dedup(&mut work);
    'outer: loop {
        for i in 0..work.len() {
            for j in 0..work.len() {
                if i == j {
                    continue;
                }
                let Ok(Some(q)) = work[i].v.divide_exact(&work[j].v) else {
                    continue;
                };
                let lambda = &work[i].lambda - &work[j].lambda;
                let c = q.content();
                let quotient = DarbouxPair {
                    v: q.scale(&c.recip()),
                    lambda,
                };
                work.remove(i);
                if !quotient.v.is_constant() {
                    work.push(quotient);
                }
                sort_dedup(&mut work);
                continue 'outer;
            }
        }
        break;
    }
    work.sort_by(|a, b| a.v.canonical_cmp(&b.v));
    work
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomials::int;

    fn x() -> MultiPoly {
        MultiPoly::x()
    }
    fn y() -> MultiPoly {
        MultiPoly::y()
    }
    fn c(n: i64) -> MultiPoly {
        MultiPoly::from_int(n)
    }

    fn example_one() -> OdeField {
        let m = (x() + c(1)) * y();
        let n = x() - x() * y() - y().pow(2) + x().pow(2);
        OdeField::new(m, n).unwrap()
    }

    #[test]
    fn apply_d_on_example_one() {
        let ode = example_one();
        assert_eq!(apply_d(&ode, &y()), (x() + c(1)) * y());
        assert_eq!(apply_d(&ode, &(x() + y())), (c(1) + x() - y()) * (x() + y()));
        assert!(apply_d(&ode, &MultiPoly::one()).is_zero());
    }

    #[test]
    fn field_is_reduced_and_scaled() {
        let g = x() + c(2);
        let ode = OdeField::new(y().scale(&int(3)) * g.clone(), x().scale(&int(6)) * g.clone()).unwrap();
        assert_eq!(ode.m(), &y());
        assert_eq!(ode.n(), &x().scale(&int(2)));
        assert_eq!(ode.common_factor(), &g);
        assert_eq!(OdeField::new(x(), MultiPoly::zero()), Err(FieldError::ZeroDenominator));
        let zero_m = OdeField::new(MultiPoly::zero(), x()).unwrap();
        assert_eq!(zero_m.n(), &MultiPoly::one());
    }

    #[test]
    fn example_one_lines() {
        let pairs = eigen_candidates(&example_one(), 1).unwrap();
        assert_eq!(
            pairs,
            vec![
                DarbouxPair { v: y(), lambda: x() + c(1) },
                DarbouxPair { v: x() + y(), lambda: c(1) + x() - y() },
            ]
        );
    }

    #[test]
    fn radial_field_lines() {
        let ode = OdeField::new(y(), x()).unwrap();
        let pairs = eigen_candidates(&ode, 1).unwrap();
        let vs: Vec<_> = pairs.iter().map(|p| p.v.clone()).collect();
        assert_eq!(vs, vec![y(), x()]);
        assert!(pairs.iter().all(|p| p.lambda == MultiPoly::one()));
    }

    #[test]
    fn bilinear_agrees_with_lines_on_example_one() {
        let ode = example_one();
        let lines = eigen_candidates(&ode, 1).unwrap();
        let bil = eigen_candidates_with(&ode, 1, EigenMethod::Bilinear, PointLimits::default()).unwrap();
        assert_eq!(lines, bil.pairs);
    }

    #[test]
    fn reduce_basis_splits_products() {
        let l1 = x() + c(1);
        let l2 = c(1) + x() - y();
        let p1 = DarbouxPair { v: y(), lambda: l1.clone() };
        let p2 = DarbouxPair { v: x() + y(), lambda: l2.clone() };
        let sq = DarbouxPair { v: y().pow(2), lambda: l1.scale(&int(2)) };
        assert_eq!(reduce_basis(&[p1.clone(), sq]), vec![p1.clone()]);
        assert_eq!(reduce_basis(&[p1.clone(), p2.clone()]), vec![p1.clone(), p2.clone()]);
        let prod = DarbouxPair { v: y() * (x() + y()), lambda: &l1 + &l2 };
        assert_eq!(reduce_basis(&[prod, p1.clone()]), vec![p1, p2]);
    }
}
