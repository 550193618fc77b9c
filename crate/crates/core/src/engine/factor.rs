use std::fmt;

use num_traits::Zero;

use super::master::divergence_term;
use crate::darboux::{apply_d, monomials_up_to, DarbouxPair, OdeField};
use crate::polynomials::{format_rational, MultiPoly, PolyError, Rational, RationalFunction};
use crate::solvers::ParametricSolution;

/// `R = exp(P/Q) * prod(v ^ c)`.
///
/// `q_factors` records the Darboux polynomials `Q` was composed from, with
/// their multiplicities in `Q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegratingFactor {
    pub p: MultiPoly,
    pub q: MultiPoly,
    pub q_factors: Vec<(MultiPoly, u32)>,
    pub factors: Vec<(MultiPoly, Rational)>,
}

impl IntegratingFactor {
    /// `R = 1`.
    pub fn trivial() -> Self {
        IntegratingFactor {
            p: MultiPoly::zero(),
            q: MultiPoly::one(),
            q_factors: Vec::new(),
            factors: Vec::new(),
        }
    }

    pub fn exponent(&self) -> RationalFunction {
        RationalFunction::new(self.p.clone(), self.q.clone()).expect("Q is nonzero")
    }

    /// Exponent of the factor `v` (canonical form), zero if absent.
    pub fn exponent_of(&self, v: &MultiPoly) -> Rational {
        let v = v.normalize();
        self.factors
            .iter()
            .find(|(w, _)| *w == v)
            .map_or_else(Rational::zero, |(_, c)| c.clone())
    }
}

impl fmt::Display for IntegratingFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.p.is_zero() {
            if self.q.is_one() {
                parts.push(format!("exp({})", self.p));
            } else {
                parts.push(format!("exp(({})/({}))", self.p, self.q));
            }
        }
        for (v, c) in &self.factors {
            parts.push(format!("({v})^({})", format_rational(c)));
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" * "))
        }
    }
}

/// Builds the factor from a solution of the master equation, with every free
/// unknown set to zero.
pub fn assemble_factor(
    solution: &ParametricSolution,
    basis: &[DarbouxPair],
    m: &[u32],
    dp: u32,
) -> IntegratingFactor {
    let values = solution.zero_free();
    let monos = monomials_up_to(i64::from(dp));
    let mut p = MultiPoly::zero();
    for (mono, a) in monos.iter().zip(&values) {
        p.add_term(mono.clone(), a.clone());
    }
    let mut q = MultiPoly::one();
    let mut q_factors = Vec::new();
    for (pair, &mi) in basis.iter().zip(m) {
        if mi > 0 {
            q = &q * &pair.v.pow(mi);
            q_factors.push((pair.v.clone(), mi));
        }
    }
    let factors = basis
        .iter()
        .zip(&values[monos.len()..])
        .filter(|(_, c)| !c.is_zero())
        .map(|(pair, c)| (pair.v.clone(), c.clone()))
        .collect();
    reduce_and_canonicalize(&IntegratingFactor {
        p,
        q,
        q_factors,
        factors,
    })
    .expect("Q is a nonzero product")
}

fn multiplicity(q: &MultiPoly, v: &MultiPoly) -> u32 {
    let mut k = 0;
    let mut rest = q.clone();
    while let Ok(Some(r)) = rest.divide_exact(v) {
        k += 1;
        rest = r;
    }
    k
}

/// Reduces `P/Q` by its gcd, makes `Q` primitive-positive (the constant is
/// absorbed into `P`), canonicalizes and merges the factor list.
pub fn reduce_and_canonicalize(f: &IntegratingFactor) -> Result<IntegratingFactor, PolyError> {
    if f.q.is_zero() {
        return Err(PolyError::DivisionByZero);
    }
    let (p, q) = if f.p.is_zero() {
        (MultiPoly::zero(), MultiPoly::one())
    } else {
        let g = f.p.gcd(&f.q)?;
        let p = f.p.divide_exact(&g)?.expect("gcd divides P");
        let q = f.q.divide_exact(&g)?.expect("gcd divides Q");
        let c = q.content();
        (p.scale(&c.recip()), q.scale(&c.recip()))
    };

    let mut q_factors: Vec<(MultiPoly, u32)> = Vec::new();
    for (v, _) in &f.q_factors {
        let v = v.normalize();
        if v.is_constant() || q_factors.iter().any(|(w, _)| *w == v) {
            continue;
        }
        let k = multiplicity(&q, &v);
        if k > 0 {
            q_factors.push((v, k));
        }
    }
    q_factors.sort_by(|a, b| a.0.canonical_cmp(&b.0));

    let mut factors: Vec<(MultiPoly, Rational)> = Vec::new();
    for (v, c) in &f.factors {
        let v = v.normalize();
        if v.is_constant() {
            continue;
        }
        match factors.iter_mut().find(|(w, _)| *w == v) {
            Some(slot) => slot.1 += c,
            None => factors.push((v, c.clone())),
        }
    }
    factors.retain(|(_, c)| !c.is_zero());
    factors.sort_by(|a, b| a.0.canonical_cmp(&b.0));

    Ok(IntegratingFactor {
        p,
        q,
        q_factors,
        factors,
    })
}

/// Numerator of `D[R]/R + dN/dx + dM/dy` written over `Q^2`:
/// `Q D[P] - P D[Q] + Q^2 (sum(c_j lambda_j) + dN/dx + dM/dy)`.
///
/// `None` if some factor is not a Darboux polynomial of `ode`.
pub fn verification_residual(ode: &OdeField, f: &IntegratingFactor) -> Option<MultiPoly> {
    let mut log_s = divergence_term(ode);
    for (v, c) in &f.factors {
        let lambda = apply_d(ode, v).divide_exact(v).ok()??;
        log_s = &log_s + &lambda.scale(c);
    }
    let dp = apply_d(ode, &f.p);
    let dq = apply_d(ode, &f.q);
    Some(&(&(&f.q * &dp) - &(&f.p * &dq)) + &(&f.q.pow(2) * &log_s))
}

/// Exact symbolic check that `f` is an integrating factor of `ode`.
pub fn verify_integrating_factor(ode: &OdeField, f: &IntegratingFactor) -> bool {
    !f.q.is_zero() && verification_residual(ode, f).is_some_and(|r| r.is_zero())
}

/// Factors are equal up to a multiplicative constant: the exponents differ by
/// a constant and the factor multisets agree.
pub fn equivalent_up_to_constant(a: &IntegratingFactor, b: &IntegratingFactor) -> bool {
    let (Ok(a), Ok(b)) = (reduce_and_canonicalize(a), reduce_and_canonicalize(b)) else {
        return false;
    };
    if a.factors != b.factors {
        return false;
    }
    a.exponent().sub(&b.exponent()).is_constant()
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

    fn example_one() -> OdeField {
        OdeField::new((x() + MultiPoly::one()) * y(), x() - x() * y() - y().pow(2) + x().pow(2)).unwrap()
    }

    fn known_factor(exp: i64) -> IntegratingFactor {
        IntegratingFactor {
            p: x(),
            q: y(),
            q_factors: vec![(y(), 1)],
            factors: vec![(x() + y(), int(exp))],
        }
    }

    #[test]
    fn verifies_example_one() {
        let ode = example_one();
        assert!(verify_integrating_factor(&ode, &known_factor(-2)));
        assert!(!verify_integrating_factor(&ode, &known_factor(-1)));
        let exact = OdeField::new(-x(), y()).unwrap();
        assert!(verify_integrating_factor(&exact, &IntegratingFactor::trivial()));
    }

    #[test]
    fn reduce_examples() {
        let f = IntegratingFactor { p: x() * y(), q: y().pow(2), q_factors: vec![(y(), 2)], factors: vec![] };
        let r = reduce_and_canonicalize(&f).unwrap();
        assert_eq!((r.p.clone(), r.q.clone(), r.q_factors.clone()), (x(), y(), vec![(y(), 1)]));
        assert_eq!(reduce_and_canonicalize(&r).unwrap(), r);
        let f = IntegratingFactor { p: x().scale(&int(2)), q: y().scale(&int(2)), q_factors: vec![], factors: vec![] };
        let r = reduce_and_canonicalize(&f).unwrap();
        assert_eq!((r.p, r.q), (x(), y()));
        let bad = IntegratingFactor { q: MultiPoly::zero(), ..IntegratingFactor::trivial() };
        assert!(reduce_and_canonicalize(&bad).is_err());
    }

    #[test]
    fn equivalence_ignores_constant_shift() {
        let a = known_factor(-2);
        let b = IntegratingFactor { p: x() + y().scale(&int(3)), ..known_factor(-2) };
        assert!(equivalent_up_to_constant(&a, &b));
        assert!(equivalent_up_to_constant(&a, &a));
        assert!(!equivalent_up_to_constant(&a, &known_factor(-1)));
        // scaled factor polynomial is the same factor up to a constant
        let c = IntegratingFactor { factors: vec![(x().scale(&int(-2)) - y().scale(&int(2)), int(-2))], ..known_factor(-2) };
        assert!(equivalent_up_to_constant(&a, &c));
    }
}
