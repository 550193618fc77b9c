use std::collections::BTreeMap;

use num_traits::Zero;

use crate::darboux::{apply_d, monomials_up_to, DarbouxPair, OdeField};
use crate::polynomials::{Monomial, MultiPoly, Var};
use crate::solvers::{LinearForm, LinearSystem};

/// `dN/dx + dM/dy`.
pub fn divergence_term(ode: &OdeField) -> MultiPoly {
    &ode.n().differentiate(Var::X) + &ode.m().differentiate(Var::Y)
}

/// Largest degree of `P` compatible with the master equation once the degree
/// of `Q` is fixed: `dQ + max(dM, dN)`.
pub fn degree_bound_p(dq: u32, dm: u32, dn: u32) -> u32 {
    dq + dm.max(dn)
}

/// Every exponent vector `m` with `sum(m_i * deg v_i) = dq`, in descending
/// lexicographic order (so `(dq, 0, ...)` comes first).
pub fn q_compositions(basis: &[DarbouxPair], dq: u32) -> Vec<Vec<u32>> {
    fn go(degrees: &[u32], left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let Some((&d, rest)) = degrees.split_first() else {
            if left == 0 {
                out.push(prefix.clone());
            }
            return;
        };
        for k in (0..=left / d).rev() {
            prefix.push(k);
            go(rest, left - k * d, prefix, out);
            prefix.pop();
        }
    }
    let degrees: Vec<u32> = basis.iter().map(|p| p.degree().max(1)).collect();
    let mut out = Vec::new();
    go(&degrees, dq, &mut Vec::new(), &mut out);
    out
}

/// Names of the undetermined coefficients of a generic `P` of degree `dp`:
/// `a1, a2, ...` over the monomials `1, x, y, x^2, x y, y^2, ...`.
pub fn p_unknown_names(dp: u32) -> Vec<String> {
    (1..=monomials_up_to(i64::from(dp)).len())
        .map(|k| format!("a{k}"))
        .collect()
}

/// Builds the linear system obtained by equating every `(x, y)` coefficient
/// of the master equation to zero.
///
/// Unknowns are `a1..aK` (coefficients of `P`, see [`p_unknown_names`])
/// followed by `n1..nk`, the exponents of the basis elements in `S`.
/// Identical equations are emitted once; trivial `0 = 0` rows are dropped.
pub fn build_master_equation(
    ode: &OdeField,
    basis: &[DarbouxPair],
    m: &[u32],
    dp: u32,
) -> LinearSystem {
    assert_eq!(m.len(), basis.len(), "one exponent per basis element");
    let monos = monomials_up_to(i64::from(dp));
    let mut unknowns = p_unknown_names(dp);
    unknowns.extend((1..=basis.len()).map(|j| format!("n{j}")));

    let mut q = MultiPoly::one();
    let mut q_eigen = MultiPoly::zero();
    for (pair, &mi) in basis.iter().zip(m) {
        if mi > 0 {
            q = &q * &pair.v.pow(mi);
            q_eigen = &q_eigen + &pair.lambda.scale(&crate::polynomials::int(i64::from(mi)));
        }
    }

    // Each unknown contributes a polynomial; collect them column by column.
    let mut columns: Vec<MultiPoly> = Vec::with_capacity(unknowns.len());
    for mono in &monos {
        let p = MultiPoly::term(num_traits::One::one(), mono.clone());
        columns.push(&apply_d(ode, &p) - &(&p * &q_eigen));
    }
    for pair in basis {
        columns.push(&q * &pair.lambda);
    }
    let constant = &q * &divergence_term(ode);

    let mut rows: BTreeMap<Monomial, LinearForm> = BTreeMap::new();
    for (col, poly) in columns.iter().enumerate() {
        for (mono, c) in poly.terms() {
            rows.entry(mono.clone()).or_default().add_coeff(col, c.clone());
        }
    }
    for (mono, c) in constant.terms() {
        rows.entry(mono.clone()).or_default().constant += c;
    }

    let mut sys = LinearSystem::new(unknowns);
    let mut seen: Vec<LinearForm> = Vec::new();
    for form in rows.into_values() {
        if form.coeffs.is_empty() && form.constant.is_zero() {
            continue;
        }
        if seen.contains(&form) {
            continue;
        }
        seen.push(form.clone());
        sys.push(form);
    }
    sys
}
