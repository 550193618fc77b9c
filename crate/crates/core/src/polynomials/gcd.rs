//! Multivariate gcd by recursive content / primitive-part Euclidean
//! reduction, with the highest-ranked variable present taken as main.

use std::collections::BTreeMap;

use super::{MultiPoly, PolyError, Var};

impl MultiPoly {
    /// Greatest common divisor in canonical (primitive, positive) form.
    /// `gcd(p, 0) = normalize(p)`.
    pub fn gcd(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Err(PolyError::GcdOfZeros),
            (true, false) => Ok(other.normalize()),
            (false, true) => Ok(self.normalize()),
            (false, false) => Ok(gcd_nonzero(self, other).normalize()),
        }
    }

    /// Least common multiple, normalized. Either argument zero gives zero.
    pub fn lcm(&self, other: &MultiPoly) -> MultiPoly {
        lcm(self, other)
    }
}

pub(crate) fn lcm(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() || b.is_zero() {
        return MultiPoly::zero();
    }
    let g = gcd_nonzero(a, b);
    let prod = a * b;
    prod.divide_exact(&g)
        .ok()
        .flatten()
        .expect("gcd divides the product")
        .normalize()
}

fn main_var(a: &MultiPoly, b: &MultiPoly) -> Option<Var> {
    a.vars().into_iter().chain(b.vars()).min()
}

fn gcd_nonzero(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one();
    }
    let v = main_var(a, b).expect("non-constant input has a variable");
    let in_a = a.degree_in(v) > 0;
    let in_b = b.degree_in(v) > 0;
    match (in_a, in_b) {
        (true, false) => gcd_nonzero(&content_in(a, v), b),
        (false, true) => gcd_nonzero(a, &content_in(b, v)),
        (false, false) => unreachable!("main variable occurs in one of the inputs"),
        (true, true) => {
            let ca = content_in(a, v);
            let cb = content_in(b, v);
            let pa = exact(a, &ca);
            let pb = exact(b, &cb);
            let g_content = gcd_nonzero(&ca, &cb);
            let g_prim = primitive_prs(pa, pb, v);
            (&g_content * &g_prim).normalize()
        }
    }
}

fn exact(p: &MultiPoly, d: &MultiPoly) -> MultiPoly {
    p.divide_exact(d)
        .ok()
        .flatten()
        .expect("content divides its polynomial")
}

/// Gcd of the coefficients of `p` as a polynomial in `v`.
fn content_in(p: &MultiPoly, v: Var) -> MultiPoly {
    let mut g: Option<MultiPoly> = None;
    for c in p.coefficients_in(v).into_values() {
        g = Some(match g {
            None => c.normalize(),
            Some(g) => gcd_nonzero(&g, &c),
        });
        if g.as_ref().is_some_and(MultiPoly::is_constant) {
            return MultiPoly::one();
        }
    }
    g.unwrap_or_else(MultiPoly::one)
}

fn leading_in(coeffs: &BTreeMap<u32, MultiPoly>) -> (u32, MultiPoly) {
    let (d, c) = coeffs.iter().next_back().expect("nonzero polynomial");
    (*d, c.clone())
}

/// Pseudo-remainder of `a` by `b` with respect to `v`.
fn prem(a: &MultiPoly, b: &MultiPoly, v: Var) -> MultiPoly {
    let (db, lcb) = leading_in(&b.coefficients_in(v));
    let mut r = a.clone();
    loop {
        if r.is_zero() {
            return r;
        }
        let coeffs = r.coefficients_in(v);
        let (dr, lcr) = leading_in(&coeffs);
        if dr < db {
            return r;
        }
        let shift = MultiPoly::var(v).pow(dr - db);
        r = &(&lcb * &r) - &(&(&lcr * &shift) * b);
        // Keep coefficient growth in check; scaling does not change the gcd.
        r = r.normalize();
    }
}

fn primitive_prs(a: MultiPoly, b: MultiPoly, v: Var) -> MultiPoly {
    let (mut a, mut b) = if a.degree_in(v) >= b.degree_in(v) {
        (a, b)
    } else {
        (b, a)
    };
    loop {
        let r = prem(&a, &b, v);
        if r.is_zero() {
            let c = content_in(&b, v);
            return exact(&b, &c).normalize();
        }
        if r.degree_in(v) == 0 {
            return MultiPoly::one();
        }
        let c = content_in(&r, v);
        a = b;
        b = exact(&r, &c).normalize();
    }
}
