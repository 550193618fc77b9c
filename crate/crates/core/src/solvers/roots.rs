//! Rational roots of univariate polynomials.
//!
//! The primitive integer polynomial `f(t)` of degree `n` with leading
//! coefficient `a` is mapped to the monic `g(s) = a^(n-1) f(s/a)`, whose
//! rational roots are integers. Integer roots are then isolated with Sturm
//! sequences sampled at half-integers, which are never roots of `g`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::SolverError;
use crate::polynomials::{MultiPoly, Rational};

/// Dense univariate polynomial, index = power.
#[derive(Debug, Clone, PartialEq)]
struct UPoly(Vec<Rational>);

impl UPoly {
    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn eval(&self, t: &Rational) -> Rational {
        self.0
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }

    fn derivative(&self) -> UPoly {
        UPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
        .trim()
    }

    fn rem(&self, d: &UPoly) -> UPoly {
        let dd = d.degree().expect("nonzero divisor");
        let lc = d.0[dd].clone();
        let mut r = self.0.clone();
        while r.len() > dd {
            let k = r.len() - 1;
            let c = &r[k] / &lc;
            if !c.is_zero() {
                for (i, a) in d.0.iter().enumerate() {
                    r[k - dd + i] -= &c * a;
                }
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        UPoly(r).trim()
    }

    fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while b.degree().is_some() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }

    fn div_exact(&self, d: &UPoly) -> UPoly {
        let dd = d.degree().expect("nonzero divisor");
        let n = self.degree().expect("nonzero dividend");
        let mut r = self.0.clone();
        let mut q = vec![Rational::zero(); n - dd + 1];
        for k in (dd..=n).rev() {
            let c = &r[k] / &d.0[dd];
            for (i, a) in d.0.iter().enumerate() {
                r[k - dd + i] -= &c * a;
            }
            q[k - dd] = c;
        }
        UPoly(q).trim()
    }
}

struct Sturm(Vec<UPoly>);

impl Sturm {
    fn new(f: &UPoly) -> Sturm {
        let mut seq = vec![f.clone(), f.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].degree().is_none_or(|d| d == 0) {
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.degree().is_none() {
                break;
            }
            seq.push(UPoly(r.0.into_iter().map(|c| -c).collect()));
        }
        Sturm(seq)
    }

    fn variations(&self, t: &Rational) -> usize {
        let signs: Vec<bool> = self
            .0
            .iter()
            .map(|p| p.eval(t))
            .filter(|v| !v.is_zero())
            .map(|v| v.is_positive())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

fn half(k: &BigInt) -> Rational {
    Rational::from_integer(k.clone()) + Rational::new(BigInt::one(), BigInt::from(2))
}

/// Collects integer roots of `g` in `lo..=hi`, given the Sturm sequence of its
/// square-free part. `v_lo`/`v_hi` are sign variations at `lo - 1/2`, `hi + 1/2`.
fn isolate(g: &UPoly, sturm: &Sturm, lo: BigInt, hi: BigInt, v_lo: usize, v_hi: usize, out: &mut Vec<BigInt>) {
    if v_lo <= v_hi {
        return;
    }
    if lo == hi {
        if g.eval(&Rational::from_integer(lo.clone())).is_zero() {
            out.push(lo);
        }
        return;
    }
    let mid: BigInt = (&lo + &hi) >> 1usize;
    let v_mid = sturm.variations(&half(&mid));
    isolate(g, sturm, lo, mid.clone(), v_lo, v_mid, out);
    isolate(g, sturm, mid + 1, hi, v_mid, v_hi, out);
}

/// All distinct rational roots of a univariate polynomial, ascending.
/// Nonzero constants have none.
pub fn rational_roots(p: &MultiPoly) -> Result<Vec<Rational>, SolverError> {
    if p.is_zero() {
        return Err(SolverError::ZeroPolynomial);
    }
    let vars = p.vars();
    if vars.len() > 1 {
        return Err(SolverError::NotUnivariate);
    }
    let Some(&t) = vars.iter().next() else {
        return Ok(Vec::new());
    };
    let n = p.degree_in(t) as usize;
    let mut coeffs = vec![Rational::zero(); n + 1];
    for (m, c) in p.normalize().terms() {
        coeffs[m.exp(t) as usize] = c.clone();
    }
    let mut roots = Vec::new();
    let shift = coeffs.iter().take_while(|c| c.is_zero()).count();
    if shift > 0 {
        roots.push(Rational::zero());
        coeffs.drain(..shift);
    }
    let f = UPoly(coeffs);
    let n = f.degree().unwrap_or(0);
    if n == 0 {
        return Ok(roots);
    }
    let lead = f.0[n].clone();
    // g(s) = lead^(n-1) f(s / lead): coefficient k is f_k * lead^(n-1-k).
    let g = UPoly(
        (0..=n)
            .map(|k| {
                if k == n {
                    Rational::one()
                } else {
                    &f.0[k] * num_traits::pow(lead.clone(), n - 1 - k)
                }
            })
            .collect(),
    );
    let sqfree = g.div_exact(&g.gcd(&g.derivative()));
    let bound: BigInt = g.0[..n]
        .iter()
        .map(|c| c.abs().to_integer())
        .max()
        .unwrap_or_default()
        + 1;
    let sturm = Sturm::new(&sqfree);
    let lo = -bound.clone();
    let hi = bound;
    let v_lo = sturm.variations(&(Rational::from_integer(lo.clone()) - Rational::new(BigInt::one(), BigInt::from(2))));
    let v_hi = sturm.variations(&half(&hi));
    let mut ints = Vec::new();
    isolate(&g, &sturm, lo, hi, v_lo, v_hi, &mut ints);
    roots.extend(ints.into_iter().map(|s| Rational::from_integer(s) / &lead));
    roots.sort();
    roots.dedup();
    Ok(roots)
}
