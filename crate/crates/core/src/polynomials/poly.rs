use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{format_rational, Monomial, PolyError, Rational, RationalFunction, Var};

/// Sparse multivariate polynomial with rational coefficients.
///
/// Terms are kept in a map ordered by graded lexicographic order, so the
/// last entry is the leading term. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn var(v: Var) -> Self {
        Self::term(Rational::one(), Monomial::var(v))
    }

    pub fn x() -> Self {
        Self::var(Var::X)
    }

    pub fn y() -> Self {
        Self::var(Var::Y)
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = MultiPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.coeff(&Monomial::one()).is_one()
    }

    /// True for the zero polynomial and nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(self.coeff(&Monomial::one()))
        } else {
            None
        }
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `-1` for the zero polynomial.
    pub fn total_degree(&self) -> i64 {
        self.terms
            .keys()
            .next_back()
            .map_or(-1, |m| i64::from(m.degree()))
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    /// Leading term under graded lexicographic order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading_term()
            .map_or_else(Rational::zero, |(_, c)| c.clone())
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.vars()).collect()
    }

    /// True if every variable occurring in `self` is accepted by `pred`.
    pub fn only_vars(&self, pred: impl Fn(Var) -> bool) -> bool {
        self.terms.keys().all(|m| m.vars().all(&pred))
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_term(&self, c: &Rational, mono: &Monomial) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.mul(mono), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut result = MultiPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Exact partial derivative with respect to `v`.
    pub fn differentiate(&self, v: Var) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_var(v);
            if e == 0 {
                continue;
            }
            let mono = rest.mul(&Monomial::var_pow(v, e - 1));
            out.add_term(mono, c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Returns `r` with `self = q * r`, or `None` if `q` does not divide `self`.
    pub fn divide_exact(&self, q: &MultiPoly) -> Result<Option<MultiPoly>, PolyError> {
        let (lm_q, lc_q) = q.leading_term().ok_or(PolyError::DivisionByZero)?;
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero();
        while let Some((lm_r, lc_r)) = rem.leading_term() {
            let Some(mono) = lm_r.div(lm_q) else {
                return Ok(None);
            };
            let c = lc_r / lc_q;
            rem = &rem - &q.mul_term(&c, &mono);
            quot.add_term(mono, c);
        }
        Ok(Some(quot))
    }

    /// The rational `c` with `self = c * self.normalize()`. Zero for zero.
    pub fn content(&self) -> Rational {
        if self.is_zero() {
            return Rational::zero();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let content = Rational::new(num_gcd, den_lcm);
        if self.leading_coeff().is_negative() {
            -content
        } else {
            content
        }
    }

    /// Primitive integer form with positive leading coefficient.
    pub fn normalize(&self) -> MultiPoly {
        if self.is_zero() {
            return MultiPoly::zero();
        }
        self.scale(&self.content().recip())
    }

    pub fn is_normalized(&self) -> bool {
        self.is_zero() || self.content().is_one()
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `v`.
    pub fn coefficients_in(&self, v: Var) -> BTreeMap<u32, MultiPoly> {
        let mut out: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_var(v);
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out
    }

    /// Coefficients of `self` with respect to the variables accepted by
    /// `main`; each coefficient is a polynomial in the remaining variables.
    pub fn coefficients_wrt(&self, main: impl Fn(Var) -> bool) -> BTreeMap<Monomial, MultiPoly> {
        let mut out: BTreeMap<Monomial, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (head, rest) = m.restrict(&main);
            out.entry(head).or_default().add_term(rest, c.clone());
        }
        out
    }

    /// Substitutes polynomials for variables (composition).
    pub fn compose(&self, bindings: &BTreeMap<Var, MultiPoly>) -> MultiPoly {
        let mut cache: BTreeMap<(Var, u32), MultiPoly> = BTreeMap::new();
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let mut acc = MultiPoly::one();
            let mut kept = Vec::new();
            for &(v, e) in m.pairs() {
                match bindings.get(&v) {
                    Some(b) => {
                        let p = cache.entry((v, e)).or_insert_with(|| b.pow(e));
                        acc = &acc * &*p;
                    }
                    None => kept.push((v, e)),
                }
            }
            out = &out + &acc.mul_term(c, &Monomial::from_pairs(kept));
        }
        out
    }

    /// Substitutes rational values for some variables.
    pub fn eval_partial(&self, values: &BTreeMap<Var, Rational>) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut kept = Vec::new();
            for &(v, e) in m.pairs() {
                match values.get(&v) {
                    Some(val) => coeff *= num_traits::pow(val.clone(), e as usize),
                    None => kept.push((v, e)),
                }
            }
            out.add_term(Monomial::from_pairs(kept), coeff);
        }
        out
    }

    /// Evaluates at a point covering every variable of `self`.
    pub fn eval(&self, values: &BTreeMap<Var, Rational>) -> Option<Rational> {
        self.eval_partial(values).constant_value()
    }

    /// Substitutes rational functions for variables.
    pub fn substitute(
        &self,
        bindings: &BTreeMap<Var, RationalFunction>,
    ) -> Result<RationalFunction, PolyError> {
        let mut num = MultiPoly::zero();
        let mut den = MultiPoly::one();
        // Accumulate over a common denominator, then reduce once.
        for (m, c) in &self.terms {
            let mut t_num = MultiPoly::constant(c.clone());
            let mut t_den = MultiPoly::one();
            let mut kept = Vec::new();
            for &(v, e) in m.pairs() {
                match bindings.get(&v) {
                    Some(b) => {
                        t_num = &t_num * &b.num().pow(e);
                        t_den = &t_den * &b.den().pow(e);
                    }
                    None => kept.push((v, e)),
                }
            }
            t_num = t_num.mul_term(&Rational::one(), &Monomial::from_pairs(kept));
            if t_den == den {
                num = &num + &t_num;
            } else {
                let l = super::gcd::lcm(&den, &t_den);
                let f_old = l.divide_exact(&den)?.ok_or(PolyError::DivisionByZero)?;
                let f_new = l.divide_exact(&t_den)?.ok_or(PolyError::DivisionByZero)?;
                num = &(&num * &f_old) + &(&t_num * &f_new);
                den = l;
            }
        }
        RationalFunction::new(num, den)
    }

    /// Integer coefficient vector after clearing denominators, keyed by monomial.
    pub fn integer_terms(&self) -> Vec<(Monomial, BigInt)> {
        let n = self.normalize();
        n.terms
            .iter()
            .map(|(m, c)| (m.clone(), c.numer().clone()))
            .collect()
    }

    /// Total order used to sort canonical polynomial lists: by total degree,
    /// then term by term from the leading term down.
    pub fn canonical_cmp(&self, other: &MultiPoly) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| {
                let a = self.terms.iter().rev();
                let b = other.terms.iter().rev();
                for ((ma, ca), (mb, cb)) in a.zip(b) {
                    let o = ma.cmp(mb).then_with(|| ca.cmp(cb));
                    if o.is_ne() {
                        return o;
                    }
                }
                self.terms.len().cmp(&other.terms.len())
            })
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                f.write_str(&format_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", format_rational(&abs))?;
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$method(rhs)
            }
        }
        impl $trait<MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let (mut acc, other) = if self.terms.len() >= rhs.terms.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (m, c) in &other.terms {
            acc.add_term(m.clone(), c.clone());
        }
        acc
    }
}

impl Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut acc = self.clone();
        for (m, c) in &rhs.terms {
            acc.add_term(m.clone(), -c.clone());
        }
        acc
    }
}

impl Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut acc = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                acc.add_term(ma.mul(mb), ca * cb);
            }
        }
        acc
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}
