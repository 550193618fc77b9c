//! Buchberger's algorithm over a caller-chosen variable list. Lexicographic
//! bases drive elimination; graded reverse lexicographic bases are a cheap
//! consistency test. Intended for the small systems produced by the Darboux
//! polynomial search, not as a general engine.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{One, Zero};
use web_time::Instant;

use super::{PolySystem, SolverError};
use crate::polynomials::{Monomial, MultiPoly, Rational, Var};

type Exps = Vec<u32>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TermOrder {
    Lex,
    GrevLex,
}

impl TermOrder {
    fn cmp(self, a: &[u32], b: &[u32]) -> Ordering {
        match self {
            TermOrder::Lex => a.cmp(b),
            TermOrder::GrevLex => {
                let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
                da.cmp(&db).then_with(|| {
                    // smaller exponent in the last differing variable is larger
                    a.iter().rev().zip(b.iter().rev()).map(|(x, y)| y.cmp(x)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
                })
            }
        }
    }
}

/// Dense-exponent polynomial, terms sorted descending in its term order.
#[derive(Debug, Clone, PartialEq, Eq)]
struct LexPoly {
    terms: Vec<(Exps, Rational)>,
    ord: TermOrder,
}

impl LexPoly {
    fn from_multi(p: &MultiPoly, order: &[Var], ord: TermOrder) -> LexPoly {
        let mut terms: Vec<(Exps, Rational)> = p
            .terms()
            .map(|(m, c)| {
                let exps = order.iter().map(|&v| m.exp(v)).collect();
                (exps, c.clone())
            })
            .collect();
        terms.sort_by(|a, b| ord.cmp(&b.0, &a.0));
        LexPoly { terms, ord }
    }

    fn zero(ord: TermOrder) -> LexPoly {
        LexPoly { terms: Vec::new(), ord }
    }

    fn to_multi(&self, order: &[Var]) -> MultiPoly {
        MultiPoly::from_terms(self.terms.iter().map(|(e, c)| {
            let mono = Monomial::from_pairs(order.iter().copied().zip(e.iter().copied()));
            (mono, c.clone())
        }))
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lm(&self) -> &Exps {
        &self.terms[0].0
    }

    fn lc(&self) -> &Rational {
        &self.terms[0].1
    }

    fn is_constant(&self) -> bool {
        !self.terms.is_empty() && self.lm().iter().all(|&e| e == 0)
    }

    fn monic(mut self) -> LexPoly {
        if let Some(lc) = self.terms.first().map(|t| t.1.clone()) {
            if !lc.is_one() {
                for t in &mut self.terms {
                    t.1 /= &lc;
                }
            }
        }
        self
    }

    /// `self - c * mono * other`
    fn sub_scaled(&self, c: &Rational, mono: &[u32], other: &LexPoly) -> LexPoly {
        let shifted = other
            .terms
            .iter()
            .map(|(e, a)| (add_exps(e, mono), a * c));
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut left = self.terms.iter().cloned().peekable();
        let mut right = shifted.peekable();
        loop {
            let ord = match (left.peek(), right.peek()) {
                (None, None) => break,
                (Some(_), None) => Ordering::Greater,
                (None, Some(_)) => Ordering::Less,
                (Some(a), Some(b)) => self.ord.cmp(&a.0, &b.0),
            };
            match ord {
                Ordering::Greater => out.push(left.next().unwrap()),
                Ordering::Less => {
                    let (e, a) = right.next().unwrap();
                    out.push((e, -a));
                }
                Ordering::Equal => {
                    let (e, a) = left.next().unwrap();
                    let (_, b) = right.next().unwrap();
                    let d = a - b;
                    if !d.is_zero() {
                        out.push((e, d));
                    }
                }
            }
        }
        LexPoly { terms: out, ord: self.ord }
    }
}

fn add_exps(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn sub_exps(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn lcm_exps(a: &[u32], b: &[u32]) -> Exps {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

/// Full reduction of `f` modulo `basis`.
fn reduce(f: &LexPoly, basis: &[LexPoly]) -> LexPoly {
    let mut rem = LexPoly::zero(f.ord);
    let mut p = f.clone();
    while !p.is_zero() {
        let (lm, lc) = (p.lm().clone(), p.lc().clone());
        match basis.iter().find(|g| divides(g.lm(), &lm)) {
            Some(g) => {
                let mono = sub_exps(&lm, g.lm());
                p = p.sub_scaled(&(lc / g.lc()), &mono, g);
            }
            None => {
                rem.terms.push(p.terms.remove(0));
            }
        }
    }
    rem
}

fn s_poly(f: &LexPoly, g: &LexPoly) -> LexPoly {
    let l = lcm_exps(f.lm(), g.lm());
    let mf = sub_exps(&l, f.lm());
    let mg = sub_exps(&l, g.lm());
    let a = LexPoly::zero(f.ord).sub_scaled(&(-Rational::one() / f.lc()), &mf, f);
    a.sub_scaled(&(Rational::one() / g.lc()), &mg, g)
}

fn buchberger(
    input: Vec<LexPoly>,
    max_basis: usize,
    deadline: Option<Instant>,
) -> Result<Vec<LexPoly>, SolverError> {
    let ord = input[0].ord;
    let mut basis: Vec<LexPoly> = Vec::new();
    for f in input {
        let r = reduce(&f, &basis);
        if !r.is_zero() {
            basis.push(r.monic());
        }
    }
    if basis.iter().any(LexPoly::is_constant) {
        return Ok(vec![LexPoly {
            terms: vec![(vec![0; basis[0].lm().len()], Rational::one())],
            ord,
        }]);
    }
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.insert((i, j));
        }
    }
    let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
    while !pairs.is_empty() {
        if deadline.is_some_and(|d| Instant::now() > d) {
            return Err(SolverError::Deadline);
        }
        // Normal selection: smallest lcm first, ties by index.
        let &(i, j) = pairs
            .iter()
            .min_by(|&&(a, b), &&(c, d)| {
                let l1 = lcm_exps(basis[a].lm(), basis[b].lm());
                let l2 = lcm_exps(basis[c].lm(), basis[d].lm());
                let s1: u32 = l1.iter().sum();
                let s2: u32 = l2.iter().sum();
                s1.cmp(&s2).then_with(|| ord.cmp(&l1, &l2)).then_with(|| (a, b).cmp(&(c, d)))
            })
            .unwrap();
        pairs.remove(&(i, j));
        done.insert((i, j));
        let (fi, fj) = (&basis[i], &basis[j]);
        if coprime(fi.lm(), fj.lm()) {
            continue;
        }
        // Chain criterion.
        let l = lcm_exps(fi.lm(), fj.lm());
        let key = |a: usize, b: usize| (a.min(b), a.max(b));
        let chained = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && divides(basis[k].lm(), &l)
                && done.contains(&key(i, k))
                && done.contains(&key(j, k))
        });
        if chained {
            continue;
        }
        let r = reduce(&s_poly(fi, fj), &basis);
        if r.is_zero() {
            continue;
        }
        let r = r.monic();
        if r.is_constant() {
            return Ok(vec![r]);
        }
        basis.push(r);
        if basis.len() > max_basis {
            return Err(SolverError::ResourceCap {
                cap: "groebner basis size",
                limit: max_basis,
            });
        }
        let n = basis.len() - 1;
        for k in 0..n {
            pairs.insert((k, n));
        }
        // Keep tails reduced so coefficients stay small. Leading monomials
        // are unchanged, which keeps processed pairs valid.
        let newest = [basis[n].clone()];
        for g in &mut basis[..n] {
            if g.terms[1..].iter().any(|t| divides(newest[0].lm(), &t.0)) {
                *g = reduce_tail(g, &newest);
            }
        }
    }
    Ok(interreduce(basis))
}

/// `g` with its non-leading terms reduced modulo `by`; the result is monic.
fn reduce_tail(g: &LexPoly, by: &[LexPoly]) -> LexPoly {
    let tail = LexPoly {
        terms: g.terms[1..].to_vec(),
        ord: g.ord,
    };
    let mut r = reduce(&tail, by);
    r.terms.insert(0, g.terms[0].clone());
    r.monic()
}

/// Minimal, fully reduced, monic basis sorted by ascending leading monomial.
fn interreduce(basis: Vec<LexPoly>) -> Vec<LexPoly> {
    let mut minimal: Vec<LexPoly> = Vec::new();
    for (k, g) in basis.iter().enumerate() {
        let redundant = basis.iter().enumerate().any(|(l, h)| {
            l != k && divides(h.lm(), g.lm()) && (h.lm() != g.lm() || l < k)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut reduced: Vec<LexPoly> = Vec::new();
    for k in 0..minimal.len() {
        let others: Vec<LexPoly> = minimal
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != k)
            .map(|(_, g)| g.clone())
            .collect();
        reduced.push(reduce_tail(&minimal[k], &others));
    }
    reduced.sort_by(|a, b| a.ord.cmp(a.lm(), b.lm()));
    reduced
}

/// Reduced lexicographic Gröbner basis of `sys`, `order[0]` ranked highest.
/// Variables of the system missing from `order` are appended in index order.
pub fn elimination_basis(sys: &PolySystem, order: &[Var]) -> PolySystem {
    elimination_basis_capped(sys, order, usize::MAX).expect("uncapped basis computation")
}

pub fn elimination_basis_capped(
    sys: &PolySystem,
    order: &[Var],
    max_basis: usize,
) -> Result<PolySystem, SolverError> {
    groebner_basis(sys, order, TermOrder::Lex, max_basis, None)
}

pub(crate) fn groebner_basis(
    sys: &PolySystem,
    order: &[Var],
    ord: TermOrder,
    max_basis: usize,
    deadline: Option<Instant>,
) -> Result<PolySystem, SolverError> {
    let order = full_order(sys, order);
    let input: Vec<LexPoly> = sys
        .equations
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| LexPoly::from_multi(p, &order, ord))
        .collect();
    if input.is_empty() {
        return Ok(PolySystem::default());
    }
    let gb = buchberger(input, max_basis, deadline)?;
    Ok(PolySystem {
        equations: gb.iter().map(|g| g.to_multi(&order)).collect(),
    })
}

fn full_order(sys: &PolySystem, order: &[Var]) -> Vec<Var> {
    let mut full: Vec<Var> = order.to_vec();
    for v in sys.vars() {
        if !full.contains(&v) {
            full.push(v);
        }
    }
    full
}

/// Normal form of `f` modulo `basis` under the lex order given by `order`.
pub fn reduce_by(f: &MultiPoly, basis: &PolySystem, order: &[Var]) -> MultiPoly {
    let mut all = basis.clone();
    all.equations.push(f.clone());
    let order = full_order(&all, order);
    let lex_basis: Vec<LexPoly> = basis
        .equations
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| LexPoly::from_multi(p, &order, TermOrder::Lex))
        .collect();
    reduce(&LexPoly::from_multi(f, &order, TermOrder::Lex), &lex_basis).to_multi(&order)
}

/// S-polynomial of two nonzero polynomials under the lex order `order`.
pub fn s_polynomial(f: &MultiPoly, g: &MultiPoly, order: &[Var]) -> MultiPoly {
    let sys = PolySystem::new([f.clone(), g.clone()]);
    let order = full_order(&sys, order);
    let lex = |p: &MultiPoly| LexPoly::from_multi(p, &order, TermOrder::Lex);
    s_poly(&lex(f), &lex(g)).to_multi(&order)
}
