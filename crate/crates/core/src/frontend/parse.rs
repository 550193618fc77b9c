//! Recursive-descent parser for first-order ODEs linear in `y'`.
//!
//! ```text
//! equation := expr ['=' expr]
//! expr     := ['+'|'-'] term (('+'|'-') term)*
//! term     := unary (('*'|'/') unary)*
//! unary    := '-' unary | power
//! power    := atom ['^' ['-'] integer]
//! atom     := integer | identifier | 'dy/dx' | "y'" | '(' expr ')'
//! ```
//!
//! Every value is kept as `a + b*y'` with rational-function parts, which is
//! how products with `y'` and divisions by it are rejected.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::FrontendError;
use crate::darboux::OdeField;
use crate::polynomials::{MultiPoly, Rational, RationalFunction};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Deriv,
    Op(char),
    End,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, FrontendError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((start, Tok::Int(text[start..i].parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            if word == "dy" && text[i..].trim_start().starts_with('/') {
                let after_slash = text[i..].find('/').expect("checked") + i + 1;
                let rest = text[after_slash..].trim_start();
                if rest.starts_with("dx") && !rest[2..].starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_') {
                    i = text.len() - rest.len() + 2;
                    out.push((start, Tok::Deriv));
                    continue;
                }
            }
            if word == "y" && bytes.get(i) == Some(&b'\'') {
                i += 1;
                out.push((start, Tok::Deriv));
                continue;
            }
            out.push((start, Tok::Ident(word.to_string())));
        } else if "+-*/^()=".contains(c) {
            i += 1;
            out.push((start, Tok::Op(c)));
        } else {
            let ch = text[start..].chars().next().expect("in bounds");
            return Err(FrontendError::syntax(start, format!("unexpected character '{ch}'")));
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

/// `a + b*y'`.
#[derive(Debug, Clone)]
struct Affine {
    a: RationalFunction,
    b: RationalFunction,
}

impl Affine {
    fn constant(a: RationalFunction) -> Self {
        Affine { a, b: RationalFunction::zero() }
    }

    fn has_derivative(&self) -> bool {
        !self.b.is_zero()
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    bindings: &'a BTreeMap<String, Rational>,
    allow_derivative: bool,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Affine, FrontendError> {
        let mut acc = if self.eat('-') {
            negate(&self.term()?)
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                let rhs = self.term()?;
                acc = Affine { a: acc.a.add(&rhs.a), b: acc.b.add(&rhs.b) };
            } else if self.eat('-') {
                let rhs = self.term()?;
                acc = Affine { a: acc.a.sub(&rhs.a), b: acc.b.sub(&rhs.b) };
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Affine, FrontendError> {
        let mut acc = self.unary()?;
        loop {
            let at = self.offset();
            if self.eat('*') {
                let rhs = self.unary()?;
                acc = multiply(&acc, &rhs, at)?;
            } else if self.eat('/') {
                let rhs = self.unary()?;
                acc = divide(&acc, &rhs, at)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Affine, FrontendError> {
        if self.eat('-') {
            return Ok(negate(&self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Affine, FrontendError> {
        let base = self.atom()?;
        let at = self.offset();
        if !self.eat('^') {
            return Ok(base);
        }
        let negative = self.eat('-');
        let e_at = self.offset();
        let Tok::Int(e) = self.bump().1 else {
            return Err(FrontendError::syntax(e_at, "exponent must be an integer literal"));
        };
        let e = e
            .to_i32()
            .filter(|e| *e <= 10_000)
            .ok_or_else(|| FrontendError::syntax(e_at, "exponent too large"))?;
        let e = if negative { -e } else { e };
        if base.has_derivative() {
            return match e {
                1 => Ok(base),
                0 => Ok(Affine::constant(RationalFunction::constant(Rational::from_integer(1.into())))),
                _ => Err(FrontendError::NotLinear { offset: at }),
            };
        }
        let a = base
            .a
            .pow(e)
            .map_err(|_| FrontendError::DivisionByZero { offset: at })?;
        Ok(Affine::constant(a))
    }

    fn atom(&mut self) -> Result<Affine, FrontendError> {
        let (at, tok) = self.bump();
        match tok {
            Tok::Int(n) => Ok(Affine::constant(RationalFunction::constant(Rational::from_integer(n)))),
            Tok::Deriv if self.allow_derivative => Ok(Affine {
                a: RationalFunction::zero(),
                b: RationalFunction::constant(Rational::from_integer(1.into())),
            }),
            Tok::Deriv => Err(FrontendError::syntax(at, "derivative not allowed here")),
            Tok::Ident(name) => {
                if *self.peek() == Tok::Op('(') {
                    return Err(FrontendError::syntax(at, format!("function '{name}' is not supported")));
                }
                let value = match name.as_str() {
                    "x" => RationalFunction::from_poly(MultiPoly::x()),
                    "y" => RationalFunction::from_poly(MultiPoly::y()),
                    _ => match self.bindings.get(&name) {
                        Some(r) => RationalFunction::constant(r.clone()),
                        None => return Err(FrontendError::UnboundParameter { name, offset: at }),
                    },
                };
                Ok(Affine::constant(value))
            }
            Tok::Op('(') => {
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(FrontendError::syntax(at, "unbalanced parenthesis"));
                }
                Ok(inner)
            }
            Tok::End => Err(FrontendError::syntax(at, "unexpected end of input")),
            Tok::Op(c) => Err(FrontendError::syntax(at, format!("unexpected '{c}'"))),
        }
    }
}

fn negate(v: &Affine) -> Affine {
    Affine { a: v.a.neg(), b: v.b.neg() }
}

fn multiply(l: &Affine, r: &Affine, at: usize) -> Result<Affine, FrontendError> {
    if l.has_derivative() && r.has_derivative() {
        return Err(FrontendError::NotLinear { offset: at });
    }
    Ok(Affine {
        a: l.a.mul(&r.a),
        b: l.b.mul(&r.a).add(&l.a.mul(&r.b)),
    })
}

fn divide(l: &Affine, r: &Affine, at: usize) -> Result<Affine, FrontendError> {
    if r.has_derivative() {
        return Err(FrontendError::DivisionByDerivative { offset: at });
    }
    let div = |p: &RationalFunction| p.div(&r.a).map_err(|_| FrontendError::DivisionByZero { offset: at });
    Ok(Affine { a: div(&l.a)?, b: div(&l.b)? })
}

fn parse_equation(
    text: &str,
    bindings: &BTreeMap<String, Rational>,
    allow_derivative: bool,
) -> Result<Affine, FrontendError> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0, bindings, allow_derivative };
    let lhs = p.expr()?;
    let value = if allow_derivative && p.eat('=') {
        let rhs = p.expr()?;
        Affine { a: lhs.a.sub(&rhs.a), b: lhs.b.sub(&rhs.b) }
    } else {
        lhs
    };
    if *p.peek() != Tok::End {
        return Err(FrontendError::syntax(p.offset(), "unexpected trailing input"));
    }
    Ok(value)
}

/// Parses `dy/dx = f(x, y)`, `y' = ...`, or any equation linear in `y'`
/// such as `(x+1)^2*dy/dx + y^3 = 0`. Every identifier other than `x`, `y`
/// must be bound.
pub fn parse_ode(text: &str, bindings: &BTreeMap<String, Rational>) -> Result<OdeField, FrontendError> {
    let eq = parse_equation(text, bindings, true)?;
    if eq.b.is_zero() {
        return Err(FrontendError::NoDerivative);
    }
    // b*y' + a = 0  =>  y' = (-a_num*b_den) / (a_den*b_num)
    let m = -(eq.a.num() * eq.b.den());
    let n = eq.a.den() * eq.b.num();
    Ok(OdeField::new(m, n)?)
}

/// Parses a polynomial in `x` and `y`.
pub fn parse_poly(text: &str) -> Result<MultiPoly, FrontendError> {
    let v = parse_equation(text, &BTreeMap::new(), false)?;
    if !v.a.is_polynomial() {
        return Err(FrontendError::NotPolynomial(text.to_string()));
    }
    Ok(v.a.into_parts().0)
}

/// Parses `name=rational` as given to `--bind`.
pub fn parse_binding(text: &str) -> Result<(String, Rational), FrontendError> {
    let bad = || FrontendError::BadBinding(text.to_string());
    let (name, value) = text.split_once('=').ok_or_else(bad)?;
    let name = name.trim();
    let valid = name.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name != "x"
        && name != "y";
    if !valid {
        return Err(bad());
    }
    let value = crate::polynomials::parse_rational(value).ok_or_else(bad)?;
    Ok((name.to_string(), value))
}
