//! Random generators and an independent floating-point oracle shared by the
//! integration tests.

#![allow(dead_code)]

use liouvillian::darboux::monomials_up_to;
use liouvillian::engine::{plant_from_first_integral, IntegratingFactor};
use liouvillian::polynomials::{int, rat, Monomial};
use liouvillian::{MultiPoly, OdeField, Rational, RationalFunction};
use num_traits::ToPrimitive;
use rand::Rng;

pub fn x() -> MultiPoly {
    MultiPoly::x()
}

pub fn y() -> MultiPoly {
    MultiPoly::y()
}

pub fn c(n: i64) -> MultiPoly {
    MultiPoly::from_int(n)
}

/// Random polynomial in `x`, `y` with total degree at most `max_deg`,
/// about `density` of the monomials present, coefficients `p/q` with
/// `|p| <= height`, `1 <= q <= 3`.
pub fn random_poly(rng: &mut impl Rng, max_deg: i64, height: i64, density: f64) -> MultiPoly {
    let mut p = MultiPoly::zero();
    for m in monomials_up_to(max_deg) {
        if rng.gen_bool(density) {
            p.add_term(m, rat(rng.gen_range(-height..=height), rng.gen_range(1..=3)));
        }
    }
    p
}

pub fn random_nonzero_poly(rng: &mut impl Rng, max_deg: i64, height: i64) -> MultiPoly {
    loop {
        let p = random_poly(rng, max_deg, height, 0.5);
        if !p.is_zero() {
            return p;
        }
    }
}

/// Random line `a x + b y + c` with integer coefficients of height `height`.
pub fn random_line(rng: &mut impl Rng, height: i64) -> MultiPoly {
    loop {
        let (a, b) = (rng.gen_range(-height..=height), rng.gen_range(-height..=height));
        if a == 0 && b == 0 {
            continue;
        }
        let k = rng.gen_range(-height..=height);
        return &(&x().scale(&int(a)) + &y().scale(&int(b))) + &c(k);
    }
}

/// Planted first-integral data `F = exp(r0) * prod(v ^ c)`.
#[derive(Debug, Clone)]
pub struct Plant {
    pub r0: RationalFunction,
    pub factors: Vec<(MultiPoly, Rational)>,
}

impl Plant {
    pub fn field(&self) -> Option<OdeField> {
        plant_from_first_integral(&self.r0, &self.factors).ok()
    }
}

/// Distinct lines (up to scaling) with nonzero rational exponents; `r0` has
/// a product of at most `max_q_lines` of the lines as denominator and a
/// numerator of degree at most 3. Components have degree at most 3 and
/// coefficients of height at most 5.
pub fn random_plant(rng: &mut impl Rng, exponential: bool, max_q_lines: usize) -> Plant {
    let k = rng.gen_range(1..=3);
    let mut lines: Vec<MultiPoly> = Vec::new();
    while lines.len() < k {
        let v = random_line(rng, 5);
        if !lines.iter().any(|w| w.normalize() == v.normalize()) {
            lines.push(v);
        }
    }
    let factors = lines
        .iter()
        .map(|v| {
            let mut num = rng.gen_range(1..=3);
            if rng.gen_bool(0.5) {
                num = -num;
            }
            (v.clone(), rat(num, rng.gen_range(1..=2)))
        })
        .collect();
    let r0 = if exponential {
        let mut q = MultiPoly::one();
        for v in lines.iter().take(rng.gen_range(0..=max_q_lines.min(k))) {
            q = &q * v;
        }
        let p = loop {
            let p = random_poly(rng, 3 - q.total_degree().min(2), 5, 0.5).normalize();
            if !p.is_constant() || !q.is_one() {
                break p;
            }
        };
        RationalFunction::new(p, q).expect("q nonzero")
    } else {
        RationalFunction::zero()
    };
    Plant { r0, factors }
}

fn poly_f64(p: &MultiPoly, px: f64, py: f64) -> f64 {
    p.terms()
        .map(|(m, c): (&Monomial, &Rational)| {
            c.to_f64().unwrap() * px.powi(m.exp(liouvillian::Var::X) as i32) * py.powi(m.exp(liouvillian::Var::Y) as i32)
        })
        .sum()
}

/// `R(x, y)` in floating point, using `|v|^c` for the power factors.
pub fn factor_f64(f: &IntegratingFactor, px: f64, py: f64) -> f64 {
    let mut r = (poly_f64(&f.p, px, py) / poly_f64(&f.q, px, py)).exp();
    for (v, e) in &f.factors {
        r *= poly_f64(v, px, py).abs().powf(e.to_f64().unwrap());
    }
    r
}

/// Independent check that `R dx`-form `R N dy - R M dx` is closed:
/// `d(R N)/dx + d(R M)/dy = 0`, by central differences at sample points away
/// from the zero sets of `Q` and the factors. Returns the number of sample
/// points checked (0 if none were usable).
pub fn finite_difference_check(ode: &OdeField, f: &IntegratingFactor, rng: &mut impl Rng) -> Result<usize, String> {
    let mut checked = 0;
    for _ in 0..200 {
        if checked == 6 {
            break;
        }
        let (px, py) = (rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let away = |p: &MultiPoly| poly_f64(p, px, py).abs() > 0.2;
        if !away(&f.q) || !f.factors.iter().all(|(v, _)| away(v)) {
            continue;
        }
        let e = f.p.clone();
        if (poly_f64(&e, px, py) / poly_f64(&f.q, px, py)).abs() > 20.0 {
            continue;
        }
        let h = 1e-5;
        let rn = |a: f64, b: f64| factor_f64(f, a, b) * poly_f64(ode.n(), a, b);
        let rm = |a: f64, b: f64| factor_f64(f, a, b) * poly_f64(ode.m(), a, b);
        let dx = (rn(px + h, py) - rn(px - h, py)) / (2.0 * h);
        let dy = (rm(px, py + h) - rm(px, py - h)) / (2.0 * h);
        let scale = dx.abs().max(dy.abs()).max(factor_f64(f, px, py).abs()).max(1e-12);
        if ((dx + dy) / scale).abs() > 1e-5 {
            return Err(format!("d(RN)/dx + d(RM)/dy = {} at ({px}, {py})", dx + dy));
        }
        checked += 1;
    }
    Ok(checked)
}
