use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::polynomials::{format_rational, Rational};

/// `sum(coeffs[i] * u_i) + constant`, with unknowns addressed by index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearForm {
    pub coeffs: BTreeMap<usize, Rational>,
    pub constant: Rational,
}

impl LinearForm {
    pub fn constant(c: Rational) -> Self {
        LinearForm {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn add_coeff(&mut self, unknown: usize, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(unknown).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&unknown);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }

    pub fn eval(&self, values: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .fold(self.constant.clone(), |acc, (&i, c)| acc + c * &values[i])
    }

    /// Scales so the coefficients are coprime integers and the first
    /// nonzero entry (by unknown index, constant last) is positive.
    pub fn primitive(&self) -> LinearForm {
        let entries = self.coeffs.values().chain(std::iter::once(&self.constant));
        let mut g = BigInt::zero();
        let mut l = BigInt::one();
        for c in entries.clone() {
            g = g.gcd(c.numer());
            l = l.lcm(c.denom());
        }
        if g.is_zero() {
            return self.clone();
        }
        let lead_negative = entries
            .clone()
            .find(|c| !c.is_zero())
            .is_some_and(|c| c.is_negative());
        let mut s = Rational::new(l, g);
        if lead_negative {
            s = -s;
        }
        LinearForm {
            coeffs: self.coeffs.iter().map(|(&i, c)| (i, c * &s)).collect(),
            constant: &self.constant * &s,
        }
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let mut s = String::new();
        for (&i, c) in &self.coeffs {
            push_signed(&mut s, c, Some(&names[i]));
        }
        if !self.constant.is_zero() || s.is_empty() {
            push_signed(&mut s, &self.constant, None);
        }
        s
    }
}

fn push_signed(s: &mut String, c: &Rational, name: Option<&str>) {
    let neg = c.is_negative();
    let abs = c.abs();
    if s.is_empty() {
        if neg {
            s.push('-');
        }
    } else {
        s.push_str(if neg { " - " } else { " + " });
    }
    match name {
        Some(n) if abs.is_one() => s.push_str(n),
        Some(n) => {
            s.push_str(&format_rational(&abs));
            s.push('*');
            s.push_str(n);
        }
        None => s.push_str(&format_rational(&abs)),
    }
}

/// Linear equations `form = 0` over named unknowns.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearSystem {
    pub unknowns: Vec<String>,
    pub equations: Vec<LinearForm>,
}

impl LinearSystem {
    pub fn new(unknowns: Vec<String>) -> Self {
        LinearSystem {
            unknowns,
            equations: Vec::new(),
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.unknowns.iter().position(|u| u == name)
    }

    pub fn push(&mut self, eq: LinearForm) {
        debug_assert!(eq.coeffs.keys().all(|&i| i < self.unknowns.len()));
        self.equations.push(eq);
    }

    /// Evaluates every equation at a full assignment.
    pub fn residuals(&self, values: &[Rational]) -> Vec<Rational> {
        self.equations.iter().map(|e| e.eval(values)).collect()
    }

    pub fn is_satisfied_by(&self, values: &[Rational]) -> bool {
        self.residuals(values).iter().all(Zero::is_zero)
    }
}

impl fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for eq in &self.equations {
            writeln!(f, "{} = 0", eq.display_with(&self.unknowns))?;
        }
        Ok(())
    }
}

/// Complete solution set of a consistent linear system: each pinned unknown
/// is an affine form in the free unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParametricSolution {
    pub unknowns: Vec<String>,
    pub pinned: BTreeMap<usize, LinearForm>,
    pub free: Vec<usize>,
}

impl ParametricSolution {
    pub fn is_free(&self, name: &str) -> bool {
        self.index(name).is_some_and(|i| self.free.contains(&i))
    }

    pub fn pinned_value(&self, name: &str) -> Option<&LinearForm> {
        self.pinned.get(&self.index(name)?)
    }

    fn index(&self, name: &str) -> Option<usize> {
        self.unknowns.iter().position(|u| u == name)
    }

    /// Full assignment for the given values of the free unknowns (missing
    /// free unknowns count as zero).
    pub fn assignment(&self, free_values: &BTreeMap<usize, Rational>) -> Vec<Rational> {
        let mut values = vec![Rational::zero(); self.unknowns.len()];
        for &f in &self.free {
            if let Some(v) = free_values.get(&f) {
                values[f] = v.clone();
            }
        }
        for (&i, form) in &self.pinned {
            values[i] = form.eval(&values);
        }
        values
    }

    /// Assignment with every free unknown set to zero.
    pub fn zero_free(&self) -> Vec<Rational> {
        self.assignment(&BTreeMap::new())
    }
}

type Row = BTreeMap<usize, BigInt>;

fn primitive_row(row: &mut Row) {
    let g = row.values().fold(BigInt::zero(), |g, v| g.gcd(v));
    if g > BigInt::one() {
        for v in row.values_mut() {
            *v /= &g;
        }
    }
}

/// `row <- p * row - f * pivot_row`, dropping zero entries.
fn eliminate(row: &mut Row, pivot_row: &Row, p: &BigInt, f: &BigInt) {
    for v in row.values_mut() {
        *v *= p;
    }
    for (&j, a) in pivot_row {
        let e = row.entry(j).or_insert_with(BigInt::zero);
        *e -= f * a;
    }
    row.retain(|_, v| !v.is_zero());
    primitive_row(row);
}

/// Solves a linear system exactly by fraction-free Gaussian elimination.
///
/// Rows are scaled to integers and kept primitive after every update.
/// Pivots are taken in column order, so the unknowns that remain free are
/// the latest ones in the unknown list that the system leaves undetermined.
/// Returns `None` iff the system is inconsistent.
pub fn solve_linear_exact(sys: &LinearSystem) -> Option<ParametricSolution> {
    let n = sys.unknowns.len();
    let rhs = n;
    let mut rows: Vec<Row> = sys
        .equations
        .iter()
        .filter(|e| !e.is_zero())
        .map(|e| {
            let l = e
                .coeffs
                .values()
                .chain(std::iter::once(&e.constant))
                .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
            let scale = |c: &Rational| (c * Rational::from_integer(l.clone())).to_integer();
            let mut row: Row = e.coeffs.iter().map(|(&i, c)| (i, scale(c))).collect();
            if !e.constant.is_zero() {
                row.insert(rhs, -scale(&e.constant));
            }
            primitive_row(&mut row);
            row
        })
        .collect();

    let mut pivots: Vec<(usize, Row)> = Vec::new();
    for col in 0..n {
        let Some(k) = rows.iter().position(|r| r.contains_key(&col)) else {
            continue;
        };
        let pivot_row = rows.swap_remove(k);
        let p = pivot_row[&col].clone();
        for row in rows.iter_mut() {
            if let Some(f) = row.get(&col).cloned() {
                eliminate(row, &pivot_row, &p, &f);
            }
        }
        rows.retain(|r| !r.is_empty());
        pivots.push((col, pivot_row));
    }
    // Whatever is left has no unknowns; a nonzero right-hand side is a contradiction.
    if rows.iter().any(|r| r.contains_key(&rhs)) {
        return None;
    }

    let pivot_cols: Vec<usize> = pivots.iter().map(|(c, _)| *c).collect();
    let free: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    let mut pinned: BTreeMap<usize, LinearForm> = BTreeMap::new();
    for (col, row) in pivots.iter().rev() {
        let p = Rational::from_integer(row[col].clone());
        let mut form = LinearForm::constant(
            row.get(&rhs)
                .map_or_else(Rational::zero, |b| Rational::from_integer(b.clone()) / &p),
        );
        for (&j, a) in row.range(col + 1..rhs) {
            let a = Rational::from_integer(a.clone()) / &p;
            match pinned.get(&j) {
                Some(sub) => {
                    form.constant -= &a * &sub.constant;
                    for (&f, c) in &sub.coeffs {
                        form.add_coeff(f, -(&a * c));
                    }
                }
                None => form.add_coeff(j, -a),
            }
        }
        pinned.insert(*col, form);
    }
    Some(ParametricSolution {
        unknowns: sys.unknowns.clone(),
        pinned,
        free,
    })
}
