//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{c, finite_difference_check, random_nonzero_poly, random_plant, x, y};
use liouvillian::engine::{
    build_master_equation, equivalent_up_to_constant, verification_residual, IntegratingFactor,
};
use liouvillian::frontend::{emit_report, run_single, Format};
use liouvillian::polynomials::{int, rat};
use liouvillian::solvers::{
    elimination_basis, reduce_by, s_polynomial, solve_linear_exact, LinearForm, LinearSystem, PolySystem,
};
use liouvillian::{
    apply_d, eigen_candidates, search_integrating_factor, DarbouxPair, MultiPoly, OdeField, Rational,
    SearchConfig, Var,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXAMPLE_ONE_LIMIT: Duration = Duration::from_secs(5);
const EXAMPLE_TWO_LIMIT: Duration = Duration::from_secs(120);
const PLANTED_FIELDS: usize = 60;
const PLANTED_MIN_FIELDS: usize = 50;
const PLANTED_MIN_SOLVED: f64 = 0.90;
const REDUCTION_FIELDS: usize = 30;
const ALGEBRA_CASES: usize = 1000;
const DETERMINISM_RUNS: usize = 5;

const EXAMPLE_ONE: &str = "dy/dx = ((x+1)*y)/(x - x*y - y^2 + x^2)";
const EXAMPLE_TWO: &str = "(a*x+b)^2 * dy/dx + (a*x+b)*y^3 + c*y^2 = 0";

fn example_one() -> OdeField {
    OdeField::new(&(&x() + &c(1)) * &y(), &(&(&x() - &(&x() * &y())) - &y().pow(2)) + &x().pow(2)).unwrap()
}

fn example_two() -> OdeField {
    let m = -(&(&(&x() + &c(1)) * &y().pow(3)) + &y().pow(2));
    OdeField::new(m, (&x() + &c(1)).pow(2)).unwrap()
}

fn example_two_config() -> SearchConfig {
    SearchConfig { max_q_degree: 4, ..SearchConfig::default() }
}

fn unit_bindings() -> BTreeMap<String, Rational> {
    ["a", "b", "c"].into_iter().map(|k| (k.to_string(), int(1))).collect()
}

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exact_zero_residual(ode: &OdeField, f: &IntegratingFactor) -> bool {
    verification_residual(ode, f).is_some_and(|r| r.is_zero())
}

fn divides_own_derivative(ode: &OdeField, v: &MultiPoly) -> bool {
    matches!(apply_d(ode, v).divide_exact(v), Ok(Some(_)))
}

/// Factors returned by the end-to-end criteria, collected for the
/// divisibility check.
#[derive(Default)]
struct Returned {
    factors: Vec<(String, OdeField, IntegratingFactor)>,
}

fn example_one_end_to_end(returned: &mut Returned) -> Verdict {
    let ode = example_one();
    let start = Instant::now();
    let out = search_integrating_factor(&ode, &SearchConfig::default());
    let elapsed = start.elapsed();
    let f = out.factor.ok_or("no factor found")?;
    returned.factors.push(("example 1".into(), ode.clone(), f.clone()));
    let expected = IntegratingFactor {
        p: x(),
        q: y(),
        q_factors: vec![],
        factors: vec![(&x() + &y(), int(-2))],
    };
    ensure(equivalent_up_to_constant(&f, &expected), || format!("got {f}"))?;
    ensure(exact_zero_residual(&ode, &f), || "nonzero residual".into())?;
    ensure(elapsed < EXAMPLE_ONE_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("R = {f}, residual 0, {elapsed:.2?}"))
}

fn example_one_intermediates() -> Verdict {
    let ode = example_one();
    let lines = eigen_candidates(&ode, 1).map_err(|e| e.to_string())?;
    let expected = vec![
        DarbouxPair { v: y(), lambda: &x() + &c(1) },
        DarbouxPair { v: &x() + &y(), lambda: &(&c(1) + &x()) - &y() },
    ];
    ensure(lines == expected, || format!("lines {lines:?}"))?;
    let sys = build_master_equation(&ode, &lines, &[1, 0], 1);
    let sol = solve_linear_exact(&sys).ok_or("master equation inconsistent")?;
    for (name, value) in [("a1", 0), ("a2", 1), ("n1", 0), ("n2", -2)] {
        ensure(sol.pinned_value(name) == Some(&LinearForm::constant(int(value))), || {
            format!("{name} = {:?}", sol.pinned_value(name))
        })?;
    }
    ensure(sol.is_free("a3"), || "a3 is pinned".into())?;
    Ok(format!("{} equations, a1=0 a2=1 n1=0 n2=-2, a3 free", sys.equations.len()))
}

fn example_two_end_to_end(returned: &mut Returned) -> Verdict {
    let ode = example_two();
    let start = Instant::now();
    let out = search_integrating_factor(&ode, &example_two_config());
    let elapsed = start.elapsed();
    let f = out.factor.ok_or("no factor found")?;
    returned.factors.push(("example 2".into(), ode.clone(), f.clone()));
    let at = out.stats.found_at.ok_or("no position")?;
    ensure(at.composition == [2, 2], || format!("m = {:?}", at.composition))?;
    ensure(f.exponent_of(&y()) == int(-3), || format!("c_y = {}", f.exponent_of(&y())))?;
    ensure(f.exponent_of(&(&x() + &c(1))) == int(-1), || "c_(x+1) differs".into())?;
    // a exp(-(y c + a^2 x + a b)^2 / (2 a y^2 (a x + b)^2)) / (y^3 (a x + b)) at a = b = c = 1
    let expected = IntegratingFactor {
        p: -(&(&x() + &y()) + &c(1)).pow(2),
        q: &y().pow(2).scale(&int(2)) * &(&x() + &c(1)).pow(2),
        q_factors: vec![],
        factors: vec![(y(), int(-3)), (&x() + &c(1), int(-1))],
    };
    ensure(equivalent_up_to_constant(&f, &expected), || format!("got {f}"))?;
    ensure(exact_zero_residual(&ode, &f), || "nonzero residual".into())?;
    ensure(elapsed < EXAMPLE_TWO_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("m = (2, 2), c_y = -3, c_(x+1) = -1, residual 0, {elapsed:.2?}"))
}

fn planted_suite(returned: &mut Returned) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let (mut fields, mut verified, mut resource, mut exhausted, mut unsound) = (0, 0, 0, 0, Vec::new());
    let mut exponential_found = 0;
    while fields < PLANTED_FIELDS {
        let exponential = rng.gen_bool(0.5);
        let plant = random_plant(&mut rng, exponential, 2);
        let Some(ode) = plant.field() else { continue };
        fields += 1;
        let out = search_integrating_factor(&ode, &SearchConfig::default());
        match out.factor {
            Some(f) => {
                let numeric = finite_difference_check(&ode, &f, &mut rng);
                if exact_zero_residual(&ode, &f) && numeric.is_ok() {
                    verified += 1;
                    exponential_found += usize::from(!f.p.is_zero());
                    returned.factors.push((format!("planted {ode}"), ode, f));
                } else {
                    unsound.push(format!("{ode}: {f} ({numeric:?})"));
                }
            }
            None if out.resource.is_some() => resource += 1,
            None => exhausted += 1,
        }
    }
    let summary = format!(
        "{verified}/{fields} verified ({exponential_found} with P != 0), {resource} resource, {exhausted} exhausted, {} unsound",
        unsound.len()
    );
    ensure(fields >= PLANTED_MIN_FIELDS, || summary.clone())?;
    ensure(unsound.is_empty(), || format!("{summary}: {}", unsound.join("; ")))?;
    ensure(verified as f64 >= PLANTED_MIN_SOLVED * fields as f64, || summary.clone())?;
    ensure(exhausted == 0, || format!("{summary}: remainder must be resource outcomes"))?;
    Ok(summary)
}

fn darboux_divisibility(returned: &Returned) -> Verdict {
    let mut checks = 0;
    for (label, ode, f) in &returned.factors {
        ensure(divides_own_derivative(ode, &f.q), || format!("{label}: Q = {} does not divide D[Q]", f.q))?;
        for v in f.q_factors.iter().map(|(v, _)| v).chain(f.factors.iter().map(|(v, _)| v)) {
            ensure(divides_own_derivative(ode, v), || format!("{label}: {v} does not divide D[{v}]"))?;
            checks += 1;
        }
        checks += 1;
    }
    ensure(returned.factors.len() >= 2, || "no factors collected".into())?;
    Ok(format!("{} factors, {checks} exact divisions", returned.factors.len()))
}

fn rational_factor_reduction() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut fields = 0;
    while fields < REDUCTION_FIELDS {
        let Some(ode) = random_plant(&mut rng, false, 0).field() else { continue };
        fields += 1;
        let out = search_integrating_factor(&ode, &SearchConfig::default());
        let f = out.factor.ok_or_else(|| format!("{ode}: no factor"))?;
        let at = out.stats.found_at.ok_or("no position")?;
        ensure(at.q_degree == 0 && f.p.is_zero() && f.q.is_one(), || {
            format!("{ode}: found at deg Q {}, P = {}", at.q_degree, f.p)
        })?;
        ensure(exact_zero_residual(&ode, &f), || format!("{ode}: {f} fails verification"))?;
    }
    Ok(format!("{fields} fields solved at deg Q = 0 with P = 0"))
}

fn random_small(rng: &mut impl Rng) -> MultiPoly {
    common::random_poly(rng, 3, 5, 0.4)
}

fn random_rational(rng: &mut impl Rng, h: i64) -> Rational {
    rat(rng.gen_range(-h..=h), rng.gen_range(1..=4))
}

fn random_aux_poly(rng: &mut impl Rng, vars: u16) -> MultiPoly {
    let mut p = MultiPoly::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let mut t = MultiPoly::constant(int(rng.gen_range(-4..=4)));
        for i in 0..vars {
            t = &t * &MultiPoly::var(Var::aux(i)).pow(rng.gen_range(0..=1));
        }
        p = &p + &t;
    }
    p
}

fn algebra_suites() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for case in 0..ALGEBRA_CASES {
        let (a, b, d) = (random_small(&mut rng), random_small(&mut rng), random_small(&mut rng));
        let ring = &(&a + &b) + &d == &a + &(&b + &d)
            && &a * &b == &b * &a
            && &(&a * &b) * &d == &a * &(&b * &d)
            && &a * &(&b + &d) == &(&a * &b) + &(&a * &d)
            && (&(&a + &b) - &b) == a
            && &a * &MultiPoly::one() == a;
        ensure(ring, || format!("ring axioms, case {case}: {a} | {b} | {d}"))?;

        for v in [Var::X, Var::Y] {
            let lhs = (&a * &b).differentiate(v);
            let rhs = &(&a.differentiate(v) * &b) + &(&a * &b.differentiate(v));
            ensure(lhs == rhs, || format!("product rule, case {case}"))?;
        }

        let nz = random_nonzero_poly(&mut rng, 2, 5);
        ensure((&a * &nz).divide_exact(&nz) == Ok(Some(a.clone())), || format!("divide exact, case {case}"))?;

        let (a, b) = (&a + &MultiPoly::one(), &b - &x());
        let g = (&a * &nz).gcd(&(&b * &nz)).map_err(|e| e.to_string())?;
        let divides = |p: &MultiPoly, q: &MultiPoly| matches!(p.divide_exact(q), Ok(Some(_)));
        ensure(divides(&g, &nz) && divides(&(&a * &nz), &g) && divides(&(&b * &nz), &g), || {
            format!("gcd, case {case}: gcd({}, {}) = {g}", &a * &nz, &b * &nz)
        })?;

        let n = rng.gen_range(1..=7);
        let hidden: Vec<Rational> = (0..n).map(|_| random_rational(&mut rng, 5)).collect();
        let mut sys = LinearSystem::new((0..n).map(|i| format!("t{i}")).collect());
        for _ in 0..rng.gen_range(0..=8) {
            let mut f = LinearForm::default();
            for i in 0..n {
                if rng.gen_bool(0.5) {
                    f.add_coeff(i, random_rational(&mut rng, 6));
                }
            }
            f.constant = -f.eval(&hidden);
            sys.push(f);
        }
        let sol = solve_linear_exact(&sys).ok_or_else(|| format!("linear residual, case {case}: inconsistent"))?;
        for _ in 0..10 {
            let free: BTreeMap<usize, Rational> = sol.free.iter().map(|&i| (i, random_rational(&mut rng, 20))).collect();
            ensure(sys.is_satisfied_by(&sol.assignment(&free)), || format!("linear residual, case {case}"))?;
        }

        let order = [Var::aux(0), Var::aux(1), Var::aux(2)];
        let vars = rng.gen_range(1..=3);
        let poly_sys = PolySystem::new((0..rng.gen_range(1..=3)).map(|_| random_aux_poly(&mut rng, vars)));
        let basis = elimination_basis(&poly_sys, &order);
        for f in &poly_sys.equations {
            ensure(reduce_by(f, &basis, &order).is_zero(), || format!("elimination, case {case}: {f}"))?;
        }
        for (i, f) in basis.equations.iter().enumerate() {
            for h in &basis.equations[i + 1..] {
                ensure(reduce_by(&s_polynomial(f, h, &order), &basis, &order).is_zero(), || {
                    format!("elimination closure, case {case}")
                })?;
            }
        }
    }
    Ok(format!("{ALGEBRA_CASES} cases each of ring axioms, product rule, divide exact, gcd, linear residual, elimination"))
}

fn determinism() -> Verdict {
    let cases = [
        (EXAMPLE_ONE, BTreeMap::new(), SearchConfig::default()),
        (EXAMPLE_TWO, unit_bindings(), example_two_config()),
    ];
    for (equation, bindings, cfg) in &cases {
        let mut reports = Vec::new();
        for run in 0..DETERMINISM_RUNS {
            let cfg = SearchConfig { parallel: run % 2 == 1, ..cfg.clone() };
            let report = run_single(equation, bindings, &cfg).map_err(|e| e.to_string())?;
            reports.push(emit_report(&report.without_timing(), Format::Json));
        }
        ensure(reports.windows(2).all(|w| w[0] == w[1]), || format!("reports differ for {equation}"))?;
    }
    Ok(format!("{DETERMINISM_RUNS} runs each, serial and parallel, byte-identical JSON"))
}

fn main() {
    let mut returned = Returned::default();
    let mut run = |n: u32, name: &'static str, f: &mut dyn FnMut(&mut Returned) -> Verdict| {
        let verdict = catch_unwind(AssertUnwindSafe(|| f(&mut returned)))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        (n, name, verdict)
    };
    let mut results = vec![
        run(1, "example 1 end to end", &mut example_one_end_to_end),
        run(2, "example 1 intermediates", &mut |_| example_one_intermediates()),
        run(3, "example 2 at a = b = c = 1", &mut example_two_end_to_end),
        run(5, "planted first integrals", &mut planted_suite),
        // Checks the factors returned under criteria 1, 3 and 5.
        run(4, "Q and its factors divide their derivatives", &mut |r| darboux_divisibility(r)),
        run(6, "rational factors at deg Q = 0, P = 0", &mut |_| rational_factor_reduction()),
        run(7, "algebra suites", &mut |_| algebra_suites()),
        run(8, "determinism", &mut |_| determinism()),
    ];
    results.sort_by_key(|r| r.0);
    for (n, name, verdict) in &results {
        match verdict {
            Ok(detail) => println!("PASS criterion {n}: {name}: {detail}"),
            Err(detail) => println!("FAIL criterion {n}: {name}: {detail}"),
        }
    }
    let failed = results.iter().filter(|r| r.2.is_err()).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
