use super::EngineError;
use crate::darboux::{FieldError, OdeField};
use crate::polynomials::{MultiPoly, Rational, RationalFunction, Var};

/// The ODE whose solutions are the level sets of `F = exp(r0) * prod(v ^ c)`.
///
/// `dy/dx = -F_x / F_y`, with the logarithmic gradient of `F` cleared of
/// denominators. `F / L` is then an integrating factor, where `L` is the
/// clearing polynomial (up to the common factor removed from `M` and `N`).
pub fn plant_from_first_integral(
    r0: &RationalFunction,
    factors: &[(MultiPoly, Rational)],
) -> Result<OdeField, EngineError> {
    let log_derivative = |var: Var| {
        factors.iter().fold(r0.differentiate(var), |acc, (v, c)| {
            let term = RationalFunction::new(v.differentiate(var), v.clone())
                .expect("planted factors are nonzero");
            acc.add(&term.scale(c))
        })
    };
    let gx = log_derivative(Var::X);
    let gy = log_derivative(Var::Y);
    if gx.is_zero() && gy.is_zero() {
        return Err(EngineError::ConstantFirstIntegral);
    }
    if gy.is_zero() {
        return Err(FieldError::ZeroDenominator.into());
    }
    let l = gx.den().lcm(gy.den());
    let clear = |g: &RationalFunction| -> MultiPoly {
        &l.divide_exact(g.den()).ok().flatten().expect("lcm is a multiple") * g.num()
    };
    Ok(OdeField::new(-clear(&gx), clear(&gy))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{search_integrating_factor, verify_integrating_factor, SearchConfig};
    use crate::polynomials::int;

    fn x() -> MultiPoly {
        MultiPoly::x()
    }
    fn y() -> MultiPoly {
        MultiPoly::y()
    }

    #[test]
    fn exponential_plant_is_solved() {
        let r0 = RationalFunction::new(x(), y()).unwrap();
        let ode = plant_from_first_integral(&r0, &[(x() + y(), int(1))]).unwrap();
        let out = search_integrating_factor(&ode, &SearchConfig::default());
        let f = out.factor.expect("planted factor found");
        assert!(verify_integrating_factor(&ode, &f));
    }

    #[test]
    fn level_sets_of_y() {
        let ode = plant_from_first_integral(&RationalFunction::zero(), &[(y(), int(1))]).unwrap();
        assert!(ode.m().is_zero());
    }

    #[test]
    fn degenerate_plants() {
        let r0 = RationalFunction::from_poly(x());
        assert_eq!(
            plant_from_first_integral(&r0, &[]),
            Err(EngineError::Field(FieldError::ZeroDenominator))
        );
        assert_eq!(
            plant_from_first_integral(&RationalFunction::zero(), &[]),
            Err(EngineError::ConstantFirstIntegral)
        );
    }
}
