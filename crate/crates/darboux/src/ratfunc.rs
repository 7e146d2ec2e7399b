//! Rational functions over Q(i)[x, y] in lowest terms.
//!
//! The denominator is kept monic under the graded-lex term order, so two
//! structurally equal values are mathematically equal and vice versa.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::Signed;

use crate::gaussian::GaussianRational;
use crate::poly::{gcd_poly, BivarPoly, Var};
use crate::ratint::{integrate_rational, RationalIntegral};
use crate::unipoly::UniPoly;

#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: BivarPoly,
    den: BivarPoly,
}

impl RationalFunction {
    /// Builds `num/den` and reduces to lowest terms with a monic denominator.
    ///
    /// Panics when `den` is the zero polynomial.
    pub fn new(num: BivarPoly, den: BivarPoly) -> Self {
        assert!(!den.is_zero(), "division by the zero polynomial");
        if num.is_zero() {
            return RationalFunction { num, den: BivarPoly::one() };
        }
        let g = gcd_poly(&num, &den);
        let num = num.divide_exact(&g).expect("gcd divides numerator");
        let den = den.divide_exact(&g).expect("gcd divides denominator");
        let unit = den.leading_coeff().inv();
        RationalFunction { num: num.scale(&unit), den: den.scale(&unit) }
    }

    pub fn from_poly(p: BivarPoly) -> Self {
        RationalFunction { num: p, den: BivarPoly::one() }
    }

    pub fn zero() -> Self {
        Self::from_poly(BivarPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(BivarPoly::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_poly(BivarPoly::constant(c))
    }

    pub fn num(&self) -> &BivarPoly {
        &self.num
    }

    pub fn den(&self) -> &BivarPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_constant() && self.num == BivarPoly::one()
    }

    /// The underlying polynomial when the denominator is trivial.
    pub fn as_polynomial(&self) -> Option<&BivarPoly> {
        if self.den.is_constant() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// True when neither numerator nor denominator involves `var`'s partner.
    pub fn depends_only_on(&self, var: Var) -> bool {
        let other = var.other();
        self.num.degree(other).unwrap_or(0) == 0 && self.den.degree(other).unwrap_or(0) == 0
    }

    /// Splits an x-only rational function into a (numerator, denominator)
    /// pair of univariate polynomials.
    pub fn to_unipoly_pair(&self, var: Var) -> Option<(UniPoly, UniPoly)> {
        Some((self.num.to_unipoly(var)?, self.den.to_unipoly(var)?))
    }

    pub fn from_unipoly(var: Var, num: &UniPoly, den: &UniPoly) -> Self {
        Self::new(BivarPoly::from_unipoly(var, num), BivarPoly::from_unipoly(var, den))
    }

    /// Laurent expansion at x = 0 of an x-only rational function.  `None`
    /// when the function involves y.
    pub fn to_series_x(&self) -> Option<crate::series::PuiseuxSeries> {
        if !self.depends_only_on(Var::X) {
            return None;
        }
        let (n, d) = self.to_unipoly_pair(Var::X)?;
        let num = crate::series::PuiseuxSeries::from_unipoly_x(&n);
        let den = crate::series::PuiseuxSeries::from_unipoly_x(&d);
        Some(&num * &den.reciprocal().expect("denominator of a reduced fraction is nonzero"))
    }

    pub fn partial(&self, var: Var) -> Self {
        // (n/d)' = (n'd - nd')/d^2
        let n = &(&self.num.partial(var) * &self.den) - &(&self.num * &self.den.partial(var));
        Self::new(n, &self.den * &self.den)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.num.conj(), self.den.conj())
    }

    /// Evaluates at a point; None on a pole of the reduced representation.
    pub fn eval(&self, x: &GaussianRational, y: &GaussianRational) -> Option<GaussianRational> {
        let d = self.den.eval(x, y);
        if d.is_zero() {
            return None;
        }
        Some(&self.num.eval(x, y) / &d)
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i32) -> Self {
        if e < 0 {
            return self.inv().pow(-e);
        }
        RationalFunction {
            num: self.num.pow(e as u32),
            den: self.den.pow(e as u32),
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            return write!(f, "{}", self.num);
        }
        if self.num.num_terms() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        // The denominator is monic, so a lone term needs parentheses only
        // when it mixes both variables (x*y would otherwise parse as (../x)*y).
        let lone_power = self.den.num_terms() == 1
            && self.den.leading().map_or(false, |(m, _)| m.dx == 0 || m.dy == 0);
        if lone_power {
            write!(f, "/{}", self.den)
        } else {
            write!(f, "/({})", self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add<&RationalFunction> for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub<&RationalFunction> for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Mul<&RationalFunction> for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div<&RationalFunction> for &RationalFunction {
    type Output = RationalFunction;
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        assert!(!rhs.is_zero(), "division by zero rational function");
        RationalFunction::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! forward_rat_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: &RationalFunction) -> RationalFunction {
                (&self).$method(rhs)
            }
        }
        impl $trait<RationalFunction> for &RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: RationalFunction) -> RationalFunction {
                self.$method(&rhs)
            }
        }
    };
}
forward_rat_binop!(Add, add);
forward_rat_binop!(Sub, sub);
forward_rat_binop!(Mul, mul);
forward_rat_binop!(Div, div);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

/// A function of x known through its logarithmic derivative h'/h.
///
/// When the logarithmic derivative integrates in closed form over Q(i),
/// `closed_form` records h itself as a product of polynomial powers times the
/// exponential of a rational function; otherwise only the derivative is kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogDerivativeSpec {
    pub logderiv: RationalFunction,
    pub closed_form: Option<ClosedForm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    /// Factors (v, e) contributing v^e, with v monic.
    pub powers: Vec<(UniPoly, GaussianRational)>,
    /// An exp(r) factor with r rational in x, when present.
    pub exp_part: Option<RationalFunction>,
}

impl LogDerivativeSpec {
    /// The constant function h = 1.
    pub fn trivial() -> Self {
        LogDerivativeSpec {
            logderiv: RationalFunction::zero(),
            closed_form: Some(ClosedForm { powers: Vec::new(), exp_part: None }),
        }
    }

    /// Wraps a logarithmic derivative and attempts to integrate it.
    ///
    /// Panics when `r` involves y.  A closed form is attached whenever the
    /// integral's logarithm coefficients stay inside Q(i).
    pub fn from_logderiv(r: RationalFunction) -> Self {
        assert!(r.depends_only_on(Var::X), "log derivative must be a function of x");
        let (num, den) = r.to_unipoly_pair(Var::X).expect("x-only rational function");
        let closed_form = integrate_rational(&num, &den).ok().map(|integral| {
            let RationalIntegral { poly_part, rational_num, rational_den, logs } = integral;
            let mut exp = RationalFunction::from_unipoly(Var::X, &rational_num, &rational_den);
            exp = &exp + &RationalFunction::from_poly(BivarPoly::from_unipoly(Var::X, &poly_part));
            ClosedForm {
                powers: logs.into_iter().map(|(c, v)| (v, c)).collect(),
                exp_part: if exp.is_zero() { None } else { Some(exp) },
            }
        });
        let spec = LogDerivativeSpec { logderiv: r, closed_form };
        debug_assert!(spec.consistent());
        spec
    }

    /// Checks that the closed form's formal logarithmic derivative matches
    /// `logderiv` exactly (vacuously true with no closed form).
    pub fn consistent(&self) -> bool {
        let Some(form) = &self.closed_form else { return true };
        let mut acc = match &form.exp_part {
            Some(r) => r.partial(Var::X),
            None => RationalFunction::zero(),
        };
        for (v, e) in &form.powers {
            let vp = BivarPoly::from_unipoly(Var::X, &v.derivative());
            let v = BivarPoly::from_unipoly(Var::X, v);
            let term = RationalFunction::new(vp.scale(e), v);
            acc = &acc + &term;
        }
        acc == self.logderiv
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.powers.is_empty() && self.exp_part.is_none() {
            return write!(f, "1");
        }
        let mut first = true;
        for (v, e) in &self.powers {
            if !first {
                write!(f, " * ")?;
            }
            first = false;
            let base = BivarPoly::from_unipoly(Var::X, v);
            if base.num_terms() > 1 {
                write!(f, "({base})")?;
            } else {
                write!(f, "{base}")?;
            }
            if !e.is_one() {
                if e.is_integer() && e.re().is_positive() {
                    write!(f, "^{e}")?;
                } else {
                    write!(f, "^({e})")?;
                }
            }
        }
        if let Some(r) = &self.exp_part {
            if !first {
                write!(f, " * ")?;
            }
            write!(f, "exp({r})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_integer(n)
    }

    fn x() -> RationalFunction {
        RationalFunction::from_poly(BivarPoly::x())
    }

    fn y() -> RationalFunction {
        RationalFunction::from_poly(BivarPoly::y())
    }

    #[test]
    fn reduction_cancels_common_factor() {
        // (x^2 - y^2)/(x - y) = x + y
        let num = &(&BivarPoly::x() * &BivarPoly::x()) - &(&BivarPoly::y() * &BivarPoly::y());
        let den = &BivarPoly::x() - &BivarPoly::y();
        let r = RationalFunction::new(num, den);
        assert_eq!(r.as_polynomial().unwrap(), &(&BivarPoly::x() + &BivarPoly::y()));
    }

    #[test]
    fn denominator_kept_monic() {
        // x / (2y) -> (1/2 x) / y
        let r = RationalFunction::new(BivarPoly::x(), BivarPoly::y().scale(&g(2)));
        assert_eq!(r.den(), &BivarPoly::y());
        assert_eq!(r.to_string(), "1/2*x/y");
    }

    #[test]
    fn sum_over_common_denominator() {
        let s = &x().inv() + &y().inv();
        assert_eq!(s.to_string(), "(y + x)/(x*y)");
    }

    #[test]
    fn partial_derivative_of_inverse() {
        let d = x().inv().partial(Var::X);
        assert_eq!(d.to_string(), "-1/x^2");
    }

    #[test]
    fn eval_none_on_pole() {
        let r = x().inv();
        assert!(r.eval(&g(0), &g(0)).is_none());
        assert_eq!(r.eval(&g(2), &g(0)), Some(GaussianRational::from_ratio(1, 2)));
    }

    #[test]
    fn negative_power() {
        let r = x().pow(-2);
        assert_eq!(r.to_string(), "1/x^2");
        assert!((&r * &x().pow(2)).is_one());
    }

    #[test]
    fn field_identities() {
        let a = &x() + &y().inv();
        let b = &y() - &x().pow(3);
        let lhs = &(&a + &b) * &(&a - &b);
        let rhs = &(&a * &a) - &(&b * &b);
        assert_eq!(lhs, rhs);
        assert!((&(&a / &b) * &b) == a);
    }

    #[test]
    fn closed_form_single_log() {
        // h'/h = (3x^2 + 1)/(x^3 + x)  =>  h = x^3 + x
        let num = BivarPoly::from_int(1) + BivarPoly::monomial(g(3), 2, 0);
        let den = BivarPoly::x() + BivarPoly::monomial(g(1), 3, 0);
        let spec = LogDerivativeSpec::from_logderiv(RationalFunction::new(num, den));
        let form = spec.closed_form.as_ref().unwrap();
        assert_eq!(form.powers.len(), 1);
        assert!(form.exp_part.is_none());
        assert_eq!(form.to_string(), "(x^3 + x)");
        assert!(spec.consistent());
    }

    #[test]
    fn closed_form_power_and_exponential() {
        // h = x * exp(-1/x) has h'/h = 1/x + 1/x^2
        let r = &x().inv() + &x().pow(-2);
        let spec = LogDerivativeSpec::from_logderiv(r);
        let form = spec.closed_form.as_ref().unwrap();
        assert_eq!(form.powers, vec![(UniPoly::var(), g(1))]);
        assert_eq!(form.exp_part.as_ref().unwrap().to_string(), "-1/x");
        assert_eq!(form.to_string(), "x * exp(-1/x)");
    }

    #[test]
    fn closed_form_absent_outside_gaussian_rationals() {
        // Integrating 1/(x^2 - 2) needs sqrt(2) log coefficients.
        let den = &(&BivarPoly::x() * &BivarPoly::x()) - &BivarPoly::from_int(2);
        let spec = LogDerivativeSpec::from_logderiv(RationalFunction::new(BivarPoly::one(), den));
        assert!(spec.closed_form.is_none());
        assert!(spec.consistent());
    }

    #[test]
    fn display_parenthesizes_mixed_denominator() {
        let r = RationalFunction::new(BivarPoly::one(), &BivarPoly::x() * &BivarPoly::y());
        assert_eq!(r.to_string(), "1/(x*y)");
    }
}
