//! Closed-form antiderivatives of univariate rational functions over Q(i).
//!
//! The rational part of the integral is found by the Ostrogradsky ansatz:
//! with d = v·d* where v = gcd(d, d') and d* is the squarefree part,
//!
//! ```text
//! ∫ n/d = u/v + ∫ w/d*,   deg u < deg v,  deg w < deg d*,
//! ```
//!
//! and the coefficients of u and w solve the linear system obtained from
//! n = u'·d* − u·(v'·d*/v) + w·v.  The remaining squarefree piece integrates
//! to a sum of logarithms whose coefficients are the roots c of
//! Res_x(d*, w − c·d*'); each coefficient pairs with the monic argument
//! gcd(d*, w − c·d*').  Roots outside Q(i) surface as `ExtensionRequired`
//! rather than an approximation.

use crate::gaussian::GaussianRational;
use crate::linalg::solve_affine;
use crate::poly::{resultant, BivarPoly, Var};
use crate::unipoly::{factor_univariate, FactorError, UniPoly};

/// An antiderivative split as `poly_part + rational_num/rational_den +
/// Σ c·log(v)` over the `logs` list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalIntegral {
    pub poly_part: UniPoly,
    pub rational_num: UniPoly,
    pub rational_den: UniPoly,
    pub logs: Vec<(GaussianRational, UniPoly)>,
}

/// Integrates `num/den` exactly.
///
/// Panics when `den` is zero; fails with [`FactorError::ExtensionRequired`]
/// when a logarithm coefficient lies outside Q(i).
pub fn integrate_rational(num: &UniPoly, den: &UniPoly) -> Result<RationalIntegral, FactorError> {
    assert!(!den.is_zero(), "integrand denominator is zero");
    if num.is_zero() {
        return Ok(RationalIntegral {
            poly_part: UniPoly::zero(),
            rational_num: UniPoly::zero(),
            rational_den: UniPoly::one(),
            logs: Vec::new(),
        });
    }
    // Lowest terms, monic denominator.
    let g = num.gcd(den);
    let num = exact_div(num, &g);
    let den = exact_div(den, &g);
    let unit = den.lc().inv();
    let num = num.scale(&unit);
    let den = den.monic();

    let (quot, rem) = num.divrem(&den);
    let poly_part = integrate_poly(&quot);

    let v = den.gcd(&den.derivative());
    let (rational_num, rational_den, w, dstar) = if v.degree() == Some(0) {
        (UniPoly::zero(), UniPoly::one(), rem, den)
    } else {
        let dstar = exact_div(&den, &v);
        // t = v'·d*/v is a polynomial exactly because v = gcd(d, d').
        let t = exact_div(&(&v.derivative() * &dstar), &v);
        let nv = v.degree().unwrap();
        let nw = dstar.degree().unwrap();
        let nrows = nv + nw;
        let mut columns: Vec<UniPoly> = Vec::with_capacity(nv + nw);
        for j in 0..nv {
            let xj = UniPoly::monomial(GaussianRational::one(), j);
            let dxj = xj.derivative();
            columns.push(&(&dxj * &dstar) - &(&xj * &t));
        }
        for j in 0..nw {
            columns.push(&UniPoly::monomial(GaussianRational::one(), j) * &v);
        }
        let matrix: Vec<Vec<GaussianRational>> = (0..nrows)
            .map(|i| columns.iter().map(|c| c.coeff(i)).collect())
            .collect();
        let b: Vec<GaussianRational> = (0..nrows).map(|i| rem.coeff(i)).collect();
        let (sol, _) = solve_affine(&matrix, &b).expect("reduction system is always consistent");
        let u = UniPoly::new(sol[..nv].to_vec());
        let w = UniPoly::new(sol[nv..].to_vec());
        (u, v, w, dstar)
    };

    let logs = log_terms(&w, &dstar)?;
    Ok(RationalIntegral { poly_part, rational_num, rational_den, logs })
}

/// Logarithmic terms of `∫ w/a` for squarefree monic `a`.
fn log_terms(w: &UniPoly, a: &UniPoly) -> Result<Vec<(GaussianRational, UniPoly)>, FactorError> {
    let g = w.gcd(a);
    let w = exact_div(w, &g);
    let a = exact_div(a, &g);
    if w.is_zero() || a.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let a_prime = a.derivative();
    // Res_x(a, w − c·a') as a polynomial in the stand-in variable c.
    let pa = BivarPoly::from_unipoly(Var::X, &a);
    let pb = &BivarPoly::from_unipoly(Var::X, &w)
        - &(&BivarPoly::y() * &BivarPoly::from_unipoly(Var::X, &a_prime));
    let rc = resultant(&pa, &pb, Var::X)
        .to_unipoly(Var::Y)
        .expect("resultant eliminates x");
    assert!(!rc.is_zero(), "squarefree coprime input cannot have a vanishing resultant");
    let factorization = factor_univariate(&rc)?;
    let mut out = Vec::new();
    for (c, _) in factorization.roots {
        if c.is_zero() {
            continue;
        }
        let shifted = &w - &a_prime.scale(&c);
        let arg = a.gcd(&shifted);
        debug_assert!(arg.degree().unwrap_or(0) >= 1);
        out.push((c, arg));
    }
    Ok(out)
}

fn integrate_poly(q: &UniPoly) -> UniPoly {
    let mut coeffs = vec![GaussianRational::zero()];
    for (k, c) in q.coeffs().iter().enumerate() {
        coeffs.push(c / &GaussianRational::from_integer(k as i64 + 1));
    }
    UniPoly::new(coeffs)
}

fn exact_div(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let (q, r) = a.divrem(b);
    debug_assert!(r.is_zero(), "division expected to be exact");
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfunc::RationalFunction;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_integer(n)
    }

    /// Differentiates the computed antiderivative and compares with n/d.
    fn check_roundtrip(num: &UniPoly, den: &UniPoly) {
        let integral = integrate_rational(num, den).unwrap();
        let lift = |p: &UniPoly| RationalFunction::from_poly(BivarPoly::from_unipoly(Var::X, p));
        let mut deriv = lift(&integral.poly_part.derivative());
        let rat = RationalFunction::from_unipoly(Var::X, &integral.rational_num, &integral.rational_den);
        deriv = &deriv + &rat.partial(Var::X);
        for (c, v) in &integral.logs {
            let term = RationalFunction::from_unipoly(Var::X, &v.derivative().scale(c), v);
            deriv = &deriv + &term;
        }
        assert_eq!(deriv, RationalFunction::from_unipoly(Var::X, num, den));
    }

    #[test]
    fn pure_rational_part() {
        // ∫ 1/x^2 = -1/x
        let den = UniPoly::monomial(g(1), 2);
        let i = integrate_rational(&UniPoly::one(), &den).unwrap();
        assert!(i.logs.is_empty());
        assert_eq!(i.rational_num, UniPoly::constant(g(-1)));
        assert_eq!(i.rational_den, UniPoly::var());
        check_roundtrip(&UniPoly::one(), &den);
    }

    #[test]
    fn single_logarithm() {
        // ∫ (3x^2+1)/(x^3+x) = log(x^3+x)
        let num = UniPoly::new(vec![g(1), g(0), g(3)]);
        let den = UniPoly::new(vec![g(0), g(1), g(0), g(1)]);
        let i = integrate_rational(&num, &den).unwrap();
        assert!(i.poly_part.is_zero() && i.rational_num.is_zero());
        assert_eq!(i.logs, vec![(g(1), den.clone())]);
        check_roundtrip(&num, &den);
    }

    #[test]
    fn gaussian_log_coefficients() {
        // ∫ 1/(x^2+1) = (i/2)·log(x+i) − (i/2)·log(x−i)
        let den = UniPoly::new(vec![g(1), g(0), g(1)]);
        let i = integrate_rational(&UniPoly::one(), &den).unwrap();
        assert_eq!(i.logs.len(), 2);
        check_roundtrip(&UniPoly::one(), &den);
    }

    #[test]
    fn polynomial_part_integrated() {
        // ∫ x^4/(x^2+1): quotient x^2 − 1 integrates to x^3/3 − x.
        let num = UniPoly::monomial(g(1), 4);
        let den = UniPoly::new(vec![g(1), g(0), g(1)]);
        let i = integrate_rational(&num, &den).unwrap();
        let third = GaussianRational::from_ratio(1, 3);
        assert_eq!(i.poly_part, UniPoly::new(vec![g(0), g(-1), g(0), third]));
        check_roundtrip(&num, &den);
    }

    #[test]
    fn mixed_rational_and_log_parts() {
        // Denominator x^2(x−1): both a 1/x rational piece and logs appear.
        let num = UniPoly::new(vec![g(1), g(1)]);
        let den = UniPoly::new(vec![g(0), g(0), g(-1), g(1)]);
        check_roundtrip(&num, &den);
        let i = integrate_rational(&num, &den).unwrap();
        assert!(!i.rational_num.is_zero());
        assert_eq!(i.logs.len(), 2);
    }

    #[test]
    fn irrational_log_coefficients_refused() {
        // ∫ 1/(x^2−2) needs ±1/(2√2) as log coefficients.
        let den = UniPoly::new(vec![g(-2), g(0), g(1)]);
        assert!(matches!(
            integrate_rational(&UniPoly::one(), &den),
            Err(FactorError::ExtensionRequired { .. })
        ));
    }

    #[test]
    fn repeated_factor_stress() {
        // (x^3+2x+7)/((x−1)^2 (x+2)^3) — answer checked by differentiation.
        let num = UniPoly::new(vec![g(7), g(2), g(0), g(1)]);
        let lin1 = UniPoly::new(vec![g(-1), g(1)]);
        let lin2 = UniPoly::new(vec![g(2), g(1)]);
        let den = &lin1.pow(2) * &lin2.pow(3);
        check_roundtrip(&num, &den);
    }
}
