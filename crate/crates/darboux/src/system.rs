//! The planar polynomial vector field P ∂/∂x + Q ∂/∂y.

use thiserror::Error;

use crate::parse::{parse_polynomial, ParseError, SystemSpec};
use crate::poly::{gcd_poly, BivarPoly, Var};

/// ẋ = P(x, y), ẏ = Q(x, y) with coprime P and Q.
///
/// Construction caches the degree d = max(deg P, deg Q), the y-degree
/// m = max(deg_y P, deg_y Q) and the y-coefficient expansions
/// P = Σ p_i(x)·yⁱ, Q = Σ q_i(x)·yⁱ, which several cofactor formulas index
/// into directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarSystem {
    p: BivarPoly,
    q: BivarPoly,
    d: u32,
    m: u32,
    p_coeffs: Vec<BivarPoly>,
    q_coeffs: Vec<BivarPoly>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    /// gcd(P, Q) is not constant; the offending factor is reported so the
    /// caller can divide it out and retry.
    #[error("P and Q share the common factor {factor}")]
    CoprimalityViolation { factor: BivarPoly },
    #[error("both components are identically zero")]
    ZeroVectorField,
}

impl PlanarSystem {
    pub fn new(p: BivarPoly, q: BivarPoly) -> Result<Self, SystemError> {
        if p.is_zero() && q.is_zero() {
            return Err(SystemError::ZeroVectorField);
        }
        let g = gcd_poly(&p, &q);
        if !g.is_constant() {
            return Err(SystemError::CoprimalityViolation { factor: g });
        }
        let d = p.total_degree().unwrap_or(0).max(q.total_degree().unwrap_or(0));
        let m = p.degree(Var::Y).unwrap_or(0).max(q.degree(Var::Y).unwrap_or(0));
        let p_coeffs = pad(p.coefficients_wrt(Var::Y), m as usize + 1);
        let q_coeffs = pad(q.coefficients_wrt(Var::Y), m as usize + 1);
        Ok(PlanarSystem { p, q, d, m, p_coeffs, q_coeffs })
    }

    /// Builds a system from parsed file content.
    pub fn from_spec(spec: &SystemSpec) -> Result<Self, SystemError> {
        let p = parse_polynomial(&spec.p_text).map_err(|e| e.shift(spec.p_offset))?;
        let q = parse_polynomial(&spec.q_text).map_err(|e| e.shift(spec.q_offset))?;
        Self::new(p, q)
    }

    pub fn p(&self) -> &BivarPoly {
        &self.p
    }

    pub fn q(&self) -> &BivarPoly {
        &self.q
    }

    /// max(deg P, deg Q).
    pub fn degree(&self) -> u32 {
        self.d
    }

    /// max(deg_y P, deg_y Q).
    pub fn y_degree(&self) -> u32 {
        self.m
    }

    /// Coefficients of yⁱ in P, polynomials in x alone, indices 0..=m.
    pub fn p_coeffs(&self) -> &[BivarPoly] {
        &self.p_coeffs
    }

    pub fn q_coeffs(&self) -> &[BivarPoly] {
        &self.q_coeffs
    }

    /// Applies the field as a derivation: X(f) = P·∂f/∂x + Q·∂f/∂y.
    pub fn apply(&self, f: &BivarPoly) -> BivarPoly {
        &(&self.p * &f.partial(Var::X)) + &(&self.q * &f.partial(Var::Y))
    }

    /// ∂P/∂x + ∂Q/∂y.
    pub fn divergence(&self) -> BivarPoly {
        &self.p.partial(Var::X) + &self.q.partial(Var::Y)
    }

    /// Whether the trajectory equation dy/dx = Q/P is linear in y, i.e.
    /// of the form dy/dx = m1(x)·y + m0(x).
    pub fn is_linear_equation(&self) -> bool {
        self.p.degree(Var::Y).unwrap_or(0) == 0 && self.q.degree(Var::Y).unwrap_or(0) <= 1
    }
}

fn pad(mut v: Vec<BivarPoly>, len: usize) -> Vec<BivarPoly> {
    while v.len() < len {
        v.push(BivarPoly::zero());
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianRational;
    use crate::parse::parse_system_file;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_integer(n)
    }

    fn system(px: &str, qy: &str) -> PlanarSystem {
        PlanarSystem::new(parse_polynomial(px).unwrap(), parse_polynomial(qy).unwrap()).unwrap()
    }

    #[test]
    fn quintic_example_degrees() {
        let sys = system(
            "-5 - 5*x + 15*y^2 - 6*x^2*y + 14*x*y^2 - 9*x*y^4",
            "5 + 2*x - 3*y - 2*x*y^2 + 6*y^3 - 3*y^5",
        );
        assert_eq!(sys.degree(), 5);
        assert_eq!(sys.y_degree(), 5);
    }

    #[test]
    fn cubic_example_y_expansion() {
        let sys = system("y + y^2 + x^2 + 4*y*x^2", "-x - 2*x^3 + 2*x*y^2");
        assert_eq!(sys.degree(), 3);
        assert_eq!(sys.y_degree(), 2);
        assert_eq!(sys.p_coeffs()[0], parse_polynomial("x^2").unwrap());
        assert_eq!(sys.p_coeffs()[1], parse_polynomial("1 + 4*x^2").unwrap());
        assert_eq!(sys.p_coeffs()[2], BivarPoly::one());
        assert_eq!(sys.q_coeffs()[0], parse_polynomial("-x - 2*x^3").unwrap());
        assert!(sys.q_coeffs()[1].is_zero());
        assert_eq!(sys.q_coeffs()[2], parse_polynomial("2*x").unwrap());
    }

    #[test]
    fn shared_factor_rejected_with_witness() {
        let err = PlanarSystem::new(
            parse_polynomial("x*y").unwrap(),
            parse_polynomial("x*y^2").unwrap(),
        )
        .unwrap_err();
        let SystemError::CoprimalityViolation { factor } = err else {
            panic!("expected coprimality rejection")
        };
        assert_eq!(factor.to_string(), "x*y");
    }

    #[test]
    fn hamiltonian_field_is_divergence_free() {
        // H = x^2 + y^2: x' = ∂H/∂y, y' = -∂H/∂x.
        let sys = system("2*y", "-2*x");
        assert!(sys.divergence().is_zero());
    }

    #[test]
    fn radial_field_divergence() {
        let sys = system("x", "y");
        assert_eq!(sys.divergence(), BivarPoly::from_int(2));
    }

    #[test]
    fn divergence_degree_bound() {
        let sys = system("(2*x+y)*(1+x) + 2*x^2*y + y^3", "y*(1+x+x*y)");
        let div = sys.divergence();
        assert!(div.total_degree().unwrap_or(0) <= sys.degree() - 1);
    }

    /// Independent derivative oracle: the difference quotient
    /// (f(x+c) − f(x))/c is a polynomial in c of degree < deg f, so its
    /// value at c = 0 — recovered by Lagrange interpolation through
    /// deg f exact sample steps — is the partial derivative, computed
    /// without using `partial` at all.
    fn derivative_by_quotients(f: &BivarPoly, var: Var, x0: &GaussianRational, y0: &GaussianRational) -> GaussianRational {
        let deg = f.degree(var).unwrap_or(0).max(1) as i64;
        let at = |c: &GaussianRational| {
            let (x, y) = match var {
                Var::X => (&(x0 + c), y0),
                Var::Y => (x0, &(y0 + c)),
            };
            let shifted = match var {
                Var::X => f.eval(x, y),
                Var::Y => f.eval(x, y),
            };
            &(&shifted - &f.eval(x0, y0)) / c
        };
        // Lagrange interpolation of the quotient polynomial at c = 0.
        let nodes: Vec<GaussianRational> = (1..=deg).map(g).collect();
        let mut total = GaussianRational::zero();
        for (j, cj) in nodes.iter().enumerate() {
            let mut weight = GaussianRational::one();
            for (k, ck) in nodes.iter().enumerate() {
                if j != k {
                    weight = &weight * &(&(-ck) / &(cj - ck));
                }
            }
            total = &total + &(&at(cj) * &weight);
        }
        total
    }

    #[test]
    fn divergence_matches_difference_quotient_oracle() {
        let sys = system("(2*x+y)*(1+x) + 2*x^2*y + y^3", "y*(1+x+x*y)");
        let div = sys.divergence();
        let samples = [(0, 0), (1, 2), (-1, 3), (2, -2), (5, 7)];
        for (a, b) in samples {
            let (x0, y0) = (g(a), g(b));
            let expected = &derivative_by_quotients(sys.p(), Var::X, &x0, &y0)
                + &derivative_by_quotients(sys.q(), Var::Y, &x0, &y0);
            assert_eq!(div.eval(&x0, &y0), expected, "at ({a}, {b})");
        }
    }

    #[test]
    fn file_to_system_pipeline() {
        let text = "dx = y\ndy = -x - y\noption.order = 8\n";
        let spec = parse_system_file(text).unwrap();
        let sys = PlanarSystem::from_spec(&spec).unwrap();
        assert_eq!(sys.degree(), 1);
        assert_eq!(sys.apply(&parse_polynomial("x^2 + y^2").unwrap()).to_string(), "-2*y^2");
    }
}
