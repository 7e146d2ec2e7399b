//! Polynomials in y whose coefficients are Laurent–Puiseux series in x.
//!
//! This is the shape of f(x, y) once its y-roots are in hand: the product
//! of (y − g_i(x)) times a series unit.  Division in this ring is what
//! turns "g is a root" into "y − g divides", and window bookkeeping rides
//! along on every coefficient.

use std::fmt;

use thiserror::Error;

use crate::poly::{BivarPoly, Var};
use crate::series::PuiseuxSeries;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesPoly {
    /// Ascending y-powers; trailing coefficients that vanish to their
    /// window are trimmed on construction.
    coeffs: Vec<PuiseuxSeries>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesPolyError {
    #[error("division by a polynomial that vanishes to truncation")]
    ZeroDivisor,
    #[error("remainder does not vanish to truncation")]
    RemainderNonzero,
}

impl SeriesPoly {
    pub fn new(mut coeffs: Vec<PuiseuxSeries>) -> Self {
        while coeffs.last().is_some_and(PuiseuxSeries::is_zero_to_trunc) {
            coeffs.pop();
        }
        SeriesPoly { coeffs }
    }

    pub fn zero() -> Self {
        SeriesPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: PuiseuxSeries) -> Self {
        Self::new(vec![c])
    }

    pub fn from_poly(f: &BivarPoly) -> Self {
        let coeffs = f
            .coefficients_wrt(Var::Y)
            .iter()
            .map(|c| PuiseuxSeries::from_poly_x(c).expect("y-coefficients involve x only"))
            .collect();
        Self::new(coeffs)
    }

    /// Monic product of (y − g) over the given roots.
    pub fn from_roots(roots: &[PuiseuxSeries]) -> Self {
        let mut acc = Self::constant(PuiseuxSeries::constant(
            crate::gaussian::GaussianRational::one(),
            PuiseuxSeries::EXACT,
        ));
        for g in roots {
            let linear = Self::new(vec![-g.clone(), PuiseuxSeries::constant(
                crate::gaussian::GaussianRational::one(),
                PuiseuxSeries::EXACT,
            )]);
            acc = &acc * &linear;
        }
        acc
    }

    /// Highest y-power whose coefficient does not vanish to its window.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero_to_trunc())
    }

    pub fn coeffs(&self) -> &[PuiseuxSeries] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> PuiseuxSeries {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| PuiseuxSeries::zero(PuiseuxSeries::EXACT))
    }

    pub fn is_zero_to_trunc(&self) -> bool {
        self.degree().is_none()
    }

    pub fn scale_series(&self, s: &PuiseuxSeries) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul_ypow(&self, k: usize) -> Self {
        if self.coeffs.is_empty() {
            return Self::zero();
        }
        let mut coeffs = vec![PuiseuxSeries::zero(PuiseuxSeries::EXACT); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    /// Coefficient-wise d/dx.
    pub fn partial_x(&self) -> Self {
        Self::new(self.coeffs.iter().map(PuiseuxSeries::derivative).collect())
    }

    /// Power-rule d/dy.
    pub fn partial_y(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale(&crate::gaussian::GaussianRational::from_integer(k as i64)))
            .collect();
        Self::new(coeffs)
    }

    /// Horner evaluation at a series argument.
    pub fn eval(&self, g: &PuiseuxSeries) -> PuiseuxSeries {
        let mut acc = PuiseuxSeries::zero(PuiseuxSeries::EXACT);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * g) + c;
        }
        acc
    }

    /// Quotient and remainder by a divisor whose leading coefficient is
    /// invertible as a series.  The remainder's y-degree ends up below the
    /// divisor's, with all cancellation certified to the running windows.
    pub fn divrem(&self, den: &Self) -> Result<(Self, Self), SeriesPolyError> {
        let dl = den.degree().ok_or(SeriesPolyError::ZeroDivisor)?;
        let lead_inv = den.coeffs[dl]
            .reciprocal()
            .map_err(|_| SeriesPolyError::ZeroDivisor)?;
        let mut rem = self.clone();
        let mut quo = vec![PuiseuxSeries::zero(PuiseuxSeries::EXACT); self.coeffs.len()];
        while let Some(rl) = rem.degree() {
            if rl < dl {
                break;
            }
            let c = &rem.coeffs[rl] * &lead_inv;
            quo[rl - dl] = &quo[rl - dl] + &c;
            let sub = den.scale_series(&c).mul_ypow(rl - dl);
            rem = &rem - &sub;
            // Cancellation of the top coefficient is exact within the
            // window; anything left means the invariant broke.
            debug_assert!(rem.degree().is_none_or(|d| d < rl));
        }
        Ok((Self::new(quo), rem))
    }

    /// Division requiring the remainder to vanish to truncation.
    pub fn divide_to_window(&self, den: &Self) -> Result<Self, SeriesPolyError> {
        let (q, r) = self.divrem(den)?;
        if r.is_zero_to_trunc() {
            Ok(q)
        } else {
            Err(SeriesPolyError::RemainderNonzero)
        }
    }
}

impl std::ops::Add for &SeriesPoly {
    type Output = SeriesPoly;
    fn add(self, rhs: &SeriesPoly) -> SeriesPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect();
        SeriesPoly::new(coeffs)
    }
}

impl std::ops::Sub for &SeriesPoly {
    type Output = SeriesPoly;
    fn sub(self, rhs: &SeriesPoly) -> SeriesPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect();
        SeriesPoly::new(coeffs)
    }
}

impl std::ops::Mul for &SeriesPoly {
    type Output = SeriesPoly;
    fn mul(self, rhs: &SeriesPoly) -> SeriesPoly {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return SeriesPoly::zero();
        }
        let n = self.coeffs.len() + rhs.coeffs.len() - 1;
        let mut acc = vec![PuiseuxSeries::zero(PuiseuxSeries::EXACT); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                acc[i + j] = &acc[i + j] + &(a * b);
            }
        }
        SeriesPoly::new(acc)
    }
}

impl std::ops::Neg for &SeriesPoly {
    type Output = SeriesPoly;
    fn neg(self) -> SeriesPoly {
        SeriesPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for SeriesPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero_to_trunc() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*y")?,
                _ => write!(f, "({c})*y^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
